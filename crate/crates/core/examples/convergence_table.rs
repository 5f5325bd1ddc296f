//! Solution-error convergence orders for all four schemes and both initial
//! conditions, measured on the 6 x 21 data grid across the step ladder.
//!
//! Run with `cargo run --example convergence_table`.

use advectfit_core::{
    analytic::analytic_solution_matrix, estimate_order, l1_error, make_grid, sample_to_data_grid,
    solve, InitialCondition, ParameterVector, SchemeKind, SolverConfig, H_LADDER,
};

fn main() {
    let grid = make_grid(6, 21).expect("valid grid");
    for (ic, theta0) in [
        (InitialCondition::Discontinuous, ParameterVector::new(0.3, 0.5)),
        (InitialCondition::Continuous, ParameterVector::new(0.3, 0.4)),
    ] {
        println!(
            "phi_{} at theta0 = ({}, {})",
            ic.label(),
            theta0.alpha,
            theta0.beta
        );
        let reference = analytic_solution_matrix(&theta0, &grid, ic);
        for scheme in SchemeKind::ALL {
            let mut errors = Vec::with_capacity(H_LADDER.len());
            for &h in &H_LADDER {
                let cfg = SolverConfig::standard(h, scheme, &theta0);
                let sol = solve(&theta0, &cfg, ic, &grid.times).expect("stable solve");
                let sampled = sample_to_data_grid(&sol, &grid).expect("sampling");
                errors.push(l1_error(&sampled, &reference).expect("shape"));
            }
            let fit = estimate_order(&H_LADDER, &errors, None).expect("order fit");
            print!("  {:<18} p = {:+.4}  R^2 = {:.4}  E(h):", scheme.label(), fit.p, fit.r_squared);
            for e in &errors {
                print!(" {e:.3e}");
            }
            println!();
        }
    }
}
