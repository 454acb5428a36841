//! Lift a contact Hamilton-Jacobi section to a Lagrangian section of
//! T*(Q x R) by integrating the frame equations along characteristics.
//!
//! Run with: cargo run --example lift

use darboux::expr::{compile_str, VariableLayout};
use darboux::section::{Grid, MomentumSection};
use darboux::symplectify::{exp_z_form_check, lift_section_with, LiftOptions, SymplecticSection};

fn main() {
    let qz = VariableLayout::new(&["q1", "z"]).unwrap();

    // gamma = 2 q z has coisotropic image with Lagrangian leaves and
    // dgamma/dz = (1/z) gamma away from z = 0
    let gamma = MomentumSection::new(vec![compile_str("2*q1*z", &qz).unwrap()]);
    let sigma = compile_str("1/z", &qz).unwrap();
    let grid = Grid::mesh(vec![(-1.0, 1.0), (0.5, 1.5)], vec![9, 5]);

    let result = lift_section_with(
        &gamma,
        &sigma,
        &grid,
        1e-9,
        LiftOptions { base: Some(vec![0.0]), ..LiftOptions::default() },
    )
    .unwrap();

    println!("lift of gamma = 2 q z (known closed form: gamma~_t = exp(-q^2)):");
    println!("{:>6} {:>6} {:>14} {:>14} {:>10}", "q", "z", "gamma~_t", "exp(-q^2)", "error");
    for x in grid.points().iter().step_by(7) {
        let t = result.section.gamma_t().eval(x).unwrap();
        let exact = (-x[0] * x[0]).exp();
        println!(
            "{:>6.2} {:>6.2} {:>14.10} {:>14.10} {:>10.2e}",
            x[0],
            x[1],
            t,
            exact,
            (t - exact).abs()
        );
    }
    println!(
        "Lagrangian-graph defect of the output: {:.2e}",
        result.lagrangian_defect
    );

    // the lifted momenta recover the contact section: -gamma~_Q / gamma~_t
    let x = [0.5, 1.0];
    let t = result.section.gamma_t().eval(&x).unwrap();
    let gq = result.section.gamma_q()[0].eval(&x).unwrap();
    println!(
        "\nprojection relation at (q, z) = (0.5, 1): -gamma~_Q/gamma~_t = {} vs gamma = {}",
        -gq / t,
        gamma.components()[0].eval(&x).unwrap()
    );

    // sections whose momenta carry the exp(z) profile correspond to
    // Legendrian frozen slices
    let profile = SymplecticSection::new(
        vec![compile_str("exp(z)*q1", &qz).unwrap()],
        compile_str("1", &qz).unwrap(),
    );
    let report = exp_z_form_check(&profile, &Grid::cube(2, -1.0, 1.0, 5), 1e-12).unwrap();
    println!(
        "\nexp(z) profile check on gamma~_1 = exp(z) q: defect {:.2e} -> {}",
        report.max_defect,
        if report.pass { "pass" } else { "FAIL" }
    );
}
