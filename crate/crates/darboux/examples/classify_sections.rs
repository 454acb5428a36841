//! Classify candidate sections: coisotropic images, Lagrangian leaves,
//! Legendrian graphs.
//!
//! Run with: cargo run --example classify_sections

use darboux::expr::{compile_str, VariableLayout};
use darboux::section::{classify_section, legendrian_check, Grid, JetSection, MomentumSection};

fn main() {
    let tol = 1e-9;
    let qz2 = VariableLayout::new(&["q1", "q2", "z"]).unwrap();
    let qz1 = VariableLayout::new(&["q1", "z"]).unwrap();
    let q1 = VariableLayout::new(&["q1"]).unwrap();

    println!("momentum sections over (q, z):");
    let cases: Vec<(&str, MomentumSection, Grid)> = vec![
        (
            "gamma = (1, -2) constant",
            MomentumSection::new(vec![
                compile_str("1", &qz2).unwrap(),
                compile_str("-2", &qz2).unwrap(),
            ]),
            Grid::cube(3, -1.0, 1.0, 4),
        ),
        (
            "gamma = 2 q z (n = 1)",
            MomentumSection::new(vec![compile_str("2*q1*z", &qz1).unwrap()]),
            Grid::cube(2, -1.0, 1.0, 5),
        ),
        (
            "gamma = (z q2, -z q1)",
            MomentumSection::new(vec![
                compile_str("z*q2", &qz2).unwrap(),
                compile_str("-z*q1", &qz2).unwrap(),
            ]),
            Grid::cube(3, -1.0, 1.0, 4),
        ),
        (
            "gamma = e^z (q2, q1)",
            MomentumSection::new(vec![
                compile_str("exp(z)*q2", &qz2).unwrap(),
                compile_str("exp(z)*q1", &qz2).unwrap(),
            ]),
            Grid::cube(3, -1.0, 1.0, 4),
        ),
    ];
    for (name, gamma, grid) in &cases {
        let report = classify_section(gamma, grid, tol).unwrap();
        println!(
            "  {name:<22} lagrangian leaves: {:<5} coisotropic: {:<5} (curl {:.1e}, prop {:.1e})",
            report.lagrangian_leaves,
            report.coisotropic,
            report.curl_defect,
            report.proportionality_defect,
        );
    }

    println!("\nsections over q (Legendrian iff a 1-jet):");
    let f = compile_str("q1^2", &q1).unwrap();
    let one_jet = JetSection::one_jet(&f);
    let grid = Grid::cube(1, -1.0, 1.0, 9);
    let report = legendrian_check(&one_jet, &grid, tol).unwrap();
    println!(
        "  j1(q^2) = (q, 2q, q^2)     legendrian: {:<5} (defect {:.1e})",
        report.legendrian, report.max_defect
    );

    let skew = JetSection::new(
        vec![compile_str("1", &q1).unwrap()],
        compile_str("0", &q1).unwrap(),
    );
    let report = legendrian_check(&skew, &grid, tol).unwrap();
    println!(
        "  gamma = (q, 1, 0)          legendrian: {:<5} (defect {:.1e})",
        report.legendrian, report.max_defect
    );
}
