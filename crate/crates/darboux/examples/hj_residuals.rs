//! Hamilton-Jacobi residuals for both vector fields and both section
//! types, cross-validated against the direct gamma-relatedness test.
//!
//! Run with: cargo run --example hj_residuals

use darboux::expr::{compile_str, VariableLayout};
use darboux::flow::FieldKind;
use darboux::section::{
    gamma_related_check, hj_residual_evolution, hj_residual_evolution_jet,
    hj_residual_hamiltonian, hj_residual_hamiltonian_jet, Grid, JetSection, MomentumSection,
    Section,
};
use darboux::systems::{linear_dissipation, linear_dissipation_matched_potential,
    linear_dissipation_solution};

fn main() {
    let tol = 1e-9;
    let contact1 = VariableLayout::contact(1);
    let qz1 = VariableLayout::new(&["q1", "z"]).unwrap();
    let q1 = VariableLayout::new(&["q1"]).unwrap();
    let grid_qz = Grid::cube(2, -1.0, 1.0, 7);
    let grid_q = Grid::cube(1, -1.0, 1.0, 11);

    println!("== Hamiltonian field, momentum section over (q, z) ==");
    let h = compile_str("p1^2/2 - q1^2/2", &contact1).unwrap();
    let gamma = MomentumSection::new(vec![compile_str("q1", &qz1).unwrap()]);
    let report = hj_residual_hamiltonian(&h, &gamma, &grid_qz, tol).unwrap();
    println!("closed solution:        residual {:.2e}, pass {}", report.max_residual, report.pass);

    let h_bad = compile_str("p1^2/2 + z", &contact1).unwrap();
    let report = hj_residual_hamiltonian(&h_bad, &gamma, &grid_qz, tol).unwrap();
    let related = gamma_related_check(
        &h_bad,
        FieldKind::Hamiltonian,
        &Section::Momentum(gamma.clone()),
        &grid_qz,
        tol,
    )
    .unwrap();
    println!(
        "dissipative mismatch:   residual {:.3}, relatedness mismatch {:.3} (worst row {:?})",
        report.max_residual, related.max_mismatch, related.worst_row
    );

    println!("\n== Hamiltonian field, jet section over q (H o gamma = 0) ==");
    let potential = linear_dissipation_matched_potential(1.0, 0.1, 0.0, 2.0);
    let preset = linear_dissipation(1.0, 0.1, &potential).unwrap();
    let gamma = linear_dissipation_solution(2.0);
    let report = hj_residual_hamiltonian_jet(&preset.hamiltonian, &gamma, &grid_q, tol).unwrap();
    println!("matched solution:       residual {:.2e}, pass {}", report.max_residual, report.pass);

    let free = compile_str("p1^2/2", &contact1).unwrap();
    let quad = JetSection::one_jet(&compile_str("q1^2", &q1).unwrap());
    let report = hj_residual_hamiltonian_jet(&free, &quad, &grid_q, tol).unwrap();
    println!("quadratic jet:          residual {:.3} (H o gamma = 2 q^2)", report.max_residual);

    println!("\n== evolution field, momentum section ==");
    let gamma_const = MomentumSection::new(vec![compile_str("3", &qz1).unwrap()]);
    let report = hj_residual_evolution(&free, &gamma_const, &grid_qz, tol).unwrap();
    println!("constant section:       residual {:.2e}, pass {}", report.max_residual, report.pass);

    println!("\n== evolution field, jet section (d(H o gamma) = 0) ==");
    for k in [0.0, 1.0] {
        let potential = linear_dissipation_matched_potential(1.0, 0.1, k, 2.0);
        let preset = linear_dissipation(1.0, 0.1, &potential).unwrap();
        let report =
            hj_residual_evolution_jet(&preset.hamiltonian, &gamma, &grid_q, tol).unwrap();
        println!(
            "matched solution k = {k}: residual {:.2e}, attained constant {:.6}",
            report.max_residual,
            report.constant.unwrap()
        );
    }

    // a jet section that is Legendrian but solves nothing
    let oscillator = linear_dissipation(1.0, 0.1, "q1^2/2").unwrap();
    let report = hj_residual_evolution_jet(&oscillator.hamiltonian, &quad, &grid_q, tol).unwrap();
    println!(
        "quadratic jet:          residual {:.3} (gradient of 2.6 q^2)",
        report.max_residual
    );
}
