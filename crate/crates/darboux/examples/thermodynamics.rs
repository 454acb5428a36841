//! The classical ideal gas as a contact Hamiltonian system in the energy
//! representation: equilibrium solutions and quasistatic processes.
//!
//! Run with: cargo run --example thermodynamics

use darboux::contact::{eval_field, evolution_field, hamiltonian_field};
use darboux::flow::FieldKind;
use darboux::section::{
    gamma_related_check, hj_residual_hamiltonian_jet, legendrian_check, Grid, Section,
};
use darboux::systems::{ideal_gas, ideal_gas_solution};
use darboux::ContactState;

fn main() {
    let preset = ideal_gas(2.0).unwrap();
    println!("system: {} ({})", preset.name, preset.notes);
    println!("chart:  q = (S, V, N), p = (T, negP, mu) with negP = -P, z = U");

    // the process generated by X_H at the all-ones state
    let x = ContactState::new(vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 1.0], 1.0).unwrap();
    let xh = eval_field(&hamiltonian_field(&preset.hamiltonian), &x).unwrap();
    println!("\nX_H at all-ones state (S', V', N', T', negP', mu', U'):");
    println!("  {:?}", xh.components);
    println!(
        "  i.e. P' = {}, an isochoric isothermal process (V, T fixed)",
        -xh.components[4]
    );
    let ev = eval_field(&evolution_field(&preset.hamiltonian), &x).unwrap();
    println!("evolution field U' = {} (T S - R N T + mu N = 0 here)", ev.components[6]);

    // gamma_U = N G(S/N + R log N, V) solves H o gamma = 0 for any G
    let grid = Grid::cube(3, 0.5, 2.0, 5);
    for profile in ["c", "c^2", "c*V"] {
        let gamma = ideal_gas_solution(2.0, profile).unwrap();
        let legendrian = legendrian_check(&gamma, &grid, 1e-9).unwrap().legendrian;
        let report =
            hj_residual_hamiltonian_jet(&preset.hamiltonian, &gamma, &grid, 1e-10).unwrap();
        println!(
            "\nG(c, V) = {profile:<5} legendrian: {legendrian}  residual |H o gamma|: {:.2e}  pass: {}",
            report.max_residual, report.pass
        );
    }

    // quasistatic processes: H vanishes on the equilibrium graph exactly
    // when X_H is tangent to it
    let gamma = ideal_gas_solution(2.0, "c").unwrap();
    println!(
        "\nfor G = c: gamma_U = S + R N log N; at (1,1,1) the jet is (T, negP, mu) = ({}, {}, {})",
        gamma.components()[0].eval(&[1.0, 1.0, 1.0]).unwrap(),
        gamma.components()[1].eval(&[1.0, 1.0, 1.0]).unwrap(),
        gamma.components()[2].eval(&[1.0, 1.0, 1.0]).unwrap(),
    );
    let related = gamma_related_check(
        &preset.hamiltonian,
        FieldKind::Hamiltonian,
        &Section::Jet(gamma),
        &grid,
        1e-9,
    )
    .unwrap();
    println!(
        "X_H is tangent to the equilibrium graph: mismatch {:.2e}, pass {}",
        related.max_mismatch, related.pass
    );
}
