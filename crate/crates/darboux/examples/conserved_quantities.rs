//! Conserved quantities along the two flows, and why independent first
//! integrals of complete solutions can never be in involution: the bracket
//! obstruction {f, g} + f R(g) - g R(f) = Lambda(df, dg).
//!
//! Run with: cargo run --example conserved_quantities

use darboux::expr::{compile_str, VariableLayout};
use darboux::flow::FieldKind;
use darboux::section::{conserved_check, involution_defect};
use darboux::ContactState;

fn main() {
    let layout = VariableLayout::contact(1);
    let h = compile_str("p1^2/2 + q1^2/2 + 0.1*z", &layout).unwrap();
    let x0 = ContactState::new(vec![1.0], vec![1.0], 1.0).unwrap();

    // H is a first integral of its own evolution field
    let report = conserved_check(
        &h,
        FieldKind::Evolution,
        std::slice::from_ref(&h),
        &x0,
        10.0,
        1e-3,
        1e-8,
    )
    .unwrap();
    println!(
        "evolution flow conserves H: drift {:.2e} over {} samples -> {}",
        report.drifts[0],
        report.samples,
        if report.pass { "pass" } else { "FAIL" }
    );

    // without z-dependence the Hamiltonian flow conserves H as well
    let h0 = compile_str("p1^2/2 + q1^2/2", &layout).unwrap();
    let report = conserved_check(
        &h0,
        FieldKind::Hamiltonian,
        std::slice::from_ref(&h0),
        &x0,
        10.0,
        1e-3,
        1e-8,
    )
    .unwrap();
    println!(
        "lam = 0 Hamiltonian flow conserves H: drift {:.2e} -> {}",
        report.drifts[0],
        if report.pass { "pass" } else { "FAIL" }
    );

    // the involution obstruction Lambda(df, dg) at a state
    let q = compile_str("q1", &layout).unwrap();
    let p = compile_str("p1", &layout).unwrap();
    let z = compile_str("z", &layout).unwrap();
    let x = ContactState::new(vec![3.0], vec![-0.4], 0.8).unwrap();
    println!("\ninvolution defects Lambda(df, dg) at (3, -0.4, 0.8):");
    println!("  (q1, p1): {}", involution_defect(&q, &p, &x).unwrap());
    println!("  (z,  q1): {}", involution_defect(&z, &q, &x).unwrap());
    println!("  (z,  p1): {}", involution_defect(&z, &p, &x).unwrap());
    println!("  (H,  H):  {}", involution_defect(&h, &h, &x).unwrap());
    println!(
        "\nconserved quantities of a complete solution satisfy\n\
         {{f_i, f_j}} = -f_i R(f_j) + f_j R(f_i), so the defect above must\n\
         vanish on the solution graph: independence and involution exclude\n\
         each other there."
    );
}
