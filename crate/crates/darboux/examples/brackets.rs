//! The contact structure in action: Reeb field, flat/sharp isomorphisms,
//! Hamiltonian and evolution fields, and the Jacobi bracket.
//!
//! Run with: cargo run --example brackets

use darboux::contact::{
    eta, eval_field, evolution_field, flat, hamiltonian_field, jacobi_bracket, lie_bracket,
    frame_a, frame_b, reeb, sharp,
};
use darboux::expr::{compile_str, VariableLayout};
use darboux::ContactState;

fn main() {
    let layout = VariableLayout::contact(1);
    let x = ContactState::new(vec![3.0], vec![2.0], 0.5).unwrap();

    // Reeb field pairs to 1 with eta and flats to eta itself
    let r = eval_field(&reeb(1), &x).unwrap();
    println!("eta(R)            = {}", eta(&r));
    let alpha = flat(&r);
    println!("flat(R)           = {:?} (dq, dp, dz) -> this is eta at p = 2", alpha.components);
    let back = sharp(&alpha);
    println!("sharp(flat(R))    = {:?}", back.components);

    // Hamiltonian and evolution fields of the dissipative oscillator
    let h = compile_str("p1^2/2 + q1^2/2 + 0.1*z", &layout).unwrap();
    let xh = eval_field(&hamiltonian_field(&h), &x).unwrap();
    let ev = eval_field(&evolution_field(&h), &x).unwrap();
    println!("\nH                 = {}", h.eval(&x.to_vec()).unwrap());
    println!("X_H               = {:?}", xh.components);
    println!("E_H               = {:?}", ev.components);
    println!("eta(X_H)          = {} (equals -H)", eta(&xh));

    // canonical Jacobi bracket values
    let q = compile_str("q1", &layout).unwrap();
    let p = compile_str("p1", &layout).unwrap();
    let z = compile_str("z", &layout).unwrap();
    println!("\n{{q1, p1}}          = {}", jacobi_bracket(&q, &p, &x).unwrap());
    println!("{{z, q1}}           = {} (equals q1)", jacobi_bracket(&z, &q, &x).unwrap());
    println!("{{H, H}}            = {}", jacobi_bracket(&h, &h, &x).unwrap());

    // the horizontal Darboux frame closes onto the Reeb direction
    let bracket = lie_bracket(&frame_a(1, 0), &frame_b(1, 0), &x).unwrap();
    println!("\n[A_1, B^1]        = {:?} (equals -R)", bracket.components);
}
