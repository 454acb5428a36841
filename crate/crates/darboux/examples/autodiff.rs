//! Compile expressions into scalar fields and differentiate them exactly.
//!
//! Run with: cargo run --example autodiff

use darboux::autodiff::fd_check;
use darboux::expr::{compile, parse, pretty, VariableLayout};

fn main() {
    // a dissipative Hamiltonian on the chart (q1, p1, z) with parameters
    let layout = VariableLayout::contact(1)
        .with_param("m", 1.0)
        .unwrap()
        .with_param("lam", 0.1)
        .unwrap();
    let source = "p1^2/(2*m) + q1^2/2 + lam*z";
    let ast = parse(source, &layout).expect("valid source");
    println!("source:       {source}");
    println!("pretty-print: {}", pretty(&ast, &layout));

    let h = compile(&ast, &layout);
    let x = [1.0, 1.0, 1.0];
    println!("H(1, 1, 1)  = {}", h.eval(&x).unwrap());
    println!("grad H      = {:?}", h.gradient(&x).unwrap());
    println!("d2H/dp1dp1  = {}", h.partial2(1, 1, &x).unwrap());

    // derivative fields are fields too
    let dh_dq = h.partial_field(0);
    println!("dH/dq1 at (2, 0, 0) = {}", dh_dq.eval(&[2.0, 0.0, 0.0]).unwrap());

    // cross-check every partial against central differences
    let report = fd_check(
        &h,
        &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        100,
        1e-6,
        1e-6,
        0,
    )
    .unwrap();
    println!(
        "finite-difference check: {} samples, worst relative error {:.3e} -> {}",
        report.samples,
        report.worst_rel_error,
        if report.pass() { "pass" } else { "FAIL" }
    );

    // evaluation refuses to propagate non-finite values
    let pole = darboux::expr::compile_str("1/q1", &VariableLayout::contact(1)).unwrap();
    println!("1/q1 at q1 = 0: {:?}", pole.eval(&[0.0, 0.0, 0.0]));
}
