//! The homogeneous symplectic model: homogenization, the projection maps,
//! and the pushforward relation between the two dynamics.
//!
//! Run with: cargo run --example symplectification

use darboux::expr::{compile_str, VariableLayout};
use darboux::sampling::SplitMix64;
use darboux::symplectify::{homogenize, phi, psi, pushforward_check, symplectic_rhs, HomogeneousState};

fn main() {
    let h = compile_str("p1^2/2 + q1^2/2 + 0.1*z", &VariableLayout::contact(1)).unwrap();
    let h_tilde = homogenize(&h);

    // H~(q, z, P, Pz) = -Pz H(q, -P/Pz, z) is degree-1 homogeneous
    let x = HomogeneousState::new(vec![1.0], 2.0, vec![3.0], -1.0);
    println!("H~ at (q, z, P, Pz) = (1, 2, 3, -1): {}", h_tilde.eval(&x.to_vec()).unwrap());
    for lambda in [-2.0, 0.5, 3.0] {
        let scaled = HomogeneousState::new(vec![1.0], 2.0, vec![3.0 * lambda], -lambda);
        println!(
            "  H~(lambda P) / lambda for lambda = {lambda:>4}: {}",
            h_tilde.eval(&scaled.to_vec()).unwrap() / lambda
        );
    }

    // the projection and its log-time variant
    let c = phi(&x).unwrap();
    println!("\nPhi(1, 2, 3, -1)  = (q, p, z) = ({}, {}, {})", c.q[0], c.p[0], c.z);
    let (c2, t) = psi(&x).unwrap();
    println!("Psi(1, 2, 3, -1)  = (q, p, z, t) = ({}, {}, {}, {})", c2.q[0], c2.p[0], c2.z, t);
    println!("Phi at Pz = 0     = {:?}", phi(&HomogeneousState::new(vec![0.0], 0.0, vec![1.0], 0.0)));

    // the symplectic dynamics upstairs projects onto the contact dynamics
    println!("\nX_H~ at the point: {:?}", symplectic_rhs(&h_tilde, &x).unwrap());
    let mut rng = SplitMix64::new(0);
    let points: Vec<HomogeneousState> = (0..50)
        .map(|_| {
            HomogeneousState::new(
                vec![rng.uniform(-2.0, 2.0)],
                rng.uniform(-2.0, 2.0),
                vec![rng.uniform(-2.0, 2.0)],
                rng.uniform(0.1, 10.0) * rng.sign(),
            )
        })
        .collect();
    let report = pushforward_check(&h, &points, 1e-9).unwrap();
    println!(
        "pushforward check on {} random points with |Pz| in [0.1, 10]: max error {:.2e} -> {}",
        report.samples,
        report.max_error,
        if report.pass { "pass" } else { "FAIL" }
    );
}
