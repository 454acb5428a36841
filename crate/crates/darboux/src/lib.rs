//! Contact Hamiltonian dynamics on the extended cotangent bundle `T*Q x R`.
//!
//! The phase space carries Darboux coordinates `(q^1..q^n, p_1..p_n, z)` and the
//! canonical contact form `eta = dz - p_i dq^i`. Around that chart this crate
//! provides:
//!
//! - [`expr`]: a small expression language so Hamiltonians, potentials and
//!   candidate sections can be supplied as text without recompiling;
//! - [`autodiff`]: exact first and second partial derivatives of compiled
//!   fields through forward-mode dual numbers, plus a finite-difference
//!   cross-checker;
//! - [`contact`]: the Reeb field, the flat/sharp isomorphisms, the induced
//!   Jacobi bracket, and the Hamiltonian and evolution vector fields;
//! - [`flow`]: fixed-step Runge-Kutta integration of both dynamics with
//!   conservation/dissipation diagnostics;
//! - [`section`]: classification of candidate sections (coisotropic images,
//!   Lagrangian leaves, Legendrian graphs) and residual checks for the
//!   Hamilton-Jacobi equations of both vector fields, including the direct
//!   gamma-relatedness test;
//! - [`symplectify`]: the degree-1 homogeneous symplectic model on
//!   `T*(Q x R)`, the projection back to the contact chart, pushforward
//!   verification, and the lift of contact Hamilton-Jacobi solutions to
//!   symplectic ones;
//! - [`systems`]: ready-made example systems (particle with linear
//!   dissipation, classical ideal gas) with constructed exact solutions;
//! - [`cli`]: the command-line front end used by the `darboux` binary.
//!
//! Every runnable capability has a matching program under `examples/`.

pub mod autodiff;
pub mod cli;
pub mod contact;
pub mod expr;
pub mod flow;
pub mod sampling;
pub mod section;
pub mod symplectify;
pub mod systems;

pub use autodiff::{fd_check, gradient, jacobian, EvalError, ScalarField, VectorField};
pub use contact::ContactState;
pub use expr::{compile, parse, VariableLayout};
