//! Built-in example systems with constructed exact solutions.
//!
//! Two presets ship with the crate:
//!
//! - **linear dissipation**: a particle with Hamiltonian
//!   `H = p^2/(2m) + V(q) + lambda z` whose Hamiltonian flow dissipates
//!   energy at the constant rate `lambda` while the evolution flow
//!   conserves it;
//! - **ideal gas**: the thermodynamic phase space with extensive
//!   coordinates `(S, V, N)`, conjugate chart `(T, -P, mu)`, internal
//!   energy `U` as the contact coordinate, and
//!   `H = T S - R N T + mu N - U`, whose Hamiltonian field generates an
//!   isochoric isothermal process.
//!
//! Each preset comes with families of exact Hamilton-Jacobi solutions
//! built from the structure of its characteristics, which serve as the
//! acceptance corpus for the residual checks.

use thiserror::Error;

use crate::autodiff::{EvalError, EvalScalar, FieldFn, Polynomial, ScalarField};
use crate::expr::{compile, parse, ParseError, VariableLayout};
use crate::section::{Grid, JetSection};

/// A named Hamiltonian system on a contact chart.
#[derive(Clone, Debug)]
pub struct SystemPreset {
    pub name: String,
    pub n: usize,
    pub layout: VariableLayout,
    pub hamiltonian: ScalarField,
    pub notes: String,
}

/// Errors building or evaluating presets.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SystemError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Particle with linear dissipation: `H = p1^2/(2m) + V(q1) + lam*z`.
///
/// The potential is an expression in `q1` (the parameters `m` and `lam`
/// may appear in it too).
pub fn linear_dissipation(
    mass: f64,
    lambda: f64,
    potential: &str,
) -> Result<SystemPreset, SystemError> {
    if !(mass > 0.0) {
        return Err(SystemError::BadParameter(format!(
            "mass must be positive, got {mass}"
        )));
    }
    let layout = VariableLayout::contact(1)
        .with_param("m", mass)?
        .with_param("lam", lambda)?;
    let v_expr = parse(potential, &layout)?;
    let kinetic = parse("p1^2/(2*m)", &layout).expect("static expression");
    let forcing = parse("lam*z", &layout).expect("static expression");
    let h = crate::expr::Expr::Bin(
        crate::expr::BinOp::Add,
        Box::new(crate::expr::Expr::Bin(
            crate::expr::BinOp::Add,
            Box::new(kinetic),
            Box::new(v_expr),
        )),
        Box::new(forcing),
    );
    Ok(SystemPreset {
        name: "linear-dissipation".to_string(),
        n: 1,
        hamiltonian: compile(&h, &layout),
        layout,
        notes: format!("m = {mass}, lam = {lambda}, V = {potential}"),
    })
}

/// The potential that makes [`linear_dissipation_solution`] exact:
/// `V(q) = k - alpha^2/(2m) - lambda*alpha*q`.
pub fn linear_dissipation_matched_potential(
    mass: f64,
    lambda: f64,
    k: f64,
    alpha: f64,
) -> String {
    let constant = k - alpha * alpha / (2.0 * mass);
    let slope = -(lambda * alpha);
    format!("{constant} + {slope}*q1")
}

/// The affine section `gamma_z = alpha q`, `gamma_p = alpha`, which solves
/// the evolution Hamilton-Jacobi equation with constant `k` for the
/// matched potential (and the Hamiltonian one when `k = 0`).
pub fn linear_dissipation_solution(alpha: f64) -> JetSection {
    let z_map = Polynomial::new(1, vec![(alpha, vec![1])]).field();
    JetSection::one_jet(&z_map)
}

/// Classical ideal gas in the energy representation.
///
/// Chart: `q = (S, V, N)`, `p = (T, negP, mu)` with `negP = -P` (so the
/// contact form is `dU - T dS + P dV - mu dN`), `z = U`;
/// `H = T*S - R*N*T + mu*N - U`.
pub fn ideal_gas(gas_constant: f64) -> Result<SystemPreset, SystemError> {
    if !(gas_constant > 0.0) {
        return Err(SystemError::BadParameter(format!(
            "the gas constant must be positive, got {gas_constant}"
        )));
    }
    let layout = VariableLayout::contact_named(&["S", "V", "N"], &["T", "negP", "mu"], "U")?
        .with_param("R", gas_constant)?;
    let h = parse("T*S - R*N*T + mu*N - U", &layout).expect("static expression");
    Ok(SystemPreset {
        name: "ideal-gas".to_string(),
        n: 3,
        hamiltonian: compile(&h, &layout),
        layout,
        notes: format!("R = {gas_constant}, energy representation"),
    })
}

/// `gamma_U(S, V, N) = N G(S/N + R log N, V)` for an arbitrary profile
/// `G(c, V)`: the first argument is constant along the characteristics
/// `S' = S - RN`, `N' = N`, and the prefactor `N` matches their growth, so
/// `H` vanishes on the 1-jet graph of `gamma_U` identically on `{N > 0}`.
pub fn ideal_gas_solution(
    gas_constant: f64,
    profile: &str,
) -> Result<JetSection, SystemError> {
    let g_layout = VariableLayout::new(&["c", "V"])?.with_param("R", gas_constant)?;
    let g = crate::expr::compile_str(profile, &g_layout)?;
    let potential = ScalarField::new(GasPotential { g, r: gas_constant });
    Ok(JetSection::one_jet(&potential))
}

struct GasPotential {
    g: ScalarField,
    r: f64,
}

impl FieldFn for GasPotential {
    fn dim(&self) -> usize {
        3
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let (s, v, n) = (x[0], x[1], x[2]);
        if n.re() <= 0.0 {
            return Err(EvalError::Domain { func: "log", arg: n.re() });
        }
        let invariant = s / n + n.ln().scale(self.r);
        Ok(n * self.g.eval_scalar(&[invariant, v])?)
    }
}

/// Candidate section for the linear-dissipation energy equation with
/// `V = q^2/2`, obtained by the linear integrating-factor quadrature
/// `gamma_p = exp(-2 m lam q) integral (2mk - 2mV) exp(2 m lam q) dq`
/// (integration constant 0, `gamma_z(0) = 0`).
///
/// The energy equation is quadratic in `dgamma_z/dq`, so this candidate is
/// generally *not* a solution; it exists so its residual can be measured
/// and reported. Use [`quadrature_candidate_energy_residual`] for that.
pub fn quadrature_candidate(mass: f64, lambda: f64, k: f64) -> JetSection {
    assert!(mass > 0.0 && lambda != 0.0);
    let a = 2.0 * mass * lambda;
    // gamma_p = 2mk/a - 2m/a^3 + (2m/a^2) q - (m/a) q^2, integrated term
    // by term for gamma_z with gamma_z(0) = 0
    let c0 = 2.0 * mass * k / a - 2.0 * mass / (a * a * a);
    let c1 = 2.0 * mass / (a * a);
    let c2 = -mass / a;
    let gamma_p = Polynomial::new(1, vec![(c0, vec![0]), (c1, vec![1]), (c2, vec![2])]);
    let gamma_z = Polynomial::new(
        1,
        vec![(c0, vec![1]), (c1 / 2.0, vec![2]), (c2 / 3.0, vec![3])],
    );
    JetSection::new(vec![gamma_p.field()], gamma_z.field())
}

/// Max of `|H o gamma - k|` on the grid for [`quadrature_candidate`]
/// against `H = p^2/(2m) + q^2/2 + lam z`.
pub fn quadrature_candidate_energy_residual(
    mass: f64,
    lambda: f64,
    k: f64,
    grid: &Grid,
) -> Result<f64, SystemError> {
    let preset = linear_dissipation(mass, lambda, "q1^2/2")?;
    let candidate = quadrature_candidate(mass, lambda, k);
    let pullback = candidate.pullback(&preset.hamiltonian);
    let mut worst = 0.0f64;
    for q in grid.points() {
        worst = worst.max((pullback.eval(&q)? - k).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{eval_field, evolution_field, hamiltonian_field};
    use crate::flow::{dissipation_report, integrate, FieldKind};
    use crate::sampling::SplitMix64;
    use crate::section::{
        gamma_related_check, hj_residual_evolution_jet, hj_residual_hamiltonian_jet,
        legendrian_check, Section,
    };
    use crate::ContactState;

    #[test]
    fn dissipative_preset_field_values() {
        let preset = linear_dissipation(1.0, 0.1, "q1^2/2").unwrap();
        let x = ContactState::new(vec![1.0], vec![1.0], 1.0).unwrap();
        let xh = eval_field(&hamiltonian_field(&preset.hamiltonian), &x).unwrap();
        assert!((xh.components[0] - 1.0).abs() < 1e-14);
        assert!((xh.components[1] + 1.1).abs() < 1e-14);
        assert!((xh.components[2] + 0.1).abs() < 1e-14);
    }

    #[test]
    fn lambda_zero_fields_differ_by_h_reeb_only() {
        let preset = linear_dissipation(1.0, 0.0, "q1^2/2").unwrap();
        let h = &preset.hamiltonian;
        let x = ContactState::new(vec![0.7], vec![-0.4], 2.0).unwrap();
        let xh = eval_field(&hamiltonian_field(h), &x).unwrap();
        let ev = eval_field(&evolution_field(h), &x).unwrap();
        let hv = h.eval(&x.to_vec()).unwrap();
        assert_eq!(ev.components[0], xh.components[0]);
        assert_eq!(ev.components[1], xh.components[1]);
        assert!((ev.components[2] - (xh.components[2] + hv)).abs() < 1e-14);
    }

    #[test]
    fn matched_potential_solves_both_equations_at_k_zero() {
        let potential = linear_dissipation_matched_potential(1.0, 0.1, 0.0, 2.0);
        let preset = linear_dissipation(1.0, 0.1, &potential).unwrap();
        let gamma = linear_dissipation_solution(2.0);
        let grid = Grid::cube(1, -1.0, 1.0, 11);
        let jet_report =
            hj_residual_hamiltonian_jet(&preset.hamiltonian, &gamma, &grid, 1e-10).unwrap();
        assert!(jet_report.pass, "residual {}", jet_report.max_residual);
        let ev_report =
            hj_residual_evolution_jet(&preset.hamiltonian, &gamma, &grid, 1e-10).unwrap();
        assert!(ev_report.pass);
        assert!(ev_report.constant.unwrap().abs() < 1e-12);
    }

    #[test]
    fn dissipation_decay_and_evolution_conservation() {
        let preset = linear_dissipation(1.0, 0.1, "q1^2/2").unwrap();
        let x0 = ContactState::new(vec![1.0], vec![1.0], 1.0).unwrap();
        let traj =
            integrate(&preset.hamiltonian, FieldKind::Hamiltonian, &x0, 10.0, 1e-3).unwrap();
        let h0 = traj.energy[0];
        for (t, h) in traj.times.iter().zip(&traj.energy) {
            let expected = h0 * (-0.1 * t).exp();
            assert!(((h - expected) / expected).abs() < 1e-6);
        }
        let traj =
            integrate(&preset.hamiltonian, FieldKind::Evolution, &x0, 10.0, 1e-3).unwrap();
        let report = dissipation_report(&traj, &preset.hamiltonian).unwrap();
        assert!(report.conservation_drift < 1e-8);
    }

    #[test]
    fn ideal_gas_field_matches_the_thermodynamic_process() {
        let preset = ideal_gas(2.0).unwrap();
        assert_eq!(preset.layout.vars()[6], "U");
        // all extensive and intensive variables at 1 (so negP = -1)
        let x = ContactState::new(vec![1.0; 3], vec![1.0, -1.0, 1.0], 1.0).unwrap();
        let xh = eval_field(&hamiltonian_field(&preset.hamiltonian), &x).unwrap();
        // (S', V', N') = (-1, 0, 1); (T', negP', mu') = (0, -1, 2) so
        // P' = +1; U' = 1
        assert_eq!(xh.components, vec![-1.0, 0.0, 1.0, 0.0, -1.0, 2.0, 1.0]);
        let ev = eval_field(&evolution_field(&preset.hamiltonian), &x).unwrap();
        assert_eq!(ev.components[6], 0.0); // T S - R N T + mu N = 1 - 2 + 1
    }

    #[test]
    fn gas_solution_kills_h_on_the_grid() {
        let preset = ideal_gas(2.0).unwrap();
        let gamma = ideal_gas_solution(2.0, "c").unwrap();
        // gamma_U = S + 2 N log N at (1, 1, 1): value 1, jet (1, 0, 2)
        assert!((gamma.z_map().eval(&[1.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma.components()[2].eval(&[1.0, 1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        let grid = Grid::cube(3, 0.5, 2.0, 5);
        let report =
            hj_residual_hamiltonian_jet(&preset.hamiltonian, &gamma, &grid, 1e-10).unwrap();
        assert!(report.assumptions.satisfied());
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn gas_solutions_for_random_profiles() {
        let preset = ideal_gas(2.0).unwrap();
        let grid = Grid::cube(3, 0.5, 2.0, 4);
        let mut rng = SplitMix64::new(31);
        for _ in 0..3 {
            let profile = Polynomial::random(2, 2, &mut rng);
            // render the polynomial as an expression in (c, V)
            let source = polynomial_source(&profile);
            let gamma = ideal_gas_solution(2.0, &source).unwrap();
            let report =
                hj_residual_hamiltonian_jet(&preset.hamiltonian, &gamma, &grid, 1e-10)
                    .unwrap();
            assert!(
                report.pass,
                "profile {source}: residual {}",
                report.max_residual
            );
        }
    }

    fn polynomial_source(poly: &Polynomial) -> String {
        let terms: Vec<String> = poly
            .terms()
            .iter()
            .map(|(coeff, exps)| format!("({coeff})*c^{}*V^{}", exps[0], exps[1]))
            .collect();
        terms.join(" + ")
    }

    #[test]
    fn gas_solution_graph_is_invariant_under_the_flow() {
        // H vanishes on the Legendrian graph exactly when X_H is tangent
        // to it, i.e. when the dynamics never leaves equilibrium
        let preset = ideal_gas(2.0).unwrap();
        let gamma = ideal_gas_solution(2.0, "c").unwrap();
        let grid = Grid::cube(3, 0.5, 2.0, 4);
        let report = gamma_related_check(
            &preset.hamiltonian,
            FieldKind::Hamiltonian,
            &Section::Jet(gamma),
            &grid,
            1e-9,
        )
        .unwrap();
        assert!(report.pass, "mismatch {}", report.max_mismatch);
    }

    #[test]
    fn ideal_gas_evolution_conserves_h() {
        let preset = ideal_gas(2.0).unwrap();
        let x0 = ContactState::new(vec![0.5, 1.0, 0.2], vec![1.0, -1.0, 0.5], 0.3).unwrap();
        let traj =
            integrate(&preset.hamiltonian, FieldKind::Evolution, &x0, 10.0, 1e-3).unwrap();
        assert!(!traj.blew_up);
        let drift = dissipation_report(&traj, &preset.hamiltonian)
            .unwrap()
            .conservation_drift;
        assert!(drift < 1e-8, "drift {drift}");

        // the process grows exponentially (N' = N, so S and P reach ~1e5
        // by t = 10); there the absolute drift is set by rounding on the
        // orbit scale, and conservation is relative to that scale
        let big = ContactState::new(vec![1.0; 3], vec![1.0, -1.0, 1.0], 1.0).unwrap();
        let traj =
            integrate(&preset.hamiltonian, FieldKind::Evolution, &big, 10.0, 1e-3).unwrap();
        let drift = dissipation_report(&traj, &preset.hamiltonian)
            .unwrap()
            .conservation_drift;
        let scale = traj
            .states
            .iter()
            .flat_map(|s| s.to_vec())
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        assert!(drift / scale < 1e-12, "relative drift {}", drift / scale);
    }

    #[test]
    fn gas_solution_requires_positive_mole_number() {
        let gamma = ideal_gas_solution(2.0, "c").unwrap();
        assert!(gamma.z_map().eval(&[1.0, 1.0, -1.0]).is_err());
        assert!(gamma.z_map().eval(&[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn quadrature_candidate_is_legendrian_but_misses_the_energy() {
        let candidate = quadrature_candidate(1.0, 0.1, 0.0);
        let grid = Grid::cube(1, -1.0, 1.0, 9);
        // the jet structure is fine...
        assert!(legendrian_check(&candidate, &grid, 1e-9).unwrap().legendrian);
        // ...but the energy equation is quadratic, not linear, and the
        // integrating-factor formula misses it badly: at q = 0 the residual
        // is gamma_p(0)^2 / 2 = (2m/a^3)^2 / 2 = 31250 for these parameters
        let residual =
            quadrature_candidate_energy_residual(1.0, 0.1, 0.0, &grid).unwrap();
        assert!(residual > 1e3, "reported residual {residual}");
        let at_zero = quadrature_candidate(1.0, 0.1, 0.0)
            .pullback(&linear_dissipation(1.0, 0.1, "q1^2/2").unwrap().hamiltonian)
            .eval(&[0.0])
            .unwrap();
        assert!((at_zero - 31250.0).abs() < 1e-9);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(linear_dissipation(0.0, 0.1, "q1").is_err());
        assert!(linear_dissipation(1.0, 0.1, "q1 + undeclared").is_err());
        assert!(ideal_gas(-1.0).is_err());
        assert!(ideal_gas_solution(2.0, "c + nope").is_err());
    }
}
