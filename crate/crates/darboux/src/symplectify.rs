//! The homogeneous symplectic model of the contact dynamics.
//!
//! A contact Hamiltonian `H(q, p, z)` lifts to the degree-1 homogeneous
//! function
//!
//! ```text
//! H~(q, z, P, Pz) = -Pz H(q, -P/Pz, z)
//! ```
//!
//! on `T*(Q x R)` with canonical symplectic form `dq^i ^ dP_i + dz ^ dPz`.
//! Away from `{Pz = 0}` the projection
//!
//! ```text
//! Phi(q, z, P, Pz) = (q, -P/Pz, z)
//! ```
//!
//! intertwines the two dynamics: `T Phi (X_H~) = X_H o Phi`, which
//! [`pushforward_check`] verifies numerically. On `{Pz < 0}` the variant
//! [`psi`] additionally records the log-time coordinate `-log(-Pz)`.
//!
//! [`lift_section`] walks the correspondence the other way: given a contact
//! section `gamma(q, z)` with coisotropic image and Lagrangian leaves, it
//! produces a Lagrangian section `(gamma~_Q, gamma~_t)` of `T*(Q x R)` with
//! `gamma~_t = exp(g)` and `gamma~_Q = -gamma~_t gamma`, where `g` solves
//! the frame equations `A_i(g) = -dgamma_i/dz` for `A_i = d/dq^i +
//! gamma_i d/dz`. The frame commutes exactly when the z-proportionality
//! hypothesis holds, and the solver integrates the equations as
//! characteristic ODEs segment by segment from a base point, verifying the
//! integrability condition and path independence numerically instead of
//! assuming them.

use std::sync::Arc;

use thiserror::Error;

use crate::autodiff::{
    Dual, DynField, EvalError, EvalScalar, FieldFn, ScalarField, VectorField, D1, D2,
    D3,
};
use crate::contact::{hamiltonian_rhs, ContactState};
use crate::section::{classify_section, Grid, JetSection, MomentumSection};

/// A point `(q, z, P, Pz)` of `T*(Q x R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousState {
    pub q: Vec<f64>,
    pub z: f64,
    pub p: Vec<f64>,
    pub pz: f64,
}

impl HomogeneousState {
    pub fn new(q: Vec<f64>, z: f64, p: Vec<f64>, pz: f64) -> Self {
        assert_eq!(q.len(), p.len());
        assert!(!q.is_empty());
        HomogeneousState { q, z, p, pz }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Chart ordering `(q.., z, P.., Pz)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.q.len() + 2);
        out.extend_from_slice(&self.q);
        out.push(self.z);
        out.extend_from_slice(&self.p);
        out.push(self.pz);
        out
    }
}

/// Leaving the chart on which the correspondence is defined.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ChartError {
    #[error("the projection chart excludes P_z = 0")]
    PzZero,
    #[error("the log-time chart requires P_z < 0, got {0}")]
    PzNotNegative(f64),
}

/// Failure modes of [`lift_section`].
#[derive(Debug, Clone, Error)]
pub enum LiftError {
    #[error("section hypotheses fail: {0}")]
    Assumption(String),
    #[error("integrability defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    Integrability { defect: f64, tol: f64 },
    #[error("characteristic integration is path dependent: defect {defect:.3e} exceeds {tol:.3e}")]
    PathDependence { defect: f64, tol: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `H~(q, z, P, Pz) = -Pz H(q, -P/Pz, z)`, homogeneous of degree one in
/// `(P, Pz)` by construction.
pub fn homogenize(h: &ScalarField) -> ScalarField {
    assert!(h.dim() % 2 == 1 && h.dim() >= 3);
    ScalarField::new(Homogenized { h: h.clone() })
}

struct Homogenized {
    h: ScalarField,
}

impl FieldFn for Homogenized {
    fn dim(&self) -> usize {
        self.h.dim() + 1
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let n = (self.h.dim() - 1) / 2;
        let pz = x[2 * n + 1];
        if pz.re() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let mut contact_point = Vec::with_capacity(2 * n + 1);
        contact_point.extend_from_slice(&x[..n]);
        for i in 0..n {
            contact_point.push(-(x[n + 1 + i] / pz));
        }
        contact_point.push(x[n]);
        Ok(-(pz * self.h.eval_scalar(&contact_point)?))
    }
}

/// Project a homogeneous state to the contact chart:
/// `(q, z, P, Pz) -> (q, -P/Pz, z)`.
pub fn phi(x: &HomogeneousState) -> Result<ContactState, ChartError> {
    if x.pz == 0.0 {
        return Err(ChartError::PzZero);
    }
    let p = x.p.iter().map(|pi| -pi / x.pz).collect();
    Ok(ContactState::new(x.q.clone(), p, x.z).expect("state shapes match"))
}

/// Project to the contact chart with the log-time coordinate:
/// `(q, z, P, Pz) -> ((q, -P/Pz, z), -log(-Pz))` on `{Pz < 0}`.
pub fn psi(x: &HomogeneousState) -> Result<(ContactState, f64), ChartError> {
    if x.pz >= 0.0 {
        return Err(ChartError::PzNotNegative(x.pz));
    }
    Ok((phi(x)?, -(-x.pz).ln()))
}

/// Hamiltonian vector field of a function on `T*(Q x R)` in the chart
/// ordering `(q.., z, P.., Pz)`:
/// `(q', z', P', Pz') = (dH~/dP, dH~/dPz, -dH~/dq, -dH~/dz)`.
pub fn symplectic_field(h_tilde: &ScalarField) -> VectorField {
    let dim = h_tilde.dim();
    assert!(dim % 2 == 0 && dim >= 4);
    let half = dim / 2;
    let mut components = Vec::with_capacity(dim);
    for i in 0..half {
        components.push(h_tilde.partial_field(half + i));
    }
    for i in 0..half {
        components.push(ScalarField::lin_comb(
            0.0,
            vec![(-1.0, h_tilde.partial_field(i))],
        ));
    }
    VectorField::new(components)
}

/// Evaluate the symplectic field at one state from a single gradient call.
pub fn symplectic_rhs(
    h_tilde: &ScalarField,
    x: &HomogeneousState,
) -> Result<Vec<f64>, EvalError> {
    let grad = h_tilde.gradient(&x.to_vec())?;
    let half = grad.len() / 2;
    let mut out = Vec::with_capacity(grad.len());
    for i in 0..half {
        out.push(grad[half + i]);
    }
    for i in 0..half {
        out.push(-grad[i]);
    }
    Ok(out)
}

/// Outcome of [`pushforward_check`].
#[derive(Clone, Debug)]
pub struct PushforwardReport {
    pub max_error: f64,
    pub witness: Option<HomogeneousState>,
    pub samples: usize,
    pub pass: bool,
}

/// Verify `T Phi (X_H~) = X_H o Phi` at the given points: the symplectic
/// dynamics of the homogenized Hamiltonian projects onto the contact
/// dynamics of `H`.
pub fn pushforward_check(
    h: &ScalarField,
    points: &[HomogeneousState],
    tol: f64,
) -> Result<PushforwardReport, EvalError> {
    let n = (h.dim() - 1) / 2;
    let h_tilde = homogenize(h);
    let mut max_error = 0.0f64;
    let mut witness = None;
    for x in points {
        assert_eq!(x.n(), n);
        if x.pz == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let v = symplectic_rhs(&h_tilde, x)?;
        // T Phi: dq rows pass through, dp_i = -dP_i/Pz + P_i dPz/Pz^2,
        // dz row passes through.
        let mut projected = Vec::with_capacity(2 * n + 1);
        projected.extend_from_slice(&v[..n]);
        let v_pz = v[2 * n + 1];
        for i in 0..n {
            projected.push(-v[n + 1 + i] / x.pz + x.p[i] * v_pz / (x.pz * x.pz));
        }
        projected.push(v[n]);
        let downstairs = hamiltonian_rhs(h, &phi(x).expect("pz checked nonzero"))?;
        for (a, b) in projected.iter().zip(&downstairs.components) {
            let err = (a - b).abs();
            if err > max_error {
                max_error = err;
                witness = Some(x.clone());
            }
        }
    }
    Ok(PushforwardReport {
        max_error,
        witness: (max_error > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_error <= tol,
    })
}

/// A section `(q, z) -> (q, gamma~_Q(q, z), z, gamma~_t(q, z))` of
/// `T*(Q x R)` over `Q x R`.
#[derive(Clone, Debug)]
pub struct SymplecticSection {
    n: usize,
    gamma_q: Vec<ScalarField>,
    gamma_t: ScalarField,
}

impl SymplecticSection {
    pub fn new(gamma_q: Vec<ScalarField>, gamma_t: ScalarField) -> Self {
        let n = gamma_q.len();
        assert!(n >= 1);
        assert!(gamma_q.iter().all(|f| f.dim() == n + 1) && gamma_t.dim() == n + 1);
        SymplecticSection { n, gamma_q, gamma_t }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma_q(&self) -> &[ScalarField] {
        &self.gamma_q
    }

    pub fn gamma_t(&self) -> &ScalarField {
        &self.gamma_t
    }

    /// Freeze `z = z0`, reading the slice as a section of `T*Q x R` over
    /// `Q` with momenta `gamma~_j(q, z0)` and height `gamma~_t(q, z0)`.
    pub fn freeze_z(&self, z0: f64) -> JetSection {
        let components = self.gamma_q.iter().map(|f| f.pin(self.n, z0)).collect();
        JetSection::new(components, self.gamma_t.pin(self.n, z0))
    }

    /// Worst defect of the Lagrangian-graph conditions
    /// `dgamma~_j/dz = dgamma~_t/dq^j` and
    /// `dgamma~_i/dq^j = dgamma~_j/dq^i` on the grid.
    pub fn lagrangian_defect(&self, grid: &Grid) -> Result<f64, EvalError> {
        assert_eq!(grid.dim(), self.n + 1);
        let mut defect = 0.0f64;
        for x in grid.points() {
            let dt = self.gamma_t.gradient(&x)?;
            let jac: Vec<Vec<f64>> = self
                .gamma_q
                .iter()
                .map(|f| f.gradient(&x))
                .collect::<Result<_, _>>()?;
            for j in 0..self.n {
                defect = defect.max((jac[j][self.n] - dt[j]).abs());
                for i in 0..j {
                    defect = defect.max((jac[i][j] - jac[j][i]).abs());
                }
            }
        }
        Ok(defect)
    }
}

/// Options of the characteristic solver behind [`lift_section`].
#[derive(Clone, Debug)]
pub struct LiftOptions {
    /// Runge-Kutta steps per unit of coordinate distance.
    pub steps_per_unit: f64,
    /// Lower bound on steps per segment.
    pub min_steps: usize,
    /// Base point of the gauge `g(base, .) = 0`; defaults to the centre of
    /// the grid box.
    pub base: Option<Vec<f64>>,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { steps_per_unit: 256.0, min_steps: 32, base: None }
    }
}

/// Result of [`lift_section`]: the lifted section plus the measured
/// quality of the construction on the verification grid.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub section: SymplecticSection,
    /// Defect of the Lagrangian-graph conditions of the output.
    pub lagrangian_defect: f64,
    /// Disagreement of `g` between the two sweep orders (`n >= 2`).
    pub path_independence_defect: f64,
}

/// Lift a contact section to a Lagrangian section of `T*(Q x R)`.
///
/// Requires the coisotropic/Lagrangian-leaf classification to pass and the
/// supplied proportionality function `sigma` to actually satisfy
/// `dgamma_j/dz = sigma gamma_j` on the grid. For `n >= 2` the
/// integrability condition `A_i(dgamma_j/dz) = A_j(dgamma_i/dz)` is
/// checked, and the sweep-order independence of the characteristic
/// integration is verified numerically.
///
/// The gauge is fixed by `g = 0` on the line `{q = base}` and the positive
/// branch `gamma~_t = +exp(g)`; the other branch is the scalar multiple
/// `-gamma~_t`.
pub fn lift_section(
    gamma: &MomentumSection,
    sigma: &ScalarField,
    grid: &Grid,
    tol: f64,
) -> Result<LiftResult, LiftError> {
    lift_section_with(gamma, sigma, grid, tol, LiftOptions::default())
}

/// [`lift_section`] with explicit solver options.
pub fn lift_section_with(
    gamma: &MomentumSection,
    sigma: &ScalarField,
    grid: &Grid,
    tol: f64,
    options: LiftOptions,
) -> Result<LiftResult, LiftError> {
    let n = gamma.n();
    assert_eq!(sigma.dim(), n + 1, "sigma is a field on (q, z)");
    assert_eq!(grid.dim(), n + 1);

    let class = classify_section(gamma, grid, tol)?;
    if !class.coisotropic {
        return Err(LiftError::Assumption(format!(
            "classification fails: curl defect {:.3e}, proportionality defect {:.3e}",
            class.curl_defect, class.proportionality_defect
        )));
    }
    let points = grid.points();
    let mut sigma_defect = 0.0f64;
    for x in &points {
        let s = sigma.eval(x)?;
        for comp in gamma.components() {
            let dz = comp.partial(n, x)?;
            sigma_defect = sigma_defect.max((dz - s * comp.eval(x)?).abs());
        }
    }
    if sigma_defect > tol {
        return Err(LiftError::Assumption(format!(
            "sigma does not match the z-derivative of the section: defect {sigma_defect:.3e}"
        )));
    }
    if n >= 2 {
        // A_i(dgamma_j/dz) - A_j(dgamma_i/dz) with A_i = d/dq^i + gamma_i d/dz
        let mut defect = 0.0f64;
        for x in &points {
            let values = gamma.values(x)?;
            for i in 0..n {
                for j in (i + 1)..n {
                    let gi = gamma.components()[i].clone();
                    let gj = gamma.components()[j].clone();
                    let a_i_of_dj = gj.partial2(i, n, x)? + values[i] * gj.partial2(n, n, x)?;
                    let a_j_of_di = gi.partial2(j, n, x)? + values[j] * gi.partial2(n, n, x)?;
                    defect = defect.max((a_i_of_dj - a_j_of_di).abs());
                }
            }
        }
        if defect > tol {
            return Err(LiftError::Integrability { defect, tol });
        }
    }

    let base = options.base.clone().unwrap_or_else(|| {
        let (bounds, _) = grid_bounds(grid);
        bounds.iter().take(n).map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    });
    assert_eq!(base.len(), n);

    let log_scale = LiftedLogScale {
        gamma: gamma.components().to_vec(),
        base: base.clone(),
        steps_per_unit: options.steps_per_unit,
        min_steps: options.min_steps,
        reversed: false,
    };

    // path independence: rerun the sweep with the opposite segment order
    let mut path_defect = 0.0f64;
    if n >= 2 {
        let reversed = LiftedLogScale { reversed: true, ..log_scale.clone() };
        for x in &points {
            let a = log_scale.eval_gen::<f64>(x)?;
            let b = reversed.eval_gen::<f64>(x)?;
            path_defect = path_defect.max((a - b).abs());
        }
        if path_defect > tol {
            return Err(LiftError::PathDependence { defect: path_defect, tol });
        }
    }

    let gamma_t = ScalarField::new(ExpField {
        inner: ScalarField::from_dyn(Arc::new(log_scale)),
    });
    let gamma_q = gamma
        .components()
        .iter()
        .map(|g| {
            ScalarField::lin_comb(0.0, vec![(-1.0, ScalarField::product(gamma_t.clone(), g.clone()))])
        })
        .collect();
    let section = SymplecticSection::new(gamma_q, gamma_t);
    let lagrangian_defect = section.lagrangian_defect(grid)?;
    Ok(LiftResult { section, lagrangian_defect, path_independence_defect: path_defect })
}

fn grid_bounds(grid: &Grid) -> (Vec<(f64, f64)>, usize) {
    match grid {
        Grid::Mesh { bounds, counts } => (bounds.clone(), counts.iter().product()),
        Grid::Random { bounds, samples, .. } => (bounds.clone(), *samples),
    }
}

/// `exp` of another field.
struct ExpField {
    inner: ScalarField,
}

impl FieldFn for ExpField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        Ok(self.inner.eval_scalar(x)?.exp())
    }
}

/// The log-scale `g(q, z)` of the lift, defined by the characteristic
/// system `dz/dq_i = gamma_i`, `dg/dq_i = -dgamma_i/dz` integrated with
/// RK4 from the target point back to the base line where `g = 0`.
///
/// Evaluation is a smooth composition of the section's values, so running
/// it on dual inputs differentiates the numerical scheme itself (the
/// discrete derivative converges at the same fourth order).
#[derive(Clone)]
struct LiftedLogScale {
    gamma: Vec<ScalarField>,
    base: Vec<f64>,
    steps_per_unit: f64,
    min_steps: usize,
    reversed: bool,
}

impl LiftedLogScale {
    fn eval_gen<S>(&self, x: &[S]) -> Result<S, EvalError>
    where
        S: EvalScalar,
        Dual<S>: EvalScalar,
    {
        let n = self.gamma.len();
        let mut z = x[n];
        // accumulated integral of -dgamma_i/dz along the backward path;
        // equals g(base) - g(target) = -g(target)
        let mut acc = S::zero();
        let order: Vec<usize> = if self.reversed {
            (0..n).collect()
        } else {
            (0..n).rev().collect()
        };
        // coordinates already swept sit at the base; the rest at the target
        let mut frame: Vec<S> = x[..n].to_vec();
        for &i in &order {
            let start = x[i];
            let length = S::from_f64(self.base[i]) - start;
            let steps = ((length.re().abs() * self.steps_per_unit).ceil() as usize)
                .max(self.min_steps);
            let h = length.scale(1.0 / steps as f64);
            for k in 0..steps {
                let qi = start + h.scale(k as f64);
                let (dz1, dg1) = self.rates(&frame, i, qi, z)?;
                let half = h.scale(0.5);
                let (dz2, dg2) = self.rates(&frame, i, qi + half, z + half * dz1)?;
                let (dz3, dg3) = self.rates(&frame, i, qi + half, z + half * dz2)?;
                let (dz4, dg4) = self.rates(&frame, i, qi + h, z + h * dz3)?;
                let sixth = h.scale(1.0 / 6.0);
                z = z + sixth * (dz1 + dz2.scale(2.0) + dz3.scale(2.0) + dz4);
                acc = acc + sixth * (dg1 + dg2.scale(2.0) + dg3.scale(2.0) + dg4);
            }
            frame[i] = S::from_f64(self.base[i]);
        }
        Ok(-acc)
    }

    /// `(gamma_i, -dgamma_i/dz)` at the point with slot `i` replaced.
    fn rates<S>(&self, frame: &[S], slot: usize, qi: S, z: S) -> Result<(S, S), EvalError>
    where
        S: EvalScalar,
        Dual<S>: EvalScalar,
    {
        let n = self.gamma.len();
        let mut point: Vec<Dual<S>> = Vec::with_capacity(n + 1);
        for (j, &value) in frame.iter().enumerate() {
            point.push(Dual::constant(if j == slot { qi } else { value }));
        }
        point.push(Dual::seeded(z));
        let out = self.gamma[slot].eval_scalar(&point)?;
        Ok((out.re, -out.eps))
    }
}

impl DynField for LiftedLogScale {
    fn dim(&self) -> usize {
        self.gamma.len() + 1
    }

    fn eval_f64(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.eval_gen(x)
    }

    fn eval_d1(&self, x: &[D1]) -> Result<D1, EvalError> {
        self.eval_gen(x)
    }

    fn eval_d2(&self, x: &[D2]) -> Result<D2, EvalError> {
        self.eval_gen(x)
    }

    fn eval_d3(&self, _x: &[D3]) -> Result<D3, EvalError> {
        Err(EvalError::DerivativeDepth)
    }
}

/// Outcome of [`exp_z_form_check`].
#[derive(Clone, Debug)]
pub struct ExpZFormReport {
    pub max_defect: f64,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
    pub pass: bool,
}

/// Fit `g_i(q) = gamma~_i(q, 0)` and measure
/// `max |gamma~_i(q, z) - exp(z) g_i(q)|` on the grid: Lagrangian sections
/// whose frozen slices stay Legendrian have exactly this exponential
/// z-profile in their momenta.
pub fn exp_z_form_check(
    section: &SymplecticSection,
    grid: &Grid,
    tol: f64,
) -> Result<ExpZFormReport, EvalError> {
    let n = section.n();
    assert_eq!(grid.dim(), n + 1);
    let profiles: Vec<ScalarField> =
        section.gamma_q.iter().map(|f| f.pin(n, 0.0)).collect();
    let mut max_defect = 0.0f64;
    let mut witness = None;
    let points = grid.points();
    for x in &points {
        let scale = x[n].exp();
        for (f, g) in section.gamma_q.iter().zip(&profiles) {
            let defect = (f.eval(x)? - scale * g.eval(&x[..n])?).abs();
            if defect > max_defect {
                max_defect = defect;
                witness = Some(x.clone());
            }
        }
    }
    Ok(ExpZFormReport {
        max_defect,
        witness: (max_defect > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_defect <= tol,
    })
}
