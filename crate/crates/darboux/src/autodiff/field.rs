//! Scalar fields: evaluable real functions with exact partial derivatives.

use std::sync::Arc;

use thiserror::Error;

use super::dual::{Dual, Scalar, D1, D2, D3};
use crate::sampling::SplitMix64;

/// Evaluation failure of a scalar field.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {func}({arg}) is undefined")]
    Domain { func: &'static str, arg: f64 },
    #[error("evaluation produced a non-finite value")]
    NonFinite,
    #[error("dimension mismatch: field expects {expected} inputs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("derivative depth exceeded for a numerically defined field")]
    DerivativeDepth,
}

/// Object-safe evaluation surface over the dual-number tower.
///
/// Monomorphised per scalar level so fields can live behind `dyn`.
pub(crate) trait DynField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_f64(&self, x: &[f64]) -> Result<f64, EvalError>;
    fn eval_d1(&self, x: &[D1]) -> Result<D1, EvalError>;
    fn eval_d2(&self, x: &[D2]) -> Result<D2, EvalError>;
    fn eval_d3(&self, x: &[D3]) -> Result<D3, EvalError>;
}

/// Implement this to define a scalar field with one generic evaluator.
pub trait FieldFn: Send + Sync + 'static {
    fn dim(&self) -> usize;
    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError>;
}

impl<T: FieldFn> DynField for T {
    fn dim(&self) -> usize {
        FieldFn::dim(self)
    }

    fn eval_f64(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.eval(x)
    }

    fn eval_d1(&self, x: &[D1]) -> Result<D1, EvalError> {
        self.eval(x)
    }

    fn eval_d2(&self, x: &[D2]) -> Result<D2, EvalError> {
        self.eval(x)
    }

    fn eval_d3(&self, x: &[D3]) -> Result<D3, EvalError> {
        self.eval(x)
    }
}

/// Scalar types a [`ScalarField`] can be evaluated on.
///
/// The tower is `f64`, `D1`, `D2`, `D3`; each extra level buys one more
/// derivative order of every field reachable through it.
pub trait EvalScalar: Scalar + 'static {
    fn eval_field(field: &ScalarField, x: &[Self]) -> Result<Self, EvalError>;
}

impl EvalScalar for f64 {
    #[inline]
    fn eval_field(field: &ScalarField, x: &[Self]) -> Result<Self, EvalError> {
        field.inner.eval_f64(x)
    }
}

impl EvalScalar for D1 {
    #[inline]
    fn eval_field(field: &ScalarField, x: &[Self]) -> Result<Self, EvalError> {
        field.inner.eval_d1(x)
    }
}

impl EvalScalar for D2 {
    #[inline]
    fn eval_field(field: &ScalarField, x: &[Self]) -> Result<Self, EvalError> {
        field.inner.eval_d2(x)
    }
}

impl EvalScalar for D3 {
    #[inline]
    fn eval_field(field: &ScalarField, x: &[Self]) -> Result<Self, EvalError> {
        field.inner.eval_d3(x)
    }
}

/// A differentiable real-valued function of finitely many real inputs.
///
/// Values are immutable and cheap to clone; evaluation is deterministic and
/// side-effect free, so fields may be shared across threads freely.
#[derive(Clone)]
pub struct ScalarField {
    inner: Arc<dyn DynField>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim()).finish()
    }
}

impl ScalarField {
    pub fn new<F: FieldFn>(f: F) -> Self {
        ScalarField { inner: Arc::new(f) }
    }

    pub(crate) fn from_dyn(inner: Arc<dyn DynField>) -> Self {
        ScalarField { inner }
    }

    /// Number of real inputs.
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn check_dim(&self, got: usize) -> Result<(), EvalError> {
        if got != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Evaluate at a point.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(x.len())?;
        self.inner.eval_f64(x)
    }

    /// Evaluate on any scalar in the dual tower (used by composite fields).
    pub fn eval_scalar<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        self.check_dim(x.len())?;
        S::eval_field(self, x)
    }

    /// First partial derivative in direction `dir`.
    pub fn partial(&self, dir: usize, x: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(x.len())?;
        let seeded: Vec<D1> = seed(x, dir);
        Ok(self.inner.eval_d1(&seeded)?.eps)
    }

    /// All first partials at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_dim(x.len())?;
        (0..x.len()).map(|k| self.partial(k, x)).collect()
    }

    /// Value and gradient in one call.
    pub fn eval_with_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>), EvalError> {
        Ok((self.eval(x)?, self.gradient(x)?))
    }

    /// Mixed second partial `d^2 f / dx_i dx_j` via nested duals.
    pub fn partial2(&self, i: usize, j: usize, x: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(x.len())?;
        let inner: Vec<D1> = seed(x, i);
        let mut outer: Vec<D2> = inner.into_iter().map(Dual::constant).collect();
        outer[j].eps = D1::one();
        Ok(self.inner.eval_d2(&outer)?.eps.eps)
    }

    /// The field `x -> df/dx_dir (x)` as a field in its own right.
    ///
    /// The result supports two fewer derivative levels than the base field
    /// exposes, which is plenty for the second-order uses in this crate.
    pub fn partial_field(&self, dir: usize) -> ScalarField {
        ScalarField::from_dyn(Arc::new(PartialField {
            base: self.clone(),
            dir,
        }))
    }

    /// Coordinate projection `x -> x[index]` on `dim` inputs.
    pub fn coord(dim: usize, index: usize) -> ScalarField {
        assert!(index < dim, "coordinate index out of range");
        ScalarField::new(Coord { dim, index })
    }

    /// Constant field on `dim` inputs.
    pub fn constant(dim: usize, value: f64) -> ScalarField {
        ScalarField::new(Const { dim, value })
    }

    /// `bias + sum_i c_i * f_i` over fields of equal dimension.
    pub fn lin_comb(bias: f64, terms: Vec<(f64, ScalarField)>) -> ScalarField {
        let dim = terms
            .first()
            .map(|(_, f)| f.dim())
            .expect("lin_comb needs at least one term");
        assert!(terms.iter().all(|(_, f)| f.dim() == dim));
        ScalarField::new(LinComb { dim, bias, terms })
    }

    /// Pointwise product of two fields of equal dimension.
    pub fn product(a: ScalarField, b: ScalarField) -> ScalarField {
        assert_eq!(a.dim(), b.dim());
        ScalarField::new(Product { a, b })
    }

    /// `outer(inner_1(x), ..., inner_m(x))` with all inner fields sharing a
    /// common input dimension.
    pub fn compose(outer: ScalarField, inner: Vec<ScalarField>) -> ScalarField {
        assert_eq!(outer.dim(), inner.len(), "composition arity mismatch");
        let dim = inner
            .first()
            .map(ScalarField::dim)
            .expect("composition needs at least one inner map");
        assert!(inner.iter().all(|f| f.dim() == dim));
        ScalarField::new(Composed { dim, outer, inner })
    }

    /// Pin input `index` to a constant, producing a field of one fewer input.
    pub fn pin(&self, index: usize, value: f64) -> ScalarField {
        assert!(index < self.dim());
        ScalarField::new(Pinned {
            base: self.clone(),
            index,
            value,
        })
    }
}

#[inline]
fn seed(x: &[f64], dir: usize) -> Vec<D1> {
    let mut out: Vec<D1> = x.iter().map(|&v| D1::constant(v)).collect();
    out[dir].eps = 1.0;
    out
}

/// Partial-derivative field; consumes one dual level of the base field.
struct PartialField {
    base: ScalarField,
    dir: usize,
}

impl PartialField {
    fn eval_gen<S>(&self, x: &[S]) -> Result<S, EvalError>
    where
        S: EvalScalar,
        Dual<S>: EvalScalar,
    {
        let mut seeded: Vec<Dual<S>> = x.iter().map(|&v| Dual::constant(v)).collect();
        seeded[self.dir].eps = S::one();
        Ok(self.base.eval_scalar(&seeded)?.eps)
    }
}

impl DynField for PartialField {
    fn dim(&self) -> usize {
        self.base.dim()
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

struct Coord {
    dim: usize,
    index: usize,
}

impl FieldFn for Coord {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        Ok(x[self.index])
    }
}

struct Const {
    dim: usize,
    value: f64,
}

impl FieldFn for Const {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, _x: &[S]) -> Result<S, EvalError> {
        Ok(S::from_f64(self.value))
    }
}

struct LinComb {
    dim: usize,
    bias: f64,
    terms: Vec<(f64, ScalarField)>,
}

impl FieldFn for LinComb {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let mut acc = S::from_f64(self.bias);
        for (coeff, field) in &self.terms {
            acc = acc + field.eval_scalar(x)?.scale(*coeff);
        }
        Ok(acc)
    }
}

struct Product {
    a: ScalarField,
    b: ScalarField,
}

impl FieldFn for Product {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        Ok(self.a.eval_scalar(x)? * self.b.eval_scalar(x)?)
    }
}

struct Composed {
    dim: usize,
    outer: ScalarField,
    inner: Vec<ScalarField>,
}

impl FieldFn for Composed {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let mid: Vec<S> = self
            .inner
            .iter()
            .map(|f| f.eval_scalar(x))
            .collect::<Result<_, _>>()?;
        self.outer.eval_scalar(&mid)
    }
}

struct Pinned {
    base: ScalarField,
    index: usize,
    value: f64,
}

impl FieldFn for Pinned {
    fn dim(&self) -> usize {
        self.base.dim() - 1
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let mut full: Vec<S> = Vec::with_capacity(x.len() + 1);
        full.extend_from_slice(&x[..self.index]);
        full.push(S::from_f64(self.value));
        full.extend_from_slice(&x[self.index..]);
        self.base.eval_scalar(&full)
    }
}

/// Multivariate polynomial with exact evaluation; handy as a test generator
/// family because all derivatives are polynomials too.
#[derive(Clone, Debug)]
pub struct Polynomial {
    dim: usize,
    /// `(coefficient, exponents per input)` pairs.
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == dim));
        Polynomial { dim, terms }
    }

    /// Dense random polynomial of total degree at most `degree`, with
    /// coefficients drawn uniformly from `[-1, 1]`.
    pub fn random(dim: usize, degree: u32, rng: &mut SplitMix64) -> Self {
        let mut terms = Vec::new();
        let mut exps = vec![0u32; dim];
        collect_monomials(dim, degree, 0, &mut exps, &mut terms, rng);
        Polynomial { dim, terms }
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn field(&self) -> ScalarField {
        ScalarField::new(self.clone())
    }
}

fn collect_monomials(
    dim: usize,
    budget: u32,
    slot: usize,
    exps: &mut Vec<u32>,
    terms: &mut Vec<(f64, Vec<u32>)>,
    rng: &mut SplitMix64,
) {
    if slot == dim {
        terms.push((rng.uniform(-1.0, 1.0), exps.clone()));
        return;
    }
    for e in 0..=budget {
        exps[slot] = e;
        collect_monomials(dim, budget - e, slot + 1, exps, terms, rng);
    }
    exps[slot] = 0;
}

impl FieldFn for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
        let mut acc = S::zero();
        for (coeff, exps) in &self.terms {
            let mut term = S::from_f64(*coeff);
            for (value, &e) in x.iter().zip(exps) {
                if e > 0 {
                    term = term * value.powi(e as i32);
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }
}

/// A tuple of scalar fields sharing one input space, interpreted as the
/// components of a vector field in some ordered frame.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Self {
        let dim = components
            .first()
            .map(ScalarField::dim)
            .expect("vector field needs at least one component");
        assert!(components.iter().all(|f| f.dim() == dim));
        VectorField { components }
    }

    /// Input-space dimension.
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn eval_at(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|f| f.eval(x)).collect()
    }
}

/// Gradient of `f` at `x`: the vector of all first partials.
pub fn gradient(f: &ScalarField, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    f.gradient(x)
}

/// Jacobian of a component list at `x`; row `r` is `gradient(components[r])`.
pub fn jacobian(components: &[ScalarField], x: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
    components.iter().map(|f| f.gradient(x)).collect()
}

/// One disagreeing sample from [`fd_check`].
#[derive(Clone, Debug)]
pub struct FdFailure {
    pub point: Vec<f64>,
    pub direction: usize,
    pub autodiff: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
}

/// Outcome of comparing autodiff partials against central differences.
#[derive(Clone, Debug)]
pub struct FdReport {
    pub samples: usize,
    pub worst_rel_error: f64,
    pub worst_abs_error: f64,
    pub failures: Vec<FdFailure>,
}

impl FdReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compare every autodiff partial of `f` against a central finite difference
/// with step `h`, at `samples` points drawn uniformly from the box
/// `[lo_k, hi_k]` per input. Errors are relative with a unit floor on the
/// denominator (`|ad - fd| / max(1, |ad|, |fd|)`), so near-zero derivatives
/// are judged absolutely. Disagreements beyond `tol` are collected, not
/// raised.
pub fn fd_check(
    f: &ScalarField,
    box_bounds: &[(f64, f64)],
    samples: usize,
    h: f64,
    tol: f64,
    seed: u64,
) -> Result<FdReport, EvalError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    assert!(samples >= 1, "need at least one sample");
    assert_eq!(box_bounds.len(), f.dim());
    let mut rng = SplitMix64::new(seed);
    let mut worst_rel = 0.0f64;
    let mut worst_abs = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let point: Vec<f64> = box_bounds
            .iter()
            .map(|&(lo, hi)| rng.uniform(lo, hi))
            .collect();
        for dir in 0..f.dim() {
            let ad = f.partial(dir, &point)?;
            let mut plus = point.clone();
            let mut minus = point.clone();
            plus[dir] += h;
            minus[dir] -= h;
            let fd = (f.eval(&plus)? - f.eval(&minus)?) / (2.0 * h);
            let abs_err = (ad - fd).abs();
            let rel_err = abs_err / ad.abs().max(fd.abs()).max(1.0);
            worst_abs = worst_abs.max(abs_err);
            worst_rel = worst_rel.max(rel_err);
            if rel_err > tol {
                failures.push(FdFailure {
                    point: point.clone(),
                    direction: dir,
                    autodiff: ad,
                    finite_difference: fd,
                    rel_error: rel_err,
                });
            }
        }
    }
    Ok(FdReport {
        samples,
        worst_rel_error: worst_rel,
        worst_abs_error: worst_abs,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> ScalarField {
        Polynomial::new(dim, terms).field()
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let f = ScalarField::constant(3, 7.5);
        assert_eq!(f.gradient(&[0.3, -1.0, 2.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_of_quadratic() {
        // f = q^2 / 2 at q = 3
        let f = poly(1, vec![(0.5, vec![2])]);
        assert_eq!(f.gradient(&[3.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn gradient_of_dissipative_hamiltonian() {
        // H = p^2/2 + q^2/2 + 0.1 z on inputs (q, p, z), at (1, 1, 1).
        let h = poly(
            3,
            vec![(0.5, vec![0, 2, 0]), (0.5, vec![2, 0, 0]), (0.1, vec![0, 0, 1])],
        );
        assert_eq!(h.gradient(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 1.0, 0.1]);
    }

    #[test]
    fn jacobian_of_identity_map() {
        let rows = vec![ScalarField::coord(2, 0), ScalarField::coord(2, 1)];
        let j = jacobian(&rows, &[0.4, -0.9]).unwrap();
        assert_eq!(j, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn jacobian_of_section_component() {
        // gamma(q, z) = 2 q z, rows of the jacobian at (1, 2).
        let g = poly(2, vec![(2.0, vec![1, 1])]);
        let j = jacobian(std::slice::from_ref(&g), &[1.0, 2.0]).unwrap();
        assert_eq!(j, vec![vec![4.0, 2.0]]);
    }

    #[test]
    fn jacobian_of_constant_map_is_zero() {
        let rows = vec![ScalarField::constant(2, 1.0), ScalarField::constant(2, -3.0)];
        let j = jacobian(&rows, &[5.0, 6.0]).unwrap();
        assert_eq!(j, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn mixed_second_partials_are_symmetric() {
        // f = q^3 p, d2f/dqdp = 3 q^2
        let f = poly(2, vec![(1.0, vec![3, 1])]);
        let x = [2.0, -1.0];
        assert_eq!(f.partial2(0, 1, &x).unwrap(), 12.0);
        assert_eq!(f.partial2(1, 0, &x).unwrap(), 12.0);
    }

    #[test]
    fn partial_field_supports_two_more_levels() {
        // f = q^4; df/dq = 4q^3 as a field; its own second partial = 24 q.
        let f = poly(1, vec![(1.0, vec![4])]);
        let df = f.partial_field(0);
        assert_eq!(df.eval(&[2.0]).unwrap(), 32.0);
        assert_eq!(df.partial(0, &[2.0]).unwrap(), 48.0);
        assert_eq!(df.partial2(0, 0, &[2.0]).unwrap(), 48.0);
        // third derivative of the derivative field would need a fourth level
        let ddf = df.partial_field(0).partial_field(0);
        assert!(matches!(
            ddf.partial(0, &[2.0]),
            Err(EvalError::DerivativeDepth)
        ));
    }

    #[test]
    fn gradient_is_linear_in_the_field() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let f = Polynomial::random(3, 3, &mut rng);
            let g = Polynomial::random(3, 3, &mut rng);
            let a = rng.uniform(-2.0, 2.0);
            let b = rng.uniform(-2.0, 2.0);
            let combo = ScalarField::lin_comb(0.0, vec![(a, f.field()), (b, g.field())]);
            let x = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let lhs = combo.gradient(&x).unwrap();
            let gf = f.field().gradient(&x).unwrap();
            let gg = g.field().gradient(&x).unwrap();
            for k in 0..3 {
                // dual arithmetic performs the same flops as the by-hand
                // combination, so this holds to the last bit
                assert_eq!(lhs[k], a * gf[k] + b * gg[k]);
            }
        }
    }

    #[test]
    fn chain_rule_through_composition() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..20 {
            let outer = Polynomial::random(2, 3, &mut rng);
            let inner1 = Polynomial::random(2, 2, &mut rng);
            let inner2 = Polynomial::random(2, 2, &mut rng);
            let composed = ScalarField::compose(
                outer.field(),
                vec![inner1.field(), inner2.field()],
            );
            let x = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let direct = composed.gradient(&x).unwrap();
            let mid = [
                inner1.field().eval(&x).unwrap(),
                inner2.field().eval(&x).unwrap(),
            ];
            let outer_grad = outer.field().gradient(&mid).unwrap();
            let j = jacobian(&[inner1.field(), inner2.field()], &x).unwrap();
            for k in 0..2 {
                let by_hand = outer_grad[0] * j[0][k] + outer_grad[1] * j[1][k];
                assert!((direct[k] - by_hand).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fd_check_passes_on_sine() {
        let f = ScalarField::new(SinField);
        let report = fd_check(&f, &[(-1.0, 1.0)], 100, 1e-6, 1e-6, 0).unwrap();
        assert!(report.pass(), "worst rel error {}", report.worst_rel_error);
    }

    #[test]
    fn fd_check_cubic_worst_error_small() {
        let f = poly(1, vec![(1.0, vec![3])]);
        let report = fd_check(&f, &[(-2.0, 2.0)], 100, 1e-6, 1e-6, 1).unwrap();
        assert!(report.pass());
        assert!(report.worst_rel_error < 1e-6);
    }

    #[test]
    fn fd_check_constant_is_exact() {
        let f = ScalarField::constant(2, 4.0);
        let report = fd_check(&f, &[(-1.0, 1.0), (-1.0, 1.0)], 10, 1e-6, 1e-9, 2).unwrap();
        assert_eq!(report.worst_abs_error, 0.0);
    }

    #[test]
    fn pinning_an_input_drops_a_dimension() {
        // f(q, z) = q z pinned at z = 3 becomes 3 q.
        let f = poly(2, vec![(1.0, vec![1, 1])]);
        let g = f.pin(1, 3.0);
        assert_eq!(g.dim(), 1);
        assert_eq!(g.eval(&[2.0]).unwrap(), 6.0);
        assert_eq!(g.partial(0, &[2.0]).unwrap(), 3.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = ScalarField::constant(2, 1.0);
        assert!(matches!(
            f.eval(&[1.0]),
            Err(EvalError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    struct SinField;

    impl FieldFn for SinField {
        fn dim(&self) -> usize {
            1
        }

        fn eval<S: EvalScalar>(&self, x: &[S]) -> Result<S, EvalError> {
            Ok(x[0].sin())
        }
    }
}
