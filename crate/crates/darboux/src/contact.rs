//! Contact geometry of `(T*Q x R, eta = dz - p_i dq^i)`.
//!
//! Everything is evaluated pointwise in the canonical Darboux chart
//! `(q^1..q^n, p_1..p_n, z)`; there is no abstract-manifold layer. The sign
//! conventions are anchored by two identities that the tests enforce:
//! `flat(R) = eta` for the Reeb field `R = d/dz`, and
//! `flat(X_H) = dH - (R(H) + H) eta` for the Hamiltonian field, which in
//! coordinates reads
//!
//! ```text
//! X_H = dH/dp_i d/dq^i - (dH/dq^i + p_i dH/dz) d/dp_i
//!       + (p_i dH/dp_i - H) d/dz
//! ```
//!
//! and implies `eta(X_H) = -H`. The evolution field is
//! `E_H = X_H + H R`, with z-component `p_i dH/dp_i`; it conserves `H`,
//! while `X_H` dissipates it at rate `H dH/dz`.

use thiserror::Error;

use crate::autodiff::{jacobian, EvalError, ScalarField, VectorField};

/// A point `(q, p, z)` of the extended phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
}

/// Errors constructing contact objects.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ContactError {
    #[error("q and p must have equal positive length (got {q} and {p})")]
    BadShape { q: usize, p: usize },
    #[error("a contact chart has odd dimension 2n+1, got {0}")]
    EvenDimension(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl ContactState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, z: f64) -> Result<Self, ContactError> {
        if q.len() != p.len() || q.is_empty() {
            return Err(ContactError::BadShape { q: q.len(), p: p.len() });
        }
        Ok(ContactState { q, p, z })
    }

    /// Dimension of the configuration space `Q`.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Chart dimension `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.q.len() + 1
    }

    /// Flatten to the chart ordering `(q.., p.., z)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.q);
        out.extend_from_slice(&self.p);
        out.push(self.z);
        out
    }

    /// Rebuild from the chart ordering; the length must be odd.
    pub fn from_slice(x: &[f64]) -> Result<Self, ContactError> {
        if x.len() % 2 == 0 || x.len() < 3 {
            return Err(ContactError::EvenDimension(x.len()));
        }
        let n = (x.len() - 1) / 2;
        Ok(ContactState {
            q: x[..n].to_vec(),
            p: x[n..2 * n].to_vec(),
            z: x[2 * n],
        })
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite()
            && self.q.iter().all(|v| v.is_finite())
            && self.p.iter().all(|v| v.is_finite())
    }
}

/// Tangent vector at a state, components in the frame `(d/dq^i, d/dp_i, d/dz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: ContactState,
    pub components: Vec<f64>,
}

/// Cotangent vector at a state, components in the coframe `(dq^i, dp_i, dz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentVector {
    pub base: ContactState,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: ContactState, components: Vec<f64>) -> Self {
        assert_eq!(components.len(), base.dim());
        TangentVector { base, components }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn q_component(&self, i: usize) -> f64 {
        self.components[i]
    }

    pub fn p_component(&self, i: usize) -> f64 {
        self.components[self.n() + i]
    }

    pub fn z_component(&self) -> f64 {
        self.components[2 * self.n()]
    }
}

impl CotangentVector {
    pub fn new(base: ContactState, components: Vec<f64>) -> Self {
        assert_eq!(components.len(), base.dim());
        CotangentVector { base, components }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn dq_component(&self, i: usize) -> f64 {
        self.components[i]
    }

    pub fn dp_component(&self, i: usize) -> f64 {
        self.components[self.n() + i]
    }

    pub fn dz_component(&self) -> f64 {
        self.components[2 * self.n()]
    }
}

/// `eta(v) = v_z - p_i v_q^i` at the base point of `v`.
pub fn eta(v: &TangentVector) -> f64 {
    let n = v.n();
    let mut out = v.components[2 * n];
    for i in 0..n {
        out -= v.base.p[i] * v.components[i];
    }
    out
}

/// `d eta(v, w) = sum_i (v_q^i w_p_i - w_q^i v_p_i)` (so `d eta = dq^i ^ dp_i`).
pub fn d_eta(v: &TangentVector, w: &TangentVector) -> f64 {
    let n = v.n();
    let mut out = 0.0;
    for i in 0..n {
        out += v.components[i] * w.components[n + i] - w.components[i] * v.components[n + i];
    }
    out
}

/// The Reeb field `d/dz` as a vector field on the `2n + 1` chart.
pub fn reeb(n: usize) -> VectorField {
    assert!(n >= 1);
    let dim = 2 * n + 1;
    let mut components = vec![ScalarField::constant(dim, 0.0); 2 * n];
    components.push(ScalarField::constant(dim, 1.0));
    VectorField::new(components)
}

/// The isomorphism `flat(v) = i_v d eta + eta(v) eta`.
pub fn flat(v: &TangentVector) -> CotangentVector {
    let n = v.n();
    let eta_v = eta(v);
    let mut components = vec![0.0; 2 * n + 1];
    for i in 0..n {
        // i_v d eta = v_q^i dp_i - v_p_i dq^i ; eta = -p_i dq^i + dz
        components[i] = -v.components[n + i] - eta_v * v.base.p[i];
        components[n + i] = v.components[i];
    }
    components[2 * n] = eta_v;
    CotangentVector::new(v.base.clone(), components)
}

/// The inverse of [`flat`], solved in closed form.
pub fn sharp(alpha: &CotangentVector) -> TangentVector {
    let n = alpha.n();
    let a_z = alpha.components[2 * n];
    let mut components = vec![0.0; 2 * n + 1];
    let mut z_comp = a_z;
    for i in 0..n {
        let a_pi = alpha.components[n + i];
        components[i] = a_pi;
        components[n + i] = -alpha.components[i] - alpha.base.p[i] * a_z;
        z_comp += alpha.base.p[i] * a_pi;
    }
    components[2 * n] = z_comp;
    TangentVector::new(alpha.base.clone(), components)
}

fn split_dim(h: &ScalarField) -> usize {
    let dim = h.dim();
    assert!(dim % 2 == 1 && dim >= 3, "expected a field on a 2n+1 chart");
    (dim - 1) / 2
}

/// The contact Hamiltonian vector field of `H` as reusable component fields.
pub fn hamiltonian_field(h: &ScalarField) -> VectorField {
    field_of(h, true)
}

/// The evolution vector field `E_H = X_H + H R`.
pub fn evolution_field(h: &ScalarField) -> VectorField {
    field_of(h, false)
}

fn field_of(h: &ScalarField, subtract_h: bool) -> VectorField {
    let n = split_dim(h);
    let dim = h.dim();
    let mut components = Vec::with_capacity(dim);
    for i in 0..n {
        components.push(h.partial_field(n + i));
    }
    for i in 0..n {
        let dq = h.partial_field(i);
        let p_dz = ScalarField::product(ScalarField::coord(dim, n + i), h.partial_field(2 * n));
        components.push(ScalarField::lin_comb(0.0, vec![(-1.0, dq), (-1.0, p_dz)]));
    }
    let mut z_terms: Vec<(f64, ScalarField)> = (0..n)
        .map(|i| {
            (
                1.0,
                ScalarField::product(ScalarField::coord(dim, n + i), h.partial_field(n + i)),
            )
        })
        .collect();
    if subtract_h {
        z_terms.push((-1.0, h.clone()));
    }
    components.push(ScalarField::lin_comb(0.0, z_terms));
    VectorField::new(components)
}

/// Evaluate the Hamiltonian field at one state from a single gradient call;
/// this is the hot path for the integrators.
pub fn hamiltonian_rhs(h: &ScalarField, x: &ContactState) -> Result<TangentVector, EvalError> {
    rhs_of(h, x, true)
}

/// Evaluate the evolution field at one state.
pub fn evolution_rhs(h: &ScalarField, x: &ContactState) -> Result<TangentVector, EvalError> {
    rhs_of(h, x, false)
}

fn rhs_of(h: &ScalarField, x: &ContactState, subtract_h: bool) -> Result<TangentVector, EvalError> {
    let n = x.n();
    let flat_x = x.to_vec();
    let grad = h.gradient(&flat_x)?;
    let dz = grad[2 * n];
    let mut components = vec![0.0; 2 * n + 1];
    let mut z_comp = 0.0;
    for i in 0..n {
        components[i] = grad[n + i];
        components[n + i] = -(grad[i] + x.p[i] * dz);
        z_comp += x.p[i] * grad[n + i];
    }
    if subtract_h {
        z_comp -= h.eval(&flat_x)?;
    }
    components[2 * n] = z_comp;
    Ok(TangentVector::new(x.clone(), components))
}

/// Evaluate a vector field on the contact chart at a state.
pub fn eval_field(field: &VectorField, x: &ContactState) -> Result<TangentVector, EvalError> {
    let components = field.eval_at(&x.to_vec())?;
    Ok(TangentVector::new(x.clone(), components))
}

/// Jacobi bracket `{f, g} = Lambda(df, dg) + f E(g) - g E(f)` of the contact
/// structure, with `E = -R` and
/// `Lambda(df, dg) = dg(sharp_Lambda(df))`, `sharp_Lambda(df) = X_f + f R`.
///
/// The implementation accumulates pairwise products, so antisymmetry holds
/// exactly in floating point.
pub fn jacobi_bracket(
    f: &ScalarField,
    g: &ScalarField,
    x: &ContactState,
) -> Result<f64, EvalError> {
    let (lambda, fv, gv, fz, gz) = bracket_parts(f, g, x)?;
    Ok(lambda + (gv * fz - fv * gz))
}

/// `Lambda(df, dg)`, the bivector part of the Jacobi bracket.
pub fn lambda_pairing(
    f: &ScalarField,
    g: &ScalarField,
    x: &ContactState,
) -> Result<f64, EvalError> {
    Ok(bracket_parts(f, g, x)?.0)
}

fn bracket_parts(
    f: &ScalarField,
    g: &ScalarField,
    x: &ContactState,
) -> Result<(f64, f64, f64, f64, f64), EvalError> {
    let n = x.n();
    let flat_x = x.to_vec();
    let (fv, df) = f.eval_with_gradient(&flat_x)?;
    let (gv, dg) = g.eval_with_gradient(&flat_x)?;
    let (fz, gz) = (df[2 * n], dg[2 * n]);
    let mut lambda = 0.0;
    for i in 0..n {
        lambda += df[n + i] * dg[i] - df[i] * dg[n + i];
        lambda += x.p[i] * (df[n + i] * gz - fz * dg[n + i]);
    }
    Ok((lambda, fv, gv, fz, gz))
}

/// The Jacobi bracket `{f, g}` as a reusable scalar field, assembled from
/// partial-derivative fields; useful when the bracket itself needs to be
/// differentiated or evaluated along flows.
pub fn bracket_field(f: &ScalarField, g: &ScalarField) -> ScalarField {
    let n = split_dim(f);
    assert_eq!(f.dim(), g.dim());
    let dim = f.dim();
    let fz = f.partial_field(2 * n);
    let gz = g.partial_field(2 * n);
    let mut terms: Vec<(f64, ScalarField)> = Vec::with_capacity(4 * n + 2);
    for i in 0..n {
        let (fq, gq) = (f.partial_field(i), g.partial_field(i));
        let (fp, gp) = (f.partial_field(n + i), g.partial_field(n + i));
        let p_i = ScalarField::coord(dim, n + i);
        terms.push((1.0, ScalarField::product(fp.clone(), gq)));
        terms.push((-1.0, ScalarField::product(fq, gp.clone())));
        terms.push((
            1.0,
            ScalarField::product(p_i.clone(), ScalarField::product(fp, gz.clone())),
        ));
        terms.push((
            -1.0,
            ScalarField::product(p_i, ScalarField::product(fz.clone(), gp)),
        ));
    }
    terms.push((-1.0, ScalarField::product(f.clone(), gz)));
    terms.push((1.0, ScalarField::product(g.clone(), fz)));
    ScalarField::lin_comb(0.0, terms)
}

/// Coordinate Lie bracket `[X, Y](x) = JY(x) X(x) - JX(x) Y(x)`.
pub fn lie_bracket(
    x_field: &VectorField,
    y_field: &VectorField,
    at: &ContactState,
) -> Result<TangentVector, EvalError> {
    let point = at.to_vec();
    let xv = x_field.eval_at(&point)?;
    let yv = y_field.eval_at(&point)?;
    let jx = jacobian(x_field.components(), &point)?;
    let jy = jacobian(y_field.components(), &point)?;
    let dim = point.len();
    let mut components = vec![0.0; dim];
    for k in 0..dim {
        let mut acc = 0.0;
        for m in 0..dim {
            acc += jy[k][m] * xv[m] - jx[k][m] * yv[m];
        }
        components[k] = acc;
    }
    Ok(TangentVector::new(at.clone(), components))
}

/// Horizontal Darboux frame field `A_i = d/dq^i + p_i d/dz`.
///
/// Together with `B^i = d/dp_i` these span `ker eta`, and
/// `{A_i, B^i, R}` is dual to `{dq^i, dp_i, eta}`; the brackets satisfy
/// `[A_i, B^i] = -R`.
pub fn frame_a(n: usize, i: usize) -> VectorField {
    assert!(i < n);
    let dim = 2 * n + 1;
    let mut components = vec![ScalarField::constant(dim, 0.0); dim];
    components[i] = ScalarField::constant(dim, 1.0);
    components[2 * n] = ScalarField::coord(dim, n + i);
    VectorField::new(components)
}

/// Darboux frame field `B^i = d/dp_i`.
pub fn frame_b(n: usize, i: usize) -> VectorField {
    assert!(i < n);
    let dim = 2 * n + 1;
    let mut components = vec![ScalarField::constant(dim, 0.0); dim];
    components[n + i] = ScalarField::constant(dim, 1.0);
    VectorField::new(components)
}
