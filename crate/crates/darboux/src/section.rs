//! Candidate sections of `T*Q x R` and the Hamilton-Jacobi checks.
//!
//! Two kinds of candidate solutions appear:
//!
//! - a [`MomentumSection`] over the extended base assigns momenta
//!   `p_j = gamma_j(q, z)` and leaves `z` alone, so its image is the graph
//!   `{(q, gamma(q, z), z)}`;
//! - a [`JetSection`] over `Q` assigns `(p_j, z) = (gamma_j(q), gamma_z(q))`;
//!   its image is Legendrian exactly when it is the 1-jet of a function,
//!   `gamma_j = d gamma_z / dq^j`.
//!
//! For the Hamiltonian field `X_H`, a momentum section with coisotropic
//! image and Lagrangian leaves solves the Hamilton-Jacobi problem when
//!
//! ```text
//! dH/dq^j + dH/dp_i dgamma_i/dq^j
//!   + gamma_j (dH/dz + dH/dp_i dgamma_i/dz) - H dgamma_j/dz = 0
//! ```
//!
//! along the graph, and a Legendrian jet section solves it when
//! `H o gamma = 0`. For the evolution field `E_H` the corresponding
//! equations are
//!
//! ```text
//! dH/dq^j + dH/dp_i dgamma_j/dq^i
//!   + (gamma_i dH/dp_i) dgamma_j/dz + gamma_j dH/dz = 0
//! ```
//!
//! and `d(H o gamma) = 0`. Every check here samples a grid, reports the
//! worst residual with a witness point, and records whether the section
//! hypotheses held; a report with violated assumptions is a distinct state,
//! not a failure, because the theorems are conditional.
//!
//! [`gamma_related_check`] is the ground truth all residual forms are
//! validated against: it compares the field along the graph with the lift
//! of its projection through the tangent map of the section directly.

use serde::Serialize;

use crate::autodiff::{EvalError, ScalarField};
use crate::contact::{evolution_rhs, hamiltonian_rhs, jacobi_bracket, ContactState};
use crate::flow::{integrate, FieldKind, FlowError};
use crate::sampling::SplitMix64;

/// Section of `T*Q x R -> Q x R`: component fields `gamma_j(q, z)`.
#[derive(Clone, Debug)]
pub struct MomentumSection {
    n: usize,
    components: Vec<ScalarField>,
}

impl MomentumSection {
    pub fn new(components: Vec<ScalarField>) -> Self {
        let n = components.len();
        assert!(n >= 1, "a section needs at least one component");
        assert!(
            components.iter().all(|f| f.dim() == n + 1),
            "momentum-section components are fields on (q_1..q_n, z)"
        );
        MomentumSection { n, components }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Values `gamma_j(x)` at a base point `x = (q, z)`.
    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|f| f.eval(x)).collect()
    }

    /// The graph point `(q, gamma(q, z), z)` over `x = (q, z)`.
    pub fn state_at(&self, x: &[f64]) -> Result<ContactState, EvalError> {
        let p = self.values(x)?;
        Ok(ContactState::new(x[..self.n].to_vec(), p, x[self.n])
            .expect("section shapes are validated on construction"))
    }

    /// Pull a Hamiltonian back to the base: `(q, z) -> H(q, gamma(q, z), z)`.
    pub fn pullback(&self, h: &ScalarField) -> ScalarField {
        assert_eq!(h.dim(), 2 * self.n + 1);
        let dim = self.n + 1;
        let mut inner: Vec<ScalarField> = (0..self.n)
            .map(|i| ScalarField::coord(dim, i))
            .collect();
        inner.extend(self.components.iter().cloned());
        inner.push(ScalarField::coord(dim, self.n));
        ScalarField::compose(h.clone(), inner)
    }

    /// Component values plus q- and z-derivatives at one base point.
    fn values_and_derivatives(&self, x: &[f64]) -> Result<SectionJet, EvalError> {
        let mut values = Vec::with_capacity(self.n);
        let mut dq = Vec::with_capacity(self.n);
        let mut dz = Vec::with_capacity(self.n);
        for f in &self.components {
            values.push(f.eval(x)?);
            let grad = f.gradient(x)?;
            dz.push(grad[self.n]);
            dq.push(grad[..self.n].to_vec());
        }
        Ok(SectionJet { values, dq, dz })
    }
}

/// First-order data of a momentum section at one base point:
/// `dq[j][i] = dgamma_j/dq^i`, `dz[j] = dgamma_j/dz`.
struct SectionJet {
    values: Vec<f64>,
    dq: Vec<Vec<f64>>,
    dz: Vec<f64>,
}

/// Section of `T*Q x R -> Q`: momenta `gamma_j(q)` plus height `gamma_z(q)`.
#[derive(Clone, Debug)]
pub struct JetSection {
    n: usize,
    components: Vec<ScalarField>,
    z_map: ScalarField,
}

impl JetSection {
    pub fn new(components: Vec<ScalarField>, z_map: ScalarField) -> Self {
        let n = components.len();
        assert!(n >= 1, "a section needs at least one component");
        assert!(
            components.iter().all(|f| f.dim() == n) && z_map.dim() == n,
            "jet-section components are fields on (q_1..q_n)"
        );
        JetSection { n, components, z_map }
    }

    /// The 1-jet of `f`: components `df/dq^j` with height `f`; its image is
    /// Legendrian by construction.
    pub fn one_jet(f: &ScalarField) -> Self {
        let n = f.dim();
        let components = (0..n).map(|j| f.partial_field(j)).collect();
        JetSection { n, components, z_map: f.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn z_map(&self) -> &ScalarField {
        &self.z_map
    }

    /// The graph point `(q, gamma(q), gamma_z(q))`.
    pub fn state_at(&self, q: &[f64]) -> Result<ContactState, EvalError> {
        let p = self
            .components
            .iter()
            .map(|f| f.eval(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ContactState::new(q.to_vec(), p, self.z_map.eval(q)?)
            .expect("section shapes are validated on construction"))
    }

    /// Pull a Hamiltonian back to `Q`: `q -> H(q, gamma(q), gamma_z(q))`.
    pub fn pullback(&self, h: &ScalarField) -> ScalarField {
        assert_eq!(h.dim(), 2 * self.n + 1);
        let mut inner: Vec<ScalarField> = (0..self.n)
            .map(|i| ScalarField::coord(self.n, i))
            .collect();
        inner.extend(self.components.iter().cloned());
        inner.push(self.z_map.clone());
        ScalarField::compose(h.clone(), inner)
    }
}

/// A candidate section of either base.
#[derive(Clone, Debug)]
pub enum Section {
    Momentum(MomentumSection),
    Jet(JetSection),
}

impl Section {
    pub fn n(&self) -> usize {
        match self {
            Section::Momentum(s) => s.n(),
            Section::Jet(s) => s.n(),
        }
    }

    /// Base dimension: `n + 1` over `Q x R`, `n` over `Q`.
    pub fn base_dim(&self) -> usize {
        match self {
            Section::Momentum(s) => s.n() + 1,
            Section::Jet(s) => s.n(),
        }
    }
}

/// Sampling plan over a box of base points.
#[derive(Clone, Debug)]
pub enum Grid {
    /// Cartesian mesh, endpoints included (a single-count axis samples its
    /// midpoint).
    Mesh {
        bounds: Vec<(f64, f64)>,
        counts: Vec<usize>,
    },
    /// Uniform random samples from the box, reproducible from the seed.
    Random {
        bounds: Vec<(f64, f64)>,
        samples: usize,
        seed: u64,
    },
}

impl Grid {
    pub fn mesh(bounds: Vec<(f64, f64)>, counts: Vec<usize>) -> Self {
        assert_eq!(bounds.len(), counts.len());
        assert!(counts.iter().all(|&c| c >= 1));
        assert!(bounds.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi));
        Grid::Mesh { bounds, counts }
    }

    /// Mesh with the same bounds and count on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, count: usize) -> Self {
        Grid::mesh(vec![(lo, hi); dim], vec![count; dim])
    }

    pub fn random(bounds: Vec<(f64, f64)>, samples: usize, seed: u64) -> Self {
        assert!(samples >= 1);
        Grid::Random { bounds, samples, seed }
    }

    pub fn dim(&self) -> usize {
        match self {
            Grid::Mesh { bounds, .. } | Grid::Random { bounds, .. } => bounds.len(),
        }
    }

    /// Materialize the sample points (desk-scale grids only).
    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Grid::Mesh { bounds, counts } => {
                let axes: Vec<Vec<f64>> = bounds
                    .iter()
                    .zip(counts)
                    .map(|(&(lo, hi), &count)| {
                        if count == 1 {
                            vec![0.5 * (lo + hi)]
                        } else {
                            (0..count)
                                .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                                .collect()
                        }
                    })
                    .collect();
                let total: usize = counts.iter().product();
                let mut out = Vec::with_capacity(total);
                let mut idx = vec![0usize; axes.len()];
                for _ in 0..total {
                    out.push(idx.iter().zip(&axes).map(|(&k, axis)| axis[k]).collect());
                    for slot in (0..idx.len()).rev() {
                        idx[slot] += 1;
                        if idx[slot] < axes[slot].len() {
                            break;
                        }
                        idx[slot] = 0;
                    }
                }
                out
            }
            Grid::Random { bounds, samples, seed } => {
                let mut rng = SplitMix64::new(*seed);
                (0..*samples)
                    .map(|_| bounds.iter().map(|&(lo, hi)| rng.uniform(lo, hi)).collect())
                    .collect()
            }
        }
    }
}

/// Whether the hypotheses of the theorem behind a check held on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Assumptions {
    Satisfied,
    Violated { details: String },
}

impl Assumptions {
    pub fn satisfied(&self) -> bool {
        matches!(self, Assumptions::Satisfied)
    }
}

/// Outcome of [`classify_section`].
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    /// Every fixed-z leaf is Lagrangian: the q-curl of the components
    /// vanishes on the grid.
    pub lagrangian_leaves: bool,
    /// Image is coisotropic with Lagrangian leaves: additionally the
    /// z-derivative of the components stays proportional to the components.
    pub coisotropic: bool,
    pub curl_defect: f64,
    pub proportionality_defect: f64,
    pub curl_witness: Option<Vec<f64>>,
    pub proportionality_witness: Option<Vec<f64>>,
    pub samples: usize,
}

/// Classify the image of a momentum section on a grid.
///
/// `lagrangian_leaves` checks `dgamma_i/dq^j = dgamma_j/dq^i`;
/// `coisotropic` additionally requires
/// `gamma_j dgamma_i/dz = gamma_i dgamma_j/dz` (the two together are
/// equivalent to the image being coisotropic and z-foliated by Lagrangian
/// leaves). For `n = 1` both conditions are vacuous.
pub fn classify_section(
    gamma: &MomentumSection,
    grid: &Grid,
    tol: f64,
) -> Result<ClassificationReport, EvalError> {
    assert_eq!(grid.dim(), gamma.n() + 1, "grid must cover (q, z)");
    let n = gamma.n();
    let mut curl_defect = 0.0f64;
    let mut prop_defect = 0.0f64;
    let mut curl_witness = None;
    let mut prop_witness = None;
    let points = grid.points();
    for x in &points {
        let jet = gamma.values_and_derivatives(x)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let curl = (jet.dq[i][j] - jet.dq[j][i]).abs();
                if curl > curl_defect {
                    curl_defect = curl;
                    curl_witness = Some(x.clone());
                }
                let prop = (jet.values[j] * jet.dz[i] - jet.values[i] * jet.dz[j]).abs();
                if prop > prop_defect {
                    prop_defect = prop;
                    prop_witness = Some(x.clone());
                }
            }
        }
    }
    let lagrangian = curl_defect <= tol;
    let coisotropic = lagrangian && prop_defect <= tol;
    Ok(ClassificationReport {
        lagrangian_leaves: lagrangian,
        coisotropic,
        curl_defect,
        proportionality_defect: prop_defect,
        curl_witness: if lagrangian { None } else { curl_witness },
        proportionality_witness: if prop_defect <= tol { None } else { prop_witness },
        samples: points.len(),
    })
}

/// Outcome of [`legendrian_check`].
#[derive(Clone, Debug, Serialize)]
pub struct LegendrianReport {
    pub legendrian: bool,
    pub max_defect: f64,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
}

/// Check `gamma_j = dgamma_z/dq^j` on the grid: a section over `Q` has
/// Legendrian image exactly when it is (locally) a 1-jet.
pub fn legendrian_check(
    gamma: &JetSection,
    grid: &Grid,
    tol: f64,
) -> Result<LegendrianReport, EvalError> {
    assert_eq!(grid.dim(), gamma.n(), "grid must cover q");
    let mut max_defect = 0.0f64;
    let mut witness = None;
    let points = grid.points();
    for q in &points {
        let dz = gamma.z_map.gradient(q)?;
        for (j, comp) in gamma.components.iter().enumerate() {
            let defect = (comp.eval(q)? - dz[j]).abs();
            if defect > max_defect {
                max_defect = defect;
                witness = Some(q.clone());
            }
        }
    }
    Ok(LegendrianReport {
        legendrian: max_defect <= tol,
        max_defect,
        witness: (max_defect > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
    })
}

/// Residual report of one Hamilton-Jacobi equation on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub assumptions: Assumptions,
    pub max_residual: f64,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
    /// `max_residual <= tol`; reported independently of the assumptions.
    pub pass: bool,
    /// Mean of `H o gamma` over the grid (jet-section evolution check).
    pub constant: Option<f64>,
}

fn momentum_assumptions(
    gamma: &MomentumSection,
    grid: &Grid,
    tol: f64,
) -> Result<Assumptions, EvalError> {
    let class = classify_section(gamma, grid, tol)?;
    Ok(if class.coisotropic {
        Assumptions::Satisfied
    } else {
        Assumptions::Violated {
            details: format!(
                "coisotropic/Lagrangian-leaf hypotheses fail: curl defect {:.3e}, proportionality defect {:.3e}",
                class.curl_defect, class.proportionality_defect
            ),
        }
    })
}

fn jet_assumptions(
    gamma: &JetSection,
    grid: &Grid,
    tol: f64,
) -> Result<Assumptions, EvalError> {
    let report = legendrian_check(gamma, grid, tol)?;
    Ok(if report.legendrian {
        Assumptions::Satisfied
    } else {
        Assumptions::Violated {
            details: format!(
                "image is not Legendrian: 1-jet defect {:.3e}",
                report.max_defect
            ),
        }
    })
}

/// Hamilton-Jacobi residual of `X_H` for a momentum section.
pub fn hj_residual_hamiltonian(
    h: &ScalarField,
    gamma: &MomentumSection,
    grid: &Grid,
    tol: f64,
) -> Result<ResidualReport, EvalError> {
    assert_eq!(h.dim(), 2 * gamma.n() + 1);
    let assumptions = momentum_assumptions(gamma, grid, tol)?;
    let n = gamma.n();
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let points = grid.points();
    for x in &points {
        let jet = gamma.values_and_derivatives(x)?;
        let state = gamma.state_at(x)?;
        let (hv, grad) = h.eval_with_gradient(&state.to_vec())?;
        let gamma_o = grad[2 * n]
            + (0..n).map(|i| grad[n + i] * jet.dz[i]).sum::<f64>();
        for j in 0..n {
            let mut residual = grad[j] + jet.values[j] * gamma_o - hv * jet.dz[j];
            for i in 0..n {
                residual += grad[n + i] * jet.dq[i][j];
            }
            if residual.abs() > max_residual {
                max_residual = residual.abs();
                witness = Some(x.clone());
            }
        }
    }
    Ok(ResidualReport {
        assumptions,
        max_residual,
        witness: (max_residual > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_residual <= tol,
        constant: None,
    })
}

/// Hamilton-Jacobi residual of `X_H` for a jet section: `|H o gamma|`.
pub fn hj_residual_hamiltonian_jet(
    h: &ScalarField,
    gamma: &JetSection,
    grid: &Grid,
    tol: f64,
) -> Result<ResidualReport, EvalError> {
    assert_eq!(h.dim(), 2 * gamma.n() + 1);
    let assumptions = jet_assumptions(gamma, grid, tol)?;
    let pullback = gamma.pullback(h);
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let points = grid.points();
    for q in &points {
        let value = pullback.eval(q)?.abs();
        if value > max_residual {
            max_residual = value;
            witness = Some(q.clone());
        }
    }
    Ok(ResidualReport {
        assumptions,
        max_residual,
        witness: (max_residual > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_residual <= tol,
        constant: None,
    })
}

/// Hamilton-Jacobi residual of the evolution field for a momentum section.
pub fn hj_residual_evolution(
    h: &ScalarField,
    gamma: &MomentumSection,
    grid: &Grid,
    tol: f64,
) -> Result<ResidualReport, EvalError> {
    assert_eq!(h.dim(), 2 * gamma.n() + 1);
    let assumptions = momentum_assumptions(gamma, grid, tol)?;
    let n = gamma.n();
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let points = grid.points();
    for x in &points {
        let jet = gamma.values_and_derivatives(x)?;
        let state = gamma.state_at(x)?;
        let grad = h.gradient(&state.to_vec())?;
        let z_rate: f64 = (0..n).map(|i| jet.values[i] * grad[n + i]).sum();
        for j in 0..n {
            let mut residual = grad[j] + z_rate * jet.dz[j] + jet.values[j] * grad[2 * n];
            for i in 0..n {
                residual += grad[n + i] * jet.dq[j][i];
            }
            if residual.abs() > max_residual {
                max_residual = residual.abs();
                witness = Some(x.clone());
            }
        }
    }
    Ok(ResidualReport {
        assumptions,
        max_residual,
        witness: (max_residual > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_residual <= tol,
        constant: None,
    })
}

/// Hamilton-Jacobi residual of the evolution field for a jet section:
/// the q-gradient of `H o gamma` must vanish; the attained constant
/// `k = mean(H o gamma)` is reported.
pub fn hj_residual_evolution_jet(
    h: &ScalarField,
    gamma: &JetSection,
    grid: &Grid,
    tol: f64,
) -> Result<ResidualReport, EvalError> {
    assert_eq!(h.dim(), 2 * gamma.n() + 1);
    let assumptions = jet_assumptions(gamma, grid, tol)?;
    let pullback = gamma.pullback(h);
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let mut mean = 0.0f64;
    let points = grid.points();
    for q in &points {
        mean += pullback.eval(q)?;
        let grad = pullback.gradient(q)?;
        let norm = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        if norm > max_residual {
            max_residual = norm;
            witness = Some(q.clone());
        }
    }
    mean /= points.len() as f64;
    Ok(ResidualReport {
        assumptions,
        max_residual,
        witness: (max_residual > tol).then(|| witness.clone()).flatten(),
        samples: points.len(),
        pass: max_residual <= tol,
        constant: Some(mean),
    })
}

/// Outcome of the direct gamma-relatedness test.
#[derive(Clone, Debug, Serialize)]
pub struct RelatednessReport {
    pub max_mismatch: f64,
    pub witness: Option<Vec<f64>>,
    /// Chart row (0-based in `(q.., p.., z)`) of the worst mismatch.
    pub worst_row: Option<usize>,
    pub samples: usize,
    pub pass: bool,
}

/// Compare the field along the graph with the lift of its projection:
/// at each base point, `v1 = field(H) at gamma(x)` and
/// `v2 = T gamma (T pi (v1))` must agree for the section to intertwine the
/// dynamics upstairs and downstairs. This is the ground-truth test the
/// residual forms are cross-validated against; it needs no hypotheses.
pub fn gamma_related_check(
    h: &ScalarField,
    kind: FieldKind,
    section: &Section,
    grid: &Grid,
    tol: f64,
) -> Result<RelatednessReport, EvalError> {
    assert_eq!(h.dim(), 2 * section.n() + 1);
    assert_eq!(grid.dim(), section.base_dim());
    let n = section.n();
    let mut max_mismatch = 0.0f64;
    let mut witness = None;
    let mut worst_row = None;
    let points = grid.points();
    for x in &points {
        let state = match section {
            Section::Momentum(s) => s.state_at(x)?,
            Section::Jet(s) => s.state_at(x)?,
        };
        let upstairs = match kind {
            FieldKind::Hamiltonian => hamiltonian_rhs(h, &state)?,
            FieldKind::Evolution => evolution_rhs(h, &state)?,
        };
        let v1 = &upstairs.components;
        // T pi drops the p-rows over Q x R, and the p- and z-rows over Q;
        // T gamma lifts the projected vector back through the section.
        let mut v2 = vec![0.0; 2 * n + 1];
        match section {
            Section::Momentum(s) => {
                let jet = s.values_and_derivatives(x)?;
                for i in 0..n {
                    v2[i] = v1[i];
                }
                v2[2 * n] = v1[2 * n];
                for j in 0..n {
                    let mut lifted = jet.dz[j] * v1[2 * n];
                    for i in 0..n {
                        lifted += jet.dq[j][i] * v1[i];
                    }
                    v2[n + j] = lifted;
                }
            }
            Section::Jet(s) => {
                for i in 0..n {
                    v2[i] = v1[i];
                }
                for (j, comp) in s.components.iter().enumerate() {
                    let grad = comp.gradient(x)?;
                    v2[n + j] = grad.iter().zip(v1.iter()).map(|(g, v)| g * v).sum();
                }
                let grad_z = s.z_map.gradient(x)?;
                v2[2 * n] = grad_z.iter().zip(v1.iter()).map(|(g, v)| g * v).sum();
            }
        }
        for row in 0..2 * n + 1 {
            let mismatch = (v1[row] - v2[row]).abs();
            if mismatch > max_mismatch {
                max_mismatch = mismatch;
                witness = Some(x.clone());
                worst_row = Some(row);
            }
        }
    }
    Ok(RelatednessReport {
        max_mismatch,
        witness: (max_mismatch > tol).then(|| witness.clone()).flatten(),
        worst_row,
        samples: points.len(),
        pass: max_mismatch <= tol,
    })
}

/// Outcome of [`strong_solution_check`].
#[derive(Clone, Debug, Serialize)]
pub struct StrongSolutionReport {
    pub max_defect: f64,
    pub witness: Option<Vec<f64>>,
    /// Worst defect per z-slice for mesh grids (z value, defect), so the
    /// per-leaf behaviour is visible; empty for random grids.
    pub per_z: Vec<(f64, f64)>,
    pub samples: usize,
    pub pass: bool,
}

/// A solution is strong when `X_H` is tangent to every fixed-z Lagrangian
/// leaf of the graph, which happens exactly when
/// `H o gamma = gamma_i (dH/dp_i o gamma)` there. Reported per z-slice on
/// mesh grids since the condition is a per-leaf statement.
pub fn strong_solution_check(
    h: &ScalarField,
    gamma: &MomentumSection,
    grid: &Grid,
    tol: f64,
) -> Result<StrongSolutionReport, EvalError> {
    assert_eq!(h.dim(), 2 * gamma.n() + 1);
    let n = gamma.n();
    let mut max_defect = 0.0f64;
    let mut witness = None;
    let mut per_z: Vec<(f64, f64)> = Vec::new();
    let points = grid.points();
    for x in &points {
        let state = gamma.state_at(x)?;
        let (hv, grad) = h.eval_with_gradient(&state.to_vec())?;
        let radial: f64 = (0..n).map(|i| state.p[i] * grad[n + i]).sum();
        let defect = (hv - radial).abs();
        if defect > max_defect {
            max_defect = defect;
            witness = Some(x.clone());
        }
        if matches!(grid, Grid::Mesh { .. }) {
            let z = x[n];
            match per_z.iter_mut().find(|(zv, _)| *zv == z) {
                Some(slot) => slot.1 = slot.1.max(defect),
                None => per_z.push((z, defect)),
            }
        }
    }
    per_z.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(StrongSolutionReport {
        max_defect,
        witness: (max_defect > tol).then(|| witness.clone()).flatten(),
        per_z,
        samples: points.len(),
        pass: max_defect <= tol,
    })
}

/// `{f, g} + f R(g) - g R(f)`, which equals the bivector pairing
/// `Lambda(df, dg)`; for the conserved quantities of a complete solution
/// this must vanish on the solution submanifold, so any two of them can
/// only be in involution where they are linearly dependent.
pub fn involution_defect(
    f: &ScalarField,
    g: &ScalarField,
    x: &ContactState,
) -> Result<f64, EvalError> {
    let flat_x = x.to_vec();
    let bracket = jacobi_bracket(f, g, x)?;
    let fv = f.eval(&flat_x)?;
    let gv = g.eval(&flat_x)?;
    let fz = f.partial(2 * x.n(), &flat_x)?;
    let gz = g.partial(2 * x.n(), &flat_x)?;
    Ok(bracket + (fv * gz - gv * fz))
}

/// Outcome of [`conserved_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ConservedReport {
    /// `max_t |f(x(t)) - f(x(0))|` per candidate.
    pub drifts: Vec<f64>,
    pub samples: usize,
    pub blew_up: bool,
    pub pass: bool,
}

/// Integrate the chosen dynamics and measure the drift of each candidate
/// first integral along the trajectory.
pub fn conserved_check(
    h: &ScalarField,
    kind: FieldKind,
    candidates: &[ScalarField],
    x0: &ContactState,
    t_end: f64,
    dt: f64,
    tol: f64,
) -> Result<ConservedReport, FlowError> {
    let traj = integrate(h, kind, x0, t_end, dt)?;
    let mut drifts = Vec::with_capacity(candidates.len());
    for f in candidates {
        let initial = f.eval(&traj.states[0].to_vec())?;
        let mut drift = 0.0f64;
        for state in &traj.states {
            drift = drift.max((f.eval(&state.to_vec())? - initial).abs());
        }
        drifts.push(drift);
    }
    let pass = drifts.iter().all(|d| *d <= tol) && !traj.blew_up;
    Ok(ConservedReport {
        drifts,
        samples: traj.len(),
        blew_up: traj.blew_up,
        pass,
    })
}
