//! Fixed-step integration of the contact Hamilton and evolution equations.
//!
//! The integrator is classical fourth-order Runge-Kutta with a fixed step;
//! trajectories here are verification artifacts at desk scale, so
//! determinism and a checkable convergence order matter more than speed.

use serde::Serialize;

use crate::autodiff::{EvalError, ScalarField};
use crate::contact::{evolution_rhs, hamiltonian_rhs, ContactState};

/// Which of the two dynamics generated the trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Hamiltonian,
    Evolution,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Hamiltonian => "hamiltonian",
            FieldKind::Evolution => "evolution",
        }
    }
}

/// Any state component beyond this magnitude aborts the integration; large
/// enough not to mask genuine dynamics, small enough to catch the
/// exponential z-growth the contact Hamilton equations allow.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Sampled integral curve with the Hamiltonian recorded at every sample.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ContactState>,
    pub field_kind: FieldKind,
    /// `H` evaluated at each sample.
    pub energy: Vec<f64>,
    /// Set when the integration aborted on the blow-up guard; the samples
    /// collected so far are kept.
    pub blew_up: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &ContactState {
        self.states.last().expect("trajectory has at least the initial sample")
    }
}

/// Integration failure (poles along the orbit, bad arguments).
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum FlowError {
    #[error("integration step and horizon must be positive")]
    BadStep,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Integrate `x' = X_H(x)` (or the evolution field) from `x0` over
/// `[0, t_end]` with fixed step `dt`, sampling at `0, dt, 2dt, ...`; the
/// final step is shortened to land exactly on `t_end`.
pub fn integrate(
    h: &ScalarField,
    kind: FieldKind,
    x0: &ContactState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(FlowError::BadStep);
    }
    let rhs = |x: &ContactState| -> Result<Vec<f64>, EvalError> {
        let v = match kind {
            FieldKind::Hamiltonian => hamiltonian_rhs(h, x)?,
            FieldKind::Evolution => evolution_rhs(h, x)?,
        };
        Ok(v.components)
    };

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energy = Vec::new();
    let mut blew_up = false;

    let mut x = x0.clone();
    let full_steps = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;
    let has_tail = remainder > 1e-12 * dt;
    let total_steps = full_steps + usize::from(has_tail);

    times.push(0.0);
    energy.push(h.eval(&x.to_vec())?);
    states.push(x.clone());

    for step_index in 0..total_steps {
        let last = step_index + 1 == total_steps;
        let h_step = if step_index < full_steps { dt } else { remainder };
        // recompute the grid instead of accumulating, and land on t_end
        let t_next = if last { t_end } else { (step_index + 1) as f64 * dt };
        x = rk4_step(&rhs, &x, h_step)?;
        if x.to_vec().iter().any(|v| v.abs() > BLOWUP_LIMIT) {
            blew_up = true;
            break;
        }
        times.push(t_next);
        energy.push(h.eval(&x.to_vec())?);
        states.push(x.clone());
    }

    Ok(Trajectory { times, states, field_kind: kind, energy, blew_up })
}

fn rk4_step<F>(rhs: &F, x: &ContactState, h: f64) -> Result<ContactState, FlowError>
where
    F: Fn(&ContactState) -> Result<Vec<f64>, EvalError>,
{
    let y0 = x.to_vec();
    let k1 = rhs(x)?;
    let k2 = rhs(&offset(&y0, &k1, h / 2.0))?;
    let k3 = rhs(&offset(&y0, &k2, h / 2.0))?;
    let k4 = rhs(&offset(&y0, &k3, h))?;
    let mut out = y0.clone();
    for i in 0..out.len() {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(ContactState::from_slice(&out).expect("state shape preserved"))
}

fn offset(y: &[f64], k: &[f64], h: f64) -> ContactState {
    let stepped: Vec<f64> = y.iter().zip(k).map(|(a, b)| a + h * b).collect();
    ContactState::from_slice(&stepped).expect("state shape preserved")
}

/// Conservation/dissipation diagnostics of a trajectory.
///
/// For evolution runs the interesting number is the drift
/// `max_k |H(x_k) - H(x_0)|`. For Hamiltonian runs it is the defect of the
/// dissipation law `d/dt log H = -dH/dz`, finite-differenced in `t` at the
/// interior samples where `H != 0`.
#[derive(Clone, Debug, Serialize)]
pub struct DissipationReport {
    pub energy: Vec<f64>,
    pub conservation_drift: f64,
    /// `max |d/dt log H + dH/dz|` (Hamiltonian runs; 0 over no samples).
    pub decay_defect: f64,
    /// Mean of `-d/dt log H` over the usable interior samples, when any.
    pub mean_decay_rate: Option<f64>,
}

/// Diagnose a trajectory against the exact rates of its generating field.
pub fn dissipation_report(
    traj: &Trajectory,
    h: &ScalarField,
) -> Result<DissipationReport, EvalError> {
    assert!(!traj.is_empty(), "trajectory must hold at least one sample");
    let h0 = traj.energy[0];
    let conservation_drift = traj
        .energy
        .iter()
        .map(|hk| (hk - h0).abs())
        .fold(0.0, f64::max);

    let mut decay_defect = 0.0f64;
    let mut rate_sum = 0.0f64;
    let mut rate_count = 0usize;
    for k in 1..traj.len().saturating_sub(1) {
        let (hm, hk, hp) = (traj.energy[k - 1], traj.energy[k], traj.energy[k + 1]);
        if hm.abs() < 1e-100 || hk.abs() < 1e-100 || hp.abs() < 1e-100 {
            continue;
        }
        // three-point derivative that also handles the shortened final step
        let h_minus = traj.times[k] - traj.times[k - 1];
        let h_plus = traj.times[k + 1] - traj.times[k];
        let (lm, l0, lp) = (hm.abs().ln(), hk.abs().ln(), hp.abs().ln());
        let d_log = (h_minus * h_minus * lp - h_plus * h_plus * lm
            + (h_plus * h_plus - h_minus * h_minus) * l0)
            / (h_minus * h_plus * (h_minus + h_plus));
        let dz = h.partial(traj.states[k].dim() - 1, &traj.states[k].to_vec())?;
        decay_defect = decay_defect.max((d_log + dz).abs());
        rate_sum += -d_log;
        rate_count += 1;
    }
    Ok(DissipationReport {
        energy: traj.energy.clone(),
        conservation_drift,
        decay_defect,
        mean_decay_rate: (rate_count > 0).then(|| rate_sum / rate_count as f64),
    })
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    t: f64,
    q: &'a [f64],
    p: &'a [f64],
    z: f64,
    #[serde(rename = "H")]
    h: f64,
}

impl Trajectory {
    /// CSV with header `t,q1..qn,p1..pn,z,H`; floats use the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map(ContactState::n).unwrap_or(0);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",q{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",p{i}"));
        }
        out.push_str(",z,H\n");
        for (k, state) in self.states.iter().enumerate() {
            out.push_str(&format!("{}", self.times[k]));
            for v in state.q.iter().chain(state.p.iter()) {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", state.z, self.energy[k]));
        }
        out
    }

    /// JSON array of sample records `{t, q, p, z, H}`.
    pub fn to_json(&self) -> String {
        let records: Vec<SampleRecord> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| SampleRecord {
                t: self.times[k],
                q: &s.q,
                p: &s.p,
                z: s.z,
                h: self.energy[k],
            })
            .collect();
        serde_json::to_string(&records).expect("trajectory serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{compile_str, VariableLayout};

    fn dissipative_h() -> ScalarField {
        compile_str("p1^2/2 + q1^2/2 + 0.1*z", &VariableLayout::contact(1)).unwrap()
    }

    fn x0() -> ContactState {
        ContactState::new(vec![1.0], vec![1.0], 1.0).unwrap()
    }

    #[test]
    fn zero_hamiltonian_freezes_the_state() {
        let h = ScalarField::constant(3, 0.0);
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0(), 1.0, 0.1).unwrap();
        assert!(!traj.blew_up);
        for s in &traj.states {
            assert_eq!(s.to_vec(), x0().to_vec());
        }
        let report = dissipation_report(&traj, &h).unwrap();
        assert_eq!(report.conservation_drift, 0.0);
        assert_eq!(report.decay_defect, 0.0);
    }

    #[test]
    fn hamiltonian_flow_obeys_the_decay_law() {
        // dH/dt = -H dH/dz = -0.1 H, so H(t) = H(0) exp(-0.1 t)
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0(), 10.0, 1e-3).unwrap();
        let h0 = traj.energy[0];
        for (t, hk) in traj.times.iter().zip(&traj.energy) {
            let expected = h0 * (-0.1 * t).exp();
            assert!(
                ((hk - expected) / expected).abs() < 1e-6,
                "H drifted from the decay law at t = {t}"
            );
        }
    }

    #[test]
    fn evolution_flow_conserves_h() {
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Evolution, &x0(), 10.0, 1e-3).unwrap();
        let report = dissipation_report(&traj, &h).unwrap();
        assert!(report.conservation_drift < 1e-8, "drift {}", report.conservation_drift);
    }

    #[test]
    fn decay_rate_metric_recovers_lambda() {
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0(), 10.0, 1e-3).unwrap();
        let report = dissipation_report(&traj, &h).unwrap();
        assert!(report.decay_defect < 1e-4, "defect {}", report.decay_defect);
        let rate = report.mean_decay_rate.unwrap();
        assert!((rate - 0.1).abs() < 1e-4, "rate {rate}");
    }

    #[test]
    fn sampling_lands_exactly_on_t_end() {
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0(), 0.25, 0.1).unwrap();
        assert_eq!(traj.times.len(), 4);
        assert_eq!(*traj.times.last().unwrap(), 0.25);
        // when dt divides t_end there is no extra sample
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0(), 0.3, 0.1).unwrap();
        assert_eq!(traj.times.len(), 4);
        assert_eq!(*traj.times.last().unwrap(), 0.3);
    }

    #[test]
    fn fourth_order_convergence() {
        let h = dissipative_h();
        let reference = integrate(&h, FieldKind::Hamiltonian, &x0(), 2.0, 0.04 / 16.0)
            .unwrap()
            .last_state()
            .to_vec();
        let end_error = |dt: f64| -> f64 {
            let end = integrate(&h, FieldKind::Hamiltonian, &x0(), 2.0, dt)
                .unwrap()
                .last_state()
                .to_vec();
            end.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let ratio = end_error(0.04) / end_error(0.02);
        assert!(
            (12.0..=20.0).contains(&ratio),
            "halving dt scaled the error by {ratio}, expected ~16"
        );
    }

    #[test]
    fn conservation_drift_scales_fourth_order() {
        let h = dissipative_h();
        let drift = |dt: f64| {
            let traj = integrate(&h, FieldKind::Evolution, &x0(), 2.0, dt).unwrap();
            dissipation_report(&traj, &h).unwrap().conservation_drift
        };
        let ratio = drift(0.04) / drift(0.02);
        assert!(
            (10.0..=24.0).contains(&ratio),
            "drift ratio {ratio}, expected ~16"
        );
    }

    #[test]
    fn blowup_aborts_with_flag_and_partial_trajectory() {
        // H = -z^2 gives dz/dt = z^2: finite-time escape from z(0) = 1
        let h = compile_str("-z^2", &VariableLayout::contact(1)).unwrap();
        let x0 = ContactState::new(vec![0.0], vec![0.0], 1.0).unwrap();
        let traj = integrate(&h, FieldKind::Hamiltonian, &x0, 2.0, 1e-3).unwrap();
        assert!(traj.blew_up);
        assert!(!traj.is_empty());
        assert!(*traj.times.last().unwrap() < 2.0);
        for s in &traj.states {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn csv_round_trips_shortest_floats() {
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Evolution, &x0(), 0.2, 0.1).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,q1,p1,z,H");
        for (k, line) in lines.enumerate() {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[0], traj.times[k]);
            assert_eq!(cols[1], traj.states[k].q[0]);
            assert_eq!(cols[2], traj.states[k].p[0]);
            assert_eq!(cols[3], traj.states[k].z);
            assert_eq!(cols[4], traj.energy[k]);
        }
    }

    #[test]
    fn json_matches_sample_records() {
        let h = dissipative_h();
        let traj = integrate(&h, FieldKind::Evolution, &x0(), 0.2, 0.1).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&traj.to_json()).unwrap();
        let records = parsed.as_array().unwrap();
        assert_eq!(records.len(), traj.len());
        assert_eq!(records[0]["t"].as_f64().unwrap(), 0.0);
        assert_eq!(records[0]["q"][0].as_f64().unwrap(), 1.0);
        assert_eq!(records[0]["H"].as_f64().unwrap(), traj.energy[0]);
    }

    #[test]
    fn bad_steps_are_rejected() {
        let h = dissipative_h();
        assert_eq!(
            integrate(&h, FieldKind::Hamiltonian, &x0(), 1.0, 0.0).unwrap_err(),
            FlowError::BadStep
        );
        assert_eq!(
            integrate(&h, FieldKind::Hamiltonian, &x0(), -1.0, 0.1).unwrap_err(),
            FlowError::BadStep
        );
    }
}
