//! Two-cycle sign-reversal protocol, readout and cat-state pipelines.
//!
//! Every pipeline prepares a state on |g⟩ (or |e⟩, or |g⟩ and the spectator
//! |r⟩), runs one loop of the laser phase, flips the sign of |g⟩, runs a
//! second loop and compares the result with the target ray. The evolution is
//! also decomposed on the instantaneous eigenbasis Ψₙ^±(ε) plus the dark
//! state S(ε)|g,0⟩, which gives a per-doublet phase ledger.

use ndarray::s;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use crate::feasibility::{feasibility_check, FeasibilityReport};

use crate::bosonic::{coherent_state, displacement_op, padded_dim, wrap_angle, Alpha};
use crate::error::{Error, Result};
use crate::evolve::{propagate, Schedule};
use crate::hilbert::{expm_apply, fidelity_up_to_phase, internal_op, overlap, InternalKind, Ket, Level, QSpace};
use crate::model::{build_h_jc, Branch, Couplings, EigenBasis, LoopHamiltonian};
use crate::phases::{berry_phase_analytic, dark_state_holonomy, eigenstate_holonomy, PhaseReport};

/// Tracked-basis population drift above this is reported as an adiabaticity
/// failure.
pub const LEAKAGE_LIMIT: f64 = 0.02;
/// Doublets with less initial weight than this are left out of the ledger.
const LEDGER_WEIGHT: f64 = 1e-12;
/// Number of leakage checkpoints per cycle.
const CHECKPOINTS: usize = 40;
/// Tail guard for the tracked eigenbasis.
const TRACKER_TAIL_TOL: f64 = 1e-6;
/// Eigenvectors with less weight than this outside the physical interior
/// count as resolved by the truncated dynamics.
const RESOLVED_MASS: f64 = 1e-4;

/// One eigen-component of the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Doublet index, or `None` for the dark state.
    pub n: Option<usize>,
    /// Branch the component starts on; the flip moves it to the other one.
    pub branch: Option<Branch>,
    pub weight: f64,
    /// Two-cycle phase of the component net of the flip sign. The
    /// dynamical part is the analytic β⁺ + β⁻ = 0 and `analytic_geometric`
    /// is 2γₙ from the closed form.
    pub report: PhaseReport,
    /// Two-cycle phase of the exact eigenvector family.
    pub holonomy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolReport {
    #[serde(skip)]
    pub final_state: Option<Ket>,
    pub target_fidelity: f64,
    /// arg⟨target|final⟩.
    pub global_phase: f64,
    pub phase_ledger: Vec<LedgerEntry>,
    pub leakage_max: f64,
    pub leakage_times: Vec<f64>,
    pub leakage: Vec<f64>,
    pub max_norm_drift: f64,
    /// Weight captured by the tracked basis at start and end.
    pub completeness_initial: f64,
    pub completeness_final: f64,
    /// Fidelity with the target of the adiabatic-limit prediction built
    /// from the exact eigenvector holonomies.
    pub adiabatic_limit_fidelity: f64,
    /// Largest doublet index in the tracked basis.
    pub tracked_n_max: usize,
}

impl ProtocolReport {
    pub fn final_ket(&self) -> &Ket {
        self.final_state.as_ref().expect("set by the pipeline")
    }
}

struct Tracker {
    basis: EigenBasis,
    n_max: usize,
    /// Slots (dark first) whose eigenvectors fit inside the physical
    /// interior; only these enter the leakage measure.
    leak_slots: usize,
}

impl Tracker {
    /// Eigenbasis on the padded Fock space.
    fn new(c: &Couplings, space: QSpace) -> Result<Self> {
        let n = space.fock_dim();
        let m = padded_dim(n);
        let qubit = QSpace::new(m, 2, (m - n) / 2)?.with_tail_tol(space.tail_tol().max(TRACKER_TAIL_TOL))?;
        let basis = EigenBasis::from_couplings(c, qubit)?;
        let n_max = basis.max_n().min(n - 1);
        let interior = space.interior();
        let outside = |v: &Ket| -> f64 {
            (0..2)
                .map(|l| v.amps().slice(s![l * m + interior..(l + 1) * m]).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum()
        };
        let mut resolved = 0;
        while resolved <= n_max && outside(&basis.state(resolved, Branch::Plus, 0.0)?) < RESOLVED_MASS {
            resolved += 1;
        }
        Ok(Tracker { basis, n_max, leak_slots: 1 + 2 * resolved })
    }

    /// g/e part of a state, zero-padded into the tracker space.
    fn restrict(&self, psi: &Ket) -> Result<Ket> {
        let q = *self.basis.space();
        let (m, n) = (q.fock_dim(), psi.space().fock_dim());
        let mut amps = ndarray::Array1::zeros(q.dim());
        for level in 0..2 {
            amps.slice_mut(s![level * m..level * m + n]).assign(&psi.amps().slice(s![level * n..(level + 1) * n]));
        }
        Ket::from_amps(q, amps)
    }

    /// Inverse of [`Tracker::restrict`], dropping Fock levels above the cutoff.
    fn embed(&self, v: &Ket, space: QSpace) -> Result<Ket> {
        let (m, n) = (v.space().fock_dim(), space.fock_dim());
        let mut amps = ndarray::Array1::zeros(space.dim());
        for level in 0..2 {
            amps.slice_mut(s![level * n..(level + 1) * n]).assign(&v.amps().slice(s![level * m..level * m + n]));
        }
        Ket::from_amps(space, amps)
    }

    /// Amplitudes on (dark, Ψ₀⁺, Ψ₀⁻, Ψ₁⁺, …) at phase φ.
    fn amplitudes(&self, psi: &Ket, phi: f64) -> Result<Vec<C64>> {
        let v = self.restrict(psi)?;
        let mut out = vec![overlap(&self.basis.dark(phi)?, &v)?];
        for n in 0..=self.n_max {
            for b in [Branch::Plus, Branch::Minus] {
                out.push(overlap(&self.basis.state(n, b, phi)?, &v)?);
            }
        }
        Ok(out)
    }

    fn state(&self, slot: usize, phi: f64) -> Result<Ket> {
        if slot == 0 {
            return self.basis.dark(phi);
        }
        let n = (slot - 1) / 2;
        let b = if (slot - 1).is_multiple_of(2) { Branch::Plus } else { Branch::Minus };
        self.basis.state(n, b, phi)
    }
}

fn spectator_weight(psi: &Ket) -> f64 {
    let space = psi.space();
    if space.internal_dim() < 3 {
        return 0.0;
    }
    let n = space.fock_dim();
    psi.amps().slice(s![2 * n..]).iter().map(|z| z.norm_sqr()).sum()
}

fn check_protocol_schedule(sched: &Schedule) -> Result<()> {
    sched.validate()?;
    if sched.cycles != 2 || sched.flip_after_cycle != Some(1) {
        return Err(Error::InvalidSchedule(
            "the protocol needs 2 cycles with the flip after cycle 1".into(),
        ));
    }
    Ok(())
}

/// Shared two-cycle pipeline.
pub fn run_two_cycle(psi0: &Ket, target: &Ket, c: &Couplings, sched: &Schedule) -> Result<ProtocolReport> {
    check_protocol_schedule(sched)?;
    let space = *psi0.space();
    let tracker = Tracker::new(c, space)?;
    let r = c.r();
    let w = sched.direction as i64;

    let steps = sched.steps_per_cycle();
    let mut s = sched.clone();
    s.sample_every = (steps / CHECKPOINTS).max(1);
    let h = LoopHamiltonian::new(c, &s, space);
    let traj = propagate(&h, psi0, &s)?;

    let phi0 = sched.phi(0.0);
    let amp0 = tracker.amplitudes(psi0, phi0)?;
    let pop0: Vec<f64> = amp0.iter().map(|z| z.norm_sqr()).collect();
    let spectator0 = spectator_weight(psi0);
    let completeness_initial = pop0.iter().sum::<f64>() + spectator0;

    // Expected populations after the flip: Ψₙ^± trade places.
    let swapped = |p: &[f64]| -> Vec<f64> {
        let mut q = p.to_vec();
        for k in (1..q.len()).step_by(2) {
            q.swap(k, k + 1);
        }
        q
    };
    let mut leakage = Vec::with_capacity(traj.times.len());
    for (&t, psi) in traj.times.iter().zip(&traj.states) {
        let flipped = traj.flip_times.iter().any(|&tf| t >= tf);
        let want = if flipped { swapped(&pop0) } else { pop0.clone() };
        let amps = tracker.amplitudes(psi, sched.phi(t))?;
        let drift: f64 = amps
            .iter()
            .zip(&want)
            .take(tracker.leak_slots)
            .map(|(a, w)| (a.norm_sqr() - w).abs())
            .sum();
        leakage.push(drift);
    }
    let leakage_max = leakage.iter().cloned().fold(0.0, f64::max);
    if leakage_max > LEAKAGE_LIMIT {
        return Err(Error::Adiabaticity { fidelity: 1.0 - leakage_max, threshold: 1.0 - LEAKAGE_LIMIT });
    }

    let end = traj.final_state().clone();
    let phi_end = sched.phi(sched.total_time());
    let amp_end = tracker.amplitudes(&end, phi_end)?;
    let completeness_final =
        amp_end.iter().map(|z| z.norm_sqr()).sum::<f64>() + spectator_weight(&end);

    // Ledger and adiabatic-limit prediction.
    let mut ledger = Vec::new();
    let mut ideal = Ket::zeros(tracker.basis.space().to_owned());
    for slot in 0..amp0.len() {
        let (n, branch, other, holonomy, analytic) = if slot == 0 {
            (None, None, 0, 2.0 * dark_state_holonomy(r, w), 0.0)
        } else {
            let n = (slot - 1) / 2;
            let b = if (slot - 1).is_multiple_of(2) { Branch::Plus } else { Branch::Minus };
            let other = if b == Branch::Plus { slot + 1 } else { slot - 1 };
            (Some(n), Some(b), other, 2.0 * eigenstate_holonomy(n, r, w), 2.0 * w as f64 * berry_phase_analytic(n, r))
        };
        let c0 = amp0[slot];
        // flip_g maps Ψₙ^± to −Ψₙ^∓ and the dark state to minus itself.
        let predicted = -c0 * C64::from_polar(1.0, holonomy);
        ideal = ideal.axpy(predicted, &tracker.state(other, phi_end)?)?;
        if pop0[slot] > LEDGER_WEIGHT {
            let total = (-amp_end[other] / c0).arg();
            ledger.push(LedgerEntry {
                n,
                branch,
                weight: pop0[slot],
                report: PhaseReport::new(total, 0.0, wrap_angle(analytic)),
                holonomy: wrap_angle(holonomy),
            });
        }
    }
    // The spectator level carries over unchanged.
    let mut ideal_full = tracker.embed(&ideal, space)?;
    if space.internal_dim() == 3 {
        let pr = internal_op(InternalKind::ProjR, space)?;
        ideal_full = ideal_full.axpy(C64::new(1.0, 0.0), &pr.apply(psi0)?)?;
    }

    let raw = overlap(target, &end)?;
    Ok(ProtocolReport {
        target_fidelity: raw.norm_sqr(),
        global_phase: raw.arg(),
        phase_ledger: ledger,
        leakage_max,
        leakage_times: traj.times.clone(),
        leakage,
        max_norm_drift: traj.max_norm_drift,
        completeness_initial,
        completeness_final,
        adiabatic_limit_fidelity: fidelity_up_to_phase(&ideal_full, target)?,
        tracked_n_max: tracker.n_max,
        final_state: Some(end),
    })
}

/// |g⟩|α⟩ → |g⟩|−α⟩.
pub fn run_phase_reversal(alpha: Alpha, c: &Couplings, sched: &Schedule, space: QSpace) -> Result<ProtocolReport> {
    let psi0 = coherent_state(alpha, Level::G, space)?;
    let target = coherent_state(Alpha(-alpha.0), Level::G, space)?;
    run_two_cycle(&psi0, &target, c, sched)
}

/// |e⟩|α⟩ → −|e⟩|−α⟩.
pub fn run_excited_reversal(alpha: Alpha, c: &Couplings, sched: &Schedule, space: QSpace) -> Result<ProtocolReport> {
    let psi0 = coherent_state(alpha, Level::E, space)?;
    let target = coherent_state(Alpha(-alpha.0), Level::E, space)?;
    run_two_cycle(&psi0, &target, c, sched)
}

/// (|0⟩ + |1⟩)/√2 → (|0⟩ − |1⟩)/√2 on |g⟩.
pub fn run_fock_superposition(c: &Couplings, sched: &Schedule, space: QSpace) -> Result<ProtocolReport> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let g0 = Ket::basis(space, Level::G, 0)?;
    let g1 = Ket::basis(space, Level::G, 1)?;
    let psi0 = g0.scaled(h).axpy(h, &g1)?;
    let target = g0.scaled(h).axpy(-h, &g1)?;
    run_two_cycle(&psi0, &target, c, sched)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatReport {
    pub protocol: ProtocolReport,
    /// arg⟨g,−α|ψ⟩ − arg⟨r,α|ψ⟩.
    pub branch_relative_phase: f64,
}

/// (|g⟩ + |r⟩)|α⟩/√2 → (|g⟩|−α⟩ + |r⟩|α⟩)/√2 with |r⟩ a spectator.
pub fn run_cat(alpha: Alpha, c: &Couplings, sched: &Schedule, space: QSpace) -> Result<CatReport> {
    if space.internal_dim() != 3 {
        return Err(Error::InvalidSpace("the cat pipeline needs internal_dim 3".into()));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let g = coherent_state(alpha, Level::G, space)?;
    let rr = coherent_state(alpha, Level::R, space)?;
    let gm = coherent_state(Alpha(-alpha.0), Level::G, space)?;
    let psi0 = g.scaled(h).axpy(h, &rr)?;
    let target = gm.scaled(h).axpy(h, &rr)?;
    let protocol = run_two_cycle(&psi0, &target, c, sched)?;
    let end = protocol.final_ket();
    let branch_relative_phase = wrap_angle(overlap(&gm, end)?.arg() - overlap(&rr, end)?.arg());
    Ok(CatReport { protocol, branch_relative_phase })
}

/// P_e(t) after displacing by −α and evolving under Ω₀(σ₊a + h.c.).
pub fn run_readout(final_state: &Ket, alpha: Alpha, omega0: f64, times: &[f64]) -> Result<Vec<f64>> {
    let space = *final_state.space();
    let shifted = displacement_op(Alpha(-alpha.0), space).apply(final_state)?;
    let h = build_h_jc(omega0, space);
    let pe = internal_op(InternalKind::ProjE, space)?;
    let mut psi = shifted;
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("readout time {t}")));
        }
        psi = expm_apply(&h, C64::new(0.0, -(t - t_prev)), &psi)?;
        t_prev = t;
        out.push(crate::hilbert::expectation(&pe, &psi)?.re);
    }
    Ok(out)
}

/// P_e(t) for |g⟩|−2α⟩ under Ω₀(σ₊a + h.c.):
/// Σ_{n≥1} e^{−|2α|²}|2α|^{2n}/n! · sin²(Ω₀√n t).
pub fn analytic_readout(alpha: Alpha, omega0: f64, times: &[f64]) -> Vec<f64> {
    let mean = 4.0 * alpha.0.norm_sqr();
    let weights = poisson_weights(mean);
    times
        .iter()
        .map(|&t| {
            weights
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, p)| p * (omega0 * (n as f64).sqrt() * t).sin().powi(2))
                .sum()
        })
        .collect()
}

/// Rabi-sum form e^{−2|α|²} Σ_n (2|α|)^{2n}/n! sin²(Ω_{n+1}t/2)
/// with Ω_{n+1} = Ω₀√(n+1), kept for comparison.
pub fn rabi_sum_readout(alpha: Alpha, omega0: f64, times: &[f64]) -> Vec<f64> {
    let a2 = alpha.0.norm_sqr();
    let pre = (-2.0 * a2).exp();
    times
        .iter()
        .map(|&t| {
            let mut term = 1.0;
            let mut sum = 0.0;
            for n in 0..200 {
                if n > 0 {
                    term *= 4.0 * a2 / n as f64;
                }
                sum += term * (omega0 * ((n + 1) as f64).sqrt() * t / 2.0).sin().powi(2);
                if n > 10 && term < 1e-18 {
                    break;
                }
            }
            pre * sum
        })
        .collect()
}

fn poisson_weights(mean: f64) -> Vec<f64> {
    let mut w = vec![(-mean).exp()];
    let mut n = 1;
    loop {
        let next = w[n - 1] * mean / n as f64;
        w.push(next);
        if n as f64 > mean && next < 1e-18 {
            break;
        }
        n += 1;
    }
    w
}

/// |⟨0|−2α⟩|², computed from the truncated states.
pub fn readout_overlap(alpha: Alpha, space: QSpace) -> Result<f64> {
    let vac = Ket::basis(space, Level::G, 0)?;
    let far = coherent_state(Alpha(-2.0 * alpha.0), Level::G, space)?;
    fidelity_up_to_phase(&vac, &far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::apply_flip_pulse;
    use std::f64::consts::PI;

    fn couplings() -> Couplings {
        Couplings::quarter_squeeze(1.0).unwrap()
    }

    #[test]
    fn schedule_shape_enforced() {
        let s = QSpace::qubit(16).unwrap();
        let bad = Schedule::new(10.0, 1);
        assert!(matches!(
            run_phase_reversal(Alpha::real(0.5), &couplings(), &bad, s),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn readout_no_phase_branch_is_dark() {
        let s = QSpace::qubit(32).unwrap();
        let a = Alpha::real(1.0);
        let psi = coherent_state(a, Level::G, s).unwrap();
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.25).collect();
        let pe = run_readout(&psi, a, 1.0, &times).unwrap();
        assert!(pe.iter().all(|p| p.abs() < 1e-8));
    }

    #[test]
    fn readout_matches_closed_form() {
        let s = QSpace::qubit(40).unwrap();
        let a = Alpha::real(1.0);
        let psi = coherent_state(Alpha::real(-1.0), Level::G, s).unwrap();
        let times: Vec<f64> = (0..=200).map(|k| 4.0 * PI * k as f64 / 200.0).collect();
        let sim = run_readout(&psi, a, 1.0, &times).unwrap();
        let ana = analytic_readout(a, 1.0, &times);
        assert!(sim[0].abs() < 1e-12);
        let dev = sim.iter().zip(&ana).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "{dev}");
        assert!((readout_overlap(a, s).unwrap() - (-4.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn rabi_sum_readout_differs() {
        let a = Alpha::real(1.0);
        let times = [0.7, 1.9];
        let p = rabi_sum_readout(a, 1.0, &times);
        let q = analytic_readout(a, 1.0, &times);
        assert!(p.iter().zip(&q).any(|(x, y)| (x - y).abs() > 1e-2));
    }

    #[test]
    fn spectator_sector_is_frozen() {
        let s = QSpace::new(32, 3, 10).unwrap();
        let c = couplings();
        let psi = coherent_state(Alpha::real(1.0), Level::R, s).unwrap();
        let sched = Schedule::protocol(20.0).with_steps_per_cycle(100);
        let h = LoopHamiltonian::new(&c, &sched, s);
        let traj = propagate(&h, &psi, &sched).unwrap();
        let end = traj.final_state();
        assert!((fidelity_up_to_phase(end, &psi).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(apply_flip_pulse(&psi), psi);
    }
}
