//! Time-dependent Schrödinger propagation under a slowly ramped laser phase.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{expectation, expm_apply, internal_op, overlap, InternalKind, Ket, LinOp, QSpace};

/// Norm drift beyond this aborts propagation.
pub const NORM_ABORT: f64 = 1e-6;
/// Default number of steps per cycle.
pub const DEFAULT_STEPS_PER_CYCLE: usize = 2000;

/// A time-dependent Hamiltonian.
pub trait Hamiltonian {
    fn space(&self) -> QSpace;
    fn at(&self, t: f64) -> LinOp;
}

impl Hamiltonian for LinOp {
    fn space(&self) -> QSpace {
        *LinOp::space(self)
    }

    fn at(&self, _t: f64) -> LinOp {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    Linear,
    Smoothstep,
}

impl Ramp {
    /// Fraction of the cycle's 2π swept at fractional time x ∈ [0, 1].
    pub fn progress(self, x: f64) -> f64 {
        match self {
            Ramp::Linear => x,
            Ramp::Smoothstep => x * x * (3.0 - 2.0 * x),
        }
    }
}

/// Laser-phase schedule φ(t) over `cycles` periods of length `period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub period: f64,
    pub cycles: usize,
    pub ramp: Ramp,
    pub phi0: f64,
    pub direction: i8,
    pub dt: f64,
    /// Flip pulse after this many completed cycles.
    pub flip_after_cycle: Option<usize>,
    /// Keep every k-th integrator state in the trajectory.
    pub sample_every: usize,
}

impl Schedule {
    pub fn new(period: f64, cycles: usize) -> Self {
        Schedule {
            period,
            cycles,
            ramp: Ramp::Linear,
            phi0: 0.0,
            direction: 1,
            dt: period / DEFAULT_STEPS_PER_CYCLE as f64,
            flip_after_cycle: None,
            sample_every: 1,
        }
    }

    /// φ(t) = φ₀ + δ·t, the slow-detuning alternative to an explicit ramp.
    pub fn from_detuning(delta: f64, cycles: usize) -> Result<Self> {
        if !(delta.is_finite() && delta != 0.0) {
            return Err(Error::InvalidSchedule(format!("detuning {delta}")));
        }
        let mut s = Self::new(2.0 * PI / delta.abs(), cycles);
        s.direction = if delta > 0.0 { 1 } else { -1 };
        Ok(s)
    }

    /// Two cycles with the flip pulse in between.
    pub fn protocol(period: f64) -> Self {
        Self::new(period, 2).with_flip_after(1)
    }

    pub fn with_steps_per_cycle(mut self, steps: usize) -> Self {
        self.dt = self.period / steps.max(1) as f64;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_ramp(mut self, ramp: Ramp) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn with_direction(mut self, direction: i8) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn with_flip_after(mut self, cycle: usize) -> Self {
        self.flip_after_cycle = Some(cycle);
        self
    }

    pub fn with_sample_every(mut self, k: usize) -> Self {
        self.sample_every = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::InvalidSchedule(format!("period {}", self.period)));
        }
        if self.cycles == 0 {
            return Err(Error::InvalidSchedule("cycles must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt <= self.period) {
            return Err(Error::InvalidSchedule(format!("dt {} not in (0, T]", self.dt)));
        }
        if self.direction != 1 && self.direction != -1 {
            return Err(Error::InvalidSchedule(format!("direction {}", self.direction)));
        }
        if !self.phi0.is_finite() {
            return Err(Error::InvalidSchedule("phi0 not finite".into()));
        }
        if let Some(k) = self.flip_after_cycle {
            if k == 0 || k >= self.cycles {
                return Err(Error::InvalidSchedule(format!(
                    "flip after cycle {k} outside 1..{}",
                    self.cycles
                )));
            }
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidSchedule("sample_every must be positive".into()));
        }
        Ok(())
    }

    /// Integrator steps per cycle; dt is rounded down so cycles end on a step.
    pub fn steps_per_cycle(&self) -> usize {
        (self.period / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn step(&self) -> f64 {
        self.period / self.steps_per_cycle() as f64
    }

    pub fn total_time(&self) -> f64 {
        self.period * self.cycles as f64
    }

    pub fn phi(&self, t: f64) -> f64 {
        let x = (t / self.period).clamp(0.0, self.cycles as f64);
        let k = x.floor().min(self.cycles as f64 - 1.0);
        let swept = k + self.ramp.progress(x - k);
        self.phi0 + self.direction as f64 * 2.0 * PI * swept
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Ket>,
    pub energy_samples: Vec<f64>,
    /// ∫⟨H⟩dt by the trapezoidal rule on every integrator step.
    pub energy_integral: f64,
    /// Tracked-eigenline leakage per sample, when propagated with a tracker.
    pub leakage: Vec<f64>,
    pub max_norm_drift: f64,
    pub flip_times: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Ket {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn initial_state(&self) -> &Ket {
        &self.states[0]
    }
}

pub fn apply_flip_pulse(psi: &Ket) -> Ket {
    internal_op(InternalKind::FlipG, *psi.space())
        .and_then(|f| f.apply(psi))
        .expect("flip exists on every space")
}

fn energy<H: Hamiltonian + ?Sized>(h: &H, t: f64, psi: &Ket) -> Result<f64> {
    Ok(expectation(&h.at(t), psi)?.re)
}

/// Midpoint exponential propagation ψ ← exp(−iH(t + dt/2)dt)ψ.
pub fn propagate<H: Hamiltonian + ?Sized>(h: &H, psi0: &Ket, sched: &Schedule) -> Result<Trajectory> {
    run(h, psi0, sched, None)
}

/// As [`propagate`], also recording the leakage out of `line(t)` at every
/// sample.
pub fn propagate_tracked<H, F>(h: &H, psi0: &Ket, sched: &Schedule, line: F) -> Result<Trajectory>
where
    H: Hamiltonian + ?Sized,
    F: Fn(f64) -> Result<Ket>,
{
    run(h, psi0, sched, Some(&line))
}

type Line<'a> = &'a dyn Fn(f64) -> Result<Ket>;

fn leak(line: Line, t: f64, psi: &Ket) -> Result<f64> {
    let u = line(t)?;
    Ok(1.0 - overlap(&u, psi)?.norm_sqr() / (u.norm_sqr() * psi.norm_sqr()))
}

fn run<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &Ket,
    sched: &Schedule,
    line: Option<Line>,
) -> Result<Trajectory> {
    sched.validate()?;
    if h.space().dim() != psi0.space().dim() {
        return Err(Error::SpaceMismatch);
    }
    if !psi0.is_normalized(1e-8) {
        return Err(Error::InvalidParameter(format!("initial norm {}", psi0.norm())));
    }
    let steps = sched.steps_per_cycle();
    let dt = sched.step();
    let minus_i_dt = C64::new(0.0, -dt);

    let mut psi = psi0.clone();
    let mut e_prev = energy(h, 0.0, &psi)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![psi.clone()],
        energy_samples: vec![e_prev],
        energy_integral: 0.0,
        leakage: Vec::new(),
        max_norm_drift: 0.0,
        flip_times: Vec::new(),
    };
    if let Some(l) = line {
        traj.leakage.push(leak(l, 0.0, &psi)?);
    }

    let total = steps * sched.cycles;
    for step in 0..total {
        let t0 = step as f64 * dt;
        let t1 = (step + 1) as f64 * dt;
        psi = expm_apply(&h.at(t0 + dt / 2.0), minus_i_dt, &psi)?;
        if psi.amps().iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("propagated state"));
        }
        let drift = (psi.norm() - 1.0).abs();
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        if drift > NORM_ABORT {
            return Err(Error::NormDrift { drift, t: t1 });
        }
        let e1 = energy(h, t1, &psi)?;
        traj.energy_integral += 0.5 * (e_prev + e1) * dt;
        e_prev = e1;

        let done = step + 1;
        if done % steps == 0 && sched.flip_after_cycle == Some(done / steps) {
            psi = apply_flip_pulse(&psi);
            e_prev = energy(h, t1, &psi)?;
            traj.flip_times.push(t1);
        }
        if done % sched.sample_every == 0 || done == total {
            traj.times.push(t1);
            traj.energy_samples.push(e_prev);
            if let Some(l) = line {
                traj.leakage.push(leak(l, t1, &psi)?);
            }
            traj.states.push(psi.clone());
        }
    }
    Ok(traj)
}

/// Population outside a tracked eigenline along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub samples: Vec<f64>,
    pub max: f64,
    pub final_value: f64,
}

/// `line(t)` is the eigenvector the state should follow at time t.
pub fn adiabaticity_report<F>(traj: &Trajectory, line: F) -> Result<LeakageReport>
where
    F: Fn(f64) -> Result<Ket>,
{
    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, psi)| leak(&line, t, psi))
        .collect::<Result<Vec<_>>>()?;
    let max = samples.iter().cloned().fold(0.0, f64::max);
    let final_value = *samples.last().unwrap_or(&0.0);
    Ok(LeakageReport { samples, max, final_value })
}

/// Final state only.
pub fn evolve_final<H: Hamiltonian + ?Sized>(h: &H, psi0: &Ket, sched: &Schedule) -> Result<Ket> {
    let mut s = sched.clone();
    s.sample_every = usize::MAX;
    Ok(propagate(h, psi0, &s)?.final_state().clone())
}

/// Integration rule for [`evolve_final_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// exp(−iH(t + dt/2)dt), second order.
    Midpoint,
    /// Fourth-order commutator-free Magnus step with two Gauss nodes,
    /// for Hamiltonians that oscillate fast on the cycle scale.
    Magnus4,
}

/// Final state under the chosen rule, with the same norm and flip handling
/// as [`propagate`].
pub fn evolve_final_with<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &Ket,
    sched: &Schedule,
    integrator: Integrator,
) -> Result<Ket> {
    if integrator == Integrator::Midpoint {
        return evolve_final(h, psi0, sched);
    }
    sched.validate()?;
    if h.space().dim() != psi0.space().dim() {
        return Err(Error::SpaceMismatch);
    }
    let steps = sched.steps_per_cycle();
    let dt = sched.step();
    let r3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
    let (a1, a2) = ((3.0 - 2.0 * r3) / 12.0, (3.0 + 2.0 * r3) / 12.0);
    let minus_i_dt = C64::new(0.0, -dt);
    let mut psi = psi0.clone();
    for step in 0..steps * sched.cycles {
        let t0 = step as f64 * dt;
        let h1 = h.at(t0 + c1 * dt);
        let h2 = h.at(t0 + c2 * dt);
        let first = h1.scaled(a2.into()).axpy(a1.into(), &h2)?;
        let second = h1.scaled(a1.into()).axpy(a2.into(), &h2)?;
        psi = expm_apply(&first, minus_i_dt, &psi)?;
        psi = expm_apply(&second, minus_i_dt, &psi)?;
        if psi.amps().iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("propagated state"));
        }
        let drift = (psi.norm() - 1.0).abs();
        if drift > NORM_ABORT {
            return Err(Error::NormDrift { drift, t: t0 + dt });
        }
        let done = step + 1;
        if done % steps == 0 && sched.flip_after_cycle == Some(done / steps) {
            psi = apply_flip_pulse(&psi);
        }
    }
    Ok(psi)
}

/// ‖ψ_dt(T) − ψ_ref(T)‖ for each step count, with the reference at
/// `refine` times the finest count.
pub fn convergence_errors<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &Ket,
    sched: &Schedule,
    steps: &[usize],
    refine: usize,
) -> Result<Vec<f64>> {
    let finest = steps.iter().copied().max().unwrap_or(1) * refine;
    let reference = evolve_final(h, psi0, &sched.clone().with_steps_per_cycle(finest))?;
    steps
        .iter()
        .map(|&n| {
            let psi = evolve_final(h, psi0, &sched.clone().with_steps_per_cycle(n))?;
            Ok(psi.axpy(C64::new(-1.0, 0.0), &reference)?.norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fidelity_up_to_phase, Level};
    use crate::model::{build_h_jc, Branch, Couplings, EigenBasis, LoopHamiltonian};

    #[test]
    fn schedule_phase() {
        let s = Schedule::new(10.0, 2);
        assert_eq!(s.phi(0.0), 0.0);
        assert!((s.phi(5.0) - PI).abs() < 1e-15);
        assert!((s.phi(20.0) - 4.0 * PI).abs() < 1e-15);
        let smooth = s.clone().with_ramp(Ramp::Smoothstep).with_direction(-1);
        assert!((smooth.phi(10.0) + 2.0 * PI).abs() < 1e-15);
        assert!((smooth.phi(2.5) + 2.0 * PI * 0.15625).abs() < 1e-15);
        let d = Schedule::from_detuning(-0.5, 1).unwrap();
        assert!((d.phi(1.0) + 0.5).abs() < 1e-15);
        assert!(Schedule::new(1.0, 2).with_flip_after(2).validate().is_err());
        assert!(Schedule::new(1.0, 0).validate().is_err());
        assert!(Schedule::new(-1.0, 1).validate().is_err());
    }

    #[test]
    fn steps_round_to_cycle() {
        let s = Schedule::new(1.0, 1).with_dt(0.3);
        assert_eq!(s.steps_per_cycle(), 4);
        assert!((s.step() - 0.25).abs() < 1e-15);
        assert_eq!(Schedule::new(3.0, 1).steps_per_cycle(), 2000);
    }

    #[test]
    fn stationary_state() {
        let s = QSpace::qubit(16).unwrap();
        let basis = EigenBasis::new(0.0, 1.0, s).unwrap();
        let h = build_h_jc(1.0, s);
        let psi = basis.state(2, Branch::Minus, 0.0).unwrap();
        let traj = propagate(&h, &psi, &Schedule::new(5.0, 1).with_steps_per_cycle(200)).unwrap();
        let lam = basis.eigenvalue(2, Branch::Minus);
        let want = psi.scaled(C64::from_polar(1.0, -lam * 5.0));
        let err = traj.final_state().axpy(C64::new(-1.0, 0.0), &want).unwrap().norm();
        assert!(err < 1e-10, "{err}");
        assert!((traj.energy_integral - lam * 5.0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let s = QSpace::qubit(12).unwrap();
        let omega = 0.8;
        let h = build_h_jc(omega, s);
        let e0 = Ket::basis(s, Level::E, 0).unwrap();
        let traj = propagate(&h, &e0, &Schedule::new(6.0, 1).with_steps_per_cycle(600)).unwrap();
        let pe = internal_op(InternalKind::ProjE, s).unwrap();
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            let p = expectation(&pe, psi).unwrap().re;
            assert!((p - (omega * t).cos().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn flip_pulse_swaps_branches() {
        let s = QSpace::new(64, 2, 16).unwrap();
        let basis = EigenBasis::new(0.481_211_825, 1.0, s).unwrap();
        let phi = 0.4;
        let p = basis.state(2, Branch::Plus, phi).unwrap();
        let m = basis.state(2, Branch::Minus, phi).unwrap();
        assert!((fidelity_up_to_phase(&apply_flip_pulse(&p), &m).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(apply_flip_pulse(&apply_flip_pulse(&p)), p);
        let e3 = Ket::basis(s, Level::E, 3).unwrap();
        assert_eq!(apply_flip_pulse(&e3), e3);
    }

    #[test]
    fn frozen_phase_has_no_leakage() {
        let s = QSpace::new(48, 2, 10).unwrap();
        let c = Couplings::quarter_squeeze(1.0).unwrap().with_phi(0.7);
        let basis = EigenBasis::from_couplings(&c, s).unwrap();
        let h = crate::model::build_h(&c, s);
        let psi = basis.state(0, Branch::Plus, 0.7).unwrap();
        let traj = propagate(&h, &psi, &Schedule::new(20.0, 1).with_steps_per_cycle(400)).unwrap();
        let rep = adiabaticity_report(&traj, |_| basis.state(0, Branch::Plus, 0.7)).unwrap();
        assert!(rep.max < 1e-9, "{}", rep.max);
    }

    #[test]
    fn leakage_shrinks_with_period() {
        let s = QSpace::new(48, 2, 10).unwrap();
        let c = Couplings::quarter_squeeze(1.0).unwrap();
        let basis = EigenBasis::from_couplings(&c, s).unwrap();
        let psi = basis.state(0, Branch::Plus, 0.0).unwrap();
        let mut finals = Vec::new();
        for period in [3.0, 30.0] {
            let sched = Schedule::new(period, 1);
            let h = LoopHamiltonian::new(&c, &sched, s);
            let traj = propagate_tracked(&h, &psi, &sched, |t| basis.state(0, Branch::Plus, sched.phi(t))).unwrap();
            finals.push(*traj.leakage.last().unwrap());
        }
        assert!(finals[1] < finals[0], "{finals:?}");

        let sudden = Schedule::new(1e-3, 1).with_steps_per_cycle(50);
        let h = LoopHamiltonian::new(&c, &sudden, s);
        let traj = propagate(&h, &psi, &sudden).unwrap();
        let rep = adiabaticity_report(&traj, |t| basis.state(0, Branch::Plus, sudden.phi(t))).unwrap();
        assert!(rep.max > 0.1, "{}", rep.max);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let s = QSpace::qubit(8).unwrap();
        let psi = Ket::basis(s, Level::G, 1).unwrap().scaled(C64::new(2.0, 0.0));
        let h = build_h_jc(1.0, s);
        assert!(propagate(&h, &psi, &Schedule::new(1.0, 1)).is_err());
    }
}
