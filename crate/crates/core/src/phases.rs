//! Closed-form Berry and dynamical phases and their numerical extraction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bosonic::{wrap_angle, SqueezeFamily, SqueezeParam};
use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::hilbert::{fidelity_up_to_phase, internal_op, number_op, overlap, InternalKind, Ket, Level, QSpace};
use crate::model::Branch;

/// Minimum fidelity with the target ray for a phase extraction to be
/// meaningful.
pub const ADIABATIC_FIDELITY: f64 = 0.98;
/// Link overlaps below this reject a Wilson loop.
pub const MIN_LINK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// arg⟨target|ψ(T)⟩ in (−π, π].
    pub total_phase: f64,
    /// Unreduced dynamical phase.
    pub dynamical_phase: f64,
    /// total − dynamical, reduced to (−π, π].
    pub geometric_phase: f64,
    pub analytic_geometric: f64,
    /// |geometric − analytic| reduced to [0, π].
    pub residual: f64,
}

impl PhaseReport {
    pub fn new(total_phase: f64, dynamical_phase: f64, analytic_geometric: f64) -> Self {
        let total_phase = wrap_angle(total_phase);
        let geometric_phase = wrap_angle(total_phase - dynamical_phase);
        PhaseReport {
            total_phase,
            dynamical_phase,
            geometric_phase,
            analytic_geometric,
            residual: angle_distance(geometric_phase, analytic_geometric),
        }
    }
}

/// |a − b| reduced mod 2π to [0, π].
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// A loop in the laser phase at constant squeezing strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub r: f64,
    pub phi_start: f64,
    pub phi_end: f64,
}

impl LoopSpec {
    pub fn full(r: f64) -> Self {
        LoopSpec { r, phi_start: 0.0, phi_end: 2.0 * PI }
    }

    /// Signed winding number (phi_end − phi_start)/2π.
    pub fn windings(&self) -> Result<i64> {
        let k = (self.phi_end - self.phi_start) / (2.0 * PI);
        let kr = k.round();
        if kr == 0.0 || (k - kr).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "loop from {} to {} is not closed",
                self.phi_start, self.phi_end
            )));
        }
        Ok(kr as i64)
    }

    /// `samples` phases per winding, excluding the endpoint.
    pub fn phis(&self, samples: usize) -> Result<Vec<f64>> {
        let k = self.windings()?.unsigned_abs() as usize;
        let m = samples * k;
        let span = self.phi_end - self.phi_start;
        Ok((0..m).map(|j| self.phi_start + span * j as f64 / m as f64).collect())
    }
}

/// γₙ = −2π(n+1) sinh²r per positively traversed cycle.
pub fn berry_phase_analytic(n: usize, r: f64) -> f64 {
    -2.0 * PI * (n as f64 + 1.0) * r.sinh().powi(2)
}

/// −2π(m + 1/2) sinh²r for a single squeezed Fock state.
pub fn berry_phase_fock(m: usize, r: f64) -> f64 {
    -2.0 * PI * (m as f64 + 0.5) * r.sinh().powi(2)
}

/// βₙ^± = ∓Ω√(n+1)T.
pub fn dynamical_phase_analytic(n: usize, branch: Branch, omega: f64, period: f64) -> f64 {
    -branch.sign() * omega * ((n + 1) as f64).sqrt() * period
}

/// Geometric phase of the eigenvector Ψₙ^± of H(φ) over `windings` cycles
/// of φ (negative for a reversed loop), unreduced.
///
/// With K = (|e⟩⟨e| − a†a)/2 one has H(φ) = e^{iφK} H(0) e^{−iφK}, so the
/// eigenvector family is e^{iφK}Ψₙ^±(0). Its phase over one cycle is the
/// connection term −2π⟨K⟩ plus the holonomy of e^{2πiK}, which is
/// e^{iπ(n+1)} on the n-th doublet. ⟨K⟩ = −n/2 − (n+1)sinh²r gives
/// 2π(n+1)sinh²r + π(2n+1) per positive cycle.
pub fn eigenstate_holonomy(n: usize, r: f64, windings: i64) -> f64 {
    let per_cycle = 2.0 * PI * (n as f64 + 1.0) * r.sinh().powi(2) + PI * (2 * n + 1) as f64;
    per_cycle * windings as f64
}

/// Same for the dark state S(ε)|g,0⟩, for which ⟨K⟩ = −sinh²r/2 and the
/// holonomy is trivial.
pub fn dark_state_holonomy(r: f64, windings: i64) -> f64 {
    PI * r.sinh().powi(2) * windings as f64
}

/// Discrete Berry phase −arg Π⟨uₖ|uₖ₊₁⟩ of a closed loop. The list must not
/// repeat its first element; the last link closes onto it.
pub fn wilson_loop_phase(states: &[Ket]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("empty loop".into()));
    }
    let m = states.len();
    let mut sum = 0.0;
    for k in 0..m {
        let a = &states[k];
        let b = &states[(k + 1) % m];
        let o = overlap(a, b)?;
        let scale = (a.norm_sqr() * b.norm_sqr()).sqrt();
        if o.norm() < MIN_LINK * scale {
            return Err(Error::VanishingOverlap { index: k, overlap: o.norm() / scale });
        }
        sum += o.arg();
    }
    Ok(wrap_angle(-sum))
}

/// Total, dynamical and geometric phases of a trajectory that started on
/// `target_ray` and returned to it. `analytic_geometric` is carried along
/// for comparison.
pub fn extract_phases(traj: &Trajectory, target_ray: &Ket, analytic_geometric: f64) -> Result<PhaseReport> {
    let end = traj.final_state();
    let fidelity = fidelity_up_to_phase(target_ray, end)?;
    if fidelity <= ADIABATIC_FIDELITY {
        return Err(Error::Adiabaticity { fidelity, threshold: ADIABATIC_FIDELITY });
    }
    let total = overlap(target_ray, end)?.arg();
    Ok(PhaseReport::new(total, -traj.energy_integral, analytic_geometric))
}

/// Lab-frame phase ∫⟨Ψₙ^±|S†(νa†a + ω₀σ_z)S|Ψₙ^±⟩dt over one cycle with
/// ε = r e^{−2πit/T}, by the trapezoidal rule on `samples` intervals, set
/// against the value 3νT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabFramePhase {
    pub quadrature: f64,
    pub three_nu_t: f64,
    pub discrepancy: f64,
    /// Nearest integer to quadrature/2π and the leftover phase.
    pub closure_m: i64,
    pub closure_residual: f64,
}

/// Expectation of S(ε)†·A·S(ε) in the unsqueezed doublet vector, where A is
/// diagonal in the Fock and internal basis.
#[allow(clippy::too_many_arguments)]
pub fn lab_frame_phase(
    n: usize,
    branch: Branch,
    eps: SqueezeParam,
    nu: f64,
    omega0: f64,
    period: f64,
    samples: usize,
    space: QSpace,
) -> Result<LabFramePhase> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let fam = SqueezeFamily::new(eps.r(), space.fock_dim())?;
    let num = number_op(space);
    let sz = internal_op(InternalKind::SigmaZ, space)?;
    let h0 = num.scaled(nu.into()).axpy(omega0.into(), &sz)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let integrand = |phi: f64| -> Result<f64> {
        let theta = eps.theta() - phi;
        let g = fam.state(n + 1, theta, Level::G, space)?;
        let e = fam.state(n, theta, Level::E, space)?;
        // S(ε)Ψ: squeezing acts on the Fock factor only.
        let v = g.axpy(num_complex::Complex64::from_polar(branch.sign(), -theta), &e)?.scaled(h.into());
        Ok(crate::hilbert::expectation(&h0, &v)?.re)
    };
    let mut acc = 0.0;
    let dt = period / samples as f64;
    for j in 0..=samples {
        let w = if j == 0 || j == samples { 0.5 } else { 1.0 };
        acc += w * integrand(2.0 * PI * j as f64 / samples as f64)?;
    }
    let quadrature = acc * dt;
    let three_nu_t = 3.0 * nu * period;
    let closure_m = (quadrature / (2.0 * PI)).round() as i64;
    Ok(LabFramePhase {
        quadrature,
        three_nu_t,
        discrepancy: quadrature - three_nu_t,
        closure_m,
        closure_residual: quadrature - 2.0 * PI * closure_m as f64,
    })
}

/// Closed form of [`lab_frame_phase`]: ⟨S†a†aS⟩ = (n + 1/2)(1 + 2 sinh²r)
/// + sinh²r on the doublet, and ⟨σ_z⟩ = 0.
pub fn lab_frame_phase_closed_form(n: usize, r: f64, nu: f64, period: f64) -> f64 {
    let s2 = r.sinh().powi(2);
    nu * period * ((n as f64 + 0.5) * (1.0 + 2.0 * s2) + s2)
}
