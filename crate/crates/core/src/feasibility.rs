//! Timescale budget for running the protocol in a real trap. Inputs are SI:
//! angular frequencies in rad/s and times in seconds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bosonic::SqueezeFamily;
use crate::error::Result;
use crate::evolve::Schedule;
use crate::model::{derive_couplings, lamb_dicke_factor, quarter_squeeze_r, LabOrder, TrapParams};

/// Closure residual accepted by the verdict, in radians.
pub const CLOSURE_TOL: f64 = 1e-6;
pub const MIN_ADIABATICITY: f64 = 3.0;
pub const MIN_MARGIN: f64 = 10.0;

/// 3νT against the nearest multiple of 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub three_nu_t: f64,
    pub m: i64,
    /// |3νT − 2πm|
    pub residual: f64,
    /// Period for which 3νT = 2πm exactly.
    pub adjusted_period: f64,
    pub adjusted_residual: f64,
    /// (adjusted − T)/T
    pub relative_adjustment: f64,
}

impl Closure {
    pub fn new(nu: f64, period: f64) -> Self {
        let three_nu_t = 3.0 * nu * period;
        let m = (three_nu_t / (2.0 * PI)).round() as i64;
        let target = 2.0 * PI * m as f64;
        let adjusted_period = target / (3.0 * nu);
        Closure {
            three_nu_t,
            m,
            residual: (three_nu_t - target).abs(),
            adjusted_period,
            adjusted_residual: (3.0 * nu * adjusted_period - target).abs(),
            relative_adjustment: (adjusted_period - period) / period,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// 1/g_a in seconds.
    pub dynamical_timescale: f64,
    /// T·g_a.
    pub adiabaticity_ratio: f64,
    /// T_motional / T, the margin per cycle period.
    pub motional_margin: f64,
    /// T_motional / (cycles·T), the margin over the whole run.
    pub motional_margin_total: f64,
    pub internal_margin: f64,
    pub internal_margin_total: f64,
    /// T_motional·g_a.
    pub motional_to_dynamical: f64,
    pub closure: Closure,
    pub squeezing_r: f64,
    pub sinh2_r: f64,
    /// |⟨3|S(r)|1⟩|².
    pub p3: f64,
    /// ‖(e^{iηX} − 1 − iηX)S|1⟩‖ / ‖ηX S|1⟩‖ for η = η₁₂.
    pub lamb_dicke_error: f64,
    /// 10⁻²η², reference bound for the same ratio.
    pub lamb_dicke_bound: f64,
    pub verdict: bool,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

/// ⁹Be⁺: η = 0.2, Ω₁₂/2π = 500 kHz, ν/2π = 10 MHz, T_motional = 10⁻⁴ s,
/// internal lifetime 10 s; Ω₃₄ set for sinh²r = 1/4. Returns the trap and a
/// two-cycle schedule with T = 10⁻⁵ s.
pub fn be9() -> (TrapParams, Schedule) {
    let two_pi = 2.0 * PI;
    let omega12 = two_pi * 500e3;
    let tp = TrapParams {
        eta12: 0.2,
        eta34: 0.2,
        omega12,
        omega34: omega12 * quarter_squeeze_r().tanh(),
        nu: two_pi * 10e6,
        omega0: two_pi * 1.25e9,
        delta: None,
        t_motional: 1e-4,
        t_internal: 10.0,
    };
    (tp, Schedule::protocol(1e-5))
}

/// ⁴⁰Ca⁺: dynamical timescale 10⁻⁵ s (η = 0.1, Ω₁₂ = 2·10⁶ rad/s),
/// ν/2π = 10 MHz, T_motional = 10⁻³ s, T_internal = 1 s, T = 10⁻⁴ s.
pub fn ca40() -> (TrapParams, Schedule) {
    let two_pi = 2.0 * PI;
    let omega12 = 2e6;
    let tp = TrapParams {
        eta12: 0.1,
        eta34: 0.1,
        omega12,
        omega34: omega12 * quarter_squeeze_r().tanh(),
        nu: two_pi * 10e6,
        omega0: two_pi * 411e12,
        delta: None,
        t_motional: 1e-3,
        t_internal: 1.0,
    };
    (tp, Schedule::protocol(1e-4))
}

fn lamb_dicke_ratio(eta: f64, r: f64) -> Result<(f64, f64)> {
    let n = 48;
    let fam = SqueezeFamily::new(r, n)?;
    let (v, _) = fam.column(1, 0.0, n);
    let p3 = v[3].norm_sqr();
    if eta == 0.0 {
        return Ok((p3, 0.0));
    }
    let exact = lamb_dicke_factor(eta, LabOrder::Exact, n);
    let first = lamb_dicke_factor(eta, LabOrder::LambDicke1, n);
    let id = ndarray::Array2::<num_complex::Complex64>::eye(n);
    let higher = (&exact - &first).dot(&v);
    let linear = (&first - &id).dot(&v);
    let nrm = |x: &ndarray::Array1<num_complex::Complex64>| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok((p3, nrm(&higher) / nrm(&linear)))
}

pub fn feasibility_check(tp: &TrapParams, sched: &Schedule) -> Result<FeasibilityReport> {
    let c = derive_couplings(tp)?;
    let period = sched.period;
    let cycles = sched.cycles as f64;
    let tau = 1.0 / c.g_a();
    let r = c.r();
    let (p3, ld) = lamb_dicke_ratio(tp.eta12, r)?;
    let closure = Closure::new(tp.nu, period);

    let adiabaticity_ratio = period / tau;
    let motional_margin = tp.t_motional / period;
    let internal_margin = tp.t_internal / period;
    let mut failures = Vec::new();
    if adiabaticity_ratio < MIN_ADIABATICITY * (1.0 - 1e-9) {
        failures.push(format!("adiabaticity ratio {adiabaticity_ratio:.3} < {MIN_ADIABATICITY}"));
    }
    if motional_margin < MIN_MARGIN * (1.0 - 1e-9) {
        failures.push(format!("motional margin {motional_margin:.3} < {MIN_MARGIN}"));
    }
    if internal_margin < MIN_MARGIN * (1.0 - 1e-9) {
        failures.push(format!("internal margin {internal_margin:.3} < {MIN_MARGIN}"));
    }
    if closure.residual >= CLOSURE_TOL {
        failures.push(format!(
            "3νT misses 2πm by {:.3e} rad; T = {:.12e} s closes it",
            closure.residual, closure.adjusted_period
        ));
    }
    Ok(FeasibilityReport {
        dynamical_timescale: tau,
        adiabaticity_ratio,
        motional_margin,
        motional_margin_total: tp.t_motional / (cycles * period),
        internal_margin,
        internal_margin_total: tp.t_internal / (cycles * period),
        motional_to_dynamical: tp.t_motional / tau,
        closure,
        squeezing_r: r,
        sinh2_r: r.sinh().powi(2),
        p3,
        lamb_dicke_error: ld,
        lamb_dicke_bound: 1e-2 * tp.eta12 * tp.eta12,
        verdict: failures.is_empty(),
        failures,
        warnings: tp.warnings(),
    })
}
