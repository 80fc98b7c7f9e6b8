//! Browser bindings. Each export returns a flat `Float64Array` of fixed-width
//! records; www/main.js documents the layouts.

use std::f64::consts::PI;

use berryion_core::bosonic::{coherent_state, Alpha};
use berryion_core::evolve::{evolve_final, Schedule};
use berryion_core::hilbert::{fidelity_up_to_phase, Level, QSpace};
use berryion_core::model::{Branch, Couplings, EigenBasis, LoopHamiltonian};
use berryion_core::phases::{berry_phase_analytic, eigenstate_holonomy, wilson_loop_phase, LoopSpec};
use berryion_core::protocol::{analytic_readout, rabi_sum_readout, run_readout};
use berryion_core::{bosonic::wrap_angle, Error, Result};
use wasm_bindgen::prelude::*;

const BERRY_FOCK: usize = 96;
const DEMO_FOCK: usize = 24;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Records (r, closed form, Wilson loop of the literal doublet, exact
/// eigenvector holonomy) for r on [0, r_max].
pub fn berry_curve_impl(n: usize, r_max: f64, points: usize, loop_samples: usize) -> Result<Vec<f64>> {
    if points < 2 || r_max.is_nan() || r_max <= 0.0 {
        return Err(Error::InvalidParameter("need r_max > 0 and at least 2 points".into()));
    }
    let space = QSpace::new(BERRY_FOCK, 2, 30)?;
    let mut out = Vec::with_capacity(4 * points);
    for k in 0..points {
        let r = r_max * k as f64 / (points - 1) as f64;
        let basis = EigenBasis::new(r, 1.0, space)?;
        let states = LoopSpec::full(r)
            .phis(loop_samples)?
            .into_iter()
            .map(|p| basis.literal_state(n, Branch::Plus, p))
            .collect::<Result<Vec<_>>>()?;
        out.extend([
            r,
            wrap_angle(berry_phase_analytic(n, r)),
            wilson_loop_phase(&states)?,
            wrap_angle(eigenstate_holonomy(n, r, 1)),
        ]);
    }
    Ok(out)
}

/// Records (t, simulated P_e, P_e law, Rabi sum) for the ideal
/// output |g⟩|−α⟩ displaced back by −α.
pub fn readout_curve_impl(alpha: f64, omega0: f64, t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || !(omega0 > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidParameter("need omega0, t_max > 0 and at least 2 samples".into()));
    }
    let space = QSpace::qubit(32)?;
    let a = Alpha::real(alpha);
    let times: Vec<f64> = (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect();
    let sim = run_readout(&coherent_state(Alpha::real(-alpha), Level::G, space)?, a, omega0, &times)?;
    let law = analytic_readout(a, omega0, &times);
    let rabi_sum = rabi_sum_readout(a, omega0, &times);
    Ok((0..samples).flat_map(|k| [times[k], sim[k], law[k], rabi_sum[k]]).collect())
}

/// Two-cycle protocol on |g⟩|α⟩ at sinh²r = 1/4. Returns
/// [fidelity with |g⟩|−α⟩, p_g(0..N), p_e(0..N), target p_g(0..N)].
pub fn protocol_run_impl(omega_t: f64, alpha: f64, steps_per_cycle: usize) -> Result<Vec<f64>> {
    let space = QSpace::qubit(DEMO_FOCK)?;
    let c = Couplings::quarter_squeeze(1.0)?;
    let sched = Schedule::protocol(omega_t / c.omega()).with_steps_per_cycle(steps_per_cycle);
    sched.validate()?;
    let psi0 = coherent_state(Alpha::real(alpha), Level::G, space)?;
    let target = coherent_state(Alpha::real(-alpha), Level::G, space)?;
    let end = evolve_final(&LoopHamiltonian::new(&c, &sched, space), &psi0, &sched)?;
    let mut out = vec![fidelity_up_to_phase(&end, &target)?];
    for (psi, level) in [(&end, Level::G), (&end, Level::E), (&target, Level::G)] {
        out.extend(psi.fock_block(level)?.iter().map(|z| z.norm_sqr()));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn berry_curve(n: usize, r_max: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    berry_curve_impl(n, r_max, points, 400).map_err(js)
}

#[wasm_bindgen]
pub fn readout_curve(alpha: f64, samples: usize) -> std::result::Result<Vec<f64>, JsError> {
    readout_curve_impl(alpha, 1.0, 4.0 * PI, samples).map_err(js)
}

#[wasm_bindgen]
pub fn protocol_run(omega_t_over_pi: f64, alpha: f64, steps_per_cycle: usize) -> std::result::Result<Vec<f64>, JsError> {
    protocol_run_impl(omega_t_over_pi * PI, alpha, steps_per_cycle).map_err(js)
}

#[wasm_bindgen]
pub fn demo_fock_dim() -> usize {
    DEMO_FOCK
}
