use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use berryion_core::bosonic::{coherent_state, wrap_angle, Alpha, SqueezeParam};
use berryion_core::evolve::{propagate, Ramp, Schedule};
use berryion_core::feasibility::{be9, ca40};
use berryion_core::hilbert::{Ket, Level, QSpace};
use berryion_core::model::{derive_couplings, Branch, Couplings, EigenBasis, LoopHamiltonian, TrapParams};
use berryion_core::phases::{
    angle_distance, berry_phase_analytic, eigenstate_holonomy, extract_phases, lab_frame_phase,
    lab_frame_phase_closed_form, wilson_loop_phase, LoopSpec,
};
use berryion_core::protocol::{
    analytic_readout, feasibility_check, rabi_sum_readout, readout_overlap, run_cat, run_excited_reversal,
    run_fock_superposition, run_phase_reversal, run_readout, ProtocolReport, LEAKAGE_LIMIT,
};
use berryion_core::{Error, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ConfigError, Family, Loaded, Preset, RampCfg, ReadoutSource, SweepParam, Variant};
use crate::svg;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Core(Error),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Core(e) if e.is_numeric_contract() => 3,
            Failure::Core(_) => 2,
            Failure::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message, line) = match self {
            Failure::Config(e) => ("config", e.message.clone(), e.line),
            Failure::Core(e) => (e.kind(), e.to_string(), None),
            Failure::Io(e) => ("io", e.to_string(), None),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "kind": kind, "message": message, "line": line },
            "exit_code": self.exit_code(),
        })
    }
}

type Res<T> = std::result::Result<T, Failure>;

pub struct Ctx {
    pub loaded: Loaded,
    pub out: PathBuf,
    pub workers: usize,
    pub svg: bool,
}

/// Maps `f` over `items` on `workers` threads, keeping input order.
fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn fmt_num(x: f64) -> String {
    // Adding 0.0 maps −0 to +0.
    format!("{:.16e}", x + 0.0)
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_csv(&self, name: &str, header: &str, rows: &[Vec<f64>]) -> Res<PathBuf> {
        let mut s = String::with_capacity(64 * (rows.len() + 1));
        s.push_str(header);
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        let p = self.path(name);
        std::fs::write(&p, s)?;
        Ok(p)
    }

    fn write_json(&self, name: &str, v: &Value) -> Res<()> {
        let mut s = serde_json::to_string_pretty(v).map_err(std::io::Error::other)?;
        s.push('\n');
        std::fs::write(self.path(name), s)?;
        Ok(())
    }

    fn write_svg(&self, csv: &Path, title: &str, x: &str, ys: &[&str]) -> Res<()> {
        if !self.svg {
            return Ok(());
        }
        let series = svg::series_from_csv(csv, x, ys)?;
        std::fs::write(csv.with_extension("svg"), svg::line_chart(title, x, &series))?;
        Ok(())
    }

    fn cfg(&self) -> &crate::config::RunConfig {
        &self.loaded.cfg
    }

    fn space(&self, fock: usize, internal: usize, margin: usize) -> Res<QSpace> {
        let sc = &self.cfg().space;
        let n = sc.fock_dim.unwrap_or(fock);
        let d = sc.internal_dim.unwrap_or(internal);
        let m = sc.trunc_margin.unwrap_or(margin);
        let space = QSpace::new(n, d, m).map_err(|e| self.loaded.error("space", "fock_dim", e.to_string()))?;
        match sc.tail_tol {
            Some(t) => Ok(space.with_tail_tol(t).map_err(|e| self.loaded.error("space", "tail_tol", e.to_string()))?),
            None => Ok(space),
        }
    }

    fn couplings(&self, sinh2_override: Option<f64>) -> Res<Couplings> {
        let cc = &self.cfg().couplings;
        if !(cc.g_a > 0.0 && cc.g_a.is_finite()) {
            return Err(self.loaded.error("couplings", "g_a", "must be positive").into());
        }
        let sinh2 = sinh2_override.or(cc.sinh2_r);
        let built = match (cc.g_b, sinh2) {
            (Some(_), Some(_)) if sinh2_override.is_none() => {
                return Err(self.loaded.error("couplings", "sinh2_r", "set either g_b or sinh2_r, not both").into())
            }
            (_, Some(s2)) => {
                if !(s2 >= 0.0 && s2.is_finite()) {
                    return Err(self.loaded.error("couplings", "sinh2_r", "must be non-negative").into());
                }
                Couplings::from_squeezing(cc.g_a, s2.sqrt().asinh(), cc.phi)
            }
            (Some(g_b), None) => Couplings::new(cc.g_a, g_b, cc.phi),
            (None, None) => Couplings::from_squeezing(cc.g_a, 0.25f64.sqrt().asinh(), cc.phi),
        };
        built.map_err(|e| self.loaded.error("couplings", "g_b", e.to_string()).into())
    }

    fn schedule(&self, c: &Couplings, omega_t: Option<f64>, steps: Option<usize>) -> Res<Schedule> {
        let sc = &self.cfg().schedule;
        let period = match (omega_t, sc.period) {
            (Some(wt), _) => wt / c.omega(),
            (None, Some(p)) => p,
            (None, None) => sc.omega_t / c.omega(),
        };
        let steps = steps.unwrap_or(sc.steps_per_cycle);
        if steps == 0 {
            return Err(self.loaded.error("schedule", "steps_per_cycle", "must be positive").into());
        }
        let ramp = match sc.ramp {
            RampCfg::Linear => Ramp::Linear,
            RampCfg::Smoothstep => Ramp::Smoothstep,
        };
        let s = Schedule::protocol(period)
            .with_steps_per_cycle(steps)
            .with_ramp(ramp)
            .with_direction(sc.direction)
            .with_phi0(sc.phi0);
        s.validate().map_err(|e| {
            let key = if sc.direction != 1 && sc.direction != -1 { "direction" } else { "omega_t" };
            self.loaded.error("schedule", key, e.to_string())
        })?;
        Ok(s)
    }
}

fn alpha_of(re: f64, im: f64) -> Alpha {
    Alpha(C64::new(re, im))
}

fn couplings_json(c: &Couplings) -> Value {
    json!({
        "g_a": c.g_a(),
        "g_b": c.g_b(),
        "phi": c.phi(),
        "r": c.r(),
        "sinh2_r": c.r().sinh().powi(2),
        "omega": c.omega(),
    })
}

fn schedule_json(s: &Schedule, c: &Couplings) -> Value {
    json!({
        "period": s.period,
        "omega_t": s.period * c.omega(),
        "cycles": s.cycles,
        "steps_per_cycle": s.steps_per_cycle(),
        "direction": s.direction,
        "phi0": s.phi0,
        "ramp": s.ramp,
    })
}

fn space_json(s: &QSpace) -> Value {
    json!({
        "fock_dim": s.fock_dim(),
        "internal_dim": s.internal_dim(),
        "trunc_margin": s.trunc_margin(),
        "tail_tol": s.tail_tol(),
    })
}

fn protocol_json(rep: &ProtocolReport) -> Value {
    json!({
        "target_fidelity": rep.target_fidelity,
        "global_phase": rep.global_phase,
        "leakage_max": rep.leakage_max,
        "leakage_limit": LEAKAGE_LIMIT,
        "max_norm_drift": rep.max_norm_drift,
        "completeness_initial": rep.completeness_initial,
        "completeness_final": rep.completeness_final,
        "adiabatic_limit_fidelity": rep.adiabatic_limit_fidelity,
        "tracked_n_max": rep.tracked_n_max,
        "phase_ledger": serde_json::to_value(&rep.phase_ledger).unwrap_or(Value::Null),
    })
}

fn leakage_rows(rep: &ProtocolReport, sched: &Schedule) -> Vec<Vec<f64>> {
    rep.leakage_times.iter().zip(&rep.leakage).map(|(&t, &l)| vec![t, sched.phi(t), l]).collect()
}

fn protocol_target(variant: Variant, alpha: Alpha, space: QSpace) -> Res<Ket> {
    Ok(match variant {
        Variant::PhaseReversal => coherent_state(Alpha(-alpha.0), Level::G, space)?,
        Variant::ExcitedReversal => coherent_state(Alpha(-alpha.0), Level::E, space)?,
        Variant::FockSuperposition => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Ket::basis(space, Level::G, 0)?.scaled(h).axpy(-h, &Ket::basis(space, Level::G, 1)?)?
        }
    })
}

fn run_variant(variant: Variant, alpha: Alpha, c: &Couplings, s: &Schedule, space: QSpace) -> Res<ProtocolReport> {
    Ok(match variant {
        Variant::PhaseReversal => run_phase_reversal(alpha, c, s, space)?,
        Variant::ExcitedReversal => run_excited_reversal(alpha, c, s, space)?,
        Variant::FockSuperposition => run_fock_superposition(c, s, space)?,
    })
}

fn populations(psi: &Ket, level: Level) -> Res<Vec<f64>> {
    Ok(psi.fock_block(level)?.iter().map(|z| z.norm_sqr()).collect())
}

struct BerryRow {
    n: usize,
    r: f64,
    analytic: f64,
    wilson: f64,
    wilson_minus: f64,
    eigen_holonomy: f64,
    adiabatic: Option<f64>,
}

pub fn berry(ctx: &Ctx) -> Res<()> {
    let bc = ctx.cfg().berry.clone();
    let space = ctx.space(96, 2, 30)?;
    if bc.loop_samples < 3 {
        return Err(ctx.loaded.error("berry", "loop_samples", "need at least 3 samples").into());
    }
    if let Some(bad) = bc.r.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(ctx.loaded.error("berry", "r", format!("squeezing strength {bad} must be non-negative")).into());
    }
    if bc.n_max + 2 >= space.interior() {
        return Err(ctx.loaded.error("berry", "n_max", "does not fit in the truncated space").into());
    }
    let g_a = ctx.cfg().couplings.g_a;
    let grid: Vec<(usize, f64)> = (0..=bc.n_max).flat_map(|n| bc.r.iter().map(move |&r| (n, r))).collect();
    let rows = par_map(ctx.workers, &grid, |&(n, r)| -> Res<BerryRow> {
        let c = Couplings::from_squeezing(g_a, r, 0.0).map_err(|e| ctx.loaded.error("couplings", "g_a", e.to_string()))?;
        let basis = EigenBasis::from_couplings(&c, space)?;
        let phis = LoopSpec::full(r).phis(bc.loop_samples)?;
        let family = |b: Branch| -> Res<Vec<Ket>> {
            phis.iter()
                .map(|&p| match bc.family {
                    Family::Literal => basis.literal_state(n, b, p),
                    Family::Eigen => basis.state(n, b, p),
                })
                .collect::<berryion_core::Result<Vec<_>>>()
                .map_err(Failure::from)
        };
        let wilson = wilson_loop_phase(&family(Branch::Plus)?)?;
        let wilson_minus = wilson_loop_phase(&family(Branch::Minus)?)?;
        let analytic = berry_phase_analytic(n, r);
        let adiabatic = if bc.adiabatic {
            let period = bc.omega_t / c.omega();
            let sched = Schedule::new(period, 1).with_steps_per_cycle(bc.steps_per_cycle).with_sample_every(usize::MAX);
            let h = LoopHamiltonian::new(&c, &sched, space);
            let psi0 = basis.state(n, Branch::Plus, 0.0)?;
            let traj = propagate(&h, &psi0, &sched)?;
            Some(extract_phases(&traj, &psi0, analytic)?.geometric_phase)
        } else {
            None
        };
        Ok(BerryRow { n, r, analytic, wilson, wilson_minus, eigen_holonomy: wrap_angle(eigenstate_holonomy(n, r, 1)), adiabatic })
    })
    .into_iter()
    .collect::<Res<Vec<_>>>()?;

    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|b| {
            let ad = b.adiabatic.unwrap_or(f64::NAN);
            let res_ad = b.adiabatic.map_or(f64::NAN, |g| angle_distance(g, b.analytic));
            vec![b.n as f64, b.r, b.analytic, b.wilson, ad, angle_distance(b.wilson, b.analytic), res_ad]
        })
        .collect();
    let csv = ctx.write_csv(
        "berry.csv",
        "n,r,gamma_analytic,gamma_wilson,gamma_adiabatic,res_wilson,res_adiabatic",
        &table,
    )?;
    let max_of = |f: &dyn Fn(&BerryRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "berry",
        "family": bc.family_name(),
        "space": space_json(&space),
        "loop_samples": bc.loop_samples,
        "adiabatic": bc.adiabatic,
        "omega_t": bc.omega_t,
        "steps_per_cycle": bc.steps_per_cycle,
        "rows": rows.len(),
        "max_res_wilson": max_of(&|b| angle_distance(b.wilson, b.analytic)),
        "max_branch_difference": max_of(&|b| angle_distance(b.wilson, b.wilson_minus)),
        "max_res_wilson_vs_eigen_holonomy": max_of(&|b| angle_distance(b.wilson, b.eigen_holonomy)),
        "max_res_adiabatic": if bc.adiabatic { json!(max_of(&|b| b.adiabatic.map_or(0.0, |g| angle_distance(g, b.analytic)))) } else { Value::Null },
        "max_res_adiabatic_vs_eigen_holonomy": if bc.adiabatic { json!(max_of(&|b| b.adiabatic.map_or(0.0, |g| angle_distance(g, b.eigen_holonomy)))) } else { Value::Null },
        "eigen_holonomy": rows.iter().map(|b| json!({"n": b.n, "r": b.r, "gamma": b.eigen_holonomy})).collect::<Vec<_>>(),
    });
    ctx.write_json("berry.json", &summary)?;
    if ctx.svg {
        let mut series = Vec::new();
        for &r in &bc.r {
            for (col, label) in [("gamma_analytic", "analytic"), ("gamma_wilson", "wilson")] {
                let pts = svg::series_from_csv(&csv, "n", &[col, "r"])?;
                let (xs, rs) = (&pts[0].points, &pts[1].points);
                let points = xs.iter().zip(rs).filter(|(_, (_, rv))| *rv == r).map(|(p, _)| *p).collect();
                series.push(svg::Series { name: format!("{label} r={r:.4}"), points });
            }
        }
        std::fs::write(csv.with_extension("svg"), svg::line_chart("Berry phase per cycle", "n", &series))?;
    }
    Ok(())
}

impl crate::config::BerryCfg {
    fn family_name(&self) -> &'static str {
        match self.family {
            Family::Literal => "literal",
            Family::Eigen => "eigen",
        }
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::PhaseReversal => "phase_reversal",
        Variant::ExcitedReversal => "excited_reversal",
        Variant::FockSuperposition => "fock_superposition",
    }
}

pub fn protocol(ctx: &Ctx) -> Res<()> {
    let pc = ctx.cfg().protocol.clone();
    let space = ctx.space(32, 2, 6)?;
    let c = ctx.couplings(None)?;
    let sched = ctx.schedule(&c, None, None)?;
    let alpha = alpha_of(pc.alpha_re, pc.alpha_im);
    let rep = run_variant(pc.variant, alpha, &c, &sched, space)?;
    let target = protocol_target(pc.variant, alpha, space)?;

    let csv = ctx.write_csv("protocol.csv", "t,phi,leakage", &leakage_rows(&rep, &sched))?;
    let fin = rep.final_ket();
    let (pg, pe) = (populations(fin, Level::G)?, populations(fin, Level::E)?);
    let (tg, te) = (populations(&target, Level::G)?, populations(&target, Level::E)?);
    let pops: Vec<Vec<f64>> = (0..space.fock_dim()).map(|n| vec![n as f64, pg[n], pe[n], tg[n], te[n]]).collect();
    ctx.write_csv("protocol_populations.csv", "n,p_g,p_e,p_g_target,p_e_target", &pops)?;

    let mut summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "protocol",
        "variant": variant_name(pc.variant),
        "alpha": [pc.alpha_re, pc.alpha_im],
        "space": space_json(&space),
        "couplings": couplings_json(&c),
        "schedule": schedule_json(&sched, &c),
    });
    merge(&mut summary, protocol_json(&rep));
    ctx.write_json("protocol.json", &summary)?;
    ctx.write_svg(&csv, "Tracked-basis leakage", "t", &["leakage"])
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn readout(ctx: &Ctx) -> Res<()> {
    let rc = ctx.cfg().readout.clone();
    let space = ctx.space(32, 2, 6)?;
    let alpha = alpha_of(rc.alpha_re, rc.alpha_im);
    if !(rc.omega0 > 0.0 && rc.omega0.is_finite()) {
        return Err(ctx.loaded.error("readout", "omega0", "must be positive").into());
    }
    if rc.samples < 2 {
        return Err(ctx.loaded.error("readout", "samples", "need at least 2 samples").into());
    }
    let t_max = rc.t_max.unwrap_or(4.0 * PI / rc.omega0);
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(ctx.loaded.error("readout", "t_max", "must be positive").into());
    }
    let times: Vec<f64> = (0..rc.samples).map(|k| t_max * k as f64 / (rc.samples - 1) as f64).collect();

    let mut extra = json!({});
    let state = match rc.source {
        ReadoutSource::BerryBranch => coherent_state(Alpha(-alpha.0), Level::G, space)?,
        ReadoutSource::NoPhaseBranch => coherent_state(alpha, Level::G, space)?,
        ReadoutSource::Protocol => {
            let c = ctx.couplings(None)?;
            let sched = ctx.schedule(&c, None, None)?;
            let rep = run_phase_reversal(alpha, &c, &sched, space)?;
            extra = json!({
                "couplings": couplings_json(&c),
                "schedule": schedule_json(&sched, &c),
                "protocol": protocol_json(&rep),
            });
            rep.final_ket().clone()
        }
    };
    let sim = run_readout(&state, alpha, rc.omega0, &times)?;
    let zeros = vec![0.0; times.len()];
    let (law, rabi_sum) = match rc.source {
        ReadoutSource::NoPhaseBranch => (zeros.clone(), zeros),
        _ => (analytic_readout(alpha, rc.omega0, &times), rabi_sum_readout(alpha, rc.omega0, &times)),
    };
    let rows: Vec<Vec<f64>> = (0..times.len()).map(|k| vec![times[k], sim[k], law[k], rabi_sum[k]]).collect();
    let csv = ctx.write_csv("readout.csv", "t,pe_sim,pe_law,pe_rabi_sum", &rows)?;
    let dev = |other: &[f64]| sim.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let source = match rc.source {
        ReadoutSource::BerryBranch => "berry_branch",
        ReadoutSource::NoPhaseBranch => "no_phase_branch",
        ReadoutSource::Protocol => "protocol",
    };
    let mut summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "readout",
        "source": source,
        "alpha": [rc.alpha_re, rc.alpha_im],
        "omega0": rc.omega0,
        "t_max": t_max,
        "samples": rc.samples,
        "space": space_json(&space),
        "max_pe_sim": sim.iter().cloned().fold(0.0, f64::max),
        "max_deviation_law": dev(&law),
        "max_deviation_rabi_sum": dev(&rabi_sum),
        "vacuum_overlap": readout_overlap(alpha, space)?,
        "vacuum_overlap_closed_form": (-4.0 * alpha.0.norm_sqr()).exp(),
    });
    merge(&mut summary, extra);
    ctx.write_json("readout.json", &summary)?;
    ctx.write_svg(&csv, "Excited-state population during readout", "t", &["pe_sim", "pe_law", "pe_rabi_sum"])
}

pub fn cat(ctx: &Ctx) -> Res<()> {
    let cc = ctx.cfg().cat.clone();
    if ctx.cfg().space.internal_dim.is_some_and(|d| d != 3) {
        return Err(ctx.loaded.error("space", "internal_dim", "the cat command needs internal_dim = 3").into());
    }
    let space = ctx.space(32, 3, 6)?;
    let c = ctx.couplings(None)?;
    let sched = ctx.schedule(&c, None, None)?;
    let alpha = alpha_of(cc.alpha_re, cc.alpha_im);
    let rep = run_cat(alpha, &c, &sched, space)?;
    let csv = ctx.write_csv("cat.csv", "t,phi,leakage", &leakage_rows(&rep.protocol, &sched))?;
    let mut summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "cat",
        "alpha": [cc.alpha_re, cc.alpha_im],
        "space": space_json(&space),
        "couplings": couplings_json(&c),
        "schedule": schedule_json(&sched, &c),
        "branch_relative_phase": rep.branch_relative_phase,
    });
    merge(&mut summary, protocol_json(&rep.protocol));
    ctx.write_json("cat.json", &summary)?;
    ctx.write_svg(&csv, "Tracked-basis leakage", "t", &["leakage"])
}

fn trap_from_config(ctx: &Ctx) -> Res<(TrapParams, Schedule)> {
    let fc = ctx.cfg().feasibility.clone();
    let two_pi = 2.0 * PI;
    let base = match fc.preset {
        Some(Preset::Be9) => Some(be9()),
        Some(Preset::Ca40) => Some(ca40()),
        None => None,
    };
    let need = |v: Option<f64>, fallback: Option<f64>, key: &str| -> Res<f64> {
        let x = v.or(fallback).ok_or_else(|| ctx.loaded.error("feasibility", key, "required without a preset"))?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(ctx.loaded.error("feasibility", key, format!("invalid value {x}")).into());
        }
        Ok(x)
    };
    let bt = base.as_ref().map(|b| b.0);
    let eta12 = need(fc.eta12, bt.map(|t| t.eta12), "eta12")?;
    let eta34 = need(fc.eta34, bt.map(|t| t.eta34).or(Some(eta12)), "eta34")?;
    let omega12 = two_pi * need(fc.rabi12_hz, bt.map(|t| t.omega12 / two_pi), "rabi12_hz")?;
    let omega34 = match (fc.rabi34_hz, fc.sinh2_r) {
        (Some(_), Some(_)) => {
            return Err(ctx.loaded.error("feasibility", "sinh2_r", "set either rabi34_hz or sinh2_r, not both").into())
        }
        (Some(hz), None) => two_pi * need(Some(hz), None, "rabi34_hz")?,
        (None, Some(s2)) => {
            if eta34 <= 0.0 {
                return Err(ctx.loaded.error("feasibility", "eta34", "must be positive with sinh2_r").into());
            }
            omega12 * eta12 / eta34 * need(Some(s2), None, "sinh2_r")?.sqrt().asinh().tanh()
        }
        (None, None) => match bt {
            Some(t) if fc.rabi12_hz.is_none() && fc.eta12.is_none() && fc.eta34.is_none() => t.omega34,
            _ => omega12 * eta12 / eta34.max(f64::MIN_POSITIVE) * 0.25f64.sqrt().asinh().tanh(),
        },
    };
    let tp = TrapParams {
        eta12,
        eta34,
        omega12,
        omega34,
        nu: two_pi * need(fc.trap_hz, bt.map(|t| t.nu / two_pi), "trap_hz")?,
        omega0: two_pi * need(fc.qubit_hz, bt.map(|t| t.omega0 / two_pi), "qubit_hz")?,
        delta: None,
        t_motional: need(fc.t_motional, bt.map(|t| t.t_motional), "t_motional")?,
        t_internal: need(fc.t_internal, bt.map(|t| t.t_internal), "t_internal")?,
    };
    let period = need(fc.period, base.as_ref().map(|b| b.1.period), "period")?;
    if period <= 0.0 {
        return Err(ctx.loaded.error("feasibility", "period", "must be positive").into());
    }
    tp.validate().map_err(|e| ctx.loaded.error("feasibility", "eta12", e.to_string()))?;
    derive_couplings(&tp).map_err(|e| ctx.loaded.error("feasibility", "rabi34_hz", e.to_string()))?;
    Ok((tp, Schedule::protocol(period)))
}

pub fn feasibility(ctx: &Ctx) -> Res<()> {
    let (tp, sched) = trap_from_config(ctx)?;
    let rep = feasibility_check(&tp, &sched)?;
    let samples = ctx.cfg().feasibility.lab_frame_samples.unwrap_or(400);
    if samples == 0 {
        return Err(ctx.loaded.error("feasibility", "lab_frame_samples", "must be positive").into());
    }
    let space = ctx.space(48, 2, 6)?;
    let r = derive_couplings(&tp)?.r();
    let eps = SqueezeParam::new(r, 0.0)?;
    let mut rows = Vec::new();
    let mut lab = Vec::new();
    for n in 0..3 {
        for b in [Branch::Plus, Branch::Minus] {
            let lf = lab_frame_phase(n, b, eps, tp.nu, tp.omega0, sched.period, samples, space)?;
            let closed = lab_frame_phase_closed_form(n, r, tp.nu, sched.period);
            rows.push(vec![n as f64, b.sign(), lf.quadrature, closed, lf.three_nu_t, lf.discrepancy]);
            lab.push(json!({
                "n": n,
                "branch": b,
                "quadrature": lf.quadrature,
                "closed_form": closed,
                "three_nu_t": lf.three_nu_t,
                "discrepancy": lf.discrepancy,
                "closure_m": lf.closure_m,
                "closure_residual": lf.closure_residual,
            }));
        }
    }
    ctx.write_csv("feasibility.csv", "n,branch,quadrature,closed_form,three_nu_t,discrepancy", &rows)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "feasibility",
        "units": { "frequencies": "rad/s", "times": "s" },
        "preset": ctx.cfg().feasibility.preset.map(|p| match p {
            Preset::Be9 => "be9",
            Preset::Ca40 => "ca40",
        }),
        "trap": tp,
        "period": sched.period,
        "cycles": sched.cycles,
        "report": rep,
        "lab_frame": lab,
    });
    ctx.write_json("feasibility.json", &summary)
}

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::OmegaT => "omega_t",
        SweepParam::Alpha => "alpha",
        SweepParam::Sinh2R => "sinh2_r",
        SweepParam::StepsPerCycle => "steps_per_cycle",
    }
}

pub fn sweep(ctx: &Ctx) -> Res<()> {
    let sc = ctx.cfg().sweep.clone();
    let pc = ctx.cfg().protocol.clone();
    if sc.values.is_empty() {
        return Err(ctx.loaded.error("sweep", "values", "empty sweep").into());
    }
    if let Some(bad) = sc.values.iter().find(|v| !v.is_finite()) {
        return Err(ctx.loaded.error("sweep", "values", format!("non-finite value {bad}")).into());
    }
    if sc.parameter == SweepParam::StepsPerCycle && sc.values.iter().any(|v| *v < 1.0 || v.fract() != 0.0) {
        return Err(ctx.loaded.error("sweep", "values", "steps_per_cycle values must be positive integers").into());
    }
    let space = ctx.space(32, 2, 6)?;
    // Validate everything that can fail as a config error up front.
    let mut jobs = Vec::with_capacity(sc.values.len());
    for &v in &sc.values {
        let (mut omega_t, mut steps, mut alpha, mut s2) = (None, None, alpha_of(pc.alpha_re, pc.alpha_im), None);
        match sc.parameter {
            SweepParam::OmegaT => omega_t = Some(v),
            SweepParam::StepsPerCycle => steps = Some(v as usize),
            SweepParam::Alpha => alpha = alpha_of(v, 0.0),
            SweepParam::Sinh2R => s2 = Some(v),
        }
        let c = ctx.couplings(s2).map_err(|e| match e {
            Failure::Config(ce) => Failure::Config(ConfigError { line: ctx.loaded.error("sweep", "values", "").line, ..ce }),
            other => other,
        })?;
        let sched = ctx.schedule(&c, omega_t, steps)?;
        jobs.push((v, alpha, c, sched));
    }
    let results = par_map(ctx.workers, &jobs, |(v, alpha, c, sched)| {
        (*v, run_variant(pc.variant, *alpha, c, sched, space))
    });
    let mut rows = Vec::new();
    let mut lines = String::from("value,target_fidelity,leakage_max,adiabatic_limit_fidelity,global_phase,status\n");
    for (v, res) in results {
        match res {
            Ok(rep) => {
                let _ = writeln!(
                    lines,
                    "{},{},{},{},{},ok",
                    fmt_num(v),
                    fmt_num(rep.target_fidelity),
                    fmt_num(rep.leakage_max),
                    fmt_num(rep.adiabatic_limit_fidelity),
                    fmt_num(rep.global_phase)
                );
                rows.push(json!({"value": v, "status": "ok", "result": protocol_json(&rep)}));
            }
            Err(Failure::Core(e)) if e.is_numeric_contract() => {
                let nan = fmt_num(f64::NAN);
                let _ = writeln!(lines, "{},{nan},{nan},{nan},{nan},{}", fmt_num(v), e.kind());
                rows.push(json!({"value": v, "status": e.kind(), "message": e.to_string()}));
            }
            Err(other) => return Err(other),
        }
    }
    let csv = ctx.path("sweep.csv");
    std::fs::write(&csv, lines)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "variant": variant_name(pc.variant),
        "parameter": param_name(sc.parameter),
        "space": space_json(&space),
        "rows": rows,
    });
    ctx.write_json("sweep.json", &summary)?;
    ctx.write_svg(&csv, "Protocol sweep", "value", &["target_fidelity", "adiabatic_limit_fidelity"])
}
