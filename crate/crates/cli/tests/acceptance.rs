//! Acceptance run. Prints one PASS/FAIL line per criterion plus DIAG lines
//! with supporting numbers. Exits non-zero on failure only when
//! ACCEPTANCE_STRICT=1 is set.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use berryion_core::bosonic::{coherent_state, squeeze_op, Alpha};
use berryion_core::evolve::{convergence_errors, evolve_final_with, propagate, Integrator, Schedule};
use berryion_core::feasibility::{be9, ca40, feasibility_check, Closure};
use berryion_core::hilbert::{fidelity_up_to_phase, Ket, Level, QSpace};
use berryion_core::model::{
    build_h, build_h_jc, derive_couplings, lab_to_model, quarter_squeeze_r, Branch, Couplings, EigenBasis,
    LabHamiltonian, LabOrder, LoopHamiltonian, TrapParams,
};
use berryion_core::phases::{
    angle_distance, berry_phase_analytic, eigenstate_holonomy, extract_phases, wilson_loop_phase, LoopSpec,
};
use berryion_core::protocol::{
    analytic_readout, rabi_sum_readout, readout_overlap, run_fock_superposition, run_phase_reversal, run_readout,
    ProtocolReport,
};
use berryion_core::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_WILSON: f64 = 1e-3;
const TOL_BRANCHES: f64 = 1e-6;
const TOL_ADIABATIC: f64 = 1e-2;
const TOL_DT_CONVERGED: f64 = 1e-3;
const MIN_FIDELITY: f64 = 0.98;
const TOL_READOUT: f64 = 1e-3;
const TOL_DARK: f64 = 1e-8;
const TOL_OVERLAP: f64 = 1e-6;
const TOL_IDENTITY: f64 = 1e-7;
const MIN_LAB_FIDELITY: f64 = 0.99;
const TOL_ORDER: f64 = 0.15;
const TOL_NORM: f64 = 1e-8;
const TOL_RATIO: f64 = 0.1;

#[derive(Default)]
struct Suite {
    failed: Vec<u32>,
    norm_drift: f64,
}

impl Suite {
    fn verdict(&mut self, id: u32, name: &str, pass: bool, detail: &str) {
        println!("{} {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }

    fn diag(&self, id: u32, text: &str) {
        println!("  DIAG {id} {text}");
    }

    fn drift(&mut self, psi: &Ket) {
        self.norm_drift = self.norm_drift.max((psi.norm() - 1.0).abs());
    }

    fn report(&mut self, rep: &ProtocolReport) {
        self.norm_drift = self.norm_drift.max(rep.max_norm_drift);
    }
}

fn quarter() -> Couplings {
    Couplings::quarter_squeeze(1.0).unwrap()
}

fn wilson_family(basis: &EigenBasis, n: usize, b: Branch, phis: &[f64], literal: bool) -> Result<f64> {
    let states = phis
        .iter()
        .map(|&p| if literal { basis.literal_state(n, b, p) } else { basis.state(n, b, p) })
        .collect::<Result<Vec<_>>>()?;
    wilson_loop_phase(&states)
}

fn criterion_1(s: &mut Suite) {
    let space = QSpace::new(96, 2, 30).unwrap();
    let (mut worst, mut worst_branch, mut worst_rev, mut worst_eigen) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failing = Vec::new();
    for r in [0.2, 0.4812] {
        let basis = EigenBasis::new(r, 1.0, space).unwrap();
        let forward = LoopSpec::full(r).phis(1000).unwrap();
        let reverse = LoopSpec { r, phi_start: 0.0, phi_end: -2.0 * PI }.phis(1000).unwrap();
        for n in 0..=5 {
            let want = berry_phase_analytic(n, r);
            let wp = wilson_family(&basis, n, Branch::Plus, &forward, true).unwrap();
            let wm = wilson_family(&basis, n, Branch::Minus, &forward, true).unwrap();
            let d = angle_distance(wp, want);
            if d > TOL_WILSON {
                failing.push(format!("n={n},r={r}:{wp:+.4}"));
            }
            worst = worst.max(d);
            worst_branch = worst_branch.max(angle_distance(wp, wm));
            let rev = wilson_family(&basis, n, Branch::Plus, &reverse, true).unwrap();
            worst_rev = worst_rev.max(angle_distance(rev, want));
            let eig = wilson_family(&basis, n, Branch::Plus, &forward, false).unwrap();
            worst_eigen = worst_eigen.max(angle_distance(eig, eigenstate_holonomy(n, r, 1)));
        }
    }
    let pass = worst < TOL_WILSON && worst_branch < TOL_BRANCHES;
    s.verdict(
        1,
        "Wilson loop of the squeezed doublets vs -2π(n+1)sinh²r",
        pass,
        &format!("max residual {worst:.3e} (tol {TOL_WILSON:.0e}), branch spread {worst_branch:.3e} (tol {TOL_BRANCHES:.0e})"),
    );
    if !failing.is_empty() {
        s.diag(1, &format!("off by sign, Wilson values {}", failing.join(" ")));
    }
    s.diag(1, &format!("same family with φ: 0→−2π, max residual {worst_rev:.3e}"));
    s.diag(1, &format!("exact eigenvectors vs 2π(n+1)sinh²r + π(2n+1), max residual {worst_eigen:.3e}"));
}

fn adiabatic_phase(n: usize, omega_t: f64, steps: usize, s: &mut Suite) -> Result<f64> {
    let space = QSpace::new(64, 2, 20).unwrap();
    let c = quarter();
    let basis = EigenBasis::from_couplings(&c, space)?;
    let sched = Schedule::new(omega_t / c.omega(), 1).with_steps_per_cycle(steps).with_sample_every(usize::MAX);
    let psi0 = basis.state(n, Branch::Plus, 0.0)?;
    let traj = propagate(&LoopHamiltonian::new(&c, &sched, space), &psi0, &sched)?;
    s.norm_drift = s.norm_drift.max(traj.max_norm_drift);
    Ok(extract_phases(&traj, &psi0, berry_phase_analytic(n, c.r()))?.geometric_phase)
}

fn criterion_2(s: &mut Suite) {
    let r = quarter_squeeze_r();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 0..3 {
        let want = berry_phase_analytic(n, r);
        match (adiabatic_phase(n, 60.0 * PI, 2000, s), adiabatic_phase(n, 60.0 * PI, 4000, s)) {
            (Ok(a), Ok(b)) => {
                let d = angle_distance(b, want);
                let conv = angle_distance(a, b);
                pass &= d < TOL_ADIABATIC && conv < TOL_DT_CONVERGED;
                parts.push(format!("n={n} γ={b:+.4} residual {d:.3e} dt-change {conv:.1e}"));
            }
            (Err(e), _) | (_, Err(e)) => {
                pass = false;
                parts.push(format!("n={n} {e}"));
            }
        }
    }
    s.verdict(2, "adiabatic extraction at ΩT=60π vs -2π(n+1)sinh²r", pass, &parts.join("; "));
    for n in 0..3 {
        match adiabatic_phase(n, 240.0 * PI, 8000, s) {
            Ok(g) => s.diag(
                2,
                &format!(
                    "ΩT=240π n={n}: γ={g:+.4}, vs closed form {:.3e}, vs exact holonomy {:.3e}",
                    angle_distance(g, berry_phase_analytic(n, r)),
                    angle_distance(g, eigenstate_holonomy(n, r, 1))
                ),
            ),
            Err(e) => s.diag(2, &format!("ΩT=240π n={n}: {e}")),
        }
    }
}

/// Two-cycle run without the tracking pipeline.
fn direct(psi0: &Ket, omega_t: f64, steps: usize, integrator: Integrator, s: &mut Suite) -> Ket {
    let c = quarter();
    let sched = Schedule::protocol(omega_t / c.omega()).with_steps_per_cycle(steps);
    let out = evolve_final_with(&LoopHamiltonian::new(&c, &sched, *psi0.space()), psi0, &sched, integrator).unwrap();
    s.drift(&out);
    out
}

fn protocol_space() -> QSpace {
    QSpace::qubit(32).unwrap()
}

fn pipeline(omega_t: f64, fock: bool, s: &mut Suite) -> std::result::Result<ProtocolReport, String> {
    let c = quarter();
    let sched = Schedule::protocol(omega_t / c.omega());
    let rep = if fock {
        run_fock_superposition(&c, &sched, protocol_space())
    } else {
        run_phase_reversal(Alpha::real(1.0), &c, &sched, protocol_space())
    };
    rep.inspect(|r| s.report(r)).map_err(|e| e.to_string())
}

fn criterion_3(s: &mut Suite, at60: &std::result::Result<ProtocolReport, String>) {
    let at64 = pipeline(64.0 * PI, false, s);
    let describe = |r: &std::result::Result<ProtocolReport, String>| match r {
        Ok(rep) => format!("fidelity {:.4}", rep.target_fidelity),
        Err(e) => e.clone(),
    };
    let pass = match (at60, &at64) {
        (Ok(a), Ok(b)) => {
            let mutual = fidelity_up_to_phase(a.final_ket(), b.final_ket()).unwrap();
            a.target_fidelity > MIN_FIDELITY && b.target_fidelity > MIN_FIDELITY && mutual > MIN_FIDELITY
        }
        _ => false,
    };
    s.verdict(
        3,
        "protocol output independent of ΩT (60π vs 64π)",
        pass,
        &format!("60π: {}; 64π: {}", describe(at60), describe(&at64)),
    );
    let space = protocol_space();
    let psi0 = coherent_state(Alpha::real(1.0), Level::G, space).unwrap();
    let target = coherent_state(Alpha::real(-1.0), Level::G, space).unwrap();
    let a = direct(&psi0, 60.0 * PI, 2000, Integrator::Midpoint, s);
    let b = direct(&psi0, 64.0 * PI, 2000, Integrator::Midpoint, s);
    s.diag(
        3,
        &format!(
            "direct evolution: F(60π,64π)={:.4}, F(60π,target)={:.4}, F(64π,target)={:.4}",
            fidelity_up_to_phase(&a, &b).unwrap(),
            fidelity_up_to_phase(&a, &target).unwrap(),
            fidelity_up_to_phase(&b, &target).unwrap()
        ),
    );
}

fn criterion_4(s: &mut Suite, at60: &std::result::Result<ProtocolReport, String>) {
    let fock = pipeline(60.0 * PI, true, s);
    let fid = |r: &std::result::Result<ProtocolReport, String>| r.as_ref().map(|x| x.target_fidelity).ok();
    let pass = fid(at60).is_some_and(|f| f > MIN_FIDELITY) && fid(&fock).is_some_and(|f| f > MIN_FIDELITY);
    let describe = |r: &std::result::Result<ProtocolReport, String>| match r {
        Ok(rep) => format!("fidelity {:.4} (adiabatic limit {:.4})", rep.target_fidelity, rep.adiabatic_limit_fidelity),
        Err(e) => e.clone(),
    };
    s.verdict(
        4,
        "sign reversal |g,1> -> |g,-1> and |0>+|1> -> |0>-|1> at N=32",
        pass,
        &format!("coherent: {}; Fock: {}", describe(at60), describe(&fock)),
    );
    let space = protocol_space();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = Ket::basis(space, Level::G, 0).unwrap().scaled(h).axpy(h, &Ket::basis(space, Level::G, 1).unwrap()).unwrap();
    let minus = Ket::basis(space, Level::G, 0).unwrap().scaled(h).axpy(-h, &Ket::basis(space, Level::G, 1).unwrap()).unwrap();
    let coh = coherent_state(Alpha::real(1.0), Level::G, space).unwrap();
    let target = coherent_state(Alpha::real(-1.0), Level::G, space).unwrap();
    let a = direct(&coh, 600.0 * PI, 20000, Integrator::Magnus4, s);
    let b = direct(&plus, 600.0 * PI, 20000, Integrator::Magnus4, s);
    s.diag(
        4,
        &format!(
            "direct evolution at ΩT=600π: coherent {:.4}, Fock {:.4}",
            fidelity_up_to_phase(&a, &target).unwrap(),
            fidelity_up_to_phase(&b, &minus).unwrap()
        ),
    );
}

fn criterion_5(s: &mut Suite) {
    let space = protocol_space();
    let alpha = Alpha::real(1.0);
    let times: Vec<f64> = (0..=400).map(|k| 4.0 * PI * k as f64 / 400.0).collect();
    let flipped = coherent_state(Alpha::real(-1.0), Level::G, space).unwrap();
    let same = coherent_state(alpha, Level::G, space).unwrap();
    let sim = run_readout(&flipped, alpha, 1.0, &times).unwrap();
    let dark = run_readout(&same, alpha, 1.0, &times).unwrap();
    let max_dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let d_law = max_dev(&sim, &analytic_readout(alpha, 1.0, &times));
    let d_dark = dark.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let overlap = readout_overlap(alpha, space).unwrap();
    let d_overlap = (overlap - (-4.0f64).exp()).abs();
    s.verdict(
        5,
        "readout P_e(t) with Ω_(n+1)=Ω₀√(n+1)",
        d_law < TOL_READOUT && d_dark < TOL_DARK && d_overlap < TOL_OVERLAP,
        &format!("law {d_law:.2e} (tol {TOL_READOUT:.0e}), no-phase {d_dark:.2e} (tol {TOL_DARK:.0e}), overlap {d_overlap:.2e} (tol {TOL_OVERLAP:.0e})"),
    );
    s.diag(5, &format!("Rabi-sum form deviates by {:.3}", max_dev(&sim, &rabi_sum_readout(alpha, 1.0, &times))));
}

fn criterion_6(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let space = QSpace::new(64, 2, 54).unwrap();
    let eig_space = QSpace::new(64, 2, 20).unwrap();
    let (mut literal_id, mut phased_id, mut literal_eig, mut exact_eig) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let g_a = rng.random_range(0.5..2.0);
        let c = Couplings::new(g_a, g_a * rng.random_range(0.0..0.45), rng.random_range(-PI..PI)).unwrap();
        let sq = squeeze_op(c.squeeze(), space);
        let lhs = sq.adjoint().compose(&build_h(&c, space)).unwrap().compose(&sq).unwrap();
        literal_id = literal_id.max(lhs.interior_max_abs_diff(&build_h_jc(c.omega(), space)).unwrap());
        let phased = build_h(&Couplings::new(c.omega(), 0.0, c.phi()).unwrap(), space);
        phased_id = phased_id.max(lhs.interior_max_abs_diff(&phased).unwrap());

        let h = build_h(&c, eig_space);
        let basis = EigenBasis::from_couplings(&c, eig_space).unwrap();
        for n in 0..4 {
            for b in [Branch::Plus, Branch::Minus] {
                let lam = C64::new(-basis.eigenvalue(n, b), 0.0);
                let res = |psi: Ket| h.apply(&psi).unwrap().axpy(lam, &psi).unwrap().norm();
                literal_eig = literal_eig.max(res(basis.literal_state(n, b, c.phi()).unwrap()));
                exact_eig = exact_eig.max(res(basis.state(n, b, c.phi()).unwrap()));
            }
        }
    }
    s.verdict(
        6,
        "S†HS = Ω(σ₊a + h.c.) and squeezed-JC eigenpairs, 20 random couplings",
        literal_id < TOL_IDENTITY && literal_eig < TOL_IDENTITY,
        &format!("identity {literal_id:.3e}, eigenpairs {literal_eig:.3e} (tol {TOL_IDENTITY:.0e})"),
    );
    s.diag(6, &format!("with e^(iφ) on σ₊a: identity {phased_id:.3e}, eigenpairs with e^(iφ)|e,n>: {exact_eig:.3e}"));
}

fn lab_run(tp: &TrapParams, order: LabOrder, period: f64, psi0: &Ket, s: &mut Suite) -> Ket {
    let sched = Schedule::new(period, 1).with_dt(0.5 / tp.nu);
    let h = LabHamiltonian::new(tp, order, &sched, *psi0.space());
    let out = evolve_final_with(&h, psi0, &sched, Integrator::Magnus4).unwrap();
    s.drift(&out);
    lab_to_model(&out)
}

fn criterion_7(s: &mut Suite) {
    let r = quarter_squeeze_r();
    let tp = TrapParams {
        eta12: 0.1,
        eta34: 0.1,
        omega12: 20.0,
        omega34: 20.0 * r.tanh(),
        nu: 400.0,
        omega0: 0.0,
        delta: None,
        t_motional: 1.0,
        t_internal: 1.0,
    };
    let c = derive_couplings(&tp).unwrap();
    let space = QSpace::qubit(32).unwrap();
    let psi0 = coherent_state(Alpha::real(1.0), Level::G, space).unwrap();
    let run = |omega_t: f64, s: &mut Suite| {
        let period = omega_t / c.omega();
        let sched = Schedule::new(period, 1).with_steps_per_cycle(20000);
        let reduced = evolve_final_with(&LoopHamiltonian::new(&c, &sched, space), &psi0, &sched, Integrator::Magnus4).unwrap();
        let exact = lab_run(&tp, LabOrder::Exact, period, &psi0, s);
        let ld1 = lab_run(&tp, LabOrder::LambDicke1, period, &psi0, s);
        let f = |a: &Ket, b: &Ket| fidelity_up_to_phase(a, b).unwrap();
        (f(&exact, &reduced), f(&ld1, &reduced), f(&exact, &ld1))
    };
    let (fe, fl, fel) = run(2.0 * PI, s);
    s.verdict(
        7,
        "lab Hamiltonian (η=0.1, ν=20Ω₁₂) vs reduced model, one cycle ΩT=2π",
        fe > MIN_LAB_FIDELITY,
        &format!("fidelity {fe:.4} (min {MIN_LAB_FIDELITY})"),
    );
    s.diag(7, &format!("ΩT=2π: first-order Lamb-Dicke vs reduced {fl:.4}, exact vs first-order {fel:.6}"));
    let start = Instant::now();
    let (fe, fl, fel) = run(60.0 * PI, s);
    s.diag(
        7,
        &format!(
            "ΩT=60π: exact vs reduced {fe:.4}, first-order vs reduced {fl:.4}, exact vs first-order {fel:.6} ({:.0} s)",
            start.elapsed().as_secs_f64()
        ),
    );
    let stark = (tp.omega12 / 2.0).powi(2) / tp.nu;
    s.diag(7, &format!("carrier light shift (Ω₁₂/2)²/ν = {stark:.3} per unit time vs g_a = {:.3}", c.g_a()));
}

fn close(x: f64, want: f64) -> bool {
    (x - want).abs() <= TOL_RATIO * want
}

fn criterion_8(s: &mut Suite) {
    let (tp, sched) = be9();
    let be = feasibility_check(&tp, &sched).unwrap();
    let (tc, schc) = ca40();
    let ca = feasibility_check(&tc, &schc).unwrap();
    let tau_rounded = (be.dynamical_timescale * 1e7).round() / 1e7;
    let tau_ok = (tau_rounded - 0.33e-5).abs() < 1e-12;
    let nudged = Closure::new(tp.nu, sched.period * (1.0 + 3e-6));
    let closure_ok = [be.closure, ca.closure, nudged].iter().all(|c| c.adjusted_residual < 1e-9 * c.three_nu_t);
    let be_ok = close(be.adiabaticity_ratio, 3.0) && close(be.motional_margin, 10.0);
    let ca_ok = close(ca.adiabaticity_ratio, 10.0) && close(ca.motional_to_dynamical, 100.0);
    s.verdict(
        8,
        "feasibility arithmetic for Be and Ca presets",
        tau_ok && be_ok && ca_ok && closure_ok,
        &format!(
            "Be τ={:.4e} s rounds to {tau_rounded:.2e} (want 0.33e-5), T·g_a={:.3}, margin {:.2}; Ca T·g_a={:.2}, T_mot·g_a={:.1}; closure {}",
            be.dynamical_timescale,
            be.adiabaticity_ratio,
            be.motional_margin,
            ca.adiabaticity_ratio,
            ca.motional_to_dynamical,
            if closure_ok { "zeroed" } else { "not zeroed" }
        ),
    );
    s.diag(8, &format!("Be 1/g_a = 1/(π·10⁵ s⁻¹); nudged T closes with m={} residual {:.1e}", nudged.m, nudged.adjusted_residual));
}

fn slope(steps: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|&s| (1.0 / s as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn cli_outputs(cmd: &str, config: &str, workers: &str) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_berryion"))
        .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", workers, "--svg"])
        .status()
        .unwrap();
    assert!(status.success(), "{cmd} failed");
    read_dir(&out)
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_9(s: &mut Suite) {
    let space = QSpace::qubit(24).unwrap();
    let c = quarter();
    let sched = Schedule::new(10.0, 1);
    let h = LoopHamiltonian::new(&c, &sched, space);
    let psi0 = coherent_state(Alpha::real(0.8), Level::G, space).unwrap();
    let steps = [100, 200, 400, 1000];
    let errs = convergence_errors(&h, &psi0, &sched, &steps, 8).unwrap();
    let order = slope(&steps, &errs);

    let configs = [
        ("berry", "[berry]\nn_max = 3\nr = [0.0, 0.2, 0.4812]\nloop_samples = 400\n"),
        ("readout", "[readout]\nsamples = 201\n"),
        ("feasibility", "[feasibility]\npreset = \"ca40\"\nlab_frame_samples = 200\n"),
        (
            "sweep",
            "[space]\nfock_dim = 24\n\n[schedule]\nsteps_per_cycle = 200\n\n[sweep]\nparameter = \"omega_t\"\nvalues = [6.283185307179586, 12.566370614359172, 18.84955592153876]\n",
        ),
    ];
    let mut identical = true;
    for (cmd, cfg) in configs {
        let first = cli_outputs(cmd, cfg, "1");
        identical &= first == cli_outputs(cmd, cfg, "1") && first == cli_outputs(cmd, cfg, "4");
    }
    s.verdict(
        9,
        "midpoint order, norm drift, CLI determinism",
        (order - 2.0).abs() < TOL_ORDER && s.norm_drift < TOL_NORM && identical,
        &format!(
            "order {order:.3} (tol ±{TOL_ORDER}), max norm drift {:.2e} (tol {TOL_NORM:.0e}), outputs {}",
            s.norm_drift,
            if identical { "byte-identical" } else { "differ" }
        ),
    );
    let errs: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
    s.diag(9, &format!("errors vs dt/8 reference at {steps:?} steps: {}", errs.join(" ")));
}

fn main() {
    let start = Instant::now();
    let mut s = Suite::default();
    criterion_1(&mut s);
    criterion_2(&mut s);
    let at60 = pipeline(60.0 * PI, false, &mut s);
    criterion_3(&mut s, &at60);
    criterion_4(&mut s, &at60);
    criterion_5(&mut s);
    criterion_6(&mut s);
    criterion_7(&mut s);
    criterion_8(&mut s);
    criterion_9(&mut s);
    println!(
        "acceptance: {} of 9 passed, failed {:?} ({:.0} s)",
        9 - s.failed.len(),
        s.failed,
        start.elapsed().as_secs_f64()
    );
    if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") && !s.failed.is_empty() {
        std::process::exit(1);
    }
}
