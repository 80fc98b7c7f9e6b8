//! Hamiltonians of the squeezed Jaynes–Cummings model, their analytic
//! eigensystem, the laser-frame Hamiltonian and the map from trap
//! parameters to couplings.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bosonic::{padded_dim, SqueezeFamily, SqueezeParam};
use crate::error::{Error, Result};
use crate::evolve::{Hamiltonian, Schedule};
use crate::hilbert::{annihilation_matrix, expm_matrix, internal_op, InternalKind, Ket, Level, LinOp, QSpace};

/// r with sinh²r = 1/4, the protocol's working point.
pub fn quarter_squeeze_r() -> f64 {
    0.5f64.asinh()
}

/// Model couplings for H = g_a e^{iφ}σ₊a + g_b σ₊a† + h.c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    g_a: f64,
    g_b: f64,
    phi: f64,
}

impl Couplings {
    pub fn new(g_a: f64, g_b: f64, phi: f64) -> Result<Self> {
        if !(g_a.is_finite() && g_b.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidCouplings("non-finite coupling".into()));
        }
        if g_b < 0.0 {
            return Err(Error::InvalidCouplings(format!("g_b = {g_b} is negative")));
        }
        if g_a <= g_b {
            return Err(Error::InvalidCouplings(format!(
                "need g_a > g_b, got g_a = {g_a}, g_b = {g_b}"
            )));
        }
        Ok(Couplings { g_a, g_b, phi })
    }

    /// Couplings with g_b/g_a = tanh r.
    pub fn from_squeezing(g_a: f64, r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidCouplings(format!("squeezing strength r = {r}")));
        }
        Self::new(g_a, g_a * r.tanh(), phi)
    }

    /// sinh²r = 1/4 at the given g_a.
    pub fn quarter_squeeze(g_a: f64) -> Result<Self> {
        Self::from_squeezing(g_a, quarter_squeeze_r(), 0.0)
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Couplings { phi, ..self }
    }

    pub fn g_a(&self) -> f64 {
        self.g_a
    }

    pub fn g_b(&self) -> f64 {
        self.g_b
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn r(&self) -> f64 {
        (self.g_b / self.g_a).atanh()
    }

    /// Ω = g_a cosh r − g_b sinh r.
    pub fn omega(&self) -> f64 {
        let r = self.r();
        self.g_a * r.cosh() - self.g_b * r.sinh()
    }

    /// ε = r e^{−iφ}.
    pub fn squeeze(&self) -> SqueezeParam {
        SqueezeParam::new(self.r(), -self.phi).expect("finite couplings")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// σ₊a and σ₊a†, the two sideband pieces of H.
#[derive(Debug, Clone)]
pub struct SidebandParts {
    red: LinOp,
    blue: LinOp,
}

impl SidebandParts {
    pub fn new(space: QSpace) -> Self {
        let a = crate::hilbert::annihilator(space);
        let sp = internal_op(InternalKind::SigmaPlus, space).expect("σ₊ exists for d ≥ 2");
        SidebandParts {
            red: sp.compose(&a).expect("same space"),
            blue: sp.compose(&a.adjoint()).expect("same space"),
        }
    }

    pub fn space(&self) -> &QSpace {
        self.red.space()
    }

    /// g_a e^{iφ}σ₊a + g_b σ₊a† + h.c.
    pub fn hamiltonian(&self, g_a: f64, g_b: f64, phi: f64) -> LinOp {
        let m = self
            .red
            .scaled(C64::from_polar(g_a, phi))
            .axpy(C64::new(g_b, 0.0), &self.blue)
            .expect("same space");
        m.plus(&m.adjoint()).expect("same space")
    }
}

pub fn build_h(c: &Couplings, space: QSpace) -> LinOp {
    SidebandParts::new(space).hamiltonian(c.g_a, c.g_b, c.phi)
}

/// Ω(σ₊a + a†σ₋).
pub fn build_h_jc(omega: f64, space: QSpace) -> LinOp {
    SidebandParts::new(space).hamiltonian(omega, 0.0, 0.0)
}

/// Analytic eigenvectors of H along a loop in φ at fixed r.
///
/// S(ε)†H S(ε) = Ω(e^{iφ}σ₊a + h.c.) for ε = r e^{−iφ}, so the eigenvectors
/// are S(ε)(|g,n+1⟩ ± e^{iφ}|e,n⟩)/√2 with eigenvalues ±Ω√(n+1), plus the
/// dark state S(ε)|g,0⟩ at zero. The internal phase e^{iφ} is absent from the
/// literal squeezed-JC form, which is only an eigenvector at φ = 0; the
/// literal form is available as [`EigenBasis::literal_state`].
#[derive(Debug, Clone)]
pub struct EigenBasis {
    family: SqueezeFamily,
    omega: f64,
    space: QSpace,
}

impl EigenBasis {
    pub fn new(r: f64, omega: f64, space: QSpace) -> Result<Self> {
        Ok(EigenBasis { family: SqueezeFamily::new(r, space.fock_dim())?, omega, space })
    }

    pub fn from_couplings(c: &Couplings, space: QSpace) -> Result<Self> {
        Self::new(c.r(), c.omega(), space)
    }

    pub fn r(&self) -> f64 {
        self.family.r()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn space(&self) -> &QSpace {
        &self.space
    }

    /// Largest n whose eigenpair passes the truncation guard.
    pub fn max_n(&self) -> usize {
        let mut n = 0;
        while n + 2 < self.space.interior() && self.state(n + 1, Branch::Plus, 0.0).is_ok() {
            n += 1;
        }
        n
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n + 1 >= self.space.interior() {
            return Err(Error::FockIndex { n: n + 1, dim: self.space.interior() });
        }
        Ok(())
    }

    /// Ψₙ^± at laser phase φ.
    pub fn state(&self, n: usize, branch: Branch, phi: f64) -> Result<Ket> {
        self.check_n(n)?;
        let theta = -phi;
        let g = self.family.state(n + 1, theta, Level::G, self.space)?;
        let e = self.family.state(n, theta, Level::E, self.space)?;
        let c = C64::from_polar(branch.sign(), phi);
        Ok(g.axpy(c, &e)?.scaled(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
    }

    /// S(ε)(|g,n+1⟩ ± |e,n⟩)/√2, the squeezed-JC form without the internal
    /// phase.
    pub fn literal_state(&self, n: usize, branch: Branch, phi: f64) -> Result<Ket> {
        self.check_n(n)?;
        let g = self.family.state(n + 1, -phi, Level::G, self.space)?;
        let e = self.family.state(n, -phi, Level::E, self.space)?;
        Ok(g.axpy(C64::new(branch.sign(), 0.0), &e)?
            .scaled(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
    }

    /// S(ε)|g,0⟩.
    pub fn dark(&self, phi: f64) -> Result<Ket> {
        self.family.state(0, -phi, Level::G, self.space)
    }

    pub fn eigenvalue(&self, n: usize, branch: Branch) -> f64 {
        branch.sign() * self.omega * ((n + 1) as f64).sqrt()
    }
}

/// Eigenpair (Ψₙ^±(ε), ±Ω√(n+1)) with the pairing θ = −φ.
pub fn eigensystem_analytic(
    n: usize,
    eps: SqueezeParam,
    branch: Branch,
    omega: f64,
    space: QSpace,
) -> Result<(Ket, f64)> {
    let basis = EigenBasis::new(eps.r(), omega, space)?;
    let phi = -eps.theta();
    Ok((basis.state(n, branch, phi)?, basis.eigenvalue(n, branch)))
}

/// H(φ(t)) with φ from a schedule.
#[derive(Debug, Clone)]
pub struct LoopHamiltonian {
    parts: SidebandParts,
    g_a: f64,
    g_b: f64,
    sched: Schedule,
}

impl LoopHamiltonian {
    pub fn new(c: &Couplings, sched: &Schedule, space: QSpace) -> Self {
        LoopHamiltonian { parts: SidebandParts::new(space), g_a: c.g_a, g_b: c.g_b, sched: sched.clone() }
    }
}

impl Hamiltonian for LoopHamiltonian {
    fn space(&self) -> QSpace {
        *self.parts.space()
    }

    fn at(&self, t: f64) -> LinOp {
        self.parts.hamiltonian(self.g_a, self.g_b, self.sched.phi(t))
    }
}

/// Physical trap and laser parameters, all angular frequencies except the
/// decoherence times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    pub eta12: f64,
    pub eta34: f64,
    pub omega12: f64,
    pub omega34: f64,
    pub nu: f64,
    pub omega0: f64,
    pub delta: Option<f64>,
    pub t_motional: f64,
    pub t_internal: f64,
}

impl TrapParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eta12", self.eta12),
            ("eta34", self.eta34),
            ("omega12", self.omega12),
            ("omega34", self.omega34),
            ("nu", self.nu),
            ("omega0", self.omega0),
            ("t_motional", self.t_motional),
            ("t_internal", self.t_internal),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v}")));
            }
        }
        for (name, v) in [("omega12", self.omega12), ("nu", self.nu), ("eta12", self.eta12)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if let Some(d) = self.delta {
            if !d.is_finite() {
                return Err(Error::InvalidParameter(format!("delta = {d}")));
            }
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for (name, eta) in [("eta12", self.eta12), ("eta34", self.eta34)] {
            if eta > 0.3 {
                w.push(format!("{name} = {eta} is outside the Lamb-Dicke regime"));
            }
        }
        w
    }
}

/// g_a = η₁₂Ω₁₂/2, g_b = η₃₄Ω₃₄/2, φ = 0.
pub fn derive_couplings(tp: &TrapParams) -> Result<Couplings> {
    tp.validate()?;
    Couplings::new(tp.eta12 * tp.omega12 / 2.0, tp.eta34 * tp.omega34 / 2.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabOrder {
    Exact,
    LambDicke1,
}

/// exp(iη(a + a†)) on N levels, or its first-order expansion.
pub fn lamb_dicke_factor(eta: f64, order: LabOrder, fock_dim: usize) -> Array2<C64> {
    match order {
        LabOrder::Exact => {
            let m = padded_dim(fock_dim);
            let a = annihilation_matrix(m);
            let x = &a + &a.t();
            let full = expm_matrix(&x.mapv(|z| z * C64::new(0.0, eta)));
            full.slice(s![..fock_dim, ..fock_dim]).to_owned()
        }
        LabOrder::LambDicke1 => {
            let a = annihilation_matrix(fock_dim);
            let x = &a + &a.t();
            let mut f = x.mapv(|z| z * C64::new(0.0, eta));
            for k in 0..fock_dim {
                f[[k, k]] += C64::new(1.0, 0.0);
            }
            f
        }
    }
}

/// Time-independent pieces (Ωᵢⱼ/2)·F(ηᵢⱼ)σ₊ of the laser Hamiltonian.
#[derive(Debug, Clone)]
struct LabParts {
    p12: LinOp,
    p34: LinOp,
}

impl LabParts {
    fn new(tp: &TrapParams, order: LabOrder, space: QSpace) -> Self {
        let sp = internal_op(InternalKind::SigmaPlus, space).expect("σ₊ exists");
        let lift = |eta: f64, rabi: f64| {
            let f = LinOp::lift_fock(space, &lamb_dicke_factor(eta, order, space.fock_dim()))
                .expect("shape matches");
            sp.compose(&f).expect("same space").scaled(C64::new(rabi / 2.0, 0.0))
        };
        LabParts { p12: lift(tp.eta12, tp.omega12), p34: lift(tp.eta34, tp.omega34) }
    }

    /// The raising half, e^{i(φ−νt)}P₁₂ + e^{iνt}P₃₄.
    fn raising(&self, t: f64, nu: f64, phi: f64) -> LinOp {
        self.p12
            .scaled(C64::from_polar(1.0, phi - nu * t))
            .axpy(C64::from_polar(1.0, nu * t), &self.p34)
            .expect("same space")
    }
}

/// Laser Hamiltonian after the optical rotating-wave approximation:
/// Σ (Ωᵢⱼ/2)(e^{iχᵢⱼ(t)} e^{iηᵢⱼ(a+a†)} σ₊ + h.c.) with χ₁₂ = φ − νt and
/// χ₃₄ = νt. Sideband couplings are g = ηΩ/2.
pub fn build_lab_h(t: f64, tp: &TrapParams, phi: f64, order: LabOrder, space: QSpace) -> LinOp {
    let m = LabParts::new(tp, order, space).raising(t, tp.nu, phi);
    m.plus(&m.adjoint()).expect("same space")
}

/// Laser Hamiltonian in the motional interaction picture, where the mode
/// operators rotate as a → a e^{iνt}. Pair 12 then drives the red sideband
/// σ₊a and pair 34 the blue sideband σ₊a†; dropping the terms rotating at
/// ν and 2ν leaves i(g_a e^{iφ}σ₊a + g_b σ₊a†) + h.c., which equals
/// `build_h` after the internal rotation |e⟩ → i|e⟩ (see [`lab_to_model`]).
#[derive(Debug, Clone)]
pub struct LabHamiltonian {
    /// (Ω/2)·F(η) for each pair; σ₊ places them in the ⟨e|·|g⟩ block.
    b12: Array2<C64>,
    b34: Array2<C64>,
    nu: f64,
    sched: Schedule,
    space: QSpace,
}

impl LabHamiltonian {
    pub fn new(tp: &TrapParams, order: LabOrder, sched: &Schedule, space: QSpace) -> Self {
        let n = space.fock_dim();
        let block = |eta: f64, rabi: f64| lamb_dicke_factor(eta, order, n).mapv(|z| z * (rabi / 2.0));
        LabHamiltonian {
            b12: block(tp.eta12, tp.omega12),
            b34: block(tp.eta34, tp.omega34),
            nu: tp.nu,
            sched: sched.clone(),
            space,
        }
    }
}

impl Hamiltonian for LabHamiltonian {
    fn space(&self) -> QSpace {
        self.space
    }

    fn at(&self, t: f64) -> LinOp {
        let n = self.space.fock_dim();
        let c12 = C64::from_polar(1.0, self.sched.phi(t) - self.nu * t);
        let c34 = C64::from_polar(1.0, self.nu * t);
        // e^{−iν(i−j)t} indexed by i − j + n − 1.
        let phases: Vec<C64> =
            (0..2 * n - 1).map(|k| C64::from_polar(1.0, -self.nu * (k as f64 - (n - 1) as f64) * t)).collect();
        let d = self.space.dim();
        let mut mat = Array2::<C64>::zeros((d, d));
        for i in 0..n {
            for j in 0..n {
                let z = (self.b12[[i, j]] * c12 + self.b34[[i, j]] * c34) * phases[i + n - 1 - j];
                mat[[n + i, j]] = z;
                mat[[j, n + i]] = z.conj();
            }
        }
        LinOp::from_matrix(self.space, mat).expect("shape matches")
    }
}

/// Maps a state of the laser frame to the model frame (|e⟩ → −i|e⟩).
pub fn lab_to_model(psi: &Ket) -> Ket {
    let space = *psi.space();
    let n = space.fock_dim();
    let mut amps = psi.amps().clone();
    for k in 0..n {
        amps[n + k] *= C64::new(0.0, -1.0);
    }
    Ket::from_amps(space, amps).expect("same length")
}
