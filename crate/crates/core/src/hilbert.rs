//! Truncated Fock ⊗ internal-level spaces, kets, dense operators and
//! exponentials.
//!
//! Basis ordering is internal-major: index = level·N + fock, with g = 0,
//! e = 1, r = 2.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRUNC_MARGIN: usize = 6;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Norm tolerance for physical states.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G,
    E,
    R,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::E => 1,
            Level::R => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSpace {
    fock_dim: usize,
    internal_dim: usize,
    trunc_margin: usize,
    tail_tol: f64,
}

impl QSpace {
    /// `trunc_margin` counts the top Fock levels excluded from exactness
    /// checks. It may exceed N/2.
    pub fn new(fock_dim: usize, internal_dim: usize, trunc_margin: usize) -> Result<Self> {
        if fock_dim < 8 {
            return Err(Error::InvalidSpace(format!("fock_dim {fock_dim} < 8")));
        }
        if !(2..=3).contains(&internal_dim) {
            return Err(Error::InvalidSpace(format!(
                "internal_dim {internal_dim} not in {{2, 3}}"
            )));
        }
        if trunc_margin >= fock_dim {
            return Err(Error::InvalidSpace(format!(
                "trunc_margin {trunc_margin} leaves no interior in fock_dim {fock_dim}"
            )));
        }
        Ok(QSpace { fock_dim, internal_dim, trunc_margin, tail_tol: DEFAULT_TAIL_TOL })
    }

    /// Qubit ⊗ oscillator space with the default margin.
    pub fn qubit(fock_dim: usize) -> Result<Self> {
        Self::new(fock_dim, 2, DEFAULT_TRUNC_MARGIN)
    }

    /// Qutrit (g, e, r) ⊗ oscillator space with the default margin.
    pub fn qutrit(fock_dim: usize) -> Result<Self> {
        Self::new(fock_dim, 3, DEFAULT_TRUNC_MARGIN)
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidSpace(format!("tail tolerance {tol} must be positive")));
        }
        self.tail_tol = tol;
        Ok(self)
    }

    pub fn with_trunc_margin(self, margin: usize) -> Result<Self> {
        Self::new(self.fock_dim, self.internal_dim, margin)?.with_tail_tol(self.tail_tol)
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn trunc_margin(&self) -> usize {
        self.trunc_margin
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn dim(&self) -> usize {
        self.fock_dim * self.internal_dim
    }

    /// Number of Fock levels in the interior block.
    pub fn interior(&self) -> usize {
        self.fock_dim - self.trunc_margin
    }

    pub fn has_level(&self, level: Level) -> bool {
        level.index() < self.internal_dim
    }

    pub fn levels(&self) -> &'static [Level] {
        if self.internal_dim == 3 {
            &[Level::G, Level::E, Level::R]
        } else {
            &[Level::G, Level::E]
        }
    }

    pub fn index(&self, level: Level, n: usize) -> Result<usize> {
        if !self.has_level(level) {
            return Err(Error::InvalidOperator(format!("level {level:?} absent for d = 2")));
        }
        if n >= self.fock_dim {
            return Err(Error::FockIndex { n, dim: self.fock_dim });
        }
        Ok(level.index() * self.fock_dim + n)
    }

    /// Fock number of a flat basis index.
    pub fn fock_of(&self, idx: usize) -> usize {
        idx % self.fock_dim
    }

    fn check_same(&self, other: &QSpace) -> Result<()> {
        if self.fock_dim == other.fock_dim && self.internal_dim == other.internal_dim {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    space: QSpace,
    amps: Array1<C64>,
}

impl Ket {
    pub fn from_amps(space: QSpace, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::InvalidParameter(format!(
                "ket length {} != space dimension {}",
                amps.len(),
                space.dim()
            )));
        }
        if amps.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("ket"));
        }
        Ok(Ket { space, amps })
    }

    pub fn zeros(space: QSpace) -> Self {
        Ket { space, amps: Array1::zeros(space.dim()) }
    }

    pub fn basis(space: QSpace, level: Level, n: usize) -> Result<Self> {
        let mut k = Self::zeros(space);
        let i = space.index(level, n)?;
        k.amps[i] = ONE;
        Ok(k)
    }

    /// Places an oscillator wavefunction on one internal level.
    pub fn from_fock(space: QSpace, level: Level, fock: &Array1<C64>) -> Result<Self> {
        if fock.len() != space.fock_dim() {
            return Err(Error::InvalidParameter(format!(
                "Fock vector length {} != {}",
                fock.len(),
                space.fock_dim()
            )));
        }
        let mut k = Self::zeros(space);
        let off = space.index(level, 0)?;
        k.amps.slice_mut(s![off..off + space.fock_dim()]).assign(fock);
        Ok(k)
    }

    pub fn space(&self) -> &QSpace {
        &self.space
    }

    pub fn amps(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn into_amps(self) -> Array1<C64> {
        self.amps
    }

    pub fn amplitude(&self, level: Level, n: usize) -> Result<C64> {
        Ok(self.amps[self.space.index(level, n)?])
    }

    /// Oscillator amplitudes on one internal level.
    pub fn fock_block(&self, level: Level) -> Result<Array1<C64>> {
        let off = self.space.index(level, 0)?;
        Ok(self.amps.slice(s![off..off + self.space.fock_dim()]).to_owned())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() < tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite ket".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Ket { space: self.space, amps: &self.amps * c }
    }

    /// self + c·other
    pub fn axpy(&self, c: C64, other: &Ket) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Ket { space: self.space, amps: &self.amps + &(&other.amps * c) })
    }

    /// Squared amplitude in the top `trunc_margin` Fock levels, summed over
    /// internal levels.
    pub fn tail_mass(&self) -> f64 {
        let n = self.space.fock_dim;
        let lo = self.space.interior();
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i % n >= lo)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Fails with a truncation error when the tail mass exceeds the space's
    /// tolerance.
    pub fn check_tail(&self) -> Result<()> {
        let mass = self.tail_mass();
        if mass < self.space.tail_tol {
            Ok(())
        } else {
            Err(Error::Truncation { mass, tol: self.space.tail_tol })
        }
    }
}

/// Dense operator on a `QSpace`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    space: QSpace,
    mat: Array2<C64>,
}

impl LinOp {
    pub fn from_matrix(space: QSpace, mat: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if mat.dim() != (d, d) {
            return Err(Error::InvalidParameter(format!(
                "operator shape {:?} != ({d}, {d})",
                mat.dim()
            )));
        }
        Ok(LinOp { space, mat })
    }

    pub fn zeros(space: QSpace) -> Self {
        LinOp { space, mat: Array2::zeros((space.dim(), space.dim())) }
    }

    pub fn identity(space: QSpace) -> Self {
        LinOp { space, mat: Array2::eye(space.dim()) }
    }

    /// `m ⊗ I_internal` for an N×N oscillator matrix.
    pub fn lift_fock(space: QSpace, m: &Array2<C64>) -> Result<Self> {
        let n = space.fock_dim();
        if m.dim() != (n, n) {
            return Err(Error::InvalidParameter(format!("Fock matrix shape {:?}", m.dim())));
        }
        let mut out = Self::zeros(space);
        for l in 0..space.internal_dim() {
            out.mat.slice_mut(s![l * n..(l + 1) * n, l * n..(l + 1) * n]).assign(m);
        }
        Ok(out)
    }

    /// `I_fock ⊗ m` for a d×d internal matrix.
    pub fn lift_internal(space: QSpace, m: &Array2<C64>) -> Result<Self> {
        let (d, n) = (space.internal_dim(), space.fock_dim());
        if m.dim() != (d, d) {
            return Err(Error::InvalidParameter(format!("internal matrix shape {:?}", m.dim())));
        }
        let mut out = Self::zeros(space);
        for i in 0..d {
            for j in 0..d {
                let v = m[[i, j]];
                if v != ZERO {
                    for k in 0..n {
                        out.mat[[i * n + k, j * n + k]] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn space(&self) -> &QSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        LinOp { space: self.space, mat: self.mat.t().mapv(|z| z.conj()) }
    }

    /// self · other
    pub fn compose(&self, other: &LinOp) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(LinOp { space: self.space, mat: self.mat.dot(&other.mat) })
    }

    pub fn apply(&self, psi: &Ket) -> Result<Ket> {
        self.space.check_same(&psi.space)?;
        Ok(Ket { space: psi.space, amps: self.mat.dot(&psi.amps) })
    }

    pub fn scaled(&self, c: C64) -> Self {
        LinOp { space: self.space, mat: &self.mat * c }
    }

    /// self + c·other
    pub fn axpy(&self, c: C64, other: &LinOp) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(LinOp { space: self.space, mat: &self.mat + &(&other.mat * c) })
    }

    pub fn plus(&self, other: &LinOp) -> Result<Self> {
        self.axpy(ONE, other)
    }

    pub fn minus(&self, other: &LinOp) -> Result<Self> {
        self.axpy(-ONE, other)
    }

    /// max |M − M†|
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.mat.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[[i, j]] - self.mat[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |m, z| m.max(z.norm_sqr())).sqrt()
    }

    /// Largest entry among rows and columns whose Fock index lies in the
    /// interior block.
    pub fn interior_max_abs(&self) -> f64 {
        let lo = self.space.interior();
        let n = self.space.fock_dim();
        let mut worst: f64 = 0.0;
        for ((i, j), z) in self.mat.indexed_iter() {
            if i % n < lo && j % n < lo {
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    pub fn interior_max_abs_diff(&self, other: &LinOp) -> Result<f64> {
        Ok(self.minus(other)?.interior_max_abs())
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        norm1(&self.mat)
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.is_finite())
    }
}

/// Truncated oscillator annihilation matrix of size n.
pub fn annihilation_matrix(n: usize) -> Array2<C64> {
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn annihilator(space: QSpace) -> LinOp {
    LinOp::lift_fock(space, &annihilation_matrix(space.fock_dim())).expect("shape matches")
}

pub fn creator(space: QSpace) -> LinOp {
    annihilator(space).adjoint()
}

pub fn number_op(space: QSpace) -> LinOp {
    let n = space.fock_dim();
    let m = Array2::from_diag(&Array1::from_iter((0..n).map(|k| C64::new(k as f64, 0.0))));
    LinOp::lift_fock(space, &m).expect("shape matches")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InternalKind {
    SigmaPlus,
    SigmaMinus,
    SigmaZ,
    ProjG,
    ProjE,
    ProjR,
    FlipG,
}

/// Internal-level operator ⊗ Fock identity. σ_z = |g⟩⟨g| − |e⟩⟨e|.
pub fn internal_op(kind: InternalKind, space: QSpace) -> Result<LinOp> {
    let d = space.internal_dim();
    let mut m: Array2<C64> = Array2::zeros((d, d));
    let (g, e) = (Level::G.index(), Level::E.index());
    match kind {
        InternalKind::SigmaPlus => m[[e, g]] = ONE,
        InternalKind::SigmaMinus => m[[g, e]] = ONE,
        InternalKind::SigmaZ => {
            m[[g, g]] = ONE;
            m[[e, e]] = -ONE;
        }
        InternalKind::ProjG => m[[g, g]] = ONE,
        InternalKind::ProjE => m[[e, e]] = ONE,
        InternalKind::ProjR => {
            if d < 3 {
                return Err(Error::InvalidOperator("proj_r requires internal_dim 3".into()));
            }
            m[[2, 2]] = ONE;
        }
        InternalKind::FlipG => {
            for i in 0..d {
                m[[i, i]] = ONE;
            }
            m[[g, g]] = -ONE;
        }
    }
    LinOp::lift_internal(space, &m)
}

pub fn overlap(a: &Ket, b: &Ket) -> Result<C64> {
    a.space.check_same(&b.space)?;
    Ok(a.amps.iter().zip(b.amps.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn expectation(op: &LinOp, psi: &Ket) -> Result<C64> {
    overlap(psi, &op.apply(psi)?)
}

/// |⟨a|b⟩|²
pub fn fidelity_up_to_phase(a: &Ket, b: &Ket) -> Result<f64> {
    Ok(overlap(a, b)?.norm_sqr())
}

fn norm1(m: &Array2<C64>) -> f64 {
    let mut sums = vec![0.0; m.ncols()];
    for row in m.rows() {
        for (s, z) in sums.iter_mut().zip(row) {
            *s += z.norm_sqr().sqrt();
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// exp(A) by Taylor series with scaling and squaring.
pub fn expm_matrix(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a * C64::new(0.5f64.powi(s), 0.0);
    let mut result: Array2<C64> = Array2::eye(n);
    let mut term: Array2<C64> = Array2::eye(n);
    for k in 1..=40 {
        term = term.dot(&scaled) * C64::new(1.0 / k as f64, 0.0);
        result += &term;
        if norm1(&term) <= f64::EPSILON * 1e-2 * norm1(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// exp(scale·A)·v by a Taylor series on substeps with ‖scale·A‖₁ ≤ 1.
pub fn expm_apply_matrix(a: &Array2<C64>, scale: C64, v: &Array1<C64>) -> Array1<C64> {
    let nrm = norm1(a) * scale.norm();
    let steps = nrm.ceil().max(1.0) as usize;
    let h = scale / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        let acc_norm: f64 = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..=60 {
            term = a.dot(&term) * (h / k as f64);
            acc += &term;
            let t: f64 = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if t <= f64::EPSILON * 1e-2 * acc_norm.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        out = acc;
    }
    out
}

/// exp(scale·op) as an operator.
pub fn expm(op: &LinOp, scale: C64) -> Result<LinOp> {
    if !op.is_finite() || !scale.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    Ok(LinOp { space: op.space, mat: expm_matrix(&(&op.mat * scale)) })
}

/// exp(scale·op)·ψ without forming the exponential.
pub fn expm_apply(op: &LinOp, scale: C64, psi: &Ket) -> Result<Ket> {
    op.space.check_same(&psi.space)?;
    if !op.is_finite() || !scale.is_finite() {
        return Err(Error::NonFinite("expm_apply operator"));
    }
    if psi.amps.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("expm_apply ket"));
    }
    Ok(Ket { space: psi.space, amps: expm_apply_matrix(&op.mat, scale, &psi.amps) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> QSpace {
        QSpace::qubit(16).unwrap()
    }

    #[test]
    fn space_validation() {
        assert!(QSpace::new(7, 2, 0).is_err());
        assert!(QSpace::new(8, 4, 0).is_err());
        assert!(QSpace::new(8, 2, 8).is_err());
        let s = QSpace::new(10, 3, 2).unwrap();
        assert_eq!(s.dim(), 30);
        assert_eq!(s.index(Level::R, 4).unwrap(), 24);
        assert!(s.index(Level::G, 10).is_err());
        assert!(QSpace::qubit(10).unwrap().index(Level::R, 0).is_err());
    }

    #[test]
    fn annihilator_basics() {
        let s = sp();
        let a = annihilator(s);
        let v0 = a.apply(&Ket::basis(s, Level::G, 0).unwrap()).unwrap();
        assert_eq!(v0.norm(), 0.0);
        let v1 = a.apply(&Ket::basis(s, Level::E, 1).unwrap()).unwrap();
        assert_eq!(v1, Ket::basis(s, Level::E, 0).unwrap());
        let num = creator(s).compose(&a).unwrap();
        for n in 0..16 {
            let k = Ket::basis(s, Level::G, n).unwrap();
            assert!((expectation(&num, &k).unwrap().re - n as f64).abs() < 1e-12);
        }
        assert!(num.minus(&number_op(s)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn commutator_away_from_top() {
        let s = sp();
        let a = annihilator(s);
        let ad = creator(s);
        let c = a.compose(&ad).unwrap().minus(&ad.compose(&a).unwrap()).unwrap();
        let id = LinOp::identity(s);
        let n = s.fock_dim();
        for ((i, j), z) in c.matrix().indexed_iter() {
            if i % n < n - 1 && j % n < n - 1 {
                assert!((z - id.matrix()[[i, j]]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn internal_ops() {
        let s = sp();
        let sp_ = internal_op(InternalKind::SigmaPlus, s).unwrap();
        let sm = internal_op(InternalKind::SigmaMinus, s).unwrap();
        let pe = internal_op(InternalKind::ProjE, s).unwrap();
        assert!(sp_.compose(&sm).unwrap().minus(&pe).unwrap().max_abs() < 1e-15);
        let g0 = Ket::basis(s, Level::G, 0).unwrap();
        let sz = internal_op(InternalKind::SigmaZ, s).unwrap();
        assert_eq!(sz.apply(&g0).unwrap(), g0);
        let flip = internal_op(InternalKind::FlipG, s).unwrap();
        assert_eq!(flip.apply(&g0).unwrap(), g0.scaled(-ONE));
        assert!(internal_op(InternalKind::ProjR, s).is_err());
        assert!(internal_op(InternalKind::ProjR, QSpace::qutrit(8).unwrap()).is_ok());
    }

    #[test]
    fn tensor_factors_commute() {
        let s = QSpace::qutrit(10).unwrap();
        let a = annihilator(s);
        for kind in [InternalKind::SigmaPlus, InternalKind::SigmaZ, InternalKind::FlipG] {
            let o = internal_op(kind, s).unwrap();
            let c = o.compose(&a).unwrap().minus(&a.compose(&o).unwrap()).unwrap();
            assert!(c.max_abs() < 1e-12);
        }
    }

    #[test]
    fn expm_identities() {
        let s = sp();
        let psi = Ket::basis(s, Level::E, 3).unwrap();
        let h = number_op(s);
        assert_eq!(expm_apply(&h, ZERO, &psi).unwrap(), psi);

        let pe = internal_op(InternalKind::ProjE, s).unwrap();
        let theta = 0.731;
        let e0 = Ket::basis(s, Level::E, 0).unwrap();
        let out = expm_apply(&pe, C64::new(0.0, -theta), &e0).unwrap();
        let expect = e0.scaled(C64::from_polar(1.0, -theta));
        assert!((out.amps() - expect.amps()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn expm_matrix_matches_vector_form() {
        let s = sp();
        let a = annihilator(s);
        let gen = a.plus(&creator(s)).unwrap();
        let psi = Ket::basis(s, Level::G, 2).unwrap();
        let scale = C64::new(0.0, -1.3);
        let u = expm(&gen, scale).unwrap();
        let v1 = u.apply(&psi).unwrap();
        let v2 = expm_apply(&gen, scale, &psi).unwrap();
        let d: f64 = (v1.amps() - v2.amps()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(d < 1e-12, "{d}");
        let uu = u.compose(&u.adjoint()).unwrap();
        assert!(uu.minus(&LinOp::identity(s)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let s = sp();
        let mut m = Array2::zeros((s.dim(), s.dim()));
        m[[0, 0]] = C64::new(f64::NAN, 0.0);
        let op = LinOp::from_matrix(s, m).unwrap();
        let psi = Ket::basis(s, Level::G, 0).unwrap();
        assert_eq!(expm_apply(&op, ONE, &psi), Err(Error::NonFinite("expm_apply operator")));
        assert!(Ket::from_amps(s, Array1::from_elem(s.dim(), C64::new(f64::INFINITY, 0.0))).is_err());
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let s = sp();
        let psi = Ket::basis(s, Level::G, 1)
            .unwrap()
            .axpy(C64::new(0.3, 0.4), &Ket::basis(s, Level::E, 5).unwrap())
            .unwrap()
            .normalized()
            .unwrap();
        assert!((overlap(&psi, &psi).unwrap() - ONE).norm() < 1e-15);
        let rot = psi.scaled(C64::from_polar(1.0, 2.2));
        assert!((fidelity_up_to_phase(&psi, &rot).unwrap() - 1.0).abs() < 1e-15);
    }
}
