//! Oscillator states and Gaussian unitaries.
//!
//! Squeeze and displacement operators are exponentials of their generators,
//! taken on a padded Fock space of `padded_dim(N)` levels and restricted to N.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation_matrix, expm_matrix, Ket, Level, LinOp, QSpace};

/// Squeezing parameter ε = r·e^{iθ}, θ kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    r: f64,
    theta: f64,
}

/// Reduces an angle to (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

impl SqueezeParam {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing strength r = {r}")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing phase {theta}")));
        }
        Ok(SqueezeParam { r, theta: wrap_angle(theta) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eps(&self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }
}

/// Coherent-state amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alpha(pub C64);

impl Alpha {
    pub fn real(x: f64) -> Self {
        Alpha(C64::new(x, 0.0))
    }
}

/// Fock dimension used for padded Gaussian constructions.
pub fn padded_dim(n: usize) -> usize {
    n + n.max(64)
}

pub fn number_state(n: usize, level: Level, space: QSpace) -> Result<Ket> {
    Ket::basis(space, level, n)
}

/// Amplitudes e^{−|α|²/2} αⁿ/√n! for n < len.
pub fn coherent_amplitudes(alpha: C64, len: usize) -> Array1<C64> {
    let mut out = Array1::zeros(len);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out[n] = c;
    }
    out
}

/// Normalized truncation of |α⟩ on one internal level. The untruncated tail
/// beyond the interior block must stay below the space's tail tolerance.
pub fn coherent_state(alpha: Alpha, level: Level, space: QSpace) -> Result<Ket> {
    let amps = coherent_amplitudes(alpha.0, space.fock_dim());
    let inner: f64 = amps.iter().take(space.interior()).map(|z| z.norm_sqr()).sum();
    let mass = (1.0 - inner).max(0.0);
    if mass >= space.tail_tol() {
        return Err(Error::Truncation { mass, tol: space.tail_tol() });
    }
    Ket::from_fock(space, level, &amps)?.normalized()
}

/// S(r) for real r on a padded Fock space; rotating to θ ≠ 0 is exact and
/// cheap, so one family serves a whole loop in the squeezing phase.
#[derive(Debug, Clone)]
pub struct SqueezeFamily {
    r: f64,
    fock_dim: usize,
    padded: Array2<C64>,
}

impl SqueezeFamily {
    pub fn new(r: f64, fock_dim: usize) -> Result<Self> {
        SqueezeParam::new(r, 0.0)?;
        let m = padded_dim(fock_dim);
        let a = annihilation_matrix(m);
        let a2 = a.dot(&a);
        let ad2 = a2.t().to_owned();
        // (ε̄a² − εa†²)/2 with ε = r
        let gen = (&a2 - &ad2) * C64::new(r / 2.0, 0.0);
        Ok(SqueezeFamily { r, fock_dim, padded: expm_matrix(&gen) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// ⟨j|S(r e^{iθ})|k⟩ = e^{iθ(j−k)/2} ⟨j|S(r)|k⟩.
    fn entry(&self, j: usize, k: usize, theta: f64) -> C64 {
        let z = self.padded[[j, k]];
        if z == C64::new(0.0, 0.0) {
            return z;
        }
        z * C64::from_polar(1.0, theta * (j as f64 - k as f64) / 2.0)
    }

    /// N×N block of S(r e^{iθ}).
    pub fn matrix(&self, theta: f64) -> Array2<C64> {
        let n = self.fock_dim;
        Array2::from_shape_fn((n, n), |(j, k)| self.entry(j, k, theta))
    }

    /// S(r e^{iθ})|k⟩ restricted to N levels, with the padded-space mass at
    /// Fock numbers ≥ `cut`.
    pub fn column(&self, k: usize, theta: f64, cut: usize) -> (Array1<C64>, f64) {
        let m = self.padded.nrows();
        let col = Array1::from_shape_fn(self.fock_dim, |j| self.entry(j, k, theta));
        let tail = (cut..m).map(|j| self.padded[[j, k]].norm_sqr()).sum();
        (col, tail)
    }

    pub fn op(&self, theta: f64, space: QSpace) -> Result<LinOp> {
        if space.fock_dim() != self.fock_dim {
            return Err(Error::SpaceMismatch);
        }
        LinOp::lift_fock(space, &self.matrix(theta))
    }

    /// S(ε)|k⟩ on `level`, rejecting states whose mass at or above the
    /// interior boundary exceeds the tail tolerance.
    pub fn state(&self, k: usize, theta: f64, level: Level, space: QSpace) -> Result<Ket> {
        if space.fock_dim() != self.fock_dim {
            return Err(Error::SpaceMismatch);
        }
        if k >= space.fock_dim() {
            return Err(Error::FockIndex { n: k, dim: space.fock_dim() });
        }
        let (col, tail) = self.column(k, theta, space.interior());
        if tail >= space.tail_tol() {
            return Err(Error::Truncation { mass: tail, tol: space.tail_tol() });
        }
        Ket::from_fock(space, level, &col)
    }
}

/// S(ε) = exp[(ε̄a² − εa†²)/2] ⊗ I_internal.
pub fn squeeze_op(eps: SqueezeParam, space: QSpace) -> LinOp {
    SqueezeFamily::new(eps.r(), space.fock_dim())
        .and_then(|f| f.op(eps.theta(), space))
        .expect("validated squeeze parameter")
}

/// D(α) = exp(αa† − ᾱa) ⊗ I_internal.
pub fn displacement_op(alpha: Alpha, space: QSpace) -> LinOp {
    let n = space.fock_dim();
    let a = annihilation_matrix(padded_dim(n));
    let gen = &a.t().mapv(|z| z * alpha.0) - &a.mapv(|z| z * alpha.0.conj());
    let full = expm_matrix(&gen);
    let block = full.slice(s![..n, ..n]).to_owned();
    LinOp::lift_fock(space, &block).expect("shape matches")
}

/// S(ε)|n⟩ on `level`.
pub fn squeezed_number_state(
    n: usize,
    eps: SqueezeParam,
    level: Level,
    space: QSpace,
) -> Result<Ket> {
    SqueezeFamily::new(eps.r(), space.fock_dim())?.state(n, eps.theta(), level, space)
}
