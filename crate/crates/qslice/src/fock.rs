//! Coefficient model of the quaternionic Fock-type space.
//!
//! Vectors are finite coefficient lists against the monomial basis scaled by a
//! moment measure; the inner product `<f|g> = sum_m alpha_m conj(beta_m)` is
//! linear in the FIRST slot under left scalar multiplication, matching the
//! left-module structure everything downstream (kernels, rank-one operators)
//! relies on.

use crate::measure::{MeasureError, MomentMeasure};
use crate::quat::{slice_decompose, Quaternion, QuatError, SliceAxis, SliceCoords};
use std::f64::consts::PI;
use thiserror::Error;

/// Gram defect above which a claimed orthonormal family is rejected.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum FockError {
    #[error("coefficient lists have different lengths ({left} vs {right})")]
    ShapeMismatch { left: usize, right: usize },
    #[error("vectors are scaled by different moment measures")]
    MeasureMismatch,
    #[error("family is not orthonormal (Gram defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },
}

// ─── Vectors ────────────────────────────────────────────────────────────────

/// A vector `f = sum_m alpha_m Phi_m` stored through its quaternion
/// coefficients, tagged by the measure that scales the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Quaternion>,
    measure: MomentMeasure,
}

impl FockVector {
    pub fn new(coeffs: Vec<Quaternion>, measure: MomentMeasure) -> FockVector {
        assert!(!coeffs.is_empty(), "a Fock vector needs at least one coefficient");
        FockVector { coeffs, measure }
    }

    /// Zero vector with coefficients `0..=n_max`.
    pub fn zeros(n_max: usize, measure: MomentMeasure) -> FockVector {
        FockVector::new(vec![Quaternion::ZERO; n_max + 1], measure)
    }

    /// Canonical basis vector `e_m` with coefficients `0..=n_max`.
    pub fn basis(n_max: usize, m: usize, measure: MomentMeasure) -> FockVector {
        assert!(m <= n_max);
        let mut v = FockVector::zeros(n_max, measure);
        v.coeffs[m] = Quaternion::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest coefficient index.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, m: usize) -> Quaternion {
        self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn measure(&self) -> &MomentMeasure {
        &self.measure
    }

    /// Left-module inner product `<f|g> = sum alpha_m conj(beta_m)`.
    pub fn inner(&self, other: &FockVector) -> Result<Quaternion, FockError> {
        if self.len() != other.len() {
            return Err(FockError::ShapeMismatch { left: self.len(), right: other.len() });
        }
        if self.measure != other.measure {
            return Err(FockError::MeasureMismatch);
        }
        let mut acc = Quaternion::ZERO;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc += *a * b.conj();
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(Quaternion::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `q . f`, scalar from the left.
    pub fn scale_left(&self, q: Quaternion) -> FockVector {
        FockVector {
            coeffs: self.coeffs.iter().map(|a| q * *a).collect(),
            measure: self.measure.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Quaternion::is_finite)
    }
}

impl std::ops::Add<&FockVector> for &FockVector {
    type Output = FockVector;
    fn add(self, r: &FockVector) -> FockVector {
        assert_eq!(self.len(), r.len(), "shape mismatch in vector sum");
        FockVector {
            coeffs: self.coeffs.iter().zip(&r.coeffs).map(|(a, b)| *a + *b).collect(),
            measure: self.measure.clone(),
        }
    }
}

impl std::ops::Sub<&FockVector> for &FockVector {
    type Output = FockVector;
    fn sub(self, r: &FockVector) -> FockVector {
        assert_eq!(self.len(), r.len(), "shape mismatch in vector difference");
        FockVector {
            coeffs: self.coeffs.iter().zip(&r.coeffs).map(|(a, b)| *a - *b).collect(),
            measure: self.measure.clone(),
        }
    }
}

// ─── Basis functions ────────────────────────────────────────────────────────

/// Full-space basis function `Phi_m(q) = q^m / (2 pi sqrt(x_m!))`, evaluated
/// by repeated quaternion multiplication.
pub fn eval_phi(m: usize, q: Quaternion, measure: &MomentMeasure) -> Result<Quaternion, MeasureError> {
    let scale = 1.0 / (2.0 * PI * measure.x_factorial(m)?.sqrt());
    Ok(q.powu(m as u32) * scale)
}

/// Slice basis function `U_m(z) = z^m / sqrt(2 pi x_m!)`, unit-normalized in
/// the slice inner product.
pub fn eval_u(m: usize, z: &SliceCoords, measure: &MomentMeasure) -> Result<Quaternion, MeasureError> {
    let scale = 1.0 / (2.0 * PI * measure.x_factorial(m)?).sqrt();
    Ok(z.compose().powu(m as u32) * scale)
}

// ─── Restriction to a slice ─────────────────────────────────────────────────

/// The restriction of a coefficient vector to one slice: a function of the
/// slice coordinates only.
#[derive(Debug, Clone)]
pub struct SliceFunction {
    coeffs: Vec<Quaternion>,
    axis: SliceAxis,
    measure: MomentMeasure,
}

impl SliceFunction {
    pub fn axis(&self) -> &SliceAxis {
        &self.axis
    }

    /// Evaluate `sum_m alpha_m z^m / (2 pi sqrt(x_m!))` at `z = x + y n`.
    pub fn eval(&self, x: f64, y: f64) -> Result<Quaternion, MeasureError> {
        let z = SliceCoords::new(x, y, self.axis).compose();
        let mut power = Quaternion::ONE;
        let mut scale = 1.0 / (2.0 * PI);
        let mut acc = Quaternion::ZERO;
        for (m, alpha) in self.coeffs.iter().enumerate() {
            if m > 0 {
                power = power * z;
                scale /= self.measure.x_step(m)?.sqrt();
            }
            acc += *alpha * power * scale;
        }
        Ok(acc)
    }

    /// Coefficients against the unit-normalized slice basis `U_m`; these are
    /// `alpha_m / sqrt(2 pi)` independently of the axis.
    pub fn u_coefficients(&self) -> Vec<Quaternion> {
        let s = 1.0 / (2.0 * PI).sqrt();
        self.coeffs.iter().map(|a| *a * s).collect()
    }
}

/// Restrict a coefficient vector to the slice of `axis`.
pub fn restrict(f: &FockVector, axis: SliceAxis) -> SliceFunction {
    SliceFunction {
        coeffs: f.coeffs().to_vec(),
        axis,
        measure: f.measure().clone(),
    }
}

// ─── Parseval diagnostics ───────────────────────────────────────────────────

/// Parseval defect `| ||f||^2 - sum_n |<f|u_n>|^2 |` for a claimed
/// orthonormal family. The family's Gram matrix is verified first and a
/// defect beyond [`ORTHONORMAL_TOL`] is rejected as [`FockError::NotOrthonormal`].
pub fn parseval_check(f: &FockVector, basis: &[FockVector]) -> Result<f64, FockError> {
    let mut gram_defect = 0.0f64;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate().skip(i) {
            let g = u.inner(v)?;
            let reference = if i == j { Quaternion::ONE } else { Quaternion::ZERO };
            gram_defect = gram_defect.max(g.dist(&reference));
        }
    }
    if gram_defect > ORTHONORMAL_TOL {
        return Err(FockError::NotOrthonormal { defect: gram_defect });
    }
    let mut captured = 0.0;
    for u in basis {
        captured += f.inner(u)?.norm_sqr();
    }
    Ok((f.norm_sqr() - captured).abs())
}

// ─── Slice-regularity diagnostics ───────────────────────────────────────────

/// Which side the slice Cauchy-Riemann operator multiplies the axis on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularitySide {
    /// `(1/2)(d/dx + n d/dy)` — detects left slice regularity.
    Left,
    /// `(1/2)(d/dx + (d/dy) n)` — detects right slice regularity.
    Right,
}

/// Central-difference residual of the slice Cauchy-Riemann operator at `q`.
///
/// The derivative directions are `1` and the canonical slice axis of `q`, so
/// both probe points stay on the slice of `q`; the residual of a slice-regular
/// function decays like `h^2`. Errors on the real axis, where the slice (and
/// hence the `y` direction) is not determined.
pub fn regularity_residual(
    f: impl Fn(Quaternion) -> Quaternion,
    q: Quaternion,
    h: f64,
    side: RegularitySide,
) -> Result<f64, QuatError> {
    assert!(h > 0.0 && h.is_finite());
    let coords = slice_decompose(q)?;
    let n = coords.axis.as_quaternion();
    let half_inv = 1.0 / (2.0 * h);
    let dx = (f(q + Quaternion::from_real(h)) - f(q - Quaternion::from_real(h))) * half_inv;
    let dy = (f(q + n * h) - f(q - n * h)) * half_inv;
    let residual = match side {
        RegularitySide::Left => (dx + n * dy) * 0.5,
        RegularitySide::Right => (dx + dy * n) * 0.5,
    };
    Ok(residual.norm())
}
