//! Quaternion arithmetic and slice geometry.
//!
//! A quaternion `q = w + x i + y j + z k` with nonzero imaginary part lies on a
//! unique complex slice `C_n = span{1, n}` where `n = Im q / |Im q|`. Because
//! `C_n = C_{-n}` as a set, slice axes are kept in a canonical hemisphere so that
//! axis labels are well defined; the imaginary coordinate carries the sign.

use thiserror::Error;

/// Deviation tolerance for unit imaginary axes.
pub const AXIS_UNIT_TOL: f64 = 1e-12;

/// Imaginary-part norm below which a quaternion is treated as real (no slice axis).
pub const REAL_AXIS_TOL: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum QuatError {
    /// The supplied axis is not a unit imaginary quaternion.
    #[error("axis is not unit imaginary (deviation {deviation:.3e})")]
    NonUnitAxis { deviation: f64 },
    /// A slice decomposition was requested for a quaternion on the real axis,
    /// where every slice contains the point and no axis is distinguished.
    #[error("quaternion lies on the real axis; slice axis is undefined")]
    RealAxisDegenerate,
}

// ─── Quaternion ─────────────────────────────────────────────────────────────

/// A quaternion `w + x i + y j + z k` over `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn from_real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Real part.
    pub fn re(&self) -> f64 {
        self.w
    }

    /// Imaginary part as a (pure imaginary) quaternion.
    pub fn im(&self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn im_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj() * (1.0 / n2))
        }
    }

    /// `q^n` by repeated multiplication (no slice shortcut, so it exercises the
    /// full quaternion product even for slice-confined arguments).
    pub fn powu(&self, n: u32) -> Quaternion {
        let mut acc = Quaternion::ONE;
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance to another quaternion.
    pub fn dist(&self, other: &Quaternion) -> f64 {
        (*self - *other).norm()
    }
}

impl std::ops::Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl std::ops::Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl std::ops::Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl std::ops::Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl std::ops::AddAssign for Quaternion {
    fn add_assign(&mut self, r: Quaternion) {
        *self = *self + r;
    }
}

impl std::ops::SubAssign for Quaternion {
    fn sub_assign(&mut self, r: Quaternion) {
        *self = *self - r;
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:+.6e}{:+.6e}i{:+.6e}j{:+.6e}k",
            self.w, self.x, self.y, self.z
        )
    }
}

// ─── Slice axes ─────────────────────────────────────────────────────────────

/// A canonical unit imaginary quaternion labelling a slice.
///
/// Of the two unit axes `±n` spanning the same slice, the canonical one
/// satisfies (lexicographically on `(n3, n1, n2)`):
/// `n3 > 0`, or `n3 = 0 && n1 > 0`, or `n3 = n1 = 0 && n2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceAxis {
    n1: f64,
    n2: f64,
    n3: f64,
}

fn canonical_sign(n1: f64, n2: f64, n3: f64) -> f64 {
    if n3 != 0.0 {
        n3.signum()
    } else if n1 != 0.0 {
        n1.signum()
    } else {
        n2.signum()
    }
}

impl SliceAxis {
    pub const I: SliceAxis = SliceAxis { n1: 1.0, n2: 0.0, n3: 0.0 };
    pub const J: SliceAxis = SliceAxis { n1: 0.0, n2: 1.0, n3: 0.0 };
    pub const K: SliceAxis = SliceAxis { n1: 0.0, n2: 0.0, n3: 1.0 };

    /// Canonicalize imaginary components into an axis. Errors if the vector is
    /// not unit length within [`AXIS_UNIT_TOL`].
    pub fn from_components(n1: f64, n2: f64, n3: f64) -> Result<SliceAxis, QuatError> {
        let norm = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
        let deviation = (norm - 1.0).abs();
        if !deviation.is_finite() || deviation > AXIS_UNIT_TOL {
            return Err(QuatError::NonUnitAxis { deviation });
        }
        let s = canonical_sign(n1, n2, n3);
        Ok(SliceAxis { n1: s * n1, n2: s * n2, n3: s * n3 })
    }

    /// Axis from the zenith/azimuth parameterization
    /// `(sin t1 cos p, sin t1 sin p, cos t1)`; `t1 < pi/2` lands in the
    /// canonical hemisphere directly, other angles are canonicalized.
    pub fn from_zenith(theta1: f64, phi: f64) -> SliceAxis {
        let (n1, n2, n3) = (
            theta1.sin() * phi.cos(),
            theta1.sin() * phi.sin(),
            theta1.cos(),
        );
        let s = canonical_sign(n1, n2, n3);
        SliceAxis { n1: s * n1, n2: s * n2, n3: s * n3 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn as_quaternion(&self) -> Quaternion {
        Quaternion::new(0.0, self.n1, self.n2, self.n3)
    }

    pub fn dot(&self, other: &SliceAxis) -> f64 {
        self.n1 * other.n1 + self.n2 * other.n2 + self.n3 * other.n3
    }

    /// Distance between axes as quaternions.
    pub fn dist(&self, other: &SliceAxis) -> f64 {
        self.as_quaternion().dist(&other.as_quaternion())
    }

    /// Slice phase `exp(n t) = cos t + n sin t`.
    pub fn phase(&self, t: f64) -> Quaternion {
        let (s, c) = t.sin_cos();
        Quaternion::new(c, s * self.n1, s * self.n2, s * self.n3)
    }

    /// Project `q` onto the slice `span{1, n}`: returns `(re, along, residual)`
    /// with `q = re + along * n + rest`, `residual = |rest|`. A small residual
    /// certifies that `q` lives on this slice and `(re, along)` are its
    /// complex coordinates there.
    pub fn slice_components(&self, q: &Quaternion) -> (f64, f64, f64) {
        let along = q.x * self.n1 + q.y * self.n2 + q.z * self.n3;
        let rest = Quaternion::new(
            0.0,
            q.x - along * self.n1,
            q.y - along * self.n2,
            q.z - along * self.n3,
        );
        (q.w, along, rest.norm())
    }

    /// Embed complex slice coordinates back into the quaternions:
    /// `re + along * n`.
    pub fn embed(&self, re: f64, along: f64) -> Quaternion {
        Quaternion::new(re, along * self.n1, along * self.n2, along * self.n3)
    }
}

/// Canonical representative of `{n, -n}` for a unit imaginary quaternion.
pub fn canonicalize_axis(n: Quaternion) -> Result<SliceAxis, QuatError> {
    let deviation = n.w.abs().max((n.im_norm() - 1.0).abs());
    if !deviation.is_finite() || deviation > AXIS_UNIT_TOL {
        return Err(QuatError::NonUnitAxis { deviation });
    }
    SliceAxis::from_components(n.x, n.y, n.z)
}

/// `exp(n t)` on the slice spanned by `n`.
pub fn exp_imag(axis: &SliceAxis, t: f64) -> Quaternion {
    axis.phase(t)
}

/// Axis field in which the azimuth runs over the full circle and the zenith is
/// read from it: `cos t1 sin p i + sin t1 sin p j + cos p k`. Antipodal
/// directions pair off as `p` sweeps the circle, so the first moment of this
/// field over the hemisphere rules vanishes; use it for orientation-balance
/// diagnostics, not for slice labelling.
pub fn unit_imag_paired(theta1: f64, phi: f64) -> Quaternion {
    let (st, ct) = theta1.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Quaternion::new(0.0, ct * sp, st * sp, cp)
}

// ─── Slice coordinates ──────────────────────────────────────────────────────

/// Coordinates `q = x + y n` of a quaternion on the slice with canonical axis
/// `n`. The sign convention lives in `y`: it is positive exactly when `Im q`
/// points along the canonical axis, so `(x, y, n)` and `(x, -y, -n)` describe
/// the same point and the stored axis can stay canonical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceCoords {
    pub x: f64,
    pub y: f64,
    pub axis: SliceAxis,
}

impl SliceCoords {
    pub fn new(x: f64, y: f64, axis: SliceAxis) -> SliceCoords {
        SliceCoords { x, y, axis }
    }

    pub fn compose(&self) -> Quaternion {
        slice_compose(self.x, self.y, &self.axis)
    }

    /// Radius `sqrt(x^2 + y^2)`.
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// `x + y n`; for `y < 0` this equals `slice_compose(x, -y, -n)` since the two
/// signs describe the same slice.
pub fn slice_compose(x: f64, y: f64, axis: &SliceAxis) -> Quaternion {
    Quaternion::from_real(x) + y * axis.as_quaternion()
}

/// Policy for decomposing quaternions whose imaginary part vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealAxisPolicy {
    /// Reject with [`QuatError::RealAxisDegenerate`] (default behaviour).
    Error,
    /// Assign the axis `i` with `y = 0`; the composition is unaffected.
    AssignI,
}

/// Slice coordinates of `q`. Errors with [`QuatError::RealAxisDegenerate`]
/// when `|Im q| <` [`REAL_AXIS_TOL`].
pub fn slice_decompose(q: Quaternion) -> Result<SliceCoords, QuatError> {
    slice_decompose_with(q, RealAxisPolicy::Error)
}

/// Slice coordinates of `q` with an explicit degenerate-point policy.
pub fn slice_decompose_with(
    q: Quaternion,
    policy: RealAxisPolicy,
) -> Result<SliceCoords, QuatError> {
    let rho = q.im_norm();
    if rho < REAL_AXIS_TOL {
        return match policy {
            RealAxisPolicy::Error => Err(QuatError::RealAxisDegenerate),
            RealAxisPolicy::AssignI => Ok(SliceCoords::new(q.w, 0.0, SliceAxis::I)),
        };
    }
    let (u1, u2, u3) = (q.x / rho, q.y / rho, q.z / rho);
    let s = canonical_sign(u1, u2, u3);
    Ok(SliceCoords {
        x: q.w,
        y: s * rho,
        axis: SliceAxis { n1: s * u1, n2: s * u2, n3: s * u3 },
    })
}

// ─── Four-dimensional polar coordinates ─────────────────────────────────────

/// Polar form `w = r cos t2`, `x = r sin t2 sin t1 cos p`,
/// `y = r sin t2 sin t1 sin p`, `z = r sin t2 cos t1` with `t1, t2` in `[0, pi]`
/// and `p` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar4 {
    pub r: f64,
    pub theta2: f64,
    pub theta1: f64,
    pub phi: f64,
}

impl Polar4 {
    pub fn compose(&self) -> Quaternion {
        let (s2, c2) = self.theta2.sin_cos();
        let (s1, c1) = self.theta1.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Quaternion::new(
            self.r * c2,
            self.r * s2 * s1 * cp,
            self.r * s2 * s1 * sp,
            self.r * s2 * c1,
        )
    }
}

/// Polar coordinates of `q`. The azimuth is normalized to `[0, 2pi)` with the
/// positive-`x` ray mapping to the `0+` branch; angles left undetermined by
/// degeneracies (`r = 0`, or a real `q`, or an axis-aligned imaginary part)
/// are returned as `0`, which composes back to the same point.
pub fn polar4(q: Quaternion) -> Polar4 {
    let r = q.norm();
    if r == 0.0 {
        return Polar4 { r: 0.0, theta2: 0.0, theta1: 0.0, phi: 0.0 };
    }
    let rho = q.im_norm();
    let theta2 = rho.atan2(q.w);
    let rho_xy = (q.x * q.x + q.y * q.y).sqrt();
    let theta1 = if rho == 0.0 { 0.0 } else { rho_xy.atan2(q.z) };
    let mut phi = if rho_xy == 0.0 { 0.0 } else { q.y.atan2(q.x) };
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    Polar4 { r, theta2, theta1, phi }
}

// ─── Lebesgue weight on slice coordinates ───────────────────────────────────

/// Weight convention for the 4D Lebesgue measure in slice coordinates
/// `dm = weight(x, y) dx dy dOmega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// `|y| sqrt(x^2 + y^2)`; integrates the unit Gaussian to `4 pi`.
    Paper,
    /// `y^2`, the polar Jacobian; integrates the unit Gaussian to `pi^2`.
    Jacobian,
}

/// Slice-coordinate Lebesgue weight in the chosen convention.
pub fn lebesgue_weight(x: f64, y: f64, mode: WeightMode) -> f64 {
    match mode {
        WeightMode::Paper => y.abs() * (x * x + y * y).sqrt(),
        WeightMode::Jacobian => y * y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn assert_close(a: Quaternion, b: Quaternion, tol: f64) {
        assert!(a.dist(&b) <= tol, "{a} vs {b} (dist {:.3e})", a.dist(&b));
    }

    fn rand_quat(rng: &mut impl Rng, scale: f64) -> Quaternion {
        Quaternion::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        assert_eq!(Quaternion::J * Quaternion::J, -Quaternion::ONE);
        assert_eq!(Quaternion::K * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn conjugation_realizes_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let q = rand_quat(&mut rng, 10.0);
            let p = q * q.conj();
            assert!(p.im_norm() <= 1e-13 * (1.0 + q.norm_sqr()));
            assert!((p.w - q.norm_sqr()).abs() <= 1e-12 * (1.0 + q.norm_sqr()));
        }
    }

    #[test]
    fn norm_is_multiplicative_bulk() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100_000 {
            let a = rand_quat(&mut rng, 10.0);
            let b = rand_quat(&mut rng, 10.0);
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs),
                "|ab| = {lhs}, |a||b| = {rhs}"
            );
        }
    }

    #[test]
    fn conjugation_reverses_products_bulk() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100_000 {
            let a = rand_quat(&mut rng, 10.0);
            let b = rand_quat(&mut rng, 10.0);
            let lhs = (a * b).conj();
            let rhs = b.conj() * a.conj();
            assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn inverse_and_powers() {
        let q = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let inv = q.inverse().unwrap();
        assert_close(q * inv, Quaternion::ONE, 1e-15);
        assert_close(inv * q, Quaternion::ONE, 1e-15);
        assert_eq!(Quaternion::ZERO.inverse(), None);
        assert_eq!(q.powu(0), Quaternion::ONE);
        assert_eq!(q.powu(3), q * q * q);
    }

    #[test]
    fn canonicalization_rule() {
        // -k flips to k.
        let k = canonicalize_axis(-Quaternion::K).unwrap();
        assert_eq!(k, SliceAxis::K);
        // (i - j)/sqrt(2) sits on the n3 = 0, n1 > 0 boundary: kept as is.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = canonicalize_axis(Quaternion::new(0.0, s, -s, 0.0)).unwrap();
        assert_eq!(a.components(), [s, -s, 0.0]);
        // -i flips to i.
        let i = canonicalize_axis(-Quaternion::I).unwrap();
        assert_eq!(i, SliceAxis::I);
        // -j flips to j (n3 = n1 = 0 branch).
        let j = canonicalize_axis(-Quaternion::J).unwrap();
        assert_eq!(j, SliceAxis::J);
    }

    #[test]
    fn non_unit_axis_rejected() {
        match SliceAxis::from_components(0.5, 0.0, 0.0) {
            Err(QuatError::NonUnitAxis { deviation }) => {
                assert!((deviation - 0.5).abs() < 1e-15)
            }
            other => panic!("expected NonUnitAxis, got {other:?}"),
        }
        // A non-imaginary quaternion is not an axis either.
        assert!(matches!(
            canonicalize_axis(Quaternion::new(0.5, 1.0, 0.0, 0.0)),
            Err(QuatError::NonUnitAxis { .. })
        ));
    }

    #[test]
    fn exp_imag_examples() {
        assert_close(exp_imag(&SliceAxis::I, PI), -Quaternion::ONE, 1e-15);
        let expected = Quaternion::new(0.5, 0.0, 3f64.sqrt() / 2.0, 0.0);
        assert_close(exp_imag(&SliceAxis::J, FRAC_PI_3), expected, 1e-15);
    }

    #[test]
    fn exp_imag_group_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10_000 {
            let axis = SliceAxis::from_zenith(
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..2.0 * PI),
            );
            let (a, b) = (rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let lhs = exp_imag(&axis, a) * exp_imag(&axis, b);
            let rhs = exp_imag(&axis, a + b);
            assert!(lhs.dist(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn distinct_slices_do_not_commute() {
        let a = exp_imag(&SliceAxis::I, 0.7);
        let b = exp_imag(&SliceAxis::J, 0.3);
        assert!((a * b).dist(&(b * a)) > 0.1);
    }

    #[test]
    fn slice_components_roundtrip() {
        let axis = SliceAxis::from_zenith(1.1, 2.3);
        let q = axis.embed(0.7, -1.9);
        let (re, along, residual) = axis.slice_components(&q);
        assert_eq!(re, 0.7);
        assert!((along + 1.9).abs() <= 1e-15);
        assert!(residual <= 1e-15);
        // An off-slice component shows up as residual, not as coordinates.
        let [n1, n2, n3] = axis.components();
        let perp = Quaternion::new(0.0, n2, -n1, 0.0); // orthogonal to the axis
        assert!(n3.abs() < 0.99, "test needs a non-polar axis");
        let (re, along, r2) = axis.slice_components(&(q + perp * 1e-3));
        assert_eq!(re, 0.7);
        assert!((along + 1.9).abs() <= 1e-12);
        assert!(r2 > 1e-4);
    }

    #[test]
    fn slice_decompose_examples() {
        let c = slice_decompose(Quaternion::new(3.0, 4.0, 0.0, 0.0)).unwrap();
        assert_eq!((c.x, c.y), (3.0, 4.0));
        assert_eq!(c.axis, SliceAxis::I);
        // Lower-hemisphere imaginary part: canonical axis, negative y.
        let c = slice_decompose(Quaternion::new(3.0, -4.0, 0.0, 0.0)).unwrap();
        assert_eq!((c.x, c.y), (3.0, -4.0));
        assert_eq!(c.axis, SliceAxis::I);
        assert_eq!(c.compose(), Quaternion::new(3.0, -4.0, 0.0, 0.0));
    }

    #[test]
    fn degenerate_real_axis_policy() {
        let q = Quaternion::from_real(2.5);
        assert_eq!(slice_decompose(q), Err(QuatError::RealAxisDegenerate));
        let c = slice_decompose_with(q, RealAxisPolicy::AssignI).unwrap();
        assert_eq!((c.x, c.y), (2.5, 0.0));
        assert_eq!(c.axis, SliceAxis::I);
        assert_eq!(c.compose(), q);
    }

    #[test]
    fn compose_sign_convention() {
        let axis = SliceAxis::from_zenith(0.4, 1.1);
        let minus = SliceAxis::from_components(
            -axis.components()[0],
            -axis.components()[1],
            -axis.components()[2],
        );
        // The mirrored components are non-canonical, so construction flips back.
        assert_eq!(minus.unwrap(), axis);
        // Directly: x + (-y) n == x + y (-n).
        let q1 = slice_compose(1.5, -0.8, &axis);
        let q2 = Quaternion::from_real(1.5) + 0.8 * -axis.as_quaternion();
        assert_eq!(q1, q2);
    }

    #[test]
    fn polar4_axis_example() {
        let p = polar4(Quaternion::I);
        assert!((p.r - 1.0).abs() < 1e-15);
        assert!((p.theta2 - FRAC_PI_2).abs() < 1e-15);
        assert!((p.theta1 - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.phi, 0.0); // 0+ branch of the azimuth
        assert_close(p.compose(), Quaternion::I, 1e-15);
    }

    #[test]
    fn lebesgue_weight_examples() {
        assert_eq!(lebesgue_weight(3.0, 4.0, WeightMode::Paper), 20.0);
        assert_eq!(lebesgue_weight(3.0, 4.0, WeightMode::Jacobian), 16.0);
        assert_eq!(lebesgue_weight(0.0, 2.0, WeightMode::Paper), 4.0);
        assert_eq!(lebesgue_weight(0.0, 2.0, WeightMode::Jacobian), 4.0);
        // Sign of y is immaterial in both conventions.
        assert_eq!(
            lebesgue_weight(3.0, -4.0, WeightMode::Paper),
            lebesgue_weight(3.0, 4.0, WeightMode::Paper)
        );
    }

    proptest! {
        #[test]
        fn slice_roundtrip(w in -10.0f64..10.0, x in -10.0f64..10.0,
                           y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let q = Quaternion::new(w, x, y, z);
            if q.im_norm() >= REAL_AXIS_TOL {
                let c = slice_decompose(q).unwrap();
                prop_assert!(c.compose().dist(&q) <= 1e-12 * (1.0 + q.norm()));
                // The stored axis is canonical: rebuilding it is a no-op.
                let [n1, n2, n3] = c.axis.components();
                prop_assert_eq!(SliceAxis::from_components(n1, n2, n3).unwrap(), c.axis);
            }
        }

        #[test]
        fn polar4_roundtrip(w in -10.0f64..10.0, x in -10.0f64..10.0,
                            y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let q = Quaternion::new(w, x, y, z);
            let p = polar4(q);
            prop_assert!((0.0..=PI).contains(&p.theta2));
            prop_assert!((0.0..=PI).contains(&p.theta1));
            prop_assert!((0.0..2.0 * PI).contains(&p.phi) || p.phi == 0.0);
            prop_assert!(p.compose().dist(&q) <= 1e-12 * (1.0 + q.norm()));
        }

        #[test]
        fn zenith_axes_are_canonical_units(t in 0.0f64..PI, p in 0.0f64..(2.0 * PI)) {
            let axis = SliceAxis::from_zenith(t, p);
            let [n1, n2, n3] = axis.components();
            let norm = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-14);
            prop_assert!(n3 > 0.0 || (n3 == 0.0 && (n1 > 0.0 || (n1 == 0.0 && n2 > 0.0))));
        }
    }
}
