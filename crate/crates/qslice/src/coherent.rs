//! Coherent states and reproducing kernels over a moment measure.
//!
//! A moment measure with generalized factorials `x_m!` defines a family of
//! states labelled by points of ℍ: the `eta` states with coefficients
//! `q̄^n / (2π sqrt(N(r) x_n!))`, their slice-confined versions labelled by
//! points of one complex slice, and (for the exponential measure) the
//! canonical Gaussian family `γ_q`. The matching two-point kernel
//! `K(q₁,q̄₂) = Σ q̄₁^m q₂^m / (4π² x_m!)` is Hermitian, pointwise
//! non-negative on the diagonal, and idempotent under the ambient
//! quadrature; the `W` transform sends coefficient vectors to functions on
//! ℍ or on a slice, isometrically up to a fixed scale.
//!
//! Everything is truncated at a caller-chosen top level `n_max`.
//! Constructors certify that the dropped tail is negligible rather than
//! silently truncating, and series evaluations carry explicit cutoff and
//! cap policies.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{FockError, FockVector};
use crate::integrate::{integrate_h, integrate_slice, HemisphereRule, ThetaRule};
use crate::measure::{MeasureError, MomentMeasure, RadialRule, SERIES_TERM_CAP};
use crate::quat::{Quaternion, SliceAxis, SliceCoords};
use crate::sampler::SplitMix64;

/// Relative series cutoff: summation stops once the bound on the next term
/// drops below this fraction of the partial sum.
pub const SERIES_CUTOFF_REL: f64 = 1e-15;

/// Maximum mass fraction a state construction may silently drop at `n_max`.
pub const TAIL_BUDGET: f64 = 1e-12;

/// Axes closer than this are treated as the same slice.
pub const AXIS_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CsError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Fock(#[from] FockError),
    /// Two-point series `|q1||q2| < l^2` violated for a measure with a
    /// finite convergence radius `l`.
    #[error("kernel argument product {product:.6e} outside the convergence domain {limit:.6e}")]
    OutsideConvergence { product: f64, limit: f64 },
    /// The coefficient mass dropped beyond `n_max` exceeds the budget; the
    /// truncated state would misrepresent the mathematical one.
    #[error("truncation tail fraction {tail:.3e} exceeds budget {budget:.3e}; raise n_max")]
    TruncationTail { tail: f64, budget: f64 },
    #[error("arguments live on different slices (axis distance {distance:.3e})")]
    AxisMismatch { distance: f64 },
    #[error("quadrature resolves degree {available} but the check needs {needed}")]
    InsufficientOrder { needed: usize, available: usize },
}

/// A truncated coherent state: the coefficient vector together with the
/// label point it was built from.
#[derive(Debug, Clone)]
pub struct CoherentState {
    vector: FockVector,
    label: Quaternion,
}

impl CoherentState {
    pub fn vector(&self) -> &FockVector {
        &self.vector
    }

    pub fn into_vector(self) -> FockVector {
        self.vector
    }

    /// The point the state was built from (the `q` of `eta` built at `q`,
    /// whose coefficients carry `q̄^n`).
    pub fn label(&self) -> Quaternion {
        self.label
    }

    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }
}

/// Geometric certificate that the coefficient mass beyond `n_max` is below
/// `TAIL_BUDGET` relative to `N(r)`. Walks actual series terms while they
/// are not safely shrinking, then closes with a geometric bound; for
/// explicit moment lists the declared convergence radius caps the step
/// ratio once listed moments run out.
fn certify_tail(
    measure: &MomentMeasure,
    r: f64,
    n_max: usize,
    nhat: f64,
) -> Result<(), CsError> {
    if r == 0.0 {
        return Ok(());
    }
    let r2 = r * r;
    let radius_rho = measure.convergence_radius().map(|l| (r / l) * (r / l));
    let step = |n: usize| -> Result<Option<f64>, CsError> {
        match measure.x_step(n) {
            Ok(x) => Ok(Some(x)),
            Err(MeasureError::MomentsUnavailable { .. }) if radius_rho.is_some() => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let mut t = 1.0; // running term r^{2n} / x_n!
    for n in 1..=n_max {
        t *= match step(n)? {
            Some(x) => r2 / x,
            None => radius_rho.expect("step falls back only with a radius"),
        };
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    let walk_cap = n_max + 8 * (n_max + 64) + 16;
    let fail = Err(CsError::TruncationTail {
        tail: f64::INFINITY,
        budget: TAIL_BUDGET,
    });
    loop {
        let rho = match step(n)? {
            Some(x) => r2 / x,
            None => radius_rho.expect("step falls back only with a radius"),
        };
        // Cap by the asymptotic ratio so a non-monotone explicit list
        // cannot make the geometric remainder look better than the edge
        // of its support allows.
        let rho_cap = radius_rho.map_or(rho, |rr| rho.max(rr));
        t *= rho;
        tail += t;
        if rho_cap < 1.0 - 1e-9 && rho <= rho_cap {
            tail += 2.0 * t * rho_cap / (1.0 - rho_cap);
            break;
        }
        n += 1;
        if n > walk_cap || !tail.is_finite() {
            return fail;
        }
    }
    if tail / nhat > TAIL_BUDGET {
        return Err(CsError::TruncationTail {
            tail: tail / nhat,
            budget: TAIL_BUDGET,
        });
    }
    Ok(())
}

/// State on the full space built at `q`: coefficients
/// `q̄^n / (2π sqrt(N(|q|) x_n!))` for `n = 0..=n_max`.
///
/// The squared norm of the untruncated state is `1/(2π)²` — the `N`
/// factor cancels the series mass exactly — and the truncation keeps that
/// within `TAIL_BUDGET`.
pub fn coherent_h(
    q: Quaternion,
    measure: &MomentMeasure,
    n_max: usize,
) -> Result<CoherentState, CsError> {
    let r = q.norm();
    let nhat = measure.normalization(r)?;
    certify_tail(measure, r, n_max, nhat)?;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = Quaternion::from_real(1.0 / (2.0 * PI * nhat.sqrt()));
    coeffs.push(c);
    let qbar = q.conj();
    for n in 1..=n_max {
        c = c * qbar * (1.0 / measure.x_step(n)?.sqrt());
        coeffs.push(c);
    }
    Ok(CoherentState {
        vector: FockVector::new(coeffs, measure.clone()),
        label: q,
    })
}

/// Slice-confined state at `z = x + n y`: same coefficients as
/// [`coherent_h`] at the composed point, guaranteed to lie in the slice
/// `span{1, n}` because they are built from powers of `z̄` alone.
pub fn coherent_slice(
    coords: &SliceCoords,
    measure: &MomentMeasure,
    n_max: usize,
) -> Result<CoherentState, CsError> {
    coherent_h(coords.compose(), measure, n_max)
}

/// Canonical Gaussian state for the exponential measure:
/// coefficients `e^{-|q|²/2} q^m / sqrt(m!)`; unit norm.
pub fn gamma_canonical(q: Quaternion, n_max: usize) -> CoherentState {
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = Quaternion::from_real((-q.norm_sqr() / 2.0).exp());
    coeffs.push(c);
    for m in 1..=n_max {
        c = c * q * (1.0 / (m as f64).sqrt());
        coeffs.push(c);
    }
    CoherentState {
        vector: FockVector::new(coeffs, MomentMeasure::exponential()),
        label: q,
    }
}

fn check_two_point_domain(
    r1: f64,
    r2: f64,
    measure: &MomentMeasure,
) -> Result<(), CsError> {
    if let Some(l) = measure.convergence_radius() {
        if r1 * r2 >= l * l {
            return Err(CsError::OutsideConvergence {
                product: r1 * r2,
                limit: l * l,
            });
        }
    }
    Ok(())
}

/// Two-point kernel on the full space:
/// `kernel_h(q1, q2) = Σ_m q̄₁^m q₂^m / (4π² x_m!)`,
/// the value usually written `K(q₁, q̄₂)`. The factor order `q̄₁^m · q₂^m`
/// matters; it is preserved term by term.
pub fn kernel_h(
    q1: Quaternion,
    q2: Quaternion,
    measure: &MomentMeasure,
) -> Result<Quaternion, CsError> {
    let (r1, r2) = (q1.norm(), q2.norm());
    check_two_point_domain(r1, r2, measure)?;
    let scale0 = 1.0 / (4.0 * PI * PI);
    let mut acc = Quaternion::from_real(scale0);
    let mut pa = Quaternion::ONE;
    let mut pb = Quaternion::ONE;
    let a = q1.conj();
    let r = r1 * r2;
    let mut rm = 1.0; // r^m
    let mut scale = scale0; // 1 / (4π² x_m!)
    for m in 1..=SERIES_TERM_CAP {
        let x = measure.x_step(m)?;
        pa = pa * a;
        pb = pb * q2;
        scale /= x;
        rm *= r;
        acc += pa * pb * scale;
        // Next-term norm bound: r^{m+1} / (4π² x_{m+1}!). When the next
        // step is unknown (explicit list exhausted) fall back on the
        // current term's bound; convergence inside the declared radius
        // makes the remaining terms smaller in the capped-ratio sense.
        let next_bound = match measure.x_step(m + 1) {
            Ok(xn) => rm * r * scale / xn,
            Err(_) => rm * scale,
        };
        if next_bound < SERIES_CUTOFF_REL * acc.norm() {
            return Ok(acc);
        }
    }
    Err(MeasureError::NonConvergent {
        terms: SERIES_TERM_CAP,
    }
    .into())
}

/// Two-point kernel on one slice:
/// `kernel_slice(z1, z2) = Σ_m z̄₁^m z₂^m / (2π x_m!)`, the value usually
/// written `K(z₁, z̄₂)`. Both points must carry the same axis.
pub fn kernel_slice(
    z1: &SliceCoords,
    z2: &SliceCoords,
    measure: &MomentMeasure,
) -> Result<Quaternion, CsError> {
    let distance = z1.axis.dist(&z2.axis);
    if distance > AXIS_MATCH_TOL {
        return Err(CsError::AxisMismatch { distance });
    }
    check_two_point_domain(z1.radius(), z2.radius(), measure)?;
    // Within one slice the arithmetic is complex arithmetic, exactly.
    let a = Complex64::new(z1.x, -z1.y);
    let b = Complex64::new(z2.x, z2.y);
    let r = a.norm() * b.norm();
    let scale0 = 1.0 / (2.0 * PI);
    let mut acc = Complex64::new(scale0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    let mut rm = 1.0;
    let mut scale = scale0;
    for m in 1..=SERIES_TERM_CAP {
        let x = measure.x_step(m)?;
        p *= a * b;
        scale /= x;
        rm *= r;
        acc += p * scale;
        let next_bound = match measure.x_step(m + 1) {
            Ok(xn) => rm * r * scale / xn,
            Err(_) => rm * scale,
        };
        if next_bound < SERIES_CUTOFF_REL * acc.norm() {
            return Ok(z1.axis.embed(acc.re, acc.im));
        }
    }
    Err(MeasureError::NonConvergent {
        terms: SERIES_TERM_CAP,
    }
    .into())
}

/// Property report for the two-point kernel, computed from seeded samples.
#[derive(Debug, Clone, Copy)]
pub struct KernelReport {
    /// Max of `|K(q1,q2) - conj(K(q2,q1))|` over the sampled pairs.
    pub hermiticity_defect: f64,
    /// Min of the diagonal values `K(q,q)`; must be non-negative.
    pub positivity_min: f64,
    /// Max of `|K(q,q) - N(|q|)/4π²|` over the samples.
    pub diagonal_defect: f64,
    /// Min eigenvalue of an 8-point same-slice kernel Gram matrix.
    pub gram_min_eigenvalue: f64,
    /// Max quadrature defect of `∫ K(q1,·)K(·,q3) = K(q1,q3)` on two pairs.
    pub idempotence_defect: f64,
}

/// Evaluate the kernel property report: Hermitian symmetry and diagonal
/// positivity on `samples` seeded points, positive-semidefiniteness of an
/// 8-point Gram matrix on a sampled slice, and the idempotence identity
/// under the supplied quadrature rules.
pub fn kernel_properties(
    measure: &MomentMeasure,
    radial: &RadialRule,
    theta: &ThetaRule,
    hemisphere: &HemisphereRule,
    samples: usize,
    seed: u64,
) -> Result<KernelReport, CsError> {
    assert!(samples >= 2, "need at least two sample points");
    let mut rng = SplitMix64::new(seed);
    let rmax = match measure.convergence_radius() {
        None => 2.0,
        Some(l) => (0.45 * l).min(2.0),
    };

    let mut hermiticity_defect = 0.0f64;
    for _ in 0..samples {
        let q1 = rng.ball(rmax);
        let q2 = rng.ball(rmax);
        let lhs = kernel_h(q1, q2, measure)?;
        let rhs = kernel_h(q2, q1, measure)?.conj();
        hermiticity_defect = hermiticity_defect.max(lhs.dist(&rhs));
    }

    let mut positivity_min = f64::INFINITY;
    let mut diagonal_defect = 0.0f64;
    for _ in 0..samples {
        let q = rng.ball(rmax);
        let k = kernel_h(q, q, measure)?;
        positivity_min = positivity_min.min(k.re());
        let expected = measure.normalization(q.norm())? / (4.0 * PI * PI);
        diagonal_defect = diagonal_defect.max(k.dist(&Quaternion::from_real(expected)));
    }

    // Gram positivity: kernel matrix of 8 points on one sampled slice.
    // On a slice the kernel takes values in span{1, n}; the complex
    // projection is exact and the matrix is Hermitian.
    let axis = rng.axis();
    let points: Vec<SliceCoords> = (0..8)
        .map(|_| rng.slice_point(&axis, (0.6 * rmax).min(1.2)))
        .collect();
    let mut gram = DMatrix::<Complex64>::zeros(points.len(), points.len());
    for a in 0..points.len() {
        for b in 0..points.len() {
            let k = kernel_slice(&points[a], &points[b], measure)?;
            let (re, im, _) = axis.slice_components(&k);
            gram[(a, b)] = Complex64::new(re, im);
        }
    }
    let gram_min_eigenvalue = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v));

    // Idempotence under the ambient quadrature, two seeded pairs.
    let x_top = radial.nodes().last().copied().unwrap_or(0.0);
    if let Some(l) = measure.convergence_radius() {
        let product = x_top.sqrt() * rmax;
        if product >= l * l {
            return Err(CsError::OutsideConvergence {
                product,
                limit: l * l,
            });
        }
    }
    let mut idempotence_defect = 0.0f64;
    for _ in 0..2 {
        let q1 = rng.ball(rmax);
        let q3 = rng.ball(rmax);
        let lhs = integrate_h(radial, theta, hemisphere, |q| {
            let left = kernel_h(q1, q, measure)
                .expect("kernel series validated against the measure domain");
            let right = kernel_h(q, q3, measure)
                .expect("kernel series validated against the measure domain");
            left * right
        });
        let rhs = kernel_h(q1, q3, measure)?;
        idempotence_defect = idempotence_defect.max(lhs.dist(&rhs));
    }

    Ok(KernelReport {
        hermiticity_defect,
        positivity_min,
        diagonal_defect,
        gram_min_eigenvalue,
        idempotence_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylMode {
    /// The printed prefactor `2π N(r)^{1/2} ⟨f|η⟩`; scales norms by `2π`
    /// on the full space and by `sqrt(2π)` on a slice.
    Paper,
    /// Prefactor adjusted so the transform is an actual isometry under
    /// this crate's ambient measures (`sqrt(N)` on the full space,
    /// `sqrt(2π N)` on a slice).
    Isometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeylDomain {
    Full,
    Slice(SliceAxis),
}

/// The transform `f ↦ Wf` as an evaluable function.
#[derive(Debug, Clone, Copy)]
pub struct WeylTransform<'a> {
    f: &'a FockVector,
    mode: WeylMode,
    domain: WeylDomain,
}

pub fn weyl_transform(f: &FockVector, mode: WeylMode, domain: WeylDomain) -> WeylTransform<'_> {
    WeylTransform { f, mode, domain }
}

impl<'a> WeylTransform<'a> {
    fn prefactor(&self, nhat: f64) -> f64 {
        match (self.mode, self.domain) {
            (WeylMode::Paper, _) => 2.0 * PI * nhat.sqrt(),
            (WeylMode::Isometric, WeylDomain::Full) => nhat.sqrt(),
            (WeylMode::Isometric, WeylDomain::Slice(_)) => (2.0 * PI * nhat).sqrt(),
        }
    }

    /// Evaluate `(Wf)(q) = prefactor · ⟨f | eta built at q⟩`. For a slice
    /// domain, `q` must lie on that slice.
    ///
    /// The pairing only sees the state's coefficients up to `f`'s top
    /// level, so no truncation-tail certificate is involved: the sum below
    /// is the exact inner product against the untruncated state.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion, CsError> {
        if let WeylDomain::Slice(axis) = self.domain {
            let (_, _, residual) = axis.slice_components(&q);
            if residual > AXIS_MATCH_TOL * (1.0 + q.norm()) {
                return Err(CsError::AxisMismatch { distance: residual });
            }
        }
        let measure = self.f.measure();
        let nhat = measure.normalization(q.norm())?;
        // ⟨f|eta⟩ = Σ_m f_m · conj(eta_m) with conj(eta_m) = q^m s_m.
        let mut acc = Quaternion::ZERO;
        let mut p = Quaternion::ONE;
        let mut s = 1.0 / (2.0 * PI * nhat.sqrt());
        for m in 0..=self.f.n_max() {
            if m > 0 {
                p = p * q;
                s /= measure.x_step(m)?.sqrt();
            }
            acc += self.f.coeff(m) * p * s;
        }
        Ok(acc * self.prefactor(nhat))
    }

    /// `‖Wf‖ / ‖f‖` under the domain's ambient quadrature.
    ///
    /// The hemisphere rule is consulted only for the full domain.
    pub fn norm_ratio(
        &self,
        radial: &RadialRule,
        theta: &ThetaRule,
        hemisphere: &HemisphereRule,
    ) -> Result<f64, CsError> {
        let fnorm = self.f.norm();
        assert!(fnorm > 0.0, "norm ratio needs a nonzero vector");
        // Validate the heaviest node once so the quadrature closure can
        // stay infallible.
        let x_top = radial.nodes().last().copied().unwrap_or(0.0);
        self.f.measure().normalization(x_top.sqrt())?;
        for m in 1..=self.f.n_max() {
            self.f.measure().x_step(m)?;
        }
        let density = |q: Quaternion| {
            let v = self
                .eval(q)
                .expect("transform validated at the largest quadrature node");
            Quaternion::from_real(v.norm_sqr())
        };
        let total = match self.domain {
            WeylDomain::Full => integrate_h(radial, theta, hemisphere, density),
            WeylDomain::Slice(axis) => integrate_slice(radial, theta, &axis, density),
        };
        Ok(total.re().max(0.0).sqrt() / fnorm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolutionDomain {
    /// `2π ∫ |η⟩⟨η| N dν = I` over one slice.
    Slice(SliceAxis),
    /// `∫ |η⟩⟨η| N dν dΩ = I` over the full space.
    Full,
}

/// Quadrature defect of the resolution of the identity: builds
/// `M_{mk} = ∫ ⟨f_m|η⟩⟨η|f_k⟩ N(r) d(ambient)` with the domain's constant
/// and returns `max |M - I|` over the interior index block.
///
/// The radial-by-angle factor of the integrand depends on the slice
/// coordinates only, so it is accumulated once as a complex matrix; the
/// hemisphere average then acts linearly on that matrix through the rule's
/// mass and axis first moment. This equals the node-by-node sum exactly,
/// up to summation order.
pub fn resolution_check(
    domain: ResolutionDomain,
    measure: &MomentMeasure,
    n_max: usize,
    radial: &RadialRule,
    theta: &ThetaRule,
    hemisphere: &HemisphereRule,
) -> Result<f64, CsError> {
    if radial.exact_degree() < 2 * n_max + 1 {
        return Err(CsError::InsufficientOrder {
            needed: 2 * n_max + 1,
            available: radial.exact_degree(),
        });
    }
    if theta.order() <= n_max {
        return Err(CsError::InsufficientOrder {
            needed: n_max + 1,
            available: theta.order(),
        });
    }
    let n = n_max + 1;
    let mut inv_sqrt_step = vec![0.0; n];
    for m in 1..n {
        inv_sqrt_step[m] = 1.0 / measure.x_step(m)?.sqrt();
    }
    let mut coeff = vec![Complex64::new(0.0, 0.0); n];
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for (x, wx) in radial.iter() {
        let r = x.sqrt();
        let nhat = measure.normalization(r)?;
        let c0 = 1.0 / (2.0 * PI * nhat.sqrt());
        for (t, wt) in theta.nodes() {
            let zbar = Complex64::from_polar(r, -t);
            coeff[0] = Complex64::new(c0, 0.0);
            for m in 1..n {
                coeff[m] = coeff[m - 1] * zbar * inv_sqrt_step[m];
            }
            let w = wx * wt * nhat;
            for m in 0..n {
                let cm = coeff[m].conj() * w;
                for k in m..n {
                    gram[m * n + k] += cm * coeff[k];
                }
            }
        }
    }
    let limit = crate::interior_limit(n_max);
    let mut defect = 0.0f64;
    match domain {
        ResolutionDomain::Slice(_) => {
            for m in 0..limit {
                for k in m..limit {
                    let v = gram[m * n + k] * 2.0 * PI;
                    let target = if m == k { 1.0 } else { 0.0 };
                    defect = defect.max((v - Complex64::new(target, 0.0)).norm());
                }
            }
        }
        ResolutionDomain::Full => {
            let mass = hemisphere.mass();
            let mut axis_moment = [0.0f64; 3];
            for node in hemisphere.nodes() {
                let axis = SliceAxis::from_zenith(node.theta1, node.phi);
                let [a, b, c] = axis.components();
                axis_moment[0] += node.weight * a;
                axis_moment[1] += node.weight * b;
                axis_moment[2] += node.weight * c;
            }
            for m in 0..limit {
                for k in m..limit {
                    let v = gram[m * n + k];
                    let q = Quaternion::new(
                        v.re * mass,
                        v.im * axis_moment[0],
                        v.im * axis_moment[1],
                        v.im * axis_moment[2],
                    );
                    let target = if m == k {
                        Quaternion::ONE
                    } else {
                        Quaternion::ZERO
                    };
                    defect = defect.max(q.dist(&target));
                }
            }
        }
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{eval_phi, eval_u};
    use crate::integrate::HemisphereRule;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn coherent_h_at_origin_is_scaled_ground_state() {
        let mu = MomentMeasure::exponential();
        let eta = coherent_h(Quaternion::ZERO, &mu, 6).unwrap();
        close(eta.vector().coeff(0).re(), 1.0 / (2.0 * PI), 1e-16);
        for m in 1..=6 {
            assert_eq!(eta.vector().coeff(m), Quaternion::ZERO);
        }
        assert_eq!(eta.label(), Quaternion::ZERO);
    }

    #[test]
    fn coherent_norm_is_inverse_two_pi() {
        let measures = [
            MomentMeasure::exponential(),
            MomentMeasure::gamma(0.7).unwrap(),
        ];
        let mut rng = SplitMix64::new(99);
        for mu in &measures {
            for _ in 0..50 {
                let q = rng.ball(2.0);
                let eta = coherent_h(q, mu, 64).unwrap();
                close(2.0 * PI * eta.norm(), 1.0, 1e-10);
            }
        }
    }

    #[test]
    fn coherent_slice_is_confined_and_matches_full() {
        let mu = MomentMeasure::exponential();
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let axis = rng.axis();
            let z = rng.slice_point(&axis, 1.8);
            let eta = coherent_slice(&z, &mu, 32).unwrap();
            let full = coherent_h(z.compose(), &mu, 32).unwrap();
            for m in 0..=32 {
                let c = eta.vector().coeff(m);
                let (_, _, residual) = axis.slice_components(&c);
                assert!(residual <= 1e-14 * (1.0 + c.norm()));
                assert!(c.dist(&full.vector().coeff(m)) <= 1e-15);
            }
        }
    }

    #[test]
    fn truncation_tail_is_enforced() {
        let mu = MomentMeasure::exponential();
        let q = Quaternion::new(0.0, 2.0, 0.0, 0.0);
        match coherent_h(q, &mu, 4) {
            Err(CsError::TruncationTail { tail, budget }) => {
                assert!(tail > budget);
                assert!(tail > 0.01, "tail fraction should be large here, got {tail}");
            }
            other => panic!("expected TruncationTail, got {other:?}"),
        }
        // Same point with a deep truncation is fine.
        assert!(coherent_h(q, &mu, 64).is_ok());
        // Outside a finite convergence radius the normalization fails first.
        let uniform: Vec<f64> = (0..40).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let mu = MomentMeasure::from_moments(uniform, Some(1.0)).unwrap();
        match coherent_h(Quaternion::from_real(1.2), &mu, 10) {
            Err(CsError::Measure(MeasureError::OutsideConvergence { .. })) => {}
            other => panic!("expected OutsideConvergence, got {other:?}"),
        }
    }

    #[test]
    fn gamma_canonical_examples() {
        let g0 = gamma_canonical(Quaternion::ZERO, 8);
        assert_eq!(g0.vector().coeff(0), Quaternion::ONE);
        for m in 1..=8 {
            assert_eq!(g0.vector().coeff(m), Quaternion::ZERO);
        }
        let mut rng = SplitMix64::new(11);
        for _ in 0..40 {
            let q = rng.ball(2.5);
            let g = gamma_canonical(q, 64);
            close(g.norm(), 1.0, 1e-10);
            // Direct coefficient cross-check against the closed form.
            let damp = (-q.norm_sqr() / 2.0).exp();
            let mut fact = 1.0;
            for m in 0..=6 {
                if m > 0 {
                    fact *= m as f64;
                }
                let expected = q.powu(m as u32) * (damp / fact.sqrt());
                assert!(g.vector().coeff(m).dist(&expected) <= 1e-13);
            }
        }
    }

    #[test]
    fn kernel_h_examples() {
        let mu = MomentMeasure::exponential();
        let k0 = kernel_h(Quaternion::ZERO, Quaternion::new(0.3, 1.0, -0.4, 0.2), &mu).unwrap();
        assert!(k0.dist(&Quaternion::from_real(1.0 / (4.0 * PI * PI))) <= 1e-16);
        // Diagonal at |q| = 1 equals e / 4π² ~ 0.06885.
        let q = Quaternion::new(0.5, 0.5, 0.5, 0.5);
        let k = kernel_h(q, q, &mu).unwrap();
        close(k.re(), 1f64.exp() / (4.0 * PI * PI), 1e-12);
        close(k.re(), 0.06885, 5e-5);
        assert!(k.im_norm() <= 1e-15);
    }

    #[test]
    fn kernel_hermiticity() {
        let mu = MomentMeasure::exponential();
        let mut rng = SplitMix64::new(21);
        for _ in 0..100 {
            let q1 = rng.ball(2.0);
            let q2 = rng.ball(2.0);
            let lhs = kernel_h(q1, q2, &mu).unwrap();
            let rhs = kernel_h(q2, q1, &mu).unwrap().conj();
            assert!(lhs.dist(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn overlap_matches_kernel() {
        let mu = MomentMeasure::gamma(0.25).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..30 {
            let q1 = rng.ball(1.5);
            let q2 = rng.ball(1.5);
            let e1 = coherent_h(q1, &mu, 96).unwrap();
            let e2 = coherent_h(q2, &mu, 96).unwrap();
            let n1 = mu.normalization(q1.norm()).unwrap();
            let n2 = mu.normalization(q2.norm()).unwrap();
            let lhs = e1.vector().inner(e2.vector()).unwrap()
                * (2.0 * PI * n1.sqrt())
                * (2.0 * PI * n2.sqrt());
            let rhs = kernel_h(q1, q2, &mu).unwrap() * (4.0 * PI * PI);
            assert!(lhs.dist(&rhs) <= 1e-11 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn kernel_slice_examples() {
        let mu = MomentMeasure::exponential();
        let axis = SliceAxis::from_zenith(0.8, 2.1);
        let origin = SliceCoords::new(0.0, 0.0, axis);
        let z = SliceCoords::new(0.6, -0.9, axis);
        let k0 = kernel_slice(&origin, &z, &mu).unwrap();
        assert!(k0.dist(&Quaternion::from_real(1.0 / (2.0 * PI))) <= 1e-16);
        // Slice kernel = 2π · full kernel at the composed points.
        let z2 = SliceCoords::new(-0.4, 0.7, axis);
        let ks = kernel_slice(&z, &z2, &mu).unwrap();
        let kh = kernel_h(z.compose(), z2.compose(), &mu).unwrap();
        assert!(ks.dist(&(kh * (2.0 * PI))) <= 1e-13);
        // Values stay on the slice.
        let (_, _, residual) = axis.slice_components(&ks);
        assert!(residual <= 1e-15);
        // Distinct axes are rejected.
        let other = SliceCoords::new(0.6, -0.9, SliceAxis::from_zenith(0.7, 2.1));
        match kernel_slice(&z, &other, &mu) {
            Err(CsError::AxisMismatch { distance }) => assert!(distance > 1e-3),
            other => panic!("expected AxisMismatch, got {other:?}"),
        }
    }

    #[test]
    fn kernel_reproduces_slice_functions() {
        let mu = MomentMeasure::exponential();
        let axis = SliceAxis::from_zenith(0.9, 1.3);
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(64);
        let mut rng = SplitMix64::new(17);
        // Random combination with quaternion coefficients from the left.
        let coeffs: Vec<Quaternion> = (0..=12).map(|_| rng.ball(1.0)).collect();
        let f = |z: &SliceCoords| -> Quaternion {
            let mut acc = Quaternion::ZERO;
            for (j, c) in coeffs.iter().enumerate() {
                acc += *c * eval_u(j, z, &mu).unwrap();
            }
            acc
        };
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let target = rng.slice_point(&axis, 1.5);
            let mut acc = Quaternion::ZERO;
            for (x, wx) in radial.iter() {
                let r = x.sqrt();
                for (t, wt) in theta.nodes() {
                    let node = SliceCoords::new(r * t.cos(), r * t.sin(), axis);
                    acc += f(&node) * kernel_slice(&node, &target, &mu).unwrap() * (wx * wt);
                }
            }
            worst = worst.max(acc.dist(&f(&target)));
        }
        assert!(worst <= 1e-9, "reproducing defect {worst}");
    }

    #[test]
    fn kernel_slice_idempotence() {
        let mu = MomentMeasure::exponential();
        let axis = SliceAxis::from_zenith(1.2, 0.4);
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(64);
        let z1 = SliceCoords::new(0.8, -0.3, axis);
        let z3 = SliceCoords::new(-0.2, 1.1, axis);
        let mut acc = Quaternion::ZERO;
        for (x, wx) in radial.iter() {
            let r = x.sqrt();
            for (t, wt) in theta.nodes() {
                let node = SliceCoords::new(r * t.cos(), r * t.sin(), axis);
                let left = kernel_slice(&z1, &node, &mu).unwrap();
                let right = kernel_slice(&node, &z3, &mu).unwrap();
                acc += left * right * (wx * wt);
            }
        }
        let expected = kernel_slice(&z1, &z3, &mu).unwrap();
        assert!(acc.dist(&expected) <= 1e-9, "defect {}", acc.dist(&expected));
    }

    #[test]
    fn kernel_property_report() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(32).unwrap();
        let theta = ThetaRule::new(64);
        let hemi = HemisphereRule::new(6, 12);
        let report = kernel_properties(&mu, &radial, &theta, &hemi, 20, 7).unwrap();
        assert!(report.hermiticity_defect <= 1e-12);
        assert!(report.positivity_min > 0.0);
        assert!(report.diagonal_defect <= 1e-10);
        assert!(report.gram_min_eigenvalue >= -1e-10);
        assert!(
            report.idempotence_defect <= 1e-8,
            "idempotence {}",
            report.idempotence_defect
        );
    }

    #[test]
    fn weyl_basis_images() {
        let mu = MomentMeasure::exponential();
        let f3 = FockVector::basis(10, 3, mu.clone());
        let w = weyl_transform(&f3, WeylMode::Paper, WeylDomain::Full);
        let mut rng = SplitMix64::new(31);
        for _ in 0..20 {
            let q = rng.ball(1.5);
            let value = w.eval(q).unwrap();
            let expected = q.powu(3) * (1.0 / 6f64.sqrt());
            assert!(value.dist(&expected) <= 1e-12 * (1.0 + expected.norm()));
            let phi = eval_phi(3, q, &mu).unwrap();
            assert!(value.dist(&(phi * (2.0 * PI))) <= 1e-12 * (1.0 + expected.norm()));
        }
        // Isometric mode differs by exactly 2π on the full space.
        let wi = weyl_transform(&f3, WeylMode::Isometric, WeylDomain::Full);
        let q = Quaternion::new(0.2, -0.5, 0.3, 0.9);
        let a = w.eval(q).unwrap();
        let b = wi.eval(q).unwrap();
        assert!(a.dist(&(b * (2.0 * PI))) <= 1e-14);
    }

    #[test]
    fn weyl_norm_ratios() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(20).unwrap();
        let theta = ThetaRule::new(32);
        let hemi = HemisphereRule::new(6, 12);
        let mut rng = SplitMix64::new(13);
        let coeffs: Vec<Quaternion> = (0..=8).map(|_| rng.ball(1.0)).collect();
        let f = FockVector::new(coeffs, mu.clone());

        let ratio = weyl_transform(&f, WeylMode::Paper, WeylDomain::Full)
            .norm_ratio(&radial, &theta, &hemi)
            .unwrap();
        close(ratio, 2.0 * PI, 1e-8);
        let ratio = weyl_transform(&f, WeylMode::Isometric, WeylDomain::Full)
            .norm_ratio(&radial, &theta, &hemi)
            .unwrap();
        close(ratio, 1.0, 1e-9);

        let axis = SliceAxis::from_zenith(0.5, 4.0);
        let ratio = weyl_transform(&f, WeylMode::Paper, WeylDomain::Slice(axis))
            .norm_ratio(&radial, &theta, &hemi)
            .unwrap();
        close(ratio, (2.0 * PI).sqrt(), 1e-9);
        let ratio = weyl_transform(&f, WeylMode::Isometric, WeylDomain::Slice(axis))
            .norm_ratio(&radial, &theta, &hemi)
            .unwrap();
        close(ratio, 1.0, 1e-9);
    }

    #[test]
    fn weyl_slice_domain_rejects_off_slice_points() {
        let mu = MomentMeasure::exponential();
        let f = FockVector::basis(6, 2, mu);
        let axis = SliceAxis::from_zenith(1.0, 0.3);
        let w = weyl_transform(&f, WeylMode::Paper, WeylDomain::Slice(axis));
        assert!(w.eval(axis.embed(0.4, -1.1)).is_ok());
        match w.eval(Quaternion::new(0.4, 0.0, 0.0, -1.1)) {
            Err(CsError::AxisMismatch { .. }) => {}
            other => panic!("expected AxisMismatch, got {other:?}"),
        }
    }

    #[test]
    fn resolution_of_identity() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(64);
        let hemi = HemisphereRule::new(8, 16);
        let axis = SliceAxis::from_zenith(0.6, 5.1);
        let slice = resolution_check(
            ResolutionDomain::Slice(axis),
            &mu,
            32,
            &radial,
            &theta,
            &hemi,
        )
        .unwrap();
        assert!(slice <= 1e-8, "slice resolution defect {slice}");
        let full =
            resolution_check(ResolutionDomain::Full, &mu, 32, &radial, &theta, &hemi).unwrap();
        assert!(full <= 1e-8, "full resolution defect {full}");
    }

    #[test]
    fn resolution_requires_enough_order() {
        let mu = MomentMeasure::gamma(0.5).unwrap();
        let radial = mu.radial_rule(20).unwrap(); // degree 39 < 65
        let theta = ThetaRule::new(64);
        let hemi = HemisphereRule::new(4, 8);
        match resolution_check(ResolutionDomain::Full, &mu, 32, &radial, &theta, &hemi) {
            Err(CsError::InsufficientOrder { needed, available }) => {
                assert_eq!(needed, 65);
                assert_eq!(available, 39);
            }
            other => panic!("expected InsufficientOrder, got {other:?}"),
        }
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(24); // 24 <= 32 frequencies alias
        match resolution_check(ResolutionDomain::Full, &mu, 32, &radial, &theta, &hemi) {
            Err(CsError::InsufficientOrder { needed, available }) => {
                assert_eq!(needed, 33);
                assert_eq!(available, 24);
            }
            other => panic!("expected InsufficientOrder, got {other:?}"),
        }
    }

    #[test]
    fn resolution_needs_the_normalization_weight() {
        // Negative control: dropping the N(r) factor breaks the identity
        // at order one.
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(64);
        let n = 9usize;
        let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
        let mut inv_sqrt = vec![0.0; n];
        for m in 1..n {
            inv_sqrt[m] = 1.0 / mu.x_step(m).unwrap().sqrt();
        }
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for (x, wx) in radial.iter() {
            let r = x.sqrt();
            let nhat = mu.normalization(r).unwrap();
            let c0 = 1.0 / (2.0 * PI * nhat.sqrt());
            for (t, wt) in theta.nodes() {
                let zbar = Complex64::from_polar(r, -t);
                coeff[0] = Complex64::new(c0, 0.0);
                for m in 1..n {
                    coeff[m] = coeff[m - 1] * zbar * inv_sqrt[m];
                }
                let w = wx * wt; // N(r) deliberately omitted
                for m in 0..n {
                    for k in 0..n {
                        gram[m * n + k] += coeff[m].conj() * coeff[k] * w;
                    }
                }
            }
        }
        let mut defect = 0.0f64;
        for m in 0..n {
            for k in 0..n {
                let target = if m == k { 1.0 } else { 0.0 };
                defect = defect.max((gram[m * n + k] * 2.0 * PI - target).norm());
            }
        }
        assert!(defect > 0.1, "control defect unexpectedly small: {defect}");
    }
}
