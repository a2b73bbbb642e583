//! Discretized measurable fields of slice Hilbert spaces.
//!
//! A field assigns to each sampled slice axis a member vector in that
//! slice's truncated space, expressed against the unit-normalized slice
//! basis. The direct-integral inner product is the weighted sum of the
//! per-axis inner products over the sampling. Everything here reduces to
//! axis-constant integrands, so weighted hemisphere sampling stands in for
//! the measure-theoretic construction exactly.

use std::f64::consts::PI;

use thiserror::Error;

use crate::fock::{FockError, FockVector};
use crate::integrate::{integrate_slice, HemisphereRule, ThetaRule};
use crate::measure::{MeasureError, MomentMeasure, RadialRule};
use crate::operators::{displacement, OpError, SliceOperator};
use crate::quat::{unit_imag_paired, Quaternion, SliceAxis, SliceCoords};
use crate::sampler::SplitMix64;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("fields are built on different slice samplings")]
    SamplingMismatch,
    #[error("{members} members cannot cover {axes} sampled axes")]
    MemberMismatch { members: usize, axes: usize },
    #[error("member at axis {index} has non-finite norm")]
    NonSquareIntegrable { index: usize },
    #[error("rules resolve degree {available}, but the integrand needs {needed}")]
    InsufficientOrder { needed: usize, available: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Operator(#[from] OpError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// One sampled slice: the canonical axis, the hemisphere node it came
/// from, and its quadrature weight.
#[derive(Debug, Clone, Copy)]
pub struct SliceSample {
    pub axis: SliceAxis,
    pub theta1: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Weighted family of sampled slice axes.
#[derive(Debug, Clone)]
pub struct SliceSampling {
    samples: Vec<SliceSample>,
}

/// Sample the slice family at the nodes of a hemisphere rule, keeping the
/// rule's weights.
pub fn sample_slices(rule: &HemisphereRule) -> SliceSampling {
    let samples = rule
        .nodes()
        .iter()
        .map(|n| SliceSample {
            axis: SliceAxis::from_zenith(n.theta1, n.phi),
            theta1: n.theta1,
            phi: n.phi,
            weight: n.weight,
        })
        .collect();
    SliceSampling { samples }
}

impl SliceSampling {
    pub fn samples(&self) -> &[SliceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total sampling weight; the angular mass `2π` of the axis family.
    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    /// Norm of the weighted first moment of the sampled directions under
    /// the orientation-paired map (the map that spreads hemisphere nodes
    /// over the whole sphere); zero for a balanced sampling.
    pub fn orientation_balance(&self) -> f64 {
        let mut acc = Quaternion::ZERO;
        for s in &self.samples {
            acc += unit_imag_paired(s.theta1, s.phi) * s.weight;
        }
        acc.norm()
    }

    fn matches(&self, other: &SliceSampling) -> bool {
        self.len() == other.len()
            && self
                .samples
                .iter()
                .zip(other.samples.iter())
                .all(|(a, b)| a.axis.dist(&b.axis) == 0.0 && a.weight == b.weight)
    }
}

/// A measurable field discretized over a slice sampling: one member
/// vector per sampled axis, all sharing one moment measure. Member
/// coefficients are against the unit-normalized slice basis.
#[derive(Debug, Clone)]
pub struct HilbertField {
    members: Vec<FockVector>,
    sampling: SliceSampling,
}

impl HilbertField {
    pub fn new(members: Vec<FockVector>, sampling: SliceSampling) -> Result<HilbertField, FieldError> {
        if members.len() != sampling.len() {
            return Err(FieldError::MemberMismatch {
                members: members.len(),
                axes: sampling.len(),
            });
        }
        for (index, m) in members.iter().enumerate() {
            if !m.is_finite() || !m.norm_sqr().is_finite() {
                return Err(FieldError::NonSquareIntegrable { index });
            }
        }
        Ok(HilbertField { members, sampling })
    }

    pub fn member(&self, k: usize) -> &FockVector {
        &self.members[k]
    }

    pub fn sampling(&self) -> &SliceSampling {
        &self.sampling
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Restrict a coefficient vector to every sampled slice. The member at
/// each axis carries the same coefficients `α_m / √(2π)`, which is what
/// restriction produces on any slice.
pub fn field_from_vector(h: &FockVector, s: &SliceSampling) -> Result<HilbertField, FieldError> {
    let scale = 1.0 / (2.0 * PI).sqrt();
    let coeffs: Vec<Quaternion> = h.coeffs().iter().map(|a| *a * scale).collect();
    let member = FockVector::new(coeffs, h.measure().clone());
    HilbertField::new(vec![member; s.len()], s.clone())
}

/// Invert [`field_from_vector`] from the member at axis `k`.
pub fn reconstruct(field: &HilbertField, k: usize) -> FockVector {
    let scale = (2.0 * PI).sqrt();
    let coeffs: Vec<Quaternion> = field.member(k).coeffs().iter().map(|a| *a * scale).collect();
    FockVector::new(coeffs, field.member(k).measure().clone())
}

/// Direct-integral inner product `Σ_k w_k ⟨a_k|b_k⟩`.
pub fn field_inner(a: &HilbertField, b: &HilbertField) -> Result<Quaternion, FieldError> {
    if !a.sampling.matches(&b.sampling) {
        return Err(FieldError::SamplingMismatch);
    }
    let mut acc = Quaternion::ZERO;
    for (k, s) in a.sampling.samples().iter().enumerate() {
        acc += a.member(k).inner(b.member(k))? * s.weight;
    }
    Ok(acc)
}

/// Direct-integral squared norm `Σ_k w_k ‖a_k‖²`.
pub fn field_norm_sqr(a: &HilbertField) -> f64 {
    a.sampling
        .samples()
        .iter()
        .enumerate()
        .map(|(k, s)| s.weight * a.member(k).norm_sqr())
        .sum()
}

/// Mean and spread of per-axis member inner products.
#[derive(Debug, Clone, Copy)]
pub struct AxisStats {
    pub mean: Quaternion,
    pub stdev: f64,
}

/// Evaluate a member as a slice function, `Σ_m c_m z^m / √(2π x_m!)`,
/// at an on-slice quaternion point.
fn eval_member(
    coeffs: &[Quaternion],
    q: Quaternion,
    measure: &MomentMeasure,
) -> Result<Quaternion, MeasureError> {
    let mut power = Quaternion::ONE;
    let mut scale = 1.0 / (2.0 * PI).sqrt();
    let mut acc = Quaternion::ZERO;
    for (m, c) in coeffs.iter().enumerate() {
        if m > 0 {
            power = power * q;
            scale /= measure.x_step(m)?.sqrt();
        }
        acc += *c * power * scale;
    }
    Ok(acc)
}

/// Per-axis inner products `⟨a_k|b_k⟩` computed honestly — each member is
/// evaluated as a function on its slice and integrated against the radial
/// and circle rules — with the mean and standard deviation across axes.
pub fn member_inner_stats(
    a: &HilbertField,
    b: &HilbertField,
    radial: &RadialRule,
    theta: &ThetaRule,
) -> Result<AxisStats, FieldError> {
    if !a.sampling.matches(&b.sampling) {
        return Err(FieldError::SamplingMismatch);
    }
    let top = |f: &HilbertField| f.members.iter().map(|m| m.n_max()).max().unwrap_or(0);
    let degree = top(a) + top(b);
    if radial.exact_degree() < degree {
        return Err(FieldError::InsufficientOrder {
            needed: degree,
            available: radial.exact_degree(),
        });
    }
    let harmonic = top(a).max(top(b));
    if theta.order() <= harmonic {
        return Err(FieldError::InsufficientOrder {
            needed: harmonic + 1,
            available: theta.order(),
        });
    }
    // Prevalidate the shared measure so the quadrature closures stay
    // infallible.
    let measure = a.member(0).measure().clone();
    for m in 1..=harmonic {
        measure.x_step(m)?;
    }
    let count = a.len();
    let mut values = Vec::with_capacity(count);
    let mut mean = Quaternion::ZERO;
    for (k, s) in a.sampling.samples().iter().enumerate() {
        let fa = a.member(k).coeffs();
        let fb = b.member(k).coeffs();
        let value = integrate_slice(radial, theta, &s.axis, |q| {
            let va = eval_member(fa, q, &measure).expect("steps prevalidated");
            let vb = eval_member(fb, q, &measure).expect("steps prevalidated");
            va * vb.conj()
        });
        mean += value * (1.0 / count as f64);
        values.push(value);
    }
    let variance = values
        .iter()
        .map(|v| (*v - mean).norm_sqr())
        .sum::<f64>()
        / count as f64;
    Ok(AxisStats {
        mean,
        stdev: variance.sqrt(),
    })
}

/// Constancy statistics of `𝔫 ↦ ⟨Ψ_m(𝔫)|Ψ_j(𝔫)⟩` for the fundamental
/// fields Ψ: mean should be `δ_{mj}`, deviation across axes zero.
pub fn constancy_check(
    m: usize,
    j: usize,
    s: &SliceSampling,
    measure: &MomentMeasure,
    radial: &RadialRule,
    theta: &ThetaRule,
) -> Result<AxisStats, FieldError> {
    let n_max = m.max(j);
    let scale = (2.0 * PI).sqrt();
    let fundamental = |idx: usize| {
        let h = FockVector::basis(n_max, idx, measure.clone()).scale_left(Quaternion::from_real(scale));
        field_from_vector(&h, s)
    };
    let psi_m = fundamental(m)?;
    let psi_j = fundamental(j)?;
    member_inner_stats(&psi_m, &psi_j, radial, theta)
}

/// Ratio of the direct-integral inner product to the ambient one across
/// random vector pairs.
#[derive(Debug, Clone, Copy)]
pub struct ScaleReport {
    /// Mean measured scale constant.
    pub scale: f64,
    /// Max relative deviation of the per-pair ratios from the mean.
    pub relative_spread: f64,
}

/// Measure the restriction-scale constant: build fields from random
/// vector pairs and compare `⟨field(h)|field(g)⟩` with `⟨h|g⟩`.
pub fn restriction_scale(
    s: &SliceSampling,
    measure: &MomentMeasure,
    n_max: usize,
    pairs: usize,
    seed: u64,
) -> Result<ScaleReport, FieldError> {
    assert!(pairs >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut ratios = Vec::with_capacity(pairs);
    while ratios.len() < pairs {
        let draw = |rng: &mut SplitMix64| {
            let coeffs: Vec<Quaternion> = (0..=n_max).map(|_| rng.ball(1.0)).collect();
            FockVector::new(coeffs, measure.clone())
        };
        let h = draw(&mut rng);
        let g = draw(&mut rng);
        let ambient = h.inner(&g)?;
        if ambient.norm() < 1e-6 {
            continue;
        }
        let fh = field_from_vector(&h, s)?;
        let fg = field_from_vector(&g, s)?;
        let direct = field_inner(&fh, &fg)?;
        let inverse = ambient.inverse().expect("norm checked above");
        ratios.push(direct * inverse);
    }
    let mut mean = Quaternion::ZERO;
    for r in &ratios {
        mean += *r * (1.0 / ratios.len() as f64);
    }
    let spread = ratios
        .iter()
        .map(|r| (*r - mean).norm())
        .fold(0.0f64, f64::max);
    Ok(ScaleReport {
        scale: mean.re(),
        relative_spread: spread / mean.norm(),
    })
}

/// Block-diagonal operator over a slice sampling: one displacement block
/// per sampled axis, acting member-by-member with no cross-axis coupling.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    blocks: Vec<SliceOperator>,
    sampling: SliceSampling,
}

/// The reducible operator with polar label `(r, ϑ)`: the block at axis
/// `𝔫_k` is the displacement by `r·e^{𝔫_k ϑ}` on that slice.
pub fn decomposable_operator(
    r: f64,
    theta: f64,
    s: &SliceSampling,
    n_max: usize,
) -> BlockOperator {
    let (x, y) = (r * theta.cos(), r * theta.sin());
    let blocks = s
        .samples()
        .iter()
        .map(|sample| displacement(&SliceCoords::new(x, y, sample.axis), n_max))
        .collect();
    BlockOperator {
        blocks,
        sampling: s.clone(),
    }
}

impl BlockOperator {
    pub fn blocks(&self) -> &[SliceOperator] {
        &self.blocks
    }

    pub fn sampling(&self) -> &SliceSampling {
        &self.sampling
    }

    /// Apply blockwise: member `k` goes through block `k` only.
    pub fn apply(&self, f: &HilbertField) -> Result<HilbertField, FieldError> {
        if !self.sampling.matches(f.sampling()) {
            return Err(FieldError::SamplingMismatch);
        }
        let mut members = Vec::with_capacity(f.len());
        for (k, block) in self.blocks.iter().enumerate() {
            members.push(block.apply(f.member(k))?);
        }
        HilbertField::new(members, f.sampling().clone())
    }

    /// Worst per-block unitarity defect over the leading `limit` block.
    pub fn block_unitarity_defect(&self, limit: usize) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.unitarity_defect(limit))
            .fold(0.0f64, f64::max)
    }
}
