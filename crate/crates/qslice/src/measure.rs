//! Radial moment measures, generalized factorials, and Gauss rules.
//!
//! A measure here is a probability-normalized moment sequence `mu_0 = 1,
//! mu_1, mu_2, ...` on `[0, inf)`. The ratios `x_n = mu_n / mu_{n-1}` act as a
//! generalized integer sequence: `x_n! := x_1 x_2 ... x_n = mu_n` replaces `n!`
//! in every series built on top of the measure, and the entire analytic layer
//! (normalization function, basis scaling, kernels) is parameterized by it.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use std::path::Path;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Hard cap on series terms for the normalization function.
pub const SERIES_TERM_CAP: usize = 100_000;

/// Largest Hankel block size checked during moment realizability validation.
/// Bigger blocks of benign sequences (e.g. Hilbert matrices) stop being
/// numerically positive definite long before they stop being mathematically so.
const HANKEL_CHECK_MAX: usize = 9;

#[derive(Debug, Error)]
pub enum MeasureError {
    /// Moment data fails realizability (normalization, positivity, Hankel
    /// positive-definiteness) or a parameter is out of range.
    #[error("invalid moment data: {0}")]
    InvalidMoments(String),
    /// Quadrature order must be at least 1.
    #[error("quadrature order must be >= 1 (got {order})")]
    InvalidOrder { order: usize },
    /// An explicitly listed moment sequence is too short for the request.
    #[error("moment mu_{needed} unavailable (only {available} moments listed)")]
    MomentsUnavailable { needed: usize, available: usize },
    /// Evaluation outside the declared convergence radius.
    #[error("radius {r} is at or beyond the convergence radius {radius}")]
    OutsideConvergence { r: f64, radius: f64 },
    /// Series failed to converge within the term cap (or overflowed).
    #[error("series did not converge within {terms} terms")]
    NonConvergent { terms: usize },
    /// The moment-to-recurrence map lost positivity at the reported order.
    #[error("recurrence construction ill-conditioned at order {order}")]
    IllConditioned { order: usize },
    #[error("moment file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `mu_n = n!` (the classical Fock case).
    Exponential,
    /// `mu_n = Gamma(n + s + 1) / Gamma(s + 1)`, i.e. `x_n = n + s`, `s > -1`.
    Gamma { s: f64 },
    /// Moments listed explicitly, with an optional convergence radius for the
    /// normalization series (in the radial variable `r`).
    Explicit { len: usize, radius: Option<f64> },
}

struct Inner {
    kind: Kind,
    /// Moments `mu_0..`; grown lazily for the closed-form kinds, fixed for
    /// explicit ones.
    moments: Mutex<Vec<f64>>,
}

/// A radial measure presented through its moment sequence.
///
/// Cheap to clone (shared interior); equality compares the defining data, not
/// the cache state.
#[derive(Clone)]
pub struct MomentMeasure {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for MomentMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MomentMeasure").field("kind", &self.inner.kind).finish()
    }
}

impl PartialEq for MomentMeasure {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        match (&self.inner.kind, &other.inner.kind) {
            (Kind::Exponential, Kind::Exponential) => true,
            (Kind::Gamma { s: a }, Kind::Gamma { s: b }) => a == b,
            (Kind::Explicit { len: la, radius: ra }, Kind::Explicit { len: lb, radius: rb }) => {
                la == lb
                    && ra == rb
                    && *self.inner.moments.lock().unwrap() == *other.inner.moments.lock().unwrap()
            }
            _ => false,
        }
    }
}

impl MomentMeasure {
    /// The factorial measure: `x_n = n`, `mu_n = n!`.
    pub fn exponential() -> MomentMeasure {
        MomentMeasure {
            inner: Arc::new(Inner {
                kind: Kind::Exponential,
                moments: Mutex::new(vec![1.0]),
            }),
        }
    }

    /// Shifted-factorial measure with `x_n = n + s`; requires `s > -1` so all
    /// steps stay positive.
    pub fn gamma(s: f64) -> Result<MomentMeasure, MeasureError> {
        if !s.is_finite() || s <= -1.0 {
            return Err(MeasureError::InvalidMoments(format!(
                "gamma shape must be finite and > -1 (got {s})"
            )));
        }
        Ok(MomentMeasure {
            inner: Arc::new(Inner {
                kind: Kind::Gamma { s },
                moments: Mutex::new(vec![1.0]),
            }),
        })
    }

    /// Measure from an explicit moment list `mu_0, mu_1, ...`.
    ///
    /// Validates `mu_0 = 1`, positivity, and positive-definiteness of the
    /// leading Hankel blocks `(mu_{i+j})` and shifted blocks `(mu_{i+j+1})`
    /// (realizability by a measure on `[0, inf)`), up to a conditioning-bounded
    /// block size.
    pub fn from_moments(
        moments: Vec<f64>,
        radius: Option<f64>,
    ) -> Result<MomentMeasure, MeasureError> {
        if moments.is_empty() {
            return Err(MeasureError::InvalidMoments("empty moment list".into()));
        }
        if (moments[0] - 1.0).abs() > 1e-12 {
            return Err(MeasureError::InvalidMoments(format!(
                "mu_0 must equal 1 (got {})",
                moments[0]
            )));
        }
        for (n, &m) in moments.iter().enumerate() {
            if !m.is_finite() || m <= 0.0 {
                return Err(MeasureError::InvalidMoments(format!("mu_{n} = {m} not positive")));
            }
        }
        if let Some(l) = radius {
            if !l.is_finite() || l <= 0.0 {
                return Err(MeasureError::InvalidMoments(format!(
                    "convergence radius must be positive (got {l})"
                )));
            }
        }
        let hankel = |shift: usize, size: usize| {
            DMatrix::from_fn(size, size, |i, j| moments[i + j + shift])
        };
        let size = ((moments.len() + 1) / 2).min(HANKEL_CHECK_MAX);
        if size >= 2 && Cholesky::new(hankel(0, size)).is_none() {
            return Err(MeasureError::InvalidMoments(format!(
                "Hankel block of size {size} is not positive definite"
            )));
        }
        let size = (moments.len() / 2).min(HANKEL_CHECK_MAX);
        if size >= 2 && Cholesky::new(hankel(1, size)).is_none() {
            return Err(MeasureError::InvalidMoments(format!(
                "shifted Hankel block of size {size} is not positive definite \
                 (moments not realizable on [0, inf))"
            )));
        }
        Ok(MomentMeasure {
            inner: Arc::new(Inner {
                kind: Kind::Explicit { len: moments.len(), radius },
                moments: Mutex::new(moments),
            }),
        })
    }

    /// Load an explicit moment list from a text file: one moment per line,
    /// blank lines and `#` comments ignored, no declared convergence radius.
    pub fn from_moments_file(path: impl AsRef<Path>) -> Result<MomentMeasure, MeasureError> {
        let text = std::fs::read_to_string(path)?;
        let mut moments = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line.parse().map_err(|e| {
                MeasureError::InvalidMoments(format!("line {}: {e}", idx + 1))
            })?;
            moments.push(value);
        }
        MomentMeasure::from_moments(moments, None)
    }

    /// Moment `mu_n`. For the closed-form kinds this is computed on demand and
    /// cached; note that factorial-type moments overflow `f64` near `n = 170`,
    /// so series code uses the step ratios [`Self::x_step`] instead.
    pub fn moment(&self, n: usize) -> Result<f64, MeasureError> {
        let mut cache = self.inner.moments.lock().unwrap();
        if n < cache.len() {
            return Ok(cache[n]);
        }
        match self.inner.kind {
            Kind::Explicit { len, .. } => {
                Err(MeasureError::MomentsUnavailable { needed: n, available: len })
            }
            Kind::Exponential | Kind::Gamma { .. } => {
                while cache.len() <= n {
                    let k = cache.len();
                    let step = self.step_closed_form(k);
                    let next = cache[k - 1] * step;
                    cache.push(next);
                }
                Ok(cache[n])
            }
        }
    }

    /// Generalized factorial `x_n! = x_1 x_2 ... x_n = mu_n` (and `x_0! = 1`).
    pub fn x_factorial(&self, n: usize) -> Result<f64, MeasureError> {
        self.moment(n)
    }

    /// Step `x_n = mu_n / mu_{n-1}` for `n >= 1`; closed-form where available.
    pub fn x_step(&self, n: usize) -> Result<f64, MeasureError> {
        assert!(n >= 1, "x_step is defined for n >= 1");
        match self.inner.kind {
            Kind::Exponential | Kind::Gamma { .. } => Ok(self.step_closed_form(n)),
            Kind::Explicit { .. } => Ok(self.moment(n)? / self.moment(n - 1)?),
        }
    }

    fn step_closed_form(&self, n: usize) -> f64 {
        match self.inner.kind {
            Kind::Exponential => n as f64,
            Kind::Gamma { s } => n as f64 + s,
            Kind::Explicit { .. } => unreachable!("explicit kinds have no closed form"),
        }
    }

    /// Declared convergence radius of the normalization series in `r`
    /// (`None` means entire).
    pub fn convergence_radius(&self) -> Option<f64> {
        match self.inner.kind {
            Kind::Explicit { radius, .. } => radius,
            _ => None,
        }
    }

    /// Number of explicitly listed moments, if this is an explicit kind.
    pub fn listed_moments(&self) -> Option<usize> {
        match self.inner.kind {
            Kind::Explicit { len, .. } => Some(len),
            _ => None,
        }
    }

    /// Normalization function `N(r) = sum_n r^{2n} / x_n!`.
    ///
    /// Terms are accumulated through the step recurrence, stopping once the
    /// running term drops below `1e-17` of the partial sum while decreasing.
    pub fn normalization(&self, r: f64) -> Result<f64, MeasureError> {
        if let Some(l) = self.convergence_radius() {
            if r >= l {
                return Err(MeasureError::OutsideConvergence { r, radius: l });
            }
        }
        let r2 = r * r;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        if r2 == 0.0 {
            return Ok(sum);
        }
        for n in 1..=SERIES_TERM_CAP {
            let prev = term;
            term *= r2 / self.x_step(n)?;
            sum += term;
            if !sum.is_finite() {
                return Err(MeasureError::NonConvergent { terms: n });
            }
            if term < prev && term <= 1e-17 * sum {
                return Ok(sum);
            }
        }
        Err(MeasureError::NonConvergent { terms: SERIES_TERM_CAP })
    }

    /// Partial sum of `1 / sqrt(x_n)` over `n = 1..=terms` (clipped to the
    /// listed moments for explicit kinds). A large value suggests the classical
    /// determinacy condition (divergence of the full series) holds; this is a
    /// heuristic diagnostic only, never an error.
    pub fn carleman_sum(&self, terms: usize) -> f64 {
        let mut sum = 0.0;
        for n in 1..=terms {
            match self.x_step(n) {
                Ok(x) => sum += 1.0 / x.sqrt(),
                Err(_) => break,
            }
        }
        sum
    }

    /// Gauss rule with the given number of nodes for this measure.
    ///
    /// The three-term recurrence comes from the closed form where one exists
    /// and from the moment table (Chebyshev algorithm) otherwise; nodes are
    /// Jacobi-matrix eigenvalues and weights come from the Christoffel
    /// function, which keeps tiny weights relatively accurate.
    pub fn radial_rule(&self, order: usize) -> Result<RadialRule, MeasureError> {
        if order == 0 {
            return Err(MeasureError::InvalidOrder { order });
        }
        let (a, b) = match self.inner.kind {
            Kind::Exponential => laguerre_recurrence(order, 0.0),
            Kind::Gamma { s } => laguerre_recurrence(order, s),
            Kind::Explicit { len, .. } => {
                if len < 2 * order {
                    return Err(MeasureError::MomentsUnavailable {
                        needed: 2 * order - 1,
                        available: len,
                    });
                }
                let moments = self.inner.moments.lock().unwrap();
                chebyshev_recurrence(&moments, order)?
            }
        };
        let (nodes, weights) = gauss_from_recurrence(&a, &b);
        Ok(RadialRule { nodes, weights, exact_degree: 2 * order - 1 })
    }
}

/// A Gauss rule: `integral p dmu ~= sum_i w_i p(x_i)`, exact for polynomials
/// of degree `<= exact_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exact_degree: usize,
}

impl RadialRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    /// Node/weight pairs in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Apply the rule to a scalar integrand.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Monic recurrence for the weight `x^s e^{-x}` normalized to `mu_0 = 1`:
/// `a_k = 2k + s + 1`, `b_k = k (k + s)` (with `b_0 = mu_0`).
fn laguerre_recurrence(order: usize, s: f64) -> (Vec<f64>, Vec<f64>) {
    let a = (0..order).map(|k| 2.0 * k as f64 + s + 1.0).collect();
    let b = (0..order)
        .map(|k| if k == 0 { 1.0 } else { k as f64 * (k as f64 + s) })
        .collect();
    (a, b)
}

/// Chebyshev algorithm: monic recurrence coefficients `a_0..a_{order-1}`,
/// `b_0..b_{order-1}` from raw moments `mu_0..mu_{2 order - 1}`. Fails with
/// [`MeasureError::IllConditioned`] at the first order where positivity of
/// `b_k` is lost to cancellation.
fn chebyshev_recurrence(moments: &[f64], order: usize) -> Result<(Vec<f64>, Vec<f64>), MeasureError> {
    let m = 2 * order;
    let mut a = vec![0.0; order];
    let mut b = vec![0.0; order];
    a[0] = moments[1] / moments[0];
    b[0] = moments[0];
    let mut sig_prev = vec![0.0; m];
    let mut sig: Vec<f64> = moments[..m].to_vec();
    for k in 1..order {
        let mut next = vec![0.0; m];
        for l in k..(m - k) {
            next[l] = sig[l + 1] - a[k - 1] * sig[l] - b[k - 1] * sig_prev[l];
        }
        a[k] = next[k + 1] / next[k] - sig[k] / sig[k - 1];
        b[k] = next[k] / sig[k - 1];
        if !b[k].is_finite() || b[k] <= 0.0 || !a[k].is_finite() {
            return Err(MeasureError::IllConditioned { order: k });
        }
        sig_prev = sig;
        sig = next;
    }
    Ok((a, b))
}

/// Gauss nodes and weights from a monic three-term recurrence (`b[0] = mu_0`).
///
/// Nodes are the eigenvalues of the symmetric Jacobi matrix; each weight is the
/// Christoffel function `w_i = 1 / sum_k p_k(x_i)^2` evaluated through the
/// orthonormal recurrence.
pub(crate) fn gauss_from_recurrence(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            a[i]
        } else if j == i + 1 || i == j + 1 {
            b[i.max(j)].sqrt()
        } else {
            0.0
        }
    });
    let eigen = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mu0 = b[0];
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = 0.0;
            let mut p = 1.0 / mu0.sqrt();
            let mut sum_sq = p * p;
            for k in 0..n - 1 {
                let p_next = ((x - a[k]) * p - b[k].sqrt() * p_prev) / b[k + 1].sqrt();
                p_prev = p;
                p = p_next;
                sum_sq += p * p;
            }
            1.0 / sum_sq
        })
        .collect();
    (nodes, weights)
}
