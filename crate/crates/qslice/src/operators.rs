//! Truncated ladder and displacement operators on slices.
//!
//! Operators act on coefficient vectors by `(Af)_i = Σ_j f_j · A_{ij}`:
//! coefficients pass through from the left, so `A(q·f) = q·A(f)` for every
//! quaternion `q`, and scalar factors attached to an operator act on the
//! entry side. Every stored matrix is confined to a single slice (or is
//! real), which keeps entry algebra commutative, makes the conjugate
//! transpose an adjoint, and lets the matrix exponential run in an exact
//! complexified picture.

use num_complex::Complex64;
use thiserror::Error;

use crate::coherent::{gamma_canonical, CoherentState, AXIS_MATCH_TOL};
use crate::fock::{FockError, FockVector};
use crate::quat::{Quaternion, SliceAxis, SliceCoords};

/// Matrix-exponential scaling threshold: the Taylor order below is accurate
/// to ~2e-14 for 1-norms at or under this value.
const EXPM_THETA: f64 = 0.5;
const EXPM_TAYLOR_ORDER: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum OpError {
    #[error("operator dimensions differ: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },
    #[error("operators live on different slices (axis distance {distance:.3e})")]
    AxisMismatch { distance: f64 },
    #[error("vector length {vector} does not match operator dimension {dim}")]
    VectorMismatch { vector: usize, dim: usize },
}

/// Dense complex matrix, row-major. Internal to the complexified-slice
/// exponential path.
#[derive(Debug, Clone)]
pub(crate) struct CMat {
    n: usize,
    d: Vec<Complex64>,
}

impl CMat {
    pub(crate) fn zeros(n: usize) -> CMat {
        CMat {
            n,
            d: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub(crate) fn eye(n: usize) -> CMat {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> Complex64 {
        self.d[i * self.n + j]
    }

    pub(crate) fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.d[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.d[k * n..(k + 1) * n];
                let acc = &mut out.d[i * n..(i + 1) * n];
                for j in 0..n {
                    acc[j] += a * row[j];
                }
            }
        }
        out
    }

    pub(crate) fn scale(&mut self, c: Complex64) {
        for v in &mut self.d {
            *v *= c;
        }
    }

    /// Max entrywise distance to `other` over the leading `limit` block.
    pub(crate) fn max_abs_diff_block(&self, other: &CMat, limit: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..limit.min(self.n) {
            for j in 0..limit.min(self.n) {
                worst = worst.max((self.at(i, j) - other.at(i, j)).norm());
            }
        }
        worst
    }
}

/// `Y = T·X` where `T` is tridiagonal with the given bands
/// (`sub[i] = T[i+1][i]`, `sup[i] = T[i][i+1]`).
fn tridiag_mul(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], x: &CMat) -> CMat {
    let n = x.n;
    let mut y = CMat::zeros(n);
    for i in 0..n {
        let yi = &mut y.d[i * n..(i + 1) * n];
        let c = diag[i];
        let xi = &x.d[i * n..(i + 1) * n];
        for j in 0..n {
            yi[j] = c * xi[j];
        }
        if i > 0 {
            let c = sub[i - 1];
            if c.re != 0.0 || c.im != 0.0 {
                let xm = &x.d[(i - 1) * n..i * n];
                for j in 0..n {
                    yi[j] += c * xm[j];
                }
            }
        }
        if i + 1 < n {
            let c = sup[i];
            if c.re != 0.0 || c.im != 0.0 {
                let xp = &x.d[(i + 1) * n..(i + 2) * n];
                for j in 0..n {
                    yi[j] += c * xp[j];
                }
            }
        }
    }
    y
}

/// Matrix exponential of a tridiagonal complex matrix by scaling and
/// squaring: scale the 1-norm under `EXPM_THETA`, run a Horner-evaluated
/// Taylor polynomial of order 12 (remainder ~2e-14 at that norm), then
/// square back.
pub(crate) fn expm_tridiagonal(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
) -> CMat {
    let n = diag.len();
    assert!(n >= 1, "empty matrix");
    assert_eq!(sub.len(), n - 1);
    assert_eq!(sup.len(), n - 1);
    let mut norm = 0.0f64;
    for j in 0..n {
        let mut col = diag[j].norm();
        if j < n - 1 {
            col += sub[j].norm();
        }
        if j > 0 {
            col += sup[j - 1].norm();
        }
        norm = norm.max(col);
    }
    let s = if norm > EXPM_THETA {
        ((norm / EXPM_THETA).log2().ceil() as u32).min(64)
    } else {
        0
    };
    let h = 0.5f64.powi(s as i32);
    let hsub: Vec<Complex64> = sub.iter().map(|&c| c * h).collect();
    let hdiag: Vec<Complex64> = diag.iter().map(|&c| c * h).collect();
    let hsup: Vec<Complex64> = sup.iter().map(|&c| c * h).collect();
    // Horner: T <- I + (B T)/k for k = order..1 starting from T = I.
    let mut t = CMat::eye(n);
    for k in (1..=EXPM_TAYLOR_ORDER).rev() {
        let bt = tridiag_mul(&hsub, &hdiag, &hsup, &t);
        let inv = 1.0 / k as f64;
        t = CMat::eye(n);
        for (ti, bi) in t.d.iter_mut().zip(bt.d.iter()) {
            *ti += bi * inv;
        }
    }
    for _ in 0..s {
        t = t.matmul(&t);
    }
    t
}

/// Axis tag of an operator: real matrices compose with anything, slice
/// matrices only with matrices on the same slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorAxis {
    Real,
    Slice(SliceAxis),
}

impl OperatorAxis {
    fn join(self, other: OperatorAxis) -> Result<OperatorAxis, OpError> {
        match (self, other) {
            (OperatorAxis::Real, x) | (x, OperatorAxis::Real) => Ok(x),
            (OperatorAxis::Slice(a), OperatorAxis::Slice(b)) => {
                let distance = a.dist(&b);
                if distance <= AXIS_MATCH_TOL {
                    Ok(OperatorAxis::Slice(a))
                } else {
                    Err(OpError::AxisMismatch { distance })
                }
            }
        }
    }
}

/// Quaternion matrix whose entries are confined to one slice (or real).
#[derive(Debug, Clone)]
pub struct SliceOperator {
    dim: usize,
    axis: OperatorAxis,
    entries: Vec<Quaternion>,
}

impl SliceOperator {
    pub fn identity(dim: usize) -> SliceOperator {
        let mut op = SliceOperator::zeros(dim, OperatorAxis::Real);
        for i in 0..dim {
            op.entries[i * dim + i] = Quaternion::ONE;
        }
        op
    }

    fn zeros(dim: usize, axis: OperatorAxis) -> SliceOperator {
        assert!(dim >= 1, "empty operator");
        SliceOperator {
            dim,
            axis,
            entries: vec![Quaternion::ZERO; dim * dim],
        }
    }

    /// Real matrix from an entry function.
    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> SliceOperator {
        let mut op = SliceOperator::zeros(dim, OperatorAxis::Real);
        for i in 0..dim {
            for j in 0..dim {
                op.entries[i * dim + j] = Quaternion::from_real(f(i, j));
            }
        }
        op
    }

    /// Embed a complexified-slice matrix. With `OperatorAxis::Real` the
    /// imaginary parts must vanish (exactly; real inputs stay real through
    /// complex arithmetic).
    pub(crate) fn from_complex(m: &CMat, axis: OperatorAxis) -> SliceOperator {
        let mut op = SliceOperator::zeros(m.n, axis);
        for i in 0..m.n {
            for j in 0..m.n {
                let v = m.at(i, j);
                op.entries[i * m.n + j] = match axis {
                    OperatorAxis::Real => {
                        debug_assert_eq!(v.im, 0.0, "real-tagged entry has imaginary part");
                        Quaternion::from_real(v.re)
                    }
                    OperatorAxis::Slice(ax) => ax.embed(v.re, v.im),
                };
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axis(&self) -> OperatorAxis {
        self.axis
    }

    pub fn entry(&self, i: usize, j: usize) -> Quaternion {
        self.entries[i * self.dim + j]
    }

    /// Apply to a coefficient vector: `(Af)_i = Σ_j f_j · A_{ij}`.
    pub fn apply(&self, f: &FockVector) -> Result<FockVector, OpError> {
        if f.len() != self.dim {
            return Err(OpError::VectorMismatch {
                vector: f.len(),
                dim: self.dim,
            });
        }
        let mut out = vec![Quaternion::ZERO; self.dim];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Quaternion::ZERO;
            for j in 0..self.dim {
                let e = self.entry(i, j);
                if e != Quaternion::ZERO {
                    acc += f.coeff(j) * e;
                }
            }
            *slot = acc;
        }
        Ok(FockVector::new(out, f.measure().clone()))
    }

    /// Conjugate transpose. An adjoint in the usual sense because entries
    /// stay within one commutative slice.
    pub fn adjoint(&self) -> SliceOperator {
        let mut op = SliceOperator::zeros(self.dim, self.axis);
        for i in 0..self.dim {
            for j in 0..self.dim {
                op.entries[i * self.dim + j] = self.entry(j, i).conj();
            }
        }
        op
    }

    /// Composition: the returned operator sends `f` to `self(rhs(f))`.
    /// Entry products are formed as `rhs-entry · self-entry`, which is the
    /// order the action formula induces; on a common slice this is plain
    /// matrix multiplication.
    pub fn mul(&self, rhs: &SliceOperator) -> Result<SliceOperator, OpError> {
        if self.dim != rhs.dim {
            return Err(OpError::ShapeMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let axis = self.axis.join(rhs.axis)?;
        let n = self.dim;
        let mut out = SliceOperator::zeros(n, axis);
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.entry(k, j);
                    if b != Quaternion::ZERO {
                        out.entries[i * n + j] += b * a;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &SliceOperator) -> Result<SliceOperator, OpError> {
        self.combine(rhs, 1.0)
    }

    pub fn sub(&self, rhs: &SliceOperator) -> Result<SliceOperator, OpError> {
        self.combine(rhs, -1.0)
    }

    fn combine(&self, rhs: &SliceOperator, sign: f64) -> Result<SliceOperator, OpError> {
        if self.dim != rhs.dim {
            return Err(OpError::ShapeMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let axis = self.axis.join(rhs.axis)?;
        let mut out = SliceOperator::zeros(self.dim, axis);
        for (o, (a, b)) in out
            .entries
            .iter_mut()
            .zip(self.entries.iter().zip(rhs.entries.iter()))
        {
            *o = *a + *b * sign;
        }
        Ok(out)
    }

    /// Scale all entries by a real constant.
    pub fn scale(&self, c: f64) -> SliceOperator {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = *e * c;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, e| m.max(e.norm()))
    }

    /// Max entry norm over the leading `limit`-square block.
    pub fn interior_max_abs(&self, limit: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..limit.min(self.dim) {
            for j in 0..limit.min(self.dim) {
                worst = worst.max(self.entry(i, j).norm());
            }
        }
        worst
    }

    /// `max |(A A† − I)_{ij}|` over the leading `limit` block.
    pub fn unitarity_defect(&self, limit: usize) -> f64 {
        let p = self
            .mul(&self.adjoint())
            .expect("an operator always composes with its own adjoint");
        let mut worst = 0.0f64;
        for i in 0..limit.min(self.dim) {
            for j in 0..limit.min(self.dim) {
                let target = if i == j {
                    Quaternion::ONE
                } else {
                    Quaternion::ZERO
                };
                worst = worst.max(p.entry(i, j).dist(&target));
            }
        }
        worst
    }
}

/// Lowering, raising, and number operators truncated at `n_max`:
/// `a e_m = √m e_{m-1}`, `a† e_m = √(m+1) e_{m+1}` (top row cut),
/// `N = a†a = diag(0..n_max)`.
pub fn ladder(n_max: usize) -> (SliceOperator, SliceOperator, SliceOperator) {
    assert!(n_max >= 1, "need at least two levels");
    let n = n_max + 1;
    let mut a = SliceOperator::zeros(n, OperatorAxis::Real);
    let mut adag = SliceOperator::zeros(n, OperatorAxis::Real);
    let mut num = SliceOperator::zeros(n, OperatorAxis::Real);
    for m in 0..n_max {
        let s = ((m + 1) as f64).sqrt();
        a.entries[m * n + (m + 1)] = Quaternion::from_real(s);
        adag.entries[(m + 1) * n + m] = Quaternion::from_real(s);
    }
    for m in 0..n {
        num.entries[m * n + m] = Quaternion::from_real(m as f64);
    }
    (a, adag, num)
}

/// Commutation-relation defects of the truncated ladder algebra.
#[derive(Debug, Clone, Copy)]
pub struct CommutatorReport {
    /// `max |([a,a†] − I)_{ij}|` over indices `< n_max` (the truncation
    /// corner is excluded; see `corner_defect`).
    pub canonical_defect: f64,
    /// `|[a,a†]_{n_max,n_max} + n_max|` — the corner entry is `−n_max`.
    pub corner_defect: f64,
    /// `max |([N,a] + a)_{ij}|` over all indices.
    pub lower_defect: f64,
    /// `max |([N,a†] − a†)_{ij}|` over all indices.
    pub raise_defect: f64,
}

pub fn commutator_defect(n_max: usize) -> CommutatorReport {
    let (a, adag, num) = ladder(n_max);
    let comm = |x: &SliceOperator, y: &SliceOperator| {
        x.mul(y)
            .and_then(|xy| y.mul(x).and_then(|yx| xy.sub(&yx)))
            .expect("real operators compose")
    };
    let c = comm(&a, &adag);
    let mut canonical_defect = 0.0f64;
    for i in 0..n_max {
        for j in 0..n_max {
            let target = if i == j {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            };
            canonical_defect = canonical_defect.max(c.entry(i, j).dist(&target));
        }
    }
    let corner_defect = c
        .entry(n_max, n_max)
        .dist(&Quaternion::from_real(-(n_max as f64)));
    let lower = comm(&num, &a).add(&a).expect("real operators combine");
    let raise = comm(&num, &adag).sub(&adag).expect("real operators combine");
    CommutatorReport {
        canonical_defect,
        corner_defect,
        lower_defect: lower.max_abs(),
        raise_defect: raise.max_abs(),
    }
}

/// Bands of the displacement generator `q a† − q̄ a` in the complexified
/// slice picture (`z = x + iy`).
fn generator_bands(z: Complex64, n_max: usize) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let sub: Vec<Complex64> = (0..n_max)
        .map(|j| z * ((j + 1) as f64).sqrt())
        .collect();
    let sup: Vec<Complex64> = (0..n_max)
        .map(|j| -z.conj() * ((j + 1) as f64).sqrt())
        .collect();
    let diag = vec![Complex64::new(0.0, 0.0); n_max + 1];
    (sub, diag, sup)
}

/// Displacement operator `D(q) = exp(q a† − q̄ a)` for `q = x + n y`,
/// exponentiated in the complexified slice picture (exact there, since all
/// entries share one slice) and embedded back. Real labels produce a real
/// matrix.
pub fn displacement(coords: &SliceCoords, n_max: usize) -> SliceOperator {
    let z = Complex64::new(coords.x, coords.y);
    let (sub, diag, sup) = generator_bands(z, n_max);
    let m = expm_tridiagonal(&sub, &diag, &sup);
    let axis = if coords.y == 0.0 {
        OperatorAxis::Real
    } else {
        OperatorAxis::Slice(coords.axis)
    };
    SliceOperator::from_complex(&m, axis)
}

/// Interior-block defect of the composition law
/// `D(q1)D(q2) = exp_imag(n, −(x₁y₂ − x₂y₁)) · D(q1 + q2)`.
pub fn bch_compose_defect(
    c1: &SliceCoords,
    c2: &SliceCoords,
    n_max: usize,
) -> Result<f64, OpError> {
    let distance = c1.axis.dist(&c2.axis);
    if distance > AXIS_MATCH_TOL {
        return Err(OpError::AxisMismatch { distance });
    }
    let z1 = Complex64::new(c1.x, c1.y);
    let z2 = Complex64::new(c2.x, c2.y);
    let build = |z: Complex64| {
        let (sub, diag, sup) = generator_bands(z, n_max);
        expm_tridiagonal(&sub, &diag, &sup)
    };
    let d1 = build(z1);
    let d2 = build(z2);
    let mut d12 = build(z1 + z2);
    let wedge = c1.x * c2.y - c2.x * c1.y;
    d12.scale(Complex64::from_polar(1.0, -wedge));
    let product = d1.matmul(&d2);
    Ok(product.max_abs_diff_block(&d12, crate::interior_limit(n_max)))
}

/// The generator `X = n·y·I + (q a† − q̄ a)` as a quaternion matrix on the
/// slice of `coords`.
pub fn generator(coords: &SliceCoords, y: f64, n_max: usize) -> SliceOperator {
    let n = n_max + 1;
    let axis = if coords.y == 0.0 && y == 0.0 {
        OperatorAxis::Real
    } else {
        OperatorAxis::Slice(coords.axis)
    };
    let mut x = SliceOperator::zeros(n, axis);
    let q = coords.compose();
    let qbar = q.conj();
    let phase = coords.axis.embed(0.0, y);
    for i in 0..n {
        x.entries[i * n + i] = phase;
        if i + 1 < n {
            let s = ((i + 1) as f64).sqrt();
            x.entries[(i + 1) * n + i] = q * s;
            x.entries[i * n + (i + 1)] = qbar * (-s);
        }
    }
    x
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorReport {
    /// `max |(X + X†)_{ij}|`; zero bit-for-bit by construction.
    pub antiadjoint_defect: f64,
    /// Interior-block defect of `exp(X) − exp_imag(n, y)·D(q)`.
    pub factorization_defect: f64,
}

/// Anti-self-adjointness and phase factorization of the generator.
pub fn generator_x_defect(coords: &SliceCoords, y: f64, n_max: usize) -> GeneratorReport {
    let x = generator(coords, y, n_max);
    let antiadjoint_defect = x
        .add(&x.adjoint())
        .expect("same slice by construction")
        .max_abs();
    let z = Complex64::new(coords.x, coords.y);
    let (sub, mut diag, sup) = generator_bands(z, n_max);
    for d in &mut diag {
        *d = Complex64::new(0.0, y);
    }
    let full = expm_tridiagonal(&sub, &diag, &sup);
    let (sub, diag0, sup) = generator_bands(z, n_max);
    let mut factored = expm_tridiagonal(&sub, &diag0, &sup);
    factored.scale(Complex64::from_polar(1.0, y));
    let factorization_defect =
        full.max_abs_diff_block(&factored, crate::interior_limit(n_max));
    GeneratorReport {
        antiadjoint_defect,
        factorization_defect,
    }
}

/// Max defect of the eigen relation `a γ_q = q γ_q` over components
/// `m < n_max − 1`; the top component carries the truncation tail and is
/// excluded here.
pub fn eigen_relation_defect(q: Quaternion, n_max: usize) -> f64 {
    let gamma = gamma_canonical(q, n_max);
    let (a, _, _) = ladder(n_max);
    let lowered = a.apply(gamma.vector()).expect("dimensions match");
    let scaled = gamma.vector().scale_left(q);
    let mut defect = 0.0f64;
    for m in 0..n_max.saturating_sub(1) {
        defect = defect.max(lowered.coeff(m).dist(&scaled.coeff(m)));
    }
    defect
}

/// Rank-one transporter `F = |γ^{n'}⟩⟨γ^{n}|` between canonical states
/// with the same polar label `(r, ϑ)` on two slices. Stored as the
/// (bra, ket) pair because its matrix entries would mix two slices.
#[derive(Debug, Clone)]
pub struct Transporter {
    source: CoherentState,
    target: CoherentState,
}

/// Build the transporter from the slice of `from` to the slice of `to`
/// for the label `r e^{nϑ}`.
pub fn transporter(
    from: SliceAxis,
    to: SliceAxis,
    r: f64,
    theta: f64,
    n_max: usize,
) -> Transporter {
    let (x, y) = (r * theta.cos(), r * theta.sin());
    Transporter {
        source: gamma_canonical(SliceCoords::new(x, y, from).compose(), n_max),
        target: gamma_canonical(SliceCoords::new(x, y, to).compose(), n_max),
    }
}

impl Transporter {
    pub fn source(&self) -> &CoherentState {
        &self.source
    }

    pub fn target(&self) -> &CoherentState {
        &self.target
    }

    /// `F(f) = ⟨f|γ⟩ · γ'` — the overlap scales the target from the left,
    /// so `F(q·f) = q·F(f)`.
    pub fn apply(&self, f: &FockVector) -> Result<FockVector, FockError> {
        let weight = f.inner(self.source.vector())?;
        Ok(self.target.vector().scale_left(weight))
    }

    /// `‖F‖ = ‖γ'‖·‖γ‖` for a rank-one map.
    pub fn operator_norm(&self) -> f64 {
        self.source.norm() * self.target.norm()
    }
}
