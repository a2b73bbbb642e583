//! Quadrature over slices and over the full quaternion space.
//!
//! Points are parameterized as `q = sqrt(x) e^{n t}` with `x` distributed by a
//! radial moment measure, `t` uniform on the circle, and the axis `n` ranging
//! over the canonical hemisphere. The radial x circle product integrates
//! monomials `z^m conj(z)^k` to `2 pi mu_m delta_{mk}` exactly (up to the rule
//! degrees), which is what every orthogonality and resolution identity below
//! reduces to.

use crate::measure::{gauss_from_recurrence, RadialRule};
use crate::quat::{
    lebesgue_weight, unit_imag_paired, Quaternion, SliceAxis, WeightMode,
};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be >= 1");
    let a = vec![0.0; order];
    let b: Vec<f64> = (0..order)
        .map(|k| {
            if k == 0 {
                2.0
            } else {
                let k2 = (k * k) as f64;
                k2 / (4.0 * k2 - 1.0)
            }
        })
        .collect();
    gauss_from_recurrence(&a, &b)
}

// ─── Circle rule ────────────────────────────────────────────────────────────

/// Uniform rule on the circle: `M` equally spaced angles with weight `2 pi / M`.
///
/// Integrates `e^{n p t}` to `2 pi delta_{p,0}` exactly for `|p| < M`; at
/// `|p| = M` the oscillation aliases to the constant and the rule returns
/// `2 pi` instead of `0`, so `M` must exceed every frequency in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaRule {
    order: usize,
}

impl ThetaRule {
    pub fn new(order: usize) -> ThetaRule {
        assert!(order >= 1, "circle rule order must be >= 1");
        ThetaRule { order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `(angle, weight)` pairs; angles lie in `(0, 2 pi]`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.order as f64;
        (1..=self.order).map(move |j| (2.0 * PI * j as f64 / m, 2.0 * PI / m))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for (t, w) in self.nodes() {
            acc += f(t) * w;
        }
        acc
    }
}

// ─── Hemisphere rule ────────────────────────────────────────────────────────

/// A node on the canonical hemisphere in zenith/azimuth angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HemisphereNode {
    pub theta1: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product rule on the open upper hemisphere: Gauss-Legendre in `cos theta1`
/// on `(0, 1)` times a uniform azimuth. Total mass is the hemisphere solid
/// angle `2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct HemisphereRule {
    nodes: Vec<HemisphereNode>,
    polar_order: usize,
    azimuth_order: usize,
}

impl HemisphereRule {
    pub fn new(polar_order: usize, azimuth_order: usize) -> HemisphereRule {
        assert!(
            polar_order >= 1 && azimuth_order >= 1,
            "hemisphere rule orders must be >= 1"
        );
        let (gl_nodes, gl_weights) = gauss_legendre(polar_order);
        let dphi = 2.0 * PI / azimuth_order as f64;
        let mut nodes = Vec::with_capacity(polar_order * azimuth_order);
        for (t, wt) in gl_nodes.iter().zip(&gl_weights) {
            // Map [-1, 1] to the cos(theta1) range (0, 1).
            let u = 0.5 * (t + 1.0);
            let wu = 0.5 * wt;
            let theta1 = u.acos();
            for j in 1..=azimuth_order {
                nodes.push(HemisphereNode {
                    theta1,
                    phi: dphi * j as f64,
                    weight: wu * dphi,
                });
            }
        }
        HemisphereRule { nodes, polar_order, azimuth_order }
    }

    pub fn polar_order(&self) -> usize {
        self.polar_order
    }

    pub fn azimuth_order(&self) -> usize {
        self.azimuth_order
    }

    pub fn nodes(&self) -> &[HemisphereNode] {
        &self.nodes
    }

    /// Total weight; the hemisphere solid angle `2 pi`.
    pub fn mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Weighted sum of the antipodally-paired axis field
    /// [`unit_imag_paired`]; vanishes (exactly, for any azimuth order >= 2)
    /// even though all labelling axes lie in one hemisphere.
    pub fn vector_moment(&self) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for n in &self.nodes {
            acc += unit_imag_paired(n.theta1, n.phi) * n.weight;
        }
        acc
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.theta1, n.phi)).sum()
    }
}

// ─── Slice and full-space integrals ─────────────────────────────────────────

/// Quadrature point `sqrt(x) e^{n t}` on the slice of `axis`.
pub fn slice_node(axis: &SliceAxis, x: f64, t: f64) -> Quaternion {
    axis.phase(t) * x.sqrt()
}

/// Integral over one slice: radial measure times the uniform circle rule.
pub fn integrate_slice(
    radial: &RadialRule,
    theta: &ThetaRule,
    axis: &SliceAxis,
    f: impl Fn(Quaternion) -> Quaternion,
) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    for (x, wx) in radial.iter() {
        for (t, wt) in theta.nodes() {
            acc += f(slice_node(axis, x, t)) * (wx * wt);
        }
    }
    acc
}

/// Integral over the full space: hemisphere of slices, each integrated as in
/// [`integrate_slice`] with the canonical axis at the hemisphere node.
pub fn integrate_h(
    radial: &RadialRule,
    theta: &ThetaRule,
    hemisphere: &HemisphereRule,
    f: impl Fn(Quaternion) -> Quaternion,
) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    for node in hemisphere.nodes() {
        let axis = SliceAxis::from_zenith(node.theta1, node.phi);
        acc += integrate_slice(radial, theta, &axis, &f) * node.weight;
    }
    acc
}

// ─── Lebesgue-weight audit ──────────────────────────────────────────────────

/// Result of integrating the unit Gaussian `e^{-|q|^2}` in slice coordinates
/// under a given weight convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAudit {
    /// The computed integral.
    pub value: f64,
    /// What the chosen convention produces for the Gaussian.
    pub expected: f64,
    /// The true 4D Lebesgue integral of the Gaussian, `pi^2`.
    pub true_integral: f64,
}

impl GaussianAudit {
    /// Signed departure of the convention from the true Lebesgue value.
    pub fn defect(&self) -> f64 {
        self.value - self.true_integral
    }
}

/// Integrate the unit Gaussian in slice coordinates
/// `dm = weight(x, y) dx dy dOmega` under the chosen weight convention.
///
/// The `(x, y)` plane is handled in polar form with Gauss-Legendre rules
/// (radius truncated at 6, tail below 1e-14), restricted to `y >= 0` and
/// doubled since both weight conventions are even in `y`; the axis factor uses
/// an explicit hemisphere rule even though the integrand is axis-independent.
pub fn lebesgue_gaussian_audit(mode: WeightMode) -> GaussianAudit {
    let (rho_nodes, rho_weights) = gauss_legendre(64);
    let (alpha_nodes, alpha_weights) = gauss_legendre(32);
    let hemisphere = HemisphereRule::new(4, 8);
    let mut plane = 0.0;
    for (tr, wr) in rho_nodes.iter().zip(&rho_weights) {
        let rho = 3.0 * (tr + 1.0);
        let wr = 3.0 * wr;
        for (ta, wa) in alpha_nodes.iter().zip(&alpha_weights) {
            let alpha = 0.5 * PI * (ta + 1.0);
            let wa = 0.5 * PI * wa;
            let (x, y) = (rho * alpha.cos(), rho * alpha.sin());
            plane += wr * wa * rho * lebesgue_weight(x, y, mode) * (-(x * x + y * y)).exp();
        }
    }
    let value = 2.0 * plane * hemisphere.mass();
    let expected = match mode {
        WeightMode::Jacobian => PI * PI,
        WeightMode::Paper => 4.0 * PI,
    };
    GaussianAudit { value, expected, true_integral: PI * PI }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{eval_phi, eval_u};
    use crate::measure::MomentMeasure;
    use crate::quat::SliceCoords;

    /// 8-node Gauss-Legendre rule: classical published values.
    #[test]
    fn gauss_legendre_eight_nodes_match_table() {
        let nodes = [
            -9.6028985649753629e-01,
            -7.9666647741362673e-01,
            -5.2553240991632899e-01,
            -1.8343464249564984e-01,
            1.8343464249564984e-01,
            5.2553240991632899e-01,
            7.9666647741362673e-01,
            9.6028985649753629e-01,
        ];
        let weights = [
            1.0122853629037562e-01,
            2.2238103445337473e-01,
            3.1370664587788760e-01,
            3.6268378337836205e-01,
            3.6268378337836205e-01,
            3.1370664587788760e-01,
            2.2238103445337473e-01,
            1.0122853629037562e-01,
        ];
        let (x, w) = gauss_legendre(8);
        for i in 0..8 {
            assert!((x[i] - nodes[i]).abs() <= 1e-14, "node {i}");
            assert!((w[i] - weights[i]).abs() <= 1e-14, "weight {i}");
        }
    }

    #[test]
    fn circle_rule_frequency_exactness_and_aliasing() {
        let rule = ThetaRule::new(64);
        let axis = SliceAxis::from_zenith(0.9, 2.2);
        for p in -63i32..=63 {
            let value = rule.integrate(|t| axis.phase(p as f64 * t));
            let reference = if p == 0 {
                Quaternion::from_real(2.0 * PI)
            } else {
                Quaternion::ZERO
            };
            assert!(value.dist(&reference) <= 1e-12, "p = {p}: {value}");
        }
        // At |p| = M the oscillation aliases to the constant.
        for p in [-64.0, 64.0] {
            let value = rule.integrate(|t| axis.phase(p * t));
            assert!(value.dist(&Quaternion::from_real(2.0 * PI)) <= 1e-12);
        }
    }

    #[test]
    fn hemisphere_rule_moments() {
        let rule = HemisphereRule::new(32, 64);
        assert!((rule.mass() - 2.0 * PI).abs() <= 1e-12);
        assert!(rule.vector_moment().norm() <= 1e-12);
        // integral of cos(theta1) over the hemisphere = pi.
        let m = rule.integrate(|t1, _| t1.cos());
        assert!((m - PI).abs() <= 1e-12);
    }

    #[test]
    fn orientation_balance_needs_the_paired_convention() {
        // The canonical labelling axes themselves all point into one
        // hemisphere: their weighted sum is pi * k, far from zero. Only the
        // antipodally-paired field integrates to zero.
        let rule = HemisphereRule::new(16, 32);
        let mut zenith_sum = Quaternion::ZERO;
        for n in rule.nodes() {
            zenith_sum += SliceAxis::from_zenith(n.theta1, n.phi).as_quaternion() * n.weight;
        }
        assert!((zenith_sum.dist(&(PI * Quaternion::K))) <= 1e-12);
        assert!(rule.vector_moment().norm() <= 1e-12);
    }

    #[test]
    fn slice_basis_orthogonality() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(40).unwrap();
        let theta = ThetaRule::new(64);
        let axis = SliceAxis::from_zenith(0.7, 1.3);
        for m in 0..=12usize {
            for k in 0..=m {
                let mut u = Quaternion::ZERO;
                let mut phi = Quaternion::ZERO;
                for (x, wx) in radial.iter() {
                    let r = x.sqrt();
                    for (t, wt) in theta.nodes() {
                        let coords = SliceCoords::new(r * t.cos(), r * t.sin(), axis);
                        let w = wx * wt;
                        u += eval_u(m, &coords, &mu).unwrap()
                            * eval_u(k, &coords, &mu).unwrap().conj()
                            * w;
                        let q = coords.compose();
                        phi += eval_phi(m, q, &mu).unwrap()
                            * eval_phi(k, q, &mu).unwrap().conj()
                            * w;
                    }
                }
                let reference = if m == k { Quaternion::ONE } else { Quaternion::ZERO };
                assert!(u.dist(&reference) <= 1e-10, "U: ({m},{k}) -> {u}");
                let reference = reference * (1.0 / (2.0 * PI));
                assert!(phi.dist(&reference) <= 1e-9, "phi: ({m},{k}) -> {phi}");
            }
        }
    }

    #[test]
    fn full_space_basis_orthogonality() {
        let mu = MomentMeasure::exponential();
        // Small orders suffice: the integrands are polynomial in the node
        // variables and constant across slices after the circle average.
        let radial = mu.radial_rule(20).unwrap();
        let theta = ThetaRule::new(32);
        let hemisphere = HemisphereRule::new(8, 16);
        for m in 0..=12usize {
            for k in 0..=m {
                let g = integrate_h(&radial, &theta, &hemisphere, |q| {
                    eval_phi(m, q, &mu).unwrap() * eval_phi(k, q, &mu).unwrap().conj()
                });
                let reference = if m == k { Quaternion::ONE } else { Quaternion::ZERO };
                assert!(g.dist(&reference) <= 1e-9, "({m},{k}) -> {g}");
            }
        }
    }

    #[test]
    fn odd_integrand_vanishes() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(20).unwrap();
        let theta = ThetaRule::new(32);
        let hemisphere = HemisphereRule::new(8, 16);
        let v = integrate_h(&radial, &theta, &hemisphere, |q| q);
        assert!(v.norm() <= 1e-10);
    }

    #[test]
    fn constant_and_left_linearity() {
        let mu = MomentMeasure::exponential();
        let radial = mu.radial_rule(10).unwrap();
        let theta = ThetaRule::new(16);
        let axis = SliceAxis::J;
        let c = Quaternion::new(0.3, -1.2, 0.5, 2.0);
        let constant = integrate_slice(&radial, &theta, &axis, |_| c);
        assert!(constant.dist(&(2.0 * PI * c)) <= 1e-12 * c.norm());
        let f = |q: Quaternion| Quaternion::ONE + q * q - q * 0.25;
        let lhs = integrate_slice(&radial, &theta, &axis, |q| c * f(q));
        let rhs = c * integrate_slice(&radial, &theta, &axis, f);
        assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn refinement_stability() {
        let mu = MomentMeasure::exponential();
        let axis = SliceAxis::from_zenith(1.1, 4.0);
        let f = |q: Quaternion| (Quaternion::ONE + q) * (-q.norm_sqr()).exp();
        let coarse = integrate_slice(&mu.radial_rule(20).unwrap(), &ThetaRule::new(32), &axis, f);
        let fine = integrate_slice(&mu.radial_rule(40).unwrap(), &ThetaRule::new(64), &axis, f);
        assert!(coarse.dist(&fine) <= 1e-10, "{coarse} vs {fine}");
        let hemi_f = |q: Quaternion| Quaternion::ONE * (-q.norm_sqr()).exp() + q * 0.5;
        let coarse = integrate_h(
            &mu.radial_rule(20).unwrap(),
            &ThetaRule::new(32),
            &HemisphereRule::new(8, 16),
            hemi_f,
        );
        let fine = integrate_h(
            &mu.radial_rule(40).unwrap(),
            &ThetaRule::new(64),
            &HemisphereRule::new(16, 32),
            hemi_f,
        );
        assert!(coarse.dist(&fine) <= 1e-10, "{coarse} vs {fine}");
    }

    #[test]
    fn gaussian_audit_jacobian_weight() {
        let audit = lebesgue_gaussian_audit(WeightMode::Jacobian);
        assert!((audit.value - PI * PI).abs() <= 1e-8, "value {}", audit.value);
        assert!(audit.defect().abs() <= 1e-8);
    }

    #[test]
    fn gaussian_audit_paper_weight() {
        let audit = lebesgue_gaussian_audit(WeightMode::Paper);
        assert!((audit.value - 4.0 * PI).abs() <= 1e-8, "value {}", audit.value);
        // The convention misses the true Lebesgue value by a fixed amount.
        assert!((audit.defect() - (4.0 * PI - PI * PI)).abs() <= 1e-8);
    }
}
