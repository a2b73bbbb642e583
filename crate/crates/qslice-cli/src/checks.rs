//! The verification checks behind `qslice verify`.
//!
//! Each check computes a scalar residual and compares it against a
//! tolerance (overridable per check id). Checks that bundle several gates
//! with different tolerances report the worst defect-to-tolerance ratio
//! against a tolerance of 1, with the individual parts in the note.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qslice::coherent::{
    coherent_h, gamma_canonical, kernel_properties, kernel_slice, resolution_check,
    weyl_transform, ResolutionDomain, WeylDomain, WeylMode,
};
use qslice::field::{
    constancy_check, decomposable_operator, restriction_scale, sample_slices, HilbertField,
};
use qslice::fock::{eval_phi, parseval_check, regularity_residual, FockVector, RegularitySide};
use qslice::integrate::{lebesgue_gaussian_audit, slice_node, HemisphereRule, ThetaRule};
use qslice::measure::MomentMeasure;
use qslice::operators::{
    bch_compose_defect, commutator_defect, displacement, eigen_relation_defect,
    generator_x_defect, transporter,
};
use qslice::quat::{Quaternion, SliceAxis, SliceCoords, WeightMode};
use qslice::interior_limit;

use crate::config::SuiteConfig;

/// Outcome data of one check, before report assembly.
pub struct CheckData {
    pub residual: f64,
    pub tol: f64,
    pub note: Option<String>,
}

pub struct CheckDef {
    pub id: &'static str,
    pub anchor: &'static str,
    pub run: fn(&SuiteConfig) -> Result<CheckData, String>,
}

/// All shipped checks, ordered by id.
pub fn all_checks() -> Vec<CheckDef> {
    vec![
        CheckDef {
            id: "angular.mass",
            anchor: "solid-angle mass of the axis hemisphere equals 2*pi",
            run: check_angular_mass,
        },
        CheckDef {
            id: "angular.vector",
            anchor: "weighted first moment of the axis directions vanishes",
            run: check_angular_vector,
        },
        CheckDef {
            id: "basis.ortho.H",
            anchor: "monomial basis orthonormal under the full-space integral",
            run: check_basis_ortho_h,
        },
        CheckDef {
            id: "basis.ortho.slice",
            anchor: "restricted basis orthogonal with mass 1/(2*pi); unit slice basis orthonormal",
            run: check_basis_ortho_slice,
        },
        CheckDef {
            id: "cs.norm",
            anchor: "coherent-state norms: 1/(2*pi) kernel-normalized, 1 canonical",
            run: check_cs_norm,
        },
        CheckDef {
            id: "field.constancy",
            anchor: "fundamental-field inner products constant across sampled axes",
            run: check_field_constancy,
        },
        CheckDef {
            id: "field.isometry",
            anchor: "restriction into the direct integral scales inner products by one constant",
            run: check_field_isometry,
        },
        CheckDef {
            id: "field.reducible",
            anchor: "blockwise displacement leaves every fiber invariant and unitary",
            run: check_field_reducible,
        },
        CheckDef {
            id: "fock.parseval",
            anchor: "Parseval identity over the coefficient basis",
            run: check_fock_parseval,
        },
        CheckDef {
            id: "fock.regular",
            anchor: "slice-regularity residual of a basis function decays quadratically",
            run: check_fock_regular,
        },
        CheckDef {
            id: "geom.lebesgue",
            anchor: "Gaussian volume audit under both slice area-weight conventions",
            run: check_geom_lebesgue,
        },
        CheckDef {
            id: "kernel.props",
            anchor: "kernel hermiticity, diagonal normalization, Gram positivity, idempotence",
            run: check_kernel_props,
        },
        CheckDef {
            id: "kernel.reproduce",
            anchor: "kernel reproduces slice functions from quadrature",
            run: check_kernel_reproduce,
        },
        CheckDef {
            id: "op.bch",
            anchor: "displacement composition carries the area phase",
            run: check_op_bch,
        },
        CheckDef {
            id: "op.commutators",
            anchor: "truncated ladder commutation relations with the corner term",
            run: check_op_commutators,
        },
        CheckDef {
            id: "op.displacement",
            anchor: "displacement unitarity and ground-state transport",
            run: check_op_displacement,
        },
        CheckDef {
            id: "op.eigen",
            anchor: "canonical states are lowering-operator eigenvectors",
            run: check_op_eigen,
        },
        CheckDef {
            id: "op.generator",
            anchor: "generator anti-self-adjointness and phase factorization",
            run: check_op_generator,
        },
        CheckDef {
            id: "op.transporter",
            anchor: "rank-one transporter carries canonical states between slices",
            run: check_op_transporter,
        },
        CheckDef {
            id: "resolution.H",
            anchor: "full-space coherent-state resolution of the identity",
            run: check_resolution_h,
        },
        CheckDef {
            id: "resolution.slice",
            anchor: "slice coherent-state resolution of the identity",
            run: check_resolution_slice,
        },
        CheckDef {
            id: "weyl.scale",
            anchor: "transform norm scale: 2*pi plain, 1 isometric",
            run: check_weyl_scale,
        },
    ]
}

// ─── Shared helpers ──────────────────────────────────────────────────────────

fn seed_for(cfg: &SuiteConfig, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    cfg.seed ^ h
}

fn rng_for(cfg: &SuiteConfig, id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_for(cfg, id))
}

fn rand_ball(rng: &mut ChaCha8Rng, radius: f64) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        if q.norm_sqr() <= 1.0 {
            return q * radius;
        }
    }
}

fn rand_axis(rng: &mut ChaCha8Rng) -> SliceAxis {
    let c = 1.0 - rng.gen::<f64>();
    let phi = rng.gen::<f64>() * 2.0 * PI;
    SliceAxis::from_zenith(c.acos(), phi)
}

fn rand_slice(rng: &mut ChaCha8Rng, axis: SliceAxis, rmax: f64) -> SliceCoords {
    let r = rmax * rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * 2.0 * PI;
    SliceCoords::new(r * t.cos(), r * t.sin(), axis)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

struct Rules {
    measure: MomentMeasure,
    radial: qslice::measure::RadialRule,
    theta: ThetaRule,
    hemisphere: HemisphereRule,
}

fn rules(cfg: &SuiteConfig) -> Result<Rules, String> {
    let measure = cfg.build_measure().map_err(err)?;
    let radial = measure.radial_rule(cfg.radial_order).map_err(err)?;
    Ok(Rules {
        measure,
        radial,
        theta: ThetaRule::new(cfg.theta_order),
        hemisphere: HemisphereRule::new(cfg.hemi_polar, cfg.hemi_azimuth),
    })
}

/// Combine `(label, defect, gate)` parts into a worst defect-to-gate
/// ratio with a formatted note.
fn combine(parts: &[(&str, f64, f64)]) -> (f64, String) {
    let mut worst = 0.0f64;
    let mut note = String::new();
    for (label, defect, gate) in parts {
        worst = worst.max(defect / gate);
        if !note.is_empty() {
            note.push_str("; ");
        }
        note.push_str(&format!("{label} {defect:.3e} (gate {gate:.1e})"));
    }
    (worst, note)
}

// ─── Angular geometry ────────────────────────────────────────────────────────

fn check_angular_mass(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let rule = HemisphereRule::new(cfg.hemi_polar, cfg.hemi_azimuth);
    Ok(CheckData {
        residual: (rule.mass() - 2.0 * PI).abs(),
        tol: cfg.tol("angular.mass", 1e-12),
        note: None,
    })
}

fn check_angular_vector(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let rule = HemisphereRule::new(cfg.hemi_polar, cfg.hemi_azimuth);
    Ok(CheckData {
        residual: rule.vector_moment().norm(),
        tol: cfg.tol("angular.vector", 1e-12),
        note: None,
    })
}

fn check_geom_lebesgue(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let jac = lebesgue_gaussian_audit(WeightMode::Jacobian);
    let pap = lebesgue_gaussian_audit(WeightMode::Paper);
    let dj = (jac.value - jac.expected).abs();
    let dp = (pap.value - pap.expected).abs();
    Ok(CheckData {
        residual: dj.max(dp),
        tol: cfg.tol("geom.lebesgue", 1e-8),
        note: Some(format!(
            "jacobian weight gives {:.12} (4-volume pi^2 = {:.12}); |y|r weight gives {:.12} \
             (its closed form 4*pi = {:.12}); the conventions disagree and both are reported",
            jac.value, jac.true_integral, pap.value, pap.expected
        )),
    })
}

// ─── Basis orthogonality ─────────────────────────────────────────────────────

const ORTHO_TOP: usize = 12;

/// Basis values `q^m / (2*pi*sqrt(x_m!))` for `m = 0..=ORTHO_TOP` at one
/// point, by the power recurrence.
fn basis_values(q: Quaternion, inv_sqrt_step: &[f64; ORTHO_TOP + 1]) -> [Quaternion; ORTHO_TOP + 1] {
    let mut vals = [Quaternion::ZERO; ORTHO_TOP + 1];
    let mut p = Quaternion::from_real(1.0 / (2.0 * PI));
    vals[0] = p;
    for m in 1..=ORTHO_TOP {
        p = p * q * inv_sqrt_step[m];
        vals[m] = p;
    }
    vals
}

fn inv_sqrt_steps(measure: &MomentMeasure) -> Result<[f64; ORTHO_TOP + 1], String> {
    let mut inv = [0.0f64; ORTHO_TOP + 1];
    for m in 1..=ORTHO_TOP {
        inv[m] = 1.0 / measure.x_step(m).map_err(err)?.sqrt();
    }
    Ok(inv)
}

fn gram_defect(gram: &[Quaternion], dim: usize, scale: f64, diag: f64) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..dim {
        for k in m..dim {
            let target = if m == k {
                Quaternion::from_real(diag)
            } else {
                Quaternion::ZERO
            };
            worst = worst.max((gram[m * dim + k] * scale).dist(&target));
        }
    }
    worst
}

fn check_basis_ortho_h(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let inv = inv_sqrt_steps(&r.measure)?;
    let dim = ORTHO_TOP + 1;
    let mut gram = vec![Quaternion::ZERO; dim * dim];
    for node in r.hemisphere.nodes() {
        let axis = SliceAxis::from_zenith(node.theta1, node.phi);
        for (x, wx) in r.radial.iter() {
            for (t, wt) in r.theta.nodes() {
                let q = slice_node(&axis, x, t);
                let vals = basis_values(q, &inv);
                let w = wx * wt * node.weight;
                for m in 0..dim {
                    let left = vals[m] * w;
                    for k in m..dim {
                        gram[m * dim + k] += left * vals[k].conj();
                    }
                }
            }
        }
    }
    Ok(CheckData {
        residual: gram_defect(&gram, dim, 1.0, 1.0),
        tol: cfg.tol("basis.ortho.H", 1e-9),
        note: None,
    })
}

fn check_basis_ortho_slice(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let inv = inv_sqrt_steps(&r.measure)?;
    let mut rng = rng_for(cfg, "basis.ortho.slice");
    let axis = rand_axis(&mut rng);
    let dim = ORTHO_TOP + 1;
    let mut gram = vec![Quaternion::ZERO; dim * dim];
    for (x, wx) in r.radial.iter() {
        for (t, wt) in r.theta.nodes() {
            let q = slice_node(&axis, x, t);
            let vals = basis_values(q, &inv);
            let w = wx * wt;
            for m in 0..dim {
                let left = vals[m] * w;
                for k in m..dim {
                    gram[m * dim + k] += left * vals[k].conj();
                }
            }
        }
    }
    // Restricted basis pairs to delta/(2*pi); rescaling by 2*pi gives the
    // unit-normalized slice basis, which pairs to delta.
    let restricted = gram_defect(&gram, dim, 1.0, 1.0 / (2.0 * PI));
    let unit = gram_defect(&gram, dim, 2.0 * PI, 1.0);
    let (residual, note) = combine(&[
        ("restricted", restricted, 1e-9),
        ("unit-normalized", unit, 1e-10),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("basis.ortho.slice", 1.0),
        note: Some(note),
    })
}

// ─── Coherent states and kernel ──────────────────────────────────────────────

fn sample_radius(measure: &MomentMeasure, cap: f64) -> f64 {
    match measure.convergence_radius() {
        None => cap,
        Some(l) => (0.45 * l).min(cap),
    }
}

fn check_cs_norm(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = cfg.build_measure().map_err(err)?;
    let mut rng = rng_for(cfg, "cs.norm");
    let rmax = sample_radius(&measure, 2.0);
    let mut kernel_dev = 0.0f64;
    let mut canonical_dev = 0.0f64;
    for _ in 0..50 {
        let q = rand_ball(&mut rng, rmax);
        let eta = coherent_h(q, &measure, cfg.n_max).map_err(err)?;
        kernel_dev = kernel_dev.max((eta.norm() - 1.0 / (2.0 * PI)).abs());
        let gamma = gamma_canonical(q, cfg.n_max);
        canonical_dev = canonical_dev.max((gamma.norm() - 1.0).abs());
    }
    Ok(CheckData {
        residual: kernel_dev.max(canonical_dev),
        tol: cfg.tol("cs.norm", 1e-10),
        note: Some(format!(
            "kernel-normalized family vs 1/(2*pi): {kernel_dev:.3e}; canonical family vs 1: {canonical_dev:.3e}"
        )),
    })
}

/// Identity-type checks run at this truncation regardless of `n_max`; the
/// node-by-node accumulation is quadratic in the dimension.
const IDENTITY_N_MAX: usize = 32;

fn check_resolution_slice(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let mut rng = rng_for(cfg, "resolution.slice");
    let axis = rand_axis(&mut rng);
    let defect = resolution_check(
        ResolutionDomain::Slice(axis),
        &r.measure,
        IDENTITY_N_MAX,
        &r.radial,
        &r.theta,
        &r.hemisphere,
    )
    .map_err(err)?;
    Ok(CheckData {
        residual: defect,
        tol: cfg.tol("resolution.slice", 1e-8),
        note: Some(format!("truncation {IDENTITY_N_MAX}")),
    })
}

fn check_resolution_h(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let defect = resolution_check(
        ResolutionDomain::Full,
        &r.measure,
        IDENTITY_N_MAX,
        &r.radial,
        &r.theta,
        &r.hemisphere,
    )
    .map_err(err)?;
    Ok(CheckData {
        residual: defect,
        tol: cfg.tol("resolution.H", 1e-8),
        note: Some(format!("truncation {IDENTITY_N_MAX}")),
    })
}

fn check_kernel_props(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let report = kernel_properties(
        &r.measure,
        &r.radial,
        &r.theta,
        &r.hemisphere,
        20,
        seed_for(cfg, "kernel.props"),
    )
    .map_err(err)?;
    let (residual, note) = combine(&[
        ("hermiticity", report.hermiticity_defect, 1e-12),
        ("diagonal", report.diagonal_defect, 1e-10),
        ("pointwise", (-report.positivity_min).max(0.0), 1e-10),
        ("gram", (-report.gram_min_eigenvalue).max(0.0), 1e-10),
        ("idempotence", report.idempotence_defect, 1e-8),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("kernel.props", 1.0),
        note: Some(note),
    })
}

fn check_kernel_reproduce(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let inv = inv_sqrt_steps(&r.measure)?;
    let mut rng = rng_for(cfg, "kernel.reproduce");
    let axis = rand_axis(&mut rng);
    let coeffs: Vec<Quaternion> = (0..=ORTHO_TOP).map(|_| rand_ball(&mut rng, 1.0)).collect();
    // f = sum of coefficients against the unit slice basis (values are the
    // restricted basis times sqrt(2*pi)).
    let f_eval = |q: Quaternion| -> Quaternion {
        let vals = basis_values(q, &inv);
        let s = (2.0 * PI).sqrt();
        let mut acc = Quaternion::ZERO;
        for (c, v) in coeffs.iter().zip(vals.iter()) {
            acc += *c * *v * s;
        }
        acc
    };
    let rmax = sample_radius(&r.measure, 1.5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let target = rand_slice(&mut rng, axis, rmax);
        let mut reproduced = Quaternion::ZERO;
        for (x, wx) in r.radial.iter() {
            let rad = x.sqrt();
            for (t, wt) in r.theta.nodes() {
                let node = SliceCoords::new(rad * t.cos(), rad * t.sin(), axis);
                let k = kernel_slice(&node, &target, &r.measure).map_err(err)?;
                reproduced += f_eval(node.compose()) * k * (wx * wt);
            }
        }
        worst = worst.max(reproduced.dist(&f_eval(target.compose())));
    }
    Ok(CheckData {
        residual: worst,
        tol: cfg.tol("kernel.reproduce", 1e-9),
        note: None,
    })
}

fn check_weyl_scale(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let r = rules(cfg)?;
    let mut rng = rng_for(cfg, "weyl.scale");
    let coeffs: Vec<Quaternion> = (0..=ORTHO_TOP).map(|_| rand_ball(&mut rng, 1.0)).collect();
    let f = FockVector::new(coeffs, r.measure.clone());
    let plain = weyl_transform(&f, WeylMode::Paper, WeylDomain::Full)
        .norm_ratio(&r.radial, &r.theta, &r.hemisphere)
        .map_err(err)?;
    let isometric = weyl_transform(&f, WeylMode::Isometric, WeylDomain::Full)
        .norm_ratio(&r.radial, &r.theta, &r.hemisphere)
        .map_err(err)?;
    let (residual, note) = combine(&[
        ("plain-vs-2*pi", (plain / (2.0 * PI) - 1.0).abs(), 1e-8),
        ("isometric-vs-1", (isometric - 1.0).abs(), 1e-9),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("weyl.scale", 1.0),
        note: Some(note),
    })
}

// ─── Operators ───────────────────────────────────────────────────────────────

fn check_op_commutators(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let report = commutator_defect(cfg.n_max);
    let residual = report
        .canonical_defect
        .max(report.corner_defect)
        .max(report.lower_defect)
        .max(report.raise_defect);
    Ok(CheckData {
        residual,
        tol: cfg.tol("op.commutators", 1e-12),
        note: Some(format!(
            "canonical {:.3e}; corner {:.3e}; lowering {:.3e}; raising {:.3e}",
            report.canonical_defect,
            report.corner_defect,
            report.lower_defect,
            report.raise_defect
        )),
    })
}

fn check_op_displacement(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = MomentMeasure::exponential();
    let mut rng = rng_for(cfg, "op.displacement");
    let limit = interior_limit(cfg.n_max);
    let mut unitarity = 0.0f64;
    let mut ground = 0.0f64;
    for _ in 0..20 {
        let axis = rand_axis(&mut rng);
        let z = rand_slice(&mut rng, axis, 1.5);
        let d = displacement(&z, cfg.n_max);
        unitarity = unitarity.max(d.unitarity_defect(limit));
        let g0 = FockVector::basis(cfg.n_max, 0, measure.clone());
        let moved = d.apply(&g0).map_err(err)?;
        let gamma = gamma_canonical(z.compose(), cfg.n_max);
        for m in 0..limit {
            ground = ground.max(moved.coeff(m).dist(&gamma.vector().coeff(m)));
        }
    }
    let (residual, note) = combine(&[
        ("unitarity", unitarity, 1e-8),
        ("ground-state transport", ground, 1e-10),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("op.displacement", 1.0),
        note: Some(note),
    })
}

/// The composition check runs at a higher truncation: the defect lives on
/// the interior block, but at dimension 64 the boundary still leaks just
/// above the gate, while 128 leaves orders of magnitude of headroom.
const BCH_N_MAX: usize = 128;

fn check_op_bch(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let mut rng = rng_for(cfg, "op.bch");
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let axis = rand_axis(&mut rng);
        let z1 = rand_slice(&mut rng, axis, 1.0);
        let z2 = rand_slice(&mut rng, axis, 1.0);
        let defect = bch_compose_defect(&z1, &z2, BCH_N_MAX).map_err(err)?;
        worst = worst.max(defect);
    }
    Ok(CheckData {
        residual: worst,
        tol: cfg.tol("op.bch", 1e-7),
        note: Some(format!("truncation {BCH_N_MAX}, 100 same-slice pairs")),
    })
}

fn check_op_generator(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let mut rng = rng_for(cfg, "op.generator");
    let mut antiadjoint = 0.0f64;
    let mut factorization = 0.0f64;
    for _ in 0..5 {
        let axis = rand_axis(&mut rng);
        let z = rand_slice(&mut rng, axis, 1.2);
        let y = rng.gen::<f64>() * 4.0 - 2.0;
        let report = generator_x_defect(&z, y, cfg.n_max);
        antiadjoint = antiadjoint.max(report.antiadjoint_defect);
        factorization = factorization.max(report.factorization_defect);
    }
    let (residual, note) = combine(&[
        ("anti-self-adjointness", antiadjoint, 1e-15),
        ("phase factorization", factorization, 1e-8),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("op.generator", 1.0),
        note: Some(note),
    })
}

fn check_op_eigen(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let mut rng = rng_for(cfg, "op.eigen");
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let q = rand_ball(&mut rng, 1.5);
        worst = worst.max(eigen_relation_defect(q, cfg.n_max));
    }
    Ok(CheckData {
        residual: worst,
        tol: cfg.tol("op.eigen", 1e-10),
        note: None,
    })
}

fn check_op_transporter(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let mut rng = rng_for(cfg, "op.transporter");
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let from = rand_axis(&mut rng);
        let to = rand_axis(&mut rng);
        let r = 0.2 + 1.3 * rng.gen::<f64>();
        let t = rng.gen::<f64>() * 2.0 * PI;
        let f = transporter(from, to, r, t, cfg.n_max);
        let moved = f.apply(f.source().vector()).map_err(err)?;
        let mut dist_sqr = 0.0f64;
        for m in 0..=cfg.n_max {
            dist_sqr += moved
                .coeff(m)
                .dist(&f.target().vector().coeff(m))
                .powi(2);
        }
        worst = worst.max(dist_sqr.sqrt());
    }
    Ok(CheckData {
        residual: worst,
        tol: cfg.tol("op.transporter", 1e-9),
        note: None,
    })
}

// ─── Direct-integral fields ──────────────────────────────────────────────────

fn check_field_constancy(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = cfg.build_measure().map_err(err)?;
    let radial = measure.radial_rule(cfg.radial_order).map_err(err)?;
    let theta = ThetaRule::new(cfg.theta_order);
    // 5 x 10 hemisphere nodes: exactly 50 sampled axes.
    let s = sample_slices(&HemisphereRule::new(5, 10));
    let diag = constancy_check(4, 4, &s, &measure, &radial, &theta).map_err(err)?;
    let cross = constancy_check(2, 5, &s, &measure, &radial, &theta).map_err(err)?;
    let (residual, note) = combine(&[
        ("diagonal spread", diag.stdev, 1e-10),
        ("diagonal mean vs 1", diag.mean.dist(&Quaternion::ONE), 1e-10),
        ("cross spread", cross.stdev, 1e-10),
        ("cross mean vs 0", cross.mean.norm(), 1e-10),
    ]);
    Ok(CheckData {
        residual,
        tol: cfg.tol("field.constancy", 1.0),
        note: Some(note),
    })
}

fn check_field_isometry(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = cfg.build_measure().map_err(err)?;
    let s = sample_slices(&HemisphereRule::new(cfg.hemi_polar, cfg.hemi_azimuth));
    let report = restriction_scale(&s, &measure, 12, 20, seed_for(cfg, "field.isometry"))
        .map_err(err)?;
    Ok(CheckData {
        residual: report.relative_spread,
        tol: cfg.tol("field.isometry", 1e-8),
        note: Some(format!(
            "measured scale c = {:.12}; a 2*pi scale would require restriction without the \
             1/sqrt(2*pi) coefficient factor",
            report.scale
        )),
    })
}

fn check_field_reducible(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = MomentMeasure::exponential();
    let s = sample_slices(&HemisphereRule::new(6, 12));
    let n_max = IDENTITY_N_MAX;
    let op = decomposable_operator(0.8, 1.1, &s, n_max);
    let unitarity = op.block_unitarity_defect(interior_limit(n_max));
    // A field supported on a single fiber must stay on that fiber.
    let mid = s.len() / 2;
    let mut members = vec![FockVector::zeros(n_max, measure.clone()); s.len()];
    members[mid] = FockVector::basis(n_max, 0, measure.clone());
    let field = HilbertField::new(members, s.clone()).map_err(err)?;
    let moved = op.apply(&field).map_err(err)?;
    let mut coupling = 0.0f64;
    for k in 0..s.len() {
        if k == mid {
            continue;
        }
        for m in 0..=n_max {
            coupling = coupling.max(moved.member(k).coeff(m).norm());
        }
    }
    let coupling_part = if coupling > 0.0 { 2.0 } else { 0.0 };
    let (ratio, _) = combine(&[("block unitarity", unitarity, 1e-8)]);
    Ok(CheckData {
        residual: ratio.max(coupling_part),
        tol: cfg.tol("field.reducible", 1.0),
        note: Some(format!(
            "cross-fiber coupling {coupling:.1e} (must be exactly zero); worst block unitarity {unitarity:.3e} (gate 1.0e-8)"
        )),
    })
}

// ─── Fock-layer diagnostics ──────────────────────────────────────────────────

fn check_fock_parseval(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = cfg.build_measure().map_err(err)?;
    let mut rng = rng_for(cfg, "fock.parseval");
    let basis: Vec<FockVector> = (0..=cfg.n_max)
        .map(|m| FockVector::basis(cfg.n_max, m, measure.clone()))
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let coeffs: Vec<Quaternion> = (0..=cfg.n_max).map(|_| rand_ball(&mut rng, 1.0)).collect();
        let f = FockVector::new(coeffs, measure.clone());
        worst = worst.max(parseval_check(&f, &basis).map_err(err)?);
    }
    Ok(CheckData {
        residual: worst,
        tol: cfg.tol("fock.parseval", 1e-12),
        note: None,
    })
}

fn check_fock_regular(cfg: &SuiteConfig) -> Result<CheckData, String> {
    let measure = cfg.build_measure().map_err(err)?;
    for m in 1..=3 {
        measure.x_step(m).map_err(err)?;
    }
    let mut rng = rng_for(cfg, "fock.regular");
    let q = loop {
        let c = rand_ball(&mut rng, 1.0);
        if c.im_norm() > 0.3 {
            break c;
        }
    };
    let phi3 = |p: Quaternion| eval_phi(3, p, &measure).expect("steps prevalidated");
    let coarse = regularity_residual(phi3, q, 1e-2, RegularitySide::Right).map_err(err)?;
    let fine = regularity_residual(phi3, q, 1e-3, RegularitySide::Right).map_err(err)?;
    let ratio = coarse / fine;
    Ok(CheckData {
        residual: (ratio - 100.0).abs(),
        tol: cfg.tol("fock.regular", 20.0),
        note: Some(format!(
            "residual {coarse:.3e} at step 1e-2, {fine:.3e} at step 1e-3; ratio {ratio:.2}"
        )),
    })
}
