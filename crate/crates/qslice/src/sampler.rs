//! Small deterministic sampler used by report-style library routines.
//!
//! Library functions that need random probe points (kernel property reports,
//! for instance) must be reproducible from a single seed without dragging a
//! RNG dependency into the public API. SplitMix64 is the standard 64-bit
//! mixer; it is tiny, splittable by construction, and more than good enough
//! for picking probe points.

use crate::quat::{Quaternion, SliceAxis, SliceCoords};

pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` with 53 significant bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform draw from the solid 4-ball of the given radius
    /// (rejection from the bounding cube; acceptance rate ~0.31).
    pub fn ball(&mut self, radius: f64) -> Quaternion {
        loop {
            let q = Quaternion::new(
                self.range(-1.0, 1.0),
                self.range(-1.0, 1.0),
                self.range(-1.0, 1.0),
                self.range(-1.0, 1.0),
            );
            if q.norm_sqr() <= 1.0 {
                return q * radius;
            }
        }
    }

    /// Area-uniform axis on the canonical hemisphere.
    pub fn axis(&mut self) -> SliceAxis {
        // cos(theta1) uniform in (0, 1] keeps the axis strictly canonical.
        let u = 1.0 - self.uniform();
        let theta1 = u.acos();
        let phi = self.range(0.0, std::f64::consts::TAU);
        SliceAxis::from_zenith(theta1, phi)
    }

    /// Point on the given slice, uniform angle, radius uniform in `[0, rmax)`.
    pub fn slice_point(&mut self, axis: &SliceAxis, rmax: f64) -> SliceCoords {
        let r = rmax * self.uniform();
        let t = self.range(0.0, std::f64::consts::TAU);
        SliceCoords::new(r * t.cos(), r * t.sin(), *axis)
    }
}
