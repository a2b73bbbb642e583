//! Analysis on quaternionic slices: moment measures, a Fock-type coefficient
//! model, coherent states and reproducing kernels, slice-wise operators, and a
//! direct-integral field over the hemisphere of slice axes.

pub mod coherent;
pub mod field;
pub mod fock;
pub mod integrate;
pub mod measure;
pub mod operators;
pub mod quat;
mod sampler;

pub use coherent::{CoherentState, CsError, KernelReport, ResolutionDomain, WeylDomain, WeylMode};
pub use field::{
    AxisStats, BlockOperator, FieldError, HilbertField, ScaleReport, SliceSample, SliceSampling,
};
pub use fock::{FockError, FockVector};
pub use integrate::{HemisphereRule, ThetaRule};
pub use measure::{MeasureError, MomentMeasure, RadialRule};
pub use operators::{
    CommutatorReport, GeneratorReport, OpError, OperatorAxis, SliceOperator, Transporter,
};
pub use quat::{Quaternion, QuatError, SliceAxis, SliceCoords, WeightMode};

/// Size of the interior coefficient block regarded as truncation-safe for
/// identity checks at top level `n_max`: indices `0..interior_limit`,
/// three quarters of the levels. Truncation leakage concentrates in the
/// top quarter.
pub fn interior_limit(n_max: usize) -> usize {
    3 * (n_max + 1) / 4
}
