//! Partial commutative rigs: carriers, partial sums over closed-form families, and the axiom suite.

mod family;
mod scalar;
mod suite;

pub use family::{
    abs_family, normalize_tail, partition_sums, scale_family, sum_finite, tail_sum, try_sum, unroll_tail,
    FamilySpec, Partial, PartitionSpec, SumOutcome, Tail, TailPartition,
};
pub use scalar::{q, qi, Ball, Carrier, PcrInstance, Scalar, ALL_CARRIERS, Q};
pub use suite::run_pcm_suite;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcrError {
    #[error("carrier mismatch: expected {}, found {}", expected.tag(), found.tag())]
    CarrierMismatch { expected: Carrier, found: Carrier },
    #[error("unknown carrier tag `{0}`")]
    UnknownCarrier(String),
    #[error("`{literal}` is not a scalar of carrier {}", carrier.tag())]
    BadLiteral { carrier: Carrier, literal: String },
    #[error("tail {tail} is not allowed on carrier {}", carrier.tag())]
    BadTail { carrier: Carrier, tail: String },
    #[error("duplicate family label `{0}`")]
    DuplicateLabel(String),
    #[error("carrier {} has no absolute value", .0.tag())]
    NotAbsolute(Carrier),
    #[error("{0} is not invertible")]
    NotInvertible(String),
}
