//! Web models of linear logic over partial commutative rigs.
//!
//! Everything is exact: scalars are booleans, the two-point coherence carrier, or
//! arbitrary-precision rationals, and every law check is an equality.

pub mod families;
pub mod io;
pub mod pcr;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod laws;
pub mod ll;
pub mod spaces;
pub mod summability;
pub mod taylor;
