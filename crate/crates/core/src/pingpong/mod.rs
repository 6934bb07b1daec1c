//! Exact cyclotomic linear algebra and the ping-pong hypothesis checker.

pub mod a5;
pub mod cyclotomic;
pub mod linalg;
pub mod stau;

pub use a5::{a5_case_study, run_case_study, A5Fixture, A5Report};
pub use cyclotomic::{bass_at_root, cyclotomic_poly, modulus_compare, CyclotomicNumber};
pub use linalg::{CycloMatrix, CycloVector};
pub use stau::{check_stau, metabelian_stau, EigenPair, IntersectionCheck, StauReport};
