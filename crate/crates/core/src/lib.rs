//! Exact and numerical verification kernels for quantum difference
//! equations at roots of unity.

pub mod algebra;
pub mod series;
pub mod numeric;
pub mod qde;
pub mod vertex;
pub mod bethe;
pub mod frobenius;
pub mod pcurvature;
