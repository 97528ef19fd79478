pub mod calculus;
pub mod error;
pub mod feature_space;
pub mod group;
pub mod quadrature;
pub mod ridgelet;
pub mod targets;
