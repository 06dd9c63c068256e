pub mod error;
pub mod expr;
pub mod jet;
pub mod tensor;
pub mod metric;
pub mod connection;
pub mod curvature;
pub mod diagnostics;
pub mod matter;
pub mod quadrature;
pub mod iz;
pub mod samples;
pub mod verify;
