pub mod capacity;
pub mod continuous;
pub mod discrete;
pub mod estimates;
pub mod function;
pub mod operators;
pub mod quadrature;
pub mod special;
