pub mod matrix;
pub mod subspace;
pub mod tensor;
