pub mod algebra;
pub mod field;
mod poly;
