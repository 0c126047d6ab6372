pub mod arith;
pub mod bimodule;
pub mod cli;
pub mod error;
pub mod gorenstein;
pub mod linear;
pub mod ncsym;
pub mod zhang;

pub use arith::algebra::{make_extension_field, AlgebraElement, DivisionAlgebra};
pub use arith::field::{Field, GroundField, PrimeField, Rationals};
pub use bimodule::{Bimodule, DualTower, Side};
pub use error::{Error, Result};
pub use linear::matrix::Matrix;
pub use linear::subspace::{quotient_map, LinearMap, Quotient, Subspace, VectorSpace};
pub use linear::tensor::{tensor_over_division_ring, ModuleView, TensorProduct};
pub use ncsym::{BuildOptions, Window, ZAlgebraWindow};
