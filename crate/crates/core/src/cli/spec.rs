//! Spec files: a JSON tree naming the ground field, the algebras, the
//! bimodule and the window. Scalars are integers or `"p/q"` strings.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::arith::algebra::{make_extension_field, DivisionAlgebra};
use crate::arith::field::{Field, GroundField};
use crate::bimodule::{Bimodule, Side};
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::subspace::VectorSpace;
use crate::ncsym::Window;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_elem<F: Field>(&self, f: &F) -> Result<F::Elem> {
        match self {
            Scalar::Int(v) => Ok(f.from_i64(*v)),
            Scalar::Text(s) => f.parse(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Prime { prime: u64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    Base,
    /// Monic minimal polynomial, constant term first.
    Extension {
        minpoly: Vec<Scalar>,
    },
    /// `constants[i][j]` is the coordinate vector of `e_i e_j`.
    StructureConstants {
        constants: Vec<Vec<Vec<Scalar>>>,
        unit: Vec<Scalar>,
    },
}

type MatrixSpec = Vec<Vec<Scalar>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BimoduleSpec {
    VectorSpace {
        n: usize,
    },
    Extension {
        algebra: String,
        side: Side,
    },
    Outer {
        left: String,
        right: String,
    },
    Explicit {
        left: String,
        right: String,
        kdim: usize,
        left_action: Vec<MatrixSpec>,
        right_action: Vec<MatrixSpec>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub field: FieldSpec,
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    pub bimodule: BimoduleSpec,
    pub window: (i64, i64),
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub budget: Option<u128>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl InputSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: InputSpec = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if spec.window.0 > spec.window.1 {
            return Err(parse_err(format!(
                "window [{}, {}] is empty",
                spec.window.0, spec.window.1
            )));
        }
        Ok(spec)
    }

    pub fn ground_field(&self) -> Result<GroundField> {
        match &self.field {
            FieldSpec::Named(s) if s == "Q" || s == "QQ" => Ok(GroundField::Rationals),
            FieldSpec::Named(s) => Err(parse_err(format!("unknown field {s:?}"))),
            FieldSpec::Prime { prime } => GroundField::prime(*prime).map_err(|e| parse_err(e.to_string())),
        }
    }

    pub fn window(&self) -> Window {
        let w = Window::new(self.window.0, self.window.1);
        match self.max_degree {
            Some(d) => w.with_max_degree(d),
            None => w,
        }
    }

    fn algebra<F: Field>(&self, f: &F, name: &str) -> Result<DivisionAlgebra<F>> {
        let spec = self
            .algebras
            .get(name)
            .ok_or_else(|| parse_err(format!("unknown algebra {name:?}")))?;
        let elems = |v: &[Scalar]| v.iter().map(|s| s.to_elem(f)).collect::<Result<Vec<_>>>();
        let alg = match spec {
            AlgebraSpec::Base => DivisionAlgebra::base(f),
            AlgebraSpec::Extension { minpoly } => make_extension_field(f, &elems(minpoly)?)?,
            AlgebraSpec::StructureConstants { constants, unit } => {
                let c = constants
                    .iter()
                    .map(|row| row.iter().map(|v| elems(v)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                DivisionAlgebra::new(f, name, c, elems(unit)?)?
            }
        };
        Ok(alg.with_name(name))
    }

    pub fn bimodule<F: Field>(&self, f: &F) -> Result<Bimodule<F>> {
        match &self.bimodule {
            BimoduleSpec::VectorSpace { n } => {
                if *n == 0 {
                    return Err(parse_err("vector space dimension must be positive"));
                }
                Ok(Bimodule::vector_space(f, *n))
            }
            BimoduleSpec::Extension { algebra, side } => Ok(Bimodule::from_algebra(&self.algebra(f, algebra)?, *side)),
            BimoduleSpec::Outer { left, right } => {
                Ok(Bimodule::outer(&self.algebra(f, left)?, &self.algebra(f, right)?))
            }
            BimoduleSpec::Explicit {
                left,
                right,
                kdim,
                left_action,
                right_action,
            } => {
                let matrices = |ms: &[MatrixSpec]| -> Result<Vec<Matrix<F>>> {
                    ms.iter()
                        .map(|m| {
                            if m.len() != *kdim {
                                return Err(parse_err(format!(
                                    "action matrix has {} rows, expected {kdim}",
                                    m.len()
                                )));
                            }
                            let rows = m
                                .iter()
                                .map(|r| r.iter().map(|s| s.to_elem(f)).collect::<Result<Vec<_>>>())
                                .collect::<Result<Vec<_>>>()?;
                            Matrix::from_rows(f, rows, *kdim).map_err(|e| parse_err(e.to_string()))
                        })
                        .collect()
                };
                Bimodule::new(
                    self.algebra(f, left)?,
                    self.algebra(f, right)?,
                    VectorSpace::standard(*kdim),
                    matrices(left_action)?,
                    matrices(right_action)?,
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::Rationals;

    #[test]
    fn parses_shorthands() {
        let s = InputSpec::parse(
            r#"{"field": "Q", "algebras": {"L": {"kind": "extension", "minpoly": [-2, 0, 0, 0, 1]}},
                "bimodule": {"kind": "extension", "algebra": "L", "side": "right"}, "window": [0, 3]}"#,
        )
        .unwrap();
        let m = s.bimodule(&Rationals).unwrap();
        assert_eq!((m.left_rank(), m.right_rank()), (4, 1));
    }

    #[test]
    fn explicit_bimodule_and_errors() {
        let text = r#"{"field": {"prime": 5}, "algebras": {"k": {"kind": "base"}},
            "bimodule": {"kind": "explicit", "left": "k", "right": "k", "kdim": 2,
                         "left_action": [[[1, 0], [0, 1]]], "right_action": [[["1", "0"], ["0", "1"]]]},
            "window": [0, 2]}"#;
        let s = InputSpec::parse(text).unwrap();
        assert_eq!(s.ground_field().unwrap().name(), "GF(5)");
        assert!(InputSpec::parse("{").is_err());
        assert!(InputSpec::parse(&text.replace("[0, 2]", "[2, 0]")).is_err());
        let bad = InputSpec::parse(&text.replace("\"k\", \"right\"", "\"x\", \"right\"")).unwrap();
        assert!(matches!(bad.bimodule(&Rationals), Err(Error::Parse(_))));
    }
}
