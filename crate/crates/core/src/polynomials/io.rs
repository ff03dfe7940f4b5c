//! JSON input files.
//!
//! ```json
//! {"kind":"matrix","n":3,"entries":[[1,0,0],[0,1,0],[0,0,1]]}
//! {"kind":"tuple","n":2,"matrices":[{"re":[[1,0],[0,0]]},{"re":[[0,0],[0,1]]}]}
//! {"kind":"sparse","n":4,"m":4,"terms":[{"exp":[1,1,1,1],"coef":1}]}
//! ```
//!
//! Matrix and tuple scalars may be JSON numbers or rational strings such as
//! `"1/3"`; rational strings keep the exact value for the rational code paths.

use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{build_determinantal, build_multilinear, HermitianTuple, NonnegativeMatrix, PolynomialOracle, SparsePolynomial};
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, rational_from_f64};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            Scalar::Number(v) if v.is_finite() => Ok(rational_from_f64(*v)),
            Scalar::Number(v) => Err(Error::invalid(format!("non-finite entry {v}"))),
            Scalar::Text(s) => {
                parse_rational(s).ok_or_else(|| Error::invalid(format!("cannot parse {s:?} as a rational number")))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixPart {
    re: Vec<Vec<Scalar>>,
    #[serde(default)]
    im: Option<Vec<Vec<Scalar>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Term {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum InputFile {
    Matrix { n: usize, entries: Vec<Vec<Scalar>> },
    Tuple { n: usize, matrices: Vec<MatrixPart> },
    Sparse { n: usize, m: usize, terms: Vec<Term> },
}

/// A validated input file.
#[derive(Debug, Clone)]
pub enum LoadedInput {
    Matrix(NonnegativeMatrix),
    Tuple(HermitianTuple),
    Sparse(SparsePolynomial),
}

fn square(rows: &[Vec<Scalar>], n: usize, what: &str) -> Result<Vec<Vec<BigRational>>> {
    if rows.len() != n {
        return Err(Error::invalid(format!("{what} has {} rows, expected n = {n}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n {
                return Err(Error::invalid(format!("{what} row {i} has {} entries, expected {n}", row.len())));
            }
            row.iter().map(Scalar::to_rational).collect()
        })
        .collect()
}

impl LoadedInput {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedInput::Matrix(_) => "matrix",
            LoadedInput::Tuple(_) => "tuple",
            LoadedInput::Sparse(_) => "sparse",
        }
    }

    pub fn oracle(&self) -> Result<PolynomialOracle> {
        match self {
            LoadedInput::Matrix(a) => build_multilinear(a),
            LoadedInput::Tuple(t) => build_determinantal(t),
            LoadedInput::Sparse(s) => Ok(s.oracle()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            LoadedInput::Matrix(a) => json!({"kind": "matrix", "n": a.n(), "entries": a.rows()}),
            LoadedInput::Tuple(t) => {
                let mats: Vec<Value> = t
                    .matrices()
                    .iter()
                    .map(|m| {
                        let part = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
                            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
                        };
                        if t.is_real() {
                            json!({"re": part(|z| z.re)})
                        } else {
                            json!({"re": part(|z| z.re), "im": part(|z| z.im)})
                        }
                    })
                    .collect();
                json!({"kind": "tuple", "n": t.n(), "matrices": mats})
            }
            LoadedInput::Sparse(s) => {
                use super::Polynomial;
                let terms: Vec<Value> =
                    s.terms().iter().map(|(e, c)| json!({"exp": e, "coef": c})).collect();
                json!({"kind": "sparse", "n": s.degree(), "m": s.num_vars(), "terms": terms})
            }
        }
    }
}

/// Parse and validate an input document.
pub fn parse_input(text: &str) -> Result<LoadedInput> {
    let file: InputFile = serde_json::from_str(text)?;
    match file {
        InputFile::Matrix { n, entries } => {
            if n == 0 {
                return Err(Error::invalid("n must be positive"));
            }
            let rows = square(&entries, n, "matrix")?;
            Ok(LoadedInput::Matrix(NonnegativeMatrix::from_rationals(&rows)?))
        }
        InputFile::Tuple { n, matrices } => {
            if n == 0 {
                return Err(Error::invalid("n must be positive"));
            }
            if matrices.len() != n {
                return Err(Error::invalid(format!("tuple has {} matrices, expected n = {n}", matrices.len())));
            }
            let parts = matrices
                .iter()
                .enumerate()
                .map(|(k, part)| {
                    let re = square(&part.re, n, &format!("matrix {k} (re)"))?;
                    let im = match &part.im {
                        Some(im) => square(im, n, &format!("matrix {k} (im)"))?,
                        None => vec![vec![BigRational::zero(); n]; n],
                    };
                    Ok((re, im))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedInput::Tuple(HermitianTuple::from_rationals(parts)?))
        }
        InputFile::Sparse { n, m, terms } => {
            if n == 0 || m == 0 {
                return Err(Error::invalid("n and m must be positive"));
            }
            let poly = SparsePolynomial::new(m, n, terms.into_iter().map(|t| (t.exp, t.coef)))?;
            Ok(LoadedInput::Sparse(poly))
        }
    }
}

pub fn load_input(path: &Path) -> Result<LoadedInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text)
}
