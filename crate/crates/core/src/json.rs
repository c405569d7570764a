//! JSON wire formats.
//!
//! A matrix is a row-major array of rows, each entry a `[re, im]` pair:
//! `[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]` is `I_2`. Measures are tagged by
//! `"kind"`:
//!
//! ```json
//! {"kind": "atomic", "p": 1, "atoms": [0.0, 3.14159], "weights": [[[[0.5, 0]]], [[[0.5, 0]]]]}
//! {"kind": "grid", "p": 1, "grid_size": 4, "densities": [...], "singular": null}
//! ```
//!
//! A Verblunsky sequence is `{"p": 2, "coeffs": [matrix, ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};
use crate::measures::{AtomicMatrixMeasure, GridDensityMeasure, MatrixAtoms, MatrixMeasure};
use crate::mopuc::VerblunskySeq;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireMatrix(pub Vec<Vec<[f64; 2]>>);

impl From<&ComplexMatrix> for WireMatrix {
    fn from(m: &ComplexMatrix) -> Self {
        WireMatrix(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }
}

impl TryFrom<&WireMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(w: &WireMatrix) -> Result<Self> {
        let rows = w.0.len();
        let cols = w.0.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one entry".into()));
        }
        if w.0.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("rows have different lengths".into()));
        }
        if w.0.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| c64(w.0[i][j][0], w.0[i][j][1])))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let wire: WireMatrix = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad matrix JSON: {e}")))?;
    ComplexMatrix::try_from(&wire)
}

pub fn matrix_to_value(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(WireMatrix::from(m)).expect("matrices serialize")
}

fn matrices(ws: &[WireMatrix]) -> Result<Vec<ComplexMatrix>> {
    ws.iter().map(ComplexMatrix::try_from).collect()
}

fn wires(ms: &[ComplexMatrix]) -> Vec<WireMatrix> {
    ms.iter().map(WireMatrix::from).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct WireAtoms {
    p: usize,
    atoms: Vec<f64>,
    weights: Vec<WireMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum WireMeasure {
    Atomic {
        p: usize,
        atoms: Vec<f64>,
        weights: Vec<WireMatrix>,
    },
    Grid {
        p: usize,
        grid_size: usize,
        densities: Vec<WireMatrix>,
        #[serde(default)]
        singular: Option<WireAtoms>,
    },
}

/// Either kind of measure, as read from or written to JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMeasure {
    Atomic(AtomicMatrixMeasure),
    Grid(GridDensityMeasure),
}

impl MatrixMeasure for AnyMeasure {
    fn dim(&self) -> usize {
        match self {
            AnyMeasure::Atomic(m) => m.dim(),
            AnyMeasure::Grid(m) => m.dim(),
        }
    }

    fn moment(&self, l: i64) -> ComplexMatrix {
        match self {
            AnyMeasure::Atomic(m) => m.moment(l),
            AnyMeasure::Grid(m) => m.moment(l),
        }
    }
}

impl AnyMeasure {
    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireMeasure =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad measure JSON: {e}")))?;
        match wire {
            WireMeasure::Atomic { p, atoms, weights } => {
                Ok(AnyMeasure::Atomic(AtomicMatrixMeasure::new(p, atoms, matrices(&weights)?)?))
            }
            WireMeasure::Grid { p, grid_size, densities, singular } => {
                if densities.len() != grid_size {
                    return Err(Error::DimensionMismatch(format!(
                        "grid_size is {grid_size} but {} densities were given",
                        densities.len()
                    )));
                }
                let singular = singular
                    .map(|s| MatrixAtoms::new(s.p, s.atoms, matrices(&s.weights)?))
                    .transpose()?;
                Ok(AnyMeasure::Grid(GridDensityMeasure::new(p, matrices(&densities)?, singular)?))
            }
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        let wire = match self {
            AnyMeasure::Atomic(m) => WireMeasure::Atomic {
                p: m.dim(),
                atoms: m.atoms().to_vec(),
                weights: wires(m.weights()),
            },
            AnyMeasure::Grid(m) => WireMeasure::Grid {
                p: m.dim(),
                grid_size: m.grid_size(),
                densities: wires(m.densities()),
                singular: m.singular().map(|s| WireAtoms {
                    p: s.dim(),
                    atoms: s.atoms().to_vec(),
                    weights: wires(s.weights()),
                }),
            },
        };
        serde_json::to_value(wire).expect("measures serialize")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireVerblunsky {
    p: usize,
    coeffs: Vec<WireMatrix>,
}

pub fn verblunsky_to_value(seq: &VerblunskySeq) -> serde_json::Value {
    serde_json::to_value(WireVerblunsky { p: seq.dim(), coeffs: wires(seq.coeffs()) }).expect("sequences serialize")
}

pub fn parse_verblunsky(text: &str) -> Result<VerblunskySeq> {
    let wire: WireVerblunsky =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad Verblunsky JSON: {e}")))?;
    VerblunskySeq::new(wire.p, matrices(&wire.coeffs)?)
}
