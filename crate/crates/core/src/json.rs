//! JSON wire formats for matrices, block-diagonal elements and maps.
//!
//! ```text
//! matrix   {"rows": 2, "cols": 2, "re": [[..], [..]], "im": [[..], [..]]}
//! element  {"shape": [2, 1], "blocks": [matrix, matrix]}
//! map      {"kind": "block_trace", "shape": [2, 1]}
//!          {"kind": "doubling", "shape": [4, 2], "inner": map}
//! ```
//!
//! `im` may be omitted on input. A bare matrix is accepted wherever an element is
//! expected and read as a single block.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, BlockDiagonalElement, MapKind, TracialMap};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix<f64>) -> Self {
        let grid = |part: fn(&Complex<f64>) -> f64| {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| part(&m[(i, j)])).collect()).collect()
        };
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: grid(|z| z.re),
            im: Some(grid(|z| z.im)),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix<f64>> {
        let check = |grid: &Vec<Vec<f64>>, part: &str| -> Result<()> {
            if grid.len() != self.rows || grid.iter().any(|r| r.len() != self.cols) {
                return Err(Error::Parse(format!(
                    "`{part}` must be {}x{} to match rows/cols",
                    self.rows, self.cols
                )));
            }
            if grid.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("`{part}` contains a non-finite entry")));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        if let Some(im) = &self.im {
            check(im, "im")?;
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub shape: Vec<usize>,
    pub blocks: Vec<MatrixJson>,
}

impl ElementJson {
    pub fn from_element(x: &BlockDiagonalElement<f64>) -> Self {
        Self {
            shape: x.shape().block_dims().to_vec(),
            blocks: x.blocks().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_element(&self) -> Result<BlockDiagonalElement<f64>> {
        let shape = AlgebraShape::new(self.shape.clone())?;
        let blocks = self.blocks.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        BlockDiagonalElement::new(shape, blocks)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyElement {
    Element(ElementJson),
    Matrix(MatrixJson),
}

/// Reads an element, or a bare matrix as a one-block element.
pub fn parse_element(text: &str) -> Result<BlockDiagonalElement<f64>> {
    let any: AnyElement = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("expected matrix or block-element JSON: {e}")))?;
    match any {
        AnyElement::Element(e) => e.to_element(),
        AnyElement::Matrix(m) => BlockDiagonalElement::single(m.to_matrix()?),
    }
}

pub fn element_to_json(x: &BlockDiagonalElement<f64>) -> String {
    serde_json::to_string(&ElementJson::from_element(x)).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub kind: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<MapJson>>,
}

impl TryFrom<MapJson> for TracialMap {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<Self> {
        let map = match (j.kind, j.inner) {
            (MapKind::Doubling, Some(inner)) => TracialMap::doubling(TracialMap::try_from(*inner)?)?,
            (MapKind::Doubling, None) => {
                return Err(Error::Parse("a doubling map needs an `inner` map".into()));
            }
            (_, Some(_)) => return Err(Error::Parse("only doubling maps take an `inner` map".into())),
            (kind, None) => {
                let dims = j.shape.clone().ok_or_else(|| Error::Parse("map needs a `shape`".into()))?;
                let shape = AlgebraShape::new(dims)?;
                match kind {
                    MapKind::ScalarTrace => TracialMap::ScalarTrace(shape),
                    MapKind::BlockTrace => TracialMap::BlockTrace(shape),
                    MapKind::CenterExpectation => TracialMap::CenterExpectation(shape),
                    MapKind::Doubling => unreachable!("handled above"),
                }
            }
        };
        if let Some(dims) = j.shape {
            if map.domain_shape().block_dims() != dims.as_slice() {
                return Err(Error::ShapeMismatch {
                    expected: map.domain_shape().block_dims().to_vec(),
                    found: dims,
                });
            }
        }
        Ok(map)
    }
}

impl From<TracialMap> for MapJson {
    fn from(map: TracialMap) -> Self {
        let shape = Some(map.domain_shape().block_dims().to_vec());
        match map {
            TracialMap::Doubling(inner) => MapJson {
                kind: MapKind::Doubling,
                shape,
                inner: Some(Box::new(MapJson::from(*inner))),
            },
            other => MapJson {
                kind: other.kind(),
                shape,
                inner: None,
            },
        }
    }
}

pub fn parse_map(text: &str) -> Result<TracialMap> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("map JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn matrix_round_trip() {
        let m = pauli::y::<f64>();
        let text = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":2,"re":[[0.0,0.0],[0.0,0.0]],"im":[[0.0,-1.0],[1.0,0.0]]}"#);
        assert_eq!(parse_element(&text).unwrap().block(0), &m);
    }

    #[test]
    fn imaginary_part_optional() {
        let x = parse_element(r#"{"rows":2,"cols":2,"re":[[0.75,0],[0,0.25]]}"#).unwrap();
        assert_eq!(x.block(0), &ComplexMatrix::from_real_diagonal(&[0.75, 0.25]));
    }

    #[test]
    fn element_round_trip() {
        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        let x = BlockDiagonalElement::new(shape, vec![pauli::x(), ComplexMatrix::scalar(3.0)]).unwrap();
        assert_eq!(parse_element(&element_to_json(&x)).unwrap(), x);
    }

    #[test]
    fn malformed_inputs_rejected() {
        for bad in [
            r#"{"rows":2,"cols":2,"re":[[1,0]]}"#,
            r#"{"rows":1,"cols":2,"re":[[1,0]]}"#,
            r#"{"shape":[2],"blocks":[]}"#,
            r#"[1,2]"#,
        ] {
            assert!(parse_element(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn maps_round_trip() {
        let shape = AlgebraShape::new(vec![2, 2]).unwrap();
        for kind in MapKind::ALL {
            let map = kind.build(&shape).unwrap();
            let text = serde_json::to_string(&map).unwrap();
            assert_eq!(parse_map(&text).unwrap(), map, "{text}");
        }
        let m = parse_map(r#"{"kind":"scalar_trace","shape":[2]}"#).unwrap();
        assert_eq!(m, TracialMap::ScalarTrace(AlgebraShape::new(vec![2]).unwrap()));
        let d = parse_map(r#"{"kind":"doubling","inner":{"kind":"block_trace","shape":[1,2]}}"#).unwrap();
        assert_eq!(d.domain_shape().block_dims(), &[2, 4]);
        assert!(parse_map(r#"{"kind":"doubling","shape":[3],"inner":{"kind":"block_trace","shape":[1,2]}}"#).is_err());
        assert!(parse_map(r#"{"kind":"doubling"}"#).is_err());
        assert!(parse_map(r#"{"kind":"trace","shape":[2]}"#).is_err());
    }
}
