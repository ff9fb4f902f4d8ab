//! JSON form of a polytope:
//!
//! ```json
//! { "dim": 2, "vertices": [[0,0],[1,0],[0,1]],
//!   "faces": [ {"id": 0, "verts": [0,1], "facets": []}, ... ], "top": 6 }
//! ```
//!
//! Shorthands `{"simplex": d}`, `{"simplex": [[..], ..]}`, `{"cube": d}`,
//! `{"polygon": [[..], ..]}` and `{"product": [a, b]}` are accepted wherever a
//! polytope is expected.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::builders::{cartesian_product, cube, polygon, simplex, simplex_with_vertices};
use super::polytope::{FaceInput, Polytope};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceJson {
    pub id: usize,
    pub verts: Vec<usize>,
    #[serde(default)]
    pub facets: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<FaceJson>,
    pub top: usize,
}

pub fn polytope_from_value(value: &Value) -> Result<Polytope> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::ParseError("polytope must be a JSON object".into()))?;
    if let Some(s) = obj.get("simplex") {
        return match s {
            Value::Number(n) => Ok(simplex(as_dim(n)?)),
            Value::Array(_) => Ok(simplex_with_vertices(points(s)?)),
            _ => Err(Error::ParseError("simplex expects a dimension or a vertex list".into())),
        };
    }
    if let Some(c) = obj.get("cube") {
        let n = c.as_u64().ok_or_else(|| Error::ParseError("cube expects a dimension".into()))?;
        return Ok(cube(n as usize));
    }
    if let Some(p) = obj.get("polygon") {
        let pts = points(p)?;
        if pts.len() < 3 {
            return Err(Error::ParseError("polygon needs at least three vertices".into()));
        }
        let poly = polygon(pts);
        poly.validate()?;
        return Ok(poly);
    }
    if let Some(p) = obj.get("product") {
        let parts = p
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::ParseError("product expects two polytopes".into()))?;
        let a = polytope_from_value(&parts[0])?;
        let b = polytope_from_value(&parts[1])?;
        return Ok(cartesian_product(&a, &b).poly);
    }
    let raw: PolytopeJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::ParseError(e.to_string()))?;
    if raw.vertices.iter().any(|v| v.len() != raw.dim) {
        return Err(Error::ParseError(format!("vertices must have {} coordinates", raw.dim)));
    }
    let faces = raw
        .faces
        .into_iter()
        .map(|f| FaceInput { id: f.id, verts: f.verts, facets: f.facets })
        .collect();
    Polytope::from_lattice(raw.vertices, faces, raw.top)
}

pub fn polytope_from_json(text: &str) -> Result<Polytope> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    polytope_from_value(&v)
}

pub fn polytope_to_json(poly: &Polytope) -> PolytopeJson {
    PolytopeJson {
        dim: poly.ambient_dim(),
        vertices: poly.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
        faces: poly
            .faces()
            .iter()
            .map(|f| FaceJson { id: f.id, verts: f.vertex_ids.clone(), facets: f.facet_ids.clone() })
            .collect(),
        top: poly.top(),
    }
}

fn as_dim(n: &serde_json::Number) -> Result<usize> {
    n.as_u64()
        .map(|d| d as usize)
        .ok_or_else(|| Error::ParseError(format!("invalid dimension {n}")))
}

fn points(v: &Value) -> Result<Vec<Vec<f64>>> {
    serde_json::from_value(v.clone()).map_err(|e| Error::ParseError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_full_form() {
        let p = cube(2);
        let text = serde_json::to_string(&polytope_to_json(&p)).unwrap();
        let q = polytope_from_json(&text).unwrap();
        assert_eq!(q.f_vector(), p.f_vector());
        assert_eq!(q.vertices(), p.vertices());
    }

    #[test]
    fn shorthands() {
        assert_eq!(polytope_from_json(r#"{"simplex": 3}"#).unwrap().f_vector(), vec![4, 6, 4, 1]);
        assert_eq!(polytope_from_json(r#"{"cube": 2}"#).unwrap().f_vector(), vec![4, 4, 1]);
        let p = polytope_from_json(r#"{"product": [{"simplex": 1}, {"simplex": [[0,0],[1,0],[0,1]]}]}"#).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.ambient_dim(), 3);
        assert!(polytope_from_json(r#"{"polygon": [[0,0],[1,0]]}"#).is_err());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(polytope_from_json("[1,2]"), Err(Error::ParseError(_))));
        assert!(matches!(
            polytope_from_json(r#"{"dim": 2, "vertices": [[0,0,0]], "faces": [], "top": 0}"#),
            Err(Error::ParseError(_))
        ));
    }
}
