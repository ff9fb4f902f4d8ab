use std::collections::{BTreeMap, HashMap};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;

pub type FaceId = usize;

/// One node of a face lattice. `vertex_ids` is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub vertex_ids: Vec<usize>,
    pub dim: usize,
    pub facet_ids: Vec<FaceId>,
}

impl Face {
    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertex_ids.binary_search(&v).is_ok()
    }
}

/// Face record as supplied by a caller; ids are arbitrary labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceInput {
    pub id: usize,
    pub verts: Vec<usize>,
    pub facets: Vec<usize>,
}

/// A convex polytope given by its vertices together with its face lattice.
///
/// Faces are stored densely; `Face::id` is the position in [`Polytope::faces`].
#[derive(Debug, Clone)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<DVector<f64>>,
    faces: Vec<Face>,
    top: FaceId,
    index: HashMap<Vec<usize>, FaceId>,
}

impl Polytope {
    /// Builds and validates a polytope from caller-supplied lattice data.
    ///
    /// Missing 0-faces are added. A face of dimension ≥ 1 with an empty facet
    /// list gets its facets inferred from the listed faces one dimension lower.
    pub fn from_lattice(vertices: Vec<Vec<f64>>, faces: Vec<FaceInput>, top: usize) -> Result<Self> {
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(0);
        if vertices.is_empty() {
            return Err(Error::InvalidPolytope("no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != ambient {
                return Err(Error::InvalidPolytope(format!(
                    "vertex {i} has {} coordinates, expected {ambient}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPolytope(format!("vertex {i} is not finite")));
            }
        }
        let nv = vertices.len();
        let vertices: Vec<DVector<f64>> = vertices.into_iter().map(DVector::from_vec).collect();

        let mut label_to_pos: HashMap<usize, usize> = HashMap::new();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut raw_facets: Vec<Vec<usize>> = Vec::new();
        for f in &faces {
            if label_to_pos.insert(f.id, sets.len()).is_some() {
                return Err(Error::InvalidPolytope(format!("duplicate face id {}", f.id)));
            }
            let mut vs = f.verts.clone();
            vs.sort_unstable();
            vs.dedup();
            if vs.is_empty() {
                return Err(Error::InvalidPolytope(format!("face {} has no vertices", f.id)));
            }
            if let Some(&bad) = vs.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidPolytope(format!(
                    "face {} references vertex {bad} out of range",
                    f.id
                )));
            }
            sets.push(vs);
            raw_facets.push(f.facets.clone());
        }
        let top_pos = *label_to_pos
            .get(&top)
            .ok_or_else(|| Error::InvalidPolytope(format!("top face {top} is not listed")))?;

        let mut facet_pos: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
        for (k, fl) in raw_facets.iter().enumerate() {
            let mut out = Vec::with_capacity(fl.len());
            for l in fl {
                let p = *label_to_pos.get(l).ok_or_else(|| {
                    Error::InvalidPolytope(format!("face {} lists unknown facet {l}", faces[k].id))
                })?;
                out.push(p);
            }
            facet_pos.push(out);
        }

        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        for (k, s) in sets.iter().enumerate() {
            if index.insert(s.clone(), k).is_some() {
                return Err(Error::InvalidPolytope(format!("duplicate vertex set {s:?}")));
            }
        }
        // complete the 0-faces
        for v in 0..nv {
            if !index.contains_key(&vec![v]) {
                index.insert(vec![v], sets.len());
                sets.push(vec![v]);
                facet_pos.push(Vec::new());
            }
        }

        let mut dims = Vec::with_capacity(sets.len());
        for (k, s) in sets.iter().enumerate() {
            let d = affine_rank(&vertices, s);
            if s.len() == 1 && d != 0 {
                return Err(Error::DegenerateFace { face: k, rank: d, expected: 0 });
            }
            dims.push(d);
        }

        // infer missing facet lists
        let mut by_dim: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, &d) in dims.iter().enumerate() {
            by_dim.entry(d).or_default().push(k);
        }
        for k in 0..sets.len() {
            if dims[k] >= 1 && facet_pos[k].is_empty() {
                let lower = by_dim.get(&(dims[k] - 1)).cloned().unwrap_or_default();
                facet_pos[k] = lower
                    .into_iter()
                    .filter(|&c| is_subset(&sets[c], &sets[k]))
                    .collect();
            }
        }

        let faces: Vec<Face> = sets
            .into_iter()
            .zip(dims)
            .zip(facet_pos)
            .enumerate()
            .map(|(id, ((vertex_ids, dim), mut facet_ids))| {
                facet_ids.sort_unstable();
                facet_ids.dedup();
                Face { id, vertex_ids, dim, facet_ids }
            })
            .collect();

        let poly = Polytope { ambient, vertices, faces, top: top_pos, index };
        poly.validate()?;
        Ok(poly)
    }

    /// Assembles a polytope from trusted lattice data (builders, products).
    pub(crate) fn from_parts(vertices: Vec<DVector<f64>>, faces: Vec<Face>, top: FaceId) -> Self {
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(0);
        let index = faces.iter().map(|f| (f.vertex_ids.clone(), f.id)).collect();
        Polytope { ambient, vertices, faces, top, index }
    }

    /// Checks the lattice invariants: affine ranks, facet dimensions and
    /// inclusions, and that every ridge of a face lies in exactly two facets.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        let top = &self.faces[self.top];
        if top.vertex_ids.len() != nv {
            return Err(Error::InvalidPolytope("top face must contain every vertex".into()));
        }
        if self.faces.iter().any(|f| f.dim > top.dim) {
            return Err(Error::InvalidPolytope("a face exceeds the top dimension".into()));
        }
        for v in 0..nv {
            if !self.index.contains_key(&vec![v]) {
                return Err(Error::InvalidPolytope(format!("vertex {v} has no 0-face")));
            }
        }
        for f in &self.faces {
            let rank = affine_rank(&self.vertices, &f.vertex_ids);
            if rank != f.dim {
                return Err(Error::DegenerateFace { face: f.id, rank, expected: f.dim });
            }
            if f.dim == 0 {
                if !f.facet_ids.is_empty() {
                    return Err(Error::InvalidPolytope(format!("0-face {} lists facets", f.id)));
                }
                continue;
            }
            if f.facet_ids.len() < f.dim + 1 {
                return Err(Error::InvalidPolytope(format!(
                    "face {} has {} facets, a {}-face needs at least {}",
                    f.id,
                    f.facet_ids.len(),
                    f.dim,
                    f.dim + 1
                )));
            }
            for &g in &f.facet_ids {
                let g = &self.faces[g];
                if g.dim + 1 != f.dim || !is_subset(&g.vertex_ids, &f.vertex_ids) {
                    return Err(Error::InvalidPolytope(format!(
                        "face {} is not a facet of face {}",
                        g.id, f.id
                    )));
                }
            }
            if f.dim >= 2 {
                let mut ridge_count: HashMap<FaceId, usize> = HashMap::new();
                for &g in &f.facet_ids {
                    for &h in &self.faces[g].facet_ids {
                        *ridge_count.entry(h).or_default() += 1;
                    }
                }
                if let Some((&h, &c)) = ridge_count.iter().find(|(_, &c)| c != 2) {
                    return Err(Error::InvalidPolytope(format!(
                        "ridge {h} lies in {c} facets of face {} (expected 2)",
                        f.id
                    )));
                }
            } else {
                let covered: Vec<usize> =
                    f.facet_ids.iter().flat_map(|&g| self.faces[g].vertex_ids.clone()).collect();
                if f.facet_ids.len() != 2 || covered.len() != 2 || covered[0] == covered[1] {
                    return Err(Error::InvalidPolytope(format!("edge {} must have two vertex facets", f.id)));
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of the polytope itself (of its top face).
    pub fn dim(&self) -> usize {
        self.faces[self.top].dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DVector<f64> {
        &self.vertices[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn top(&self) -> FaceId {
        self.top
    }

    pub fn top_face(&self) -> &Face {
        &self.faces[self.top]
    }

    pub fn face_by_vertices(&self, verts: &[usize]) -> Option<FaceId> {
        let mut key = verts.to_vec();
        key.sort_unstable();
        key.dedup();
        self.index.get(&key).copied()
    }

    pub fn faces_of_dim(&self, j: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == j)
    }

    /// Face counts indexed by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim() + 1];
        for f in &self.faces {
            out[f.dim] += 1;
        }
        out
    }

    /// Facets of `face` that do not contain vertex `v`.
    pub fn facets_excluding(&self, face: FaceId, v: usize) -> Vec<FaceId> {
        self.faces[face]
            .facet_ids
            .iter()
            .copied()
            .filter(|&g| !self.faces[g].contains_vertex(v))
            .collect()
    }

    pub fn face_points(&self, face: FaceId) -> Vec<DVector<f64>> {
        self.faces[face].vertex_ids.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Largest vertex distance, used to scale tolerances.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

pub(crate) fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

pub(crate) fn affine_rank(vertices: &[DVector<f64>], ids: &[usize]) -> usize {
    if ids.len() <= 1 {
        return 0;
    }
    let o = &vertices[ids[0]];
    let cols: Vec<DVector<f64>> = ids[1..].iter().map(|&i| &vertices[i] - o).collect();
    linalg::rank(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_input() -> (Vec<Vec<f64>>, Vec<FaceInput>) {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let faces = vec![
            FaceInput { id: 10, verts: vec![0, 1], facets: vec![] },
            FaceInput { id: 11, verts: vec![1, 2], facets: vec![] },
            FaceInput { id: 12, verts: vec![2, 3], facets: vec![] },
            FaceInput { id: 13, verts: vec![3, 0], facets: vec![] },
            FaceInput { id: 20, verts: vec![0, 1, 2, 3], facets: vec![10, 11, 12, 13] },
        ];
        (verts, faces)
    }

    #[test]
    fn square_from_lattice_completes_vertices() {
        let (v, f) = square_input();
        let p = Polytope::from_lattice(v, f, 20).unwrap();
        assert_eq!(p.f_vector(), vec![4, 4, 1]);
        assert_eq!(p.dim(), 2);
        let e = p.face_by_vertices(&[3, 0]).unwrap();
        assert_eq!(p.face(e).facet_ids.len(), 2);
        let ex = p.facets_excluding(p.top(), 0);
        assert_eq!(ex.len(), 2);
    }

    #[test]
    fn missing_edge_is_rejected() {
        let (v, mut f) = square_input();
        f.remove(3);
        f.last_mut().unwrap().facets = vec![10, 11, 12];
        assert!(Polytope::from_lattice(v, f, 20).is_err());
    }

    #[test]
    fn collinear_face_is_degenerate() {
        let verts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let faces = vec![
            FaceInput { id: 0, verts: vec![0, 1], facets: vec![] },
            FaceInput { id: 1, verts: vec![1, 2], facets: vec![] },
            FaceInput { id: 2, verts: vec![0, 2], facets: vec![] },
            FaceInput { id: 3, verts: vec![0, 1, 2], facets: vec![0, 1, 2] },
        ];
        let err = Polytope::from_lattice(verts, faces, 3).unwrap_err();
        assert!(matches!(err, Error::InvalidPolytope(_) | Error::DegenerateFace { .. }));
    }

    #[test]
    fn unknown_top_is_rejected() {
        let (v, f) = square_input();
        assert!(Polytope::from_lattice(v, f, 99).is_err());
    }
}
