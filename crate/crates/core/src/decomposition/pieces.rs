use std::collections::BTreeSet;

use nalgebra::DVector;

use super::lattice::PyramidalLattice;
use crate::error::Result;
use crate::geometry::{
    affine_dim, detect_parallelotope, hull_descriptor_points, hull_volume, simplex_volume, FaceId,
    HullDescriptor, ParallelotopeShape, Polytope,
};

const CONVEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellShape {
    Simplex,
    Parallelotope(ParallelotopeShape),
    /// Convex, triangulated by `simplices`.
    Complex,
}

/// The singular part `A` of a hull piece: a convex union of apex simplices.
#[derive(Debug, Clone)]
pub struct ApexCell {
    /// Vertex ids, ascending.
    pub labels: Vec<usize>,
    pub points: Vec<DVector<f64>>,
    /// Simplices as indices into `points`, in the order they were produced.
    pub simplices: Vec<Vec<usize>>,
    pub shape: CellShape,
}

impl ApexCell {
    /// A cell from labelled points and a triangulation of their hull.
    /// `labels` need not be sorted; simplices refer to positions in it.
    pub fn new(labels: Vec<usize>, points: Vec<DVector<f64>>, simplices: Vec<Vec<usize>>) -> Self {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        let mut inv = vec![0; labels.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        let points: Vec<DVector<f64>> = order.iter().map(|&i| points[i].clone()).collect();
        let simplices: Vec<Vec<usize>> =
            simplices.into_iter().map(|s| s.into_iter().map(|i| inv[i]).collect()).collect();
        let shape = if simplices.len() == 1 && simplices[0].len() == points.len() {
            CellShape::Simplex
        } else if let Some(p) = detect_parallelotope(&points) {
            CellShape::Parallelotope(p)
        } else {
            CellShape::Complex
        };
        ApexCell { labels, points, simplices, shape }
    }

    pub fn dim(&self) -> usize {
        self.simplices.first().map_or(0, |s| s.len() - 1)
    }

    pub fn simplex_points(&self, i: usize) -> Vec<DVector<f64>> {
        self.simplices[i].iter().map(|&j| self.points[j].clone()).collect()
    }

    pub fn volume(&self) -> f64 {
        if self.dim() == 0 {
            return 1.0;
        }
        (0..self.simplices.len()).map(|i| simplex_volume(&self.simplex_points(i))).sum()
    }
}

/// `conv(A, B)` with apex cell `A` and base face `B`; `multiplicity` counts
/// the lattice paths merged into it.
#[derive(Debug, Clone)]
pub struct HullPiece {
    pub apex: ApexCell,
    pub base: FaceId,
    pub descriptor: HullDescriptor,
    pub multiplicity: usize,
}

/// True when the simplices tile a convex set of their common dimension.
fn union_is_convex(points: &[DVector<f64>], simplices: &[Vec<usize>]) -> bool {
    let dim = simplices[0].len() - 1;
    if simplices.iter().any(|s| s.len() != dim + 1) || affine_dim(points) != dim {
        return false;
    }
    if simplices.len() == 1 {
        return true;
    }
    let summed: f64 = simplices
        .iter()
        .map(|s| simplex_volume(&s.iter().map(|&i| points[i].clone()).collect::<Vec<_>>()))
        .sum();
    let hull = hull_volume(points);
    (hull - summed).abs() <= CONVEX_TOL * hull.max(summed)
}

/// Groups the lattice paths by leaf. All paths ending at a leaf become one
/// piece when their apex simplices form a convex cell; otherwise each path
/// is its own piece.
pub fn merge_paths(poly: &Polytope, lat: &PyramidalLattice) -> Result<Vec<HullPiece>> {
    let mut pieces = Vec::new();
    for leaf in lat.leaves() {
        let base = lat.nodes[leaf].face;
        let base_points = poly.face_points(base);
        let paths = lat.paths_to(leaf);

        let labels: Vec<usize> = paths.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos = |v: usize| labels.binary_search(&v).unwrap();
        let points: Vec<DVector<f64>> = labels.iter().map(|&v| poly.vertex(v).clone()).collect();
        let simplices: Vec<Vec<usize>> = paths.iter().map(|p| p.iter().map(|&v| pos(v)).collect()).collect();

        let cells: Vec<(ApexCell, usize)> = if union_is_convex(&points, &simplices) {
            vec![(ApexCell::new(labels, points, simplices), paths.len())]
        } else {
            paths
                .iter()
                .map(|p| {
                    let pts = p.iter().map(|&v| poly.vertex(v).clone()).collect();
                    (ApexCell::new(p.clone(), pts, vec![(0..p.len()).collect()]), 1)
                })
                .collect()
        };
        for (apex, multiplicity) in cells {
            let descriptor = hull_descriptor_points(&apex.points, &base_points)?;
            pieces.push(HullPiece { apex, base, descriptor, multiplicity });
        }
    }
    Ok(pieces)
}
