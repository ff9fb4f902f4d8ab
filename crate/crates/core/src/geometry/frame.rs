use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::polytope::{Face, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_TOL};

/// Orthonormal parameterization of the affine hull of a face.
///
/// `basis_q · factor_r` reproduces the vertex-difference columns `basis_t`
/// (`v_i − origin` for the selected vertices).
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: DVector<f64>,
    pub basis_q: DMatrix<f64>,
    pub factor_r: DMatrix<f64>,
    pub basis_t: Vec<DVector<f64>>,
    pub measure_scale: f64,
}

impl AffineFrame {
    pub fn dim(&self) -> usize {
        self.basis_q.ncols()
    }

    /// Frame of the affine hull of `points`, anchored at `points[0]`.
    /// Fails unless the affine rank equals `expected_dim`.
    pub fn from_points(points: &[DVector<f64>], expected_dim: usize) -> Result<Self> {
        let origin = points
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidPolytope("empty point set".into()))?;
        let diffs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - &origin).collect();
        let o = linalg::orthogonalize(&diffs, RANK_TOL);
        if o.rank() != expected_dim {
            return Err(Error::DegenerateFace { face: usize::MAX, rank: o.rank(), expected: expected_dim });
        }
        let basis_q = o.q_matrix(origin.len());
        let basis_t = o.selected.iter().map(|&i| diffs[i].clone()).collect();
        let measure_scale = o.abs_det();
        Ok(AffineFrame { origin, basis_q, factor_r: o.r, basis_t, measure_scale })
    }

    /// Orthogonal projection of `x − origin` onto the complement of the direction space.
    pub fn normal_component(&self, x: &DVector<f64>) -> DVector<f64> {
        let w = x - &self.origin;
        let mut out = w.clone();
        for _ in 0..2 {
            let c = self.basis_q.transpose() * &out;
            out -= &self.basis_q * c;
        }
        out
    }

    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        self.normal_component(x).norm()
    }
}

/// Frame of `face`: origin at its first vertex, basis from its vertex differences.
pub fn affine_frame(poly: &Polytope, face: &Face) -> Result<AffineFrame> {
    AffineFrame::from_points(&poly.face_points(face.id), face.dim).map_err(|e| match e {
        Error::DegenerateFace { rank, expected, .. } => Error::DegenerateFace { face: face.id, rank, expected },
        other => other,
    })
}

/// Distance from `x` to the affine hull of `face`.
pub fn dist_point_to_aff(x: &DVector<f64>, poly: &Polytope, face: &Face) -> f64 {
    match affine_frame(poly, face) {
        Ok(f) => f.distance(x),
        // a lattice-validated face always has a frame; fall back to rank selection
        Err(_) => {
            let pts = poly.face_points(face.id);
            let o = &pts[0];
            let diffs: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - o).collect();
            linalg::orthogonalize(&diffs, RANK_TOL).residual(&(x - o)).norm()
        }
    }
}

/// Jacobian constant of the parameterization
/// `x = (1 − λ) x_A + λ x_B` of `conv(A, B)`, with `s = dim A`, `r = dim B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HullDescriptor {
    pub delta: f64,
    pub s: usize,
    pub r: usize,
}

fn hull_columns(a: &AffineFrame, b: &AffineFrame) -> Vec<DVector<f64>> {
    let mut cols: Vec<DVector<f64>> = a.basis_t.clone();
    cols.extend(b.basis_t.iter().cloned());
    cols.push(&b.origin - &a.origin);
    cols
}

/// `aff(A) ∩ aff(B) = ∅` and `H_A ∩ H_B = {0}`, i.e. `[T_A, T_B, w − v]`
/// has full column rank.
pub fn check_hull_assumption_points(a: &[DVector<f64>], b: &[DVector<f64>]) -> bool {
    let (Some(fa), Some(fb)) = (frame_any(a), frame_any(b)) else {
        return false;
    };
    let cols = hull_columns(&fa, &fb);
    linalg::rank(&cols) == cols.len()
}

pub fn check_hull_assumption(poly: &Polytope, a: &Face, b: &Face) -> bool {
    check_hull_assumption_points(&poly.face_points(a.id), &poly.face_points(b.id))
}

fn frame_any(points: &[DVector<f64>]) -> Option<AffineFrame> {
    let origin = points.first()?;
    let diffs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - origin).collect();
    let rank = linalg::rank(&diffs);
    AffineFrame::from_points(points, rank).ok()
}

/// `δ = |det R| / (|det R_A| |det R_B|)` for the point sets spanning `A` and `B`.
pub fn hull_descriptor_points(a: &[DVector<f64>], b: &[DVector<f64>]) -> Result<HullDescriptor> {
    let fa = frame_any(a).ok_or(Error::AssumptionViolated)?;
    let fb = frame_any(b).ok_or(Error::AssumptionViolated)?;
    let cols = hull_columns(&fa, &fb);
    if linalg::rank(&cols) != cols.len() {
        return Err(Error::AssumptionViolated);
    }
    let det = linalg::gram_volume(&cols);
    let scale = cols.iter().map(|c| c.norm()).product::<f64>();
    if !(det > RANK_TOL * scale) {
        return Err(Error::DegenerateHull(det));
    }
    Ok(HullDescriptor {
        delta: det / (fa.measure_scale * fb.measure_scale),
        s: fa.dim(),
        r: fb.dim(),
    })
}

pub fn hull_descriptor(poly: &Polytope, a: &Face, b: &Face) -> Result<HullDescriptor> {
    hull_descriptor_points(&poly.face_points(a.id), &poly.face_points(b.id))
}

/// `dim`-volume of the simplex spanned by `points`.
pub fn simplex_volume(points: &[DVector<f64>]) -> f64 {
    let o = &points[0];
    let cols: Vec<DVector<f64>> = points[1..].iter().map(|p| p - o).collect();
    let n = cols.len();
    linalg::gram_volume(&cols) / factorial(n)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
