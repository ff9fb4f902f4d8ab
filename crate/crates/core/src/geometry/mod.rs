//! Polytopes with explicit face lattices and the affine geometry needed to
//! integrate over faces and over convex hulls of two faces.

mod builders;
mod frame;
mod hull;
mod io;
mod polytope;

pub use builders::{
    cartesian_product, combinatorial_cube, cube, double_pyramid, polygon, simplex, simplex_with_vertices,
    ProductPolytope,
};
pub use frame::{
    affine_frame, check_hull_assumption, check_hull_assumption_points, dist_point_to_aff, factorial,
    hull_descriptor, hull_descriptor_points, simplex_volume, AffineFrame, HullDescriptor,
};
pub use hull::{affine_dim, detect_parallelotope, hull_volume, ParallelotopeShape};
pub use io::{polytope_from_json, polytope_from_value, polytope_to_json, FaceJson, PolytopeJson};
pub use polytope::{Face, FaceId, FaceInput, Polytope};

use crate::decomposition::{triangulate_face, ApexRule};
use crate::error::Result;

/// `j`-dimensional measure of a face, summed over a triangulation.
pub fn face_volume(poly: &Polytope, face: &Face) -> Result<f64> {
    affine_frame(poly, face)?;
    if face.dim == 0 {
        return Ok(1.0);
    }
    let simplices = triangulate_face(poly, face.id, &ApexRule::LowestId);
    Ok(simplices
        .iter()
        .map(|s| {
            let pts: Vec<_> = s.iter().map(|&v| poly.vertex(v).clone()).collect();
            simplex_volume(&pts)
        })
        .sum())
}
