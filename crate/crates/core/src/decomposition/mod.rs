//! Pyramidal decomposition of a polytope towards a set of singular vertices,
//! and its specialization to products `P_x × P_y` with the shared vertices
//! on the diagonal.

mod lattice;
mod membership;
mod pieces;
mod product;

pub use lattice::{
    pyra_decomp, triangulate, triangulate_face, triangulation_lattice, ApexRule, DecompPath, LatticeNode,
    PyramidalLattice,
};
pub use membership::{count_containing, sample_membership, MembershipReport, PolytopeSampler};
pub use pieces::{merge_paths, ApexCell, CellShape, HullPiece};
pub use product::{
    check_conformity, cube_pair, product_decomp, product_lattice, simplex_pair, two_cubes_count, two_cubes_decomp,
    two_simplices_count, two_simplices_decomp, PairDecomposition, ProductPiece, NEGLIGIBLE_PIECE,
};
