use std::collections::HashSet;

use nalgebra::DVector;

use super::lattice::{pyra_decomp, ApexRule, PyramidalLattice};
use super::pieces::{merge_paths, ApexCell};
use crate::error::{Error, Result};
use crate::geometry::{
    cartesian_product, combinatorial_cube, cube, face_volume, hull_descriptor_points, simplex_with_vertices, FaceId,
    HullDescriptor, Polytope, ProductPolytope,
};
use crate::quad1d::beta_fn;

const CONFORM_TOL: f64 = 1e-12;

/// Pieces whose share of the total volume falls below this are dropped.
pub const NEGLIGIBLE_PIECE: f64 = 1e-14;

/// A hull piece of `P_x × P_y`: the apex cell lies on the diagonal, the base
/// is `F_x × F_y`.
#[derive(Debug, Clone)]
pub struct ProductPiece {
    /// Labels are product vertex ids, points live in `R^{2d}`.
    pub apex: ApexCell,
    /// `(i, j)` with `x_i = y_j` for every apex label.
    pub apex_pairs: Vec<(usize, usize)>,
    pub base_x: FaceId,
    pub base_y: FaceId,
    pub descriptor: HullDescriptor,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct PairDecomposition {
    pub px: Polytope,
    pub py: Polytope,
    pub shared: Vec<(usize, usize)>,
    pub pieces: Vec<ProductPiece>,
}

impl PairDecomposition {
    pub fn ambient_dim(&self) -> usize {
        self.px.ambient_dim()
    }

    pub fn base_points(&self, piece: &ProductPiece) -> Vec<DVector<f64>> {
        product_points(&self.px.face_points(piece.base_x), &self.py.face_points(piece.base_y))
    }

    /// `δ vol(A) vol(F_x) vol(F_y) B(s + 1, r + 1)`, the measure of a piece.
    pub fn piece_volume(&self, piece: &ProductPiece) -> Result<f64> {
        let h = piece.descriptor;
        let vx = face_volume(&self.px, self.px.face(piece.base_x))?;
        let vy = face_volume(&self.py, self.py.face(piece.base_y))?;
        Ok(h.delta * piece.apex.volume() * vx * vy * beta_fn(h.s as f64 + 1.0, h.r as f64 + 1.0))
    }

    pub fn total_volume(&self) -> Result<f64> {
        self.pieces.iter().map(|p| self.piece_volume(p)).sum()
    }

    pub fn num_paths(&self) -> usize {
        self.pieces.iter().map(|p| p.multiplicity).sum()
    }
}

fn product_points(xs: &[DVector<f64>], ys: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in xs {
        for y in ys {
            out.push(DVector::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).copied()));
        }
    }
    out
}

/// Checks that the listed vertex pairs coincide, that no other pair does,
/// and that the shared vertices form a face of both polytopes.
pub fn check_conformity(px: &Polytope, py: &Polytope, shared: &[(usize, usize)]) -> Result<()> {
    if px.ambient_dim() != py.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: px.ambient_dim(), found: py.ambient_dim() });
    }
    if shared.is_empty() {
        return Err(Error::BadConformity("no shared vertices".into()));
    }
    let scale = px.diameter().max(py.diameter()).max(1.0);
    let mut seen_x = HashSet::new();
    let mut seen_y = HashSet::new();
    for &(i, j) in shared {
        if i >= px.num_vertices() || j >= py.num_vertices() {
            return Err(Error::BadConformity(format!("pair {i}:{j} out of range")));
        }
        if !seen_x.insert(i) || !seen_y.insert(j) {
            return Err(Error::BadConformity(format!("vertex repeated in pair {i}:{j}")));
        }
        let gap = (px.vertex(i) - py.vertex(j)).norm();
        if gap > CONFORM_TOL * scale {
            return Err(Error::BadConformity(format!("vertices {i}:{j} are {gap:e} apart")));
        }
    }
    for i in 0..px.num_vertices() {
        for j in 0..py.num_vertices() {
            if !shared.contains(&(i, j)) && (px.vertex(i) - py.vertex(j)).norm() <= CONFORM_TOL * scale {
                return Err(Error::BadConformity(format!("vertices {i}:{j} coincide but are not listed")));
            }
        }
    }
    let xs: Vec<usize> = shared.iter().map(|p| p.0).collect();
    let ys: Vec<usize> = shared.iter().map(|p| p.1).collect();
    if px.face_by_vertices(&xs).is_none() || py.face_by_vertices(&ys).is_none() {
        return Err(Error::BadConformity("shared vertices do not form a common face".into()));
    }
    Ok(())
}

/// The product polytope and its pyramidal lattice for the diagonal vertices.
pub fn product_lattice(
    px: &Polytope,
    py: &Polytope,
    shared: &[(usize, usize)],
    rule: &ApexRule,
) -> Result<(ProductPolytope, PyramidalLattice)> {
    check_conformity(px, py, shared)?;
    let prod = cartesian_product(px, py);
    let singular: Vec<usize> = shared.iter().map(|&(i, j)| prod.vertex_id(i, j)).collect();
    let lat = pyra_decomp(&prod.poly, &singular, rule)?;
    Ok((prod, lat))
}

/// Decomposes `P_x × P_y` into hull pieces with the singular set on the diagonal.
pub fn product_decomp(
    px: &Polytope,
    py: &Polytope,
    shared: &[(usize, usize)],
    rule: &ApexRule,
) -> Result<PairDecomposition> {
    let (prod, lat) = product_lattice(px, py, shared, rule)?;
    let pieces = merge_paths(&prod.poly, &lat)?
        .into_iter()
        .map(|p| {
            let (base_x, base_y) = prod.split_face(p.base);
            let apex_pairs = p.apex.labels.iter().map(|&v| prod.split_vertex(v)).collect();
            ProductPiece { apex: p.apex, apex_pairs, base_x, base_y, descriptor: p.descriptor, multiplicity: p.multiplicity }
        })
        .collect();
    finish(px.clone(), py.clone(), shared.to_vec(), pieces)
}

fn finish(px: Polytope, py: Polytope, shared: Vec<(usize, usize)>, pieces: Vec<ProductPiece>) -> Result<PairDecomposition> {
    let mut dec = PairDecomposition { px, py, shared, pieces };
    let vols: Vec<f64> = dec.pieces.iter().map(|p| dec.piece_volume(p)).collect::<Result<_>>()?;
    let total: f64 = vols.iter().sum();
    let mut keep = vols.iter().map(|&v| v > NEGLIGIBLE_PIECE * total);
    dec.pieces.retain(|_| keep.next().unwrap());
    Ok(dec)
}

fn make_piece(
    px: &Polytope,
    py: &Polytope,
    pairs: Vec<(usize, usize)>,
    simplices: Vec<Vec<usize>>,
    base_x: FaceId,
    base_y: FaceId,
    multiplicity: usize,
) -> Result<ProductPiece> {
    let nvy = py.num_vertices();
    let labels: Vec<usize> = pairs.iter().map(|&(i, j)| i * nvy + j).collect();
    let points: Vec<DVector<f64>> = pairs.iter().map(|&(i, j)| product_points(&[px.vertex(i).clone()], &[py.vertex(j).clone()]).remove(0)).collect();
    let apex = ApexCell::new(labels, points, simplices);
    let apex_pairs = apex.labels.iter().map(|&v| (v / nvy, v % nvy)).collect();
    let base = product_points(&px.face_points(base_x), &py.face_points(base_y));
    let descriptor = hull_descriptor_points(&apex.points, &base)?;
    Ok(ProductPiece { apex, apex_pairs, base_x, base_y, descriptor, multiplicity })
}

fn is_simplex(p: &Polytope) -> bool {
    p.num_vertices() == p.dim() + 1
}

/// Direct construction for two simplices whose vertices `0..=k` coincide.
///
/// The apex cell is always `conv{(v_i, v_i) : i ≤ k}`; each leaf removes
/// every shared index from exactly one factor, giving `2^{k+1}` bases minus
/// those that would empty a factor.
pub fn two_simplices_decomp(sx: &Polytope, sy: &Polytope, k: usize) -> Result<PairDecomposition> {
    if !is_simplex(sx) || !is_simplex(sy) {
        return Err(Error::InvalidPolytope("two_simplices_decomp expects simplices".into()));
    }
    let (n, m) = (sx.dim(), sy.dim());
    if k > n.min(m) {
        return Err(Error::BadConformity(format!("k = {k} exceeds the simplex dimensions {n}, {m}")));
    }
    let shared: Vec<(usize, usize)> = (0..=k).map(|i| (i, i)).collect();
    check_conformity(sx, sy, &shared)?;

    let mut pieces = Vec::new();
    for removed_x in 0usize..1 << (k + 1) {
        let ix: Vec<usize> = (0..=n).filter(|&i| i > k || removed_x >> i & 1 == 0).collect();
        let iy: Vec<usize> = (0..=m).filter(|&j| j > k || removed_x >> j & 1 == 1).collect();
        if ix.is_empty() || iy.is_empty() {
            continue;
        }
        let fx = sx.face_by_vertices(&ix).expect("every vertex subset is a simplex face");
        let fy = sy.face_by_vertices(&iy).expect("every vertex subset is a simplex face");
        pieces.push(make_piece(sx, sy, shared.clone(), vec![(0..=k).collect()], fx, fy, 1)?);
    }
    finish(sx.clone(), sy.clone(), shared, pieces)
}

/// `conv{0, e_1, .., e_n}` and `conv{0, e_1, .., e_k, −e_{k+1}, .., −e_m}` in
/// `R^{max(n, m)}`, sharing the vertices `0..=k`.
pub fn simplex_pair(n: usize, m: usize, k: usize) -> (Polytope, Polytope) {
    let d = n.max(m);
    let unit = |i: usize, sign: f64| {
        let mut v = vec![0.0; d];
        if i > 0 {
            v[i - 1] = sign;
        }
        v
    };
    let sx = simplex_with_vertices((0..=n).map(|i| unit(i, 1.0)).collect());
    let sy = simplex_with_vertices((0..=m).map(|i| unit(i, if i <= k { 1.0 } else { -1.0 })).collect());
    (sx, sy)
}

/// `[0, 1]^d` and `[0, 1]^k × [−1, 0]^{d−k}`, sharing the face `[0, 1]^k × {0}`.
/// Vertex `i` of either cube has bit `j` of `i` as the magnitude of coordinate `j`.
pub fn cube_pair(d: usize, k: usize) -> (Polytope, Polytope, Vec<(usize, usize)>) {
    let cx = cube(d);
    let cy = combinatorial_cube(d, |bits| {
        bits.iter().enumerate().map(|(j, &b)| if j < k { b as f64 } else { -(b as f64) }).collect()
    });
    let shared = (0..1usize << k).map(|i| (i, i)).collect();
    (cx, cy, shared)
}

/// Per-coordinate face type of a leaf `F_x × F_y` of the cube pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    /// shared coordinate, both free
    S,
    /// shared, x fixed at 1
    E2,
    /// shared, y fixed at 1
    E3,
    /// shared, x = 1 and y = 0
    V2,
    /// shared, x = 0 and y = 1
    V3,
    /// opposite coordinate, both free
    T,
    /// opposite, x fixed at 1
    G2,
    /// opposite, y fixed at −1
    G3,
}

impl Coord {
    /// Cube face digits `(x, y)`; `2` is free, otherwise the fixed bit.
    fn digits(self) -> (usize, usize) {
        match self {
            Coord::S | Coord::T => (2, 2),
            Coord::E2 | Coord::G2 => (1, 2),
            Coord::E3 | Coord::G3 => (2, 1),
            Coord::V2 => (1, 0),
            Coord::V3 => (0, 1),
        }
    }

    /// Coordinates spanned by the diagonal apex cell.
    fn in_apex(self) -> bool {
        matches!(self, Coord::E2 | Coord::E3 | Coord::V2 | Coord::V3)
    }
}

fn cube_leaves(d: usize, k: usize) -> Vec<Vec<Coord>> {
    use Coord::*;
    let mut out = Vec::new();
    // one vertex type among the shared coordinates, nothing fixed elsewhere
    for pos in 0..k {
        for v in [V2, V3] {
            for rest in 0..3usize.pow(k as u32 - 1) {
                let mut code = rest;
                let mut f = Vec::with_capacity(d);
                for j in 0..k {
                    if j == pos {
                        f.push(v);
                    } else {
                        f.push([S, E2, E3][code % 3]);
                        code /= 3;
                    }
                }
                f.extend(std::iter::repeat(T).take(d - k));
                out.push(f);
            }
        }
    }
    // exactly one opposite coordinate fixed
    for pos in k..d {
        for g in [G2, G3] {
            for rest in 0..3usize.pow(k as u32) {
                let mut code = rest;
                let mut f = Vec::with_capacity(d);
                for _ in 0..k {
                    f.push([S, E2, E3][code % 3]);
                    code /= 3;
                }
                f.extend((k..d).map(|j| if j == pos { g } else { T }));
                out.push(f);
            }
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Direct construction for the cube pair of [`cube_pair`].
///
/// Leaves are classified per coordinate; the apex cell of a leaf is the
/// diagonal copy of the cube spanned by its `E`/`V` coordinates, split into
/// the `ℓ!` monotone-path simplices.
pub fn two_cubes_decomp(d: usize, k: usize) -> Result<PairDecomposition> {
    if d == 0 || k > d {
        return Err(Error::DomainError(format!("cube pair needs 1 <= d and k <= d, got d = {d}, k = {k}")));
    }
    let (cx, cy, shared) = cube_pair(d, k);
    let encode = |ds: &[usize]| ds.iter().rev().fold(0, |acc, &x| acc * 3 + x);
    let mut pieces = Vec::new();
    for leaf in cube_leaves(d, k) {
        let (dx, dy): (Vec<usize>, Vec<usize>) = leaf.iter().map(|c| c.digits()).unzip();
        let tau: Vec<usize> = (0..d).filter(|&j| leaf[j].in_apex()).collect();
        let masks: Vec<usize> = (0..1usize << tau.len())
            .map(|t| tau.iter().enumerate().filter(|(b, _)| t >> b & 1 == 1).map(|(_, &j)| 1 << j).sum())
            .collect();
        let pairs: Vec<(usize, usize)> = masks.iter().map(|&m| (m, m)).collect();
        let simplices: Vec<Vec<usize>> = permutations(&(0..tau.len()).collect::<Vec<_>>())
            .into_iter()
            .map(|perm| {
                let mut t = 0usize;
                let mut chain = vec![0];
                for b in perm {
                    t |= 1 << b;
                    chain.push(t);
                }
                chain
            })
            .collect();
        let mult = simplices.len();
        pieces.push(make_piece(&cx, &cy, pairs, simplices, encode(&dx), encode(&dy), mult)?);
    }
    finish(cx, cy, shared, pieces)
}

/// Piece counts of the direct constructions.
pub fn two_simplices_count(n: usize, m: usize, k: usize) -> usize {
    (1 << (k + 1)) - usize::from(n == k) - usize::from(m == k)
}

pub fn two_cubes_count(d: usize, k: usize) -> usize {
    if k == 0 {
        2 * d
    } else {
        (6 * d - 4 * k) * 3usize.pow(k as u32 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::CellShape;
    use crate::geometry::{factorial, simplex};
    use approx::assert_relative_eq;

    #[test]
    fn simplex_counts_table() {
        let table = [vec![2, 2], vec![2, 4, 6], vec![2, 4, 8, 14], vec![2, 4, 8, 16, 30]];
        for (i, row) in table.iter().enumerate() {
            let d = i + 1;
            for (k, &want) in row.iter().enumerate() {
                assert_eq!(two_simplices_count(d, d, k), want);
                let (sx, sy) = simplex_pair(d, d, k);
                let dec = two_simplices_decomp(&sx, &sy, k).unwrap();
                assert_eq!(dec.pieces.len(), want, "d={d} k={k}");
                assert_relative_eq!(dec.total_volume().unwrap(), (1.0 / factorial(d)).powi(2), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn cube_counts_table() {
        let table = [vec![2, 2], vec![4, 8, 12], vec![6, 14, 30, 54], vec![8, 20, 48, 108, 216]];
        for (i, row) in table.iter().enumerate() {
            for (k, &want) in row.iter().enumerate() {
                assert_eq!(two_cubes_count(i + 1, k), want);
                assert_eq!(cube_leaves(i + 1, k).len(), want);
            }
        }
    }

    #[test]
    fn cube_pieces_fill_the_product() {
        for d in 1..=3 {
            for k in 0..=d {
                let dec = two_cubes_decomp(d, k).unwrap();
                assert_eq!(dec.pieces.len(), two_cubes_count(d, k));
                assert_relative_eq!(dec.total_volume().unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cube_apex_is_diagonal_parallelotope() {
        let dec = two_cubes_decomp(2, 2).unwrap();
        let full = dec.pieces.iter().find(|p| p.apex.points.len() == 4).unwrap();
        assert!(matches!(full.apex.shape, CellShape::Parallelotope(_)));
        assert_eq!(full.apex.simplices.len(), 2);
        assert!(full.apex_pairs.iter().all(|(i, j)| i == j));
    }

    #[test]
    fn closed_forms_match_generic() {
        for d in 1..=3 {
            for k in 0..=d {
                let (cx, cy, shared) = cube_pair(d, k);
                let generic = product_decomp(&cx, &cy, &shared, &ApexRule::LowestId).unwrap();
                let direct = two_cubes_decomp(d, k).unwrap();
                assert_eq!(signature(&generic), signature(&direct), "cubes d={d} k={k}");
            }
        }
        let s2 = simplex(2);
        let t = simplex_with_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, -1.0]]);
        let generic = product_decomp(&s2, &t, &[(0, 0), (1, 1)], &ApexRule::LowestId).unwrap();
        let direct = two_simplices_decomp(&s2, &t, 1).unwrap();
        assert_eq!(generic.pieces.len(), 4);
        assert_eq!(signature(&generic), signature(&direct));
    }

    fn signature(dec: &PairDecomposition) -> Vec<(Vec<usize>, usize, usize, usize, Vec<Vec<usize>>)> {
        let mut out: Vec<_> = dec
            .pieces
            .iter()
            .map(|p| {
                let mut simp: Vec<Vec<usize>> = p
                    .apex
                    .simplices
                    .iter()
                    .map(|s| {
                        let mut v: Vec<usize> = s.iter().map(|&i| p.apex.labels[i]).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                simp.sort();
                (p.apex.labels.clone(), p.base_x, p.base_y, p.multiplicity, simp)
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn conformity_errors() {
        let s = simplex(2);
        let far = simplex_with_vertices(vec![vec![5.0, 5.0], vec![6.0, 5.0], vec![5.0, 6.0]]);
        assert!(matches!(check_conformity(&s, &far, &[(0, 0)]), Err(Error::BadConformity(_))));
        assert!(matches!(check_conformity(&s, &s, &[(0, 0)]), Err(Error::BadConformity(_))));
        assert!(matches!(check_conformity(&s, &simplex(3), &[(0, 0)]), Err(Error::DimensionMismatch { .. })));
        assert!(check_conformity(&s, &s, &[(0, 0), (1, 1), (2, 2)]).is_ok());
    }
}
