//! Brute-force convex hull measures for small point sets, and recognition of
//! parallelotopes. Only used on apex cells, which have few vertices.

use std::collections::HashSet;

use nalgebra::DVector;

use crate::linalg::{self, RANK_TOL};

const HULL_TOL: f64 = 1e-9;

/// Affine dimension of a point set.
pub fn affine_dim(points: &[DVector<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let o = &points[0];
    let diffs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - o).collect();
    linalg::rank(&diffs)
}

/// Coordinates of `points` in an orthonormal frame of their affine hull.
fn intrinsic_coords(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let o = &points[0];
    let diffs: Vec<DVector<f64>> = points.iter().map(|p| p - o).collect();
    let orth = linalg::orthogonalize(&diffs, RANK_TOL);
    diffs
        .iter()
        .map(|d| DVector::from_iterator(orth.rank(), orth.q.iter().map(|q| q.dot(d))))
        .collect()
}

/// Volume of the convex hull of `points`, measured in their affine hull
/// (`1` for a single point).
///
/// Facets are found by testing every affinely independent `s`-subset for a
/// supporting hyperplane; the volume is the sum of the pyramids over the
/// facets with apex at the centroid.
pub fn hull_volume(points: &[DVector<f64>]) -> f64 {
    if points.len() <= 1 {
        return 1.0;
    }
    let coords = intrinsic_coords(points);
    full_volume(&coords)
}

fn full_volume(pts: &[DVector<f64>]) -> f64 {
    let s = pts[0].len();
    if s == 0 {
        return 1.0;
    }
    if s == 1 {
        let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
        return hi - lo;
    }
    let n = pts.len();
    let scale = pts.iter().map(|p| (p - &pts[0]).norm()).fold(0.0, f64::max);
    let tol = HULL_TOL * scale.max(f64::MIN_POSITIVE);
    let centroid = pts.iter().fold(DVector::zeros(s), |acc, p| acc + p) / n as f64;

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut total = 0.0;
    for combo in Combinations::new(n, s) {
        let base = &pts[combo[0]];
        let diffs: Vec<DVector<f64>> = combo[1..].iter().map(|&i| &pts[i] - base).collect();
        let orth = linalg::orthogonalize(&diffs, RANK_TOL);
        if orth.rank() != s - 1 {
            continue;
        }
        let normal = (0..s)
            .map(|j| orth.residual(&DVector::from_fn(s, |i, _| if i == j { 1.0 } else { 0.0 })))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        let normal = &normal / normal.norm();
        let h = normal.dot(base);
        let vals: Vec<f64> = pts.iter().map(|p| normal.dot(p) - h).collect();
        let above = vals.iter().any(|&v| v > tol);
        let below = vals.iter().any(|&v| v < -tol);
        if above && below {
            continue;
        }
        let on: Vec<usize> = (0..n).filter(|&i| vals[i].abs() <= tol).collect();
        if !seen.insert(on.clone()) {
            continue;
        }
        let facet: Vec<DVector<f64>> = on.iter().map(|&i| pts[i].clone()).collect();
        let area = full_volume(&intrinsic_coords(&facet));
        total += (normal.dot(&centroid) - h).abs() * area / s as f64;
    }
    total
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A point set of the form `o + Σ b_i e_i`, `b ∈ {0, 1}^s`.
/// `origin` and `edges` index into the input points (`o + e_i` is `points[edges[i]]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelotopeShape {
    pub origin: usize,
    pub edges: Vec<usize>,
}

/// Recognizes a parallelotope anchored at `points[0]` whose edges are the
/// shortest independent differences. Returns `None` otherwise.
pub fn detect_parallelotope(points: &[DVector<f64>]) -> Option<ParallelotopeShape> {
    let s = affine_dim(points);
    if points.len() != 1usize << s {
        return None;
    }
    if s == 0 {
        return Some(ParallelotopeShape { origin: 0, edges: vec![] });
    }
    let o = &points[0];
    let mut order: Vec<usize> = (1..points.len()).collect();
    order.sort_by(|&a, &b| (&points[a] - o).norm().total_cmp(&(&points[b] - o).norm()).then(a.cmp(&b)));

    let scale = order.iter().map(|&i| (&points[i] - o).norm()).fold(0.0, f64::max);
    let mut edges = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for &i in &order {
        let mut trial = cols.clone();
        trial.push(&points[i] - o);
        if linalg::rank(&trial) == trial.len() {
            cols = trial;
            edges.push(i);
            if edges.len() == s {
                break;
            }
        }
    }
    let orth = linalg::orthogonalize(&cols, RANK_TOL);
    if orth.rank() != s {
        return None;
    }
    let mut codes = HashSet::new();
    for p in points {
        let d = p - o;
        if orth.residual(&d).norm() > HULL_TOL * scale {
            return None;
        }
        let c = orth.solve(&d);
        let mut code = 0usize;
        for (j, &cj) in c.iter().enumerate() {
            if cj.abs() <= HULL_TOL {
                continue;
            } else if (cj - 1.0).abs() <= HULL_TOL {
                code |= 1 << j;
            } else {
                return None;
            }
        }
        codes.insert(code);
    }
    (codes.len() == points.len()).then_some(ParallelotopeShape { origin: 0, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(4, 4).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
    }

    #[test]
    fn square_and_cube_volumes() {
        let sq = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0]), v(&[0.5, 0.5])];
        assert_relative_eq!(hull_volume(&sq), 1.0, epsilon = 1e-12);
        let cube: Vec<DVector<f64>> = (0..8)
            .map(|i| v(&[(i & 1) as f64, (i >> 1 & 1) as f64, (i >> 2 & 1) as f64]))
            .collect();
        assert_relative_eq!(hull_volume(&cube), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn embedded_triangle_area() {
        let tri = vec![v(&[0.0, 0.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0, 0.0]), v(&[0.0, 0.0, 1.0, 1.0])];
        // legs of length √2 at a right angle
        assert_relative_eq!(hull_volume(&tri), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn octahedron_volume() {
        let pts = vec![
            v(&[1.0, 0.0, 0.0]),
            v(&[-1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, -1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
            v(&[0.0, 0.0, -1.0]),
        ];
        assert_relative_eq!(hull_volume(&pts), 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn parallelotope_recognition() {
        let sq = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0]), v(&[1.0, 1.0, 1.0])];
        let shape = detect_parallelotope(&sq).unwrap();
        assert_eq!(shape.edges.len(), 2);
        let kite = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[2.0, 2.0])];
        assert!(detect_parallelotope(&kite).is_none());
        let tri = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(detect_parallelotope(&tri).is_none());
        let seg = vec![v(&[0.0, 0.0]), v(&[3.0, 4.0])];
        assert_eq!(detect_parallelotope(&seg).unwrap().edges, vec![1]);
    }
}
