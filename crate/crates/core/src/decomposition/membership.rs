//! Monte-Carlo check that the hull pieces tile `P_x × P_y`: every sample
//! should lie in exactly one piece (boundaries have measure zero).

use nalgebra::DVector;
use rand::distributions::Distribution;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::lattice::{triangulate_face, ApexRule};
use super::product::{PairDecomposition, ProductPiece};
use crate::geometry::{simplex_volume, Polytope};
use crate::linalg::{self, Orthogonalized, RANK_TOL};

/// A simplex ready for scaled barycentric tests.
struct SimplexTest {
    origin: DVector<f64>,
    frame: Orthogonalized,
}

impl SimplexTest {
    fn new(points: &[DVector<f64>]) -> Self {
        let origin = points[0].clone();
        let diffs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - &origin).collect();
        SimplexTest { origin, frame: linalg::orthogonalize(&diffs, RANK_TOL) }
    }

    /// Whether `v` lies in `t · (S − anchor)`, i.e. `anchor + v / t ∈ S`,
    /// without dividing by `t`.
    fn contains_scaled(&self, anchor: &DVector<f64>, v: &DVector<f64>, t: f64, tol: f64) -> bool {
        let rel = v - (&self.origin - anchor) * t;
        if self.frame.residual(&rel).norm() > tol {
            return false;
        }
        let c = self.frame.solve(&rel);
        c.iter().all(|&ci| ci >= -tol) && t - c.sum() >= -tol
    }
}

/// Precomputed data for testing membership in one piece.
struct PieceLocator {
    v: DVector<f64>,
    frame: Orthogonalized,
    /// `T_A`, `T_x`, `T_y` embedded in the product space.
    cols: Vec<DVector<f64>>,
    s: usize,
    rx: usize,
    apex: Vec<SimplexTest>,
    fx: Vec<SimplexTest>,
    fy: Vec<SimplexTest>,
    x0: DVector<f64>,
    y0: DVector<f64>,
    d: usize,
}

fn face_simplices(poly: &Polytope, face: usize) -> Vec<SimplexTest> {
    triangulate_face(poly, face, &ApexRule::LowestId)
        .iter()
        .map(|s| SimplexTest::new(&s.iter().map(|&v| poly.vertex(v).clone()).collect::<Vec<_>>()))
        .collect()
}

fn embed(d: usize, x: Option<&DVector<f64>>, y: Option<&DVector<f64>>) -> DVector<f64> {
    let mut out = DVector::zeros(2 * d);
    if let Some(x) = x {
        out.rows_mut(0, d).copy_from(x);
    }
    if let Some(y) = y {
        out.rows_mut(d, d).copy_from(y);
    }
    out
}

impl PieceLocator {
    fn new(dec: &PairDecomposition, piece: &ProductPiece) -> Self {
        let d = dec.ambient_dim();
        let fx_pts = dec.px.face_points(piece.base_x);
        let fy_pts = dec.py.face_points(piece.base_y);
        let (x0, y0) = (fx_pts[0].clone(), fy_pts[0].clone());
        let v = piece.apex.points[0].clone();

        let indep = |pts: &[DVector<f64>]| -> Vec<DVector<f64>> {
            let diffs: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
            let o = linalg::orthogonalize(&diffs, RANK_TOL);
            o.selected.iter().map(|&i| diffs[i].clone()).collect()
        };
        let ta = indep(&piece.apex.points);
        let tx: Vec<DVector<f64>> = indep(&fx_pts).iter().map(|c| embed(d, Some(c), None)).collect();
        let ty: Vec<DVector<f64>> = indep(&fy_pts).iter().map(|c| embed(d, None, Some(c))).collect();
        let (s, rx) = (ta.len(), tx.len());
        let mut cols = ta;
        cols.extend(tx);
        cols.extend(ty);
        let mut all = cols.clone();
        all.push(embed(d, Some(&x0), Some(&y0)) - &v);
        let frame = linalg::orthogonalize(&all, 0.0);

        let apex = (0..piece.apex.simplices.len()).map(|i| SimplexTest::new(&piece.apex.simplex_points(i))).collect();
        PieceLocator {
            v,
            frame,
            cols,
            s,
            rx,
            apex,
            fx: face_simplices(&dec.px, piece.base_x),
            fy: face_simplices(&dec.py, piece.base_y),
            x0,
            y0,
            d,
        }
    }

    fn contains(&self, z: &DVector<f64>, tol: f64) -> bool {
        let rel = z - &self.v;
        if self.frame.residual(&rel).norm() > tol {
            return false;
        }
        let c = self.frame.solve(&rel);
        let lam = c[c.len() - 1];
        if lam < -tol || lam > 1.0 + tol {
            return false;
        }
        let d = self.d;
        // (1 − λ)(a − v), λ(x_F − x_0) and λ(y_F − y_0) from the coefficients
        let mut a_part = DVector::zeros(2 * d);
        let mut x_part = DVector::zeros(d);
        let mut y_part = DVector::zeros(d);
        for (j, col) in self.cols.iter().enumerate() {
            if j < self.s {
                a_part += col * c[j];
            } else if j < self.s + self.rx {
                x_part += col.rows(0, d) * c[j];
            } else {
                y_part += col.rows(d, d) * c[j];
            }
        }
        self.apex.iter().any(|t| t.contains_scaled(&self.v, &a_part, 1.0 - lam, tol))
            && self.fx.iter().any(|t| t.contains_scaled(&self.x0, &x_part, lam, tol))
            && self.fy.iter().any(|t| t.contains_scaled(&self.y0, &y_part, lam, tol))
    }
}

/// Uniform sampler on a polytope via a volume-weighted triangulation.
pub struct PolytopeSampler {
    simplices: Vec<Vec<DVector<f64>>>,
    cumulative: Vec<f64>,
}

impl PolytopeSampler {
    pub fn new(poly: &Polytope) -> Self {
        let simplices: Vec<Vec<DVector<f64>>> = triangulate_face(poly, poly.top(), &ApexRule::LowestId)
            .iter()
            .map(|s| s.iter().map(|&v| poly.vertex(v).clone()).collect())
            .collect();
        let mut acc = 0.0;
        let cumulative = simplices
            .iter()
            .map(|s| {
                acc += simplex_volume(s);
                acc
            })
            .collect();
        PolytopeSampler { simplices, cumulative }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u).min(self.simplices.len() - 1);
        let s = &self.simplices[idx];
        // flat Dirichlet weights from exponential variates
        let e: Vec<f64> = (0..s.len()).map(|_| rand::distributions::Open01.sample(rng)).map(|u: f64| -u.ln()).collect();
        let sum: f64 = e.iter().sum();
        s.iter().zip(&e).fold(DVector::zeros(s[0].len()), |acc, (p, &w)| acc + p * (w / sum))
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct MembershipReport {
    pub samples: usize,
    pub in_none: usize,
    pub in_one: usize,
    pub in_several: usize,
}

impl MembershipReport {
    pub fn all_unique(&self) -> bool {
        self.in_one == self.samples
    }
}

/// Number of pieces containing `(x, y)`.
pub fn count_containing(dec: &PairDecomposition, x: &DVector<f64>, y: &DVector<f64>, tol: f64) -> usize {
    let d = dec.ambient_dim();
    let z = embed(d, Some(x), Some(y));
    dec.pieces.iter().filter(|p| PieceLocator::new(dec, p).contains(&z, tol)).count()
}

/// Samples `samples` uniform points of `P_x × P_y` and counts how many
/// pieces contain each.
pub fn sample_membership(dec: &PairDecomposition, samples: usize, seed: u64, tol: f64) -> MembershipReport {
    let d = dec.ambient_dim();
    let locators: Vec<PieceLocator> = dec.pieces.iter().map(|p| PieceLocator::new(dec, p)).collect();
    let (sx, sy) = (PolytopeSampler::new(&dec.px), PolytopeSampler::new(&dec.py));
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = MembershipReport { samples, in_none: 0, in_one: 0, in_several: 0 };
    for _ in 0..samples {
        let x = sx.sample(&mut rng);
        let y = sy.sample(&mut rng);
        let z = embed(d, Some(&x), Some(&y));
        match locators.iter().filter(|l| l.contains(&z, tol)).count() {
            0 => report.in_none += 1,
            1 => report.in_one += 1,
            _ => report.in_several += 1,
        }
    }
    report
}
