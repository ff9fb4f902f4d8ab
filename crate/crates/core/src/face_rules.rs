//! Quadrature rules on reference simplices and cubes, and their images on
//! faces of polytopes.
//!
//! The reference simplex is the ordered simplex
//! `T̂_n = {0 ≤ x̂_n ≤ … ≤ x̂_1 ≤ 1}`, mapped onto a simplex with vertices
//! `v_0, …, v_n` by `x = v_0 + Σ_k (v_k − v_{k−1}) x̂_k`.
//!
//! Rule files hold a header line `dim n degree q count m`, an optional
//! `convention ordered|barycentric` line, then `m` lines of `n` coordinates
//! followed by the weight. Blank lines and `#` comments are ignored.
//! Barycentric nodes live in `{x ≥ 0, Σ x ≤ 1}` and are converted by
//! `x̂_k = Σ_{i ≥ k} x_i`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use crate::decomposition::{triangulate_face, ApexCell, ApexRule, CellShape};
use crate::error::{Error, Result};
use crate::geometry::{affine_frame, detect_parallelotope, Face, Polytope};
use crate::linalg;
use crate::quad1d::{gauss_jacobi, gauss_legendre, Rule1D};

const NODE_TOL: f64 = 1e-12;
const EXACTNESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    DuffyTensor,
    CubeTensor,
    GeneralizedGaussFile,
    Triangulated,
}

/// A rule on a reference domain; nodes are stored row-major, `dim` reals each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceRule {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
    pub kind: RuleKind,
}

impl FaceRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * f(self.node(i))).sum()
    }
}

/// A rule on a face embedded in `R^ambient`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddedRule {
    pub ambient: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EmbeddedRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.ambient..(i + 1) * self.ambient]
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * f(self.node(i))).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn append(&mut self, other: EmbeddedRule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    /// CSV with header `x1,…,xd,w`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (1..=self.ambient).map(|i| format!("x{i}")).chain(["w".to_string()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            let row: Vec<String> = self.node(i).iter().chain([&self.weights[i]]).map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn tensor(rules: &[Rule1D]) -> (Vec<f64>, Vec<f64>) {
    let n = rules.len();
    let total: usize = rules.iter().map(|r| r.len()).product();
    let mut nodes = Vec::with_capacity(total * n);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let mut w = 1.0;
        for (j, r) in rules.iter().enumerate() {
            nodes.push(r.nodes[idx[j]]);
            w *= r.weights[idx[j]];
        }
        weights.push(w);
        for j in (0..n).rev() {
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
    (nodes, weights)
}

fn point_rule(kind: RuleKind) -> FaceRule {
    FaceRule { dim: 0, nodes: vec![], weights: vec![1.0], degree: usize::MAX, kind }
}

/// Collapsed tensor rule on `T̂_n` with `p^n` nodes, exact for total degree `2p − 1`.
pub fn duffy_simplex_rule(n: usize, p: usize) -> Result<FaceRule> {
    if n == 0 {
        return Ok(point_rule(RuleKind::DuffyTensor));
    }
    let axes: Vec<Rule1D> = (1..=n).map(|j| gauss_jacobi(p, 0.0, (n - j) as f64)).collect::<Result<_>>()?;
    let (mut nodes, weights) = tensor(&axes);
    for node in nodes.chunks_mut(n) {
        for k in 1..n {
            node[k] *= node[k - 1];
        }
    }
    Ok(FaceRule { dim: n, nodes, weights, degree: 2 * p - 1, kind: RuleKind::DuffyTensor })
}

/// Tensor Gauss-Legendre rule on `[0, 1]^n`.
pub fn cube_tensor_rule(n: usize, p: usize) -> Result<FaceRule> {
    if n == 0 {
        return Ok(point_rule(RuleKind::CubeTensor));
    }
    let gl = gauss_legendre(p)?;
    let (nodes, weights) = tensor(&vec![gl; n]);
    Ok(FaceRule { dim: n, nodes, weights, degree: 2 * p - 1, kind: RuleKind::CubeTensor })
}

/// `∫_{T̂_n} x̂^β`, by integrating out `x̂_n, …, x̂_1` in turn.
pub fn ordered_simplex_monomial(beta: &[usize]) -> f64 {
    let n = beta.len();
    let mut acc = 1.0;
    let mut e = 0usize;
    for i in (0..n).rev() {
        e += beta[i];
        acc /= (e + 1) as f64;
        e += 1;
    }
    acc
}

/// All exponent vectors of length `n` with total degree at most `q`.
pub fn monomials_up_to(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=q {
            cur.push(b);
            rec(n, q - b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, q, &mut Vec::new(), &mut out);
    out
}

/// Checks node containment, weight positivity and exactness up to `rule.degree`.
pub fn validate_simplex_rule(rule: &FaceRule) -> Result<()> {
    let n = rule.dim;
    for i in 0..rule.len() {
        let x = rule.node(i);
        let mut gaps = vec![1.0 - x.first().copied().unwrap_or(0.0)];
        gaps.extend((1..n).map(|k| x[k - 1] - x[k]));
        gaps.extend(x.last().copied());
        if gaps.iter().any(|&g| g < -NODE_TOL) {
            return Err(Error::ValidationError(format!("node {i} {x:?} lies outside the reference simplex")));
        }
        if !(rule.weights[i] > 0.0) {
            return Err(Error::ValidationError(format!("weight {i} = {} is not positive", rule.weights[i])));
        }
    }
    for beta in monomials_up_to(n, rule.degree) {
        let exact = ordered_simplex_monomial(&beta);
        let got = rule.integrate(|x| x.iter().zip(&beta).map(|(&xi, &b)| xi.powi(b as i32)).product());
        if (got - exact).abs() > EXACTNESS_TOL * exact {
            return Err(Error::ValidationError(format!(
                "monomial {beta:?}: rule gives {got:e}, exact value {exact:e}"
            )));
        }
    }
    Ok(())
}

/// Parses a generalized Gauss rule for `T̂_n` and validates it.
pub fn parse_generalized_rule(text: &str, n: usize) -> Result<FaceRule> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::ParseError("empty rule file".into()))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    let field = |name: &str, pos: usize| -> Result<usize> {
        if tok.get(pos) != Some(&name) {
            return Err(Error::ParseError(format!("header must read `dim n degree q count m`, got `{header}`")));
        }
        tok.get(pos + 1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::ParseError(format!("bad value for `{name}` in `{header}`")))
    };
    let (dim, degree, count) = (field("dim", 0)?, field("degree", 2)?, field("count", 4)?);
    if tok.len() != 6 {
        return Err(Error::ParseError(format!("unexpected header `{header}`")));
    }
    if dim != n {
        return Err(Error::DimensionMismatch { expected: n, found: dim });
    }
    let mut rows: Vec<&str> = lines.collect();
    let mut barycentric = false;
    if let Some(first) = rows.first() {
        if let Some(conv) = first.strip_prefix("convention") {
            barycentric = match conv.trim() {
                "ordered" => false,
                "barycentric" => true,
                other => return Err(Error::ParseError(format!("unknown convention `{other}`"))),
            };
            rows.remove(0);
        }
    }
    if rows.len() != count {
        return Err(Error::ParseError(format!("header announces {count} nodes, found {}", rows.len())));
    }
    let mut nodes = Vec::with_capacity(count * n);
    let mut weights = Vec::with_capacity(count);
    for (i, row) in rows.iter().enumerate() {
        let vals: Vec<f64> = row
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::ParseError(format!("node line {}: {e}", i + 1)))?;
        if vals.len() != n + 1 {
            return Err(Error::ParseError(format!("node line {} has {} values, expected {}", i + 1, vals.len(), n + 1)));
        }
        let mut x = vals[..n].to_vec();
        if barycentric {
            for k in (0..n.saturating_sub(1)).rev() {
                x[k] += x[k + 1];
            }
        }
        nodes.extend(x);
        weights.push(vals[n]);
    }
    let rule = FaceRule { dim: n, nodes, weights, degree, kind: RuleKind::GeneralizedGaussFile };
    validate_simplex_rule(&rule)?;
    Ok(rule)
}

pub fn load_generalized_rule(path: &Path, n: usize) -> Result<FaceRule> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_generalized_rule(&text, n)
}

/// Like [`load_generalized_rule`], taking the dimension from the header.
pub fn load_rule_file(path: &Path) -> Result<FaceRule> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let n = text
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .find(|l| !l.is_empty())
        .and_then(|h| {
            let tok: Vec<&str> = h.split_whitespace().collect();
            (tok.first() == Some(&"dim")).then(|| tok.get(1).and_then(|s| s.parse().ok())).flatten()
        })
        .ok_or_else(|| Error::ParseError(format!("{}: missing `dim n` header", path.display())))?;
    parse_generalized_rule(&text, n)
}

/// Where simplex rules come from. Loaded rules are used for their dimension
/// (the lowest-degree one reaching `2p − 1`, else the highest available);
/// other dimensions fall back to the collapsed tensor rule.
#[derive(Debug, Clone, Default)]
pub enum SimplexSource {
    #[default]
    Duffy,
    Generalized(Arc<Vec<FaceRule>>),
}

impl SimplexSource {
    pub fn simplex_rule(&self, n: usize, p: usize) -> Result<FaceRule> {
        if let SimplexSource::Generalized(rules) = self {
            let mut cands: Vec<&FaceRule> = rules.iter().filter(|r| r.dim == n).collect();
            cands.sort_by_key(|r| r.degree);
            let pick = cands.iter().find(|r| r.degree >= 2 * p - 1).or(cands.last());
            if let Some(r) = pick {
                return Ok((*r).clone());
            }
        }
        duffy_simplex_rule(n, p)
    }
}

/// Image of a reference simplex rule on the simplex with the given vertices.
pub fn map_simplex_rule(rule: &FaceRule, vertices: &[DVector<f64>]) -> Result<EmbeddedRule> {
    if vertices.len() != rule.dim + 1 {
        return Err(Error::DimensionMismatch { expected: rule.dim + 1, found: vertices.len() });
    }
    let ambient = vertices[0].len();
    let steps: Vec<DVector<f64>> = (1..vertices.len()).map(|k| &vertices[k] - &vertices[k - 1]).collect();
    let scale = linalg::gram_volume(&steps);
    Ok(affine_image(rule, &vertices[0], &steps, scale, ambient))
}

/// Image of a reference cube rule on `origin + Σ t_i edges[i]`.
pub fn map_cube_rule(rule: &FaceRule, origin: &DVector<f64>, edges: &[DVector<f64>]) -> Result<EmbeddedRule> {
    if edges.len() != rule.dim {
        return Err(Error::DimensionMismatch { expected: rule.dim, found: edges.len() });
    }
    let scale = linalg::gram_volume(edges);
    Ok(affine_image(rule, origin, edges, scale, origin.len()))
}

fn affine_image(rule: &FaceRule, origin: &DVector<f64>, cols: &[DVector<f64>], scale: f64, ambient: usize) -> EmbeddedRule {
    let mut nodes = Vec::with_capacity(rule.len() * ambient);
    for i in 0..rule.len() {
        let x = rule.node(i);
        for r in 0..ambient {
            nodes.push(origin[r] + cols.iter().zip(x).map(|(c, &t)| c[r] * t).sum::<f64>());
        }
    }
    EmbeddedRule { ambient, nodes, weights: rule.weights.iter().map(|w| w * scale).collect() }
}

/// Maps `rule` onto `face`, which must be a simplex (or a parallelotope for
/// cube rules) of matching dimension.
pub fn map_rule_to_face(rule: &FaceRule, poly: &Polytope, face: &Face) -> Result<EmbeddedRule> {
    if rule.dim != face.dim {
        return Err(Error::DimensionMismatch { expected: face.dim, found: rule.dim });
    }
    affine_frame(poly, face)?;
    let pts = poly.face_points(face.id);
    match rule.kind {
        RuleKind::CubeTensor => {
            let shape = detect_parallelotope(&pts)
                .ok_or_else(|| Error::InvalidPolytope(format!("face {} is not a parallelotope", face.id)))?;
            let edges: Vec<DVector<f64>> = shape.edges.iter().map(|&e| &pts[e] - &pts[shape.origin]).collect();
            map_cube_rule(rule, &pts[shape.origin], &edges)
        }
        _ => map_simplex_rule(rule, &pts),
    }
}

/// Rule with `p` points per direction on an arbitrary face: simplices use
/// the simplex source, parallelotopes a tensor rule, anything else a
/// triangulation.
pub fn general_face_rule(poly: &Polytope, face: &Face, p: usize, source: &SimplexSource) -> Result<EmbeddedRule> {
    affine_frame(poly, face)?;
    let pts = poly.face_points(face.id);
    if face.dim == 0 || pts.len() == face.dim + 1 {
        return map_simplex_rule(&source.simplex_rule(face.dim, p)?, &pts);
    }
    if let Some(shape) = detect_parallelotope(&pts) {
        let edges: Vec<DVector<f64>> = shape.edges.iter().map(|&e| &pts[e] - &pts[shape.origin]).collect();
        return map_cube_rule(&cube_tensor_rule(face.dim, p)?, &pts[shape.origin], &edges);
    }
    let rule = source.simplex_rule(face.dim, p)?;
    let mut out = EmbeddedRule { ambient: poly.ambient_dim(), nodes: vec![], weights: vec![] };
    for simplex in triangulate_face(poly, face.id, &ApexRule::LowestId) {
        let vs: Vec<DVector<f64>> = simplex.iter().map(|&v| poly.vertex(v).clone()).collect();
        out.append(map_simplex_rule(&rule, &vs)?);
    }
    Ok(out)
}

/// Rule on an apex cell, chosen by its shape.
pub fn cell_rule(cell: &ApexCell, p: usize, source: &SimplexSource) -> Result<EmbeddedRule> {
    let n = cell.dim();
    match &cell.shape {
        CellShape::Simplex => map_simplex_rule(&source.simplex_rule(n, p)?, &cell.simplex_points(0)),
        CellShape::Parallelotope(shape) => {
            let o = &cell.points[shape.origin];
            let edges: Vec<DVector<f64>> = shape.edges.iter().map(|&e| &cell.points[e] - o).collect();
            map_cube_rule(&cube_tensor_rule(n, p)?, o, &edges)
        }
        CellShape::Complex => {
            let rule = source.simplex_rule(n, p)?;
            let mut out = EmbeddedRule { ambient: cell.points[0].len(), nodes: vec![], weights: vec![] };
            for i in 0..cell.simplices.len() {
                out.append(map_simplex_rule(&rule, &cell.simplex_points(i))?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cube, polygon, simplex, simplex_with_vertices};
    use approx::assert_relative_eq;

    #[test]
    fn duffy_small_cases() {
        let r = duffy_simplex_rule(1, 2).unwrap();
        let gl = gauss_legendre(2).unwrap();
        assert_eq!(r.nodes, gl.nodes);
        assert_eq!(duffy_simplex_rule(3, 4).unwrap().len(), 64);
        for p in 1..6 {
            let r = duffy_simplex_rule(2, p).unwrap();
            assert_relative_eq!(r.integrate(|_| 1.0), 0.5, max_relative = 1e-14);
        }
        // x1 x2 has total degree 2 and needs two points per axis
        let r = duffy_simplex_rule(2, 2).unwrap();
        assert_relative_eq!(r.integrate(|x| x[0] * x[1]), 1.0 / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn duffy_total_degree_exactness() {
        for n in 1..=5 {
            for p in 1..=(if n <= 3 { 10 } else { 5 }) {
                let mut r = duffy_simplex_rule(n, p).unwrap();
                r.degree = 2 * p - 1;
                validate_simplex_rule(&r).unwrap();
            }
        }
    }

    #[test]
    fn duffy_is_not_exact_per_variable() {
        // one point per axis integrates x1 and x2 exactly but not x1 x2
        let r = duffy_simplex_rule(2, 1).unwrap();
        assert_relative_eq!(r.integrate(|x| x[0] * x[1]), 1.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(ordered_simplex_monomial(&[1, 1]), 1.0 / 8.0, max_relative = 1e-15);
    }

    #[test]
    fn monomial_oracle() {
        assert_relative_eq!(ordered_simplex_monomial(&[]), 1.0);
        assert_relative_eq!(ordered_simplex_monomial(&[0, 0, 0]), 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(ordered_simplex_monomial(&[1, 0]), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(ordered_simplex_monomial(&[0, 1]), 1.0 / 6.0, max_relative = 1e-15);
        assert_eq!(monomials_up_to(2, 2).len(), 6);
    }

    #[test]
    fn cube_rule() {
        let r = cube_tensor_rule(3, 2).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.integrate(|x| x[0] * x[1] * x[2]), 0.125, max_relative = 1e-14);
        assert_relative_eq!(r.integrate(|x| x[0].powi(3)), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn parse_centroid_rule() {
        let r = parse_generalized_rule("dim 2 degree 1 count 1\n0.6666666666666666 0.3333333333333333 0.5\n", 2).unwrap();
        assert_eq!(r.kind, RuleKind::GeneralizedGaussFile);
        let bary = "# centroid\ndim 2 degree 1 count 1\nconvention barycentric\n0.3333333333333333, 0.3333333333333333, 0.5\n";
        let b = parse_generalized_rule(bary, 2).unwrap();
        assert_relative_eq!(b.nodes[0], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn reject_bad_rule_files() {
        let neg = "dim 2 degree 0 count 1\n0.5 0.25 -0.5\n";
        assert!(matches!(parse_generalized_rule(neg, 2), Err(Error::ValidationError(_))));
        let outside = "dim 2 degree 0 count 1\n0.5 0.75 0.5\n";
        assert!(matches!(parse_generalized_rule(outside, 2), Err(Error::ValidationError(_))));
        let inexact = "dim 2 degree 1 count 1\n0.5 0.25 0.5\n";
        let err = parse_generalized_rule(inexact, 2).unwrap_err();
        assert!(err.to_string().contains("monomial"));
        assert!(matches!(parse_generalized_rule("dim 2 degree 1\n", 2), Err(Error::ParseError(_))));
        assert!(matches!(parse_generalized_rule("dim 2 degree 1 count 2\n0.6 0.3 0.5\n", 2), Err(Error::ParseError(_))));
        assert!(matches!(parse_generalized_rule("dim 3 degree 1 count 0\n", 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mapping_onto_faces() {
        let rule = duffy_simplex_rule(1, 3).unwrap();
        let seg = simplex_with_vertices(vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        let m = map_rule_to_face(&rule, &seg, seg.top_face()).unwrap();
        assert_relative_eq!(m.total_weight(), 2.0, max_relative = 1e-14);

        let tri = simplex_with_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let m = map_rule_to_face(&duffy_simplex_rule(2, 3).unwrap(), &tri, tri.top_face()).unwrap();
        assert_relative_eq!(m.total_weight(), 0.5, max_relative = 1e-14);
        // ∫ x over the triangle is 1/3
        assert_relative_eq!(m.integrate(|x| x[0]), 1.0 / 3.0, max_relative = 1e-14);

        let id = simplex(2);
        let r = duffy_simplex_rule(2, 2).unwrap();
        let m = map_rule_to_face(&r, &id, id.top_face()).unwrap();
        // the ordered simplex maps onto conv{0, e1, e2} with x = (x̂1 − x̂2, x̂2)
        assert_relative_eq!(m.total_weight(), 0.5, max_relative = 1e-14);
        assert!(matches!(map_rule_to_face(&duffy_simplex_rule(1, 2).unwrap(), &id, id.top_face()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn general_faces() {
        let quad = polygon(vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![2.0, 1.0], vec![0.0, 2.0]]);
        let r = general_face_rule(&quad, quad.top_face(), 3, &SimplexSource::Duffy).unwrap();
        // shoelace: ((0·0 − 3·0) + (3·1 − 2·0) + (2·2 − 0·1) + 0) / 2
        assert_relative_eq!(r.total_weight(), 3.5, max_relative = 1e-13);
        assert_eq!(r.len(), 2 * 9);

        let c = cube(3);
        let r = general_face_rule(&c, c.top_face(), 2, &SimplexSource::Duffy).unwrap();
        assert_eq!(r.len(), 8);
        assert_relative_eq!(r.integrate(|x| x[0] * x[1] * x[2]), 0.125, max_relative = 1e-14);

        let v = c.face(c.face_by_vertices(&[5]).unwrap());
        let r = general_face_rule(&c, v, 4, &SimplexSource::Duffy).unwrap();
        assert_eq!(r.weights, vec![1.0]);
        assert_eq!(r.nodes, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn generalized_source_selection() {
        let centroid = parse_generalized_rule("dim 2 degree 1 count 1\n0.6666666666666666 0.3333333333333333 0.5\n", 2).unwrap();
        let src = SimplexSource::Generalized(Arc::new(vec![centroid.clone()]));
        assert_eq!(src.simplex_rule(2, 1).unwrap(), centroid);
        assert_eq!(src.simplex_rule(2, 5).unwrap(), centroid);
        assert_eq!(src.simplex_rule(3, 2).unwrap().kind, RuleKind::DuffyTensor);
    }

    #[test]
    fn csv_export() {
        let seg = simplex_with_vertices(vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        let m = general_face_rule(&seg, seg.top_face(), 1, &SimplexSource::Duffy).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,w\n1.0"));
        assert_eq!(text.lines().count(), 2);
    }
}
