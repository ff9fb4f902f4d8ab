//! The composite rule for `∫_{P_x} ∫_{P_y} |x − y|^(−α) g(x, y) dy dx`.
//!
//! Each hull piece `conv(A, F_x × F_y)` is parameterized by
//! `x = (1 − λ) a + λ x_F`, `y = (1 − λ) a + λ y_F` with `a` on the diagonal,
//! so `|x − y| = λ |x_F − y_F|`. The piece contributes
//!
//! ```text
//! δ ∫_0^1 ∫_A ∫_{F_x} ∫_{F_y} g(x, y) |x_F − y_F|^(−α) (1 − λ)^s λ^(r − α)
//! ```
//!
//! with `s = dim A` and `r = dim F_x + dim F_y`; the `λ` integral uses a
//! Gauss-Jacobi rule for that weight.
//!
//! A [`KernelRule`] keeps the per-piece factor rules instead of the full
//! tensor product, which for high degrees has tens of millions of nodes.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::PairDecomposition;
use crate::error::{Error, Result};
use crate::face_rules::{cell_rule, general_face_rule, EmbeddedRule, SimplexSource};
use crate::quad1d::{gauss_jacobi, points_for_degree, Rule1D};

/// Bases closer than this (relative to the polytope diameters) to the
/// diagonal are reported as degenerate.
const BASE_TOL: f64 = 1e-12;

pub type SmoothFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Smooth factor `g` of the kernel. Callbacks must be pure: they are called
/// concurrently from several threads.
#[derive(Clone)]
pub enum SmoothPart {
    One,
    /// `exp(Σ_i x_i + y_i)`
    ExpSum,
    /// `Π x_i^{a_i} y_i^{b_i}`
    Monomial { x: Vec<u32>, y: Vec<u32> },
    Custom(SmoothFn),
}

impl std::fmt::Debug for SmoothPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothPart::One => write!(f, "One"),
            SmoothPart::ExpSum => write!(f, "ExpSum"),
            SmoothPart::Monomial { x, y } => write!(f, "Monomial {{ x: {x:?}, y: {y:?} }}"),
            SmoothPart::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl SmoothPart {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            SmoothPart::One => 1.0,
            SmoothPart::ExpSum => (x.iter().sum::<f64>() + y.iter().sum::<f64>()).exp(),
            SmoothPart::Monomial { x: ex, y: ey } => {
                let px: f64 = x.iter().zip(ex).map(|(v, &e)| v.powi(e as i32)).product();
                let py: f64 = y.iter().zip(ey).map(|(v, &e)| v.powi(e as i32)).product();
                px * py
            }
            SmoothPart::Custom(f) => f(x, y),
        }
    }

    /// `one`, `exp-sum`, or `coord-poly:<monomial>` with a monomial such as
    /// `x1*y2^3` (1-based coordinates, `1` for the constant).
    pub fn parse(spec: &str, d: usize) -> Result<Self> {
        match spec {
            "one" => Ok(SmoothPart::One),
            "exp-sum" => Ok(SmoothPart::ExpSum),
            _ => {
                let body = spec
                    .strip_prefix("coord-poly:")
                    .ok_or_else(|| Error::UnknownKernel(spec.to_string()))?;
                let (mut ex, mut ey) = (vec![0u32; d], vec![0u32; d]);
                for factor in body.split('*').map(str::trim) {
                    if factor == "1" {
                        continue;
                    }
                    let (var, pow) = match factor.split_once('^') {
                        Some((v, p)) => (v, p.parse::<u32>().map_err(|_| Error::UnknownKernel(spec.to_string()))?),
                        None => (factor, 1),
                    };
                    let mut chars = var.chars();
                    let target = match chars.next() {
                        Some('x') => &mut ex,
                        Some('y') => &mut ey,
                        _ => return Err(Error::UnknownKernel(spec.to_string())),
                    };
                    let idx: usize = chars.as_str().parse().map_err(|_| Error::UnknownKernel(spec.to_string()))?;
                    if idx == 0 || idx > d {
                        return Err(Error::UnknownKernel(format!("{spec}: coordinate {idx} out of range 1..={d}")));
                    }
                    target[idx - 1] += pow;
                }
                Ok(SmoothPart::Monomial { x: ex, y: ey })
            }
        }
    }
}

/// `k(x, y) = |x − y|^(−α) g(x, y)` on `R^d × R^d`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub alpha: f64,
    pub g: SmoothPart,
    pub d: usize,
}

/// Rule sources for the apex cells and for the base faces.
#[derive(Debug, Clone, Default)]
pub struct RuleSources {
    pub apex: SimplexSource,
    pub faces: SimplexSource,
}

/// Factor rules of one piece. The apex rule lives in `R^{2d}`.
#[derive(Debug, Clone, Serialize)]
pub struct PieceRule {
    pub piece: usize,
    pub delta: f64,
    pub s: usize,
    pub r: usize,
    pub lambda: Rule1D,
    pub apex: EmbeddedRule,
    pub fx: EmbeddedRule,
    pub fy: EmbeddedRule,
}

impl PieceRule {
    pub fn num_nodes(&self) -> usize {
        self.lambda.len() * self.apex.len() * self.fx.len() * self.fy.len()
    }
}

/// The composite rule, with `|x_F − y_F|^(−α)` folded into the weights.
#[derive(Debug, Clone, Serialize)]
pub struct KernelRule {
    pub alpha: f64,
    pub degree: usize,
    pub points: usize,
    pub d: usize,
    pub pieces: Vec<PieceRule>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Builds the composite rule of polynomial degree `degree` (that is,
/// `⌊degree/2⌋ + 1` points per direction).
pub fn assemble_kernel_rule(dec: &PairDecomposition, alpha: f64, degree: usize, sources: &RuleSources) -> Result<KernelRule> {
    let p = points_for_degree(degree);
    let d = dec.ambient_dim();
    let scale = dec.px.diameter().max(dec.py.diameter()).max(f64::MIN_POSITIVE);
    let pieces = dec
        .pieces
        .par_iter()
        .enumerate()
        .map(|(id, piece)| -> Result<PieceRule> {
            let h = piece.descriptor;
            if alpha >= h.r as f64 + 1.0 {
                return Err(Error::IntegrabilityViolated { alpha, r: h.r });
            }
            let lambda = gauss_jacobi(p, h.s as f64, h.r as f64 - alpha)?;
            let apex = cell_rule(&piece.apex, p, &sources.apex)?;
            let fx = general_face_rule(&dec.px, dec.px.face(piece.base_x), p, &sources.faces)?;
            let fy = general_face_rule(&dec.py, dec.py.face(piece.base_y), p, &sources.faces)?;
            let mut closest = f64::INFINITY;
            for i in 0..fx.len() {
                for j in 0..fy.len() {
                    closest = closest.min(dist(fx.node(i), fy.node(j)));
                }
            }
            if closest <= BASE_TOL * scale {
                return Err(Error::DegenerateBase { piece: id, distance: closest });
            }
            Ok(PieceRule { piece: id, delta: h.delta, s: h.s, r: h.r, lambda, apex, fx, fy })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelRule { alpha, degree, points: p, d, pieces })
}

impl KernelRule {
    pub fn num_nodes(&self) -> usize {
        self.pieces.iter().map(|p| p.num_nodes()).sum()
    }

    /// Calls `f(x, y, w, piece)` for every node. With `unfolded`, `w` omits the
    /// kernel factor `|x − y|^(−α)`, so `Σ w k(x, y)` integrates any kernel `k`.
    pub fn for_each_node(&self, unfolded: bool, mut f: impl FnMut(&[f64], &[f64], f64, usize)) {
        let d = self.d;
        let (mut x, mut y) = (vec![0.0; d], vec![0.0; d]);
        for pr in &self.pieces {
            for i in 0..pr.fx.len() {
                let xf = pr.fx.node(i);
                for j in 0..pr.fy.len() {
                    let yf = pr.fy.node(j);
                    let base_w = pr.delta * pr.fx.weights[i] * pr.fy.weights[j] * dist(xf, yf).powf(-self.alpha);
                    for a in 0..pr.apex.len() {
                        let an = pr.apex.node(a);
                        for (&lam, &wl) in pr.lambda.nodes.iter().zip(&pr.lambda.weights) {
                            for k in 0..d {
                                x[k] = (1.0 - lam) * an[k] + lam * xf[k];
                                y[k] = (1.0 - lam) * an[d + k] + lam * yf[k];
                            }
                            let mut w = base_w * pr.apex.weights[a] * wl;
                            if unfolded {
                                w *= dist(&x, &y).powf(self.alpha);
                            }
                            f(&x, &y, w, pr.piece);
                        }
                    }
                }
            }
        }
    }

    /// CSV: a line `alpha,degree,d` with its values, then the column header
    /// `x1..xd,y1..yd,w,piece_id` and one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W, unfolded: bool) -> Result<()> {
        writeln!(out, "alpha,degree,d")?;
        writeln!(out, "{},{},{}", self.alpha, self.degree, self.d)?;
        let cols: Vec<String> = (1..=self.d)
            .map(|i| format!("x{i}"))
            .chain((1..=self.d).map(|i| format!("y{i}")))
            .chain(["w".into(), "piece_id".into()])
            .collect();
        writeln!(out, "{}", cols.join(","))?;
        let mut err = None;
        let mut line = String::new();
        self.for_each_node(unfolded, |x, y, w, piece| {
            if err.is_some() {
                return;
            }
            line.clear();
            for v in x.iter().chain(y).chain([&w]) {
                line.push_str(&format!("{v:.17e},"));
            }
            line.push_str(&piece.to_string());
            if let Err(e) = writeln!(out, "{line}") {
                err = Some(e);
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    }

    /// `Σ_q w_q g(x_q, y_q)`. Pieces and base nodes are processed in
    /// parallel; partial sums are combined in a fixed order.
    pub fn integrate(&self, g: &SmoothPart) -> Result<f64> {
        let d = self.d;
        let alpha = self.alpha;
        let partials = self
            .pieces
            .par_iter()
            .map(|pr| -> Result<f64> {
                let rows = (0..pr.fx.len())
                    .into_par_iter()
                    .map(|i| -> Result<f64> {
                        let (mut x, mut y) = (vec![0.0; d], vec![0.0; d]);
                        let xf = pr.fx.node(i);
                        let mut sum = 0.0;
                        for j in 0..pr.fy.len() {
                            let yf = pr.fy.node(j);
                            let base_w = pr.delta * pr.fx.weights[i] * pr.fy.weights[j] * dist(xf, yf).powf(-alpha);
                            let mut inner = 0.0;
                            for a in 0..pr.apex.len() {
                                let an = pr.apex.node(a);
                                let mut lam_sum = 0.0;
                                for (&lam, &wl) in pr.lambda.nodes.iter().zip(&pr.lambda.weights) {
                                    for k in 0..d {
                                        x[k] = (1.0 - lam) * an[k] + lam * xf[k];
                                        y[k] = (1.0 - lam) * an[d + k] + lam * yf[k];
                                    }
                                    let v = g.eval(&x, &y);
                                    if !v.is_finite() {
                                        return Err(Error::NonFiniteValue { piece: pr.piece, x: x.clone(), y: y.clone(), value: v });
                                    }
                                    lam_sum += wl * v;
                                }
                                inner += pr.apex.weights[a] * lam_sum;
                            }
                            sum += base_w * inner;
                        }
                        Ok(sum)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(rows.iter().sum())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(partials.iter().sum())
    }

    pub fn weight_sum(&self) -> Result<f64> {
        self.integrate(&SmoothPart::One)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub nodes: usize,
    pub value: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Values for each degree, with errors against the value at the last
/// (highest) degree.
pub fn convergence_sweep(
    dec: &PairDecomposition,
    kernel: &KernelSpec,
    degrees: &[usize],
    sources: &RuleSources,
) -> Result<Vec<ConvergenceRow>> {
    if degrees.is_empty() || degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DomainError("degrees must be nonempty and strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &q in degrees {
        let rule = assemble_kernel_rule(dec, kernel.alpha, q, sources)?;
        let value = rule.integrate(&kernel.g)?;
        rows.push(ConvergenceRow { degree: q, nodes: rule.num_nodes(), value, abs_err: 0.0, rel_err: 0.0 });
    }
    let reference = rows.last().unwrap().value;
    for row in &mut rows {
        row.abs_err = (row.value - reference).abs();
        row.rel_err = row.abs_err / reference.abs();
    }
    Ok(rows)
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> Result<()> {
    writeln!(out, "degree,nodes,value,abs_err,rel_err")?;
    for r in rows {
        writeln!(out, "{},{},{:.17e},{:.6e},{:.6e}", r.degree, r.nodes, r.value, r.abs_err, r.rel_err)?;
    }
    Ok(())
}

/// Limits for [`oracle_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_nodes: 50_000_000, rel_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    /// Estimated absolute accuracy.
    pub accuracy: f64,
    pub method: &'static str,
    pub degree: Option<usize>,
}

/// `∫_a^b ∫_c^d |x − y|^(−α) dy dx` for intervals with disjoint interiors.
pub fn interval_pair_integral(a: f64, b: f64, c: f64, d: f64, alpha: f64) -> f64 {
    let f = |t: f64| t.abs().powf(2.0 - alpha) / ((1.0 - alpha) * (2.0 - alpha));
    -(f(b - d) - f(a - d) - f(b - c) + f(a - c))
}

/// Reference value: closed forms where available (`g ≡ 1` with `α = 0`, or
/// two intervals), otherwise degree escalation until two successive
/// differences fall below `rel_tol`.
pub fn oracle_integrate(dec: &PairDecomposition, kernel: &KernelSpec, budget: OracleBudget) -> Result<OracleValue> {
    if matches!(kernel.g, SmoothPart::One) {
        if kernel.alpha == 0.0 {
            let vx = crate::geometry::face_volume(&dec.px, dec.px.top_face())?;
            let vy = crate::geometry::face_volume(&dec.py, dec.py.top_face())?;
            return Ok(OracleValue { value: vx * vy, accuracy: 0.0, method: "volume-product", degree: None });
        }
        if dec.ambient_dim() == 1 && dec.px.dim() == 1 && dec.py.dim() == 1 && kernel.alpha < 1.0 {
            let ends = |p: &crate::geometry::Polytope| {
                let (u, v) = (p.vertex(0)[0], p.vertex(1)[0]);
                (u.min(v), u.max(v))
            };
            let ((a, b), (c, d)) = (ends(&dec.px), ends(&dec.py));
            let value = interval_pair_integral(a, b, c, d, kernel.alpha);
            return Ok(OracleValue { value, accuracy: 1e-15 * value.abs(), method: "closed-form-1d", degree: None });
        }
    }
    let sources = RuleSources::default();
    let mut history: Vec<f64> = Vec::new();
    let mut q = 2;
    loop {
        let rule = assemble_kernel_rule(dec, kernel.alpha, q, &sources)?;
        if rule.num_nodes() > budget.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "degree {q} needs {} nodes, budget is {}; last values {history:?}",
                rule.num_nodes(),
                budget.max_nodes
            )));
        }
        let v = rule.integrate(&kernel.g)?;
        history.push(v);
        let n = history.len();
        if n >= 3 {
            let d1 = (history[n - 1] - history[n - 2]).abs();
            let d2 = (history[n - 2] - history[n - 3]).abs();
            if d1 <= budget.rel_tol * v.abs() && d2 <= budget.rel_tol * v.abs() {
                return Ok(OracleValue { value: v, accuracy: d1.max(d2), method: "degree-escalation", degree: Some(q) });
            }
        }
        q += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{cube_pair, product_decomp, simplex_pair, two_simplices_decomp, ApexRule};
    use crate::geometry::simplex;
    use approx::assert_relative_eq;

    fn unit_segments() -> PairDecomposition {
        let (sx, sy) = simplex_pair(1, 1, 1);
        two_simplices_decomp(&sx, &sy, 1).unwrap()
    }

    #[test]
    fn one_dimensional_closed_form() {
        let dec = unit_segments();
        for q in [0, 1, 4] {
            let rule = assemble_kernel_rule(&dec, 0.5, q, &RuleSources::default()).unwrap();
            // constant g: only the λ weight matters, and it is exact
            assert_relative_eq!(rule.weight_sum().unwrap(), 8.0 / 3.0, max_relative = 1e-13);
        }
        assert_relative_eq!(interval_pair_integral(0.0, 1.0, 0.0, 1.0, 0.5), 8.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn alpha_zero_gives_volume_product() {
        let s = simplex(2);
        let t = crate::geometry::simplex_with_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, -1.0]]);
        let dec = product_decomp(&s, &t, &[(0, 0), (1, 1)], &ApexRule::LowestId).unwrap();
        let rule = assemble_kernel_rule(&dec, 0.0, 2, &RuleSources::default()).unwrap();
        assert_relative_eq!(rule.weight_sum().unwrap(), 0.25, max_relative = 1e-13);
    }

    #[test]
    fn lambda_scaling_and_node_count() {
        let (cx, cy, shared) = cube_pair(2, 1);
        let dec = product_decomp(&cx, &cy, &shared, &ApexRule::LowestId).unwrap();
        let rule = assemble_kernel_rule(&dec, 0.7, 3, &RuleSources::default()).unwrap();
        let mut count = 0;
        rule.for_each_node(false, |x, y, w, _| {
            count += 1;
            assert!(w.is_finite() && w > 0.0);
            assert!(dist(x, y) > 0.0);
        });
        assert_eq!(count, rule.num_nodes());
        let p = rule.points;
        let expected: usize = dec
            .pieces
            .iter()
            .map(|pc| {
                let apex_n = if pc.apex.dim() == 0 { 1 } else { p.pow(pc.apex.dim() as u32) };
                let nx = p.pow(dec.px.face(pc.base_x).dim as u32);
                let ny = p.pow(dec.py.face(pc.base_y).dim as u32);
                p * apex_n * nx * ny
            })
            .sum();
        assert_eq!(rule.num_nodes(), expected);
    }

    #[test]
    fn unfolded_weights_reproduce_integral() {
        let dec = unit_segments();
        let rule = assemble_kernel_rule(&dec, 0.5, 6, &RuleSources::default()).unwrap();
        let g = SmoothPart::ExpSum;
        let folded = rule.integrate(&g).unwrap();
        let mut unfolded = 0.0;
        rule.for_each_node(true, |x, y, w, _| unfolded += w * dist(x, y).powf(-0.5) * g.eval(x, y));
        assert_relative_eq!(folded, unfolded, max_relative = 1e-12);
    }

    #[test]
    fn integrability_is_checked() {
        let dec = unit_segments();
        assert!(matches!(
            assemble_kernel_rule(&dec, 1.0, 2, &RuleSources::default()),
            Err(Error::IntegrabilityViolated { r: 0, .. })
        ));
    }

    #[test]
    fn non_finite_values_are_reported() {
        let dec = unit_segments();
        let rule = assemble_kernel_rule(&dec, 0.0, 2, &RuleSources::default()).unwrap();
        let bad = SmoothPart::Custom(Arc::new(|x, _| if x[0] > 0.5 { f64::NAN } else { 1.0 }));
        assert!(matches!(rule.integrate(&bad), Err(Error::NonFiniteValue { .. })));
    }

    #[test]
    fn smooth_part_parsing() {
        let g = SmoothPart::parse("coord-poly:x1*y2^3*x1", 2).unwrap();
        assert_eq!(g.eval(&[2.0, 5.0], &[7.0, 3.0]), 4.0 * 27.0);
        assert_eq!(SmoothPart::parse("coord-poly:1", 2).unwrap().eval(&[2.0, 2.0], &[1.0, 1.0]), 1.0);
        assert!(matches!(SmoothPart::parse("coord-poly:z1", 2), Err(Error::UnknownKernel(_))));
        assert!(matches!(SmoothPart::parse("coord-poly:x3", 2), Err(Error::UnknownKernel(_))));
        assert!(matches!(SmoothPart::parse("sin", 2), Err(Error::UnknownKernel(_))));
        assert_relative_eq!(SmoothPart::ExpSum.eval(&[0.5], &[0.5]), std::f64::consts::E);
    }

    #[test]
    fn sweep_reference_is_last_degree() {
        let dec = unit_segments();
        let k = KernelSpec { alpha: 0.5, g: SmoothPart::ExpSum, d: 1 };
        let rows = convergence_sweep(&dec, &k, &[2, 4, 8], &RuleSources::default()).unwrap();
        assert_eq!(rows.last().unwrap().abs_err, 0.0);
        assert!(rows[0].abs_err > rows[1].abs_err);
        assert!(convergence_sweep(&dec, &k, &[4, 2], &RuleSources::default()).is_err());
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("degree,nodes,value,abs_err,rel_err\n2,"));
    }

    #[test]
    fn oracle_paths() {
        let dec = unit_segments();
        let one = KernelSpec { alpha: 0.5, g: SmoothPart::One, d: 1 };
        let o = oracle_integrate(&dec, &one, OracleBudget::default()).unwrap();
        assert_eq!(o.method, "closed-form-1d");
        assert_relative_eq!(o.value, 8.0 / 3.0, max_relative = 1e-15);
        let e = KernelSpec { alpha: 0.5, g: SmoothPart::ExpSum, d: 1 };
        let o = oracle_integrate(&dec, &e, OracleBudget::default()).unwrap();
        assert_eq!(o.method, "degree-escalation");
        let tight = OracleBudget { max_nodes: 10, rel_tol: 1e-15 };
        assert!(matches!(oracle_integrate(&dec, &e, tight), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn csv_layout() {
        let dec = unit_segments();
        let rule = assemble_kernel_rule(&dec, 0.5, 0, &RuleSources::default()).unwrap();
        let mut buf = Vec::new();
        rule.write_csv(&mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha,degree,d");
        assert_eq!(lines[1], "0.5,0,1");
        assert_eq!(lines[2], "x1,y1,w,piece_id");
        assert_eq!(lines.len(), 3 + rule.num_nodes());
    }
}
