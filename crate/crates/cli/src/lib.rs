//! Command-line front end for `pyraquad`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use pyraquad::assembly::{
    assemble_kernel_rule, convergence_sweep, write_convergence_csv, KernelSpec, RuleSources, SmoothPart,
};
use pyraquad::decomposition::{
    cube_pair, product_decomp, product_lattice, sample_membership, simplex_pair, two_cubes_count, two_cubes_decomp,
    two_simplices_count, two_simplices_decomp, ApexRule, PairDecomposition,
};
use pyraquad::face_rules::{load_rule_file, SimplexSource};
use pyraquad::geometry::{face_volume, polytope_from_json, polytope_from_value, Polytope};
use pyraquad::quad1d::{beta_fn, gauss_jacobi};
use pyraquad::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "pyraquad", version, about = "Quadrature for weakly singular integrals over pairs of polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose P_x × P_y into hull pieces and print them as JSON.
    Decompose {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Also write the pyramidal lattice in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export the composite rule as CSV.
    Rule {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        quad: QuadArgs,
        /// Polynomial degree of the rule.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Leave the kernel factor |x - y|^(-alpha) out of the weights.
        #[arg(long)]
        unfolded: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate |x - y|^(-alpha) g(x, y) and print the value as JSON.
    Integrate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value = "one")]
        g: String,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Errors against the highest degree, as CSV.
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value = "one")]
        g: String,
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "2..12")]
        degrees: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run built-in consistency suites and report pass/fail per check.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Dimensions, `a..b` or a list.
        #[arg(long, default_value = "1..3")]
        dims: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Volume,
    Counts,
    Moments,
    Membership,
    All,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    /// Simplices of dimensions n and m sharing vertices 0..=k.
    #[arg(long, num_args = 3, value_names = ["N", "M", "K"])]
    pub simplex_pair: Option<Vec<usize>>,
    /// [0,1]^d and [0,1]^k × [-1,0]^(d-k).
    #[arg(long, num_args = 2, value_names = ["D", "K"])]
    pub cube_pair: Option<Vec<usize>>,
    /// Two polytope JSON files.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub polytopes: Option<Vec<PathBuf>>,
    /// Shared vertex pairs `i:j,...` for `--polytopes`.
    #[arg(long)]
    pub shared: Option<String>,
    /// JSON file with `px`, `py` and `shared`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the generic lattice decomposition even for simplex and cube pairs.
    #[arg(long)]
    pub generic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// `duffy` or `file:<path>`; repeat to load several rule files.
    #[arg(long, default_value = "duffy")]
    pub source: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    px: Value,
    py: Value,
    shared: Vec<(usize, usize)>,
}

/// The smooth factor named on the command line.
pub fn builtin_kernels(name: &str, d: usize) -> Result<SmoothPart> {
    SmoothPart::parse(name, d)
}

/// `a..b` (inclusive) or `a,b,c`.
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::ParseError(format!("expected `a..b` or a comma-separated list, got `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let out: Vec<usize> = text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_shared(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(|pair| {
            let (i, j) = pair
                .split_once(':')
                .ok_or_else(|| Error::ParseError(format!("shared pair `{pair}` must read i:j")))?;
            let p = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::ParseError(format!("bad index in `{pair}`")));
            Ok((p(i)?, p(j)?))
        })
        .collect()
}

fn read_polytope(path: &Path) -> Result<Polytope> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    polytope_from_json(&text)
}

/// Builds the decomposition described by the problem flags.
pub fn build_problem(args: &ProblemArgs) -> Result<PairDecomposition> {
    let given = [args.simplex_pair.is_some(), args.cube_pair.is_some(), args.polytopes.is_some(), args.config.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::ParseError(
            "give exactly one of --simplex-pair, --cube-pair, --polytopes, --config".into(),
        ));
    }
    let rule = ApexRule::LowestId;
    if let Some(v) = &args.simplex_pair {
        let (n, m, k) = (v[0], v[1], v[2]);
        if n == 0 || m == 0 || k > n.min(m) {
            return Err(Error::DomainError(format!("simplex pair needs 1 <= n, m and k <= min(n, m); got {n} {m} {k}")));
        }
        let (sx, sy) = simplex_pair(n, m, k);
        if args.generic {
            let shared: Vec<(usize, usize)> = (0..=k).map(|i| (i, i)).collect();
            return product_decomp(&sx, &sy, &shared, &rule);
        }
        return two_simplices_decomp(&sx, &sy, k);
    }
    if let Some(v) = &args.cube_pair {
        let (d, k) = (v[0], v[1]);
        if args.generic {
            if d == 0 || k > d {
                return Err(Error::DomainError(format!("cube pair needs 1 <= d and k <= d, got {d} {k}")));
            }
            let (cx, cy, shared) = cube_pair(d, k);
            return product_decomp(&cx, &cy, &shared, &rule);
        }
        return two_cubes_decomp(d, k);
    }
    if let Some(paths) = &args.polytopes {
        let shared = parse_shared(
            args.shared
                .as_deref()
                .ok_or_else(|| Error::ParseError("--polytopes needs --shared i:j,...".into()))?,
        )?;
        return product_decomp(&read_polytope(&paths[0])?, &read_polytope(&paths[1])?, &shared, &rule);
    }
    let path = args.config.as_ref().unwrap();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| Error::ParseError(e.to_string()))?;
    product_decomp(&polytope_from_value(&cfg.px)?, &polytope_from_value(&cfg.py)?, &cfg.shared, &rule)
}

fn problem_lattice_dot(args: &ProblemArgs) -> Result<String> {
    let (px, py, shared) = if let Some(v) = &args.simplex_pair {
        let (sx, sy) = simplex_pair(v[0], v[1], v[2]);
        (sx, sy, (0..=v[2]).map(|i| (i, i)).collect::<Vec<_>>())
    } else if let Some(v) = &args.cube_pair {
        cube_pair(v[0], v[1])
    } else if let Some(paths) = &args.polytopes {
        (read_polytope(&paths[0])?, read_polytope(&paths[1])?, parse_shared(args.shared.as_deref().unwrap_or(""))?)
    } else {
        let path = args.config.as_ref().unwrap();
        let text = std::fs::read_to_string(path)?;
        let cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| Error::ParseError(e.to_string()))?;
        (polytope_from_value(&cfg.px)?, polytope_from_value(&cfg.py)?, cfg.shared)
    };
    let (prod, lat) = product_lattice(&px, &py, &shared, &ApexRule::LowestId)?;
    Ok(lat.to_dot(&prod.poly))
}

fn sources(specs: &[String]) -> Result<RuleSources> {
    let mut rules = Vec::new();
    for s in specs {
        if s == "duffy" {
            continue;
        }
        let path = s
            .strip_prefix("file:")
            .ok_or_else(|| Error::ParseError(format!("unknown rule source `{s}` (use duffy or file:<path>)")))?;
        rules.push(load_rule_file(Path::new(path))?);
    }
    let src = if rules.is_empty() { SimplexSource::Duffy } else { SimplexSource::Generalized(Arc::new(rules)) };
    Ok(RuleSources { apex: src.clone(), faces: src })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("alpha must be finite, got {alpha}")))
    }
}

fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(output: &Option<PathBuf>, value: &Value) -> Result<()> {
    let mut out = sink(output)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// JSON description of a decomposition.
pub fn decomposition_json(dec: &PairDecomposition) -> Result<Value> {
    let pieces: Vec<Value> = dec
        .pieces
        .iter()
        .enumerate()
        .map(|(id, p)| -> Result<Value> {
            Ok(json!({
                "id": id,
                "apex": p.apex_pairs,
                "apex_simplices": p.apex.simplices,
                "base_x": dec.px.face(p.base_x).vertex_ids,
                "base_y": dec.py.face(p.base_y).vertex_ids,
                "delta": p.descriptor.delta,
                "s": p.descriptor.s,
                "r": p.descriptor.r,
                "multiplicity": p.multiplicity,
                "volume": dec.piece_volume(p)?,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "count": dec.pieces.len(),
        "paths": dec.num_paths(),
        "total_volume": dec.total_volume()?,
        "pieces": pieces,
    }))
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn verify(suite: Suite, dims: &[usize], seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let pairs = |d: usize| -> Result<Vec<(String, PairDecomposition)>> {
        let mut out = Vec::new();
        for k in 0..=d {
            let (sx, sy) = simplex_pair(d, d, k);
            out.push((format!("simplex d={d} k={k}"), two_simplices_decomp(&sx, &sy, k)?));
            out.push((format!("cube d={d} k={k}"), two_cubes_decomp(d, k)?));
        }
        Ok(out)
    };
    if wants(Suite::Counts) {
        for &d in dims {
            for k in 0..=d {
                let (sx, sy) = simplex_pair(d, d, k);
                let shared: Vec<(usize, usize)> = (0..=k).map(|i| (i, i)).collect();
                let got = product_decomp(&sx, &sy, &shared, &ApexRule::LowestId)?.pieces.len();
                let want = two_simplices_count(d, d, k);
                checks.push(Check { name: format!("counts simplex d={d} k={k}"), pass: got == want, detail: format!("{got} pieces, formula {want}") });
                let (cx, cy, shared) = cube_pair(d, k);
                let got = product_decomp(&cx, &cy, &shared, &ApexRule::LowestId)?.pieces.len();
                let want = two_cubes_count(d, k);
                checks.push(Check { name: format!("counts cube d={d} k={k}"), pass: got == want, detail: format!("{got} pieces, formula {want}") });
            }
        }
    }
    if wants(Suite::Volume) {
        for &d in dims {
            for (name, dec) in pairs(d)? {
                let w = assemble_kernel_rule(&dec, 0.0, 1, &RuleSources::default())?.weight_sum()?;
                let exact = face_volume(&dec.px, dec.px.top_face())? * face_volume(&dec.py, dec.py.top_face())?;
                let err = (w - exact).abs() / exact;
                checks.push(Check { name: format!("volume {name}"), pass: err <= 1e-9, detail: format!("rel error {err:.2e} (tol 1e-9)") });
            }
        }
    }
    if wants(Suite::Moments) {
        let exps = [-0.9, -0.5, 0.0, 1.0, 2.5, 7.0];
        for &a in &exps {
            for &b in &exps {
                let mass = beta_fn(a + 1.0, b + 1.0);
                let mut worst: f64 = 0.0;
                for p in 1..=30 {
                    let r = gauss_jacobi(p, a, b)?;
                    for m in 0..2 * p {
                        let exact = beta_fn(a + 1.0, b + m as f64 + 1.0);
                        worst = worst.max((r.integrate(|x| x.powi(m as i32)) - exact).abs() / mass);
                    }
                }
                checks.push(Check { name: format!("moments a={a} b={b}"), pass: worst <= 1e-12, detail: format!("max error {worst:.2e} (tol 1e-12)") });
            }
        }
    }
    if wants(Suite::Membership) {
        for &d in dims.iter().filter(|&&d| d <= 3) {
            for (name, dec) in pairs(d)? {
                let r = sample_membership(&dec, 2000, seed, 1e-9);
                checks.push(Check { name: format!("membership {name}"), pass: r.all_unique(), detail: format!("{r:?}") });
            }
        }
    }
    Ok(checks)
}

/// Runs one command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::DomainError(e.to_string()))?;
    }
    match cli.command {
        Command::Decompose { problem, dot, output } => {
            let dec = build_problem(&problem)?;
            if let Some(path) = dot {
                std::fs::write(&path, problem_lattice_dot(&problem)?)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            write_json(&output, &decomposition_json(&dec)?)?;
        }
        Command::Rule { problem, quad, degree, unfolded, output } => {
            check_alpha(quad.alpha)?;
            let dec = build_problem(&problem)?;
            let rule = assemble_kernel_rule(&dec, quad.alpha, degree, &sources(&quad.source)?)?;
            let mut out = sink(&output)?;
            rule.write_csv(&mut out, unfolded)?;
            out.flush()?;
        }
        Command::Integrate { problem, quad, g, degree, output } => {
            check_alpha(quad.alpha)?;
            let dec = build_problem(&problem)?;
            let kernel = builtin_kernels(&g, dec.ambient_dim())?;
            let start = Instant::now();
            let rule = assemble_kernel_rule(&dec, quad.alpha, degree, &sources(&quad.source)?)?;
            let value = rule.integrate(&kernel)?;
            write_json(
                &output,
                &json!({
                    "value": value,
                    "nodes": rule.num_nodes(),
                    "pieces": rule.pieces.len(),
                    "degree": degree,
                    "alpha": quad.alpha,
                    "g": g,
                    "seconds": start.elapsed().as_secs_f64(),
                }),
            )?;
        }
        Command::Convergence { problem, quad, g, degrees, output } => {
            check_alpha(quad.alpha)?;
            let degrees = parse_range(&degrees)?;
            let dec = build_problem(&problem)?;
            let kernel = KernelSpec { alpha: quad.alpha, g: builtin_kernels(&g, dec.ambient_dim())?, d: dec.ambient_dim() };
            let rows = convergence_sweep(&dec, &kernel, &degrees, &sources(&quad.source)?)?;
            let mut out = sink(&output)?;
            write_convergence_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::Verify { suite, dims, seed, output } => {
            let dims = parse_range(&dims)?;
            if dims.iter().any(|&d| d == 0 || d > 4) {
                return Err(Error::DomainError("verify supports dimensions 1..4".into()));
            }
            let checks = verify(suite, &dims, seed)?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            {
                let mut err = io::stderr().lock();
                for c in &checks {
                    writeln!(err, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
                }
            }
            let list: Vec<Value> =
                checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
            write_json(&output, &json!({"checks": list, "passed": checks.len() - failed, "failed": failed}))?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// `{"error": {"kind": ..., "message": ...}}`
pub fn error_json(e: &Error) -> String {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}}).to_string()
}

/// Same shape as [`error_json`] for command-line parse failures.
pub fn usage_error_json(message: &str) -> String {
    json!({"error": {"kind": "UsageError", "message": message.trim()}}).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("2, 4,8").unwrap(), vec![2, 4, 8]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn shared_pairs() {
        assert_eq!(parse_shared("0:0,1:2").unwrap(), vec![(0, 0), (1, 2)]);
        assert!(parse_shared("0-0").is_err());
    }

    #[test]
    fn kernels() {
        assert_eq!(builtin_kernels("exp-sum", 2).unwrap().eval(&[0.0, 0.0], &[0.0, 0.0]), 1.0);
        assert_eq!(builtin_kernels("coord-poly:x1*y2", 2).unwrap().eval(&[3.0, 0.0], &[0.0, 5.0]), 15.0);
        assert_eq!(builtin_kernels("gauss", 2).unwrap_err().kind(), "UnknownKernel");
    }

    #[test]
    fn exactly_one_problem() {
        let none = ProblemArgs::default();
        assert!(build_problem(&none).is_err());
        let two = ProblemArgs { simplex_pair: Some(vec![1, 1, 0]), cube_pair: Some(vec![1, 0]), ..Default::default() };
        assert!(build_problem(&two).is_err());
    }
}
