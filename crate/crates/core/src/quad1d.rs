//! Gauss rules on `[0, 1]` for the weight `(1 − λ)^a λ^b`, built with the
//! Golub-Welsch algorithm from the Jacobi three-term recurrence.

use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes ascending in `[0, 1]`, positive weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `B(a, b) = Γ(a) Γ(b) / Γ(a + b)`.
pub fn beta_fn(a: f64, b: f64) -> f64 {
    if a + b < 170.0 {
        libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b)
    } else {
        (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
    }
}

/// Monic Jacobi recurrence on `[−1, 1]` for `(1 − t)^a (1 + t)^b`:
/// diagonal `α_n` for `n < p`, squared off-diagonal `β_n` for `1 ≤ n < p`.
fn jacobi_recurrence(p: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..p)
        .map(|n| {
            if n == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let t = 2.0 * n as f64 + ab;
                (b * b - a * a) / (t * (t + 2.0))
            }
        })
        .collect();
    let off = (1..p)
        .map(|n| {
            if n == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let nf = n as f64;
                let t = 2.0 * nf + ab;
                4.0 * nf * (nf + a) * (nf + b) * (nf + ab) / (t * t * (t + 1.0) * (t - 1.0))
            }
        })
        .collect();
    (diag, off)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` and the first
/// components of its normalized eigenvectors, by implicit QL with shifts.
fn tridiagonal_eigen(mut d: Vec<f64>, off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut e: Vec<f64> = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= 1e-15 * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::DomainError("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// `p`-point Gauss rule for `∫_0^1 f(λ) (1 − λ)^a λ^b dλ`, exact for
/// polynomials of degree `2p − 1`.
pub fn gauss_jacobi(p: usize, a: f64, b: f64) -> Result<Rule1D> {
    if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidExponent { a, b });
    }
    if p == 0 {
        return Err(Error::DomainError("a Gauss rule needs at least one point".into()));
    }
    let (alpha, beta) = jacobi_recurrence(p, a, b);
    let diag: Vec<f64> = alpha.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let off: Vec<f64> = beta.iter().map(|x| 0.5 * x.sqrt()).collect();
    let (nodes, first) = tridiagonal_eigen(diag, &off)?;
    let mu0 = beta_fn(a + 1.0, b + 1.0);
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(first).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|u, v| u.0.total_cmp(&v.0));
    Ok(Rule1D { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

pub fn gauss_legendre(p: usize) -> Result<Rule1D> {
    gauss_jacobi(p, 0.0, 0.0)
}

/// Points needed for a rule of polynomial degree `q`.
pub fn points_for_degree(q: usize) -> usize {
    q / 2 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta_fn(1.0, 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(beta_fn(2.0, 3.0), 1.0 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(beta_fn(0.5, 0.5), std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(beta_fn(100.0, 100.0), (libm::lgamma(100.0) * 2.0 - libm::lgamma(200.0)).exp(), max_relative = 1e-10);
    }

    #[test]
    fn legendre_two_points() {
        let r = gauss_legendre(2).unwrap();
        let h = 0.5 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], 0.5 - h, epsilon = 1e-15);
        assert_relative_eq!(r.nodes[1], 0.5 + h, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_moments_exact() {
        for &(a, b) in &[(0.0, 0.0), (2.0, 0.0), (0.0, 3.0), (1.0, 0.5), (0.0, -0.5), (3.0, -0.9), (-0.99, 2.0)] {
            for p in 1..=12 {
                let r = gauss_jacobi(p, a, b).unwrap();
                for j in 0..2 * p {
                    let exact = beta_fn(a + 1.0, b + j as f64 + 1.0);
                    assert_relative_eq!(r.integrate(|x| x.powi(j as i32)), exact, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn symmetric_weight_gives_symmetric_rule() {
        let r = gauss_jacobi(7, 1.5, 1.5).unwrap();
        for i in 0..7 {
            assert_relative_eq!(r.nodes[i] + r.nodes[6 - i], 1.0, epsilon = 1e-14);
            assert_relative_eq!(r.weights[i], r.weights[6 - i], max_relative = 1e-12);
        }
    }

    #[test]
    fn documented_values() {
        let r = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert_eq!((r.nodes[0], r.weights[0]), (0.5, 1.0));
        let r = gauss_jacobi(1, 1.0, 0.5).unwrap();
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 4.0 / 15.0, max_relative = 1e-14);
        let r = gauss_jacobi(4, 0.0, -0.5).unwrap();
        assert_relative_eq!(r.integrate(|x| x.powi(6)), 2.0 / 13.0, max_relative = 1e-13);
        assert_relative_eq!(beta_fn(1.5, 2.0), 4.0 / 15.0, max_relative = 1e-14);
        assert_relative_eq!(gauss_legendre(2).unwrap().integrate(|x| x.powi(3)), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn swapping_exponents_reflects_nodes() {
        for p in [1, 4, 9, 20] {
            let r = gauss_jacobi(p, 2.5, -0.5).unwrap();
            let s = gauss_jacobi(p, -0.5, 2.5).unwrap();
            for i in 0..p {
                assert_relative_eq!(r.nodes[i], 1.0 - s.nodes[p - 1 - i], epsilon = 1e-13);
                assert_relative_eq!(r.weights[i], s.weights[p - 1 - i], max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn nodes_interlace() {
        for p in 2..15 {
            let lo = gauss_jacobi(p - 1, 1.0, -0.5).unwrap();
            let hi = gauss_jacobi(p, 1.0, -0.5).unwrap();
            for i in 0..p - 1 {
                assert!(hi.nodes[i] < lo.nodes[i] && lo.nodes[i] < hi.nodes[i + 1]);
            }
            assert!(hi.nodes[0] > 0.0 && hi.nodes[p - 1] < 1.0);
            assert!(hi.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn invalid_arguments() {
        assert_eq!(gauss_jacobi(3, -1.0, 0.0), Err(Error::InvalidExponent { a: -1.0, b: 0.0 }));
        assert!(matches!(gauss_jacobi(0, 0.0, 0.0), Err(Error::DomainError(_))));
        assert_eq!(points_for_degree(0), 1);
        assert_eq!(points_for_degree(7), 4);
    }
}
