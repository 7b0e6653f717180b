//! Gauss–Legendre and Gauss–Jacobi rules.

use nalgebra::{DMatrix, SymmetricEigen};

use super::gamma::gamma;
use crate::error::{domain, Result};

/// Nodes and weights of an n-point rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre rule, nodes found by Newton iteration on P_n.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Gauss–Jacobi rule for the weight `(1 - x)^a (1 + x)^b`, built by the
    /// Golub–Welsch eigenvalue method.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 || !(a > -1.0) || !(b > -1.0) {
            return domain(format!("Gauss-Jacobi needs n >= 1 and a, b > -1 (n={n}, a={a}, b={b})"));
        }
        let ab = a + b;
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let diag = if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            };
            jm[(k, k)] = diag;
            if k + 1 < n {
                let m = kf + 1.0;
                let beta = if k == 0 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * m * (m + a) * (m + b) * (m + ab)
                        / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
                };
                let off = beta.sqrt();
                jm[(k, k + 1)] = off;
                jm[(k + 1, k)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(ab + 2.0)?;
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to `f` on `[lo, hi]` (plain Legendre-type mapping).
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Split `t = kπ + s` with `s` accurate to its own ulp rather than to ulp(t).
pub fn reduce_pi(t: f64) -> (i64, f64) {
    // π = PI + PI_TAIL to about 32 digits
    const PI_TAIL: f64 = 1.224_646_799_147_353_2e-16;
    let k = (t / std::f64::consts::PI).floor();
    let s = (-k).mul_add(std::f64::consts::PI, t) - k * PI_TAIL;
    (k as i64, s)
}

/// Gauss rule on `[lo, hi]` for integrands that need the node both as a plain
/// value `t` and in reduced form `t = kπ + s`.
///
/// Oscillatory factors evaluated from `s` avoid the phase error that rounding
/// a large node `t` would otherwise introduce.
pub fn integrate_phased(rule: &GaussRule, lo: f64, hi: f64, mut f: impl FnMut(f64, i64, f64) -> f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let (k, s_lo) = reduce_pi(lo);
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let off = half * (1.0 + x);
        acc += w * f(lo + off, k, s_lo + off);
    }
    acc * half
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫₀^p θ^β g(θ) dθ` with a Gauss–Jacobi rule built for weight `(1 + x)^β`.
pub fn integrate_power_weight(rule: &GaussRule, beta: f64, p: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    // θ = p (1 + x) / 2  ⇒  θ^β dθ = (p/2)^{β+1} (1 + x)^β dx
    let half = 0.5 * p;
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * g(half * (1.0 + x));
    }
    acc * half.powf(beta + 1.0)
}
