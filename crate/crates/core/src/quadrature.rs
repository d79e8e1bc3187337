//! Quadrature rules shared by the geometric and functional code.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Integrates over `[a, b]` with panels shrinking geometrically (ratio 1/2)
    /// toward `a`, so an algebraic singularity at `a` is resolved. Pass the
    /// distance to the singular point as the variable with `a = 0` so that
    /// nodes near it keep full relative precision.
    pub fn integrate_graded<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        levels: usize,
        mut f: F,
    ) -> f64 {
        let mut total = 0.0;
        let mut hi = b;
        let mut width = 0.5 * (b - a);
        for _ in 0..levels {
            total += self.integrate(hi - width, hi, &mut f);
            hi -= width;
            width *= 0.5;
        }
        total + self.integrate(a, hi, &mut f)
    }
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
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, d)
}

/// Composite Simpson weights for `n` (odd) equally spaced nodes on `[a, b]`.
pub fn simpson_weights(n: usize, a: f64, b: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson's rule needs an odd node count >= 3");
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// `int_a^b r^alpha dr` for `0 <= a <= b`; requires `alpha > -1` when `a == 0`.
pub fn power_integral(a: f64, b: f64, alpha: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let e = alpha + 1.0;
    if e.abs() < 1e-14 {
        return (b / a).ln();
    }
    (b.powf(e) - a.powf(e)) / e
}

/// Integrals of the two linear hat pieces on `[a, b]` against `r^alpha`:
/// `(int (b-r)/(b-a) r^alpha dr, int (r-a)/(b-a) r^alpha dr)`.
pub fn hat_integrals(a: f64, b: f64, alpha: f64) -> (f64, f64) {
    let h = b - a;
    let i0 = power_integral(a, b, alpha);
    let i1 = power_integral(a, b, alpha + 1.0);
    let right = ((i1 - a * i0) / h).max(0.0);
    let left = (i0 - right).max(0.0);
    (left, right)
}
