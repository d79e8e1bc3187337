//! Candidate sets and the quadrature of their weighted volume and perimeter.
//!
//! Star-shaped sets are stored by their radial function on an angular grid.
//! In the plane the grid covers the full circle; for `N >= 3` shapes are
//! axisymmetric and the grid covers the polar angle in `[0, pi]`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{simpson_weights, GaussLegendre};
use crate::regime::{Orientation, Params};
use crate::sphere::sphere_area;

pub const DEFAULT_GRID_PLANE: usize = 2048;
pub const DEFAULT_GRID_AXISYMMETRIC: usize = 1025;

pub fn default_grid_size(dim: u32) -> usize {
    if dim == 2 {
        DEFAULT_GRID_PLANE
    } else {
        DEFAULT_GRID_AXISYMMETRIC
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Derivative of samples of a smooth `2 pi`-periodic function on a uniform grid.
fn periodic_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        planner.plan_fft_forward(n).process(&mut buf);
        for (j, c) in buf.iter_mut().enumerate() {
            let freq = if 2 * j < n {
                j as f64
            } else if 2 * j == n {
                0.0
            } else {
                j as f64 - n as f64
            };
            *c *= Complex::new(0.0, freq / n as f64);
        }
        planner.plan_fft_inverse(n).process(&mut buf);
    });
    buf.into_iter().map(|c| c.re).collect()
}

/// Angular nodes and the quadrature weights of the surface measure on `S^{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    dim: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularGrid {
    /// `N = 2`: `n` uniform periodic nodes with trapezoid weights.
    /// `N >= 3`: `n` (odd) uniform nodes on `[0, pi]` with Simpson weights times
    /// `|S^{N-2}| sin^{N-2}`.
    pub fn new(dim: u32, n: usize) -> Result<Self> {
        match dim {
            0 | 1 => domain(format!("angular grids need N >= 2, got N = {dim}")),
            2 => {
                if n < 4 {
                    return domain(format!("planar grid needs at least 4 nodes, got {n}"));
                }
                let h = 2.0 * PI / n as f64;
                Ok(Self {
                    dim,
                    nodes: (0..n).map(|j| h * j as f64).collect(),
                    weights: vec![h; n],
                })
            }
            _ => {
                if n < 5 || n.is_multiple_of(2) {
                    return domain(format!("polar grid needs an odd number of nodes >= 5, got {n}"));
                }
                let h = PI / (n - 1) as f64;
                let nodes: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
                let lower = sphere_area(dim - 1);
                let weights = simpson_weights(n, 0.0, PI)
                    .into_iter()
                    .zip(&nodes)
                    .map(|(w, &t)| w * lower * t.sin().powi(dim as i32 - 2))
                    .collect();
                Ok(Self { dim, nodes, weights })
            }
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature of `int_{S^{N-1}} f dsigma` from samples on the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Spectral derivative in the angle. For the polar grid the samples are
    /// extended evenly across the poles, which forces `f' = 0` there.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        if self.dim == 2 {
            return periodic_derivative(values);
        }
        let n = values.len();
        let mut ext = values.to_vec();
        ext.extend(values[1..n - 1].iter().rev());
        let mut d = periodic_derivative(&ext);
        d.truncate(n);
        d[0] = 0.0;
        d[n - 1] = 0.0;
        d
    }
}

/// A set `{ r omega : 0 <= r < m(omega) }` given by samples of `m > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeRecord", into = "ShapeRecord")]
pub struct StarShape {
    grid: AngularGrid,
    m: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ShapeRecord {
    #[serde(rename = "N")]
    dim: u32,
    theta_grid_size: usize,
    m: Vec<f64>,
}

impl From<StarShape> for ShapeRecord {
    fn from(s: StarShape) -> Self {
        ShapeRecord { dim: s.grid.dim, theta_grid_size: s.m.len(), m: s.m }
    }
}

impl TryFrom<ShapeRecord> for StarShape {
    type Error = Error;
    fn try_from(r: ShapeRecord) -> Result<Self> {
        if r.theta_grid_size != r.m.len() {
            return Err(Error::GridMismatch(format!(
                "theta_grid_size = {} but {} radial values given",
                r.theta_grid_size,
                r.m.len()
            )));
        }
        StarShape::new(r.dim, r.m)
    }
}

impl StarShape {
    pub fn new(dim: u32, m: Vec<f64>) -> Result<Self> {
        let grid = AngularGrid::new(dim, m.len())?;
        Self::on_grid(grid, m)
    }

    pub fn on_grid(grid: AngularGrid, m: Vec<f64>) -> Result<Self> {
        if grid.len() != m.len() {
            return Err(Error::GridMismatch(format!(
                "grid has {} nodes, radial map has {}",
                grid.len(),
                m.len()
            )));
        }
        if let Some((j, v)) = m.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return domain(format!("radial map must satisfy m > 0 at every node; m[{j}] = {v}"));
        }
        Ok(Self { grid, m })
    }

    /// Samples `f` at the nodes of a grid of `n` points.
    pub fn from_fn(dim: u32, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = AngularGrid::new(dim, n)?;
        let m = grid.nodes.iter().map(|&t| f(t)).collect();
        Self::on_grid(grid, m)
    }

    /// Centered ball of the given radius on the default grid.
    pub fn ball(dim: u32, radius: f64) -> Result<Self> {
        Self::ball_with_grid(dim, default_grid_size(dim), radius)
    }

    pub fn ball_with_grid(dim: u32, n: usize, radius: f64) -> Result<Self> {
        Self::from_fn(dim, n, |_| radius)
    }

    pub fn dim(&self) -> u32 {
        self.grid.dim
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn theta(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn grid_size(&self) -> usize {
        self.m.len()
    }

    pub fn dm(&self) -> Vec<f64> {
        self.grid.derivative(&self.m)
    }

    /// Same grid, new radial values.
    pub fn with_radii(&self, m: Vec<f64>) -> Result<Self> {
        Self::on_grid(self.grid.clone(), m)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_radii(self.m.iter().map(|v| v * factor).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,m\n");
        for (t, v) in self.theta().iter().zip(&self.m) {
            let _ = writeln!(out, "{t:.17e},{v:.17e}");
        }
        out
    }
}

/// `mu_l(M) = 1/(l+N) int m^{l+N} dsigma`.
pub fn mu_measure(shape: &StarShape, l: f64) -> Result<f64> {
    let e = l + f64::from(shape.dim());
    if !(e > 0.0) {
        return domain(format!("weighted volume of a bounded star-shaped set requires l+N > 0, got {e}"));
    }
    Ok(radial_power_integral(shape, e) / e)
}

fn radial_power_integral(shape: &StarShape, e: f64) -> f64 {
    let vals: Vec<f64> = shape.m.iter().map(|v| v.powf(e)).collect();
    shape.grid.integrate(&vals)
}

/// `P_{mu_k}(M) = int m^{k+N-2} sqrt(m^2 + |m'|^2) dsigma`.
pub fn perimeter(shape: &StarShape, k: f64) -> f64 {
    let e = k + f64::from(shape.dim()) - 2.0;
    let dm = shape.dm();
    let vals: Vec<f64> = shape
        .m
        .iter()
        .zip(&dm)
        .map(|(&m, &d)| m.powf(e) * m.hypot(d))
        .collect();
    shape.grid.integrate(&vals)
}

/// `P_{mu_k}(M) / mu_l(M)^{(k+N-1)/(l+N)}` in the standard orientation.
pub fn ratio(shape: &StarShape, params: &Params) -> Result<f64> {
    params.require_standard()?;
    check_dim(shape, params)?;
    let v = mu_measure(shape, params.l)?;
    Ok(perimeter(shape, params.k) / v.powf(params.volume_exponent()))
}

/// Ratio of the exterior set `{ r omega : r > m(omega) }` in the inverted
/// orientation, with volume `|l+N|^{-1} int m^{l+N} dsigma`.
pub fn ratio_inverted(shape: &StarShape, params: &Params) -> Result<f64> {
    if params.orientation != Orientation::Inverted {
        return domain(format!(
            "exterior ratio requires k+N-1 < 0 and l+N < 0; got k+N-1 = {}, l+N = {}",
            params.k + params.n() - 1.0,
            params.l + params.n()
        ));
    }
    check_dim(shape, params)?;
    let e = params.l + params.n();
    let v = radial_power_integral(shape, e) / e.abs();
    Ok(perimeter(shape, params.k) / v.powf(params.volume_exponent()))
}

fn check_dim(shape: &StarShape, params: &Params) -> Result<()> {
    if shape.dim() != params.dim {
        return Err(Error::GridMismatch(format!(
            "shape lives in N = {}, params have N = {}",
            shape.dim(),
            params.dim
        )));
    }
    Ok(())
}

/// Inversion `x -> x/|x|^2` applied to the radial map: `m -> 1/m`.
/// The image is read as an exterior set with exponents
/// `(-k-2N+2, -l-2N)`, see [`Params::inversion_dual`].
pub fn invert_shape(shape: &StarShape) -> StarShape {
    StarShape { grid: shape.grid.clone(), m: shape.m.iter().map(|v| 1.0 / v).collect() }
}

/// Radial power map `x -> x |x|^{k/(N-1)}`: `m -> m^{(k+N-1)/(N-1)}`.
pub fn power_map_shape(shape: &StarShape, k: f64) -> Result<StarShape> {
    let n = f64::from(shape.dim());
    if !(k + n - 1.0 > 0.0) {
        return domain(format!("power map requires k+N-1 > 0, got {}", k + n - 1.0));
    }
    let e = (k + n - 1.0) / (n - 1.0);
    shape.with_radii(shape.m.iter().map(|v| v.powf(e)).collect())
}

// ---------------------------------------------------------------------------
// Shifted balls
// ---------------------------------------------------------------------------

/// Ball of the given radius centered at `offset * e_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetBall {
    #[serde(rename = "N")]
    pub dim: u32,
    pub radius: f64,
    pub offset: f64,
}

impl OffsetBall {
    pub fn new(dim: u32, radius: f64, offset: f64) -> Result<Self> {
        if dim < 2 {
            return domain(format!("shifted balls need N >= 2, got N = {dim}"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("radius must be positive, got {radius}"));
        }
        if !(offset >= 0.0 && offset.is_finite()) {
            return domain(format!("offset must be nonnegative, got {offset}"));
        }
        Ok(Self { dim, radius, offset })
    }

    fn origin_on_boundary(&self) -> bool {
        (self.offset - self.radius).abs() <= 1e-12 * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetBallRatio {
    pub ratio: f64,
    pub perimeter: f64,
    pub measure: f64,
    /// Set when the origin lies on the sphere and `k < 0`: the perimeter
    /// integrand is singular there, although integrable.
    pub warning: Option<String>,
}

const GRADED_LEVELS: usize = 48;

fn rule() -> GaussLegendre {
    GaussLegendre::new(24)
}

/// Weighted perimeter of a shifted sphere.
pub fn offset_ball_perimeter(ball: &OffsetBall, k: f64) -> f64 {
    let (t, r, dim) = (ball.offset, ball.radius, ball.dim);
    let sin_pow = dim as i32 - 2;
    // |x|^2 on the sphere at angle phi from e_1, written to stay accurate
    // where the sphere passes through the origin.
    let weight = |phi_sin: f64, half_cos: f64| {
        let d2 = (t - r) * (t - r) + 4.0 * t * r * half_cos * half_cos;
        d2.powf(0.5 * k) * phi_sin.powi(sin_pow)
    };
    let g = rule();
    let mid = 0.5 * PI;
    let near = g.integrate_composite(0.0, mid, 8, |phi| weight(phi.sin(), (0.5 * phi).cos()));
    // far half in the distance d = pi - phi to the antipode
    let far = g.integrate_graded(0.0, mid, GRADED_LEVELS, |d| weight(d.sin(), (0.5 * d).sin()));
    sphere_area(dim - 1) * r.powi(dim as i32 - 1) * (near + far)
}

/// `mu_l` of a shifted ball, integrated in polar coordinates about the origin.
pub fn offset_ball_measure(ball: &OffsetBall, l: f64) -> Result<f64> {
    let (t, r, dim) = (ball.offset, ball.radius, ball.dim);
    let e = l + f64::from(dim);
    if !(e > 0.0) {
        return domain(format!("weighted volume requires l+N > 0, got {e}"));
    }
    let sin_pow = dim as i32 - 2;
    let g = rule();
    let body = if t <= r {
        // Every ray leaves the ball once. With d the distance of the ray
        // angle to pi/2, the exit radius is +-t sin d + sqrt(r^2 - t^2 cos^2 d).
        let gap = (r - t) * (r + t);
        let forward = |d: f64| {
            let s = t * d.sin();
            let rho = s + (gap + s * s).sqrt();
            rho.powf(e) * d.cos().powi(sin_pow)
        };
        let backward = |d: f64| {
            let s = t * d.sin();
            let root = (gap + s * s).sqrt();
            let rho = if s + root > 0.0 { gap / (s + root) } else { 0.0 };
            rho.powf(e) * d.cos().powi(sin_pow)
        };
        let mid = 0.5 * PI;
        g.integrate_graded(0.0, mid, GRADED_LEVELS, forward)
            + g.integrate_graded(0.0, mid, GRADED_LEVELS, backward)
    } else {
        // Rays inside the tangent cone cross the ball between rho_- and rho_+.
        // Parametrize by the distance d to the tangent angle.
        let psi_max = (r / t).asin();
        let cos_max = psi_max.cos();
        let f = |d: f64| {
            let psi = psi_max - d;
            let sin_psi = psi.sin();
            let half = (0.5 * d).sin();
            let below = 2.0 * r * half * half + t * cos_max * d.sin();
            let root = (below * (r + t * sin_psi)).max(0.0).sqrt();
            let c = t * psi.cos();
            let lower = (t - r) * (t + r) / (c + root);
            ((c + root).powf(e) - lower.max(0.0).powf(e)) * sin_psi.powi(sin_pow)
        };
        g.integrate_graded(0.0, psi_max, GRADED_LEVELS, f)
    };
    Ok(sphere_area(dim - 1) * body / e)
}

/// Isoperimetric ratio of a shifted ball.
pub fn offset_ball_ratio(ball: &OffsetBall, params: &Params) -> Result<OffsetBallRatio> {
    params.require_standard()?;
    if ball.dim != params.dim {
        return Err(Error::GridMismatch(format!(
            "ball lives in N = {}, params have N = {}",
            ball.dim, params.dim
        )));
    }
    let warning = (ball.origin_on_boundary() && params.k < 0.0).then(|| {
        format!(
            "origin lies on the boundary and k = {} < 0: perimeter integrand is singular (integrable since k+N-1 > 0)",
            params.k
        )
    });
    let perimeter = offset_ball_perimeter(ball, params.k);
    let measure = offset_ball_measure(ball, params.l)?;
    Ok(OffsetBallRatio {
        ratio: perimeter / measure.powf(params.volume_exponent()),
        perimeter,
        measure,
        warning,
    })
}

// ---------------------------------------------------------------------------
// One dimension
// ---------------------------------------------------------------------------

/// Finite union of disjoint bounded open intervals, kept sorted.
/// Intervals that share an endpoint are merged, since the union differs from
/// the merged interval by a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return domain("interval union must contain at least one interval");
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return domain(format!("each interval must satisfy a < b, got ({a}, {b})"));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a < last.1 => {
                    return domain(format!(
                        "intervals must be disjoint; ({}, {}) overlaps ({a}, {b})",
                        last.0, last.1
                    ))
                }
                Some(last) if a == last.1 => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Sum of `|x|^k` over the boundary points.
    pub fn perimeter(&self, k: f64) -> f64 {
        self.intervals.iter().map(|&(a, b)| a.abs().powf(k) + b.abs().powf(k)).sum()
    }

    /// `int |x|^l dx` over the union, in closed form.
    pub fn measure(&self, l: f64) -> Result<f64> {
        if !(l > -1.0) {
            return domain(format!("weighted length requires l > -1, got {l}"));
        }
        let prim = |x: f64| x.signum() * x.abs().powf(l + 1.0) / (l + 1.0);
        Ok(self.intervals.iter().map(|&(a, b)| prim(b) - prim(a)).sum())
    }
}

/// `P / V^{k/(l+1)}` for a union of intervals.
pub fn interval_ratio(set: &IntervalUnion, params: &Params) -> Result<f64> {
    if params.dim != 1 {
        return domain(format!("interval ratio requires N = 1, got N = {}", params.dim));
    }
    if !(params.k > 0.0) {
        return domain(format!("interval ratio requires k > 0, got k = {}", params.k));
    }
    let v = set.measure(params.l)?;
    Ok(set.perimeter(params.k) / v.powf(params.k / (params.l + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regime::c_rad;
    use approx::assert_relative_eq;

    fn params(k: f64, l: f64, n: u32) -> Params {
        Params::new(k, l, n).unwrap()
    }

    #[test]
    fn disk_area_and_circumference() {
        let s = StarShape::ball(2, 1.5).unwrap();
        assert_relative_eq!(mu_measure(&s, 0.0).unwrap(), PI * 2.25, max_relative = 1e-13);
        assert_relative_eq!(perimeter(&s, 0.0), 3.0 * PI, max_relative = 1e-13);
    }

    #[test]
    fn unit_ball_weighted_measure() {
        for (n, l) in [(2u32, -1.5), (2, 3.0), (3, -2.5), (3, 1.0), (4, 0.5)] {
            let s = StarShape::ball(n, 1.0).unwrap();
            let expect = sphere_area(n) / (l + f64::from(n));
            assert_relative_eq!(mu_measure(&s, l).unwrap(), expect, max_relative = 1e-9);
        }
        let s = StarShape::ball(3, 1.0).unwrap();
        assert!(mu_measure(&s, -3.0).is_err());
    }

    #[test]
    fn sphere_perimeter_any_k() {
        for (n, k) in [(2u32, -0.5), (3, 2.0), (4, -1.5)] {
            let s = StarShape::ball(n, 2.0).unwrap();
            let expect = sphere_area(n) * 2f64.powf(k + f64::from(n) - 1.0);
            assert_relative_eq!(perimeter(&s, k), expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn derivative_is_spectral() {
        let s = StarShape::from_fn(2, 64, |t| (t.sin()).exp()).unwrap();
        for (t, d) in s.theta().iter().zip(s.dm()) {
            assert!((d - t.cos() * t.sin().exp()).abs() < 1e-12);
        }
        let s = StarShape::from_fn(3, 65, |t| 1.0 + 0.2 * t.cos() + 0.1 * (2.0 * t).cos()).unwrap();
        for (t, d) in s.theta().iter().zip(s.dm()) {
            assert!((d + 0.2 * t.sin() + 0.2 * (2.0 * t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_ratio_is_radial_constant() {
        for (k, l, n) in [(0.5, 0.2, 2u32), (1.0, 0.0, 3), (-0.5, -1.0, 3)] {
            let p = params(k, l, n);
            let s = StarShape::ball(n, 0.7).unwrap();
            assert_relative_eq!(ratio(&s, &p).unwrap(), c_rad(&p).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn inversion_is_an_involution() {
        let s = StarShape::from_fn(2, 128, |t| 1.0 + 0.3 * t.cos()).unwrap();
        let back = invert_shape(&invert_shape(&s));
        for (a, b) in s.m().iter().zip(back.m()) {
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn ratio_orientation_checks() {
        let s = StarShape::ball(2, 1.0).unwrap();
        assert!(ratio(&s, &params(-3.0, -4.0, 2)).is_err());
        assert!(ratio_inverted(&s, &params(0.0, 0.0, 2)).is_err());
        assert!(matches!(ratio(&s, &params(0.0, 0.0, 3)), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn shape_validation() {
        assert!(StarShape::new(2, vec![1.0, 1.0, -1.0, 1.0]).is_err());
        assert!(StarShape::new(3, vec![1.0; 6]).is_err());
        assert!(StarShape::new(1, vec![1.0; 5]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s = StarShape::from_fn(3, 9, |t| 1.0 + 0.1 * t.cos()).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["N"], 3);
        assert_eq!(j["theta_grid_size"], 9);
        let back: StarShape = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::json!({"N": 2, "theta_grid_size": 5, "m": [1.0, 1.0, 1.0, 1.0]});
        assert!(serde_json::from_value::<StarShape>(bad).is_err());
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let s = StarShape::ball_with_grid(2, 8, 1.0).unwrap();
        assert_eq!(s.to_csv().lines().count(), 9);
    }

    #[test]
    fn offset_ball_centered_matches_constant() {
        let p = params(0.7, 1.3, 3);
        let b = OffsetBall::new(3, 1.0, 0.0).unwrap();
        let r = offset_ball_ratio(&b, &p).unwrap();
        assert_relative_eq!(r.ratio, c_rad(&p).unwrap(), max_relative = 1e-11);
        assert!(r.warning.is_none());
    }

    #[test]
    fn offset_ball_origin_on_boundary_warns() {
        let p = params(-0.5, 0.0, 2);
        let b = OffsetBall::new(2, 1.0, 1.0).unwrap();
        let r = offset_ball_ratio(&b, &p).unwrap();
        assert!(r.warning.is_some());
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }

    #[test]
    fn interval_examples() {
        let unit = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
        let p = params(0.8, 0.3, 1);
        assert_relative_eq!(interval_ratio(&unit, &p).unwrap(), 1.3f64.powf(0.8 / 1.3), max_relative = 1e-14);
        assert!(IntervalUnion::new(vec![]).is_err());
        assert!(IntervalUnion::new(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        let touching = IntervalUnion::new(vec![(1.0, 2.0), (0.0, 1.0)]).unwrap();
        assert_eq!(touching.intervals(), &[(0.0, 2.0)]);
    }

    /// Ball-centered tensor Gauss-Legendre, independent of the polar formulas.
    fn ball_centered_measure(ball: &OffsetBall, l: f64) -> f64 {
        let g = GaussLegendre::new(40);
        let (t, r, n) = (ball.offset, ball.radius, ball.dim as i32);
        let inner = |s: f64| {
            g.integrate_composite(0.0, PI, 16, |phi| {
                (t * t + s * s + 2.0 * t * s * phi.cos()).powf(0.5 * l) * phi.sin().powi(n - 2)
            }) * s.powi(n - 1)
        };
        sphere_area(ball.dim - 1) * g.integrate_composite(0.0, r, 16, inner)
    }

    #[test]
    fn offset_ball_measure_matches_tensor_oracle() {
        for (n, r, t, l) in [(2u32, 1.0, 0.4, 1.5), (2, 1.0, 3.0, 4.0), (3, 0.8, 2.5, -1.0), (3, 1.0, 0.9, 2.0), (2, 1.0, 1.0, 0.5)] {
            let b = OffsetBall::new(n, r, t).unwrap();
            let v = offset_ball_measure(&b, l).unwrap();
            assert_relative_eq!(v, ball_centered_measure(&b, l), max_relative = 1e-9);
        }
    }

    #[test]
    fn offset_circle_perimeter_matches_parametrization() {
        let g = GaussLegendre::new(40);
        for (t, k) in [(0.3, 1.0), (5.0, -0.5), (2.0, 2.5)] {
            let b = OffsetBall::new(2, 1.0, t).unwrap();
            let oracle = g.integrate_composite(0.0, 2.0 * PI, 32, |a| {
                (t + a.cos()).hypot(a.sin()).powf(k)
            });
            assert_relative_eq!(offset_ball_perimeter(&b, k), oracle, max_relative = 1e-11);
        }
    }

    #[test]
    fn unweighted_ratio_ignores_offset() {
        let p = params(0.0, 0.0, 3);
        let c = c_rad(&p).unwrap();
        for t in [0.5, 1.0, 2.0, 7.0] {
            let r = offset_ball_ratio(&OffsetBall::new(3, 1.0, t).unwrap(), &p).unwrap();
            assert_relative_eq!(r.ratio, c, max_relative = 1e-10);
        }
    }
}
