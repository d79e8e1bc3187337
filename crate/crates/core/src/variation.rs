//! Stability of the centered ball, shape search, and the one-dimensional problem.

use std::sync::{Arc, Mutex};

use argmin::core::observers::{Observe, ObserverMode};
use argmin::core::{CostFunction, Executor, IterState, State, TerminationReason, TerminationStatus, KV};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{default_grid_size, interval_ratio, perimeter, ratio, AngularGrid, IntervalUnion, StarShape};
use crate::regime::{c_rad, Params};
use crate::sphere::gegenbauer;

/// A Laplace-Beltrami eigenfunction on the sphere, restricted to the shapes we grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeKind {
    /// `cos(n theta)` in the plane.
    Cos { n: u32 },
    /// `sin(n theta)` in the plane.
    Sin { n: u32 },
    /// Axisymmetric harmonic `C_d^{(N-2)/2}(cos theta)` for `N >= 3`.
    Zonal { degree: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationMode {
    #[serde(rename = "N")]
    pub dim: u32,
    pub kind: ModeKind,
}

impl PerturbationMode {
    pub fn new(dim: u32, kind: ModeKind) -> Result<Self> {
        match (dim, kind) {
            (2, ModeKind::Cos { .. } | ModeKind::Sin { .. }) => Ok(Self { dim, kind }),
            (2, ModeKind::Zonal { .. }) => domain("zonal harmonics need N >= 3; use cos/sin modes in the plane"),
            (d, ModeKind::Zonal { .. }) if d >= 3 => Ok(Self { dim, kind }),
            (d, _) if d >= 3 => domain("Fourier modes are only available for N = 2; use zonal modes"),
            _ => domain(format!("perturbation modes need N >= 2, got N = {dim}")),
        }
    }

    /// The first nontrivial mode: `cos theta` or the degree-one zonal harmonic.
    pub fn first(dim: u32) -> Result<Self> {
        let kind = if dim == 2 { ModeKind::Cos { n: 1 } } else { ModeKind::Zonal { degree: 1 } };
        Self::new(dim, kind)
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            ModeKind::Cos { n } | ModeKind::Sin { n } => n,
            ModeKind::Zonal { degree } => degree,
        }
    }

    /// Laplace-Beltrami eigenvalue `d (d + N - 2)`.
    pub fn gamma(&self) -> f64 {
        let d = f64::from(self.degree());
        d * (d + f64::from(self.dim) - 2.0)
    }

    fn raw(&self, theta: f64) -> f64 {
        match self.kind {
            ModeKind::Cos { n } => (f64::from(n) * theta).cos(),
            ModeKind::Sin { n } => (f64::from(n) * theta).sin(),
            ModeKind::Zonal { degree } => {
                gegenbauer(degree, 0.5 * (f64::from(self.dim) - 2.0), theta.cos())
            }
        }
    }

    /// Samples normalized so that `int v^2 dsigma = 1` under the grid quadrature.
    pub fn sample(&self, grid: &AngularGrid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(format!("mode in N = {}, grid in N = {}", self.dim, grid.dim())));
        }
        let raw: Vec<f64> = grid.nodes().iter().map(|&t| self.raw(t)).collect();
        let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
        let norm = grid.integrate(&sq).sqrt();
        if !(norm > 0.0) {
            return domain("mode vanishes on the grid");
        }
        Ok(raw.into_iter().map(|v| v / norm).collect())
    }
}

/// `(k+N-1)(k-l-1) + gamma`: second derivative of the perimeter along a
/// volume-preserving family `1 + t v + s(t)` for a unit-normalized mode `v`.
pub fn second_variation(params: &Params, mode: &PerturbationMode) -> Result<f64> {
    params.require_standard()?;
    if mode.dim != params.dim {
        return Err(Error::GridMismatch(format!("mode in N = {}, params in N = {}", mode.dim, params.dim)));
    }
    let gamma = mode.gamma();
    if gamma == 0.0 {
        return domain("the constant mode (gamma = 0) only rescales the ball; it is fixed by the volume constraint");
    }
    let (k, l, n) = (params.k, params.l, params.n());
    Ok((k + n - 1.0) * (k - l - 1.0) + gamma)
}

/// Radial maps `1 + t v + s(t)` with `s` chosen to keep `mu_l` equal to that of the unit ball.
#[derive(Debug, Clone)]
pub struct PerturbedFamily {
    pub params: Params,
    grid: AngularGrid,
    direction: Vec<f64>,
    target: f64,
}

impl PerturbedFamily {
    pub fn new(params: Params, grid: AngularGrid, direction: Vec<f64>) -> Result<Self> {
        params.require_standard()?;
        if grid.dim() != params.dim {
            return Err(Error::GridMismatch(format!("grid in N = {}, params in N = {}", grid.dim(), params.dim)));
        }
        if direction.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "direction has {} samples, grid has {}",
                direction.len(),
                grid.len()
            )));
        }
        let target = grid.weights().iter().sum::<f64>();
        Ok(Self { params, grid, direction, target })
    }

    pub fn for_mode(params: Params, mode: &PerturbationMode, grid_size: usize) -> Result<Self> {
        let grid = AngularGrid::new(params.dim, grid_size)?;
        let v = mode.sample(&grid)?;
        Self::new(params, grid, v)
    }

    fn exponent(&self) -> f64 {
        self.params.l + self.params.n()
    }

    /// `s'(0)`, zero for directions with mean zero.
    pub fn s1(&self) -> f64 {
        -self.grid.integrate(&self.direction) / self.target
    }

    /// `s''(0) = -(l+N-1) int (v + s_1)^2 / |S^{N-1}|`.
    pub fn s2(&self) -> f64 {
        let s1 = self.s1();
        let sq: Vec<f64> = self.direction.iter().map(|v| (v + s1).powi(2)).collect();
        -(self.exponent() - 1.0) * self.grid.integrate(&sq) / self.target
    }

    /// Solves `int (1 + t v + s)^{l+N} dsigma = |S^{N-1}|` for `s`.
    pub fn volume_shift(&self, t: f64) -> Result<f64> {
        let e = self.exponent();
        let w = self.grid.weights();
        let eval = |s: f64| -> (f64, f64) {
            let mut f = 0.0;
            let mut df = 0.0;
            for (wi, vi) in w.iter().zip(&self.direction) {
                let m = 1.0 + t * vi + s;
                let p = m.powf(e - 1.0);
                f += wi * p * m;
                df += wi * e * p;
            }
            (f - self.target, df)
        };
        let vmin = self.direction.iter().copied().fold(f64::INFINITY, f64::min);
        let vmax = self.direction.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut lo = -1.0 - t * if t >= 0.0 { vmin } else { vmax };
        let mut hi = lo.abs() + 1.0;
        while eval(hi).0 < 0.0 {
            hi *= 2.0;
        }
        let mut s = 0.0f64.clamp(lo, hi);
        let mut residual = f64::INFINITY;
        for _ in 0..200 {
            let (f, df) = eval(s);
            residual = f.abs() / self.target;
            if residual < 1e-15 {
                return Ok(s);
            }
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - f / df;
            s = if newton > lo && newton < hi && df > 0.0 { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 * hi.abs().max(1.0) {
                return Ok(s);
            }
        }
        if residual < 1e-12 {
            return Ok(s);
        }
        Err(Error::NonConvergence { what: "volume constraint for s(t)".into(), residual })
    }

    pub fn shape(&self, t: f64) -> Result<StarShape> {
        let s = self.volume_shift(t)?;
        let m: Vec<f64> = self.direction.iter().map(|v| 1.0 + t * v + s).collect();
        if m.iter().any(|&x| x <= 0.0) {
            return domain(format!("step t = {t} makes 1 + t v + s(t) nonpositive; use a smaller step"));
        }
        StarShape::on_grid(self.grid.clone(), m)
    }

    /// `J(t)`: weighted perimeter of the volume-normalized perturbation.
    pub fn j(&self, t: f64) -> Result<f64> {
        Ok(perimeter(&self.shape(t)?, self.params.k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationCheck {
    pub first_fd: f64,
    pub second_fd: f64,
    pub second_exact: f64,
    pub t_step: f64,
}

/// Centered differences of `J`, Richardson-extrapolated from steps `t` and `t/2`.
pub fn finite_difference_derivatives(j: impl Fn(f64) -> Result<f64>, t: f64) -> Result<(f64, f64)> {
    let j0 = j(0.0)?;
    let diffs = |h: f64| -> Result<(f64, f64)> {
        let (jp, jm) = (j(h)?, j(-h)?);
        Ok(((jp - jm) / (2.0 * h), (jp - 2.0 * j0 + jm) / (h * h)))
    };
    let (d1a, d2a) = diffs(t)?;
    let (d1b, d2b) = diffs(0.5 * t)?;
    Ok(((4.0 * d1b - d1a) / 3.0, (4.0 * d2b - d2a) / 3.0))
}

/// Compares finite differences of `J` with [`second_variation`] and checks `J'(0) = 0`.
pub fn finite_difference_variation_check(
    params: &Params,
    mode: &PerturbationMode,
    t_step: f64,
    tol: f64,
) -> Result<VariationCheck> {
    let exact = second_variation(params, mode)?;
    let family = PerturbedFamily::for_mode(*params, mode, default_grid_size(params.dim))?;
    let (first_fd, second_fd) = finite_difference_derivatives(|t| family.j(t), t_step)?;
    let scale = family.j(0.0)?.abs().max(1.0);
    if first_fd.abs() > tol * scale {
        return Err(Error::Inconsistent(format!("J'(0) = {first_fd} is not zero")));
    }
    if (second_fd - exact).abs() > tol * (1.0 + exact.abs()) {
        return Err(Error::Inconsistent(format!(
            "finite-difference J''(0) = {second_fd} differs from {exact}"
        )));
    }
    Ok(VariationCheck { first_fd, second_fd, second_exact: exact, t_step })
}

/// The interval family `(-1 + t, 1 + s(t))` with fixed `int |x|^l`, whose
/// endpoint weight `J(t) = |1+s|^k + |-1+t|^k` has `J''(0) = 2k(k-1-l)`.
pub fn one_dimensional_variation_check(k: f64, l: f64, t_step: f64) -> Result<VariationCheck> {
    if !(l > -1.0) {
        return domain(format!("requires l > -1, got {l}"));
    }
    if !(t_step > 0.0 && t_step < 0.5) {
        return domain(format!("step must lie in (0, 0.5), got {t_step}"));
    }
    let e = l + 1.0;
    let prim = |x: f64| x.signum() * x.abs().powf(e) / e;
    let target = prim(1.0) - prim(-1.0);
    let j = |t: f64| -> Result<f64> {
        let right = (e * (target + prim(-1.0 + t))).powf(1.0 / e);
        Ok(right.abs().powf(k) + (-1.0 + t).abs().powf(k))
    };
    let (first_fd, second_fd) = finite_difference_derivatives(j, t_step)?;
    Ok(VariationCheck { first_fd, second_fd, second_exact: 2.0 * k * (k - 1.0 - l), t_step })
}

// ---------------------------------------------------------------------------
// Shape search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Fourier indices `1..=mode_count` (cos and sin each) for `N = 2`,
    /// zonal degrees `1..=mode_count` for `N >= 3`.
    pub mode_count: u32,
    pub restarts: u32,
    pub seed: u64,
    pub grid_size: Option<usize>,
    /// Iteration cap per restart, as a multiple of the search dimension.
    pub iterations_per_dim: u64,
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { mode_count: 3, restarts: 8, seed: 20_240_101, grid_size: None, iterations_per_dim: 400, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub restart: u32,
    pub iteration: u64,
    pub value: f64,
    pub coefficient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub value: f64,
    pub c_rad: f64,
    /// `value / c_rad - 1`.
    pub gap: f64,
    pub coefficients: Vec<f64>,
    pub best_shape: StarShape,
    /// Set when the best restart stopped at the iteration cap.
    pub hit_iteration_limit: bool,
    /// Set when the best shape needed the positivity floor somewhere.
    pub degenerate: bool,
    pub trace: Vec<TraceRow>,
}

/// Relative floor applied to `m` against its mean.
const DEGENERACY_FLOOR: f64 = 1e-6;

struct ShapeBasis {
    grid: AngularGrid,
    functions: Vec<Vec<f64>>,
}

impl ShapeBasis {
    fn new(dim: u32, mode_count: u32, grid_size: usize) -> Result<Self> {
        let grid = AngularGrid::new(dim, grid_size)?;
        let mut functions = Vec::new();
        for d in 1..=mode_count {
            let kinds = if dim == 2 {
                vec![ModeKind::Cos { n: d }, ModeKind::Sin { n: d }]
            } else {
                vec![ModeKind::Zonal { degree: d }]
            };
            for kind in kinds {
                functions.push(PerturbationMode::new(dim, kind)?.sample(&grid)?);
            }
        }
        Ok(Self { grid, functions })
    }

    /// `m = exp(sum c_j phi_j)`, rescaled to mean one and floored.
    fn shape(&self, c: &[f64]) -> (StarShape, bool) {
        let n = self.grid.len();
        let mut log_m = vec![0.0; n];
        for (cj, phi) in c.iter().zip(&self.functions) {
            for (lm, p) in log_m.iter_mut().zip(phi) {
                *lm += cj * p;
            }
        }
        let top = log_m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut m: Vec<f64> = log_m.iter().map(|v| (v - top).exp()).collect();
        let mean = m.iter().sum::<f64>() / n as f64;
        let mut floored = false;
        for v in &mut m {
            *v /= mean;
            if *v < DEGENERACY_FLOOR {
                *v = DEGENERACY_FLOOR;
                floored = true;
            }
        }
        let shape = StarShape::on_grid(self.grid.clone(), m).expect("floored radii are positive");
        (shape, floored)
    }
}

struct RatioCost<'a> {
    basis: &'a ShapeBasis,
    params: Params,
}

impl CostFunction for RatioCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, c: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (shape, _) = self.basis.shape(c);
        let v = ratio(&shape, &self.params).unwrap_or(f64::INFINITY);
        Ok(if v.is_finite() { v } else { 1e300 })
    }
}

struct TraceObserver {
    restart: u32,
    rows: Arc<Mutex<Vec<TraceRow>>>,
}

impl Observe<IterState<Vec<f64>, (), (), (), (), f64>> for TraceObserver {
    fn observe_iter(
        &mut self,
        state: &IterState<Vec<f64>, (), (), (), (), f64>,
        _kv: &KV,
    ) -> std::result::Result<(), argmin::core::Error> {
        let norm = state
            .get_best_param()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .unwrap_or(0.0);
        self.rows.lock().expect("trace lock").push(TraceRow {
            restart: self.restart,
            iteration: state.get_iter(),
            value: state.get_best_cost(),
            coefficient_norm: norm,
        });
        Ok(())
    }
}

/// Derivative-free search for shapes with a smaller ratio than the ball.
/// The ball (all coefficients zero) is the first candidate, so the returned
/// value never exceeds the ball's ratio on the same grid. The search only
/// certifies "no better shape found in this class".
pub fn minimize_ratio(params: &Params, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    params.require_standard()?;
    if params.dim < 2 {
        return domain("shape search needs N >= 2; use solve_1d for N = 1");
    }
    if opts.mode_count == 0 {
        return domain("mode_count must be at least 1");
    }
    let grid_size = opts.grid_size.unwrap_or_else(|| default_grid_size(params.dim));
    let basis = ShapeBasis::new(params.dim, opts.mode_count, grid_size)?;
    let dim = basis.functions.len();
    let c_rad_value = c_rad(params)?;

    let zero = vec![0.0; dim];
    let ball_cost = RatioCost { basis: &basis, params: *params }
        .cost(&zero)
        .map_err(|e| Error::Inconsistent(e.to_string()))?;
    let mut best = (ball_cost, zero, false);
    let rows = Arc::new(Mutex::new(Vec::new()));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max_iters = opts.iterations_per_dim * dim as u64;

    for restart in 0..opts.restarts.max(1) {
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; dim]
        } else {
            (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect()
        };
        let mut simplex = vec![start.clone()];
        for i in 0..dim {
            let mut v = start.clone();
            v[i] += opts.initial_step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-13)
            .map_err(|e| Error::Inconsistent(e.to_string()))?;
        let observer = TraceObserver { restart, rows: Arc::clone(&rows) };
        let res = Executor::new(RatioCost { basis: &basis, params: *params }, solver)
            .configure(|s| s.max_iters(max_iters))
            .add_observer(observer, ObserverMode::Always)
            .run()
            .map_err(|e| Error::Inconsistent(format!("optimizer failed: {e}")))?;
        let state = res.state();
        let cost = state.get_best_cost();
        let hit_limit = matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::MaxItersReached)
        );
        if cost < best.0 {
            if let Some(p) = state.get_best_param() {
                best = (cost, p.clone(), hit_limit);
            }
        }
    }

    let (value, coefficients, hit_iteration_limit) = best;
    let (best_shape, degenerate) = basis.shape(&coefficients);
    let trace = Arc::try_unwrap(rows)
        .map(|m| m.into_inner().expect("trace lock"))
        .unwrap_or_else(|a| a.lock().expect("trace lock").clone());
    Ok(MinimizeResult {
        value,
        c_rad: c_rad_value,
        gap: value / c_rad_value - 1.0,
        coefficients,
        best_shape,
        hit_iteration_limit,
        degenerate,
        trace,
    })
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("restart,iteration,value,coefficient_norm\n");
    for r in trace {
        out.push_str(&format!("{},{},{:.17e},{:.17e}\n", r.restart, r.iteration, r.value, r.coefficient_norm));
    }
    out
}

// ---------------------------------------------------------------------------
// N = 1
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneDOptimum {
    /// Intervals `(-R, R)`.
    Symmetric,
    /// Intervals `(0, c)` (or `(-c, 0)`).
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneDSolution {
    pub kind: OneDOptimum,
    /// A representative optimal interval.
    pub interval: (f64, f64),
    pub value: f64,
    /// Smallest ratio found over the brute-force candidates.
    pub brute_force_min: f64,
    pub brute_force_candidates: usize,
}

/// Nodes per side of the brute-force grid on `[-1, 1]`; gives about `10^4` pairs.
const BRUTE_FORCE_NODES: usize = 141;

/// Exact minimizer of the ratio among finite unions of intervals on the line.
pub fn solve_1d(params: &Params) -> Result<OneDSolution> {
    let (k, l) = (params.k, params.l);
    if params.dim != 1 {
        return domain(format!("solve_1d requires N = 1, got N = {}", params.dim));
    }
    if !(k > 0.0) {
        return domain(format!("solve_1d requires k > 0, got k = {k}"));
    }
    if !(l > -1.0) {
        return domain(format!("solve_1d requires l > -1, got l = {l}"));
    }
    let (kind, interval, value) = if k >= l + 1.0 {
        (OneDOptimum::Symmetric, (-1.0, 1.0), c_rad(params)?)
    } else {
        (OneDOptimum::OneSided, (0.0, 1.0), (l + 1.0).powf(k / (l + 1.0)))
    };

    let nodes: Vec<f64> = (0..BRUTE_FORCE_NODES)
        .map(|i| -1.0 + 2.0 * i as f64 / (BRUTE_FORCE_NODES - 1) as f64)
        .collect();
    let mut brute_force_min = f64::INFINITY;
    let mut count = 0;
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let set = IntervalUnion::new(vec![(a, b)])?;
            brute_force_min = brute_force_min.min(interval_ratio(&set, params)?);
            count += 1;
        }
    }
    if brute_force_min < value - 1e-9 * value.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "an interval beats the claimed optimum: {brute_force_min} < {value}"
        )));
    }
    Ok(OneDSolution { kind, interval, value, brute_force_min, brute_force_candidates: count })
}
