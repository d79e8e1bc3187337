//! Radial functionals: the isoperimetric quotient of functions, the
//! Caffarelli-Kohn-Nirenberg energy, Hardy constants, Lorentz norms and the
//! first weighted `p`-Laplace eigenvalue of a ball.
//!
//! Profiles are piecewise linear between nodes, constant on `[0, r_0]` and zero
//! beyond the last node. Gradient integrals are exact per segment; integrals of
//! powers of the profile use Gauss-Legendre on each segment.

use std::sync::{Arc, Mutex};

use argmin::core::observers::{Observe, ObserverMode};
use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason, TerminationStatus, KV};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{power_integral, GaussLegendre};
use crate::regime::{ckn_thresholds, CknParams, Params};
use crate::sphere::{ball_volume, sphere_area};

/// Piecewise-linear nonnegative radial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRecord")]
pub struct RadialProfile {
    radial_grid: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct ProfileRecord {
    radial_grid: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<ProfileRecord> for RadialProfile {
    type Error = Error;
    fn try_from(r: ProfileRecord) -> Result<Self> {
        RadialProfile::new(r.radial_grid, r.values)
    }
}

impl RadialProfile {
    pub fn new(radial_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radial_grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} nodes but {} values",
                radial_grid.len(),
                values.len()
            )));
        }
        if radial_grid.len() < 2 {
            return domain("a profile needs at least two nodes");
        }
        if !(radial_grid[0] >= 0.0) || radial_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("radial grid must be nonnegative and strictly increasing");
        }
        if !radial_grid.iter().all(|r| r.is_finite()) {
            return domain("radial grid must be finite");
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return domain("profile values must be finite and >= 0");
        }
        if *values.last().expect("nonempty") != 0.0 {
            return domain("profile must vanish at the last node (compact support)");
        }
        Ok(Self { radial_grid, values })
    }

    pub fn from_fn(radial_grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = radial_grid.len();
        let values = radial_grid
            .iter()
            .enumerate()
            .map(|(i, &r)| if i + 1 == n { 0.0 } else { f(r) })
            .collect();
        Self::new(radial_grid, values)
    }

    pub fn radial_grid(&self) -> &[f64] {
        &self.radial_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `x -> u(t x)`: the grid is divided by `t`.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return domain(format!("dilation factor must be positive, got {t}"));
        }
        Self::new(self.radial_grid.iter().map(|r| r / t).collect(), self.values.clone())
    }

    pub fn value_at(&self, r: f64) -> f64 {
        let g = &self.radial_grid;
        if r <= g[0] {
            return self.values[0];
        }
        if r >= g[g.len() - 1] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= r) - 1;
        let tau = (r - g[i]) / (g[i + 1] - g[i]);
        self.values[i] * (1.0 - tau) + self.values[i + 1] * tau
    }
}

/// Log-spaced grid `r_min .. r_max` with `n` nodes.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Uniform grid `0 .. radius` with `n` nodes.
pub fn uniform_grid(radius: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| radius * i as f64 / (n - 1) as f64).collect()
}

// ---------------------------------------------------------------------------
// Generic quotient A(u) / B(u)^{p/q}
// ---------------------------------------------------------------------------

/// `A = int |u'|^p r^{num_exp} dr`, `B = int |u|^q r^{den_exp} dr`, both
/// times `|S^{N-1}|` by the callers.
struct PowerQuotient<'a> {
    grid: &'a [f64],
    p: f64,
    q: f64,
    /// `int_segment r^{num_exp} dr`, exact.
    num_weights: Vec<f64>,
    /// Gauss nodes per segment: (segment, tau, weight * r^{den_exp}).
    den_nodes: Vec<(usize, f64, f64)>,
    /// `int_0^{r_0} r^{den_exp} dr` for the constant piece.
    core_weight: f64,
}

const SEGMENT_GAUSS_POINTS: usize = 10;

impl<'a> PowerQuotient<'a> {
    fn new(grid: &'a [f64], p: f64, num_exp: f64, q: f64, den_exp: f64) -> Result<Self> {
        if grid[0] == 0.0 && !(num_exp > -1.0) {
            return domain(format!("gradient weight r^{num_exp} is not integrable at the origin"));
        }
        if !(den_exp > -1.0) {
            return domain(format!("weight r^{den_exp} is not integrable at the origin"));
        }
        let num_weights = grid.windows(2).map(|w| power_integral(w[0], w[1], num_exp)).collect();
        let gl = GaussLegendre::new(SEGMENT_GAUSS_POINTS);
        let mut den_nodes = Vec::with_capacity((grid.len() - 1) * SEGMENT_GAUSS_POINTS);
        for (i, w) in grid.windows(2).enumerate() {
            let h = w[1] - w[0];
            for (x, wt) in gl.mapped(0.0, 1.0) {
                let r = w[0] + h * x;
                den_nodes.push((i, x, wt * h * r.powf(den_exp)));
            }
        }
        let core_weight = power_integral(0.0, grid[0], den_exp);
        Ok(Self { grid, p, q, num_weights, den_nodes, core_weight })
    }

    fn numerator(&self, u: &[f64]) -> f64 {
        self.grid
            .windows(2)
            .zip(u.windows(2))
            .zip(&self.num_weights)
            .map(|((g, v), w)| ((v[1] - v[0]) / (g[1] - g[0])).abs().powf(self.p) * w)
            .sum()
    }

    fn denominator(&self, u: &[f64]) -> f64 {
        let core = u[0].abs().powf(self.q) * self.core_weight;
        core + self
            .den_nodes
            .iter()
            .map(|&(i, tau, w)| (u[i] * (1.0 - tau) + u[i + 1] * tau).abs().powf(self.q) * w)
            .sum::<f64>()
    }

    fn numerator_grad(&self, u: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; u.len()];
        for (i, (gw, w)) in self.grid.windows(2).zip(&self.num_weights).enumerate() {
            let h = gw[1] - gw[0];
            let d = (u[i + 1] - u[i]) / h;
            let dd = self.p * d.abs().powf(self.p - 1.0) * d.signum() * w / h;
            g[i] -= dd;
            g[i + 1] += dd;
        }
        g
    }

    fn denominator_grad(&self, u: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; u.len()];
        g[0] += self.q * u[0].abs().powf(self.q - 1.0) * u[0].signum() * self.core_weight;
        for &(i, tau, w) in &self.den_nodes {
            let v = u[i] * (1.0 - tau) + u[i + 1] * tau;
            let dv = self.q * v.abs().powf(self.q - 1.0) * v.signum() * w;
            g[i] += dv * (1.0 - tau);
            g[i + 1] += dv * tau;
        }
        g
    }

    /// `A / B^{p/q}` (area factors excluded).
    fn quotient(&self, u: &[f64]) -> f64 {
        self.numerator(u) / self.denominator(u).powf(self.p / self.q)
    }

    fn quotient_grad(&self, u: &[f64]) -> Vec<f64> {
        let a = self.numerator(u);
        let b = self.denominator(u);
        let e = self.p / self.q;
        let ga = self.numerator_grad(u);
        let gb = self.denominator_grad(u);
        let bp = b.powf(-e);
        ga.iter().zip(&gb).map(|(x, y)| bp * x - e * a * bp / b * y).collect()
    }
}

fn area_factor(dim: u32, p: f64, q: f64) -> f64 {
    sphere_area(dim).powf(1.0 - p / q)
}

/// `int |x|^k |grad u| / (int |x|^l |u|^{(l+N)/(k+N-1)})^{(k+N-1)/(l+N)}`.
pub fn q_functional(u: &RadialProfile, params: &Params) -> Result<f64> {
    params.require_standard()?;
    let (k, l, n) = (params.k, params.l, params.n());
    if k > l + 1.0 {
        return domain(format!("the quotient is used for k <= l+1, got k = {k}, l+1 = {}", l + 1.0));
    }
    if u.is_zero() {
        return domain("quotient of the zero function is undefined");
    }
    let s = (l + n) / (k + n - 1.0);
    let pq = PowerQuotient::new(&u.radial_grid, 1.0, k + n - 1.0, s, l + n - 1.0)?;
    Ok(area_factor(params.dim, 1.0, s) * pq.quotient(&u.values))
}

/// `int |x|^{ap} |u'|^p / (int |x|^{bq} |u|^q)^{p/q}`.
pub fn ckn_energy(u: &RadialProfile, ckn: &CknParams) -> Result<f64> {
    if u.is_zero() {
        return domain("energy of the zero function is undefined");
    }
    let pq = ckn_quotient(&u.radial_grid, ckn)?;
    Ok(area_factor(ckn.dim, ckn.p, ckn.q) * pq.quotient(&u.values))
}

fn ckn_quotient<'a>(grid: &'a [f64], ckn: &CknParams) -> Result<PowerQuotient<'a>> {
    let n = ckn.n();
    PowerQuotient::new(grid, ckn.p, ckn.a * ckn.p + n - 1.0, ckn.q, ckn.b * ckn.q + n - 1.0)
}

/// Discretization and iteration budget for [`ckn_radial_infimum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknSearch {
    pub nodes: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub iterations: u64,
}

impl Default for CknSearch {
    fn default() -> Self {
        Self { nodes: 400, r_min: 1e-3, r_max: 1e3, iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CknEstimate {
    /// Energy of the best profile found; an upper bound for the radial constant.
    pub value: f64,
    pub label: String,
    pub converged: bool,
    pub iterations: u64,
    /// Best energy after each iteration.
    pub history: Vec<f64>,
    pub profile: RadialProfile,
}

pub const UPPER_BOUND_LABEL: &str = "upper bound";

struct CknCost<'a> {
    quotient: PowerQuotient<'a>,
    scale: f64,
    /// Diagonal preconditioner: `u = w * precond`.
    precond: Vec<f64>,
}

impl CknCost<'_> {
    fn full(&self, w: &[f64]) -> Vec<f64> {
        let mut u: Vec<f64> = w.iter().zip(&self.precond).map(|(a, b)| a * b).collect();
        u.push(0.0);
        u
    }
}

impl CostFunction for CknCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, w: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let v = self.scale * self.quotient.quotient(&self.full(w));
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

impl Gradient for CknCost<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;
    fn gradient(&self, w: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let g = self.quotient.quotient_grad(&self.full(w));
        Ok(g.iter().zip(&self.precond).map(|(x, c)| self.scale * x * c).collect())
    }
}

struct BestCostHistory(Arc<Mutex<Vec<f64>>>);

impl<I: State<Float = f64>> Observe<I> for BestCostHistory {
    fn observe_iter(&mut self, state: &I, _kv: &KV) -> std::result::Result<(), argmin::core::Error> {
        self.0.lock().expect("history lock").push(state.get_best_cost());
        Ok(())
    }
}

/// Minimizes the CKN energy over piecewise-linear profiles on a log grid,
/// starting from `(1 + r)^{-(N-p+ap)/(p-1)}` and using diagonally
/// preconditioned L-BFGS. The result is the energy of an admissible profile,
/// hence an upper bound for the radial constant; it decreases with the
/// iteration count.
pub fn ckn_radial_infimum(ckn: &CknParams, search: &CknSearch) -> Result<CknEstimate> {
    let (a, p, q, n) = (ckn.a, ckn.p, ckn.q, ckn.n());
    if !(p > 1.0) || !(q > p) {
        return domain(format!("radial infimum requires 1 < p < q, got p = {p}, q = {q}"));
    }
    if let Some(ps) = ckn.p_star() {
        if q > ps * (1.0 + 1e-14) {
            return domain(format!("radial infimum requires q <= p* = {ps}, got q = {q}"));
        }
    }
    if search.nodes < 4 || !(search.r_min > 0.0 && search.r_max > search.r_min) {
        return domain("search grid needs at least 4 nodes and 0 < r_min < r_max");
    }
    let grid = log_grid(search.r_min, search.r_max, search.nodes);
    let decay = (n - p + a * p) / (p - 1.0);
    let init_u: Vec<f64> = grid[..grid.len() - 1]
        .iter()
        .map(|&r| (1.0 + r).powf(-decay) - (1.0 + search.r_max).powf(-decay))
        .collect();
    let quotient = ckn_quotient(&grid, ckn)?;

    // Hessian diagonal of the numerator at the start profile.
    let mut diag = vec![0.0; init_u.len()];
    for (i, (g, w)) in grid.windows(2).zip(&quotient.num_weights).enumerate() {
        let h = g[1] - g[0];
        let next = init_u.get(i + 1).copied().unwrap_or(0.0);
        let d = ((next - init_u[i]) / h).abs().max(1e-300);
        let c = p * (p - 1.0) * d.powf(p - 2.0) * w / (h * h);
        diag[i] += c;
        if i + 1 < diag.len() {
            diag[i + 1] += c;
        }
    }
    let precond: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let init: Vec<f64> = init_u.iter().zip(&precond).map(|(u, c)| u / c).collect();

    let cost = CknCost { quotient, scale: area_factor(ckn.dim, p, q), precond };
    let start_value = cost.cost(&init).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let history = Arc::new(Mutex::new(vec![start_value]));

    let linesearch = MoreThuenteLineSearch::new();
    let solver = LBFGS::new(linesearch, 20)
        .with_tolerance_grad(1e-13)
        .map_err(|e| Error::Inconsistent(e.to_string()))?
        .with_tolerance_cost(1e-16)
        .map_err(|e| Error::Inconsistent(e.to_string()))?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.param(init.clone()).max_iters(search.iterations))
        .add_observer(BestCostHistory(Arc::clone(&history)), ObserverMode::Always)
        .run();

    let (best_w, iterations, converged, precond) = match res {
        Ok(res) => {
            let st = res.state();
            let best = st.get_best_param().cloned().unwrap_or_else(|| init.clone());
            let hit_limit = matches!(
                st.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::MaxItersReached)
            );
            (best, st.get_iter(), !hit_limit, res.problem.problem.map(|c| c.precond))
        }
        // A failed line search leaves the start point, which is still admissible.
        Err(_) => (init.clone(), 0, false, None),
    };
    let precond = precond.unwrap_or_else(|| vec![1.0; init.len()]);
    let mut full: Vec<f64> = best_w.iter().zip(&precond).map(|(w, c)| (w * c).abs()).collect();
    full.push(0.0);
    let peak = full.iter().copied().fold(0.0, f64::max);
    if peak > 0.0 {
        full.iter_mut().for_each(|v| *v /= peak);
    }
    let mut profile = RadialProfile::new(grid.clone(), full)?;
    let mut value = ckn_energy(&profile, ckn)?;
    if !(value <= start_value) {
        let mut u = init_u;
        u.push(0.0);
        profile = RadialProfile::new(grid, u)?;
        value = start_value;
    }
    let history = history.lock().expect("history lock").clone();
    let converged = converged || stagnated(&history);
    Ok(CknEstimate {
        value,
        label: UPPER_BOUND_LABEL.into(),
        converged,
        iterations,
        history,
        profile,
    })
}

/// Relative decrease over the last quarter of the history below `1e-6`.
/// The dilation mode is flat, so the solver can creep long after the value
/// has settled.
fn stagnated(history: &[f64]) -> bool {
    let n = history.len();
    if n < 100 {
        return false;
    }
    let (then, now) = (history[3 * n / 4], history[n - 1]);
    (then - now) <= 1e-6 * now.abs()
}

/// `(N/p - 1 + a)^p`, the best constant when `p = q`.
pub fn hardy_constant(a: f64, p: f64, dim: u32) -> Result<f64> {
    let base = f64::from(dim) / p - 1.0 + a;
    if !(base > 0.0) {
        return domain(format!("Hardy constant requires N/p - 1 + a > 0, got {base}"));
    }
    Ok(base.powf(p))
}

// ---------------------------------------------------------------------------
// Lorentz norms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LorentzIndex {
    Finite(f64),
    Infinite,
}

/// `|{u > t}|` for a radial piecewise-linear profile in `R^N`, exact.
pub fn distribution_function(u: &RadialProfile, dim: u32, t: f64) -> f64 {
    let n = dim as i32;
    let g = &u.radial_grid;
    let v = &u.values;
    let mut vol = if v[0] > t { g[0].powi(n) } else { 0.0 };
    for i in 0..g.len() - 1 {
        let (a, b) = (g[i], g[i + 1]);
        let (va, vb) = (v[i], v[i + 1]);
        let (lo, hi) = match (va > t, vb > t) {
            (true, true) => (a, b),
            (false, false) => continue,
            (true, false) => (a, a + (b - a) * (va - t) / (va - vb)),
            (false, true) => (a + (b - a) * (t - va) / (vb - va), b),
        };
        vol += hi.powi(n) - lo.powi(n);
    }
    ball_volume(dim) * vol
}

/// `||u||_{r,q}`: `(r int_0^inf t^{q-1} D(t)^{q/r} dt)^{1/q}` for finite `q`,
/// `sup_t t D(t)^{1/r}` for `q = inf`, with `D` the exact distribution
/// function. Equivalently `(int (s^{1/r} u*(s))^q ds/s)^{1/q}`.
pub fn lorentz_norm(u: &RadialProfile, dim: u32, r: f64, q: LorentzIndex) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("Lorentz exponent r must lie in (0, inf), got {r}"));
    }
    let mut levels: Vec<f64> = u.values.clone();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let gl = GaussLegendre::new(16);
    match q {
        LorentzIndex::Finite(q) => {
            if !(q > 0.0) {
                return domain(format!("Lorentz exponent q must be positive, got {q}"));
            }
            let mut total = 0.0;
            for w in levels.windows(2) {
                let f = |t: f64| t.powf(q - 1.0) * distribution_function(u, dim, t).powf(q / r);
                total += if w[0] == 0.0 {
                    gl.integrate_graded(0.0, w[1], 40, f)
                } else {
                    gl.integrate(w[0], w[1], f)
                };
            }
            Ok((r * total).powf(1.0 / q))
        }
        LorentzIndex::Infinite => {
            let mut best: f64 = 0.0;
            for w in levels.windows(2) {
                for j in 0..=64 {
                    let t = w[0] + (w[1] - w[0]) * f64::from(j) / 64.0;
                    let t = t.min(w[1] * (1.0 - 1e-12));
                    best = best.max(t * distribution_function(u, dim, t).powf(1.0 / r));
                }
            }
            Ok(best)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    /// `lhs < rhs`, but by less than the uncertainty of the constant estimate.
    Marginal,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs - 1`.
    pub margin: f64,
    pub status: CheckStatus,
    pub lorentz_exponent: f64,
    pub constant_label: String,
}

/// `(int |x|^{ap} |u'|^p)^{1/p} >= w_N^{-b/N} S^{1/p} ||u||_{r,q}` with
/// `r = Np/(N-p+ap)` and `S` an estimate of the radial constant.
/// `estimate_delta` is the relative uncertainty of `S`.
pub fn lorentz_imbedding_check(
    u: &RadialProfile,
    ckn: &CknParams,
    s_rad_estimate: f64,
    estimate_delta: f64,
) -> Result<LorentzCheck> {
    let (a, p, q, dim) = (ckn.a, ckn.p, ckn.q, ckn.dim);
    let th = ckn_thresholds(p, q, dim)?;
    if !(0.0 <= a && a <= th.a2) {
        return domain(format!("imbedding requires 0 <= a <= a2 = {}, got a = {a}", th.a2));
    }
    if u.is_zero() {
        return domain("imbedding check of the zero function is meaningless");
    }
    let n = ckn.n();
    let pq = ckn_quotient(&u.radial_grid, ckn)?;
    let lhs = (sphere_area(dim) * pq.numerator(&u.values)).powf(1.0 / p);
    let r = ckn.lorentz_exponent();
    let norm = lorentz_norm(u, dim, r, LorentzIndex::Finite(q))?;
    let rhs = ball_volume(dim).powf(-ckn.b / n) * s_rad_estimate.powf(1.0 / p) * norm;
    let margin = lhs / rhs - 1.0;
    let status = if margin >= -1e-10 {
        CheckStatus::Pass
    } else if margin >= -estimate_delta.abs() / p - 1e-10 {
        CheckStatus::Marginal
    } else {
        CheckStatus::Fail
    };
    Ok(LorentzCheck { lhs, rhs, margin, status, lorentz_exponent: r, constant_label: UPPER_BOUND_LABEL.into() })
}

// ---------------------------------------------------------------------------
// Weighted p-Laplace eigenvalue of a ball
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub profile: RadialProfile,
}

/// Smallest value of `int |u'|^p r^{N-1} / int |u|^p r^{N-1-beta p}` over
/// piecewise-linear `u` on `n` uniform nodes of `[0, R]` with `u(R) = 0`.
///
/// Inverse power iteration: each step minimizes
/// `A(v)/p - int |u|^{p-2} u v r^{N-1-beta p}` by damped Newton with a
/// tridiagonal Hessian, then renormalizes.
pub fn eigenvalue_radial(p: f64, beta: f64, radius: f64, dim: u32, nodes: usize) -> Result<EigenEstimate> {
    let n = f64::from(dim);
    if !(p > 1.0 && p < n) {
        return domain(format!("eigenvalue problem requires 1 < p < N, got p = {p}, N = {dim}"));
    }
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("requires 0 <= beta < 1, got beta = {beta}"));
    }
    if !(radius > 0.0) || nodes < 3 {
        return domain("requires R > 0 and at least 3 nodes");
    }
    let grid = uniform_grid(radius, nodes);
    let pq = PowerQuotient::new(&grid, p, n - 1.0, p, n - 1.0 - beta * p)?;
    let free = nodes - 1;

    let mut u: Vec<f64> = grid.iter().map(|r| 1.0 - (r / radius).powi(2)).collect();
    normalize(&pq, &mut u);
    let mut lambda = pq.numerator(&u);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=500 {
        iterations = it;
        let rhs = pq.denominator_grad(&u).into_iter().map(|g| g / p).collect::<Vec<_>>();
        let mut v = u.clone();
        newton_inner(&pq, &mut v, &rhs, free)?;
        normalize(&pq, &mut v);
        let next = pq.numerator(&v);
        let change = (lambda - next).abs() / next;
        u = v;
        lambda = next;
        if change < 1e-13 {
            converged = true;
            break;
        }
    }
    let peak = u.iter().copied().fold(0.0, f64::max);
    let values = u.iter().map(|v| (v / peak).max(0.0)).collect();
    Ok(EigenEstimate { lambda, iterations, converged, profile: RadialProfile::new(grid, values)? })
}

fn normalize(pq: &PowerQuotient, u: &mut [f64]) {
    let b = pq.denominator(u).powf(1.0 / pq.q);
    u.iter_mut().for_each(|v| *v /= b);
}

/// Minimizes `A(v)/p - <rhs, v>` over the first `free` entries (the last is pinned at 0).
fn newton_inner(pq: &PowerQuotient, v: &mut [f64], rhs: &[f64], free: usize) -> Result<()> {
    let p = pq.p;
    let objective = |v: &[f64]| pq.numerator(v) / p - rhs.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let eps = 1e-14;
    let mut f = objective(v);
    for _ in 0..100 {
        // gradient and tridiagonal Hessian of A/p
        let mut g: Vec<f64> = pq.numerator_grad(v).iter().zip(rhs).map(|(a, b)| a / p - b).collect();
        g.truncate(free);
        let mut diag = vec![0.0; free];
        let mut off = vec![0.0; free.saturating_sub(1)];
        for (i, (gw, w)) in pq.grid.windows(2).zip(&pq.num_weights).enumerate() {
            let h = gw[1] - gw[0];
            let d = (v[i + 1] - v[i]) / h;
            let c = (p - 1.0) * (d * d + eps).powf(0.5 * (p - 2.0)) * w / (h * h);
            diag[i] += c;
            if i + 1 < free {
                diag[i + 1] += c;
                off[i] -= c;
            }
        }
        let step = solve_tridiagonal(&off, &diag, &off, &g);
        let gnorm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(i, &x)| if i < free { x - alpha * step[i] } else { x })
                .collect();
            let ft = objective(&trial);
            if ft <= f {
                v.copy_from_slice(&trial);
                improved = f - ft > 1e-16 * f.abs();
                f = ft;
                break;
            }
            alpha *= 0.5;
        }
        if !improved || gnorm < 1e-14 {
            return Ok(());
        }
    }
    Ok(())
}

/// Thomas algorithm for `lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = b[i]`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { upper[0] / diag[0] } else { 0.0 };
    d[0] = b[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (b[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
