//! Exponent regimes for the power-weighted isoperimetric problem.
//!
//! The problem compares `int_{dM} |x|^k dH_{N-1}` with
//! `(int_M |x|^l dx)^{(k+N-1)/(l+N)}`. This module holds the closed-form
//! radial constants, the classification of `(k, l, N)` into regimes where the
//! centered ball is (or is not) optimal, the threshold curves in the
//! `(k, l)` plane, and the analogous thresholds for the
//! Caffarelli-Kohn-Nirenberg family.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sphere::{ball_volume, sphere_area};

/// Tolerance used when a threshold inequality is tested with equality
/// allowed and both sides come out of floating point arithmetic.
const TIE_SLACK: f64 = 1e-12;

/// Sign regime of the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `k + N - 1 > 0` and `l + N > 0`: bounded sets, balls are candidates.
    Standard,
    /// `k + N - 1 < 0` and `l + N < 0`: exterior sets, complements of balls are candidates.
    Inverted,
}

/// Exponent triple `(k, l, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k: f64,
    pub l: f64,
    #[serde(rename = "N")]
    pub dim: u32,
    pub orientation: Orientation,
}

impl Params {
    /// Builds params and infers the orientation from the signs.
    pub fn new(k: f64, l: f64, dim: u32) -> Result<Self> {
        check_finite(k, l, dim)?;
        let n = f64::from(dim);
        let kk = k + n - 1.0;
        let ll = l + n;
        if kk > 0.0 && ll > 0.0 {
            Ok(Self { k, l, dim, orientation: Orientation::Standard })
        } else if kk < 0.0 && ll < 0.0 {
            Ok(Self { k, l, dim, orientation: Orientation::Inverted })
        } else {
            domain(format!(
                "exponents must satisfy k+N-1 > 0 and l+N > 0 (standard) or k+N-1 < 0 and l+N < 0 (inverted); got k+N-1 = {kk}, l+N = {ll}"
            ))
        }
    }

    pub fn standard(k: f64, l: f64, dim: u32) -> Result<Self> {
        check_finite(k, l, dim)?;
        let n = f64::from(dim);
        if k + n - 1.0 <= 0.0 {
            return domain(format!("standard orientation requires k+N-1 > 0, got {}", k + n - 1.0));
        }
        if l + n <= 0.0 {
            return domain(format!("standard orientation requires l+N > 0, got {}", l + n));
        }
        Ok(Self { k, l, dim, orientation: Orientation::Standard })
    }

    pub fn inverted(k: f64, l: f64, dim: u32) -> Result<Self> {
        check_finite(k, l, dim)?;
        let n = f64::from(dim);
        if k + n - 1.0 >= 0.0 {
            return domain(format!("inverted orientation requires k+N-1 < 0, got {}", k + n - 1.0));
        }
        if l + n >= 0.0 {
            return domain(format!("inverted orientation requires l+N < 0, got {}", l + n));
        }
        Ok(Self { k, l, dim, orientation: Orientation::Inverted })
    }

    pub fn n(&self) -> f64 {
        f64::from(self.dim)
    }

    /// Exponent `(k+N-1)/(l+N)` of the volume term in the ratio.
    pub fn volume_exponent(&self) -> f64 {
        (self.k + self.n() - 1.0) / (self.l + self.n())
    }

    /// Image of the exponents under inversion in the unit sphere:
    /// `k -> -k-2N+2`, `l -> -l-2N`. Swaps the orientation.
    pub fn inversion_dual(&self) -> Self {
        let n = self.n();
        let orientation = match self.orientation {
            Orientation::Standard => Orientation::Inverted,
            Orientation::Inverted => Orientation::Standard,
        };
        Self {
            k: -self.k - 2.0 * n + 2.0,
            l: -self.l - 2.0 * n,
            dim: self.dim,
            orientation,
        }
    }

    pub(crate) fn require_standard(&self) -> Result<()> {
        match self.orientation {
            Orientation::Standard => Ok(()),
            Orientation::Inverted => domain(format!(
                "operation requires the standard orientation k+N-1 > 0, l+N > 0; got k+N-1 = {}, l+N = {}",
                self.k + self.n() - 1.0,
                self.l + self.n()
            )),
        }
    }
}

fn check_finite(k: f64, l: f64, dim: u32) -> Result<()> {
    if dim == 0 {
        return domain("dimension N must be at least 1");
    }
    if !k.is_finite() || !l.is_finite() {
        return domain("exponents k and l must be finite");
    }
    Ok(())
}

/// `(N w_N)^{(l-k+1)/(l+N)} * (l+N)^{(k+N-1)/(l+N)}`, the ratio of any centered ball.
pub fn c_rad(params: &Params) -> Result<f64> {
    params.require_standard()?;
    Ok(radial_constant(params.k, params.l, params.dim))
}

/// Constant attained by exteriors of centered balls in the inverted orientation:
/// `(N w_N)^{(l-k+1)/(l+N)} * |l+N|^{(k+N-1)/(l+N)}`.
pub fn c_rad_inverted(params: &Params) -> Result<f64> {
    if params.orientation != Orientation::Inverted {
        return domain(format!(
            "inverted constant requires k+N-1 < 0 and l+N < 0; got k+N-1 = {}, l+N = {}",
            params.k + params.n() - 1.0,
            params.l + params.n()
        ));
    }
    Ok(radial_constant(params.k, params.l, params.dim))
}

fn radial_constant(k: f64, l: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    let area = sphere_area(dim);
    area.powf((l - k + 1.0) / (l + n)) * (l + n).abs().powf((k + n - 1.0) / (l + n))
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Centered balls (or exteriors of centered balls) minimize the ratio.
    RadialOptimal,
    /// The centered ball is unstable in the first nontrivial mode.
    SymmetryBroken,
    /// Shifted balls drive the ratio to zero.
    ZeroInfimum,
    /// None of the known sufficient or necessary conditions decides the case.
    Unknown,
}

/// Which condition certifies a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "iv")]
    Iv,
    #[serde(rename = "j")]
    J,
    #[serde(rename = "jj")]
    Jj,
    #[serde(rename = "jjj")]
    Jjj,
    #[serde(rename = "jv")]
    Jv,
    #[serde(rename = "oneD-a")]
    OneDA,
    #[serde(rename = "oneD-b")]
    OneDB,
    /// First-mode instability of the ball.
    #[serde(rename = "necessity")]
    Necessity,
    /// `k < l(N-1)/N`: the infimum is zero.
    #[serde(rename = "positivity")]
    Positivity,
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::I => "i",
            Certificate::Ii => "ii",
            Certificate::Iii => "iii",
            Certificate::Iv => "iv",
            Certificate::J => "j",
            Certificate::Jj => "jj",
            Certificate::Jjj => "jjj",
            Certificate::Jv => "jv",
            Certificate::OneDA => "oneD-a",
            Certificate::OneDB => "oneD-b",
            Certificate::Necessity => "necessity",
            Certificate::Positivity => "positivity",
        }
    }

    fn inverted(self) -> Self {
        match self {
            Certificate::I => Certificate::J,
            Certificate::Ii => Certificate::Jj,
            Certificate::Iii => Certificate::Jjj,
            Certificate::Iv => Certificate::Jv,
            other => other,
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Threshold values of `l` for the given `k` and `N`, where defined.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest `l` certified by the sufficient conditions (`k >= 0`, `N >= 2`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    /// `kN/(N-1)`, the exact optimality threshold when `k <= 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_star_lower: Option<f64>,
    /// `k - 1 + (N-1)/(k+N-1)`: above it the ball is unstable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_upper: Option<f64>,
}

impl Thresholds {
    pub fn as_map(&self) -> BTreeMap<&'static str, f64> {
        let mut m = BTreeMap::new();
        if let Some(v) = self.l1 {
            m.insert("l1", v);
        }
        if let Some(v) = self.l_star_lower {
            m.insert("l_star_lower", v);
        }
        if let Some(v) = self.l_upper {
            m.insert("l_upper", v);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub params: Params,
    pub verdict: Verdict,
    /// Condition that certifies the verdict; `None` for [`Verdict::Unknown`].
    pub certifying_condition: Option<Certificate>,
    /// Thresholds of the standard-orientation problem that decides the case
    /// (for inverted params these belong to the dual exponents).
    pub thresholds: Thresholds,
    /// Whether the first nontrivial mode has negative second variation,
    /// i.e. `l+1 > k + (N-1)/(k+N-1)` (`l+1 > k` when `N = 1`).
    pub first_mode_unstable: bool,
    pub notes: Vec<String>,
}

/// Classifies `(k, l, N)`.
///
/// Order of precedence for the standard orientation with `N >= 2`:
/// `k < l(N-1)/N` gives [`Verdict::ZeroInfimum`]; otherwise any of the
/// sufficient conditions (i)-(iv) gives [`Verdict::RadialOptimal`];
/// otherwise first-mode instability gives [`Verdict::SymmetryBroken`];
/// everything else is [`Verdict::Unknown`]. Inverted params are classified
/// through their inversion dual with tags renamed (i) -> (j) and so on.
pub fn classify(params: &Params) -> RegimeReport {
    match params.orientation {
        Orientation::Standard => classify_standard(params),
        Orientation::Inverted => {
            let dual = params.inversion_dual();
            let mut report = classify_standard(&dual);
            report.params = *params;
            report.certifying_condition = report.certifying_condition.map(Certificate::inverted);
            report.notes.push(format!(
                "decided through the inversion dual (k, l) = ({}, {}); extremal sets are exteriors of centered balls",
                dual.k, dual.l
            ));
            report
        }
    }
}

fn classify_standard(params: &Params) -> RegimeReport {
    let (k, l, dim) = (params.k, params.l, params.dim);
    let n = params.n();
    let mut notes = Vec::new();

    if dim == 1 {
        let unstable = l + 1.0 > k;
        let (verdict, cert) = if unstable {
            (Verdict::SymmetryBroken, Certificate::OneDB)
        } else {
            (Verdict::RadialOptimal, Certificate::OneDA)
        };
        if unstable {
            notes.push("optimal sets are intervals with one endpoint at the origin".into());
        }
        return RegimeReport {
            params: *params,
            verdict,
            certifying_condition: Some(cert),
            thresholds: Thresholds { l1: None, l_star_lower: None, l_upper: Some(k - 1.0) },
            first_mode_unstable: unstable,
            notes,
        };
    }

    let l_up = k - 1.0 + (n - 1.0) / (k + n - 1.0);
    let thresholds = Thresholds {
        l1: (k >= 0.0).then(|| l_one_unchecked(k, dim)),
        l_star_lower: (k <= 0.0).then(|| k * n / (n - 1.0)),
        l_upper: Some(l_up),
    };
    let unstable = l + 1.0 > k + (n - 1.0) / (k + n - 1.0);

    let (verdict, cert) = if k < l * (n - 1.0) / n {
        (Verdict::ZeroInfimum, Some(Certificate::Positivity))
    } else if let Some(c) = sufficient_condition(k, l, dim) {
        (Verdict::RadialOptimal, Some(c))
    } else if unstable {
        (Verdict::SymmetryBroken, Some(Certificate::Necessity))
    } else {
        notes.push(
            "optimality of the ball is open between l1 and l_upper (conjecturally l_upper is sharp)"
                .into(),
        );
        (Verdict::Unknown, None)
    };

    RegimeReport {
        params: *params,
        verdict,
        certifying_condition: cert,
        thresholds,
        first_mode_unstable: unstable,
        notes,
    }
}

/// First of the sufficient conditions (i)-(iv) that holds, for the standard
/// orientation with `N >= 2`.
fn sufficient_condition(k: f64, l: f64, dim: u32) -> Option<Certificate> {
    let n = f64::from(dim);
    if l + 1.0 <= k {
        return Some(Certificate::I);
    }
    // From here on k < l + 1.
    if l * (n - 1.0) / n <= k && k <= 0.0 {
        return Some(Certificate::Ii);
    }
    if dim >= 3 && k >= 0.0 && cubic_condition(k, l, dim) {
        return Some(Certificate::Iii);
    }
    if dim == 2 && k >= 0.0 {
        let low = l <= 0.0 && k <= 1.0 / 3.0;
        let high = k >= 1.0 / 3.0 && cubic_condition(k, l, 2);
        if low || high {
            return Some(Certificate::Iv);
        }
    }
    None
}

/// `1/(l+N) >= 1/(k+N-1) - c/(k+N-1)^3` with `c = (N-1)^2/N` for `N >= 3`
/// and `c = 16/27` for `N = 2`.
fn cubic_condition(k: f64, l: f64, dim: u32) -> bool {
    let n = f64::from(dim);
    let kk = k + n - 1.0;
    let c = cubic_coefficient(dim);
    let lhs = 1.0 / (l + n);
    let rhs = 1.0 / kk - c / kk.powi(3);
    lhs >= rhs - TIE_SLACK * lhs.abs().max(rhs.abs())
}

fn cubic_coefficient(dim: u32) -> f64 {
    let n = f64::from(dim);
    if dim == 2 {
        16.0 / 27.0
    } else {
        (n - 1.0) * (n - 1.0) / n
    }
}

/// Condition (iii): `1/(l+N) >= 1/(k+N-1) - (N-1)^2/(N (k+N-1)^3)`.
pub fn condition_iii_holds(params: &Params) -> Result<bool> {
    params.require_standard()?;
    let (k, l) = (params.k, params.l);
    if params.dim < 3 {
        return domain(format!("condition (iii) requires N >= 3, got N = {}", params.dim));
    }
    if !(0.0 <= k && k <= l + 1.0) {
        return domain(format!("condition (iii) requires 0 <= k <= l+1, got k = {k}, l = {l}"));
    }
    Ok(cubic_condition(k, l, params.dim))
}

/// `l_1(k, N)`: the sufficient conditions certify every `l <= l_1` when `k >= 0`.
pub fn l_one(k: f64, dim: u32) -> Result<f64> {
    if !(k >= 0.0) {
        return domain(format!("l_1 requires k >= 0, got k = {k}"));
    }
    if dim < 2 {
        return domain(format!("l_1 requires N >= 2, got N = {dim}"));
    }
    Ok(l_one_unchecked(k, dim))
}

fn l_one_unchecked(k: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    if dim == 2 && k <= 1.0 / 3.0 {
        return 0.0;
    }
    let kk = k + n - 1.0;
    kk.powi(3) / (kk * kk - cubic_coefficient(dim)) - n
}

/// `l^*(k, N) = k - 1 + (N-1)/(k+N-1)`: the ball is unstable for `l > l^*`.
pub fn l_upper(k: f64, dim: u32) -> Result<f64> {
    if dim == 0 {
        return domain("dimension N must be at least 1");
    }
    let n = f64::from(dim);
    if !(k + n - 1.0 > 0.0) {
        return domain(format!("l^* requires k+N-1 > 0, got {}", k + n - 1.0));
    }
    Ok(k - 1.0 + (n - 1.0) / (k + n - 1.0))
}

/// `l_*(k, N) = kN/(N-1)`, exact when `k <= 0`.
pub fn l_star_exact_nonpos_k(k: f64, dim: u32) -> Result<f64> {
    if k > 0.0 {
        return domain(format!("the exact threshold kN/(N-1) requires k <= 0, got k = {k}"));
    }
    if dim < 2 {
        return domain(format!("the exact threshold requires N >= 2, got N = {dim}"));
    }
    let n = f64::from(dim);
    if k + n - 1.0 <= 0.0 {
        return domain(format!("requires k+N-1 > 0, got {}", k + n - 1.0));
    }
    Ok(k * n / (n - 1.0))
}

/// Lower bound `((N-1)/(k+N-1))^{(l+1-k)/(l+N)} C^rad_{0,l',N}` for the
/// isoperimetric constant when `k > 0`, with `l' = (l(N-1) - kN)/(k+N-1)`.
pub fn kpos_lower_bound(params: &Params) -> Result<f64> {
    params.require_standard()?;
    let (k, l, dim) = (params.k, params.l, params.dim);
    let n = params.n();
    if dim < 2 {
        return domain(format!("lower bound requires N >= 2, got N = {dim}"));
    }
    if !(k > 0.0 && k <= l + 1.0) {
        return domain(format!("lower bound requires 0 < k <= l+1, got k = {k}, l = {l}"));
    }
    if l * (n - 1.0) / n > k {
        return domain(format!("lower bound requires l(N-1)/N <= k, got l(N-1)/N = {}", l * (n - 1.0) / n));
    }
    let lp = reduced_volume_exponent(k, l, dim);
    if !(-1.0 - 1e-12..=1e-12).contains(&lp) {
        return Err(Error::Inconsistent(format!("reduced exponent l' = {lp} outside [-1, 0]")));
    }
    let inner = Params::standard(0.0, lp, dim)?;
    let factor = ((n - 1.0) / (k + n - 1.0)).powf((l + 1.0 - k) / (l + n));
    Ok(factor * c_rad(&inner)?)
}

/// `l' = (l(N-1) - kN)/(k+N-1)`, the volume exponent after the radial power map.
pub fn reduced_volume_exponent(k: f64, l: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    (l * (n - 1.0) - k * n) / (k + n - 1.0)
}

// ---------------------------------------------------------------------------
// Caffarelli-Kohn-Nirenberg family
// ---------------------------------------------------------------------------

/// Exponents of `int |x|^{ap} |grad v|^p >= S (int |x|^{bq} |v|^q)^{p/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknParams {
    pub a: f64,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub dim: u32,
    pub b: f64,
}

impl CknParams {
    pub fn new(a: f64, p: f64, q: f64, dim: u32) -> Result<Self> {
        if dim == 0 {
            return domain("dimension N must be at least 1");
        }
        if ![a, p, q].iter().all(|x| x.is_finite()) {
            return domain("a, p, q must be finite");
        }
        let n = f64::from(dim);
        if !(1.0 <= p && p <= q) {
            return domain(format!("requires 1 <= p <= q, got p = {p}, q = {q}"));
        }
        if p < n {
            let ps = n * p / (n - p);
            if q > ps * (1.0 + 1e-14) {
                return domain(format!("requires q <= p* = Np/(N-p) = {ps}, got q = {q}"));
            }
        }
        if !(a > 1.0 - n / p) {
            return domain(format!("requires a > 1 - N/p = {}, got a = {a}", 1.0 - n / p));
        }
        let b = n * (1.0 / p - 1.0 / q) + a - 1.0;
        Ok(Self { a, p, q, dim, b })
    }

    pub fn n(&self) -> f64 {
        f64::from(self.dim)
    }

    /// Critical Sobolev exponent `Np/(N-p)`, `None` when `p >= N`.
    pub fn p_star(&self) -> Option<f64> {
        critical_exponent(self.p, self.dim)
    }

    /// Exponent `r = Np/(N-p+ap)` of the Lorentz space in the imbedding.
    pub fn lorentz_exponent(&self) -> f64 {
        let n = self.n();
        n * self.p / (n - self.p + self.a * self.p)
    }
}

fn critical_exponent(p: f64, dim: u32) -> Option<f64> {
    let n = f64::from(dim);
    (p < n).then(|| n * p / (n - p))
}

/// Thresholds in `a` for fixed `(p, q, N)` with `1 < p < q < p*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknThresholds {
    pub a1: f64,
    pub a2: f64,
    /// Present for `N >= 3`.
    pub a3: Option<f64>,
    /// Present for `N = 2` when `1/q > 1/p - 1/3`.
    pub a4: Option<f64>,
    /// Symmetry of radial optimizers breaks for `a > a_star`.
    pub a_star: f64,
}

pub fn ckn_thresholds(p: f64, q: f64, dim: u32) -> Result<CknThresholds> {
    if dim < 2 {
        return domain(format!("thresholds require N >= 2, got N = {dim}"));
    }
    if !(p > 1.0 && q > p) {
        return domain(format!("thresholds require 1 < p < q, got p = {p}, q = {q}"));
    }
    if let Some(ps) = critical_exponent(p, dim) {
        if q >= ps {
            return domain(format!("thresholds require q < p* = {ps}, got q = {q}"));
        }
    }
    if !q.is_finite() {
        return domain("q must be finite");
    }
    let n = f64::from(dim);
    let pc = p / (p - 1.0);
    let shift = n / p - 1.0;
    let gap = 1.0 / p - 1.0 / q;
    let qfac = 1.0 - q / p + q;

    let a1 = (n - 1.0) / (1.0 + q / pc) - n / p + 1.0;
    let a2 = 1.0 + n * (1.0 / q - 1.0 / p);
    let a3 = if dim >= 3 {
        let rhs = (n - 1.0) * (n - 1.0) / (n * gap * qfac * qfac);
        Some(shifted_square_root(shift, rhs)?)
    } else {
        None
    };
    let a4 = if dim == 2 && 1.0 / q > 1.0 / p - 1.0 / 3.0 {
        let rhs = 16.0 / (27.0 * gap * qfac * qfac);
        Some(shifted_square_root(shift, rhs)?)
    } else {
        None
    };
    let a_star = shifted_square_root(shift, (n - 1.0) * (1.0 / (q - p) - 1.0 / (q + pc)))?;

    if !(a1.max(0.0) < a2 && a2 < 1.0) {
        return Err(Error::Inconsistent(format!(
            "expected max(0, a1) < a2 < 1, got a1 = {a1}, a2 = {a2}"
        )));
    }
    if let Some(a3) = a3 {
        if !(a2 < a3) {
            return Err(Error::Inconsistent(format!("expected a2 < a3, got a2 = {a2}, a3 = {a3}")));
        }
    }
    if let Some(a4) = a4 {
        if !(a2 < a4) {
            return Err(Error::Inconsistent(format!("expected a2 < a4, got a2 = {a2}, a4 = {a4}")));
        }
    }
    Ok(CknThresholds { a1, a2, a3, a4, a_star })
}

/// Root `a` in `(-shift, -shift + 1e3]` of `(shift + a)^2 = rhs`, by bisection.
fn shifted_square_root(shift: f64, rhs: f64) -> Result<f64> {
    if !(rhs > 0.0) || !rhs.is_finite() {
        return Err(Error::Inconsistent(format!("threshold equation has right side {rhs}")));
    }
    let g = |a: f64| (shift + a).powi(2) - rhs;
    let mut lo = -shift;
    let mut hi = -shift + 1e3;
    if g(hi) < 0.0 {
        return Err(Error::NonConvergence {
            what: "threshold bisection (root beyond bracket)".into(),
            residual: g(hi),
        });
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sufficient condition under which the CKN infimum is attained among radial functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CknCertificate {
    /// `p = q`: the Hardy constant `(N/p - 1 + a)^p`.
    #[serde(rename = "hardy")]
    Hardy,
    /// `q = p*` and `a <= 0`.
    #[serde(rename = "critical")]
    Critical,
    #[serde(rename = "a<=a2")]
    BelowA2,
    #[serde(rename = "a<=a3")]
    BelowA3,
    #[serde(rename = "a<=a4")]
    BelowA4,
}

impl CknCertificate {
    pub fn tag(&self) -> &'static str {
        match self {
            CknCertificate::Hardy => "hardy",
            CknCertificate::Critical => "critical",
            CknCertificate::BelowA2 => "a<=a2",
            CknCertificate::BelowA3 => "a<=a3",
            CknCertificate::BelowA4 => "a<=a4",
        }
    }
}

/// Returns the first sufficient condition for `S = S^rad` that applies.
/// `None` means "not certified", not "symmetry fails".
pub fn ckn_radial_symmetry_sufficient(ckn: &CknParams) -> Option<CknCertificate> {
    let CknParams { a, p, q, dim, .. } = *ckn;
    if p == q {
        return Some(CknCertificate::Hardy);
    }
    if let Some(ps) = ckn.p_star() {
        if p > 1.0 && (q - ps).abs() <= 1e-12 * ps && a <= 0.0 {
            return Some(CknCertificate::Critical);
        }
    }
    let th = ckn_thresholds(p, q, dim).ok()?;
    if a <= th.a2 {
        return Some(CknCertificate::BelowA2);
    }
    if th.a3.is_some_and(|a3| a <= a3) {
        return Some(CknCertificate::BelowA3);
    }
    if th.a4.is_some_and(|a4| a <= a4) {
        return Some(CknCertificate::BelowA4);
    }
    None
}

/// Volume of the centered ball `B_R` in the measure `|x|^l dx`.
pub fn ball_measure(radius: f64, l: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    sphere_area(dim) * radius.powf(l + n) / (l + n)
}

/// Radius of the centered ball whose `|x|^l dx` measure equals `measure`.
pub fn ball_radius_for_measure(measure: f64, l: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    (measure * (l + n) / sphere_area(dim)).powf(1.0 / (l + n))
}

/// `w_N`, re-exported for callers that only need the regime module.
pub fn omega(dim: u32) -> f64 {
    ball_volume(dim)
}
