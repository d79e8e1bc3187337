//! Volumes and surface areas of unit balls and spheres, and axisymmetric
//! spherical harmonics.

use std::f64::consts::PI;

/// Lebesgue measure of the unit ball in `R^n`.
///
/// Uses the recurrence `w_n = w_{n-2} * 2 pi / n` from `w_1 = 2`, `w_2 = pi`,
/// which is exact up to rounding for every dimension.
pub fn ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => ball_volume(n - 2) * 2.0 * PI / f64::from(n),
    }
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`, i.e. `n w_n`.
pub fn sphere_area(n: u32) -> f64 {
    f64::from(n) * ball_volume(n)
}

/// Gegenbauer polynomial `C_d^{(lambda)}(x)` by the three-term recurrence.
pub fn gegenbauer(d: u32, lambda: f64, x: f64) -> f64 {
    if d == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * x;
    for n in 2..=d {
        let n = f64::from(n);
        let next = (2.0 * x * (n + lambda - 1.0) * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
        prev = cur;
        cur = next;
    }
    cur
}
