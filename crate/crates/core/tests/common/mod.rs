#![allow(dead_code)]

use isoweight::geometry::{AngularGrid, StarShape};
use isoweight::rearrange::SampledFunction;
use isoweight::regime::{classify, Certificate, Params, Verdict};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random standard-orientation params with `N` in `2..=6`.
pub fn random_params(rng: &mut ChaCha8Rng) -> Params {
    loop {
        let dim = rng.gen_range(2..=6);
        let n = f64::from(dim);
        let k = rng.gen_range(-(n - 1.0) + 0.05..4.0);
        let l = rng.gen_range(-n + 0.05..5.0);
        if let Ok(p) = Params::standard(k, l, dim) {
            return p;
        }
    }
}

pub fn is_certified(p: &Params) -> bool {
    let r = classify(p);
    r.verdict == Verdict::RadialOptimal
        && matches!(
            r.certifying_condition,
            Some(Certificate::I | Certificate::Ii | Certificate::Iii | Certificate::Iv)
        )
}

pub fn random_certified_params(rng: &mut ChaCha8Rng) -> Params {
    loop {
        let p = random_params(rng);
        if is_certified(&p) {
            return p;
        }
    }
}

/// One fixture per sufficient condition.
pub fn certified_fixtures() -> Vec<Params> {
    vec![
        Params::standard(1.5, 0.2, 2).unwrap(),
        Params::standard(-0.3, -0.8, 2).unwrap(),
        Params::standard(0.5, 0.0, 3).unwrap(),
        Params::standard(0.2, -0.5, 2).unwrap(),
    ]
}

/// `m = exp(sum c_j phi_j)` with small random smooth coefficients.
pub fn random_shape(rng: &mut ChaCha8Rng, dim: u32, n: usize, amplitude: f64) -> StarShape {
    let c: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-amplitude..amplitude), rng.gen_range(-amplitude..amplitude)))
        .collect();
    let scale = rng.gen_range(0.5..2.0_f64);
    StarShape::from_fn(dim, n, move |t| {
        let s: f64 = c
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let j = (j + 1) as f64;
                if dim == 2 {
                    a * (j * t).cos() + b * (j * t).sin()
                } else {
                    a * (j * t).cos()
                }
            })
            .sum();
        scale * s.exp()
    })
    .unwrap()
}

/// Nonnegative function supported in the unit ball: a shifted bump with an
/// angular modulation.
pub fn random_function(rng: &mut ChaCha8Rng, dim: u32, nr: usize, nt: usize) -> SampledFunction {
    let radial = SampledFunction::uniform_radial(1.0, nr);
    let nt = if dim == 2 { nt } else { nt | 1 };
    let angular = AngularGrid::new(dim, nt).unwrap();
    let shift = rng.gen_range(0.0..0.3);
    let width = rng.gen_range(0.3..0.8);
    let wobble = rng.gen_range(0.0..0.3);
    let order = rng.gen_range(1..=3) as f64;
    SampledFunction::from_fn(radial, angular, move |r, t| {
        let x = r * t.cos() - shift;
        let y = r * t.sin();
        let d2 = (x * x + y * y) / (width * width);
        let cutoff = (1.0 - r * r).max(0.0);
        cutoff * (-d2).exp() * (1.0 + wobble * r * (order * t).cos())
    })
    .unwrap()
}
