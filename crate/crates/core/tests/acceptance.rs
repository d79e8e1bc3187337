//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use isoweight::functionals::{ckn_radial_infimum, eigenvalue_radial, CknSearch, UPPER_BOUND_LABEL};
use isoweight::geometry::{
    invert_shape, offset_ball_ratio, ratio, ratio_inverted, OffsetBall, StarShape,
};
use isoweight::quadrature::GaussLegendre;
use isoweight::rearrange::{
    hardy_littlewood_check, polya_szego_check, radial_hat_masses, schwarz_symmetrize, symmetrized_samples,
};
use isoweight::regime::{c_rad, ckn_thresholds, classify, l_one, l_upper, CknParams, Params, Verdict};
use isoweight::sphere::sphere_area;
use isoweight::variation::{
    finite_difference_variation_check, minimize_ratio, second_variation, solve_1d, MinimizeOptions,
    ModeKind, PerturbationMode,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn constant_reproduction() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = common::random_certified_params(&mut rng);
        let radius = rng.gen_range(0.2..5.0);
        let ball = StarShape::ball(p.dim, radius).map_err(|e| e.to_string())?;
        let got = ratio(&ball, &p).map_err(|e| e.to_string())?;
        worst = worst.max(rel(got, c_rad(&p).unwrap()));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let disk = ratio(&StarShape::ball(2, 1.0).unwrap(), &Params::standard(0.0, 0.0, 2).unwrap()).unwrap();
    let sphere = ratio(&StarShape::ball(3, 1.0).unwrap(), &Params::standard(0.0, 0.0, 3).unwrap()).unwrap();
    let classical = rel(disk, 2.0 * PI.sqrt()).max(rel(sphere, (36.0 * PI).cbrt()));
    let msg = format!("max rel err {worst:.1e}, classical {classical:.1e}, {elapsed:.2}s");
    if worst < 1e-8 && classical < 1e-10 && elapsed < 5.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn second_variation_exactness() -> Outcome {
    let mut rng = common::rng(2);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 100 {
        let dim = rng.gen_range(2..=3);
        let n = f64::from(dim);
        let k = rng.gen_range(-(n - 1.0) + 0.3..2.5);
        let l = rng.gen_range(-n + 0.3..3.0);
        let Ok(p) = Params::standard(k, l, dim) else { continue };
        let j = rng.gen_range(1..=3);
        let kind = if dim == 2 { ModeKind::Cos { n: j } } else { ModeKind::Zonal { degree: j } };
        let mode = PerturbationMode::new(dim, kind).map_err(|e| e.to_string())?;
        let check = finite_difference_variation_check(&p, &mode, 1e-3, 1e-4)
            .map_err(|e| format!("({k}, {l}, {dim}) mode {j}: {e}"))?;
        worst = worst.max((check.second_fd - check.second_exact).abs() / (1.0 + check.second_exact.abs()));
        checked += 1;
    }
    let mut discrepancies = 0;
    for _ in 0..10_000 {
        let p = common::random_params(&mut rng);
        let mode = PerturbationMode::first(p.dim).unwrap();
        let negative = second_variation(&p, &mode).unwrap() < 0.0;
        let report = classify(&p);
        if negative != report.first_mode_unstable
            || (report.verdict == Verdict::SymmetryBroken && !negative)
            || (report.verdict == Verdict::RadialOptimal && negative)
        {
            discrepancies += 1;
        }
    }
    let msg = format!("max rel err {worst:.1e} on 100 cases, {discrepancies} sign discrepancies in 10^4");
    if worst < 1e-4 && discrepancies == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn symmetry_breaking_exhibited() -> Outcome {
    let start = Instant::now();
    let opts = MinimizeOptions::default();
    let broken = Params::standard(0.0, 2.0, 2).unwrap();
    let b = minimize_ratio(&broken, &opts).map_err(|e| e.to_string())?;
    let certified = Params::standard(0.0, -0.5, 2).unwrap();
    let c = minimize_ratio(&certified, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let msg = format!(
        "(0,2,2) value/c_rad = {:.4}; (0,-0.5,2) rel gap {:.1e}; {elapsed:.1}s",
        b.value / b.c_rad,
        c.gap.abs()
    );
    if b.value <= 0.99 * b.c_rad && c.gap.abs() < 1e-6 && elapsed < 60.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn zero_infimum_exhibited() -> Outcome {
    let p = Params::standard(1.0, 4.0, 2).unwrap();
    let ts = [4.0, 8.0, 16.0, 32.0];
    let mut values = Vec::new();
    for t in ts {
        let ball = OffsetBall::new(2, 1.0, t).map_err(|e| e.to_string())?;
        values.push(offset_ball_ratio(&ball, &p).map_err(|e| e.to_string())?.ratio);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let msg = format!("ratios {values:.4?}, log-log slope {slope:.4}");
    if decreasing && (slope + 1.0 / 3.0).abs() <= 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn one_dimensional_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut improvement: f64 = f64::NEG_INFINITY;
    let mut rng = common::rng(5);
    for _ in 0..20 {
        let l = rng.gen_range(-0.9..3.0);
        let k = rng.gen_range(0.05..(l + 1.0));
        let p = Params::standard(k, l, 1).unwrap();
        let s = solve_1d(&p).map_err(|e| e.to_string())?;
        worst = worst.max(rel(s.value, (l + 1.0).powf(k / (l + 1.0))));
        improvement = improvement.max(s.value - s.brute_force_min);
        if s.brute_force_candidates < 9_000 {
            return Err(format!("only {} brute-force candidates", s.brute_force_candidates));
        }
    }
    let msg = format!("max rel err {worst:.1e}, max brute-force improvement {improvement:.1e}");
    if worst < 1e-12 && improvement <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn inversion_identity() -> Outcome {
    let mut rng = common::rng(6);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let p = common::random_params(&mut rng);
        let p = Params::standard(p.k.min(3.0), p.l, dim).unwrap_or(Params::standard(0.5, 0.5, dim).unwrap());
        let n = isoweight::geometry::default_grid_size(dim);
        let shape = common::random_shape(&mut rng, dim, n, 0.15);
        let direct = ratio(&shape, &p).map_err(|e| e.to_string())?;
        let dual = ratio_inverted(&invert_shape(&shape), &p.inversion_dual()).map_err(|e| e.to_string())?;
        worst = worst.max(rel(dual, direct));
    }
    let msg = format!("max rel diff {worst:.1e} on 50 shapes");
    if worst < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rearrangement_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(7);
    // equimeasurability
    let mut equi_violations = 0;
    for _ in 0..20 {
        let dim = rng.gen_range(2..=3);
        let l = rng.gen_range(-1.5..2.0);
        let f = common::random_function(&mut rng, dim, 41, 32);
        let star = schwarz_symmetrize(&f, l).map_err(|e| e.to_string())?;
        let resampled = symmetrized_samples(&f, l).map_err(|e| e.to_string())?;
        // the resampled profile is constant on radial shells, so one cell is one shell
        let sphere: f64 = f.angular().weights().iter().sum();
        let cell = radial_hat_masses(f.radial(), l + f64::from(dim) - 1.0).into_iter().fold(0.0, f64::max) * sphere;
        for j in 1..10 {
            let t = f.values().iter().copied().fold(0.0, f64::max) * f64::from(j) / 10.0;
            let d = f.distribution(l, t).unwrap();
            if (star.distribution(t) - d).abs() > 1e-10 * d.max(1.0) {
                equi_violations += 1;
            }
            if (resampled.distribution(l, t).unwrap() - d).abs() > cell {
                equi_violations += 1;
            }
        }
    }
    // Hardy-Littlewood
    let mut hl_violations = 0;
    for _ in 0..500 {
        let dim = rng.gen_range(2..=3);
        let l = rng.gen_range(-1.5..2.0);
        let u = common::random_function(&mut rng, dim, 21, 16);
        let v = common::random_function(&mut rng, dim, 21, 16);
        let c = hardy_littlewood_check(&u, &v, l).map_err(|e| e.to_string())?;
        if c.lhs > c.rhs * (1.0 + 1e-12) {
            hl_violations += 1;
        }
    }
    // Polya-Szego
    let mut ps_violations = 0;
    let mut ps_checks = 0;
    for params in common::certified_fixtures() {
        for _ in 0..20 {
            let f = common::random_function(&mut rng, params.dim, 81, 64);
            for p in [1.0, 2.0, 3.0] {
                ps_checks += 1;
                if polya_szego_check(&f, &params, p).is_err() {
                    ps_violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let msg = format!(
        "equimeasurability violations {equi_violations}, Hardy-Littlewood {hl_violations}/500, Polya-Szego {ps_violations}/{ps_checks}, {elapsed:.1}s"
    );
    if equi_violations + hl_violations + ps_violations == 0 && elapsed < 120.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn threshold_algebra() -> Outcome {
    let mut rng = common::rng(8);
    let mut violations = 0;
    let mut tuples = 0;
    while tuples < 1000 {
        let dim = rng.gen_range(2..=6);
        let n = f64::from(dim);
        let p = rng.gen_range(1.05..(n + 2.0));
        let upper = if p < n { n * p / (n - p) } else { 4.0 * p + 4.0 };
        let q = rng.gen_range(p..upper);
        let Ok(t) = ckn_thresholds(p, q, dim) else { continue };
        tuples += 1;
        let mut ok = t.a1 < t.a2 && t.a2 < 1.0;
        if let Some(a3) = t.a3 {
            ok &= t.a2 < a3;
        }
        if let Some(a4) = t.a4 {
            ok &= t.a2 < a4;
        }
        ok &= (dim >= 3) == t.a3.is_some();
        let k = rng.gen_range(0.0..4.0);
        ok &= l_one(k, dim).unwrap() <= l_upper(k, dim).unwrap() + 1e-12;
        if !ok {
            violations += 1;
        }
    }
    let t = ckn_thresholds(2.0, 4.0, 3).map_err(|e| e.to_string())?;
    let fixture = [
        (t.a1, 1.0 / 6.0),
        (t.a2, 0.25),
        (t.a3.unwrap_or(f64::NAN), a3_oracle(2.0, 4.0, 3)),
        (t.a_star, a_star_oracle(2.0, 4.0, 3)),
    ];
    let fixture_err = fixture.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let msg = format!(
        "{violations} ordering violations in 1000 tuples; fixture (2,4,3) a1={:.6} a2={:.6} a3={:.5} a*={:.5}, max err {fixture_err:.1e}",
        t.a1,
        t.a2,
        t.a3.unwrap_or(f64::NAN),
        t.a_star
    );
    if violations == 0 && fixture_err < 1e-9 && (fixture[2].1 - 0.26980).abs() < 1e-5 && (fixture[3].1 - 0.31650).abs() < 1e-5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `(N/p - 1 + a3)^2 = (N-1)^2 / (N (1/p - 1/q) (1 - q/p + q)^2)`, solved in closed form.
fn a3_oracle(p: f64, q: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    let rhs = (n - 1.0).powi(2) / (n * (1.0 / p - 1.0 / q) * (1.0 - q / p + q).powi(2));
    rhs.sqrt() - n / p + 1.0
}

/// `(N/p - 1 + a*)^2 = (N-1) (1/(q-p) - 1/(q+p'))`, solved in closed form.
fn a_star_oracle(p: f64, q: f64, dim: u32) -> f64 {
    let n = f64::from(dim);
    let pc = p / (p - 1.0);
    ((n - 1.0) * (1.0 / (q - p) - 1.0 / (q + pc))).sqrt() - n / p + 1.0
}

fn eigenvalue_scaling() -> Outcome {
    let e = eigenvalue_radial(2.0, 0.0, 1.0, 3, 2000).map_err(|e| e.to_string())?;
    let err = rel(e.lambda, PI * PI);
    let mut scaling: f64 = 0.0;
    for (beta, p) in [(0.0, 2.0), (0.5, 2.0), (0.4, 1.5)] {
        let base = eigenvalue_radial(p, beta, 1.0, 3, 400).map_err(|e| e.to_string())?.lambda;
        for radius in [2.0, 4.0_f64] {
            let v = eigenvalue_radial(p, beta, radius, 3, 400).map_err(|e| e.to_string())?.lambda;
            scaling = scaling.max(rel(v, base * radius.powf(beta * p - p)));
        }
    }
    let msg = format!("lambda(B1) = {:.6} (rel err {err:.1e}), scaling law max rel err {scaling:.1e}", e.lambda);
    if err < 1e-3 && scaling < 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Energy of the bubble `(1 + r^2)^{-1/2}` in `R^3`, integrated in `r = tan s`.
fn sobolev_bubble_oracle() -> f64 {
    let gl = GaussLegendre::new(64);
    let area = sphere_area(3);
    let grad = gl.integrate_composite(0.0, PI / 2.0, 32, |s| {
        let r = s.tan();
        let dr = 1.0 / s.cos().powi(2);
        let du = r * (1.0 + r * r).powf(-1.5);
        du * du * r * r * dr
    });
    let mass = gl.integrate_composite(0.0, PI / 2.0, 32, |s| {
        let r = s.tan();
        let dr = 1.0 / s.cos().powi(2);
        (1.0 + r * r).powf(-3.0) * r * r * dr
    });
    area * grad / (area * mass).powf(1.0 / 3.0)
}

fn ckn_radial_estimate() -> Outcome {
    let ckn = CknParams::new(0.0, 2.0, 6.0, 3).map_err(|e| e.to_string())?;
    let mut values = Vec::new();
    let mut labels_ok = true;
    let mut monotone_history = true;
    for nodes in [101, 201, 401] {
        let est = ckn_radial_infimum(&ckn, &CknSearch { nodes, ..CknSearch::default() }).map_err(|e| e.to_string())?;
        labels_ok &= est.label == UPPER_BOUND_LABEL;
        monotone_history &= est.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14));
        values.push(est.value);
    }
    let oracle = sobolev_bubble_oracle();
    let refinement_monotone = values.windows(2).all(|w| w[1] <= w[0]);
    let err = rel(values[2], oracle);
    let msg = format!("estimates {values:.5?} vs oracle {oracle:.5} (rel {err:.1e}), label \"{UPPER_BOUND_LABEL}\"");
    if refinement_monotone && monotone_history && labels_ok && err < 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 constant reproduction", constant_reproduction),
        ("2 second-variation exactness", second_variation_exactness),
        ("3 symmetry breaking exhibited", symmetry_breaking_exhibited),
        ("4 zero infimum exhibited", zero_infimum_exhibited),
        ("5 one-dimensional exactness", one_dimensional_exactness),
        ("6 inversion identity", inversion_identity),
        ("7 rearrangement suite", rearrangement_suite),
        ("8 threshold algebra", threshold_algebra),
        ("9 eigenvalue scaling", eigenvalue_scaling),
        ("10 CKN radial estimate", ckn_radial_estimate),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
