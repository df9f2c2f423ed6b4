//! Self-check suites behind `squeeze verify`.
//!
//! Every check compares the library against an independent route: direct
//! closed-form arithmetic, brute-force circle sampling, or the defining
//! inequalities. Random inputs come from a seeded ChaCha generator.

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{PlanarFactor, ProductDomain, ProductPoint};
use crate::embeddings::{product_inradius, ProductMap};
use crate::error::{Error, Result};
use crate::hyperbolic::{mobius_circle_min_modulus, poincare_distance, sigma, sigma_inv, MobiusAut};
use crate::search::{search_lower_bound, FamilySpec, SearchOptions};
use crate::squeezing::{
    annulus_clearance_lower_bound, ball_product_check, boundary_limit_profile, exact_t, hhr_flag, log_spaced_path,
    puncture_upper_bound, Side,
};

pub const SUITES: &[&str] = &["hyperbolic", "pinch", "mixed", "annulus", "limit", "balls", "oracle", "hhr", "gap"];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{status}\t{}\t{}\t{}", self.suite, self.name, self.detail)
    }
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check { suite, name, passed, detail }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?);
            }
            return Ok(all);
        }
        "hyperbolic" => hyperbolic(&mut rng),
        "pinch" => pinch(&mut rng),
        "mixed" => mixed(&mut rng),
        "annulus" => annulus(),
        "limit" => limit(),
        "balls" => balls(),
        "oracle" => oracle(&mut rng),
        "hhr" => hhr(),
        "gap" => gap(),
        other => return Err(Error::Parse(format!("unknown suite {other:?}; known: all, {}", SUITES.join(", ")))),
    };
    checks
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Area-uniform point with modulus below `max`.
fn random_in_disk(rng: &mut ChaCha8Rng, max: f64) -> C64 {
    let r = max * rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen_range(0.0..TAU))
}

/// Point with modulus in `(lo, hi)`.
fn random_in_ring(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    let r = rng.gen_range(lo..hi).max(lo + f64::EPSILON);
    C64::from_polar(r, rng.gen_range(0.0..TAU))
}

fn punctured0() -> PlanarFactor {
    PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).expect("valid factor")
}

fn hyperbolic(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for k in 0..=20_000 {
        let t = 20.0 * k as f64 / 20_000.0;
        worst = worst.max((sigma(sigma_inv(t)?)?.get() - t).abs());
    }
    let mut worst_inv: f64 = 0.0;
    for k in 0..=10_000 {
        let x = 0.999_999 * k as f64 / 10_000.0;
        worst_inv = worst_inv.max((sigma_inv(sigma(x)?.get())?.value() - x).abs());
    }
    let mut worst_inv_dist: f64 = 0.0;
    for _ in 0..10_000 {
        let m = MobiusAut::new(random_in_disk(rng, 0.9), rng.gen_range(-3.2..3.2))?;
        let a = random_in_disk(rng, 0.99);
        let b = random_in_disk(rng, 0.99);
        let d0 = poincare_distance(a, b)?.get();
        let d1 = poincare_distance(m.eval(a), m.eval(b))?.get();
        worst_inv_dist = worst_inv_dist.max((d0 - d1).abs());
    }
    Ok(vec![
        check("hyperbolic", "sigma_of_sigma_inv", worst <= 1e-12, format!("max_err={worst:e} on [0,20]")),
        check("hyperbolic", "sigma_inv_of_sigma", worst_inv <= 1e-12, format!("max_err={worst_inv:e}")),
        check(
            "hyperbolic",
            "mobius_invariance",
            worst_inv_dist <= 1e-12,
            format!("max_err={worst_inv_dist:e} over 10000 triples"),
        ),
    ])
}

fn pinch(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut worst_upper: f64 = 0.0;
    let mut worst_search: f64 = f64::INFINITY;
    let opts = SearchOptions { final_samples: 0, ..SearchOptions::default() };
    for n in [2, 3] {
        let d = ProductDomain::planar(vec![punctured0(); n])?;
        let fam = FamilySpec::standard(&d);
        for _ in 0..100 {
            let zs: Vec<C64> = (0..n).map(|_| random_in_ring(rng, 1e-3, 0.999)).collect();
            let z = ProductPoint::planar(&d, &zs)?;
            let target = zs.iter().map(|z| z.norm()).fold(1.0, f64::min);
            worst_upper = worst_upper.max((puncture_upper_bound(&d, &z)? - target).abs());
            let res = search_lower_bound(&d, &z, &fam, &opts)?;
            worst_search = worst_search.min(res.value - target);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        check("pinch", "upper_equals_min_modulus", worst_upper <= 1e-12, format!("max_err={worst_upper:e}")),
        check("pinch", "search_reaches_min_modulus", worst_search >= -1e-6, format!("min(search-target)={worst_search:e}")),
        check("pinch", "runtime", secs <= 10.0, format!("{secs:.3}s")),
    ])
}

fn mixed(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let d = ProductDomain::planar(vec![PlanarFactor::unit_disk(), punctured0()])?;
    let (mut e_exact, mut e_upper, mut e_wit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let zs = [random_in_disk(rng, 0.999), random_in_ring(rng, 1e-3, 0.999)];
        let z = ProductPoint::planar(&d, &zs)?;
        let target = zs[1].norm();
        e_exact = e_exact.max((exact_t(&d, &z)?.exact.unwrap_or(f64::NAN) - target).abs());
        e_upper = e_upper.max((puncture_upper_bound(&d, &z)? - target).abs());
        let w = ProductMap::mobius_to_zero(&zs)?;
        e_wit = e_wit.max((product_inradius(&w, &d, &z, 65_536)? - target).abs());
    }
    Ok(vec![
        check("mixed", "exact_is_second_modulus", e_exact <= 1e-12, format!("max_err={e_exact:e}")),
        check("mixed", "upper_matches", e_upper <= 1e-12, format!("max_err={e_upper:e}")),
        check("mixed", "witness_inradius", e_wit <= 1e-4, format!("max_err={e_wit:e} at 65536 samples")),
    ])
}

fn annulus() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for r in [0.04, 0.25, 0.64] {
        let d = ProductDomain::planar(vec![PlanarFactor::annulus(r)?, PlanarFactor::unit_disk()])?;
        let (mut e_formula, mut worst_clear, mut grid_min): (f64, f64, f64) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
        let n = 1001;
        for k in 1..=n {
            let m = r.powf(1.0 - k as f64 / (n + 1) as f64);
            let z = ProductPoint::planar(&d, &[c(m, 0.0), c(0.0, 0.0)])?;
            let e = exact_t(&d, &z)?.exact.unwrap_or(f64::NAN);
            let piecewise = if m <= r.sqrt() { r / m } else { m };
            e_formula = e_formula.max((e - piecewise).abs());
            worst_clear = worst_clear.max(annulus_clearance_lower_bound(r, c(m, 0.0))? - e);
            grid_min = grid_min.min(e);
        }
        let s = r.sqrt();
        let branch = (r / s - s).abs();
        out.push(check("annulus", "piecewise_formula", e_formula <= 1e-15, format!("r={r} max_err={e_formula:e}")));
        out.push(check("annulus", "branches_meet", branch <= 1e-12, format!("r={r} diff={branch:e}")));
        out.push(check("annulus", "clearance_below_exact", worst_clear <= 1e-12, format!("r={r} max_excess={worst_clear:e}")));
        out.push(check("annulus", "grid_minimum", (grid_min - s).abs() <= 1e-6, format!("r={r} min={grid_min} sqrt_r={s}")));
    }
    Ok(out)
}

fn nondecreasing_after_min(bounds: &[f64]) -> bool {
    let k = bounds
        .iter()
        .enumerate()
        .fold(0, |best, (i, &b)| if b < bounds[best] { i } else { best });
    bounds[k..].windows(2).all(|w| w[1] >= w[0])
}

fn limit() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (side, name) in [(Side::Outer, "outer"), (Side::Inner, "inner")] {
        let path = log_spaced_path(0.25, side, 256)?;
        let prof = boundary_limit_profile(0.25, &path)?;
        let bounds: Vec<f64> = prof.entries.iter().map(|e| e.bound).collect();
        let last = *bounds.last().unwrap_or(&f64::NAN);
        out.push(check("limit", if name == "outer" { "outer_final" } else { "inner_final" }, last >= 1.0 - 2e-3, format!("final={last}")));
        out.push(check(
            "limit",
            if name == "outer" { "outer_monotone" } else { "inner_monotone" },
            nondecreasing_after_min(&bounds),
            format!("{} steps", bounds.len()),
        ));
    }
    Ok(out)
}

fn balls() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 2..=5usize {
        let e = ball_product_check(n)?;
        let err = (e.s - 1.0 / (n as f64).sqrt()).abs();
        out.push(check("balls", "s_value", err <= 1e-15, format!("n={n} err={err:e}")));
        let (m1, m2) = (e.first_margin(), e.second_margin());
        let ok = if n == 2 { m1 >= 0.41 && m2 >= 0.35 } else { m1 > 0.0 && m2 > 0.0 };
        out.push(check("balls", "contradictions", ok, format!("n={n} margins={m1:.6},{m2:.6}")));
    }
    Ok(out)
}

fn oracle(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let samples = 65_536;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = random_in_disk(rng, 0.95);
        let r = rng.gen_range(0.01..0.99);
        let m = MobiusAut::vanishing_at(a)?;
        let brute = (0..samples)
            .map(|k| m.eval(C64::from_polar(r, TAU * k as f64 / samples as f64)).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((brute - mobius_circle_min_modulus(a, r)?).abs());
    }
    Ok(vec![check("oracle", "circle_min_modulus", worst <= 1e-4, format!("max_err={worst:e} over 1000 pairs"))])
}

fn hhr() -> Result<Vec<Check>> {
    let d = ProductDomain::planar(vec![punctured0(), punctured0()])?;
    let z = ProductPoint::planar(&d, &[c(1e-4, 0.0), c(0.5, 0.0)])?;
    let e = exact_t(&d, &z)?.exact.unwrap_or(f64::NAN);
    let poly = ProductDomain::planar(vec![PlanarFactor::unit_disk(); 2])?;
    let ann = ProductDomain::planar(vec![PlanarFactor::annulus(0.25)?, PlanarFactor::unit_disk()])?;
    Ok(vec![
        check("hhr", "exact_near_puncture", (e - 1e-4).abs() <= 1e-18, format!("T={e:e}")),
        check("hhr", "punctured_flagged", hhr_flag(&d), String::new()),
        check("hhr", "polydisk_not_flagged", !hhr_flag(&poly), String::new()),
        check("hhr", "annulus_not_flagged", !hhr_flag(&ann), String::new()),
    ])
}

fn gap() -> Result<Vec<Check>> {
    let (r, m) = (0.25, 0.5);
    let d = ProductDomain::planar(vec![PlanarFactor::annulus(r)?])?;
    let z = ProductPoint::planar(&d, &[c(m, 0.0)])?;
    // both orientations, by hand
    let outer = (m - r) / (1.0 - r * m);
    let w = r / m;
    let reflected = (w - r).abs() / (1.0 - r * w);
    let oracle = outer.max(reflected);
    let res = search_lower_bound(&d, &z, &FamilySpec::standard(&d), &SearchOptions::default())?;
    let exact = exact_t(&d, &z)?.exact.unwrap_or(f64::NAN);
    Ok(vec![
        check("gap", "matches_orientation_oracle", (res.value - oracle).abs() <= 1e-12, format!("search={} oracle={oracle}", res.value)),
        check("gap", "below_exact", exact - res.value >= 0.05, format!("exact={exact} search={}", res.value)),
        check("gap", "gap_reported", res.gap.is_some_and(|g| g >= 0.05), format!("gap={:?}", res.gap)),
    ])
}
