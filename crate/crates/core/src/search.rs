//! Lower bounds for `T` from explicit embedding families.
//!
//! Each planar factor gets a one-parameter family `[pre, Möbius(s·u), normalizer]`
//! where `pre` is the inclusion or the annulus reflection, `u` is the direction
//! of the pre-image of the base point and `normalizer` sends the image of the
//! base point to 0. Every member is an embedding with `f(z) = 0`, so each
//! scored value is a lower bound for `T(z)`. Factors are optimized
//! independently because the product inradius is the minimum of the factor
//! inradii.

use num_complex::Complex64 as C64;

use crate::domains::{FactorKind, PlanarFactor, ProductDomain, ProductPoint};
use crate::embeddings::{image_inradius_analytic, image_inradius_at_zero, product_inradius, MapExpr, Primitive, ProductMap};
use crate::error::{Error, Result};
use crate::hyperbolic::MobiusAut;
use crate::squeezing::exact_t;

/// Shortfall below the closed form that counts as a family gap.
pub const GAP_TOL: f64 = 1e-6;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub seeds: usize,
    pub iterations: usize,
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { seeds: 64, iterations: 60, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub argmax: f64,
    pub max: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximizes `objective` on `[lo, hi]`: a uniform grid of seeds, then golden
/// section inside the bracket around the best seed. Ties keep the lowest
/// parameter; NaN counts as `-inf`.
pub fn optimize_1d<F>(mut objective: F, lo: f64, hi: f64, opts: &OptimizeOptions) -> Result<Optimum>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::EmptyInterval { lo, hi });
    }
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        let v = objective(x);
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    };
    if lo == hi {
        let max = eval(lo);
        return Ok(Optimum { argmax: lo, max, evaluations: 1, converged: true });
    }

    let n = opts.seeds.max(2);
    let grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
    let mut k_best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[k_best] {
            k_best = k;
        }
    }
    let (mut best_x, mut best_v) = (grid[k_best], values[k_best]);

    let mut a = grid[k_best.saturating_sub(1)];
    let mut b = grid[(k_best + 1).min(n - 1)];
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut converged = b - a <= opts.tol;
    for _ in 0..opts.iterations {
        if b - a <= opts.tol {
            converged = true;
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2);
        }
    }
    converged |= b - a <= opts.tol;
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best_v {
            best_x = x;
            best_v = v;
        }
    }
    Ok(Optimum { argmax: best_x, max: best_v, evaluations, converged })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorFamily {
    MobiusOfInclusion,
    /// Only on the annulus with this inner radius.
    MobiusOfReflection(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    /// Orientations tried on each factor, in order of preference.
    factors: Vec<Vec<FactorFamily>>,
    /// Range of `|a|` for the intermediate automorphism.
    range: (f64, f64),
}

pub const DEFAULT_RANGE: (f64, f64) = (0.0, 0.99);

impl FamilySpec {
    pub fn new(factors: Vec<Vec<FactorFamily>>, range: (f64, f64)) -> Result<Self> {
        if !(0.0 <= range.0 && range.0 <= range.1 && range.1 < 1.0) {
            return Err(Error::FamilyMismatch(format!("parameter range {range:?} not inside [0, 1)")));
        }
        Ok(FamilySpec { factors, range })
    }

    /// Inclusion on every factor, plus the reflected orientation on annuli.
    pub fn standard(d: &ProductDomain) -> Self {
        Self::build(d, true, true)
    }

    pub fn inclusion_only(d: &ProductDomain) -> Self {
        Self::build(d, true, false)
    }

    /// Reflected orientation on annuli, inclusion elsewhere.
    pub fn reflection_only(d: &ProductDomain) -> Self {
        Self::build(d, false, true)
    }

    fn build(d: &ProductDomain, inclusion: bool, reflection: bool) -> Self {
        let factors = d
            .factors()
            .iter()
            .map(|f| {
                let mut fam = Vec::new();
                let annulus = f.as_planar().and_then(|p| match p.kind() {
                    FactorKind::Annulus { r } => Some(*r),
                    _ => None,
                });
                if inclusion || annulus.is_none() {
                    fam.push(FactorFamily::MobiusOfInclusion);
                }
                if let (true, Some(r)) = (reflection, annulus) {
                    fam.push(FactorFamily::MobiusOfReflection(r));
                }
                fam
            })
            .collect();
        FamilySpec { factors, range: DEFAULT_RANGE }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        self = Self::new(self.factors, (lo, hi))?;
        Ok(self)
    }

    pub fn factors(&self) -> &[Vec<FactorFamily>] {
        &self.factors
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scoring {
    /// Closed-form circle and puncture images.
    Analytic,
    /// Boundary sampling with `SearchOptions::search_samples` points per circle.
    Sampled,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub optimize: OptimizeOptions,
    pub scoring: Scoring,
    pub search_samples: usize,
    /// Samples per circle for re-scoring the final witness; below 8 skips it.
    pub final_samples: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            optimize: OptimizeOptions::default(),
            scoring: Scoring::Analytic,
            search_samples: 4096,
            final_samples: 65_536,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub witness: ProductMap,
    pub evaluations: usize,
    pub converged: bool,
    /// Witness inradius by boundary sampling at `final_samples`.
    pub sampled_value: Option<f64>,
    /// `exact - value` when the domain has a closed form the family misses.
    pub gap: Option<f64>,
}

fn validate_family(f: &PlanarFactor, fam: FactorFamily) -> Result<()> {
    match (fam, f.kind()) {
        (FactorFamily::MobiusOfInclusion, _) => Ok(()),
        (FactorFamily::MobiusOfReflection(r), FactorKind::Annulus { r: ra }) if r == *ra => Ok(()),
        (FactorFamily::MobiusOfReflection(r), kind) => {
            Err(Error::FamilyMismatch(format!("reflection r/ζ with r = {r} does not apply to {kind:?}")))
        }
    }
}

/// Family member with intermediate zero `a`, normalized at `z`.
pub fn family_member(fam: FactorFamily, z: C64, a: C64) -> Result<MapExpr> {
    let pre = match fam {
        FactorFamily::MobiusOfInclusion => None,
        FactorFamily::MobiusOfReflection(r) => Some(Primitive::Reflection(r)),
    };
    let w = match pre {
        Some(p) => MapExpr::new(vec![p])?.eval(z)?,
        None => z,
    };
    let mid = MobiusAut::vanishing_at(a)?;
    let normalizer = MobiusAut::vanishing_at(mid.eval(w))?;
    let steps = pre.into_iter().chain([Primitive::Mobius(mid.then(&normalizer))]).collect();
    MapExpr::new(steps)
}

fn score(e: &MapExpr, f: &PlanarFactor, scoring: Scoring, samples: usize) -> Result<f64> {
    match scoring {
        Scoring::Analytic => image_inradius_analytic(e, f),
        Scoring::Sampled => image_inradius_at_zero(e, f, samples),
    }
}

/// Factor objective at intermediate zero `a`.
pub fn factor_objective(f: &PlanarFactor, z: C64, fam: FactorFamily, a: C64, scoring: Scoring, samples: usize) -> Result<f64> {
    validate_family(f, fam)?;
    score(&family_member(fam, z, a)?, f, scoring, samples)
}

fn direction(fam: FactorFamily, z: C64) -> C64 {
    let w = match fam {
        FactorFamily::MobiusOfInclusion => z,
        FactorFamily::MobiusOfReflection(r) => r / z,
    };
    if w.norm() == 0.0 { C64::new(1.0, 0.0) } else { w / w.norm() }
}

struct FactorBest {
    value: f64,
    map: MapExpr,
    evaluations: usize,
    converged: bool,
}

fn search_factor(f: &PlanarFactor, z: C64, families: &[FactorFamily], spec: &FamilySpec, opts: &SearchOptions) -> Result<FactorBest> {
    if families.is_empty() {
        return Err(Error::FamilyMismatch("no family given for a factor".into()));
    }
    let (lo, hi) = spec.range;
    let mut best: Option<FactorBest> = None;
    let mut evaluations = 0;
    let mut converged = true;
    for &fam in families {
        validate_family(f, fam)?;
        let u = direction(fam, z);
        let mut failure = None;
        let opt = optimize_1d(
            |s| match factor_objective(f, z, fam, u * s, opts.scoring, opts.search_samples) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            &opts.optimize,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        evaluations += opt.evaluations;
        converged &= opt.converged;
        if best.as_ref().is_none_or(|b| opt.max > b.value) {
            best = Some(FactorBest {
                value: opt.max,
                map: family_member(fam, z, u * opt.argmax)?,
                evaluations: 0,
                converged: true,
            });
        }
    }
    let mut best = best.expect("families is nonempty");
    best.evaluations = evaluations;
    best.converged = converged;
    Ok(best)
}

/// Best lower bound for `T(z)` over the family.
pub fn search_lower_bound(d: &ProductDomain, z: &ProductPoint, fam: &FamilySpec, opts: &SearchOptions) -> Result<SearchResult> {
    let factors = d
        .planar_factors()
        .ok_or_else(|| Error::FamilyMismatch("embedding families are only defined on planar factors".into()))?;
    if fam.factors.len() != factors.len() {
        return Err(Error::FamilyMismatch(format!("{} families for {} factors", fam.factors.len(), factors.len())));
    }
    let zs = z.planar_coords().ok_or_else(|| Error::domain("point has ball coordinates"))?;

    let mut value = f64::INFINITY;
    let mut maps = Vec::with_capacity(factors.len());
    let mut evaluations = 0;
    let mut converged = true;
    for ((f, &zi), families) in factors.iter().zip(&zs).zip(&fam.factors) {
        let fb = search_factor(f, zi, families, fam, opts)?;
        value = value.min(fb.value);
        evaluations += fb.evaluations;
        converged &= fb.converged;
        maps.push(fb.map);
    }
    let witness = ProductMap::new(maps);

    let sampled_value = if opts.final_samples >= 8 {
        Some(product_inradius(&witness, d, z, opts.final_samples)?)
    } else {
        None
    };
    if opts.scoring == Scoring::Sampled {
        if let Some(v) = sampled_value {
            value = v;
        }
    }

    let gap = match exact_t(d, z) {
        Ok(rep) => rep.exact.map(|e| e - value).filter(|&g| g > GAP_TOL),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(SearchResult { value, witness, evaluations, converged, sampled_value, gap })
}
