//! Closed forms, bounds and boundary behaviour of the polydisk squeezing function.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::domains::{Coord, Factor, FactorKind, PlanarFactor, ProductDomain, ProductPoint};
use crate::embeddings::ProductMap;
use crate::error::{Error, Result};
use crate::hyperbolic::{kob_filled, kob_upper_via_subdomain, mobius_circle_min_modulus, pseudo_hyperbolic, sigma};
use crate::search::{search_lower_bound, FamilySpec, SearchOptions};

/// Slack allowed when checking `lower <= exact <= upper` after floating-point evaluation.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    ClosedForm,
    /// Kobayashi distance to a puncture in the filled factor.
    PunctureUpper,
    /// Minimum of single-factor values.
    ProductLower,
    /// Poincaré clearance of the base point from the inner circle of an annulus.
    BoundaryLower,
    Search,
    /// The embedding family falls short of the closed form.
    FamilyGap,
}

impl MethodTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::ClosedForm => "closed_form",
            MethodTag::PunctureUpper => "puncture_upper",
            MethodTag::ProductLower => "product_lower",
            MethodTag::BoundaryLower => "boundary_lower",
            MethodTag::Search => "search",
            MethodTag::FamilyGap => "family_gap",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed_form" => MethodTag::ClosedForm,
            "puncture_upper" => MethodTag::PunctureUpper,
            "product_lower" => MethodTag::ProductLower,
            "boundary_lower" => MethodTag::BoundaryLower,
            "search" => MethodTag::Search,
            "family_gap" => MethodTag::FamilyGap,
            _ => return Err(Error::Parse(format!("unknown method tag {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub witnesses: Vec<ProductMap>,
    pub methods: Vec<MethodTag>,
    /// `exact - search value` when the search family falls short.
    pub family_gap: Option<f64>,
}

impl BoundReport {
    fn exact(value: f64, witnesses: Vec<ProductMap>) -> Self {
        BoundReport {
            lower: value,
            upper: value,
            exact: Some(value),
            witnesses,
            methods: vec![MethodTag::ClosedForm],
            family_gap: None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        let ordered = 0.0 <= self.lower && self.lower <= self.upper && self.upper <= 1.0;
        ordered && self.exact.is_none_or(|e| self.lower <= e && e <= self.upper)
    }
}

/// Known `T` of a single factor at a coordinate.
pub fn single_factor_t(f: &Factor, c: &Coord) -> Result<f64> {
    match (f, c) {
        (Factor::Ball(b), Coord::Ball(_)) => Ok(1.0 / (b.dim() as f64).sqrt()),
        (Factor::Planar(p), Coord::Planar(z)) => match p.kind() {
            FactorKind::UnitDisk => Ok(1.0),
            FactorKind::PuncturedDisk { punctures } if punctures.len() == 1 => {
                Ok(pseudo_hyperbolic(punctures[0], *z)?.value())
            }
            FactorKind::PuncturedDisk { punctures } => Err(Error::Unsupported(format!(
                "no closed form for a disk with {} punctures",
                punctures.len()
            ))),
            FactorKind::Annulus { r } => annulus_t(*r, z.norm()),
        },
        _ => Err(Error::domain("coordinate does not match factor")),
    }
}

/// `max(|z|, r/|z|)`: equals `r/|z|` for `|z| <= sqrt(r)` and `|z|` above.
fn annulus_t(r: f64, m: f64) -> Result<f64> {
    if !(r < m && m < 1.0) {
        return Err(Error::domain(format!("|z| = {m} is not in the annulus ({r}, 1)")));
    }
    Ok(m.max(r / m))
}

/// Index and inner radius of the annulus when `d` is `A_r`, `A_r × D` or `D × A_r`.
fn annulus_shape(d: &ProductDomain) -> Option<(usize, f64)> {
    let planar = d.planar_factors()?;
    let annuli: Vec<(usize, f64)> = planar
        .iter()
        .enumerate()
        .filter_map(|(i, f)| match f.kind() {
            FactorKind::Annulus { r } => Some((i, *r)),
            _ => None,
        })
        .collect();
    let disks = planar.iter().filter(|f| matches!(f.kind(), FactorKind::UnitDisk)).count();
    match (annuli.as_slice(), planar.len()) {
        ([a], 1) => Some(*a),
        ([a], 2) if disks == 1 => Some(*a),
        _ => None,
    }
}

fn planar_coords(z: &ProductPoint) -> Result<Vec<C64>> {
    z.planar_coords().ok_or_else(|| Error::domain("point has ball coordinates"))
}

/// Closed-form `T` on the catalog: products of disks and once-punctured disks,
/// `A_r × D`, and a single ball.
pub fn exact_t(d: &ProductDomain, z: &ProductPoint) -> Result<BoundReport> {
    if let [Factor::Ball(b)] = d.factors() {
        return Ok(BoundReport::exact(1.0 / (b.dim() as f64).sqrt(), vec![]));
    }
    if let Some((i, r)) = annulus_shape(d) {
        let zs = planar_coords(z)?;
        return Ok(BoundReport::exact(annulus_t(r, zs[i].norm())?, vec![]));
    }
    let planar = d
        .planar_factors()
        .ok_or_else(|| Error::Unsupported("ball factors only have a closed form on their own".into()))?;
    let mut value = 1.0f64;
    for f in &planar {
        match f.kind() {
            FactorKind::UnitDisk => {}
            FactorKind::PuncturedDisk { punctures } if punctures.len() == 1 => {}
            _ => return Err(Error::Unsupported(format!("factor {:?} is outside the closed-form catalog", f.kind()))),
        }
    }
    let zs = planar_coords(z)?;
    for (f, &zi) in planar.iter().zip(&zs) {
        if let [p] = f.punctures() {
            value = value.min(pseudo_hyperbolic(*p, zi)?.value());
        }
    }
    // the automorphisms vanishing at the base point realize the value
    let witness = ProductMap::mobius_to_zero(&zs)?;
    Ok(BoundReport::exact(value, vec![witness]))
}

/// Upper bound `min σ⁻¹(K(z_i, p))` over every puncture `p` of every planar factor,
/// with `K` the Kobayashi distance of the factor with `p` filled in.
pub fn puncture_upper_bound(d: &ProductDomain, z: &ProductPoint) -> Result<f64> {
    let mut best: Option<f64> = None;
    let mut punctured = false;
    for (f, c) in d.factors().iter().zip(z.coords()) {
        let (Factor::Planar(pf), Coord::Planar(zi)) = (f, c) else { continue };
        let ps = pf.punctures();
        punctured |= !ps.is_empty();
        for (idx, &p) in ps.iter().enumerate() {
            let k = if ps.len() == 1 {
                kob_filled(pf, *zi, idx)
            } else {
                kob_upper_via_subdomain(pf, *zi, p)
            };
            match k {
                Ok(k) => {
                    let v = k.to_radius().value();
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
                Err(Error::UnsupportedGeometry(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    match best {
        Some(v) => Ok(v),
        None if punctured => Err(Error::Inapplicable("no puncture admits a subdomain estimate at this point".into())),
        None => Err(Error::Inapplicable("no factor has a puncture".into())),
    }
}

/// `min_i T_{Ω_i}(z_i)` over factors with a known single-factor value.
pub fn lower_bound_product(d: &ProductDomain, z: &ProductPoint) -> Result<f64> {
    d.factors()
        .iter()
        .zip(z.coords())
        .map(|(f, c)| single_factor_t(f, c))
        .try_fold(1.0f64, |acc, v| Ok(acc.min(v?)))
}

/// Lower bound for `T` on `A_r × D` from the Poincaré clearance of `z1` to the
/// inner boundary circle, in both orientations of the annulus.
pub fn annulus_clearance_lower_bound(r: f64, z1: C64) -> Result<f64> {
    let m = z1.norm();
    if !(r > 0.0 && r < 1.0) || !(r < m && m < 1.0) {
        return Err(Error::domain(format!("{z1} is not in the annulus A_{r}")));
    }
    // outer circle stays outer: clearance of z1 from |ζ| <= r
    let outer = sigma(mobius_circle_min_modulus(z1, r)?)?;
    // after ζ ↦ r/ζ the base point is r/z1
    let reflected = sigma(mobius_circle_min_modulus(C64::new(r / m, 0.0), r)?)?;
    Ok(outer.to_radius().value().max(reflected.to_radius().value()))
}

#[derive(Debug, Clone)]
pub struct BoundsOptions {
    /// Run the embedding search for a lower bound.
    pub search: bool,
    pub search_options: SearchOptions,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions { search: true, search_options: SearchOptions::default() }
    }
}

/// Every applicable bound, combined.
pub fn bounds(d: &ProductDomain, z: &ProductPoint, opts: &BoundsOptions) -> Result<BoundReport> {
    let mut methods = Vec::new();
    let mut witnesses = Vec::new();
    let mut lower = 0.0f64;
    let mut upper = 1.0f64;
    let mut family_gap = None;

    let exact = match exact_t(d, z) {
        Ok(rep) => {
            methods.push(MethodTag::ClosedForm);
            rep.exact
        }
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };

    match puncture_upper_bound(d, z) {
        Ok(v) => {
            upper = upper.min(v);
            methods.push(MethodTag::PunctureUpper);
        }
        Err(Error::Inapplicable(_)) => {}
        Err(e) => return Err(e),
    }

    match lower_bound_product(d, z) {
        Ok(v) => {
            lower = lower.max(v);
            methods.push(MethodTag::ProductLower);
        }
        Err(Error::Unsupported(_)) => {}
        Err(e) => return Err(e),
    }

    if let Some((i, r)) = annulus_shape(d) {
        if d.len() == 2 {
            let zs = planar_coords(z)?;
            lower = lower.max(annulus_clearance_lower_bound(r, zs[i])?);
            methods.push(MethodTag::BoundaryLower);
        }
    }

    if opts.search && d.planar_factors().is_some() {
        let fam = FamilySpec::standard(d);
        let res = search_lower_bound(d, z, &fam, &opts.search_options)?;
        lower = lower.max(res.value);
        methods.push(MethodTag::Search);
        if let Some(gap) = res.gap {
            family_gap = Some(gap);
            methods.push(MethodTag::FamilyGap);
        }
        witnesses.push(res.witness);
    }

    if lower > upper {
        if lower - upper > CONSISTENCY_TOL {
            return Err(Error::Inconsistent(format!("lower {lower} exceeds upper {upper}")));
        }
        lower = upper;
    }
    if let Some(e) = exact {
        if lower > e + CONSISTENCY_TOL || e > upper + CONSISTENCY_TOL {
            return Err(Error::Inconsistent(format!("exact {e} outside [{lower}, {upper}]")));
        }
        lower = lower.min(e);
        upper = upper.max(e);
    }
    Ok(BoundReport { lower, upper, exact, witnesses, methods, family_gap })
}

/// Outcome of comparing `S` and `T` on a product of `n` copies of the ball `B^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallProductEvidence {
    pub n: usize,
    /// `S = (Σ S_{B^n}^{-2})^{-1/2}` with `S_{B^n} ≡ 1`.
    pub s: f64,
    pub t_lower: f64,
    pub t_upper: f64,
    /// `T` forced by `S = T / n`; exceeds `t_upper`.
    pub t_if_s_is_t_over_n: f64,
    /// `T` forced by `T = S / n`; falls below `t_lower`.
    pub t_if_t_is_s_over_n: f64,
}

impl BallProductEvidence {
    /// Margin by which `S = T / n` is impossible.
    pub fn first_margin(&self) -> f64 {
        self.t_if_s_is_t_over_n - self.t_upper
    }

    /// Margin by which `T = S / n` is impossible.
    pub fn second_margin(&self) -> f64 {
        self.t_lower - self.t_if_t_is_s_over_n
    }

    pub fn both_refuted(&self) -> bool {
        self.first_margin() > 0.0 && self.second_margin() > 0.0
    }
}

pub fn ball_product_check(n: usize) -> Result<BallProductEvidence> {
    if n < 2 {
        return Err(Error::domain(format!("need n >= 2 copies of the ball, got {n}")));
    }
    let nf = n as f64;
    let s = (0..n).map(|_| 1.0f64.powi(-2)).sum::<f64>().powf(-0.5);
    let t_lower = 1.0 / nf.sqrt();
    Ok(BallProductEvidence {
        n,
        s,
        t_lower,
        t_upper: 1.0,
        t_if_s_is_t_over_n: nf * s,
        t_if_t_is_s_over_n: s / nf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEntry {
    pub param: f64,
    pub clearance: f64,
    pub exact: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitProfile {
    pub entries: Vec<LimitEntry>,
    pub target: f64,
}

/// Which boundary circle of the annulus a path approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Outer,
    Inner,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" => Ok(Side::Outer),
            "inner" => Ok(Side::Inner),
            _ => Err(Error::Parse(format!("side must be outer or inner, got {s:?}"))),
        }
    }
}

/// `|z1|` values approaching one boundary circle of `A_r` with log-spaced
/// distances, from the midpoint of `(r, 1)` down to `1e-4` (outer) or
/// `1e-4 (1 - r)` (inner).
pub fn log_spaced_path(r: f64, side: Side, steps: usize) -> Result<Vec<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("annulus inner radius must lie in (0, 1), got {r}")));
    }
    if steps == 0 {
        return Err(Error::domain("need at least one step"));
    }
    let start = 0.5 * (1.0 - r);
    let end = match side {
        Side::Outer => 1e-4,
        Side::Inner => 1e-4 * (1.0 - r),
    };
    let ratio = end / start;
    let path = (0..steps)
        .map(|k| {
            let s = if steps == 1 { 1.0 } else { k as f64 / (steps - 1) as f64 };
            let delta = start * ratio.powf(s);
            match side {
                Side::Outer => 1.0 - delta,
                Side::Inner => r + delta,
            }
        })
        .collect();
    Ok(path)
}

/// Pairs each `|z1|` on the path with the best available lower bound of `T` on `A_r × D`.
pub fn boundary_limit_profile(r: f64, path: &[f64]) -> Result<LimitProfile> {
    if path.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("path parameters must be strictly monotone"));
    }
    let up = path.windows(2).all(|w| w[0] < w[1]);
    let down = path.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(Error::domain("path parameters must be strictly monotone"));
    }
    let entries = path
        .iter()
        .map(|&m| {
            let clearance = annulus_clearance_lower_bound(r, C64::new(m, 0.0))?;
            let exact = annulus_t(r, m)?;
            Ok(LimitEntry { param: m, clearance, exact, bound: clearance.max(exact) })
        })
        .collect::<Result<_>>()?;
    Ok(LimitProfile { entries, target: 1.0 })
}

/// True when some factor is punctured, so `T` tends to 0 at the puncture and
/// the domain is not holomorphic homogeneous regular.
pub fn hhr_flag(d: &ProductDomain) -> bool {
    d.factors().iter().any(|f| matches!(f, Factor::Planar(p) if !p.punctures().is_empty()))
}

/// Positive lower bound for `inf T` when one is known from single-factor values.
pub fn infimum_lower_bound(d: &ProductDomain) -> Option<f64> {
    d.factors()
        .iter()
        .map(|f| match f {
            Factor::Ball(b) => Some(1.0 / (b.dim() as f64).sqrt()),
            Factor::Planar(p) => factor_infimum(p),
        })
        .try_fold(1.0f64, |acc, v| v.map(|v| acc.min(v)))
}

fn factor_infimum(p: &PlanarFactor) -> Option<f64> {
    match p.kind() {
        FactorKind::UnitDisk => Some(1.0),
        // max(|z|, r/|z|) is smallest at |z| = sqrt(r)
        FactorKind::Annulus { r } => Some(r.sqrt()),
        FactorKind::PuncturedDisk { .. } => None,
    }
}
