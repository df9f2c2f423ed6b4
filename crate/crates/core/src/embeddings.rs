//! Explicit injective holomorphic maps into the unit disk and the
//! image-inradius oracle.
//!
//! A witness `f` for `T(z)` sends the base point to 0; the largest polydisk
//! `D^n(0, c)` inside the image has `c = min_i dist(0, C \ f_i(Ω_i))`, computed
//! here from the images of boundary circles and of punctures (the image of a
//! puncture under the continuous extension is never attained by `f_i`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::domains::{Factor, FactorKind, PlanarFactor, ProductDomain, ProductPoint};
use crate::error::{Error, Result};
use crate::hyperbolic::{mobius_circle_min_modulus, MobiusAut};

/// Tolerance for the base-point condition `f(z) = 0`.
pub const BASE_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Mobius(MobiusAut),
    /// `ζ ↦ r / ζ`, the orientation-reversing self-map of the annulus `A_r`.
    Reflection(f64),
    Inclusion,
}

impl Primitive {
    fn eval(&self, zeta: C64) -> Result<C64> {
        match self {
            Primitive::Mobius(m) => Ok(m.eval(zeta)),
            Primitive::Reflection(r) => {
                if zeta == C64::new(0.0, 0.0) {
                    return Err(Error::Pole(format!("reflection r/ζ with r = {r} at ζ = 0")));
                }
                Ok(*r / zeta)
            }
            Primitive::Inclusion => Ok(zeta),
        }
    }
}

/// A composition of primitives, applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct MapExpr {
    steps: Vec<Primitive>,
}

impl MapExpr {
    pub fn new(steps: Vec<Primitive>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if let Primitive::Reflection(r) = s {
                if !(*r > 0.0 && *r < 1.0) {
                    return Err(Error::domain(format!("reflection radius must lie in (0, 1), got {r}")));
                }
                if i != 0 {
                    return Err(Error::domain("reflection is only defined on an annulus source, so it must come first"));
                }
            }
        }
        Ok(MapExpr { steps })
    }

    pub fn inclusion() -> Self {
        MapExpr { steps: vec![Primitive::Inclusion] }
    }

    pub fn mobius(m: MobiusAut) -> Self {
        MapExpr { steps: vec![Primitive::Mobius(m)] }
    }

    /// The automorphism vanishing at `z`.
    pub fn mobius_to_zero(z: C64) -> Result<Self> {
        Ok(Self::mobius(MobiusAut::vanishing_at(z)?))
    }

    /// Reflection of `A_r` followed by the automorphism vanishing at `r / z`.
    pub fn reflected_mobius_to_zero(r: f64, z: C64) -> Result<Self> {
        let w = Primitive::Reflection(r).eval(z)?;
        Self::new(vec![Primitive::Reflection(r), Primitive::Mobius(MobiusAut::vanishing_at(w)?)])
    }

    pub fn steps(&self) -> &[Primitive] {
        &self.steps
    }

    pub fn eval(&self, zeta: C64) -> Result<C64> {
        self.steps.iter().try_fold(zeta, |w, s| s.eval(w))
    }

    /// Appends the automorphism sending the image of `z` to 0.
    pub fn normalized_at(&self, z: C64) -> Result<Self> {
        let w = self.eval(z)?;
        let mut steps = self.steps.clone();
        steps.push(Primitive::Mobius(MobiusAut::vanishing_at(w)?));
        Self::new(steps)
    }

    fn reflection(&self) -> Option<f64> {
        match self.steps.first() {
            Some(Primitive::Reflection(r)) => Some(*r),
            _ => None,
        }
    }

    /// Collapses every step after an optional leading reflection into one automorphism.
    pub fn as_mobius_chain(&self) -> (Option<f64>, MobiusAut) {
        let m = self.steps.iter().fold(MobiusAut::IDENTITY, |acc, s| match s {
            Primitive::Mobius(m) => acc.then(m),
            _ => acc,
        });
        (self.reflection(), m)
    }

    fn check_source(&self, f: &PlanarFactor) -> Result<()> {
        if let Some(r) = self.reflection() {
            match f.kind() {
                FactorKind::Annulus { r: ra } if *ra == r => {}
                _ => return Err(Error::domain(format!("reflection r/ζ with r = {r} needs the annulus A_{r} as source"))),
            }
        }
        Ok(())
    }
}

pub fn map_eval(e: &MapExpr, zeta: C64) -> Result<C64> {
    e.eval(zeta)
}

/// Value at `p` of the continuous extension of `e`.
pub fn removable_extension_at(e: &MapExpr, p: C64) -> Result<C64> {
    e.eval(p).map_err(|err| match err {
        Error::Pole(msg) => Error::NotExtendable(format!("{p} ({msg})")),
        other => other,
    })
}

/// Sampled distance from 0 to the complement of `e(f)`.
pub fn image_inradius_at_zero(e: &MapExpr, f: &PlanarFactor, m: usize) -> Result<f64> {
    if m < 8 {
        return Err(Error::domain(format!("need at least 8 boundary samples, got {m}")));
    }
    e.check_source(f)?;
    let mut best = f64::INFINITY;
    for b in f.boundary_samples(m) {
        best = best.min(e.eval(b)?.norm());
    }
    for &p in f.punctures() {
        best = best.min(removable_extension_at(e, p)?.norm());
    }
    Ok(best)
}

/// Closed-form distance from 0 to the complement of `e(f)`.
///
/// Every catalog map is an automorphism `M` of the disk, possibly after the
/// annulus reflection, which maps `A_r` onto itself. The image of the unit
/// circle is the unit circle, punctures go to `M(p)`, and the inner circle of
/// an annulus goes to a circle whose nearest point to 0 is
/// `mobius_circle_min_modulus(M^{-1}(0), r)`.
pub fn image_inradius_analytic(e: &MapExpr, f: &PlanarFactor) -> Result<f64> {
    e.check_source(f)?;
    let (_, m) = e.as_mobius_chain();
    let value = match f.kind() {
        FactorKind::UnitDisk => 1.0,
        FactorKind::PuncturedDisk { punctures } => {
            punctures.iter().map(|&p| m.eval(p).norm()).fold(1.0, f64::min)
        }
        FactorKind::Annulus { r } => mobius_circle_min_modulus(m.zero(), *r)?.min(1.0),
    };
    Ok(value)
}

/// One map per planar factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMap {
    maps: Vec<MapExpr>,
}

impl ProductMap {
    pub fn new(maps: Vec<MapExpr>) -> Self {
        ProductMap { maps }
    }

    pub fn maps(&self) -> &[MapExpr] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Automorphisms vanishing at each coordinate.
    pub fn mobius_to_zero(z: &[C64]) -> Result<Self> {
        Ok(ProductMap { maps: z.iter().map(|&zi| MapExpr::mobius_to_zero(zi)).collect::<Result<_>>()? })
    }

    fn check_against(&self, d: &ProductDomain, z: &ProductPoint) -> Result<(Vec<PlanarFactor>, Vec<C64>)> {
        let factors: Vec<PlanarFactor> = d
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Planar(p) => Ok(p.clone()),
                Factor::Ball(_) => Err(Error::Inapplicable("embeddings are only defined on planar factors".into())),
            })
            .collect::<Result<_>>()?;
        if factors.len() != self.maps.len() {
            return Err(Error::domain(format!("{} maps for {} factors", self.maps.len(), factors.len())));
        }
        let coords = z.planar_coords().ok_or_else(|| Error::domain("point has ball coordinates"))?;
        for (i, (e, &zi)) in self.maps.iter().zip(&coords).enumerate() {
            let w = e.eval(zi)?;
            if w.norm() > BASE_POINT_TOL {
                return Err(Error::BasePoint { factor: i, modulus: w.norm() });
            }
        }
        Ok((factors, coords))
    }
}

/// Sampled radius of the largest polydisk about 0 inside `pm(d)`.
pub fn product_inradius(pm: &ProductMap, d: &ProductDomain, z: &ProductPoint, m: usize) -> Result<f64> {
    let (factors, _) = pm.check_against(d, z)?;
    let mut best = f64::INFINITY;
    for (e, f) in pm.maps.iter().zip(&factors) {
        best = best.min(image_inradius_at_zero(e, f, m)?);
    }
    Ok(best)
}

/// Closed-form counterpart of [`product_inradius`].
pub fn product_inradius_analytic(pm: &ProductMap, d: &ProductDomain, z: &ProductPoint) -> Result<f64> {
    let (factors, _) = pm.check_against(d, z)?;
    let mut best = f64::INFINITY;
    for (e, f) in pm.maps.iter().zip(&factors) {
        best = best.min(image_inradius_analytic(e, f)?);
    }
    Ok(best)
}

/// Grid of interior points of `f`: a `g × g` lattice on `[-1, 1]²`, shrunk
/// slightly so no node falls on a boundary circle.
fn interior_grid(f: &PlanarFactor, g: usize) -> Vec<C64> {
    let mut pts = Vec::new();
    for i in 0..g {
        for j in 0..g {
            let x = -0.999 + 1.998 * (i as f64 + 0.5) / g as f64;
            let y = -0.999 + 1.998 * (j as f64 + 0.5) / g as f64;
            let z = C64::new(x, y);
            if f.contains(z) {
                pts.push(z);
            }
        }
    }
    pts
}

/// True iff no two images are within `1e-14` of each other.
pub fn images_pairwise_distinct(images: &[C64]) -> bool {
    let mut sorted: Vec<C64> = images.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if b.re - a.re > 1e-14 {
                break;
            }
            if (a - b).norm() <= 1e-14 {
                return false;
            }
        }
    }
    true
}

/// Evaluates `map` on an interior grid of `f` and checks the images are distinct.
pub fn injectivity_spot_check_with<F>(map: F, f: &PlanarFactor, g: usize) -> bool
where
    F: Fn(C64) -> Result<C64>,
{
    let images: Result<Vec<C64>> = interior_grid(f, g).into_iter().map(map).collect();
    images.map(|v| images_pairwise_distinct(&v)).unwrap_or(false)
}

pub fn injectivity_spot_check(e: &MapExpr, f: &PlanarFactor, g: usize) -> bool {
    injectivity_spot_check_with(|z| e.eval(z), f, g)
}

// Witness text form: steps joined by '>', factors by ';'.
//   mobius:<re>:<im>:<theta>   reflection:<r>   inclusion

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Mobius(m) => write!(
                f,
                "mobius:{}:{}:{}",
                fmt_f64(m.zero().re),
                fmt_f64(m.zero().im),
                fmt_f64(m.theta())
            ),
            Primitive::Reflection(r) => write!(f, "reflection:{}", fmt_f64(*r)),
            Primitive::Inclusion => write!(f, "inclusion"),
        }
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "inclusion");
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, ">")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ProductMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.maps.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

impl FromStr for Primitive {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["inclusion"] => Ok(Primitive::Inclusion),
            ["reflection", r] => Ok(Primitive::Reflection(parse_num(r)?)),
            ["mobius", re, im, th] => Ok(Primitive::Mobius(MobiusAut::new(
                C64::new(parse_num(re)?, parse_num(im)?),
                parse_num(th)?,
            )?)),
            _ => Err(Error::Parse(format!("unknown map primitive {s:?}"))),
        }
    }
}

impl FromStr for MapExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapExpr::new(s.split('>').map(str::parse).collect::<Result<_>>()?)
    }
}

impl FromStr for ProductMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(ProductMap::new(s.split(';').map(str::parse).collect::<Result<_>>()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mob(a: f64) -> Primitive {
        Primitive::Mobius(MobiusAut::vanishing_at(c(a, 0.0)).unwrap())
    }

    #[test]
    fn map_eval_examples() {
        assert_eq!(map_eval(&MapExpr::inclusion(), c(0.3, 0.0)).unwrap(), c(0.3, 0.0));
        let refl = MapExpr::new(vec![Primitive::Reflection(0.25)]).unwrap();
        assert_abs_diff_eq!((map_eval(&refl, c(0.5, 0.0)).unwrap() - c(0.5, 0.0)).norm(), 0.0);
        let e = MapExpr::new(vec![Primitive::Reflection(0.25), mob(0.5)]).unwrap();
        assert_abs_diff_eq!(map_eval(&e, c(0.5, 0.0)).unwrap().norm(), 0.0);
        assert!(matches!(map_eval(&refl, c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(MapExpr::new(vec![mob(0.1), Primitive::Reflection(0.25)]).is_err());
        assert!(MapExpr::new(vec![Primitive::Reflection(1.5)]).is_err());
    }

    #[test]
    fn extension_examples() {
        let e = MapExpr::new(vec![mob(0.3)]).unwrap();
        assert_abs_diff_eq!((removable_extension_at(&e, c(0.0, 0.0)).unwrap() - c(-0.3, 0.0)).norm(), 0.0, epsilon = 1e-16);
        assert_eq!(removable_extension_at(&MapExpr::inclusion(), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let refl = MapExpr::new(vec![Primitive::Reflection(0.4)]).unwrap();
        assert!(matches!(removable_extension_at(&refl, c(0.0, 0.0)), Err(Error::NotExtendable(_))));
    }

    #[test]
    fn inradius_examples() {
        let pd = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap();
        let e = MapExpr::new(vec![mob(0.3)]).unwrap();
        for m in [8, 64, 4096] {
            assert_abs_diff_eq!(image_inradius_at_zero(&e, &pd, m).unwrap(), 0.3, epsilon = 1e-15);
        }
        let ann = PlanarFactor::annulus(0.25).unwrap();
        let e = MapExpr::new(vec![mob(0.5)]).unwrap();
        assert_abs_diff_eq!(image_inradius_at_zero(&e, &ann, 65_536).unwrap(), 0.25 / 0.875, epsilon = 1e-6);
        assert_abs_diff_eq!(image_inradius_analytic(&e, &ann).unwrap(), 0.25 / 0.875, epsilon = 1e-16);
        assert_abs_diff_eq!(image_inradius_at_zero(&MapExpr::inclusion(), &PlanarFactor::unit_disk(), 64).unwrap(), 1.0);
        assert!(image_inradius_at_zero(&e, &ann, 4).is_err());

        let refl = MapExpr::reflected_mobius_to_zero(0.25, c(0.5, 0.0)).unwrap();
        assert!(image_inradius_at_zero(&refl, &pd, 64).is_err());
        assert!(image_inradius_at_zero(&refl, &PlanarFactor::annulus(0.3).unwrap(), 64).is_err());
        let sampled = image_inradius_at_zero(&refl, &ann, 65_536).unwrap();
        assert_abs_diff_eq!(sampled, image_inradius_analytic(&refl, &ann).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn product_inradius_examples() {
        let pd = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap();
        let d = ProductDomain::planar(vec![pd.clone(), pd.clone()]).unwrap();
        let z = ProductPoint::planar(&d, &[c(0.5, 0.0), c(0.3, 0.0)]).unwrap();
        let w = ProductMap::mobius_to_zero(&[c(0.5, 0.0), c(0.3, 0.0)]).unwrap();
        assert_abs_diff_eq!(product_inradius(&w, &d, &z, 4096).unwrap(), 0.3, epsilon = 1e-15);

        let d = ProductDomain::planar(vec![PlanarFactor::unit_disk(), pd.clone()]).unwrap();
        let z = ProductPoint::planar(&d, &[c(0.2, 0.0), c(0.6, 0.0)]).unwrap();
        let w = ProductMap::mobius_to_zero(&[c(0.2, 0.0), c(0.6, 0.0)]).unwrap();
        assert_abs_diff_eq!(product_inradius(&w, &d, &z, 4096).unwrap(), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(product_inradius_analytic(&w, &d, &z).unwrap(), 0.6, epsilon = 1e-15);

        let d1 = ProductDomain::planar(vec![pd.clone()]).unwrap();
        let z1 = ProductPoint::planar(&d1, &[c(0.4, 0.0)]).unwrap();
        let w1 = ProductMap::mobius_to_zero(&[c(0.4, 0.0)]).unwrap();
        assert_eq!(
            product_inradius(&w1, &d1, &z1, 256).unwrap(),
            image_inradius_at_zero(&w1.maps()[0], &pd, 256).unwrap()
        );

        let bad = ProductMap::mobius_to_zero(&[c(0.1, 0.0), c(0.6, 0.0)]).unwrap();
        assert!(matches!(product_inradius(&bad, &d, &z, 64), Err(Error::BasePoint { factor: 0, .. })));
        let short = ProductMap::mobius_to_zero(&[c(0.2, 0.0)]).unwrap();
        assert!(product_inradius(&short, &d, &z, 64).is_err());
    }

    #[test]
    fn injectivity_examples() {
        assert!(injectivity_spot_check(&MapExpr::inclusion(), &PlanarFactor::unit_disk(), 40));
        let ann = PlanarFactor::annulus(0.3).unwrap();
        assert!(injectivity_spot_check(&MapExpr::mobius_to_zero(c(0.2, 0.5)).unwrap(), &ann, 40));
        assert!(injectivity_spot_check(&MapExpr::reflected_mobius_to_zero(0.3, c(0.5, 0.1)).unwrap(), &ann, 40));
        // the grid is symmetric under ζ ↦ -ζ, so squaring collides
        assert!(!injectivity_spot_check_with(|z| Ok(z * z), &PlanarFactor::unit_disk(), 20));
    }

    #[test]
    fn witness_text_round_trip() {
        let pm = ProductMap::new(vec![
            MapExpr::reflected_mobius_to_zero(0.25, c(0.5, 0.1)).unwrap(),
            MapExpr::new(vec![Primitive::Mobius(MobiusAut::new(c(0.1, -0.3), 0.7).unwrap())]).unwrap(),
            MapExpr::inclusion(),
        ]);
        let text = pm.to_string();
        let back: ProductMap = text.parse().unwrap();
        assert_eq!(back, pm);
        assert!("mobius:1:0".parse::<Primitive>().is_err());
        assert!("warp:0.5".parse::<Primitive>().is_err());
    }

    fn disk_point(max: f64) -> impl Strategy<Value = C64> {
        (0.0..max, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn puncture_image_caps_inradius(z in disk_point(0.95), p in disk_point(0.9), m in 8usize..512) {
            prop_assume!((z - p).norm() > 1e-6);
            let f = PlanarFactor::punctured_disk(vec![p]).unwrap();
            let e = MapExpr::mobius_to_zero(z).unwrap();
            let ir = image_inradius_at_zero(&e, &f, m).unwrap();
            prop_assert!(ir <= removable_extension_at(&e, p).unwrap().norm());
            // closed form for one puncture: |φ_z(p)|
            let exact = (z - p).norm() / (C64::new(1.0, 0.0) - z.conj() * p).norm();
            prop_assert!(ir <= exact + 1e-6);
        }

        #[test]
        fn refinement_never_raises(a in disk_point(0.9), r in 0.05..0.9f64, k in 3u32..10) {
            let f = PlanarFactor::annulus(r).unwrap();
            prop_assume!(f.contains(a));
            let e = MapExpr::mobius_to_zero(a).unwrap();
            let coarse = image_inradius_at_zero(&e, &f, 1 << k).unwrap();
            let fine = image_inradius_at_zero(&e, &f, 1 << (k + 1)).unwrap();
            prop_assert!(fine <= coarse + 1e-12);
        }

        #[test]
        fn automorphisms_fill_the_disk(a in disk_point(0.95), th in -3.0..3.0f64) {
            let e = MapExpr::mobius(MobiusAut::new(a, th).unwrap());
            let ir = image_inradius_at_zero(&e, &PlanarFactor::unit_disk(), 256).unwrap();
            prop_assert!((ir - 1.0).abs() < 1e-12);
        }
    }
}
