//! Factor domains and their products.
//!
//! Planar factors are normalized: outer boundary is the unit circle and an
//! annulus is centred at the origin.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorKind {
    UnitDisk,
    PuncturedDisk { punctures: Vec<C64> },
    /// `{ r < |ζ| < 1 }`
    Annulus { r: f64 },
}

/// A one-dimensional factor. Only constructible through the validating constructors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarFactor(FactorKind);

impl PlanarFactor {
    pub fn unit_disk() -> Self {
        PlanarFactor(FactorKind::UnitDisk)
    }

    /// The unit disk with the given points removed. An empty list gives the unit disk.
    pub fn punctured_disk(punctures: Vec<C64>) -> Result<Self> {
        for (i, p) in punctures.iter().enumerate() {
            if !(p.norm() < 1.0) {
                return Err(Error::domain(format!("puncture {p} is not inside the unit disk")));
            }
            if punctures[..i].contains(p) {
                return Err(Error::domain(format!("puncture {p} listed twice")));
            }
        }
        if punctures.is_empty() {
            return Ok(Self::unit_disk());
        }
        Ok(PlanarFactor(FactorKind::PuncturedDisk { punctures }))
    }

    pub fn annulus(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(format!("annulus inner radius must lie in (0, 1), got {r}")));
        }
        Ok(PlanarFactor(FactorKind::Annulus { r }))
    }

    pub fn kind(&self) -> &FactorKind {
        &self.0
    }

    pub fn contains(&self, zeta: C64) -> bool {
        let m = zeta.norm();
        match &self.0 {
            FactorKind::UnitDisk => m < 1.0,
            FactorKind::PuncturedDisk { punctures } => m < 1.0 && !punctures.contains(&zeta),
            FactorKind::Annulus { r } => *r < m && m < 1.0,
        }
    }

    /// `m` equally spaced points on every boundary circle, outer circle first.
    /// Singleton components are not sampled; see [`PlanarFactor::punctures`].
    pub fn boundary_samples(&self, m: usize) -> Vec<C64> {
        let circle = |radius: f64| (0..m).map(move |k| C64::from_polar(radius, TAU * k as f64 / m as f64));
        match &self.0 {
            FactorKind::Annulus { r } => circle(1.0).chain(circle(*r)).collect(),
            _ => circle(1.0).collect(),
        }
    }

    pub fn punctures(&self) -> &[C64] {
        match &self.0 {
            FactorKind::PuncturedDisk { punctures } => punctures,
            _ => &[],
        }
    }

    /// The factor with puncture `idx` put back.
    pub fn filled(&self, idx: usize) -> Result<PlanarFactor> {
        let punctures = self.punctures();
        if idx >= punctures.len() {
            return Err(Error::InvalidIndex { index: idx, len: punctures.len() });
        }
        let mut rest = punctures.to_vec();
        rest.remove(idx);
        PlanarFactor::punctured_disk(rest)
    }
}

pub fn membership(f: &PlanarFactor, zeta: C64) -> bool {
    f.contains(zeta)
}

/// The unit ball in `C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BallFactor {
    n: usize,
}

impl BallFactor {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("ball dimension must be at least 1"));
        }
        Ok(BallFactor { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.len() == self.n && z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Factor {
    Planar(PlanarFactor),
    Ball(BallFactor),
}

impl From<PlanarFactor> for Factor {
    fn from(f: PlanarFactor) -> Self {
        Factor::Planar(f)
    }
}

impl From<BallFactor> for Factor {
    fn from(f: BallFactor) -> Self {
        Factor::Ball(f)
    }
}

impl Factor {
    /// Number of complex coordinates the factor occupies.
    pub fn dim(&self) -> usize {
        match self {
            Factor::Planar(_) => 1,
            Factor::Ball(b) => b.dim(),
        }
    }

    pub fn as_planar(&self) -> Option<&PlanarFactor> {
        match self {
            Factor::Planar(p) => Some(p),
            Factor::Ball(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductDomain {
    factors: Vec<Factor>,
}

impl ProductDomain {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::domain("a product domain needs at least one factor"));
        }
        Ok(ProductDomain { factors })
    }

    pub fn planar(factors: Vec<PlanarFactor>) -> Result<Self> {
        Self::new(factors.into_iter().map(Factor::Planar).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total complex dimension.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).sum()
    }

    /// All factors planar, in order; `None` if a ball factor is present.
    pub fn planar_factors(&self) -> Option<Vec<&PlanarFactor>> {
        self.factors.iter().map(Factor::as_planar).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coord {
    Planar(C64),
    Ball(Vec<C64>),
}

impl Coord {
    pub fn as_planar(&self) -> Option<C64> {
        match self {
            Coord::Planar(z) => Some(*z),
            Coord::Ball(_) => None,
        }
    }
}

/// A point of a product domain. Construction checks membership factor by factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPoint {
    coords: Vec<Coord>,
}

impl ProductPoint {
    pub fn new(domain: &ProductDomain, coords: Vec<Coord>) -> Result<Self> {
        if coords.len() != domain.len() {
            return Err(Error::domain(format!(
                "point has {} coordinates, domain has {} factors",
                coords.len(),
                domain.len()
            )));
        }
        for (i, (f, c)) in domain.factors().iter().zip(&coords).enumerate() {
            let ok = match (f, c) {
                (Factor::Planar(p), Coord::Planar(z)) => p.contains(*z),
                (Factor::Ball(b), Coord::Ball(z)) => b.contains(z),
                _ => false,
            };
            if !ok {
                return Err(Error::domain(format!("coordinate {i} ({c:?}) is not in factor {i}")));
            }
        }
        Ok(ProductPoint { coords })
    }

    pub fn planar(domain: &ProductDomain, coords: &[C64]) -> Result<Self> {
        Self::new(domain, coords.iter().copied().map(Coord::Planar).collect())
    }

    /// Splits a flat list of complex numbers by factor dimension.
    pub fn from_flat(domain: &ProductDomain, flat: &[C64]) -> Result<Self> {
        if flat.len() != domain.dim() {
            return Err(Error::domain(format!(
                "point has {} complex entries, domain dimension is {}",
                flat.len(),
                domain.dim()
            )));
        }
        let mut rest = flat;
        let mut coords = Vec::with_capacity(domain.len());
        for f in domain.factors() {
            let (head, tail) = rest.split_at(f.dim());
            coords.push(match f {
                Factor::Planar(_) => Coord::Planar(head[0]),
                Factor::Ball(_) => Coord::Ball(head.to_vec()),
            });
            rest = tail;
        }
        Self::new(domain, coords)
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn planar_coords(&self) -> Option<Vec<C64>> {
        self.coords.iter().map(Coord::as_planar).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&PlanarFactor::unit_disk(), c(0.0, 0.0)));
        let pd = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap();
        assert!(!membership(&pd, c(0.0, 0.0)));
        assert!(membership(&pd, c(0.0, 0.1)));
        let ann = PlanarFactor::annulus(0.25).unwrap();
        assert!(!membership(&ann, c(0.25, 0.0)));
        assert!(membership(&ann, c(0.0, 0.3)));
        assert!(!membership(&ann, c(1.0, 0.0)));
    }

    #[test]
    fn constructor_validation() {
        assert!(PlanarFactor::annulus(0.0).is_err());
        assert!(PlanarFactor::annulus(1.0).is_err());
        assert!(PlanarFactor::punctured_disk(vec![c(1.0, 0.0)]).is_err());
        assert!(PlanarFactor::punctured_disk(vec![c(0.1, 0.0), c(0.1, 0.0)]).is_err());
        assert_eq!(PlanarFactor::punctured_disk(vec![]).unwrap(), PlanarFactor::unit_disk());
        assert!(BallFactor::new(0).is_err());
        assert!(ProductDomain::new(vec![]).is_err());
    }

    #[test]
    fn boundary_sample_layout() {
        let s = PlanarFactor::unit_disk().boundary_samples(4);
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_eq!(s.len(), 4);
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        let s = PlanarFactor::annulus(0.5).unwrap().boundary_samples(4);
        assert_eq!(s.len(), 8);
        assert!(s[..4].iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert!(s[4..].iter().all(|z| (z.norm() - 0.5).abs() < 1e-15));
        let s = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap().boundary_samples(4);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn puncture_bookkeeping() {
        let two = PlanarFactor::punctured_disk(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(two.punctures(), &[c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(PlanarFactor::annulus(0.3).unwrap().punctures().is_empty());
        assert!(PlanarFactor::unit_disk().punctures().is_empty());

        let one = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(one.filled(0).unwrap(), PlanarFactor::unit_disk());
        assert_eq!(two.filled(1).unwrap(), one);
        assert!(matches!(PlanarFactor::unit_disk().filled(0), Err(Error::InvalidIndex { .. })));
    }

    #[test]
    fn product_point_checks_membership() {
        let d = ProductDomain::new(vec![
            PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap().into(),
            BallFactor::new(2).unwrap().into(),
        ])
        .unwrap();
        assert_eq!(d.dim(), 3);
        assert!(ProductPoint::from_flat(&d, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.2)]).is_ok());
        assert!(ProductPoint::from_flat(&d, &[c(0.0, 0.0), c(0.1, 0.0), c(0.0, 0.2)]).is_err());
        assert!(ProductPoint::from_flat(&d, &[c(0.5, 0.0), c(0.8, 0.0), c(0.0, 0.8)]).is_err());
        assert!(ProductPoint::from_flat(&d, &[c(0.5, 0.0)]).is_err());
        assert!(ProductPoint::new(&d, vec![Coord::Planar(c(0.5, 0.0)), Coord::Planar(c(0.1, 0.0))]).is_err());
    }

    fn factor() -> impl Strategy<Value = PlanarFactor> {
        prop_oneof![
            Just(PlanarFactor::unit_disk()),
            (0.05..0.95f64).prop_map(|r| PlanarFactor::annulus(r).unwrap()),
            proptest::collection::vec((0.0..0.9f64, 0.0..TAU), 1..4).prop_map(|ps| {
                let mut pts: Vec<C64> = ps.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect();
                pts.dedup();
                PlanarFactor::punctured_disk(pts).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn boundary_and_punctures_never_members(f in factor(), m in 8usize..64) {
            let radii: Vec<f64> = match f.kind() {
                FactorKind::Annulus { r } => vec![1.0, *r],
                _ => vec![1.0],
            };
            let pts = f.boundary_samples(m);
            prop_assert_eq!(pts.len(), m * radii.len());
            for (k, z) in pts.iter().enumerate() {
                prop_assert!((z.norm() - radii[k / m]).abs() <= 1e-15);
                let snapped = z * (radii[k / m] / z.norm());
                if snapped.norm() == radii[k / m] {
                    prop_assert!(!f.contains(snapped));
                }
            }
            prop_assert!(!f.contains(c(1.0, 0.0)) && !f.contains(c(0.0, -1.0)));
            prop_assert!(f.punctures().iter().all(|&p| !f.contains(p)));
        }

        #[test]
        fn filling_only_adds_points(f in factor(), xs in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
            for i in 0..f.punctures().len() {
                let g = f.filled(i).unwrap();
                prop_assert!(xs.iter().all(|&(x, y)| !f.contains(c(x, y)) || g.contains(c(x, y))));
                prop_assert!(g.contains(f.punctures()[i]));
            }
        }
    }
}
