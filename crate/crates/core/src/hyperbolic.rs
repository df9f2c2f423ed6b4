//! Poincaré-metric primitives on the unit disk.
//!
//! `sigma(x) = log((1 + x) / (1 - x))` is the Poincaré distance from 0 to a
//! point of modulus `x`; its inverse is `tanh(t / 2)`. Near the unit circle
//! `1 - x` carries all the information, so radii are passed around as
//! [`DiskRadius`], which stores the complement separately.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::domains::{FactorKind, PlanarFactor};
use crate::error::{Error, Result};

/// A Poincaré distance. Always finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct HyperbolicValue(f64);

impl HyperbolicValue {
    pub const ZERO: HyperbolicValue = HyperbolicValue(0.0);

    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::domain(format!("hyperbolic value must be finite and >= 0, got {t}")));
        }
        Ok(HyperbolicValue(t))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `sigma_inv` of this distance; infallible since the value is valid by construction.
    pub fn to_radius(self) -> DiskRadius {
        radius_from_distance(self.0)
    }
}

/// A modulus in `[0, 1)` together with `1 - modulus` evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskRadius {
    value: f64,
    gap: f64,
}

impl DiskRadius {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::domain(format!("radius must lie in [0, 1), got {x}")));
        }
        Ok(DiskRadius { value: x, gap: 1.0 - x })
    }

    /// Builds a radius from independently computed `x` and `1 - x`.
    ///
    /// Used where a formula for the complement is available that is more
    /// accurate than subtracting from one.
    pub fn from_parts(value: f64, gap: f64) -> Result<Self> {
        if !(value >= 0.0 && gap > 0.0 && value.is_finite() && gap <= 1.0) {
            return Err(Error::domain(format!("invalid radius parts ({value}, {gap})")));
        }
        Ok(DiskRadius { value, gap })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    /// `1 - value`.
    pub fn gap(self) -> f64 {
        self.gap
    }
}

impl TryFrom<f64> for DiskRadius {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        DiskRadius::new(x)
    }
}

/// Anything `sigma` accepts: a bare modulus or a [`DiskRadius`].
pub trait AsDiskRadius {
    fn as_disk_radius(self) -> Result<DiskRadius>;
}

impl AsDiskRadius for f64 {
    fn as_disk_radius(self) -> Result<DiskRadius> {
        DiskRadius::new(self)
    }
}

impl AsDiskRadius for DiskRadius {
    fn as_disk_radius(self) -> Result<DiskRadius> {
        Ok(self)
    }
}

fn radius_from_distance(t: f64) -> DiskRadius {
    let e = (-t).exp();
    // 1 - tanh(t/2) = 2 e^{-t} / (1 + e^{-t})
    DiskRadius { value: (0.5 * t).tanh(), gap: 2.0 * e / (1.0 + e) }
}

/// `sigma(x) = log((1 + x) / (1 - x))`, the Poincaré distance from 0 to `x`.
pub fn sigma(x: impl AsDiskRadius) -> Result<HyperbolicValue> {
    let r = x.as_disk_radius()?;
    let t = if r.value < 0.5 {
        2.0 * r.value.atanh()
    } else {
        ((1.0 + r.value) / r.gap).ln()
    };
    HyperbolicValue::new(t)
}

/// `tanh(t / 2)`, with the complement carried alongside.
pub fn sigma_inv(t: f64) -> Result<DiskRadius> {
    let t = HyperbolicValue::new(t)?;
    Ok(t.to_radius())
}

/// Disk automorphism `ζ ↦ e^{iθ} (ζ - a) / (1 - conj(a) ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusAut {
    a: C64,
    theta: f64,
}

impl MobiusAut {
    pub const IDENTITY: MobiusAut = MobiusAut { a: C64 { re: 0.0, im: 0.0 }, theta: 0.0 };

    pub fn new(a: C64, theta: f64) -> Result<Self> {
        if !(a.norm() < 1.0) || !theta.is_finite() {
            return Err(Error::domain(format!("Mobius zero must satisfy |a| < 1, got {a}")));
        }
        Ok(MobiusAut { a, theta })
    }

    /// Automorphism vanishing at `a`, no rotation.
    pub fn vanishing_at(a: C64) -> Result<Self> {
        Self::new(a, 0.0)
    }

    pub fn zero(&self) -> C64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        let rot = C64::from_polar(1.0, self.theta);
        rot * (zeta - self.a) / (C64::new(1.0, 0.0) - self.a.conj() * zeta)
    }

    pub fn inverse(&self) -> MobiusAut {
        MobiusAut { a: -self.a * C64::from_polar(1.0, self.theta), theta: -self.theta }
    }

    /// The automorphism `next ∘ self`.
    pub fn then(&self, next: &MobiusAut) -> MobiusAut {
        let a = self.inverse().eval(next.a);
        // Read the rotation off at a point well away from the new zero.
        let probe = if a.norm() < 0.5 {
            if a.norm() == 0.0 { C64::new(0.75, 0.0) } else { -a / a.norm() * 0.75 }
        } else {
            C64::new(0.0, 0.0)
        };
        let w = next.eval(self.eval(probe));
        let unit = w * (C64::new(1.0, 0.0) - a.conj() * probe) / (probe - a);
        MobiusAut { a, theta: unit.arg() }
    }
}

pub fn mobius_eval(m: &MobiusAut, zeta: C64) -> Result<C64> {
    if zeta.norm() > 1.0 + 1e-15 {
        return Err(Error::domain(format!("point {zeta} lies outside the closed disk")));
    }
    Ok(m.eval(zeta))
}

fn check_in_disk(z: C64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(format!("point {z} lies outside the unit disk")));
    }
    Ok(())
}

/// Pseudo-hyperbolic distance `|b - a| / |1 - conj(a) b|` as a radius.
pub fn pseudo_hyperbolic(a: C64, b: C64) -> Result<DiskRadius> {
    check_in_disk(a)?;
    check_in_disk(b)?;
    let denom = (C64::new(1.0, 0.0) - a.conj() * b).norm();
    let rho = (b - a).norm() / denom;
    let (na, nb) = (a.norm(), b.norm());
    // 1 - ρ² = (1 - |a|²)(1 - |b|²) / |1 - conj(a) b|²
    let one_minus_sq = (1.0 - na) * (1.0 + na) * (1.0 - nb) * (1.0 + nb) / (denom * denom);
    let rho = rho.min(1.0 - f64::EPSILON / 2.0);
    DiskRadius::from_parts(rho, (one_minus_sq / (1.0 + rho)).min(1.0))
}

pub fn poincare_distance(a: C64, b: C64) -> Result<HyperbolicValue> {
    sigma(pseudo_hyperbolic(a, b)?)
}

/// Kobayashi distance on the unit disk, which is the Poincaré distance.
pub fn kob_disk(a: C64, b: C64) -> Result<HyperbolicValue> {
    poincare_distance(a, b)
}

/// `min over |ζ| = r` of the modulus of any automorphism vanishing at `a`.
pub fn mobius_circle_min_modulus(a: C64, r: f64) -> Result<f64> {
    check_in_disk(a)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("circle radius must lie in (0, 1), got {r}")));
    }
    let m = a.norm();
    Ok((m - r).abs() / (1.0 - r * m))
}

/// Kobayashi distance from `z` to the selected puncture in the filled factor,
/// available when filling that puncture yields the unit disk.
pub fn kob_filled(factor: &PlanarFactor, z: C64, puncture_index: usize) -> Result<HyperbolicValue> {
    let punctures = factor.punctures();
    let p = *punctures
        .get(puncture_index)
        .ok_or(Error::InvalidIndex { index: puncture_index, len: punctures.len() })?;
    if punctures.len() != 1 {
        return Err(Error::UnsupportedGeometry(format!(
            "filled domain keeps {} other punctures; use the subdomain estimate",
            punctures.len() - 1
        )));
    }
    if !factor.contains(z) {
        return Err(Error::domain(format!("{z} is not in the factor")));
    }
    kob_disk(z, p)
}

/// Upper estimate of the Kobayashi distance between `z` and the puncture `p`
/// in the factor with `p` filled in, via the largest disk centred at `p`
/// that stays inside the filled domain.
pub fn kob_upper_via_subdomain(factor: &PlanarFactor, z: C64, p: C64) -> Result<HyperbolicValue> {
    let FactorKind::PuncturedDisk { punctures } = factor.kind() else {
        return Err(Error::UnsupportedGeometry("factor has no punctures".into()));
    };
    if !punctures.contains(&p) {
        return Err(Error::domain(format!("{p} is not a puncture of the factor")));
    }
    if z != p && !factor.contains(z) {
        return Err(Error::domain(format!("{z} is not in the filled factor")));
    }
    let rho = punctures
        .iter()
        .filter(|&&q| q != p)
        .map(|&q| (q - p).norm())
        .fold(1.0 - p.norm(), f64::min);
    let d = (z - p).norm();
    if d >= rho {
        return Err(Error::UnsupportedGeometry(format!(
            "{z} lies outside the admissible disk D({p}, {rho})"
        )));
    }
    sigma(DiskRadius::from_parts(d / rho, (rho - d) / rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(0.0).unwrap().get(), 0.0);
        assert_abs_diff_eq!(sigma(0.5).unwrap().get(), 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(sigma(sigma_inv(2.0).unwrap()).unwrap().get(), 2.0, epsilon = 1e-15);
        assert!(sigma(1.0).is_err());
        assert!(sigma(-0.1).is_err());
    }

    #[test]
    fn sigma_inv_values() {
        assert_eq!(sigma_inv(0.0).unwrap().value(), 0.0);
        assert_abs_diff_eq!(sigma_inv(3f64.ln()).unwrap().value(), 0.5, epsilon = 1e-15);
        let far = sigma_inv(20.0).unwrap();
        assert!(far.value() > 1.0 - 1e-8 && far.value() < 1.0);
        // 1 - tanh(10) = 2 / (e^20 + 1)
        assert_abs_diff_eq!(far.gap(), 2.0 / (20f64.exp() + 1.0), epsilon = 1e-24);
        assert!(sigma_inv(-1e-9).is_err());
        assert!(sigma_inv(f64::INFINITY).is_err());
    }

    #[test]
    fn round_trip_to_twenty() {
        for k in 0..=20_000 {
            let t = 20.0 * k as f64 / 20_000.0;
            let back = sigma(sigma_inv(t).unwrap()).unwrap().get();
            assert!((back - t).abs() <= 1e-12, "t = {t}: {back}");
        }
    }

    #[test]
    fn mobius_examples() {
        let m = MobiusAut::vanishing_at(c(0.3, 0.0)).unwrap();
        assert_abs_diff_eq!(m.eval(c(0.3, 0.0)).norm(), 0.0);
        let id = MobiusAut::IDENTITY;
        assert_eq!(id.eval(c(0.2, -0.7)), c(0.2, -0.7));
        let h = MobiusAut::vanishing_at(c(0.5, 0.0)).unwrap();
        // (0 - 0.5) / (1 - 0) = -0.5
        assert_abs_diff_eq!((h.eval(c(0.0, 0.0)) - c(-0.5, 0.0)).norm(), 0.0, epsilon = 1e-16);
        assert!(MobiusAut::vanishing_at(c(1.0, 0.0)).is_err());
        assert!(mobius_eval(&h, c(1.5, 0.0)).is_err());
    }

    #[test]
    fn mobius_composition_matches_pointwise() {
        let m1 = MobiusAut::new(c(0.3, -0.2), 0.7).unwrap();
        let m2 = MobiusAut::new(c(-0.5, 0.4), -1.9).unwrap();
        let both = m1.then(&m2);
        for &z in &[c(0.0, 0.0), c(0.1, 0.8), c(-0.6, -0.3), c(0.9, 0.0)] {
            assert_abs_diff_eq!((both.eval(z) - m2.eval(m1.eval(z))).norm(), 0.0, epsilon = 1e-14);
        }
        let inv = m1.inverse();
        assert_abs_diff_eq!((inv.eval(m1.eval(c(0.4, 0.1))) - c(0.4, 0.1)).norm(), 0.0, epsilon = 1e-15);
        // composing with the identity keeps the map
        let same = MobiusAut::IDENTITY.then(&m1);
        assert_abs_diff_eq!((same.zero() - m1.zero()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_examples() {
        assert_abs_diff_eq!(poincare_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap().get(), 3f64.ln(), epsilon = 1e-15);
        assert_eq!(poincare_distance(c(0.2, 0.1), c(0.2, 0.1)).unwrap().get(), 0.0);
        let expected = {
            let x: f64 = 0.4 / 0.79;
            ((1.0 + x) / (1.0 - x)).ln()
        };
        assert_abs_diff_eq!(poincare_distance(c(0.3, 0.0), c(0.7, 0.0)).unwrap().get(), expected, epsilon = 1e-14);
        assert!(poincare_distance(c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert_eq!(kob_disk(c(0.1, 0.2), c(-0.3, 0.4)), poincare_distance(c(0.1, 0.2), c(-0.3, 0.4)));
    }

    #[test]
    fn circle_min_modulus_examples() {
        assert_abs_diff_eq!(mobius_circle_min_modulus(c(0.0, 0.0), 0.37).unwrap(), 0.37);
        // brute force over the circle
        let a = c(0.5, 0.0);
        let m = MobiusAut::vanishing_at(a).unwrap();
        let brute = (0..100_000)
            .map(|k| m.eval(C64::from_polar(0.25, std::f64::consts::TAU * k as f64 / 100_000.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(brute, 0.285_714_285_714_285_7, epsilon = 1e-9);
        assert_abs_diff_eq!(mobius_circle_min_modulus(a, 0.25).unwrap(), 0.25 / 0.875, epsilon = 1e-16);
        assert_eq!(mobius_circle_min_modulus(c(0.25, 0.0), 0.25).unwrap(), 0.0);
        assert!(mobius_circle_min_modulus(a, 1.0).is_err());
    }

    #[test]
    fn filled_and_subdomain() {
        let pd = PlanarFactor::punctured_disk(vec![c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(kob_filled(&pd, c(0.4, 0.0), 0).unwrap().get(), sigma(0.4).unwrap().get(), epsilon = 1e-15);
        assert!(matches!(kob_filled(&pd, c(0.0, 0.0), 0), Err(Error::Domain(_))));
        assert!(matches!(kob_filled(&pd, c(0.3, 0.0), 1), Err(Error::InvalidIndex { .. })));

        let shifted = PlanarFactor::punctured_disk(vec![c(0.2, 0.0)]).unwrap();
        // Mobius reduction: |0.5 - 0.2| / |1 - 0.1| = 1/3
        assert_abs_diff_eq!(
            kob_filled(&shifted, c(0.5, 0.0), 0).unwrap().get(),
            sigma(1.0 / 3.0).unwrap().get(),
            epsilon = 1e-14
        );

        // at a centred puncture the subdomain is the disk itself
        let z = c(0.3, -0.4);
        assert_abs_diff_eq!(
            kob_upper_via_subdomain(&pd, z, c(0.0, 0.0)).unwrap().get(),
            kob_filled(&pd, z, 0).unwrap().get(),
            epsilon = 1e-14
        );

        let two = PlanarFactor::punctured_disk(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(kob_filled(&two, c(0.1, 0.0), 0), Err(Error::UnsupportedGeometry(_))));
        assert_abs_diff_eq!(
            kob_upper_via_subdomain(&two, c(0.1, 0.0), c(0.0, 0.0)).unwrap().get(),
            sigma(0.2).unwrap().get(),
            epsilon = 1e-15
        );
        assert_eq!(kob_upper_via_subdomain(&two, c(0.0, 0.0), c(0.0, 0.0)).unwrap().get(), 0.0);
        assert!(matches!(
            kob_upper_via_subdomain(&two, c(-0.7, 0.0), c(0.0, 0.0)),
            Err(Error::UnsupportedGeometry(_))
        ));
        assert!(kob_upper_via_subdomain(&two, c(0.1, 0.0), c(0.3, 0.0)).is_err());
        assert!(kob_upper_via_subdomain(&PlanarFactor::unit_disk(), c(0.1, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn sigma_strictly_increasing() {
        let mut prev = -1.0;
        for k in 0..10_000 {
            let s = sigma(0.9999 * k as f64 / 9_999.0).unwrap().get();
            assert!(s > prev);
            prev = s;
        }
    }

    fn in_disk(max: f64) -> impl Strategy<Value = C64> {
        (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn inverse_round_trip(x in 0.0..0.999_999f64) {
            let back = sigma_inv(sigma(x).unwrap().get()).unwrap().value();
            prop_assert!((back - x).abs() <= 1e-12);
        }

        #[test]
        fn distance_mobius_invariant(a in in_disk(0.99), b in in_disk(0.99), m in in_disk(0.9), th in -3.0..3.0f64) {
            let m = MobiusAut::new(m, th).unwrap();
            let d0 = poincare_distance(a, b).unwrap().get();
            let d1 = poincare_distance(m.eval(a), m.eval(b)).unwrap().get();
            prop_assert!((d0 - d1).abs() <= 1e-12, "{d0} vs {d1}");
            prop_assert!((d0 - poincare_distance(b, a).unwrap().get()).abs() <= 1e-15);
        }

        #[test]
        fn triangle_inequality(a in in_disk(0.99), b in in_disk(0.99), c in in_disk(0.99)) {
            let ab = poincare_distance(a, b).unwrap().get();
            let bc = poincare_distance(b, c).unwrap().get();
            let ac = poincare_distance(a, c).unwrap().get();
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn circle_min_matches_sampling(a in in_disk(0.95), r in 0.05..0.95f64) {
            let m = MobiusAut::vanishing_at(a).unwrap();
            let n = 65_536;
            let brute = (0..n)
                .map(|k| m.eval(C64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64)).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!((brute - mobius_circle_min_modulus(a, r).unwrap()).abs() <= 1e-4);
        }

        #[test]
        fn subdomain_dominates_filled(z in in_disk(0.95)) {
            let pd = PlanarFactor::punctured_disk(vec![C64::new(0.0, 0.0)]).unwrap();
            prop_assume!(z.norm() > 0.0);
            let filled = kob_filled(&pd, z, 0).unwrap().get();
            let sub = kob_upper_via_subdomain(&pd, z, C64::new(0.0, 0.0)).unwrap().get();
            prop_assert!(sub >= filled - 1e-12);
        }
    }
}
