//! Probability measures with support bounded above.
//!
//! A measure is an absolutely continuous part on an interval `(lower, upper]`,
//! where `lower` may be `-inf`, plus a finite list of atoms. Integrals against
//! the density are computed after a compactifying change of variables that
//! makes square-root edges and `|x|^{-3/2}` tails smooth:
//!
//! * finite `lower`: `x = lower + (upper - lower)(1 - cos(pi s))/2`,
//! * `lower = -inf`: `x = upper - (s/(1-s))^2`,
//!
//! with `s` in `[0, 1]`. Remaining endpoint or kernel singularities are
//! resolved by geometric breakpoint ladders and adaptive bisection.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::quadrature::{integrate_partitioned, QuadConfig, QuadResult, QuadValue};

/// Default total-mass tolerance.
pub const MASS_TOL: f64 = 1e-8;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: f64, weight: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "atom location {location} is not finite"
            )));
        }
        if !(weight > 0.0 && weight <= 1.0 + MASS_TOL) {
            return Err(Error::InvalidMeasure(format!(
                "atom weight {weight} outside (0, 1]"
            )));
        }
        Ok(Atom { location, weight })
    }
}

/// Absolutely continuous part of a measure.
#[derive(Clone)]
pub struct DensityPart {
    density: DensityFn,
    lower: f64,
    upper: f64,
    left_tail_exponent: Option<f64>,
}

impl fmt::Debug for DensityPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityPart")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("left_tail_exponent", &self.left_tail_exponent)
            .finish_non_exhaustive()
    }
}

impl DensityPart {
    /// `left_tail_exponent` is the `beta` in `density(x) ~ C |x|^{-beta}` as
    /// `x -> -inf`; it is required (and must exceed 1) when `lower = -inf`.
    pub fn new<F>(
        density: F,
        lower: f64,
        upper: f64,
        left_tail_exponent: Option<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_arc(Arc::new(density), lower, upper, left_tail_exponent)
    }

    pub fn from_arc(
        density: DensityFn,
        lower: f64,
        upper: f64,
        left_tail_exponent: Option<f64>,
    ) -> Result<Self> {
        if !upper.is_finite() {
            return Err(Error::InvalidMeasure(
                "support must be bounded above".into(),
            ));
        }
        if lower.is_nan() || lower == f64::INFINITY || lower >= upper {
            return Err(Error::InvalidMeasure(format!(
                "empty density support ({lower}, {upper})"
            )));
        }
        if lower == f64::NEG_INFINITY {
            match left_tail_exponent {
                Some(beta) if beta > 1.0 => {}
                Some(beta) => {
                    return Err(Error::InvalidMeasure(format!(
                        "left tail exponent {beta} gives infinite mass"
                    )))
                }
                None => {
                    return Err(Error::InvalidMeasure(
                        "unbounded support needs a left tail exponent".into(),
                    ))
                }
            }
        }
        Ok(DensityPart {
            density,
            lower,
            upper,
            left_tail_exponent,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn left_tail_exponent(&self) -> Option<f64> {
        self.left_tail_exponent
    }

    /// Density value; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        if x > self.lower && x < self.upper {
            (self.density)(x)
        } else {
            0.0
        }
    }

    fn unbounded(&self) -> bool {
        self.lower == f64::NEG_INFINITY
    }

    /// Change of variables `s -> (x, dx/ds)`.
    fn map(&self, s: f64) -> (f64, f64) {
        if self.unbounded() {
            let r = s / (1.0 - s);
            let jac = 2.0 * s / ((1.0 - s) * (1.0 - s) * (1.0 - s));
            (self.upper - r * r, jac)
        } else {
            let width = self.upper - self.lower;
            let x = self.lower + 0.5 * width * (1.0 - (PI * s).cos());
            let jac = 0.5 * width * PI * (PI * s).sin();
            (x.clamp(self.lower, self.upper), jac)
        }
    }

    fn inverse_map(&self, x: f64) -> f64 {
        if self.unbounded() {
            let d = (self.upper - x).max(0.0).sqrt();
            d / (1.0 + d)
        } else {
            let t = 1.0 - 2.0 * (x - self.lower) / (self.upper - self.lower);
            t.clamp(-1.0, 1.0).acos() / PI
        }
    }

    /// Initial partition in `s`, refined around each anchor.
    fn partition(&self, anchors: &[Anchor]) -> Vec<f64> {
        let mut xs: Vec<f64> = Vec::new();
        if self.unbounded() {
            for k in -6..=20 {
                xs.push(self.upper - 4f64.powi(k));
            }
        }
        let span = if self.unbounded() {
            f64::INFINITY
        } else {
            self.upper - self.lower
        };
        for anchor in anchors {
            let reach = span.min(1e16 * anchor.scale.max(1e-300));
            let mut step = anchor.scale;
            if anchor.center > self.lower && anchor.center < self.upper {
                xs.push(anchor.center);
            }
            for _ in 0..60 {
                xs.push(anchor.center - step);
                xs.push(anchor.center + step);
                step *= 4.0;
                if step > reach {
                    break;
                }
            }
        }
        let mut ss: Vec<f64> = vec![0.0, 1.0];
        if !self.unbounded() {
            ss.extend([0.25, 0.5, 0.75]);
        }
        for x in xs {
            if x > self.lower && x < self.upper {
                let s = self.inverse_map(x);
                if s > 0.0 && s < 1.0 {
                    ss.push(s);
                }
            }
        }
        ss.sort_by(|a, b| a.total_cmp(b));
        ss.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
        ss
    }

    /// `∫ f(x) density(x) dx` over the support.
    pub(crate) fn integrate<T, F>(
        &self,
        f: F,
        anchors: &[Anchor],
        cfg: &QuadConfig,
    ) -> Result<QuadResult<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        let breaks = self.partition(anchors);
        let integrand = |s: f64| {
            let (x, jac) = self.map(s);
            if jac == 0.0 || x <= self.lower {
                return T::zero();
            }
            let d = (self.density)(x);
            if d == 0.0 {
                return T::zero();
            }
            let v = f(x) * (d * jac);
            if !v.is_finite_value() && x >= self.upper {
                // x rounded onto the edge; the point has measure zero.
                return T::zero();
            }
            v
        };
        integrate_partitioned(integrand, &breaks, cfg)
    }
}

/// A location/scale pair around which the initial quadrature partition is
/// refined geometrically (breakpoints at `center ± scale·4^k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub center: f64,
    pub scale: f64,
}

/// A probability measure with support bounded above.
#[derive(Debug, Clone)]
pub struct RealMeasure {
    density: Option<DensityPart>,
    atoms: Vec<Atom>,
}

impl RealMeasure {
    /// Builds and validates a probability measure (total mass within
    /// [`MASS_TOL`]).
    pub fn new(density: Option<DensityPart>, atoms: Vec<Atom>) -> Result<Self> {
        Self::with_mass_tolerance(density, atoms, MASS_TOL)
    }

    pub fn with_mass_tolerance(
        density: Option<DensityPart>,
        atoms: Vec<Atom>,
        tol: f64,
    ) -> Result<Self> {
        let measure = Self::from_parts(density, atoms)?;
        let mass = measure.total_mass()?;
        if (mass - 1.0).abs() > tol {
            return Err(Error::InvalidMeasure(format!(
                "total mass {mass} differs from 1 by more than {tol:e}"
            )));
        }
        Ok(measure)
    }

    /// Assembles a measure whose normalization is known analytically.
    pub(crate) fn from_parts(density: Option<DensityPart>, atoms: Vec<Atom>) -> Result<Self> {
        if density.is_none() && atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty measure".into()));
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(RealMeasure { density, atoms })
    }

    pub fn point_mass(location: f64) -> Result<Self> {
        Self::from_parts(None, vec![Atom::new(location, 1.0)?])
    }

    pub fn density_part(&self) -> Option<&DensityPart> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Density of the absolutely continuous part (zero outside its support).
    pub fn density_at(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(x))
    }

    /// A single point mass, which cannot generate a kernel family.
    pub fn is_degenerate(&self) -> bool {
        self.density.is_none()
            && self
                .atoms
                .windows(2)
                .all(|w| w[0].location == w[1].location)
    }

    /// Raw `b = sup supp`.
    pub fn support_sup(&self) -> f64 {
        let d = self.density.as_ref().map_or(f64::NEG_INFINITY, |d| d.upper);
        self.atoms.iter().map(|a| a.location).fold(d, f64::max)
    }

    /// `inf supp`, possibly `-inf`.
    pub fn support_inf(&self) -> f64 {
        let d = self.density.as_ref().map_or(f64::INFINITY, |d| d.lower);
        self.atoms.iter().map(|a| a.location).fold(d, f64::min)
    }

    /// `B = max(0, sup supp)`.
    pub fn support_bound_b(&self) -> f64 {
        self.support_sup().max(0.0)
    }

    pub fn is_compact(&self) -> bool {
        self.support_inf().is_finite()
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.integrate(|_| 1.0)
    }

    /// `∫ f dν` with the default tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate_with(f, &QuadConfig::default())
    }

    /// `∫ f dν`. When the support is unbounded below, the growth of `|f|` at
    /// `-inf` is probed and compared with the density's tail exponent; a
    /// non-integrable combination is reported as [`Error::DivergentIntegral`].
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F, cfg: &QuadConfig) -> Result<f64> {
        let mut total = 0.0;
        if let Some(d) = &self.density {
            if d.unbounded() {
                let beta = d.left_tail_exponent.unwrap_or(1.0);
                let growth = tail_growth(&f, d.upper);
                if beta - growth <= 1.0 + 1e-6 {
                    return Err(Error::DivergentIntegral(format!(
                        "integrand grows like |x|^{growth:.3} against a tail |x|^-{beta}"
                    )));
                }
            }
            let r = d.integrate(&f, &[], cfg)?;
            total += r.value;
        }
        total += self
            .atoms
            .iter()
            .map(|a| f(a.location) * a.weight)
            .sum::<f64>();
        Ok(total)
    }

    /// Generic integral used by the transforms: the density part with the
    /// given anchors plus the exact atom sum.
    pub(crate) fn integrate_value<T, F>(
        &self,
        f: F,
        anchors: &[Anchor],
        cfg: &QuadConfig,
    ) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        let mut total = T::zero();
        if let Some(d) = &self.density {
            total = total + d.integrate(&f, anchors, cfg)?.value;
        }
        for a in &self.atoms {
            total = total + f(a.location) * a.weight;
        }
        Ok(total)
    }

    /// `∫ x dν`, or `-inf` when the left tail makes it diverge.
    pub fn mean(&self) -> Result<ExtendedReal> {
        if let Some(d) = &self.density {
            if d.unbounded() && d.left_tail_exponent.is_some_and(|beta| beta <= 2.0) {
                return Ok(ExtendedReal::NegInfinity);
            }
        }
        Ok(ExtendedReal::Finite(self.integrate(|x| x)?))
    }

    /// Image under `x -> -x`; only defined for compactly supported measures.
    pub fn reflect(&self) -> Result<RealMeasure> {
        if !self.is_compact() {
            return Err(Error::InvalidMeasure(
                "reflection of a measure unbounded below is not bounded above".into(),
            ));
        }
        let density = match &self.density {
            Some(d) => {
                let f = d.density.clone();
                Some(DensityPart::from_arc(
                    Arc::new(move |x| f(-x)),
                    -d.upper,
                    -d.lower,
                    None,
                )?)
            }
            None => None,
        };
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: -a.location,
                weight: a.weight,
            })
            .collect();
        RealMeasure::from_parts(density, atoms)
    }

    /// Image under `x -> (x - shift)/scale` for `scale > 0`.
    pub fn affine_image(&self, shift: f64, scale: f64) -> Result<RealMeasure> {
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidMap(format!(
                "expected a positive finite scale, got {scale}"
            )));
        }
        let density = match &self.density {
            Some(d) => {
                let f = d.density.clone();
                let (lo, hi) = (d.lower, d.upper);
                Some(DensityPart::from_arc(
                    Arc::new(move |y| {
                        // Rounding can push nodes next to an edge outside the support.
                        let x = scale * y + shift;
                        if x > lo && x < hi {
                            scale * f(x)
                        } else {
                            0.0
                        }
                    }),
                    (d.lower - shift) / scale,
                    (d.upper - shift) / scale,
                    d.left_tail_exponent,
                )?)
            }
            None => None,
        };
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: (a.location - shift) / scale,
                weight: a.weight,
            })
            .collect();
        RealMeasure::from_parts(density, atoms)
    }

    /// Reweights the measure by a positive factor `g(x)`; the caller
    /// guarantees the result is a probability measure. `extra_decay` is added
    /// to the left tail exponent.
    pub(crate) fn reweighted<G>(&self, g: G, extra_decay: f64) -> Result<RealMeasure>
    where
        G: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    {
        let density = match &self.density {
            Some(d) => {
                let f = d.density.clone();
                let gd = g.clone();
                Some(DensityPart::from_arc(
                    Arc::new(move |x| gd(x) * f(x)),
                    d.lower,
                    d.upper,
                    d.left_tail_exponent.map(|b| b + extra_decay),
                )?)
            }
            None => None,
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let w = a.weight * g(a.location);
            if w > 0.0 {
                atoms.push(Atom {
                    location: a.location,
                    weight: w,
                });
            }
        }
        RealMeasure::from_parts(density, atoms)
    }
}

/// Power-law growth exponent of `|f|` at `-inf`, from two far probes.
fn tail_growth<F: Fn(f64) -> f64>(f: &F, upper: f64) -> f64 {
    let x1 = -1e6 * (1.0 + upper.abs());
    let x2 = 1e3 * x1;
    let f1 = f(x1).abs();
    let f2 = f(x2).abs();
    if f2 == 0.0 {
        return f64::NEG_INFINITY;
    }
    if f1 == 0.0 || !f1.is_finite() || !f2.is_finite() {
        return f64::INFINITY;
    }
    (f2 / f1).ln() / (x2 / x1).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn semicircle() -> RealMeasure {
        let d = DensityPart::new(
            |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI),
            -2.0,
            2.0,
            None,
        )
        .unwrap();
        RealMeasure::new(Some(d), vec![]).unwrap()
    }

    fn half_stable(p: f64) -> RealMeasure {
        let d = DensityPart::new(
            move |x: f64| p * (-p * p - 4.0 * x).max(0.0).sqrt() / (2.0 * PI * x * x),
            f64::NEG_INFINITY,
            -p * p / 4.0,
            Some(1.5),
        )
        .unwrap();
        RealMeasure::new(Some(d), vec![]).unwrap()
    }

    #[test]
    fn semicircle_mass_and_moments() {
        let nu = semicircle();
        assert_relative_eq!(nu.total_mass().unwrap(), 1.0, epsilon = 1e-12);
        assert!(nu.integrate(|x| x).unwrap().abs() < 1e-12);
        assert_relative_eq!(nu.integrate(|x| x * x).unwrap(), 1.0, epsilon = 1e-11);
        assert_relative_eq!(nu.integrate(|x| x.powi(4)).unwrap(), 2.0, epsilon = 1e-10);
        assert!(nu.mean().unwrap().finite().unwrap().abs() < 1e-12);
    }

    #[test]
    fn half_stable_is_a_probability_with_divergent_mean() {
        let nu = half_stable(1.0);
        assert!((nu.total_mass().unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(
            nu.integrate(|x| x),
            Err(Error::DivergentIntegral(_))
        ));
        assert_eq!(nu.mean().unwrap(), ExtendedReal::NegInfinity);
        assert_eq!(nu.support_bound_b(), 0.0);
        assert_eq!(nu.support_sup(), -0.25);
    }

    #[test]
    fn free_ressel_support_bound() {
        let d = DensityPart::new(
            |x: f64| -1.0 / (PI * x * (-1.0 - x).sqrt()),
            f64::NEG_INFINITY,
            -1.0,
            Some(1.5),
        )
        .unwrap();
        let nu = RealMeasure::new(Some(d), vec![]).unwrap();
        assert_eq!(nu.support_bound_b(), 0.0);
        assert_eq!(nu.support_sup(), -1.0);
    }

    #[test]
    fn semicircle_bound() {
        assert_eq!(semicircle().support_bound_b(), 2.0);
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(DensityPart::new(|_| 1.0, f64::NEG_INFINITY, 0.0, None).is_err());
        assert!(DensityPart::new(|_| 1.0, f64::NEG_INFINITY, 0.0, Some(0.5)).is_err());
        assert!(DensityPart::new(|_| 1.0, 1.0, 0.0, None).is_err());
        assert!(Atom::new(0.0, 0.0).is_err());
        assert!(Atom::new(f64::NAN, 0.5).is_err());
        let d = DensityPart::new(|_| 2.0, 0.0, 1.0, None).unwrap();
        assert!(RealMeasure::new(Some(d), vec![]).is_err());
    }

    #[test]
    fn atoms_are_summed_exactly() {
        let nu = RealMeasure::new(
            None,
            vec![
                Atom::new(-1.0, 0.25).unwrap(),
                Atom::new(3.0, 0.75).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(nu.integrate(|x| x).unwrap(), 2.0);
        assert_eq!(nu.support_sup(), 3.0);
        assert!(!nu.is_degenerate());
        assert!(RealMeasure::point_mass(0.0).unwrap().is_degenerate());
    }

    #[test]
    fn affine_image_and_reflection() {
        let nu = semicircle();
        let shifted = nu.affine_image(0.5, 1.0).unwrap();
        assert_relative_eq!(shifted.support_sup(), 1.5);
        assert_relative_eq!(shifted.mean().unwrap().to_f64(), -0.5, epsilon = 1e-11);
        let r = nu.affine_image(1.0, 2.0).unwrap().reflect().unwrap();
        assert_relative_eq!(r.support_sup(), 1.5);
        assert_relative_eq!(r.total_mass().unwrap(), 1.0, epsilon = 1e-11);
        assert!(half_stable(1.0).reflect().is_err());
    }
}
