//! Catalog of laws with closed-form pseudo-variance functions.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebraic::AlgebraicCauchy;
use crate::csk::{CSKFamily, PseudoVariance};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::measure::{Atom, DensityPart, RealMeasure};
use crate::transforms::{CauchyTransform, ClosedTransform};

/// Mass tolerance for laws with a `|x|^{-3/2}` left tail.
pub const HEAVY_TAIL_MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    Semicircle {
        center: f64,
        variance: f64,
    },
    /// Variance function `a - b m + c m²` with mean 0.
    QuadraticFreeMeixner {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Pseudo-variance `m (a m² + b m + c)`.
    Cubic {
        a: f64,
        b: f64,
        c: f64,
    },
    FreeHalfStable {
        p: f64,
    },
    FreeAbel {},
    FreeRessel {},
    FreeStrictArcsine {},
    FreeLargeArcsine {
        r: f64,
    },
    FreeTakacs {
        r: f64,
    },
}

/// Which branch of the domain-of-means tables produced `m+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainCase {
    /// `-(1 + b)/(2a)`.
    CubicInterior,
    /// `-(b + sqrt(b² - 4ac))/(2a)`, the atom.
    CubicAtom,
    /// `-(b + 1 + sqrt((b + 1)² - 4ac))/(2a)`, the support edge.
    CubicEdge,
    /// `(b - sqrt(b² - 4ac))/(2c)`.
    MeixnerRoot,
    /// `a/b`.
    MeixnerAtom,
    /// `sqrt(a/(1 + c))`.
    MeixnerNoAtom,
    /// No table entry applies; `B - 1/G(B)` from the closed-form transform.
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainUpper {
    pub value: f64,
    pub case: DomainCase,
}

impl LawSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} must be finite, got {v}"
                )))
            }
        };
        match *self {
            LawSpec::Semicircle { center, variance } => {
                finite("center", center)?;
                positive("variance", variance)
            }
            LawSpec::QuadraticFreeMeixner { a, b, c } | LawSpec::Cubic { a, b, c } => {
                positive("a", a)?;
                finite("b", b)?;
                finite("c", c)
            }
            LawSpec::FreeHalfStable { p } => positive("p", p),
            LawSpec::FreeLargeArcsine { r } | LawSpec::FreeTakacs { r } => positive("r", r),
            LawSpec::FreeAbel {} | LawSpec::FreeRessel {} | LawSpec::FreeStrictArcsine {} => Ok(()),
        }
    }

    /// `(a, b, c)` of the cubic pseudo-variance, for the cubic kinds.
    pub fn cubic_params(&self) -> Option<(f64, f64, f64)> {
        match *self {
            LawSpec::Cubic { a, b, c } => Some((a, b, c)),
            LawSpec::FreeHalfStable { p } => Some((1.0 / (p * p), 0.0, 0.0)),
            LawSpec::FreeAbel {} => Some((1.0, -1.0, 0.0)),
            LawSpec::FreeRessel {} => Some((1.0, 1.0, 0.0)),
            LawSpec::FreeStrictArcsine {} => Some((1.0, 0.0, 1.0)),
            LawSpec::FreeLargeArcsine { r } => Some(((1.0 + r * r) / (r * r), 2.0, 1.0)),
            LawSpec::FreeTakacs { r } => Some(((1.0 + r) / r, (1.0 + 2.0 * r) / r, 1.0)),
            LawSpec::Semicircle { .. } | LawSpec::QuadraticFreeMeixner { .. } => None,
        }
    }

    pub fn pseudo_variance(&self) -> Result<PseudoVariance> {
        self.validate()?;
        Ok(match *self {
            LawSpec::Semicircle { center, variance } => PseudoVariance::Quadratic {
                a: variance,
                b: 0.0,
                c: 0.0,
                m0: center,
            },
            LawSpec::QuadraticFreeMeixner { a, b, c } => {
                PseudoVariance::Quadratic { a, b, c, m0: 0.0 }
            }
            _ => {
                let (a, b, c) = self.cubic_params().expect("cubic kind");
                PseudoVariance::Cubic { a, b, c }
            }
        })
    }

    pub fn algebraic(&self) -> Result<AlgebraicCauchy> {
        self.pseudo_variance()?.to_algebraic().map_err(|e| match e {
            Error::InvalidPv(msg) => Error::InvalidSpec(msg),
            other => other,
        })
    }

    pub fn mean(&self) -> ExtendedReal {
        match *self {
            LawSpec::Semicircle { center, .. } => ExtendedReal::Finite(center),
            LawSpec::QuadraticFreeMeixner { .. } => ExtendedReal::Finite(0.0),
            _ => ExtendedReal::NegInfinity,
        }
    }

    pub fn closed_transform(&self) -> Result<ClosedTransform> {
        Ok(ClosedTransform::new(self.algebraic()?, self.mean()))
    }

    /// Closed-form Cauchy transform off the slit.
    pub fn closed_g(&self, z: Complex64) -> Result<Complex64> {
        self.closed_transform()?.g(z)
    }

    /// Closed-form R-transform on `(0, G(B))`.
    pub fn closed_r(&self, w: f64) -> Result<f64> {
        self.closed_transform()?.r_transform(w)
    }

    /// Closed-form pseudo-variance on the mean domain.
    pub fn closed_pv(&self, m: f64) -> Result<f64> {
        let m0 = self.mean().to_f64();
        let upper = self.mean_domain_upper()?.value;
        if !(m > m0 && m < upper) {
            return Err(Error::domain(m, format!("({m0}, {upper})")));
        }
        self.pseudo_variance()?.eval(m)
    }

    /// The generating measure, from the literal density formulas.
    pub fn build_measure(&self) -> Result<RealMeasure> {
        self.validate()?;
        let heavy = |d: DensityPart, atoms: Vec<Atom>| {
            RealMeasure::with_mass_tolerance(Some(d), atoms, HEAVY_TAIL_MASS_TOL)
        };
        let to_spec = |e: Error| match e {
            Error::InvalidMeasure(msg) => Error::InvalidSpec(msg),
            other => other,
        };
        let built = match *self {
            LawSpec::Semicircle { center, variance } => {
                let s = variance.sqrt();
                let d = DensityPart::new(
                    move |x| {
                        (4.0 * variance - (x - center).powi(2)).max(0.0).sqrt()
                            / (2.0 * PI * variance)
                    },
                    center - 2.0 * s,
                    center + 2.0 * s,
                    None,
                )?;
                RealMeasure::new(Some(d), vec![])
            }
            LawSpec::QuadraticFreeMeixner { .. } => self.algebraic()?.to_measure(),
            LawSpec::Cubic { a, b, c } => {
                let edge = c - (b + 1.0).powi(2) / (4.0 * a);
                let d = DensityPart::new(
                    move |x| {
                        (4.0 * a * c - (b + 1.0).powi(2) - 4.0 * a * x)
                            .max(0.0)
                            .sqrt()
                            / (2.0 * PI * (c + b * x + a * x * x))
                    },
                    f64::NEG_INFINITY,
                    edge,
                    Some(1.5),
                )?;
                let mut atoms = Vec::new();
                let disc = b * b - 4.0 * a * c;
                if disc > 1.0 {
                    let s = disc.sqrt();
                    atoms.push(Atom::new(-(b + s) / (2.0 * a), 1.0 - 1.0 / s)?);
                }
                heavy(d, atoms)
            }
            LawSpec::FreeHalfStable { p } => {
                let d = DensityPart::new(
                    move |x: f64| p * (-p * p - 4.0 * x).max(0.0).sqrt() / (2.0 * PI * x * x),
                    f64::NEG_INFINITY,
                    -p * p / 4.0,
                    Some(1.5),
                )?;
                heavy(d, vec![])
            }
            LawSpec::FreeAbel {} => {
                let d = DensityPart::new(
                    |x: f64| 1.0 / (PI * (1.0 - x) * (-x).sqrt()),
                    f64::NEG_INFINITY,
                    0.0,
                    Some(1.5),
                )?;
                heavy(d, vec![])
            }
            LawSpec::FreeRessel {} => {
                let d = DensityPart::new(
                    |x: f64| -1.0 / (PI * x * (-1.0 - x).sqrt()),
                    f64::NEG_INFINITY,
                    -1.0,
                    Some(1.5),
                )?;
                heavy(d, vec![])
            }
            LawSpec::FreeStrictArcsine {} => {
                let d = DensityPart::new(
                    |x: f64| (3.0 - 4.0 * x).max(0.0).sqrt() / (2.0 * PI * (1.0 + x * x)),
                    f64::NEG_INFINITY,
                    0.75,
                    Some(1.5),
                )?;
                heavy(d, vec![])
            }
            LawSpec::FreeLargeArcsine { r } => {
                let r2 = r * r;
                let d = DensityPart::new(
                    move |x: f64| {
                        r * (4.0 - 5.0 * r2 - 4.0 * (1.0 + r2) * x).max(0.0).sqrt()
                            / (2.0 * PI * (x * x + r2 * (1.0 + x).powi(2)))
                    },
                    f64::NEG_INFINITY,
                    (4.0 - 5.0 * r2) / (4.0 * (1.0 + r2)),
                    Some(1.5),
                )?;
                heavy(d, vec![])
            }
            LawSpec::FreeTakacs { r } => {
                let d = DensityPart::new(
                    move |x: f64| {
                        (-5.0 * r * r - 2.0 * r - 1.0 - 4.0 * r * (1.0 + r) * x)
                            .max(0.0)
                            .sqrt()
                            / (2.0 * PI * r * (1.0 + x) * (1.0 + (1.0 + 1.0 / r) * x))
                    },
                    f64::NEG_INFINITY,
                    1.0 - (1.0 + 3.0 * r).powi(2) / (4.0 * r * (1.0 + r)),
                    Some(1.5),
                )?;
                let atoms = if r < 1.0 {
                    vec![Atom::new(-1.0, 1.0 - r)?]
                } else {
                    vec![]
                };
                heavy(d, atoms)
            }
        };
        built.map_err(to_spec)
    }

    /// Family backed by the closed-form transform.
    pub fn closed_family(&self) -> Result<CSKFamily> {
        CSKFamily::from_transform(self.closed_transform()?, self.build_measure()?)
    }

    /// Family backed by quadrature against the literal density.
    pub fn numeric_family(&self) -> Result<CSKFamily> {
        CSKFamily::new(self.build_measure()?)
    }

    /// `m+` from the domain-of-means tables, or from the closed-form
    /// transform when no table entry applies.
    pub fn mean_domain_upper(&self) -> Result<DomainUpper> {
        self.validate()?;
        let table = match *self {
            LawSpec::Semicircle { center, variance } => {
                let s = variance.sqrt();
                // Shift of the m0 = 0 entry; valid while the support reaches 0.
                if center + 2.0 * s >= 0.0 {
                    Some(DomainUpper {
                        value: center + s,
                        case: DomainCase::MeixnerNoAtom,
                    })
                } else {
                    None
                }
            }
            LawSpec::QuadraticFreeMeixner { a, b, c } => self.meixner_case(a, b, c)?,
            _ => {
                let (a, b, c) = self.cubic_params().expect("cubic kind");
                Some(cubic_case(a, b, c))
            }
        };
        match table {
            Some(t) => Ok(t),
            None => {
                let t = self.closed_transform()?;
                let value = t.support_bound_b() - t.g_at_b().recip().to_f64();
                Ok(DomainUpper {
                    value,
                    case: DomainCase::Ambiguous,
                })
            }
        }
    }

    fn meixner_case(&self, a: f64, b: f64, c: f64) -> Result<Option<DomainUpper>> {
        if (c > 0.0 && b > 2.0 * (a * c).sqrt()) || (-1.0..0.0).contains(&c) {
            return Ok(Some(DomainUpper {
                value: (b - (b * b - 4.0 * a * c).sqrt()) / (2.0 * c),
                case: DomainCase::MeixnerRoot,
            }));
        }
        if c == 0.0 && b > a.sqrt() {
            return Ok(Some(DomainUpper {
                value: a / b,
                case: DomainCase::MeixnerAtom,
            }));
        }
        let positive_atom = self.algebraic()?.atoms().iter().any(|at| at.location > 0.0);
        if positive_atom {
            return Ok(None);
        }
        Ok(Some(DomainUpper {
            value: (a / (1.0 + c)).sqrt(),
            case: DomainCase::MeixnerNoAtom,
        }))
    }

    /// Laws known to be free infinitely divisible, for which every
    /// convolution power `α > 0` exists.
    pub fn is_free_infinitely_divisible(&self) -> bool {
        matches!(
            self,
            LawSpec::Semicircle { .. } | LawSpec::FreeHalfStable { .. }
        )
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LawSpec::Semicircle { center, variance } => {
                write!(f, "semicircle({center},{variance})")
            }
            LawSpec::QuadraticFreeMeixner { a, b, c } => {
                write!(f, "quadratic-free-meixner({a},{b},{c})")
            }
            LawSpec::Cubic { a, b, c } => write!(f, "cubic({a},{b},{c})"),
            LawSpec::FreeHalfStable { p } => write!(f, "free-half-stable({p})"),
            LawSpec::FreeAbel {} => write!(f, "free-abel"),
            LawSpec::FreeRessel {} => write!(f, "free-ressel"),
            LawSpec::FreeStrictArcsine {} => write!(f, "free-strict-arcsine"),
            LawSpec::FreeLargeArcsine { r } => write!(f, "free-large-arcsine({r})"),
            LawSpec::FreeTakacs { r } => write!(f, "free-takacs({r})"),
        }
    }
}

fn cubic_case(a: f64, b: f64, c: f64) -> DomainUpper {
    let k = (1.0 + 4.0 * a * c).max(0.0).sqrt();
    if c > 0.0 && -k <= b && b <= 2.0 * (a * c).sqrt() - 1.0 {
        DomainUpper {
            value: -(1.0 + b) / (2.0 * a),
            case: DomainCase::CubicInterior,
        }
    } else if c > 0.0 && b <= -k {
        DomainUpper {
            value: -(b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a),
            case: DomainCase::CubicAtom,
        }
    } else {
        let b1 = b + 1.0;
        DomainUpper {
            value: -(b1 + (b1 * b1 - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a),
            case: DomainCase::CubicEdge,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn json_round_trip_and_rejection() {
        let spec: LawSpec =
            serde_json::from_str(r#"{"kind":"cubic","a":1.0,"b":0.0,"c":0.0}"#).unwrap();
        assert_eq!(
            spec,
            LawSpec::Cubic {
                a: 1.0,
                b: 0.0,
                c: 0.0
            }
        );
        let t: LawSpec = serde_json::from_str(r#"{"kind":"free-takacs","r":0.5}"#).unwrap();
        assert_eq!(t, LawSpec::FreeTakacs { r: 0.5 });
        let abel: LawSpec = serde_json::from_str(r#"{"kind":"free-abel"}"#).unwrap();
        assert_eq!(abel, LawSpec::FreeAbel {});
        assert!(
            serde_json::from_str::<LawSpec>(r#"{"kind":"cubic","a":1,"b":0,"c":0,"d":1}"#).is_err()
        );
        assert!(serde_json::from_str::<LawSpec>(r#"{"kind":"free-abel","r":1}"#).is_err());
        assert!(serde_json::from_str::<LawSpec>(r#"{"kind":"gamma"}"#).is_err());
        let text = serde_json::to_string(&LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        })
        .unwrap();
        assert!(text.contains(r#""kind":"quadratic-free-meixner""#));
    }

    #[test]
    fn validation() {
        assert!(LawSpec::Cubic {
            a: 0.0,
            b: 0.0,
            c: 0.0
        }
        .validate()
        .is_err());
        assert!(LawSpec::FreeHalfStable { p: -1.0 }.build_measure().is_err());
        assert!(LawSpec::FreeTakacs { r: 0.0 }.validate().is_err());
        assert!(LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 0.0,
            c: -2.0
        }
        .algebraic()
        .is_err());
    }

    #[test]
    fn named_laws_match_cubic_parametrization() {
        let laws = [
            LawSpec::FreeAbel {},
            LawSpec::FreeRessel {},
            LawSpec::FreeStrictArcsine {},
            LawSpec::FreeLargeArcsine { r: 0.5 },
            LawSpec::FreeLargeArcsine { r: 1.0 },
            LawSpec::FreeTakacs { r: 0.5 },
            LawSpec::FreeHalfStable { p: 2.0 },
        ];
        for law in laws {
            let nu = law.build_measure().unwrap();
            let alg = law.algebraic().unwrap();
            let (lo, hi) = alg.continuous_support().unwrap();
            assert_eq!(lo, f64::NEG_INFINITY);
            assert_relative_eq!(nu.density_part().unwrap().upper(), hi, epsilon = 1e-12);
            for k in 1..=5 {
                let x = hi - 0.37 * k as f64 * k as f64;
                assert_relative_eq!(nu.density_at(x), alg.density(x), max_relative = 1e-10);
            }
            assert_eq!(nu.atoms().len(), alg.atoms().len(), "{law:?}");
        }
    }

    #[test]
    fn cubic_and_half_stable_agree() {
        let c = LawSpec::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }
        .build_measure()
        .unwrap();
        let h = LawSpec::FreeHalfStable { p: 1.0 }.build_measure().unwrap();
        assert_eq!(
            c.density_part().unwrap().upper(),
            h.density_part().unwrap().upper()
        );
        for x in [-0.3, -1.0, -2.5, -10.0, -100.0] {
            assert_relative_eq!(c.density_at(x), h.density_at(x), max_relative = 1e-14);
        }
    }

    #[test]
    fn takacs_atom() {
        let nu = LawSpec::FreeTakacs { r: 0.5 }.build_measure().unwrap();
        assert_eq!(
            nu.atoms(),
            &[Atom {
                location: -1.0,
                weight: 0.5
            }]
        );
        assert!(LawSpec::FreeTakacs { r: 2.0 }
            .build_measure()
            .unwrap()
            .atoms()
            .is_empty());
    }

    #[test]
    fn closed_values() {
        let cubic = LawSpec::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        };
        assert_relative_eq!(
            cubic.closed_g(Complex64::new(2.0, 0.0)).unwrap().re,
            0.25,
            epsilon = 1e-15
        );
        let z = Complex64::new(1e6, 0.0);
        let hs = LawSpec::FreeHalfStable { p: 1.0 };
        assert!((z * hs.closed_g(z).unwrap() - 1.0).norm() < 1e-2);
        let sc = LawSpec::Semicircle {
            center: 0.0,
            variance: 1.0,
        };
        assert_relative_eq!(
            sc.closed_g(Complex64::new(2.0, 0.0)).unwrap().re,
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(hs.closed_r(0.25).unwrap(), -2.0, epsilon = 1e-14);
        assert_relative_eq!(LawSpec::FreeRessel {}.closed_pv(-3.0).unwrap(), -18.0);
        assert_relative_eq!(LawSpec::FreeStrictArcsine {}.closed_pv(-1.0).unwrap(), -2.0);
        assert_relative_eq!(
            LawSpec::FreeLargeArcsine { r: 1.0 }
                .closed_pv(-2.0)
                .unwrap(),
            -10.0
        );
        assert_relative_eq!(LawSpec::FreeAbel {}.closed_pv(-1.0).unwrap(), -2.0);
        assert!(LawSpec::FreeRessel {}.closed_pv(-1.0).is_err());
    }

    #[test]
    fn domain_tables() {
        let cases = [
            (
                LawSpec::Cubic {
                    a: 1.0,
                    b: 0.0,
                    c: 0.0,
                },
                -1.0,
                DomainCase::CubicEdge,
            ),
            (
                LawSpec::FreeStrictArcsine {},
                -0.5,
                DomainCase::CubicInterior,
            ),
            (LawSpec::FreeRessel {}, -2.0, DomainCase::CubicEdge),
            (LawSpec::FreeAbel {}, 0.0, DomainCase::CubicEdge),
            (
                LawSpec::FreeLargeArcsine { r: 1.0 },
                -1.0,
                DomainCase::CubicEdge,
            ),
            (
                LawSpec::Cubic {
                    a: 1.0,
                    b: 2.0,
                    c: 0.0,
                },
                -3.0,
                DomainCase::CubicEdge,
            ),
            (
                LawSpec::QuadraticFreeMeixner {
                    a: 1.0,
                    b: 0.0,
                    c: 0.0,
                },
                1.0,
                DomainCase::MeixnerNoAtom,
            ),
            (
                LawSpec::QuadraticFreeMeixner {
                    a: 1.0,
                    b: 2.0,
                    c: 0.0,
                },
                0.5,
                DomainCase::MeixnerAtom,
            ),
        ];
        for (law, value, case) in cases {
            let d = law.mean_domain_upper().unwrap();
            assert_relative_eq!(d.value, value, epsilon = 1e-14);
            assert_eq!(d.case, case, "{law:?}");
        }
        let r = 0.5;
        let d = LawSpec::FreeLargeArcsine { r }.mean_domain_upper().unwrap();
        assert_relative_eq!(
            d.value,
            -3.0 * r * r / (2.0 * (1.0 + r * r)),
            epsilon = 1e-14
        );
        let t = LawSpec::FreeTakacs { r }.mean_domain_upper().unwrap();
        let expected =
            -(1.0 + 3.0 * r + (5.0 * r * r + 2.0 * r + 1.0f64).sqrt()) / (2.0 * (1.0 + r));
        assert_relative_eq!(t.value, expected, epsilon = 1e-14);
    }

    #[test]
    fn table_matches_closed_transform() {
        let laws = [
            LawSpec::FreeTakacs { r: 0.5 },
            LawSpec::FreeTakacs { r: 2.0 },
            LawSpec::FreeLargeArcsine { r: 0.5 },
            LawSpec::Cubic {
                a: 1.0,
                b: -3.0,
                c: 1.0,
            },
            LawSpec::Cubic {
                a: 1.0,
                b: -2.0,
                c: 0.0,
            },
            LawSpec::QuadraticFreeMeixner {
                a: 1.0,
                b: 3.0,
                c: 1.0,
            },
            LawSpec::QuadraticFreeMeixner {
                a: 1.0,
                b: -3.0,
                c: 1.0,
            },
            LawSpec::QuadraticFreeMeixner {
                a: 1.0,
                b: 1.0,
                c: -0.5,
            },
        ];
        for law in laws {
            let t = law.closed_transform().unwrap();
            let numeric = t.support_bound_b() - t.g_at_b().recip().to_f64();
            let d = law.mean_domain_upper().unwrap();
            assert_relative_eq!(d.value, numeric, epsilon = 1e-10);
        }
    }
}
