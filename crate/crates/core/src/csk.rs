//! Cauchy-Stieltjes kernel families generated by a measure with support
//! bounded above.

use std::fmt;
use std::sync::Arc;

use crate::algebraic::AlgebraicCauchy;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::measure::RealMeasure;
use crate::roots::{brent, expand_until, shrink_until, TAU_ROOT};
use crate::transforms::{CauchyTransform, ClosedTransform, TransformEvaluator};

/// A pseudo-variance function, either closed form or derived from a family.
#[derive(Clone)]
pub enum PseudoVariance {
    Numeric(Arc<CSKFamily>),
    /// `m (a - b m + c m²)/(m - m0)`.
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
        m0: f64,
    },
    /// `m (a m² + b m + c)`.
    Cubic {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl fmt::Debug for PseudoVariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PseudoVariance::Numeric(fam) => {
                write!(f, "Numeric(m0 = {}, m+ = {})", fam.m0, fam.m_plus)
            }
            PseudoVariance::Quadratic { a, b, c, m0 } => {
                write!(f, "Quadratic {{ a: {a}, b: {b}, c: {c}, m0: {m0} }}")
            }
            PseudoVariance::Cubic { a, b, c } => write!(f, "Cubic {{ a: {a}, b: {b}, c: {c} }}"),
        }
    }
}

impl PseudoVariance {
    pub fn eval(&self, m: f64) -> Result<f64> {
        match *self {
            PseudoVariance::Numeric(ref fam) => fam.pseudo_variance(m),
            PseudoVariance::Quadratic { a, b, c, m0 } => {
                if m == m0 {
                    return Err(Error::domain(m, format!("m != {m0}")));
                }
                Ok(m * (a - b * m + c * m * m) / (m - m0))
            }
            PseudoVariance::Cubic { a, b, c } => Ok(m * (a * m * m + b * m + c)),
        }
    }

    /// `m0`, the lower end of the mean domain.
    pub fn m0(&self) -> ExtendedReal {
        match *self {
            PseudoVariance::Numeric(ref fam) => fam.m0,
            PseudoVariance::Quadratic { m0, .. } => ExtendedReal::Finite(m0),
            PseudoVariance::Cubic { .. } => ExtendedReal::NegInfinity,
        }
    }

    /// The Cauchy transform determined by a closed-form pseudo-variance.
    pub fn to_algebraic(&self) -> Result<AlgebraicCauchy> {
        match *self {
            PseudoVariance::Numeric(_) => Err(Error::InvalidPv(
                "only the quadratic and cubic shapes can be inverted".into(),
            )),
            PseudoVariance::Quadratic { a, b, c, m0 } => AlgebraicCauchy::quadratic(a, b, c, m0),
            PseudoVariance::Cubic { a, b, c } => AlgebraicCauchy::cubic(a, b, c),
        }
    }

    /// The family generated by the measure that this pseudo-variance
    /// determines, backed by the closed-form transform.
    pub fn to_family(&self) -> Result<CSKFamily> {
        let alg = self.to_algebraic()?;
        let measure = alg.to_measure()?;
        CSKFamily::from_transform(ClosedTransform::new(alg, self.m0()), measure)
    }
}

/// Recovers the generating measure of a closed-form pseudo-variance.
pub fn pv_to_generator(pv: &PseudoVariance) -> Result<RealMeasure> {
    pv.to_algebraic()?.to_measure()
}

/// `(m0, m+)`, plus `m-` when the generator is compactly supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanDomain {
    pub m0: ExtendedReal,
    pub m_plus: f64,
    pub m_minus: Option<f64>,
}

/// A member `Q_m` of the family.
#[derive(Debug, Clone)]
pub struct MemberDensity {
    pub mean: f64,
    pub pv_at_mean: f64,
    /// `1/ψ(m)`.
    pub z: f64,
    pub measure: RealMeasure,
}

impl MemberDensity {
    /// `𝕍(m)/(𝕍(m) + m(m - x))`, evaluated as `(z - m)/(z - x)`.
    pub fn factor(&self, x: f64) -> f64 {
        (self.z - self.mean) / (self.z - x)
    }
}

#[derive(Clone)]
pub struct CSKFamily {
    transform: Arc<dyn CauchyTransform>,
    generator: RealMeasure,
    theta_plus: ExtendedReal,
    m0: ExtendedReal,
    m_plus: f64,
}

impl fmt::Debug for CSKFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CSKFamily")
            .field("theta_plus", &self.theta_plus)
            .field("m0", &self.m0)
            .field("m_plus", &self.m_plus)
            .finish()
    }
}

impl CSKFamily {
    /// Family with transforms evaluated by quadrature against `generator`.
    pub fn new(generator: RealMeasure) -> Result<Self> {
        if generator.is_degenerate() {
            return Err(Error::InvalidMeasure(
                "a point mass does not generate a family".into(),
            ));
        }
        let ev = TransformEvaluator::new(generator.clone())?;
        Self::from_transform(ev, generator)
    }

    /// Family whose transforms come from `transform`, which must be the
    /// Cauchy transform of `generator`.
    pub fn from_transform<T: CauchyTransform + 'static>(
        transform: T,
        generator: RealMeasure,
    ) -> Result<Self> {
        if generator.is_degenerate() {
            return Err(Error::InvalidMeasure(
                "a point mass does not generate a family".into(),
            ));
        }
        let big_b = transform.support_bound_b();
        let m_plus = big_b - transform.g_at_b().recip().to_f64();
        Ok(CSKFamily {
            theta_plus: ExtendedReal::Finite(big_b).recip(),
            m0: transform.mean(),
            m_plus,
            transform: Arc::new(transform),
            generator,
        })
    }

    pub fn generator(&self) -> &RealMeasure {
        &self.generator
    }

    pub fn transform(&self) -> &dyn CauchyTransform {
        self.transform.as_ref()
    }

    pub fn theta_plus(&self) -> ExtendedReal {
        self.theta_plus
    }

    pub fn m0(&self) -> ExtendedReal {
        self.m0
    }

    pub fn m_plus(&self) -> f64 {
        self.m_plus
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        if theta > 0.0 && theta < self.theta_plus.to_f64() {
            Ok(())
        } else {
            Err(Error::domain(theta, format!("(0, {})", self.theta_plus)))
        }
    }

    fn check_mean(&self, m: f64) -> Result<()> {
        if m > self.m0.to_f64() && m < self.m_plus {
            Ok(())
        } else {
            Err(Error::domain(m, format!("({}, {})", self.m0, self.m_plus)))
        }
    }

    /// `M(θ) = ∫ 1/(1 - θx) dν = G(1/θ)/θ`.
    pub fn normalizer_m(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        let u = 1.0 / theta;
        Ok(u * self.transform.g_real(u)?)
    }

    /// `m(θ) = (M(θ) - 1)/(θ M(θ))`.
    pub fn mean_of_theta(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        self.transform.mean_at(1.0 / theta)
    }

    /// `z(m) = 1/ψ(m)`, the point above `B` at which the member mean is `m`.
    pub fn z_of_mean(&self, m: f64) -> Result<f64> {
        self.check_mean(m)?;
        let big_b = self.transform.support_bound_b();
        let t = self.transform.as_ref();
        let f = |u: f64| -> Result<f64> { Ok(t.mean_at(u)? - m) };
        let step = 1.0 + big_b.abs();
        let lo = shrink_until(big_b, step, |u| Ok(f(u)? > 0.0))?;
        let hi = expand_until(big_b, step, |u| Ok(f(u)? < 0.0))?;
        brent(f, lo, hi, TAU_ROOT * 1e-2)
    }

    /// `ψ(m)`, the inverse of `θ -> m(θ)`.
    pub fn psi_of_mean(&self, m: f64) -> Result<f64> {
        Ok(1.0 / self.z_of_mean(m)?)
    }

    /// `𝕍(m) = m (1/ψ(m) - m)`.
    pub fn pseudo_variance(&self, m: f64) -> Result<f64> {
        let z = self.z_of_mean(m)?;
        Ok(m * (z - m))
    }

    /// `V(m) = (m - m0)/m 𝕍(m)`, evaluated as `(m - m0)(1/ψ(m) - m)`.
    pub fn variance_function(&self, m: f64) -> Result<f64> {
        let m0 = self.m0.finite().ok_or(Error::MeanUndefined)?;
        let z = self.z_of_mean(m)?;
        Ok((m - m0) * (z - m))
    }

    /// The member with mean `m`.
    pub fn member(&self, m: f64) -> Result<MemberDensity> {
        let z = self.z_of_mean(m)?;
        let numer = z - m;
        let measure = self.generator.reweighted(move |x| numer / (z - x), 1.0)?;
        Ok(MemberDensity {
            mean: m,
            pv_at_mean: m * (z - m),
            z,
            measure,
        })
    }

    /// `(m0, m+)`; for compact generators also `m- = A - 1/G(A)` with
    /// `A = min(0, inf supp)`, obtained from the reflected generator.
    pub fn mean_domain(&self) -> Result<MeanDomain> {
        let m_minus = if self.generator.is_compact() {
            let reflected = TransformEvaluator::new(self.generator.reflect()?)?;
            let big_a = reflected.support_bound_b();
            Some(-(big_a - reflected.g_at_b().recip().to_f64()))
        } else {
            None
        };
        Ok(MeanDomain {
            m0: self.m0,
            m_plus: self.m_plus,
            m_minus,
        })
    }

    /// `(g(m,x) - g(0,x))/m - (x - m)/𝕍(m) g(m,x)` with
    /// `g(m,x) = 𝕍(m)/(𝕍(m) + m(m - x))`.
    pub fn bis_residual(&self, m: f64, x: f64) -> Result<f64> {
        if !(self.m0.to_f64() < 0.0 && self.m_plus > 0.0) {
            return Err(Error::domain(
                0.0,
                format!("({}, {})", self.m0, self.m_plus),
            ));
        }
        if m == 0.0 {
            return Err(Error::domain(m, "m != 0"));
        }
        let v = self.pseudo_variance(m)?;
        let g = v / (v + m * (m - x));
        Ok((g - 1.0) / m - (x - m) / v * g)
    }
}
