//! Free additive convolution powers, affine images and the reproductive
//! property, at the level of R-transforms and pseudo-variance functions.

use num_complex::Complex64;

use crate::csk::{pv_to_generator, CSKFamily, PseudoVariance};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::laws::LawSpec;
use crate::measure::RealMeasure;
use crate::transforms::{CauchyTransform, ClosedTransform, TransformEvaluator};

/// The map `x -> (x - gamma)/delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    gamma: f64,
    delta: f64,
}

impl AffineMap {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma.is_finite() && delta.is_finite()) || delta == 0.0 {
            return Err(Error::InvalidMap(format!(
                "gamma = {gamma}, delta = {delta}"
            )));
        }
        Ok(AffineMap { gamma, delta })
    }

    /// The dilation `D_r: x -> r x`.
    pub fn dilation(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidMap(format!("dilation factor {r}")));
        }
        Self::new(0.0, 1.0 / r)
    }

    pub fn reflection() -> Self {
        AffineMap {
            gamma: 0.0,
            delta: -1.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.gamma) / self.delta
    }

    /// Image of an extended mean, flipping infinities when `delta < 0`.
    pub fn apply_extended(&self, x: ExtendedReal) -> ExtendedReal {
        x.affine(self.gamma, self.delta)
    }

    /// `𝕍_φ(m) = m/(δ(δm + γ)) 𝕍(δm + γ)`.
    pub fn pseudo_variance<F>(&self, pv: F, m: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let inner = self.delta * m + self.gamma;
        if inner == 0.0 {
            return Err(Error::domain(
                m,
                format!("m != {}", -self.gamma / self.delta),
            ));
        }
        Ok(m / (self.delta * inner) * pv(inner)?)
    }

    /// Mean domain of the image family: `((m0 - γ)/δ, (m+ - γ)/δ)` for
    /// `δ > 0`, reversed for `δ < 0`.
    pub fn mean_domain(&self, m0: ExtendedReal, m_plus: f64) -> (ExtendedReal, ExtendedReal) {
        let a = self.apply_extended(m0);
        let b = ExtendedReal::Finite(self.apply(m_plus));
        if self.delta > 0.0 {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Whether an [`OrientedMeasure`] is stored as is or as its reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Support bounded above; generates a right-sided family.
    Right,
    /// Support bounded below; the stored measure is the image under `x -> -x`.
    Left,
}

/// A measure bounded on one side, kept as a measure bounded above plus an
/// orientation flag.
#[derive(Debug, Clone)]
pub struct OrientedMeasure {
    stored: RealMeasure,
    orientation: Orientation,
}

impl OrientedMeasure {
    pub fn right(measure: RealMeasure) -> Self {
        OrientedMeasure {
            stored: measure,
            orientation: Orientation::Right,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The stored measure, bounded above.
    pub fn stored(&self) -> &RealMeasure {
        &self.stored
    }

    /// The measure itself when it is bounded above.
    pub fn as_right(&self) -> Option<&RealMeasure> {
        match self.orientation {
            Orientation::Right => Some(&self.stored),
            Orientation::Left => None,
        }
    }

    pub fn density_at(&self, x: f64) -> f64 {
        match self.orientation {
            Orientation::Right => self.stored.density_at(x),
            Orientation::Left => self.stored.density_at(-x),
        }
    }

    /// `(inf supp, sup supp)`.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = (self.stored.support_inf(), self.stored.support_sup());
        match self.orientation {
            Orientation::Right => (lo, hi),
            Orientation::Left => (-hi, -lo),
        }
    }

    pub fn mean(&self) -> Result<ExtendedReal> {
        let m = self.stored.mean()?;
        Ok(match self.orientation {
            Orientation::Right => m,
            Orientation::Left => -m,
        })
    }

    /// Cauchy transform; for the left orientation `G(z) = -G_stored(-z)`.
    pub fn cauchy_g(&self, z: Complex64) -> Result<Complex64> {
        let ev = TransformEvaluator::new(self.stored.clone())?;
        match self.orientation {
            Orientation::Right => ev.g(z),
            Orientation::Left => Ok(-ev.g(-z)?),
        }
    }

    /// Image under `x -> -x`.
    pub fn reflect(&self) -> OrientedMeasure {
        OrientedMeasure {
            stored: self.stored.clone(),
            orientation: match self.orientation {
                Orientation::Right => Orientation::Left,
                Orientation::Left => Orientation::Right,
            },
        }
    }
}

/// Image of `nu` under the map.
pub fn affine_apply(nu: &RealMeasure, map: AffineMap) -> Result<OrientedMeasure> {
    if map.delta > 0.0 {
        return Ok(OrientedMeasure::right(
            nu.affine_image(map.gamma, map.delta)?,
        ));
    }
    // (x - γ)/δ = -(x - γ)/|δ|: store the right-bounded image under (x - γ)/|δ|.
    Ok(OrientedMeasure {
        stored: nu.affine_image(map.gamma, -map.delta)?,
        orientation: Orientation::Left,
    })
}

/// `D_r(ν)`, the image under `x -> r x`.
pub fn dilation(nu: &RealMeasure, r: f64) -> Result<RealMeasure> {
    let map = AffineMap::dilation(r)?;
    nu.affine_image(map.gamma, map.delta)
}

/// Convolution powers exist for `α ≥ 1`, and for every `α > 0` when the base
/// is free infinitely divisible.
pub fn validate_alpha(alpha: f64, infinitely_divisible: bool) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange {
            alpha,
            reason: "must be finite".into(),
        });
    }
    if alpha >= 1.0 || (infinitely_divisible && alpha > 0.0) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange {
            alpha,
            reason: if infinitely_divisible {
                "must be positive".into()
            } else {
                "must be at least 1 for a base not known to be free infinitely divisible".into()
            },
        })
    }
}

/// `R_{ν^⊞α}(w) = α R_ν(w)`.
pub fn conv_power_r(
    base: &dyn CauchyTransform,
    alpha: f64,
    w: f64,
    infinitely_divisible: bool,
) -> Result<f64> {
    validate_alpha(alpha, infinitely_divisible)?;
    Ok(alpha * base.r_transform(w)?)
}

/// `𝕍_{ν^⊞α}(m) = α 𝕍(m/α)`, for `m/α` above `m0`.
pub fn conv_power_pv(pv: &PseudoVariance, alpha: f64, m: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            reason: "must be positive".into(),
        });
    }
    let inner = m / alpha;
    if !(inner > pv.m0().to_f64()) {
        return Err(Error::domain(
            m,
            format!("({}, ...)", pv.m0().affine(0.0, 1.0 / alpha)),
        ));
    }
    Ok(alpha * pv.eval(inner)?)
}

/// The closed-form pseudo-variance `α 𝕍(m/α)`.
pub fn scaled_pv(pv: &PseudoVariance, alpha: f64) -> Result<PseudoVariance> {
    match *pv {
        PseudoVariance::Cubic { a, b, c } => Ok(PseudoVariance::Cubic {
            a: a / (alpha * alpha),
            b: b / alpha,
            c,
        }),
        PseudoVariance::Quadratic { a, b, c, m0 } => Ok(PseudoVariance::Quadratic {
            a: alpha * a,
            b,
            c: c / alpha,
            m0: alpha * m0,
        }),
        PseudoVariance::Numeric(_) => Err(Error::UnsupportedShape(
            "a numerically derived pseudo-variance has no closed-form power".into(),
        )),
    }
}

/// Closed-form transform of `ν^⊞α`.
pub fn conv_power_transform(spec: &LawSpec, alpha: f64) -> Result<ClosedTransform> {
    validate_alpha(alpha, spec.is_free_infinitely_divisible())?;
    let pv = scaled_pv(&spec.pseudo_variance()?, alpha)?;
    let alg = pv.to_algebraic().map_err(|e| match e {
        Error::InvalidPv(msg) => Error::UnsupportedShape(msg),
        other => other,
    })?;
    Ok(ClosedTransform::new(alg, pv.m0()))
}

/// `ν^⊞α`, recovered from the scaled pseudo-variance.
pub fn conv_power_measure(spec: &LawSpec, alpha: f64) -> Result<RealMeasure> {
    validate_alpha(alpha, spec.is_free_infinitely_divisible())?;
    let pv = scaled_pv(&spec.pseudo_variance()?, alpha)?;
    pv_to_generator(&pv).map_err(|e| match e {
        Error::InvalidPv(msg) => Error::UnsupportedShape(msg),
        other => other,
    })
}

/// Largest `m` in the ascending grid up to which the power identity
/// `R_{ν^⊞α}(m/𝕍_α(m)) = m`, with `R_{ν^⊞α} = α R_ν` and
/// `𝕍_α(m) = α 𝕍(m/α)`, holds within `tol (1 + |m|)`.
pub fn verified_power_domain(
    spec: &LawSpec,
    alpha: f64,
    grid: &[f64],
    tol: f64,
) -> Result<Option<f64>> {
    validate_alpha(alpha, spec.is_free_infinitely_divisible())?;
    let base = spec.closed_transform()?;
    let pv = spec.pseudo_variance()?;
    let mut last = None;
    for &m in grid {
        let ok = (|| -> Result<bool> {
            let v = conv_power_pv(&pv, alpha, m)?;
            let w = m / v;
            let r = alpha * base.r_transform(w)?;
            Ok((r - m).abs() <= tol * (1.0 + m.abs()))
        })();
        match ok {
            Ok(true) => last = Some(m),
            _ => break,
        }
    }
    Ok(last)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductiveReport {
    pub lambda: f64,
    pub max_deviation: f64,
    /// `(m, 𝕍(m)/λ, numerical pseudo-variance of ν_λ)`.
    pub details: Vec<(f64, f64, f64)>,
}

/// Builds `ν_λ = D_{1/λ}(ν^⊞λ)`, evaluates its pseudo-variance numerically
/// on `m_grid` and reports the largest relative deviation from `𝕍(m)/λ`.
pub fn reproductive_check(
    spec: &LawSpec,
    lambda: f64,
    m_grid: &[f64],
) -> Result<ReproductiveReport> {
    let power = conv_power_measure(spec, lambda)?;
    let nu_lambda = dilation(&power, 1.0 / lambda)?;
    let fam = CSKFamily::new(nu_lambda)?;
    let pv = spec.pseudo_variance()?;
    let mut details = Vec::with_capacity(m_grid.len());
    let mut max_deviation: f64 = 0.0;
    for &m in m_grid {
        let expected = pv.eval(m)? / lambda;
        let got = fam.pseudo_variance(m)?;
        max_deviation =
            max_deviation.max((got - expected).abs() / expected.abs().max(f64::MIN_POSITIVE));
        details.push((m, expected, got));
    }
    Ok(ReproductiveReport {
        lambda,
        max_deviation,
        details,
    })
}
