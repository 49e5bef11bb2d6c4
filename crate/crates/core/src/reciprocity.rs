//! Reciprocal pairs of kernel families.
//!
//! `ν̃` and `ν` are reciprocal when `R_ν̃(z |R_ν(z)|) = -1/R_ν(z)` for small
//! `z > 0`, where `|R_ν(z)|` means `R_ν(z)` if `m0 ≥ 0` and `-R_ν(z)`
//! otherwise. Equivalently `𝕍_ν̃(m) = -|m|³ 𝕍_ν(-1/m)`.

use std::sync::Arc;

use crate::csk::PseudoVariance;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::laws::LawSpec;
use crate::report::Report;
use crate::transforms::CauchyTransform;

/// Pass tolerance for pairs built from closed forms.
pub const CLOSED_TOL: f64 = 1e-8;
/// Pass tolerance for quadrature-backed pairs.
pub const NUMERIC_TOL: f64 = 1e-5;

#[derive(Clone)]
pub struct ReciprocalPair {
    nu_tilde: Arc<dyn CauchyTransform>,
    nu: Arc<dyn CauchyTransform>,
    tolerance: f64,
}

impl ReciprocalPair {
    pub fn new(
        nu_tilde: Arc<dyn CauchyTransform>,
        nu: Arc<dyn CauchyTransform>,
        tolerance: f64,
    ) -> Self {
        ReciprocalPair {
            nu_tilde,
            nu,
            tolerance,
        }
    }

    /// Pair of catalog laws evaluated through their closed forms.
    pub fn from_laws(nu_tilde: &LawSpec, nu: &LawSpec) -> Result<Self> {
        Ok(Self::new(
            Arc::new(nu_tilde.closed_transform()?),
            Arc::new(nu.closed_transform()?),
            CLOSED_TOL,
        ))
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Whether `m0 = -1/m̃0` (with `-1/0 = -inf`) and the signs are opposite.
    pub fn means_are_reciprocal(&self) -> bool {
        let m0 = self.nu.mean();
        let mt = self.nu_tilde.mean();
        let expected = mt.div_into(-1.0);
        let close = match (m0, expected) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                (a - b).abs() <= 1e-9 * (1.0 + b.abs())
            }
            (a, b) => a == b,
        };
        let (a, b) = (m0.to_f64(), mt.to_f64());
        let opposite = (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0);
        close && opposite
    }

    /// Residuals of `R_ν̃(z |R_ν(z)|) = -1/R_ν(z)` on an adaptive grid.
    pub fn check_r_identity(&self) -> Report {
        identity_report(
            "r-identity",
            self.nu_tilde.as_ref(),
            self.nu.as_ref(),
            self.tolerance,
        )
    }

    /// The same identity with the roles of the two families swapped.
    pub fn check_symmetry(&self) -> Report {
        identity_report(
            "r-identity-swapped",
            self.nu.as_ref(),
            self.nu_tilde.as_ref(),
            self.tolerance,
        )
    }
}

/// `|R(z)|` by the sign rule keyed on the mean.
fn signed_abs(r: f64, m0: ExtendedReal) -> f64 {
    if m0.to_f64() >= 0.0 {
        r
    } else {
        -r
    }
}

/// Largest `z` such that every sample up to it keeps `z` and `z |R_inner(z)|`
/// in the respective R-domains; the grid then lives in `(0, δ)` with `δ`
/// half of that value.
pub fn adaptive_delta(outer: &dyn CauchyTransform, inner: &dyn CauchyTransform) -> Option<f64> {
    let inner_top = inner.r_domain().upper.to_f64();
    let outer_dom = outer.r_domain();
    let m0 = inner.mean();
    let mut top = if inner_top.is_finite() {
        inner_top
    } else {
        1e3
    };
    for _ in 0..6 {
        let mut best = None;
        for i in 1..=64 {
            let z = if i == 64 {
                top * (1.0 - 1e-9)
            } else {
                top * i as f64 / 64.0
            };
            let ok = inner
                .r_transform(z)
                .map(|r| outer_dom.contains(z * signed_abs(r, m0)))
                .unwrap_or(false);
            if !ok {
                break;
            }
            best = Some(z);
        }
        if let Some(z) = best {
            return Some(0.5 * z);
        }
        top /= 64.0;
    }
    None
}

/// Grid in `(0, δ)`: ten geometric points toward 0 and twenty uniform ones.
pub fn z_grid(delta: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=10).rev().map(|k| delta * 0.5f64.powi(k + 1)).collect();
    grid.extend((1..=20).map(|k| delta * k as f64 / 20.0));
    grid
}

fn identity_report(
    name: &str,
    outer: &dyn CauchyTransform,
    inner: &dyn CauchyTransform,
    tol: f64,
) -> Report {
    let mut report = Report::new(name, tol);
    let Some(delta) = adaptive_delta(outer, inner) else {
        report.record_error(0.0, Error::domain(0.0, "no admissible z-grid"));
        return report;
    };
    let m0 = inner.mean();
    for z in z_grid(delta) {
        let eval = || -> Result<(f64, f64)> {
            let r = inner.r_transform(z)?;
            let lhs = outer.r_transform(z * signed_abs(r, m0))?;
            Ok((-1.0 / r, lhs))
        };
        match eval() {
            Ok((expected, got)) => report.record_abs(z, expected, got),
            Err(e) => report.record_error(z, e),
        }
    }
    report
}

/// `𝕍_ν̃(m) = -|m|³ 𝕍_ν(-1/m)`, for `-1/m` above the `m0` of `pv`.
pub fn reciprocal_pv(pv: &PseudoVariance, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Err(Error::domain(m, "m != 0"));
    }
    let t = -1.0 / m;
    if !(t > pv.m0().to_f64()) {
        return Err(Error::domain(m, format!("-1/m > {}", pv.m0())));
    }
    Ok(-m.abs().powi(3) * pv.eval(t)?)
}

/// Closed form of the reciprocal pseudo-variance: the quadratic shape with
/// `m0 = 0` and the cubic shape map onto each other with the same `(a, b, c)`.
pub fn reciprocal_shape(pv: &PseudoVariance) -> Result<PseudoVariance> {
    match *pv {
        PseudoVariance::Quadratic { a, b, c, m0: 0.0 } => Ok(PseudoVariance::Cubic { a, b, c }),
        PseudoVariance::Cubic { a, b, c } => Ok(PseudoVariance::Quadratic { a, b, c, m0: 0.0 }),
        _ => Err(Error::UnsupportedShape(
            "closed-form reciprocals exist for the quadratic shape with m0 = 0 and the cubic shape"
                .into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn semicircle() -> LawSpec {
        LawSpec::Semicircle {
            center: 0.0,
            variance: 1.0,
        }
    }

    fn inverse() -> LawSpec {
        LawSpec::FreeHalfStable { p: 1.0 }
    }

    #[test]
    fn semicircle_inverse_semicircle_pair() {
        let pair = ReciprocalPair::from_laws(&semicircle(), &inverse()).unwrap();
        assert!(pair.means_are_reciprocal());
        let r = pair.check_r_identity();
        assert!(r.pass, "{r:?}");
        assert!(r.max_residual < 1e-12);
        let s = pair.check_symmetry();
        assert!(s.pass, "{s:?}");
        // Explicit points from the closed forms.
        let sc = semicircle().closed_transform().unwrap();
        let is = inverse().closed_transform().unwrap();
        assert_relative_eq!(sc.r_transform(0.25 * 2.0).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(-1.0 / is.r_transform(0.04).unwrap(), 0.2, epsilon = 1e-14);
        assert_relative_eq!(is.r_transform(0.5 * 0.5).unwrap(), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn non_reciprocal_pair_fails() {
        let pair = ReciprocalPair::from_laws(&semicircle(), &semicircle()).unwrap();
        assert!(!pair.means_are_reciprocal());
        assert!(!pair.check_r_identity().pass);
        assert!(!pair.check_symmetry().pass);
    }

    #[test]
    fn pv_relation() {
        let one = PseudoVariance::Quadratic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            m0: 0.0,
        };
        assert_relative_eq!(reciprocal_pv(&one, -2.0).unwrap(), -8.0);
        assert_eq!(reciprocal_shape(&one).unwrap().eval(-3.0).unwrap(), -27.0);
        let q = PseudoVariance::Quadratic {
            a: 2.0,
            b: 0.5,
            c: 0.3,
            m0: 0.0,
        };
        let cubic = reciprocal_shape(&q).unwrap();
        for m in [-0.5, -1.0, -4.0] {
            assert_relative_eq!(
                reciprocal_pv(&q, m).unwrap(),
                cubic.eval(m).unwrap(),
                max_relative = 1e-14
            );
        }
        let back = reciprocal_shape(&cubic).unwrap();
        for m in [0.1, 0.7, 2.0] {
            assert_relative_eq!(
                reciprocal_pv(&cubic, m).unwrap(),
                back.eval(m).unwrap(),
                max_relative = 1e-14
            );
        }
        assert!(reciprocal_pv(&q, 1.0).is_err());
    }

    #[test]
    fn quadratic_cubic_pairs_are_reciprocal() {
        for (a, b, c) in [(1.0, 0.0, 1.0), (2.0, 1.0, 0.0), (1.0, -0.5, 0.5)] {
            let q = LawSpec::QuadraticFreeMeixner { a, b, c };
            let k = LawSpec::Cubic { a, b, c };
            let pair = ReciprocalPair::from_laws(&q, &k).unwrap();
            let r = pair.check_r_identity();
            assert!(r.pass, "{a} {b} {c}: {r:?}");
            assert!(pair.check_symmetry().pass);
        }
    }
}
