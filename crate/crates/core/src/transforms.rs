//! Cauchy transform, its inverse on the real axis, the R-transform, and
//! recovery of densities and atoms from a Cauchy transform.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebraic::AlgebraicCauchy;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::measure::{Anchor, RealMeasure};
use crate::quadrature::QuadConfig;
use crate::roots::{brent, expand_until, shrink_until, TAU_ROOT};

/// Overflow guard for the limit of `G` at `B`.
pub const G_OVERFLOW: f64 = 1e12;

/// Interval `(0, upper)` on which the R-transform is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RDomain {
    pub lower: f64,
    pub upper: ExtendedReal,
}

impl RDomain {
    pub fn contains(&self, w: f64) -> bool {
        w > self.lower && w < self.upper.to_f64()
    }
}

/// The operations shared by quadrature-backed and closed-form transforms.
pub trait CauchyTransform: Send + Sync {
    /// `G(z)` off the slit `(-inf, b]`.
    fn g(&self, z: Complex64) -> Result<Complex64>;

    /// `G(u)` for real `u > b`.
    fn g_real(&self, u: f64) -> Result<f64>;

    /// `m(u) = u - 1/G(u)`, the mean of the family member with `θ = 1/u`.
    fn mean_at(&self, u: f64) -> Result<f64> {
        let g = self.g_real(u)?;
        Ok(u - 1.0 / g)
    }

    /// `sup supp(ν)`.
    fn sup_support(&self) -> f64;

    /// `lim G(z)` as `z` decreases to `B = max(0, b)`.
    fn g_at_b(&self) -> ExtendedReal;

    /// Mean of the measure, `-inf` when it diverges.
    fn mean(&self) -> ExtendedReal;

    fn support_bound_b(&self) -> f64 {
        self.sup_support().max(0.0)
    }

    fn r_domain(&self) -> RDomain {
        RDomain {
            lower: 0.0,
            upper: self.g_at_b(),
        }
    }

    /// `K(w)`: the unique `u > B` with `G(u) = w`.
    fn inverse_k(&self, w: f64) -> Result<f64> {
        check_r_domain(self.r_domain(), w)?;
        let big_b = self.support_bound_b();
        let target = 1.0 / w;
        // 1/G is increasing on (B, inf), with 1/G(u) < u - b.
        let lo = match self.g_at_b() {
            ExtendedReal::Finite(_) => big_b,
            _ => shrink_until(big_b, target.max(1.0), |u| Ok(self.g_real(u)? > w))?,
        };
        let hi = expand_until(big_b, target.max(1.0) + (big_b - self.sup_support()), |u| {
            Ok(self.g_real(u)? < w)
        })?;
        let f = |u: f64| -> Result<f64> {
            if u <= big_b {
                return Ok(1.0 / self.g_at_b().to_f64() - target);
            }
            Ok(1.0 / self.g_real(u)? - target)
        };
        brent(f, lo, hi, TAU_ROOT * 1e-2)
    }

    /// `R(w) = K(w) - 1/w`, evaluated as `m(K(w))` to avoid cancellation.
    fn r_transform(&self, w: f64) -> Result<f64> {
        let u = self.inverse_k(w)?;
        self.mean_at(u)
    }
}

fn check_r_domain(d: RDomain, w: f64) -> Result<()> {
    if d.contains(w) {
        Ok(())
    } else {
        Err(Error::domain(w, format!("(0, {})", d.upper)))
    }
}

/// Transforms of a measure evaluated by quadrature.
#[derive(Debug, Clone)]
pub struct TransformEvaluator {
    source: RealMeasure,
    b: f64,
    g_at_b: ExtendedReal,
    mean: ExtendedReal,
    cfg: QuadConfig,
}

impl TransformEvaluator {
    pub fn new(source: RealMeasure) -> Result<Self> {
        Self::with_config(source, QuadConfig::relative(1e-12))
    }

    pub fn with_config(source: RealMeasure, cfg: QuadConfig) -> Result<Self> {
        let b = source.support_sup();
        let mean = source.mean()?;
        let mut ev = TransformEvaluator {
            source,
            b,
            g_at_b: ExtendedReal::PosInfinity,
            mean,
            cfg,
        };
        ev.g_at_b = ev.g_limit_at_b()?;
        Ok(ev)
    }

    pub fn source(&self) -> &RealMeasure {
        &self.source
    }

    fn anchor_for(&self, z: Complex64) -> Vec<Anchor> {
        let Some(d) = self.source.density_part() else {
            return Vec::new();
        };
        let top = d.upper();
        let center = z.re.min(top);
        let gap = (z.re - top).max(0.0);
        let scale = z.im.abs().max(gap).max(1e-15 * (1.0 + z.re.abs()));
        let mut anchors = vec![Anchor { center, scale }];
        if center != top {
            anchors.push(Anchor {
                center: top,
                scale: (top - center).abs().min(1.0),
            });
        }
        anchors
    }

    /// `H(u) = ∫ x/(u - x) dν = u G(u) - 1`, computed without the
    /// subtraction.
    pub fn h_real(&self, u: f64) -> Result<f64> {
        self.check_real(u)?;
        let anchors = self.anchor_for(Complex64::new(u, 0.0));
        self.source
            .integrate_value(|x| x / (u - x), &anchors, &self.cfg)
    }

    fn check_real(&self, u: f64) -> Result<()> {
        if u > self.b && u.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(u, format!("({}, inf)", self.b)))
        }
    }

    /// `F = 1/G`.
    pub fn f_transform(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.g(z)?.inv())
    }

    /// Limit of `G` at `B` from the right. When `B = b` the value is
    /// extrapolated from `G(B + 4^-k)`; a sequence whose increments do not
    /// contract is reported as `+inf`.
    pub fn g_limit_at_b(&self) -> Result<ExtendedReal> {
        let big_b = self.b.max(0.0);
        if big_b > self.b {
            return Ok(ExtendedReal::Finite(self.g_real(big_b)?));
        }
        self.edge_limit()
    }

    fn edge_limit(&self) -> Result<ExtendedReal> {
        if self.source.atoms().iter().any(|a| a.location == self.b) {
            return Ok(ExtendedReal::PosInfinity);
        }
        // Close to the edge the kernel is resolved only to about
        // ulp(b)/h, so the ladder runs at a looser tolerance.
        let cfg = QuadConfig::relative(1e-9);
        let scale = 1.0 + self.b.abs();
        let mut values = Vec::new();
        for k in 1..=13 {
            let u = self.b + scale * 4f64.powi(-k);
            let anchors = self.anchor_for(Complex64::new(u, 0.0));
            let g: f64 = match self
                .source
                .integrate_value(|x| 1.0 / (u - x), &anchors, &cfg)
            {
                Ok(g) => g,
                // Singular edges stop resolving first; decide from the rungs so far.
                Err(Error::QuadratureFailure { .. }) if values.len() >= 6 => break,
                Err(e) => return Err(e),
            };
            if g > G_OVERFLOW {
                return Ok(ExtendedReal::PosInfinity);
            }
            values.push(g);
        }
        Ok(extrapolate_monotone(&values))
    }
}

/// Richardson extrapolation of `g(h)` sampled at `h = 4^-k`, assuming an
/// expansion in powers of `sqrt(h)`. Returns `+inf` when the increments do
/// not contract.
fn extrapolate_monotone(values: &[f64]) -> ExtendedReal {
    let n = values.len();
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &d[d.len() - 4..];
    let contracting = tail
        .windows(2)
        .all(|w| w[1].abs() <= 0.95 * w[0].abs() || w[1].abs() <= 1e-14 * values[n - 1].abs());
    if !contracting {
        return ExtendedReal::PosInfinity;
    }
    let depth = 6.min(n);
    let mut row: Vec<f64> = values[n - depth..].to_vec();
    for j in 1..depth {
        let factor = 2f64.powi(j as i32);
        row = row
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0))
            .collect();
    }
    ExtendedReal::Finite(row[row.len() - 1])
}

impl CauchyTransform for TransformEvaluator {
    fn g(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(Complex64::new(self.g_real(z.re)?, 0.0));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::domain(z.re, "finite complex numbers"));
        }
        let anchors = self.anchor_for(z);
        self.source
            .integrate_value(|x| (z - x).inv(), &anchors, &self.cfg)
    }

    /// At `u = b` the improper integral is returned when it converges.
    fn g_real(&self, u: f64) -> Result<f64> {
        if u == self.b {
            if self.b >= 0.0 {
                if let ExtendedReal::Finite(v) = self.g_at_b {
                    return Ok(v);
                }
            }
            return match self.edge_limit()? {
                ExtendedReal::Finite(v) => Ok(v),
                _ => Err(Error::domain(u, format!("({}, inf)", self.b))),
            };
        }
        self.check_real(u)?;
        let anchors = self.anchor_for(Complex64::new(u, 0.0));
        self.source
            .integrate_value(|x| 1.0 / (u - x), &anchors, &self.cfg)
    }

    fn mean_at(&self, u: f64) -> Result<f64> {
        Ok(self.h_real(u)? / self.g_real(u)?)
    }

    fn sup_support(&self) -> f64 {
        self.b
    }

    fn g_at_b(&self) -> ExtendedReal {
        self.g_at_b
    }

    fn mean(&self) -> ExtendedReal {
        self.mean
    }
}

/// Closed-form transform of an algebraic Cauchy transform, with the mean
/// supplied by the caller.
#[derive(Debug, Clone, Copy)]
pub struct ClosedTransform {
    inner: AlgebraicCauchy,
    b: f64,
    mean: ExtendedReal,
}

impl ClosedTransform {
    pub fn new(inner: AlgebraicCauchy, mean: ExtendedReal) -> Self {
        ClosedTransform {
            b: inner.support_sup(),
            inner,
            mean,
        }
    }

    pub fn algebraic(&self) -> &AlgebraicCauchy {
        &self.inner
    }
}

impl CauchyTransform for ClosedTransform {
    fn g(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(Complex64::new(self.g_real(z.re)?, 0.0));
        }
        Ok(self.inner.g(z))
    }

    /// At `u = b` the edge value is returned when it is finite.
    fn g_real(&self, u: f64) -> Result<f64> {
        let v = if u >= self.b {
            self.inner.g_real(u)
        } else {
            f64::NAN
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(u, format!("({}, inf)", self.b)))
        }
    }

    fn sup_support(&self) -> f64 {
        self.b
    }

    fn g_at_b(&self) -> ExtendedReal {
        let v = self.inner.g_real(self.support_bound_b());
        if v.is_finite() && v < G_OVERFLOW {
            ExtendedReal::Finite(v)
        } else {
            ExtendedReal::PosInfinity
        }
    }

    fn mean(&self) -> ExtendedReal {
        self.mean
    }

    fn r_transform(&self, w: f64) -> Result<f64> {
        check_r_domain(self.r_domain(), w)?;
        self.inner.r_transform(w)
    }
}

/// Default Stieltjes schedule: `1e-2` halved down to about `1e-6`.
pub fn default_eps_schedule() -> Vec<f64> {
    (0..14).map(|k| 1e-2 * 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub x: f64,
    pub density: f64,
    pub error: f64,
}

/// Relative spread of the last two extrapolants above which an estimate is
/// rejected.
const UNSTABLE_SPREAD: f64 = 1e-2;

/// Density recovery `-Im G(x + iε)/π` with Richardson extrapolation in `ε`.
/// The schedule must decrease by a factor of two at each step.
pub fn stieltjes_invert<G>(g: G, grid: &[f64], eps_schedule: &[f64]) -> Result<Vec<DensityEstimate>>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if eps_schedule.len() < 2
        || eps_schedule.windows(2).any(|w| !(w[1] < w[0]))
        || eps_schedule[0] <= 0.0
    {
        return Err(Error::InvalidSpec(
            "ε schedule must be positive and decreasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        let samples = eps_schedule
            .iter()
            .map(|&eps| Ok(-g(Complex64::new(x, eps))?.im / PI))
            .collect::<Result<Vec<f64>>>()?;
        let (density, error) = richardson(&samples, eps_schedule);
        let spread = error / density.abs().max(1.0);
        if !density.is_finite() || spread > UNSTABLE_SPREAD {
            return Err(Error::ExtrapolationUnstable { x, spread });
        }
        out.push(DensityEstimate { x, density, error });
    }
    Ok(out)
}

/// Neville-Richardson table for a limit at `ε = 0` assuming an expansion in
/// integer powers of `ε`; returns the most stable diagonal estimate and the
/// difference of its last two extrapolants.
fn richardson(samples: &[f64], eps: &[f64]) -> (f64, f64) {
    const MAX_ORDER: usize = 6;
    let n = samples.len();
    let mut table: Vec<Vec<f64>> = vec![samples.to_vec()];
    for j in 1..=MAX_ORDER.min(n - 1) {
        let prev = &table[j - 1];
        let next: Vec<f64> = (0..prev.len() - 1)
            .map(|i| {
                let (e0, e1) = (eps[i], eps[i + j]);
                (e0 * prev[i + 1] - e1 * prev[i]) / (e0 - e1)
            })
            .collect();
        table.push(next);
    }
    let mut best = (samples[n - 1], (samples[n - 1] - samples[n - 2]).abs());
    for col in table.iter().skip(1) {
        if col.len() < 2 {
            break;
        }
        let k = col.len();
        let err = (col[k - 1] - col[k - 2]).abs();
        if err < best.1 {
            best = (col[k - 1], err);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomEstimate {
    pub location: f64,
    pub weight: f64,
    pub error: f64,
}

/// Atom weight at `location`: the `ε -> 0` intercept of `-ε Im G(x + iε)`,
/// from a least-squares quadratic fit over the schedule.
pub fn atom_scan<G>(g: G, location: f64, eps_schedule: &[f64]) -> Result<AtomEstimate>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let pts = eps_schedule
        .iter()
        .map(|&eps| Ok((eps, -eps * g(Complex64::new(location, eps))?.im)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let quad = poly_intercept(&pts, 2);
    let lin = poly_intercept(&pts, 1);
    Ok(AtomEstimate {
        location,
        weight: quad.max(0.0),
        error: (quad - lin).abs(),
    })
}

/// Intercept of the least-squares polynomial fit of the given degree, via
/// the normal equations in the scaled variable `ε/ε_max`.
fn poly_intercept(pts: &[(f64, f64)], degree: usize) -> f64 {
    let scale = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let k = degree + 1;
    let mut a = vec![vec![0.0; k + 1]; k];
    for &(e, y) in pts {
        let t = e / scale;
        let powers: Vec<f64> = (0..k).map(|i| t.powi(i as i32)).collect();
        for r in 0..k {
            for c in 0..k {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][k] += powers[r] * y;
        }
    }
    // Gaussian elimination with partial pivoting on the (k x k+1) system.
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && pivot[col] != 0.0 {
                let f = row[col] / pivot[col];
                for (x, p) in row[col..=k].iter_mut().zip(&pivot[col..=k]) {
                    *x -= f * p;
                }
            }
        }
    }
    if a[0][0] == 0.0 {
        return 0.0;
    }
    a[0][k] / a[0][0]
}

/// Finds the location of the heaviest atom in `[lo, hi]` by maximizing
/// `-ε Im G(x + iε)` on successively finer grids, then estimates its weight.
pub fn locate_atom<G>(g: G, lo: f64, hi: f64, eps_schedule: &[f64]) -> Result<AtomEstimate>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if !(hi > lo) {
        return Err(Error::domain(hi, format!("({lo}, inf)")));
    }
    let score = |x: f64, eps: f64| -> Result<f64> { Ok(-eps * g(Complex64::new(x, eps))?.im) };
    let n = 200;
    let mut h = (hi - lo) / n as f64;
    let mut center = lo;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = lo + h * i as f64;
        let s = score(x, h)?;
        if s > best {
            best = s;
            center = x;
        }
    }
    for _ in 0..14 {
        let span = 2.0 * h;
        h /= 5.0;
        let start = center - span;
        let mut level_best = f64::NEG_INFINITY;
        let mut level_center = center;
        for i in 0..=20 {
            let x = start + span * i as f64 / 10.0;
            let s = score(x, h)?;
            if s > level_best {
                level_best = s;
                level_center = x;
            }
        }
        center = level_center;
    }
    atom_scan(g, center, eps_schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, DensityPart};
    use approx::assert_relative_eq;

    fn semicircle() -> RealMeasure {
        let d = DensityPart::new(
            |x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI),
            -2.0,
            2.0,
            None,
        )
        .unwrap();
        RealMeasure::new(Some(d), vec![]).unwrap()
    }

    fn inverse_semicircle() -> RealMeasure {
        let d = DensityPart::new(
            |x: f64| (-1.0 - 4.0 * x).max(0.0).sqrt() / (2.0 * PI * x * x),
            f64::NEG_INFINITY,
            -0.25,
            Some(1.5),
        )
        .unwrap();
        RealMeasure::new(Some(d), vec![]).unwrap()
    }

    #[test]
    fn semicircle_transforms() {
        let ev = TransformEvaluator::new(semicircle()).unwrap();
        assert_relative_eq!(ev.g_real(2.0).unwrap(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(ev.g_at_b().to_f64(), 1.0, epsilon = 1e-7);
        assert_relative_eq!(ev.inverse_k(0.5).unwrap(), 2.5, epsilon = 1e-10);
        assert_relative_eq!(ev.r_transform(0.5).unwrap(), 0.5, epsilon = 1e-10);
        let z = Complex64::new(0.5, 0.3);
        let exact = (z - (z - 2.0).sqrt() * (z + 2.0).sqrt()) / 2.0;
        assert!((ev.g(z).unwrap() - exact).norm() < 1e-10);
        assert!(ev.g(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn inverse_semicircle_transforms() {
        let ev = TransformEvaluator::new(inverse_semicircle()).unwrap();
        assert_relative_eq!(ev.g_real(2.0).unwrap(), 0.25, epsilon = 1e-10);
        assert_relative_eq!(ev.g_at_b().to_f64(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(ev.inverse_k(0.25).unwrap(), 2.0, epsilon = 1e-9);
        assert_relative_eq!(ev.r_transform(0.25).unwrap(), -2.0, epsilon = 1e-9);
        assert_eq!(ev.mean(), ExtendedReal::NegInfinity);
    }

    #[test]
    fn point_mass_at_zero() {
        let ev = TransformEvaluator::new(RealMeasure::point_mass(0.0).unwrap()).unwrap();
        assert_relative_eq!(ev.g(Complex64::new(5.0, 0.0)).unwrap().re, 0.2);
        assert_eq!(ev.g_at_b(), ExtendedReal::PosInfinity);
        assert_relative_eq!(ev.inverse_k(0.2).unwrap(), 5.0, epsilon = 1e-12);
        assert!(ev.r_transform(0.7).unwrap().abs() < 1e-12);
    }

    #[test]
    fn divergent_edge_gives_infinite_limit() {
        let d = DensityPart::new(|_| 0.5, -1.0, 1.0, None).unwrap();
        let ev = TransformEvaluator::new(RealMeasure::new(Some(d), vec![]).unwrap()).unwrap();
        assert_eq!(ev.g_at_b(), ExtendedReal::PosInfinity);
    }

    #[test]
    fn r_domain_is_enforced() {
        let ev = TransformEvaluator::new(semicircle()).unwrap();
        assert!(matches!(ev.r_transform(1.5), Err(Error::Domain { .. })));
        assert!(matches!(ev.r_transform(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn stieltjes_recovers_half_stable_density() {
        let g = AlgebraicCauchy::cubic(1.0, 0.0, 0.0).unwrap();
        let eps = default_eps_schedule();
        let est = stieltjes_invert(|z| Ok(g.g(z)), &[-1.0, -0.1], &eps).unwrap();
        assert!((est[0].density - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-6);
        assert!(est[1].density.abs() < 1e-8);
        let at_pole = stieltjes_invert(|z: Complex64| Ok(z.inv()), &[0.5, 0.0], &eps);
        assert!(matches!(at_pole, Err(Error::ExtrapolationUnstable { x, .. }) if x == 0.0));
    }

    #[test]
    fn atoms_from_closed_form() {
        let g = AlgebraicCauchy::cubic(1.0, 2.0, 0.0).unwrap();
        let eps = default_eps_schedule();
        let a = atom_scan(|z| Ok(g.g(z)), -2.0, &eps).unwrap();
        assert!((a.weight - 0.5).abs() < 1e-6, "{a:?}");
        let found = locate_atom(|z| Ok(g.g(z)), -3.0, 0.0, &eps).unwrap();
        assert!((found.location + 2.0).abs() < 1e-6, "{found:?}");
        assert!((found.weight - 0.5).abs() < 1e-3);
        let sc = AlgebraicCauchy::quadratic(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(atom_scan(|z| Ok(sc.g(z)), 0.0, &eps).unwrap().weight < 1e-6);
    }

    #[test]
    fn atom_above_density_is_integrated_exactly() {
        let d = DensityPart::new(
            |x| (4.0 - x * x).max(0.0).sqrt() / (4.0 * PI),
            -2.0,
            2.0,
            None,
        )
        .unwrap();
        let nu = RealMeasure::new(Some(d), vec![Atom::new(3.0, 0.5).unwrap()]).unwrap();
        let ev = TransformEvaluator::new(nu).unwrap();
        assert_eq!(ev.g_at_b(), ExtendedReal::PosInfinity);
        let exact = 0.5 * (5.0 - 21f64.sqrt()) / 2.0 + 0.5 / 2.0;
        assert_relative_eq!(ev.g_real(5.0).unwrap(), exact, epsilon = 1e-10);
    }
}
