//! Cauchy transforms defined implicitly by a relation that is quadratic in
//! the mean.
//!
//! For the polynomial pseudo-variance shapes, eliminating `V` from
//! `z = m + V(m)/m` gives
//!
//! ```text
//! A m^2 + (B0 + B1 z) m + (C0 + C1 z) = 0,
//! ```
//!
//! and the Cauchy transform is `G(z) = m/V(m) = 1/(z - m(z))`. One branch of
//! the square root makes `G` a Cauchy transform; the branch is picked by
//! testing the normalization `z G(z) -> 1` and the mapping of the upper
//! half-plane into the lower one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityPart, RealMeasure};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cut {
    /// Relation is linear in `m`; `G` is rational.
    None,
    /// `sqrt(disc(z)) = sqrt(scale) sqrt(z - edge)`, cut `(-inf, edge]`.
    HalfLine { scale: f64, edge: f64 },
    /// `sqrt(disc(z)) = lead sqrt(z - lo) sqrt(z - hi)`, cut `[lo, hi]`.
    Interval { lead: f64, lo: f64, hi: f64 },
}

/// Principal square root, except that a negative real argument carrying a
/// `+0` imaginary part maps to the boundary value from the upper half-plane.
fn sqrt_upper(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicCauchy {
    a2: f64,
    b0: f64,
    b1: f64,
    c0: f64,
    c1: f64,
    sigma: f64,
    cut: Cut,
}

impl AlgebraicCauchy {
    /// Relation for `V(m) = m (a m^2 + b m + c)`.
    pub fn cubic(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidPv(format!(
                "cubic leading coefficient {a} must be positive"
            )));
        }
        Self::from_relation(a, b + 1.0, 0.0, c, -1.0)
    }

    /// Relation for `V(m) = m (a - b m + c m^2)/(m - m0)`.
    pub fn quadratic(a: f64, b: f64, c: f64, m0: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidPv(format!(
                "quadratic coefficient a = {a} must be positive"
            )));
        }
        if c < -1.0 {
            return Err(Error::InvalidPv(format!(
                "c = {c} < -1 gives no probability measure"
            )));
        }
        Self::from_relation(1.0 + c, -(m0 + b), -1.0, a, m0)
    }

    /// Builds the transform from the relation coefficients, choosing and
    /// validating the branch.
    pub fn from_relation(a2: f64, b0: f64, b1: f64, c0: f64, c1: f64) -> Result<Self> {
        if ![a2, b0, b1, c0, c1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPv("non-finite coefficients".into()));
        }
        let cut = if a2 == 0.0 {
            Cut::None
        } else if b1 == 0.0 {
            let slope = -4.0 * a2 * c1;
            if !(slope > 0.0) {
                return Err(Error::InvalidPv("support would be unbounded above".into()));
            }
            Cut::HalfLine {
                scale: slope,
                edge: -(b0 * b0 - 4.0 * a2 * c0) / slope,
            }
        } else {
            // disc(z) = b1^2 z^2 + (2 b0 b1 - 4 a2 c1) z + (b0^2 - 4 a2 c0)
            let qa = b1 * b1;
            let qb = 2.0 * b0 * b1 - 4.0 * a2 * c1;
            let qc = b0 * b0 - 4.0 * a2 * c0;
            let d = qb * qb - 4.0 * qa * qc;
            if d < 0.0 {
                return Err(Error::InvalidPv(
                    "discriminant has no real branch points".into(),
                ));
            }
            let (r1, r2) = stable_quadratic_roots(qa, qb, qc);
            Cut::Interval {
                lead: b1.abs(),
                lo: r1.min(r2),
                hi: r1.max(r2),
            }
        };
        let mut candidates = Vec::new();
        for sigma in [1.0, -1.0] {
            let g = AlgebraicCauchy {
                a2,
                b0,
                b1,
                c0,
                c1,
                sigma,
                cut,
            };
            if g.passes_checks() {
                candidates.push(g);
            }
            if cut == Cut::None {
                break;
            }
        }
        match candidates.first() {
            Some(g) => Ok(*g),
            None => Err(Error::InvalidPv(
                "no branch maps the upper half-plane into the lower one with z G(z) -> 1".into(),
            )),
        }
    }

    fn passes_checks(&self) -> bool {
        let far = 1e6 * (1.0 + self.scale());
        let zg = Complex64::new(far, 0.0) * self.g(Complex64::new(far, 0.0));
        if !((zg - 1.0).norm() < 1e-2) {
            return false;
        }
        let zi = Complex64::new(0.0, far) * self.g(Complex64::new(0.0, far));
        if !((zi - 1.0).norm() < 1e-2) {
            return false;
        }
        let (lo, hi) = self.probe_window();
        for k in 0..=40 {
            let x = lo + (hi - lo) * k as f64 / 40.0;
            for eta in [1e-6, 1e-3, 1e-1, 1.0, 10.0] {
                let v = self.g(Complex64::new(x, eta));
                if !(v.im < 0.0) || !v.re.is_finite() {
                    return false;
                }
            }
        }
        self.atoms_raw()
            .iter()
            .all(|a| a.1 > 0.0 && a.1 <= 1.0 + 1e-9)
    }

    fn scale(&self) -> f64 {
        match self.cut {
            Cut::None => 1.0,
            Cut::HalfLine { edge, .. } => edge.abs().max(1.0),
            Cut::Interval { lo, hi, .. } => lo.abs().max(hi.abs()).max(1.0),
        }
    }

    fn probe_window(&self) -> (f64, f64) {
        let s = self.scale();
        match self.cut {
            Cut::None => (-10.0 * s, 10.0 * s),
            Cut::HalfLine { edge, .. } => (edge - 20.0 * s, edge + 5.0 * s),
            Cut::Interval { lo, hi, .. } => (lo - 2.0 * s, hi + 2.0 * s),
        }
    }

    fn sqrt_disc(&self, z: Complex64) -> Complex64 {
        match self.cut {
            Cut::None => Complex64::new(0.0, 0.0),
            Cut::HalfLine { scale, edge } => sqrt_upper(z - edge) * scale.sqrt(),
            Cut::Interval { lead, lo, hi } => sqrt_upper(z - lo) * sqrt_upper(z - hi) * lead,
        }
    }

    /// The mean `m(z)` on the selected branch.
    pub fn mean_of(&self, z: Complex64) -> Complex64 {
        let lin = z * self.b1 + self.b0;
        if self.cut == Cut::None {
            return -(z * self.c1 + self.c0) / lin;
        }
        (-lin + self.sqrt_disc(z) * self.sigma) / (2.0 * self.a2)
    }

    /// `G(z) = 1/(z - m(z))`. A real argument with `+0` imaginary part on the
    /// cut returns the boundary value from the upper half-plane.
    pub fn g(&self, z: Complex64) -> Complex64 {
        if self.cut == Cut::None {
            // G = (b0 + b1 z) / (b1 z^2 + (b0 + c1) z + c0)
            let num = z * self.b1 + self.b0;
            let den = z * z * self.b1 + z * (self.b0 + self.c1) + self.c0;
            return num / den;
        }
        let d = z - self.mean_of(z);
        d.inv()
    }

    /// `G` at a real point above the support; `+inf` at a pole.
    pub fn g_real(&self, x: f64) -> f64 {
        let v = self.g(Complex64::new(x, 0.0));
        if v.re.is_nan() {
            f64::INFINITY
        } else {
            v.re
        }
    }

    /// Density `-Im G(x + i0)/pi` of the absolutely continuous part.
    pub fn density(&self, x: f64) -> f64 {
        let inside = match self.cut {
            Cut::None => false,
            Cut::HalfLine { edge, .. } => x < edge,
            Cut::Interval { lo, hi, .. } => x > lo && x < hi,
        };
        if !inside {
            return 0.0;
        }
        (-self.g(Complex64::new(x, 0.0)).im / PI).max(0.0)
    }

    /// Support of the absolutely continuous part, if any.
    pub fn continuous_support(&self) -> Option<(f64, f64)> {
        match self.cut {
            Cut::None => None,
            Cut::HalfLine { edge, .. } => Some((f64::NEG_INFINITY, edge)),
            Cut::Interval { lo, hi, .. } => Some((lo, hi)),
        }
    }

    fn on_cut(&self, x: f64) -> bool {
        match self.cut {
            Cut::None => false,
            Cut::HalfLine { edge, .. } => x <= edge,
            Cut::Interval { lo, hi, .. } => x >= lo && x <= hi,
        }
    }

    fn atoms_raw(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if self.cut == Cut::None {
            let qa = self.b1;
            let qb = self.b0 + self.c1;
            let qc = self.c0;
            for r in real_roots(qa, qb, qc) {
                let num = self.b1 * r + self.b0;
                let dden = 2.0 * self.b1 * r + qb;
                if dden != 0.0 && num != 0.0 {
                    out.push((r, num / dden));
                }
            }
            return out;
        }
        // Poles satisfy m(z) = z, i.e. (a2 + b1) z^2 + (b0 + c1) z + c0 = 0.
        for r in real_roots(self.a2 + self.b1, self.b0 + self.c1, self.c0) {
            if self.on_cut(r) {
                continue;
            }
            let m = self.mean_of(Complex64::new(r, 0.0)).re;
            if (m - r).abs() > 1e-9 * (1.0 + r.abs()) {
                continue;
            }
            let pm = 2.0 * self.a2 * r + self.b0 + self.b1 * r;
            let pz = self.b1 * r + self.c1;
            if pm == 0.0 {
                continue;
            }
            let dm = -pz / pm;
            out.push((r, 1.0 / (1.0 - dm)));
        }
        out
    }

    /// Atoms of the represented measure, sorted by location.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = self
            .atoms_raw()
            .into_iter()
            .filter(|(_, w)| *w > 1e-15)
            .map(|(location, weight)| Atom { location, weight })
            .collect();
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        atoms
    }

    /// `sup supp` of the represented measure.
    pub fn support_sup(&self) -> f64 {
        let cont = self.continuous_support().map_or(f64::NEG_INFINITY, |s| s.1);
        self.atoms().iter().map(|a| a.location).fold(cont, f64::max)
    }

    /// The measure recovered by Stieltjes inversion of `G`, with the total
    /// mass verified by quadrature.
    pub fn to_measure(&self) -> Result<RealMeasure> {
        let density = match self.continuous_support() {
            Some((lo, hi)) => {
                let g = *self;
                let tail = if lo.is_finite() { None } else { Some(1.5) };
                Some(DensityPart::new(move |x| g.density(x), lo, hi, tail)?)
            }
            None => None,
        };
        RealMeasure::new(density, self.atoms()).map_err(|e| match e {
            Error::InvalidMeasure(msg) => Error::InvalidPv(msg),
            other => other,
        })
    }

    /// R-transform: the root `m` of the relation with `z = m + 1/w` that lies
    /// on the selected branch.
    pub fn r_transform(&self, w: f64) -> Result<f64> {
        if !(w > 0.0) {
            return Err(Error::domain(w, "(0, G(B))"));
        }
        let qa = self.a2 + self.b1;
        let qb = self.b0 + self.b1 / w + self.c1;
        let qc = self.c0 + self.c1 / w;
        let b = self.support_sup();
        let mut best: Option<(f64, f64)> = None;
        for r in real_roots(qa, qb, qc) {
            let z = r + 1.0 / w;
            if !(z > b) {
                continue;
            }
            let gz = self.g_real(z);
            let miss = (gz - w).abs() / w;
            if best.is_none_or(|(_, m)| miss < m) {
                best = Some((r, miss));
            }
        }
        match best {
            Some((r, miss)) if miss < 1e-8 => Ok(r),
            _ => Err(Error::domain(w, "(0, G(B))")),
        }
    }
}

/// Roots of `a x^2 + b x + c` without cancellation; a linear equation when
/// `a = 0`.
fn stable_quadratic_roots(a: f64, b: f64, c: f64) -> (f64, f64) {
    let d = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * d);
    if q == 0.0 {
        return (0.0, 0.0);
    }
    (q / a, c / q)
}

fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let d = b * b - 4.0 * a * c;
    if d < 0.0 {
        return vec![];
    }
    let (r1, r2) = stable_quadratic_roots(a, b, c);
    if d == 0.0 {
        vec![r1]
    } else {
        vec![r1, r2]
    }
}
