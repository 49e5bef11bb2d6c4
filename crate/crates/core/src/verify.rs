//! Verification suites over the law catalog.
//!
//! Each suite returns a list of [`Report`]s. Randomized checks draw from a
//! ChaCha generator seeded by [`VerifyConfig::seed`], so results are
//! reproducible.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csk::{pv_to_generator, CSKFamily, PseudoVariance};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::freeconv::{affine_apply, conv_power_measure, reproductive_check, AffineMap};
use crate::laws::LawSpec;
use crate::measure::RealMeasure;
use crate::reciprocity::{reciprocal_pv, reciprocal_shape, ReciprocalPair, NUMERIC_TOL};
use crate::report::Report;
use crate::transforms::{
    default_eps_schedule, locate_atom, stieltjes_invert, CauchyTransform, TransformEvaluator,
};

/// Default relative tolerance for numerical agreement checks.
pub const TAU_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Reciprocity,
    Domains,
    Roundtrip,
    Gineq,
    Bis,
    Reproductive,
    Oracle,
    Stieltjes,
    Properties,
    Divergent,
}

impl Suite {
    pub const ALL_PARTS: [Suite; 10] = [
        Suite::Oracle,
        Suite::Domains,
        Suite::Roundtrip,
        Suite::Reciprocity,
        Suite::Stieltjes,
        Suite::Reproductive,
        Suite::Gineq,
        Suite::Bis,
        Suite::Properties,
        Suite::Divergent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Reciprocity => "reciprocity",
            Suite::Domains => "domains",
            Suite::Roundtrip => "roundtrip",
            Suite::Gineq => "gineq",
            Suite::Bis => "bis",
            Suite::Reproductive => "reproductive",
            Suite::Oracle => "oracle",
            Suite::Stieltjes => "stieltjes",
            Suite::Properties => "properties",
            Suite::Divergent => "divergent",
        }
    }

    /// The suites this one expands to.
    pub fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::ALL_PARTS.to_vec(),
            s => vec![s],
        }
    }

    /// Runs a single (non-`All`) suite.
    pub fn run(self, cfg: &VerifyConfig) -> Vec<Report> {
        match self {
            Suite::All => Suite::ALL_PARTS.iter().flat_map(|s| s.run(cfg)).collect(),
            Suite::Reciprocity => reciprocity(cfg),
            Suite::Domains => domains(cfg),
            Suite::Roundtrip => {
                let mut out = roundtrip(cfg);
                out.extend(r_identity(cfg));
                out
            }
            Suite::Gineq => vec![g_inequality(cfg)],
            Suite::Bis => vec![bis(cfg)],
            Suite::Reproductive => reproductive(cfg),
            Suite::Oracle => oracle(cfg),
            Suite::Stieltjes => stieltjes(cfg),
            Suite::Properties => properties(cfg),
            Suite::Divergent => divergent(cfg),
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::ALL_PARTS)
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Tolerance for the checks that default to [`TAU_REL`].
    pub tau_rel: f64,
    /// Trials per randomized property.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            tau_rel: TAU_REL,
            trials: 200,
        }
    }
}

impl VerifyConfig {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// The catalog laws used by the oracle and domain checks.
pub fn catalog() -> Vec<LawSpec> {
    vec![
        LawSpec::Semicircle {
            center: 0.0,
            variance: 1.0,
        },
        LawSpec::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        },
        LawSpec::Cubic {
            a: 1.0,
            b: 2.0,
            c: 0.0,
        },
        LawSpec::FreeAbel {},
        LawSpec::FreeRessel {},
        LawSpec::FreeStrictArcsine {},
        LawSpec::FreeLargeArcsine { r: 0.5 },
        LawSpec::FreeLargeArcsine { r: 1.0 },
        LawSpec::FreeTakacs { r: 0.5 },
        LawSpec::FreeHalfStable { p: 1.0 },
        LawSpec::FreeHalfStable { p: 2.0 },
    ]
}

/// Extra quadratic laws covering each row of the quadratic domain table.
fn meixner_catalog() -> Vec<LawSpec> {
    vec![
        LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        },
        LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 2.0,
            c: 0.0,
        },
        LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 3.0,
            c: 1.0,
        },
        LawSpec::QuadraticFreeMeixner {
            a: 1.0,
            b: 0.0,
            c: -0.5,
        },
        LawSpec::QuadraticFreeMeixner {
            a: 2.0,
            b: 0.5,
            c: 1.0,
        },
    ]
}

/// `n` means inside `(m0, m+)`: evenly spaced when `m0` is finite, otherwise
/// spreading geometrically below `m+`.
pub fn mean_grid(m0: ExtendedReal, m_plus: f64, n: usize) -> Vec<f64> {
    match m0 {
        ExtendedReal::Finite(lo) => (1..=n)
            .map(|k| lo + (m_plus - lo) * k as f64 / (n + 1) as f64)
            .collect(),
        _ => {
            let s = 1.0 + m_plus.abs();
            (0..n)
                .map(|k| m_plus - s * 0.05 * 2f64.powi(k as i32))
                .collect()
        }
    }
}

fn numeric(spec: &LawSpec) -> Result<TransformEvaluator> {
    TransformEvaluator::new(spec.build_measure()?)
}

fn with_setup<T>(report: &mut Report, setup: Result<T>) -> Option<T> {
    match setup {
        Ok(v) => Some(v),
        Err(e) => {
            report.record_error(f64::NAN, e);
            None
        }
    }
}

fn rel_c(got: Complex64, expected: Complex64) -> f64 {
    (got - expected).norm() / expected.norm().max(f64::MIN_POSITIVE)
}

/// Closed-form against quadrature `G` at ten real and ten complex points.
pub fn oracle(cfg: &VerifyConfig) -> Vec<Report> {
    catalog()
        .iter()
        .map(|spec| {
            let mut rep = Report::new(format!("oracle:{spec}"), cfg.tau_rel);
            let Some((closed, ev)) = with_setup(
                &mut rep,
                spec.closed_transform()
                    .and_then(|c| Ok((c, numeric(spec)?))),
            ) else {
                return rep;
            };
            let big_b = ev.support_bound_b();
            let real = (0..10).map(|k| Complex64::new(big_b + 0.1 + 9.9 * k as f64 / 9.0, 0.0));
            let complex = (0..10).map(|k| Complex64::new(big_b - 6.0 + 1.2 * k as f64, 0.1));
            for z in real.chain(complex) {
                match (closed.g(z), ev.g(z)) {
                    (Ok(c), Ok(q)) => rep.record(z.re, c.norm(), q.norm(), rel_c(q, c)),
                    (Err(e), _) | (_, Err(e)) => rep.record_error(z.re, e),
                }
            }
            rep
        })
        .collect()
}

/// Domain-of-means tables against `B - 1/G(B)` from quadrature.
pub fn domains(cfg: &VerifyConfig) -> Vec<Report> {
    catalog()
        .into_iter()
        .chain(meixner_catalog())
        .map(|spec| {
            let mut rep = Report::new(format!("domains:{spec}"), cfg.tau_rel);
            let setup = spec
                .mean_domain_upper()
                .and_then(|t| Ok((t, numeric(&spec)?)));
            if let Some((table, ev)) = with_setup(&mut rep, setup) {
                let m_plus = ev.support_bound_b() - ev.g_at_b().recip().to_f64();
                rep.record_abs(0.0, table.value, m_plus);
            }
            rep
        })
        .collect()
}

/// `pv -> measure -> pseudo-variance` on a ten-point mean grid.
pub fn roundtrip(cfg: &VerifyConfig) -> Vec<Report> {
    let pvs = [
        PseudoVariance::Quadratic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            m0: 0.0,
        },
        PseudoVariance::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        },
        PseudoVariance::Cubic {
            a: 1.0,
            b: 1.0,
            c: 0.0,
        },
        PseudoVariance::Cubic {
            a: 1.0,
            b: 0.0,
            c: 1.0,
        },
        PseudoVariance::Cubic {
            a: 1.0,
            b: 2.0,
            c: 0.0,
        },
    ];
    pvs.iter()
        .map(|pv| {
            let mut rep = Report::new(format!("roundtrip:{}", pv_label(pv)), cfg.tau_rel);
            let Some(fam) = with_setup(&mut rep, pv_to_generator(pv).and_then(CSKFamily::new))
            else {
                return rep;
            };
            for m in mean_grid(fam.m0(), fam.m_plus(), 10) {
                match (pv.eval(m), fam.pseudo_variance(m)) {
                    (Ok(e), Ok(g)) => rep.record_rel(m, e, g),
                    (Err(e), _) | (_, Err(e)) => rep.record_error(m, e),
                }
            }
            rep
        })
        .collect()
}

fn pv_label(pv: &PseudoVariance) -> String {
    match *pv {
        PseudoVariance::Quadratic { a, b, c, m0 } => format!("quadratic({a},{b},{c},{m0})"),
        PseudoVariance::Cubic { a, b, c } => format!("cubic({a},{b},{c})"),
        PseudoVariance::Numeric(_) => "numeric".into(),
    }
}

/// `R(m/𝕍(m)) = m` with quadrature-backed `R`, residual scaled by `1 + |m|`.
pub fn r_identity(cfg: &VerifyConfig) -> Vec<Report> {
    catalog()
        .iter()
        .map(|spec| {
            let mut rep = Report::new(format!("r-identity:{spec}"), cfg.tau_rel);
            let setup = numeric(spec).and_then(|ev| Ok((ev, spec.mean_domain_upper()?.value)));
            let Some((ev, m_plus)) = with_setup(&mut rep, setup) else {
                return rep;
            };
            for m in mean_grid(spec.mean(), m_plus, 10) {
                let got = spec.closed_pv(m).and_then(|v| ev.r_transform(m / v));
                match got {
                    Ok(r) => rep.record(m, m, r, (r - m).abs() / (1.0 + m.abs())),
                    Err(e) => rep.record_error(m, e),
                }
            }
            rep
        })
        .collect()
}

/// Reciprocal pairs: closed forms, one quadrature-backed pair, and the
/// pseudo-variance relation.
pub fn reciprocity(cfg: &VerifyConfig) -> Vec<Report> {
    let sc = LawSpec::Semicircle {
        center: 0.0,
        variance: 1.0,
    };
    let hs = LawSpec::FreeHalfStable { p: 1.0 };
    let mut out = Vec::new();
    let label = |r: Report, name: &str| Report {
        check_name: format!("{}:{name}", r.check_name),
        ..r
    };
    match ReciprocalPair::from_laws(&sc, &hs) {
        Ok(pair) => {
            out.push(label(
                pair.check_r_identity(),
                "semicircle/inverse-semicircle",
            ));
            out.push(label(
                pair.check_symmetry(),
                "semicircle/inverse-semicircle",
            ));
        }
        Err(e) => {
            let mut r = Report::new("r-identity:semicircle/inverse-semicircle", 1e-8);
            r.record_error(f64::NAN, e);
            out.push(r);
        }
    }
    for (a, b, c) in [(1.0, 0.0, 1.0), (1.0, 2.0, 0.0), (2.0, -0.5, 0.5)] {
        let q = LawSpec::QuadraticFreeMeixner { a, b, c };
        let k = LawSpec::Cubic { a, b, c };
        let name = format!("{q}/{k}");
        match ReciprocalPair::from_laws(&q, &k) {
            Ok(pair) => {
                out.push(label(pair.check_r_identity(), &name));
                out.push(label(pair.check_symmetry(), &name));
            }
            Err(e) => {
                let mut r = Report::new(format!("r-identity:{name}"), 1e-8);
                r.record_error(f64::NAN, e);
                out.push(r);
            }
        }
    }
    let numeric_pair = numeric(&sc).and_then(|a| Ok((a, numeric(&hs)?)));
    match numeric_pair {
        Ok((a, b)) => {
            let pair = ReciprocalPair::new(Arc::new(a), Arc::new(b), NUMERIC_TOL);
            out.push(label(pair.check_r_identity(), "quadrature"));
        }
        Err(e) => {
            let mut r = Report::new("r-identity:quadrature", NUMERIC_TOL);
            r.record_error(f64::NAN, e);
            out.push(r);
        }
    }
    out.extend(pv_relation(cfg));
    out
}

/// `-|m|³ 𝕍(-1/m)` against the symbolic reciprocal shape, plus the exact
/// coefficient match `1 -> m³`.
fn pv_relation(cfg: &VerifyConfig) -> Vec<Report> {
    let mut rep = Report::new("pv-relation", 0.0);
    let one = PseudoVariance::Quadratic {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        m0: 0.0,
    };
    match reciprocal_shape(&one) {
        Ok(PseudoVariance::Cubic { a, b, c }) => {
            let miss = (a - 1.0).abs() + b.abs() + c.abs();
            rep.record(0.0, 1.0, a, miss);
        }
        Ok(_) => rep.record_error(0.0, "reciprocal of the constant is not cubic"),
        Err(e) => rep.record_error(0.0, e),
    }
    let mut numeric = Report::new("pv-relation:evaluation", 1e-12);
    let mut rng = cfg.rng(11);
    for _ in 0..cfg.trials {
        let (a, b, c) = (
            rng.gen_range(0.1..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..2.0),
        );
        let q = PseudoVariance::Quadratic { a, b, c, m0: 0.0 };
        let m = -rng.gen_range(0.05..20.0);
        let got = reciprocal_pv(&q, m).and_then(|v| Ok((v, reciprocal_shape(&q)?.eval(m)?)));
        match got {
            Ok((v, e)) => numeric.record_rel(m, e, v),
            Err(e) => numeric.record_error(m, e),
        }
    }
    vec![rep, numeric]
}

/// Density recovery from closed-form `G` and the atom of `cubic(1,2,0)`.
pub fn stieltjes(cfg: &VerifyConfig) -> Vec<Report> {
    let eps = default_eps_schedule();
    let mut out = Vec::new();
    for spec in [
        LawSpec::Cubic {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        },
        LawSpec::FreeAbel {},
    ] {
        let mut rep = Report::new(format!("stieltjes:{spec}"), 1e-4);
        let setup = spec.closed_transform().and_then(|t| {
            let (lo, hi) = t
                .algebraic()
                .continuous_support()
                .ok_or_else(|| Error::InvalidSpec("no continuous part".into()))?;
            Ok((t, lo, hi))
        });
        if let Some((t, lo, hi)) = with_setup(&mut rep, setup) {
            let lo = if lo.is_finite() { lo } else { hi - 10.0 };
            let w = hi - lo;
            let grid: Vec<f64> = (0..20)
                .map(|k| lo + w * (0.05 + 0.9 * k as f64 / 19.0))
                .collect();
            match stieltjes_invert(|z| t.g(z), &grid, &eps) {
                Ok(est) => {
                    for d in est {
                        rep.record_abs(d.x, t.algebraic().density(d.x), d.density);
                    }
                }
                Err(e) => rep.record_error(f64::NAN, e),
            }
        }
        out.push(rep);
    }
    let spec = LawSpec::Cubic {
        a: 1.0,
        b: 2.0,
        c: 0.0,
    };
    let mut loc = Report::new(format!("atom-location:{spec}"), 1e-3);
    let mut weight = Report::new(format!("atom-weight:{spec}"), 1e-3);
    match spec
        .closed_transform()
        .and_then(|t| locate_atom(|z| t.g(z), -2.2, -1.0, &eps))
    {
        Ok(a) => {
            loc.record_abs(0.0, -2.0, a.location);
            weight.record_abs(a.location, 0.5, a.weight);
        }
        Err(e) => {
            loc.record_error(f64::NAN, &e);
            weight.record_error(f64::NAN, e);
        }
    }
    let _ = cfg;
    out.push(loc);
    out.push(weight);
    out
}

/// `R` additivity of a convolution power and the reproductive property.
pub fn reproductive(cfg: &VerifyConfig) -> Vec<Report> {
    let mut out = Vec::new();
    let hs = LawSpec::Cubic {
        a: 1.0,
        b: 0.0,
        c: 0.0,
    };
    let mut add = Report::new(format!("power-r-additivity:{hs}^4"), cfg.tau_rel);
    let setup = conv_power_measure(&hs, 4.0)
        .and_then(TransformEvaluator::new)
        .and_then(|p| Ok((p, hs.closed_transform()?)));
    if let Some((power, base)) = with_setup(&mut add, setup) {
        // The power's R-domain is (0, 1/16).
        for k in 1..=10 {
            let w = 0.06 * k as f64 / 10.0;
            match (power.r_transform(w), base.r_transform(w)) {
                (Ok(p), Ok(b)) => add.record_rel(w, 4.0 * b, p),
                (Err(e), _) | (_, Err(e)) => add.record_error(w, e),
            }
        }
    }
    out.push(add);
    let cases = [
        (
            LawSpec::Semicircle {
                center: 0.0,
                variance: 1.0,
            },
            2.0,
            0.5f64.sqrt(),
        ),
        // 𝕍/4 = m³/4 has m+ = -4.
        (hs, 4.0, -4.0),
    ];
    for (spec, lambda, m_plus) in cases {
        let mut rep = Report::new(format!("reproductive:{spec}:lambda={lambda}"), cfg.tau_rel);
        let grid = mean_grid(spec.mean(), m_plus, 5);
        match reproductive_check(&spec, lambda, &grid) {
            Ok(r) => {
                for (m, e, g) in r.details {
                    rep.record_rel(m, e, g);
                }
            }
            Err(e) => rep.record_error(f64::NAN, e),
        }
        out.push(rep);
    }
    out
}

/// `G(z1) - G(z2) > (z2 - z1) G(z1) G(z2)` for `B < z1 < z2 <= B + 100`.
pub fn g_inequality(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("g-inequality", 0.0);
    let laws: Vec<TransformEvaluator> = match catalog().iter().map(numeric).collect() {
        Ok(v) => v,
        Err(e) => {
            rep.record_error(f64::NAN, e);
            return rep;
        }
    };
    let mut rng = cfg.rng(1);
    for _ in 0..cfg.trials {
        let ev = &laws[rng.gen_range(0..laws.len())];
        let big_b = ev.support_bound_b();
        let z1 = big_b + rng.gen_range(1e-3..99.0);
        let z2 = rng.gen_range(z1 + 1e-3..=big_b + 100.0);
        match (ev.g_real(z1), ev.g_real(z2)) {
            (Ok(g1), Ok(g2)) => {
                let lhs = g1 - g2;
                let rhs = (z2 - z1) * g1 * g2;
                let miss = if lhs > rhs {
                    0.0
                } else {
                    (rhs - lhs).max(f64::MIN_POSITIVE)
                };
                rep.record(z1, rhs, lhs, miss);
            }
            (Err(e), _) | (_, Err(e)) => rep.record_error(z1, e),
        }
    }
    rep
}

/// Residual of the difference relation on the shifted semicircle family.
pub fn bis(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("bis:semicircle(-0.5,1)", 1e-10);
    let spec = LawSpec::Semicircle {
        center: -0.5,
        variance: 1.0,
    };
    let Some(fam) = with_setup(&mut rep, spec.closed_family()) else {
        return rep;
    };
    let mut rng = cfg.rng(2);
    let (m0, m_plus) = (fam.m0().to_f64(), fam.m_plus());
    for _ in 0..cfg.trials {
        let mut m = rng.gen_range(m0..m_plus);
        if m.abs() < 1e-3 {
            m = 1e-3;
        }
        let x = rng.gen_range(-2.5..=1.5);
        match fam.bis_residual(m, x) {
            Ok(r) => rep.record(m, 0.0, r, r.abs()),
            Err(e) => rep.record_error(m, e),
        }
    }
    rep
}

fn strictly_increasing(rep: &mut Report, input: f64, lo: f64, hi: f64) {
    let miss = if lo < hi {
        0.0
    } else {
        (lo - hi).max(f64::MIN_POSITIVE)
    };
    rep.record(input, lo, hi, miss);
}

fn random_mean(rng: &mut ChaCha8Rng, m0: ExtendedReal, m_plus: f64) -> f64 {
    match m0 {
        ExtendedReal::Finite(lo) => lo + (m_plus - lo) * rng.gen_range(1e-3..0.999),
        _ => m_plus - (1.0 + m_plus.abs()) * rng.gen_range(-6.0f64..4.0).exp(),
    }
}

/// Randomized structural properties.
pub fn properties(cfg: &VerifyConfig) -> Vec<Report> {
    vec![
        theta_monotone(cfg),
        ratio_monotone(cfg),
        herglotz(cfg),
        z_g_limit(cfg),
        reflection_involution(cfg),
        affine_g(cfg),
    ]
}

fn closed_families() -> Result<Vec<CSKFamily>> {
    catalog().iter().map(|s| s.closed_family()).collect()
}

/// `θ -> m(θ)` is increasing on `(0, θ+)`.
pub fn theta_monotone(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("mean-of-theta-increasing", 0.0);
    let Some(fams) = with_setup(&mut rep, closed_families()) else {
        return rep;
    };
    let mut rng = cfg.rng(3);
    for _ in 0..cfg.trials {
        let fam = &fams[rng.gen_range(0..fams.len())];
        let top = fam.theta_plus().to_f64().min(50.0);
        let t1 = top * rng.gen_range(1e-3..0.99);
        let t2 = rng.gen_range(t1 * 1.001..top * 0.999);
        match (fam.mean_of_theta(t1), fam.mean_of_theta(t2)) {
            (Ok(a), Ok(b)) => strictly_increasing(&mut rep, t1, a, b),
            (Err(e), _) | (_, Err(e)) => rep.record_error(t1, e),
        }
    }
    rep
}

/// `m -> m/𝕍(m)` is increasing on the mean domain and stays in `(0, G(B))`.
pub fn ratio_monotone(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("m-over-pv-increasing", 0.0);
    let laws = catalog();
    let tops: Vec<Result<(f64, f64)>> = laws
        .iter()
        .map(|s| {
            let t = s.closed_transform()?;
            Ok((s.mean_domain_upper()?.value, t.g_at_b().to_f64()))
        })
        .collect();
    let mut rng = cfg.rng(4);
    for _ in 0..cfg.trials {
        let i = rng.gen_range(0..laws.len());
        let spec = &laws[i];
        let (m_plus, g_b) = match &tops[i] {
            Ok(v) => *v,
            Err(e) => {
                rep.record_error(f64::NAN, e);
                continue;
            }
        };
        let a = random_mean(&mut rng, spec.mean(), m_plus);
        let b = random_mean(&mut rng, spec.mean(), m_plus);
        let (m1, m2) = (a.min(b), a.max(b));
        if m2 - m1 < 1e-9 * (1.0 + m1.abs()) || m1 * m2 <= 0.0 {
            continue;
        }
        match (spec.closed_pv(m1), spec.closed_pv(m2)) {
            (Ok(v1), Ok(v2)) => {
                let (r1, r2) = (m1 / v1, m2 / v2);
                strictly_increasing(&mut rep, m1, r1, r2);
                strictly_increasing(&mut rep, m2, 0.0, r1);
                strictly_increasing(&mut rep, m2, r2, g_b * (1.0 + 1e-12));
            }
            (Err(e), _) | (_, Err(e)) => rep.record_error(m1, e),
        }
    }
    rep
}

/// `Im G(z) < 0` for `Im z > 0`.
pub fn herglotz(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("g-maps-upper-to-lower", 0.0);
    let laws: Vec<TransformEvaluator> = match catalog().iter().map(numeric).collect() {
        Ok(v) => v,
        Err(e) => {
            rep.record_error(f64::NAN, e);
            return rep;
        }
    };
    let mut rng = cfg.rng(5);
    for _ in 0..cfg.trials {
        let ev = &laws[rng.gen_range(0..laws.len())];
        let z = Complex64::new(
            rng.gen_range(-20.0..20.0),
            rng.gen_range(-4.5f64..2.5).exp(),
        );
        match ev.g(z) {
            Ok(g) => {
                let miss = if g.im < 0.0 {
                    0.0
                } else {
                    g.im.max(f64::MIN_POSITIVE)
                };
                rep.record(z.re, 0.0, g.im, miss);
            }
            Err(e) => rep.record_error(z.re, e),
        }
    }
    rep
}

fn random_compact(rng: &mut ChaCha8Rng) -> LawSpec {
    if rng.gen_bool(0.5) {
        LawSpec::Semicircle {
            center: rng.gen_range(-3.0..3.0),
            variance: rng.gen_range(0.2..4.0),
        }
    } else {
        LawSpec::QuadraticFreeMeixner {
            a: rng.gen_range(0.5..2.0),
            b: rng.gen_range(-2.0..2.0),
            c: rng.gen_range(-0.9..1.0),
        }
    }
}

/// `|z G(z) - 1| <= 1e-4` at `|z| = 1e6`, over laws with a finite mean.
pub fn z_g_limit(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("z-g-limit", 1e-4);
    let mut rng = cfg.rng(6);
    for _ in 0..cfg.trials {
        let spec = random_compact(&mut rng);
        let phi = rng.gen_range(0.0..std::f64::consts::PI);
        let z = Complex64::from_polar(1e6, phi);
        match numeric(&spec).and_then(|ev| ev.g(z)) {
            Ok(g) => rep.record(phi, 1.0, (z * g).re, (z * g - 1.0).norm()),
            Err(e) => rep.record_error(phi, e),
        }
    }
    rep
}

fn measure_gap(a: &RealMeasure, b: &RealMeasure, xs: &[f64]) -> f64 {
    let mut gap = xs
        .iter()
        .map(|&x| (a.density_at(x) - b.density_at(x)).abs())
        .fold(0.0, f64::max);
    if a.atoms().len() != b.atoms().len() {
        return f64::INFINITY;
    }
    for (p, q) in a.atoms().iter().zip(b.atoms()) {
        gap = gap
            .max((p.location - q.location).abs())
            .max((p.weight - q.weight).abs());
    }
    gap
}

/// Reflecting a compactly supported measure twice gives it back.
pub fn reflection_involution(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("reflection-involution", 1e-12);
    let mut rng = cfg.rng(7);
    for _ in 0..cfg.trials {
        let spec = random_compact(&mut rng);
        let xs: Vec<f64> = (0..5).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let twice = spec
            .build_measure()
            .and_then(|m| Ok((m.reflect()?.reflect()?, m)));
        match twice {
            Ok((back, orig)) => rep.record(xs[0], 0.0, 0.0, measure_gap(&orig, &back, &xs)),
            Err(e) => rep.record_error(xs[0], e),
        }
    }
    rep
}

/// `G_{φ(ν)}(z) = δ G_ν(δ z + γ)` for `φ(x) = (x - γ)/δ`, `δ > 0`.
pub fn affine_g(cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("affine-g-identity", cfg.tau_rel);
    let laws = catalog();
    let built: Vec<Result<(RealMeasure, TransformEvaluator)>> = laws
        .iter()
        .map(|s| {
            let m = s.build_measure()?;
            Ok((m.clone(), TransformEvaluator::new(m)?))
        })
        .collect();
    let mut rng = cfg.rng(8);
    for _ in 0..cfg.trials {
        let (nu, ev) = match &built[rng.gen_range(0..built.len())] {
            Ok(v) => v,
            Err(e) => {
                rep.record_error(f64::NAN, e);
                continue;
            }
        };
        let (gamma, delta) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
        let top = (nu.support_sup() - gamma) / delta;
        let z = if rng.gen_bool(0.5) {
            Complex64::new(top + rng.gen_range(0.1..10.0), 0.0)
        } else {
            Complex64::new(top + rng.gen_range(-10.0..10.0), rng.gen_range(0.1..5.0))
        };
        let got = AffineMap::new(gamma, delta)
            .and_then(|map| affine_apply(nu, map))
            .and_then(|img| img.cauchy_g(z));
        match (got, ev.g(z * delta + gamma)) {
            (Ok(l), Ok(r)) => {
                let r = r * delta;
                rep.record(z.re, r.norm(), l.norm(), rel_c(l, r));
            }
            (Err(e), _) | (_, Err(e)) => rep.record_error(z.re, e),
        }
    }
    rep
}

/// Heavy-tailed laws: divergent mean, undefined variance function, and
/// `m/𝕍(m)` decreasing to 0 along `m = -2^k`.
pub fn divergent(cfg: &VerifyConfig) -> Vec<Report> {
    let spec = LawSpec::FreeHalfStable { p: 1.0 };
    let mut mean = Report::new("divergent-mean", 0.0);
    let mut vf = Report::new("variance-function-undefined", 0.0);
    let mut ratio = Report::new("m-over-pv-vanishes", 1e-11);
    let Some(fam) = with_setup(&mut mean, spec.numeric_family()) else {
        return vec![mean];
    };
    match fam.generator().mean() {
        Ok(m) => mean.record(
            0.0,
            f64::NEG_INFINITY,
            m.to_f64(),
            if m == ExtendedReal::NegInfinity {
                0.0
            } else {
                1.0
            },
        ),
        Err(e) => mean.record_error(0.0, e),
    }
    match fam.variance_function(-2.0) {
        Err(Error::MeanUndefined) => vf.record(-2.0, 0.0, 0.0, 0.0),
        Err(e) => vf.record_error(-2.0, e),
        Ok(v) => vf.record(-2.0, f64::NAN, v, 1.0),
    }
    let mut prev = f64::INFINITY;
    for k in 1..=20 {
        let m = -(2f64.powi(k));
        match fam.pseudo_variance(m) {
            Ok(v) => {
                let r = m / v;
                // Positive, decreasing, and with the last value near 0.
                let mut miss: f64 = if r > 0.0 && r < prev { 0.0 } else { 1.0 };
                if k == 20 {
                    miss = miss.max(r);
                }
                ratio.record(m, 1.0 / (m * m), r, miss);
                prev = r;
            }
            Err(e) => ratio.record_error(m, e),
        }
    }
    let _ = cfg;
    vec![mean, vf, ratio]
}
