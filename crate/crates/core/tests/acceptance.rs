//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::time::Instant;

use csk_core::laws::LawSpec;
use csk_core::reciprocity::ReciprocalPair;
use csk_core::report::Report;
use csk_core::transforms::TransformEvaluator;
use csk_core::verify::{self, VerifyConfig};
use csk_core::CauchyTransform;

fn numeric_m_plus(spec: &LawSpec) -> csk_core::Result<f64> {
    let ev = TransformEvaluator::new(spec.build_measure()?)?;
    Ok(ev.support_bound_b() - ev.g_at_b().recip().to_f64())
}

fn named_domains(cfg: &VerifyConfig) -> Vec<Report> {
    let cases = [
        (LawSpec::FreeHalfStable { p: 1.0 }, -1.0),
        (LawSpec::FreeRessel {}, -2.0),
        (LawSpec::FreeStrictArcsine {}, -0.5),
        (LawSpec::FreeAbel {}, 0.0),
        (
            LawSpec::Semicircle {
                center: 0.0,
                variance: 1.0,
            },
            1.0,
        ),
    ];
    cases
        .iter()
        .map(|(spec, expected)| {
            let mut r = Report::new(format!("m-plus:{spec}"), cfg.tau_rel);
            match numeric_m_plus(spec) {
                Ok(v) => r.record_abs(0.0, *expected, v),
                Err(e) => r.record_error(0.0, e),
            }
            r
        })
        .collect()
}

fn reciprocity(cfg: &VerifyConfig) -> Vec<Report> {
    let sc = LawSpec::Semicircle {
        center: 0.0,
        variance: 1.0,
    };
    let mut out = Vec::new();
    match ReciprocalPair::from_laws(&sc, &LawSpec::FreeHalfStable { p: 1.0 }) {
        Ok(pair) => {
            out.push(pair.check_r_identity());
            out.push(pair.check_symmetry());
        }
        Err(e) => {
            let mut r = Report::new("pair", 1e-8);
            r.record_error(0.0, e);
            out.push(r);
        }
    }
    out.extend(
        verify::reciprocity(cfg)
            .into_iter()
            .filter(|r| r.check_name.starts_with("pv-relation")),
    );
    out
}

fn main() {
    let cfg = VerifyConfig::default();
    type Check = fn(&VerifyConfig) -> Vec<Report>;
    let criteria: [(&str, Check); 9] = [
        ("closed-form vs quadrature G", verify::oracle),
        ("domain-of-means tables", |c| {
            let mut v = verify::domains(c);
            v.extend(named_domains(c));
            v
        }),
        ("pseudo-variance round trip", verify::roundtrip),
        ("R identity on mean grids", verify::r_identity),
        ("reciprocity", reciprocity),
        ("Stieltjes inversion", verify::stieltjes),
        ("convolution powers", verify::reproductive),
        ("property suites", |c| {
            let mut v = vec![verify::g_inequality(c), verify::bis(c)];
            v.extend(verify::properties(c));
            v
        }),
        ("divergent mean", verify::divergent),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let reports = check(&cfg);
        let secs = start.elapsed().as_secs_f64();
        let pass = reports.iter().all(|r| r.pass) && secs < 60.0;
        let worst = reports
            .iter()
            .map(|r| r.max_residual / r.tolerance.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        println!(
            "criterion {}: {} {name} ({} checks, worst residual/tolerance {worst:.3e}, {secs:.2}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            reports.len(),
        );
        for r in reports.iter().filter(|r| !r.pass) {
            println!(
                "    failed {}: max residual {:.3e} > {:.1e}{}",
                r.check_name,
                r.max_residual,
                r.tolerance,
                r.error
                    .as_deref()
                    .map(|e| format!(" ({e})"))
                    .unwrap_or_default()
            );
        }
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
