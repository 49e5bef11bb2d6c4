use std::fmt::Write as _;
use std::path::Path;

use csk_core::csk::CSKFamily;
use csk_core::laws::LawSpec;
use csk_core::quadrature::QuadConfig;
use csk_core::report::{Report, REPORT_SCHEMA};
use csk_core::transforms::{
    default_eps_schedule, stieltjes_invert, CauchyTransform, TransformEvaluator,
};
use csk_core::verify::{Suite, VerifyConfig, TAU_REL};
use csk_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::grid::GridSpec;

/// Failure classes, mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid law specs: exit 2.
    Usage(String),
    /// A numerical routine failed: exit 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_)
            | Error::InvalidPv(_)
            | Error::AlphaOutOfRange { .. }
            | Error::InvalidMap(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub fn load_law(path: &Path) -> Result<LawSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let spec: LawSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

/// Shortest decimal that survives rounding to 15 significant digits, so
/// closed-form values such as `-2` print without trailing noise.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.14e}").parse().unwrap_or(v);
    let r = if rounded == 0.0 { 0.0 } else { rounded };
    r.to_string()
}

pub struct DensityOptions {
    pub numeric: bool,
    pub eps_schedule: Option<Vec<f64>>,
}

/// CSV `x,density,atom_weight`; atoms follow the grid rows.
pub fn density(spec: &LawSpec, grid: &GridSpec, opts: &DensityOptions) -> Result<String, CliError> {
    let measure = spec.build_measure()?;
    let xs = grid.points();
    let values: Vec<f64> = if opts.numeric {
        let eps = opts
            .eps_schedule
            .clone()
            .unwrap_or_else(default_eps_schedule);
        let t = spec.closed_transform()?;
        let est: Vec<Result<f64, Error>> = xs
            .par_iter()
            .map(|&x| stieltjes_invert(|z| t.g(z), &[x], &eps).map(|d| d[0].density))
            .collect();
        est.into_iter().collect::<Result<_, _>>()?
    } else {
        xs.par_iter().map(|&x| measure.density_at(x)).collect()
    };
    let mut out = String::from("x,density,atom_weight\n");
    for (x, d) in xs.iter().zip(values) {
        let _ = writeln!(out, "{},{},0", fmt_num(*x), fmt_num(d));
    }
    for a in measure.atoms() {
        let _ = writeln!(out, "{},0,{}", fmt_num(a.location), fmt_num(a.weight));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    #[value(name = "G")]
    G,
    #[value(name = "R")]
    R,
    #[value(name = "PV")]
    Pv,
    #[value(name = "M")]
    M,
    #[value(name = "mean-of-theta")]
    MeanOfTheta,
}

fn numeric_family(spec: &LawSpec, tol: Option<f64>) -> Result<CSKFamily, Error> {
    let m = spec.build_measure()?;
    let cfg = QuadConfig::relative(tol.unwrap_or(1e-12));
    CSKFamily::from_transform(TransformEvaluator::with_config(m.clone(), cfg)?, m)
}

/// CSV `input,value`. Inputs outside the domain of `which` are skipped and
/// counted in the returned note.
pub fn transform(
    spec: &LawSpec,
    which: Which,
    grid: &GridSpec,
    numeric: bool,
    tol: Option<f64>,
) -> Result<(String, Vec<f64>), CliError> {
    let fam = if numeric {
        numeric_family(spec, tol)?
    } else {
        spec.closed_family()?
    };
    let closed = if numeric {
        None
    } else {
        Some(spec.closed_transform()?)
    };
    let t: &dyn CauchyTransform = match &closed {
        Some(c) => c,
        None => fam.transform(),
    };
    let xs = grid.points();
    let rows: Vec<Result<f64, Error>> = xs
        .par_iter()
        .map(|&x| match which {
            Which::G => t.g_real(x),
            Which::R => t.r_transform(x),
            Which::Pv if !numeric => spec.closed_pv(x),
            Which::Pv => fam.pseudo_variance(x),
            Which::M => fam.normalizer_m(x),
            Which::MeanOfTheta => fam.mean_of_theta(x),
        })
        .collect();
    let mut out = String::from("input,value\n");
    let mut skipped = Vec::new();
    for (x, r) in xs.iter().zip(rows) {
        match r {
            Ok(v) => {
                let _ = writeln!(out, "{},{}", fmt_num(*x), fmt_num(v));
            }
            Err(Error::Domain { .. }) => skipped.push(*x),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((out, skipped))
}

#[derive(Serialize)]
struct Document<'a> {
    schema: &'static str,
    reports: &'a [Report],
}

/// Runs the suite (its parts in parallel, output in a fixed order) and
/// returns the JSON document and whether every check passed.
pub fn verify(suite: Suite, seed: u64, tol: Option<f64>) -> (String, bool) {
    let cfg = VerifyConfig {
        seed,
        tau_rel: tol.unwrap_or(TAU_REL),
        ..VerifyConfig::default()
    };
    let reports: Vec<Report> = suite
        .parts()
        .par_iter()
        .map(|s| s.run(&cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let doc = Document {
        schema: REPORT_SCHEMA,
        reports: &reports,
    };
    let json = serde_json::to_string_pretty(&doc).expect("reports serialize");
    (json + "\n", pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_print_cleanly() {
        assert_eq!(fmt_num(-2.0000000000000004), "-2");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn half_stable_r_row() {
        let spec = LawSpec::FreeHalfStable { p: 1.0 };
        let grid: GridSpec = "0.25:0.5:2".parse().unwrap();
        let (csv, skipped) = transform(&spec, Which::R, &grid, false, None).unwrap();
        assert!(csv.contains("\n0.25,-2\n"), "{csv}");
        assert!(skipped.is_empty());
    }

    #[test]
    fn takacs_atom_row() {
        let spec = LawSpec::FreeTakacs { r: 0.5 };
        let grid: GridSpec = "-3:-1.5:4".parse().unwrap();
        let csv = density(
            &spec,
            &grid,
            &DensityOptions {
                numeric: false,
                eps_schedule: None,
            },
        )
        .unwrap();
        assert!(csv.ends_with("\n-1,0,0.5\n"), "{csv}");
    }

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(
            CliError::from(Error::InvalidSpec("x".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::from(Error::RootFinding("x".into())).exit_code(),
            3
        );
    }
}
