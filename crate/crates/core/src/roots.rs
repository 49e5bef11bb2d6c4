//! Bracketed root finding for monotone functions that may fail to evaluate.

use std::cell::RefCell;

use roots::{find_root_brent, Convergency};

use crate::error::{Error, Result};

/// Relative tolerance on the abscissa.
pub const TAU_ROOT: f64 = 1e-12;

struct RelativeStep {
    rel: f64,
}

impl Convergency<f64> for RelativeStep {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.rel * x1.abs().max(x2.abs()) + f64::MIN_POSITIVE
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter > 300
    }
}

/// Root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite signs.
pub(crate) fn brent<F>(f: F, lo: f64, hi: f64, rel: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |x: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match f(x) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let mut conv = RelativeStep { rel };
    let root = find_root_brent(lo, hi, g, &mut conv);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    root.map_err(|e| Error::RootFinding(format!("{e:?} on [{lo}, {hi}]")))
}

/// Moves `hi` away from `lo` geometrically until `pred(hi)` holds.
pub(crate) fn expand_until<P>(lo: f64, first_step: f64, pred: P) -> Result<f64>
where
    P: Fn(f64) -> Result<bool>,
{
    let mut step = first_step;
    for _ in 0..200 {
        let x = lo + step;
        if !x.is_finite() {
            break;
        }
        if pred(x)? {
            return Ok(x);
        }
        step *= 2.0;
    }
    Err(Error::RootFinding(format!("no bracket found above {lo}")))
}

/// Moves `x` toward `lo` geometrically until `pred(x)` holds.
pub(crate) fn shrink_until<P>(lo: f64, first_step: f64, pred: P) -> Result<f64>
where
    P: Fn(f64) -> Result<bool>,
{
    let mut step = first_step;
    for _ in 0..1100 {
        let x = lo + step;
        if x <= lo {
            break;
        }
        if pred(x)? {
            return Ok(x);
        }
        step *= 0.5;
    }
    Err(Error::RootFinding(format!("no bracket found near {lo}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let r = brent(|x| Ok(x * x * x - 2.0), 0.0, 4.0, TAU_ROOT).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn propagates_evaluation_errors() {
        let r = brent(|_| Err(Error::MeanUndefined), 0.0, 1.0, TAU_ROOT);
        assert_eq!(r, Err(Error::MeanUndefined));
    }

    #[test]
    fn reports_missing_bracket() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0, TAU_ROOT),
            Err(Error::RootFinding(_))
        ));
        let hi = expand_until(0.0, 1.0, |x| Ok(x > 100.0)).unwrap();
        assert!(hi > 100.0 && hi <= 200.0);
    }
}
