//! Real principal-branch Lambert W: the inverse of `w * exp(w)` on `w >= -1`.
//!
//! An initial guess (series near the branch point, `x` itself near zero,
//! log-based for large arguments) is refined by Halley iteration.

use crate::error::{Error, Result};

const MAX_HALLEY_STEPS: usize = 50;
const REL_TOL: f64 = 1e-12;

/// Branch point abscissa, -1/e.
pub const BRANCH_POINT: f64 = -0.36787944117144233;

/// Principal branch `W0(x)` for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < BRANCH_POINT {
        // allow arguments within one ulp-ish of the branch point
        if x.is_finite() && x >= BRANCH_POINT * (1.0 + 1e-12) {
            return Ok(-1.0);
        }
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let w0 = initial_guess_w0(x);
    Ok(halley(x, w0, -1.0))
}

/// Secondary branch `W-1(x)` on `[-1/e, 0)`; needed internally where an
/// energy equality binds on the far side of its turning point.
pub(crate) fn lambert_wm1(x: f64) -> Result<f64> {
    if !x.is_finite() || x < BRANCH_POINT || x >= 0.0 {
        if x.is_finite() && x < 0.0 && x >= BRANCH_POINT * (1.0 + 1e-12) {
            return Ok(-1.0);
        }
        return Err(Error::LambertDomain(x));
    }
    let w0 = initial_guess_wm1(x);
    Ok(halley(x, w0, f64::NEG_INFINITY).min(-1.0))
}

fn initial_guess_w0(x: f64) -> f64 {
    if x < -0.3 {
        // series around the branch point, rho = sqrt(2(e x + 1))
        let rho = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + rho - rho * rho / 3.0 + 11.0 * rho.powi(3) / 72.0
    } else if x < 3.0 {
        // ln(1+x) tracks W0 well through the midrange; the log asymptote
        // below is useless near x = 1 where ln ln x blows up
        (1.0 + x).ln()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn initial_guess_wm1(x: f64) -> f64 {
    if x < -0.27 {
        let rho = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 - rho - rho * rho / 3.0 - 11.0 * rho.powi(3) / 72.0
    } else {
        // asymptote for x -> 0-
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

fn halley(x: f64, mut w: f64, floor: f64) -> f64 {
    if w < floor {
        w = floor;
    }
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            // derivative singularity at the branch point; plain Newton on
            // the residual cannot help here either, so step off it slightly
            w += 1e-12;
            continue;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= REL_TOL * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((lambert_w0(e).unwrap() - 1.0).abs() <= 1e-12);
        assert!((lambert_w0(BRANCH_POINT).unwrap() + 1.0).abs() <= 1e-6);
        assert!((lambert_w0(2.0 * e * e).unwrap() - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn domain_error_below_branch_point() {
        assert!(matches!(lambert_w0(-0.4), Err(Error::LambertDomain(_))));
        assert!(matches!(lambert_wm1(0.1), Err(Error::LambertDomain(_))));
    }

    #[test]
    fn round_trip_w0() {
        // deterministic sweep of w in [-1, 20]
        let n = 10_000;
        for i in 0..n {
            let w = -1.0 + 21.0 * (i as f64 + 0.5) / n as f64;
            let x = w * w.exp();
            let back = lambert_w0(x).unwrap();
            assert!(
                (back - w).abs() <= 1e-10 * w.abs().max(1.0),
                "w={w} x={x} back={back}"
            );
        }
    }

    #[test]
    fn round_trip_wm1() {
        let n = 2_000;
        for i in 0..n {
            let w = -1.0 - 30.0 * (i as f64 + 0.5) / n as f64;
            let x = w * w.exp();
            if x == 0.0 {
                continue;
            }
            let back = lambert_wm1(x).unwrap();
            assert!(
                (back - w).abs() <= 1e-9 * w.abs().max(1.0),
                "w={w} x={x} back={back}"
            );
        }
    }

    #[test]
    fn monotone_increasing() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let x = BRANCH_POINT + (50.0 - BRANCH_POINT) * i as f64 / 999.0;
            let w = lambert_w0(x).unwrap();
            assert!(w >= prev - 1e-12, "not monotone at x={x}");
            prev = w;
        }
    }
}
