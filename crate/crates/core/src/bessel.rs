//! Bessel functions of the first kind for integer order.
//!
//! Values come from Miller's backward recurrence, normalized with the
//! Neumann sum `J_0(x) + 2 Σ_{k≥1} J_{2k}(x) = 1`. The recurrence is stable in
//! the downward direction for every order, so one pass yields `J_n(x)` for
//! orders well above `x` (Wannier-Stark tails) and around it (γ, zeros).

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest supported |order|.
pub const MAX_ORDER: u32 = 256;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 128.0;
/// Fixed part of the orders added above `m = max(|n|, ceil(x))` before
/// starting the recurrence; the full margin is this plus `√(160 m)`.
pub const RECURRENCE_MARGIN: u32 = 40;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_n(x)` for `|n| ≤ 256` and `0 ≤ x ≤ 128`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if n.unsigned_abs() > MAX_ORDER {
        return Err(Error::Domain {
            function: "bessel_j",
            detail: format!("order {n} exceeds ±{MAX_ORDER}"),
        });
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Domain {
            function: "bessel_j",
            detail: format!("argument {x} outside [0, {MAX_ARGUMENT}]"),
        });
    }
    let order = n.unsigned_abs();
    let value = if x == 0.0 {
        if order == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        miller(order, x)
    };
    // J_{-n} = (-1)^n J_n
    Ok(if n < 0 && order % 2 == 1 { -value } else { value })
}

fn miller(order: u32, x: f64) -> f64 {
    let m = order.max(x.ceil() as u32);
    let mut start = m + RECURRENCE_MARGIN + (160.0 * f64::from(m)).sqrt().ceil() as u32;
    if start % 2 == 1 {
        start += 1;
    }

    // j_hi = J_{k+1}, j = J_k, both up to a common (unknown) scale.
    let mut j_hi = 0.0_f64;
    let mut j = 1e-30_f64;
    let mut norm = 2.0 * j;
    let mut wanted = if start == order { j } else { 0.0 };
    let two_over_x = 2.0 / x;

    for k in (1..=start).rev() {
        let j_lo = f64::from(k) * two_over_x * j - j_hi;
        j_hi = j;
        j = j_lo;
        let lower = k - 1;
        if lower == order {
            wanted = j;
        }
        if lower == 0 {
            norm += j;
        } else if lower % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > RESCALE_ABOVE {
            j *= RESCALE_BY;
            j_hi *= RESCALE_BY;
            norm *= RESCALE_BY;
            wanted *= RESCALE_BY;
        }
    }
    wanted / norm
}

/// Largest k accepted by [`j0_zero`].
pub const MAX_ZERO_INDEX: u32 = 40;

/// The k-th positive zero of `J_0`, `1 ≤ k ≤ 40`, to within 1e-12.
///
/// Bracketed around the McMahon estimate `(k - 1/4)π`; neighbouring zeros are
/// about π apart so a ±π/4 bracket isolates exactly one sign change.
pub fn j0_zero(k: u32) -> Result<f64> {
    if !(1..=MAX_ZERO_INDEX).contains(&k) {
        return Err(Error::Domain {
            function: "j0_zero",
            detail: format!("zero index {k} outside [1, {MAX_ZERO_INDEX}]"),
        });
    }
    let beta = (f64::from(k) - 0.25) * PI;
    let mut lo = beta - PI / 4.0;
    let mut hi = beta + PI / 4.0;
    let mut f_lo = bessel_j(0, lo)?;
    let f_hi = bessel_j(0, hi)?;
    debug_assert!(f_lo * f_hi < 0.0, "bracket around zero {k} lost its sign change");

    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let f_mid = bessel_j(0, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series, usable where its terms stay below ~1e4 (x ≲ 10).
    fn series(n: u32, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = (1..=n).fold(1.0, |acc, k| acc * half / f64::from(k));
        let mut sum = term;
        for k in 1..200 {
            term *= -half * half / (f64::from(k) * f64::from(k + n));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    /// `J_n(x) = (1/π) ∫_0^π cos(nτ - x sin τ) dτ`; the trapezoid rule on the
    /// full period converges geometrically for this entire integrand.
    fn integral(n: i32, x: f64) -> f64 {
        let m = 4096;
        let h = 2.0 * PI / f64::from(m);
        let s: f64 = (0..m)
            .map(|i| {
                let tau = f64::from(i) * h;
                (f64::from(n) * tau - x * tau.sin()).cos()
            })
            .sum();
        s / f64::from(m)
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_series_for_small_arguments() {
        for &x in &[0.01, 0.5, 1.0, 2.404825557695773, 3.7, 6.0, 9.0] {
            for n in 0..30 {
                let want = series(n, x);
                let got = bessel_j(n as i32, x).unwrap();
                assert!((got - want).abs() < 1e-12, "J_{n}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn matches_periodic_quadrature_for_large_arguments() {
        for &x in &[14.445, 24.3525, 28.89, 60.0, 127.5] {
            for n in [-120, -31, -2, 0, 1, 5, 29, 64, 150] {
                let want = integral(n, x);
                let got = bessel_j(n, x).unwrap();
                assert!((got - want).abs() < 1e-12, "J_{n}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn frozen_reference_values() {
        // scipy.special.jv
        let cases = [
            (0, 28.89, -0.146_191_375_860_616_23),
            (1, 24.3525, -0.161_701_361_586_784_58),
            (2, 28.89, 0.147_796_088_661_444_67),
            (40, 14.445, 7.491_749_079_919_824e-15),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn zero_of_j0_from_series_bisection() {
        // Bisection on the series alone.
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if series(0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404825557695773).abs() < 1e-12);
        assert!(bessel_j(0, 2.404825557695773).unwrap().abs() < 1e-10);
    }

    #[test]
    fn zeros_of_j0() {
        assert!((j0_zero(1).unwrap() - 2.404825557695773).abs() < 1e-12);
        assert!((j0_zero(2).unwrap() - 5.520078110286311).abs() < 1e-11);
        assert!((j0_zero(8).unwrap() - 24.352471530749302).abs() < 1e-11);
        assert!((j0_zero(9).unwrap() - 27.493479132040253).abs() < 1e-11);
        for k in 1..=MAX_ZERO_INDEX {
            let z = j0_zero(k).unwrap();
            assert!(bessel_j(0, z).unwrap().abs() < 1e-10, "k = {k}");
        }
        for k in 20..MAX_ZERO_INDEX {
            let gap = j0_zero(k + 1).unwrap() - j0_zero(k).unwrap();
            assert!((gap - PI).abs() < 0.01);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j(257, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_j(0, -0.5), Err(Error::Domain { .. })));
        assert!(matches!(bessel_j(0, 128.5), Err(Error::Domain { .. })));
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(j0_zero(0), Err(Error::Domain { .. })));
        assert!(matches!(j0_zero(41), Err(Error::Domain { .. })));
    }
}
