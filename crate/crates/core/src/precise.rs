//! Exact characteristic polynomials and double-double arithmetic.
//!
//! Witness polynomials of degree n−1 are wildly ill-conditioned in the
//! monomial basis once the spectrum is spread out: an O(ε) error in one root
//! is multiplied by the product of its distances to all the others. Every f64
//! matrix is a dyadic rational matrix, so its characteristic polynomial can be
//! computed exactly over the integers; the rest is carried in double-double.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::pattern::RealMatrix;

/// `x = m · 2^e` with `m` odd (or zero).
fn decompose(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mut m, mut e) = if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), exp_field - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (if x < 0.0 { -m } else { m }, e)
}

/// `x · 2^e` without intermediate overflow or underflow.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `c · 2^e` rounded to double-double.
fn bigint_to_dd(c: &BigInt, e: i64) -> TwoFloat {
    if c.is_zero() {
        return TwoFloat::from(0.0);
    }
    let bits = c.bits() as i64;
    let shift = (bits - 106).max(0);
    let top: BigInt = c >> shift as usize;
    let hi = top.to_f64().unwrap_or(0.0);
    let rest = &top - BigInt::from(hi as i128);
    let lo = rest.to_f64().unwrap_or(0.0);
    let (hi, lo) = (ldexp(hi, shift + e), ldexp(lo, shift + e));
    TwoFloat::new_add(hi, lo)
}

/// Ascending coefficients of det(xI − M), exact up to the final rounding to
/// double-double. `None` if M has non-finite entries or the result leaves the
/// representable range.
pub(crate) fn charpoly_dd(m: &RealMatrix) -> Option<Vec<TwoFloat>> {
    let n = m.order();
    let parts: Vec<(i64, i32)> = m.data().iter().map(|&x| decompose(x)).collect();
    let e_min = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    let a: Vec<BigInt> = parts
        .iter()
        .map(|&(mant, e)| BigInt::from(mant) << (e - e_min) as usize)
        .collect();
    // Faddeev–LeVerrier; every intermediate is an integer and the divisions are exact.
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::from(1);
    let mut mk = vec![BigInt::zero(); n * n];
    for k in 1..=n {
        for i in 0..n {
            mk[i * n + i] += &c[n - k + 1];
        }
        let mut am = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let ail = &a[i * n + l];
                if ail.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let x = &mk[l * n + j];
                    if !x.is_zero() {
                        am[i * n + j] += ail * x;
                    }
                }
            }
        }
        let tr: BigInt = (0..n).map(|i| &am[i * n + i]).sum();
        c[n - k] = -(tr / BigInt::from(k));
        mk = am;
    }
    // det(xI − M) = Σ c_k · 2^{e_min (n−k)} x^k
    let out: Vec<TwoFloat> = c
        .iter()
        .enumerate()
        .map(|(k, ck)| bigint_to_dd(ck, e_min as i64 * (n - k) as i64))
        .collect();
    let ok = out
        .iter()
        .zip(&c)
        .all(|(d, ck)| d.hi().is_finite() && (ck.is_zero() || d.hi() != 0.0));
    ok.then_some(out)
}

pub(crate) fn horner(coeffs: &[TwoFloat], x: TwoFloat) -> TwoFloat {
    coeffs.iter().rev().fold(TwoFloat::from(0.0), |acc, &c| acc * x + c)
}

/// Newton polish of a simple root.
pub(crate) fn refine_root(p: &[TwoFloat], x0: f64) -> TwoFloat {
    let dp: Vec<TwoFloat> = p.iter().enumerate().skip(1).map(|(k, &c)| c * (k as f64)).collect();
    let mut x = TwoFloat::from(x0);
    for _ in 0..8 {
        let d = horner(&dp, x);
        if d.hi() == 0.0 {
            break;
        }
        let step = horner(p, x) / d;
        x -= step;
        if step.hi().abs() <= 1e-31 * x.hi().abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

/// Σ c_k M^k in double-double, rounded to f64 at the end.
pub(crate) fn evaluate_dd(coeffs: &[TwoFloat], m: &RealMatrix) -> RealMatrix {
    let n = m.order();
    let md = m.data();
    let mut acc = vec![TwoFloat::from(0.0); n * n];
    for &c in coeffs.iter().rev() {
        let mut next = vec![TwoFloat::from(0.0); n * n];
        for i in 0..n {
            for l in 0..n {
                let x = acc[i * n + l];
                if x.hi() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let y = md[l * n + j];
                    if y != 0.0 {
                        next[i * n + j] += x * y;
                    }
                }
            }
            next[i * n + i] += c;
        }
        acc = next;
    }
    let data: Vec<f64> = acc.iter().map(|x| x.hi() + x.lo()).collect();
    RealMatrix::new(n, data).unwrap_or_else(|_| RealMatrix::zeros(n))
}
