//! Exact rational scalars and the square-root comparisons needed for p = 2 norms.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^e for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Parses `num/den` or a bare integer. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "`{t}` is not an exact rational; write it as num/den"
        )));
    }
    let parse_int = |part: &str| -> Result<BigInt, Error> {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("`{t}` is not an exact rational")))
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{t}` has a zero denominator")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(parse_int(t)?)),
    }
}

/// Always `num/den`, including integers (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// floor(sqrt(q)) for q >= 0.
pub fn sqrt_floor(q: &Rational) -> BigInt {
    assert!(!q.is_negative(), "square root of a negative rational");
    floor_int(q).sqrt()
}

pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn scaled_isqrt(q: &Rational, bits: u64) -> (BigInt, BigInt) {
    // sqrt(n/d) = sqrt(n*d)/d
    let scale = BigInt::one() << bits;
    let radicand = q.numer() * q.denom() * &scale * &scale;
    (radicand.sqrt(), q.denom() * scale)
}

/// Rational upper bound on sqrt(q) within 2^-bits relative scale; exact when q is a square.
pub fn sqrt_upper(q: &Rational, bits: u64) -> Rational {
    if let Some(r) = exact_sqrt(q) {
        return r;
    }
    let (s, den) = scaled_isqrt(q, bits);
    Rational::new(s + 1, den)
}

/// Rational lower bound on sqrt(q); exact when q is a square.
pub fn sqrt_lower(q: &Rational, bits: u64) -> Rational {
    if let Some(r) = exact_sqrt(q) {
        return r;
    }
    let (s, den) = scaled_isqrt(q, bits);
    Rational::new(s, den)
}

/// Orders sqrt(a) against sqrt(b) + t exactly, for a, b >= 0 and any rational t.
pub fn cmp_sqrt_shifted(a: &Rational, b: &Rational, t: &Rational) -> Ordering {
    debug_assert!(!a.is_negative() && !b.is_negative());
    // sign of u = sqrt(b) + t
    let u_sign = if !t.is_negative() {
        if t.is_zero() && b.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Greater
        }
    } else {
        b.cmp(&(t * t))
    };
    match u_sign {
        Ordering::Less => return Ordering::Greater,
        Ordering::Equal => return a.cmp(&Rational::zero()),
        Ordering::Greater => {}
    }
    // both sides positive: compare a with b + t^2 + 2 t sqrt(b)
    let w = a - b - t * t;
    if b.is_zero() || t.is_zero() {
        return w.cmp(&Rational::zero());
    }
    let v_sq = int(4) * t * t * b;
    if t.is_positive() {
        if !w.is_positive() {
            Ordering::Less
        } else {
            (&w * &w).cmp(&v_sq)
        }
    } else if !w.is_negative() {
        Ordering::Greater
    } else {
        v_sq.cmp(&(&w * &w))
    }
}

/// Orders sum(sqrt(lhs_i)) against sum(sqrt(rhs_i)) exactly. Each side carries at most two
/// nonnegative radicands.
pub fn cmp_root_sums(lhs: &[Rational], rhs: &[Rational]) -> Ordering {
    assert!(lhs.len() <= 2 && rhs.len() <= 2, "at most two radicands per side");
    let zero = Rational::zero();
    let get = |s: &[Rational], i: usize| s.get(i).cloned().unwrap_or_else(|| zero.clone());
    let (a, b) = (get(lhs, 0), get(lhs, 1));
    let (c, d) = (get(rhs, 0), get(rhs, 1));
    for r in [&a, &b, &c, &d] {
        assert!(!r.is_negative(), "negative radicand");
    }
    // squares of nonnegative sides preserve order:
    // a + b + 2 sqrt(ab) vs c + d + 2 sqrt(cd)
    let four = int(4);
    cmp_sqrt_shifted(&(&four * &a * &b), &(&four * &c * &d), &(&c + &d - &a - &b))
}
