//! Decimal rendering of exact and algebraic event times.

use kinetri_core::motion::Rational;
use kinetri_core::EventTime;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub const DEFAULT_DIGITS: usize = 12;

fn pow10(k: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), k)
}

/// Largest `e` with `10^e <= r`, for positive `r`.
fn exponent(r: &Rational) -> i64 {
    let mut e = (r.numer().bits() as i64 - r.denom().bits() as i64) * 30103 / 100000;
    let ten = Rational::from_integer(BigInt::from(10));
    let p = |e: i64| if e >= 0 { ten.pow(e as i32) } else { Rational::one() / ten.pow((-e) as i32) };
    while p(e) > *r {
        e -= 1;
    }
    while p(e + 1) <= *r {
        e += 1;
    }
    e
}

/// Renders `r` rounded half-away-from-zero to `digits` significant digits.
/// The flag is true when the rendering equals `r` exactly.
pub fn format_rational(r: &Rational, digits: usize) -> (String, bool) {
    let digits = digits.max(1);
    if r.is_zero() {
        return ("0".into(), true);
    }
    let neg = r.is_negative();
    let a = r.abs();
    let mut e = exponent(&a);
    let shift = digits as i64 - 1 - e;
    let scaled = if shift >= 0 { &a * Rational::from_integer(pow10(shift as usize)) } else { &a / Rational::from_integer(pow10((-shift) as usize)) };
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let exact = rem.is_zero();
    let mut m = if &rem * 2 >= *scaled.denom() { q + 1 } else { q };
    let mut shift = shift;
    if m == pow10(digits) {
        m /= 10;
        e += 1;
        shift -= 1;
    }
    let mut s = m.to_string();
    // Strip trailing zeros, keeping track of the decimal position.
    let mut point = shift;
    while point > 0 && s.ends_with('0') {
        s.pop();
        point -= 1;
    }
    let body = if (-6..15).contains(&e) {
        if point <= 0 {
            format!("{}{}", s, "0".repeat((-point) as usize))
        } else if (point as usize) < s.len() {
            let k = s.len() - point as usize;
            format!("{}.{}", &s[..k], &s[k..])
        } else {
            format!("0.{}{}", "0".repeat(point as usize - s.len()), s)
        }
    } else {
        let mant = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
        format!("{}e{}", mant, e)
    };
    (if neg { format!("-{}", body) } else { body }, exact)
}

/// Renders an event time. Irrational times are refined until both interval
/// ends round to the same decimal (or a refinement budget runs out, in which
/// case the lower end is used); their flag is always false.
pub fn format_time(t: &EventTime, digits: usize) -> (String, bool) {
    if let Some(r) = t.as_rational() {
        return format_rational(r, digits);
    }
    let mut t = t.clone();
    for _ in 0..256 {
        let (a, _) = format_rational(t.lo(), digits);
        let (b, _) = format_rational(t.hi(), digits);
        if a == b {
            return (a, false);
        }
        if let Some(r) = t.as_rational() {
            return format_rational(r, digits);
        }
        t.refine();
    }
    (format_rational(t.lo(), digits).0, false)
}

/// Parses an integer, `p/q` fraction or plain decimal (`-0.125`, `3e-2`).
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {:?}", s))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {:?}", s))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {:?}", s));
        }
        return Ok(Rational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| format!("bad exponent in {:?}", s))?),
        None => (s, 0),
    };
    let (int_part, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{}{}", int_part, frac);
    let m: BigInt = digits.parse().map_err(|_| format!("not a number: {:?}", s))?;
    let e = exp - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let r = Rational::from_integer(m);
    Ok(if e >= 0 { r * ten.pow(e) } else { r / ten.pow(-e) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use kinetri_core::motion::{int, rat};
    use kinetri_core::Polynomial;

    #[test]
    fn exact_and_rounded_rationals() {
        assert_eq!(format_rational(&int(0), 12), ("0".into(), true));
        assert_eq!(format_rational(&rat(1, 8), 12), ("0.125".into(), true));
        assert_eq!(format_rational(&rat(-5, 2), 12), ("-2.5".into(), true));
        assert_eq!(format_rational(&rat(1, 3), 12), ("0.333333333333".into(), false));
        assert_eq!(format_rational(&rat(2, 3), 12), ("0.666666666667".into(), false));
        assert_eq!(format_rational(&int(120), 12), ("120".into(), true));
        assert_eq!(format_rational(&rat(1, 3), 3), ("0.333".into(), false));
        assert_eq!(format_rational(&rat(9999, 1000), 3), ("10".into(), false));
        assert_eq!(format_rational(&rat(1, 1 << 30), 4), ("9.313e-10".into(), false));
    }

    #[test]
    fn irrational_time_rounds_consistently() {
        // Root of t^2 - 2 in [1, 2].
        let p = Polynomial::from_ints(&[-2, 0, 1]);
        let roots = kinetri_core::kernel::isolate_roots(&p, &int(0), &int(2)).unwrap();
        assert_eq!(format_time(&roots[0], 12), ("1.41421356237".into(), false));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("25e-2").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
