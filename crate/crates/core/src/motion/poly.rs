use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Dense univariate polynomial with exact rational coefficients, constant
/// term first. The coefficient vector never has a trailing zero, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})t", c)?,
                _ => write!(f, "({})t^{}", c, k)?,
            }
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `t - r`
    pub fn root_factor(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Power-sum evaluation, kept as an independent check of [`Self::eval`].
    pub fn eval_naive(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut pw = Rational::one();
        for c in &self.coeffs {
            acc += c * &pw;
            pw *= t;
        }
        acc
    }

    pub fn sign_at(&self, t: &Rational) -> Ordering {
        if let Some(s) = self.sign_at_approx(t) {
            return s;
        }
        self.eval(t).cmp(&Rational::zero())
    }

    /// Floating-point sign with a forward error bound; `None` when the
    /// value is too close to zero to decide.
    pub fn sign_at_approx(&self, t: &Rational) -> Option<Ordering> {
        if self.coeffs.is_empty() {
            return Some(Ordering::Equal);
        }
        let x = t.to_f64()?;
        if !x.is_finite() {
            return None;
        }
        let ax = x.abs();
        let (mut v, mut mag, mut dmag) = (0.0f64, 0.0f64, 0.0f64);
        for c in self.coeffs.iter().rev() {
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            dmag = dmag * ax + mag;
            v = v * x + cf;
            mag = mag * ax + cf.abs();
        }
        if !mag.is_finite() || !dmag.is_finite() {
            return None;
        }
        let k = self.coeffs.len() as f64;
        let err = mag * (4.0 * k + 4.0) * f64::EPSILON + 2.0 * dmag * ax * f64::EPSILON + 1e-290;
        if v.abs() > err {
            Some(if v > 0.0 { Ordering::Greater } else { Ordering::Less })
        } else {
            None
        }
    }

    pub fn approx_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lead = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, the product of the distinct irreducible factors.
    pub fn square_free(&self) -> Self {
        if self.degree() < 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    /// Yun's square-free decomposition: `p = c * prod f_i^i`, returned as
    /// `(f_i, i)` pairs with nonconstant `f_i`.
    pub fn square_free_decomposition(&self) -> Vec<(Polynomial, usize)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let d = self.derivative();
        let mut a = self.gcd(&d);
        let mut b = self.div_rem(&a).0;
        let mut c = d.div_rem(&a).0;
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() >= 1 {
            a = b.gcd(&dd);
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            if a.degree() >= 1 {
                out.push((a.monic(), i));
            }
            dd = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// `p(a + s*x)`
    pub fn compose_affine(&self, a: &Rational, s: &Rational) -> Self {
        // Horner with polynomial accumulator.
        let lin = Self::new(vec![a.clone(), s.clone()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Sign variations of the coefficients of `(1+x)^d p(1/(1+x))` for
    /// `p` mapped onto (0,1): Descartes' bound for roots inside `(lo, hi)`.
    pub fn descartes_bound(&self, lo: &Rational, hi: &Rational) -> usize {
        let q = self.compose_affine(lo, &(hi - lo));
        let d = q.degree();
        let mut rev: Vec<Rational> = (0..=d).map(|k| q.coeff(d - k)).collect();
        // Taylor shift by 1.
        for k in (0..d).rev() {
            for j in k..d {
                let v = rev[j + 1].clone();
                rev[j] += v;
            }
        }
        let mut last = 0i8;
        let mut var = 0;
        for c in &rev {
            let s = if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    var += 1;
                }
                last = s;
            }
        }
        var
    }
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub(crate) fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::rat;

    #[test]
    fn horner_matches_power_sum() {
        let p = Polynomial::new(vec![rat(1, 3), rat(-2, 1), rat(5, 7), rat(1, 2)]);
        for k in -5..5 {
            let t = rat(k, 3);
            assert_eq!(p.eval(&t), p.eval_naive(&t));
        }
    }

    #[test]
    fn division_and_gcd() {
        let a = Polynomial::from_ints(&[-1, 1]); // t - 1
        let b = Polynomial::from_ints(&[-2, 1]); // t - 2
        let c = Polynomial::from_ints(&[1, 0, 1]); // t^2 + 1
        let p = a.mul(&b).mul(&c);
        let (q, r) = p.div_rem(&c);
        assert!(r.is_zero());
        assert_eq!(q, a.mul(&b));
        assert_eq!(p.gcd(&a.mul(&a)), a);
    }

    #[test]
    fn yun_decomposition_recovers_multiplicities() {
        let a = Polynomial::from_ints(&[-1, 1]);
        let b = Polynomial::from_ints(&[3, 1]);
        let p = a.mul(&a).mul(&a).mul(&b).scale(&rat(5, 1));
        let dec = p.square_free_decomposition();
        assert_eq!(dec, vec![(b.clone(), 1), (a.clone(), 3)]);
        assert_eq!(p.square_free(), a.mul(&b));
    }

    #[test]
    fn descartes_counts() {
        let p = Polynomial::from_ints(&[-1, 0, 1]); // roots +-1
        assert_eq!(p.descartes_bound(&rat(0, 1), &rat(2, 1)), 1);
        assert_eq!(p.descartes_bound(&rat(2, 1), &rat(3, 1)), 0);
        assert_eq!(p.descartes_bound(&rat(-2, 1), &rat(2, 1)) % 2, 0);
    }

    #[test]
    fn perfect_square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
