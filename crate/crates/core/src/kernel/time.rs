use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use super::{KernelError, Sign};
use crate::motion::{rational_sqrt, Polynomial, Rational};

fn psign(p: &Polynomial, t: &Rational) -> Sign {
    match p.sign_at(t) {
        core::cmp::Ordering::Greater => Sign::Pos,
        core::cmp::Ordering::Less => Sign::Neg,
        core::cmp::Ordering::Equal => Sign::Zero,
    }
}


fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn below(v: f64) -> f64 {
    v - v.abs() * 1e-14 - 1e-300
}

fn above(v: f64) -> f64 {
    v + v.abs() * 1e-14 + 1e-300
}

fn from_f64(v: f64) -> Option<Rational> {
    if v.is_finite() {
        Rational::from_float(v)
    } else {
        None
    }
}

fn eval_f64(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// A real root of a square-free rational polynomial, pinned down by an
/// isolating interval `[lo, hi]`. When `lo == hi` the time is the rational
/// `lo`; otherwise the polynomial is nonzero at both ends and has exactly one
/// (simple) root strictly inside.
#[derive(Clone)]
pub struct EventTime {
    poly: Polynomial,
    lo: Rational,
    hi: Rational,
    odd: bool,
    approx: f64,
    lo_f: f64,
    hi_f: f64,
}

impl fmt::Debug for EventTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "t={}", self.lo)
        } else {
            write!(f, "t~{:.15e} in [{}, {}] of {:?}", self.approx, self.lo, self.hi, self.poly)
        }
    }
}

impl EventTime {
    pub fn exact(t: Rational) -> Self {
        let approx = to_f64(&t);
        EventTime {
            poly: Polynomial::root_factor(&t),
            lo: t.clone(),
            hi: t,
            odd: true,
            approx,
            lo_f: below(approx),
            hi_f: above(approx),
        }
    }

    /// `poly` must be square-free with a sign change over `[lo, hi]`.
    fn isolated(poly: Polynomial, lo: Rational, hi: Rational, odd: bool) -> Self {
        let mut t = EventTime { poly, lo, hi, odd, approx: 0.0, lo_f: 0.0, hi_f: 0.0 };
        t.polish();
        t
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    /// Multiplicity parity of the root in the polynomial it was isolated from.
    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    fn update_floats(&mut self) {
        self.lo_f = below(to_f64(&self.lo));
        self.hi_f = above(to_f64(&self.hi));
        if self.is_exact() {
            self.approx = to_f64(&self.lo);
        }
    }

    fn set_exact(&mut self, r: Rational) {
        self.lo = r.clone();
        self.hi = r;
        self.update_floats();
    }

    /// Float bisection for the approximate value, then an attempt to shrink
    /// the exact interval around it.
    fn polish(&mut self) {
        if self.is_exact() {
            self.update_floats();
            return;
        }
        let coeffs = self.poly.approx_coeffs();
        let s_lo = psign(&self.poly, &self.lo);
        let (mut a, mut b) = (to_f64(&self.lo), to_f64(&self.hi));
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let v = eval_f64(&coeffs, m);
            if v == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (v > 0.0) == (s_lo == Sign::Pos) {
                a = m;
            } else {
                b = m;
            }
        }
        let m = 0.5 * (a + b);
        self.approx = m;
        let delta = m.abs().max(1e-3) * 1e-12;
        if let (Some(ra), Some(rb)) = (from_f64(m - delta), from_f64(m + delta)) {
            if ra > self.lo && rb < self.hi {
                let sa = psign(&self.poly, &ra);
                let sb = psign(&self.poly, &rb);
                if sa == Sign::Zero {
                    self.set_exact(ra);
                    return;
                }
                if sb == Sign::Zero {
                    self.set_exact(rb);
                    return;
                }
                if sa == s_lo && sb != s_lo {
                    self.lo = ra;
                    self.hi = rb;
                }
            }
        }
        self.update_floats();
    }

    /// One exact bisection step.
    pub fn refine(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        let s_mid = psign(&self.poly, &mid);
        if s_mid == Sign::Zero {
            self.set_exact(mid);
            return;
        }
        if s_mid == psign(&self.poly, &self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
        self.update_floats();
    }

    pub fn refine_below(&mut self, width: &Rational) {
        while !self.is_exact() && &(&self.hi - &self.lo) >= width {
            self.refine();
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if r < &self.lo {
            return Ordering::Greater;
        }
        if r > &self.hi {
            return Ordering::Less;
        }
        if self.is_exact() {
            return Ordering::Equal;
        }
        if r == &self.lo {
            return Ordering::Greater;
        }
        if r == &self.hi {
            return Ordering::Less;
        }
        let s = psign(&self.poly, r);
        if s == Sign::Zero {
            Ordering::Equal
        } else if s == psign(&self.poly, &self.lo) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Sign of `p` at this time.
    pub fn sign_of(&self, p: &Polynomial) -> Sign {
        if p.is_zero() {
            return Sign::Zero;
        }
        if self.is_exact() {
            return psign(p, &self.lo);
        }
        let g = p.gcd(&self.poly);
        if g.degree() >= 1 && psign(&g, &self.lo) != psign(&g, &self.hi) {
            return Sign::Zero;
        }
        let mut t = self.clone();
        loop {
            if t.is_exact() {
                return psign(p, &t.lo);
            }
            if p.descartes_bound(&t.lo, &t.hi) == 0 {
                let mid = (&t.lo + &t.hi) / Rational::from_integer(2.into());
                return psign(p, &mid);
            }
            t.refine();
        }
    }

    /// Sign of `p` on an open interval immediately to the right of this
    /// time: the sign of the first derivative that does not vanish here.
    pub fn sign_after(&self, p: &Polynomial) -> Sign {
        let mut q = p.clone();
        while !q.is_zero() {
            let s = self.sign_of(&q);
            if s != Sign::Zero {
                return s;
            }
            q = q.derivative();
        }
        Sign::Zero
    }
}

/// Exact total order on event times: disjoint intervals decide at once,
/// overlapping ones are tested for a common root through the gcd of the
/// defining polynomials and otherwise refined until they separate.
pub fn compare_times(a: &EventTime, b: &EventTime) -> Ordering {
    if a.hi_f < b.lo_f || a.hi < b.lo {
        return Ordering::Less;
    }
    if b.hi_f < a.lo_f || b.hi < a.lo {
        return Ordering::Greater;
    }
    if a.is_exact() {
        return b.cmp_rational(&a.lo).reverse();
    }
    if b.is_exact() {
        return a.cmp_rational(&b.lo);
    }
    let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
    let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
    let g = a.poly.gcd(&b.poly);
    if g.degree() >= 1 && psign(&g, lo) != psign(&g, hi) {
        return Ordering::Equal;
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if b.hi < a.lo {
            return Ordering::Greater;
        }
        if a.is_exact() {
            return b.cmp_rational(&a.lo).reverse();
        }
        if b.is_exact() {
            return a.cmp_rational(&b.lo);
        }
        if &a.hi - &a.lo >= &b.hi - &b.lo {
            a.refine();
        } else {
            b.refine();
        }
    }
}

impl PartialEq for EventTime {
    fn eq(&self, other: &Self) -> bool {
        compare_times(self, other) == Ordering::Equal
    }
}

impl Eq for EventTime {}

impl PartialOrd for EventTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EventTime {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_times(self, other)
    }
}

/// All real roots of `p` in the closed interval `[lo, hi]`, sorted, each
/// tagged with the parity of its multiplicity.
pub fn isolate_roots(p: &Polynomial, lo: &Rational, hi: &Rational) -> Result<Vec<EventTime>, KernelError> {
    if p.is_zero() {
        return Err(KernelError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    match p.degree() {
        0 => {}
        1 => squarefree_roots(p, lo, hi, true, &mut out),
        2 => {
            let (c, b, a) = (p.coeff(0), p.coeff(1), p.coeff(2));
            let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
            if disc.is_zero() {
                let r = -b / (Rational::from_integer(2.into()) * a);
                if &r >= lo && &r <= hi {
                    let mut t = EventTime::exact(r);
                    t.odd = false;
                    out.push(t);
                }
            } else {
                squarefree_roots(p, lo, hi, true, &mut out);
            }
        }
        _ => {
            for (f, m) in p.square_free_decomposition() {
                squarefree_roots(&f, lo, hi, m % 2 == 1, &mut out);
            }
        }
    }
    out.sort_by(compare_times);
    Ok(out)
}

fn squarefree_roots(f: &Polynomial, lo: &Rational, hi: &Rational, odd: bool, out: &mut Vec<EventTime>) {
    let push_exact = |r: Rational, out: &mut Vec<EventTime>| {
        let mut t = EventTime::exact(r);
        t.odd = odd;
        out.push(t);
    };
    match f.degree() {
        0 => {}
        1 => {
            let r = -f.coeff(0) / f.coeff(1);
            if &r >= lo && &r <= hi {
                push_exact(r, out);
            }
        }
        2 => {
            let (c, b, a) = (f.coeff(0), f.coeff(1), f.coeff(2));
            let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
            if disc.is_negative() {
                return;
            }
            let two_a = Rational::from_integer(2.into()) * &a;
            if let Some(s) = rational_sqrt(&disc) {
                for r in [(-&b - &s) / &two_a, (-&b + &s) / &two_a] {
                    if &r >= lo && &r <= hi {
                        push_exact(r, out);
                    }
                }
                return;
            }
            // Irrational roots: the quadratic is monotone on each side of its
            // vertex and nonzero at every rational point.
            let v = -&b / &two_a;
            let (s_lo, s_hi) = (psign(f, lo), psign(f, hi));
            if lo < &v {
                let right = if hi < &v { hi.clone() } else { v.clone() };
                if psign(f, &right) != s_lo {
                    out.push(EventTime::isolated(f.clone(), lo.clone(), right, odd));
                }
            }
            if hi > &v {
                let left = if lo > &v { lo.clone() } else { v };
                if psign(f, &left) != s_hi {
                    out.push(EventTime::isolated(f.clone(), left, hi.clone(), odd));
                }
            }
        }
        _ => descartes_roots(f, lo, hi, odd, out),
    }
}

fn descartes_roots(f: &Polynomial, lo: &Rational, hi: &Rational, odd: bool, out: &mut Vec<EventTime>) {
    let mut roots = Vec::new();
    if psign(f, lo) == Sign::Zero {
        roots.push(EventTime::exact(lo.clone()));
    }
    if hi != lo && psign(f, hi) == Sign::Zero {
        roots.push(EventTime::exact(hi.clone()));
    }
    let two = Rational::from_integer(2.into());
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        if a >= b {
            continue;
        }
        match f.descartes_bound(&a, &b) {
            0 => continue,
            1 if psign(f, &a) != Sign::Zero && psign(f, &b) != Sign::Zero => {
                roots.push(EventTime::isolated(f.clone(), a, b, odd));
                continue;
            }
            _ => {}
        }
        let m = (&a + &b) / &two;
        if psign(f, &m) == Sign::Zero {
            roots.push(EventTime::exact(m.clone()));
        }
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
    for mut r in roots {
        r.odd = odd;
        out.push(r);
    }
}
