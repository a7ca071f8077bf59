//! Univariate integer polynomials and rational functions in t, used for
//! Poincaré series.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::rational::Q;

/// A polynomial Σ cᵢ tⁱ with integer coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::from_i64s(&[1])
    }

    pub fn monomial(c: i64, k: usize) -> Self {
        let mut cs = vec![BigInt::zero(); k + 1];
        cs[k] = BigInt::from(c);
        Poly::new(cs)
    }

    /// (1 − t^m)^k.
    pub fn one_minus_t_pow(m: usize, k: usize) -> Self {
        let base = &Poly::one() - &Poly::monomial(1, m);
        (0..k).fold(Poly::one(), |acc, _| &acc * &base)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    fn to_q(&self) -> Vec<Q> {
        self.coeffs.iter().map(|c| Q::from_integer(c.clone())).collect()
    }

    /// Multiplicity of t = 1 as a root.
    pub fn multiplicity_at_one(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let mut p = self.clone();
        let mut k = 0;
        let one_minus_t = Poly::from_i64s(&[1, -1]);
        while p.eval_at_one().is_zero() {
            p = p.div_exact(&one_minus_t).expect("t = 1 is a root");
            k += 1;
        }
        k
    }

    /// Exact quotient when `d` divides `self` over Z.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = div_rem_q(&self.to_q(), &d.to_q());
        if r.iter().any(|c| !c.is_zero()) || q.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(Poly::new(q.into_iter().map(|c| c.to_integer()).collect()))
    }

    fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

fn trim_q(v: &mut Vec<Q>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn div_rem_q(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r = a.to_vec();
    trim_q(&mut r);
    let mut b = b.to_vec();
    trim_q(&mut b);
    assert!(!b.is_empty(), "division by zero polynomial");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Q::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &f * bc;
        }
        q[shift] = f;
        r.pop();
        trim_q(&mut r);
    }
    trim_q(&mut q);
    (q, r)
}

fn gcd_q(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_q(&mut x);
    trim_q(&mut y);
    while !y.is_empty() {
        let (_, r) = div_rem_q(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Clears denominators of a rational coefficient vector and divides by content.
fn primitive_part(v: &[Q]) -> Poly {
    let l = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let p = Poly::new(v.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect());
    let g = p.content();
    if g.is_zero() {
        return p;
    }
    Poly::new(p.coeffs.iter().map(|c| c / &g).collect())
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{mag}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// A fraction of integer polynomials in lowest terms, with the denominator's
/// lowest nonzero coefficient positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFunctionQ {
    numerator: Poly,
    denominator: Poly,
}

impl RationalFunctionQ {
    pub fn new(numerator: Poly, denominator: Poly) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        if numerator.is_zero() {
            return RationalFunctionQ {
                numerator,
                denominator: Poly::one(),
            };
        }
        let nq = numerator.to_q();
        let dq = denominator.to_q();
        let g = gcd_q(&nq, &dq);
        let (nr, _) = div_rem_q(&nq, &g);
        let (dr, _) = div_rem_q(&dq, &g);
        // Scale both by the same factor so the pair is integral and coprime.
        let l = nr
            .iter()
            .chain(dr.iter())
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let lq = Q::from_integer(l);
        let mut num = Poly::new(nr.iter().map(|c| (c * &lq).to_integer()).collect());
        let mut den = Poly::new(dr.iter().map(|c| (c * &lq).to_integer()).collect());
        let content = num.content().gcd(&den.content());
        num = Poly::new(num.coeffs.iter().map(|c| c / &content).collect());
        den = Poly::new(den.coeffs.iter().map(|c| c / &content).collect());
        let lowest = den.coeffs.iter().find(|c| !c.is_zero()).unwrap();
        if lowest.is_negative() {
            num = &Poly::zero() - &num;
            den = &Poly::zero() - &den;
        }
        RationalFunctionQ {
            numerator: num,
            denominator: den,
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalFunctionQ {
        RationalFunctionQ::new(&self.numerator * p, self.denominator.clone())
    }

    pub fn add(&self, other: &RationalFunctionQ) -> RationalFunctionQ {
        RationalFunctionQ::new(
            &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator),
            &self.denominator * &other.denominator,
        )
    }

    /// The polynomial this function equals, if the denominator is a unit.
    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.denominator.degree() != Some(0) {
            return None;
        }
        let d = Poly::new(vec![self.denominator.coeff(0)]);
        self.numerator.div_exact(&d)
    }

    /// Taylor coefficients at t = 0 up to degree `k`.
    pub fn taylor(&self, k: usize) -> Vec<Q> {
        let d0 = Q::from_integer(self.denominator.coeff(0));
        assert!(!d0.is_zero(), "series has a pole at t = 0");
        let mut out: Vec<Q> = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut acc = Q::from_integer(self.numerator.coeff(i));
            for j in 1..=i {
                let dj = self.denominator.coeff(j);
                if !dj.is_zero() {
                    acc -= Q::from_integer(dj) * &out[i - j];
                }
            }
            out.push(acc / &d0);
        }
        out
    }

    /// Order of the pole at t = 1 (negative for a zero).
    pub fn pole_order_at_one(&self) -> i64 {
        self.denominator.multiplicity_at_one() as i64 - self.numerator.multiplicity_at_one() as i64
    }
}

impl fmt::Display for RationalFunctionQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

/// Normalizes a rational-coefficient polynomial to a primitive integer one.
pub fn primitive(v: &[Q]) -> Poly {
    primitive_part(v)
}
