//! Coefficient domains used across the crate.
//!
//! Arithmetic is organized around context structs rather than element-only
//! traits so that runtime parameters (a prime modulus, a truncation cap)
//! live in one place and elements stay as plain data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

/// Commutative ring with explicit context. Elements are cheap to clone for
/// the small domains; `BigRational` clones allocate but stay modest here.
pub trait Ring: Clone {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }
    /// a += b * c, the workhorse of every inner loop here.
    fn mul_add_assign(&self, a: &mut Self::Elem, b: &Self::Elem, c: &Self::Elem) {
        let p = self.mul(b, c);
        *a = self.add(a, &p);
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Ring with division where it exists. `inv` returns None for non-units so
/// rings of Laurent polynomials can participate (only monomials invert).
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// Z/p for an odd prime p < 2^31, so products of reduced elements fit in u64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 31), "modulus must be below 2^31");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Maps a rational a/b into the field; None when p divides b.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<u64> {
        let p = BigInt::from(self.p);
        let n = ((num % &p) + &p) % &p;
        let d = ((den % &p) + &p) % &p;
        let n = n.to_u64_digits().1.first().copied().unwrap_or(0);
        let d = d.to_u64_digits().1.first().copied().unwrap_or(0);
        if d == 0 {
            return None;
        }
        Some(self.mul(&n, &self.inv(&d).unwrap()))
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended euclid on (a, p)
        let (mut r0, mut r1) = (*a as i64, self.p as i64);
        let (mut s0, mut s1) = (1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        assert_eq!(r0, 1, "modulus is not prime");
        Some(s0.rem_euclid(self.p as i64) as u64)
    }
}

/// Exact rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

/// Rings that can absorb rational step weights.
pub trait WeightMap: Ring {
    fn map_weight(&self, w: &BigRational) -> Option<Self::Elem>;
}

impl WeightMap for PrimeField {
    fn map_weight(&self, w: &BigRational) -> Option<u64> {
        self.from_ratio(w.numer(), w.denom())
    }
}

impl WeightMap for Rationals {
    fn map_weight(&self, w: &BigRational) -> Option<BigRational> {
        Some(w.clone())
    }
}

pub fn rational_from_parts(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `a` or `a/b`, the form used in model files.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_parse(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().ok()?;
    let den: BigInt = d.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn rational_is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

pub fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// Laurent polynomials in one variable over a base ring, used as the
/// coefficient domain when one free variable is kept symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<E> {
    /// exponent of the first stored coefficient
    pub offset: i64,
    /// coefficients for offset, offset+1, ...; no leading/trailing zeros
    pub coeffs: Vec<E>,
}

#[derive(Clone, Debug)]
pub struct LaurentRing<R: Ring> {
    pub base: R,
}

impl<R: Ring> LaurentRing<R> {
    pub fn new(base: R) -> Self {
        LaurentRing { base }
    }

    pub fn monomial(&self, exp: i64, c: R::Elem) -> Laurent<R::Elem> {
        if self.base.is_zero(&c) {
            return Laurent { offset: 0, coeffs: vec![] };
        }
        Laurent { offset: exp, coeffs: vec![c] }
    }

    pub fn constant(&self, c: R::Elem) -> Laurent<R::Elem> {
        self.monomial(0, c)
    }

    fn normalize(&self, mut l: Laurent<R::Elem>) -> Laurent<R::Elem> {
        while l.coeffs.last().map_or(false, |c| self.base.is_zero(c)) {
            l.coeffs.pop();
        }
        let lead = l.coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        if lead > 0 {
            l.coeffs.drain(..lead);
            l.offset += lead as i64;
        }
        if l.coeffs.is_empty() {
            l.offset = 0;
        }
        l
    }

    pub fn coeff(&self, l: &Laurent<R::Elem>, exp: i64) -> R::Elem {
        let i = exp - l.offset;
        if i < 0 || i as usize >= l.coeffs.len() {
            self.base.zero()
        } else {
            l.coeffs[i as usize].clone()
        }
    }

    pub fn eval(&self, l: &Laurent<R::Elem>, x: &R::Elem, xinv: &R::Elem) -> R::Elem {
        let mut acc = self.base.zero();
        for (i, c) in l.coeffs.iter().enumerate() {
            let e = l.offset + i as i64;
            let m = if e >= 0 {
                self.base.pow(x, e as u64)
            } else {
                self.base.pow(xinv, (-e) as u64)
            };
            self.base.mul_add_assign(&mut acc, c, &m);
        }
        acc
    }

    pub fn min_exp(&self, l: &Laurent<R::Elem>) -> Option<i64> {
        if l.coeffs.is_empty() {
            None
        } else {
            Some(l.offset)
        }
    }

    pub fn max_exp(&self, l: &Laurent<R::Elem>) -> Option<i64> {
        if l.coeffs.is_empty() {
            None
        } else {
            Some(l.offset + l.coeffs.len() as i64 - 1)
        }
    }
}

impl<R: Ring> Ring for LaurentRing<R> {
    type Elem = Laurent<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Laurent { offset: 0, coeffs: vec![] }
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.coeffs.is_empty() {
            return b.clone();
        }
        if b.coeffs.is_empty() {
            return a.clone();
        }
        let lo = a.offset.min(b.offset);
        let hi = (a.offset + a.coeffs.len() as i64).max(b.offset + b.coeffs.len() as i64);
        let mut coeffs = vec![self.base.zero(); (hi - lo) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            coeffs[(a.offset - lo) as usize + i] = c.clone();
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(b.offset - lo) as usize + i];
            *slot = self.base.add(slot, c);
        }
        self.normalize(Laurent { offset: lo, coeffs })
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.zero();
        }
        let mut coeffs = vec![self.base.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(ca) {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                self.base.mul_add_assign(&mut coeffs[i + j], ca, cb);
            }
        }
        self.normalize(Laurent { offset: a.offset + b.offset, coeffs })
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Laurent {
            offset: a.offset,
            coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(),
        }
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_i64(n))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }
}

impl<F: Field> Field for LaurentRing<F> {
    /// Only monomials are units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.coeffs.len() != 1 {
            return None;
        }
        let c = self.base.inv(&a.coeffs[0])?;
        Some(self.monomial(-a.offset, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = PrimeField::new(45007);
        assert_eq!(f.add(&45000, &10), 3);
        assert_eq!(f.sub(&3, &10), 45000);
        let a = 12345u64;
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), 1);
        assert_eq!(f.from_i64(-1), 45006);
        assert_eq!(f.pow(&2, 16), 65536 % 45007);
    }

    #[test]
    fn laurent_mul_and_add() {
        let r = LaurentRing::new(Rationals);
        // (y + y^{-1})^2 = y^2 + 2 + y^{-2}
        let s = r.add(&r.monomial(1, Rationals.one()), &r.monomial(-1, Rationals.one()));
        let sq = r.mul(&s, &s);
        assert_eq!(r.coeff(&sq, 2), Rationals.one());
        assert_eq!(r.coeff(&sq, 0), Rationals.from_i64(2));
        assert_eq!(r.coeff(&sq, -2), Rationals.one());
        assert_eq!(r.coeff(&sq, 1), Rationals.zero());
        let diff = r.sub(&sq, &sq);
        assert!(r.is_zero(&diff));
    }

    #[test]
    fn laurent_inverse_of_monomial() {
        let r = LaurentRing::new(PrimeField::new(101));
        let m = r.monomial(3, 7);
        let inv = r.inv(&m).unwrap();
        assert_eq!(r.mul(&m, &inv), r.one());
        let not_mono = r.add(&r.monomial(0, 1), &r.monomial(1, 1));
        assert!(r.inv(&not_mono).is_none());
    }

    #[test]
    fn rational_round_trip() {
        let r = rational_parse("-3/4").unwrap();
        assert_eq!(rational_to_string(&r), "-3/4");
        assert_eq!(rational_to_string(&rational_parse("5").unwrap()), "5");
        assert!(rational_parse("1/0").is_none());
    }
}
