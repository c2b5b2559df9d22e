//! Exact coefficient fields.
//!
//! Two fields back every computation in this crate: the rationals with
//! arbitrary-precision reduced fractions, and prime fields `F_p` for a
//! word-size prime `p` (odd or even). Both sit behind the [`Field`] trait so
//! polynomial arithmetic, Groebner bases and the homology linear algebra are
//! written once.
//!
//! All elements are immutable values; every operation is pure.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Errors from field construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Inverse or division by the zero element.
    DivisionByZero,
    /// A prime field was requested for a composite or unit modulus.
    NotPrime(u64),
    /// A coefficient literal could not be parsed.
    Parse(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DivisionByZero => write!(f, "division by zero"),
            FieldError::NotPrime(n) => write!(f, "{n} is not prime"),
            FieldError::Parse(s) => write!(f, "cannot parse coefficient: {s}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// Identifies a coefficient field: the rationals or a prime field.
///
/// `characteristic` is 0 exactly for the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldDescriptor {
    Rationals,
    PrimeField { p: u64 },
}

impl FieldDescriptor {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals => 0,
            FieldDescriptor::PrimeField { p } => *p,
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::PrimeField { p } => write!(f, "F{p}"),
        }
    }
}

/// An exact field of coefficients.
///
/// Implementations must keep elements canonical: reduced fractions with
/// positive denominators over the rationals, residues in `[0, p)` over `F_p`.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug + Send + Sync + 'static;

    fn descriptor(&self) -> FieldDescriptor;
    fn characteristic(&self) -> u64 {
        self.descriptor().characteristic()
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool;

    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Image of an arbitrary-precision integer under `Z -> K`.
    ///
    /// Binomial coefficients are computed over the integers and mapped in
    /// through this, which is correct in every characteristic.
    #[allow(clippy::wrong_self_convention)]
    fn from_integer(&self, n: &BigInt) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError>;

    /// Scales a row of elements by one nonzero constant to keep entries
    /// small during elimination. Scaling preserves ranks and right-kernels,
    /// which is all the elimination users rely on. Default: no-op.
    fn normalize_row(&self, _row: &mut [Self::Elem]) {}

    /// Enumerates every field element for finite fields; `None` when the
    /// field is infinite. Root scans over `F_p` use this.
    fn all_elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Rendering used inside polynomial strings: `a/b` (or `a`) over the
    /// rationals, the bare residue over a prime field.
    fn render(&self, a: &Self::Elem) -> String;
    /// Rendering used in reports: same as [`Field::render`] over the
    /// rationals, `r mod p` over a prime field.
    fn render_report(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, FieldError>;
}

/// The field of rational numbers. Elements are always fully reduced with
/// positive denominator; the canonical zero is `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_integer(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(a.recip())
    }

    fn normalize_row(&self, row: &mut [BigRational]) {
        use num_integer::Integer;
        // multiply by the lcm of denominators, divide by the gcd of numerators
        let mut den_lcm = BigInt::one();
        for v in row.iter() {
            if !v.is_zero() {
                den_lcm = den_lcm.lcm(v.denom());
            }
        }
        let mut num_gcd = BigInt::zero();
        for v in row.iter() {
            if !v.is_zero() {
                num_gcd = num_gcd.gcd(&(v.numer() * (&den_lcm / v.denom())));
            }
        }
        if num_gcd.is_zero() || (num_gcd.is_one() && den_lcm.is_one()) {
            return;
        }
        let scale = BigRational::new(den_lcm, num_gcd);
        for v in row.iter_mut() {
            *v *= &scale;
        }
    }

    fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational, FieldError> {
        if b.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(a / b)
    }

    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn render_report(&self, a: &BigRational) -> String {
        self.render(a)
    }

    fn parse(&self, s: &str) -> Result<BigRational, FieldError> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let numer: BigInt = num
            .parse()
            .map_err(|_| FieldError::Parse(s.to_string()))?;
        let denom: BigInt = match den {
            Some(d) => d.parse().map_err(|_| FieldError::Parse(s.to_string()))?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(BigRational::new(numer, denom))
    }
}

/// The prime field `F_p` for a machine-word prime `p`.
///
/// Residues live in `[0, p)`. Primality of `p` is established at
/// construction by a deterministic Miller-Rabin test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// All field elements, in residue order. Used by exhaustive scans.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }

    fn reduce_i128(&self, n: i128) -> u64 {
        let p = self.p as i128;
        (((n % p) + p) % p) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::PrimeField { p: self.p }
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn is_one(&self, a: &u64) -> bool {
        *a == 1 % self.p
    }

    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i128(n as i128)
    }

    fn from_integer(&self, n: &BigInt) -> u64 {
        use num_integer::Integer;
        let m = n.mod_floor(&BigInt::from(self.p));
        let digits = m.to_u64_digits().1;
        digits.first().copied().unwrap_or(0)
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

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        // extended Euclid on (a, p)
        let (mut t, mut new_t): (i128, i128) = (0, 1);
        let (mut r, mut new_r): (i128, i128) = (self.p as i128, *a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1, "modulus is prime, nonzero elements are units");
        Ok(self.reduce_i128(t))
    }

    fn div(&self, a: &u64, b: &u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn all_elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }

    fn render(&self, a: &u64) -> String {
        a.to_string()
    }

    fn render_report(&self, a: &u64) -> String {
        format!("{} mod {}", a, self.p)
    }

    fn parse(&self, s: &str) -> Result<u64, FieldError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = self.parse(n)?;
            let d = self.parse(d)?;
            return self.div(&n, &d).map_err(|_| FieldError::DivisionByZero);
        }
        let n: i128 = s.parse().map_err(|_| FieldError::Parse(s.to_string()))?;
        Ok(self.reduce_i128(n))
    }
}

/// Deterministic Miller-Rabin primality test for `u64`.
///
/// The fixed witness set is known to be exact for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime_u64(n)).collect()
}

/// Binomial coefficient over the integers.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn rational_arithmetic_is_exact() {
        let q = Rationals;
        let half = q.parse("1/2").unwrap();
        let third = q.parse("1/3").unwrap();
        assert_eq!(q.add(&half, &third), q.parse("5/6").unwrap());
    }

    #[test]
    fn rational_canonical_form() {
        let q = Rationals;
        let r = q.parse("-4/-6").unwrap();
        assert!(r.denom().is_positive());
        assert_eq!(q.render(&r), "2/3");
        let z = q.sub(&half_of(&q), &half_of(&q));
        assert_eq!(q.render(&z), "0");
    }

    fn half_of(q: &Rationals) -> BigRational {
        q.parse("1/2").unwrap()
    }

    #[test]
    fn prime_field_inverse() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(&3).unwrap(), 5);
        assert_eq!(f7.mul(&3, &5), 1);
    }

    #[test]
    fn characteristic_two() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(f2.add(&1, &1), 0);
        assert_eq!(f2.characteristic(), 2);
        assert_eq!(Rationals.characteristic(), 0);
        assert_eq!(PrimeField::new(5).unwrap().characteristic(), 5);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let q = Rationals;
        assert_eq!(q.inv(&q.zero()), Err(FieldError::DivisionByZero));
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(f2.inv(&0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(PrimeField::new(6).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(PrimeField::new(1).unwrap_err(), FieldError::NotPrime(1));
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(9007199254740881).is_ok());
    }

    #[test]
    fn primes_up_to_ten() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
    }

    #[test]
    fn binomials_reduce_into_the_field() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(f2.from_integer(&binomial(2, 1)), 0);
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn render_parse_round_trip() {
        let q = Rationals;
        for s in ["0", "7", "-3", "22/7", "-5/9"] {
            let a = q.parse(s).unwrap();
            assert_eq!(q.parse(&q.render(&a)).unwrap(), a);
        }
        let f11 = PrimeField::new(11).unwrap();
        for r in 0..11 {
            assert_eq!(f11.parse(&f11.render(&r)).unwrap(), r);
        }
        assert_eq!(f11.render_report(&4), "4 mod 11");
    }
}
