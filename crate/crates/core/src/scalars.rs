//! Exact coefficient fields.
//!
//! Two backends implement [`Field`]: prime fields GF(p) with residues stored
//! as `u64`, and the rationals backed by arbitrary-precision fractions. All
//! algebra in this crate is generic over the trait; runtime selection goes
//! through [`FieldSpec`] and the [`with_field!`](crate::with_field) macro.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for GF(p); keeps every product inside `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

pub trait Field: Clone + Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn parse(&self, text: &str) -> Result<Self::Elem>;
    fn format(&self, a: &Self::Elem) -> String;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Every element, for finite fields small enough to enumerate.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    fn sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// Which coefficient field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum FieldSpec {
    Prime { p: u64 },
    Rationals,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p > MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidField(format!("gf:{p}")));
        }
        Ok(FieldSpec::Prime { p })
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `gf:<p>` or `q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("gf:")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| Error::InvalidField(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

impl Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "gf:{p}"),
            FieldSpec::Rationals => write!(f, "q"),
        }
    }
}

/// Runs `$body` with `$f` bound to the concrete field named by `$spec`.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match $spec {
            $crate::scalars::FieldSpec::Prime { p } => {
                let $f = $crate::scalars::PrimeField::new(p)
                    .expect("FieldSpec::Prime always holds a validated prime");
                $body
            }
            $crate::scalars::FieldSpec::Rationals => {
                let $f = $crate::scalars::Rationals;
                $body
            }
        }
    };
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// GF(p), residues kept in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        FieldSpec::prime(p)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        v.mod_floor(&m).to_u64().expect("residue fits in u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime { p: self.p }
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
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
        (a * b) % self.p
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        // Fermat: a^(p-2)
        let mut base = *a;
        let mut exp = self.p - 2;
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        Ok(acc)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn parse(&self, text: &str) -> Result<u64> {
        let err = || Error::ParseScalar {
            text: text.to_string(),
            field: self.spec().to_string(),
        };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num = self.reduce_big(&num.parse::<BigInt>().map_err(|_| err())?);
        match den {
            None => Ok(num),
            Some(d) => {
                let d = self.reduce_big(&d.parse::<BigInt>().map_err(|_| err())?);
                self.div(&num, &d).map_err(|_| err())
            }
        }
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }

    fn elements(&self) -> Option<Vec<u64>> {
        (self.p <= 1 << 16).then(|| (0..self.p).collect())
    }
}

/// The rationals, as reduced `BigRational` fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

/// Numerators of random rationals are drawn from `-RANDOM_RANGE..=RANDOM_RANGE`,
/// denominators from `1..=RANDOM_RANGE`.
const RANDOM_RANGE: i64 = 9;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn parse(&self, text: &str) -> Result<BigRational> {
        let err = || Error::ParseScalar {
            text: text.to_string(),
            field: "q".to_string(),
        };
        let t = text.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse::<BigInt>().map_err(|_| err())?;
                let d = d.trim().parse::<BigInt>().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(BigRational::new(n, d))
            }
            None => Ok(BigRational::from_integer(
                t.parse::<BigInt>().map_err(|_| err())?,
            )),
        }
    }

    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n = rng.gen_range(-RANDOM_RANGE..=RANDOM_RANGE);
        let d = rng.gen_range(1..=RANDOM_RANGE);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
}
