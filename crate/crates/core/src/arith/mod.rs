//! Exact arithmetic over Q with p-adic valuations, plus polynomial
//! utilities over Q and over the residue field F_p.
//!
//! Everything here is exact: rationals are arbitrary-precision and kept in
//! lowest terms by `num_rational`, valuations are integers. Valuations are
//! always normalized to v(p) = 1 in the base ring; the degree-2 ramified
//! extension taken by the covering step enters downstream as an explicit
//! factor, never by renormalizing this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub mod fppoly;
pub mod primes;
pub mod ratpoly;

pub use fppoly::{legendre, odd_multiplicity_roots, FpPoly, OddRoots};
pub use ratpoly::{
    gauss_valuation, rational_roots, reduce_unit_poly, substitute_affine, RatPoly,
};

/// An odd prime, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::ResidueCharTwo);
        }
        if !primes::is_prime_u64(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(OddPrime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for OddPrime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The value group Z together with v(0) = infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Finite value, panicking on v(0); for call sites that have already
    /// excluded zero.
    pub fn finite(self) -> i64 {
        match self {
            Valuation::Finite(v) => v,
            Valuation::Infinite => panic!("expected a finite valuation"),
        }
    }

    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Infinite, v) | (v, Valuation::Infinite) => v,
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.min(b)),
        }
    }

    /// min(self, d) for a finite cutoff d, the convention used on vertex
    /// charts where v(0) is truncated to the disc depth.
    pub fn min_finite(self, d: i64) -> i64 {
        match self {
            Valuation::Infinite => d,
            Valuation::Finite(v) => v.min(d),
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

fn int_val(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// The p-adic valuation of a rational number, v(0) = infinity.
pub fn val(q: &BigRational, p: OddPrime) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    // q is in lowest terms, so at most one of numerator and denominator is
    // divisible by p.
    let vn = int_val(q.numer(), p.get());
    if vn > 0 {
        return Valuation::Finite(vn);
    }
    Valuation::Finite(-int_val(q.denom(), p.get()))
}

/// p^d as an exact rational, d possibly negative.
pub fn prime_power(p: OddPrime, d: i64) -> BigRational {
    let pk = BigInt::from(p.get()).pow(d.unsigned_abs() as u32);
    if d >= 0 {
        BigRational::from_integer(pk)
    } else {
        BigRational::new(BigInt::one(), pk)
    }
}

/// Residue in [0, p) of a p-integral rational.
///
/// Panics if the denominator is divisible by p; callers divide out the
/// Gauss valuation first.
pub fn residue(q: &BigRational, p: OddPrime) -> u64 {
    let pb = BigInt::from(p.get());
    let num = q.numer().mod_floor(&pb);
    let den = q.denom().mod_floor(&pb);
    let den64 = u64::try_from(&den).expect("residue fits u64");
    assert!(den64 != 0, "residue of a non p-integral rational");
    let num64 = u64::try_from(&num).expect("residue fits u64");
    let inv = fppoly::inv_mod(den64, p.get());
    (num64 as u128 * inv as u128 % p.get() as u128) as u64
}

/// Parse a rational in the form "a" or "a/b".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Format as "a" or "a/b", lowest terms.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
