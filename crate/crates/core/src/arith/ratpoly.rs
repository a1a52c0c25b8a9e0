//! Dense polynomials over Q: affine substitution, Gauss valuations,
//! reduction to the residue field, and rational root extraction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{primes, prime_power, val, FpPoly, OddPrime, Valuation};
use crate::error::{Error, Result};

/// Polynomial over Q, coefficient of x^i at index i, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly::new(vec![c])
    }

    /// c * prod_i (x - roots[i])
    pub fn from_roots(c: &BigRational, roots: &[BigRational]) -> Self {
        let mut f = RatPoly::constant(c.clone());
        for r in roots {
            f = f.mul(&RatPoly::new(vec![-r.clone(), BigRational::one()]));
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("leading coefficient of zero")
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact division by (x - r); panics if r is not a root.
    fn deflate(&self, r: &BigRational) -> RatPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len() - 1];
        let mut carry = BigRational::zero();
        for i in (1..self.coeffs.len()).rev() {
            carry = &self.coeffs[i] + &carry * r;
            out[i - 1] = carry.clone();
        }
        let rem = &self.coeffs[0] + carry * r;
        assert!(rem.is_zero(), "deflation by a non-root");
        RatPoly::new(out)
    }
}

/// g with g(X) = f(a + p^d X). The degree is preserved; d may be negative.
pub fn substitute_affine(f: &RatPoly, a: &BigRational, d: i64, p: OddPrime) -> RatPoly {
    assert!(!f.is_zero(), "affine substitution into the zero polynomial");
    let scale = prime_power(p, d);
    let linear = RatPoly::new(vec![a.clone(), scale]);
    let mut acc = RatPoly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&linear);
        if acc.is_zero() {
            acc = RatPoly::constant(c.clone());
        } else {
            acc.coeffs[0] += c;
            acc = RatPoly::new(acc.coeffs);
        }
    }
    acc
}

/// Minimum of the coefficient valuations of f.
pub fn gauss_valuation(f: &RatPoly, p: OddPrime) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut min = Valuation::Infinite;
    for c in f.coeffs() {
        min = min.min(val(c, p));
    }
    Ok(min.finite())
}

/// Coefficientwise reduction of f / p^v modulo p.
///
/// Requires gauss_valuation(f) == v so that the result is a nonzero
/// polynomial over F_p.
pub fn reduce_unit_poly(f: &RatPoly, v: i64, p: OddPrime) -> Result<FpPoly> {
    let found = gauss_valuation(f, p)?;
    if found != v {
        return Err(Error::ValuationMismatch {
            expected: v,
            found,
        });
    }
    let shift = prime_power(p, -v);
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| super::residue(&(c * &shift), p))
        .collect();
    Ok(FpPoly::new(p, coeffs))
}

/// All rational roots of f with multiplicities, via the rational-root
/// theorem on the primitive integer form, deflating as roots are found.
///
/// Errors with [`Error::IrrationalBranchPoints`] unless f splits into
/// rational linear factors; on success, c * prod (x-root)^mult == f exactly
/// for c the leading coefficient (asserted).
pub fn rational_roots(f: &RatPoly) -> Result<Vec<(BigRational, usize)>> {
    assert!(!f.is_zero() && f.degree() >= 1, "roots of a (near-)constant");
    let mut roots: Vec<(BigRational, usize)> = Vec::new();
    let mut g = f.clone();

    // Strip roots at zero first so the constant term is nonzero below.
    while g.coeffs()[0].is_zero() {
        g = g.deflate(&BigRational::zero());
        bump(&mut roots, BigRational::zero());
        if g.degree() == 0 {
            return finish(f, roots);
        }
    }

    'outer: while g.degree() >= 1 {
        // Primitive integer form of g.
        let mut den = BigInt::one();
        for c in g.coeffs() {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = g.coeffs().iter().map(|c| (c * &den).to_integer()).collect();
        let lead = ints.last().unwrap();
        let cons = &ints[0];
        for u in primes::divisors(cons) {
            for v in primes::divisors(lead) {
                if u.gcd(&v) != BigInt::one() {
                    continue;
                }
                for sign in [1i64, -1] {
                    let cand = BigRational::new(&u * BigInt::from(sign), v.clone());
                    if g.eval(&cand).is_zero() {
                        // Take the full multiplicity of this root at once.
                        loop {
                            g = g.deflate(&cand);
                            bump(&mut roots, cand.clone());
                            if g.degree() == 0 || !g.eval(&cand).is_zero() {
                                break;
                            }
                        }
                        if g.degree() == 0 {
                            break 'outer;
                        }
                        continue 'outer;
                    }
                }
            }
        }
        return Err(Error::IrrationalBranchPoints);
    }
    finish(f, roots)
}

fn bump(roots: &mut Vec<(BigRational, usize)>, r: BigRational) {
    match roots.iter_mut().find(|(s, _)| *s == r) {
        Some((_, m)) => *m += 1,
        None => roots.push((r, 1)),
    }
}

fn finish(
    f: &RatPoly,
    roots: Vec<(BigRational, usize)>,
) -> Result<Vec<(BigRational, usize)>> {
    let expanded: Vec<BigRational> = roots
        .iter()
        .flat_map(|(r, m)| std::iter::repeat_n(r.clone(), *m))
        .collect();
    let again = RatPoly::from_roots(f.leading(), &expanded);
    assert_eq!(&again, f, "root extraction failed to re-expand");
    Ok(roots)
}

impl std::fmt::Display for RatPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{}", super::format_rational(&a))?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{}*", super::format_rational(&a))?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
