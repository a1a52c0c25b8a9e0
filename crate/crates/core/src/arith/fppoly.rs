//! Polynomials over the prime field F_p, p odd: root finding with
//! multiplicities, squarefree decomposition, polynomial square roots, and
//! the Legendre symbol.

use super::OddPrime;
use crate::error::{Error, Result};

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue mod the prime p.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    powmod(a, p - 2, p)
}

/// Legendre symbol of a unit residue: +1 for squares, -1 otherwise.
pub fn legendre(u: u64, p: OddPrime) -> Result<i8> {
    let pp = p.get();
    if u.is_multiple_of(pp) {
        return Err(Error::ZeroResidue);
    }
    let e = powmod(u, (pp - 1) / 2, pp);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Dense polynomial over F_p, coefficient of X^i at index i, no trailing
/// zeros, all residues in [0, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: OddPrime,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: OddPrime, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p.get()).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn zero(p: OddPrime) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn constant(p: OddPrime, c: u64) -> Self {
        FpPoly::new(p, vec![c])
    }

    pub fn prime(&self) -> OddPrime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().expect("leading coefficient of zero")
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p.get();
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mulmod(acc, x, p) + c) % p;
        }
        acc
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let p = self.p.get();
        FpPoly::new(
            self.p,
            self.coeffs.iter().map(|&a| mulmod(a, c, p)).collect(),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p.get();
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        FpPoly::new(self.p, out)
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        let p = self.p.get();
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        FpPoly::new(self.p, out)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p.get();
        if self.is_zero() || self.coeffs.len() < d.coeffs.len() {
            return (FpPoly::zero(self.p), self.clone());
        }
        let dlead_inv = inv_mod(d.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quo = vec![0u64; rem.len() - d.coeffs.len() + 1];
        for i in (0..quo.len()).rev() {
            let top = rem[i + d.coeffs.len() - 1];
            if top == 0 {
                continue;
            }
            let q = mulmod(top, dlead_inv, p);
            quo[i] = q;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let sub = mulmod(q, dc, p);
                rem[i + j] = (rem[i + j] + p - sub) % p;
            }
        }
        (FpPoly::new(self.p, quo), FpPoly::new(self.p, rem))
    }

    pub fn derivative(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.p.get();
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulmod(i as u64 % p, c, p))
            .collect();
        FpPoly::new(self.p, out)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.scale(inv_mod(a.leading(), self.p.get()))
        }
    }

    /// X^e mod m by repeated squaring.
    fn x_pow_mod(p: OddPrime, e: u64, m: &FpPoly) -> FpPoly {
        let x = FpPoly::new(p, vec![0, 1]);
        let mut acc = FpPoly::constant(p, 1);
        let mut base = x.divrem(m).1;
        let mut exp = e;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).divrem(m).1;
            }
            base = base.mul(&base).divrem(m).1;
            exp >>= 1;
        }
        acc
    }

    /// All roots in F_p with multiplicities, sorted by residue.
    ///
    /// For p <= deg the roots are found by exhaustive evaluation (derivative
    /// tricks degrade once exponents can wrap mod p); otherwise by Yun
    /// squarefree decomposition followed by splitting off X^p - X.
    pub fn roots_with_multiplicity(&self) -> Vec<(u64, usize)> {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return vec![];
        }
        let p = self.p.get();
        let mut out: Vec<(u64, usize)> = if p <= self.degree() as u64 {
            let mut found = Vec::new();
            let mut g = self.clone();
            for r in 0..p {
                if g.is_zero() || g.degree() == 0 {
                    break;
                }
                let lin = FpPoly::new(self.p, vec![(p - r) % p, 1]);
                let mut mult = 0usize;
                loop {
                    let (q, rem) = g.divrem(&lin);
                    if !rem.is_zero() {
                        break;
                    }
                    g = q;
                    mult += 1;
                    if g.degree() == 0 {
                        break;
                    }
                }
                if mult > 0 {
                    found.push((r, mult));
                }
            }
            found
        } else {
            self.squarefree_parts()
                .into_iter()
                .flat_map(|(part, mult)| {
                    part.distinct_roots().into_iter().map(move |r| (r, mult))
                })
                .collect()
        };
        out.sort();
        out
    }

    /// Yun decomposition f = lc * prod part_i^i with squarefree pairwise
    /// coprime parts; valid since every multiplicity is below p here.
    fn squarefree_parts(&self) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        let f = self.scale(inv_mod(self.leading(), self.p.get()));
        let df = f.derivative();
        let g0 = f.gcd(&df);
        let mut b = f.divrem(&g0).0;
        let mut c = df.divrem(&g0).0;
        let mut i = 1usize;
        while b.degree() >= 1 {
            let d = c.sub(&b.derivative());
            let part = b.gcd(&d);
            if part.degree() >= 1 {
                out.push((part.clone(), i));
            }
            b = b.divrem(&part).0;
            c = d.divrem(&part).0;
            i += 1;
        }
        out
    }

    /// Roots in F_p of a squarefree polynomial.
    fn distinct_roots(&self) -> Vec<u64> {
        let p = self.p.get();
        let monic = self.scale(inv_mod(self.leading(), p));
        // Keep only the linear factors: gcd with X^p - X.
        let xp = FpPoly::x_pow_mod(self.p, p, &monic);
        let x = FpPoly::new(self.p, vec![0, 1]).divrem(&monic).1;
        let lin = monic.gcd(&xp.sub(&x));
        let mut roots = Vec::new();
        Self::split_linear(&lin, &mut roots);
        roots
    }

    /// Recursively split a product of distinct linear factors using
    /// gcd(h(X), (X+s)^((p-1)/2) - 1) for shifts s = 0, 1, 2, ...
    /// Deterministic; each shift separates residues by quadratic character.
    fn split_linear(h: &FpPoly, roots: &mut Vec<u64>) {
        let p = h.p.get();
        if h.degree() == 0 {
            return;
        }
        if h.degree() == 1 {
            // monic X + c -> root -c
            let c = h.coeffs[0];
            roots.push((p - c) % p);
            return;
        }
        if h.eval(0) == 0 {
            roots.push(0);
            let (q, _) = h.divrem(&FpPoly::new(h.p, vec![0, 1]));
            Self::split_linear(&q, roots);
            return;
        }
        for s in 0..p {
            let shifted = FpPoly::x_pow_shift_pow(h.p, s, (p - 1) / 2, h);
            let one = FpPoly::constant(h.p, 1);
            let g = h.gcd(&shifted.sub(&one));
            if g.degree() >= 1 && g.degree() < h.degree() {
                let (q, _) = h.divrem(&g);
                Self::split_linear(&g, roots);
                Self::split_linear(&q, roots);
                return;
            }
        }
        unreachable!("linear product failed to split over F_p");
    }

    /// (X + s)^e mod m.
    fn x_pow_shift_pow(p: OddPrime, s: u64, e: u64, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::constant(p, 1);
        let mut base = FpPoly::new(p, vec![s, 1]).divrem(m).1;
        let mut exp = e;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).divrem(m).1;
            }
            base = base.mul(&base).divrem(m).1;
            exp >>= 1;
        }
        acc
    }

    /// If self = c * h^2 for a constant c and monic h, returns (c, h).
    ///
    /// h is solved coefficient by coefficient from the top; works for any
    /// odd p independently of the degree.
    pub fn as_square_times_constant(&self) -> Option<(u64, FpPoly)> {
        assert!(!self.is_zero());
        let p = self.p.get();
        let c = self.leading();
        if !self.degree().is_multiple_of(2) {
            return None;
        }
        let m = self.degree() / 2;
        let monic = self.scale(inv_mod(c, p));
        let mut h = vec![0u64; m + 1];
        h[m] = 1;
        let inv2 = inv_mod(2, p);
        for k in 1..=m {
            // Coefficient of X^(2m-k) in h^2 is 2*h[m-k] + sum of known terms.
            let mut known = 0u64;
            for i in (m - k + 1)..=(m - 1) {
                let j = 2 * m - k - i;
                if j <= m && j > m - k {
                    known = (known + mulmod(h[i], h[j], p)) % p;
                }
            }
            let target = monic.coeffs.get(2 * m - k).copied().unwrap_or(0);
            h[m - k] = mulmod((target + p - known) % p, inv2, p);
        }
        let hp = FpPoly::new(self.p, h);
        let sq = hp.mul(&hp).scale(c);
        if sq == *self {
            Some((c, hp))
        } else {
            None
        }
    }
}

/// Result of [`odd_multiplicity_roots`]: the F_p-rational roots of odd
/// multiplicity, and whether what is left after stripping one copy of each
/// is a constant times a perfect square (with that factorization).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddRoots {
    pub roots: Vec<u64>,
    pub even_part_is_square: bool,
    pub constant: u64,
    pub square_root: Option<FpPoly>,
}

/// F_p-rational roots of odd multiplicity of f, plus the square certificate
/// for the remaining even part.
pub fn odd_multiplicity_roots(f: &FpPoly) -> OddRoots {
    assert!(!f.is_zero());
    let p = f.prime();
    let mults = f.roots_with_multiplicity();
    let roots: Vec<u64> = mults
        .iter()
        .filter(|(_, m)| m % 2 == 1)
        .map(|(r, _)| *r)
        .collect();
    let mut even = f.clone();
    for &r in &roots {
        let lin = FpPoly::new(p, vec![(p.get() - r) % p.get(), 1]);
        even = even.divrem(&lin).0;
    }
    match even.as_square_times_constant() {
        Some((c, h)) => OddRoots {
            roots,
            even_part_is_square: true,
            constant: c,
            square_root: Some(h),
        },
        None => OddRoots {
            roots,
            even_part_is_square: false,
            constant: even.leading(),
            square_root: None,
        },
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => {
                    if c != 1 {
                        write!(f, "{c}*")?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    fn poly(pr: u64, coeffs: &[u64]) -> FpPoly {
        FpPoly::new(p(pr), coeffs.to_vec())
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(4, p(5)).unwrap(), 1);
        assert_eq!(legendre(2, p(5)).unwrap(), -1);
        assert_eq!(legendre(1, p(7)).unwrap(), 1);
        assert_eq!(legendre(10, p(5)), Err(Error::ZeroResidue));
    }

    #[test]
    fn divrem_roundtrip() {
        let f = poly(7, &[3, 0, 5, 1]);
        let d = poly(7, &[2, 1]);
        let (q, r) = f.divrem(&d);
        assert_eq!(q.mul(&d), f.sub(&r));
        assert!(r.is_zero() || r.degree() < d.degree());
    }

    #[test]
    fn odd_roots_examples() {
        // X(X-1) over F_5: squarefree
        let f = poly(5, &[0, 4, 1]); // X^2 + 4X = X(X+4) = X(X-1)
        let r = odd_multiplicity_roots(&f);
        assert_eq!(r.roots, vec![0, 1]);
        assert!(r.even_part_is_square);
        assert_eq!(r.constant, 1);

        // 4X(X-1)(X-2) over F_5
        let f = poly(5, &[0, 3, 3, 4]);
        let r = odd_multiplicity_roots(&f);
        assert_eq!(r.roots, vec![0, 1, 2]);
        assert!(r.even_part_is_square);
        assert_eq!(r.constant, 4);

        // (X-1)^2 over F_5: no odd roots, square part (X-1)^2, constant 1
        let f = poly(5, &[1, 3, 1]); // X^2 - 2X + 1
        let r = odd_multiplicity_roots(&f);
        assert_eq!(r.roots, Vec::<u64>::new());
        assert!(r.even_part_is_square);
        assert_eq!(r.constant, 1);
        assert_eq!(r.square_root.unwrap().coeffs(), &[4, 1]);
    }

    #[test]
    fn odd_roots_non_square_remainder() {
        // (X^2+2)(X^2+3) over F_5: no rational roots, not a square
        let a = poly(5, &[2, 0, 1]);
        let b = poly(5, &[3, 0, 1]);
        let r = odd_multiplicity_roots(&a.mul(&b));
        assert_eq!(r.roots, Vec::<u64>::new());
        assert!(!r.even_part_is_square);
    }

    #[test]
    fn roots_small_prime_fallback() {
        // p = 3 <= deg: (X-1)^3 (X-2) over F_3, exhaustive path
        let f = poly(3, &[2, 1]).mul(&poly(3, &[2, 1])).mul(&poly(3, &[2, 1])).mul(&poly(3, &[1, 1]));
        let r = f.roots_with_multiplicity();
        assert_eq!(r, vec![(1, 3), (2, 1)]);
    }

    #[test]
    fn roots_large_prime_path() {
        // p = 97 > deg: 3(X-10)^2 (X-50) over F_97
        let lin1 = poly(97, &[87, 1]);
        let lin2 = poly(97, &[47, 1]);
        let f = lin1.mul(&lin1).mul(&lin2).scale(3);
        let r = f.roots_with_multiplicity();
        assert_eq!(r, vec![(10, 2), (50, 1)]);
    }

    #[test]
    fn square_detection() {
        // 4(X-1)^2 over F_5 is a square times 4
        let f = poly(5, &[4, 1]).mul(&poly(5, &[4, 1])).scale(4);
        let (c, h) = f.as_square_times_constant().unwrap();
        assert_eq!(c, 4);
        assert_eq!(h.coeffs(), &[4, 1]);
        // 2(X-1)^2: constant 2, still a square times constant
        let f = poly(5, &[4, 1]).mul(&poly(5, &[4, 1])).scale(2);
        let (c, _) = f.as_square_times_constant().unwrap();
        assert_eq!(c, 2);
        // X^3 is odd degree
        assert!(poly(5, &[0, 0, 0, 1]).as_square_times_constant().is_none());
    }
}
