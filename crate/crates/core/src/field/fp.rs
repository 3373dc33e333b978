//! Dense polynomials and rational functions over the prime field F_p.
//!
//! Coefficients are stored as canonical representatives in `0..p` with the
//! constant term first. These back the Laurent-series field model: an exact
//! element of F_p(T) is a reduced quotient of two `FpPoly`s.

use crate::error::{Error, Result};

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    pub p: u64,
    /// coeffs[i] is the coefficient of T^i; no trailing zeros.
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut poly = FpPoly { p, coeffs };
        for c in &mut poly.coeffs {
            *c %= p;
        }
        poly.trim();
        poly
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::new(p, vec![c])
    }

    pub fn monomial(p: u64, c: u64, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        Self::new(p, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Order of vanishing at T = 0; None for the zero polynomial.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0u64; n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *c = (a + b) % p;
        }
        let mut r = FpPoly { p, coeffs };
        r.trim();
        r
    }

    pub fn neg(&self) -> FpPoly {
        let p = self.p;
        FpPoly {
            p,
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
        }
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = (coeffs[i + j] + a * b) % p;
            }
        }
        let mut r = FpPoly { p, coeffs };
        r.trim();
        r
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let p = self.p;
        let c = c % p;
        let mut r = FpPoly {
            p,
            coeffs: self.coeffs.iter().map(|&a| a * c % p).collect(),
        };
        r.trim();
        r
    }

    pub fn divrem(&self, div: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!div.is_zero());
        let p = self.p;
        let dd = div.degree().unwrap();
        let lead_inv = inv_mod(div.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        let mut i = rem.len();
        while i > dd {
            i -= 1;
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = c * lead_inv % p;
            quot[i - dd] = q;
            for (j, &dc) in div.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = (rem[idx] + p - q * dc % p) % p;
            }
        }
        let mut q = FpPoly { p, coeffs: quot };
        let mut r = FpPoly { p, coeffs: rem };
        q.trim();
        r.trim();
        debug_assert!(r.degree().map_or(true, |d| d < dd));
        (q, r)
    }

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
            // monic normalization
            a.scale(inv_mod(a.leading(), a.p))
        }
    }

    /// Truncate to degree < n (the residue mod T^n).
    pub fn truncate(&self, n: usize) -> FpPoly {
        let mut r = FpPoly {
            p: self.p,
            coeffs: self.coeffs.iter().take(n).copied().collect(),
        };
        r.trim();
        r
    }

    /// Series inverse mod T^n; requires a unit constant term.
    pub fn series_inv(&self, n: usize) -> Result<FpPoly> {
        let c0 = self.coeffs.first().copied().unwrap_or(0);
        if c0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let p = self.p;
        // Newton doubling: b <- b (2 - a b) mod T^{2k}
        let mut b = FpPoly::constant(p, inv_mod(c0, p));
        let mut k = 1usize;
        while k < n {
            k = (2 * k).min(n);
            let two = FpPoly::constant(p, 2 % p);
            let t = two.sub(&self.truncate(k).mul(&b).truncate(k));
            b = b.mul(&t).truncate(k);
        }
        Ok(b.truncate(n))
    }

    /// Shift by T^k (multiply).
    pub fn shift_up(&self, k: usize) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u64; k];
        coeffs.extend_from_slice(&self.coeffs);
        FpPoly { p: self.p, coeffs }
    }

    /// Exact division by T^k; panics if not divisible.
    pub fn shift_down(&self, k: usize) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        assert!(self.coeffs.iter().take(k).all(|&c| c == 0));
        FpPoly {
            p: self.p,
            coeffs: self.coeffs[k.min(self.coeffs.len())..].to_vec(),
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % p;
        }
        acc
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "T")?,
                1 => write!(f, "{c}T")?,
                _ if c == 1 => write!(f, "T^{i}")?,
                _ => write!(f, "{c}T^{i}")?,
            }
        }
        Ok(())
    }
}

/// A rational function over F_p kept in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    pub num: FpPoly,
    pub den: FpPoly,
}

impl RatFun {
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = num.p;
        if num.is_zero() {
            return Ok(RatFun {
                num,
                den: FpPoly::constant(p, 1),
            });
        }
        let g = num.gcd(&den);
        let (mut num, _) = num.divrem(&g);
        let (mut den, _) = den.divrem(&g);
        let lead_inv = inv_mod(den.leading(), p);
        num = num.scale(lead_inv);
        den = den.scale(lead_inv);
        Ok(RatFun { num, den })
    }

    pub fn zero(p: u64) -> Self {
        RatFun {
            num: FpPoly::zero(p),
            den: FpPoly::constant(p, 1),
        }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        RatFun {
            num: FpPoly::constant(p, c),
            den: FpPoly::constant(p, 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// T-adic valuation: ord(num) - ord(den); None for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.ord()? as i64;
        let vd = self.den.ord().unwrap_or(0) as i64;
        Some(vn - vd)
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFun::new(num, den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero")
    }

    pub fn inv(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFun::new(self.den.clone(), self.num.clone())
    }
}

impl std::fmt::Display for RatFun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == FpPoly::constant(self.den.p, 1) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
