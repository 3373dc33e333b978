//! Text syntax for field elements.
//!
//! Qp models accept integer and fraction literals: `-4`, `5/2`.
//! Laurent models accept polynomials in T over F_p and their quotients:
//! `3`, `T^2`, `1+2T+T^2`, `(1+2T+T^2)/(T^3)`, `1/T`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::fp::{FpPoly, RatFun};
use crate::field::{FieldElement, FieldModel, ModelKind};

fn bad(s: &str) -> Error {
    Error::Parse(format!("bad element literal: {s}"))
}

/// Split at the single top-level `/`, if any.
fn split_fraction(s: &str) -> Result<(&str, Option<&str>)> {
    let mut depth = 0i32;
    let mut slash: Option<usize> = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                if slash.is_some() {
                    return Err(bad(s));
                }
                slash = Some(i);
            }
            _ => {}
        }
        if depth < 0 {
            return Err(bad(s));
        }
    }
    if depth != 0 {
        return Err(bad(s));
    }
    Ok(match slash {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    })
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        // only strip if the parens match each other
        let mut depth = 0i32;
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && i + 1 < t.len() {
                return t;
            }
        }
        return strip_parens(&t[1..t.len() - 1]);
    }
    t
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>().map_err(|_| bad(s))
}

/// Parse a polynomial in T over F_p, e.g. `1+2T-T^3`.
fn parse_poly(p: u64, s: &str) -> Result<FpPoly> {
    let s = strip_parens(s);
    if s.is_empty() {
        return Err(bad(s));
    }
    let mut coeffs: Vec<u64> = Vec::new();
    let mut add_term = |coeff: i64, deg: usize| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        let c = coeff.rem_euclid(p as i64) as u64;
        coeffs[deg] = (coeffs[deg] + c) % p;
    };
    // split into signed terms
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1i64;
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &s[start..i];
        if term.is_empty() {
            return Err(bad(s));
        }
        let (coeff, deg) = parse_term(term)?;
        add_term(sign * coeff, deg);
    }
    Ok(FpPoly::new(p, coeffs))
}

/// One monomial: `4`, `T`, `2T`, `2*T^3`, `T^2`.
fn parse_term(t: &str) -> Result<(i64, usize)> {
    let t = t.trim();
    if let Some(pos) = t.find('T') {
        let coeff_str = t[..pos].trim_end_matches('*').trim();
        let coeff: i64 = if coeff_str.is_empty() {
            1
        } else {
            coeff_str.parse().map_err(|_| bad(t))?
        };
        let rest = &t[pos + 1..];
        let deg: usize = if rest.is_empty() {
            1
        } else if let Some(e) = rest.strip_prefix('^') {
            e.trim().parse().map_err(|_| bad(t))?
        } else {
            return Err(bad(t));
        };
        Ok((coeff, deg))
    } else {
        let coeff: i64 = t.parse().map_err(|_| bad(t))?;
        Ok((coeff, 0))
    }
}

/// Parse an element literal in the given model.
pub fn parse_element(model: FieldModel, input: &str) -> Result<FieldElement> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad(input));
    }
    let (num_s, den_s) = split_fraction(&s)?;
    match model.kind {
        ModelKind::Qp => {
            let num = parse_bigint(strip_parens(num_s))?;
            let den = match den_s {
                Some(d) => parse_bigint(strip_parens(d))?,
                None => BigInt::from(1),
            };
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            FieldElement::from_rational(model, BigRational::new(num, den))
        }
        ModelKind::Laurent => {
            let num = parse_poly(model.p, num_s)?;
            let den = match den_s {
                Some(d) => parse_poly(model.p, d)?,
                None => FpPoly::constant(model.p, 1),
            };
            FieldElement::from_ratfun(model, RatFun::new(num, den)?)
        }
    }
}
