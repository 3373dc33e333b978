//! Exact arithmetic in two dense models of a non-Archimedean local field:
//! the rationals with the p-adic valuation (dense in Q_p) and rational
//! functions over F_p with the T-adic valuation (dense in F_p((T))).
//!
//! Elements are either exact (rationals, rational functions) or refinable:
//! a generator producing the canonical residue mod pi^N at any precision N,
//! together with an exact lower bound on the valuation. Roots produced by
//! Hensel lifting are refinable; all arithmetic composes generators with
//! the precision bookkeeping needed to keep queried residues correct.

pub mod fp;
pub mod newton;
pub mod parse;

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use fp::{FpPoly, RatFun};

pub const DEFAULT_PRECISION_CAP: u32 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Rationals with the p-adic valuation, dense in Q_p.
    Qp,
    /// Rational functions over F_p with the T-adic valuation, dense in F_p((T)).
    Laurent,
}

/// A concrete valued-field model. The residue field is F_p in both models,
/// so q = p is the logarithm base for all lengths.
#[derive(Debug, Clone, Copy)]
pub struct FieldModel {
    pub kind: ModelKind,
    pub p: u64,
    pub precision_cap: u32,
}

impl PartialEq for FieldModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.p == other.p
    }
}
impl Eq for FieldModel {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldModel {
    pub fn qp(p: u64) -> Result<Self> {
        Self::new(ModelKind::Qp, p)
    }

    pub fn laurent(p: u64) -> Result<Self> {
        Self::new(ModelKind::Laurent, p)
    }

    pub fn new(kind: ModelKind, p: u64) -> Result<Self> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldModel {
            kind,
            p,
            precision_cap: DEFAULT_PRECISION_CAP,
        })
    }

    pub fn with_precision_cap(mut self, cap: u32) -> Self {
        self.precision_cap = cap.max(1);
        self
    }

    pub fn residue_cardinality(&self) -> u64 {
        self.p
    }

    fn modulus(&self, n: u32) -> BigInt {
        BigInt::from(self.p).pow(n)
    }
}

/// Canonical residue of an integral element mod pi^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Residue {
    Int(BigInt),
    Poly(FpPoly),
}

impl FieldModel {
    pub(crate) fn res_zero(&self) -> Residue {
        match self.kind {
            ModelKind::Qp => Residue::Int(BigInt::zero()),
            ModelKind::Laurent => Residue::Poly(FpPoly::zero(self.p)),
        }
    }

    pub(crate) fn res_reduce(&self, r: &Residue, n: u32) -> Residue {
        match r {
            Residue::Int(a) => {
                let m = self.modulus(n);
                Residue::Int(a.mod_floor(&m))
            }
            Residue::Poly(a) => Residue::Poly(a.truncate(n as usize)),
        }
    }

    pub(crate) fn res_add(&self, n: u32, a: &Residue, b: &Residue) -> Residue {
        match (a, b) {
            (Residue::Int(a), Residue::Int(b)) => self.res_reduce(&Residue::Int(a + b), n),
            (Residue::Poly(a), Residue::Poly(b)) => Residue::Poly(a.add(b).truncate(n as usize)),
            _ => unreachable!("mixed residue kinds"),
        }
    }

    pub(crate) fn res_neg(&self, n: u32, a: &Residue) -> Residue {
        match a {
            Residue::Int(a) => self.res_reduce(&Residue::Int(-a), n),
            Residue::Poly(a) => Residue::Poly(a.neg().truncate(n as usize)),
        }
    }

    pub(crate) fn res_mul(&self, n: u32, a: &Residue, b: &Residue) -> Residue {
        match (a, b) {
            (Residue::Int(a), Residue::Int(b)) => self.res_reduce(&Residue::Int(a * b), n),
            (Residue::Poly(a), Residue::Poly(b)) => Residue::Poly(a.mul(b).truncate(n as usize)),
            _ => unreachable!("mixed residue kinds"),
        }
    }

    /// Inverse of a unit residue mod pi^n.
    pub(crate) fn res_inv(&self, n: u32, a: &Residue) -> Residue {
        match a {
            Residue::Int(a) => {
                let m = self.modulus(n);
                let e = a.extended_gcd(&m);
                debug_assert!(e.gcd.is_one(), "non-unit residue");
                Residue::Int(e.x.mod_floor(&m))
            }
            Residue::Poly(a) => {
                Residue::Poly(a.series_inv(n as usize).expect("unit residue"))
            }
        }
    }

    /// Multiply by pi^k (k >= 0) and reduce mod pi^n.
    pub(crate) fn res_shift_up(&self, n: u32, k: u32, a: &Residue) -> Residue {
        match a {
            Residue::Int(v) => self.res_reduce(&Residue::Int(v * BigInt::from(self.p).pow(k)), n),
            Residue::Poly(v) => Residue::Poly(v.shift_up(k as usize).truncate(n as usize)),
        }
    }

    /// Exact division by pi^k of a residue known to be divisible.
    pub(crate) fn res_shift_down(&self, k: u32, a: &Residue) -> Residue {
        match a {
            Residue::Int(v) => {
                let (q, r) = v.div_rem(&BigInt::from(self.p).pow(k));
                debug_assert!(r.is_zero(), "residue not divisible by pi^k");
                Residue::Int(q)
            }
            Residue::Poly(v) => Residue::Poly(v.shift_down(k as usize)),
        }
    }

    /// Index of the first nonzero pi-adic digit, None if the residue is zero.
    pub(crate) fn res_ord(&self, a: &Residue) -> Option<u32> {
        match a {
            Residue::Int(v) => {
                if v.is_zero() {
                    return None;
                }
                let p = BigInt::from(self.p);
                let mut v = v.clone();
                let mut ord = 0u32;
                loop {
                    let (q, r) = v.div_rem(&p);
                    if !r.is_zero() {
                        return Some(ord);
                    }
                    v = q;
                    ord += 1;
                }
            }
            Residue::Poly(v) => v.ord().map(|o| o as u32),
        }
    }
}

/// Valuation of a field element; Infinite is the exact-zero convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

type Generator = Box<dyn Fn(u32) -> Residue + Send + Sync>;

/// A refinable element: residues mod pi^N on demand, plus an exact lower
/// bound `shift` on the valuation. The generator produces the canonical
/// residue of x * pi^{-shift} (an integral element) mod pi^N.
pub struct Refinable {
    model: FieldModel,
    shift: i64,
    gen: Generator,
    memo: Mutex<Option<(u32, Residue)>>,
    val: OnceLock<i64>,
}

impl std::fmt::Debug for Refinable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Refinable").field("shift", &self.shift).finish()
    }
}

impl Refinable {
    fn new(model: FieldModel, shift: i64, gen: Generator) -> Arc<Self> {
        Arc::new(Refinable {
            model,
            shift,
            gen,
            memo: Mutex::new(None),
            val: OnceLock::new(),
        })
    }

    /// Canonical residue of x * pi^{-shift} mod pi^n. Memoizes the highest
    /// precision computed; concurrent queries agree because the generator
    /// is canonical at every precision.
    pub fn residue(&self, n: u32) -> Residue {
        {
            let memo = self.memo.lock().unwrap();
            if let Some((m, r)) = &*memo {
                if *m >= n {
                    return self.model.res_reduce(r, n);
                }
            }
        }
        let r = (self.gen)(n);
        let mut memo = self.memo.lock().unwrap();
        match &*memo {
            Some((m, _)) if *m >= n => {}
            _ => *memo = Some((n, r.clone())),
        }
        self.model.res_reduce(&r, n)
    }

    fn valuation(&self) -> Result<i64> {
        self.valuation_capped(self.model.precision_cap)
    }

    fn valuation_capped(&self, cap: u32) -> Result<i64> {
        if let Some(v) = self.val.get() {
            return Ok(*v);
        }
        let mut n: u32 = 8;
        loop {
            let n_eff = n.min(cap);
            let r = self.residue(n_eff);
            if let Some(i) = self.model.res_ord(&r) {
                let v = self.shift + i as i64;
                let _ = self.val.set(v);
                return Ok(v);
            }
            if n_eff == cap {
                return Err(Error::PrecisionExhausted(cap));
            }
            n = n.saturating_mul(2);
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Rat(BigRational),
    Fun(RatFun),
    Ref(Arc<Refinable>),
}

/// An exact element of the working valued field.
#[derive(Debug, Clone)]
pub struct FieldElement {
    model: FieldModel,
    repr: Repr,
}

fn bigint_valuation(v: &BigInt, p: u64) -> i64 {
    debug_assert!(!v.is_zero());
    let p = BigInt::from(p);
    let mut v = v.abs();
    let mut ord = 0i64;
    loop {
        let (q, r) = v.div_rem(&p);
        if !r.is_zero() {
            return ord;
        }
        v = q;
        ord += 1;
    }
}

impl FieldElement {
    pub fn model(&self) -> FieldModel {
        self.model
    }

    pub fn zero(model: FieldModel) -> Self {
        match model.kind {
            ModelKind::Qp => FieldElement {
                model,
                repr: Repr::Rat(BigRational::zero()),
            },
            ModelKind::Laurent => FieldElement {
                model,
                repr: Repr::Fun(RatFun::zero(model.p)),
            },
        }
    }

    pub fn one(model: FieldModel) -> Self {
        Self::from_integer(model, 1)
    }

    pub fn from_integer(model: FieldModel, n: i64) -> Self {
        match model.kind {
            ModelKind::Qp => FieldElement {
                model,
                repr: Repr::Rat(BigRational::from(BigInt::from(n))),
            },
            ModelKind::Laurent => {
                let p = model.p as i64;
                let c = n.rem_euclid(p) as u64;
                FieldElement {
                    model,
                    repr: Repr::Fun(RatFun::constant(model.p, c)),
                }
            }
        }
    }

    pub fn from_rational(model: FieldModel, r: BigRational) -> Result<Self> {
        match model.kind {
            ModelKind::Qp => Ok(FieldElement {
                model,
                repr: Repr::Rat(r),
            }),
            ModelKind::Laurent => Err(Error::Invalid(
                "rational literal in a Laurent model".into(),
            )),
        }
    }

    pub fn from_ratfun(model: FieldModel, r: RatFun) -> Result<Self> {
        match model.kind {
            ModelKind::Laurent => Ok(FieldElement {
                model,
                repr: Repr::Fun(r),
            }),
            ModelKind::Qp => Err(Error::Invalid("rational function in a Qp model".into())),
        }
    }

    pub fn ratio(model: FieldModel, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match model.kind {
            ModelKind::Qp => Ok(FieldElement {
                model,
                repr: Repr::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
            }),
            ModelKind::Laurent => {
                let a = Self::from_integer(model, num);
                let b = Self::from_integer(model, den);
                a.mul(&b.inv()?)
            }
        }
    }

    /// pi^k for any integer k (p^k or T^k).
    pub fn uniformizer_pow(model: FieldModel, k: i64) -> Self {
        match model.kind {
            ModelKind::Qp => {
                let p = BigInt::from(model.p);
                let r = if k >= 0 {
                    BigRational::from(p.pow(k as u32))
                } else {
                    BigRational::new(BigInt::one(), p.pow((-k) as u32))
                };
                FieldElement {
                    model,
                    repr: Repr::Rat(r),
                }
            }
            ModelKind::Laurent => {
                let (num, den) = if k >= 0 {
                    (FpPoly::monomial(model.p, 1, k as usize), FpPoly::constant(model.p, 1))
                } else {
                    (FpPoly::constant(model.p, 1), FpPoly::monomial(model.p, 1, (-k) as usize))
                };
                FieldElement {
                    model,
                    repr: Repr::Fun(RatFun { num, den }),
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, Repr::Ref(_))
    }

    /// True only for a provably (exact) zero element.
    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.is_zero(),
            Repr::Fun(r) => r.is_zero(),
            Repr::Ref(_) => false,
        }
    }

    pub fn valuation(&self) -> Result<Valuation> {
        match &self.repr {
            Repr::Rat(r) => {
                if r.is_zero() {
                    return Ok(Valuation::Infinite);
                }
                let v = bigint_valuation(r.numer(), self.model.p)
                    - bigint_valuation(r.denom(), self.model.p);
                Ok(Valuation::Finite(v))
            }
            Repr::Fun(r) => Ok(match r.valuation() {
                Some(v) => Valuation::Finite(v),
                None => Valuation::Infinite,
            }),
            Repr::Ref(r) => Ok(Valuation::Finite(r.valuation()?)),
        }
    }

    /// Like `valuation`, but refinable elements give up at the supplied
    /// precision cap instead of the model's. Useful for cheap "provably
    /// nonzero" probes before committing the full precision budget.
    pub fn valuation_capped(&self, cap: u32) -> Result<Valuation> {
        match &self.repr {
            Repr::Ref(r) => Ok(Valuation::Finite(r.valuation_capped(cap)?)),
            _ => self.valuation(),
        }
    }

    /// Valuation, requiring it to be finite (errors on exact zero).
    pub fn finite_valuation(&self) -> Result<i64> {
        match self.valuation()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::DivisionByZero),
        }
    }

    fn check_model(&self, other: &FieldElement) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        Ok(())
    }

    /// Residue of the unit part x * pi^{-v(x)} mod pi^n, for exact nonzero x.
    fn exact_unit_residue(&self, n: u32) -> Residue {
        let model = self.model;
        match &self.repr {
            Repr::Rat(r) => {
                let p = model.p;
                let strip = |v: &BigInt| -> (BigInt, i64) {
                    let k = bigint_valuation(v, p);
                    let (q, _) = v.div_rem(&BigInt::from(p).pow(k as u32));
                    (q, k)
                };
                let (nu, _) = strip(r.numer());
                let (de, _) = strip(r.denom());
                let m = model.modulus(n);
                if de.is_one() {
                    return Residue::Int(nu.mod_floor(&m));
                }
                let inv = match model.res_inv(n, &Residue::Int(de.mod_floor(&m))) {
                    Residue::Int(i) => i,
                    _ => unreachable!(),
                };
                Residue::Int((nu * inv).mod_floor(&m))
            }
            Repr::Fun(r) => {
                let on = r.num.ord().expect("nonzero");
                let od = r.den.ord().unwrap_or(0);
                let nu = r.num.shift_down(on);
                let de = r.den.shift_down(od);
                let inv = de.series_inv(n as usize).expect("unit");
                Residue::Poly(nu.mul(&inv).truncate(n as usize))
            }
            Repr::Ref(_) => unreachable!("exact_unit_residue on refinable"),
        }
    }

    /// View as a refinable element (exact nonzero elements get a trivial
    /// generator). Errors on exact zero.
    fn as_refinable(&self) -> Result<Arc<Refinable>> {
        match &self.repr {
            Repr::Ref(r) => Ok(r.clone()),
            _ => {
                if self.is_exact_zero() {
                    return Err(Error::DivisionByZero);
                }
                let v = self.finite_valuation()?;
                let this = self.clone();
                Ok(Refinable::new(
                    self.model,
                    v,
                    Box::new(move |n| this.exact_unit_residue(n)),
                ))
            }
        }
    }

    /// Residue of x * pi^{-shift} mod pi^n together with the shift; works for
    /// exact and refinable elements (exact zero yields shift 0, zero residue).
    pub(crate) fn shifted_residue(&self, n: u32) -> (i64, Residue) {
        if self.is_exact_zero() {
            return (0, self.model.res_zero());
        }
        match &self.repr {
            Repr::Ref(r) => (r.shift, r.residue(n)),
            _ => {
                let v = self.finite_valuation().expect("exact nonzero");
                (v, self.exact_unit_residue(n))
            }
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_model(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Ok(FieldElement {
                model: self.model,
                repr: Repr::Rat(a + b),
            }),
            (Repr::Fun(a), Repr::Fun(b)) => Ok(FieldElement {
                model: self.model,
                repr: Repr::Fun(a.add(b)),
            }),
            _ => {
                if self.is_exact_zero() {
                    return Ok(other.clone());
                }
                if other.is_exact_zero() {
                    return Ok(self.clone());
                }
                let model = self.model;
                let x = self.as_refinable()?;
                let y = other.as_refinable()?;
                let s = x.shift.min(y.shift);
                let (dx, dy) = ((x.shift - s) as u32, (y.shift - s) as u32);
                Ok(FieldElement {
                    model,
                    repr: Repr::Ref(Refinable::new(
                        model,
                        s,
                        Box::new(move |n| {
                            let a = model.res_shift_up(n, dx, &x.residue(n));
                            let b = model.res_shift_up(n, dy, &y.residue(n));
                            model.res_add(n, &a, &b)
                        }),
                    )),
                })
            }
        }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldElement {
        let model = self.model;
        match &self.repr {
            Repr::Rat(a) => FieldElement {
                model,
                repr: Repr::Rat(-a),
            },
            Repr::Fun(a) => FieldElement {
                model,
                repr: Repr::Fun(a.neg()),
            },
            Repr::Ref(r) => {
                let x = r.clone();
                FieldElement {
                    model,
                    repr: Repr::Ref(Refinable::new(
                        model,
                        x.shift,
                        Box::new(move |n| model.res_neg(n, &x.residue(n))),
                    )),
                }
            }
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_model(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Ok(FieldElement {
                model: self.model,
                repr: Repr::Rat(a * b),
            }),
            (Repr::Fun(a), Repr::Fun(b)) => Ok(FieldElement {
                model: self.model,
                repr: Repr::Fun(a.mul(b)),
            }),
            _ => {
                if self.is_exact_zero() || other.is_exact_zero() {
                    return Ok(FieldElement::zero(self.model));
                }
                let model = self.model;
                let x = self.as_refinable()?;
                let y = other.as_refinable()?;
                Ok(FieldElement {
                    model,
                    repr: Repr::Ref(Refinable::new(
                        model,
                        x.shift + y.shift,
                        Box::new(move |n| model.res_mul(n, &x.residue(n), &y.residue(n))),
                    )),
                })
            }
        }
    }

    /// Multiplicative inverse. For a refinable input the exact valuation is
    /// resolved first (E_PRECISION_EXHAUSTED if the element might be zero).
    pub fn inv(&self) -> Result<FieldElement> {
        let model = self.model;
        match &self.repr {
            Repr::Rat(a) => {
                if a.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(FieldElement {
                    model,
                    repr: Repr::Rat(a.recip()),
                })
            }
            Repr::Fun(a) => Ok(FieldElement {
                model,
                repr: Repr::Fun(a.inv()?),
            }),
            Repr::Ref(r) => {
                let v = r.valuation()?;
                let t = (v - r.shift) as u32;
                let x = r.clone();
                Ok(FieldElement {
                    model,
                    repr: Repr::Ref(Refinable::new(
                        model,
                        -v,
                        Box::new(move |n| {
                            let q = x.residue(n + t);
                            let u = model.res_shift_down(t, &q);
                            model.res_inv(n, &u)
                        }),
                    )),
                })
            }
        }
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Result<FieldElement> {
        let mut acc = FieldElement::one(self.model);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact equality; only decidable for exact representations.
    pub fn exact_eq(&self, other: &FieldElement) -> Option<bool> {
        match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Some(a == b),
            (Repr::Fun(a), Repr::Fun(b)) => Some(a == b),
            _ => None,
        }
    }

    /// The canonical residue of x mod pi^n rendered as a field element;
    /// intended for tests and display.
    pub fn residue_at(&self, n: u32) -> Result<Residue> {
        if self.is_exact_zero() {
            return Ok(self.model.res_zero());
        }
        let r = self.as_refinable()?;
        if r.shift < 0 {
            return Err(Error::Invalid("negative valuation residue".into()));
        }
        Ok(self
            .model
            .res_reduce(&self.model.res_shift_up(n, r.shift as u32, &r.residue(n)), n))
    }

    /// Build a refinable element from a shift and a canonical generator.
    pub fn refinable(model: FieldModel, shift: i64, gen: Generator) -> FieldElement {
        FieldElement {
            model,
            repr: Repr::Ref(Refinable::new(model, shift, gen)),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_ratfun(&self) -> Option<&RatFun> {
        match &self.repr {
            Repr::Fun(r) => Some(r),
            _ => None,
        }
    }
}

/// Valuation of sum c_i * x_i for exact coefficients c_i, evaluated
/// directly on residues. Hot path of the identity scan: the x_i are a
/// small fixed set of refinables whose residues are memoized once, so each
/// call costs only modular multiply-adds instead of building a fresh
/// element graph per summand.
pub fn linear_combo_valuation(terms: &[(&FieldElement, &FieldElement)]) -> Result<Valuation> {
    let live: Vec<&(&FieldElement, &FieldElement)> = terms
        .iter()
        .filter(|(c, x)| !c.is_exact_zero() && !x.is_exact_zero())
        .collect();
    let Some(first) = live.first() else {
        return Ok(Valuation::Infinite);
    };
    let model = first.0.model;
    for (c, x) in &live {
        if c.model != model || x.model != model {
            return Err(Error::ModelMismatch);
        }
        if !c.is_exact() {
            return Err(Error::Invalid("combo coefficient must be exact".into()));
        }
    }
    if live.iter().all(|(_, x)| x.is_exact()) {
        let mut acc = FieldElement::zero(model);
        for (c, x) in &live {
            acc = acc.add(&c.mul(x)?)?;
        }
        return acc.valuation();
    }
    if model.kind == ModelKind::Qp {
        return qp_combo_valuation(model, &live);
    }
    // per-summand shift; the residue ladder works relative to the minimum
    let shifts: Vec<i64> = live
        .iter()
        .map(|(c, x)| {
            let cv = c.finite_valuation().expect("exact nonzero");
            let (xs, _) = x.shifted_residue(1);
            cv + xs
        })
        .collect();
    let base = *shifts.iter().min().unwrap();
    let cap = model.precision_cap;
    let mut n: u32 = 8;
    loop {
        let n_eff = n.min(cap);
        let mut acc = model.res_zero();
        for ((c, x), s) in live.iter().zip(&shifts) {
            let cu = c.exact_unit_residue(n_eff);
            let (_, xu) = x.shifted_residue(n_eff);
            let prod = model.res_mul(n_eff, &cu, &xu);
            let up = model.res_shift_up(n_eff, (s - base) as u32, &prod);
            acc = model.res_add(n_eff, &acc, &up);
        }
        if let Some(i) = model.res_ord(&acc) {
            return Ok(Valuation::Finite(base + i as i64));
        }
        if n_eff == cap {
            return Err(Error::PrecisionExhausted(cap));
        }
        n = n.saturating_mul(2);
    }
}

/// Qp fast path: clear the coefficient denominators once and fold whole
/// integer coefficients (p-powers included) into the modular sum, so no
/// per-coefficient unit/valuation split is needed in the inner loop.
fn qp_combo_valuation(
    model: FieldModel,
    live: &[&(&FieldElement, &FieldElement)],
) -> Result<Valuation> {
    let mut denom_lcm = BigInt::one();
    for (c, _) in live {
        let r = c.as_rational().expect("qp exact coefficient");
        denom_lcm = denom_lcm.lcm(r.denom());
    }
    let scale_val = bigint_valuation(&denom_lcm, model.p);
    let coeffs: Vec<BigInt> = live
        .iter()
        .map(|(c, _)| {
            let r = c.as_rational().unwrap();
            r.numer() * (&denom_lcm / r.denom())
        })
        .collect();
    let xs: Vec<&FieldElement> = live.iter().map(|(_, x)| *x).collect();
    qp_ladder(model, &coeffs, &xs, scale_val)
}

/// Valuation of sum c_i * x_i with integer coefficients in a Qp model; the
/// innermost loop of the identity scan.
pub fn integer_combo_valuation(
    model: FieldModel,
    coeffs: &[BigInt],
    xs: &[&FieldElement],
) -> Result<Valuation> {
    if model.kind != ModelKind::Qp {
        return Err(Error::Invalid("integer combo needs a Qp model".into()));
    }
    let mut lc = Vec::new();
    let mut lx = Vec::new();
    for (c, x) in coeffs.iter().zip(xs) {
        if !c.is_zero() && !x.is_exact_zero() {
            lc.push(c.clone());
            lx.push(*x);
        }
    }
    if lx.is_empty() {
        return Ok(Valuation::Infinite);
    }
    if lx.iter().all(|x| x.is_exact()) {
        let mut acc = BigRational::zero();
        for (c, x) in lc.iter().zip(&lx) {
            acc += x.as_rational().expect("qp exact") * BigRational::from(c.clone());
        }
        if acc.is_zero() {
            return Ok(Valuation::Infinite);
        }
        return Ok(Valuation::Finite(
            bigint_valuation(acc.numer(), model.p) - bigint_valuation(acc.denom(), model.p),
        ));
    }
    qp_ladder(model, &lc, &lx, 0)
}

fn qp_ladder(
    model: FieldModel,
    coeffs: &[BigInt],
    xs: &[&FieldElement],
    scale_val: i64,
) -> Result<Valuation> {
    let shifts: Vec<i64> = xs.iter().map(|x| x.shifted_residue(1).0).collect();
    let base = *shifts.iter().min().unwrap();
    let cap = model.precision_cap;
    let p = BigInt::from(model.p);
    let mut n: u32 = 8;
    loop {
        let n_eff = n.min(cap);
        let m = model.modulus(n_eff);
        let mut acc = BigInt::zero();
        for (i, x) in xs.iter().enumerate() {
            let up = (shifts[i] - base) as u32;
            if up >= n_eff {
                continue;
            }
            let (_, xr) = x.shifted_residue(n_eff);
            let Residue::Int(xr) = xr else { unreachable!() };
            acc += &coeffs[i] * xr * p.pow(up);
        }
        acc = acc.mod_floor(&m);
        if !acc.is_zero() {
            let o = bigint_valuation(&acc, model.p);
            if o < n_eff as i64 {
                return Ok(Valuation::Finite(base + o - scale_val));
            }
        }
        if n_eff == cap {
            return Err(Error::PrecisionExhausted(cap));
        }
        n = n.saturating_mul(2);
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Rat(r) => write!(f, "{r}"),
            Repr::Fun(r) => write!(f, "{r}"),
            Repr::Ref(r) => write!(f, "<refinable, v >= {}>", r.shift),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> FieldModel {
        FieldModel::qp(3).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let m = q3();
        let x = FieldElement::ratio(m, 9, 2).unwrap();
        assert_eq!(x.valuation().unwrap(), Valuation::Finite(2));
        assert_eq!(
            FieldElement::zero(m).valuation().unwrap(),
            Valuation::Infinite
        );
        let l5 = FieldModel::laurent(5).unwrap();
        // T^2 / (1 + T)
        let num = FpPoly::monomial(5, 1, 2);
        let den = FpPoly::new(5, vec![1, 1]);
        let x = FieldElement::from_ratfun(l5, RatFun::new(num, den).unwrap()).unwrap();
        assert_eq!(x.valuation().unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn arith_examples() {
        let m = q3();
        let a = FieldElement::ratio(m, 1, 3).unwrap();
        let b = FieldElement::ratio(m, 2, 3).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.exact_eq(&FieldElement::one(m)), Some(true));
        assert_eq!(s.valuation().unwrap(), Valuation::Finite(0));

        let m2 = FieldModel::qp(2).unwrap();
        let two = FieldElement::from_integer(m2, 2);
        let four = two.add(&two).unwrap();
        assert_eq!(four.valuation().unwrap(), Valuation::Finite(2));

        let x = FieldElement::ratio(m, 9, 2).unwrap();
        let y = FieldElement::ratio(m, 2, 3).unwrap();
        let p = x.mul(&y).unwrap();
        assert_eq!(p.exact_eq(&FieldElement::from_integer(m, 3)), Some(true));
        assert_eq!(p.valuation().unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn model_mismatch() {
        let a = FieldElement::one(q3());
        let b = FieldElement::one(FieldModel::qp(5).unwrap());
        assert!(matches!(a.add(&b), Err(Error::ModelMismatch)));
    }

    #[test]
    fn refinable_inverse() {
        let m = q3();
        // refine 1/(1-3) as a geometric series generator, then invert back
        let x = FieldElement::from_integer(m, -2);
        let r = x.as_refinable().unwrap();
        assert_eq!(r.valuation().unwrap(), 0);
        let y = FieldElement {
            model: m,
            repr: Repr::Ref(r),
        };
        let z = y.inv().unwrap();
        let w = z.mul(&FieldElement::from_integer(m, -2)).unwrap();
        // w = 1, so w - 1 has unresolvably large valuation; check residues instead
        let one = FieldElement::one(m);
        let d = w.sub(&one).unwrap();
        assert!(matches!(d.valuation(), Err(Error::PrecisionExhausted(_))));
    }
}
