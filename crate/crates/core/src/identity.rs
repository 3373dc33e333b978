//! The main verifier: LHS = sum of boundary translation lengths, RHS = the
//! finite signed sum of cross-ratio valuations over double cosets, both
//! exact integers, with stabilization detection over a trailing window of
//! representative lengths.

use serde::Serialize;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::field::newton::newton_polygon;
use crate::field::{
    integer_combo_valuation, linear_combo_valuation, FieldElement, FieldModel, ModelKind,
    Valuation,
};
use crate::linalg::{
    cross_ratio_valuation, eigen_data, translation_length, veronese, EigenData, ProjMatrix,
    ProjPoint,
};
use crate::par;
use crate::words::{boundary_words, is_canonical, BoundarySystem, Letter, SurfaceType, Word};

pub const DEFAULT_CUTOFF: usize = 12;
pub const DEFAULT_WINDOW: usize = 3;

/// A representation of the surface group: exact matrix images of the free
/// generators, plus scan options.
#[derive(Debug, Clone)]
pub struct Representation {
    pub model: FieldModel,
    pub d: usize,
    pub surface: SurfaceType,
    pub boundary: BoundarySystem,
    pub images: Vec<ProjMatrix>,
    pub cutoff: usize,
    pub window: usize,
}

impl Representation {
    pub fn new(model: FieldModel, surface: SurfaceType, images: Vec<ProjMatrix>) -> Result<Self> {
        if images.len() != surface.rank() {
            return Err(Error::Invalid(format!(
                "need {} generator images, got {}",
                surface.rank(),
                images.len()
            )));
        }
        let d = images[0].dim();
        for m in &images {
            if m.dim() != d {
                return Err(Error::Dimension("generator images of mixed size".into()));
            }
            if m.model() != model {
                return Err(Error::ModelMismatch);
            }
        }
        Ok(Representation {
            model,
            d,
            surface,
            boundary: boundary_words(surface),
            images,
            cutoff: DEFAULT_CUTOFF,
            window: DEFAULT_WINDOW,
        })
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window.max(1);
        self
    }

    /// Flip the orientation of boundary j (1-based): replaces the boundary
    /// word by its inverse.
    pub fn invert_boundary(&mut self, j: usize) {
        let w = self.boundary.word(j).invert();
        self.boundary.override_word(j, w);
    }

    pub fn override_boundary(&mut self, j: usize, w: Word) {
        self.boundary.override_word(j, w);
    }

    pub fn word_image(&self, w: &Word) -> Result<ProjMatrix> {
        ProjMatrix::word_image(&self.images, w)
    }

    pub fn boundary_image(&self, j: usize) -> Result<ProjMatrix> {
        self.word_image(self.boundary.word(j))
    }

    /// Well-formedness: every boundary image biproximal (Newton polygon of
    /// the characteristic polynomial has simple extremes).
    pub fn validate(&self) -> Result<()> {
        for j in 1..=self.boundary.count() {
            let m = self.boundary_image(j)?;
            let np = newton_polygon(&m.char_poly()?)?;
            if !np.extremes_are_simple() {
                return Err(Error::NotBiproximal);
            }
        }
        Ok(())
    }
}

/// One nonzero summand of the right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermRecord {
    pub j: usize,
    pub q: usize,
    pub w: Word,
    pub value: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Verified,
    Partial,
    Mismatch,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Verified => "VERIFIED",
            Status::Partial => "PARTIAL",
            Status::Mismatch => "MISMATCH",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub lhs: i64,
    pub rhs: i64,
    /// Nonzero terms, sorted by (j, q, |w|, w).
    pub terms: Vec<TermRecord>,
    pub nonzero_count: usize,
    pub max_len_scanned: i64,
    pub status: Status,
}

impl IdentityReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!(
                "TERM j={} q={} w={} value={}\n",
                t.j, t.q, t.w, t.value
            ));
        }
        out.push_str(&format!(
            "SUM lhs={} rhs={} nonzero={} max_len={} status={}\n",
            self.lhs, self.rhs, self.nonzero_count, self.max_len_scanned, self.status
        ));
        out
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|t| {
                serde_json::json!({
                    "j": t.j,
                    "q": t.q,
                    "w": t.w.to_string(),
                    "value": t.value,
                })
            })
            .collect();
        serde_json::json!({
            "lhs": self.lhs,
            "rhs": self.rhs,
            "terms": terms,
            "nonzero": self.nonzero_count,
            "max_len": self.max_len_scanned,
            "status": self.status,
        })
        .to_string()
    }
}

/// Left-hand side of the identity: the sum of boundary translation lengths.
pub fn lhs(rep: &Representation) -> Result<i64> {
    let mut acc = 0;
    for j in 1..=rep.boundary.count() {
        acc += translation_length(&rep.boundary_image(j)?)?;
    }
    Ok(acc)
}

fn term_value(
    rep: &Representation,
    ed_j: &EigenData,
    zeta_q_plus: &ProjPoint,
    zeta_q_minus: &ProjPoint,
    w: &Word,
) -> Result<i64> {
    let g = rep.word_image(w)?;
    let omega_plus = g.apply(zeta_q_plus)?;
    let omega_minus = g.apply(zeta_q_minus)?;
    cross_ratio_valuation(
        &ed_j.attracting_hyperplane,
        &ed_j.repelling_hyperplane,
        &omega_plus,
        &omega_minus,
    )
}

/// One summand log_v |C(alpha_j+, alpha_j-; w alpha_q+, w alpha_q-)|.
pub fn term(rep: &Representation, j: usize, q: usize, w: &Word) -> Result<i64> {
    if j == q && w.is_empty() {
        return Err(Error::Invalid(
            "identity coset is excluded when j = q".into(),
        ));
    }
    let ed_j = eigen_data(&rep.boundary_image(j)?)?;
    let ed_q = eigen_data(&rep.boundary_image(q)?)?;
    term_value(
        rep,
        &ed_j,
        &ed_q.attracting_point,
        &ed_q.repelling_point,
        w,
    )
}

/// The potential function of a point x against a reference z on boundary j:
/// Phi(x) = log_v |C(alpha_j+, alpha_j-; x, z)|.
pub fn phi(rep: &Representation, j: usize, x: &ProjPoint, z: &ProjPoint) -> Result<i64> {
    let ed_j = eigen_data(&rep.boundary_image(j)?)?;
    cross_ratio_valuation(
        &ed_j.attracting_hyperplane,
        &ed_j.repelling_hyperplane,
        x,
        z,
    )
}

/// Apply the Veronese representation to every generator image.
pub fn veronese_lift(rep: &Representation, d_target: usize) -> Result<Representation> {
    if rep.d != 2 {
        return Err(Error::Dimension("veronese_lift needs a d = 2 input".into()));
    }
    let images = rep
        .images
        .iter()
        .map(|m| veronese(m, d_target))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Representation::new(rep.model, rep.surface, images)?;
    out.boundary = rep.boundary.clone();
    out.cutoff = rep.cutoff;
    out.window = rep.window;
    Ok(out)
}

pub(crate) fn assemble_report(
    lhs_value: i64,
    evaluated: Vec<(usize, usize, Word, i64)>,
    cutoff: usize,
    window: usize,
) -> IdentityReport {
    let mut evaluated = evaluated;
    evaluated.sort_by(|a, b| {
        (a.0, a.1, a.2.len())
            .cmp(&(b.0, b.1, b.2.len()))
            .then_with(|| a.2.cmp(&b.2))
    });
    let rhs: i64 = evaluated.iter().map(|t| t.3).sum();
    // a trailing window of lengths with no nonzero term is the
    // stabilization surrogate for the (ineffective) finiteness of the sum
    let mut nonzero_at_len = vec![false; cutoff + 1];
    for (_, _, w, v) in &evaluated {
        if *v != 0 {
            nonzero_at_len[w.len()] = true;
        }
    }
    let stabilized = cutoff + 1 >= window
        && ((cutoff + 1 - window)..=cutoff).all(|l| !nonzero_at_len[l]);
    let status = if stabilized && rhs == lhs_value {
        Status::Verified
    } else if stabilized {
        Status::Mismatch
    } else {
        Status::Partial
    };
    let terms: Vec<TermRecord> = evaluated
        .into_iter()
        .filter(|t| t.3 != 0)
        .map(|(j, q, w, value)| TermRecord { j, q, w, value })
        .collect();
    IdentityReport {
        lhs: lhs_value,
        rhs,
        nonzero_count: terms.len(),
        terms,
        max_len_scanned: cutoff as i64,
        status,
    }
}

/// Precomputed pairing products for one ordered boundary pair (j, q): the
/// value of the coset at ρ(w) = M is a signed sum of valuations of
/// sum_{r,c} M[r][c] * phi_h[r] * zeta_b[c], so the d^2 products
/// phi_h[r] * zeta_b[c] are formed once and every coset costs four
/// linear-combination valuations over them.
struct PairEval {
    d: usize,
    // indexed [hyperplane 0=attracting 1=repelling][point 0=zeta+ 1=zeta-]
    prods: [[Vec<FieldElement>; 2]; 2],
}

impl PairEval {
    fn new(d: usize, ed_j: &EigenData, ed_q: &EigenData) -> Result<PairEval> {
        let hyps = [&ed_j.attracting_hyperplane, &ed_j.repelling_hyperplane];
        let pts = [&ed_q.attracting_point, &ed_q.repelling_point];
        let mut prods: [[Vec<FieldElement>; 2]; 2] = Default::default();
        for (h, hyp) in hyps.iter().enumerate() {
            for (b, pt) in pts.iter().enumerate() {
                let mut v = Vec::with_capacity(d * d);
                for r in 0..d {
                    for c in 0..d {
                        v.push(hyp.coords[r].mul(&pt.coords[c])?);
                    }
                }
                prods[h][b] = v;
            }
        }
        Ok(PairEval { d, prods })
    }

    fn pairing_valuation(&self, m: &ProjMatrix, h: usize, b: usize) -> Result<i64> {
        let d = self.d;
        let mut terms = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                terms.push((m.entry(r, c), &self.prods[h][b][r * d + c]));
            }
        }
        match linear_combo_valuation(&terms)? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::DegeneratePairing(
                "boundary flag meets a coset image".into(),
            )),
        }
    }

    fn value(&self, m: &ProjMatrix) -> Result<i64> {
        // log_v |C| = v(phi(omega-)) + v(phi'(omega+)) - v(phi(omega+)) - v(phi'(omega-))
        Ok(self.pairing_valuation(m, 0, 1)? + self.pairing_valuation(m, 1, 0)?
            - self.pairing_valuation(m, 0, 0)?
            - self.pairing_valuation(m, 1, 1)?)
    }

    fn pairing_valuation_int(&self, m: &IntMat, h: usize, b: usize) -> Result<i64> {
        let xs: Vec<&FieldElement> = self.prods[h][b].iter().collect();
        match integer_combo_valuation(m.model, &m.e, &xs)? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::DegeneratePairing(
                "boundary flag meets a coset image".into(),
            )),
        }
    }

    /// Same value on the integer carrier; the projective scale introduced
    /// by clearing denominators and by adjugate inverses cancels in the
    /// (+, +, -, -) combination.
    fn value_int(&self, m: &IntMat) -> Result<i64> {
        Ok(self.pairing_valuation_int(m, 0, 1)? + self.pairing_valuation_int(m, 1, 0)?
            - self.pairing_valuation_int(m, 0, 0)?
            - self.pairing_valuation_int(m, 1, 1)?)
    }
}

/// Row-major integer matrix: the carried prefix product over Qp, where
/// every letter image can be scaled to integral entries (adjugate inverses
/// of integral matrices are integral, and projective scale is free).
#[derive(Clone)]
struct IntMat {
    model: FieldModel,
    d: usize,
    e: Vec<BigInt>,
}

impl IntMat {
    fn identity(model: FieldModel, d: usize) -> IntMat {
        let mut e = vec![BigInt::zero(); d * d];
        for i in 0..d {
            e[i * d + i] = BigInt::one();
        }
        IntMat { model, d, e }
    }

    fn from_proj(m: &ProjMatrix) -> Result<IntMat> {
        let d = m.dim();
        let mut denom_lcm = BigInt::one();
        for r in 0..d {
            for c in 0..d {
                let x = m
                    .entry(r, c)
                    .as_rational()
                    .ok_or_else(|| Error::Invalid("integer carrier needs Qp entries".into()))?;
                denom_lcm = denom_lcm.lcm(x.denom());
            }
        }
        let mut e = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let x = m.entry(r, c).as_rational().unwrap();
                e.push(x.numer() * (&denom_lcm / x.denom()));
            }
        }
        Ok(IntMat {
            model: m.model(),
            d,
            e,
        })
    }

    fn mul(&self, o: &IntMat) -> IntMat {
        let d = self.d;
        let mut e = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = &self.e[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    e[r * d + c] += a * &o.e[k * d + c];
                }
            }
        }
        IntMat {
            model: self.model,
            d,
            e,
        }
    }
}

/// Depth below which the scan runs in the calling thread; deeper subtrees
/// become parallel tasks.
const SPLIT_DEPTH: usize = 3;

/// Exhaustive walk of a subtree of reduced words, carrying the prefix
/// product so each node costs one matrix multiplication.
#[allow(clippy::too_many_arguments)]
fn scan_subtree<M, FM, FE>(
    rep: &Representation,
    j: usize,
    q: usize,
    letter_imgs: &[M],
    mul: &FM,
    eval: &FE,
    stack: &mut Vec<Letter>,
    m: &M,
    out: &mut Vec<(usize, usize, Word, i64)>,
) -> Result<()>
where
    FM: Fn(&M, &M) -> Result<M>,
    FE: Fn(&M) -> Result<i64>,
{
    if !stack.is_empty() {
        let w = Word::reduce(stack.iter().copied());
        if is_canonical(&rep.boundary, &w, j, q) {
            let v = eval(m)?;
            out.push((j, q, w, v));
        }
    }
    if stack.len() >= rep.cutoff {
        return Ok(());
    }
    let rank = rep.surface.rank();
    for code in 0..2 * rank {
        let l = Letter::new(code / 2, code % 2 == 1);
        if stack.last() == Some(&l.inverse()) {
            continue;
        }
        let next = mul(m, &letter_imgs[code])?;
        stack.push(l);
        scan_subtree(rep, j, q, letter_imgs, mul, eval, stack, &next, out)?;
        stack.pop();
    }
    Ok(())
}

/// Scan all double cosets of one ordered boundary pair, generic in the
/// carried prefix-product type. Shallow levels run in the calling thread;
/// subtrees below SPLIT_DEPTH become parallel tasks.
#[allow(clippy::too_many_arguments)]
fn scan_pair<M, FM, FE>(
    rep: &Representation,
    j: usize,
    q: usize,
    letter_imgs: &[M],
    identity: M,
    mul: FM,
    eval: FE,
    parallel: bool,
) -> Result<Vec<(usize, usize, Word, i64)>>
where
    M: Clone + Send + Sync,
    FM: Fn(&M, &M) -> Result<M> + Sync,
    FE: Fn(&M) -> Result<i64> + Sync,
{
    let rank = rep.surface.rank();
    let mut evaluated: Vec<(usize, usize, Word, i64)> = Vec::new();
    if j != q {
        evaluated.push((j, q, Word::identity(), eval(&identity)?));
    }
    let split = SPLIT_DEPTH.min(rep.cutoff);
    let mut tasks: Vec<(Vec<Letter>, M)> = Vec::new();
    let mut shallow: Vec<(Vec<Letter>, M)> = vec![(Vec::new(), identity)];
    for depth in 1..=split {
        let grow = std::mem::take(&mut shallow);
        for (letters, mat) in grow {
            for code in 0..2 * rank {
                let l = Letter::new(code / 2, code % 2 == 1);
                if letters.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut w = letters.clone();
                w.push(l);
                let next = mul(&mat, &letter_imgs[code])?;
                let word = Word::reduce(w.iter().copied());
                if is_canonical(&rep.boundary, &word, j, q) {
                    evaluated.push((j, q, word, eval(&next)?));
                }
                if depth == split && split < rep.cutoff {
                    tasks.push((w.clone(), next.clone()));
                }
                shallow.push((w, next));
            }
        }
    }
    let run = |(letters, mat): (Vec<Letter>, M)| -> Result<Vec<(usize, usize, Word, i64)>> {
        // the prefix itself was already handled at the split level
        let mut out = Vec::new();
        let mut stack = letters;
        for code in 0..2 * rank {
            let l = Letter::new(code / 2, code % 2 == 1);
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            let next = mul(&mat, &letter_imgs[code])?;
            stack.push(l);
            scan_subtree(rep, j, q, letter_imgs, &mul, &eval, &mut stack, &next, &mut out)?;
            stack.pop();
        }
        Ok(out)
    };
    let results = if parallel {
        par::map_collect(tasks, run)
    } else {
        par::map_collect_sequential(tasks, run)
    };
    for r in results {
        evaluated.extend(r?);
    }
    Ok(evaluated)
}

fn verify_mode(rep: &Representation, parallel: bool) -> Result<IdentityReport> {
    rep.validate()?;
    let m = rep.boundary.count();
    let lhs_value = lhs(rep)?;
    let mut eds = Vec::with_capacity(m);
    for j in 1..=m {
        eds.push(eigen_data(&rep.boundary_image(j)?)?);
    }
    let rank = rep.surface.rank();
    let mut letter_imgs = Vec::with_capacity(2 * rank);
    for g in 0..rank {
        letter_imgs.push(rep.images[g].clone());
        letter_imgs.push(rep.images[g].inverse_projective()?);
    }
    let qp_carrier = rep.model.kind == ModelKind::Qp;
    let int_imgs: Vec<IntMat> = if qp_carrier {
        letter_imgs
            .iter()
            .map(IntMat::from_proj)
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut evaluated: Vec<(usize, usize, Word, i64)> = Vec::new();
    for j in 1..=m {
        for q in 1..=m {
            let pair = PairEval::new(rep.d, &eds[j - 1], &eds[q - 1])?;
            let part = if qp_carrier {
                scan_pair(
                    rep,
                    j,
                    q,
                    &int_imgs,
                    IntMat::identity(rep.model, rep.d),
                    |a: &IntMat, b: &IntMat| Ok(a.mul(b)),
                    |mm: &IntMat| pair.value_int(mm),
                    parallel,
                )?
            } else {
                scan_pair(
                    rep,
                    j,
                    q,
                    &letter_imgs,
                    ProjMatrix::identity(rep.model, rep.d),
                    |a: &ProjMatrix, b: &ProjMatrix| a.mul(b),
                    |mm: &ProjMatrix| pair.value(mm),
                    parallel,
                )?
            };
            evaluated.extend(part);
        }
    }
    Ok(assemble_report(lhs_value, evaluated, rep.cutoff, rep.window))
}

/// Full scan of the identity: all ordered boundary pairs, all double cosets
/// up to the cutoff, evaluated in parallel when the `parallel` feature is
/// active, with a deterministic final ordering.
pub fn verify(rep: &Representation) -> Result<IdentityReport> {
    verify_mode(rep, true)
}

/// Sequential variant with identical output; exists as the benchmark
/// baseline and for environments where the thread pool is unwelcome.
pub fn verify_sequential(rep: &Representation) -> Result<IdentityReport> {
    verify_mode(rep, false)
}
