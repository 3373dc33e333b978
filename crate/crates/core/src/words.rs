//! Words in the fundamental group of a compact oriented surface with
//! boundary (a free group), boundary words, and canonical double-coset
//! representatives for the pairs of boundary subgroups.
//!
//! Alphabet convention: generator i is written as the lowercase letter
//! ('a' + i) and its inverse as the uppercase letter, so "abAB" is the
//! commutator of the first two generators. The symmetric ordering is
//! a < a^{-1} < b < b^{-1} < ...

use crate::error::{Error, Result};

/// Topological type (genus, number of boundary components).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceType {
    pub genus: u32,
    pub boundaries: u32,
}

impl SurfaceType {
    pub fn new(genus: u32, boundaries: u32) -> Result<Self> {
        // need m >= 1 and negative Euler characteristic 2 - 2g - m < 0
        if boundaries == 0 || 2 - 2 * (genus as i64) - (boundaries as i64) >= 0 {
            return Err(Error::BadSurface(genus, boundaries));
        }
        Ok(SurfaceType { genus, boundaries })
    }

    /// Rank of the (free) fundamental group.
    pub fn rank(&self) -> usize {
        (2 * self.genus + self.boundaries - 1) as usize
    }
}

/// One letter: generator index with an inversion flag, packed so that the
/// derived order realizes g1 < g1^{-1} < g2 < g2^{-1} < ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        debug_assert!(generator < 26);
        Letter((2 * generator + usize::from(inverse)) as u8)
    }

    pub fn generator(&self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.0 % 2 == 1
    }

    pub fn inverse(&self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char, rank: usize) -> Result<Letter> {
        let (idx, inv) = if c.is_ascii_lowercase() {
            ((c as u8 - b'a') as usize, false)
        } else if c.is_ascii_uppercase() {
            ((c as u8 - b'A') as usize, true)
        } else {
            return Err(Error::BadLetter(c));
        };
        if idx >= rank {
            return Err(Error::BadLetter(c));
        }
        Ok(Letter::new(idx, inv))
    }

    pub fn to_char(&self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn parse(s: &str, rank: usize) -> Result<Word> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            if c.is_whitespace() {
                continue;
            }
            letters.push(Letter::from_char(c, rank)?);
        }
        Ok(Word::reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        // both inputs are reduced, so cancellation happens only at the seam
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// The boundary words of a surface in the fixed presentation with
/// generators a1,b1,...,ag,bg,c1,...,c_{m-1}.
#[derive(Debug, Clone)]
pub struct BoundarySystem {
    pub surface: SurfaceType,
    words: Vec<Word>,
}

impl BoundarySystem {
    /// Boundary word for the 1-based boundary index j.
    pub fn word(&self, j: usize) -> &Word {
        &self.words[j - 1]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn count(&self) -> usize {
        self.words.len()
    }

    /// Replace a boundary word (1-based index) with an explicit word; used
    /// by configurations that fix their own presentation.
    pub fn override_word(&mut self, j: usize, w: Word) {
        self.words[j - 1] = w;
    }
}

/// Boundary words in the fixed presentation. For j < m the word is c_j; the
/// last boundary is the inverse of prod [a_i,b_i] c_1...c_{m-1}, except that
/// with a single boundary the commutator product itself is used (both
/// conventions represent the same free homotopy class up to orientation,
/// and the single-boundary examples fix this one).
pub fn boundary_words(surface: SurfaceType) -> BoundarySystem {
    let g = surface.genus as usize;
    let m = surface.boundaries as usize;
    let mut words = Vec::with_capacity(m);
    for j in 0..m.saturating_sub(1) {
        words.push(Word(vec![Letter::new(2 * g + j, false)]));
    }
    let mut prod = Word::identity();
    for i in 0..g {
        let a = Word(vec![Letter::new(2 * i, false)]);
        let b = Word(vec![Letter::new(2 * i + 1, false)]);
        let comm = a
            .multiply(&b)
            .multiply(&a.invert())
            .multiply(&b.invert());
        prod = prod.multiply(&comm);
    }
    for w in &words {
        let w = w.clone();
        prod = prod.multiply(&w);
    }
    if m == 1 {
        words.push(prod);
    } else {
        words.push(prod.invert());
    }
    BoundarySystem { surface, words }
}

fn shift_bound(wlen: usize, alpha_len: usize) -> i64 {
    (wlen / alpha_len.max(1)) as i64 + 2
}

/// The canonical representative of the double coset <alpha_j> w <alpha_q>:
/// minimal length among alpha_j^n w alpha_q^s, ties broken by lexicographic
/// maximality in the fixed alphabet order.
pub fn canonical_rep(bs: &BoundarySystem, w: &Word, j: usize, q: usize) -> Word {
    let aj = bs.word(j);
    let aq = bs.word(q);
    let nb = shift_bound(w.len(), aj.len());
    let sb = shift_bound(w.len(), aq.len());
    let mut best: Option<Word> = None;
    let mut left = aj.pow(-nb).multiply(w);
    for _n in -nb..=nb {
        let mut cand = left.multiply(&aq.pow(-sb));
        for _s in -sb..=sb {
            let better = match &best {
                None => true,
                Some(b) => {
                    cand.len() < b.len() || (cand.len() == b.len() && cand > *b)
                }
            };
            if better {
                best = Some(cand.clone());
            }
            cand = cand.multiply(aq);
        }
        left = aj.multiply(&left);
    }
    best.unwrap()
}

/// Reference fixed-point test: is w its own canonical representative?
/// Builds every candidate product explicitly; correct for arbitrary
/// boundary words, and the oracle for the fast path below.
pub fn is_canonical_reference(bs: &BoundarySystem, w: &Word, j: usize, q: usize) -> bool {
    let aj = bs.word(j);
    let aq = bs.word(q);
    let nb = shift_bound(w.len(), aj.len());
    let sb = shift_bound(w.len(), aq.len());
    // cached powers alpha^n for n in [-nb, nb] (index n + nb), same for q
    let pows = |a: &Word, b: i64| -> Vec<Word> {
        let mut v = Vec::with_capacity((2 * b + 1) as usize);
        for n in -b..=b {
            v.push(a.pow(n));
        }
        v
    };
    let jp = pows(aj, nb);
    let qp = pows(aq, sb);
    for radius in 0..=(nb.max(sb)) {
        for n in -nb..=nb {
            for s in -sb..=sb {
                if n.abs().max(s.abs()) != radius || (n == 0 && s == 0) {
                    continue;
                }
                let cand = jp[(n + nb) as usize]
                    .multiply(w)
                    .multiply(&qp[(s + sb) as usize]);
                if cand.len() < w.len() || (cand.len() == w.len() && cand > *w) {
                    return false;
                }
            }
        }
    }
    true
}

fn is_cyclically_reduced(w: &Word) -> bool {
    match (w.0.first(), w.0.last()) {
        (Some(f), Some(l)) => *f != l.inverse(),
        _ => true,
    }
}

/// Longest t such that w[..t] equals the first t letters of pattern^infinity.
fn periodic_prefix_match(w: &[Letter], pattern: &Word) -> usize {
    let p = &pattern.0;
    if p.is_empty() {
        return 0;
    }
    let mut t = 0;
    while t < w.len() && w[t] == p[t % p.len()] {
        t += 1;
    }
    t
}

/// Longest t such that the last t letters of w equal the last t letters of
/// pattern^infinity (right-aligned periodic match).
fn periodic_suffix_match(w: &[Letter], pattern: &Word) -> usize {
    let p = &pattern.0;
    if p.is_empty() {
        return 0;
    }
    let (n, l) = (w.len(), p.len());
    let mut t = 0;
    while t < n && w[n - 1 - t] == p[l - 1 - (t % l)] {
        t += 1;
    }
    t
}

/// Fast fixed-point test: is w its own canonical representative? For
/// cyclically reduced boundary words the length of alpha_j^n w alpha_q^s is
/// closed-form from two periodic-match profiles (the cancellation between
/// a power of a cyclically reduced word and w stops exactly where w stops
/// tracking the periodic pattern), so almost every candidate is ruled in or
/// out without building the product. Products are only formed for
/// equal-length candidates (the lexicographic tie-break) and for the rare
/// shifts that consume all of w.
pub fn is_canonical(bs: &BoundarySystem, w: &Word, j: usize, q: usize) -> bool {
    let aj = bs.word(j);
    let aq = bs.word(q);
    if !is_cyclically_reduced(aj) || !is_cyclically_reduced(aq) {
        return is_canonical_reference(bs, w, j, q);
    }
    let (lj, lq) = (aj.len() as i64, aq.len() as i64);
    let wlen = w.len() as i64;
    let nb = shift_bound(w.len(), aj.len());
    let sb = shift_bound(w.len(), aq.len());
    let p_pos = periodic_prefix_match(&w.0, &aj.invert()) as i64;
    let p_neg = periodic_prefix_match(&w.0, aj) as i64;
    let s_pos = periodic_suffix_match(&w.0, &aq.invert()) as i64;
    let s_neg = periodic_suffix_match(&w.0, aq) as i64;
    for n in -nb..=nb {
        let cl = match n.signum() {
            0 => 0,
            1 => (n * lj).min(p_pos),
            _ => (-n * lj).min(p_neg),
        };
        for s in -sb..=sb {
            if n == 0 && s == 0 {
                continue;
            }
            let cr = match s.signum() {
                0 => 0,
                1 => (s * lq).min(s_pos),
                _ => (-s * lq).min(s_neg),
            };
            if cl + cr < wlen {
                let cand_len = wlen + n.abs() * lj + s.abs() * lq - 2 * (cl + cr);
                if cand_len > wlen {
                    continue;
                }
                if cand_len < wlen {
                    return false;
                }
            }
            // tie or total cancellation: build the candidate exactly
            let cand = aj.pow(n).multiply(w).multiply(&aq.pow(s));
            if cand.len() < w.len() || (cand.len() == w.len() && cand > *w) {
                return false;
            }
        }
    }
    true
}

/// Bounded-witness test for membership in the same double coset.
pub fn coset_equal(bs: &BoundarySystem, w1: &Word, w2: &Word, j: usize, q: usize) -> bool {
    let aj = bs.word(j);
    let aq = bs.word(q);
    let nb = shift_bound(w1.len() + w2.len(), aj.len());
    let sb = shift_bound(w1.len() + w2.len(), aq.len());
    let mut left = aj.pow(-nb).multiply(w1);
    for _n in -nb..=nb {
        let mut cand = left.multiply(&aq.pow(-sb));
        for _s in -sb..=sb {
            if cand == *w2 {
                return true;
            }
            cand = cand.multiply(aq);
        }
        left = aj.multiply(&left);
    }
    false
}

/// All reduced words of exactly the given length, in lexicographic order.
pub fn reduced_words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<Letter> = Vec::with_capacity(len);
    fn dfs(rank: usize, len: usize, stack: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if stack.len() == len {
            out.push(Word(stack.clone()));
            return;
        }
        for code in 0..(2 * rank) as u8 {
            let l = Letter(code);
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            stack.push(l);
            dfs(rank, len, stack, out);
            stack.pop();
        }
    }
    dfs(rank, len, &mut stack, &mut out);
    out
}

/// Canonical double-coset representatives of exactly the given length, in
/// lexicographic order. A word represents its coset iff it is a fixed point
/// of canonical_rep, so the enumeration is stateless. The identity coset is
/// excluded when j = q (powers of the boundary word carry no interval).
pub fn cosets_of_length(bs: &BoundarySystem, j: usize, q: usize, len: usize) -> Vec<Word> {
    if len == 0 {
        return if j == q {
            Vec::new()
        } else {
            vec![Word::identity()]
        };
    }
    let rank = bs.surface.rank();
    reduced_words_of_length(rank, len)
        .into_iter()
        .filter(|w| is_canonical(bs, w, j, q))
        .collect()
}

/// One emitted double-coset representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetRep {
    pub j: usize,
    pub q: usize,
    pub word: Word,
}

/// All canonical representatives of length at most max_len, grouped by
/// length ascending then lexicographic. Negative max_len yields nothing.
pub fn enumerate_double_cosets(
    bs: &BoundarySystem,
    j: usize,
    q: usize,
    max_len: i64,
) -> Vec<DoubleCosetRep> {
    let mut out = Vec::new();
    if max_len < 0 {
        return out;
    }
    for len in 0..=(max_len as usize) {
        for word in cosets_of_length(bs, j, q, len) {
            out.push(DoubleCosetRep { j, q, word });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus1() -> BoundarySystem {
        boundary_words(SurfaceType::new(1, 1).unwrap())
    }

    #[test]
    fn surface_validation() {
        assert!(SurfaceType::new(0, 2).is_err());
        assert!(SurfaceType::new(0, 1).is_err());
        assert!(SurfaceType::new(1, 0).is_err());
        assert_eq!(SurfaceType::new(0, 3).unwrap().rank(), 2);
        assert_eq!(SurfaceType::new(1, 1).unwrap().rank(), 2);
        assert_eq!(SurfaceType::new(2, 1).unwrap().rank(), 4);
    }

    #[test]
    fn reduction_and_ops() {
        let w = Word::parse("abB", 2).unwrap();
        assert_eq!(w, Word::parse("a", 2).unwrap());
        let u = Word::parse("ab", 2).unwrap();
        let v = Word::parse("Ba", 2).unwrap();
        assert_eq!(u.multiply(&v), Word::parse("aa", 2).unwrap());
        assert_eq!(
            Word::parse("aB", 2).unwrap().invert(),
            Word::parse("bA", 2).unwrap()
        );
        assert!(Word::parse("xz", 2).is_err());
    }

    #[test]
    fn boundary_conventions() {
        let bs = torus1();
        assert_eq!(bs.word(1), &Word::parse("abAB", 2).unwrap());
        let bs = boundary_words(SurfaceType::new(0, 3).unwrap());
        assert_eq!(bs.word(1), &Word::parse("a", 2).unwrap());
        assert_eq!(bs.word(2), &Word::parse("b", 2).unwrap());
        assert_eq!(bs.word(3), &Word::parse("BA", 2).unwrap());
        // genus 2, one boundary: product of the two commutators, uninverted
        let bs = boundary_words(SurfaceType::new(2, 1).unwrap());
        assert_eq!(bs.word(1), &Word::parse("abABcdCD", 4).unwrap());
    }

    #[test]
    fn canonical_rep_examples() {
        let bs = torus1();
        let alpha = bs.word(1).clone();
        assert_eq!(canonical_rep(&bs, &alpha, 1, 1), Word::identity());
        let a = Word::parse("a", 2).unwrap();
        assert_eq!(canonical_rep(&bs, &a, 1, 1), a);
        assert_eq!(canonical_rep(&bs, &alpha.multiply(&a), 1, 1), a);
        // idempotence on a batch of words, and agreement with is_canonical
        for w in reduced_words_of_length(2, 3) {
            let r = canonical_rep(&bs, &w, 1, 1);
            assert_eq!(canonical_rep(&bs, &r, 1, 1), r);
            assert_eq!(is_canonical(&bs, &w, 1, 1), r == w);
        }
    }

    #[test]
    fn enumeration_examples() {
        let bs = torus1();
        let reps = enumerate_double_cosets(&bs, 1, 1, 1);
        let words: Vec<String> = reps.iter().map(|r| r.word.to_string()).collect();
        assert_eq!(words, vec!["a", "A", "b", "B"]);
        assert!(enumerate_double_cosets(&bs, 1, 1, -1).is_empty());
        let bs3 = boundary_words(SurfaceType::new(0, 3).unwrap());
        let reps = enumerate_double_cosets(&bs3, 1, 2, 0);
        assert_eq!(reps.len(), 1);
        assert!(reps[0].word.is_empty());
    }

    #[test]
    fn coset_equal_examples() {
        let bs = torus1();
        let a = Word::parse("a", 2).unwrap();
        let alpha = bs.word(1).clone();
        let w2 = alpha.multiply(&a).multiply(&alpha);
        assert!(coset_equal(&bs, &a, &w2, 1, 1));
        assert!(!coset_equal(&bs, &a, &Word::parse("b", 2).unwrap(), 1, 1));
        assert!(coset_equal(&bs, &Word::identity(), &alpha, 1, 1));
    }

    #[test]
    fn word_counts() {
        for (rank, len) in [(2usize, 1usize), (2, 3), (3, 2), (3, 4)] {
            let n = reduced_words_of_length(rank, len).len();
            let expect = 2 * rank * (2 * rank - 1).pow(len as u32 - 1);
            assert_eq!(n, expect);
        }
    }
}
