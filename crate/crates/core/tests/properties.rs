//! Randomized laws: field axioms and ultrametric inequalities, word
//! algebra, cross-ratio identities, tree isometry, period = length,
//! invariant-factor norms, and the invariances of the identity's terms.

use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use basmajian_core::berkovich::{dist, median, mobius_act, BerkPoint, P1Point};
use basmajian_core::field::fp::FpPoly;
use basmajian_core::identity::{term, veronese_lift, verify, Representation};
use basmajian_core::linalg::{
    cartan_valuations_raw, cross_ratio_valuation, eigen_data, period, translation_length,
    DualPoint, ProjMatrix, ProjPoint,
};
use basmajian_core::words::{
    cosets_of_length, enumerate_double_cosets, is_canonical, is_canonical_reference,
    reduced_words_of_length, Letter, Word,
};
use basmajian_core::{FieldElement, FieldModel, Valuation};

fn q3() -> FieldModel {
    FieldModel::qp(3).unwrap()
}

fn fe(m: FieldModel, n: i64) -> FieldElement {
    FieldElement::from_integer(m, n)
}

fn rational(m: FieldModel, num: i64, den: i64) -> FieldElement {
    FieldElement::ratio(m, num, den).unwrap()
}

fn val(x: &FieldElement) -> Valuation {
    x.valuation().unwrap()
}

proptest! {
    #[test]
    fn field_laws_qp(an in -200i64..200, ad in 1i64..60, bn in -200i64..200, bd in 1i64..60, cn in -200i64..200, cd in 1i64..60) {
        let m = q3();
        let a = rational(m, an, ad);
        let b = rational(m, bn, bd);
        let c = rational(m, cn, cd);
        let assoc_l = a.add(&b).unwrap().add(&c).unwrap();
        let assoc_r = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(assoc_l.exact_eq(&assoc_r), Some(true));
        let comm_l = a.mul(&b).unwrap();
        let comm_r = b.mul(&a).unwrap();
        prop_assert_eq!(comm_l.exact_eq(&comm_r), Some(true));
        let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
        let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(dist_l.exact_eq(&dist_r), Some(true));
        if let (Valuation::Finite(va), Valuation::Finite(vb)) = (val(&a), val(&b)) {
            prop_assert_eq!(val(&a.mul(&b).unwrap()), Valuation::Finite(va + vb));
            match val(&a.add(&b).unwrap()) {
                Valuation::Finite(vs) => prop_assert!(vs >= va.min(vb)),
                Valuation::Infinite => prop_assert_eq!(va, vb),
            }
            let inv = a.inv().unwrap();
            prop_assert_eq!(a.mul(&inv).unwrap().exact_eq(&FieldElement::one(m)), Some(true));
        }
    }

    #[test]
    fn field_laws_laurent(ac in proptest::collection::vec(0u64..5, 1..5), bc in proptest::collection::vec(0u64..5, 1..5)) {
        let m = FieldModel::laurent(5).unwrap();
        let a = FieldElement::from_ratfun(m, basmajian_core::field::fp::RatFun::new(
            FpPoly::new(5, ac), FpPoly::constant(5, 1)).unwrap()).unwrap();
        let b = FieldElement::from_ratfun(m, basmajian_core::field::fp::RatFun::new(
            FpPoly::new(5, bc), FpPoly::constant(5, 1)).unwrap()).unwrap();
        let comm = a.mul(&b).unwrap();
        prop_assert_eq!(comm.exact_eq(&b.mul(&a).unwrap()), Some(true));
        if let (Valuation::Finite(va), Valuation::Finite(vb)) = (val(&a), val(&b)) {
            prop_assert_eq!(val(&comm), Valuation::Finite(va + vb));
            let inv = a.inv().unwrap();
            prop_assert_eq!(a.mul(&inv).unwrap().exact_eq(&FieldElement::one(m)), Some(true));
        }
    }

    #[test]
    fn word_algebra(us in proptest::collection::vec(0u8..4, 0..12), vs in proptest::collection::vec(0u8..4, 0..12)) {
        let letters = |v: &[u8]| v.iter().map(|&c| Letter::new((c / 2) as usize, c % 2 == 1)).collect::<Vec<_>>();
        let u = Word::reduce(letters(&us));
        let v = Word::reduce(letters(&vs));
        // reduction is idempotent
        prop_assert_eq!(Word::reduce(u.letters().iter().copied()), u.clone());
        let uv = u.multiply(&v);
        prop_assert!(uv.len() <= u.len() + v.len());
        prop_assert_eq!(uv.invert(), v.invert().multiply(&u.invert()));
        prop_assert_eq!(u.multiply(&u.invert()), Word::identity());
        prop_assert_eq!(u.pow(3), u.multiply(&u).multiply(&u));
        prop_assert_eq!(u.pow(-2), u.invert().multiply(&u.invert()));
    }

    #[test]
    fn cross_ratio_identities_qp(pts in proptest::collection::hash_set(-40i64..40, 5)) {
        let m = q3();
        let v: Vec<i64> = pts.into_iter().collect();
        let (u1, u2, x, y, z) = (v[0], v[1], v[2], v[3], v[4]);
        let p = |k: i64| ProjPoint::from_p1(&fe(m, k));
        let phi = DualPoint::annihilator_p1(&p(u1));
        let phi2 = DualPoint::annihilator_p1(&p(u2));
        let crv = |a: &ProjPoint, b: &ProjPoint| cross_ratio_valuation(&phi, &phi2, a, b).unwrap();
        // cocycle in the point pair
        prop_assert_eq!(crv(&p(x), &p(z)) + crv(&p(z), &p(y)), crv(&p(x), &p(y)));
        // swapping either the flags or the points inverts the ratio
        prop_assert_eq!(cross_ratio_valuation(&phi2, &phi, &p(x), &p(y)).unwrap(), -crv(&p(x), &p(y)));
        prop_assert_eq!(crv(&p(y), &p(x)), -crv(&p(x), &p(y)));
        // degeneracy
        prop_assert_eq!(crv(&p(x), &p(x)), 0);
    }

    #[test]
    fn cross_ratio_identities_laurent(degs in proptest::collection::hash_set(0i64..20, 5)) {
        let m = FieldModel::laurent(5).unwrap();
        // distinct powers 1 + T^k give pairwise transverse points
        let v: Vec<i64> = degs.into_iter().collect();
        let el = |k: i64| fe(m, 1).add(&FieldElement::uniformizer_pow(m, k + 1)).unwrap();
        let p = |k: i64| ProjPoint::from_p1(&el(k));
        let phi = DualPoint::annihilator_p1(&p(v[0]));
        let phi2 = DualPoint::annihilator_p1(&p(v[1]));
        let crv = |a: &ProjPoint, b: &ProjPoint| cross_ratio_valuation(&phi, &phi2, a, b).unwrap();
        let (x, y, z) = (v[2], v[3], v[4]);
        prop_assert_eq!(crv(&p(x), &p(z)) + crv(&p(z), &p(y)), crv(&p(x), &p(y)));
        prop_assert_eq!(crv(&p(y), &p(x)), -crv(&p(x), &p(y)));
        prop_assert_eq!(crv(&p(x), &p(x)), 0);
    }

    #[test]
    fn canonicality_fast_path_matches_reference(ls in proptest::collection::vec(0u8..4, 1..9)) {
        let rep = basmajian_core::presets::ex51().unwrap();
        let w = Word::reduce(ls.iter().map(|&c| Letter::new((c / 2) as usize, c % 2 == 1)));
        if !w.is_empty() {
            prop_assert_eq!(
                is_canonical(&rep.boundary, &w, 1, 1),
                is_canonical_reference(&rep.boundary, &w, 1, 1)
            );
        }
    }
}

fn random_gl2(rng: &mut ChaCha8Rng, m: FieldModel) -> ProjMatrix {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-20..=20)).collect();
        if let Ok(g) = ProjMatrix::from_integers(m, &[&[e[0], e[1]], &[e[2], e[3]]]) {
            return g;
        }
    }
}

fn random_ball(rng: &mut ChaCha8Rng, m: FieldModel) -> BerkPoint {
    let c = fe(m, rng.gen_range(-100..=100));
    if rng.gen_bool(0.3) {
        // type III: non-integer diameter exponent
        BerkPoint::Ball {
            center: c,
            s: Rational64::new(rng.gen_range(-6..=6), 2) + Rational64::new(1, 2),
        }
    } else {
        BerkPoint::ball_int(c, rng.gen_range(-3..=3))
    }
}

#[test]
fn mobius_isometry_200() {
    let m = q3();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let g = random_gl2(&mut rng, m);
        let x = random_ball(&mut rng, m);
        let y = random_ball(&mut rng, m);
        let d0 = dist(&x, &y).unwrap();
        let d1 = dist(&mobius_act(&g, &x).unwrap(), &mobius_act(&g, &y).unwrap()).unwrap();
        assert_eq!(d0, d1, "isometry failure");
    }
}

#[test]
fn mobius_preserves_median() {
    let m = q3();
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..100 {
        let vals: Vec<i64> = {
            let mut s = std::collections::HashSet::new();
            while s.len() < 3 {
                s.insert(rng.gen_range(-60i64..=60));
            }
            s.into_iter().collect()
        };
        let pts: Vec<P1Point> = vals.iter().map(|&k| P1Point::Finite(fe(m, k))).collect();
        let g = random_gl2(&mut rng, m);
        let med = median(&pts[0], &pts[1], &pts[2]).unwrap();
        let img: Vec<P1Point> = pts
            .iter()
            .map(|p| match mobius_act(&g, &BerkPoint::TypeI(p.clone())).unwrap() {
                BerkPoint::TypeI(q) => q,
                _ => unreachable!(),
            })
            .collect();
        if img.iter().all(|p| matches!(p, P1Point::Finite(_)))
            || matches!(img.iter().filter(|p| matches!(p, P1Point::Infinity)).count(), 1)
        {
            let med_of_img = median(&img[0], &img[1], &img[2]).unwrap();
            let img_of_med = mobius_act(&g, &med).unwrap();
            assert!(med_of_img.eq_point(&img_of_med).unwrap());
        }
    }
}

/// The cross-ratio period along the axis equals the translation
/// length, for random hyperbolic words and random admissible test points.
#[test]
fn period_equals_translation_length() {
    for preset in ["ex51", "ex52"] {
        let rep = basmajian_core::presets::by_name(preset).unwrap().unwrap();
        let m = rep.model;
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut done = 0;
        'outer: while done < 100 {
            let len = rng.gen_range(1..=6);
            let letters: Vec<Letter> = (0..len)
                .map(|_| {
                    let c = rng.gen_range(0u8..4);
                    Letter::new((c / 2) as usize, c % 2 == 1)
                })
                .collect();
            let w = Word::reduce(letters);
            if w.is_empty() {
                continue;
            }
            let g = rep.word_image(&w).unwrap();
            let Ok(ell) = translation_length(&g) else { continue };
            if ell == 0 {
                continue;
            }
            let Ok(ed) = eigen_data(&g) else { continue };
            for _ in 0..5 {
                let omega = ProjPoint::from_p1(&fe(m, rng.gen_range(-50..=50)));
                // admissible: off both eigen-hyperplanes
                match period(&g, &omega) {
                    Ok(p) => assert_eq!(p, ell, "{preset} word {w}"),
                    Err(_) => continue 'outer,
                }
            }
            let _ = ed;
            done += 1;
        }
    }
}

/// Invariant-factor norm law: the top semi-homothecy ratio of a matrix is
/// the maximum entry absolute value, i.e. the first raw Cartan valuation
/// equals the minimum entry valuation. 100 random SL(2)-scaled samples.
#[test]
fn max_entry_norm_law() {
    let m = q3();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let g = random_gl2(&mut rng, m);
        let cv = cartan_valuations_raw(&g).unwrap();
        let mut min_entry = i64::MAX;
        for r in 0..2 {
            for c in 0..2 {
                if let Valuation::Finite(v) = g.entry(r, c).valuation().unwrap() {
                    min_entry = min_entry.min(v);
                }
            }
        }
        assert_eq!(cv.vals[0], min_entry);
        assert!(cv.vals[0] <= cv.vals[1]);
        done += 1;
    }
}

/// The identity's summand depends only on the double coset, not on the
/// representative.
#[test]
fn term_is_coset_invariant() {
    let rep = basmajian_core::presets::ex51().unwrap();
    let alpha = rep.boundary.word(1).clone();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    for len in 1..=4 {
        for w in cosets_of_length(&rep.boundary, 1, 1, len) {
            let base = term(&rep, 1, 1, &w).unwrap();
            for _ in 0..2 {
                let n = rng.gen_range(-2i64..=2);
                let s = rng.gen_range(-2i64..=2);
                let other = alpha.pow(n).multiply(&w).multiply(&alpha.pow(s));
                if other.is_empty() {
                    continue;
                }
                assert_eq!(term(&rep, 1, 1, &other).unwrap(), base, "w={w} n={n} s={s}");
            }
            checked += 1;
        }
    }
    assert!(checked > 50);
}

/// Terms scale by d - 1 under the Veronese lift.
#[test]
fn veronese_terms_scale() {
    let rep = basmajian_core::presets::ex51().unwrap();
    for d in [3usize, 4] {
        let lifted = veronese_lift(&rep, d).unwrap();
        for len in 1..=3 {
            for w in cosets_of_length(&rep.boundary, 1, 1, len) {
                let base = term(&rep, 1, 1, &w).unwrap();
                let up = term(&lifted, 1, 1, &w).unwrap();
                assert_eq!(up, (d as i64 - 1) * base, "w={w} d={d}");
            }
        }
    }
}

/// The whole report is invariant under conjugating the representation.
#[test]
fn report_is_conjugation_invariant() {
    let rep = basmajian_core::presets::ex51().unwrap().with_cutoff(5);
    let m = rep.model;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let base = verify(&rep).unwrap();
    for _ in 0..3 {
        let c = random_gl2(&mut rng, m);
        let ci = c.inverse_projective().unwrap();
        let images = rep
            .images
            .iter()
            .map(|g| c.mul(g).unwrap().mul(&ci).unwrap())
            .collect();
        let conj = Representation::new(m, rep.surface, images)
            .unwrap()
            .with_cutoff(5);
        let got = verify(&conj).unwrap();
        assert_eq!(got.lhs, base.lhs);
        assert_eq!(got.rhs, base.rhs);
        assert_eq!(got.terms.len(), base.terms.len());
        for (a, b) in got.terms.iter().zip(&base.terms) {
            assert_eq!((a.j, a.q, &a.w, a.value), (b.j, b.q, &b.w, b.value));
        }
    }
}

/// Double-coset enumeration against brute force: group all reduced words of
/// length <= 5 by coset_equal and compare counts and representatives.
#[test]
fn enumeration_matches_brute_force() {
    let rep = basmajian_core::presets::ex51().unwrap();
    let bs = &rep.boundary;
    let (j, q) = (1usize, 1usize);
    let mut words: Vec<Word> = vec![Word::identity()];
    for len in 1..=5 {
        words.extend(reduced_words_of_length(2, len));
    }
    // brute-force grouping
    let mut groups: Vec<Vec<Word>> = Vec::new();
    'next: for w in &words {
        for g in groups.iter_mut() {
            if basmajian_core::words::coset_equal(bs, &g[0], w, j, q) {
                g.push(w.clone());
                continue 'next;
            }
        }
        groups.push(vec![w.clone()]);
    }
    // the identity coset (powers of alpha) is excluded from the enumeration
    let alpha = bs.word(1);
    let enumerated = enumerate_double_cosets(bs, j, q, 5);
    let expected: Vec<&Vec<Word>> = groups
        .iter()
        .filter(|g| !basmajian_core::words::coset_equal(bs, &g[0], &alpha.pow(0), j, q))
        .filter(|g| g.iter().map(|w| w.len()).min().unwrap() <= 5)
        .collect();
    assert_eq!(enumerated.len(), expected.len());
    // every enumerated representative is the canonical member of its group
    for rep_word in &enumerated {
        let grp = expected
            .iter()
            .find(|g| basmajian_core::words::coset_equal(bs, &g[0], &rep_word.word, j, q))
            .expect("representative belongs to some coset");
        let min_len = grp.iter().map(|w| w.len()).min().unwrap();
        assert_eq!(rep_word.word.len(), min_len);
        let lex_max = grp
            .iter()
            .filter(|w| w.len() == min_len)
            .max()
            .unwrap();
        assert_eq!(&rep_word.word, lex_max);
    }
}

/// Newton polygon on random split quadratics: (x - 3^a u)(x - 3^b v) has
/// root valuations {a, b}.
#[test]
fn newton_polygon_matches_factorization() {
    use basmajian_core::field::newton::newton_polygon;
    let m = q3();
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..100 {
        let a = rng.gen_range(0i64..5);
        let b = rng.gen_range(0i64..5);
        let u = *[1i64, 2, 4, 5].iter().nth(rng.gen_range(0..4)).unwrap();
        let v = *[1i64, 2, 4, 5].iter().nth(rng.gen_range(0..4)).unwrap();
        let r1 = 3i64.pow(a as u32) * u;
        let r2 = 3i64.pow(b as u32) * v;
        // x^2 - (r1 + r2) x + r1 r2
        let coeffs = vec![fe(m, r1 * r2), fe(m, -(r1 + r2)), fe(m, 1)];
        let np = newton_polygon(&coeffs).unwrap();
        let mut got: Vec<i64> = np
            .root_valuations()
            .iter()
            .flat_map(|(seg, mult)| std::iter::repeat(seg.root_valuation().unwrap()).take(*mult))
            .collect();
        got.sort();
        let mut want = vec![a, b];
        want.sort();
        assert_eq!(got, want);
    }
}
