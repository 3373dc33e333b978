//! The Berkovich projective line over the working field, as an R-tree:
//! typed points, median and join, the hyperbolic metric, the Mobius action,
//! projection to the axis [0, infinity], and the d = 2 geometric
//! verification pipeline.
//!
//! We work in the subtree of balls with centers in P^1(k) and rational
//! diameter exponents: Ball(c, s) stands for the closed ball of diameter
//! q^{-s} around c. Integer s is a type II point, non-integer s type III,
//! and type I points are the classical ones.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldModel, Valuation};
use crate::identity::{assemble_report, lhs, IdentityReport, Representation};
use crate::linalg::{classify_pgl2, eigen_data, Pgl2Class, ProjMatrix, ProjPoint};
use crate::par;
use crate::words::{cosets_of_length, Word};

/// A classical point of P^1(k).
#[derive(Debug, Clone)]
pub enum P1Point {
    Finite(FieldElement),
    Infinity,
}

impl P1Point {
    /// Exact equality when decidable.
    pub fn exact_eq(&self, other: &P1Point) -> Option<bool> {
        match (self, other) {
            (P1Point::Infinity, P1Point::Infinity) => Some(true),
            (P1Point::Infinity, _) | (_, P1Point::Infinity) => Some(false),
            (P1Point::Finite(a), P1Point::Finite(b)) => a.exact_eq(b),
        }
    }

    /// Affine coordinate of a homogeneous point [x : y].
    pub fn from_projective(p: &ProjPoint) -> Result<P1Point> {
        if p.coords.len() != 2 {
            return Err(Error::Dimension("expected a point of P^1".into()));
        }
        if p.coords[1].is_exact_zero() {
            return Ok(P1Point::Infinity);
        }
        Ok(P1Point::Finite(p.coords[0].div(&p.coords[1])?))
    }
}

/// A point of the Berkovich line (types I, II, III).
#[derive(Debug, Clone)]
pub enum BerkPoint {
    TypeI(P1Point),
    /// The ball of diameter q^{-s} around the center.
    Ball { center: FieldElement, s: Rational64 },
}

impl BerkPoint {
    pub fn gauss(model: FieldModel) -> BerkPoint {
        BerkPoint::Ball {
            center: FieldElement::zero(model),
            s: Rational64::from_integer(0),
        }
    }

    pub fn ball_int(center: FieldElement, s: i64) -> BerkPoint {
        BerkPoint::Ball {
            center,
            s: Rational64::from_integer(s),
        }
    }

    /// Ball equality is a predicate, not a normal form: same exponent and
    /// v(c - c') >= s. Type I points compare exactly; mixed types differ.
    pub fn eq_point(&self, other: &BerkPoint) -> Result<bool> {
        match (self, other) {
            (BerkPoint::TypeI(a), BerkPoint::TypeI(b)) => Ok(a.exact_eq(b) == Some(true)),
            (
                BerkPoint::Ball { center: c1, s: s1 },
                BerkPoint::Ball { center: c2, s: s2 },
            ) => {
                if s1 != s2 {
                    return Ok(false);
                }
                Ok(center_distance(c1, c2)?.map_or(true, |v| Rational64::from_integer(v) >= *s1))
            }
            _ => Ok(false),
        }
    }
}

/// v(c1 - c2), None when the centers are exactly equal.
fn center_distance(c1: &FieldElement, c2: &FieldElement) -> Result<Option<i64>> {
    let d = c1.sub(c2)?;
    match d.valuation()? {
        Valuation::Finite(v) => Ok(Some(v)),
        Valuation::Infinite => Ok(None),
    }
}

/// Median of three pairwise distinct type I points: the center of the
/// tripod they span. With a point at infinity this is the join of the other
/// two; for three finite points it is the ball around the closest pair with
/// exponent the maximal pairwise valuation.
pub fn median(u: &P1Point, w: &P1Point, z: &P1Point) -> Result<BerkPoint> {
    let pts = [u, w, z];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if pts[i].exact_eq(pts[j]) == Some(true) {
                return Err(Error::NotDistinct);
            }
        }
    }
    let finite: Vec<&FieldElement> = pts
        .iter()
        .filter_map(|p| match p {
            P1Point::Finite(x) => Some(x),
            P1Point::Infinity => None,
        })
        .collect();
    match finite.len() {
        2 => {
            let v = center_distance(finite[0], finite[1])?.ok_or(Error::NotDistinct)?;
            Ok(BerkPoint::ball_int(finite[0].clone(), v))
        }
        3 => {
            let mut best: Option<(i64, usize)> = None;
            for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let v = center_distance(finite[i], finite[j])?.ok_or(Error::NotDistinct)?;
                if best.map_or(true, |(bv, _)| v > bv) {
                    best = Some((v, i));
                }
            }
            let (v, i) = best.unwrap();
            Ok(BerkPoint::ball_int(finite[i].clone(), v))
        }
        _ => Err(Error::NotDistinct), // two infinities
    }
}

/// The join x v y: the smallest ball containing both.
fn join(x: &BerkPoint, y: &BerkPoint) -> Result<Option<(Rational64,)>> {
    match (x, y) {
        (
            BerkPoint::Ball { center: c1, s: s1 },
            BerkPoint::Ball { center: c2, s: s2 },
        ) => {
            let mut s = (*s1).min(*s2);
            if let Some(v) = center_distance(c1, c2)? {
                s = s.min(Rational64::from_integer(v));
            }
            Ok(Some((s,)))
        }
        _ => Ok(None),
    }
}

/// A distance in the hyperbolic metric on type II/III points; type I points
/// are at infinite distance from everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Finite(Rational64),
    Infinite,
}

impl Dist {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }
}

pub fn dist(x: &BerkPoint, y: &BerkPoint) -> Result<Dist> {
    match (x, y) {
        (BerkPoint::TypeI(a), BerkPoint::TypeI(b)) => {
            if a.exact_eq(b) == Some(true) {
                Ok(Dist::Finite(Rational64::from_integer(0)))
            } else {
                Ok(Dist::Infinite)
            }
        }
        (BerkPoint::Ball { s: s1, .. }, BerkPoint::Ball { s: s2, .. }) => {
            let (sj,) = join(x, y)?.unwrap();
            Ok(Dist::Finite((*s1 - sj) + (*s2 - sj)))
        }
        _ => Ok(Dist::Infinite),
    }
}

/// Fractional-linear action on a classical point.
pub fn mobius_point(g: &ProjMatrix, p: &P1Point) -> Result<P1Point> {
    if g.dim() != 2 {
        return Err(Error::Dimension("mobius action needs d = 2".into()));
    }
    let (a, b, c, d) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    match p {
        P1Point::Infinity => {
            if c.is_exact_zero() {
                Ok(P1Point::Infinity)
            } else {
                Ok(P1Point::Finite(a.div(c)?))
            }
        }
        P1Point::Finite(z) => {
            let den = c.mul(z)?.add(d)?;
            if den.is_exact_zero() {
                return Ok(P1Point::Infinity);
            }
            Ok(P1Point::Finite(a.mul(z)?.add(b)?.div(&den)?))
        }
    }
}

/// Mobius image of a ball via the affine/inversion decomposition. Exact
/// case analysis; used for type III points and as the oracle against the
/// median-based route.
pub fn mobius_ball_decomposed(
    g: &ProjMatrix,
    center: &FieldElement,
    s: Rational64,
) -> Result<BerkPoint> {
    let model = g.model();
    let (a, b, c, d) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    if c.is_exact_zero() {
        // affine map z -> (a/d) z + b/d scales diameters by |a/d|
        let scale = a.div(d)?;
        let new_center = scale.mul(center)?.add(&b.div(d)?)?;
        let vs = scale.finite_valuation()?;
        return Ok(BerkPoint::Ball {
            center: new_center,
            s: s + Rational64::from_integer(vs),
        });
    }
    // (az+b)/(cz+d) = a/c - det/(c^2 (z + d/c))
    let shift_center = center.add(&d.div(c)?)?;
    // inversion w -> 1/w of the shifted ball
    let (inv_center, inv_s) = {
        let contains_zero = match shift_center.valuation()? {
            Valuation::Infinite => true,
            Valuation::Finite(v) => Rational64::from_integer(v) >= s,
        };
        if contains_zero {
            (FieldElement::zero(model), -s)
        } else {
            let v = shift_center.finite_valuation()?;
            (
                shift_center.inv()?,
                s - Rational64::from_integer(2 * v),
            )
        }
    };
    let neg_det_over_c2 = g.det()?.neg().div(&c.mul(c)?)?;
    let vb = neg_det_over_c2.finite_valuation()?;
    let new_center = neg_det_over_c2.mul(&inv_center)?.add(&a.div(c)?)?;
    Ok(BerkPoint::Ball {
        center: new_center,
        s: inv_s + Rational64::from_integer(vb),
    })
}

/// The Mobius action on the tree. Type I points map pointwise; type II
/// balls are replaced by a spanning triple (center, center + pi^s,
/// infinity) whose pointwise images are re-medianized — Mobius maps are
/// tree automorphisms, so they commute with medians. Type III exponents
/// have no pi^s in the field and take the decomposition route.
pub fn mobius_act(g: &ProjMatrix, x: &BerkPoint) -> Result<BerkPoint> {
    match x {
        BerkPoint::TypeI(p) => Ok(BerkPoint::TypeI(mobius_point(g, p)?)),
        BerkPoint::Ball { center, s } => {
            if s.is_integer() {
                let model = g.model();
                let edge = center.add(&FieldElement::uniformizer_pow(model, s.to_integer()))?;
                let triple = [
                    P1Point::Finite(center.clone()),
                    P1Point::Finite(edge),
                    P1Point::Infinity,
                ];
                let images: Vec<P1Point> = triple
                    .iter()
                    .map(|p| mobius_point(g, p))
                    .collect::<Result<Vec<_>>>()?;
                median(&images[0], &images[1], &images[2])
            } else {
                mobius_ball_decomposed(g, center, *s)
            }
        }
    }
}

/// Retraction of P^1(k) minus {0, infinity} onto the axis: alpha lands on
/// Ball(0, v(alpha)).
pub fn project_to_axis(alpha: &P1Point) -> Result<BerkPoint> {
    match alpha {
        P1Point::Infinity => Err(Error::OnAxisEndpoint),
        P1Point::Finite(z) => match z.valuation()? {
            Valuation::Infinite => Err(Error::OnAxisEndpoint),
            Valuation::Finite(v) => Ok(BerkPoint::ball_int(FieldElement::zero(z.model()), v)),
        },
    }
}

/// Axis distance of the projections of a and b, against the cross-ratio
/// valuation log_v |[infinity, 0; a, b]|; the two must agree (an identity
/// fact, returned side by side rather than assumed).
pub fn axis_distance_vs_crossratio(a: &FieldElement, b: &FieldElement) -> Result<(i64, i64)> {
    let va = a.finite_valuation()?;
    let vb = b.finite_valuation()?;
    if va <= vb {
        return Err(Error::Order);
    }
    let pa = project_to_axis(&P1Point::Finite(a.clone()))?;
    let pb = project_to_axis(&P1Point::Finite(b.clone()))?;
    let d = dist(&pa, &pb)?
        .finite()
        .ok_or(Error::Order)?;
    debug_assert!(d.is_integer());
    // [infinity, 0; a, b] = b/a, so the valuation term is v(a) - v(b)
    Ok((d.to_integer(), va - vb))
}

/// The d = 2 geometric verifier: for each boundary, conjugate so the axis
/// of the boundary image is [0, infinity], push every double-coset pair of
/// fixed points through the conjugation, project to the axis, and sum the
/// signed interval measures. Produces the same report shape (and, per
/// coset, the same values) as the algebraic verifier.
pub fn geometric_verify(rep: &Representation) -> Result<IdentityReport> {
    if rep.d != 2 {
        return Err(Error::Dimension("geometric_verify needs d = 2".into()));
    }
    let m = rep.boundary.count();
    for j in 1..=m {
        if classify_pgl2(&rep.boundary_image(j)?)? != Pgl2Class::Hyperbolic {
            return Err(Error::NotHyperbolic);
        }
    }
    let lhs_value = lhs(rep)?;
    // normalizing matrices: inverse (adjugate) of [attracting | repelling]
    let mut frames: Vec<[[FieldElement; 2]; 2]> = Vec::with_capacity(m);
    let mut fixed: Vec<(ProjPoint, ProjPoint)> = Vec::with_capacity(m);
    for j in 1..=m {
        let ed = eigen_data(&rep.boundary_image(j)?)?;
        let att = &ed.attracting_point.coords;
        let rpp = &ed.repelling_point.coords;
        frames.push([
            [rpp[1].clone(), rpp[0].neg()],
            [att[1].neg(), att[0].clone()],
        ]);
        fixed.push((ed.attracting_point.clone(), ed.repelling_point.clone()));
    }
    let mut tasks: Vec<(usize, usize, Word)> = Vec::new();
    for j in 1..=m {
        for q in 1..=m {
            for len in 0..=rep.cutoff {
                for w in cosets_of_length(&rep.boundary, j, q, len) {
                    tasks.push((j, q, w));
                }
            }
        }
    }
    let axis_val = |f: &[[FieldElement; 2]; 2], p: &ProjPoint| -> Result<i64> {
        let u0 = f[0][0].mul(&p.coords[0])?.add(&f[0][1].mul(&p.coords[1])?)?;
        let u1 = f[1][0].mul(&p.coords[0])?.add(&f[1][1].mul(&p.coords[1])?)?;
        Ok(u0.finite_valuation()? - u1.finite_valuation()?)
    };
    let eval = |(j, q, w): (usize, usize, Word)| -> Result<(usize, usize, Word, i64)> {
        let g = rep.word_image(&w)?;
        let beta_plus = g.apply(&fixed[q - 1].0)?;
        let beta_minus = g.apply(&fixed[q - 1].1)?;
        let f = &frames[j - 1];
        // signed measure of the interval between the two axis projections
        let v = axis_val(f, &beta_plus)? - axis_val(f, &beta_minus)?;
        Ok((j, q, w, v))
    };
    let results = par::map_collect(tasks, eval);
    let evaluated = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(lhs_value, evaluated, rep.cutoff, rep.window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn q3() -> FieldModel {
        FieldModel::qp(3).unwrap()
    }

    fn fe(m: FieldModel, n: i64) -> FieldElement {
        FieldElement::from_integer(m, n)
    }

    #[test]
    fn median_examples() {
        let m = q3();
        let med = median(
            &P1Point::Finite(fe(m, 0)),
            &P1Point::Finite(fe(m, 1)),
            &P1Point::Infinity,
        )
        .unwrap();
        assert!(med.eq_point(&BerkPoint::gauss(m)).unwrap());
        let med = median(
            &P1Point::Finite(fe(m, 0)),
            &P1Point::Finite(fe(m, 1)),
            &P1Point::Finite(fe(m, 3)),
        )
        .unwrap();
        assert!(med.eq_point(&BerkPoint::ball_int(fe(m, 0), 1)).unwrap());
        let med = median(
            &P1Point::Finite(fe(m, 0)),
            &P1Point::Finite(fe(m, 9)),
            &P1Point::Infinity,
        )
        .unwrap();
        assert!(med.eq_point(&BerkPoint::ball_int(fe(m, 0), 2)).unwrap());
        assert!(matches!(
            median(
                &P1Point::Finite(fe(m, 1)),
                &P1Point::Finite(fe(m, 1)),
                &P1Point::Infinity
            ),
            Err(Error::NotDistinct)
        ));
    }

    #[test]
    fn dist_examples() {
        let m = q3();
        let gauss = BerkPoint::gauss(m);
        assert_eq!(
            dist(&gauss, &gauss).unwrap(),
            Dist::Finite(Rational64::from_integer(0))
        );
        assert_eq!(
            dist(&gauss, &BerkPoint::ball_int(fe(m, 0), 2)).unwrap(),
            Dist::Finite(Rational64::from_integer(2))
        );
        assert_eq!(
            dist(
                &BerkPoint::ball_int(fe(m, 0), 1),
                &BerkPoint::ball_int(fe(m, 1), 1)
            )
            .unwrap(),
            Dist::Finite(Rational64::from_integer(2))
        );
        assert_eq!(
            dist(&gauss, &BerkPoint::TypeI(P1Point::Infinity)).unwrap(),
            Dist::Infinite
        );
    }

    #[test]
    fn mobius_examples() {
        let m = q3();
        let scale3 = ProjMatrix::from_integers(m, &[&[3, 0], &[0, 1]]).unwrap();
        let img = mobius_act(&scale3, &BerkPoint::gauss(m)).unwrap();
        assert!(img.eq_point(&BerkPoint::ball_int(fe(m, 0), 1)).unwrap());
        let invz = ProjMatrix::from_integers(m, &[&[0, 1], &[1, 0]]).unwrap();
        let img = mobius_act(&invz, &BerkPoint::ball_int(fe(m, 0), 2)).unwrap();
        assert!(img.eq_point(&BerkPoint::ball_int(fe(m, 0), -2)).unwrap());
        let id = ProjMatrix::identity(m, 2);
        let x = BerkPoint::ball_int(fe(m, 7), 3);
        assert!(mobius_act(&id, &x).unwrap().eq_point(&x).unwrap());
    }

    #[test]
    fn mobius_triple_vs_decomposition() {
        // median route against the exact ball case analysis, type II points
        let m = q3();
        let mats = [
            ProjMatrix::from_integers(m, &[&[3, 1], &[2, 5]]).unwrap(),
            ProjMatrix::from_integers(m, &[&[0, 1], &[1, 0]]).unwrap(),
            ProjMatrix::from_integers(m, &[&[1, -4], &[2, -5]]).unwrap(),
        ];
        for g in &mats {
            for (c, s) in [(0i64, 0i64), (1, 2), (9, -1), (5, 1), (-3, 2)] {
                let ball = BerkPoint::ball_int(fe(m, c), s);
                let via_median = mobius_act(g, &ball).unwrap();
                let via_cases =
                    mobius_ball_decomposed(g, &fe(m, c), Rational64::from_integer(s)).unwrap();
                assert!(via_median.eq_point(&via_cases).unwrap(), "g disagreement");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let m = q3();
        let p = project_to_axis(&P1Point::Finite(fe(m, 9))).unwrap();
        assert!(p.eq_point(&BerkPoint::ball_int(fe(m, 0), 2)).unwrap());
        let p = project_to_axis(&P1Point::Finite(fe(m, 1))).unwrap();
        assert!(p.eq_point(&BerkPoint::gauss(m)).unwrap());
        let m2 = FieldModel::qp(2).unwrap();
        let x = FieldElement::ratio(m2, 3, 4).unwrap();
        let p = project_to_axis(&P1Point::Finite(x)).unwrap();
        assert!(p
            .eq_point(&BerkPoint::ball_int(FieldElement::zero(m2), -2))
            .unwrap());
        assert!(matches!(
            project_to_axis(&P1Point::Infinity),
            Err(Error::OnAxisEndpoint)
        ));
        assert!(matches!(
            project_to_axis(&P1Point::Finite(fe(m, 0))),
            Err(Error::OnAxisEndpoint)
        ));
    }

    #[test]
    fn axis_distance_examples() {
        let m = q3();
        assert_eq!(
            axis_distance_vs_crossratio(&fe(m, 3), &fe(m, 1)).unwrap(),
            (1, 1)
        );
        let third = FieldElement::ratio(m, 1, 3).unwrap();
        assert_eq!(
            axis_distance_vs_crossratio(&fe(m, 9), &third).unwrap(),
            (3, 3)
        );
        let m2 = FieldModel::qp(2).unwrap();
        assert!(matches!(
            axis_distance_vs_crossratio(&fe(m2, 2), &fe(m2, 2)),
            Err(Error::Order)
        ));
    }

    #[test]
    fn geometric_matches_algebraic_on_ex51() {
        let mut rep = crate::presets::ex51().unwrap();
        rep.cutoff = 5;
        let geo = geometric_verify(&rep).unwrap();
        let alg = crate::identity::verify(&rep).unwrap();
        assert_eq!(geo.lhs, alg.lhs);
        assert_eq!(geo.rhs, alg.rhs);
        assert_eq!(geo.terms.len(), alg.terms.len());
        for (g, a) in geo.terms.iter().zip(&alg.terms) {
            assert_eq!((g.j, g.q, &g.w, g.value), (a.j, a.q, &a.w, a.value));
        }
    }

    #[test]
    fn geometric_rejects_parabolic_boundary() {
        // boundary image of this pair is parabolic (trace^2 = 4 det)
        let m = q3();
        let a = ProjMatrix::from_integers(m, &[&[1, 1], &[0, 1]]).unwrap();
        let b = ProjMatrix::from_integers(m, &[&[1, 0], &[1, 1]]).unwrap();
        let surface = crate::words::SurfaceType::new(1, 1).unwrap();
        let rep = Representation::new(m, surface, vec![a, b]).unwrap();
        let res = geometric_verify(&rep);
        assert!(matches!(res, Err(Error::NotHyperbolic)) || res.is_err());
    }
}
