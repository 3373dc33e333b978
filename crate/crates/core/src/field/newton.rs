//! Newton polygons of polynomials over a valued field, and Hensel lifting
//! of the simple roots attached to lattice-length-one segments.
//!
//! For p(x) = sum c_i x^i the polygon is the lower convex hull of the points
//! (i, v(c_i)) over nonzero coefficients. A hull segment of slope s and
//! horizontal length L accounts for exactly L roots of valuation -s (in an
//! algebraic closure). A segment of horizontal length one therefore isolates
//! a single root whose valuation is an integer; after the substitution
//! lambda = pi^m mu that root reduces to a simple root of the residue
//! polynomial and lifts by Newton iteration to any requested precision.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldModel, ModelKind, Residue, Valuation};
use crate::field::fp::{inv_mod, FpPoly};

/// One segment of the lower hull, between two hull vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub left: (usize, i64),
    pub right: (usize, i64),
}

impl Segment {
    pub fn horizontal_len(&self) -> usize {
        self.right.0 - self.left.0
    }

    /// Valuation of the roots on this segment, when it is an integer.
    pub fn root_valuation(&self) -> Option<i64> {
        let dx = self.horizontal_len() as i64;
        let dy = self.left.1 - self.right.1; // minus the slope numerator
        if dy % dx == 0 {
            Some(dy / dx)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Hull vertices (i, v(c_i)), increasing in i.
    pub vertices: Vec<(usize, i64)>,
    /// Degree of the polynomial (index of the leading coefficient).
    pub degree: usize,
    /// Order of vanishing at 0 (index of the lowest nonzero coefficient).
    pub ord: usize,
}

impl NewtonPolygon {
    pub fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .map(|w| Segment {
                left: w[0],
                right: w[1],
            })
            .collect()
    }

    /// Root valuations with multiplicities, one entry per hull segment,
    /// steepest (largest valuation) first is NOT guaranteed; entries follow
    /// the hull left to right, so valuations are strictly decreasing.
    pub fn root_valuations(&self) -> Vec<(Segment, usize)> {
        self.segments()
            .into_iter()
            .map(|s| {
                let l = s.horizontal_len();
                (s, l)
            })
            .collect()
    }

    /// True when both extreme segments have horizontal length one, so the
    /// roots of maximal and minimal valuation are unique and simple. This is
    /// the polygon-side criterion for biproximality of a matrix applied to
    /// its characteristic polynomial.
    pub fn extremes_are_simple(&self) -> bool {
        if self.ord != 0 {
            return false;
        }
        let segs = self.segments();
        match segs.len() {
            0 => false,
            1 => segs[0].horizontal_len() == 1,
            _ => {
                segs.first().unwrap().horizontal_len() == 1
                    && segs.last().unwrap().horizontal_len() == 1
            }
        }
    }

    /// Valuation of the unique root of largest valuation, if simple.
    pub fn max_root_valuation(&self) -> Option<i64> {
        let segs = self.segments();
        let s = segs.first()?;
        if self.ord == 0 && s.horizontal_len() == 1 {
            s.root_valuation()
        } else {
            None
        }
    }

    /// Valuation of the unique root of smallest valuation, if simple.
    pub fn min_root_valuation(&self) -> Option<i64> {
        let segs = self.segments();
        let s = segs.last()?;
        if s.horizontal_len() == 1 {
            s.root_valuation()
        } else {
            None
        }
    }
}

/// Lower convex hull of (i, v(c_i)); coefficients are constant term first.
pub fn newton_polygon(coeffs: &[FieldElement]) -> Result<NewtonPolygon> {
    let mut pts: Vec<(usize, i64)> = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        match c.valuation()? {
            Valuation::Finite(v) => pts.push((i, v)),
            Valuation::Infinite => {}
        }
    }
    if pts.is_empty() {
        return Err(Error::ZeroPoly);
    }
    // Monotone-chain lower hull; points already sorted by i.
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // keep (x2,y2) only if it is strictly below the chord (x1,y1)-(x,y)
            let cross = (x2 as i128 - x1 as i128) * (y as i128 - y1 as i128)
                - (x as i128 - x1 as i128) * (y2 as i128 - y1 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    Ok(NewtonPolygon {
        vertices: hull,
        degree: pts.last().unwrap().0,
        ord: pts.first().unwrap().0,
    })
}

fn res_of_u64(model: FieldModel, c: u64) -> Residue {
    match model.kind {
        ModelKind::Qp => Residue::Int(BigInt::from(c)),
        ModelKind::Laurent => Residue::Poly(FpPoly::constant(model.p, c % model.p)),
    }
}

/// First pi-adic digit of a residue, as an element of F_p.
fn digit0(model: FieldModel, r: &Residue) -> u64 {
    match r {
        Residue::Int(v) => {
            use num_integer::Integer;
            use num_traits::ToPrimitive;
            v.mod_floor(&BigInt::from(model.p)).to_u64().unwrap()
        }
        Residue::Poly(v) => v.eval(0),
    }
}

/// Residue of x * pi^extra mod pi^n, requiring v(x) + extra >= 0.
fn integral_residue(x: &FieldElement, extra: i64, n: u32) -> Residue {
    let model = x.model();
    if x.is_exact_zero() {
        return match model.kind {
            ModelKind::Qp => Residue::Int(BigInt::from(0)),
            ModelKind::Laurent => Residue::Poly(FpPoly::zero(model.p)),
        };
    }
    let (shift, _) = x.shifted_residue(8);
    let k = shift + extra;
    if k >= 0 {
        let (_, r) = x.shifted_residue(n);
        model.res_shift_up(n, k as u32, &r)
    } else {
        let t = (-k) as u32;
        let (_, r) = x.shifted_residue(n + t);
        model.res_shift_down(t, &r)
    }
}

struct IntegralPoly {
    model: FieldModel,
    coeffs: Vec<(FieldElement, i64)>, // (c_i, extra shift making c_i * pi^extra integral)
}

impl IntegralPoly {
    fn eval(&self, n: u32, x: &Residue) -> Residue {
        let m = self.model;
        let mut acc = match m.kind {
            ModelKind::Qp => Residue::Int(BigInt::from(0)),
            ModelKind::Laurent => Residue::Poly(FpPoly::zero(m.p)),
        };
        for (c, extra) in self.coeffs.iter().rev() {
            acc = m.res_mul(n, &acc, x);
            acc = m.res_add(n, &acc, &integral_residue(c, *extra, n));
        }
        acc
    }

    fn eval_derivative(&self, n: u32, x: &Residue) -> Residue {
        let m = self.model;
        let mut acc = match m.kind {
            ModelKind::Qp => Residue::Int(BigInt::from(0)),
            ModelKind::Laurent => Residue::Poly(FpPoly::zero(m.p)),
        };
        for (i, (c, extra)) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = m.res_mul(n, &acc, x);
            let term = m.res_mul(n, &integral_residue(c, *extra, n), &res_of_u64(m, i as u64));
            acc = m.res_add(n, &acc, &term);
        }
        acc
    }
}

/// Extract the unique root of valuation m from a polynomial whose Newton
/// polygon has a horizontal-length-one segment supported at that slope.
/// The returned element is refinable to arbitrary precision.
pub fn hensel_root(model: FieldModel, coeffs: &[FieldElement], m: i64) -> Result<FieldElement> {
    // Substitute lambda = pi^m mu: b_i = c_i pi^{m i}; normalize so that
    // min v(b_i) = 0; the residue polynomial must then have a simple root
    // away from zero, namely the image of mu.
    let mut lifted: Vec<(FieldElement, i64)> = Vec::new();
    let mut minval: Option<i64> = None;
    for (i, c) in coeffs.iter().enumerate() {
        let extra = m * i as i64;
        if let Valuation::Finite(v) = c.valuation()? {
            let w = v + extra;
            minval = Some(match minval {
                Some(mv) => mv.min(w),
                None => w,
            });
        }
        lifted.push((c.clone(), extra));
    }
    let c0 = minval.ok_or(Error::ZeroPoly)?;
    let g = IntegralPoly {
        model,
        coeffs: lifted
            .into_iter()
            .map(|(c, extra)| (c, extra - c0))
            .collect(),
    };

    // Reduced polynomial mod pi, as an F_p polynomial in mu.
    let mut gbar: Vec<u64> = Vec::with_capacity(g.coeffs.len());
    for (c, extra) in &g.coeffs {
        if c.is_exact_zero() {
            gbar.push(0);
        } else {
            gbar.push(digit0(model, &integral_residue(c, *extra, 1)));
        }
    }
    // The supporting line of slope -m touches the hull on a length-one
    // segment exactly when gbar = x^{i0} (a + b x) with a, b nonzero.
    let nz: Vec<usize> = gbar
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i)
        .collect();
    if nz.len() != 2 || nz[1] != nz[0] + 1 {
        return Err(Error::NoSimpleSegment);
    }
    let (a, b) = (gbar[nz[0]], gbar[nz[1]]);
    let r0 = (model.p - a % model.p) % model.p * inv_mod(b, model.p) % model.p;
    debug_assert!(r0 != 0);

    // Newton iteration at each requested precision; the simple residue root
    // makes g'(r) a unit throughout, so precision doubles per step.
    let gen = std::sync::Arc::new(g);
    let seed = r0;
    let genc = gen.clone();
    Ok(FieldElement::refinable(
        model,
        m,
        Box::new(move |n| {
            let g = &*genc;
            let mut r = res_of_u64(model, seed);
            // 2 * ceil(log2 n) + 4 iterations is generous; bail early when
            // g(r) vanishes mod pi^n.
            let steps = 2 * (64 - (n as u64).leading_zeros()) + 4;
            for _ in 0..steps {
                let fx = g.eval(n, &r);
                if model.res_ord(&fx).is_none() {
                    break;
                }
                let dfx = g.eval_derivative(n, &r);
                let corr = model.res_mul(n, &fx, &model.res_inv(n, &dfx));
                r = model.res_add(n, &r, &model.res_neg(n, &corr));
            }
            debug_assert!(model.res_ord(&g.eval(n, &r)).is_none());
            r
        }),
    ))
}

/// The two extremal eigenroots (max valuation first, then min valuation) of
/// a polynomial whose polygon has simple extremes.
pub fn extremal_roots(
    model: FieldModel,
    coeffs: &[FieldElement],
) -> Result<(FieldElement, FieldElement)> {
    let np = newton_polygon(coeffs)?;
    if !np.extremes_are_simple() {
        return Err(Error::NoSimpleSegment);
    }
    let vmax = np.max_root_valuation().ok_or(Error::NoSimpleSegment)?;
    let vmin = np.min_root_valuation().ok_or(Error::NoSimpleSegment)?;
    let top = hensel_root(model, coeffs, vmax)?;
    let bot = hensel_root(model, coeffs, vmin)?;
    Ok((top, bot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Valuation;

    fn q3() -> FieldModel {
        FieldModel::qp(3).unwrap()
    }

    fn ints(m: FieldModel, cs: &[i64]) -> Vec<FieldElement> {
        cs.iter().map(|&c| FieldElement::from_integer(m, c)).collect()
    }

    #[test]
    fn polygon_of_quadratic() {
        // x^2 - 50x + 81 over Q_3: vertices (0,4), (1,0), (2,0)
        let m = q3();
        let np = newton_polygon(&ints(m, &[81, -50, 1])).unwrap();
        assert_eq!(np.vertices, vec![(0, 4), (1, 0), (2, 0)]);
        assert!(np.extremes_are_simple());
        assert_eq!(np.max_root_valuation(), Some(4));
        assert_eq!(np.min_root_valuation(), Some(0));
    }

    #[test]
    fn hensel_root_matches_factorization() {
        // (x - 3)(x - 1) = x^2 - 4x + 3 over Q_3
        let m = q3();
        let cs = ints(m, &[3, -4, 1]);
        let (top, bot) = extremal_roots(m, &cs).unwrap();
        assert_eq!(top.valuation().unwrap(), Valuation::Finite(1));
        assert_eq!(bot.valuation().unwrap(), Valuation::Finite(0));
        // top - 3 and bot - 1 are unresolvably small
        let d = top.sub(&FieldElement::from_integer(m, 3)).unwrap();
        assert!(d.valuation().is_err());
        let d = bot.sub(&FieldElement::from_integer(m, 1)).unwrap();
        assert!(d.valuation().is_err());
    }

    #[test]
    fn no_simple_segment() {
        // x^2 - 3: single segment of length 2 (root valuation 1/2)
        let m = q3();
        assert!(matches!(
            extremal_roots(m, &ints(m, &[-3, 0, 1])),
            Err(Error::NoSimpleSegment)
        ));
    }
}
