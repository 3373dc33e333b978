//! Projective matrices over the valued field: classification, eigen-data of
//! biproximal elements, the cross ratio and its valuation, translation
//! length, invariant-factor (Cartan) valuations, and the Veronese embedding.
//!
//! Everything here is scaling-invariant: a matrix stands for its class in
//! PGL(d, k), and points/dual points are homogeneous.

use crate::error::{Error, Result};
use crate::field::newton::{hensel_root, newton_polygon};
use crate::field::{FieldElement, FieldModel, Valuation};
use crate::words::{reduced_words_of_length, Word};

// ---------------------------------------------------------------------------
// matrices

/// A d x d matrix with exact entries and nonzero determinant, considered up
/// to scalars.
#[derive(Debug, Clone)]
pub struct ProjMatrix {
    model: FieldModel,
    d: usize,
    rows: Vec<Vec<FieldElement>>,
}

impl ProjMatrix {
    pub fn new(model: FieldModel, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let d = rows.len();
        if d < 2 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("expected square matrix, d >= 2".into()));
        }
        for r in &rows {
            for e in r {
                if e.model() != model {
                    return Err(Error::ModelMismatch);
                }
                if !e.is_exact() {
                    return Err(Error::Invalid("matrix entries must be exact".into()));
                }
            }
        }
        let m = ProjMatrix { model, d, rows };
        if m.det()?.is_exact_zero() {
            return Err(Error::Singular);
        }
        Ok(m)
    }

    pub fn from_integers(model: FieldModel, rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| FieldElement::from_integer(model, x))
                    .collect()
            })
            .collect();
        ProjMatrix::new(model, rows)
    }

    pub fn identity(model: FieldModel, d: usize) -> Self {
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            FieldElement::one(model)
                        } else {
                            FieldElement::zero(model)
                        }
                    })
                    .collect()
            })
            .collect();
        ProjMatrix { model, d, rows }
    }

    pub fn model(&self) -> FieldModel {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn mul(&self, other: &ProjMatrix) -> Result<ProjMatrix> {
        if self.d != other.d || self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let d = self.d;
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut acc = FieldElement::zero(self.model);
                for l in 0..d {
                    acc = acc.add(&self.rows[i][l].mul(&other.rows[l][j])?)?;
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(ProjMatrix {
            model: self.model,
            d,
            rows,
        })
    }

    pub fn transpose(&self) -> ProjMatrix {
        let d = self.d;
        let rows = (0..d)
            .map(|i| (0..d).map(|j| self.rows[j][i].clone()).collect())
            .collect();
        ProjMatrix {
            model: self.model,
            d,
            rows,
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Result<ProjMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.mul(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjMatrix {
            model: self.model,
            d: self.d,
            rows,
        })
    }

    pub fn det(&self) -> Result<FieldElement> {
        mat_det(self.model, &self.rows)
    }

    pub fn trace(&self) -> Result<FieldElement> {
        let mut acc = FieldElement::zero(self.model);
        for i in 0..self.d {
            acc = acc.add(&self.rows[i][i])?;
        }
        Ok(acc)
    }

    /// The projective inverse: the adjugate (no division, entries stay exact).
    pub fn inverse_projective(&self) -> Result<ProjMatrix> {
        let rows = mat_adjugate(self.model, &self.rows)?;
        Ok(ProjMatrix {
            model: self.model,
            d: self.d,
            rows,
        })
    }

    /// True iff the matrix is a scalar multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                if i != j && !self.rows[i][j].is_exact_zero() {
                    return false;
                }
            }
        }
        (1..d).all(|i| self.rows[i][i].exact_eq(&self.rows[0][0]) == Some(true))
    }

    /// Characteristic polynomial det(x I - M), constant coefficient first.
    pub fn char_poly(&self) -> Result<Vec<FieldElement>> {
        let m = self.model;
        let d = self.d;
        // matrix over the polynomial ring k[x], entries constant-first
        let entries: Vec<Vec<Vec<FieldElement>>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let c = self.rows[i][j].neg();
                        let lead = if i == j {
                            FieldElement::one(m)
                        } else {
                            FieldElement::zero(m)
                        };
                        vec![c, lead]
                    })
                    .collect()
            })
            .collect();
        let mut p = poly_det(m, &entries)?;
        p.resize(d + 1, FieldElement::zero(m));
        Ok(p)
    }

    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint> {
        if p.coords.len() != self.d {
            return Err(Error::Dimension("point/matrix dimension mismatch".into()));
        }
        let mut coords = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut acc = FieldElement::zero(self.model);
            for j in 0..self.d {
                acc = acc.add(&self.rows[i][j].mul(&p.coords[j])?)?;
            }
            coords.push(acc);
        }
        Ok(ProjPoint { coords })
    }

    /// Action on dual points: phi goes to phi composed with the inverse,
    /// realized projectively by the transposed adjugate.
    pub fn apply_dual(&self, phi: &DualPoint) -> Result<DualPoint> {
        let adj = self.inverse_projective()?;
        let p = adj.transpose().apply(&ProjPoint {
            coords: phi.coords.clone(),
        })?;
        Ok(DualPoint { coords: p.coords })
    }

    /// Image of a word under the assignment generator i -> images[i]
    /// (projective inverses via adjugates keep entries exact).
    pub fn word_image(images: &[ProjMatrix], w: &Word) -> Result<ProjMatrix> {
        let model = images[0].model;
        let d = images[0].d;
        let mut acc = ProjMatrix::identity(model, d);
        for l in w.letters() {
            let g = &images[l.generator()];
            let g = if l.is_inverse() {
                g.inverse_projective()?
            } else {
                g.clone()
            };
            acc = acc.mul(&g)?;
        }
        Ok(acc)
    }
}

fn mat_minor(m: &[Vec<FieldElement>], i: usize, j: usize) -> Vec<Vec<FieldElement>> {
    m.iter()
        .enumerate()
        .filter(|(r, _)| *r != i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(c, _)| *c != j)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Cofactor-expansion determinant; fine for the small d used here.
pub(crate) fn mat_det(model: FieldModel, m: &[Vec<FieldElement>]) -> Result<FieldElement> {
    let d = m.len();
    if d == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = FieldElement::zero(model);
    for j in 0..d {
        if m[0][j].is_exact_zero() {
            continue;
        }
        let sub = mat_det(model, &mat_minor(m, 0, j))?;
        let term = m[0][j].mul(&sub)?;
        acc = if j % 2 == 0 {
            acc.add(&term)?
        } else {
            acc.sub(&term)?
        };
    }
    Ok(acc)
}

/// Adjugate matrix: adj(M) M = det(M) I; columns of adj(M - lambda I) span
/// the lambda-eigenspace when lambda is a simple eigenvalue.
pub(crate) fn mat_adjugate(
    model: FieldModel,
    m: &[Vec<FieldElement>],
) -> Result<Vec<Vec<FieldElement>>> {
    let d = m.len();
    let mut out = vec![vec![FieldElement::zero(model); d]; d];
    for i in 0..d {
        for j in 0..d {
            let c = mat_det(model, &mat_minor(m, i, j))?;
            out[j][i] = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    Ok(out)
}

// polynomial helpers over FieldElement, constant coefficient first
fn poly_add(model: FieldModel, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let n = a.len().max(b.len());
    let zero = FieldElement::zero(model);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).unwrap_or(&zero).add(b.get(i).unwrap_or(&zero))?);
    }
    Ok(out)
}

fn poly_mul(model: FieldModel, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let mut out = vec![FieldElement::zero(model); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y)?)?;
        }
    }
    Ok(out)
}

fn poly_det(model: FieldModel, m: &[Vec<Vec<FieldElement>>]) -> Result<Vec<FieldElement>> {
    let d = m.len();
    if d == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = vec![FieldElement::zero(model)];
    for j in 0..d {
        let minor: Vec<Vec<Vec<FieldElement>>> = m
            .iter()
            .skip(1)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let sub = poly_det(model, &minor)?;
        let mut term = poly_mul(model, &m[0][j], &sub)?;
        if j % 2 == 1 {
            for c in &mut term {
                *c = c.neg();
            }
        }
        acc = poly_add(model, &acc, &term)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// points

/// A point of P(k^d) in homogeneous coordinates (exact or refinable).
#[derive(Debug, Clone)]
pub struct ProjPoint {
    pub coords: Vec<FieldElement>,
}

/// A point of the dual projective space: a hyperplane, as a linear form.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub coords: Vec<FieldElement>,
}

impl ProjPoint {
    pub fn new(coords: Vec<FieldElement>) -> ProjPoint {
        ProjPoint { coords }
    }

    /// The point z of P^1 viewed as [z : 1].
    pub fn from_p1(z: &FieldElement) -> ProjPoint {
        ProjPoint {
            coords: vec![z.clone(), FieldElement::one(z.model())],
        }
    }

    pub fn infinity(model: FieldModel) -> ProjPoint {
        ProjPoint {
            coords: vec![FieldElement::one(model), FieldElement::zero(model)],
        }
    }
}

impl DualPoint {
    pub fn new(coords: Vec<FieldElement>) -> DualPoint {
        DualPoint { coords }
    }

    /// For d = 2: the linear form vanishing at the point z of P^1.
    pub fn annihilator_p1(z: &ProjPoint) -> DualPoint {
        DualPoint {
            coords: vec![z.coords[1].clone(), z.coords[0].neg()],
        }
    }
}

/// The natural pairing sum phi_i omega_i, well defined up to scalars.
pub fn pairing(phi: &DualPoint, omega: &ProjPoint) -> Result<FieldElement> {
    if phi.coords.len() != omega.coords.len() {
        return Err(Error::Dimension("pairing dimension mismatch".into()));
    }
    let model = phi.coords[0].model();
    let mut acc = FieldElement::zero(model);
    for (a, b) in phi.coords.iter().zip(&omega.coords) {
        acc = acc.add(&a.mul(b)?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// classification and eigen-data

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pgl2Class {
    Hyperbolic,
    Parabolic,
    StrictlyElliptic,
    Identity,
}

/// Scaling-invariant classification of an element of PGL(2, k).
pub fn classify_pgl2(m: &ProjMatrix) -> Result<Pgl2Class> {
    if m.dim() != 2 {
        return Err(Error::Dimension("classify_pgl2 needs d = 2".into()));
    }
    if m.is_scalar() {
        return Ok(Pgl2Class::Identity);
    }
    let tr = m.trace()?;
    let det = m.det()?;
    let tr2 = tr.mul(&tr)?;
    let vdet = det.finite_valuation()?;
    let hyper = match tr2.valuation()? {
        Valuation::Finite(v) => v < vdet,
        Valuation::Infinite => false,
    };
    if hyper {
        return Ok(Pgl2Class::Hyperbolic);
    }
    let disc = tr2.sub(&det.mul(&FieldElement::from_integer(m.model(), 4))?)?;
    if disc.is_exact_zero() {
        Ok(Pgl2Class::Parabolic)
    } else {
        Ok(Pgl2Class::StrictlyElliptic)
    }
}

/// Fixed-point data of a biproximal projective transformation.
///
/// The attracting point is the eigenline of the eigenvalue of minimal
/// valuation (maximal absolute value). The attracting hyperplane is the
/// span of the top d-1 eigenspaces, i.e. the annihilator realized as the
/// left eigenvector of the eigenvalue of maximal valuation; it contains the
/// attracting point. (Dually for the repelling data.)
#[derive(Debug, Clone)]
pub struct EigenData {
    pub attracting_point: ProjPoint,
    pub repelling_point: ProjPoint,
    pub attracting_hyperplane: DualPoint,
    pub repelling_hyperplane: DualPoint,
    /// Valuation of the attracting (top) eigenvalue.
    pub top_valuation: i64,
    /// Valuation of the repelling (bottom) eigenvalue.
    pub bottom_valuation: i64,
}

/// Pick a provably nonzero column of a matrix with possibly refinable
/// entries, escalating the precision probe instead of spending the full
/// budget on columns that happen to vanish.
fn nonzero_column(model: FieldModel, m: &[Vec<FieldElement>]) -> Result<Vec<FieldElement>> {
    let d = m.len();
    let mut cap = 64u32;
    loop {
        let cap_eff = cap.min(model.precision_cap);
        for j in 0..d {
            for i in 0..d {
                if let Ok(Valuation::Finite(_)) = m[i][j].valuation_capped(cap_eff) {
                    return Ok((0..d).map(|i| m[i][j].clone()).collect());
                }
            }
        }
        if cap_eff == model.precision_cap {
            return Err(Error::PrecisionExhausted(cap_eff));
        }
        cap = cap.saturating_mul(8);
    }
}

fn eigenvector(model: FieldModel, m: &ProjMatrix, lambda: &FieldElement) -> Result<Vec<FieldElement>> {
    let d = m.dim();
    let mut shifted: Vec<Vec<FieldElement>> = m.rows().to_vec();
    for i in 0..d {
        shifted[i][i] = shifted[i][i].sub(lambda)?;
    }
    let adj = mat_adjugate(model, &shifted)?;
    nonzero_column(model, &adj)
}

pub fn eigen_data(m: &ProjMatrix) -> Result<EigenData> {
    let model = m.model();
    let cp = m.char_poly()?;
    let np = newton_polygon(&cp)?;
    if !np.extremes_are_simple() {
        return Err(Error::NotBiproximal);
    }
    let top_valuation = np.min_root_valuation().ok_or(Error::NotBiproximal)?;
    let bottom_valuation = np.max_root_valuation().ok_or(Error::NotBiproximal)?;
    let lam_top = hensel_root(model, &cp, top_valuation)?;
    let lam_bot = hensel_root(model, &cp, bottom_valuation)?;
    let mt = m.transpose();
    Ok(EigenData {
        attracting_point: ProjPoint::new(eigenvector(model, m, &lam_top)?),
        repelling_point: ProjPoint::new(eigenvector(model, m, &lam_bot)?),
        attracting_hyperplane: DualPoint::new(eigenvector(model, &mt, &lam_bot)?),
        repelling_hyperplane: DualPoint::new(eigenvector(model, &mt, &lam_top)?),
        top_valuation,
        bottom_valuation,
    })
}

// ---------------------------------------------------------------------------
// cross ratio

/// The cross ratio C(phi, phi2; omega, omega2) =
/// phi(omega) phi2(omega2) / (phi(omega2) phi2(omega)), independent of the
/// choice of lifts.
pub fn cross_ratio(
    phi: &DualPoint,
    phi2: &DualPoint,
    omega: &ProjPoint,
    omega2: &ProjPoint,
) -> Result<FieldElement> {
    let den1 = pairing(phi, omega2)?;
    let den2 = pairing(phi2, omega)?;
    if den1.is_exact_zero() {
        return Err(Error::DegeneratePairing("phi(omega2) = 0".into()));
    }
    if den2.is_exact_zero() {
        return Err(Error::DegeneratePairing("phi2(omega) = 0".into()));
    }
    let num = pairing(phi, omega)?.mul(&pairing(phi2, omega2)?)?;
    num.div(&den1.mul(&den2)?)
}

/// log_v |C| = -v(C), evaluated without resolving C past its valuation.
pub fn cross_ratio_valuation(
    phi: &DualPoint,
    phi2: &DualPoint,
    omega: &ProjPoint,
    omega2: &ProjPoint,
) -> Result<i64> {
    let mut vals = [0i64; 4];
    for (slot, (f, w, label)) in [
        (phi, omega, "phi(omega)"),
        (phi2, omega2, "phi2(omega2)"),
        (phi, omega2, "phi(omega2)"),
        (phi2, omega, "phi2(omega)"),
    ]
    .iter()
    .enumerate()
    {
        let p = pairing(f, w)?;
        if p.is_exact_zero() {
            return Err(Error::DegeneratePairing((*label).into()));
        }
        vals[slot] = p.finite_valuation()?;
    }
    // -v(C) with C as in cross_ratio
    Ok(vals[2] + vals[3] - vals[0] - vals[1])
}

// ---------------------------------------------------------------------------
// lengths

/// log_v |lambda_1 / lambda_d|: difference of the extreme Newton-polygon
/// slopes of the characteristic polynomial. Purely combinatorial - no
/// eigenvectors are computed, and biproximality is not required.
pub fn translation_length(m: &ProjMatrix) -> Result<i64> {
    let cp = m.char_poly()?;
    let np = newton_polygon(&cp)?;
    if np.ord != 0 {
        return Err(Error::Singular);
    }
    let v = &np.vertices;
    if v.len() < 2 {
        return Ok(0);
    }
    let (first, last) = (
        (v[0], v[1]),
        (v[v.len() - 2], v[v.len() - 1]),
    );
    // slopes as exact fractions; the difference of extreme root valuations
    // is slope_last - slope_first
    let num = (last.1 .1 - last.0 .1) as i128 * (first.1 .0 - first.0 .0) as i128
        - (first.1 .1 - first.0 .1) as i128 * (last.1 .0 - last.0 .0) as i128;
    let den = (first.1 .0 - first.0 .0) as i128 * (last.1 .0 - last.0 .0) as i128;
    if num % den != 0 {
        return Err(Error::Invalid(
            "non-integral extreme eigenvalue valuations".into(),
        ));
    }
    Ok((num / den) as i64)
}

/// The period P(gamma) = log_v |C(gamma+, gamma-; x, gamma x)|; equals the
/// translation length for every admissible x (tested invariant).
pub fn period(m: &ProjMatrix, omega: &ProjPoint) -> Result<i64> {
    if m.is_scalar() {
        return Ok(0);
    }
    let ed = eigen_data(m)?;
    let gx = m.apply(omega)?;
    cross_ratio_valuation(
        &ed.attracting_hyperplane,
        &ed.repelling_hyperplane,
        omega,
        &gx,
    )
}

// ---------------------------------------------------------------------------
// Cartan (invariant-factor) valuations

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanValuations {
    /// Sorted v_1 <= ... <= v_d; sigma_i = q^{-v_i} are the semi-homothecy
    /// ratios.
    pub vals: Vec<i64>,
}

fn min_entry_valuation(m: &ProjMatrix) -> Result<i64> {
    let mut best: Option<i64> = None;
    for row in m.rows() {
        for e in row {
            if let Valuation::Finite(v) = e.valuation()? {
                best = Some(match best {
                    Some(b) => b.min(v),
                    None => v,
                });
            }
        }
    }
    best.ok_or(Error::Singular)
}

/// Invariant-factor valuations over the valuation ring, by valuation-pivot
/// elimination, without the min-entry normalization.
pub fn cartan_valuations_raw(m: &ProjMatrix) -> Result<CartanValuations> {
    let d = m.dim();
    let mut a: Vec<Vec<FieldElement>> = m.rows().to_vec();
    let mut vals = Vec::with_capacity(d);
    for k in 0..d {
        // pivot: minimal-valuation entry of the trailing submatrix
        let mut pivot: Option<(usize, usize, i64)> = None;
        for i in k..d {
            for j in k..d {
                if let Valuation::Finite(v) = a[i][j].valuation()? {
                    if pivot.map_or(true, |(_, _, pv)| v < pv) {
                        pivot = Some((i, j, v));
                    }
                }
            }
        }
        let (pi, pj, pv) = pivot.ok_or(Error::Singular)?;
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let pe = a[k][k].clone();
        for i in (k + 1)..d {
            // quotient is integral because the pivot valuation is minimal
            let f = a[i][k].div(&pe)?;
            for j in k..d {
                let t = f.mul(&a[k][j])?;
                a[i][j] = a[i][j].sub(&t)?;
            }
        }
        for j in (k + 1)..d {
            let f = a[k][j].div(&pe)?;
            for i in k..d {
                let t = f.mul(&a[i][k])?;
                a[i][j] = a[i][j].sub(&t)?;
            }
        }
        vals.push(pv);
    }
    vals.sort_unstable();
    Ok(CartanValuations { vals })
}

/// Invariant-factor valuations after normalizing the minimal entry
/// valuation to zero, so the result is a projective invariant up to a
/// global shift convention.
pub fn cartan_valuations(m: &ProjMatrix) -> Result<CartanValuations> {
    let mu = min_entry_valuation(m)?;
    let scaled = m.scale(&FieldElement::uniformizer_pow(m.model(), -mu))?;
    cartan_valuations_raw(&scaled)
}

/// Minimum Cartan gap v_2 - v_1 over all reduced words of each length up to
/// max_len, for the generator images of a representation. Exponential decay
/// of sigma_2/sigma_1 = q^{-(v_2-v_1)} in the word length is the Anosov
/// property; a growing table is evidence, not proof.
pub fn anosov_gap_report(images: &[ProjMatrix], max_len: usize) -> Result<Vec<(usize, i64)>> {
    let rank = images.len();
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut min_gap: Option<i64> = None;
        for w in reduced_words_of_length(rank, len) {
            let g = ProjMatrix::word_image(images, &w)?;
            let cv = cartan_valuations(&g)?;
            let gap = cv.vals[1] - cv.vals[0];
            min_gap = Some(match min_gap {
                Some(b) => b.min(gap),
                None => gap,
            });
        }
        out.push((len, min_gap.unwrap_or(0)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Veronese embedding

fn binomial(n: usize, k: usize) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// The induced action of a 2x2 matrix [[a,b],[c,d]] on the homogeneous
/// polynomials of degree d_target - 1, in the basis x^{n-i} y^i: the basis
/// vector maps to (ax + by)^{n-i} (cx + dy)^i. This is the irreducible
/// representation of PGL(2) of dimension d_target, and a group homomorphism.
pub fn veronese(m: &ProjMatrix, d_target: usize) -> Result<ProjMatrix> {
    if m.dim() != 2 {
        return Err(Error::Dimension("veronese needs a 2x2 input".into()));
    }
    if d_target < 2 {
        return Err(Error::Dimension("veronese target dimension must be >= 2".into()));
    }
    let model = m.model();
    let n = d_target - 1;
    let (a, b, c, d) = (
        m.entry(0, 0),
        m.entry(0, 1),
        m.entry(1, 0),
        m.entry(1, 1),
    );
    let mut rows = vec![vec![FieldElement::zero(model); d_target]; d_target];
    for i in 0..=n {
        // expand (ax+by)^{n-i} (cx+dy)^i and store the x^{n-j} y^j
        // coefficient at (i, j): the transpose of the raw substitution
        // matrix, which is what makes the map a homomorphism and makes
        // the moment-curve point embedding equivariant
        for r in 0..=(n - i) {
            for s in 0..=i {
                let j = r + s;
                let coeff = binomial(n - i, r) * binomial(i, s);
                let term = FieldElement::from_integer(model, coeff)
                    .mul(&a.pow((n - i - r) as u32)?)?
                    .mul(&b.pow(r as u32)?)?
                    .mul(&c.pow((i - s) as u32)?)?
                    .mul(&d.pow(s as u32)?)?;
                rows[i][j] = rows[i][j].add(&term)?;
            }
        }
    }
    ProjMatrix::new(model, rows)
}

/// Moment-curve embedding of a point of P^1 into P^{d_target-1}:
/// [x : y] goes to [x^n : x^{n-1} y : ... : y^n]. Equivariant for veronese.
pub fn veronese_point(p: &ProjPoint, d_target: usize) -> Result<ProjPoint> {
    if p.coords.len() != 2 {
        return Err(Error::Dimension("veronese_point needs a P^1 point".into()));
    }
    let n = d_target - 1;
    let (x, y) = (&p.coords[0], &p.coords[1]);
    let mut coords = Vec::with_capacity(d_target);
    for i in 0..=n {
        coords.push(x.pow((n - i) as u32)?.mul(&y.pow(i as u32)?)?);
    }
    Ok(ProjPoint { coords })
}

/// Embedding of a dual point of P^1: the form ux + vy goes to the
/// hyperplane (ux + vy)^n, i.e. the osculating hyperplane of the Veronese
/// curve at the zero of the form. Pairing satisfies
/// <ver(phi), ver(p)> = phi(p)^n, which yields the cross-ratio power law.
pub fn veronese_dual(phi: &DualPoint, d_target: usize) -> Result<DualPoint> {
    if phi.coords.len() != 2 {
        return Err(Error::Dimension("veronese_dual needs a P^1 dual".into()));
    }
    let model = phi.coords[0].model();
    let n = d_target - 1;
    let (u, v) = (&phi.coords[0], &phi.coords[1]);
    let mut coords = Vec::with_capacity(d_target);
    for i in 0..=n {
        let c = FieldElement::from_integer(model, binomial(n, i));
        coords.push(c.mul(&u.pow((n - i) as u32)?)?.mul(&v.pow(i as u32)?)?);
    }
    Ok(DualPoint { coords })
}
