//! Built-in example representations: the once-punctured torus over Q_3 and
//! Q_2, and the Veronese lift of the first to PGL(3).

use crate::error::Result;
use crate::field::FieldModel;
use crate::identity::{veronese_lift, Representation};
use crate::linalg::ProjMatrix;
use crate::words::SurfaceType;

/// Once-punctured torus in PGL(2, Q_3): a acts as z -> 3z, paired with a
/// generic hyperbolic partner. Boundary length 4, four terms of +1.
pub fn ex51() -> Result<Representation> {
    let model = FieldModel::qp(3)?;
    let surface = SurfaceType::new(1, 1)?;
    let a = ProjMatrix::from_integers(model, &[&[3, 0], &[0, 1]])?;
    let b = ProjMatrix::from_integers(model, &[&[1, -4], &[2, -5]])?;
    Representation::new(model, surface, vec![a, b])
}

/// Once-punctured torus in PGL(2, Q_2). Boundary length 8; the identity's
/// right-hand side mixes positive and negative terms: {3,3,3,3,-1,-1,-1,-1}.
pub fn ex52() -> Result<Representation> {
    let model = FieldModel::qp(2)?;
    let surface = SurfaceType::new(1, 1)?;
    let a = ProjMatrix::from_integers(model, &[&[2, 0], &[0, 1]])?;
    let b = ProjMatrix::from_integers(model, &[&[5, -3], &[1, 1]])?;
    Representation::new(model, surface, vec![a, b])
}

/// The d = 3 irreducible (Veronese) lift of ex51; every term doubles.
pub fn veronese3() -> Result<Representation> {
    veronese_lift(&ex51()?, 3)
}

pub fn by_name(name: &str) -> Option<Result<Representation>> {
    match name {
        "ex51" => Some(ex51()),
        "ex52" => Some(ex52()),
        "veronese3" => Some(veronese3()),
        _ => None,
    }
}
