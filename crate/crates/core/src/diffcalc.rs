//! Differential operators of the de Rham and elasticity complexes.
//!
//! Index conventions, fixed once for the whole crate:
//!
//! - `(grad u)_ij = ∂_j u_i` (Jacobian)
//! - `(∇×v)_i = ε_iab ∂_a v_b`
//! - `(∇×M)_ij = ε_iab ∂_a M_bj` — columns are curled
//! - `(M×∇)_ij = ε_jab ∂_a M_ib` — rows are curled
//! - `(div M)_i = ∂_j M_ij` — row-wise divergence
//! - 2D scalar curl: `f ↦ (∂₂f, −∂₁f)`
//!
//! Second-order operators (`inc`, `air`) are compositions of the first-order
//! ones plus a symmetry check, not bespoke stencils.

use crate::polycore::Poly;
use crate::tensorfields::{FieldError, Shape, Symmetry, TensorField};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operator {0:?} expects {1}")]
    WrongInput(DiffOpTag, String),
}

/// Tags for the differential operators exposed by this module.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffOpTag {
    Grad,
    CurlVec,
    DivVec,
    CurlCols,
    CurlRows,
    DivRows,
    Def,
    Inc,
    Air,
}

/// Gradient of a scalar field.
pub fn grad_scalar(f: &TensorField) -> Result<TensorField, DiffError> {
    let p = f.as_scalar()?;
    let dim = f.dim();
    Ok(TensorField::vector(
        (0..dim).map(|i| p.partial(i)).collect(),
    )?)
}

/// Jacobian of a vector field: `(grad u)_ij = ∂_j u_i`.
pub fn grad_vec(u: &TensorField) -> Result<TensorField, DiffError> {
    expect(u, Shape::Vector, DiffOpTag::Grad, "a vector field")?;
    let n = u.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(u.comp(i).partial(j));
        }
    }
    Ok(TensorField::matrix(entries)?)
}

/// 3D curl of a vector field.
pub fn curl_vec(v: &TensorField) -> Result<TensorField, DiffError> {
    expect(v, Shape::Vector, DiffOpTag::CurlVec, "a 3D vector field")?;
    need_dim(v, 3, DiffOpTag::CurlVec)?;
    let c = |i: usize| v.comp(i);
    Ok(TensorField::vector(vec![
        &c(2).partial(1) - &c(1).partial(2),
        &c(0).partial(2) - &c(2).partial(0),
        &c(1).partial(0) - &c(0).partial(1),
    ])?)
}

/// Divergence of a vector field.
pub fn div_vec(v: &TensorField) -> Result<TensorField, DiffError> {
    expect(v, Shape::Vector, DiffOpTag::DivVec, "a vector field")?;
    let mut acc = Poly::zero(v.dim());
    for i in 0..v.dim() {
        acc = &acc + &v.comp(i).partial(i);
    }
    Ok(TensorField::scalar(acc))
}

/// `∇×M`: curl applied to each column (3D).
pub fn curl_cols(m: &TensorField) -> Result<TensorField, DiffError> {
    expect(m, Shape::Matrix, DiffOpTag::CurlCols, "a 3D matrix field")?;
    need_dim(m, 3, DiffOpTag::CurlCols)?;
    let mut cols = Vec::with_capacity(3);
    for j in 0..3 {
        cols.push(curl_vec(&m.column(j)?)?);
    }
    Ok(TensorField::from_columns(&cols)?)
}

/// `M×∇`: curl applied to each row (3D).
pub fn curl_rows(m: &TensorField) -> Result<TensorField, DiffError> {
    expect(m, Shape::Matrix, DiffOpTag::CurlRows, "a 3D matrix field")?;
    need_dim(m, 3, DiffOpTag::CurlRows)?;
    let mut rows = Vec::with_capacity(3);
    for i in 0..3 {
        rows.push(curl_vec(&m.row(i)?)?);
    }
    Ok(TensorField::from_rows(&rows)?)
}

/// Row-wise divergence `(div M)_i = ∂_j M_ij`.
pub fn div_rows(m: &TensorField) -> Result<TensorField, DiffError> {
    expect(m, Shape::Matrix, DiffOpTag::DivRows, "a matrix field")?;
    let n = m.dim();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Poly::zero(n);
        for j in 0..n {
            acc = &acc + &m.entry(i, j).partial(j);
        }
        comps.push(acc);
    }
    Ok(TensorField::vector(comps)?)
}

/// 2D scalar curl `f ↦ (∂₂f, −∂₁f)`.
pub fn curl_2d_scalar(f: &TensorField) -> Result<TensorField, DiffError> {
    let p = f.as_scalar()?;
    if f.dim() != 2 {
        return Err(DiffError::WrongInput(
            DiffOpTag::CurlVec,
            "a 2D scalar field".into(),
        ));
    }
    Ok(TensorField::vector(vec![p.partial(1), -&p.partial(0)])?)
}

/// 2D row-wise scalar curl of a vector field: `(v×∇)_ij`, row `i` equal to
/// `(∂₂v_i, −∂₁v_i)`.
pub fn scalar_curl_rows_2d(v: &TensorField) -> Result<TensorField, DiffError> {
    expect(v, Shape::Vector, DiffOpTag::CurlRows, "a 2D vector field")?;
    need_dim(v, 2, DiffOpTag::CurlRows)?;
    let rows: Vec<TensorField> = (0..2)
        .map(|i| curl_2d_scalar(&TensorField::scalar(v.comp(i).clone())))
        .collect::<Result<_, _>>()?;
    Ok(TensorField::from_rows(&rows)?)
}

/// Symmetric gradient `def u = sym(grad u)`.
pub fn def_op(u: &TensorField) -> Result<TensorField, DiffError> {
    Ok(grad_vec(u)?.sym()?)
}

/// Incompatibility `inc E = ∇×E×∇` of a symmetric 3D field.
pub fn inc_op(e: &TensorField) -> Result<TensorField, DiffError> {
    need_dim(e, 3, DiffOpTag::Inc)?;
    if e.symmetry() != Symmetry::Symmetric && !e.is_zero() {
        return Err(DiffError::WrongInput(
            DiffOpTag::Inc,
            "a structurally symmetric matrix field".into(),
        ));
    }
    let out = curl_rows(&curl_cols(e)?)?;
    debug_assert!(out.symmetry() == Symmetry::Symmetric || out.is_zero());
    Ok(out)
}

/// 2D Airy operator: the rotated Hessian `[[∂₂²u, −∂₁∂₂u], [−∂₁∂₂u, ∂₁²u]]`.
pub fn air_op(u: &TensorField) -> Result<TensorField, DiffError> {
    let p = u.as_scalar()?;
    if u.dim() != 2 {
        return Err(DiffError::WrongInput(DiffOpTag::Air, "a 2D scalar".into()));
    }
    // ∇×(u×∇): row curl of the scalar, then column-wise scalar curl.
    let w = curl_2d_scalar(&TensorField::scalar(p.clone()))?;
    let cols: Vec<TensorField> = (0..2)
        .map(|j| curl_2d_scalar(&TensorField::scalar(w.comp(j).clone())))
        .collect::<Result<_, _>>()?;
    let out = TensorField::from_columns(&cols)?;
    debug_assert!(out.symmetry() == Symmetry::Symmetric || out.is_zero());
    Ok(out)
}

/// The column-wise curl `∇×E` of a strain field (its first-derivative data).
pub fn frank_tensor(e: &TensorField) -> Result<TensorField, DiffError> {
    curl_cols(e)
}

/// Dispatch by tag.
pub fn apply(tag: DiffOpTag, f: &TensorField) -> Result<TensorField, DiffError> {
    match tag {
        DiffOpTag::Grad => match f.shape() {
            Shape::Scalar => grad_scalar(f),
            _ => grad_vec(f),
        },
        DiffOpTag::CurlVec => {
            if f.dim() == 2 && f.shape() == Shape::Scalar {
                curl_2d_scalar(f)
            } else {
                curl_vec(f)
            }
        }
        DiffOpTag::DivVec => div_vec(f),
        DiffOpTag::CurlCols => curl_cols(f),
        DiffOpTag::CurlRows => {
            if f.dim() == 2 {
                scalar_curl_rows_2d(f)
            } else {
                curl_rows(f)
            }
        }
        DiffOpTag::DivRows => div_rows(f),
        DiffOpTag::Def => def_op(f),
        DiffOpTag::Inc => inc_op(f),
        DiffOpTag::Air => air_op(f),
    }
}

/// `(x·∇)F`, entrywise.
pub fn radial_derivative(f: &TensorField) -> TensorField {
    let dim = f.dim();
    f.map_entries(|p| {
        let mut acc = Poly::zero(dim);
        for i in 0..dim {
            acc = &acc + &(&Poly::var(dim, i) * &p.partial(i));
        }
        acc
    })
}

fn expect(f: &TensorField, shape: Shape, tag: DiffOpTag, what: &str) -> Result<(), DiffError> {
    if f.shape() != shape {
        return Err(DiffError::WrongInput(tag, what.to_string()));
    }
    Ok(())
}

fn need_dim(f: &TensorField, d: usize, tag: DiffOpTag) -> Result<(), DiffError> {
    if f.dim() != d {
        return Err(DiffError::WrongInput(tag, format!("dimension {d}")));
    }
    Ok(())
}
