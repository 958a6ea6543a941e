//! Tensor-valued polynomial fields and their pointwise algebra.
//!
//! A [`TensorField`] is a scalar, vector, or square-matrix field whose entries
//! are exact polynomials. Matrix fields carry a symmetry tag that is validated
//! structurally on construction: `symmetric`/`skew` is a fact about the
//! entries, never an assumption. All cross-product and permutation-tensor
//! conventions are centralized here:
//!
//! - `ε₁₂₃ = +1`; `(u ∧ v)_i = ε_iab u_a v_b`
//! - `u ∧ M` crosses `u` with each column; `M ∧ u` crosses each row with `u`
//! - `Skw(w)` is the skew matrix with `Skw(w)·a = w ∧ a`
//! - in 2D, `x⊥ = (x₂, −x₁)` and `χ = [[0,−1],[1,0]]`, with `u·χ` the
//!   scalar-skew identification

use crate::polycore::{Poly, PolyError, PolyJson, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("operation requires dimension {0}, field has dimension {1}")]
    NeedsDim(usize, usize),
    #[error("matrix is not structurally {0}")]
    NotSymmetryTagged(&'static str),
    #[error("field JSON invalid: {0}")]
    BadJson(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Scalar,
    Vector,
    Matrix,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Scalar => write!(f, "scalar"),
            Shape::Vector => write!(f, "vector"),
            Shape::Matrix => write!(f, "matrix"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    None,
    Symmetric,
    Skew,
}

/// Scalar/vector/matrix polynomial field.
#[derive(Clone, Debug)]
pub struct TensorField {
    dim: usize,
    shape: Shape,
    symmetry: Symmetry,
    /// scalar: 1 entry; vector: `dim` entries; matrix: `dim²` entries row-major.
    entries: Vec<Poly>,
}

/// Values compare by dimension, shape and entries; the symmetry tag is
/// metadata recomputable from the entries.
impl PartialEq for TensorField {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.shape == other.shape && self.entries == other.entries
    }
}

impl Eq for TensorField {}

impl TensorField {
    // -- constructors -------------------------------------------------------

    pub fn scalar(p: Poly) -> Self {
        TensorField {
            dim: p.dim(),
            shape: Shape::Scalar,
            symmetry: Symmetry::None,
            entries: vec![p],
        }
    }

    pub fn vector(entries: Vec<Poly>) -> Result<Self, FieldError> {
        let dim = entries.first().map(|p| p.dim()).unwrap_or(0);
        if entries.len() != dim || entries.iter().any(|p| p.dim() != dim) {
            return Err(FieldError::ShapeMismatch {
                expected: format!("{dim} vector entries of dim {dim}"),
                got: format!("{} entries", entries.len()),
            });
        }
        Ok(TensorField {
            dim,
            shape: Shape::Vector,
            symmetry: Symmetry::None,
            entries,
        })
    }

    pub fn matrix(entries: Vec<Poly>) -> Result<Self, FieldError> {
        let dim = entries.first().map(|p| p.dim()).unwrap_or(0);
        if entries.len() != dim * dim || entries.iter().any(|p| p.dim() != dim) {
            return Err(FieldError::ShapeMismatch {
                expected: format!("{dim}x{dim} matrix"),
                got: format!("{} entries", entries.len()),
            });
        }
        let mut f = TensorField {
            dim,
            shape: Shape::Matrix,
            symmetry: Symmetry::None,
            entries,
        };
        f.symmetry = f.detect_symmetry();
        Ok(f)
    }

    /// Matrix constructor that fails unless the entries are structurally
    /// symmetric.
    pub fn symmetric_matrix(entries: Vec<Poly>) -> Result<Self, FieldError> {
        let f = TensorField::matrix(entries)?;
        if f.symmetry != Symmetry::Symmetric {
            return Err(FieldError::NotSymmetryTagged("symmetric"));
        }
        Ok(f)
    }

    /// Matrix constructor that fails unless the entries are structurally skew.
    pub fn skew_matrix(entries: Vec<Poly>) -> Result<Self, FieldError> {
        let f = TensorField::matrix(entries)?;
        if f.symmetry != Symmetry::Skew {
            return Err(FieldError::NotSymmetryTagged("skew"));
        }
        Ok(f)
    }

    pub fn zero(dim: usize, shape: Shape) -> Self {
        let n = match shape {
            Shape::Scalar => 1,
            Shape::Vector => dim,
            Shape::Matrix => dim * dim,
        };
        TensorField {
            dim,
            shape,
            symmetry: match shape {
                // the zero matrix is both; tag as skew so skew contexts accept it
                Shape::Matrix => Symmetry::Skew,
                _ => Symmetry::None,
            },
            entries: vec![Poly::zero(dim); n],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Poly::zero(dim); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Poly::one(dim);
        }
        TensorField::matrix(entries).expect("identity is well-formed")
    }

    /// The position field `x = (x₁, …, x_dim)`.
    pub fn position(dim: usize) -> Self {
        TensorField::vector((0..dim).map(|i| Poly::var(dim, i)).collect())
            .expect("position is well-formed")
    }

    pub fn basis_vector(dim: usize, i: usize) -> Self {
        let mut entries = vec![Poly::zero(dim); dim];
        entries[i] = Poly::one(dim);
        TensorField::vector(entries).expect("basis vector is well-formed")
    }

    /// Constant vector from rationals.
    pub fn const_vector(dim: usize, values: &[Rat]) -> Result<Self, FieldError> {
        TensorField::vector(
            values
                .iter()
                .map(|v| Poly::constant(dim, v.clone()))
                .collect(),
        )
    }

    /// The canonical 2D skew matrix `χ = [[0,−1],[1,0]]`.
    pub fn chi_2d() -> Self {
        TensorField::matrix(vec![
            Poly::zero(2),
            Poly::from_int(2, -1),
            Poly::one(2),
            Poly::zero(2),
        ])
        .expect("chi is well-formed")
    }

    // -- accessors ----------------------------------------------------------

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn as_scalar(&self) -> Result<&Poly, FieldError> {
        self.expect_shape(Shape::Scalar)?;
        Ok(&self.entries[0])
    }

    pub fn comp(&self, i: usize) -> &Poly {
        assert_eq!(self.shape, Shape::Vector);
        &self.entries[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        assert_eq!(self.shape, Shape::Matrix);
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    fn expect_shape(&self, s: Shape) -> Result<(), FieldError> {
        if self.shape != s {
            return Err(FieldError::ShapeMismatch {
                expected: s.to_string(),
                got: self.shape.to_string(),
            });
        }
        Ok(())
    }

    fn expect_dim(&self, d: usize) -> Result<(), FieldError> {
        if self.dim != d {
            return Err(FieldError::NeedsDim(d, self.dim));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FieldError> {
        if self.dim != other.dim {
            return Err(FieldError::DimMismatch(self.dim, other.dim));
        }
        if self.shape != other.shape {
            return Err(FieldError::ShapeMismatch {
                expected: self.shape.to_string(),
                got: other.shape.to_string(),
            });
        }
        Ok(())
    }

    fn detect_symmetry(&self) -> Symmetry {
        if self.shape != Shape::Matrix {
            return Symmetry::None;
        }
        let n = self.dim;
        let mut sym = true;
        let mut skw = true;
        for i in 0..n {
            for j in 0..n {
                let a = &self.entries[i * n + j];
                let b = &self.entries[j * n + i];
                if a != b {
                    sym = false;
                }
                if !(a - &(-b)).is_zero() {
                    skw = false;
                }
            }
        }
        if skw {
            Symmetry::Skew
        } else if sym {
            Symmetry::Symmetric
        } else {
            Symmetry::None
        }
    }

    /// Re-derive the symmetry tag from the entries (after raw edits).
    pub fn retag(mut self) -> Self {
        self.symmetry = self.detect_symmetry();
        self
    }

    // -- linear structure ----------------------------------------------------

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TensorField {
            dim: self.dim,
            shape: self.shape,
            symmetry: Symmetry::None,
            entries,
        }
        .retag())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TensorField {
            dim: self.dim,
            shape: self.shape,
            symmetry: self.symmetry,
            entries: self.entries.iter().map(|p| -p).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TensorField {
            dim: self.dim,
            shape: self.shape,
            symmetry: self.symmetry,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
        .retag()
    }

    pub fn scale_poly(&self, f: &Poly) -> Self {
        TensorField {
            dim: self.dim,
            shape: self.shape,
            symmetry: Symmetry::None,
            entries: self.entries.iter().map(|p| p * f).collect(),
        }
        .retag()
    }

    pub fn map_entries(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        TensorField {
            dim: self.dim,
            shape: self.shape,
            symmetry: Symmetry::None,
            entries: self.entries.iter().map(f).collect(),
        }
        .retag()
    }

    /// Max total degree over entries; `None` if the field is zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|p| p.total_degree()).max()
    }

    pub fn is_homogeneous(&self, r: u32) -> bool {
        self.entries.iter().all(|p| p.is_homogeneous(r))
    }

    /// Degree-`r` homogeneous component, entrywise.
    pub fn homogeneous_part(&self, r: u32) -> Self {
        self.map_entries(|p| p.homogeneous_part(r))
    }

    /// All degrees present in any entry.
    pub fn degrees(&self) -> Vec<u32> {
        let mut set: Vec<u32> = self
            .entries
            .iter()
            .flat_map(|p| p.homogeneous_parts().parts.into_keys())
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Entry-wise shift `F(x + a)`.
    pub fn shift(&self, a: &[Rat]) -> Self {
        self.map_entries(|p| p.shift(a))
    }

    // -- pointwise algebra ---------------------------------------------------

    pub fn transpose(&self) -> Result<Self, FieldError> {
        self.expect_shape(Shape::Matrix)?;
        let n = self.dim;
        let mut entries = vec![Poly::zero(n); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        TensorField::matrix(entries)
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn sym(&self) -> Result<Self, FieldError> {
        let t = self.transpose()?;
        Ok(self.add(&t)?.scale(&Rat::new(1, 2).unwrap()))
    }

    /// Skew part `(M − Mᵀ)/2`.
    pub fn skw(&self) -> Result<Self, FieldError> {
        let t = self.transpose()?;
        Ok(self.sub(&t)?.scale(&Rat::new(1, 2).unwrap()))
    }

    pub fn trace(&self) -> Result<Poly, FieldError> {
        self.expect_shape(Shape::Matrix)?;
        let n = self.dim;
        let mut acc = Poly::zero(n);
        for i in 0..n {
            acc = &acc + &self.entries[i * n + i];
        }
        Ok(acc)
    }

    /// Frobenius inner product `A : B = Σ A_ij B_ij`.
    pub fn frobenius(&self, other: &Self) -> Result<Poly, FieldError> {
        self.check_compatible(other)?;
        self.expect_shape(Shape::Matrix)?;
        let mut acc = Poly::zero(self.dim);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = &acc + &(a * b);
        }
        Ok(acc)
    }

    /// `(u ⊗ v)_ij = u_i v_j`.
    pub fn outer(u: &Self, v: &Self) -> Result<Self, FieldError> {
        u.expect_shape(Shape::Vector)?;
        v.expect_shape(Shape::Vector)?;
        u.check_dim_of(v)?;
        let n = u.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(&u.entries[i] * &v.entries[j]);
            }
        }
        TensorField::matrix(entries)
    }

    fn check_dim_of(&self, other: &Self) -> Result<(), FieldError> {
        if self.dim != other.dim {
            return Err(FieldError::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn dot(u: &Self, v: &Self) -> Result<Poly, FieldError> {
        u.expect_shape(Shape::Vector)?;
        v.expect_shape(Shape::Vector)?;
        u.check_dim_of(v)?;
        let mut acc = Poly::zero(u.dim);
        for (a, b) in u.entries.iter().zip(&v.entries) {
            acc = &acc + &(a * b);
        }
        Ok(acc)
    }

    /// `M · v`.
    pub fn matvec(&self, v: &Self) -> Result<Self, FieldError> {
        self.expect_shape(Shape::Matrix)?;
        v.expect_shape(Shape::Vector)?;
        self.check_dim_of(v)?;
        let n = self.dim;
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Poly::zero(n);
            for j in 0..n {
                acc = &acc + &(&self.entries[i * n + j] * &v.entries[j]);
            }
            entries.push(acc);
        }
        TensorField::vector(entries)
    }

    /// `vᵀ · M` as a vector: `(v·M)_j = v_i M_ij`.
    pub fn vecmat(v: &Self, m: &Self) -> Result<Self, FieldError> {
        m.transpose()?.matvec(v)
    }

    /// `v · M · w`.
    pub fn bilinear(v: &Self, m: &Self, w: &Self) -> Result<Poly, FieldError> {
        TensorField::dot(v, &m.matvec(w)?)
    }

    /// 3D cross product `(u ∧ v)_i = ε_iab u_a v_b`.
    pub fn cross(u: &Self, v: &Self) -> Result<Self, FieldError> {
        u.expect_dim(3)?;
        u.expect_shape(Shape::Vector)?;
        v.expect_shape(Shape::Vector)?;
        u.check_dim_of(v)?;
        let (a, b) = (&u.entries, &v.entries);
        TensorField::vector(vec![
            &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
            &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
            &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
        ])
    }

    /// `u ∧ M`: cross `u` with each column.
    pub fn cross_left(u: &Self, m: &Self) -> Result<Self, FieldError> {
        u.expect_dim(3)?;
        m.expect_dim(3)?;
        m.expect_shape(Shape::Matrix)?;
        u.expect_shape(Shape::Vector)?;
        let mut cols = Vec::with_capacity(3);
        for j in 0..3 {
            let col = m.column(j)?;
            cols.push(TensorField::cross(u, &col)?);
        }
        TensorField::from_columns(&cols)
    }

    /// `M ∧ u`: cross each row with `u`.
    pub fn cross_right(m: &Self, u: &Self) -> Result<Self, FieldError> {
        u.expect_dim(3)?;
        m.expect_dim(3)?;
        m.expect_shape(Shape::Matrix)?;
        u.expect_shape(Shape::Vector)?;
        let mut rows = Vec::with_capacity(3);
        for i in 0..3 {
            let row = m.row(i)?;
            rows.push(TensorField::cross(&row, u)?);
        }
        TensorField::from_rows(&rows)
    }

    pub fn column(&self, j: usize) -> Result<Self, FieldError> {
        self.expect_shape(Shape::Matrix)?;
        let n = self.dim;
        TensorField::vector((0..n).map(|i| self.entries[i * n + j].clone()).collect())
    }

    pub fn row(&self, i: usize) -> Result<Self, FieldError> {
        self.expect_shape(Shape::Matrix)?;
        let n = self.dim;
        TensorField::vector((0..n).map(|j| self.entries[i * n + j].clone()).collect())
    }

    pub fn from_columns(cols: &[Self]) -> Result<Self, FieldError> {
        let n = cols.len();
        let mut entries = vec![Poly::zero(cols[0].dim); n * n];
        for (j, c) in cols.iter().enumerate() {
            c.expect_shape(Shape::Vector)?;
            for i in 0..n {
                entries[i * n + j] = c.entries[i].clone();
            }
        }
        TensorField::matrix(entries)
    }

    pub fn from_rows(rows: &[Self]) -> Result<Self, FieldError> {
        let n = rows.len();
        let mut entries = vec![Poly::zero(rows[0].dim); n * n];
        for (i, r) in rows.iter().enumerate() {
            r.expect_shape(Shape::Vector)?;
            for j in 0..n {
                entries[i * n + j] = r.entries[j].clone();
            }
        }
        TensorField::matrix(entries)
    }

    /// `Skw(w)`: the 3D skew matrix with `Skw(w)·a = w ∧ a`.
    pub fn vec_skw(w: &Self) -> Result<Self, FieldError> {
        w.expect_dim(3)?;
        w.expect_shape(Shape::Vector)?;
        let (w1, w2, w3) = (&w.entries[0], &w.entries[1], &w.entries[2]);
        let z = || Poly::zero(3);
        TensorField::skew_matrix(vec![
            z(),
            -w3,
            w2.clone(),
            w3.clone(),
            z(),
            -w1,
            -w2,
            w1.clone(),
            z(),
        ])
    }

    /// Inverse of [`TensorField::vec_skw`]; input must be structurally skew.
    pub fn skw_vec(m: &Self) -> Result<Self, FieldError> {
        m.expect_dim(3)?;
        m.expect_shape(Shape::Matrix)?;
        if m.symmetry != Symmetry::Skew {
            return Err(FieldError::NotSymmetryTagged("skew"));
        }
        TensorField::vector(vec![
            m.entry(2, 1).clone(),
            m.entry(0, 2).clone(),
            m.entry(1, 0).clone(),
        ])
    }

    /// 2D scalar-skew identification: the `u` in `M = u·χ`.
    pub fn skw_scalar_2d(m: &Self) -> Result<Poly, FieldError> {
        m.expect_dim(2)?;
        m.expect_shape(Shape::Matrix)?;
        if m.symmetry != Symmetry::Skew {
            return Err(FieldError::NotSymmetryTagged("skew"));
        }
        Ok(m.entry(1, 0).clone())
    }

    /// 2D scalar-skew identification: `u ↦ u·χ`.
    pub fn scalar_skw_2d(u: &Poly) -> Result<Self, FieldError> {
        if u.dim() != 2 {
            return Err(FieldError::NeedsDim(2, u.dim()));
        }
        TensorField::skew_matrix(vec![Poly::zero(2), -u, u.clone(), Poly::zero(2)])
    }

    /// `S₁` of the 3D construction in matrix form: `W ↦ Wᵀ − tr(W)·I`.
    pub fn s1_op(&self) -> Result<Self, FieldError> {
        self.expect_dim(3)?;
        let t = self.transpose()?;
        let tr = self.trace()?;
        t.sub(&TensorField::identity(3).scale_poly(&tr))
    }

    /// Inverse of [`TensorField::s1_op`]: `U ↦ Uᵀ − ½tr(U)·I`.
    pub fn s1_inv(&self) -> Result<Self, FieldError> {
        self.expect_dim(3)?;
        let t = self.transpose()?;
        let tr = self.trace()?.scale(&Rat::new(1, 2).unwrap());
        t.sub(&TensorField::identity(3).scale_poly(&tr))
    }

    /// `K(v) = x ⊗ v − v ⊗ x`, a structurally skew matrix (any dim).
    pub fn k_op(v: &Self) -> Result<Self, FieldError> {
        v.expect_shape(Shape::Vector)?;
        let x = TensorField::position(v.dim);
        let m = TensorField::outer(&x, v)?.sub(&TensorField::outer(v, &x)?)?;
        debug_assert_eq!(m.symmetry, Symmetry::Skew);
        Ok(m)
    }

    /// 2D rotation `(u₁,u₂) ↦ (u₂,−u₁)`, i.e. the `x⊥` construction.
    pub fn perp(u: &Self) -> Result<Self, FieldError> {
        u.expect_dim(2)?;
        u.expect_shape(Shape::Vector)?;
        TensorField::vector(vec![u.entries[1].clone(), -&u.entries[0]])
    }

    /// Entry-wise radial Beta transform `∫₀¹ tᵃ(1−t)ᵇ F(tx) dt`.
    pub fn radial_beta(&self, a: u32, b: u32) -> Self {
        self.map_entries(|p| crate::polycore::radial_beta_transform(p, a, b))
    }

    /// Evaluate all entries at a floating point.
    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|p| p.eval_f64(point)).collect()
    }

    /// Evaluate all entries at an exact rational point.
    pub fn eval(&self, point: &[Rat]) -> Vec<Rat> {
        self.entries.iter().map(|p| p.eval(point)).collect()
    }
}

impl fmt::Display for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Shape::Scalar => write!(f, "{}", self.entries[0]),
            Shape::Vector => {
                write!(f, "(")?;
                for (i, p) in self.entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", p)?;
                }
                write!(f, ")")
            }
            Shape::Matrix => {
                write!(f, "[")?;
                for i in 0..self.dim {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for j in 0..self.dim {
                        if j > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", self.entry(i, j))?;
                    }
                }
                write!(f, "]")
            }
        }
    }
}

/// A pair (skew matrix field, vector field) sharing a dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct WPairField {
    pub skew_part: TensorField,
    pub vec_part: TensorField,
}

impl WPairField {
    pub fn new(skew_part: TensorField, vec_part: TensorField) -> Result<Self, FieldError> {
        if skew_part.dim() != vec_part.dim() {
            return Err(FieldError::DimMismatch(skew_part.dim(), vec_part.dim()));
        }
        skew_part.expect_shape(Shape::Matrix)?;
        if skew_part.symmetry() != Symmetry::Skew {
            return Err(FieldError::NotSymmetryTagged("skew"));
        }
        vec_part.expect_shape(Shape::Vector)?;
        Ok(WPairField {
            skew_part,
            vec_part,
        })
    }

    pub fn dim(&self) -> usize {
        self.skew_part.dim()
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Field JSON: `{"dim": 3, "shape": "matrix", "symmetry": "symmetric",
/// "entries": {"1,2": <poly>, ...}}` with omitted entries = 0. Keys are
/// 1-based: `"i,j"` for matrices, `"i"` for vectors, `"1"` for scalars.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct FieldJson {
    pub dim: usize,
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<Symmetry>,
    pub entries: BTreeMap<String, PolyJson>,
}

impl TensorField {
    pub fn to_json(&self) -> FieldJson {
        let mut entries = BTreeMap::new();
        match self.shape {
            Shape::Scalar => {
                if !self.entries[0].is_zero() {
                    entries.insert("1".to_string(), self.entries[0].to_json());
                }
            }
            Shape::Vector => {
                for (i, p) in self.entries.iter().enumerate() {
                    if !p.is_zero() {
                        entries.insert(format!("{}", i + 1), p.to_json());
                    }
                }
            }
            Shape::Matrix => {
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let p = self.entry(i, j);
                        if !p.is_zero() {
                            entries.insert(format!("{},{}", i + 1, j + 1), p.to_json());
                        }
                    }
                }
            }
        }
        FieldJson {
            dim: self.dim,
            shape: self.shape,
            symmetry: match self.symmetry {
                Symmetry::None => None,
                s => Some(s),
            },
            entries,
        }
    }

    pub fn from_json(json: &FieldJson) -> Result<Self, FieldError> {
        let dim = json.dim;
        if dim != 2 && dim != 3 {
            return Err(FieldError::BadJson(format!("unsupported dim {dim}")));
        }
        let n = match json.shape {
            Shape::Scalar => 1,
            Shape::Vector => dim,
            Shape::Matrix => dim * dim,
        };
        let mut entries = vec![Poly::zero(dim); n];
        for (key, pj) in &json.entries {
            let flat = parse_entry_key(key, json.shape, dim)?;
            entries[flat] = Poly::from_json(dim, pj)?;
        }
        let field = match json.shape {
            Shape::Scalar => TensorField::scalar(entries.pop().unwrap()),
            Shape::Vector => TensorField::vector(entries)?,
            Shape::Matrix => TensorField::matrix(entries)?,
        };
        // A declared symmetry is a contract: reject inputs that don't satisfy
        // it structurally, naming the offending entry.
        if let Some(declared) = json.symmetry {
            if declared == Symmetry::Symmetric && field.symmetry != Symmetry::Symmetric {
                let (i, j) = first_asymmetric_entry(&field);
                return Err(FieldError::BadJson(format!(
                    "declared symmetric but entry ({},{}) != ({},{})",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
            if declared == Symmetry::Skew && field.symmetry != Symmetry::Skew {
                return Err(FieldError::BadJson(
                    "declared skew but entries are not skew".to_string(),
                ));
            }
        }
        Ok(field)
    }
}

fn first_asymmetric_entry(f: &TensorField) -> (usize, usize) {
    let n = f.dim();
    for i in 0..n {
        for j in 0..n {
            if f.entry(i, j) != f.entry(j, i) {
                return (i, j);
            }
        }
    }
    (0, 0)
}

fn parse_entry_key(key: &str, shape: Shape, dim: usize) -> Result<usize, FieldError> {
    let bad = || FieldError::BadJson(format!("bad entry key {key:?}"));
    match shape {
        Shape::Scalar => {
            if key == "1" {
                Ok(0)
            } else {
                Err(bad())
            }
        }
        Shape::Vector => {
            let i: usize = key.parse().map_err(|_| bad())?;
            if i >= 1 && i <= dim {
                Ok(i - 1)
            } else {
                Err(bad())
            }
        }
        Shape::Matrix => {
            let (a, b) = key.split_once(',').ok_or_else(bad)?;
            let i: usize = a.trim().parse().map_err(|_| bad())?;
            let j: usize = b.trim().parse().map_err(|_| bad())?;
            if i >= 1 && i <= dim && j >= 1 && j <= dim {
                Ok((i - 1) * dim + (j - 1))
            } else {
                Err(bad())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn random_poly(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> Poly {
        let mut p = Poly::zero(dim);
        for _ in 0..rng.gen_range(1..6) {
            let mut exps = [0u16; 3];
            for _ in 0..rng.gen_range(0..=max_deg) {
                exps[rng.gen_range(0..dim)] += 1;
            }
            p = &p + &Poly::monomial(dim, exps, Rat::from_int(rng.gen_range(-5..=5)));
        }
        p
    }

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> TensorField {
        TensorField::matrix(
            (0..dim * dim)
                .map(|_| random_poly(rng, dim, max_deg))
                .collect(),
        )
        .unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> TensorField {
        TensorField::vector((0..dim).map(|_| random_poly(rng, dim, max_deg)).collect()).unwrap()
    }

    /// Componentwise ε-contraction oracle for `u ∧ v`, independent of the
    /// production cross-product code path.
    #[allow(clippy::needless_range_loop)]
    fn cross_oracle(u: &TensorField, v: &TensorField) -> TensorField {
        let eps = |i: usize, j: usize, k: usize| -> i64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
                _ => 0,
            }
        };
        let mut comps = vec![Poly::zero(3); 3];
        for i in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let e = eps(i, a, b);
                    if e != 0 {
                        let term = (u.comp(a) * v.comp(b)).scale(&Rat::from_int(e));
                        comps[i] = &comps[i] + &term;
                    }
                }
            }
        }
        TensorField::vector(comps).unwrap()
    }

    #[test]
    fn sym_of_upper_triangular() {
        let m = TensorField::matrix(vec![
            Poly::zero(2),
            Poly::from_int(2, 2),
            Poly::zero(2),
            Poly::zero(2),
        ])
        .unwrap();
        let s = m.sym().unwrap();
        assert_eq!(s.entry(0, 1), &Poly::one(2));
        assert_eq!(s.entry(1, 0), &Poly::one(2));
        assert_eq!(s.symmetry(), Symmetry::Symmetric);
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(
            TensorField::identity(3).trace().unwrap(),
            Poly::from_int(3, 3)
        );
    }

    #[test]
    fn outer_entry() {
        let e1 = TensorField::basis_vector(3, 0);
        let pos = TensorField::position(3);
        let m = TensorField::outer(&e1, &pos).unwrap();
        assert_eq!(m.entry(0, 1), &x(1));
    }

    #[test]
    fn vec_skw_display_convention() {
        let w = TensorField::const_vector(3, &[Rat::zero(), Rat::zero(), Rat::one()]).unwrap();
        let m = TensorField::vec_skw(&w).unwrap();
        assert_eq!(m.entry(0, 1), &Poly::from_int(3, -1));
        assert_eq!(m.entry(1, 0), &Poly::one(3));
        assert!(m.entry(2, 2).is_zero());
    }

    #[test]
    fn skw_vec_roundtrip() {
        let w = TensorField::vector(vec![x(0), Poly::zero(3), x(2)]).unwrap();
        let back = TensorField::skw_vec(&TensorField::vec_skw(&w).unwrap()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn skw_action_is_cross_product() {
        // Skw(w)·a = w ∧ a, checked against the ε-contraction oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w = random_vector(&mut rng, 3, 2);
            let a = random_vector(&mut rng, 3, 2);
            let lhs = TensorField::vec_skw(&w).unwrap().matvec(&a).unwrap();
            assert_eq!(lhs, cross_oracle(&w, &a));
        }
        // Skw((1,0,0))·(0,1,0) = e₁∧e₂ = e₃
        let e1 = TensorField::basis_vector(3, 0);
        let e2 = TensorField::basis_vector(3, 1);
        let r = TensorField::vec_skw(&e1).unwrap().matvec(&e2).unwrap();
        assert_eq!(r, TensorField::basis_vector(3, 2));
    }

    #[test]
    fn cross_left_on_rank_one() {
        // u = x, M = e₁⊗e₁: column 1 must be x∧e₁ = (0, x₃, −x₂), others 0.
        let e1 = TensorField::basis_vector(3, 0);
        let m = TensorField::outer(&e1, &e1).unwrap();
        let pos = TensorField::position(3);
        let r = TensorField::cross_left(&pos, &m).unwrap();
        let expected_col = cross_oracle(&pos, &e1);
        assert_eq!(r.column(0).unwrap(), expected_col);
        assert_eq!(expected_col.comp(1), &x(2));
        assert_eq!(expected_col.comp(2), &(-&x(1)));
        assert!(r.column(1).unwrap().is_zero());
        assert!(r.column(2).unwrap().is_zero());
    }

    #[test]
    fn cross_right_on_rank_one() {
        // M = e₁⊗e₁, u = x: row 1 must be e₁∧x = (0, −x₃, x₂), others 0.
        let e1 = TensorField::basis_vector(3, 0);
        let m = TensorField::outer(&e1, &e1).unwrap();
        let pos = TensorField::position(3);
        let r = TensorField::cross_right(&m, &pos).unwrap();
        assert_eq!(r.row(0).unwrap(), cross_oracle(&e1, &pos));
        assert_eq!(r.entry(0, 1), &(-&x(2)));
        assert_eq!(r.entry(0, 2), &x(1));
        assert!(r.row(1).unwrap().is_zero());
    }

    #[test]
    fn cross_left_of_zero() {
        let z = TensorField::zero(3, Shape::Matrix);
        let pos = TensorField::position(3);
        assert!(TensorField::cross_left(&pos, &z).unwrap().is_zero());
    }

    #[test]
    fn mixed_cross_associativity() {
        // (u∧M)∧w == u∧(M∧w) on seeded random fields.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = random_vector(&mut rng, 3, 2);
            let m = random_matrix(&mut rng, 3, 2);
            let w = random_vector(&mut rng, 3, 2);
            let lhs =
                TensorField::cross_right(&TensorField::cross_left(&u, &m).unwrap(), &w).unwrap();
            let rhs =
                TensorField::cross_left(&u, &TensorField::cross_right(&m, &w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cross_transpose_identity() {
        // (u∧M)ᵀ = −(Mᵀ∧u)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_vector(&mut rng, 3, 2);
            let m = random_matrix(&mut rng, 3, 2);
            let lhs = TensorField::cross_left(&u, &m)
                .unwrap()
                .transpose()
                .unwrap();
            let rhs = TensorField::cross_right(&m.transpose().unwrap(), &u)
                .unwrap()
                .neg();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn x_sandwich_of_symmetric_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pos = TensorField::position(3);
        for _ in 0..20 {
            let v = random_matrix(&mut rng, 3, 4).sym().unwrap();
            let s = TensorField::cross_right(&TensorField::cross_left(&pos, &v).unwrap(), &pos)
                .unwrap();
            assert_eq!(s.symmetry(), Symmetry::Symmetric);
        }
    }

    #[test]
    fn sym_skw_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 3, 3);
            let back = m.sym().unwrap().add(&m.skw().unwrap()).unwrap();
            assert_eq!(back, m);
            assert!(m.skw().unwrap().sym().unwrap().is_zero());
            assert!(m.skw().unwrap().trace().unwrap().is_zero());
        }
    }

    #[test]
    fn s1_examples() {
        // s1(I) = Iᵀ − 3I = −2I
        let i = TensorField::identity(3);
        assert_eq!(i.s1_op().unwrap(), i.scale(&Rat::from_int(-2)));

        // s1_inv inverts s1, both ways, on random matrices
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 3, 3);
            assert_eq!(m.s1_op().unwrap().s1_inv().unwrap(), m);
            assert_eq!(m.s1_inv().unwrap().s1_op().unwrap(), m);
        }

        // skew matrices are trace-free: s1 is −id on them
        let w = random_vector(&mut rng, 3, 2);
        let k = TensorField::vec_skw(&w).unwrap();
        assert_eq!(k.s1_op().unwrap(), k.neg());
    }

    #[test]
    fn k_op_examples() {
        // K(e₁) expanded directly
        let e1 = TensorField::basis_vector(3, 0);
        let k = TensorField::k_op(&e1).unwrap();
        assert_eq!(k.entry(0, 1), &(-&x(1)));
        assert_eq!(k.entry(0, 2), &(-&x(2)));
        assert_eq!(k.entry(1, 0), &x(1));
        assert_eq!(k.entry(2, 0), &x(2));
        assert!(k.entry(1, 2).is_zero());
        assert_eq!(k.symmetry(), Symmetry::Skew);

        // K(v) = Skw(v ∧ x) against the ε oracle
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pos = TensorField::position(3);
        for _ in 0..10 {
            let v = random_vector(&mut rng, 3, 3);
            let lhs = TensorField::k_op(&v).unwrap();
            let rhs = TensorField::vec_skw(&cross_oracle(&v, &pos)).unwrap();
            assert_eq!(lhs, rhs);
        }

        // K(x) = 0
        assert!(TensorField::k_op(&pos).unwrap().is_zero());
    }

    #[test]
    fn perp_examples() {
        let pos = TensorField::position(2);
        let p = TensorField::perp(&pos).unwrap();
        assert_eq!(p.comp(0), &Poly::var(2, 1));
        assert_eq!(p.comp(1), &(-&Poly::var(2, 0)));
        // perp² = −id
        assert_eq!(TensorField::perp(&p).unwrap(), pos.neg());
        let e1 = TensorField::basis_vector(2, 0);
        let pe1 = TensorField::perp(&e1).unwrap();
        assert!(pe1.comp(0).is_zero());
        assert_eq!(pe1.comp(1), &Poly::from_int(2, -1));
    }

    #[test]
    fn symmetry_validation_rejects() {
        let m = vec![Poly::zero(2), Poly::one(2), Poly::zero(2), Poly::zero(2)];
        assert!(TensorField::symmetric_matrix(m.clone()).is_err());
        assert!(TensorField::skew_matrix(m).is_err());
    }

    #[test]
    fn field_json_roundtrip_and_symmetry_contract() {
        let pos = TensorField::position(3);
        let v = TensorField::outer(&pos, &pos).unwrap();
        let j = v.to_json();
        assert_eq!(TensorField::from_json(&j).unwrap(), v);

        // declared-symmetric JSON with asymmetric entries must fail and name
        // an entry
        let mut bad = TensorField::outer(&TensorField::basis_vector(3, 0), &pos)
            .unwrap()
            .to_json();
        bad.symmetry = Some(Symmetry::Symmetric);
        let err = TensorField::from_json(&bad).unwrap_err();
        assert!(format!("{err}").contains("entry"));
    }

    #[test]
    fn wpair_requires_skew() {
        let pos = TensorField::position(3);
        let notskew = TensorField::outer(&pos, &pos).unwrap();
        assert!(WPairField::new(notskew, pos.clone()).is_err());
        let ok = WPairField::new(TensorField::k_op(&pos.clone()).unwrap(), pos);
        assert!(ok.is_ok());
    }
}
