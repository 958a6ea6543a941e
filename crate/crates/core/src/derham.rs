//! E-valued differential forms with polynomial coefficients.
//!
//! A [`Form`] of degree `k` stores one value-space-shaped coefficient per
//! strictly increasing index tuple `σ` (0-based), in the canonical `dx_σ`
//! basis. Value spaces are scalars, vectors, or skew matrices; W-valued forms
//! are pairs ([`WForm`]). The exterior derivative, the contraction/Koszul
//! operator and the Poincaré operator act coefficient-wise on the value
//! space, which is what lets the algebraic connecting operators downstream
//! act "only on the coefficients".
//!
//! The Poincaré operator is evaluated exactly through the homogeneous
//! decomposition: on a form whose coefficients are homogeneous of degree `r`
//! it is `κ/(k+r)`; general polynomial coefficients are split into layers.
//! Nonzero base points are handled by translation conjugation.
//!
//! Proxy conventions (all verified in tests):
//! - 3D 1-forms list coefficients as columns; 3D 2-forms use the cyclic slots
//!   `dx₂∧dx₃, dx₃∧dx₁, dx₁∧dx₂` as columns/components;
//! - skew-valued coefficients are vectorized with `Skw`;
//! - the W-pair identifications are `(W, v) ↦ (Skw⁻¹W, Skw v)` at degree 0
//!   and `(W, v)dx₁∧dx₂∧dx₃ ↦ (W, v)` at top degree;
//! - 2D uses the curl–div orientation: `a·dx₁ + b·dx₂ ↦ (b, −a)` per
//!   component, so the transported second-order operator is the Airy operator
//!   and the transported top map is the row-wise divergence.

use crate::polycore::{Poly, Rat};
use crate::tensorfields::{FieldError, Shape, Symmetry, TensorField};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DerhamError {
    #[error("exterior derivative undefined on top-degree forms (k = dim = {0})")]
    TopDegree(usize),
    #[error("contraction undefined on 0-forms")]
    DegreeZero,
    #[error("value space mismatch: expected {expected:?}, got {got:?}")]
    ValueMismatch { expected: ValueKind, got: ValueKind },
    #[error("degree mismatch: expected {0}, got {1}")]
    DegreeMismatch(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("no proxy for {value:?}-valued {degree}-forms in dimension {dim}")]
    UnsupportedProxy {
        dim: usize,
        degree: usize,
        value: ValueKind,
    },
    #[error("proxy value has wrong shape: {0}")]
    ProxyShape(String),
    #[error("coefficient shape invalid for value space {0:?}")]
    BadCoefficient(ValueKind),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Value space of a form's coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum ValueKind {
    Scalar,
    Vector,
    Skew,
}

/// Base point of the Poincaré/Koszul operators (default: origin).
#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint {
    pub coords: Vec<Rat>,
}

impl BasePoint {
    pub fn origin(dim: usize) -> Self {
        BasePoint {
            coords: vec![Rat::zero(); dim],
        }
    }

    pub fn new(coords: Vec<Rat>) -> Self {
        BasePoint { coords }
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn negated(&self) -> Vec<Rat> {
        self.coords.iter().map(|c| -c).collect()
    }
}

/// E-valued differential k-form with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct Form {
    dim: usize,
    degree: usize,
    value: ValueKind,
    coeffs: BTreeMap<Vec<u8>, TensorField>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.degree == other.degree
            && self.value == other.value
            && self.coeffs == other.coeffs
    }
}

impl Form {
    pub fn zero(dim: usize, degree: usize, value: ValueKind) -> Self {
        assert!(degree <= dim);
        Form {
            dim,
            degree,
            value,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_single(
        dim: usize,
        degree: usize,
        value: ValueKind,
        sigma: Vec<u8>,
        coeff: TensorField,
    ) -> Result<Self, DerhamError> {
        let mut f = Form::zero(dim, degree, value);
        f.set_coeff(sigma, coeff)?;
        Ok(f)
    }

    /// Scalar-valued 0-form from a polynomial.
    pub fn scalar0(p: Poly) -> Self {
        let dim = p.dim();
        let mut f = Form::zero(dim, 0, ValueKind::Scalar);
        f.set_coeff(vec![], TensorField::scalar(p)).unwrap();
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value_kind(&self) -> ValueKind {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<u8>, &TensorField)> {
        self.coeffs.iter()
    }

    /// Coefficient at `σ` (zero value if absent).
    pub fn coeff(&self, sigma: &[u8]) -> TensorField {
        self.coeffs
            .get(sigma)
            .cloned()
            .unwrap_or_else(|| self.zero_value())
    }

    fn zero_value(&self) -> TensorField {
        match self.value {
            ValueKind::Scalar => TensorField::zero(self.dim, Shape::Scalar),
            ValueKind::Vector => TensorField::zero(self.dim, Shape::Vector),
            ValueKind::Skew => TensorField::zero(self.dim, Shape::Matrix),
        }
    }

    fn coeff_ok(&self, c: &TensorField) -> Result<(), DerhamError> {
        if c.dim() != self.dim {
            return Err(DerhamError::DimMismatch(self.dim, c.dim()));
        }
        let ok = match self.value {
            ValueKind::Scalar => c.shape() == Shape::Scalar,
            ValueKind::Vector => c.shape() == Shape::Vector,
            ValueKind::Skew => {
                c.shape() == Shape::Matrix && (c.symmetry() == Symmetry::Skew || c.is_zero())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(DerhamError::BadCoefficient(self.value))
        }
    }

    /// Set (replace) the coefficient at `σ`; validates tuple and value shape.
    pub fn set_coeff(&mut self, sigma: Vec<u8>, coeff: TensorField) -> Result<(), DerhamError> {
        assert_eq!(sigma.len(), self.degree, "index tuple length != degree");
        assert!(
            sigma.windows(2).all(|w| w[0] < w[1]) && sigma.iter().all(|&i| (i as usize) < self.dim),
            "index tuple must be strictly increasing within range"
        );
        self.coeff_ok(&coeff)?;
        if coeff.is_zero() {
            self.coeffs.remove(&sigma);
        } else {
            self.coeffs.insert(sigma, coeff);
        }
        Ok(())
    }

    fn add_coeff(&mut self, sigma: Vec<u8>, coeff: TensorField) -> Result<(), DerhamError> {
        let cur = self.coeff(&sigma);
        let sum = cur.add(&coeff)?;
        self.set_coeff(sigma, sum)
    }

    pub fn add(&self, other: &Self) -> Result<Self, DerhamError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_coeff(s.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DerhamError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn map_coeffs(&self, f: impl Fn(&TensorField) -> TensorField) -> Self {
        let mut out = Form::zero(self.dim, self.degree, self.value);
        for (s, c) in &self.coeffs {
            let nc = f(c);
            if !nc.is_zero() {
                out.set_coeff(s.clone(), nc)
                    .expect("mapped coefficient invalid");
            }
        }
        out
    }

    /// Same, but allowed to change the value space.
    pub fn map_coeffs_to(
        &self,
        value: ValueKind,
        f: impl Fn(&TensorField) -> Result<TensorField, DerhamError>,
    ) -> Result<Self, DerhamError> {
        let mut out = Form::zero(self.dim, self.degree, value);
        for (s, c) in &self.coeffs {
            let nc = f(c)?;
            if !nc.is_zero() {
                out.set_coeff(s.clone(), nc)?;
            }
        }
        Ok(out)
    }

    fn check_same(&self, other: &Self) -> Result<(), DerhamError> {
        if self.dim != other.dim {
            return Err(DerhamError::DimMismatch(self.dim, other.dim));
        }
        if self.degree != other.degree {
            return Err(DerhamError::DegreeMismatch(self.degree, other.degree));
        }
        if self.value != other.value {
            return Err(DerhamError::ValueMismatch {
                expected: self.value,
                got: other.value,
            });
        }
        Ok(())
    }

    /// Exterior derivative; increases the degree by one.
    pub fn ext_d(&self) -> Result<Form, DerhamError> {
        if self.degree == self.dim {
            return Err(DerhamError::TopDegree(self.dim));
        }
        let mut out = Form::zero(self.dim, self.degree + 1, self.value);
        for (sigma, coeff) in &self.coeffs {
            for i in 0..self.dim as u8 {
                if sigma.contains(&i) {
                    continue;
                }
                let pos = sigma.iter().filter(|&&s| s < i).count();
                let mut new_sigma = sigma.clone();
                new_sigma.insert(pos, i);
                let mut dc = coeff.map_entries(|p| p.partial(i as usize));
                if pos % 2 == 1 {
                    dc = dc.neg();
                }
                out.add_coeff(new_sigma, dc)?;
            }
        }
        Ok(out)
    }

    /// Interior product `i_v` with a polynomial vector field.
    pub fn koszul_contract(&self, v: &TensorField) -> Result<Form, DerhamError> {
        if self.degree == 0 {
            return Err(DerhamError::DegreeZero);
        }
        if v.shape() != Shape::Vector || v.dim() != self.dim {
            return Err(DerhamError::ProxyShape(
                "contraction vector must be a vector field of matching dim".into(),
            ));
        }
        let mut out = Form::zero(self.dim, self.degree - 1, self.value);
        for (sigma, coeff) in &self.coeffs {
            for (j, &s) in sigma.iter().enumerate() {
                let mut new_sigma = sigma.clone();
                new_sigma.remove(j);
                let mut c = coeff.scale_poly(v.comp(s as usize));
                if j % 2 == 1 {
                    c = c.neg();
                }
                out.add_coeff(new_sigma, c)?;
            }
        }
        Ok(out)
    }

    /// Koszul operator `κ = i_{x−x₀}`.
    pub fn koszul(&self, base: &BasePoint) -> Result<Form, DerhamError> {
        let dim = self.dim;
        let v = TensorField::vector(
            (0..dim)
                .map(|i| &Poly::var(dim, i) - &Poly::constant(dim, base.coords[i].clone()))
                .collect(),
        )?;
        self.koszul_contract(&v)
    }

    /// Split into layers of homogeneous coefficient degree.
    fn homogeneous_layers(&self) -> BTreeMap<u32, Form> {
        let mut layers: BTreeMap<u32, Form> = BTreeMap::new();
        for (sigma, coeff) in &self.coeffs {
            for r in coeff.degrees() {
                let part = coeff.homogeneous_part(r);
                if part.is_zero() {
                    continue;
                }
                layers
                    .entry(r)
                    .or_insert_with(|| Form::zero(self.dim, self.degree, self.value))
                    .add_coeff(sigma.clone(), part)
                    .expect("layer coefficient invalid");
            }
        }
        layers
    }

    /// Entry-wise translation of all coefficient polynomials.
    pub fn shift(&self, a: &[Rat]) -> Self {
        self.map_coeffs(|c| c.shift(a))
    }

    /// The Poincaré operator: the weighted radial integral of the contraction,
    /// evaluated exactly layer by layer (`κ/(k+r)` on coefficients of
    /// homogeneous degree `r`). A nonzero base point is handled by
    /// translation conjugation.
    pub fn poincare(&self, base: &BasePoint) -> Result<Form, DerhamError> {
        if self.degree == 0 {
            return Err(DerhamError::DegreeZero);
        }
        if !base.is_origin() {
            let to_origin = self.shift(&base.coords);
            let p = to_origin.poincare(&BasePoint::origin(self.dim))?;
            return Ok(p.shift(&base.negated()));
        }
        let k = self.degree as i64;
        let mut out = Form::zero(self.dim, self.degree - 1, self.value);
        for (r, layer) in self.homogeneous_layers() {
            let kappa = layer.koszul(&BasePoint::origin(self.dim))?;
            let factor = Rat::new(1, k + r as i64).expect("k + r >= 1");
            out = out.add(&kappa.scale(&factor))?;
        }
        Ok(out)
    }

    /// Max coefficient degree (`None` when zero).
    pub fn max_coeff_degree(&self) -> Option<u32> {
        self.coeffs.values().filter_map(|c| c.total_degree()).max()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (sigma, coeff) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", coeff)?;
            for s in sigma {
                write!(f, " dx{}", s + 1)?;
            }
        }
        Ok(())
    }
}

/// W-valued form: a pair (skew-matrix-valued, vector-valued) of equal degree.
#[derive(Clone, Debug, PartialEq)]
pub struct WForm {
    pub skew: Form,
    pub vec: Form,
}

impl WForm {
    pub fn new(skew: Form, vec: Form) -> Result<Self, DerhamError> {
        if skew.dim() != vec.dim() {
            return Err(DerhamError::DimMismatch(skew.dim(), vec.dim()));
        }
        if skew.degree() != vec.degree() {
            return Err(DerhamError::DegreeMismatch(skew.degree(), vec.degree()));
        }
        if skew.value_kind() != ValueKind::Skew {
            return Err(DerhamError::ValueMismatch {
                expected: ValueKind::Skew,
                got: skew.value_kind(),
            });
        }
        if vec.value_kind() != ValueKind::Vector {
            return Err(DerhamError::ValueMismatch {
                expected: ValueKind::Vector,
                got: vec.value_kind(),
            });
        }
        Ok(WForm { skew, vec })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        WForm {
            skew: Form::zero(dim, degree, ValueKind::Skew),
            vec: Form::zero(dim, degree, ValueKind::Vector),
        }
    }

    pub fn dim(&self) -> usize {
        self.skew.dim()
    }

    pub fn degree(&self) -> usize {
        self.skew.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.skew.is_zero() && self.vec.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self, DerhamError> {
        Ok(WForm {
            skew: self.skew.add(&other.skew)?,
            vec: self.vec.add(&other.vec)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DerhamError> {
        Ok(WForm {
            skew: self.skew.sub(&other.skew)?,
            vec: self.vec.sub(&other.vec)?,
        })
    }

    pub fn neg(&self) -> Self {
        WForm {
            skew: self.skew.neg(),
            vec: self.vec.neg(),
        }
    }
}

// ---------------------------------------------------------------------------
// Vector/matrix proxies
// ---------------------------------------------------------------------------

/// A proxied form: a single field or a (skew, vector) pair.
#[derive(Clone, Debug, PartialEq)]
pub enum ProxyValue {
    Field(TensorField),
    Pair(TensorField, TensorField),
}

impl ProxyValue {
    pub fn field(self) -> Result<TensorField, DerhamError> {
        match self {
            ProxyValue::Field(f) => Ok(f),
            ProxyValue::Pair(..) => Err(DerhamError::ProxyShape("expected single field".into())),
        }
    }

    pub fn pair(self) -> Result<(TensorField, TensorField), DerhamError> {
        match self {
            ProxyValue::Pair(a, b) => Ok((a, b)),
            ProxyValue::Field(_) => Err(DerhamError::ProxyShape("expected pair".into())),
        }
    }
}

/// The cyclic 2-form slots in 3D: component `i` of the proxy corresponds to
/// the stored tuple with the given sign (`dx₃∧dx₁ = −dx₁∧dx₃`).
const TWO_FORM_SLOTS_3D: [(&[u8], i64); 3] = [(&[1, 2], 1), (&[0, 2], -1), (&[0, 1], 1)];

fn unsupported(form: &Form) -> DerhamError {
    DerhamError::UnsupportedProxy {
        dim: form.dim(),
        degree: form.degree(),
        value: form.value_kind(),
    }
}

/// Vector/matrix proxy of a scalar-, vector- or skew-valued form.
pub fn proxy(form: &Form) -> Result<ProxyValue, DerhamError> {
    let dim = form.dim();
    let k = form.degree();
    let f = match (dim, form.value_kind(), k) {
        (_, ValueKind::Scalar, 0) => form.coeff(&[]),
        (3, ValueKind::Scalar, 1) => TensorField::vector(
            (0..3)
                .map(|i| form.coeff(&[i as u8]).as_scalar().cloned())
                .collect::<Result<_, _>>()?,
        )?,
        (3, ValueKind::Scalar, 2) => TensorField::vector(
            TWO_FORM_SLOTS_3D
                .iter()
                .map(|(sigma, sign)| {
                    Ok(form.coeff(sigma).as_scalar()?.scale(&Rat::from_int(*sign)))
                })
                .collect::<Result<Vec<_>, DerhamError>>()?,
        )?,
        (3, ValueKind::Scalar, 3) => form.coeff(&[0, 1, 2]),
        // 2D skew values are identified with their χ-scalar
        (2, ValueKind::Skew, 0) => {
            TensorField::scalar(TensorField::skw_scalar_2d(&skew_or_zero(&form.coeff(&[])))?)
        }
        (2, ValueKind::Skew, 2) => TensorField::scalar(TensorField::skw_scalar_2d(&skew_or_zero(
            &form.coeff(&[0, 1]),
        ))?),
        (_, ValueKind::Vector, 0) => form.coeff(&[]),
        (3, ValueKind::Vector, 1) => {
            let cols: Vec<TensorField> = (0..3).map(|j| form.coeff(&[j as u8])).collect();
            TensorField::from_columns(&cols)?
        }
        (3, ValueKind::Vector, 2) => {
            let cols: Vec<TensorField> = TWO_FORM_SLOTS_3D
                .iter()
                .map(|(sigma, sign)| form.coeff(sigma).scale(&Rat::from_int(*sign)))
                .collect();
            TensorField::from_columns(&cols)?
        }
        (3, ValueKind::Vector, 3) => form.coeff(&[0, 1, 2]),
        (_, ValueKind::Skew, 0) => form.coeff(&[]),
        (3, ValueKind::Skew, 1) => {
            let cols: Vec<TensorField> = (0..3)
                .map(|j| TensorField::skw_vec(&skew_or_zero(&form.coeff(&[j as u8]))))
                .collect::<Result<_, _>>()?;
            TensorField::from_columns(&cols)?
        }
        (3, ValueKind::Skew, 2) => {
            let cols: Vec<TensorField> = TWO_FORM_SLOTS_3D
                .iter()
                .map(|(sigma, sign)| {
                    Ok(TensorField::skw_vec(&skew_or_zero(&form.coeff(sigma)))?
                        .scale(&Rat::from_int(*sign)))
                })
                .collect::<Result<Vec<_>, DerhamError>>()?;
            TensorField::from_columns(&cols)?
        }
        (3, ValueKind::Skew, 3) => form.coeff(&[0, 1, 2]),
        // 2D, curl–div orientation
        (2, ValueKind::Scalar, 1) => {
            let a = form.coeff(&[0]).as_scalar()?.clone();
            let b = form.coeff(&[1]).as_scalar()?.clone();
            TensorField::vector(vec![b, -&a])?
        }
        (2, ValueKind::Scalar, 2) => form.coeff(&[0, 1]),
        (2, ValueKind::Vector, 1) => {
            let w1 = form.coeff(&[0]);
            let w2 = form.coeff(&[1]);
            // rows: (w_i2, −w_i1)
            TensorField::from_columns(&[w2, w1.neg()])?
        }
        (2, ValueKind::Vector, 2) => form.coeff(&[0, 1]),
        _ => return Err(unsupported(form)),
    };
    Ok(ProxyValue::Field(f))
}

fn skew_or_zero(c: &TensorField) -> TensorField {
    if c.is_zero() {
        TensorField::zero(c.dim(), Shape::Matrix)
    } else {
        c.clone()
    }
}

/// Inverse of [`proxy`]: rebuild the form of the given signature.
pub fn unproxy(el: &TensorField, degree: usize, value: ValueKind) -> Result<Form, DerhamError> {
    let dim = el.dim();
    let mut form = Form::zero(dim, degree, value);
    match (dim, value, degree) {
        (2, ValueKind::Skew, 0) => {
            form.set_coeff(vec![], TensorField::scalar_skw_2d(el.as_scalar()?)?)?;
        }
        (2, ValueKind::Skew, 2) => {
            form.set_coeff(vec![0, 1], TensorField::scalar_skw_2d(el.as_scalar()?)?)?;
        }
        (_, ValueKind::Scalar, 0) | (_, ValueKind::Vector, 0) | (_, ValueKind::Skew, 0) => {
            form.set_coeff(vec![], el.clone())?;
        }
        (3, ValueKind::Scalar, 1) => {
            for i in 0..3u8 {
                form.set_coeff(vec![i], TensorField::scalar(el.comp(i as usize).clone()))?;
            }
        }
        (3, ValueKind::Scalar, 2) => {
            for (i, (sigma, sign)) in TWO_FORM_SLOTS_3D.iter().enumerate() {
                form.set_coeff(
                    sigma.to_vec(),
                    TensorField::scalar(el.comp(i).scale(&Rat::from_int(*sign))),
                )?;
            }
        }
        (3, ValueKind::Scalar, 3) | (3, ValueKind::Vector, 3) | (3, ValueKind::Skew, 3) => {
            form.set_coeff(vec![0, 1, 2], el.clone())?;
        }
        (3, ValueKind::Vector, 1) => {
            for j in 0..3u8 {
                form.set_coeff(vec![j], el.column(j as usize)?)?;
            }
        }
        (3, ValueKind::Vector, 2) => {
            for (i, (sigma, sign)) in TWO_FORM_SLOTS_3D.iter().enumerate() {
                form.set_coeff(sigma.to_vec(), el.column(i)?.scale(&Rat::from_int(*sign)))?;
            }
        }
        (3, ValueKind::Skew, 1) => {
            for j in 0..3u8 {
                form.set_coeff(vec![j], TensorField::vec_skw(&el.column(j as usize)?)?)?;
            }
        }
        (3, ValueKind::Skew, 2) => {
            for (i, (sigma, sign)) in TWO_FORM_SLOTS_3D.iter().enumerate() {
                form.set_coeff(
                    sigma.to_vec(),
                    TensorField::vec_skw(&el.column(i)?.scale(&Rat::from_int(*sign)))?,
                )?;
            }
        }
        (2, ValueKind::Scalar, 1) => {
            form.set_coeff(vec![0], TensorField::scalar(-el.comp(1)))?;
            form.set_coeff(vec![1], TensorField::scalar(el.comp(0).clone()))?;
        }
        (2, ValueKind::Scalar, 2) | (2, ValueKind::Vector, 2) => {
            form.set_coeff(vec![0, 1], el.clone())?;
        }
        (2, ValueKind::Vector, 1) => {
            form.set_coeff(vec![0], el.column(1)?.neg())?;
            form.set_coeff(vec![1], el.column(0)?)?;
        }
        _ => {
            return Err(DerhamError::UnsupportedProxy { dim, degree, value });
        }
    }
    Ok(form)
}

/// W-pair proxy. Degree 0 in 3D swaps the identifications
/// (`(W, v) ↦ (Skw⁻¹W, Skw v)`); top degree keeps them.
pub fn proxy_w(form: &WForm) -> Result<(TensorField, TensorField), DerhamError> {
    let dim = form.dim();
    let k = form.degree();
    match (dim, k) {
        (3, 0) => {
            let w = skew_or_zero(&form.skew.coeff(&[]));
            let v = form.vec.coeff(&[]);
            Ok((TensorField::skw_vec(&w)?, TensorField::vec_skw(&v)?))
        }
        (3, 3) => Ok((
            skew_or_zero(&form.skew.coeff(&[0, 1, 2])),
            form.vec.coeff(&[0, 1, 2]),
        )),
        (2, 2) => Ok((
            skew_or_zero(&form.skew.coeff(&[0, 1])),
            form.vec.coeff(&[0, 1]),
        )),
        _ => Err(DerhamError::UnsupportedProxy {
            dim,
            degree: k,
            value: ValueKind::Skew,
        }),
    }
}

/// Inverse of [`proxy_w`].
pub fn unproxy_w(
    first: &TensorField,
    second: &TensorField,
    dim: usize,
    degree: usize,
) -> Result<WForm, DerhamError> {
    match (dim, degree) {
        (3, 0) => {
            // first = vector (Skw⁻¹ of the skew part), second = skew matrix
            let skew_c = TensorField::vec_skw(first)?;
            let vec_c = TensorField::skw_vec(&skew_or_zero(second))?;
            let mut skew = Form::zero(dim, 0, ValueKind::Skew);
            skew.set_coeff(vec![], skew_c)?;
            let mut vec = Form::zero(dim, 0, ValueKind::Vector);
            vec.set_coeff(vec![], vec_c)?;
            WForm::new(skew, vec)
        }
        (3, 3) => {
            let mut skew = Form::zero(dim, 3, ValueKind::Skew);
            skew.set_coeff(vec![0, 1, 2], first.clone())?;
            let mut vec = Form::zero(dim, 3, ValueKind::Vector);
            vec.set_coeff(vec![0, 1, 2], second.clone())?;
            WForm::new(skew, vec)
        }
        (2, 2) => {
            let mut skew = Form::zero(dim, 2, ValueKind::Skew);
            skew.set_coeff(vec![0, 1], first.clone())?;
            let mut vec = Form::zero(dim, 2, ValueKind::Vector);
            vec.set_coeff(vec![0, 1], second.clone())?;
            WForm::new(skew, vec)
        }
        _ => Err(DerhamError::UnsupportedProxy {
            dim,
            degree,
            value: ValueKind::Skew,
        }),
    }
}
