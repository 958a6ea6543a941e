//! Algebraic connecting operators and mechanical derivation of the elasticity
//! Poincaré operators.
//!
//! The construction runs over a stack of complexes:
//!
//! 1. the W-valued de Rham complex with block differential
//!    `A = [[d, −S], [0, d]]` and block homotopy `B = [[p, −T], [0, p]]`,
//!    where `K(ω) = x⊗ω − ω⊗x` acts on coefficients, `S = dK − Kd` and
//!    `T = pK − Kp`;
//! 2. the constrained Γ-subcomplex (one position pinned by `μ = S⁻¹dω`, the
//!    next by `ω = 0`);
//! 3. the reduced complex over single-component forms;
//! 4. its vector/matrix proxy picture;
//! 5. the symmetric bottom row `def → inc → div` (`air → div` in 2D).
//!
//! Each descent is a homotopy transfer `p̃ = Π ∘ p ∘ Π†` whose hypotheses
//! (commuting projections and lifts, right-inverse property) are *verified on
//! a monomial probe basis* before the transferred operators are accepted, and
//! whose conclusion (the homotopy identity on the subcomplex) is checked
//! after. Nothing about the diagram is assumed.
//!
//! [`resolve_signs`] then reconciles the derived operators with the
//! closed-form operators, which carry an explicit sign slot on each
//! correction term: it searches all slot assignments for the unique one
//! making printed ≡ derived on the probe basis, and reports ambiguity or
//! failure instead of guessing.

use crate::derham::{
    proxy, proxy_w, unproxy, unproxy_w, BasePoint, DerhamError, Form, ProxyValue, ValueKind, WForm,
};
use crate::diffcalc::{self, DiffError};
use crate::elasticity::{self, Sign};
use crate::polycore::Rat;
use crate::probe;
use crate::tensorfields::{FieldError, Shape, TensorField};
use serde::Serialize;
use serde_json::json;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum BggError {
    #[error(transparent)]
    Derham(#[from] DerhamError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("operator applied to wrong value kind: expected {expected}, got {got}")]
    WrongValue { expected: String, got: String },
    #[error("{op} requires form degree {expected}, got {got}")]
    WrongDegree {
        op: String,
        expected: String,
        got: usize,
    },
    #[error("block operator index {k} out of range for dimension {dim}")]
    BadBlockIndex { k: usize, dim: usize },
    #[error(
        "commutation check `{check}` failed at level {level}, probe {probe}: lhs = {lhs}, rhs = {rhs}"
    )]
    CommutationFailure {
        check: &'static str,
        level: usize,
        probe: usize,
        lhs: String,
        rhs: String,
    },
    #[error("transferred homotopy identity failed at level {level}, probe {probe}")]
    HomotopyFailure { level: usize, probe: usize },
    #[error("missing lift at level {0}")]
    MissingLift(usize),
}

// ---------------------------------------------------------------------------
// Values and operator expressions
// ---------------------------------------------------------------------------

/// Anything the operator pipeline can carry.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Field(TensorField),
    Pair(TensorField, TensorField),
    Form(Form),
    WForm(WForm),
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Field(_) => "field",
            Value::Pair(..) => "pair",
            Value::Form(_) => "form",
            Value::WForm(_) => "w-form",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Field(f) => f.is_zero(),
            Value::Pair(a, b) => a.is_zero() && b.is_zero(),
            Value::Form(f) => f.is_zero(),
            Value::WForm(w) => w.is_zero(),
        }
    }

    pub fn add(&self, other: &Value) -> Result<Value, BggError> {
        match (self, other) {
            (Value::Field(a), Value::Field(b)) => Ok(Value::Field(a.add(b)?)),
            (Value::Pair(a1, a2), Value::Pair(b1, b2)) => Ok(Value::Pair(a1.add(b1)?, a2.add(b2)?)),
            (Value::Form(a), Value::Form(b)) => Ok(Value::Form(a.add(b)?)),
            (Value::WForm(a), Value::WForm(b)) => Ok(Value::WForm(a.add(b)?)),
            _ => Err(BggError::WrongValue {
                expected: self.kind_name().into(),
                got: other.kind_name().into(),
            }),
        }
    }

    pub fn sub(&self, other: &Value) -> Result<Value, BggError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Field(f) => Value::Field(f.neg()),
            Value::Pair(a, b) => Value::Pair(a.neg(), b.neg()),
            Value::Form(f) => Value::Form(f.neg()),
            Value::WForm(w) => Value::WForm(w.neg()),
        }
    }

    pub fn scale(&self, r: &Rat) -> Value {
        match self {
            Value::Field(f) => Value::Field(f.scale(r)),
            Value::Pair(a, b) => Value::Pair(a.scale(r), b.scale(r)),
            Value::Form(f) => Value::Form(f.scale(r)),
            Value::WForm(w) => Value::WForm(WForm {
                skew: w.skew.scale(r),
                vec: w.vec.scale(r),
            }),
        }
    }

    pub fn as_field(&self) -> Result<&TensorField, BggError> {
        match self {
            Value::Field(f) => Ok(f),
            _ => Err(BggError::WrongValue {
                expected: "field".into(),
                got: self.kind_name().into(),
            }),
        }
    }

    pub fn as_form(&self) -> Result<&Form, BggError> {
        match self {
            Value::Form(f) => Ok(f),
            _ => Err(BggError::WrongValue {
                expected: "form".into(),
                got: self.kind_name().into(),
            }),
        }
    }

    pub fn as_wform(&self) -> Result<&WForm, BggError> {
        match self {
            Value::WForm(w) => Ok(w),
            _ => Err(BggError::WrongValue {
                expected: "w-form".into(),
                got: self.kind_name().into(),
            }),
        }
    }

    fn render_short(&self) -> String {
        let s = match self {
            Value::Field(f) => format!("{f}"),
            Value::Pair(a, b) => format!("({a}, {b})"),
            Value::Form(f) => format!("{f}"),
            Value::WForm(w) => format!("({}, {})", w.skew, w.vec),
        };
        if s.len() > 160 {
            format!("{}…", &s[..160])
        } else {
            s
        }
    }
}

/// Primitive operators of the pipeline.
#[derive(Clone, Debug, PartialEq)]
pub enum PrimOp {
    /// exterior derivative (componentwise on W-valued forms)
    ExtD,
    /// Poincaré operator with base point at the origin
    Poincare,
    /// Koszul contraction with the position field
    Koszul,
    /// `K(ω) = x⊗ω − ω⊗x` on the coefficients of a vector-valued form
    KOp,
    /// `S = dK − Kd`
    SOp,
    /// `T = pK − Kp`
    TOp,
    /// inverse of the bijective `S` (3D: 2-forms → 1-forms; 2D: 1-forms → 0-forms)
    SInv,
    /// block differential `(ω, μ) ↦ (dω − Sμ, dμ)`
    BlockA,
    /// block homotopy `(ω, μ) ↦ (pω − Tμ, pμ)`
    BlockB,
    /// projection onto the S-constrained subspace: `(ω, μ) ↦ (ω, S⁻¹dω)`
    GammaConstrainProj,
    /// lift of a skew-valued form into the S-constrained subspace
    GammaConstrainLift,
    /// projection onto the `ω = 0` subspace: `(ω, μ) ↦ (0, μ + dS⁻¹ω)`
    GammaZeroProj,
    /// lift `μ ↦ (0, μ)`
    GammaZeroLift,
    /// first (skew) component of a W-valued form
    WSkewPart,
    /// second (vector) component of a W-valued form
    WVecPart,
    /// vector/matrix proxy of a form or W-form
    Proxy,
    /// inverse proxy with target signature
    UnproxyForm {
        degree: usize,
        value: ValueKind,
    },
    UnproxyW {
        degree: usize,
    },
    /// symmetric part of a matrix field
    SymProject,
    /// inclusion of a (symmetric) matrix field
    InclField,
    /// `(u, W) ↦ u`
    PairFirst,
    /// `(W, u) ↦ u − ½·div W`. The ½ makes the square against `sym` commute:
    /// the skew component produced by the connecting operator is the
    /// unnormalized `M − Mᵀ` under this crate's `Skw` identification, so
    /// `u − ½·div W = div(sym M)` on general matrix fields.
    PairSecondMinusDiv,
    /// `u ↦ (0, u)`
    LiftPairZeroSkew,
    /// bottom-row differentials
    Def,
    Inc,
    DivRows,
    Air,
}

impl PrimOp {
    pub fn name(&self) -> String {
        match self {
            PrimOp::ExtD => "d".into(),
            PrimOp::Poincare => "p".into(),
            PrimOp::Koszul => "kappa".into(),
            PrimOp::KOp => "K".into(),
            PrimOp::SOp => "S".into(),
            PrimOp::TOp => "T".into(),
            PrimOp::SInv => "S^-1".into(),
            PrimOp::BlockA => "A".into(),
            PrimOp::BlockB => "B".into(),
            PrimOp::GammaConstrainProj => "proj_gamma_s".into(),
            PrimOp::GammaConstrainLift => "lift_gamma_s".into(),
            PrimOp::GammaZeroProj => "proj_gamma_0".into(),
            PrimOp::GammaZeroLift => "lift_gamma_0".into(),
            PrimOp::WSkewPart => "skew_part".into(),
            PrimOp::WVecPart => "vec_part".into(),
            PrimOp::Proxy => "J".into(),
            PrimOp::UnproxyForm { degree, value } => format!("J^-1[{degree},{value:?}]"),
            PrimOp::UnproxyW { degree } => format!("J^-1[W,{degree}]"),
            PrimOp::SymProject => "sym".into(),
            PrimOp::InclField => "incl".into(),
            PrimOp::PairFirst => "fst".into(),
            PrimOp::PairSecondMinusDiv => "snd-div".into(),
            PrimOp::LiftPairZeroSkew => "pair0".into(),
            PrimOp::Def => "def".into(),
            PrimOp::Inc => "inc".into(),
            PrimOp::DivRows => "div".into(),
            PrimOp::Air => "air".into(),
        }
    }

    fn apply(&self, v: &Value) -> Result<Value, BggError> {
        match self {
            PrimOp::ExtD => match v {
                Value::Form(f) => Ok(Value::Form(f.ext_d()?)),
                Value::WForm(w) => Ok(Value::WForm(WForm::new(w.skew.ext_d()?, w.vec.ext_d()?)?)),
                _ => wrong("form", v),
            },
            PrimOp::Poincare => match v {
                Value::Form(f) => Ok(Value::Form(f.poincare(&BasePoint::origin(f.dim()))?)),
                Value::WForm(w) => {
                    let o = BasePoint::origin(w.dim());
                    Ok(Value::WForm(WForm::new(
                        w.skew.poincare(&o)?,
                        w.vec.poincare(&o)?,
                    )?))
                }
                _ => wrong("form", v),
            },
            PrimOp::Koszul => match v {
                Value::Form(f) => Ok(Value::Form(f.koszul(&BasePoint::origin(f.dim()))?)),
                Value::WForm(w) => {
                    let o = BasePoint::origin(w.dim());
                    Ok(Value::WForm(WForm::new(
                        w.skew.koszul(&o)?,
                        w.vec.koszul(&o)?,
                    )?))
                }
                _ => wrong("form", v),
            },
            PrimOp::KOp => Ok(Value::Form(k_form_op(v.as_form()?)?)),
            PrimOp::SOp => Ok(Value::Form(s_op(v.as_form()?)?)),
            PrimOp::TOp => Ok(Value::Form(t_op(v.as_form()?)?)),
            PrimOp::SInv => Ok(Value::Form(s_inv(v.as_form()?)?)),
            PrimOp::BlockA => Ok(Value::WForm(block_a(v.as_wform()?)?)),
            PrimOp::BlockB => Ok(Value::WForm(block_b(v.as_wform()?)?)),
            PrimOp::GammaConstrainProj => {
                let w = v.as_wform()?;
                Ok(Value::WForm(WForm::new(
                    w.skew.clone(),
                    s_inv(&w.skew.ext_d()?)?,
                )?))
            }
            PrimOp::GammaConstrainLift => {
                let f = v.as_form()?;
                if f.value_kind() != ValueKind::Skew {
                    return wrong("skew-valued form", v);
                }
                Ok(Value::WForm(WForm::new(f.clone(), s_inv(&f.ext_d()?)?)?))
            }
            PrimOp::GammaZeroProj => {
                let w = v.as_wform()?;
                let corrected = w.vec.add(&s_inv(&w.skew)?.ext_d()?)?;
                Ok(Value::WForm(WForm::new(
                    Form::zero(w.dim(), w.degree(), ValueKind::Skew),
                    corrected,
                )?))
            }
            PrimOp::GammaZeroLift => {
                let f = v.as_form()?;
                if f.value_kind() != ValueKind::Vector {
                    return wrong("vector-valued form", v);
                }
                Ok(Value::WForm(WForm::new(
                    Form::zero(f.dim(), f.degree(), ValueKind::Skew),
                    f.clone(),
                )?))
            }
            PrimOp::WSkewPart => Ok(Value::Form(v.as_wform()?.skew.clone())),
            PrimOp::WVecPart => Ok(Value::Form(v.as_wform()?.vec.clone())),
            PrimOp::Proxy => match v {
                Value::Form(f) => match proxy(f)? {
                    ProxyValue::Field(el) => Ok(Value::Field(el)),
                    ProxyValue::Pair(a, b) => Ok(Value::Pair(a, b)),
                },
                Value::WForm(w) => {
                    let (a, b) = proxy_w(w)?;
                    Ok(Value::Pair(a, b))
                }
                _ => wrong("form", v),
            },
            PrimOp::UnproxyForm { degree, value } => {
                Ok(Value::Form(unproxy(v.as_field()?, *degree, *value)?))
            }
            PrimOp::UnproxyW { degree } => match v {
                Value::Pair(a, b) => {
                    let dim = a.dim();
                    Ok(Value::WForm(unproxy_w(a, b, dim, *degree)?))
                }
                _ => wrong("pair", v),
            },
            PrimOp::SymProject => Ok(Value::Field(v.as_field()?.sym()?)),
            PrimOp::InclField => Ok(Value::Field(v.as_field()?.clone())),
            PrimOp::PairFirst => match v {
                Value::Pair(a, _) => Ok(Value::Field(a.clone())),
                _ => wrong("pair", v),
            },
            PrimOp::PairSecondMinusDiv => match v {
                Value::Pair(w, u) => {
                    let half_div = diffcalc::div_rows(w)?.scale(&Rat::new(1, 2).unwrap());
                    Ok(Value::Field(u.sub(&half_div)?))
                }
                _ => wrong("pair", v),
            },
            PrimOp::LiftPairZeroSkew => {
                let u = v.as_field()?;
                if u.shape() != Shape::Vector {
                    return wrong("vector field", v);
                }
                Ok(Value::Pair(
                    TensorField::zero(u.dim(), Shape::Matrix),
                    u.clone(),
                ))
            }
            PrimOp::Def => Ok(Value::Field(diffcalc::def_op(v.as_field()?)?)),
            PrimOp::Inc => Ok(Value::Field(diffcalc::inc_op(v.as_field()?)?)),
            PrimOp::DivRows => Ok(Value::Field(diffcalc::div_rows(v.as_field()?)?)),
            PrimOp::Air => Ok(Value::Field(diffcalc::air_op(v.as_field()?)?)),
        }
    }
}

fn wrong(expected: &str, v: &Value) -> Result<Value, BggError> {
    Err(BggError::WrongValue {
        expected: expected.into(),
        got: v.kind_name().into(),
    })
}

/// Composable linear-operator expression.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Identity,
    Prim(PrimOp),
    /// `Compose([f, g, h])` is `f ∘ g ∘ h` (rightmost applied first).
    Compose(Vec<OpExpr>),
    Sum(Vec<OpExpr>),
    Neg(Box<OpExpr>),
    Scale(Rat, Box<OpExpr>),
}

impl OpExpr {
    pub fn prim(p: PrimOp) -> Self {
        OpExpr::Prim(p)
    }

    pub fn compose(ops: Vec<OpExpr>) -> Self {
        OpExpr::Compose(ops)
    }

    pub fn apply(&self, v: &Value) -> Result<Value, BggError> {
        match self {
            OpExpr::Identity => Ok(v.clone()),
            OpExpr::Prim(p) => p.apply(v),
            OpExpr::Compose(ops) => {
                let mut cur = v.clone();
                for op in ops.iter().rev() {
                    cur = op.apply(&cur)?;
                }
                Ok(cur)
            }
            OpExpr::Sum(ops) => {
                let mut acc: Option<Value> = None;
                for op in ops {
                    let r = op.apply(v)?;
                    acc = Some(match acc {
                        None => r,
                        Some(a) => a.add(&r)?,
                    });
                }
                Ok(acc.expect("Sum of no operators"))
            }
            OpExpr::Neg(op) => Ok(op.apply(v)?.neg()),
            OpExpr::Scale(r, op) => Ok(op.apply(v)?.scale(r)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            OpExpr::Identity => json!({"op": "id"}),
            OpExpr::Prim(p) => json!({"op": p.name()}),
            OpExpr::Compose(ops) => json!({
                "op": "compose",
                "args": ops.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
            }),
            OpExpr::Sum(ops) => json!({
                "op": "sum",
                "args": ops.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
            }),
            OpExpr::Neg(op) => json!({"op": "neg", "arg": op.to_json()}),
            OpExpr::Scale(r, op) => json!({
                "op": "scale",
                "factor": format!("{r}"),
                "arg": op.to_json(),
            }),
        }
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::Identity => write!(f, "id"),
            OpExpr::Prim(p) => write!(f, "{}", p.name()),
            OpExpr::Compose(ops) => {
                let parts: Vec<String> = ops.iter().map(|o| format!("{o}")).collect();
                write!(f, "{}", parts.join(" . "))
            }
            OpExpr::Sum(ops) => {
                let parts: Vec<String> = ops.iter().map(|o| format!("{o}")).collect();
                write!(f, "({})", parts.join(" + "))
            }
            OpExpr::Neg(op) => write!(f, "-({op})"),
            OpExpr::Scale(r, op) => write!(f, "{r}*({op})"),
        }
    }
}

// ---------------------------------------------------------------------------
// The connecting operators
// ---------------------------------------------------------------------------

/// `K` applied to the coefficients of a vector-valued form.
pub fn k_form_op(mu: &Form) -> Result<Form, BggError> {
    if mu.value_kind() != ValueKind::Vector {
        return Err(BggError::WrongValue {
            expected: "vector-valued form".into(),
            got: format!("{:?}-valued form", mu.value_kind()),
        });
    }
    Ok(mu.map_coeffs_to(ValueKind::Skew, |c| Ok(TensorField::k_op(c)?))?)
}

/// `S = d∘K − K∘d`: vector-valued k-forms to skew-valued (k+1)-forms.
pub fn s_op(mu: &Form) -> Result<Form, BggError> {
    let dk = k_form_op(mu)?.ext_d()?;
    let kd = k_form_op(&mu.ext_d()?)?;
    Ok(dk.sub(&kd)?)
}

/// `S` with an explicit degree check, mirroring the indexed family `S_k`.
pub fn s_op_k(k: usize, mu: &Form) -> Result<Form, BggError> {
    if mu.degree() != k {
        return Err(BggError::WrongDegree {
            op: "S".into(),
            expected: k.to_string(),
            got: mu.degree(),
        });
    }
    s_op(mu)
}

/// `T = p∘K − K∘p`: vector-valued k-forms to skew-valued (k−1)-forms.
pub fn t_op(mu: &Form) -> Result<Form, BggError> {
    let o = BasePoint::origin(mu.dim());
    let pk = k_form_op(mu)?.poincare(&o)?;
    let kp = k_form_op(&mu.poincare(&o)?)?;
    Ok(pk.sub(&kp)?)
}

/// `T` with an explicit degree check, mirroring the indexed family `T_k`.
pub fn t_op_k(k: usize, mu: &Form) -> Result<Form, BggError> {
    if mu.degree() != k {
        return Err(BggError::WrongDegree {
            op: "T".into(),
            expected: k.to_string(),
            got: mu.degree(),
        });
    }
    t_op(mu)
}

/// Inverse of the bijective connecting operator: in 3D, skew-valued 2-forms
/// to vector-valued 1-forms via `U ↦ Uᵀ − ½tr(U)·I` in the proxy picture; in
/// 2D, skew-valued 1-forms to vector-valued 0-forms.
pub fn s_inv(eta: &Form) -> Result<Form, BggError> {
    if eta.value_kind() != ValueKind::Skew {
        return Err(BggError::WrongValue {
            expected: "skew-valued form".into(),
            got: format!("{:?}-valued form", eta.value_kind()),
        });
    }
    match (eta.dim(), eta.degree()) {
        (3, 2) => {
            let u = proxy(eta)?.field()?;
            let w = u.s1_inv()?;
            Ok(unproxy(&w, 1, ValueKind::Vector)?)
        }
        (2, 1) => {
            let a = TensorField::skw_scalar_2d(&skewish(&eta.coeff(&[0])))?;
            let b = TensorField::skw_scalar_2d(&skewish(&eta.coeff(&[1])))?;
            let mut out = Form::zero(2, 0, ValueKind::Vector);
            out.set_coeff(vec![], TensorField::vector(vec![b, -&a])?)?;
            Ok(out)
        }
        (dim, got) => Err(BggError::WrongDegree {
            op: "S^-1".into(),
            expected: if dim == 3 { "2".into() } else { "1".into() },
            got,
        }),
    }
}

fn skewish(c: &TensorField) -> TensorField {
    if c.is_zero() {
        TensorField::zero(c.dim(), Shape::Matrix)
    } else {
        c.clone()
    }
}

/// Constraint tag of the Γ-subspaces of the W-valued complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaConstraint {
    /// `μ = S⁻¹dω`: the vector component is pinned by the skew one.
    SConstrained,
    /// `ω = 0`: only the vector component survives.
    ZeroSkew,
}

/// A W-valued form together with a Γ-constraint that holds structurally on
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPair {
    form: WForm,
    constraint: GammaConstraint,
}

impl GammaPair {
    /// Build the S-constrained pair `(ω, S⁻¹dω)` from a skew-valued form.
    pub fn s_constrained(omega: &Form) -> Result<Self, BggError> {
        let form = WForm::new(omega.clone(), s_inv(&omega.ext_d()?)?)?;
        Ok(GammaPair {
            form,
            constraint: GammaConstraint::SConstrained,
        })
    }

    /// Build the pair `(0, μ)` from a vector-valued form.
    pub fn zero_skew(mu: &Form) -> Result<Self, BggError> {
        let form = WForm::new(
            Form::zero(mu.dim(), mu.degree(), ValueKind::Skew),
            mu.clone(),
        )?;
        Ok(GammaPair {
            form,
            constraint: GammaConstraint::ZeroSkew,
        })
    }

    /// Tag an existing pair, verifying the constraint structurally.
    pub fn try_tag(form: WForm, constraint: GammaConstraint) -> Result<Self, BggError> {
        let ok = match constraint {
            GammaConstraint::SConstrained => form.vec == s_inv(&form.skew.ext_d()?)?,
            GammaConstraint::ZeroSkew => form.skew.is_zero(),
        };
        if !ok {
            return Err(BggError::WrongValue {
                expected: format!("{constraint:?} pair"),
                got: "unconstrained pair".into(),
            });
        }
        Ok(GammaPair { form, constraint })
    }

    pub fn form(&self) -> &WForm {
        &self.form
    }

    pub fn constraint(&self) -> GammaConstraint {
        self.constraint
    }
}

/// Block differential `A(ω, μ) = (dω − Sμ, dμ)`.
pub fn block_a(w: &WForm) -> Result<WForm, BggError> {
    let skew = w.skew.ext_d()?.sub(&s_op(&w.vec)?)?;
    let vec = w.vec.ext_d()?;
    Ok(WForm::new(skew, vec)?)
}

/// Block homotopy `B(ω, μ) = (pω − Tμ, pμ)`.
pub fn block_b(w: &WForm) -> Result<WForm, BggError> {
    let o = BasePoint::origin(w.dim());
    let skew = w.skew.poincare(&o)?.sub(&t_op(&w.vec)?)?;
    let vec = w.vec.poincare(&o)?;
    Ok(WForm::new(skew, vec)?)
}

/// The block operator pair `(A_k, B_k)` as operator expressions.
pub fn ab_blocks(k: usize, dim: usize) -> Result<(OpExpr, OpExpr), BggError> {
    if k > dim {
        return Err(BggError::BadBlockIndex { k, dim });
    }
    Ok((OpExpr::prim(PrimOp::BlockA), OpExpr::prim(PrimOp::BlockB)))
}

// ---------------------------------------------------------------------------
// Homotopy transfer
// ---------------------------------------------------------------------------

/// One row of the construction: differentials `d_i : level i → i+1` and
/// homotopies `p_i : level i → i−1` (stored at index `i−1`).
#[derive(Clone, Debug)]
pub struct ComplexRow {
    pub differentials: Vec<OpExpr>,
    pub homotopies: Vec<OpExpr>,
}

fn values_equal(a: &Value, b: &Value) -> bool {
    a == b
}

/// Transfer the homotopy family `top.homotopies` through the projections
/// `proj` with right inverses `lift` (a `None` lift marks an unused level —
/// allowed only where no transferred operator needs it).
///
/// Verified on the probe bases before acceptance:
///  1. `Π_{i+1} ∘ d_i = d̄_i ∘ Π_i` (commuting projections, on top probes);
///  2. `d_i ∘ Π†_i = Π†_{i+1} ∘ d̄_i` (commuting lifts, on bottom probes);
///  3. `Π_i ∘ Π†_i = id` (right inverse, on bottom probes);
///  4. `d̄_{i−1} p̃_i + p̃_{i+1} d̄_i = id` for `i ≥ 1` (the transferred
///     homotopy identity; level 0 holds only modulo the kernel of the first
///     differential and is checked by the identity suites instead).
pub fn homotopy_transfer(
    top: &ComplexRow,
    proj: &[OpExpr],
    lift: &[Option<OpExpr>],
    bottom_d: &[OpExpr],
    top_probes: &[Vec<Value>],
    bottom_probes: &[Vec<Value>],
) -> Result<ComplexRow, BggError> {
    let n = proj.len();
    assert_eq!(lift.len(), n);
    assert_eq!(top.differentials.len(), n - 1);
    assert_eq!(bottom_d.len(), n - 1);
    assert_eq!(top.homotopies.len(), n - 1);

    // 1. projections commute with the differentials
    for i in 0..n - 1 {
        for (pi, v) in top_probes[i].iter().enumerate() {
            let lhs = proj[i + 1].apply(&top.differentials[i].apply(v)?)?;
            let rhs = bottom_d[i].apply(&proj[i].apply(v)?)?;
            if !values_equal(&lhs, &rhs) {
                return Err(BggError::CommutationFailure {
                    check: "projection",
                    level: i,
                    probe: pi,
                    lhs: lhs.render_short(),
                    rhs: rhs.render_short(),
                });
            }
        }
    }

    // 2. lifts commute with the differentials
    for i in 0..n - 1 {
        if let (Some(li), Some(li1)) = (&lift[i], &lift[i + 1]) {
            for (pi, w) in bottom_probes[i].iter().enumerate() {
                let lhs = top.differentials[i].apply(&li.apply(w)?)?;
                let rhs = li1.apply(&bottom_d[i].apply(w)?)?;
                if !values_equal(&lhs, &rhs) {
                    return Err(BggError::CommutationFailure {
                        check: "lift",
                        level: i,
                        probe: pi,
                        lhs: lhs.render_short(),
                        rhs: rhs.render_short(),
                    });
                }
            }
        }
    }

    // 3. Π ∘ Π† = id
    for i in 0..n {
        if let Some(li) = &lift[i] {
            for (pi, w) in bottom_probes[i].iter().enumerate() {
                let round = proj[i].apply(&li.apply(w)?)?;
                if !values_equal(&round, w) {
                    return Err(BggError::CommutationFailure {
                        check: "right-inverse",
                        level: i,
                        probe: pi,
                        lhs: round.render_short(),
                        rhs: w.render_short(),
                    });
                }
            }
        }
    }

    // build p̃_i = Π_{i−1} ∘ p_i ∘ Π†_i
    let mut transferred = Vec::with_capacity(n - 1);
    for i in 1..n {
        let li = lift[i].clone().ok_or(BggError::MissingLift(i))?;
        transferred.push(OpExpr::compose(vec![
            proj[i - 1].clone(),
            top.homotopies[i - 1].clone(),
            li,
        ]));
    }

    // 4. transferred homotopy identity at levels 1..n
    for i in 1..n {
        for (pi, w) in bottom_probes[i].iter().enumerate() {
            let mut lhs = bottom_d[i - 1].apply(&transferred[i - 1].apply(w)?)?;
            if i < n - 1 {
                let second = transferred[i].apply(&bottom_d[i].apply(w)?)?;
                lhs = lhs.add(&second)?;
            }
            if !values_equal(&lhs, w) {
                return Err(BggError::HomotopyFailure {
                    level: i,
                    probe: pi,
                });
            }
        }
    }

    Ok(ComplexRow {
        differentials: bottom_d.to_vec(),
        homotopies: transferred,
    })
}

// ---------------------------------------------------------------------------
// The full derivation
// ---------------------------------------------------------------------------

/// The mechanically derived elasticity Poincaré operators, together with the
/// verified rows they came from.
#[derive(Clone, Debug)]
pub struct DerivedElasticity {
    pub dim: usize,
    pub probe_degree: u32,
    /// `P_1 .. P_n` on the bottom row.
    pub operators: Vec<OpExpr>,
    /// `def, inc, div` (3D) or `air, div` (2D).
    pub bottom_differentials: Vec<OpExpr>,
    /// All rows from the W-valued complex down to the bottom row.
    pub rows: Vec<ComplexRow>,
}

fn field_probes(fields: Vec<TensorField>) -> Vec<Value> {
    fields.into_iter().map(Value::Field).collect()
}

fn wform_probes(dim: usize, k: usize, deg: u32) -> Vec<Value> {
    probe::wform_basis(dim, k, deg)
        .into_iter()
        .map(Value::WForm)
        .collect()
}

fn form_probes(dim: usize, k: usize, value: ValueKind, deg: u32) -> Vec<Value> {
    probe::form_basis(dim, k, value, deg)
        .into_iter()
        .map(Value::Form)
        .collect()
}

fn pair_probes(dim: usize, first: ValueKind, second: ValueKind, deg: u32) -> Vec<Value> {
    let basis = |vk: ValueKind| -> Vec<TensorField> {
        match vk {
            ValueKind::Scalar => probe::scalar_basis(dim, deg),
            ValueKind::Vector => probe::vector_basis(dim, deg),
            ValueKind::Skew => probe::skew_matrix_basis(dim, deg),
        }
    };
    let zero = |vk: ValueKind| -> TensorField {
        match vk {
            ValueKind::Scalar => TensorField::zero(dim, Shape::Scalar),
            ValueKind::Vector => TensorField::zero(dim, Shape::Vector),
            ValueKind::Skew => TensorField::zero(dim, Shape::Matrix),
        }
    };
    let mut out = Vec::new();
    for a in basis(first) {
        out.push(Value::Pair(a, zero(second)));
    }
    for b in basis(second) {
        out.push(Value::Pair(zero(first), b));
    }
    out
}

fn apply_proj(proj: &[OpExpr], probes: &[Vec<Value>]) -> Result<Vec<Vec<Value>>, BggError> {
    proj.iter()
        .zip(probes)
        .map(|(p, vs)| vs.iter().map(|v| p.apply(v)).collect())
        .collect()
}

/// Derive the elasticity Poincaré operators by descending the construction,
/// verifying every transfer on monomial probes up to `probe_degree`.
pub fn derive_elasticity_poincare(
    dim: usize,
    probe_degree: u32,
) -> Result<DerivedElasticity, BggError> {
    assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
    let deg = probe_degree;
    let n = dim + 1; // number of levels (form degrees 0..dim)
    let a = || OpExpr::prim(PrimOp::BlockA);
    let b = || OpExpr::prim(PrimOp::BlockB);

    // Row 1: the W-valued de Rham complex with its block homotopy.
    let row1 = ComplexRow {
        differentials: vec![a(); n - 1],
        homotopies: vec![b(); n - 1],
    };
    let row1_probes: Vec<Vec<Value>> = (0..n).map(|k| wform_probes(dim, k, deg)).collect();

    // Row 2: the constrained Γ-subcomplex. In 3D the S-constrained position
    // is 1 and the ω=0 position is 2; in 2D they are 0 and 1.
    let mut proj1 = vec![OpExpr::Identity; n];
    let (s_pos, z_pos) = if dim == 3 { (1, 2) } else { (0, 1) };
    proj1[s_pos] = OpExpr::prim(PrimOp::GammaConstrainProj);
    proj1[z_pos] = OpExpr::prim(PrimOp::GammaZeroProj);
    let lift1: Vec<Option<OpExpr>> = vec![Some(OpExpr::Identity); n];
    let row2_probes = apply_proj(&proj1, &row1_probes)?;
    let row2 = homotopy_transfer(
        &row1,
        &proj1,
        &lift1,
        &row1.differentials.clone(),
        &row1_probes,
        &row2_probes,
    )?;

    // Row 3: identify the constrained pairs with single-component forms.
    let mut proj2 = vec![OpExpr::Identity; n];
    proj2[s_pos] = OpExpr::prim(PrimOp::WSkewPart);
    proj2[z_pos] = OpExpr::prim(PrimOp::WVecPart);
    let mut lift2: Vec<Option<OpExpr>> = vec![Some(OpExpr::Identity); n];
    lift2[s_pos] = Some(OpExpr::prim(PrimOp::GammaConstrainLift));
    lift2[z_pos] = Some(OpExpr::prim(PrimOp::GammaZeroLift));
    let mut row3_d = Vec::new();
    for i in 0..n - 1 {
        let mut chain = vec![proj2[i + 1].clone(), a()];
        if let Some(l) = &lift2[i] {
            if *l != OpExpr::Identity {
                chain.push(l.clone());
            }
        }
        row3_d.push(OpExpr::compose(chain));
    }
    let mut row3_probes: Vec<Vec<Value>> = Vec::new();
    for k in 0..n {
        if k == s_pos {
            row3_probes.push(form_probes(dim, k, ValueKind::Skew, deg));
        } else if k == z_pos {
            row3_probes.push(form_probes(dim, k, ValueKind::Vector, deg));
        } else {
            row3_probes.push(wform_probes(dim, k, deg));
        }
    }
    let row3 = homotopy_transfer(&row2, &proj2, &lift2, &row3_d, &row2_probes, &row3_probes)?;

    // Row 4: vector/matrix proxies.
    let proj3: Vec<OpExpr> = (0..n).map(|_| OpExpr::prim(PrimOp::Proxy)).collect();
    let lift3: Vec<Option<OpExpr>> = (0..n)
        .map(|k| {
            Some(OpExpr::prim(if k == s_pos {
                PrimOp::UnproxyForm {
                    degree: k,
                    value: ValueKind::Skew,
                }
            } else if k == z_pos {
                PrimOp::UnproxyForm {
                    degree: k,
                    value: ValueKind::Vector,
                }
            } else {
                PrimOp::UnproxyW { degree: k }
            }))
        })
        .collect();
    let row4_d: Vec<OpExpr> = (0..n - 1)
        .map(|i| {
            OpExpr::compose(vec![
                proj3[i + 1].clone(),
                row3.differentials[i].clone(),
                lift3[i].clone().unwrap(),
            ])
        })
        .collect();
    let row4_probes: Vec<Vec<Value>> = if dim == 3 {
        vec![
            pair_probes(dim, ValueKind::Vector, ValueKind::Skew, deg),
            field_probes(probe::matrix_basis(dim, deg)),
            field_probes(probe::matrix_basis(dim, deg)),
            pair_probes(dim, ValueKind::Skew, ValueKind::Vector, deg),
        ]
    } else {
        vec![
            field_probes(probe::scalar_basis(dim, deg)),
            field_probes(probe::matrix_basis(dim, deg)),
            pair_probes(dim, ValueKind::Skew, ValueKind::Vector, deg),
        ]
    };
    let row4 = homotopy_transfer(&row3, &proj3, &lift3, &row4_d, &row3_probes, &row4_probes)?;

    // Row 5: symmetrize down to the elasticity complex.
    let (proj4, lift4, row5_d): (Vec<OpExpr>, Vec<Option<OpExpr>>, Vec<OpExpr>) = if dim == 3 {
        (
            vec![
                OpExpr::prim(PrimOp::PairFirst),
                OpExpr::prim(PrimOp::SymProject),
                OpExpr::prim(PrimOp::SymProject),
                OpExpr::prim(PrimOp::PairSecondMinusDiv),
            ],
            vec![
                None,
                Some(OpExpr::prim(PrimOp::InclField)),
                Some(OpExpr::prim(PrimOp::InclField)),
                Some(OpExpr::prim(PrimOp::LiftPairZeroSkew)),
            ],
            vec![
                OpExpr::prim(PrimOp::Def),
                OpExpr::prim(PrimOp::Inc),
                OpExpr::prim(PrimOp::DivRows),
            ],
        )
    } else {
        (
            vec![
                OpExpr::Identity,
                OpExpr::prim(PrimOp::SymProject),
                OpExpr::prim(PrimOp::PairSecondMinusDiv),
            ],
            vec![
                Some(OpExpr::Identity),
                Some(OpExpr::prim(PrimOp::InclField)),
                Some(OpExpr::prim(PrimOp::LiftPairZeroSkew)),
            ],
            vec![OpExpr::prim(PrimOp::Air), OpExpr::prim(PrimOp::DivRows)],
        )
    };
    let row5_probes: Vec<Vec<Value>> = if dim == 3 {
        vec![
            field_probes(probe::vector_basis(dim, deg)),
            field_probes(probe::symmetric_matrix_basis(dim, deg)),
            field_probes(probe::symmetric_matrix_basis(dim, deg)),
            field_probes(probe::vector_basis(dim, deg)),
        ]
    } else {
        vec![
            field_probes(probe::scalar_basis(dim, deg)),
            field_probes(probe::symmetric_matrix_basis(dim, deg)),
            field_probes(probe::vector_basis(dim, deg)),
        ]
    };
    let row5 = homotopy_transfer(&row4, &proj4, &lift4, &row5_d, &row4_probes, &row5_probes)?;

    Ok(DerivedElasticity {
        dim,
        probe_degree,
        operators: row5.homotopies.clone(),
        bottom_differentials: row5.differentials.clone(),
        rows: vec![row1, row2, row3, row4, row5],
    })
}

// ---------------------------------------------------------------------------
// Sign conformance
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignStatus {
    Unique,
    Ambiguous,
    NoAssignment,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotResolution {
    pub slot: String,
    pub resolved_sign: i8,
    pub probe_degree: u32,
    pub status: SignStatus,
}

/// Outcome of reconciling the closed-form operators (with sign slots on each
/// correction term) against the derived operators.
#[derive(Clone, Debug, Serialize)]
pub struct SignReport {
    pub dim: usize,
    pub probe_degree: u32,
    pub status: SignStatus,
    pub slots: Vec<SlotResolution>,
    /// First mismatching probe when no assignment works.
    pub structural_diff: Option<String>,
}

impl SignReport {
    pub fn sign(&self, slot: &str) -> Option<Sign> {
        self.slots.iter().find(|s| s.slot == slot).and_then(|s| {
            if self.status == SignStatus::Unique {
                Sign::from_i8(s.resolved_sign)
            } else {
                None
            }
        })
    }
}

/// Closed form with one open sign slot.
type PrintedWithSlot = Box<dyn Fn(&TensorField, Sign) -> TensorField>;

struct SlotSpec {
    name: &'static str,
    /// operator index in `DerivedElasticity::operators`
    op_index: usize,
    probes: Vec<TensorField>,
    printed: PrintedWithSlot,
}

fn resolve_slot(
    derived: &DerivedElasticity,
    spec: &SlotSpec,
    diff: &mut Option<String>,
) -> (Vec<Sign>, u32) {
    let mut survivors = vec![Sign::Plus, Sign::Minus];
    for probe in &spec.probes {
        let derived_val = derived.operators[spec.op_index]
            .apply(&Value::Field(probe.clone()))
            .expect("derived operator total on signature-correct probes");
        let derived_field = derived_val.as_field().expect("field output").clone();
        survivors.retain(|&s| (spec.printed)(probe, s) == derived_field);
        if survivors.is_empty() {
            if diff.is_none() {
                let plus = (spec.printed)(probe, Sign::Plus);
                *diff = Some(format!(
                    "slot {}: derived({}) = {} but printed(+) = {}",
                    spec.name, probe, derived_field, plus
                ));
            }
            break;
        }
    }
    (survivors, derived.probe_degree)
}

/// Search all sign-slot assignments of the closed forms for the (unique)
/// one matching the derived operators on the monomial probe basis.
pub fn resolve_signs(derived: &DerivedElasticity, probe_degree: u32) -> SignReport {
    let dim = derived.dim;
    let slots: Vec<SlotSpec> = if dim == 3 {
        vec![
            SlotSpec {
                name: "p1_frank",
                op_index: 0,
                probes: probe::symmetric_matrix_basis(3, probe_degree),
                printed: Box::new(|e, s| elasticity::p1_with_sign(e, s).unwrap()),
            },
            SlotSpec {
                name: "p2_overall",
                op_index: 1,
                probes: probe::symmetric_matrix_basis(3, probe_degree),
                printed: Box::new(|v, s| elasticity::p2_with_sign(v, s).unwrap()),
            },
            SlotSpec {
                name: "p3_correction",
                op_index: 2,
                probes: probe::vector_basis(3, probe_degree),
                printed: Box::new(|v, s| elasticity::p3_with_sign(v, s).unwrap()),
            },
        ]
    } else {
        vec![SlotSpec {
            name: "p2_2d_correction",
            op_index: 1,
            probes: probe::vector_basis(2, probe_degree),
            printed: Box::new(|u, s| elasticity::p2_2d_with_sign(u, s).unwrap()),
        }]
    };

    let mut diff = None;
    let mut resolutions = Vec::new();
    let mut overall = SignStatus::Unique;
    for spec in &slots {
        let (survivors, deg) = resolve_slot(derived, spec, &mut diff);
        let status = match survivors.len() {
            1 => SignStatus::Unique,
            0 => SignStatus::NoAssignment,
            _ => SignStatus::Ambiguous,
        };
        if status != SignStatus::Unique {
            overall = status;
        }
        resolutions.push(SlotResolution {
            slot: spec.name.to_string(),
            resolved_sign: survivors.first().map(|s| s.as_i8()).unwrap_or(0),
            probe_degree: deg,
            status,
        });
    }

    // In 2D the first closed form carries no slot: it must match outright.
    if dim == 2 {
        for probe in probe::symmetric_matrix_basis(2, probe_degree) {
            let derived_val = derived.operators[0]
                .apply(&Value::Field(probe.clone()))
                .expect("derived P1 total");
            let printed = elasticity::p1_2d(&probe).unwrap();
            if derived_val.as_field().expect("field") != &printed {
                overall = SignStatus::NoAssignment;
                if diff.is_none() {
                    diff = Some(format!(
                        "slotless 2D first operator mismatch on probe {probe}"
                    ));
                }
                break;
            }
        }
    }

    SignReport {
        dim,
        probe_degree,
        status: overall,
        slots: resolutions,
        structural_diff: diff,
    }
}
