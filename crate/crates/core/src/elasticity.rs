//! Closed-form Poincaré and Koszul operators for the elasticity complex.
//!
//! The closed forms carry an explicit sign slot on each correction term. The
//! slots are resolved once against the mechanically derived operators (see
//! [`crate::bgg::resolve_signs`]) and cached; evaluating a closed form with
//! an unresolved slot is an error, never a silent default. With the slots
//! resolved, the operators satisfy, exactly on polynomials:
//!
//! 3D (`P₁: S→V`, `P₂: S→S`, `P₃: V→S`):
//! - `def∘P₁∘def = def`  (first identity, modulo rigid motions)
//! - `P₂∘inc + def∘P₁ = id`
//! - `P₃∘div + inc∘P₂ = id`
//! - `div∘P₃ = id`
//!
//! 2D (`P₁: S→ℝ`, `P₂: V→S`): the analogous triple against `air` and `div`.
//!
//! The Koszul family is the restriction of the Poincaré family to
//! homogeneous inputs, with the Beta weights written out as rational
//! coefficients in the input degree `r`.

use crate::diffcalc::{self, DiffError};
use crate::polycore::{Poly, Rat};
use crate::tensorfields::{FieldError, Shape, Symmetry, TensorField};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum ElasticityError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("operator {0} has an unresolved sign slot")]
    UnresolvedSign(&'static str),
    #[error("input must be symmetric")]
    NotSymmetric,
    #[error("input must be a vector field")]
    NotVector,
    #[error("input must be homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("operator requires dimension {0}")]
    WrongDim(usize),
    #[error("def u != 0: not an infinitesimal rigid motion")]
    NotRigid,
    #[error("sign resolution failed: {0}")]
    Resolution(String),
}

/// A resolved sign slot value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn rat(self) -> Rat {
        Rat::from_int(self.as_i8() as i64)
    }
}

fn check_symmetric(e: &TensorField, dim: usize) -> Result<(), ElasticityError> {
    if e.dim() != dim || e.shape() != Shape::Matrix {
        return Err(ElasticityError::WrongDim(dim));
    }
    if e.symmetry() != Symmetry::Symmetric && !e.is_zero() {
        return Err(ElasticityError::NotSymmetric);
    }
    Ok(())
}

fn check_vector(v: &TensorField, dim: usize) -> Result<(), ElasticityError> {
    if v.dim() != dim || v.shape() != Shape::Vector {
        return Err(ElasticityError::NotVector);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 3D closed forms (sign-slot parameterized)
// ---------------------------------------------------------------------------

/// `P₁(E) = ∫₀¹ E(tx)·x dt + σ·∫₀¹ (1−t)·[x ∧ (∇×E)(tx)]·x dt`.
///
/// Fields under the integral are evaluated pointwise at `tx` (derivatives are
/// taken first), so the two radial weights are the Beta transforms with
/// `(a,b) = (0,0)` and `(0,1)`.
pub fn p1_with_sign(e: &TensorField, sign: Sign) -> Result<TensorField, ElasticityError> {
    check_symmetric(e, 3)?;
    let x = TensorField::position(3);
    let main = e.radial_beta(0, 0).matvec(&x)?;
    let frank = diffcalc::frank_tensor(e)?.radial_beta(0, 1);
    let corr = TensorField::cross_left(&x, &frank)?.matvec(&x)?;
    Ok(main.add(&corr.scale(&sign.rat()))?)
}

/// `P₂(V) = σ · x ∧ (∫₀¹ t(1−t)·V(tx) dt) ∧ x`.
pub fn p2_with_sign(v: &TensorField, sign: Sign) -> Result<TensorField, ElasticityError> {
    check_symmetric(v, 3)?;
    let x = TensorField::position(3);
    let mid = v.radial_beta(1, 1);
    let sandwich = TensorField::cross_right(&TensorField::cross_left(&x, &mid)?, &x)?;
    Ok(sandwich.scale(&sign.rat()))
}

/// `P₃(v) = sym( ∫₀¹ t²·x⊗v(tx) dt + σ·(∫₀¹ t²(1−t)·x⊗v(tx)∧x dt)×∇ )`.
pub fn p3_with_sign(v: &TensorField, sign: Sign) -> Result<TensorField, ElasticityError> {
    check_vector(v, 3)?;
    let x = TensorField::position(3);
    let main = TensorField::outer(&x, &v.radial_beta(2, 0))?;
    let inner = TensorField::cross_right(&TensorField::outer(&x, &v.radial_beta(2, 1))?, &x)?;
    let corr = diffcalc::curl_rows(&inner)?;
    Ok(main.add(&corr.scale(&sign.rat()))?.sym()?)
}

// ---------------------------------------------------------------------------
// 2D closed forms
// ---------------------------------------------------------------------------

/// `P₁(V) = ∫₀¹ (1−t)·x⊥·V(tx)·x⊥ dt` (2D, no sign slot).
pub fn p1_2d(v: &TensorField) -> Result<TensorField, ElasticityError> {
    check_symmetric(v, 2)?;
    let xp = TensorField::perp(&TensorField::position(2))?;
    let mid = v.radial_beta(0, 1);
    Ok(TensorField::scalar(TensorField::bilinear(&xp, &mid, &xp)?))
}

/// `P₂(u) = sym( ∫₀¹ t·u(tx)⊗x dt + σ·(∫₀¹ t(t−1)·(x⊥·u(tx))·x dt)×∇ )` (2D).
pub fn p2_2d_with_sign(u: &TensorField, sign: Sign) -> Result<TensorField, ElasticityError> {
    check_vector(u, 2)?;
    let x = TensorField::position(2);
    let xp = TensorField::perp(&x)?;
    let main = TensorField::outer(&u.radial_beta(1, 0), &x)?;
    // t(t−1) = −t(1−t)
    let weight = TensorField::dot(&xp, &u.radial_beta(1, 1))?;
    let inner = x.scale_poly(&weight).neg();
    let corr = diffcalc::scalar_curl_rows_2d(&inner)?;
    Ok(main.add(&corr.scale(&sign.rat()))?.sym()?)
}

// ---------------------------------------------------------------------------
// Resolved operator families
// ---------------------------------------------------------------------------

/// The sign slots of the printed closed forms, resolved against the derived
/// operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolvedSigns {
    ThreeD {
        p1_frank: Sign,
        p2_overall: Sign,
        p3_correction: Sign,
    },
    TwoD {
        p2_correction: Sign,
    },
}

impl ResolvedSigns {
    pub fn dim(&self) -> usize {
        match self {
            ResolvedSigns::ThreeD { .. } => 3,
            ResolvedSigns::TwoD { .. } => 2,
        }
    }
}

/// Identifier of a closed-form operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorId {
    P1,
    P2,
    P3,
    P1_2D,
    P2_2D,
    K1,
    K2,
    K3,
}

/// A closed form together with its (possibly unresolved) sign slot and base
/// point. Evaluation fails until the slot is populated.
#[derive(Clone, Debug)]
pub struct SignedClosedForm {
    pub id: OperatorId,
    pub sign: Option<Sign>,
    pub base: Vec<Rat>,
}

impl SignedClosedForm {
    pub fn new(id: OperatorId, sign: Option<Sign>) -> Self {
        let dim = match id {
            OperatorId::P1_2D | OperatorId::P2_2D => 2,
            _ => 3,
        };
        SignedClosedForm {
            id,
            sign,
            base: vec![Rat::zero(); dim],
        }
    }

    pub fn with_base(mut self, base: Vec<Rat>) -> Self {
        self.base = base;
        self
    }

    fn sign(&self) -> Result<Sign, ElasticityError> {
        match self.id {
            // these carry no slot
            OperatorId::P1_2D => Ok(Sign::Plus),
            _ => self
                .sign
                .ok_or(ElasticityError::UnresolvedSign(match self.id {
                    OperatorId::P1 | OperatorId::K1 => "P1",
                    OperatorId::P2 | OperatorId::K2 => "P2",
                    OperatorId::P3 | OperatorId::K3 => "P3",
                    OperatorId::P2_2D => "P2 (2D)",
                    OperatorId::P1_2D => unreachable!(),
                })),
        }
    }

    /// Evaluate at the stored base point by translation conjugation.
    pub fn evaluate(&self, input: &TensorField) -> Result<TensorField, ElasticityError> {
        let sign = self.sign()?;
        let at_origin = |f: &TensorField| -> Result<TensorField, ElasticityError> {
            match self.id {
                OperatorId::P1 => p1_with_sign(f, sign),
                OperatorId::P2 => p2_with_sign(f, sign),
                OperatorId::P3 => p3_with_sign(f, sign),
                OperatorId::P1_2D => p1_2d(f),
                OperatorId::P2_2D => p2_2d_with_sign(f, sign),
                _ => Err(ElasticityError::Resolution(
                    "Koszul operators need an explicit degree; use koszul_r".into(),
                )),
            }
        };
        if self.base.iter().all(|c| c.is_zero()) {
            at_origin(input)
        } else {
            let shifted = input.shift(&self.base);
            let result = at_origin(&shifted)?;
            let back: Vec<Rat> = self.base.iter().map(|c| -c).collect();
            Ok(result.shift(&back))
        }
    }
}

/// The resolved operator family. Construct via [`ElasticityOps::resolved_3d`]
/// / [`ElasticityOps::resolved_2d`] (derives and reconciles once, then
/// caches) or [`ElasticityOps::with_signs`] for explicit slots.
#[derive(Clone, Debug)]
pub struct ElasticityOps {
    signs: ResolvedSigns,
}

static SIGNS_3D: OnceLock<Result<ResolvedSigns, String>> = OnceLock::new();
static SIGNS_2D: OnceLock<Result<ResolvedSigns, String>> = OnceLock::new();

fn resolve_via_bgg(dim: usize) -> Result<ResolvedSigns, String> {
    let derived = crate::bgg::derive_elasticity_poincare(dim, 2).map_err(|e| e.to_string())?;
    let report = crate::bgg::resolve_signs(&derived, 3);
    if report.status != crate::bgg::SignStatus::Unique {
        return Err(format!(
            "sign resolution not unique: {:?} ({:?})",
            report.status, report.structural_diff
        ));
    }
    let get = |name: &str| -> Result<Sign, String> {
        report
            .sign(name)
            .ok_or_else(|| format!("missing slot {name}"))
    };
    if dim == 3 {
        Ok(ResolvedSigns::ThreeD {
            p1_frank: get("p1_frank")?,
            p2_overall: get("p2_overall")?,
            p3_correction: get("p3_correction")?,
        })
    } else {
        Ok(ResolvedSigns::TwoD {
            p2_correction: get("p2_2d_correction")?,
        })
    }
}

impl ElasticityOps {
    /// Derive, reconcile and cache the 3D signs (initialize-then-share).
    pub fn resolved_3d() -> Result<Self, ElasticityError> {
        let signs = SIGNS_3D
            .get_or_init(|| resolve_via_bgg(3))
            .clone()
            .map_err(ElasticityError::Resolution)?;
        Ok(ElasticityOps { signs })
    }

    /// Derive, reconcile and cache the 2D sign.
    pub fn resolved_2d() -> Result<Self, ElasticityError> {
        let signs = SIGNS_2D
            .get_or_init(|| resolve_via_bgg(2))
            .clone()
            .map_err(ElasticityError::Resolution)?;
        Ok(ElasticityOps { signs })
    }

    pub fn with_signs(signs: ResolvedSigns) -> Self {
        ElasticityOps { signs }
    }

    pub fn signs(&self) -> ResolvedSigns {
        self.signs
    }

    fn three_d(&self) -> Result<(Sign, Sign, Sign), ElasticityError> {
        match self.signs {
            ResolvedSigns::ThreeD {
                p1_frank,
                p2_overall,
                p3_correction,
            } => Ok((p1_frank, p2_overall, p3_correction)),
            _ => Err(ElasticityError::WrongDim(3)),
        }
    }

    fn two_d(&self) -> Result<Sign, ElasticityError> {
        match self.signs {
            ResolvedSigns::TwoD { p2_correction } => Ok(p2_correction),
            _ => Err(ElasticityError::WrongDim(2)),
        }
    }

    pub fn p1(&self, e: &TensorField) -> Result<TensorField, ElasticityError> {
        p1_with_sign(e, self.three_d()?.0)
    }

    pub fn p2(&self, v: &TensorField) -> Result<TensorField, ElasticityError> {
        p2_with_sign(v, self.three_d()?.1)
    }

    pub fn p3(&self, v: &TensorField) -> Result<TensorField, ElasticityError> {
        p3_with_sign(v, self.three_d()?.2)
    }

    pub fn p1_2d(&self, v: &TensorField) -> Result<TensorField, ElasticityError> {
        self.two_d()?;
        p1_2d(v)
    }

    pub fn p2_2d(&self, u: &TensorField) -> Result<TensorField, ElasticityError> {
        p2_2d_with_sign(u, self.two_d()?)
    }

    /// The Koszul operators: the Poincaré family restricted to homogeneous
    /// inputs of degree `r`, with the Beta weights as explicit rationals:
    ///
    /// - `K₁ʳ(E) = 1/(r+1)·E·x + σ₁/(r(r+1))·x∧(∇×E)·x`
    /// - `K₂ʳ(V) = σ₂/((r+2)(r+3))·x∧V∧x`
    /// - `K₃ʳ(v) = 1/(r+3)·sym(x⊗v) + σ₃/((r+3)(r+4))·sym((x⊗v∧x)×∇)`
    ///
    /// The `K₁` correction weight is the Beta integral `∫₀¹(1−t)t^{r−1}dt` of
    /// the degree-(r−1) Frank tensor; the corresponding term vanishes for
    /// r = 0.
    pub fn koszul_r(
        &self,
        which: u8,
        r: u32,
        f: &TensorField,
    ) -> Result<TensorField, ElasticityError> {
        if !f.is_homogeneous(r) {
            return Err(ElasticityError::NotHomogeneous(r));
        }
        let (s1, s2, s3) = self.three_d()?;
        let x = TensorField::position(3);
        let rr = r as i64;
        match which {
            1 => {
                check_symmetric(f, 3)?;
                let main = f.matvec(&x)?.scale(&Rat::new(1, rr + 1).unwrap());
                if r == 0 {
                    return Ok(main);
                }
                let frank = diffcalc::frank_tensor(f)?;
                let corr = TensorField::cross_left(&x, &frank)?
                    .matvec(&x)?
                    .scale(&Rat::new(1, rr * (rr + 1)).unwrap());
                Ok(main.add(&corr.scale(&s1.rat()))?)
            }
            2 => {
                check_symmetric(f, 3)?;
                let sandwich = TensorField::cross_right(&TensorField::cross_left(&x, f)?, &x)?;
                Ok(sandwich.scale(&(&s2.rat() * &Rat::new(1, (rr + 2) * (rr + 3)).unwrap())))
            }
            3 => {
                check_vector(f, 3)?;
                let main = TensorField::outer(&x, f)?
                    .sym()?
                    .scale(&Rat::new(1, rr + 3).unwrap());
                let inner = TensorField::cross_right(&TensorField::outer(&x, f)?, &x)?;
                let corr = diffcalc::curl_rows(&inner)?
                    .sym()?
                    .scale(&Rat::new(1, (rr + 3) * (rr + 4)).unwrap());
                Ok(main.add(&corr.scale(&s3.rat()))?)
            }
            _ => Err(ElasticityError::Resolution(format!(
                "unknown Koszul operator index {which}"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Rigid motions
// ---------------------------------------------------------------------------

/// An infinitesimal rigid motion `u = a + b∧x` (3D) or `u = a + b·χx` (2D).
#[derive(Clone, Debug, PartialEq)]
pub struct RigidMotion {
    pub a: Vec<Rat>,
    /// 3 rotation coefficients in 3D, 1 in 2D.
    pub b: Vec<Rat>,
}

impl RigidMotion {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// The field `a + b∧x` (3D) / `a + b·χx` (2D).
    pub fn field(&self) -> TensorField {
        let dim = self.dim();
        let a = TensorField::const_vector(dim, &self.a).expect("const vector");
        if dim == 3 {
            let b = TensorField::const_vector(3, &self.b).expect("const vector");
            a.add(&TensorField::cross(&b, &TensorField::position(3)).unwrap())
                .unwrap()
        } else {
            // b·χx = b·(−x₂, x₁)
            let rot = TensorField::vector(vec![
                Poly::var(2, 1).scale(&-&self.b[0]),
                Poly::var(2, 0).scale(&self.b[0]),
            ])
            .unwrap();
            a.add(&rot).unwrap()
        }
    }
}

/// Read off `(a, b)` from a field with `def u = 0` (validated): `a = u(x₀)`,
/// `b` from the constant skew gradient.
pub fn rigid_motion_extract(u: &TensorField) -> Result<RigidMotion, ElasticityError> {
    let dim = u.dim();
    check_vector(u, dim)?;
    if !diffcalc::def_op(u)?.is_zero() {
        return Err(ElasticityError::NotRigid);
    }
    let origin = vec![Rat::zero(); dim];
    rigid_part_at(u, &origin)
}

fn rigid_part_at(u: &TensorField, x0: &[Rat]) -> Result<RigidMotion, ElasticityError> {
    let dim = u.dim();
    let a = u.shift(x0).eval(&vec![Rat::zero(); dim]);
    let jac = diffcalc::grad_vec(u)?.skw()?;
    let at0: Vec<Rat> = jac.shift(x0).eval(&vec![Rat::zero(); dim]);
    let b = if dim == 3 {
        // vec of the skew matrix, entries (2,1), (0,2), (1,0)
        vec![at0[2 * 3 + 1].clone(), at0[2].clone(), at0[3].clone()]
    } else {
        vec![at0[2].clone()] // entry (1,0) = χ-coefficient
    };
    Ok(RigidMotion { a, b })
}

/// Subtract the rigid part sampled at `x₀` (origin by default):
/// the result vanishes at `x₀` and has vanishing skew gradient there.
pub fn rm_normalize(u: &TensorField) -> Result<TensorField, ElasticityError> {
    let dim = u.dim();
    check_vector(u, dim)?;
    let rm = rigid_part_at(u, &vec![Rat::zero(); dim])?;
    Ok(u.sub(&rm.field())?)
}
