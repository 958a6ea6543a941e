//! The identity suites behind `verify`.
//!
//! Every suite is exact: probes are monomial bases (by linearity, passing
//! the basis proves the identity on the whole polynomial space up to the
//! probed degree) plus a few seeded random spot checks. Probe evaluation
//! fans out across threads; results are reduced in probe order, so reports
//! are deterministic regardless of scheduling.

use crate::IdentityResult;
use nullhom::bgg::{self, DerivedElasticity, SignReport, Value};
use nullhom::derham::{BasePoint, Form, ValueKind};
use nullhom::diffcalc;
use nullhom::elasticity::ElasticityOps;
use nullhom::polycore::Rat;
use nullhom::probe;
use nullhom::tensorfields::TensorField;
use rayon::prelude::*;
use std::time::Instant;

/// Run `residual` over all probes; pass iff every residual is `None`.
fn run_suite<T: Sync>(
    name: &str,
    probes: &[T],
    residual: impl Fn(&T) -> Option<String> + Sync,
) -> IdentityResult {
    let start = Instant::now();
    let failures: Vec<Option<String>> = probes.par_iter().map(&residual).collect();
    let counterexample = failures.into_iter().flatten().next();
    IdentityResult {
        name: name.to_string(),
        status: if counterexample.is_none() {
            "pass"
        } else {
            "fail"
        },
        probes: probes.len(),
        counterexample,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn all_value_kinds() -> [ValueKind; 3] {
    [ValueKind::Scalar, ValueKind::Vector, ValueKind::Skew]
}

fn forms_all_degrees(dim: usize, deg: u32, min_k: usize) -> Vec<Form> {
    let mut out = Vec::new();
    for k in min_k..=dim {
        for vk in all_value_kinds() {
            out.extend(probe::form_basis(dim, k, vk, deg));
        }
    }
    out
}

fn describe_form(f: &Form) -> String {
    format!("{:?}-valued {}-form {}", f.value_kind(), f.degree(), f)
}

// -- de Rham suites ---------------------------------------------------------

pub fn derham_d_squared(dim: usize, deg: u32) -> IdentityResult {
    let probes: Vec<Form> = (0..=dim.saturating_sub(2))
        .flat_map(|k| {
            all_value_kinds()
                .into_iter()
                .flat_map(move |vk| probe::form_basis(dim, k, vk, deg))
        })
        .collect();
    run_suite("derham_d_squared", &probes, |f| {
        let dd = f.ext_d().unwrap().ext_d().unwrap();
        (!dd.is_zero()).then(|| describe_form(f))
    })
}

pub fn derham_kappa_squared(dim: usize, deg: u32) -> IdentityResult {
    let probes = forms_all_degrees(dim, deg, 2);
    let o = BasePoint::origin(dim);
    run_suite("derham_kappa_squared", &probes, |f| {
        let kk = f.koszul(&o).unwrap().koszul(&o).unwrap();
        (!kk.is_zero()).then(|| describe_form(f))
    })
}

pub fn derham_poincare_squared(dim: usize, deg: u32) -> IdentityResult {
    let probes = forms_all_degrees(dim, deg, 2);
    let o = BasePoint::origin(dim);
    run_suite("derham_poincare_squared", &probes, |f| {
        let pp = f.poincare(&o).unwrap().poincare(&o).unwrap();
        (!pp.is_zero()).then(|| describe_form(f))
    })
}

/// `𝔭d + d𝔭 = id` on k-forms, k ≥ 1 (at top degree the `𝔭d` term is absent).
pub fn derham_homotopy(dim: usize, deg: u32) -> IdentityResult {
    let probes = forms_all_degrees(dim, deg, 1);
    let o = BasePoint::origin(dim);
    run_suite("derham_homotopy", &probes, |f| {
        let k = f.degree();
        let mut lhs = f.poincare(&o).unwrap().ext_d().unwrap();
        if k < dim {
            lhs = lhs.add(&f.ext_d().unwrap().poincare(&o).unwrap()).unwrap();
        }
        (lhs != *f).then(|| describe_form(f))
    })
}

/// On 0-forms the identity holds up to the value at the base point:
/// `𝔭(df) = f − f(x₀)`.
pub fn derham_homotopy_base_correction(dim: usize, deg: u32) -> IdentityResult {
    let probes: Vec<Form> = all_value_kinds()
        .into_iter()
        .flat_map(|vk| probe::form_basis(dim, 0, vk, deg))
        .collect();
    let o = BasePoint::origin(dim);
    run_suite("derham_homotopy_base_correction", &probes, |f| {
        let lhs = f.ext_d().unwrap().poincare(&o).unwrap();
        let base_value = f.map_coeffs(|c| {
            let at0 = c.eval(&vec![Rat::zero(); dim]);
            let consts: Vec<_> = at0
                .iter()
                .map(|r| nullhom::polycore::Poly::constant(dim, r.clone()))
                .collect();
            rebuild_like(c, consts)
        });
        let rhs = f.sub(&base_value).unwrap();
        (lhs != rhs).then(|| describe_form(f))
    })
}

fn rebuild_like(like: &TensorField, entries: Vec<nullhom::polycore::Poly>) -> TensorField {
    use nullhom::tensorfields::Shape;
    match like.shape() {
        Shape::Scalar => TensorField::scalar(entries.into_iter().next().unwrap()),
        Shape::Vector => TensorField::vector(entries).unwrap(),
        Shape::Matrix => TensorField::matrix(entries).unwrap(),
    }
}

/// `(dκ + κd)ω = (r+k)·ω` on homogeneous monomial forms.
pub fn derham_koszul_weight(dim: usize, deg: u32) -> IdentityResult {
    let probes = forms_all_degrees(dim, deg, 0);
    let o = BasePoint::origin(dim);
    run_suite("derham_koszul_weight", &probes, |f| {
        let k = f.degree();
        let r = f.max_coeff_degree().unwrap_or(0);
        let mut lhs = Form::zero(dim, k, f.value_kind());
        if k >= 1 {
            lhs = lhs.add(&f.koszul(&o).unwrap().ext_d().unwrap()).unwrap();
        }
        if k < dim {
            lhs = lhs.add(&f.ext_d().unwrap().koszul(&o).unwrap()).unwrap();
        }
        let rhs = f.scale(&Rat::from_int((r as i64) + (k as i64)));
        (lhs != rhs).then(|| describe_form(f))
    })
}

// -- block complex suites ---------------------------------------------------

/// `d S + S d = 0` on vector-valued monomial forms.
pub fn bgg_ds_anticommute(dim: usize, deg: u32) -> IdentityResult {
    let probes: Vec<Form> = (0..=dim.saturating_sub(2))
        .flat_map(|k| probe::form_basis(dim, k, ValueKind::Vector, deg))
        .collect();
    run_suite("bgg_ds_anticommute", &probes, |mu| {
        let lhs = bgg::s_op(mu).unwrap().ext_d().unwrap();
        let rhs = bgg::s_op(&mu.ext_d().unwrap()).unwrap();
        (!lhs.add(&rhs).unwrap().is_zero()).then(|| describe_form(mu))
    })
}

/// `A² = 0` on W-valued monomial forms.
pub fn bgg_block_complex(dim: usize, deg: u32) -> IdentityResult {
    let probes: Vec<_> = (0..=dim.saturating_sub(2))
        .flat_map(|k| probe::wform_basis(dim, k, deg))
        .collect();
    run_suite("bgg_block_complex", &probes, |w| {
        let aa = bgg::block_a(&bgg::block_a(w).unwrap()).unwrap();
        (!aa.is_zero()).then(|| format!("degree-{} pair ({}, {})", w.degree(), w.skew, w.vec))
    })
}

/// `A B + B A = id` on W-valued monomial forms (k ≥ 1; at k = 0 the identity
/// holds on forms vanishing at the base point, covered by the base-corrected
/// de Rham suite).
pub fn bgg_block_homotopy(dim: usize, deg: u32) -> IdentityResult {
    let probes: Vec<_> = (1..=dim)
        .flat_map(|k| probe::wform_basis(dim, k, deg))
        .collect();
    run_suite("bgg_block_homotopy", &probes, |w| {
        let k = w.degree();
        let mut lhs = bgg::block_a(&bgg::block_b(w).unwrap()).unwrap();
        if k < dim {
            lhs = lhs
                .add(&bgg::block_b(&bgg::block_a(w).unwrap()).unwrap())
                .unwrap();
        }
        (!lhs.sub(w).unwrap().is_zero())
            .then(|| format!("degree-{} pair ({}, {})", w.degree(), w.skew, w.vec))
    })
}

// -- elasticity suites ------------------------------------------------------

fn apply_derived(derived: &DerivedElasticity, i: usize, f: &TensorField) -> TensorField {
    derived.operators[i]
        .apply(&Value::Field(f.clone()))
        .expect("derived operator total on signature-correct input")
        .as_field()
        .expect("field output")
        .clone()
}

/// The homotopy identities of the derived operators, exact on the monomial
/// basis: 3D `def∘P₁∘def = def`, `P₂inc + defP₁ = id`, `P₃div + incP₂ = id`,
/// `divP₃ = id`; 2D the analogous triple over `air` and `div`.
pub fn elasticity_derived_homotopy(
    dim: usize,
    deg: u32,
    derived: &DerivedElasticity,
) -> IdentityResult {
    if dim == 3 {
        enum Probe {
            Vec(TensorField),
            Sym(TensorField),
        }
        let mut probes: Vec<Probe> = probe::vector_basis(3, deg)
            .into_iter()
            .map(Probe::Vec)
            .collect();
        probes.extend(
            probe::symmetric_matrix_basis(3, deg)
                .into_iter()
                .map(Probe::Sym),
        );
        run_suite("elasticity_derived_homotopy", &probes, |p| match p {
            Probe::Vec(u) => {
                // def P₁ def u = def u
                let e = diffcalc::def_op(u).unwrap();
                let back = diffcalc::def_op(&apply_derived(derived, 0, &e)).unwrap();
                if back != e {
                    return Some(format!("def-P1-def failed on u = {u}"));
                }
                // div P₃ u = u
                let d = diffcalc::div_rows(&apply_derived(derived, 2, u)).unwrap();
                (d != *u).then(|| format!("div-P3 failed on u = {u}"))
            }
            Probe::Sym(e) => {
                let lhs = apply_derived(derived, 1, &diffcalc::inc_op(e).unwrap())
                    .add(&diffcalc::def_op(&apply_derived(derived, 0, e)).unwrap())
                    .unwrap();
                if lhs != *e {
                    return Some(format!("P2-inc + def-P1 failed on E = {e}"));
                }
                let lhs = apply_derived(derived, 2, &diffcalc::div_rows(e).unwrap())
                    .add(&diffcalc::inc_op(&apply_derived(derived, 1, e)).unwrap())
                    .unwrap();
                (lhs != *e).then(|| format!("P3-div + inc-P2 failed on E = {e}"))
            }
        })
    } else {
        enum Probe {
            Scalar(TensorField),
            Sym(TensorField),
            Vec(TensorField),
        }
        let mut probes: Vec<Probe> = probe::scalar_basis(2, deg)
            .into_iter()
            .map(Probe::Scalar)
            .collect();
        probes.extend(
            probe::symmetric_matrix_basis(2, deg)
                .into_iter()
                .map(Probe::Sym),
        );
        probes.extend(probe::vector_basis(2, deg).into_iter().map(Probe::Vec));
        run_suite("elasticity_derived_homotopy", &probes, |p| match p {
            Probe::Scalar(u) => {
                let a = diffcalc::air_op(u).unwrap();
                let back = diffcalc::air_op(&apply_derived(derived, 0, &a)).unwrap();
                (back != a).then(|| format!("air-P1-air failed on u = {u}"))
            }
            Probe::Sym(v) => {
                let lhs = apply_derived(derived, 1, &diffcalc::div_rows(v).unwrap())
                    .add(&diffcalc::air_op(&apply_derived(derived, 0, v)).unwrap())
                    .unwrap();
                (lhs != *v).then(|| format!("P2-div + air-P1 failed on V = {v}"))
            }
            Probe::Vec(u) => {
                let d = diffcalc::div_rows(&apply_derived(derived, 1, u)).unwrap();
                (d != *u).then(|| format!("div-P2 failed on u = {u}"))
            }
        })
    }
}

/// Closed forms with resolved signs coincide with the derived operators on
/// the monomial basis.
pub fn elasticity_closed_equals_derived(
    dim: usize,
    deg: u32,
    derived: &DerivedElasticity,
    ops: &ElasticityOps,
) -> IdentityResult {
    if dim == 3 {
        enum Probe {
            Sym(TensorField),
            Vec(TensorField),
        }
        let mut probes: Vec<Probe> = probe::symmetric_matrix_basis(3, deg)
            .into_iter()
            .map(Probe::Sym)
            .collect();
        probes.extend(probe::vector_basis(3, deg).into_iter().map(Probe::Vec));
        run_suite("elasticity_closed_equals_derived", &probes, |p| match p {
            Probe::Sym(e) => {
                if ops.p1(e).unwrap() != apply_derived(derived, 0, e) {
                    return Some(format!("P1 mismatch on {e}"));
                }
                (ops.p2(e).unwrap() != apply_derived(derived, 1, e))
                    .then(|| format!("P2 mismatch on {e}"))
            }
            Probe::Vec(v) => (ops.p3(v).unwrap() != apply_derived(derived, 2, v))
                .then(|| format!("P3 mismatch on {v}")),
        })
    } else {
        enum Probe {
            Sym(TensorField),
            Vec(TensorField),
        }
        let mut probes: Vec<Probe> = probe::symmetric_matrix_basis(2, deg)
            .into_iter()
            .map(Probe::Sym)
            .collect();
        probes.extend(probe::vector_basis(2, deg).into_iter().map(Probe::Vec));
        run_suite("elasticity_closed_equals_derived", &probes, |p| match p {
            Probe::Sym(v) => (ops.p1_2d(v).unwrap() != apply_derived(derived, 0, v))
                .then(|| format!("P1 mismatch on {v}")),
            Probe::Vec(u) => (ops.p2_2d(u).unwrap() != apply_derived(derived, 1, u))
                .then(|| format!("P2 mismatch on {u}")),
        })
    }
}

/// `P² = 0` for the sign-resolved closed forms.
pub fn elasticity_complex_property(dim: usize, deg: u32, ops: &ElasticityOps) -> IdentityResult {
    if dim == 3 {
        enum Probe {
            Sym(TensorField),
            Vec(TensorField),
        }
        let mut probes: Vec<Probe> = probe::symmetric_matrix_basis(3, deg)
            .into_iter()
            .map(Probe::Sym)
            .collect();
        probes.extend(probe::vector_basis(3, deg).into_iter().map(Probe::Vec));
        run_suite("elasticity_complex_property", &probes, |p| match p {
            Probe::Sym(v) => (!ops.p1(&ops.p2(v).unwrap()).unwrap().is_zero())
                .then(|| format!("P1∘P2 != 0 on {v}")),
            Probe::Vec(v) => (!ops.p2(&ops.p3(v).unwrap()).unwrap().is_zero())
                .then(|| format!("P2∘P3 != 0 on {v}")),
        })
    } else {
        let probes = probe::vector_basis(2, deg);
        run_suite("elasticity_complex_property", &probes, |v| {
            (!ops.p1_2d(&ops.p2_2d(v).unwrap()).unwrap().is_zero())
                .then(|| format!("P1∘P2 != 0 on {v}"))
        })
    }
}

/// Koszul operators agree with the Poincaré operators on homogeneous inputs
/// of every degree `r ≤ deg` (this is the coefficient check: the Beta weights
/// written in the Koszul closed forms must reproduce the radial integrals).
pub fn koszul_restriction(deg: u32, ops: &ElasticityOps) -> IdentityResult {
    enum Probe {
        Sym(u32, TensorField),
        Vec(u32, TensorField),
    }
    let mut probes = Vec::new();
    for r in 0..=deg {
        for e in probe::symmetric_matrix_basis(3, r) {
            if e.total_degree() == Some(r) {
                probes.push(Probe::Sym(r, e));
            }
        }
        for v in probe::vector_basis(3, r) {
            if v.total_degree() == Some(r) {
                probes.push(Probe::Vec(r, v));
            }
        }
    }
    run_suite("koszul_restriction", &probes, |p| match p {
        Probe::Sym(r, e) => {
            if ops.koszul_r(1, *r, e).unwrap() != ops.p1(e).unwrap() {
                return Some(format!("K1 != P1 at r={r} on {e}"));
            }
            (ops.koszul_r(2, *r, e).unwrap() != ops.p2(e).unwrap())
                .then(|| format!("K2 != P2 at r={r} on {e}"))
        }
        Probe::Vec(r, v) => (ops.koszul_r(3, *r, v).unwrap() != ops.p3(v).unwrap())
            .then(|| format!("K3 != P3 at r={r} on {v}")),
    })
}

/// The Koszul homotopy identities on homogeneous fields.
pub fn koszul_homotopy(deg: u32, ops: &ElasticityOps) -> IdentityResult {
    enum Probe {
        Sym(u32, TensorField),
        Vec(u32, TensorField),
    }
    let mut probes = Vec::new();
    for r in 0..=deg {
        for e in probe::symmetric_matrix_basis(3, r) {
            if e.total_degree() == Some(r) {
                probes.push(Probe::Sym(r, e));
            }
        }
        for v in probe::vector_basis(3, r) {
            if v.total_degree() == Some(r) {
                probes.push(Probe::Vec(r, v));
            }
        }
    }
    run_suite("koszul_homotopy", &probes, |p| match p {
        Probe::Sym(r, e) => {
            // def K₁ʳE + K₂^{r−2} inc E = E  (inc drops the degree by 2)
            let mut lhs = diffcalc::def_op(&ops.koszul_r(1, *r, e).unwrap()).unwrap();
            let ince = diffcalc::inc_op(e).unwrap();
            if !ince.is_zero() {
                lhs = lhs.add(&ops.koszul_r(2, r - 2, &ince).unwrap()).unwrap();
            }
            if lhs != *e {
                return Some(format!("def-K1 + K2-inc failed at r={r} on {e}"));
            }
            // inc K₂ʳE + K₃^{r−1} div E = E
            let mut lhs = diffcalc::inc_op(&ops.koszul_r(2, *r, e).unwrap()).unwrap();
            let dive = diffcalc::div_rows(e).unwrap();
            if !dive.is_zero() {
                lhs = lhs.add(&ops.koszul_r(3, r - 1, &dive).unwrap()).unwrap();
            }
            (lhs != *e).then(|| format!("inc-K2 + K3-div failed at r={r} on {e}"))
        }
        Probe::Vec(r, v) => {
            let lhs = diffcalc::div_rows(&ops.koszul_r(3, *r, v).unwrap()).unwrap();
            (lhs != *v).then(|| format!("div-K3 failed at r={r} on {v}"))
        }
    })
}

/// The Koszul complex property: `K₁^{r+2}∘K₂ʳ = 0` and `K₂^{r+1}∘K₃ʳ = 0`.
pub fn koszul_complex(deg: u32, ops: &ElasticityOps) -> IdentityResult {
    enum Probe {
        Sym(u32, TensorField),
        Vec(u32, TensorField),
    }
    let mut probes = Vec::new();
    for r in 0..=deg {
        for e in probe::symmetric_matrix_basis(3, r) {
            if e.total_degree() == Some(r) {
                probes.push(Probe::Sym(r, e));
            }
        }
        for v in probe::vector_basis(3, r) {
            if v.total_degree() == Some(r) {
                probes.push(Probe::Vec(r, v));
            }
        }
    }
    run_suite("koszul_complex", &probes, |p| match p {
        Probe::Sym(r, e) => {
            let k2 = ops.koszul_r(2, *r, e).unwrap();
            let k1 = ops.koszul_r(1, r + 2, &k2).unwrap();
            (!k1.is_zero()).then(|| format!("K1∘K2 != 0 at r={r} on {e}"))
        }
        Probe::Vec(r, v) => {
            let k3 = ops.koszul_r(3, *r, v).unwrap();
            let k2 = ops.koszul_r(2, r + 1, &k3).unwrap();
            (!k2.is_zero()).then(|| format!("K2∘K3 != 0 at r={r} on {v}"))
        }
    })
}

/// `x∧E∧x : V = E : x∧V∧x` pointwise (hence `K₂ʳ` self-adjointness).
pub fn koszul_duality(deg: u32, seed: u64, ops: &ElasticityOps) -> IdentityResult {
    let mut rng = probe::suite_rng(seed, 17);
    let mut probes = Vec::new();
    for r in 0..=deg.min(4) {
        for _ in 0..4 {
            let mono = &probe::monomials_of_degree(3, r);
            let e = probe::random_field(&mut rng, 3, nullhom::tensorfields::Shape::Matrix, 0)
                .sym()
                .unwrap()
                .scale_poly(&mono[0]);
            let v = probe::random_field(&mut rng, 3, nullhom::tensorfields::Shape::Matrix, 0)
                .sym()
                .unwrap()
                .scale_poly(mono.last().unwrap());
            probes.push((r, e, v));
        }
    }
    run_suite("koszul_duality", &probes, |(r, e, v)| {
        let x = TensorField::position(3);
        let sand = |m: &TensorField| {
            TensorField::cross_right(&TensorField::cross_left(&x, m).unwrap(), &x).unwrap()
        };
        if sand(e).frobenius(v).unwrap() != e.frobenius(&sand(v)).unwrap() {
            return Some(format!("pointwise sandwich duality failed at r={r}"));
        }
        let lhs = ops.koszul_r(2, *r, e).unwrap().frobenius(v).unwrap();
        let rhs = e.frobenius(&ops.koszul_r(2, *r, v).unwrap()).unwrap();
        (lhs != rhs).then(|| format!("K2 duality failed at r={r}"))
    })
}

/// Degree bookkeeping: `P₁: H_r(S)→H_{r+1}(V)`, `P₂: H_r(S)→H_{r+2}(S)`,
/// `P₃: H_r(V)→H_{r+1}(S)` (2D: `H_r(S)→H_{r+2}(ℝ)` and `H_r(V)→H_{r+1}(S)`).
pub fn polynomial_preservation(dim: usize, deg: u32, ops: &ElasticityOps) -> IdentityResult {
    enum Probe {
        Sym(u32, TensorField),
        Vec(u32, TensorField),
    }
    let mut probes = Vec::new();
    for r in 0..=deg {
        for e in probe::symmetric_matrix_basis(dim, r) {
            if e.total_degree() == Some(r) {
                probes.push(Probe::Sym(r, e));
            }
        }
        for v in probe::vector_basis(dim, r) {
            if v.total_degree() == Some(r) {
                probes.push(Probe::Vec(r, v));
            }
        }
    }
    let homogeneous_or_zero = |f: &TensorField, r: u32| f.is_zero() || f.is_homogeneous(r);
    run_suite("polynomial_preservation", &probes, move |p| {
        if dim == 3 {
            match p {
                Probe::Sym(r, e) => {
                    let p1 = ops.p1(e).unwrap();
                    if !homogeneous_or_zero(&p1, r + 1) {
                        return Some(format!("P1 degree map failed at r={r}"));
                    }
                    let p2 = ops.p2(e).unwrap();
                    (!homogeneous_or_zero(&p2, r + 2))
                        .then(|| format!("P2 degree map failed at r={r}"))
                }
                Probe::Vec(r, v) => {
                    let p3 = ops.p3(v).unwrap();
                    (!homogeneous_or_zero(&p3, r + 1))
                        .then(|| format!("P3 degree map failed at r={r}"))
                }
            }
        } else {
            match p {
                Probe::Sym(r, e) => {
                    let p1 = ops.p1_2d(e).unwrap();
                    (!homogeneous_or_zero(&p1, r + 2))
                        .then(|| format!("P1 degree map failed at r={r}"))
                }
                Probe::Vec(r, v) => {
                    let p2 = ops.p2_2d(v).unwrap();
                    (!homogeneous_or_zero(&p2, r + 1))
                        .then(|| format!("P2 degree map failed at r={r}"))
                }
            }
        }
    })
}

/// Sign conformance as an identity entry (the full report is embedded in the
/// conformance report separately).
pub fn sign_conformance_entry(sign_report: &SignReport) -> IdentityResult {
    IdentityResult {
        name: "elasticity_sign_conformance".to_string(),
        status: if sign_report.status == bgg::SignStatus::Unique {
            "pass"
        } else {
            "fail"
        },
        probes: sign_report.slots.len(),
        counterexample: sign_report.structural_diff.clone(),
        elapsed_ms: 0,
    }
}

/// All suites for one dimension, in a fixed order.
pub fn run_all(
    dim: usize,
    max_degree: u32,
    seed: u64,
    derived: &DerivedElasticity,
    sign_report: &SignReport,
) -> Vec<IdentityResult> {
    let ops = if dim == 3 {
        ElasticityOps::resolved_3d()
    } else {
        ElasticityOps::resolved_2d()
    }
    .expect("sign resolution");
    // block-complex identities are probed one degree lower: they already
    // involve one extra differentiation/integration pair
    let bgg_deg = max_degree.min(5);
    let mut out = vec![
        derham_d_squared(dim, max_degree),
        derham_kappa_squared(dim, max_degree),
        derham_poincare_squared(dim, max_degree),
        derham_homotopy(dim, max_degree),
        derham_homotopy_base_correction(dim, max_degree),
        derham_koszul_weight(dim, max_degree),
        bgg_ds_anticommute(dim, bgg_deg),
        bgg_block_complex(dim, bgg_deg),
        bgg_block_homotopy(dim, bgg_deg),
        elasticity_derived_homotopy(dim, max_degree, derived),
        sign_conformance_entry(sign_report),
        elasticity_closed_equals_derived(dim, max_degree, derived, &ops),
        elasticity_complex_property(dim, max_degree, &ops),
        polynomial_preservation(dim, max_degree, &ops),
    ];
    if dim == 3 {
        out.push(koszul_restriction(max_degree, &ops));
        out.push(koszul_homotopy(max_degree, &ops));
        out.push(koszul_complex(max_degree, &ops));
        out.push(koszul_duality(max_degree, seed, &ops));
    }
    out
}
