//! Cross-module integration: the derived operator family against seeded
//! random fields, the proxy display conventions, and the JSON wire formats.

use nullhom::bgg::{derive_elasticity_poincare, Value};
use nullhom::derham::{proxy, unproxy, Form, ProxyValue, ValueKind};
use nullhom::diffcalc;
use nullhom::elasticity::ElasticityOps;
use nullhom::polycore::{Poly, Rat};
use nullhom::probe;
use nullhom::tensorfields::{FieldJson, Shape, TensorField};

#[test]
fn transferred_family_passes_homotopy_on_random_probes() {
    // 30 seeded random probes through the derived operators, beyond the
    // monomial bases the derivation itself was verified on
    let derived = derive_elasticity_poincare(3, 2).unwrap();
    let mut rng = probe::suite_rng(2025, 8);
    let apply = |i: usize, f: &TensorField| -> TensorField {
        derived.operators[i]
            .apply(&Value::Field(f.clone()))
            .unwrap()
            .as_field()
            .unwrap()
            .clone()
    };
    for _ in 0..15 {
        let e = probe::random_field(&mut rng, 3, Shape::Matrix, 3)
            .sym()
            .unwrap();
        let lhs = apply(1, &diffcalc::inc_op(&e).unwrap())
            .add(&diffcalc::def_op(&apply(0, &e)).unwrap())
            .unwrap();
        assert_eq!(lhs, e);
        let lhs = apply(2, &diffcalc::div_rows(&e).unwrap())
            .add(&diffcalc::inc_op(&apply(1, &e)).unwrap())
            .unwrap();
        assert_eq!(lhs, e);
    }
    for _ in 0..15 {
        let v = probe::random_field(&mut rng, 3, Shape::Vector, 3);
        assert_eq!(diffcalc::div_rows(&apply(2, &v)).unwrap(), v);
    }
}

#[test]
fn proxied_middle_row_is_the_weak_symmetry_complex() {
    // The proxied row above the elasticity complex must act as
    //   (u, W) ↦ grad u − W,   V ↦ inc V (on symmetric V),   V ↦ (0, div V),
    // which is what makes the symmetrizing projections commute.
    let derived = derive_elasticity_poincare(3, 2).unwrap();
    let row4 = &derived.rows[3];
    let mut rng = probe::suite_rng(2025, 11);
    for _ in 0..8 {
        let u = probe::random_field(&mut rng, 3, Shape::Vector, 3);
        let w = probe::random_field(&mut rng, 3, Shape::Matrix, 3)
            .skw()
            .unwrap();
        let out = row4.differentials[0]
            .apply(&Value::Pair(u.clone(), w.clone()))
            .unwrap();
        let expected = diffcalc::grad_vec(&u).unwrap().sub(&w).unwrap();
        assert_eq!(out, Value::Field(expected));

        let v = probe::random_field(&mut rng, 3, Shape::Matrix, 3)
            .sym()
            .unwrap();
        let mid = row4.differentials[1]
            .apply(&Value::Field(v.clone()))
            .unwrap();
        assert_eq!(mid, Value::Field(diffcalc::inc_op(&v).unwrap()));

        let top = row4.differentials[2]
            .apply(&Value::Field(v.clone()))
            .unwrap();
        match top {
            Value::Pair(skew, div) => {
                assert!(skew.is_zero(), "symmetric input leaves no skew residue");
                assert_eq!(div, diffcalc::div_rows(&v).unwrap());
            }
            other => panic!("expected pair, got {}", other.kind_name()),
        }
    }
}

#[test]
fn vector_valued_one_form_proxy_display() {
    // w_{·1}dx₁ + w_{·2}dx₂ + w_{·3}dx₃ lists the coefficients as columns
    let cols: Vec<TensorField> = (0..3)
        .map(|j| {
            TensorField::vector(
                (0..3)
                    .map(|i| Poly::from_int(3, (10 * (i + 1) + j + 1) as i64))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    let mut form = Form::zero(3, 1, ValueKind::Vector);
    for (j, c) in cols.iter().enumerate() {
        form.set_coeff(vec![j as u8], c.clone()).unwrap();
    }
    let m = proxy(&form).unwrap().field().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(
                m.entry(i, j),
                &Poly::from_int(3, (10 * (i + 1) + j + 1) as i64)
            );
        }
    }
    assert_eq!(unproxy(&m, 1, ValueKind::Vector).unwrap(), form);
}

#[test]
fn two_form_proxy_uses_cyclic_slots() {
    // the 2-form with proxy vector e₂ is the single term dx₃∧dx₁, stored as
    // −dx₁∧dx₃
    let e2 = TensorField::basis_vector(3, 1);
    let f = unproxy(&e2, 2, ValueKind::Scalar).unwrap();
    let c = f.coeff(&[0, 2]);
    assert_eq!(c.as_scalar().unwrap(), &Poly::from_int(3, -1));
    match proxy(&f).unwrap() {
        ProxyValue::Field(v) => assert_eq!(v, e2),
        _ => panic!("expected field"),
    }
}

#[test]
fn poincare_gauge_condition() {
    // the recovered potential satisfies the gauge condition: applying the
    // next operator to it gives zero, so the potential with P(φ) = 0 and
    // d(φ) = ω is exactly φ = P(ω)
    let ops = ElasticityOps::resolved_3d().unwrap();
    let mut rng = probe::suite_rng(2025, 9);
    for _ in 0..10 {
        let v = probe::random_field(&mut rng, 3, Shape::Matrix, 3)
            .sym()
            .unwrap();
        let phi = ops.p2(&v).unwrap();
        assert!(ops.p1(&phi).unwrap().is_zero());
    }
}

#[test]
fn index_form_integrand_reproduces_first_operator_symbolically() {
    // Independent route to P₁: the index-form displacement integrand
    //   u_i = ∫₀¹ [E_ij(tx) + (1−t)·(∂_k E_ij − ∂_i E_kj)(tx)·x_k]·x_j dt
    // assembled from raw partial derivatives and radial Beta transforms,
    // with no matrix curls or cross products anywhere. It must agree with
    // the closed form exactly, on random symmetric fields.
    use nullhom::polycore::radial_beta_transform;
    let ops = ElasticityOps::resolved_3d().unwrap();
    let mut rng = probe::suite_rng(2025, 10);
    for _ in 0..12 {
        let e = probe::random_field(&mut rng, 3, Shape::Matrix, 4)
            .sym()
            .unwrap();
        let mut comps = Vec::with_capacity(3);
        for i in 0..3 {
            let mut acc = Poly::zero(3);
            for j in 0..3 {
                let xj = Poly::var(3, j);
                acc = &acc + &(&xj * &radial_beta_transform(e.entry(i, j), 0, 0));
                for k in 0..3 {
                    let frank = &e.entry(i, j).partial(k) - &e.entry(k, j).partial(i);
                    let weighted = radial_beta_transform(&frank, 0, 1);
                    let xk = Poly::var(3, k);
                    acc = &acc + &(&(&xk * &xj) * &weighted);
                }
            }
            comps.push(acc);
        }
        let index_form = TensorField::vector(comps).unwrap();
        assert_eq!(index_form, ops.p1(&e).unwrap());
    }
}

#[test]
fn field_json_wire_format() {
    // the documented wire schema, end to end through serde_json
    let body = r#"{
        "dim": 3,
        "shape": "matrix",
        "symmetry": "symmetric",
        "entries": {
            "1,2": {"terms": [{"exp": [0,1,0], "num": "1", "den": "1"}]},
            "2,1": {"terms": [{"exp": [0,1,0], "num": "1", "den": "1"}]},
            "3,3": {"terms": [{"exp": [2,0,0], "num": "-7", "den": "2"}]}
        }
    }"#;
    let parsed: FieldJson = serde_json::from_str(body).unwrap();
    let field = TensorField::from_json(&parsed).unwrap();
    let x1 = Poly::var(3, 0);
    let x2 = Poly::var(3, 1);
    assert_eq!(field.entry(0, 1), &x2);
    assert_eq!(
        field.entry(2, 2),
        &(&x1 * &x1).scale(&Rat::new(-7, 2).unwrap())
    );
    // roundtrip through the serializer preserves the field exactly
    let serialized = serde_json::to_string(&field.to_json()).unwrap();
    let reparsed: FieldJson = serde_json::from_str(&serialized).unwrap();
    assert_eq!(TensorField::from_json(&reparsed).unwrap(), field);

    // omitted entries are zero
    let empty: FieldJson =
        serde_json::from_str(r#"{"dim":2,"shape":"vector","entries":{}}"#).unwrap();
    assert!(TensorField::from_json(&empty).unwrap().is_zero());
}

#[test]
fn diff_op_tag_dispatch() {
    use nullhom::diffcalc::{apply, DiffOpTag};
    let pos = TensorField::position(3);
    assert_eq!(
        apply(DiffOpTag::DivVec, &pos).unwrap().as_scalar().unwrap(),
        &Poly::from_int(3, 3)
    );
    assert_eq!(
        apply(DiffOpTag::Def, &pos).unwrap(),
        TensorField::identity(3)
    );
    assert!(apply(DiffOpTag::Inc, &TensorField::identity(3))
        .unwrap()
        .is_zero());
    // shape mismatch surfaces as an error
    assert!(apply(DiffOpTag::Air, &pos).is_err());
    assert!(apply(DiffOpTag::CurlCols, &pos).is_err());
}
