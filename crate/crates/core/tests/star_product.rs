use kq_core::algebra::{Poly, Scalar};
use kq_core::polyvector::{so3_lie_poisson, PolyVectorField};
use kq_core::star::{
    assemble, first_order_bracket, from_explicit_i, to_explicit_i, verify_associativity, WeightOrigin, WeightSource,
};
use kq_core::weights::estimate_table;
use kq_core::weyl::moyal_series;

fn generic_constant_r4() -> PolyVectorField {
    let c = |n| Poly::constant(4, Scalar::from_int(n));
    PolyVectorField::from_components(
        4,
        2,
        [(vec![0, 1], c(2)), (vec![0, 3], c(-1)), (vec![1, 2], c(3)), (vec![2, 3], c(5))],
    )
    .unwrap()
}

#[test]
fn constant_bivector_reproduces_moyal() {
    let pi = generic_constant_r4();
    let s = assemble(&pi, 3, &WeightSource::analytic()).unwrap();
    assert_eq!(s.series(), &moyal_series(&pi.to_matrix().unwrap(), 3).unwrap());
    assert!(verify_associativity(&s, 2).unwrap().is_exact());
    assert_eq!(first_order_bracket(&s).unwrap(), pi);
}

#[test]
fn coordinate_functions_multiply_pointwise_at_order_zero() {
    let s = assemble(&so3_lie_poisson(), 1, &WeightSource::analytic()).unwrap();
    let (x, y) = (Poly::var(3, 0), Poly::var(3, 1));
    let xy = s.apply(&x, &y).unwrap();
    assert_eq!(xy.coeff(0), &(&x * &y));
    let yx = s.apply(&y, &x).unwrap();
    let commutator = xy.coeff(1).try_sub(yx.coeff(1)).unwrap();
    assert!(!commutator.is_zero());
}

#[test]
fn second_order_so3_needs_estimated_weights() {
    let pi = so3_lie_poisson();
    assert!(assemble(&pi, 2, &WeightSource::analytic()).is_err());
    let table = estimate_table(2, 20_000, 8).unwrap();
    let s = assemble(&pi, 2, &WeightSource::table(table)).unwrap();
    assert!(s.provenance().iter().any(|r| r.origin == WeightOrigin::Table));
    assert!(s.max_weight_std_error() > 0.0);
    let report = verify_associativity(&s, 1).unwrap();
    assert_eq!(report.associator_on_monomials[1], 0.0);
}

#[test]
fn explicit_i_convention_round_trips() {
    let s = assemble(&generic_constant_r4(), 3, &WeightSource::analytic()).unwrap();
    let explicit = to_explicit_i(s.series());
    assert_ne!(&explicit, s.series());
    assert_eq!(&from_explicit_i(&explicit), s.series());
}

#[test]
fn serialized_star_product_records_provenance() {
    let s = assemble(&so3_lie_poisson(), 1, &WeightSource::analytic()).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["order"], 1);
    assert_eq!(v["dim"], 3);
    assert!(!v["provenance"].as_array().unwrap().is_empty());
}
