use kq_core::graphs::{
    b_gamma, canonical_form, canonical_key, dedup_isomorphism, dedup_star_order, enumerate, AdmissibleGraph,
    EnumerateOptions,
};
use kq_core::weights::{analytic_weight, estimate_table, mc_weight, mc_weight_with_gauge, Gauge, WeightTable};

fn connected() -> EnumerateOptions {
    EnumerateOptions { connected: true }
}

#[test]
fn isomorphism_classes_partition_the_enumeration() {
    let graphs = enumerate(2, 2, &[2, 2], connected()).unwrap();
    let classes = dedup_isomorphism(&graphs);
    let total: usize = classes.iter().map(|(_, members)| members).sum();
    assert_eq!(total, graphs.len());
    assert!(classes.len() <= dedup_star_order(&graphs).len());
}

#[test]
fn canonical_key_ignores_aerial_labels_and_star_order() {
    for g in enumerate(2, 2, &[2, 2], EnumerateOptions { connected: false }).unwrap() {
        let key = canonical_key(&g);
        assert_eq!(canonical_key(&g.relabel(&[1, 0]).unwrap()), key, "{g}");
        assert_eq!(canonical_key(&g.swap_in_star(0, 0, 1).unwrap()), key, "{g}");
    }
}

#[test]
fn star_swap_flips_the_weight_sign() {
    for g in enumerate(2, 2, &[2, 2], connected()).unwrap() {
        let c = canonical_form(&g);
        let swapped = canonical_form(&g.swap_in_star(1, 0, 1).unwrap());
        assert_eq!(swapped.weight_sign, -c.weight_sign, "{g}");
    }
}

#[test]
fn closed_form_families() {
    assert_eq!(analytic_weight(&AdmissibleGraph::wedge()).unwrap().re_f64(), 0.5);
    assert_eq!(analytic_weight(&AdmissibleGraph::moyal(3)).unwrap().re_f64(), 0.125);
    assert_eq!(analytic_weight(&AdmissibleGraph::hkr(3)).unwrap().to_string(), "1/6");
}

#[test]
fn ground_gauges_agree() {
    let g = AdmissibleGraph::wedge();
    let a = mc_weight_with_gauge(&g, 200_000, 3, Gauge::Standard).unwrap();
    let b = mc_weight_with_gauge(&g, 200_000, 4, Gauge::Shifted).unwrap();
    let se = a.std_error.hypot(b.std_error);
    assert!((a.mean - b.mean).abs() <= 4.0 * se, "{} vs {} (se {se})", a.mean, b.mean);
}

#[test]
fn estimates_repeat_for_a_seed_and_move_with_it() {
    let g = AdmissibleGraph::moyal(2);
    let a = mc_weight(&g, 50_000, 9).unwrap();
    assert_eq!(a, mc_weight(&g, 50_000, 9).unwrap());
    assert_ne!(a.mean, mc_weight(&g, 50_000, 10).unwrap().mean);
}

#[test]
fn mirror_weight_sign() {
    let g = AdmissibleGraph::from_encoded(2, 2, &[vec![-1, 2], vec![-1, -2]]).unwrap();
    let mirror = g.mirror();
    let sign = if (g.n() + g.num_edges()) % 2 == 0 { 1.0 } else { -1.0 };
    let a = mc_weight(&g, 400_000, 1).unwrap();
    let b = mc_weight(&mirror, 400_000, 2).unwrap();
    let se = a.std_error.hypot(b.std_error);
    assert!((b.mean - sign * a.mean).abs() <= 4.0 * se, "{} vs {} (se {se})", a.mean, b.mean);
}

#[test]
fn weight_table_round_trips_through_csv() {
    let table = estimate_table(1, 10_000, 5).unwrap();
    assert!(!table.is_empty());
    let mut buf = Vec::new();
    table.to_csv(&mut buf).unwrap();
    let back = WeightTable::from_csv(buf.as_slice()).unwrap();
    assert_eq!(back, table);
    let (mean, _) = back.lookup(&AdmissibleGraph::wedge()).unwrap();
    assert!((mean - 0.5).abs() < 0.05);
}

#[test]
fn bidifferential_operator_degree_checks() {
    let so3 = kq_core::polyvector::so3_lie_poisson();
    let op = b_gamma(&AdmissibleGraph::wedge(), &[so3.clone()]).unwrap();
    assert_eq!(op.arity(), 2);
    assert!(b_gamma(&AdmissibleGraph::wedge(), &[so3.clone(), so3]).is_err());
}
