//! Closed-form weights for the Moyal and HKR families.

use crate::algebra::Scalar;
use crate::graphs::{canonical_form, AdmissibleGraph};

/// 1/2ⁿ for the n-fold Moyal graph, 1/m! for the HKR graph in G_{1,m}, signed by the star ordering.
pub fn analytic_weight(g: &AdmissibleGraph) -> Option<Scalar> {
    let cf = canonical_form(g);
    let rep = &cf.representative;
    let base = if rep.m() == 2 && *rep == AdmissibleGraph::moyal(rep.n()) {
        Scalar::ratio(1, 1i64 << rep.n())
    } else if rep.n() == 1 && *rep == AdmissibleGraph::hkr(rep.m()) {
        let fact: i64 = (1..=rep.m() as i64).product();
        Scalar::ratio(1, fact)
    } else {
        return None;
    };
    Some(base * Scalar::from_int(cf.weight_sign as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        assert_eq!(analytic_weight(&AdmissibleGraph::moyal(1)), Some(Scalar::ratio(1, 2)));
        assert_eq!(analytic_weight(&AdmissibleGraph::moyal(2)), Some(Scalar::ratio(1, 4)));
        assert_eq!(analytic_weight(&AdmissibleGraph::hkr(3)), Some(Scalar::ratio(1, 6)));
        let swapped = AdmissibleGraph::hkr(3).swap_in_star(0, 0, 2).unwrap();
        assert_eq!(analytic_weight(&swapped), Some(Scalar::ratio(-1, 6)));
        let other = AdmissibleGraph::from_encoded(2, 2, &[vec![2, -1], vec![-1, -2]]).unwrap();
        assert_eq!(analytic_weight(&other), None);
    }
}
