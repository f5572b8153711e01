use billiard_core::{Real, TruncatedSeries, VariableRoles};
use num_complex::Complex;
use proptest::prelude::*;

const M: usize = 4;
const D: u32 = 6;

/// Sparse series in 4 variables with small integer coefficients, so products
/// are exact in binary64.
fn int_series() -> impl Strategy<Value = TruncatedSeries<f64>> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=3, M), -4i32..=4, -4i32..=4),
        0..10,
    )
    .prop_map(|terms| {
        TruncatedSeries::from_terms(
            M,
            D,
            terms
                .into_iter()
                .map(|(e, re, im)| (e, Complex::new(re as f64, im as f64))),
        )
        .unwrap()
    })
}

fn real_series() -> impl Strategy<Value = TruncatedSeries<f64>> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=3, M), -1.0f64..1.0, -1.0f64..1.0),
        0..10,
    )
    .prop_map(|terms| {
        TruncatedSeries::from_terms(
            M,
            D,
            terms.into_iter().map(|(e, re, im)| (e, Complex::new(re, im))),
        )
        .unwrap()
    })
}

fn roles(t1: f64, t2: f64) -> VariableRoles<f64> {
    VariableRoles::standard(vec![f64::unit_from_turns(t1), f64::unit_from_turns(t2)]).unwrap()
}

fn close(a: &TruncatedSeries<f64>, b: &TruncatedSeries<f64>, rel: f64) -> bool {
    let scale = 1.0 + a.max_abs_coeff().max(b.max_abs_coeff());
    a.sub(b).unwrap().max_abs_coeff() <= rel * scale
}

proptest! {
    #[test]
    fn mul_commutes(a in int_series(), b in int_series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn mul_associates(a in int_series(), b in int_series(), c in int_series()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn mul_distributes(a in int_series(), b in int_series(), c in int_series()) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn rotation_is_multiplicative(
        a in real_series(), b in real_series(),
        t1 in 0.01f64..0.49, t2 in 0.01f64..0.49, p in -3i64..=3,
    ) {
        let r = roles(t1, t2);
        let l = a.mul(&b).unwrap().rotate(&r, p).unwrap();
        let rr = a.rotate(&r, p).unwrap().mul(&b.rotate(&r, p).unwrap()).unwrap();
        prop_assert!(close(&l, &rr, 1e-13));
    }

    #[test]
    fn rotation_inverts(a in real_series(), t1 in 0.01f64..0.49, t2 in 0.01f64..0.49) {
        let r = roles(t1, t2);
        let back = a.rotate(&r, 1).unwrap().rotate(&r, -1).unwrap();
        prop_assert!(close(&back, &a, 1e-15));
    }

    #[test]
    fn average_is_a_projection(a in int_series(), t1 in 0.01f64..0.49, t2 in 0.01f64..0.49, p in -5i64..=5) {
        let r = roles(t1, t2);
        let avg = a.average(&r).unwrap();
        prop_assert_eq!(avg.average(&r).unwrap(), avg.clone());
        prop_assert!(a.bracket(&r).unwrap().average(&r).unwrap().is_zero());
        prop_assert_eq!(a.rotate(&r, p).unwrap().average(&r).unwrap(), avg.clone());
        prop_assert_eq!(avg.add(&a.bracket(&r).unwrap()).unwrap(), a);
    }

    #[test]
    fn square_root_squares_back(c0 in 0.5f64..2.0, a in real_series()) {
        let mut g = a.filter_terms(|e| e.degree() > 0);
        g = g.add(&TruncatedSeries::constant(M, D, Complex::new(c0, 0.0)).unwrap()).unwrap();
        let h = g.sqrt_series().unwrap();
        let r = h.mul(&h).unwrap().sub(&g).unwrap();
        prop_assert!(r.max_abs_coeff() < 1e-12 * (1.0 + g.max_abs_coeff()).powi(D as i32));
        let w = h.reciprocal().unwrap();
        let one = TruncatedSeries::constant(M, D, Complex::new(1.0, 0.0)).unwrap();
        prop_assert!(close(&w.mul(&h).unwrap(), &one, 1e-10));
    }

    #[test]
    fn substitution_respects_grading(
        f in prop::collection::vec((prop::collection::vec(0u32..=3, 2), -3i32..=3), 1..6),
        c1 in real_series(), c2 in real_series(),
    ) {
        let f = TruncatedSeries::from_terms(
            2, D, f.into_iter().map(|(e, c)| (e, Complex::new(c as f64, 0.0))),
        ).unwrap();
        let chi1 = c1.filter_terms(|e| e.degree() >= 1);
        let chi2 = c2.filter_terms(|e| e.degree() >= 1);
        let g = f.substitute(&[chi1, chi2]).unwrap();
        if let (Some(df), Some(dg)) = (f.min_degree(), g.min_degree()) {
            prop_assert!(dg >= df);
        }
    }
}
