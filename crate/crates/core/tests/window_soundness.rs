//! Window-soundness properties: any coefficient reported exact under a small
//! truncation/window must equal the one computed at a larger truncation (or
//! against the fully-known ground truth), across the operation set. Plus the
//! ring axioms on the representable fragment.

use k3series::plaurent::PLaurent;
use k3series::qseries::QSeries;
use k3series::rational::{rat, rat_int, Rational};
use k3series::trunc::TruncationSpec;
use k3series::window::ENTIRE;
use num_traits::Zero;
use proptest::prelude::*;

/// Terms of a small exactly-known q/p polynomial.
fn terms_strategy() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec(
        ((0i64..4), (-2i64..=2), (-6i64..=6).prop_filter("nonzero", |c| *c != 0)),
        1..5,
    )
}

fn truth_from_terms(terms: &[(i64, i64, i64)]) -> QSeries {
    let mut slices: std::collections::BTreeMap<i64, Vec<(i64, Rational)>> = Default::default();
    for &(j, k, c) in terms {
        slices.entry(j).or_default().push((k, rat_int(c)));
    }
    QSeries::from_slices(
        slices
            .into_iter()
            .map(|(j, ts)| (j, PLaurent::from_terms(&ts)))
            .collect(),
        0,
        ENTIRE,
    )
}

/// A sound windowed view of an exactly-known series: per-slice p-window lows
/// at or below the true valuation, arbitrary finite tops, and a finite
/// q-window top.
fn view_of(truth: &QSeries, q_high: i64, shrink: i64, p_top: i64) -> QSeries {
    let mut slices = Vec::new();
    for (j, s) in truth.slices() {
        if j > q_high {
            continue;
        }
        let val = s.valuation().unwrap_or(0);
        let terms: Vec<(i64, Rational)> = s.terms().map(|(k, c)| (k, c.clone())).collect();
        slices.push((j, PLaurent::with_window(&terms, val - shrink, p_top)));
    }
    QSeries::from_slices(slices, 0, q_high)
}

/// Every coefficient the view certifies must match the ground truth.
fn assert_view_sound(view: &QSeries, truth: &QSeries) {
    for (j, s) in view.slices() {
        let lo = s.exact_low().max(-12);
        let hi = s.exact_high().min(12);
        for k in (lo - 2)..=hi {
            let got = view.coeff(j, k).unwrap();
            let expect = truth.coeff(j, k).unwrap();
            assert_eq!(got, expect, "view claims wrong value at q^{j} p^{k}");
        }
    }
    // zero-claims below the view's q-window are real
    for j in -3..view.q_low().min(3) {
        assert!(truth.coeff(j, 0).unwrap().is_zero());
    }
}

proptest! {
    #[test]
    fn mul_is_sound_under_any_window(
        a in terms_strategy(),
        b in terms_strategy(),
        qh_a in 1i64..4,
        qh_b in 1i64..4,
        shrink in 0i64..2,
        p_top in 0i64..5,
    ) {
        let fa = truth_from_terms(&a);
        let fb = truth_from_terms(&b);
        let va = view_of(&fa, qh_a, shrink, p_top);
        let vb = view_of(&fb, qh_b, 0, p_top + 1);
        assert_view_sound(&va.mul(&vb), &fa.mul(&fb));
    }

    #[test]
    fn add_is_sound_under_any_window(
        a in terms_strategy(),
        b in terms_strategy(),
        qh in 1i64..4,
        p_top in 0i64..5,
    ) {
        let fa = truth_from_terms(&a);
        let fb = truth_from_terms(&b);
        let va = view_of(&fa, qh, 1, p_top);
        let vb = view_of(&fb, qh + 1, 0, p_top + 2);
        assert_view_sound(&va.add(&vb), &fa.add(&fb));
    }

    #[test]
    fn ring_axioms_on_exact_polynomials(
        a in terms_strategy(),
        b in terms_strategy(),
        c in terms_strategy(),
    ) {
        let (fa, fb, fc) = (truth_from_terms(&a), truth_from_terms(&b), truth_from_terms(&c));
        let assoc_l = fa.mul(&fb).mul(&fc);
        let assoc_r = fa.mul(&fb.mul(&fc));
        let dist_l = fa.mul(&fb.add(&fc));
        let dist_r = fa.mul(&fb).add(&fa.mul(&fc));
        for j in 0..=12 {
            for k in -8..=8 {
                prop_assert_eq!(assoc_l.coeff(j, k).unwrap(), assoc_r.coeff(j, k).unwrap());
                prop_assert_eq!(dist_l.coeff(j, k).unwrap(), dist_r.coeff(j, k).unwrap());
            }
        }
    }

    #[test]
    fn invert_is_two_sided_and_truncation_stable(
        a in terms_strategy(),
        lead in (-4i64..=4).prop_filter("nonzero", |c| *c != 0),
    ) {
        // force an invertible leading slice
        let mut f = truth_from_terms(&a);
        f = f.add(&QSeries::constant(rat_int(lead) + rat(1, 2)));
        let small = TruncationSpec::q_only(3, 4);
        let large = TruncationSpec::q_only(7, 9);
        let inv_s = f.invert(&small).unwrap();
        let inv_l = f.invert(&large).unwrap();
        // small-window coefficients agree with the larger computation
        assert_view_sound(&inv_s, &inv_l);
        // two-sided inverse within propagated windows
        for prod in [f.mul(&inv_l), inv_l.mul(&f)] {
            for (j, s) in prod.slices() {
                for k in s.exact_low().max(-10)..=s.exact_high().min(10) {
                    let expect = if j == 0 && k == 0 { rat_int(1) } else { rat_int(0) };
                    prop_assert_eq!(prod.coeff(j, k).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn derived_ops_stable_across_truncations(
        a in terms_strategy(),
    ) {
        // p-scale derivative and log-derivative pipeline at two truncations;
        // the half-integer constant cannot be cancelled by integer terms
        let mut f = truth_from_terms(&a);
        f = f.add(&QSeries::constant(rat(7, 2)));
        let small = TruncationSpec::q_only(2, 3);
        let large = TruncationSpec::q_only(6, 10);
        let d_s = f.p_scale_derivative().mul(&f.invert(&small).unwrap());
        let d_l = f.p_scale_derivative().mul(&f.invert(&large).unwrap());
        assert_view_sound(&d_s, &d_l);
        let l_s = f.log_derivative_sq(&small).unwrap();
        let l_l = f.log_derivative_sq(&large).unwrap();
        assert_view_sound(&l_s, &l_l);
    }
}

#[test]
fn queries_below_windows_are_zero_and_above_error() {
    let f = truth_from_terms(&[(1, 0, 5)]);
    let v = view_of(&f, 2, 1, 3);
    assert!(v.coeff(-5, 0).unwrap().is_zero());
    assert!(v.coeff(1, -20).unwrap().is_zero());
    assert!(v.coeff(3, 0).is_err());
    assert!(v.coeff(1, 4).is_err());
}
