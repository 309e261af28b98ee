use proptest::prelude::*;
use steiner_core::evalzero::{build_function, eval_box_product, eval_series, find_zeros};
use steiner_core::growth::{analyze, classify_gc, estimate_order_from_coeffs, AnalysisOptions, Window};
use steiner_core::volseq::{
    box_volume_sequence, bridge_volume_sequence, mk_sequence, spiral_volume_sequence, validate_chevet, validate_ulc,
    BoxSpec,
};
use steiner_core::Complex64;

fn sides_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..10.0, 1..=max_len)
}

fn explicit(sides: &[f64], k_max: usize) -> steiner_core::volseq::VolumeSequence {
    box_volume_sequence(&BoxSpec::explicit(sides.to_vec()).unwrap(), k_max).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boxes_are_ultra_log_concave(sides in sides_strategy(40)) {
        let v = explicit(&sides, sides.len() + 3);
        prop_assert!(validate_ulc(&v).passed);
        prop_assert!(validate_chevet(&v).passed);
        let m = mk_sequence(&v).unwrap();
        prop_assert!(m.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9) + 1e-300));
    }

    #[test]
    fn box_volumes_ignore_side_order(mut sides in sides_strategy(20)) {
        let a = explicit(&sides, sides.len());
        sides.reverse();
        let mid = sides.len() / 2;
        sides.rotate_left(mid);
        let b = explicit(&sides, sides.len());
        for (x, y) in a.log_v().iter().zip(b.log_v()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn dilation_scales_kth_volume_by_c_to_the_k(sides in sides_strategy(15), c in 0.1f64..5.0) {
        let a = explicit(&sides, sides.len()).dilated(c);
        let scaled: Vec<f64> = sides.iter().map(|l| l * c).collect();
        let b = explicit(&scaled, sides.len());
        for (x, y) in a.log_v().iter().zip(b.log_v()) {
            prop_assert!((x - y).abs() <= 1e-11 * x.abs().max(1.0));
        }
    }

    #[test]
    fn steiner_function_symmetries(sides in sides_strategy(12), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let v = explicit(&sides, sides.len());
        let f = build_function(&v, sides.len()).unwrap();
        let z = Complex64::new(re, im);
        let a = eval_series(&f, z).value;
        let b = eval_series(&f, z.conj()).value;
        let scale = eval_series(&f, Complex64::new(z.norm(), 0.0)).value.re;
        prop_assert!((a.conj() - b).norm() <= 1e-13 * scale);
        let v1: f64 = sides.iter().sum();
        prop_assert!(a.norm() <= (v1 * z.norm()).exp() * (1.0 + 1e-9));
        let p = eval_box_product(&BoxSpec::explicit(sides.clone()).unwrap(), z).unwrap().value;
        prop_assert!((a - p).norm() <= 1e-12 * scale);
    }

    #[test]
    fn increasing_on_positive_axis(sides in sides_strategy(12), x in 0.0f64..5.0, dx in 1e-3f64..1.0) {
        let f = build_function(&explicit(&sides, sides.len()), sides.len()).unwrap();
        let a = eval_series(&f, Complex64::new(x, 0.0)).value;
        let b = eval_series(&f, Complex64::new(x + dx, 0.0)).value;
        prop_assert!(a.im == 0.0 && a.re >= 1.0);
        prop_assert!(b.re > a.re);
    }

    // Separated zeros only: a cluster of m zeros is resolved to about ε^{1/m}.
    #[test]
    fn zeros_expand_back_to_coefficients(
        start in 0.1f64..10.0,
        ratios in prop::collection::vec(1.2f64..3.0, 0..=7),
    ) {
        let mut sides = vec![start];
        for r in ratios {
            let last = *sides.last().unwrap();
            sides.push(if last > 1.0 { last / r } else { last * r });
        }
        sides.sort_by(|a, b| b.total_cmp(a));
        sides.dedup_by(|a, b| *b / *a < 1.2);
        let f = build_function(&explicit(&sides, sides.len()), sides.len()).unwrap();
        let zs = find_zeros(&f).unwrap();
        prop_assert_eq!(zs.len(), sides.len());
        // ∏ (1 − z/z_j)
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for zj in &zs.zeros {
            prop_assert!(zj.norm() > 0.0);
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a / zj;
            }
            poly = next;
        }
        for (got, want) in poly.iter().zip(f.coefficients()) {
            prop_assert!((got - want).norm() <= 1e-8 * want, "{got} vs {want}");
        }
    }
}

#[test]
fn clustered_zeros_still_have_small_residuals() {
    let sides = [5.70, 5.15, 5.29, 5.25, 5.39, 5.5, 5.6, 5.45];
    let f = build_function(&explicit(&sides, 8), 8).unwrap();
    let zs = find_zeros(&f).unwrap();
    assert_eq!(zs.len(), 8);
    assert!(zs.residuals.iter().all(|r| *r <= 1e-10));
}

#[test]
fn generators_pass_validators() {
    for k in [1usize, 2, 10, 500, 3000] {
        for v in [spiral_volume_sequence(k), bridge_volume_sequence(k)] {
            let u = validate_ulc(&v);
            let c = validate_chevet(&v);
            assert!(u.passed && c.passed, "{:?} {k}: {u:?} {c:?}", v.source());
        }
    }
}

#[test]
fn order_is_dilation_invariant() {
    let v = spiral_volume_sequence(1500);
    let w = Window::new(300, 1500);
    let a = estimate_order_from_coeffs(&v, w).unwrap().rho;
    let b = estimate_order_from_coeffs(&v.dilated(7.0), w).unwrap().rho;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn classification_is_deterministic() {
    let specs = [
        spiral_volume_sequence(800),
        bridge_volume_sequence(800),
        spiral_volume_sequence(6),
    ];
    for v in &specs {
        let r1 = analyze(v, &AnalysisOptions::default()).unwrap();
        let r2 = analyze(v, &AnalysisOptions::default()).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(classify_gc(&r1, r1.gc_threshold), r1.classification);
    }
}
