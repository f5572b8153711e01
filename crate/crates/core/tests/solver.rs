use billiard_core::frequency::{make_frequencies, ContinuedFraction, FrequencySpec, FrequencyVector};
use billiard_core::solver::{
    degree2_sanity, reference, solve, solve_in, EngineKind, SolutionState, SolverConfig,
};
use billiard_core::{DoubleDouble, Error, Precision, Real};

fn one(t: f64) -> FrequencyVector {
    make_frequencies(&[FrequencySpec::Turns(t)], 9).unwrap()
}

fn cf(s: &str) -> FrequencySpec {
    FrequencySpec::Cf(s.parse::<ContinuedFraction>().unwrap())
}

fn table_freqs() -> FrequencyVector {
    make_frequencies(&[cf("3,3,[1]"), cf("2,5,[2]")], 9).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn max_rel_f(a: &SolutionState, b: &SolutionState) -> f64 {
    let mut worst = 0.0f64;
    for (fa, fb) in a.f_forms.iter().zip(&b.f_forms) {
        for ((sa, va), (sb, vb)) in fa.coeffs.iter().zip(&fb.coeffs) {
            assert_eq!(sa, sb);
            worst = worst.max(rel(*va, *vb));
        }
    }
    worst
}

/// Values of an independent whole-series solver written outside this crate.
#[test]
fn matches_frozen_reference_at_038() {
    let st = solve(&SolverConfig::new(1, 4), &one(0.38)).unwrap();
    let want = [-0.5, 0.8644843137107057, 0.612299312897225, 0.8568001673515593, 1.4944098382538014];
    for (got, want) in st.one_dim_coefficients().iter().zip(want) {
        assert!(rel(*got, want) < 1e-13, "{got} vs {want}");
    }
}

#[test]
fn closed_form_order_one() {
    // α = π/2: F = (2 − 0)/4
    let st = solve(&SolverConfig::new(1, 1), &one(0.25)).unwrap();
    assert!((st.f_coeff(&[1]) - 0.5).abs() < 1e-15);
    assert!(st.diagnostics[0].init_mismatch < 1e-14);
    let st = solve(&SolverConfig::new(2, 1), &table_freqs()).unwrap();
    for (j, a) in st.frequencies.alphas.iter().enumerate() {
        let mut s = vec![0, 0];
        s[j] = 1;
        assert!(rel(st.f_coeff(&s), (1.0 - a.cos()) / 2.0) < 1e-14);
    }
}

#[test]
fn grid_and_sparse_engines_agree() {
    let fv = one(0.38);
    let a = solve(&SolverConfig::new(1, 12).with_engine(EngineKind::Grid), &fv).unwrap();
    let b = solve(&SolverConfig::new(1, 12).with_engine(EngineKind::Sparse), &fv).unwrap();
    assert!(max_rel_f(&a, &b) < 1e-11);
    let sum = |s: &SolutionState| -> f64 {
        s.chi_forms.iter().flat_map(|c| c.coeffs.iter()).map(|c| c.1.norm()).sum()
    };
    assert!(rel(sum(&a), sum(&b)) < 1e-11);
}

#[test]
fn extended_precision_agrees_with_binary64() {
    let fv = one(0.4142);
    let cfg = SolverConfig::new(1, 10);
    let a = solve(&cfg, &fv).unwrap();
    let b = solve(&cfg.clone().with_precision(Precision::Ext), &fv).unwrap();
    assert!(max_rel_f(&a, &b) < 1e-12);
}

#[test]
fn gauge_invariance_of_f() {
    let fv = one(0.38);
    let a = solve(&SolverConfig::new(1, 8), &fv).unwrap();
    let b = solve(&SolverConfig::new(1, 8).with_gauge(vec![0.5]), &fv).unwrap();
    assert!(max_rel_f(&a, &b) < 1e-10);
    let fv = table_freqs();
    let a = solve(&SolverConfig::new(2, 8), &fv).unwrap();
    let b = solve(&SolverConfig::new(2, 8).with_gauge(vec![0.5, 0.5]), &fv).unwrap();
    assert!(max_rel_f(&a, &b) < 1e-10);
    let c = solve(&SolverConfig::new(2, 8).with_gauge(vec![0.7, 1.9]), &fv).unwrap();
    assert!(max_rel_f(&a, &c) < 1e-10);
}

fn check_chord<T: Real>(st: &SolutionState<T>, tol: f64) {
    let k_max = st.k_max();
    let d = 2 * k_max as u32;
    let r = reference::assemble(st, d).unwrap();
    assert!(r.chord_residual(d) < tol, "{} {:?}", r.chord_residual(d), st.config);
    for e in &r.explicit {
        for k in 1..=k_max {
            let scale = st.diagnostics[k - 1].residual_scale.max(1.0);
            let part = e.homogeneous_part(2 * k as u32 - 1).max_abs_coeff();
            assert!(part < 1e-12 * scale, "explicit residual {part} at order {k}");
        }
    }
}

#[test]
fn averaged_chord_length_is_constant() {
    check_chord(&solve(&SolverConfig::new(1, 8), &one(0.38)).unwrap(), 1e-10);
    check_chord(&solve(&SolverConfig::new(1, 8).with_gauge(vec![0.5]), &one(0.42)).unwrap(), 1e-10);
    check_chord(&solve(&SolverConfig::new(2, 5), &table_freqs()).unwrap(), 1e-10);
    // at n = 2 the diagonal sums cancel terms of size 1e5, so binary64 rounding
    // alone reaches 1e-10 from K = 6 on
    let cfg = SolverConfig::new(2, 7).with_precision(Precision::Ext);
    check_chord(&solve_in::<DoubleDouble>(&cfg, &table_freqs()).unwrap(), 1e-20);
}

#[test]
fn other_f0_solves_the_whole_series_equation() {
    let mut cfg = SolverConfig::new(1, 6);
    cfg.f0 = -0.7;
    let st = solve(&cfg, &one(0.37)).unwrap();
    let lam = (2.0 * std::f64::consts::PI * 0.37).cos();
    assert!(rel(st.f_coeff(&[1]), (2.0 - 2.0 * lam) / 5.6) < 1e-14);
    let r = reference::assemble(&st, 12).unwrap();
    assert!(r.chord_residual(12) < 1e-10);
    for e in &r.explicit {
        for k in 1..=6 {
            let scale = st.diagnostics[k - 1].residual_scale.max(1.0);
            assert!(e.homogeneous_part(2 * k as u32 - 1).max_abs_coeff() < 1e-12 * scale);
        }
    }
}

#[test]
fn frequency_reflection_leaves_f_unchanged() {
    let cfg = SolverConfig::new(1, 8);
    let a = solve(&cfg, &one(0.38)).unwrap();
    // 1 − α/(2π) is outside the normalized range, so bypass validation
    let mut fv = one(0.38);
    fv.specs = vec![FrequencySpec::Turns(0.62)];
    fv.turns = vec![0.62];
    let b = solve(&cfg, &fv).unwrap();
    assert!(max_rel_f(&a, &b) < 1e-10);
}

#[test]
fn swapping_coordinates_swaps_f() {
    let fv = table_freqs();
    let cfg = SolverConfig::new(2, 6);
    let a = solve(&cfg, &fv).unwrap();
    let b = solve(&cfg, &fv.swapped(0, 1).unwrap()).unwrap();
    for form in &a.f_forms {
        for (s, v) in &form.coeffs {
            let w = b.f_coeff(&[s[1], s[0]]);
            assert!(rel(*v, w) < 1e-10, "{s:?}: {v} vs {w}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let cfg = SolverConfig::new(2, 5);
    let a = solve(&cfg, &table_freqs()).unwrap().to_json_string().unwrap();
    let b = solve(&cfg, &table_freqs()).unwrap().to_json_string().unwrap();
    assert_eq!(a, b);
    let c = solve(&SolverConfig::new(1, 20), &one(0.41)).unwrap().to_json_string().unwrap();
    let d = solve(&SolverConfig::new(1, 20), &one(0.41)).unwrap().to_json_string().unwrap();
    assert_eq!(c, d);
}

#[test]
fn json_round_trip() {
    let st = solve(&SolverConfig::new(2, 4), &table_freqs()).unwrap();
    let s = st.to_json_string().unwrap();
    let back = SolutionState::from_json_str(&s).unwrap();
    assert_eq!(back, st);
}

#[test]
fn f_csv_lists_every_coefficient() {
    let st = solve(&SolverConfig::new(2, 3), &table_freqs()).unwrap();
    let mut buf = Vec::new();
    st.write_f_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s1,s2,F");
    // 1 + 2 + 3 + 4 multi-indices of norm 0..=3
    assert_eq!(lines.len(), 1 + 10);
    assert!(lines[1].starts_with("0,0,-5e-1"));
}

#[test]
fn chi_is_hermitian_odd_and_gauge_free() {
    for (cfg, fv) in [(SolverConfig::new(1, 7), one(0.38)), (SolverConfig::new(2, 5), table_freqs())] {
        let st = solve(&cfg, &fv).unwrap();
        let n = cfg.n;
        for form in &st.chi_forms {
            let j = form.j - 1;
            for (e, c) in &form.coeffs {
                let deg: u32 = e.iter().sum();
                assert_eq!(deg, form.degree);
                for i in 0..n {
                    assert_eq!((e[i] + e[n + i]) % 2, u32::from(i == j), "parity {e:?}");
                }
                let mut mirror = e.clone();
                for i in 0..n {
                    mirror.swap(i, n + i);
                }
                let m = form.coeffs.iter().find(|x| x.0 == mirror).expect("mirror present").1;
                assert_eq!(*c, m.conj());
                let harmonic: Vec<i64> = (0..n).map(|i| e[i] as i64 - e[n + i] as i64).collect();
                let gauge = (0..n).all(|i| if i == j { harmonic[i].abs() == 1 } else { harmonic[i] == 0 });
                if form.degree >= 3 && gauge {
                    assert_eq!(c.norm(), 0.0, "gauge coefficient {e:?}");
                }
            }
        }
    }
}

#[test]
fn quarter_turn_is_resonant_at_order_three() {
    for p in [Precision::F64, Precision::Ext] {
        let err = solve(&SolverConfig::new(1, 4).with_precision(p), &one(0.25)).unwrap_err();
        match err {
            Error::SmallDivisor { j, ref m, k, degree, .. } => {
                assert_eq!((j, k, degree), (1, 2, 3));
                assert_eq!(m.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![3]);
            }
            e => panic!("unexpected {e}"),
        }
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn sphere_limit() {
    let mut prev = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let t = 0.5 * (1.0 - eps);
        let st = solve(&SolverConfig::new(1, 2), &one(t)).unwrap();
        let alpha = 2.0 * std::f64::consts::PI * t;
        assert!(rel(st.f_coeff(&[1]), (1.0 - alpha.cos()) / 2.0) < 1e-14);
        let gap = (st.f_coeff(&[2]) - 1.0).abs();
        assert!(gap < prev, "f4 does not approach 1 monotonically");
        prev = gap;
    }
    assert!(prev < 0.02);
}

#[test]
fn degree_two_sanity_detects_perturbation() {
    let mut st = solve(&SolverConfig::new(1, 3), &one(0.38)).unwrap();
    assert!(degree2_sanity(&st).unwrap() < 1e-12);
    let st2 = solve(&SolverConfig::new(2, 2), &table_freqs()).unwrap();
    assert!(degree2_sanity(&st2).unwrap() < 1e-12);
    st.f_forms[1].coeffs[0].1 += 1e-3;
    match degree2_sanity(&st) {
        Err(Error::Consistency(_)) => {}
        other => panic!("expected a consistency error, got {other:?}"),
    }
}

#[test]
fn extended_state_keeps_extra_digits() {
    let fv = one(0.38);
    let cfg = SolverConfig::new(1, 6).with_precision(Precision::Ext);
    let st = solve_in::<DoubleDouble>(&cfg, &fv).unwrap();
    let f2 = st.f_coeff(&[1]);
    // (1 − cos(2π·19/50))/2 to double-double accuracy
    let want = DoubleDouble::new(0.8644843137107057, 0.0);
    assert!((f2 - want).abs().hi() < 1e-16);
    assert!(f2.lo() != 0.0);
}

#[test]
fn invalid_configs_are_rejected() {
    let fv = one(0.38);
    let mut cfg = SolverConfig::new(1, 4);
    cfg.f0 = 0.5;
    assert!(matches!(solve(&cfg, &fv), Err(Error::InvalidConfig { ref field, .. }) if field == "f0"));
    let cfg = SolverConfig::new(2, 4);
    assert!(matches!(solve(&cfg, &fv), Err(Error::InvalidConfig { .. })));
    let cfg = SolverConfig::new(1, 4).with_gauge(vec![-1.0]);
    assert!(matches!(solve(&cfg, &fv), Err(Error::InvalidConfig { ref field, .. }) if field == "gauge_a"));
    let cfg = SolverConfig::new(2, 4).with_engine(EngineKind::Grid);
    assert!(matches!(solve(&cfg, &table_freqs()), Err(Error::InvalidConfig { .. })));
}
