use billiard_core::analyzer::*;
use billiard_core::frequency::{make_frequencies, ContinuedFraction, FrequencySpec, FrequencyVector, Ratio};
use billiard_core::solver::{solve, SolverConfig};
use billiard_core::{Error, Precision};
use proptest::prelude::*;

fn table_freqs() -> FrequencyVector {
    let cf = |s: &str| FrequencySpec::Cf(s.parse::<ContinuedFraction>().unwrap());
    make_frequencies(&[cf("3,3,[1]"), cf("2,5,[2]")], 9).unwrap()
}

fn model(lo: usize, hi: usize, b_inf: f64, sigma: f64, c2: f64) -> Vec<(usize, f64)> {
    (lo..=hi)
        .map(|j| {
            let x = j as f64;
            (j, b_inf * (1.0 + sigma / x + c2 / (x * x)))
        })
        .collect()
}

const PUBLISHED_ROWS: [&[&str]; 6] = [
    &[".50276", "1.0749", "1.8853"],
    &[".38788", "1.1811", "1.9557", "3.6123"],
    &[".36853", "1.5808", "2.7866", "4.5700", "8.6479"],
    &[".39228", "2.3233", "4.4113", "7.3709", "12.080", "23.183"],
    &[".44643", "3.6066", "7.3683", "12.798", "20.965", "34.380", "66.587"],
    &[".53202", "5.8039", "12.711", "23.049", "38.630", "62.628", "102.77", "200.34"],
];

#[test]
fn geometric_ratios_are_constant() {
    let c: Vec<f64> = (0..10).map(|j| 3.0 * 0.4f64.powi(j)).collect();
    let r = ratios(&c).unwrap();
    assert_eq!(r.points.len(), 9);
    assert!(r.points.iter().all(|p| (p.b - 0.4).abs() < 1e-15));
    assert!(r.sign_changes.is_empty());
}

#[test]
fn power_law_gives_minus_three_halves() {
    let c: Vec<f64> = (0..=150).map(|j| 0.4f64.powi(j) * (j.max(1) as f64).powf(-1.5)).collect();
    let r = ratios(&c).unwrap();
    let fit = fit_asymptotic(&r.pairs(), (50, 150)).unwrap();
    assert!((fit.b_inf - 0.4).abs() < 1e-6, "{fit:?}");
    assert!((fit.sigma + 1.5).abs() < 1e-3, "{fit:?}");
    assert!(fit.agree);
}

#[test]
fn ratio_errors() {
    assert!(matches!(ratios(&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]), Err(Error::Fit(_))));
    let gap = ratios(&[-0.5, 1.0, 2.0, 0.0, 3.0, 4.0, 5.0, 6.0]).unwrap_err();
    assert!(matches!(gap, Error::Gap(_)));
    assert_eq!(gap.exit_code(), 2);
    let r = ratios(&[-0.5, 1.0, 2.0, -3.0, 4.0, 5.0, 6.0]).unwrap();
    assert_eq!(r.sign_changes, vec![1, 3, 4]);
    assert!(r.positive_from(5));
    assert!(!r.positive_from(2));
}

#[test]
fn exact_model_is_recovered() {
    let b = model(5, 60, 0.5, -1.5, 0.0);
    let fit = fit_asymptotic(&b, (5, 60)).unwrap();
    assert!((fit.b_inf - 0.5).abs() < 1e-12 && (fit.sigma + 1.5).abs() < 1e-12, "{fit:?}");
    assert!(fit.rms_residual < 1e-14);
    assert!((fit.richardson.b_inf - 0.5).abs() < 1e-12);
    assert!((fit.richardson.sigma + 1.5).abs() < 1e-9);
}

#[test]
fn second_order_contamination() {
    let b = model(1, 150, 0.5, -1.5, 2.0);
    let fit = fit_asymptotic(&b, (50, 150)).unwrap();
    assert!((fit.sigma + 1.5).abs() < 0.03, "{fit:?}");
    assert!(fit.agree);
    let r = richardson(&b, 150).unwrap();
    assert!((r.sigma + 1.5).abs() < 1e-6);
}

#[test]
fn bad_windows_are_fit_errors() {
    let b = model(1, 100, 0.5, -1.5, 0.0);
    assert!(matches!(fit_asymptotic(&b, (3, 100)), Err(Error::Fit(_))));
    assert!(matches!(fit_asymptotic(&b, (50, 51)), Err(Error::Fit(_))));
    assert!(matches!(fit_asymptotic(&b, (50, 120)), Err(Error::Fit(_))));
    // 1/j nearly constant across the window
    let far = model(1_000_000, 1_000_002, 0.5, -1.5, 0.0);
    assert!(matches!(fit_asymptotic(&far, (1_000_000, 1_000_002)), Err(Error::Fit(_))));
    assert_eq!(default_window(200), (66, 200));
    assert_eq!(default_window(9), (5, 9));
}

proptest! {
    #[test]
    fn planted_parameters_come_back(b_inf in 0.2f64..5.0, sigma in -3.0f64..1.0, c2 in -3.0f64..3.0) {
        let b = model(1, 150, b_inf, sigma, c2);
        let fit = fit_asymptotic(&b, (50, 150)).unwrap();
        prop_assert!((fit.b_inf / b_inf - 1.0).abs() < 1e-9);
        prop_assert!((fit.sigma - sigma).abs() < 1e-6);
    }
}

#[test]
fn solved_ratios_have_positive_tail() {
    let fv = make_frequencies(&[FrequencySpec::Ratio(Ratio::new(200, GRID_DEN).unwrap())], 9).unwrap();
    let st = solve(&SolverConfig::new(1, 60), &fv).unwrap();
    let r = ratios(&st.one_dim_coefficients()).unwrap();
    assert_eq!(r.sign_changes, vec![1]);
    let tail: Vec<f64> = r.points.iter().skip(20).map(|p| p.b).collect();
    assert!(tail.windows(2).all(|w| w[1] > w[0]), "{tail:?}");
}

#[test]
fn sigma_at_a_grid_frequency() {
    let spec = FrequencySpec::Ratio(Ratio::new(200, GRID_DEN).unwrap());
    let fit = scan_one(&spec, &ScanOptions::default()).unwrap();
    assert!(fit.sigma > -1.6 && fit.sigma < -1.4, "{fit:?}");
    assert!(fit.agree, "{fit:?}");
}

#[test]
fn table_reproduces_published_rows() {
    let st = solve(&SolverConfig::new(2, 7), &table_freqs()).unwrap();
    let rows = bombieri_table(&st).unwrap();
    assert_eq!(rows.len(), 6);
    for (row, want) in rows.iter().zip(PUBLISHED_ROWS) {
        assert_eq!(row.entries.len(), row.k / 2 + 1);
        for (v, p) in row.entries.iter().zip(want) {
            assert!(matches_printed(*v, p, 5e-5), "k={} {v} vs {p}", row.k);
        }
    }
    // a₂₂ = 1.0749·√6
    assert!((2.0 * st.f_coeff(&[1, 1]) - 2.6330).abs() < 1e-3);
}

#[test]
fn table_rows_reverse_under_swap_and_ignore_gauge() {
    let fv = table_freqs();
    let st = solve(&SolverConfig::new(2, 6), &fv).unwrap();
    let sw = solve(&SolverConfig::new(2, 6), &fv.swapped(0, 1).unwrap()).unwrap();
    let ga = solve(&SolverConfig::new(2, 6).with_gauge(vec![0.5, 2.0]), &fv).unwrap();
    let (a, b, c) = (bombieri_table(&st).unwrap(), bombieri_table(&sw).unwrap(), bombieri_table(&ga).unwrap());
    for ((ra, rb), rc) in a.iter().zip(&b).zip(&c) {
        let h = ra.k / 2;
        for i in 0..=h {
            assert!((ra.entries[i] / rb.entries[h - i] - 1.0).abs() < 1e-9);
            assert!((ra.entries[i] / rc.entries[i] - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn table_needs_two_frequencies_and_enough_orders() {
    let st = solve(&SolverConfig::new(2, 3), &table_freqs()).unwrap();
    assert!(bombieri_row(&st, 8).is_err());
    assert!(bombieri_row(&st, 5).is_err());
    let one = make_frequencies(&[FrequencySpec::Turns(0.31)], 9).unwrap();
    let st1 = solve(&SolverConfig::new(1, 3), &one).unwrap();
    assert!(bombieri_table(&st1).is_err());
    let mut out = Vec::new();
    write_table_csv(&bombieri_table(&st).unwrap(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("k,j1,entry\n4,4,"));
    assert_eq!(text.lines().count(), 1 + 3 + 4);
}

#[test]
fn small_scan_marks_resonances() {
    let grid: Vec<FrequencySpec> = ["3/10", "160/509", "1/3", "200/509"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let opts = ScanOptions {
        k_max: 40,
        precision: Precision::Ext,
        workers: Some(2),
        ..ScanOptions::default()
    };
    let pts = alpha_scan(&grid, &opts).unwrap();
    let status: Vec<ScanStatus> = pts.iter().map(|p| p.status).collect();
    assert_eq!(status, vec![ScanStatus::Gap, ScanStatus::Ok, ScanStatus::Gap, ScanStatus::Ok]);
    assert!(pts[1].b_inf_inv_sqrt.unwrap() > 0.0);
    assert!(pts[0].b_inf_inv_sqrt.is_none());

    let mut csv = Vec::new();
    write_scan_csv(&pts, &mut csv).unwrap();
    let text = String::from_utf8(csv.clone()).unwrap();
    assert!(text.starts_with("alpha_over_2pi,b_inf_inv_sqrt,status"));
    assert_eq!(read_scan_csv(&csv[..]).unwrap(), pts);

    let svg = render_svg(&pts, &PlotOptions::default());
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches("firebrick").count(), 2);
}

#[test]
fn default_grid_covers_the_interval() {
    let g = default_grid();
    assert_eq!(g.len(), 103);
    let t: Vec<f64> = g.iter().map(|s| s.turns::<f64>()).collect();
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert!(t[0] > 0.3 - 1e-15 && *t.last().unwrap() < 0.5);
    assert_eq!(t[0], 0.3);
    assert!(t.contains(&(1.0 / 3.0)));
}
