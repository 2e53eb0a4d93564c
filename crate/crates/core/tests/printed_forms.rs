//! The published A/B-coefficient finite-time rates compared with the
//! derivative-based ones. The two are reported side by side; only the
//! properties both must share are asserted.

use udw_core::model::{DetectorParams, Regime};
use udw_core::rates::{rate_finite, rate_finite_printed, rate_infinite, Direction};

fn params(abar: f64, w: f64, sigma: f64) -> DetectorParams {
    DetectorParams::new(abar, w, sigma, 0.01, Regime::NonRelativistic).unwrap()
}

#[test]
fn comparison_report() {
    println!(
        "{:>6} {:>5} {:>14} {:>22} {:>22} {:>12}",
        "abar", "w", "direction", "derivative", "printed", "corr ratio"
    );
    for abar in [1.0, 10.0, 100.0] {
        for w in [0.0, 0.1] {
            for d in [Direction::Excite, Direction::Deexcite] {
                let p = params(abar, w, 10.0);
                let base = rate_infinite(&p, d).unwrap();
                let ours = rate_finite(&p, d).unwrap();
                let printed = rate_finite_printed(&p, d).unwrap();
                assert!(ours.is_finite() && printed.is_finite());
                let ratio = (printed - base) / (ours - base);
                println!("{abar:>6} {w:>5} {:>14} {ours:>22.15e} {printed:>22.15e} {ratio:>12.4e}", d.to_string());
            }
        }
    }
}

#[test]
fn both_forms_reduce_to_infinite_time() {
    for abar in [1.0, 10.0, 100.0] {
        for w in [0.0, 0.1] {
            for d in [Direction::Excite, Direction::Deexcite] {
                let p = params(abar, w, 1e7);
                let base = rate_infinite(&p, d).unwrap();
                let ours = rate_finite(&p, d).unwrap();
                let printed = rate_finite_printed(&p, d).unwrap();
                assert!((ours - base).abs() / base < 1e-9);
                assert!((printed - base).abs() / base < 1e-6, "({abar}, {w}, {d})");
            }
        }
    }
}

#[test]
fn both_corrections_fall_as_inverse_sigma_squared() {
    let p10 = params(10.0, 0.1, 10.0);
    let p20 = params(10.0, 0.1, 20.0);
    for d in [Direction::Excite, Direction::Deexcite] {
        let base = rate_infinite(&p10, d).unwrap();
        let ours = (rate_finite(&p10, d).unwrap() - base) / (rate_finite(&p20, d).unwrap() - base);
        let printed = (rate_finite_printed(&p10, d).unwrap() - base) / (rate_finite_printed(&p20, d).unwrap() - base);
        assert!((ours - 4.0).abs() < 1e-9);
        assert!((printed - 4.0).abs() < 1e-9);
    }
}
