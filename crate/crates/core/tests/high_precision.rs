//! Multi-precision evaluation of the velocity factor F(ā) straight from its
//! hyperbolic bracket, used as an oracle for the double-precision branches.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use udw_core::rates::{velocity_factor_f, velocity_factor_f_direct, velocity_factor_f_series, velocity_factor_slope};

const RM: RoundingMode = RoundingMode::ToEven;

/// F(ā) = ā·B(u)·csch²(u)/24 with u = π/ā and
/// B = 2 + 9u²/π² − 2(1 + u²/π²)·u·coth u, at `bits` of working precision.
fn f_bigfloat(abar: u64, bits: usize, cc: &mut Consts) -> BigFloat {
    let p = bits;
    let a = BigFloat::from_u64(abar, p);
    let one = BigFloat::from_u64(1, p);
    let two = BigFloat::from_u64(2, p);
    let nine = BigFloat::from_u64(9, p);
    let pi = cc.pi(p, RM);
    let u = pi.div(&a, p, RM);
    let inv_a2 = one.div(&a.mul(&a, p, RM), p, RM); // u²/π²
    let coth = one.div(&u.tanh(p, RM, cc), p, RM);
    let csch2 = coth.mul(&coth, p, RM).sub(&one, p, RM);
    let b = two.add(&nine.mul(&inv_a2, p, RM), p, RM).sub(
        &two.mul(&one.add(&inv_a2, p, RM), p, RM).mul(&u, p, RM).mul(&coth, p, RM),
        p,
        RM,
    );
    a.mul(&b, p, RM).mul(&csch2, p, RM).div(&BigFloat::from_u64(24, p), p, RM)
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    x.format(Radix::Dec, RM, cc).unwrap().parse().unwrap()
}

fn digits(x: &BigFloat, cc: &mut Consts) -> String {
    x.format(Radix::Dec, RM, cc).unwrap()
}

#[test]
fn f100_to_thirty_digits() {
    let mut cc = Consts::new().unwrap();
    let hi = f_bigfloat(100, 512, &mut cc);
    let lo = f_bigfloat(100, 384, &mut cc);
    // Two working precisions must agree far beyond 30 digits.
    let diff = hi.sub(&lo, 512, RM).div(&hi, 512, RM);
    let rel = to_f64(&diff, &mut cc).abs();
    assert!(rel < 1e-40, "working precisions disagree: {rel:e}");

    let reference = to_f64(&hi, &mut cc);
    println!("F(100) = {}", digits(&hi, &mut cc));
    assert!((reference - 0.1773).abs() <= 0.0018, "{reference}");
    let ours = velocity_factor_f(100.0);
    assert!((ours - reference).abs() / reference < 1e-13, "{ours} vs {reference}");
}

#[test]
fn both_branches_against_multiprecision() {
    let mut cc = Consts::new().unwrap();
    for abar in [2u64, 5, 10, 18, 20, 22, 50, 100, 1000, 10_000] {
        let reference = to_f64(&f_bigfloat(abar, 512, &mut cc), &mut cc);
        let ours = velocity_factor_f(abar as f64);
        assert!((ours - reference).abs() / reference.abs() < 1e-12, "ā = {abar}: {ours} vs {reference}");
    }
    for abar in [18u64, 19, 20, 21, 22] {
        let reference = to_f64(&f_bigfloat(abar, 512, &mut cc), &mut cc);
        let direct = velocity_factor_f_direct(abar as f64);
        let series = velocity_factor_f_series(abar as f64);
        assert!((direct - reference).abs() / reference < 1e-10, "direct at {abar}");
        assert!((series - reference).abs() / reference < 1e-12, "series at {abar}");
    }
}

#[test]
fn asymptotic_slope_against_multiprecision() {
    let mut cc = Consts::new().unwrap();
    let f = to_f64(&f_bigfloat(10_000_000, 512, &mut cc), &mut cc);
    assert!((f / 1e7 / velocity_factor_slope() - 1.0).abs() < 1e-9);
}
