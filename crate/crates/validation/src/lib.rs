//! Independent references for the acceptance suite.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// F(ā) = ā·B(u)·csch²(u)/24 with u = π/ā and
/// B = 2 + 9u²/π² − 2(1 + u²/π²)·u·coth u, at `bits` of working precision.
pub fn velocity_factor_multiprecision(abar: u64, bits: usize, cc: &mut Consts) -> BigFloat {
    let p = bits;
    let a = BigFloat::from_u64(abar, p);
    let one = BigFloat::from_u64(1, p);
    let two = BigFloat::from_u64(2, p);
    let u = cc.pi(p, RM).div(&a, p, RM);
    let inv_a2 = one.div(&a.mul(&a, p, RM), p, RM);
    let coth = one.div(&u.tanh(p, RM, cc), p, RM);
    let csch2 = coth.mul(&coth, p, RM).sub(&one, p, RM);
    let b = two.add(&BigFloat::from_u64(9, p).mul(&inv_a2, p, RM), p, RM).sub(
        &two.mul(&one.add(&inv_a2, p, RM), p, RM).mul(&u, p, RM).mul(&coth, p, RM),
        p,
        RM,
    );
    a.mul(&b, p, RM).mul(&csch2, p, RM).div(&BigFloat::from_u64(24, p), p, RM)
}

/// Reference value of F(ā) checked for stability between two working
/// precisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub value: f64,
    pub digits: String,
    /// Relative difference between the 384- and 512-bit evaluations.
    pub precision_gap: f64,
}

pub fn velocity_factor_reference(abar: u64) -> Reference {
    let mut cc = Consts::new().expect("astro-float constants cache");
    let hi = velocity_factor_multiprecision(abar, 512, &mut cc);
    let lo = velocity_factor_multiprecision(abar, 384, &mut cc);
    let digits = hi.format(Radix::Dec, RM, &mut cc).expect("decimal formatting");
    let gap = hi.sub(&lo, 512, RM).div(&hi, 512, RM);
    let precision_gap: f64 = gap.format(Radix::Dec, RM, &mut cc).expect("decimal formatting").parse().unwrap();
    Reference { value: digits.parse().unwrap(), digits, precision_gap: precision_gap.abs() }
}
