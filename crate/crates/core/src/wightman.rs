//! The iε-regularised positive-frequency Wightman function of a massless
//! scalar field pulled back to the accelerated worldline with constant
//! transverse velocity.
//!
//! With α̂ = ā/√(1+w²) and r = α̂²/ā,
//!
//! ```text
//! W̄(Δτ) = −r²/(16π²) · [sinh²(z) − m²]⁻¹,  z = α̂Δτ/2 − iεr,  m = w·r·Δτ/2
//! ```
//!
//! in units of Ω².

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WightmanError {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("regulated denominator underflows at dtau = {dtau} (eps = {eps} too small)")]
    Underflow { dtau: f64, eps: f64 },
    #[error("ultra-relativistic form needs w > 0")]
    ZeroVelocity,
    #[error("dtau must be finite, got {0}")]
    NonFiniteLag(f64),
}

/// Trajectory data needed to evaluate the two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WightmanFrame {
    abar: f64,
    w: f64,
    eps: f64,
}

impl WightmanFrame {
    pub fn new(abar: f64, w: f64, eps: f64) -> Result<Self, WightmanError> {
        if !(abar.is_finite() && abar > 0.0) {
            return Err(WightmanError::InvalidFrame(format!("abar = {abar}")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(WightmanError::InvalidFrame(format!("w = {w}")));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(WightmanError::InvalidFrame(format!("eps = {eps}")));
        }
        Ok(WightmanFrame { abar, w, eps })
    }

    pub fn abar(&self) -> f64 {
        self.abar
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// α/Ω = ā/√(1+w²).
    pub fn alpha_eff(&self) -> f64 {
        self.abar / (1.0 + self.w * self.w).sqrt()
    }

    /// α̂²/ā, written as ā/(1+w²) so that w = 0 gives ā exactly.
    fn ratio(&self) -> f64 {
        self.abar / (1.0 + self.w * self.w)
    }

    /// Imaginary offsets δ₁ ≥ δ₂ of the two poles nearest the origin,
    /// i.e. the zeros of z ∓ m in the lag variable.
    pub fn pole_offsets(&self) -> (f64, f64) {
        let g = (1.0 + self.w * self.w).sqrt() + self.w;
        (2.0 * self.eps * g, 2.0 * self.eps / g)
    }
}

struct Pieces {
    pre: f64,
    z: Complex64,
    m: f64,
}

fn pieces(frame: &WightmanFrame, dtau: f64) -> Result<Pieces, WightmanError> {
    if !dtau.is_finite() {
        return Err(WightmanError::NonFiniteLag(dtau));
    }
    let ratio = frame.ratio();
    Ok(Pieces {
        pre: -ratio * ratio / (16.0 * PI * PI),
        z: Complex64::new(frame.alpha_eff() * dtau / 2.0, -frame.eps * ratio),
        m: frame.w * ratio * dtau / 2.0,
    })
}

/// sinh²z − z², summed directly to avoid cancellation for |z| < 1.
fn sinh2_minus_square_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    // Σₙ≥₂ 2²ⁿ⁻¹ z²ⁿ/(2n)!
    let mut term = z2 * z2 / 3.0;
    let mut sum = term;
    for n in 3..30 {
        let n2 = (2 * n) as f64;
        term *= z2 * 4.0 / (n2 * (n2 - 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn kernel(frame: &WightmanFrame, dtau: f64) -> Result<Complex64, WightmanError> {
    let Pieces { pre, z, m } = pieces(frame, dtau)?;
    let underflow = || WightmanError::Underflow { dtau, eps: frame.eps };

    if z.re.abs() > 20.0 {
        let zz = if z.re < 0.0 { -z } else { z };
        let e = (-2.0 * zz).exp();
        let one_minus = Complex64::new(1.0, 0.0) - e;
        let q = 4.0 * e / (one_minus * one_minus);
        let denom = Complex64::new(1.0, 0.0) - m * m * q;
        if denom.norm() < 1e-300 {
            return Err(underflow());
        }
        return Ok(pre * q / denom);
    }

    let bracket = if z.norm() < 1e-3 {
        let z2 = z * z;
        (z - m) * (z + m) + z2 * z2 / 3.0 + z2 * z2 * z2 * (2.0 / 45.0)
    } else {
        let s = z.sinh();
        (s - m) * (s + m)
    };
    if bracket.norm() < 1e-300 {
        return Err(underflow());
    }
    Ok(pre / bracket)
}

/// W̄(Δτ) along the general trajectory.
pub fn eval_general(frame: &WightmanFrame, dtau: f64) -> Result<Complex64, WightmanError> {
    kernel(frame, dtau)
}

/// Straight-line (w = 0) Wightman function −ā²/(16π²)·[sinh²(āΔτ/2 − iεā)]⁻¹.
pub fn eval_linear(abar: f64, eps: f64, dtau: f64) -> Result<Complex64, WightmanError> {
    kernel(&WightmanFrame::new(abar, 0.0, eps)?, dtau)
}

/// Large-w form: the straight-line function scaled by w⁻⁴.
pub fn eval_ultra(frame: &WightmanFrame, dtau: f64) -> Result<Complex64, WightmanError> {
    if frame.w == 0.0 {
        return Err(WightmanError::ZeroVelocity);
    }
    let w2 = frame.w * frame.w;
    Ok(eval_linear(frame.abar, frame.eps, dtau)? / (w2 * w2))
}

/// Coefficient of w² in W̄ at fixed Δτ, from two Richardson-refined
/// difference quotients in w².
pub fn w2_coefficient_numeric(abar: f64, eps: f64, dtau: f64) -> Result<Complex64, WightmanError> {
    const H: f64 = 1e-2;
    let at = |w: f64| eval_general(&WightmanFrame::new(abar, w, eps)?, dtau);
    let w0 = at(0.0)?;
    let c_h = (at(H)? - w0) / (H * H);
    let c_h2 = (at(H / 2.0)? - w0) / (H * H / 4.0);
    Ok((4.0 * c_h2 - c_h) / 3.0)
}

/// The two-pole inertial-type counterterm −1/(4π²(Δτ − iδ₁)(Δτ − iδ₂)).
/// It carries the same singular part as W̄ at the origin.
pub fn counterterm(frame: &WightmanFrame, dtau: f64) -> Complex64 {
    let (d1, d2) = frame.pole_offsets();
    let p = Complex64::new(dtau, -d1) * Complex64::new(dtau, -d2);
    -1.0 / (4.0 * PI * PI * p)
}

/// W̄ minus [`counterterm`], bounded at Δτ = 0 and evaluated without
/// cancellation when the lag is small.
pub fn eval_subtracted(frame: &WightmanFrame, dtau: f64) -> Result<Complex64, WightmanError> {
    let Pieces { pre, z, m } = pieces(frame, dtau)?;
    if z.norm() < 1.0 {
        // W̄ − W_ct = pre·(b₀ − b)/(b·b₀) with b₀ = z² − m², b − b₀ = sinh²z − z².
        let b0 = (z - m) * (z + m);
        let d = sinh2_minus_square_series(z);
        let b = b0 + d;
        if b.norm() < 1e-300 || b0.norm() < 1e-300 {
            return Err(WightmanError::Underflow { dtau, eps: frame.eps });
        }
        return Ok(-pre * d / (b * b0));
    }
    Ok(kernel(frame, dtau)? - counterterm(frame, dtau))
}
