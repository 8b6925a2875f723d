//! Closed-form second-gradient solution with clamped normal derivatives.

use crate::constitutive::{IsotropicModuli, ModelKind};
use crate::{Error, Result};

use super::{ansatz::ReducedEnergy, BcKind, ProblemSpec, TestKind};

/// Minimizer of `∫ u′² + ℓ² u″²` on `[-h/2, h/2]` with `u(±h/2) = ±γh/2`
/// and `u′(±h/2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgAnalytic {
    pub h: f64,
    pub gamma: f64,
    pub l: f64,
}

impl SgAnalytic {
    pub fn new(h: f64, gamma: f64, l: f64) -> Result<Self> {
        if !(l > 0.0) || !(h > 0.0) {
            return Err(Error::Argument(
                "analytic solution needs h > 0 and L_c > 0".into(),
            ));
        }
        Ok(Self { h, gamma, l })
    }

    /// Uses the length scale of the model's reduced integrand.
    pub fn for_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::new(
            spec.h,
            spec.gamma,
            sg_length_scale(&spec.params, spec.test)?,
        )
    }

    /// `x/h − (ℓ/h) sinh(x/ℓ)/cosh(h/2ℓ)` scaled so that `u(±h/2) = ±γh/2`.
    pub fn u(&self, x: f64) -> f64 {
        let (h, l) = (self.h, self.l);
        let big = h / (2.0 * l);
        let shape = if big < 1.0 {
            // cosh X − sinh(t)/t, summed termwise to avoid cancellation.
            let t = x / l;
            let diff: f64 = (1..16)
                .map(|k| {
                    let f = factorial(2 * k);
                    big.powi(2 * k as i32) / f - t.powi(2 * k as i32) / (f * (2 * k + 1) as f64)
                })
                .sum();
            x / h * diff / big.cosh()
        } else {
            // sinh(x/ℓ) / cosh(h/2ℓ) without overflow.
            let ratio = ((x - 0.5 * h) / l).exp() - ((-x - 0.5 * h) / l).exp();
            let ratio = ratio / (1.0 + (-h / l).exp());
            x / h - ratio * l / h
        };
        shape / (0.5 * one_minus_tanhc(big)) * self.gamma * h / 2.0
    }

    /// `1 / (1 − (2ℓ/h) tanh(h/2ℓ))`; the stiffness is this factor times the
    /// coefficient of `u′²/2` in the integrand.
    pub fn stiffness_factor(&self) -> f64 {
        1.0 / one_minus_tanhc(self.h / (2.0 * self.l))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `1 − tanh(X)/X`, by series for small `X`.
fn one_minus_tanhc(x: f64) -> f64 {
    if x < 1.0 {
        // (X cosh X − sinh X) / (X cosh X)
        let num: f64 = (1..16)
            .map(|k| x.powi(2 * k as i32) * (1.0 / factorial(2 * k) - 1.0 / factorial(2 * k + 1)))
            .sum();
        num / x.cosh()
    } else {
        1.0 - x.tanh() / x
    }
}

fn reduced_coefficients(p: &IsotropicModuli, test: TestKind) -> Result<(f64, f64)> {
    let r = ReducedEnergy::new(ModelKind::SecondGradient, test, p)?;
    Ok((r.q[(1, 1)], r.q[(2, 2)]))
}

/// `ℓ = sqrt(B/A)` for the second-gradient integrand `A u′² + B u″²`.
pub fn sg_length_scale(p: &IsotropicModuli, test: TestKind) -> Result<f64> {
    let (a, b) = reduced_coefficients(p, test)?;
    Ok((b / a).sqrt())
}

/// Closed-form apparent stiffness of the second-gradient stripe.
pub fn sg_analytic_stiffness(spec: &ProblemSpec) -> Result<f64> {
    if spec.model != ModelKind::SecondGradient {
        return Err(Error::Spec(
            "closed form exists for the second gradient model only".into(),
        ));
    }
    let (a, _) = reduced_coefficients(&spec.params, spec.test)?;
    if spec.bc == BcKind::MixedSG || spec.params.l_c == 0.0 {
        return Ok(a);
    }
    Ok(a * SgAnalytic::for_spec(spec)?.stiffness_factor())
}
