//! Isotropic moduli, Reuss homogenization, and the energy, stress and moment
//! laws of the five models.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tensor_core::{curl_from_grad, dev_sym, frobenius, skew, sym, Mat3, Tensor333};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropicModuli {
    pub mu_e: f64,
    pub lambda_e: f64,
    pub mu_micro: f64,
    pub lambda_micro: f64,
    pub mu_c: f64,
    pub mu: f64,
    #[serde(rename = "L_c")]
    pub l_c: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

pub const PARAM_KEYS: [&str; 13] = [
    "mu_e",
    "lambda_e",
    "mu_micro",
    "lambda_micro",
    "mu_c",
    "mu",
    "L_c",
    "a1",
    "a2",
    "a3",
    "alpha1",
    "alpha2",
    "alpha3",
];

impl IsotropicModuli {
    pub fn ones() -> Self {
        Self {
            mu_e: 1.0,
            lambda_e: 1.0,
            mu_micro: 1.0,
            lambda_micro: 1.0,
            mu_c: 1.0,
            mu: 1.0,
            l_c: 1.0,
            a1: 1.0,
            a2: 1.0,
            a3: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 1.0,
        }
    }

    pub fn with_lc(self, l_c: f64) -> Self {
        Self { l_c, ..self }
    }

    pub fn with_mu_c(self, mu_c: f64) -> Self {
        Self { mu_c, ..self }
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "mu_e" => &mut self.mu_e,
            "lambda_e" => &mut self.lambda_e,
            "mu_micro" => &mut self.mu_micro,
            "lambda_micro" => &mut self.lambda_micro,
            "mu_c" => &mut self.mu_c,
            "mu" => &mut self.mu,
            "L_c" => &mut self.l_c,
            "a1" => &mut self.a1,
            "a2" => &mut self.a2,
            "a3" => &mut self.a3,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "alpha3" => &mut self.alpha3,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let mut c = *self;
        c.slot(key).map(|v| *v)
    }

    pub fn kappa_e(&self) -> f64 {
        kappa(self.mu_e, self.lambda_e)
    }

    pub fn kappa_micro(&self) -> f64 {
        kappa(self.mu_micro, self.lambda_micro)
    }

    /// Every violated admissibility condition; empty when admissible.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        for key in PARAM_KEYS {
            if !self.get(key).unwrap().is_finite() {
                v.push(format!("{key} finite"));
            }
        }
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        need(self.mu_e > 0.0, "mu_e > 0");
        need(self.mu_micro > 0.0, "mu_micro > 0");
        need(self.mu_c >= 0.0, "mu_c ≥ 0");
        need(self.mu > 0.0, "mu > 0");
        need(self.l_c >= 0.0, "L_c ≥ 0");
        need(self.a1 > 0.0, "a1 > 0");
        need(self.a2 > 0.0, "a2 > 0");
        need(self.a3 > 0.0, "a3 > 0");
        need(self.alpha1 > 0.0, "alpha1 > 0");
        need(self.alpha2 > 0.0, "alpha2 > 0");
        need(self.alpha3 > 0.0, "alpha3 > 0");
        need(self.kappa_e() > 0.0, "kappa_e > 0");
        need(self.kappa_micro() > 0.0, "kappa_micro > 0");
        v
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    /// Parses `name = value` lines; `#` starts a comment. Every key is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::ones();
        let mut seen = [false; PARAM_KEYS.len()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let key = key.trim();
            let pos = PARAM_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Parse(format!("unknown key `{key}`")))?;
            if seen[pos] {
                return Err(Error::Parse(format!("duplicate key `{key}`")));
            }
            seen[pos] = true;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Parse(format!("key `{key}`: invalid number `{}`", value.trim()))
            })?;
            *p.slot(key).unwrap() = value;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("missing key `{}`", PARAM_KEYS[i])));
        }
        Ok(p)
    }

    pub fn to_kv_string(&self) -> String {
        PARAM_KEYS
            .iter()
            .map(|k| format!("{k} = {:e}\n", self.get(k).unwrap()))
            .collect()
    }
}

impl FromStr for IsotropicModuli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

pub fn kappa(mu: f64, lambda: f64) -> f64 {
    lambda + 2.0 * mu / 3.0
}

pub fn longitudinal_modulus(mu: f64, lambda: f64) -> f64 {
    2.0 * mu + lambda
}

fn positive(vals: &[(&str, f64)]) -> Result<()> {
    for (name, v) in vals {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::Argument(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Series composition of a micro and a meso modulus.
pub fn reuss(micro: f64, e: f64) -> f64 {
    micro * e / (micro + e)
}

fn reuss_inverse(known: f64, macro_: f64, known_name: &'static str) -> Result<f64> {
    positive(&[(known_name, known), ("macro modulus", macro_)])?;
    if known == macro_ {
        return Err(Error::InfiniteModulus(known_name));
    }
    if known < macro_ {
        return Err(Error::Argument(format!(
            "{known_name} = {known} must exceed the macro modulus {macro_}"
        )));
    }
    Ok(known * macro_ / (known - macro_))
}

pub fn reuss_mu(mu_micro: f64, mu_e: f64) -> Result<f64> {
    positive(&[("mu_micro", mu_micro), ("mu_e", mu_e)])?;
    Ok(reuss(mu_micro, mu_e))
}

/// `mu_e` from `mu_micro` and `mu_macro`; infinite when they coincide.
pub fn reuss_mu_e(mu_micro: f64, mu_macro: f64) -> Result<f64> {
    reuss_inverse(mu_micro, mu_macro, "mu_micro")
}

pub fn reuss_mu_micro(mu_e: f64, mu_macro: f64) -> Result<f64> {
    reuss_inverse(mu_e, mu_macro, "mu_e")
}

pub fn reuss_kappa(kappa_micro: f64, kappa_e: f64) -> Result<f64> {
    positive(&[("kappa_micro", kappa_micro), ("kappa_e", kappa_e)])?;
    Ok(reuss(kappa_micro, kappa_e))
}

pub fn reuss_kappa_e(kappa_micro: f64, kappa_macro: f64) -> Result<f64> {
    reuss_inverse(kappa_micro, kappa_macro, "kappa_micro")
}

pub fn reuss_kappa_micro(kappa_e: f64, kappa_macro: f64) -> Result<f64> {
    reuss_inverse(kappa_e, kappa_macro, "kappa_e")
}

pub fn mu_bar(p: &IsotropicModuli) -> f64 {
    (p.mu_e + p.mu_c) * p.mu_micro / (p.mu_e + p.mu_c + p.mu_micro)
}

pub fn m_bar(p: &IsotropicModuli) -> f64 {
    let me = longitudinal_modulus(p.mu_e, p.lambda_e);
    let mm = longitudinal_modulus(p.mu_micro, p.lambda_micro);
    me * mm / (me + mm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedModuli {
    pub mu_macro: f64,
    pub kappa_macro: f64,
    pub lambda_macro: f64,
    pub m_e: f64,
    pub m_micro: f64,
    pub m_macro: f64,
    pub mu_bar: f64,
    pub m_bar: f64,
}

impl DerivedModuli {
    pub fn from_moduli(p: &IsotropicModuli) -> Result<Self> {
        let mu_macro = reuss_mu(p.mu_micro, p.mu_e)?;
        let kappa_macro = reuss_kappa(p.kappa_micro(), p.kappa_e())?;
        let lambda_macro = kappa_macro - 2.0 * mu_macro / 3.0;
        Ok(Self {
            mu_macro,
            kappa_macro,
            lambda_macro,
            m_e: longitudinal_modulus(p.mu_e, p.lambda_e),
            m_micro: longitudinal_modulus(p.mu_micro, p.lambda_micro),
            m_macro: longitudinal_modulus(mu_macro, lambda_macro),
            mu_bar: mu_bar(p),
            m_bar: m_bar(p),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    LinearElastic,
    Cosserat,
    ClassicalMicromorphic,
    RelaxedMicromorphic,
    SecondGradient,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::LinearElastic,
        ModelKind::Cosserat,
        ModelKind::ClassicalMicromorphic,
        ModelKind::RelaxedMicromorphic,
        ModelKind::SecondGradient,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::LinearElastic => "le",
            ModelKind::Cosserat => "cosserat",
            ModelKind::ClassicalMicromorphic => "mm",
            ModelKind::RelaxedMicromorphic => "rm",
            ModelKind::SecondGradient => "sg",
        }
    }

    pub fn has_micro_field(self) -> bool {
        matches!(
            self,
            ModelKind::Cosserat | ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "le" | "linear-elastic" | "linearelastic" => ModelKind::LinearElastic,
            "cosserat" => ModelKind::Cosserat,
            "mm" | "classical-micromorphic" => ModelKind::ClassicalMicromorphic,
            "rm" | "relaxed-micromorphic" => ModelKind::RelaxedMicromorphic,
            "sg" | "second-gradient" => ModelKind::SecondGradient,
            _ => return Err(Error::Parse(format!("unknown model `{s}`"))),
        })
    }
}

/// The higher-order argument of an energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    /// No higher-order argument (linear elasticity).
    None,
    /// Gradient `DP` of the microdistortion (classical micromorphic).
    Grad(Tensor333),
    /// `Curl P` (relaxed micromorphic) or `Curl A` (Cosserat).
    Curl(Mat3),
    /// Second displacement gradient `D²u`, `(D²u)_{ijk} = ∂_k ∂_j u_i`.
    Hessian(Tensor333),
}

impl Curvature {
    fn name(&self) -> &'static str {
        match self {
            Curvature::None => "none",
            Curvature::Grad(_) => "DP",
            Curvature::Curl(_) => "Curl",
            Curvature::Hessian(_) => "D2u",
        }
    }
}

fn expected_curvature(model: ModelKind) -> &'static str {
    match model {
        ModelKind::LinearElastic => "none",
        ModelKind::Cosserat | ModelKind::RelaxedMicromorphic => "Curl",
        ModelKind::ClassicalMicromorphic => "DP",
        ModelKind::SecondGradient => "D2u",
    }
}

fn check_curvature(model: ModelKind, curv: &Curvature) -> Result<()> {
    let want = expected_curvature(model);
    if curv.name() != want {
        return Err(Error::Argument(format!(
            "model {model} expects curvature argument {want}, got {}",
            curv.name()
        )));
    }
    Ok(())
}

fn check_skew(p: &Mat3) -> Result<()> {
    let s = sym(p).norm();
    if s > 1e-12 * p.norm() {
        return Err(Error::InvalidSkew(s));
    }
    Ok(())
}

fn tr2(m: &Mat3) -> f64 {
    m.trace().powi(2)
}

/// The elastic moduli `(μ, λ)` acting on the first-order part of the models
/// without a microdistortion.
fn cauchy_moduli(model: ModelKind, p: &IsotropicModuli) -> Result<(f64, f64)> {
    Ok(match model {
        ModelKind::Cosserat => (p.mu_e, p.lambda_e),
        _ => {
            let d = DerivedModuli::from_moduli(p)?;
            (d.mu_macro, d.lambda_macro)
        }
    })
}

/// Curvature energy on a third-order gradient, shared by the micromorphic and
/// second-gradient models.
fn grad_curvature_energy(p: &IsotropicModuli, g: &Tensor333) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let x = g.slice(k);
        s += p.a1 * dev_sym(&x).norm_squared()
            + p.a2 * skew(&x).norm_squared()
            + 2.0 / 9.0 * p.a3 * 3.0 * x.trace().powi(2);
    }
    0.5 * p.mu * p.l_c.powi(2) * s
}

fn curl_curvature_energy(scale: f64, w: [f64; 3], c: &Mat3) -> f64 {
    0.5 * scale
        * (w[0] * dev_sym(c).norm_squared() + w[1] * skew(c).norm_squared() + w[2] / 3.0 * tr2(c))
}

fn grad_moment(p: &IsotropicModuli, g: &Tensor333) -> Tensor333 {
    let s = p.mu * p.l_c.powi(2);
    g.map_slices(|x| {
        (dev_sym(x) * p.a1 + skew(x) * p.a2 + Mat3::identity() * (2.0 / 3.0 * p.a3 * x.trace())) * s
    })
}

fn curl_moment(scale: f64, w: [f64; 3], c: &Mat3) -> Mat3 {
    (dev_sym(c) * w[0] + skew(c) * w[1] + Mat3::identity() * (w[2] / 3.0 * c.trace())) * scale
}

fn a_weights(p: &IsotropicModuli) -> [f64; 3] {
    [p.a1, p.a2, p.a3]
}

fn alpha_weights(p: &IsotropicModuli) -> [f64; 3] {
    [p.alpha1, p.alpha2, p.alpha3]
}

/// First-order (local) part of the micromorphic energies.
fn micromorphic_local(p: &IsotropicModuli, du: &Mat3, pm: &Mat3) -> f64 {
    let e = du - pm;
    p.mu_e * sym(&e).norm_squared()
        + p.mu_c * skew(&e).norm_squared()
        + 0.5 * p.lambda_e * tr2(&e)
        + p.mu_micro * sym(pm).norm_squared()
        + 0.5 * p.lambda_micro * tr2(pm)
}

/// Strain energy density. `pm` is the microdistortion (the skew field `A`
/// for Cosserat) and is ignored by the models that have none.
pub fn energy_density(
    model: ModelKind,
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    curv: &Curvature,
) -> Result<f64> {
    check_curvature(model, curv)?;
    let scale = p.mu * p.l_c.powi(2);
    Ok(match (model, curv) {
        (ModelKind::LinearElastic, _) => {
            let (mu, lambda) = cauchy_moduli(model, p)?;
            mu * sym(du).norm_squared() + 0.5 * lambda * tr2(du)
        }
        (ModelKind::SecondGradient, Curvature::Hessian(h)) => {
            let (mu, lambda) = cauchy_moduli(model, p)?;
            mu * sym(du).norm_squared() + 0.5 * lambda * tr2(du) + grad_curvature_energy(p, h)
        }
        (ModelKind::Cosserat, Curvature::Curl(c)) => {
            check_skew(pm)?;
            let (mu, lambda) = cauchy_moduli(model, p)?;
            mu * sym(du).norm_squared()
                + p.mu_c * (skew(du) - pm).norm_squared()
                + 0.5 * lambda * tr2(du)
                + curl_curvature_energy(scale, alpha_weights(p), c)
        }
        (ModelKind::ClassicalMicromorphic, Curvature::Grad(g)) => {
            micromorphic_local(p, du, pm) + grad_curvature_energy(p, g)
        }
        (ModelKind::RelaxedMicromorphic, Curvature::Curl(c)) => {
            micromorphic_local(p, du, pm) + curl_curvature_energy(scale, a_weights(p), c)
        }
        _ => unreachable!("curvature kind checked above"),
    })
}

/// Convenience for the micromorphic energy with the curvature given as `DP`:
/// the relaxed model receives `Curl P` computed from it.
pub fn energy_from_grad(
    model: ModelKind,
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    dp: &Tensor333,
) -> Result<f64> {
    let curv = match model {
        ModelKind::ClassicalMicromorphic => Curvature::Grad(*dp),
        ModelKind::RelaxedMicromorphic | ModelKind::Cosserat => Curvature::Curl(curl_from_grad(dp)),
        ModelKind::LinearElastic => Curvature::None,
        ModelKind::SecondGradient => {
            return Err(Error::Argument(
                "second gradient model takes D2u, not DP".into(),
            ))
        }
    };
    energy_density(model, p, du, pm, &curv)
}

/// Force stress σ.
pub fn stress_sigma(model: ModelKind, p: &IsotropicModuli, du: &Mat3, pm: &Mat3) -> Result<Mat3> {
    let id = Mat3::identity();
    Ok(match model {
        ModelKind::LinearElastic | ModelKind::SecondGradient => {
            let (mu, lambda) = cauchy_moduli(model, p)?;
            sym(du) * (2.0 * mu) + id * (lambda * du.trace())
        }
        ModelKind::Cosserat => {
            check_skew(pm)?;
            let (mu, lambda) = cauchy_moduli(model, p)?;
            sym(du) * (2.0 * mu) + id * (lambda * du.trace()) + (skew(du) - pm) * (2.0 * p.mu_c)
        }
        ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic => {
            let e = du - pm;
            sym(&e) * (2.0 * p.mu_e) + skew(&e) * (2.0 * p.mu_c) + id * (p.lambda_e * e.trace())
        }
    })
}

/// Micro stress `2μ_micro sym P + λ_micro tr(P) 1`.
pub fn micro_stress(p: &IsotropicModuli, pm: &Mat3) -> Mat3 {
    sym(pm) * (2.0 * p.mu_micro) + Mat3::identity() * (p.lambda_micro * pm.trace())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    None,
    Third(Tensor333),
    Second(Mat3),
}

/// Moment conjugate to the curvature argument: `𝔪` for the micromorphic and
/// second-gradient models, `m` for the relaxed and Cosserat models.
pub fn moment(model: ModelKind, p: &IsotropicModuli, curv: &Curvature) -> Result<Moment> {
    check_curvature(model, curv)?;
    let scale = p.mu * p.l_c.powi(2);
    Ok(match curv {
        Curvature::None => Moment::None,
        Curvature::Grad(g) | Curvature::Hessian(g) => Moment::Third(grad_moment(p, g)),
        Curvature::Curl(c) => {
            let w = if model == ModelKind::Cosserat {
                alpha_weights(p)
            } else {
                a_weights(p)
            };
            Moment::Second(curl_moment(scale, w, c))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressState {
    pub sigma: Mat3,
    pub moment_third: Option<Tensor333>,
    pub moment_second: Option<Mat3>,
}

pub fn stress_state(
    model: ModelKind,
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    curv: &Curvature,
) -> Result<StressState> {
    let sigma = stress_sigma(model, p, du, pm)?;
    let (moment_third, moment_second) = match moment(model, p, curv)? {
        Moment::None => (None, None),
        Moment::Third(t) => (Some(t), None),
        Moment::Second(m) => (None, Some(m)),
    };
    Ok(StressState {
        sigma,
        moment_third,
        moment_second,
    })
}

/// `|W(Du + A1, P + A2, DP) − W(Du, P, DP)|` for the micromorphic energy with
/// `μ_c = 0`. The transformation is read additively, `u ↦ u + A1·x + b`, so
/// the translation `b` leaves `Du` untouched.
pub fn check_invariance(
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    dp: &Tensor333,
    a1: &Mat3,
    a2: &Mat3,
    _b: &crate::Vec3,
) -> Result<f64> {
    if p.mu_c != 0.0 {
        return Err(Error::Argument("invariance requires mu_c = 0".into()));
    }
    invariance_gap(p, du, pm, dp, a1, a2)
}

/// Infinitesimal objectivity: the same skew `A` added to `Du` and `P`, any `μ_c`.
pub fn check_objectivity(
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    dp: &Tensor333,
    a: &Mat3,
) -> Result<f64> {
    invariance_gap(p, du, pm, dp, a, a)
}

fn invariance_gap(
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    dp: &Tensor333,
    a1: &Mat3,
    a2: &Mat3,
) -> Result<f64> {
    check_skew(a1)?;
    check_skew(a2)?;
    let m = ModelKind::ClassicalMicromorphic;
    let g = Curvature::Grad(*dp);
    let w0 = energy_density(m, p, du, pm, &g)?;
    let w1 = energy_density(m, p, &(du + a1), &(pm + a2), &g)?;
    Ok((w1 - w0).abs())
}

/// `½⟨σ, Du − P⟩ + ½⟨s_micro, P⟩ + ½⟨moment, curvature⟩`, which equals the
/// energy density for every model.
pub fn dual_energy(
    model: ModelKind,
    p: &IsotropicModuli,
    du: &Mat3,
    pm: &Mat3,
    curv: &Curvature,
) -> Result<f64> {
    let st = stress_state(model, p, du, pm, curv)?;
    let mut w = match model {
        ModelKind::ClassicalMicromorphic | ModelKind::RelaxedMicromorphic => {
            0.5 * frobenius(&st.sigma, &(du - pm)) + 0.5 * frobenius(&micro_stress(p, pm), pm)
        }
        ModelKind::Cosserat => {
            // σ splits into a symmetric part paired with Du and a skew part paired with skew Du − A.
            0.5 * frobenius(&sym(&st.sigma), du)
                + 0.5 * frobenius(&skew(&st.sigma), &(skew(du) - pm))
        }
        _ => 0.5 * frobenius(&st.sigma, du),
    };
    w += match (curv, st.moment_third, st.moment_second) {
        (Curvature::Grad(g) | Curvature::Hessian(g), Some(m), _) => 0.5 * m.inner(g),
        (Curvature::Curl(c), _, Some(m)) => 0.5 * frobenius(&m, c),
        _ => 0.0,
    };
    Ok(w)
}
