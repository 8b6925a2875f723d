//! Ansatz fields on the stripe and the reduction of the 3D energy density to
//! a quadratic form in profile values and their `x2` derivatives.

use nalgebra::DMatrix;

use crate::constitutive::{energy_density, Curvature, IsotropicModuli, ModelKind};
use crate::tensor_core::{anti, curl_from_grad, Mat3, Tensor333, Vec3};
use crate::{Error, Result};

use super::TestKind;

/// One scalar profile of `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Displacement component `u_i`.
    Disp(usize),
    /// Microdistortion component `P_ij`.
    Micro(usize, usize),
    /// Axial component `a3` of the Cosserat rotation `A = anti(a3 e3)`.
    CosseratAxial,
}

impl Field {
    pub fn name(&self) -> String {
        match self {
            Field::Disp(i) => format!("u{}", i + 1),
            Field::Micro(i, j) => format!("P{}{}", i + 1, j + 1),
            Field::CosseratAxial => "a3".to_string(),
        }
    }

    pub fn is_micro(&self) -> bool {
        !matches!(self, Field::Disp(_))
    }

    /// The microdistortion produced by a unit value of this field.
    pub fn unit_micro(&self) -> Mat3 {
        match *self {
            Field::Disp(_) => Mat3::zeros(),
            Field::Micro(i, j) => {
                let mut m = Mat3::zeros();
                m[(i, j)] = 1.0;
                m
            }
            Field::CosseratAxial => anti(&Vec3::z()),
        }
    }
}

/// Active profiles of the ansatz for a model and test.
pub fn ansatz_fields(model: ModelKind, test: TestKind) -> Vec<Field> {
    use Field::*;
    use ModelKind::*;
    match (model, test) {
        (LinearElastic | SecondGradient, TestKind::SimpleShear) => vec![Disp(0)],
        (LinearElastic | SecondGradient | Cosserat, TestKind::UniaxialExtension) => vec![Disp(1)],
        (Cosserat, TestKind::SimpleShear) => vec![Disp(0), CosseratAxial],
        (ClassicalMicromorphic | RelaxedMicromorphic, TestKind::SimpleShear) => {
            vec![Disp(0), Micro(0, 1), Micro(1, 0)]
        }
        (ClassicalMicromorphic | RelaxedMicromorphic, TestKind::UniaxialExtension) => {
            vec![Disp(1), Micro(0, 0), Micro(1, 1), Micro(2, 2)]
        }
    }
}

/// Pointwise arguments of the energy density built from
/// `z = [values, first derivatives, second derivatives]`.
pub fn ansatz_tensors(model: ModelKind, fields: &[Field], z: &[f64]) -> (Mat3, Mat3, Curvature) {
    let k = fields.len();
    let mut du = Mat3::zeros();
    let mut pm = Mat3::zeros();
    let mut dp = Tensor333::zeros();
    let mut d2u = Tensor333::zeros();
    for (a, f) in fields.iter().enumerate() {
        match *f {
            Field::Disp(i) => {
                du[(i, 1)] += z[k + a];
                d2u[(i, 1, 1)] += z[2 * k + a];
            }
            _ => {
                let unit = f.unit_micro();
                pm += unit * z[a];
                for i in 0..3 {
                    for j in 0..3 {
                        dp[(i, j, 1)] += unit[(i, j)] * z[k + a];
                    }
                }
            }
        }
    }
    let curv = match model {
        ModelKind::LinearElastic => Curvature::None,
        ModelKind::ClassicalMicromorphic => Curvature::Grad(dp),
        ModelKind::RelaxedMicromorphic | ModelKind::Cosserat => {
            Curvature::Curl(curl_from_grad(&dp))
        }
        ModelKind::SecondGradient => Curvature::Hessian(d2u),
    };
    (du, pm, curv)
}

/// The 1D integrand `W = ½ zᵀ Q z` obtained from the 3D energy density.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEnergy {
    pub model: ModelKind,
    pub fields: Vec<Field>,
    /// `3k × 3k`, ordered as values, first derivatives, second derivatives.
    pub q: DMatrix<f64>,
}

impl ReducedEnergy {
    /// Builds `Q` by polarization of [`energy_density`] on unit ansatz vectors.
    pub fn new(model: ModelKind, test: TestKind, p: &IsotropicModuli) -> Result<Self> {
        let fields = ansatz_fields(model, test);
        let dim = 3 * fields.len();
        let w = |z: &[f64]| -> Result<f64> {
            let (du, pm, curv) = ansatz_tensors(model, &fields, z);
            energy_density(model, p, &du, &pm, &curv)
        };
        let unit = |a: usize| {
            let mut z = vec![0.0; dim];
            z[a] = 1.0;
            z
        };
        let diag: Vec<f64> = (0..dim).map(|a| w(&unit(a))).collect::<Result<_>>()?;
        let mut q = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            q[(a, a)] = 2.0 * diag[a];
            for b in 0..a {
                let mut z = unit(a);
                z[b] = 1.0;
                let v = w(&z)? - diag[a] - diag[b];
                q[(a, b)] = v;
                q[(b, a)] = v;
            }
        }
        Ok(Self { model, fields, q })
    }

    pub fn k(&self) -> usize {
        self.fields.len()
    }

    pub fn density(&self, z: &[f64]) -> f64 {
        let z = nalgebra::DVector::from_column_slice(z);
        0.5 * z.dot(&(&self.q * &z))
    }

    /// Whether any second derivative enters the integrand.
    pub fn uses_second_derivatives(&self) -> bool {
        let k = self.k();
        (2 * k..3 * k).any(|a| self.q.column(a).amax() != 0.0)
    }

    /// Eliminates the microdistortion values pointwise when no derivative of a
    /// micro field carries energy (the `L_c = 0` case).
    pub fn eliminate_micro(&self) -> Result<LocalElimination> {
        let k = self.k();
        let local: Vec<usize> = (0..k).filter(|&a| self.fields[a].is_micro()).collect();
        let keep_fields: Vec<usize> = (0..k).filter(|&a| !self.fields[a].is_micro()).collect();
        for &a in &local {
            if self.q.column(k + a).amax() != 0.0 {
                return Err(Error::Spec(
                    "micro field carries curvature energy; cannot eliminate".into(),
                ));
            }
        }
        let keep_z: Vec<usize> = (0..3)
            .flat_map(|blk| keep_fields.iter().map(move |&a| blk * k + a))
            .collect();
        let qll = self.q.select_rows(&local).select_columns(&local);
        let qlr = self.q.select_rows(&local).select_columns(&keep_z);
        let qrr = self.q.select_rows(&keep_z).select_columns(&keep_z);
        let (q, recovery) = if local.is_empty() {
            (qrr, DMatrix::zeros(0, keep_z.len()))
        } else {
            let eig = qll.clone().symmetric_eigen();
            let top = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
            let zero = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l <= 1e-12 * top)
                .count();
            if zero > 0 {
                return Err(Error::SingularSystem { kernel_dim: zero });
            }
            let inv = qll
                .try_inverse()
                .ok_or(Error::SingularSystem { kernel_dim: 1 })?;
            let recovery = -&inv * &qlr;
            (&qrr + qlr.transpose() * &recovery, recovery)
        };
        Ok(LocalElimination {
            reduced: ReducedEnergy {
                model: self.model,
                fields: keep_fields.iter().map(|&a| self.fields[a]).collect(),
                q,
            },
            eliminated: local.iter().map(|&a| self.fields[a]).collect(),
            recovery,
        })
    }
}

/// Result of the pointwise elimination: micro values follow from the kept
/// z-vector as `recovery · z_kept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalElimination {
    pub reduced: ReducedEnergy,
    pub eliminated: Vec<Field>,
    pub recovery: DMatrix<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::DerivedModuli;

    #[test]
    fn mm_shear_homogeneous_integrand() {
        let p = IsotropicModuli::ones();
        let r = ReducedEnergy::new(ModelKind::ClassicalMicromorphic, TestKind::SimpleShear, &p)
            .unwrap();
        let g = 0.7;
        let mut z = vec![0.0; 9];
        z[3] = g;
        let want = p.mu_e * g * g / 2.0 + p.mu_c * g * g / 2.0;
        assert!((r.density(&z) - want).abs() < 1e-15);
        assert_eq!(r.density(&[0.0; 9]), 0.0);
    }

    #[test]
    fn sg_shear_homogeneous_integrand() {
        let p = IsotropicModuli::ones();
        let d = DerivedModuli::from_moduli(&p).unwrap();
        let r = ReducedEnergy::new(ModelKind::SecondGradient, TestKind::SimpleShear, &p).unwrap();
        let g = 0.4;
        let z = [0.0, g, 0.0];
        assert!((r.density(&z) - d.mu_macro * g * g / 2.0).abs() < 1e-15);
        assert!(r.uses_second_derivatives());
    }

    #[test]
    fn relaxed_shear_curl_only_sees_p21() {
        let p = IsotropicModuli::ones();
        let r =
            ReducedEnergy::new(ModelKind::RelaxedMicromorphic, TestKind::SimpleShear, &p).unwrap();
        // z = [u1, P12, P21, u1', P12', P21', ...]
        assert_eq!(r.q[(4, 4)], 0.0);
        assert!(r.q[(5, 5)] > 0.0);
    }

    #[test]
    fn elimination_at_zero_length_gives_reuss() {
        let p = IsotropicModuli {
            mu_e: 1.5,
            mu_micro: 3.0,
            mu_c: 0.7,
            ..IsotropicModuli::ones()
        }
        .with_lc(0.0);
        let d = DerivedModuli::from_moduli(&p).unwrap();
        let r = ReducedEnergy::new(ModelKind::ClassicalMicromorphic, TestKind::SimpleShear, &p)
            .unwrap();
        let e = r.eliminate_micro().unwrap();
        // Remaining z = [u1, u1', u1''].
        assert!((e.reduced.q[(1, 1)] - d.mu_macro).abs() < 1e-14);
    }
}
