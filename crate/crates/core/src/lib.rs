//! Linear generalized continua: tensor algebra, polynomial field calculus,
//! constitutive laws, 1D stripe problems and zero-energy mode analysis.

pub mod bvp1d;
pub mod constitutive;
mod error;
pub mod field_calc;
pub mod modes;
pub mod tensor_core;

pub use bvp1d::{BcKind, ProblemSpec, Solution1D, StiffnessCurve, TestKind};
pub use constitutive::{DerivedModuli, IsotropicModuli, ModelKind, StressState};
pub use error::{Error, Result};
pub use modes::{GammaSpec, ModeBc, ModeReport, ModeVector};
pub use tensor_core::{Mat3, Tensor333, Vec3};
