//! Problem fixtures shared by the benchmarks.

use micromorph::{BcKind, IsotropicModuli, ModelKind, ProblemSpec, TestKind};

/// Shear or extension stripe with unit moduli and `L_c = h`.
pub fn stripe(model: ModelKind, test: TestKind, bc: BcKind, n: usize) -> ProblemSpec {
    ProblemSpec::new(model, test, bc, IsotropicModuli::ones().with_lc(1.0)).with_n(n)
}

pub fn mm_shear_cc(n: usize) -> ProblemSpec {
    stripe(
        ModelKind::ClassicalMicromorphic,
        TestKind::SimpleShear,
        BcKind::ConsistentCoupling,
        n,
    )
}

pub fn sg_shear_clamped(n: usize) -> ProblemSpec {
    stripe(
        ModelKind::SecondGradient,
        TestKind::SimpleShear,
        BcKind::NormalClamp,
        n,
    )
}
