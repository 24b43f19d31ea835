//! Fixtures shared by the benchmarks.

use qmsdeco::catalog::{self, BlockSpec};
use qmsdeco::{matops, sampling, DensityMatrix, Functionals, Lindbladian};

pub fn deco(d: usize) -> Lindbladian {
    catalog::build_deco(d, 1.0).expect("valid deco model")
}

pub fn conditional() -> Lindbladian {
    let blocks = vec![BlockSpec { dim_h: 2, tau: matops::from_real_diag(&[0.7, 0.3]) }];
    catalog::build_generic_conditional(&blocks, None, 1.0).expect("valid conditional model")
}

pub fn bipartite() -> Functionals {
    let tau = DensityMatrix::new(matops::from_real_diag(&[0.7, 0.3])).expect("valid state");
    let inner = catalog::build_depolarizing(&tau, 1.0).expect("valid inner model");
    let h_a = matops::pauli_z() + matops::pauli_x() * matops::c(0.3, 0.0);
    let gen = catalog::build_bipartite(&h_a, &inner).expect("valid bipartite model");
    Functionals::from_generator(gen, 42).and_then(|f| f.with_bipartite(2, inner)).expect("analysis succeeds")
}

pub fn random_model(d: usize, seed: u64) -> Lindbladian {
    catalog::random_lindbladian(d, 2, &mut sampling::rng(seed))
}
