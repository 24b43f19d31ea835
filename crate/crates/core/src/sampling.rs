//! Seeded random matrices and states for tests, optimizer starts and sampling.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matops::{self, CMatrix, DensityMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix with standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `G G* / Tr(G G*)`; full rank almost surely.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    DensityMatrix::normalized(&(&g * g.adjoint())).expect("Ginibre state is valid")
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let psi = ginibre(d, 1, rng);
    DensityMatrix::normalized(&(&psi * psi.adjoint())).expect("pure state is valid")
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    matops::hermitian_part(&ginibre(d, d, rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Hermitian matrix with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn random_hermitian_in<R: Rng + ?Sized>(d: usize, lo: f64, hi: f64, rng: &mut R) -> CMatrix {
    let u = random_unitary(d, rng);
    let diag: Vec<f64> = (0..d).map(|_| rng.random_range(lo..=hi)).collect();
    &u * matops::from_real_diag(&diag) * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_repeat() {
        let a = random_state(3, &mut rng(7));
        let b = random_state(3, &mut rng(7));
        assert_eq!(a.mat(), b.mat());
        assert!(a.faithful);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(4, &mut rng(1));
        assert!(matops::frob(&(u.adjoint() * &u - matops::identity(4))) < 1e-12);
    }

    #[test]
    fn spectrum_in_range() {
        let h = random_hermitian_in(4, 0.1, 3.0, &mut rng(2));
        let s = matops::eig_hermitian(&h).unwrap();
        assert!(s.min() >= 0.1 - 1e-12 && s.max() <= 3.0 + 1e-12);
    }
}
