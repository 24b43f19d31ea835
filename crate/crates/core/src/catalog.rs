//! Constructors for the standard example generators.
//!
//! Projection-type generators `γ(E − Id)` are realized in GKSL form from a
//! Kraus decomposition `E(X) = Σ_m K_m* X K_m` with jumps `√γ K_m`.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::Lindbladian;
use crate::matops::{self, c, serde_rows, CMatrix, DensityMatrix};
use crate::sampling;
use crate::tolerances::NumericPolicy;

/// One block `B(H_i) ⊗ τ_i` of a conditional expectation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpec {
    pub dim_h: usize,
    /// State on the multiplicity space; its size is `dim_K`.
    #[serde(with = "serde_rows")]
    pub tau: CMatrix,
}

impl BlockSpec {
    pub fn dim_k(&self) -> usize {
        self.tau.nrows()
    }
}

/// JSON-facing description of a catalog model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Deco {
        dim: usize,
        gamma: f64,
    },
    Depolarizing {
        #[serde(with = "serde_rows")]
        tau: CMatrix,
        gamma: f64,
    },
    BipartiteFactor {
        #[serde(with = "serde_rows")]
        h_a: CMatrix,
        inner: Box<ModelSpec>,
    },
    DiagonalGamma {
        #[serde(with = "serde_rows")]
        gamma: CMatrix,
    },
    GenericConditional {
        blocks: Vec<BlockSpec>,
        gamma: f64,
        /// Unitary taking the block ordering to the computational basis; identity if absent.
        #[serde(default, with = "serde_rows::opt", skip_serializing_if = "Option::is_none")]
        basis: Option<CMatrix>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Lindbladian> {
        match self {
            ModelSpec::Deco { dim, gamma } => build_deco(*dim, *gamma),
            ModelSpec::Depolarizing { tau, gamma } => build_depolarizing(&DensityMatrix::new(tau.clone())?, *gamma),
            ModelSpec::BipartiteFactor { h_a, inner } => build_bipartite(h_a, &inner.build()?),
            ModelSpec::DiagonalGamma { gamma } => build_diagonal_gamma(gamma),
            ModelSpec::GenericConditional { blocks, gamma, basis } => {
                build_generic_conditional(blocks, basis.as_ref(), *gamma)
            }
        }
    }

    /// `(d_A, d_B)` for bipartite models.
    pub fn split(&self) -> Option<(usize, usize)> {
        match self {
            ModelSpec::BipartiteFactor { h_a, inner } => Some((h_a.nrows(), inner.dim())),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Deco { dim, .. } => *dim,
            ModelSpec::Depolarizing { tau, .. } => tau.nrows(),
            ModelSpec::BipartiteFactor { h_a, inner } => h_a.nrows() * inner.dim(),
            ModelSpec::DiagonalGamma { gamma } => gamma.nrows(),
            ModelSpec::GenericConditional { blocks, .. } => blocks.iter().map(|b| b.dim_h * b.dim_k()).sum(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Deco { .. } => "deco",
            ModelSpec::Depolarizing { .. } => "depolarizing",
            ModelSpec::BipartiteFactor { .. } => "bipartite_factor",
            ModelSpec::DiagonalGamma { .. } => "diagonal_gamma",
            ModelSpec::GenericConditional { .. } => "generic_conditional",
        }
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::RejectedInput(format!("rate must be positive, got {gamma}")));
    }
    Ok(())
}

/// `L(X) = γ(diag(X) − X)`, jumps `√γ |i⟩⟨i|`.
pub fn build_deco(d: usize, gamma: f64) -> Result<Lindbladian> {
    if d < 2 {
        return Err(Error::RejectedInput(format!("deco model needs d >= 2, got {d}")));
    }
    check_rate(gamma)?;
    let s = c(gamma.sqrt(), 0.0);
    Lindbladian::new(matops::zeros(d), (0..d).map(|i| matops::unit(d, i, i) * s).collect())
}

/// `L_*(ρ) = γ(τ Tr ρ − ρ)`, jumps `√(γ τ_j) |ψ_j⟩⟨i|`.
pub fn build_depolarizing(tau: &DensityMatrix, gamma: f64) -> Result<Lindbladian> {
    check_rate(gamma)?;
    if !tau.faithful {
        return Err(Error::RejectedInput(format!(
            "depolarizing target must be faithful (min eigenvalue {:e})",
            tau.min_eigenvalue()
        )));
    }
    let d = tau.dim();
    let spec = tau.spectrum();
    let mut jumps = Vec::with_capacity(d * d);
    for (j, &t) in spec.values.iter().enumerate() {
        let psi = spec.vectors.column(j).into_owned();
        for i in 0..d {
            let mut e = nalgebra::DVector::<C64>::zeros(d);
            e[i] = c(1.0, 0.0);
            jumps.push(&psi * e.adjoint() * c((gamma * t).sqrt(), 0.0));
        }
    }
    Lindbladian::new(matops::zeros(d), jumps)
}

/// `L = i[H_A⊗I, ·] + I⊗L_B`.
pub fn build_bipartite(h_a: &CMatrix, inner: &Lindbladian) -> Result<Lindbladian> {
    if !h_a.is_square() || !matops::is_hermitian(h_a, &NumericPolicy::default()) {
        return Err(Error::RejectedInput("H_A must be square and Hermitian".into()));
    }
    let d_a = h_a.nrows();
    let id_a = matops::identity(d_a);
    let id_b = matops::identity(inner.dim);
    let h = matops::kron(h_a, &id_b) + matops::kron(&id_a, &inner.hamiltonian);
    let jumps = inner.jumps.iter().map(|l| matops::kron(&id_a, l)).collect();
    Lindbladian::new(h, jumps)
}

/// Generator with `L(|i⟩⟨j|) = γ_ij |i⟩⟨j|`, realized by diagonal jumps and a
/// diagonal Hamiltonian.
///
/// Diagonal jumps `l_i(k)` and energies `h_i` produce
/// `C_ij = Σ_k conj(l_i(k)) l_j(k) = γ_ij + u_i + conj(u_j)` with
/// `u_i = ½|l_i|² − i h_i`. The shift by `u` does not touch `P Γ P`, where `P`
/// projects onto the complement of `(1, …, 1)`, and can cancel everything
/// else. So `Γ` is realizable iff `P Γ P ⪰ 0`.
pub fn build_diagonal_gamma(gamma: &CMatrix) -> Result<Lindbladian> {
    let d = gamma.nrows();
    validate_gamma(gamma)?;
    let scale = matops::max_abs(gamma).max(1e-300);
    let e = nalgebra::DVector::<C64>::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0));
    let p = matops::identity(d) - &e * e.adjoint();
    let reduced = matops::hermitian_part(&(&p * gamma * &p));
    let rs = matops::spectrum(&reduced);
    if rs.min() < -1e-10 * scale {
        let v: Vec<[f64; 2]> = (0..d).map(|i| [rs.vectors[(i, 0)].re, rs.vectors[(i, 0)].im]).collect();
        return Err(Error::Structural(format!(
            "rate matrix is not realizable: v* Γ v = {:e} < 0 for v = {v:?} orthogonal to (1,…,1)",
            rs.min()
        )));
    }
    let ge = gamma * &e;
    let eg = (e.adjoint() * &ge)[(0, 0)].re;
    let sqrt_d = (d as f64).sqrt();
    let u = -(&p * &ge) / c(sqrt_d, 0.0) - &e * c(eg / (2.0 * sqrt_d), 0.0);
    let kossakowski = CMatrix::from_fn(d, d, |i, j| gamma[(i, j)] + u[i] + u[j].conj());
    let spec = matops::spectrum(&kossakowski);
    let mut jumps = Vec::new();
    for (k, &mu) in spec.values.iter().enumerate() {
        if mu <= 1e-14 * scale {
            continue;
        }
        let s = mu.sqrt();
        jumps.push(CMatrix::from_fn(d, d, |i, j| if i == j { spec.vectors[(i, k)].conj() * s } else { c(0.0, 0.0) }));
    }
    let h = CMatrix::from_fn(d, d, |i, j| if i == j { c(-u[i].im, 0.0) } else { c(0.0, 0.0) });
    let gen = Lindbladian::new(h, jumps)?;

    let mut err: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let out = gen.apply_generator(&matops::unit(d, i, j))?;
            err = err.max((out[(i, j)] - gamma[(i, j)]).norm());
        }
    }
    if err > 1e-9 * scale.max(1.0) {
        return Err(Error::Structural(format!("diagonal realization misses the rate matrix by {err:e}")));
    }
    Ok(gen)
}

fn validate_gamma(gamma: &CMatrix) -> Result<()> {
    let d = gamma.nrows();
    if !gamma.is_square() || d < 2 {
        return Err(Error::RejectedInput("rate matrix must be square with d >= 2".into()));
    }
    let scale = matops::max_abs(gamma).max(1.0);
    for i in 0..d {
        if gamma[(i, i)].norm() > 1e-12 * scale {
            return Err(Error::RejectedInput(format!("γ_{i}{i} must vanish")));
        }
        for j in 0..d {
            if i != j && gamma[(i, j)].re >= 0.0 {
                return Err(Error::RejectedInput(format!("Re γ_{i}{j} must be negative")));
            }
            if (gamma[(i, j)] - gamma[(j, i)].conj()).norm() > 1e-12 * scale {
                return Err(Error::RejectedInput(format!("γ_{j}{i} must equal conj(γ_{i}{j})")));
            }
        }
    }
    Ok(())
}

/// Rate matrix of randomly drawn diagonal jumps; `complex = false` gives real rates.
pub fn random_diagonal_gamma<R: Rng + ?Sized>(d: usize, n_jumps: usize, complex: bool, rng: &mut R) -> CMatrix {
    let l = sampling::ginibre(d, n_jumps, rng);
    let l = if complex { l } else { l.map(|z| c(z.re, 0.0)) };
    let h: Vec<f64> = if complex { (0..d).map(|_| rng.random_range(-1.0..1.0)).collect() } else { vec![0.0; d] };
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            return c(0.0, 0.0);
        }
        let mut g = c(0.0, h[i] - h[j]);
        for k in 0..n_jumps {
            g += l[(i, k)].conj() * l[(j, k)] - c(0.5 * (l[(i, k)].norm_sqr() + l[(j, k)].norm_sqr()), 0.0);
        }
        g
    })
}

/// `L(X) = γ(E(X) − X)` for `E(X) = W [⊕_i Tr_K[(I⊗τ_i) X_i] ⊗ I_K] W*`.
pub fn build_generic_conditional(blocks: &[BlockSpec], basis: Option<&CMatrix>, gamma: f64) -> Result<Lindbladian> {
    check_rate(gamma)?;
    if blocks.is_empty() {
        return Err(Error::RejectedInput("conditional expectation needs at least one block".into()));
    }
    let d: usize = blocks.iter().map(|b| b.dim_h * b.dim_k()).sum();
    let w = match basis {
        Some(w) => {
            if w.shape() != (d, d) || matops::frob(&(w.adjoint() * w - matops::identity(d))) > 1e-10 {
                return Err(Error::RejectedInput("basis must be a d×d unitary".into()));
            }
            w.clone()
        }
        None => matops::identity(d),
    };
    let mut jumps = Vec::new();
    let mut offset = 0;
    let s = gamma.sqrt();
    for b in blocks {
        if b.dim_h == 0 || b.dim_k() == 0 {
            return Err(Error::RejectedInput("block dimensions must be positive".into()));
        }
        let tau = DensityMatrix::new(b.tau.clone())?;
        if !tau.faithful {
            return Err(Error::RejectedInput("block states must be faithful".into()));
        }
        let k = b.dim_k();
        let spec = tau.spectrum();
        for (l, &t) in spec.values.iter().enumerate() {
            for m in 0..k {
                // √t |φ_l⟩⟨φ_m| on the multiplicity factor.
                let phi_l = spec.vectors.column(l);
                let phi_m = spec.vectors.column(m);
                let local = phi_l * phi_m.adjoint() * c(s * t.sqrt(), 0.0);
                let piece = matops::kron(&matops::identity(b.dim_h), &local.into_owned());
                let mut full = CMatrix::zeros(d, d);
                full.view_mut((offset, offset), (piece.nrows(), piece.ncols())).copy_from(&piece);
                jumps.push(&w * full * w.adjoint());
            }
        }
        offset += b.dim_h * k;
    }
    Lindbladian::new(matops::zeros(d), jumps)
}

/// Generator with a random Hamiltonian and `n_jumps` Ginibre jumps.
pub fn random_lindbladian<R: Rng + ?Sized>(d: usize, n_jumps: usize, rng: &mut R) -> Lindbladian {
    let h = sampling::random_hermitian(d, rng) * c(0.5, 0.0);
    let jumps = (0..n_jumps).map(|_| sampling::ginibre(d, d, rng) * c(0.5, 0.0)).collect();
    Lindbladian::new(h, jumps).expect("random generator is valid")
}
