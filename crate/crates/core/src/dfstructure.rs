//! Decoherence-free algebra, its block structure, the reference state `σ_Tr`
//! and the conditional expectations onto the algebra.
//!
//! The algebra is computed as the commutant of the `δ_H = [H, ·]`-closure of
//! the jumps and their adjoints, then checked a posteriori: closure under
//! products and adjoints, isometric action of the semigroup on it, and decay
//! of everything outside it.
//!
//! In the block frame given by the unitary `W`, coordinates are ordered block
//! by block and, inside block `i`, as `H_i ⊗ K_i` with the `K_i` index fastest.

use std::collections::VecDeque;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{Lindbladian, QmsContext, Superoperator};
use crate::matops::{self, c, commutator, frob, identity, CMatrix, DensityMatrix};
use crate::sampling;
use crate::tolerances::NumericPolicy;

/// One summand `H_i ⊗ K_i` with its multiplicity state `τ_i`.
#[derive(Debug, Clone)]
pub struct Block {
    pub dim_h: usize,
    pub dim_k: usize,
    pub tau: DensityMatrix,
    /// `Tr[P_i σ P_i]` for the invariant state used in [`extract_taus`].
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct BlockStructure {
    pub blocks: Vec<Block>,
    /// Columns are the block-frame basis vectors.
    pub basis: CMatrix,
    pub algebra_dim: usize,
}

/// JSON summary of a [`BlockStructure`].
#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub dim_h: usize,
    pub dim_k: usize,
    pub weight: f64,
    pub tau_eigenvalues: Vec<f64>,
}

impl BlockStructure {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.dim_h * b.dim_k;
                o
            })
            .collect()
    }

    /// `W* X W`.
    pub fn to_frame(&self, x: &CMatrix) -> CMatrix {
        self.basis.adjoint() * x * &self.basis
    }

    /// `W Y W*`.
    pub fn from_frame(&self, y: &CMatrix) -> CMatrix {
        &self.basis * y * self.basis.adjoint()
    }

    /// Minimal central projection `P_i`.
    pub fn projection(&self, i: usize) -> CMatrix {
        let o = self.offsets()[i];
        let n = self.blocks[i].dim_h * self.blocks[i].dim_k;
        let cols = self.basis.columns(o, n);
        &cols * cols.adjoint()
    }

    pub fn summary(&self) -> Vec<BlockSummary> {
        self.blocks
            .iter()
            .map(|b| BlockSummary {
                dim_h: b.dim_h,
                dim_k: b.dim_k,
                weight: b.weight,
                tau_eigenvalues: b.tau.eigenvalues().to_vec(),
            })
            .collect()
    }

    fn block_of(&self, y: &CMatrix, i: usize, offset: usize) -> CMatrix {
        let n = self.blocks[i].dim_h * self.blocks[i].dim_k;
        y.view((offset, offset), (n, n)).into_owned()
    }
}

/// `E_N` and `E_{N*}` as superoperators.
#[derive(Debug, Clone)]
pub struct ConditionalExpectation {
    pub heisenberg: Superoperator,
    pub schrodinger: Superoperator,
    pub structure: BlockStructure,
}

impl ConditionalExpectation {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        self.heisenberg.apply(x)
    }

    pub fn apply_predual(&self, rho: &CMatrix) -> CMatrix {
        self.schrodinger.apply(rho)
    }
}

fn gram_schmidt_push(span: &mut Vec<DVector<C64>>, v: DVector<C64>, rel_tol: f64) -> Option<DVector<C64>> {
    let norm0 = v.norm();
    if norm0 == 0.0 {
        return None;
    }
    let mut r = v;
    for _ in 0..2 {
        for b in span.iter() {
            let coef = b.dotc(&r);
            r -= b * coef;
        }
    }
    let n = r.norm();
    if n <= rel_tol * norm0 {
        return None;
    }
    let u = r / C64::new(n, 0.0);
    span.push(u.clone());
    Some(u)
}

/// HS-orthonormal basis of the `δ_H`-closure of `{L_k, L_k*}`.
fn generator_span(gen: &Lindbladian) -> Vec<CMatrix> {
    let d = gen.dim;
    let mut span: Vec<DVector<C64>> = Vec::new();
    let mut queue: VecDeque<CMatrix> = gen.jumps.iter().flat_map(|l| [l.clone(), l.adjoint()]).collect();
    while let Some(x) = queue.pop_front() {
        if span.len() == d * d {
            break;
        }
        if let Some(u) = gram_schmidt_push(&mut span, matops::vec(&x), 1e-9) {
            let m = matops::unvec(&u, d);
            queue.push_back(commutator(&gen.hamiltonian, &m));
        }
    }
    span.iter().map(|v| matops::unvec(v, d)).collect()
}

/// Matrix of `X ↦ [G, X]`.
fn commutator_matrix(g: &CMatrix) -> CMatrix {
    let id = identity(g.nrows());
    matops::kron(&id, g) - matops::kron(&g.transpose(), &id)
}

/// Orthonormal columns spanning `{X ∈ Ran Q : [G, X] = 0 for all G}`, refined one generator at a time.
fn commutant_within(q: CMatrix, gens: &[CMatrix], rel: f64) -> CMatrix {
    let mut q = q;
    for g in gens {
        if q.ncols() == 0 {
            break;
        }
        let a = commutator_matrix(g) * &q;
        let tol = rel * 2.0 * frob(g).max(1e-300);
        let null = matops::null_space(&a, tol);
        q = &q * null;
    }
    q
}

/// HS-orthonormal basis of the decoherence-free algebra, with the closure and
/// isometry checks applied.
pub fn df_algebra_basis(ctx: &QmsContext) -> Result<Vec<CMatrix>> {
    let gen = &ctx.gen;
    let d = gen.dim;
    let gens = generator_span(gen);
    let q = commutant_within(identity(d * d), &gens, ctx.policy.kernel_rel);
    let basis: Vec<CMatrix> = (0..q.ncols()).map(|k| matops::unvec(&q.column(k).into_owned(), d)).collect();
    if basis.is_empty() {
        return Err(Error::Structural("commutant is empty; identity should always be present".into()));
    }
    check_star_algebra(&q, &basis, d)?;
    check_isometric_action(ctx, &basis)?;
    Ok(basis)
}

fn residual_outside(q: &CMatrix, x: &CMatrix) -> f64 {
    let v = matops::vec(x);
    let proj = q * (q.adjoint() * &v);
    (v - proj).norm() / frob(x).max(1e-300)
}

fn random_combination<R: Rng + ?Sized>(basis: &[CMatrix], rng: &mut R) -> CMatrix {
    let coeffs = sampling::ginibre(basis.len(), 1, rng);
    let d = basis[0].nrows();
    basis.iter().enumerate().fold(CMatrix::zeros(d, d), |acc, (k, b)| acc + b * coeffs[k])
}

fn check_star_algebra(q: &CMatrix, basis: &[CMatrix], d: usize) -> Result<()> {
    let tol = 1e-9;
    let mut rng = sampling::rng(0x5eed);
    if residual_outside(q, &identity(d)) > tol {
        return Err(Error::Structural("computed algebra does not contain the identity".into()));
    }
    for b in basis {
        let r = residual_outside(q, &b.adjoint());
        if r > tol {
            return Err(Error::Structural(format!("computed algebra is not closed under adjoints (residual {r:e})")));
        }
    }
    for _ in 0..4 {
        let x = random_combination(basis, &mut rng);
        let y = random_combination(basis, &mut rng);
        let r = residual_outside(q, &(&x * &y));
        if r > tol {
            return Err(Error::Structural(format!("computed algebra is not closed under products (residual {r:e})")));
        }
    }
    Ok(())
}

/// `P_t(X*X) = P_t(X)* P_t(X)` on the algebra, so GNS norms for any invariant state are preserved.
fn check_isometric_action(ctx: &QmsContext, basis: &[CMatrix]) -> Result<()> {
    let mut rng = sampling::rng(0x150);
    let sigma = ctx.sigma_inv.mat();
    let norm = |x: &CMatrix| matops::trace(&(sigma * x.adjoint() * x)).re;
    for t in [0.5, 2.0] {
        let pt = ctx.heisenberg.exp(t)?;
        for _ in 0..3 {
            let x = random_combination(basis, &mut rng);
            let before = norm(&x);
            let after = norm(&pt.apply(&x));
            if (after - before).abs() > 1e-8 * before.max(1e-300) {
                return Err(Error::Structural(format!(
                    "semigroup is not isometric on the computed algebra at t = {t} ({before:e} vs {after:e})"
                )));
            }
        }
    }
    Ok(())
}

fn cluster(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (v - values[*g.last().unwrap()]).abs() <= tol * spread => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Hermitian elements spanning the same real space as `basis`.
fn hermitian_generators(basis: &[CMatrix]) -> Vec<CMatrix> {
    basis
        .iter()
        .flat_map(|b| [matops::hermitian_part(b), matops::hermitian_part(&(b * c(0.0, -1.0)))])
        .collect()
}

fn generic_hermitian<R: Rng + ?Sized>(herm: &[CMatrix], rng: &mut R) -> CMatrix {
    let n = herm[0].nrows();
    herm.iter().fold(CMatrix::zeros(n, n), |acc, h| {
        let r: f64 = rng.sample(rand_distr::StandardNormal);
        acc + h * c(r, 0.0)
    })
}

/// Decomposes the *-algebra spanned by `basis` as `⊕_i B(H_i) ⊗ I_{K_i}`.
///
/// When `weigh` is given, blocks of equal shape are ordered by the trace of
/// that state on them.
pub fn block_decompose(basis: &[CMatrix], weigh: Option<&DensityMatrix>, seed: u64) -> Result<BlockStructure> {
    let policy = NumericPolicy::default();
    let mut rng = sampling::rng(seed);
    let mut last = Error::Structural("block decomposition not attempted".into());
    for _ in 0..2 {
        match try_block_decompose(basis, weigh, &policy, &mut rng) {
            Ok(s) => return Ok(s),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn try_block_decompose<R: Rng + ?Sized>(
    basis: &[CMatrix],
    weigh: Option<&DensityMatrix>,
    policy: &NumericPolicy,
    rng: &mut R,
) -> Result<BlockStructure> {
    let d = basis.first().map(|b| b.nrows()).ok_or_else(|| Error::RejectedInput("empty algebra basis".into()))?;
    let r = basis.len();
    let q = CMatrix::from_fn(d * d, r, |i, k| basis[k][(i % d, i / d)]);

    // Center: coefficient vectors whose element commutes with every basis element.
    let mut coef = identity(r);
    for b in basis {
        if coef.ncols() == 0 {
            break;
        }
        let a = commutator_matrix(b) * &q * &coef;
        let null = matops::null_space(&a, policy.kernel_rel * 2.0 * frob(b).max(1e-300));
        coef = &coef * null;
    }
    let center: Vec<CMatrix> = (0..coef.ncols()).map(|k| matops::unvec(&(&q * coef.column(k)), d)).collect();
    if center.is_empty() {
        return Err(Error::Structural("algebra has trivial center; identity missing".into()));
    }

    let z = generic_hermitian(&hermitian_generators(&center), rng);
    let zs = matops::spectrum(&z);
    let groups = cluster(&zs.values, policy.cluster);
    if groups.len() != center.len() {
        return Err(Error::Structural(format!(
            "central element has {} distinct eigenvalues but the center has dimension {}",
            groups.len(),
            center.len()
        )));
    }

    struct Raw {
        dim_h: usize,
        dim_k: usize,
        vectors: CMatrix,
        weight: f64,
    }
    let herm = hermitian_generators(basis);
    let mut raws: Vec<Raw> = Vec::new();
    for g in &groups {
        let v = CMatrix::from_fn(d, g.len(), |row, k| zs.vectors[(row, g[k])]);
        let compressed: Vec<CMatrix> = herm.iter().map(|h| v.adjoint() * h * &v).collect();
        let a = generic_hermitian(&compressed, rng);
        let asp = matops::spectrum(&a);
        let sub = cluster(&asp.values, policy.cluster);
        let dim_h = sub.len();
        let dim_k = sub[0].len();
        if sub.iter().any(|s| s.len() != dim_k) {
            return Err(Error::Structural("unequal multiplicities inside a central block".into()));
        }
        let eig = |j: usize| CMatrix::from_fn(g.len(), dim_k, |row, l| asp.vectors[(row, sub[j][l])]);
        let f1 = eig(0);
        let q1 = &f1 * f1.adjoint();
        let full: Vec<CMatrix> = basis.iter().map(|b| v.adjoint() * b * &v).collect();
        let mixer = random_combination(&full, rng);
        let mut cols = CMatrix::zeros(g.len(), g.len());
        for j in 0..dim_h {
            let fj = eig(j);
            let x = if j == 0 { q1.clone() } else { &fj * fj.adjoint() * &mixer * &q1 };
            let images = &x * &f1;
            let scale = images.column(0).norm();
            if scale < 1e-8 {
                return Err(Error::Structural("degenerate matrix-unit draw".into()));
            }
            for l in 0..dim_k {
                cols.set_column(j * dim_k + l, &(images.column(l) / C64::new(scale, 0.0)));
            }
        }
        let vectors = &v * cols;
        let weight = weigh.map_or(0.0, |s| {
            let local = vectors.adjoint() * s.mat() * &vectors;
            matops::trace(&local).re
        });
        raws.push(Raw { dim_h, dim_k, vectors, weight });
    }
    raws.sort_by(|a, b| {
        (b.dim_h, b.dim_k)
            .cmp(&(a.dim_h, a.dim_k))
            .then(b.weight.total_cmp(&a.weight))
    });

    let mut w = CMatrix::zeros(d, d);
    let mut offset = 0;
    let mut blocks = Vec::new();
    for raw in &raws {
        let n = raw.dim_h * raw.dim_k;
        w.view_mut((0, offset), (d, n)).copy_from(&raw.vectors);
        offset += n;
        blocks.push(Block {
            dim_h: raw.dim_h,
            dim_k: raw.dim_k,
            tau: DensityMatrix::maximally_mixed(raw.dim_k),
            weight: raw.weight,
        });
    }
    if offset != d {
        return Err(Error::Structural(format!("blocks cover dimension {offset}, expected {d}")));
    }
    let unitarity = frob(&(w.adjoint() * &w - identity(d)));
    if unitarity > 1e-10 * (d as f64) {
        return Err(Error::DecompositionFailure { leakage: unitarity });
    }
    let algebra_dim: usize = blocks.iter().map(|b| b.dim_h * b.dim_h).sum();
    if algebra_dim != r {
        return Err(Error::Structural(format!("block dimensions give Σ dimH² = {algebra_dim}, algebra has dimension {r}")));
    }
    let structure = BlockStructure { blocks, basis: w, algebra_dim };
    let leak = leakage(&structure, basis);
    if leak > policy.leakage {
        return Err(Error::DecompositionFailure { leakage: leak });
    }
    Ok(structure)
}

/// Largest relative deviation of `W* B W` from `⊕ A_i ⊗ I_{K_i}` over the basis.
pub fn leakage(structure: &BlockStructure, basis: &[CMatrix]) -> f64 {
    let offsets = structure.offsets();
    let mut worst: f64 = 0.0;
    for b in basis {
        let y = structure.to_frame(b);
        let mut fitted = CMatrix::zeros(y.nrows(), y.ncols());
        for (i, blk) in structure.blocks.iter().enumerate() {
            let yi = structure.block_of(&y, i, offsets[i]);
            let a = matops::partial_trace_b(&yi, blk.dim_h, blk.dim_k) / c(blk.dim_k as f64, 0.0);
            let model = matops::kron(&a, &identity(blk.dim_k));
            let n = blk.dim_h * blk.dim_k;
            fitted.view_mut((offsets[i], offsets[i]), (n, n)).copy_from(&model);
        }
        worst = worst.max(frob(&(y - fitted)) / frob(b).max(1e-300));
    }
    worst
}

/// Reads `p_i` and `τ_i` off `σ = W [⊕ p_i σ_i ⊗ τ_i] W*`.
pub fn extract_taus(structure: &BlockStructure, sigma: &DensityMatrix) -> Result<BlockStructure> {
    if !sigma.faithful {
        return Err(Error::Domain { what: "block states need a faithful invariant state".into(), eigenvalue: sigma.min_eigenvalue() });
    }
    let y = structure.to_frame(sigma.mat());
    let offsets = structure.offsets();
    let mut out = structure.clone();
    let mut rebuilt = CMatrix::zeros(y.nrows(), y.ncols());
    for (i, blk) in structure.blocks.iter().enumerate() {
        let yi = structure.block_of(&y, i, offsets[i]);
        let p = matops::trace(&yi).re;
        let sigma_i = matops::partial_trace_b(&yi, blk.dim_h, blk.dim_k) / c(p, 0.0);
        let tau_i = matops::partial_trace_a(&yi, blk.dim_h, blk.dim_k) / c(p, 0.0);
        let n = blk.dim_h * blk.dim_k;
        let model = matops::kron(&sigma_i, &tau_i) * c(p, 0.0);
        rebuilt.view_mut((offsets[i], offsets[i]), (n, n)).copy_from(&model);
        out.blocks[i].weight = p;
        out.blocks[i].tau = DensityMatrix::normalized(&tau_i)?;
    }
    let err = frob(&(y - rebuilt));
    if err > 1e-8 {
        return Err(Error::Structural(format!("invariant state is not of block product form (residual {err:e})")));
    }
    Ok(out)
}

/// `σ_Tr = E_{N*}(I/d) = W [⊕ (dimK_i / d) I_{H_i} ⊗ τ_i] W*`.
pub fn sigma_tr(structure: &BlockStructure) -> Result<DensityMatrix> {
    let d = structure.dim();
    let offsets = structure.offsets();
    let mut y = CMatrix::zeros(d, d);
    for (i, blk) in structure.blocks.iter().enumerate() {
        let n = blk.dim_h * blk.dim_k;
        let piece = matops::kron(&identity(blk.dim_h), blk.tau.mat()) * c(blk.dim_k as f64 / d as f64, 0.0);
        y.view_mut((offsets[i], offsets[i]), (n, n)).copy_from(&piece);
    }
    DensityMatrix::normalized(&structure.from_frame(&y))
}

/// `E_N(X) = ⊕ Tr_K[(I ⊗ τ_i) P_i X P_i] ⊗ I_K` and its predual `⊕ Tr_K[P_i ρ P_i] ⊗ τ_i`.
pub fn conditional_expectations(structure: &BlockStructure) -> ConditionalExpectation {
    let d = structure.dim();
    let offsets = structure.offsets();
    let heis = |x: &CMatrix| {
        let y = structure.to_frame(x);
        let mut out = CMatrix::zeros(d, d);
        for (i, blk) in structure.blocks.iter().enumerate() {
            let yi = structure.block_of(&y, i, offsets[i]);
            let weighted = matops::kron(&identity(blk.dim_h), blk.tau.mat()) * yi;
            let a = matops::partial_trace_b(&weighted, blk.dim_h, blk.dim_k);
            let n = blk.dim_h * blk.dim_k;
            out.view_mut((offsets[i], offsets[i]), (n, n)).copy_from(&matops::kron(&a, &identity(blk.dim_k)));
        }
        structure.from_frame(&out)
    };
    let schr = |rho: &CMatrix| {
        let y = structure.to_frame(rho);
        let mut out = CMatrix::zeros(d, d);
        for (i, blk) in structure.blocks.iter().enumerate() {
            let yi = structure.block_of(&y, i, offsets[i]);
            let a = matops::partial_trace_b(&yi, blk.dim_h, blk.dim_k);
            let n = blk.dim_h * blk.dim_k;
            out.view_mut((offsets[i], offsets[i]), (n, n)).copy_from(&matops::kron(&a, blk.tau.mat()));
        }
        structure.from_frame(&out)
    };
    ConditionalExpectation {
        heisenberg: Superoperator::from_map(d, heis),
        schrodinger: Superoperator::from_map(d, schr),
        structure: structure.clone(),
    }
}

/// Decay rate off the algebra: `−max Re` over eigenvalues of `L` away from the imaginary axis.
pub fn off_algebra_rate(ctx: &QmsContext, algebra_dim: usize) -> Result<Option<f64>> {
    let mut ev = matops::eigenvalues_general(&ctx.heisenberg.mat);
    ev.sort_by(|a, b| b.re.total_cmp(&a.re));
    let scale = ctx.heisenberg.frob().max(1e-300);
    let peripheral = ev.iter().filter(|z| z.re.abs() <= 1e-8 * scale).count();
    if peripheral != algebra_dim {
        return Err(Error::Structural(format!(
            "{peripheral} eigenvalues of the generator lie on the imaginary axis but the algebra has dimension {algebra_dim}"
        )));
    }
    Ok(ev.get(algebra_dim).map(|z| -z.re))
}

/// Everything the analysis needs downstream of the generator.
#[derive(Debug, Clone)]
pub struct DfAnalysis {
    pub ctx: QmsContext,
    pub algebra: Vec<CMatrix>,
    pub structure: BlockStructure,
    pub expectation: ConditionalExpectation,
    /// `−max Re` of the spectrum off the algebra; `None` if the algebra is everything.
    pub decay_rate: Option<f64>,
}

pub fn analyze(gen: Lindbladian, seed: u64) -> Result<DfAnalysis> {
    analyze_context(QmsContext::new(gen)?, seed)
}

/// Runs the structure pipeline using `ctx.sigma_inv` as the invariant state.
pub fn analyze_context(mut ctx: QmsContext, seed: u64) -> Result<DfAnalysis> {
    let algebra = df_algebra_basis(&ctx)?;
    let raw = block_decompose(&algebra, Some(&ctx.sigma_inv), seed)?;
    let structure = extract_taus(&raw, &ctx.sigma_inv)?;
    let reference = sigma_tr(&structure)?;
    ctx.set_sigma_tr(reference)?;
    let expectation = conditional_expectations(&structure);
    let decay_rate = off_algebra_rate(&ctx, algebra.len())?;
    if let Some(rate) = decay_rate {
        check_decay(&ctx, &expectation, rate)?;
    }
    Ok(DfAnalysis { ctx, algebra, structure, expectation, decay_rate })
}

/// `‖P_T ∘ (Id − E_N)‖ ≤ 1e-6` at `T = 50 / rate`.
fn check_decay(ctx: &QmsContext, e: &ConditionalExpectation, rate: f64) -> Result<()> {
    let t = 50.0 / rate;
    let pt = ctx.heisenberg.exp(t)?;
    let residual = pt.compose(&Superoperator::identity(ctx.dim()).sub(&e.heisenberg));
    let norm = matops::spectral_norm(&residual.mat);
    if norm > 1e-6 {
        return Err(Error::Structural(format!("complement of the algebra has not decayed at t = {t:e} (norm {norm:e})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matops::{from_real_diag, pauli_z};

    #[test]
    fn deco_gives_diagonal_algebra() {
        let a = analyze(catalog::build_deco(3, 1.0).unwrap(), 1).unwrap();
        assert_eq!(a.algebra.len(), 3);
        assert_eq!(a.structure.blocks.len(), 3);
        assert!(a.structure.blocks.iter().all(|b| b.dim_h == 1 && b.dim_k == 1));
        let st = a.ctx.sigma_tr.as_ref().unwrap();
        assert!(frob(&(st.mat() - identity(3) / c(3.0, 0.0))) < 1e-12);
        assert!((a.decay_rate.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_is_primitive() {
        let tau = DensityMatrix::new(from_real_diag(&[0.7, 0.3])).unwrap();
        let a = analyze(catalog::build_depolarizing(&tau, 1.0).unwrap(), 1).unwrap();
        assert_eq!(a.algebra.len(), 1);
        assert_eq!((a.structure.blocks[0].dim_h, a.structure.blocks[0].dim_k), (1, 2));
        assert!(frob(&(a.ctx.sigma_tr.as_ref().unwrap().mat() - tau.mat())) < 1e-10);
    }

    #[test]
    fn bipartite_factor() {
        let tau = DensityMatrix::new(from_real_diag(&[0.6, 0.4])).unwrap();
        let inner = catalog::build_depolarizing(&tau, 1.0).unwrap();
        let a = analyze(catalog::build_bipartite(&pauli_z(), &inner).unwrap(), 3).unwrap();
        assert_eq!(a.algebra.len(), 4);
        assert_eq!(a.structure.blocks.len(), 1);
        assert_eq!((a.structure.blocks[0].dim_h, a.structure.blocks[0].dim_k), (2, 2));
        let expected = matops::kron(&(identity(2) / c(2.0, 0.0)), tau.mat());
        assert!(frob(&(a.ctx.sigma_tr.as_ref().unwrap().mat() - expected)) < 1e-10);
    }

    #[test]
    fn trivial_algebra_blocks() {
        let s = block_decompose(&[identity(3) / c(3f64.sqrt(), 0.0)], None, 0).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!((s.blocks[0].dim_h, s.blocks[0].dim_k), (1, 3));
    }

    #[test]
    fn unitary_dynamics_keeps_everything() {
        let gen = Lindbladian::new(pauli_z(), vec![]).unwrap();
        let a = analyze(gen, 0).unwrap();
        assert_eq!(a.algebra.len(), 4);
        assert!(a.decay_rate.is_none());
    }
}
