//! Decoherence-free Poincaré constant, and upper estimates of the
//! decoherence-free modified log-Sobolev constant `α_N` and of the
//! information constant `β_N`.

use std::cell::Cell;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{self, Functionals};
use crate::matops::{self, c, serde_rows, CMatrix, DensityMatrix};
use crate::optim::NelderMead;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    SymmetrizedSpectrum,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapResult {
    pub lambda: f64,
    #[serde(with = "serde_rows")]
    pub eigvec: CMatrix,
    pub method: GapMethod,
}

/// Spectral gap of `−(L + L̂)/2` on the KMS-orthogonal complement of `N(P)`.
pub fn spectral_gap(f: &Functionals) -> Result<GapResult> {
    let ctx = &f.analysis.ctx;
    let d = ctx.dim();
    let g_half = f.kms.metric_power(0.5);
    let g_mhalf = f.kms.metric_power(-0.5);
    let t = &g_half * &ctx.heisenberg.mat * &g_mhalf;
    let sym = (&t + t.adjoint()) * c(0.5, 0.0);
    let proj = &g_half * &f.analysis.expectation.heisenberg.mat * &g_mhalf;
    let complement = matops::null_space(&matops::hermitian_part(&proj), 1e-8);
    if complement.ncols() == 0 {
        return Err(Error::Unsupported("the decoherence-free algebra is the full matrix algebra".into()));
    }
    let restricted = -(complement.adjoint() * &sym * &complement);
    let spec = matops::spectrum(&restricted);
    let lambda = spec.values[0];
    let scale = matops::frob(&sym).max(1e-300);
    if lambda <= 1e-9 * scale {
        return Err(Error::Structural(format!(
            "symmetrized generator has kernel beyond the decoherence-free algebra (eigenvalue {lambda:e})"
        )));
    }
    let v = &g_mhalf * &complement * spec.vectors.column(0);
    let x = matops::unvec(&v, d);
    let herm = matops::hermitian_part(&x);
    let anti = (&x - x.adjoint()) * c(0.0, 0.5);
    let mut eigvec = if matops::frob(&herm) >= matops::frob(&anti) { herm } else { anti };
    let n = f.kms.norm_sqr(&eigvec).sqrt();
    eigvec /= c(n, 0.0);
    Ok(GapResult { lambda, eigvec, method: GapMethod::SymmetrizedSpectrum })
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    /// Samples lying in `N(P)` up to rounding, skipped as `0/0`.
    pub excluded: usize,
}

/// Ratios `E_L(X) / Var_N(X)` over the samples.
pub fn poincare_check(f: &Functionals, samples: &[CMatrix]) -> Result<PoincareReport> {
    let mut ratios = Vec::with_capacity(samples.len());
    let mut excluded = 0;
    for x in samples {
        let var = f.df_variance(x)?;
        if var <= 1e-12 * f.kms.norm_sqr(x).max(1e-300) {
            excluded += 1;
            continue;
        }
        ratios.push(f.dirichlet(x)? / var);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PoincareReport { ratios, min_ratio, excluded })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchBudget {
    pub starts: usize,
    pub iterations: usize,
    /// How many of the starts come from perturbative directions.
    pub perturbative: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { starts: 32, iterations: 500, perturbative: 8, seed: 42 }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Per-start optimizer record.
#[derive(Debug, Clone, Serialize)]
pub struct StartTrace {
    pub origin: String,
    pub initial_ratio: Option<f64>,
    pub final_ratio: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub rejected: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MlsiEstimate {
    /// Smallest ratio found, an upper bound on the infimum.
    pub alpha_upper: f64,
    #[serde(with = "serde_rows")]
    pub witness: CMatrix,
    pub witness_spectrum: Vec<f64>,
    /// Local ratio limits along perturbative directions around `σ_Tr`.
    pub perturbative_ratios: Vec<f64>,
    pub optimizer_trace: Vec<StartTrace>,
    pub evaluated: usize,
    pub rejected: usize,
    /// No start met the convergence tolerance within the budget.
    pub partial: bool,
}

/// Threshold on `D_N` below which a state counts as lying on `N_*`.
pub const DEGENERATE_DN: f64 = 1e-10;
/// Threshold on the mutual information below which a state counts as a product.
pub const DEGENERATE_MI: f64 = 1e-8;
/// States whose smallest eigenvalue falls below this are rejected by the searches.
const MIN_EIGENVALUE: f64 = 1e-13;

/// `EP(ρ) / (2 D_N(ρ))`, or `None` in the `0/0` region.
pub fn mlsi_ratio(f: &Functionals, rho: &CMatrix) -> Result<Option<f64>> {
    let dn = f.df_entropy(rho)?;
    if dn < DEGENERATE_DN {
        return Ok(None);
    }
    Ok(Some(f.entropy_production(rho)? / (2.0 * dn)))
}

/// `IP(ρ) / (2 I_ρ(A:B))`, or `None` near product states.
pub fn information_ratio(f: &Functionals, rho: &CMatrix) -> Result<Option<f64>> {
    let split = f.split().ok_or_else(|| Error::Unsupported("model has no bipartite split".into()))?;
    let mi = functionals::mutual_information(rho, split)?;
    if mi < DEGENERATE_MI {
        return Ok(None);
    }
    Ok(Some(f.information_production(rho)? / (2.0 * mi)))
}

/// Exponential chart `A ↦ exp(A)/Tr exp(A)` on real coordinates of Hermitian `A`.
struct ExpChart {
    basis: Vec<CMatrix>,
}

impl ExpChart {
    fn new(d: usize) -> Self {
        Self { basis: functionals::hermitian_unit_basis(d) }
    }

    fn state(&self, x: &[f64]) -> (CMatrix, f64) {
        let d = self.basis[0].nrows();
        let a = self.basis.iter().zip(x).fold(CMatrix::zeros(d, d), |acc, (b, &v)| acc + b * c(v, 0.0));
        let spec = matops::spectrum(&a);
        let top = spec.max();
        let w: Vec<f64> = spec.values.iter().map(|&v| (v - top).exp()).collect();
        let z: f64 = w.iter().sum();
        let rho = spec.apply(|v| (v - top).exp() / z);
        let min = w.iter().copied().fold(f64::INFINITY, f64::min) / z;
        (matops::hermitian_part(&rho), min)
    }

    fn coords(&self, rho: &DensityMatrix) -> Vec<f64> {
        let log = rho.log();
        self.basis.iter().map(|b| matops::hs_inner(b, &log).re).collect()
    }
}

struct Start {
    origin: String,
    x0: Vec<f64>,
    step: f64,
}

struct SearchOutcome {
    best_value: f64,
    best_x: Vec<f64>,
    traces: Vec<StartTrace>,
}

fn run_search(
    chart: &ExpChart,
    starts: Vec<Start>,
    iterations: usize,
    ratio: &(dyn Fn(&CMatrix) -> Option<f64> + Sync),
) -> Result<SearchOutcome> {
    let results: Vec<(StartTrace, f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|s| {
            let best = Cell::new(f64::INFINITY);
            let best_x = std::cell::RefCell::new(s.x0.clone());
            let rejected = Cell::new(0usize);
            let objective = |x: &[f64]| {
                let (rho, min) = chart.state(x);
                let value = if min < MIN_EIGENVALUE { None } else { ratio(&rho) };
                match value {
                    Some(v) if v.is_finite() => {
                        if v < best.get() {
                            best.set(v);
                            *best_x.borrow_mut() = x.to_vec();
                        }
                        v
                    }
                    _ => {
                        rejected.set(rejected.get() + 1);
                        f64::INFINITY
                    }
                }
            };
            let initial = objective(&s.x0);
            let nm = NelderMead { max_iter: iterations, step: s.step, ftol: 1e-12 };
            let m = nm.minimize(&objective, &s.x0);
            let trace = StartTrace {
                origin: s.origin,
                initial_ratio: initial.is_finite().then_some(initial),
                final_ratio: best.get(),
                iterations: m.iterations,
                evaluations: m.evaluations + 1,
                rejected: rejected.get(),
                converged: m.converged,
            };
            (trace, best.get(), best_x.into_inner())
        })
        .collect();
    let mut best_value = f64::INFINITY;
    let mut best_x = Vec::new();
    let mut traces = Vec::with_capacity(results.len());
    for (trace, v, x) in results {
        if v < best_value {
            best_value = v;
            best_x = x;
        }
        traces.push(trace);
    }
    if !best_value.is_finite() {
        return Err(Error::BudgetExhausted("no start produced an admissible ratio".into()));
    }
    Ok(SearchOutcome { best_value, best_x, traces })
}

/// Generalized eigenpairs of the second-order forms of `EP` and `2 D_N` at `σ_Tr`,
/// ascending; each direction is returned as the operator `Y ∈ Ker E_N`.
pub fn perturbative_directions(f: &Functionals) -> Result<Vec<(f64, CMatrix)>> {
    let ys = f.hermitian_complement_basis();
    let m = ys.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let sigma = &f.sigma_tr;
    let mut gs = Vec::with_capacity(m);
    let mut thetas = Vec::with_capacity(m);
    for y in &ys {
        let g = f.gamma(y);
        thetas.push(matops::theta_map(sigma, &g)?);
        gs.push(g);
    }
    let lthetas: Vec<CMatrix> = thetas.iter().map(|t| f.generator(t)).collect();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = -matops::hs_inner(&gs[i], &lthetas[j]).re;
            b[(i, j)] = matops::hs_inner(&gs[i], &thetas[j]).re;
        }
    }
    let a = (&a + a.transpose()) * 0.5;
    let b = (&b + b.transpose()) * 0.5;
    let chol = b
        .cholesky()
        .ok_or_else(|| Error::Structural("entropy Hessian is not positive definite off the algebra".into()))?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| Error::Structural("singular entropy Hessian".into()))?;
    let mm = &l_inv * &a * l_inv.transpose();
    let eig = ((&mm + mm.transpose()) * 0.5).symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let d = f.dim();
    Ok(order
        .into_iter()
        .map(|k| {
            let coef = l_inv.transpose() * eig.eigenvectors.column(k);
            let y = ys.iter().zip(coef.iter()).fold(CMatrix::zeros(d, d), |acc, (b, &w)| acc + b * c(w, 0.0));
            (eig.eigenvalues[k], y)
        })
        .collect())
}

/// Faithful state `σ_Tr + ε σ_Tr^{1/2} Y σ_Tr^{1/2}` with `ε` scaled so that the
/// perturbation has operator norm `rel · σ_min`.
pub fn perturbed_state(f: &Functionals, y: &CMatrix, rel: f64) -> Result<DensityMatrix> {
    let g = f.gamma(y);
    let eps = rel * f.sigma_tr.min_eigenvalue() / matops::spectral_norm(&g).max(1e-300);
    DensityMatrix::new(matops::hermitian_part(&(f.sigma_tr.mat() + g * c(eps, 0.0))))
}

fn ginibre_starts(chart: &ExpChart, d: usize, count: usize, seed: u64) -> Vec<Start> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|k| {
            let rho = sampling::random_state(d, &mut rng);
            Start { origin: format!("ginibre:{k}"), x0: chart.coords(&rho), step: 0.5 }
        })
        .collect()
}

/// Multi-start search for `inf EP/(2 D_N)` over faithful states.
pub fn estimate_alpha(f: &Functionals, budget: &SearchBudget) -> Result<MlsiEstimate> {
    let d = f.dim();
    if f.analysis.algebra.len() == d * d {
        return Err(Error::Unsupported("the decoherence-free algebra is the full matrix algebra".into()));
    }
    let chart = ExpChart::new(d);
    let directions = perturbative_directions(f)?;
    let perturbative_ratios: Vec<f64> = directions.iter().map(|(r, _)| *r).collect();
    let n_pert = budget.perturbative.min(directions.len()).min(budget.starts);
    let mut starts = Vec::with_capacity(budget.starts);
    for (k, (_, y)) in directions.iter().take(n_pert).enumerate() {
        let rel = if k % 2 == 0 { 3e-4 } else { 0.3 };
        let rho = perturbed_state(f, y, rel)?;
        starts.push(Start { origin: format!("perturbative:{k}"), x0: chart.coords(&rho), step: 0.05 });
    }
    starts.extend(ginibre_starts(&chart, d, budget.starts - n_pert, budget.seed));
    let ratio = |rho: &CMatrix| mlsi_ratio(f, rho).ok().flatten();
    let out = run_search(&chart, starts, budget.iterations, &ratio)?;
    finish(&chart, out).map(|(alpha_upper, witness, witness_spectrum, traces)| MlsiEstimate {
        alpha_upper,
        witness,
        witness_spectrum,
        perturbative_ratios,
        evaluated: traces.iter().map(|t| t.evaluations).sum(),
        rejected: traces.iter().map(|t| t.rejected).sum(),
        partial: !traces.iter().any(|t| t.converged),
        optimizer_trace: traces,
    })
}

type Finished = (f64, CMatrix, Vec<f64>, Vec<StartTrace>);

fn finish(chart: &ExpChart, out: SearchOutcome) -> Result<Finished> {
    let (witness, _) = chart.state(&out.best_x);
    let witness_spectrum = matops::spectrum(&witness).values;
    Ok((out.best_value, witness, witness_spectrum, out.traces))
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaEstimate {
    pub beta_upper: f64,
    #[serde(with = "serde_rows")]
    pub witness: CMatrix,
    pub witness_spectrum: Vec<f64>,
    pub optimizer_trace: Vec<StartTrace>,
    /// Estimate of `α₁` for the inner generator, when it is primitive.
    pub alpha_inner_upper: Option<f64>,
    pub partial: bool,
}

impl BetaEstimate {
    /// `min{β, α₁(inner)}`, the quantity bounded above by `α_N`.
    pub fn combined(&self) -> f64 {
        self.alpha_inner_upper.map_or(self.beta_upper, |a| a.min(self.beta_upper))
    }
}

/// Multi-start search for `inf IP/(2 I(A:B))` over correlated faithful states.
pub fn estimate_beta(f: &Functionals, budget: &SearchBudget) -> Result<BetaEstimate> {
    let parts = f.bipartite.as_ref().ok_or_else(|| Error::Unsupported("model has no bipartite split".into()))?;
    let d = f.dim();
    let chart = ExpChart::new(d);
    let starts = ginibre_starts(&chart, d, budget.starts, budget.seed);
    let ratio = |rho: &CMatrix| information_ratio(f, rho).ok().flatten();
    let out = run_search(&chart, starts, budget.iterations, &ratio)?;
    let inner = Functionals::from_generator(parts.inner.clone(), budget.seed)?;
    let alpha_inner_upper = if inner.analysis.algebra.len() == 1 {
        Some(estimate_alpha(&inner, budget)?.alpha_upper)
    } else {
        None
    };
    let (beta_upper, witness, witness_spectrum, traces) = finish(&chart, out)?;
    Ok(BetaEstimate {
        beta_upper,
        witness,
        witness_spectrum,
        partial: !traces.iter().any(|t| t.converged),
        optimizer_trace: traces,
        alpha_inner_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn funcs(gen: crate::Lindbladian) -> Functionals {
        Functionals::from_generator(gen, 3).unwrap()
    }

    #[test]
    fn deco_gap_is_gamma() {
        for &g in &[0.5, 1.0, 3.0] {
            let f = funcs(catalog::build_deco(3, g).unwrap());
            let gap = spectral_gap(&f).unwrap();
            assert!((gap.lambda - g).abs() < 1e-9, "{}", gap.lambda);
            let ratio = f.dirichlet(&gap.eigvec).unwrap() / f.df_variance(&gap.eigvec).unwrap();
            assert!((ratio - gap.lambda).abs() < 1e-7);
        }
    }

    #[test]
    fn diagonal_gamma_gap() {
        let gamma = catalog::random_diagonal_gamma(4, 3, true, &mut sampling::rng(11));
        let f = funcs(catalog::build_diagonal_gamma(&gamma).unwrap());
        let expected = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| -gamma[(i, j)].re)
            .fold(f64::INFINITY, f64::min);
        assert!((spectral_gap(&f).unwrap().lambda - expected).abs() < 1e-9);
    }

    #[test]
    fn poincare_holds_on_samples() {
        let f = funcs(catalog::build_deco(3, 2.0).unwrap());
        let mut rng = sampling::rng(1);
        let samples: Vec<CMatrix> = (0..100).map(|_| sampling::random_hermitian(3, &mut rng)).collect();
        let report = poincare_check(&f, &samples).unwrap();
        assert!(report.min_ratio >= 2.0 - 1e-7);
        let diag = matops::from_real_diag(&[1.0, 2.0, 3.0]);
        assert_eq!(poincare_check(&f, &[diag]).unwrap().excluded, 1);
    }

    #[test]
    fn perturbative_ratio_matches_rayleigh_quotient() {
        let f = funcs(catalog::build_deco(2, 1.0).unwrap());
        let dirs = perturbative_directions(&f).unwrap();
        let (r, y) = &dirs[0];
        let rho = perturbed_state(&f, y, 1e-3).unwrap();
        let ratio = mlsi_ratio(&f, rho.mat()).unwrap().unwrap();
        assert!((ratio - r).abs() <= 1e-3 * r, "{ratio} vs {r}");
    }

    #[test]
    fn deco_alpha_bounds() {
        let f = funcs(catalog::build_deco(2, 1.0).unwrap());
        let budget = SearchBudget { starts: 6, iterations: 200, perturbative: 2, seed: 1 };
        let est = estimate_alpha(&f, &budget).unwrap();
        assert!(est.alpha_upper >= 0.5 - 1e-9 && est.alpha_upper <= 1.0 + 1e-6, "{}", est.alpha_upper);
        assert!(est.optimizer_trace.iter().all(|t| t.final_ratio >= est.alpha_upper));
    }

    #[test]
    fn degenerate_ratio_is_rejected() {
        let f = funcs(catalog::build_deco(2, 1.0).unwrap());
        assert!(mlsi_ratio(&f, &matops::from_real_diag(&[0.3, 0.7])).unwrap().is_none());
    }
}
