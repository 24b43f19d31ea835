//! Trajectories, decay curves, bound curves and decoherence times.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{self, Functionals};
use crate::matops::{self, c, CMatrix, DensityMatrix};
use crate::optim::NelderMead;
use crate::sampling;
use crate::Superoperator;

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::RejectedInput("time grid must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::RejectedInput("time grid must be ascending".into()));
    }
    Ok(())
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

/// `n` evenly spaced points on `[0, tmax]`.
pub fn linear_grid(tmax: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| tmax * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Heisenberg semigroup on a time grid; Schrödinger maps are the Hilbert-Schmidt duals.
pub struct Propagators {
    pub times: Vec<f64>,
    pub heisenberg: Vec<Superoperator>,
}

impl Propagators {
    pub fn new(f: &Functionals, times: &[f64]) -> Result<Self> {
        check_grid(times)?;
        let gen = &f.analysis.ctx.heisenberg;
        let heisenberg = times.par_iter().map(|&t| gen.exp(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { times: times.to_vec(), heisenberg })
    }

    pub fn evolve_state(&self, k: usize, rho: &CMatrix) -> CMatrix {
        let v = self.heisenberg[k].mat.adjoint() * matops::vec(rho);
        matops::hermitian_part(&matops::unvec(&v, self.heisenberg[k].dim))
    }

    pub fn evolve_observable(&self, k: usize, x: &CMatrix) -> CMatrix {
        self.heisenberg[k].apply(x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    /// `‖P_{*t}(ρ − ρ_N)‖_Tr`.
    pub trace_dist: Vec<f64>,
    /// `Var_N(σ_Tr^{-1/2} ρ_t σ_Tr^{-1/2})`.
    pub df_variance: Vec<f64>,
    pub df_entropy: Vec<f64>,
    pub mutual_info: Option<Vec<f64>>,
}

pub fn trajectory(f: &Functionals, rho0: &DensityMatrix, times: &[f64]) -> Result<DecayCurve> {
    let props = Propagators::new(f, times)?;
    trajectory_with(f, &props, rho0)
}

pub fn trajectory_with(f: &Functionals, props: &Propagators, rho0: &DensityMatrix) -> Result<DecayCurve> {
    let rho = rho0.mat();
    let off = rho - f.e_n_star(rho);
    let n = props.times.len();
    let mut out = DecayCurve {
        times: props.times.clone(),
        trace_dist: Vec::with_capacity(n),
        df_variance: Vec::with_capacity(n),
        df_entropy: Vec::with_capacity(n),
        mutual_info: f.split().map(|_| Vec::with_capacity(n)),
    };
    for k in 0..n {
        let rt = props.evolve_state(k, rho);
        out.trace_dist.push(matops::trace_norm(&props.evolve_state(k, &off)));
        out.df_variance.push(f.df_variance(&f.gamma_inv(&rt))?);
        out.df_entropy.push(f.df_entropy(&rt)?);
        if let (Some(mi), Some(split)) = (out.mutual_info.as_mut(), f.split()) {
            mi.push(functionals::mutual_information(&rt, split)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCurves {
    /// `√(1/σ_min) e^{−λt}`.
    pub pi: Vec<f64>,
    /// `√(2 log(1/σ_min)) e^{−αt}`.
    pub mlsi: Vec<f64>,
    /// Time at which the two curves meet, if they do at `t ≥ 0`.
    pub crossing_time: Option<f64>,
}

pub fn bound_curves(sigma_min: f64, lambda: f64, alpha: f64, times: &[f64]) -> BoundCurves {
    let a = (1.0 / sigma_min).sqrt();
    let b = (2.0 * (1.0 / sigma_min).ln()).sqrt();
    let crossing_time = if (lambda - alpha).abs() > 0.0 && a > 0.0 && b > 0.0 {
        let t = (a / b).ln() / (lambda - alpha);
        (t.is_finite() && t >= 0.0).then_some(t)
    } else {
        None
    };
    BoundCurves {
        pi: times.iter().map(|t| a * (-lambda * t).exp()).collect(),
        mlsi: times.iter().map(|t| b * (-alpha * t).exp()).collect(),
        crossing_time,
    }
}

/// First time the Poincaré bound reaches `ε`: `(1/2λ) ln(ε⁻² / σ_min)`.
pub fn tau_pi_bound(sigma_min: f64, lambda: f64, epsilon: f64) -> f64 {
    ((1.0 / sigma_min).sqrt() / epsilon).ln().max(0.0) / lambda
}

/// First time the log-Sobolev bound reaches `ε`: `(1/2α) ln(2 ln(1/σ_min) ε⁻²)`.
pub fn tau_mlsi_bound(sigma_min: f64, alpha: f64, epsilon: f64) -> f64 {
    let b = (2.0 * (1.0 / sigma_min).ln()).sqrt();
    if b <= epsilon {
        return 0.0;
    }
    (b / epsilon).ln() / alpha
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoTimeResult {
    pub dim: usize,
    pub epsilon: f64,
    pub tau_empirical: f64,
    #[serde(rename = "tau_PI_bound")]
    pub tau_pi_bound: f64,
    #[serde(rename = "tau_MLSI_bound")]
    pub tau_mlsi_bound: f64,
    pub sigma_min: f64,
    pub lambda: f64,
    pub alpha: f64,
    /// Worst-case distance at `t = 0`.
    pub g0: f64,
    /// The inner maximization failed to converge somewhere along the bisection.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecoSearch {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DecoSearch {
    fn default() -> Self {
        Self { starts: 8, iterations: 400, seed: 42 }
    }
}

fn pure_state(x: &[f64]) -> CMatrix {
    let d = x.len() / 2;
    let mut psi = CMatrix::zeros(d, 1);
    for i in 0..d {
        psi[(i, 0)] = c(x[2 * i], x[2 * i + 1]);
    }
    let n = matops::frob(&psi).max(1e-300);
    psi /= c(n, 0.0);
    &psi * psi.adjoint()
}

/// Worst-case distance `g(t) = max_ψ ‖P_{*t}(ψψ* − E_{N*}(ψψ*))‖_Tr` over pure states.
struct WorstCase<'a> {
    f: &'a Functionals,
    search: DecoSearch,
    /// Maximizers found so far, reused as starts at later times.
    pool: Vec<Vec<f64>>,
    flagged: bool,
}

impl<'a> WorstCase<'a> {
    fn new(f: &'a Functionals, search: DecoSearch) -> Self {
        let d = f.dim();
        let mut rng = sampling::rng(search.seed);
        let mut pool: Vec<Vec<f64>> = (0..search.starts)
            .map(|_| {
                let g = sampling::ginibre(d, 1, &mut rng);
                g.iter().flat_map(|z| [z.re, z.im]).collect()
            })
            .collect();
        let uniform: Vec<f64> = (0..d).flat_map(|_| [1.0, 0.0]).collect();
        pool.push(uniform);
        Self { f, search, pool, flagged: false }
    }

    fn eval(&mut self, t: f64) -> Result<f64> {
        let s = self.f.analysis.ctx.schrodinger.exp(t)?;
        let f = self.f;
        let map = |x: &[f64]| {
            let rho = pure_state(x);
            matops::trace_norm(&matops::hermitian_part(&s.apply(&(&rho - f.e_n_star(&rho)))))
        };
        let nm = NelderMead { max_iter: self.search.iterations, step: 0.3, ftol: 1e-10 };
        let results: Vec<(f64, Vec<f64>, bool)> = self
            .pool
            .par_iter()
            .map(|x0| {
                let m = nm.minimize(|x| -map(x), x0);
                (-m.value, m.x, m.converged)
            })
            .collect();
        let mut best = 0.0f64;
        let mut any_converged = false;
        for (k, (v, x, conv)) in results.into_iter().enumerate() {
            any_converged |= conv;
            best = best.max(v);
            self.pool[k] = x;
        }
        self.flagged |= !any_converged;
        Ok(best)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::RejectedInput(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Bisection for `τ_deco(ε)` using the pure-state worst case, with bound times.
pub fn decoherence_time(f: &Functionals, epsilon: f64, lambda: f64, alpha: f64, search: DecoSearch) -> Result<DecoTimeResult> {
    check_epsilon(epsilon)?;
    if !(lambda > 0.0) {
        return Err(Error::RejectedInput("decoherence time needs a positive gap".into()));
    }
    let sigma_min = f.sigma_tr.min_eigenvalue();
    let mut wc = WorstCase::new(f, search);
    let g0 = wc.eval(0.0)?;
    let tau_empirical = if g0 <= epsilon {
        0.0
    } else {
        let mut lo = 0.0;
        let mut hi = 1.0 / lambda;
        let mut steps = 0;
        while wc.eval(hi)? > epsilon {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 60 {
                return Err(Error::BudgetExhausted("no time found at which the worst case drops below epsilon".into()));
            }
        }
        let tol = 1e-3 / lambda;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if wc.eval(mid)? > epsilon {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    Ok(DecoTimeResult {
        dim: f.dim(),
        epsilon,
        tau_empirical,
        tau_pi_bound: tau_pi_bound(sigma_min, lambda, epsilon),
        tau_mlsi_bound: tau_mlsi_bound(sigma_min, alpha, epsilon),
        sigma_min,
        lambda,
        alpha,
        g0,
        flagged: wc.flagged,
    })
}

/// Closed form for the dephasing model in dimension `d`: `λ = γ`, `α = γ/2`,
/// `σ_min = 1/d`, worst case `g(t) = 2(1 − 1/d) e^{−γt}`.
pub fn deco_decoherence_time(d: usize, gamma: f64, epsilon: f64) -> Result<DecoTimeResult> {
    if d < 2 || !(gamma > 0.0) {
        return Err(Error::RejectedInput("dephasing model needs d >= 2 and gamma > 0".into()));
    }
    check_epsilon(epsilon)?;
    let sigma_min = 1.0 / d as f64;
    let g0 = 2.0 * (1.0 - sigma_min);
    let alpha = gamma / 2.0;
    Ok(DecoTimeResult {
        dim: d,
        epsilon,
        tau_empirical: ((g0 / epsilon).ln() / gamma).max(0.0),
        tau_pi_bound: tau_pi_bound(sigma_min, gamma, epsilon),
        tau_mlsi_bound: tau_mlsi_bound(sigma_min, alpha, epsilon),
        sigma_min,
        lambda: gamma,
        alpha,
        g0,
        flagged: false,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceDecay {
    /// Largest `Var_N(P_t X) / (e^{−2λt} Var_N(X))` seen.
    pub max_ratio: f64,
    pub violations: usize,
    pub witness: Option<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyDecay {
    /// Largest `d/dt log D_N + 2 r_min` seen, where `r_min` is the smallest
    /// ratio `EP/(2 D_N)` along the same trajectory.
    pub max_excess: f64,
    pub violations: usize,
    pub skipped_points: usize,
    pub witness: Option<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayTheoremReport {
    pub variance: VarianceDecay,
    pub entropy: EntropyDecay,
}

impl DecayTheoremReport {
    pub fn passed(&self) -> bool {
        self.variance.violations == 0 && self.entropy.violations == 0
    }
}

/// Relative level below which decayed quantities are indistinguishable from rounding.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Checks `Var_N(P_t X) ≤ e^{−2λt} Var_N(X)` and the per-trajectory entropy decay rate.
pub fn verify_decay_theorems(
    f: &Functionals,
    lambda: f64,
    observables: &[CMatrix],
    states: &[DensityMatrix],
    times: &[f64],
) -> Result<DecayTheoremReport> {
    let props = Propagators::new(f, times)?;
    let mut variance = VarianceDecay { max_ratio: 0.0, violations: 0, witness: None };
    for (i, x) in observables.iter().enumerate() {
        let v0 = f.df_variance(x)?;
        for (k, &t) in times.iter().enumerate() {
            let vt = f.df_variance(&props.evolve_observable(k, x))?;
            let bound = (-2.0 * lambda * t).exp() * v0;
            // Once the bound drops below rounding level only an absolute floor is meaningful.
            let floor = ROUNDOFF_FLOOR * v0.max(1e-300);
            let ok = vt <= bound * (1.0 + 1e-6) + floor;
            if bound > 1e-6 * v0 {
                variance.max_ratio = variance.max_ratio.max(vt / bound);
            }
            if !ok {
                variance.violations += 1;
                variance.witness.get_or_insert((i, t));
            }
        }
    }

    let h = 1e-3 / lambda;
    let gen = &f.analysis.ctx.schrodinger.mat;
    let forward = Superoperator::from_matrix(f.dim(), (gen * c(h, 0.0)).exp());
    let backward = Superoperator::from_matrix(f.dim(), (gen * c(-h, 0.0)).exp());
    let mut entropy = EntropyDecay { max_excess: f64::NEG_INFINITY, violations: 0, skipped_points: 0, witness: None };
    for (i, rho) in states.iter().enumerate() {
        let mut points = Vec::with_capacity(times.len());
        let mut r_min = f64::INFINITY;
        for k in 0..times.len() {
            let rt = props.evolve_state(k, rho.mat());
            let dn = f.df_entropy(&rt)?;
            if dn < 1e-6 {
                entropy.skipped_points += 1;
                continue;
            }
            r_min = r_min.min(f.entropy_production(&rt)? / (2.0 * dn));
            let up = f.df_entropy(&matops::hermitian_part(&forward.apply(&rt)))?;
            let down = f.df_entropy(&matops::hermitian_part(&backward.apply(&rt)))?;
            points.push((times[k], (up.ln() - down.ln()) / (2.0 * h)));
        }
        for (t, deriv) in points {
            let excess = deriv + 2.0 * r_min;
            entropy.max_excess = entropy.max_excess.max(excess);
            if excess > 1e-6 {
                entropy.violations += 1;
                entropy.witness.get_or_insert((i, t));
            }
        }
    }
    Ok(DecayTheoremReport { variance, entropy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matops::from_real_rows;

    fn deco(d: usize, gamma: f64) -> Functionals {
        Functionals::from_generator(catalog::build_deco(d, gamma).unwrap(), 1).unwrap()
    }

    #[test]
    fn deco_trace_distance_closed_form() {
        let f = deco(2, 1.0);
        let rho = DensityMatrix::new(from_real_rows(&[&[0.5, 0.3], &[0.3, 0.5]])).unwrap();
        let times = linear_grid(3.0, 7);
        let curve = trajectory(&f, &rho, &times).unwrap();
        for (t, v) in times.iter().zip(&curve.trace_dist) {
            assert!((v - 0.6 * (-t).exp()).abs() < 1e-9);
        }
        assert!((curve.df_entropy[0] - f.df_entropy(rho.mat()).unwrap()).abs() == 0.0);
        let still = trajectory(&f, &f.sigma_tr, &times).unwrap();
        assert!(still.trace_dist.iter().all(|&v| v < 1e-14));
    }

    #[test]
    fn grid_validation() {
        let f = deco(2, 1.0);
        assert!(trajectory(&f, &f.sigma_tr, &[1.0, 0.5]).is_err());
        assert!(trajectory(&f, &f.sigma_tr, &[-1.0]).is_err());
    }

    #[test]
    fn bound_curves_qubit() {
        let b = bound_curves(0.5, 1.0, 0.5, &[0.0, 1.0]);
        assert!((b.pi[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((b.mlsi[0] - (2.0 * 2f64.ln()).sqrt()).abs() < 1e-15);
        assert!((b.pi[1] - 2f64.sqrt() * (-1f64).exp()).abs() < 1e-15);
        let t = b.crossing_time.unwrap();
        let at = bound_curves(0.5, 1.0, 0.5, &[t]);
        assert!((at.pi[0] - at.mlsi[0]).abs() < 1e-12);
    }

    #[test]
    fn deco_worst_case_matches_closed_form() {
        for d in [2, 3] {
            let f = deco(d, 1.0);
            let numeric = decoherence_time(&f, 0.05, 1.0, 0.5, DecoSearch { starts: 4, iterations: 400, seed: 2 }).unwrap();
            let closed = deco_decoherence_time(d, 1.0, 0.05).unwrap();
            assert!((numeric.g0 - closed.g0).abs() < 1e-5, "{} vs {}", numeric.g0, closed.g0);
            assert!((numeric.tau_empirical - closed.tau_empirical).abs() < 2e-3);
            assert!(numeric.tau_empirical <= numeric.tau_pi_bound + 1e-3);
        }
    }

    #[test]
    fn epsilon_above_worst_case_gives_zero() {
        let closed = deco_decoherence_time(2, 1.0, 1.0).unwrap();
        assert_eq!(closed.tau_empirical, 0.0);
        assert!(deco_decoherence_time(2, 1.0, 0.0).is_err());
        let f = deco(2, 1.0);
        let numeric = decoherence_time(&f, 1.5, 1.0, 0.5, DecoSearch::default()).unwrap();
        assert_eq!(numeric.tau_empirical, 0.0);
    }

    #[test]
    fn deco_variance_decay_equality() {
        let f = deco(3, 1.5);
        let mut rng = sampling::rng(4);
        let xs: Vec<CMatrix> = (0..3).map(|_| sampling::random_hermitian(3, &mut rng)).collect();
        let rhos: Vec<DensityMatrix> = (0..3).map(|_| sampling::random_state(3, &mut rng)).collect();
        let times = log_grid(1e-3 / 1.5, 5.0 / 1.5, 16);
        let report = verify_decay_theorems(&f, 1.5, &xs, &rhos, &times).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!((report.variance.max_ratio - 1.0).abs() < 1e-8);
    }
}
