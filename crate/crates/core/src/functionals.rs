//! Variances, entropies, Dirichlet forms, entropy and information production,
//! and the regularity margins built from them.
//!
//! All weighted quantities use the KMS inner product of `σ_Tr`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dfstructure::{self, DfAnalysis};
use crate::error::{Error, Result};
use crate::lindblad::{self, Lindbladian, Picture, Superoperator};
use crate::matops::{self, c, frob, hs_inner, CMatrix, DensityMatrix, HermitianSpectrum, MatFn, WeightedInner};

/// Eigenvalues of states below this are raised to it before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-14;

fn log_floored(spec: &HermitianSpectrum) -> (CMatrix, bool) {
    let floored = spec.values.iter().any(|&x| x < LOG_FLOOR);
    (spec.apply(|x| x.max(LOG_FLOOR).ln()), floored)
}

fn check_state(rho: &CMatrix) -> Result<HermitianSpectrum> {
    if !rho.is_square() {
        return Err(Error::RejectedInput("state must be square".into()));
    }
    let defect = matops::hermitian_defect(rho);
    if defect > 1e-9 {
        return Err(Error::RejectedInput(format!("state is not Hermitian (defect {defect:e})")));
    }
    let tr = matops::trace(rho).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::RejectedInput(format!("state has trace {tr}")));
    }
    let spec = matops::spectrum(rho);
    if spec.min() < -1e-10 {
        return Err(Error::RejectedInput(format!("state has eigenvalue {:e}", spec.min())));
    }
    Ok(spec)
}

/// Relative entropy together with a flag telling whether the log floor was hit.
pub fn relative_entropy_flagged(rho: &CMatrix, sigma: &CMatrix) -> Result<(f64, bool)> {
    let sr = check_state(rho)?;
    let ss = check_state(sigma)?;
    if rho.shape() != sigma.shape() {
        return Err(Error::RejectedInput("states have different dimensions".into()));
    }
    let ent: f64 = sr.values.iter().map(|&x| MatFn::XLogX.eval(x)).sum();
    let (log_s, floored) = log_floored(&ss);
    let cross = hs_inner(rho, &log_s).re;
    Ok((ent - cross, floored))
}

/// `D(ρ‖σ) = Tr[ρ(log ρ − log σ)]`.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    relative_entropy_flagged(rho, sigma).map(|r| r.0)
}

/// `S(ρ) = −Tr[ρ log ρ]`.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let s = check_state(rho)?;
    Ok(-s.values.iter().map(|&x| MatFn::XLogX.eval(x)).sum::<f64>())
}

/// `S(ρ_A) + S(ρ_B) − S(ρ)`.
pub fn mutual_information(rho: &CMatrix, split: (usize, usize)) -> Result<f64> {
    let (da, db) = split;
    if rho.nrows() != da * db {
        return Err(Error::RejectedInput(format!("state of size {} does not split as {da}x{db}", rho.nrows())));
    }
    let ra = matops::partial_trace_b(rho, da, db);
    let rb = matops::partial_trace_a(rho, da, db);
    Ok(von_neumann_entropy(&ra)? + von_neumann_entropy(&rb)? - von_neumann_entropy(rho)?)
}

/// `D(ρ‖ρ_A ⊗ ρ_B)`, the same quantity computed the other way.
pub fn mutual_information_relative(rho: &CMatrix, split: (usize, usize)) -> Result<f64> {
    let (da, db) = split;
    let ra = matops::partial_trace_b(rho, da, db);
    let rb = matops::partial_trace_a(rho, da, db);
    relative_entropy(rho, &matops::kron(&ra, &rb))
}

/// `Tr[(ρ − η) σ^{-1/2} (ρ − η) σ^{-1/2}]`.
pub fn chi2_weighted(rho: &CMatrix, eta: &CMatrix, sigma: &DensityMatrix) -> f64 {
    let s = sigma.power(-0.5);
    let diff = rho - eta;
    hs_inner(&diff, &(&s * &diff * &s)).re
}

/// `χ²(ρ, σ)`, the weighted form with `η = σ`.
pub fn chi2(rho: &CMatrix, sigma: &DensityMatrix) -> f64 {
    chi2_weighted(rho, sigma.mat(), sigma)
}

/// Per-sample margins of one inequality; negative margins below `threshold` are violations.
#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub violations: usize,
    pub threshold: f64,
}

impl MarginReport {
    pub fn new(margins: Vec<f64>, threshold: f64) -> Self {
        let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let violations = margins.iter().filter(|&&m| m < threshold).count();
        Self { margins, min_margin, violations, threshold }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Report {
    /// `EP − 2 E(σ^{-1/4} ρ^{1/2} σ^{-1/4})`.
    pub standard: MarginReport,
    /// `EP − 4 E(σ^{-1/4} ρ^{1/2} σ^{-1/4})`.
    pub detailed_balance: MarginReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpReport {
    pub p: f64,
    pub strong: MarginReport,
    /// Evaluated without a pass/fail claim.
    pub weak: MarginReport,
}

/// Inner generator context of a bipartite model `i[H_A⊗I,·] + I⊗L_B`.
#[derive(Debug, Clone)]
pub struct BipartiteParts {
    pub d_a: usize,
    pub d_b: usize,
    pub inner: Lindbladian,
    pub tau: DensityMatrix,
    inner_schrodinger: Superoperator,
}

/// Functionals of a fully analyzed generator.
#[derive(Debug, Clone)]
pub struct Functionals {
    pub analysis: DfAnalysis,
    pub sigma_tr: DensityMatrix,
    pub kms: WeightedInner,
    pub bipartite: Option<BipartiteParts>,
    sqrt: CMatrix,
    inv_sqrt: CMatrix,
    log_sigma: CMatrix,
}

impl Functionals {
    pub fn new(analysis: DfAnalysis) -> Result<Self> {
        let sigma_tr = analysis.ctx.sigma_tr()?.clone();
        if !sigma_tr.faithful {
            return Err(Error::Domain { what: "σ_Tr must be faithful".into(), eigenvalue: sigma_tr.min_eigenvalue() });
        }
        Ok(Self {
            kms: WeightedInner::kms(sigma_tr.clone()),
            sqrt: sigma_tr.power(0.5),
            inv_sqrt: sigma_tr.power(-0.5),
            log_sigma: sigma_tr.log(),
            sigma_tr,
            analysis,
            bipartite: None,
        })
    }

    pub fn from_generator(gen: Lindbladian, seed: u64) -> Result<Self> {
        Self::new(dfstructure::analyze(gen, seed)?)
    }

    /// Attaches the inner generator of a bipartite split `C^{d_a} ⊗ C^{d_b}`.
    pub fn with_bipartite(mut self, d_a: usize, inner: Lindbladian) -> Result<Self> {
        let d_b = inner.dim;
        if d_a * d_b != self.dim() {
            return Err(Error::RejectedInput(format!("split {d_a}x{d_b} does not match dimension {}", self.dim())));
        }
        let tau = lindblad::invariant_states(&inner)?.faithful_pick;
        let inner_schrodinger = inner.to_superoperator(Picture::Schrodinger);
        self.bipartite = Some(BipartiteParts { d_a, d_b, inner, tau, inner_schrodinger });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.analysis.ctx.dim()
    }

    pub fn generator(&self, x: &CMatrix) -> CMatrix {
        self.analysis.ctx.heisenberg.apply(x)
    }

    pub fn predual(&self, rho: &CMatrix) -> CMatrix {
        self.analysis.ctx.schrodinger.apply(rho)
    }

    pub fn e_n(&self, x: &CMatrix) -> CMatrix {
        self.analysis.expectation.apply(x)
    }

    pub fn e_n_star(&self, rho: &CMatrix) -> CMatrix {
        self.analysis.expectation.apply_predual(rho)
    }

    pub fn sigma_sqrt(&self) -> &CMatrix {
        &self.sqrt
    }

    pub fn sigma_inv_sqrt(&self) -> &CMatrix {
        &self.inv_sqrt
    }

    /// `σ^{1/2} X σ^{1/2}`.
    pub fn gamma(&self, x: &CMatrix) -> CMatrix {
        &self.sqrt * x * &self.sqrt
    }

    /// `σ^{-1/2} ρ σ^{-1/2}`.
    pub fn gamma_inv(&self, rho: &CMatrix) -> CMatrix {
        &self.inv_sqrt * rho * &self.inv_sqrt
    }

    fn check_dim(&self, x: &CMatrix) -> Result<()> {
        if x.shape() != (self.dim(), self.dim()) {
            return Err(Error::RejectedInput(format!("operand has shape {:?}, expected dimension {}", x.shape(), self.dim())));
        }
        Ok(())
    }

    /// `‖X − Tr[σ_Tr X] I‖²_{σ_Tr}`.
    pub fn variance_sigma(&self, x: &CMatrix) -> Result<f64> {
        self.check_dim(x)?;
        let mean = hs_inner(self.sigma_tr.mat(), x);
        let centered = x - matops::identity(self.dim()) * mean;
        Ok(self.kms.norm_sqr(&centered))
    }

    /// `‖X − E_N(X)‖²_{σ_Tr}`.
    pub fn df_variance(&self, x: &CMatrix) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.kms.norm_sqr(&(x - self.e_n(x))))
    }

    /// `−⟨X, L(Y)⟩_{σ_Tr}`.
    pub fn dirichlet_form(&self, x: &CMatrix, y: &CMatrix) -> Result<C64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(-self.kms.inner_unchecked(x, &self.generator(y)))
    }

    /// `E_L(X) = −⟨X, L(X)⟩_{σ_Tr}`.
    pub fn dirichlet(&self, x: &CMatrix) -> Result<f64> {
        self.dirichlet_form(x, x).map(|z| z.re)
    }

    /// p-Dirichlet form of a positive definite `X`, with the closed-form `p = 1` branch.
    pub fn p_dirichlet(&self, x: &CMatrix, p: f64) -> Result<f64> {
        self.check_dim(x)?;
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::RejectedInput(format!("p-Dirichlet form needs p >= 1, got {p}")));
        }
        let spec = matops::eig_hermitian_with(x, &self.analysis.ctx.policy)?;
        if spec.min() <= matops::POSITIVE_DEFINITE_FLOOR {
            return Err(Error::Domain { what: "p-Dirichlet form of a non positive definite operator".into(), eigenvalue: spec.min() });
        }
        let lx = self.generator(x);
        if p == 1.0 {
            let inner = self.gamma(x);
            let log_inner = matops::spectrum(&inner).apply(|v| v.max(LOG_FLOOR).ln());
            let val = hs_inner(&self.gamma(&lx).adjoint(), &(log_inner - &self.log_sigma));
            return Ok(-0.5 * val.re);
        }
        let q = p / (p - 1.0);
        let ip = self.i_power(x, q, p);
        Ok(-(p / (2.0 * (p - 1.0))) * self.kms.inner_unchecked(&ip, &lx).re)
    }

    /// `I_{q,p}(X) = σ^{-1/2q} (σ^{1/2p} X σ^{1/2p})^{p/q} σ^{-1/2q}` for positive `X`.
    pub fn i_power(&self, x: &CMatrix, q: f64, p: f64) -> CMatrix {
        let inner_w = self.sigma_tr.power(1.0 / (2.0 * p));
        let outer_w = self.sigma_tr.power(-1.0 / (2.0 * q));
        let inner = &inner_w * x * &inner_w;
        let powered = matops::spectrum(&inner).apply(|v| v.max(0.0).powf(p / q));
        &outer_w * powered * &outer_w
    }

    /// `EP(ρ) = −Tr[L_*(ρ)(log ρ − log σ_Tr)]`; the flag reports a floored logarithm.
    pub fn entropy_production_flagged(&self, rho: &CMatrix) -> Result<(f64, bool)> {
        self.check_dim(rho)?;
        let spec = check_state(rho)?;
        let (log_rho, floored) = log_floored(&spec);
        let lr = self.predual(rho);
        Ok((-hs_inner(&lr.adjoint(), &(log_rho - &self.log_sigma)).re, floored))
    }

    pub fn entropy_production(&self, rho: &CMatrix) -> Result<f64> {
        self.entropy_production_flagged(rho).map(|r| r.0)
    }

    /// `D_N(ρ) = D(ρ‖E_{N*}(ρ))`.
    pub fn df_entropy(&self, rho: &CMatrix) -> Result<f64> {
        self.check_dim(rho)?;
        let rho_n = matops::hermitian_part(&self.e_n_star(rho));
        relative_entropy(rho, &rho_n)
    }

    pub fn relative_entropy_to_reference(&self, rho: &CMatrix) -> Result<f64> {
        relative_entropy(rho, self.sigma_tr.mat())
    }

    fn parts(&self) -> Result<&BipartiteParts> {
        self.bipartite.as_ref().ok_or_else(|| Error::Unsupported("model has no bipartite split".into()))
    }

    pub fn split(&self) -> Option<(usize, usize)> {
        self.bipartite.as_ref().map(|b| (b.d_a, b.d_b))
    }

    /// `IP(ρ) = −Tr[L_*(ρ)(log ρ − log(ρ_A ⊗ ρ_B))]`.
    pub fn information_production(&self, rho: &CMatrix) -> Result<f64> {
        let parts = self.parts()?;
        let spec = check_state(rho)?;
        let (log_rho, _) = log_floored(&spec);
        let ra = matops::partial_trace_b(rho, parts.d_a, parts.d_b);
        let rb = matops::partial_trace_a(rho, parts.d_a, parts.d_b);
        let (log_prod, _) = log_floored(&matops::spectrum(&matops::kron(&ra, &rb)));
        let lr = self.predual(rho);
        Ok(-hs_inner(&lr.adjoint(), &(log_rho - log_prod)).re)
    }

    /// Entropy production of the inner generator at `ρ_B`, relative to its invariant state.
    pub fn inner_entropy_production(&self, rho_b: &CMatrix) -> Result<f64> {
        let parts = self.parts()?;
        let spec = check_state(rho_b)?;
        let (log_rho, _) = log_floored(&spec);
        let lr = parts.inner_schrodinger.apply(rho_b);
        Ok(-hs_inner(&lr.adjoint(), &(log_rho - parts.tau.log())).re)
    }

    pub fn inner_state(&self) -> Option<&DensityMatrix> {
        self.bipartite.as_ref().map(|b| &b.tau)
    }

    /// Margins `EP(ρ) − k·E(σ^{-1/4} ρ^{1/2} σ^{-1/4})` for `k = 2` and `k = 4`.
    pub fn check_l1_regularity(&self, samples: &[DensityMatrix]) -> Result<L1Report> {
        let quarter = self.sigma_tr.power(-0.25);
        let mut two = Vec::with_capacity(samples.len());
        let mut four = Vec::with_capacity(samples.len());
        for rho in samples {
            let ep = self.entropy_production(rho.mat())?;
            let root = rho.power(0.5);
            let e = self.dirichlet(&(&quarter * root * &quarter))?;
            two.push(ep - 2.0 * e);
            four.push(ep - 4.0 * e);
        }
        Ok(L1Report { standard: MarginReport::new(two, -1e-8), detailed_balance: MarginReport::new(four, -1e-8) })
    }

    /// Strong margins `E_p(X) − (2/p) E_2(I_{2,p}(X))` and the weak variant, per `p`.
    pub fn check_strong_lp_regularity(&self, samples: &[CMatrix], ps: &[f64]) -> Result<Vec<LpReport>> {
        let mut out = Vec::with_capacity(ps.len());
        for &p in ps {
            let mut strong = Vec::with_capacity(samples.len());
            let mut weak = Vec::with_capacity(samples.len());
            for x in samples {
                let ep = self.p_dirichlet(x, p)?;
                let e2 = self.dirichlet(&self.i_power(x, 2.0, p))?;
                strong.push(ep - (2.0 / p) * e2);
                let factor = if p <= 2.0 { 1.0 } else { p - 1.0 };
                weak.push(ep - factor * e2);
            }
            out.push(LpReport { p, strong: MarginReport::new(strong, -1e-8), weak: MarginReport::new(weak, -1e-8) });
        }
        Ok(out)
    }

    /// Second-order coefficients at an invariant `σ ∈ N_*` in the direction
    /// `g = σ_Tr^{1/2} Y σ_Tr^{1/2}`: `(½ Tr[g Θ_σ(g)], −Tr[g L(Θ_σ(g))])`,
    /// the limits of `D(ρ_ε‖σ)/ε²` and `EP(ρ_ε)/ε²` for `ρ_ε = σ + ε g`.
    pub fn perturbative_coefficients(&self, sigma: &DensityMatrix, y: &CMatrix) -> Result<(f64, f64)> {
        self.check_dim(y)?;
        let g = self.gamma(y);
        let theta = matops::theta_map(sigma, &g)?;
        let d2 = 0.5 * hs_inner(&g, &theta).re;
        let ep2 = -hs_inner(&g, &self.generator(&theta)).re;
        Ok((d2, ep2))
    }

    /// Real orthonormal basis of Hermitian operators in `Ker E_N`.
    pub fn hermitian_complement_basis(&self) -> Vec<CMatrix> {
        let d = self.dim();
        let herm = hermitian_unit_basis(d);
        let n = herm.len();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for (k, h) in herm.iter().enumerate() {
            let r = h - self.e_n(h);
            for (j, b) in herm.iter().enumerate() {
                m[(j, k)] = hs_inner(b, &r).re;
            }
        }
        let svd = m.svd(true, false);
        let u = svd.u.expect("requested u");
        let scale = svd.singular_values.max().max(1e-300);
        (0..n)
            .filter(|&k| svd.singular_values[k] > 1e-10 * scale)
            .map(|k| herm.iter().enumerate().fold(CMatrix::zeros(d, d), |acc, (j, b)| acc + b * c(u[(j, k)], 0.0)))
            .collect()
    }

    /// Distance `‖σ_Tr^{1/2} E_N(X) σ_Tr^{1/2} − E_{N*}(σ_Tr^{1/2} X σ_Tr^{1/2})‖_F`.
    pub fn intertwining_defect(&self, x: &CMatrix) -> f64 {
        frob(&(self.gamma(&self.e_n(x)) - self.e_n_star(&self.gamma(x))))
    }
}

/// Orthonormal real basis of `d×d` Hermitian matrices.
pub fn hermitian_unit_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        out.push(matops::unit(d, i, i));
        for j in i + 1..d {
            out.push((matops::unit(d, i, j) + matops::unit(d, j, i)) * c(r, 0.0));
            out.push((matops::unit(d, i, j) * c(0.0, -r)) + matops::unit(d, j, i) * c(0.0, r));
        }
    }
    out
}

/// Second-order Richardson extrapolation of `f(ε)` from `ε, ε/2, ε/4` assuming
/// `f(ε) = a + bε + cε² + …`.
pub fn richardson(f0: f64, f1: f64, f2: f64) -> f64 {
    let r0 = 2.0 * f1 - f0;
    let r1 = 2.0 * f2 - f1;
    (4.0 * r1 - r0) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matops::{from_real_diag, from_real_rows, identity, pauli_z};
    use crate::sampling;

    fn deco(d: usize, gamma: f64) -> Functionals {
        Functionals::from_generator(catalog::build_deco(d, gamma).unwrap(), 1).unwrap()
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = from_real_diag(&[0.8, 0.2]);
        let half = identity(2) * c(0.5, 0.0);
        let d = relative_entropy(&rho, &half).unwrap();
        let expected = 2f64.ln() + 0.8 * 0.8f64.ln() + 0.2 * 0.2f64.ln();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 0.19274).abs() < 1e-5);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-14);
        assert!(relative_entropy(&from_real_diag(&[1.0, 1.0]), &half).is_err());
    }

    #[test]
    fn variance_examples() {
        let f = deco(2, 1.0);
        assert!(f.variance_sigma(&identity(2)).unwrap().abs() < 1e-15);
        assert!((f.variance_sigma(&pauli_z()).unwrap() - 1.0).abs() < 1e-14);
        let shifted = pauli_z() + identity(2) * c(3.0, 0.0);
        assert!((f.variance_sigma(&shifted).unwrap() - 1.0).abs() < 1e-13);
        // σ_z is diagonal, hence in the algebra.
        assert!(f.df_variance(&pauli_z()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn deco_entropy_production_example() {
        let f = deco(2, 1.0);
        let rho = from_real_rows(&[&[0.5, 0.3], &[0.3, 0.5]]);
        let ep = f.entropy_production(&rho).unwrap();
        let rho_n = f.e_n_star(&rho);
        let closed = relative_entropy(&rho, &rho_n).unwrap() + relative_entropy(&rho_n, &rho).unwrap();
        assert!((ep - closed).abs() < 1e-12);
        assert!((ep - 0.41588).abs() < 1e-5, "{ep}");
        assert!(f.entropy_production(f.sigma_tr.mat()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn deco_dirichlet_is_gamma_times_df_variance() {
        let f = deco(3, 2.5);
        let x = sampling::random_hermitian(3, &mut sampling::rng(5));
        assert!((f.dirichlet(&x).unwrap() - 2.5 * f.df_variance(&x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn p_dirichlet_special_cases() {
        let f = deco(2, 1.0);
        let x = sampling::random_hermitian_in(2, 0.2, 2.0, &mut sampling::rng(3));
        let e2 = f.p_dirichlet(&x, 2.0).unwrap();
        assert!((e2 - f.dirichlet(&x).unwrap()).abs() < 1e-12);
        let rho = sampling::random_state(2, &mut sampling::rng(9));
        let xr = f.gamma_inv(rho.mat());
        let e1 = f.p_dirichlet(&xr, 1.0).unwrap();
        assert!((2.0 * e1 - f.entropy_production(rho.mat()).unwrap()).abs() < 1e-12);
        assert!(f.p_dirichlet(&x, 0.5).is_err());
        assert!(matches!(f.p_dirichlet(&from_real_diag(&[1.0, 0.0]), 2.0), Err(Error::Domain { .. })));
        let near = f.p_dirichlet(&x, 1.0 + 1e-4).unwrap();
        let at = f.p_dirichlet(&x, 1.0).unwrap();
        assert!((near - at).abs() <= 1e-2 * at.abs().max(1e-12));
    }

    #[test]
    fn maximally_entangled_mutual_information() {
        let mut psi = CMatrix::zeros(4, 1);
        psi[(0, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[(3, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = &psi * psi.adjoint();
        let i = mutual_information(&rho, (2, 2)).unwrap();
        assert!((i - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((mutual_information_relative(&rho, (2, 2)).unwrap() - i).abs() < 1e-8);
    }

    #[test]
    fn richardson_recovers_quadratic_limit() {
        let f = |e: f64| 1.5 + 0.3 * e - 2.0 * e * e;
        assert!((richardson(f(0.1), f(0.05), f(0.025)) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn complement_basis_dimension() {
        let f = deco(3, 1.0);
        assert_eq!(f.hermitian_complement_basis().len(), 6);
    }
}
