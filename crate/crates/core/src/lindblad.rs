//! GKSL generators, their superoperator matrices, semigroups, invariant
//! states and detailed-balance tests.

mod superop;

pub use superop::Superoperator;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{
    self, commutator, frob, identity, CMatrix, DensityMatrix, InnerKind, WeightedInner,
};
use crate::tolerances::NumericPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// Hamiltonian plus jump operators.
///
/// Heisenberg form: `L(X) = i[H,X] + Σ_k (L_k* X L_k − ½{L_k* L_k, X})`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lindbladian {
    pub dim: usize,
    #[serde(with = "matops::serde_rows")]
    pub hamiltonian: CMatrix,
    #[serde(with = "matops::serde_rows::many")]
    pub jumps: Vec<CMatrix>,
}

impl Lindbladian {
    pub fn new(hamiltonian: CMatrix, jumps: Vec<CMatrix>) -> Result<Self> {
        let dim = hamiltonian.nrows();
        if dim == 0 || !hamiltonian.is_square() {
            return Err(Error::RejectedInput("Hamiltonian must be a non-empty square matrix".into()));
        }
        if !matops::is_hermitian(&hamiltonian, &NumericPolicy::default()) {
            return Err(Error::RejectedInput(format!(
                "Hamiltonian is not Hermitian (defect {:e})",
                matops::hermitian_defect(&hamiltonian)
            )));
        }
        for (k, l) in jumps.iter().enumerate() {
            if l.shape() != (dim, dim) {
                return Err(Error::RejectedInput(format!("jump {k} has shape {:?}, expected {dim}x{dim}", l.shape())));
            }
        }
        if hamiltonian.iter().chain(jumps.iter().flat_map(|l| l.iter())).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::RejectedInput("non-finite matrix entry".into()));
        }
        Ok(Self { dim, hamiltonian: matops::hermitian_part(&hamiltonian), jumps })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, hamiltonian: matops::zeros(dim), jumps: Vec::new() }
    }

    /// Generator multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let s = C64::new(c.sqrt(), 0.0);
        Self {
            dim: self.dim,
            hamiltonian: &self.hamiltonian * C64::new(c, 0.0),
            jumps: self.jumps.iter().map(|l| l * s).collect(),
        }
    }

    fn check(&self, x: &CMatrix) -> Result<()> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::RejectedInput(format!("operand has shape {:?}, expected {}x{}", x.shape(), self.dim, self.dim)));
        }
        Ok(())
    }

    pub fn apply_generator(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check(x)?;
        let mut out = commutator(&self.hamiltonian, x) * C64::new(0.0, 1.0);
        for l in &self.jumps {
            let ld = l.adjoint();
            let m = &ld * l;
            out += &ld * x * l - (&m * x + x * &m) * C64::new(0.5, 0.0);
        }
        Ok(out)
    }

    pub fn apply_predual(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check(rho)?;
        let mut out = commutator(&self.hamiltonian, rho) * C64::new(0.0, -1.0);
        for l in &self.jumps {
            let ld = l.adjoint();
            let m = &ld * l;
            out += l * rho * &ld - (&m * rho + rho * &m) * C64::new(0.5, 0.0);
        }
        Ok(out)
    }

    pub fn to_superoperator(&self, which: Picture) -> Superoperator {
        let d = self.dim;
        let id = identity(d);
        let sign = match which {
            Picture::Heisenberg => 1.0,
            Picture::Schrodinger => -1.0,
        };
        let ham = matops::kron(&id, &self.hamiltonian) - matops::kron(&self.hamiltonian.transpose(), &id);
        let mut mat = ham * C64::new(0.0, sign);
        for l in &self.jumps {
            let m = l.adjoint() * l;
            let sandwich = match which {
                Picture::Heisenberg => matops::kron(&l.transpose(), &l.adjoint()),
                Picture::Schrodinger => matops::kron(&l.conjugate(), l),
            };
            mat += sandwich - (matops::kron(&id, &m) + matops::kron(&m.transpose(), &id)) * C64::new(0.5, 0.0);
        }
        Superoperator::from_matrix(d, mat)
    }

    /// `P_t = exp(t L)` in the chosen picture.
    pub fn semigroup(&self, t: f64, which: Picture) -> Result<Superoperator> {
        self.to_superoperator(which).exp(t)
    }

    /// Hamiltonian part `i[H,·]` alone in the Heisenberg picture.
    pub fn hamiltonian_superoperator(&self) -> Superoperator {
        Lindbladian { dim: self.dim, hamiltonian: self.hamiltonian.clone(), jumps: Vec::new() }
            .to_superoperator(Picture::Heisenberg)
    }
}

/// Kernel of `L_*` and the faithful invariant state chosen from it.
#[derive(Debug, Clone)]
pub struct InvariantStates {
    /// Hilbert–Schmidt orthonormal basis of `Ker L_*`.
    pub basis: Vec<CMatrix>,
    pub faithful_pick: DensityMatrix,
}

/// Ergodic projection of `I/d` onto `Ker L_*` along `Ran L_*`.
pub fn invariant_states(gen: &Lindbladian) -> Result<InvariantStates> {
    invariant_states_with(gen, &NumericPolicy::default())
}

pub fn invariant_states_with(gen: &Lindbladian, policy: &NumericPolicy) -> Result<InvariantStates> {
    let d = gen.dim;
    let s = gen.to_superoperator(Picture::Schrodinger);
    let scale = matops::spectral_norm(&s.mat);
    let tol = policy.kernel_rel * scale.max(f64::MIN_POSITIVE);
    let right = matops::null_space(&s.mat, tol);
    let left = matops::null_space(&s.mat.adjoint(), tol);
    if right.ncols() == 0 || left.ncols() != right.ncols() {
        return Err(Error::NoInvariantState(format!(
            "kernel dimensions {} (right) and {} (left) are inconsistent",
            right.ncols(),
            left.ncols()
        )));
    }
    let overlap = left.adjoint() * &right;
    let inv = overlap
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NoInvariantState("kernel and cokernel are not in duality".into()))?;
    let mixed = matops::vec(&(identity(d) / C64::new(d as f64, 0.0)));
    let proj = &right * (inv * (left.adjoint() * mixed));
    let rho = matops::unvec(&proj, d);
    let tr = matops::trace(&rho).re;
    if tr.abs() < 1e-12 {
        return Err(Error::NoInvariantState("ergodic projection of I/d has zero trace".into()));
    }
    let h = matops::hermitian_part(&rho) / C64::new(tr, 0.0);
    let spec = matops::spectrum(&h);
    if spec.min() < -policy.psd_slack.max(1e-10) {
        return Err(Error::NoInvariantState(format!("projected state has eigenvalue {:e}", spec.min())));
    }
    if spec.min() <= policy.faithful {
        return Err(Error::NoFaithfulInvariantState { min_eigenvalue: spec.min() });
    }
    let faithful_pick = DensityMatrix::normalized(&h)?;
    let basis = (0..right.ncols())
        .map(|k| matops::unvec(&right.column(k).into_owned(), d))
        .collect();
    Ok(InvariantStates { basis, faithful_pick })
}

/// Adjoint of `s` for the inner product `w`: `⟨X, S Y⟩_w = ⟨Ŝ X, Y⟩_w`.
pub fn adjoint_wrt(s: &Superoperator, w: &WeightedInner) -> Result<Superoperator> {
    if !w.sigma.faithful {
        return Err(Error::Domain { what: "adjoint needs a faithful weight".into(), eigenvalue: w.sigma.min_eigenvalue() });
    }
    if s.dim != w.dim() {
        return Err(Error::RejectedInput("weight and superoperator dimensions differ".into()));
    }
    let g = w.metric_power(1.0);
    let g_inv = w.metric_power(-1.0);
    Ok(Superoperator::from_matrix(s.dim, g_inv * s.mat.adjoint() * g))
}

/// Generator together with its invariant states and detailed-balance flags.
#[derive(Debug, Clone)]
pub struct QmsContext {
    pub gen: Lindbladian,
    pub sigma_inv: DensityMatrix,
    pub sigma_tr: Option<DensityMatrix>,
    pub reversible: bool,
    pub dbc: bool,
    pub heisenberg: Superoperator,
    pub schrodinger: Superoperator,
    pub kernel_dim: usize,
    pub policy: NumericPolicy,
}

impl QmsContext {
    pub fn new(gen: Lindbladian) -> Result<Self> {
        Self::with_policy(gen, NumericPolicy::default())
    }

    pub fn with_policy(gen: Lindbladian, policy: NumericPolicy) -> Result<Self> {
        let inv = invariant_states_with(&gen, &policy)?;
        let heisenberg = gen.to_superoperator(Picture::Heisenberg);
        let schrodinger = gen.to_superoperator(Picture::Schrodinger);
        let residual = frob(&schrodinger.apply(inv.faithful_pick.mat()));
        if residual > 1e-9 {
            return Err(Error::NoInvariantState(format!("picked state has residual {residual:e}")));
        }
        Ok(Self {
            gen,
            sigma_inv: inv.faithful_pick,
            sigma_tr: None,
            reversible: false,
            dbc: false,
            heisenberg,
            schrodinger,
            kernel_dim: inv.basis.len(),
            policy,
        })
    }

    pub fn dim(&self) -> usize {
        self.gen.dim
    }

    /// Installs the reference state and evaluates the reversibility flags.
    pub fn set_sigma_tr(&mut self, sigma_tr: DensityMatrix) -> Result<()> {
        let residual = frob(&self.schrodinger.apply(sigma_tr.mat()));
        if residual > 1e-9 {
            return Err(Error::Structural(format!("reference state is not invariant (residual {residual:e})")));
        }
        self.sigma_tr = Some(sigma_tr);
        self.reversible = check_reversible(self)?;
        self.dbc = check_dbc(self)?;
        if self.dbc && !self.reversible {
            return Err(Error::Structural("GNS symmetry detected without KMS symmetry".into()));
        }
        Ok(())
    }

    pub fn sigma_tr(&self) -> Result<&DensityMatrix> {
        self.sigma_tr.as_ref().ok_or_else(|| Error::Structural("reference state not computed".into()))
    }

    pub fn kms(&self) -> Result<WeightedInner> {
        Ok(WeightedInner::kms(self.sigma_tr()?.clone()))
    }
}

fn symmetric_under(ctx: &QmsContext, kind: InnerKind) -> Result<bool> {
    let w = WeightedInner::new(ctx.sigma_tr()?.clone(), kind);
    let adj = adjoint_wrt(&ctx.heisenberg, &w)?;
    let scale = frob(&ctx.heisenberg.mat).max(1e-300);
    Ok(frob(&(&adj.mat - &ctx.heisenberg.mat)) <= ctx.policy.equality * scale)
}

/// KMS self-adjointness with respect to `σ_Tr`.
pub fn check_reversible(ctx: &QmsContext) -> Result<bool> {
    symmetric_under(ctx, InnerKind::Kms)
}

/// GNS self-adjointness with respect to `σ_Tr`.
pub fn check_dbc(ctx: &QmsContext) -> Result<bool> {
    symmetric_under(ctx, InnerKind::Gns)
}

/// Jump operator `V` with `σ_Tr V = e^ω V σ_Tr`.
#[derive(Debug, Clone)]
pub struct ModularJump {
    pub op: CMatrix,
    pub omega: f64,
}

/// Matrix of the form `(X, Y) ↦ Σ_j ⟨[V_j, X], [V_j, Y]⟩_σ` on vectorized operators.
pub fn derivation_form(jumps: &[ModularJump], w: &WeightedInner) -> CMatrix {
    let d = w.dim();
    let g = w.metric();
    let mut out = CMatrix::zeros(d * d, d * d);
    for j in jumps {
        let dv = derivation_matrix(&j.op);
        out += dv.adjoint() * &g * dv;
    }
    out
}

/// Matrix of `X ↦ [V, X]`.
fn derivation_matrix(v: &CMatrix) -> CMatrix {
    let id = identity(v.nrows());
    matops::kron(&id, v) - matops::kron(&v.transpose(), &id)
}

/// Matrix of the Dirichlet form `(X, Y) ↦ −⟨X, L(Y)⟩_σ`.
pub fn dirichlet_matrix(heisenberg: &Superoperator, w: &WeightedInner) -> CMatrix {
    -(w.metric() * &heisenberg.mat)
}

/// Writes the Dirichlet form of a σ_Tr-DBC generator as a sum of squared
/// derivations `[V_j, ·]` with modular eigenvectors `V_j`.
pub fn dbc_jump_decomposition(ctx: &QmsContext) -> Result<Vec<ModularJump>> {
    if !ctx.dbc {
        return Err(Error::Unsupported("generator does not satisfy detailed balance for σ_Tr".into()));
    }
    let sigma = ctx.sigma_tr()?;
    let d = ctx.dim();
    let spec = sigma.spectrum();
    let u = &spec.vectors;
    let s = &spec.values;
    let w = ctx.kms()?;
    let target = dirichlet_matrix(&ctx.heisenberg, &w);

    // Kossakowski matrix of the traceless jumps in the eigenbasis of σ_Tr.
    let n = d * d;
    let mut kos = CMatrix::zeros(n, n);
    let id = identity(d);
    for l in &ctx.gen.jumps {
        let rotated = u.adjoint() * l * u;
        let tr = matops::trace(&rotated) / C64::new(d as f64, 0.0);
        let traceless = rotated - &id * tr;
        let coords = matops::vec(&traceless);
        kos += &coords * coords.adjoint();
    }

    // Group matrix units |a⟩⟨b| by Bohr frequency log(s_a / s_b).
    let omega_of = |idx: usize| {
        let (a, b) = (idx % d, idx / d);
        (s[a] / s[b]).ln()
    };
    let mut freqs: Vec<f64> = Vec::new();
    let mut group = vec![0usize; n];
    for idx in 0..n {
        let om = omega_of(idx);
        match freqs.iter().position(|f| (f - om).abs() <= ctx.policy.cluster) {
            Some(p) => group[idx] = p,
            None => {
                group[idx] = freqs.len();
                freqs.push(om);
            }
        }
    }

    let mut candidates: Vec<ModularJump> = Vec::new();
    for (gi, &om) in freqs.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == gi).collect();
        let block = CMatrix::from_fn(members.len(), members.len(), |r, c| kos[(members[r], members[c])]);
        let bs = matops::spectrum(&block);
        let floor = 1e-12 * bs.max().abs().max(1e-300);
        for (k, &mu) in bs.values.iter().enumerate() {
            if mu <= floor {
                continue;
            }
            let mut op = CMatrix::zeros(d, d);
            for (r, &idx) in members.iter().enumerate() {
                op[(idx % d, idx / d)] = bs.vectors[(r, k)];
            }
            let op = u * op * u.adjoint();
            candidates.push(ModularJump { op: op.adjoint(), omega: -om });
            candidates.push(ModularJump { op, omega: om });
        }
    }
    if candidates.is_empty() {
        return if frob(&target) <= 1e-12 { Ok(Vec::new()) } else { Err(Error::Structural("no dissipative jumps".into())) };
    }

    // Nonnegative weights by least squares on the real-linear system.
    let forms: Vec<CMatrix> = candidates
        .iter()
        .map(|c| derivation_form(std::slice::from_ref(c), &w))
        .collect();
    let m = forms.len();
    let to_real = |a: &CMatrix| -> Vec<f64> { a.iter().flat_map(|z| [z.re, z.im]).collect() };
    let rows = 2 * n * n;
    let mut design = nalgebra::DMatrix::<f64>::zeros(rows, m);
    for (k, f) in forms.iter().enumerate() {
        for (r, v) in to_real(f).into_iter().enumerate() {
            design[(r, k)] = v;
        }
    }
    let rhs = nalgebra::DVector::from_vec(to_real(&target));
    let weights = nonneg_least_squares(&design, &rhs);

    let jumps: Vec<ModularJump> = candidates
        .into_iter()
        .zip(weights.iter())
        .filter(|(_, &wk)| wk > 1e-14)
        .map(|(c, &wk)| ModularJump { op: c.op * C64::new(wk.sqrt(), 0.0), omega: c.omega })
        .collect();
    let residual = frob(&(derivation_form(&jumps, &w) - &target));
    if residual > 1e-7 * frob(&target).max(1.0) {
        return Err(Error::Structural(format!("derivation decomposition residual {residual:e}")));
    }
    Ok(jumps)
}

/// Lawson–Hanson active-set solver for `min ‖A x − b‖` subject to `x ≥ 0`.
fn nonneg_least_squares(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DVector<f64>) -> Vec<f64> {
    let n = a.ncols();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    for _ in 0..3 * n + 10 {
        let xv = nalgebra::DVector::from_vec(x.clone());
        let grad = a.transpose() * (b - a * &xv);
        let pick = (0..n).filter(|&j| !passive[j]).max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        match pick {
            Some(j) if grad[j] > tol => passive[j] = true,
            _ => break,
        }
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = nalgebra::DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let z = match sub.clone().svd(true, true).solve(b, 1e-13) {
                Ok(z) => z,
                Err(_) => return x,
            };
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            let mut step = 1.0f64;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[j] - z[k];
                    if denom > 0.0 {
                        step = step.min(x[j] / denom);
                    }
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += step * (z[k] - x[j]);
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}
