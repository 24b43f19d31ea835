//! Dense complex matrix core.
//!
//! Everything here works on [`CMatrix`], a heap-allocated `nalgebra` matrix of
//! `Complex64`. Vectorization is column-stacking throughout the crate, so that
//! `vec(A B C) = (Cᵀ ⊗ A) vec(B)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::NumericPolicy;

pub type CMatrix = DMatrix<C64>;

/// Minimal eigenvalue required of arguments of domain-restricted spectral functions.
pub const POSITIVE_DEFINITE_FLOOR: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

/// `|i⟩⟨j|` in dimension `d`.
pub fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(d);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn from_real_diag(diag: &[f64]) -> CMatrix {
    let d = diag.len();
    CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn pauli_x() -> CMatrix {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    let mut m = zeros(2);
    m[(0, 1)] = c(0.0, -1.0);
    m[(1, 0)] = c(0.0, 1.0);
    m
}

pub fn pauli_z() -> CMatrix {
    from_real_diag(&[1.0, -1.0])
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn frob(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Hilbert–Schmidt inner product `Tr[A* B]`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// `max_ij |A_ij - conj(A_ji)|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &CMatrix, policy: &NumericPolicy) -> bool {
    hermitian_defect(a) <= policy.hermitian * frob(a).max(1.0)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec(a: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// `Tr_B` of an operator on `C^{d_a} ⊗ C^{d_b}`.
pub fn partial_trace_b(rho: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    CMatrix::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| rho[(i * d_b + k, j * d_b + k)]).sum())
}

/// `Tr_A` of an operator on `C^{d_a} ⊗ C^{d_b}`.
pub fn partial_trace_a(rho: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    CMatrix::from_fn(d_b, d_b, |k, l| (0..d_a).map(|i| rho[(i * d_b + k, i * d_b + l)]).sum())
}

/// Orthonormal basis (as columns) of the right kernel of `a`, counting singular
/// values `<= tol` as zero.
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let (m, n) = a.shape();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let padded;
    let a = if m < n {
        padded = {
            let mut p = CMatrix::zeros(n, n);
            p.view_mut((0, 0), (m, n)).copy_from(a);
            p
        };
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v = svd.v_t.expect("requested v_t").adjoint();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= tol).collect();
    CMatrix::from_fn(n, keep.len(), |r, k| v[(r, keep[k])])
}

/// Eigenvalues of a general square matrix, read off its complex Schur form.
pub fn eigenvalues_general(a: &CMatrix) -> Vec<C64> {
    if a.is_empty() {
        return Vec::new();
    }
    let (_, t) = a.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// Trace norm `Tr|A|`.
pub fn trace_norm(a: &CMatrix) -> f64 {
    if hermitian_defect(a) <= 1e-13 * frob(a).max(1.0) {
        spectrum(a).values.iter().map(|x| x.abs()).sum()
    } else {
        a.clone().svd(false, false).singular_values.sum()
    }
}

/// Ascending eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianSpectrum {
    /// `V diag(f(λ)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition without the Hermiticity check; the Hermitian part is used.
pub fn spectrum(a: &CMatrix) -> HermitianSpectrum {
    let h = hermitian_part(a);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    HermitianSpectrum { values, vectors }
}

pub fn eig_hermitian(a: &CMatrix) -> Result<HermitianSpectrum> {
    eig_hermitian_with(a, &NumericPolicy::default())
}

pub fn eig_hermitian_with(a: &CMatrix, policy: &NumericPolicy) -> Result<HermitianSpectrum> {
    if !a.is_square() {
        return Err(Error::RejectedInput(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    if !is_hermitian(a, policy) {
        return Err(Error::RejectedInput(format!(
            "matrix is not Hermitian (defect {:e})",
            hermitian_defect(a)
        )));
    }
    Ok(spectrum(a))
}

/// Scalar functions used by the spectral calculus, together with their derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatFn {
    Identity,
    Square,
    Cube,
    Sqrt,
    Log,
    Exp,
    Inverse,
    /// `x^p`; `p < 1` requires a positive definite argument.
    Power(f64),
    /// `x log x` with `0 log 0 = 0`.
    XLogX,
}

impl MatFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MatFn::Identity => x,
            MatFn::Square => x * x,
            MatFn::Cube => x * x * x,
            MatFn::Sqrt => x.max(0.0).sqrt(),
            MatFn::Log => x.ln(),
            MatFn::Exp => x.exp(),
            MatFn::Inverse => 1.0 / x,
            MatFn::Power(p) => {
                if p.fract() == 0.0 {
                    x.powi(p as i32)
                } else {
                    x.max(0.0).powf(p)
                }
            }
            MatFn::XLogX => {
                if x <= 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            MatFn::Identity => 1.0,
            MatFn::Square => 2.0 * x,
            MatFn::Cube => 3.0 * x * x,
            MatFn::Sqrt => 0.5 / x.sqrt(),
            MatFn::Log => 1.0 / x,
            MatFn::Exp => x.exp(),
            MatFn::Inverse => -1.0 / (x * x),
            MatFn::Power(p) => p * MatFn::Power(p - 1.0).eval(x),
            MatFn::XLogX => x.ln() + 1.0,
        }
    }

    /// Smallest eigenvalue the argument may have, if restricted.
    fn lower_bound(&self) -> Option<(f64, bool)> {
        // (bound, strict)
        match *self {
            MatFn::Log | MatFn::Inverse | MatFn::Sqrt => Some((POSITIVE_DEFINITE_FLOOR, true)),
            MatFn::Power(p) if p < 1.0 => Some((POSITIVE_DEFINITE_FLOOR, true)),
            MatFn::Power(p) if p.fract() != 0.0 => Some((-POSITIVE_DEFINITE_FLOOR, false)),
            MatFn::XLogX => Some((-POSITIVE_DEFINITE_FLOOR, false)),
            _ => None,
        }
    }

    fn check_domain(&self, spec: &HermitianSpectrum) -> Result<()> {
        if let Some((bound, strict)) = self.lower_bound() {
            let m = spec.min();
            let bad = if strict { m <= bound } else { m < bound };
            if bad {
                return Err(Error::Domain { what: format!("{self:?} of a matrix with eigenvalue outside its domain"), eigenvalue: m });
            }
        }
        Ok(())
    }
}

/// Spectral calculus `V diag(f(λ)) V*` for a Hermitian argument.
pub fn matfunc(a: &CMatrix, f: MatFn) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    f.check_domain(&spec)?;
    Ok(spec.apply(|x| f.eval(x)))
}

/// First divided difference of `f` on the pair `(x, y)`, switching to the
/// derivative when the points are closer than `rel_gap * max(1, |x|)`.
pub fn divided_difference(f: MatFn, x: f64, y: f64, rel_gap: f64) -> f64 {
    if (x - y).abs() <= rel_gap * x.abs().max(1.0) {
        f.deriv(0.5 * (x + y))
    } else {
        (f.eval(x) - f.eval(y)) / (x - y)
    }
}

/// Action of the double-operator representation of the divided difference of
/// `f` on `z`: in the eigenbases `X = U diag(x) U*`, `Y = W diag(y) W*`,
/// returns `U (M ∘ (U* Z W)) W*` with `M_ab = f̃(x_a, y_b)`.
pub fn divided_difference_rep(x: &CMatrix, y: &CMatrix, f: MatFn, z: &CMatrix) -> Result<CMatrix> {
    let policy = NumericPolicy::default();
    let sx = eig_hermitian_with(x, &policy)?;
    let sy = eig_hermitian_with(y, &policy)?;
    if z.nrows() != x.nrows() || z.ncols() != y.nrows() {
        return Err(Error::RejectedInput("divided difference operand has mismatched shape".into()));
    }
    f.check_domain(&sx)?;
    f.check_domain(&sy)?;
    Ok(divided_difference_apply(&sx, &sy, f, z, policy.divided_difference))
}

pub(crate) fn divided_difference_apply(
    sx: &HermitianSpectrum,
    sy: &HermitianSpectrum,
    f: MatFn,
    z: &CMatrix,
    rel_gap: f64,
) -> CMatrix {
    let mut inner = sx.vectors.adjoint() * z * &sy.vectors;
    for a in 0..sx.values.len() {
        for b in 0..sy.values.len() {
            inner[(a, b)] *= divided_difference(f, sx.values[a], sy.values[b], rel_gap);
        }
    }
    &sx.vectors * inner * sy.vectors.adjoint()
}

/// `Θ_σ(Z) = ∫₀^∞ (t+σ)⁻¹ Z (t+σ)⁻¹ dt`, evaluated in the eigenbasis of `σ`.
pub fn theta_map(sigma: &DensityMatrix, z: &CMatrix) -> Result<CMatrix> {
    if !sigma.faithful {
        return Err(Error::Domain { what: "Θ_σ needs a faithful σ".into(), eigenvalue: sigma.min_eigenvalue() });
    }
    if z.nrows() != sigma.dim() || z.ncols() != sigma.dim() {
        return Err(Error::RejectedInput("Θ_σ operand has mismatched shape".into()));
    }
    let s = &sigma.spectrum;
    Ok(divided_difference_apply(s, s, MatFn::Log, z, NumericPolicy::default().divided_difference))
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
    spectrum: HermitianSpectrum,
    pub faithful: bool,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::with_policy(mat, &NumericPolicy::default())
    }

    pub fn with_policy(mat: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        let spectrum = eig_hermitian_with(&mat, policy)?;
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::RejectedInput(format!("density matrix has trace {tr}")));
        }
        if spectrum.min() < -policy.psd_slack {
            return Err(Error::RejectedInput(format!("density matrix has eigenvalue {:e}", spectrum.min())));
        }
        let faithful = spectrum.min() > policy.faithful;
        Ok(Self { mat: hermitian_part(&mat), spectrum, faithful })
    }

    /// Hermitizes and rescales to unit trace before validating.
    pub fn normalized(mat: &CMatrix) -> Result<Self> {
        let h = hermitian_part(mat);
        let tr = trace(&h).re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::RejectedInput(format!("cannot normalize matrix with trace {tr}")));
        }
        Self::new(h / C64::new(tr, 0.0))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(identity(d) / C64::new(d as f64, 0.0)).expect("I/d is a state")
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.min()
    }

    /// `σ^p` for real `p`; negative powers need a faithful state.
    pub fn power(&self, p: f64) -> CMatrix {
        self.spectrum.apply(|x| x.max(0.0).powf(p))
    }

    pub fn log(&self) -> CMatrix {
        self.spectrum.apply(|x| x.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerKind {
    /// `Tr[σ^{1/2} X* σ^{1/2} Y]`
    Kms,
    /// `Tr[σ X* Y]`
    Gns,
    /// `Tr[X* Y]`
    Hs,
}

/// Inner product on operators weighted by a state.
#[derive(Debug, Clone)]
pub struct WeightedInner {
    pub sigma: DensityMatrix,
    pub kind: InnerKind,
    sqrt: CMatrix,
}

impl WeightedInner {
    pub fn new(sigma: DensityMatrix, kind: InnerKind) -> Self {
        let sqrt = sigma.power(0.5);
        Self { sigma, kind, sqrt }
    }

    pub fn kms(sigma: DensityMatrix) -> Self {
        Self::new(sigma, InnerKind::Kms)
    }

    pub fn gns(sigma: DensityMatrix) -> Self {
        Self::new(sigma, InnerKind::Gns)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn inner(&self, x: &CMatrix, y: &CMatrix) -> Result<C64> {
        let d = self.dim();
        if x.shape() != (d, d) || y.shape() != (d, d) {
            return Err(Error::RejectedInput("inner product operands have mismatched shape".into()));
        }
        Ok(self.inner_unchecked(x, y))
    }

    pub fn inner_unchecked(&self, x: &CMatrix, y: &CMatrix) -> C64 {
        match self.kind {
            InnerKind::Kms => hs_inner(&(&self.sqrt * x * &self.sqrt), y),
            InnerKind::Gns => hs_inner(&(x * self.sigma.mat()), y),
            InnerKind::Hs => hs_inner(x, y),
        }
    }

    pub fn norm_sqr(&self, x: &CMatrix) -> f64 {
        self.inner_unchecked(x, x).re
    }

    /// Metric `G` on vectorized operators: `⟨X, Y⟩ = vec(X)* G vec(Y)`.
    pub fn metric(&self) -> CMatrix {
        let d = self.dim();
        match self.kind {
            InnerKind::Kms => kron(&self.sqrt.transpose(), &self.sqrt),
            InnerKind::Gns => kron(&self.sigma.mat().transpose(), &identity(d)),
            InnerKind::Hs => identity(d * d),
        }
    }

    /// `G^{r}` for real `r`, using that `G` is a Kronecker product of powers of `σ`.
    pub fn metric_power(&self, r: f64) -> CMatrix {
        let d = self.dim();
        match self.kind {
            InnerKind::Kms => {
                let s = self.sigma.power(0.5 * r);
                kron(&s.transpose(), &s)
            }
            InnerKind::Gns => kron(&self.sigma.power(r).transpose(), &identity(d)),
            InnerKind::Hs => identity(d * d),
        }
    }
}

/// Serde adapter storing a complex matrix as rows of `[re, im]` pairs.
pub mod serde_rows {
    use super::CMatrix;
    use num_complex::Complex64 as C64;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err("ragged matrix rows".into());
        }
        if n == 0 || m == 0 {
            return Err("empty matrix".into());
        }
        Ok(CMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }

    /// Same layout for a list of matrices.
    pub mod many {
        use super::*;

        pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
            ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter().map(|r| from_rows(r).map_err(D::Error::custom)).collect()
        }
    }

    /// Optional matrix.
    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(m: &Option<CMatrix>, s: S) -> Result<S::Ok, S::Error> {
            m.as_ref().map(to_rows).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMatrix>, D::Error> {
            let rows = Option::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            rows.map(|r| from_rows(&r).map_err(D::Error::custom)).transpose()
        }
    }
}
