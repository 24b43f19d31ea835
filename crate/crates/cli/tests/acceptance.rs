//! End-to-end acceptance run. Prints one line per criterion and exits non-zero
//! if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;

use qmsdeco::catalog::{self, BlockSpec};
use qmsdeco::functionals::{chi2, chi2_weighted, mutual_information, relative_entropy, richardson};
use qmsdeco::matops::{self, c, frob, CMatrix, MatFn};
use qmsdeco::{constants, dynamics, sampling, DensityMatrix, Functionals, Lindbladian, Result};
use qmsdeco_cli::{checks, linear_fit, DecotimeArgs};

struct Outcome {
    ok: bool,
    detail: String,
}

fn within(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome { ok: value <= tol, detail: format!("{what} {value:.3e} (tol {tol:.0e})") }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.ok);
    let detail = parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join("; ");
    Outcome { ok, detail }
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

fn fun(gen: Lindbladian) -> Functionals {
    Functionals::from_generator(gen, 42).expect("analysis succeeds")
}

fn deco(d: usize, gamma: f64) -> Functionals {
    fun(catalog::build_deco(d, gamma).unwrap())
}

fn diag(d: usize, complex: bool, seed: u64) -> (Functionals, CMatrix) {
    let mut rng = sampling::rng(seed);
    let g = catalog::random_diagonal_gamma(d, 2, complex, &mut rng);
    (fun(catalog::build_diagonal_gamma(&g).unwrap()), g)
}

fn conditional(d: usize, gamma: f64) -> Functionals {
    let tau2 = matops::from_real_diag(&[0.65, 0.35]);
    let blocks = match d {
        2 => vec![BlockSpec { dim_h: 1, tau: tau2 }],
        3 => vec![BlockSpec { dim_h: 1, tau: matops::identity(1) }, BlockSpec { dim_h: 1, tau: tau2 }],
        4 => vec![BlockSpec { dim_h: 2, tau: tau2 }],
        _ => unreachable!(),
    };
    fun(catalog::build_generic_conditional(&blocks, None, gamma).unwrap())
}

fn depolarizing(gamma: f64) -> Functionals {
    let tau = DensityMatrix::new(matops::from_real_diag(&[0.7, 0.3])).unwrap();
    fun(catalog::build_depolarizing(&tau, gamma).unwrap())
}

fn bipartite(d_a: usize, gamma: f64, seed: u64) -> Functionals {
    let mut rng = sampling::rng(seed);
    let h_a = sampling::random_hermitian(d_a, &mut rng);
    let tau = sampling::random_state(2, &mut rng);
    let inner = catalog::build_depolarizing(&tau, gamma).unwrap();
    let gen = catalog::build_bipartite(&h_a, &inner).unwrap();
    fun(gen).with_bipartite(d_a, inner).unwrap()
}

fn primitive(seed: u64) -> Functionals {
    let mut rng = sampling::rng(seed);
    fun(catalog::random_lindbladian(3, 2, &mut rng))
}

fn herm_jump(seed: u64) -> Functionals {
    let mut rng = sampling::rng(seed);
    let l = sampling::random_hermitian(3, &mut rng);
    fun(Lindbladian::new(matops::zeros(3), vec![l]).unwrap())
}

fn states(d: usize, n: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = sampling::rng(seed);
    (0..n).map(|_| sampling::random_state(d, &mut rng)).collect()
}

fn observables(d: usize, n: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = sampling::rng(seed);
    (0..n).map(|_| sampling::random_hermitian(d, &mut rng)).collect()
}

fn gap_accuracy() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for &gamma in &[0.5, 1.0, 3.0] {
        for &d in &[2, 4, 8] {
            worst = worst.max((constants::spectral_gap(&deco(d, gamma))?.lambda - gamma).abs());
        }
    }
    let mut worst_diag: f64 = 0.0;
    for seed in 0..5 {
        let (f, g) = diag(4, seed % 2 == 1, 100 + seed);
        let mut expected = f64::INFINITY;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    expected = expected.min(-g[(i, j)].re);
                }
            }
        }
        worst_diag = worst_diag.max((constants::spectral_gap(&f)?.lambda - expected).abs());
    }
    Ok(all(vec![within(worst, 1e-9, "deco |λ−γ|"), within(worst_diag, 1e-9, "diagonal |λ − min −Re γ_ij|")]))
}

fn entropy_production_closed_form() -> Result<Outcome> {
    let gamma = 1.7;
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for f in [deco(d, gamma), conditional(d, gamma)] {
            for rho in states(d, 100, 200 + d as u64) {
                let r = rho.mat();
                let rn = matops::hermitian_part(&f.e_n_star(r));
                let exact = gamma * (relative_entropy(r, &rn)? + relative_entropy(&rn, r)?);
                worst = worst.max(rel(f.entropy_production(r)?, exact, 1e-12));
            }
        }
    }
    Ok(within(worst, 1e-8, "max relative error"))
}

fn derivative_identities() -> Result<Outcome> {
    let h = 1e-5;
    let t = 0.7;
    let models = [deco(3, 1.0), bipartite(2, 1.0, 7), diag(3, true, 8).0, conditional(4, 0.8), primitive(9)];
    let mut worst_var: f64 = 0.0;
    let mut worst_ent: f64 = 0.0;
    for (k, f) in models.iter().enumerate() {
        let d = f.dim();
        let props = dynamics::Propagators::new(f, &[t - h, t, t + h])?;
        for x in observables(d, 20, 300 + k as u64) {
            let v = |i: usize| f.variance_sigma(&props.evolve_observable(i, &x));
            let fd = (v(2)? - v(0)?) / (2.0 * h);
            let exact = -2.0 * f.dirichlet(&props.evolve_observable(1, &x))?;
            worst_var = worst_var.max(rel(fd, exact, 1e-6));
        }
        for rho in states(d, 20, 400 + k as u64) {
            let dt = |i: usize| relative_entropy(&matops::hermitian_part(&props.evolve_state(i, rho.mat())), f.sigma_tr.mat());
            let fd = (dt(2)? - dt(0)?) / (2.0 * h);
            let exact = -f.entropy_production(&matops::hermitian_part(&props.evolve_state(1, rho.mat())))?;
            worst_ent = worst_ent.max(rel(fd, exact, 1e-6));
        }
    }
    Ok(all(vec![within(worst_var, 1e-4, "d/dt Var vs −2E"), within(worst_ent, 1e-4, "d/dt D vs −EP")]))
}

fn structure_lemmas() -> Result<Outcome> {
    let models = [deco(3, 1.0), bipartite(2, 1.0, 11), diag(3, false, 12).0, diag(3, true, 13).0];
    let mut worst: f64 = 0.0;
    for (k, f) in models.iter().enumerate() {
        let d = f.dim();
        let sigma = f.sigma_tr.mat();
        worst = worst.max(frob(&f.predual(sigma)));
        for b in &f.analysis.algebra {
            worst = worst.max(frob(&matops::commutator(b, sigma)));
        }
        let xs = observables(d, 51, 500 + k as u64);
        for w in xs.windows(2) {
            let (x, y) = (&w[0], &w[1]);
            let ex = f.e_n(x);
            worst = worst.max(frob(&(f.e_n(&ex) - &ex)));
            worst = worst.max((f.kms.inner_unchecked(x, &f.e_n(y)) - f.kms.inner_unchecked(&ex, y)).norm());
            worst = worst.max(f.intertwining_defect(x));
            let split = f.variance_sigma(x)? - f.variance_sigma(&ex)?;
            worst = worst.max((f.df_variance(x)? - split).abs());
        }
        for rho in states(d, 50, 600 + k as u64) {
            let r = rho.mat();
            let rn = matops::hermitian_part(&f.e_n_star(r));
            let chain = relative_entropy(r, sigma)? - relative_entropy(&rn, sigma)?;
            worst = worst.max((f.df_entropy(r)? - chain).abs());
        }
    }
    Ok(within(worst, 1e-8, "worst defect"))
}

fn chain_rule() -> Result<Outcome> {
    let mut rng = sampling::rng(700);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = sampling::random_hermitian_in(4, 0.1, 2.0, &mut rng);
        let y = sampling::random_hermitian_in(4, 0.1, 2.0, &mut rng);
        let v = sampling::ginibre(4, 4, &mut rng);
        for mf in [MatFn::Square, MatFn::Cube, MatFn::Sqrt, MatFn::Log] {
            let lhs = &v * matops::matfunc(&y, mf)? - matops::matfunc(&x, mf)? * &v;
            let rhs = matops::divided_difference_rep(&x, &y, mf, &(&v * &y - &x * &v))?;
            worst = worst.max(frob(&(lhs - rhs)));
        }
    }
    Ok(within(worst, 1e-8, "worst residual"))
}

fn perturbative_limits() -> Result<Outcome> {
    let mut cases: Vec<(Functionals, DensityMatrix)> = Vec::new();
    let f = bipartite(2, 1.0, 21);
    // Same draw as inside `bipartite`, so σ_A = e^{-H_A}/Z commutes with H_A.
    let h_a = sampling::random_hermitian(2, &mut sampling::rng(21));
    let sigma_a = DensityMatrix::normalized(&matops::spectrum(&h_a).apply(|x| (-x).exp()))?;
    let tau = f.inner_state().unwrap().clone();
    cases.push((f.clone(), f.sigma_tr.clone()));
    cases.push((f.clone(), DensityMatrix::new(matops::kron(sigma_a.mat(), tau.mat()))?));
    let g = deco(3, 1.3);
    cases.push((g.clone(), g.sigma_tr.clone()));
    cases.push((g, DensityMatrix::new(matops::from_real_diag(&[0.5, 0.3, 0.2]))?));

    let mut worst: f64 = 0.0;
    for (k, (f, sigma)) in cases.iter().enumerate() {
        assert!(frob(&f.predual(sigma.mat())) < 1e-10);
        for y in observables(f.dim(), 5, 800 + k as u64) {
            let y = &y - f.e_n(&y);
            let gy = f.gamma(&y);
            let (d2, ep2) = f.perturbative_coefficients(sigma, &y)?;
            let eps0 = 0.05 * sigma.min_eigenvalue() / matops::spectral_norm(&gy);
            let at = |eps: f64| -> Result<(f64, f64)> {
                let rho = matops::hermitian_part(&(sigma.mat() + &gy * c(eps, 0.0)));
                Ok((relative_entropy(&rho, sigma.mat())? / (eps * eps), f.entropy_production(&rho)? / (eps * eps)))
            };
            let (a0, b0) = at(eps0)?;
            let (a1, b1) = at(eps0 / 2.0)?;
            let (a2, b2) = at(eps0 / 4.0)?;
            worst = worst.max(rel(richardson(a0, a1, a2), d2, 1e-12));
            worst = worst.max(rel(richardson(b0, b1, b2), ep2, 1e-12));
        }
    }
    Ok(within(worst, 1e-3, "max relative error"))
}

fn functional_constants() -> Result<Outcome> {
    let budget = constants::SearchBudget { starts: 16, iterations: 400, perturbative: 4, seed: 42 };
    let reversible = [deco(2, 1.0), deco(3, 1.5), depolarizing(1.2), diag(3, false, 31).0, conditional(3, 0.9)];
    let mut worst_gap = f64::NEG_INFINITY;
    for f in &reversible {
        assert!(f.analysis.ctx.reversible);
        let lambda = constants::spectral_gap(f)?.lambda;
        let est = constants::estimate_alpha(f, &budget)?;
        worst_gap = worst_gap.max(est.alpha_upper - lambda);
    }
    let mut deco_floor = f64::INFINITY;
    for &(d, gamma) in &[(2, 1.0), (3, 1.5), (4, 0.6)] {
        let est = constants::estimate_alpha(&deco(d, gamma), &budget)?;
        let min_ratio = est.perturbative_ratios.iter().copied().fold(est.alpha_upper, f64::min);
        deco_floor = deco_floor.min(min_ratio - gamma / 2.0);
    }
    let mut beta_floor = f64::INFINITY;
    for (gamma, seed) in [(1.0, 41), (2.5, 42)] {
        let est = constants::estimate_beta(&bipartite(2, gamma, seed), &budget)?;
        beta_floor = beta_floor.min(est.beta_upper - gamma / 2.0);
    }
    Ok(all(vec![
        within(worst_gap, 1e-6, "max α−λ"),
        within(-deco_floor, 1e-9, "deco γ/2 − min ratio"),
        within(-beta_floor, 1e-9, "depolarizing γ/2 − min info ratio"),
    ]))
}

fn variance_decay() -> Result<Outcome> {
    let models = [deco(3, 1.0), bipartite(2, 1.0, 51), diag(3, true, 52).0, conditional(4, 0.8), primitive(53)];
    let mut worst = f64::NEG_INFINITY;
    for (k, f) in models.iter().enumerate() {
        let lambda = constants::spectral_gap(f)?.lambda;
        let times = dynamics::log_grid(1e-3 / lambda, 50.0 / lambda, 64);
        let xs = observables(f.dim(), 20, 900 + k as u64);
        let rep = dynamics::verify_decay_theorems(f, lambda, &xs, &[], &times)?;
        worst = worst.max(rep.variance.max_ratio - 1.0);
    }
    let f = deco(3, 1.0);
    let times = dynamics::linear_grid(5.0, 64);
    let props = dynamics::Propagators::new(&f, &times)?;
    let mut eq: f64 = 0.0;
    for x in observables(3, 20, 950) {
        let v0 = f.df_variance(&x)?;
        for (i, &t) in times.iter().enumerate() {
            let vt = f.df_variance(&props.evolve_observable(i, &x))?;
            eq = eq.max(rel(vt, (-2.0 * t).exp() * v0, 1e-300));
        }
    }
    Ok(all(vec![within(worst, 1e-6, "max ratio − 1"), within(eq, 1e-8, "deco equality")]))
}

fn trace_distance_bounds() -> Result<Outcome> {
    let models = [deco(4, 1.0), bipartite(2, 1.0, 61), diag(3, true, 62).0, conditional(3, 0.8), primitive(63)];
    let mut excess = f64::NEG_INFINITY;
    let mut pinsker = f64::NEG_INFINITY;
    let mut chain = f64::NEG_INFINITY;
    for (k, f) in models.iter().enumerate() {
        let lambda = constants::spectral_gap(f)?.lambda;
        let sigma_min = f.sigma_tr.min_eigenvalue();
        let times = dynamics::log_grid(1e-3 / lambda, 50.0 / lambda, 64);
        let props = dynamics::Propagators::new(f, &times)?;
        let bounds = dynamics::bound_curves(sigma_min, lambda, lambda, &times);
        for rho in states(f.dim(), 20, 1000 + k as u64) {
            let curve = dynamics::trajectory_with(f, &props, &rho)?;
            for (v, b) in curve.trace_dist.iter().zip(&bounds.pi) {
                excess = excess.max(v / (b + dynamics::ROUNDOFF_FLOOR) - 1.0);
            }
            let r = rho.mat();
            let rn = matops::hermitian_part(&f.e_n_star(r));
            let tn = matops::trace_norm(&(r - &rn));
            pinsker = pinsker.max(tn * tn - 2.0 * f.df_entropy(r)?);
            let t1 = matops::trace_norm(&(r - f.sigma_tr.mat()));
            let x = chi2(r, &f.sigma_tr);
            chain = chain.max((t1 * t1 - x).max(x - 1.0 / sigma_min));
            let xn = chi2_weighted(r, &rn, &f.sigma_tr);
            chain = chain.max(tn * tn - xn);
        }
    }
    Ok(all(vec![
        within(excess, 1e-6, "max ‖ρ_t−ρ_N‖₁/bound − 1"),
        within(pinsker, 1e-12, "Pinsker excess"),
        within(chain, 1e-12, "χ² chain excess"),
    ]))
}

fn regularity() -> Result<Outcome> {
    let models = [deco(3, 1.0), depolarizing(1.0), diag(3, false, 71).0, conditional(4, 0.8)];
    let mut strong = f64::INFINITY;
    let mut l1 = f64::INFINITY;
    for (k, f) in models.iter().enumerate() {
        assert!(f.analysis.ctx.dbc);
        let rhos = states(f.dim(), 50, 1100 + k as u64);
        let xs: Vec<CMatrix> = rhos.iter().map(|r| f.gamma_inv(r.mat())).collect();
        for rep in f.check_strong_lp_regularity(&xs, &[1.0, 1.5, 2.0, 3.0])? {
            strong = strong.min(rep.strong.min_margin);
        }
        let rep = f.check_l1_regularity(&rhos)?;
        l1 = l1.min(rep.detailed_balance.min_margin).min(rep.standard.min_margin);
    }
    Ok(all(vec![within(-strong, 1e-8, "−min strong Lp margin"), within(-l1, 1e-8, "−min L1 margin")]))
}

fn bipartite_identities() -> Result<Outcome> {
    let mut split_ep: f64 = 0.0;
    let mut ip_min = f64::INFINITY;
    let mut split_dn: f64 = 0.0;
    for (d_a, seed) in [(2, 81), (3, 82)] {
        let f = bipartite(d_a, 1.3, seed);
        let split = f.split().unwrap();
        let tau = f.inner_state().unwrap().clone();
        for rho in states(f.dim(), 50, 1200 + seed) {
            let r = rho.mat();
            let rb = matops::partial_trace_a(r, split.0, split.1);
            let ip = f.information_production(r)?;
            split_ep = split_ep.max((f.entropy_production(r)? - ip - f.inner_entropy_production(&rb)?).abs());
            ip_min = ip_min.min(ip);
            let rhs = mutual_information(r, split)? + relative_entropy(&rb, tau.mat())?;
            split_dn = split_dn.max((f.df_entropy(r)? - rhs).abs());
        }
    }
    Ok(all(vec![
        within(split_ep, 1e-8, "EP split"),
        within(-ip_min, 1e-9, "−min IP"),
        within(split_dn, 1e-8, "D_N split"),
    ]))
}

fn decotime_scaling() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("qmsdeco-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path: PathBuf = dir.join("deco.json");
    std::fs::write(&path, r#"{"schema": 1, "builder": {"kind": "deco", "dim": 2, "gamma": 1.0}}"#).expect("write model");
    let args = DecotimeArgs {
        model: path,
        epsilon: 0.01,
        dims: vec![2, 4, 8, 16, 32, 64],
        seed: 42,
        budget: 8,
        out: Some(dir.join("times.csv")),
    };
    let rows = qmsdeco_cli::cmd_decotime(&args).expect("decotime runs");
    let _ = std::fs::remove_dir_all(&dir);
    let ln_d: Vec<f64> = rows.iter().map(|r| (r.dim as f64).ln()).collect();
    let lnln_d: Vec<f64> = ln_d.iter().map(|x| x.ln()).collect();
    let pi = linear_fit(&ln_d, &rows.iter().map(|r| r.tau_pi_bound).collect::<Vec<_>>());
    let mlsi = linear_fit(&lnln_d, &rows.iter().map(|r| r.tau_mlsi_bound).collect::<Vec<_>>());
    Ok(all(vec![within(1.0 - pi.r2, 1e-3, "1 − R² (τ_PI vs ln d)"), within(1.0 - mlsi.r2, 1e-2, "1 − R² (τ_MLSI vs ln ln d)")]))
}

fn dbc_identity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for f in [deco(3, 1.0), deco(4, 0.5), herm_jump(91), herm_jump(92)] {
        assert!(f.analysis.ctx.dbc);
        worst = worst.max(checks::dbc_residual_on_basis(&f)?);
    }
    Ok(within(worst, 1e-7, "max |E(X,Y) − Σ⟨∂X,∂Y⟩|"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 13] = [
        ("spectral gap", gap_accuracy),
        ("entropy production closed form", entropy_production_closed_form),
        ("time-derivative identities", derivative_identities),
        ("structure of the expectation", structure_lemmas),
        ("functional calculus chain rule", chain_rule),
        ("perturbative limits", perturbative_limits),
        ("alpha, beta and gap ordering", functional_constants),
        ("variance decay", variance_decay),
        ("trace-distance bounds", trace_distance_bounds),
        ("Lp regularity", regularity),
        ("bipartite identities", bipartite_identities),
        ("decoherence-time scaling", decotime_scaling),
        ("detailed-balance derivations", dbc_identity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let out = run().unwrap_or_else(|e| Outcome { ok: false, detail: format!("error: {e}") });
        if !out.ok {
            failed += 1;
        }
        println!(
            "acceptance {:02} {:<32} {}  {} [{:.1}s]",
            k + 1,
            name,
            if out.ok { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
