//! Aggregated analysis report and its deterministic JSON encoding.

use serde::Serialize;
use serde_json::Value;

use crate::constants::{self, BetaEstimate, GapResult, MlsiEstimate, SearchBudget};
use crate::dfstructure::BlockSummary;
use crate::dynamics::{self, DecoSearch, DecoTimeResult};
use crate::error::{Error, Result};
use crate::functionals::{Functionals, L1Report, LpReport};
use crate::matops::CMatrix;
use crate::sampling;

/// Formats a float with 17 significant digits; non-finite values are spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    out.push_str(&fmt_f64(x));
                } else {
                    out.push_str("null");
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|i| !matches!(i, Value::Array(_) | Value::Object(_))) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(indent + 2, out);
                write_value(item, indent + 2, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 2, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::RejectedInput(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularitySummary {
    pub l1: L1Report,
    pub lp: Vec<LpReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Consistency {
    /// `α ≤ λ + 1e-6`, asserted only for reversible models.
    pub alpha_le_lambda: Option<bool>,
    /// `min{β, α₁(inner)} ≤ α + 1e-6`, recorded for bipartite models.
    pub beta_combined_le_alpha: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoherenceReport {
    pub model: String,
    pub dim: usize,
    pub seed: u64,
    pub invariant_space_dim: usize,
    pub algebra_dim: usize,
    pub blocks: Vec<BlockSummary>,
    pub sigma_tr_spectrum: Vec<f64>,
    pub sigma_min: f64,
    pub reversible: bool,
    pub dbc: bool,
    pub off_algebra_rate: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<MlsiEstimate>,
    pub beta: Option<BetaEstimate>,
    pub regularity: Option<RegularitySummary>,
    pub decoherence_times: Vec<DecoTimeResult>,
    pub consistency: Consistency,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub seed: u64,
    pub budget: SearchBudget,
    pub regularity_samples: usize,
    pub p_grid: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub deco: DecoSearch,
}

impl ReportOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            budget: SearchBudget::with_seed(seed),
            regularity_samples: 20,
            p_grid: vec![1.0, 1.5, 2.0, 3.0],
            epsilons: vec![0.01],
            deco: DecoSearch { seed, ..DecoSearch::default() },
        }
    }
}

impl DecoherenceReport {
    pub fn build(model: &str, f: &Functionals, opts: &ReportOptions) -> Result<Self> {
        let ctx = &f.analysis.ctx;
        let d = f.dim();
        let full = f.analysis.algebra.len() == d * d;
        let gap: Option<GapResult> = if full { None } else { Some(constants::spectral_gap(f)?) };
        let lambda = gap.as_ref().map(|g| g.lambda);
        let alpha = if full { None } else { Some(constants::estimate_alpha(f, &opts.budget)?) };
        let beta = match f.bipartite {
            Some(_) => Some(constants::estimate_beta(f, &opts.budget)?),
            None => None,
        };

        let mut rng = sampling::rng(opts.seed);
        let states: Vec<_> = (0..opts.regularity_samples).map(|_| sampling::random_state(d, &mut rng)).collect();
        let regularity = if opts.regularity_samples == 0 {
            None
        } else {
            let xs: Vec<CMatrix> = states.iter().map(|r| f.gamma_inv(r.mat())).collect();
            Some(RegularitySummary { l1: f.check_l1_regularity(&states)?, lp: f.check_strong_lp_regularity(&xs, &opts.p_grid)? })
        };

        let mut decoherence_times = Vec::new();
        if let (Some(l), Some(a)) = (lambda, alpha.as_ref()) {
            for &eps in &opts.epsilons {
                decoherence_times.push(dynamics::decoherence_time(f, eps, l, a.alpha_upper, opts.deco)?);
            }
        }

        let alpha_le_lambda = match (lambda, alpha.as_ref()) {
            (Some(l), Some(a)) if ctx.reversible => Some(a.alpha_upper <= l + 1e-6),
            _ => None,
        };
        let beta_combined_le_alpha = match (beta.as_ref(), alpha.as_ref()) {
            (Some(b), Some(a)) => Some(b.combined() <= a.alpha_upper + 1e-6),
            _ => None,
        };
        let sigma_tr_spectrum = f.sigma_tr.eigenvalues().to_vec();
        Ok(Self {
            model: model.to_string(),
            dim: d,
            seed: opts.seed,
            invariant_space_dim: ctx.kernel_dim,
            algebra_dim: f.analysis.algebra.len(),
            blocks: f.analysis.structure.summary(),
            sigma_min: f.sigma_tr.min_eigenvalue(),
            sigma_tr_spectrum,
            reversible: ctx.reversible,
            dbc: ctx.dbc,
            off_algebra_rate: f.analysis.decay_rate,
            lambda,
            alpha,
            beta,
            regularity,
            decoherence_times,
            consistency: Consistency { alpha_le_lambda, beta_combined_le_alpha },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn json_is_valid_and_deterministic() {
        let f = Functionals::from_generator(catalog::build_deco(2, 1.0).unwrap(), 42).unwrap();
        let mut opts = ReportOptions::new(42);
        opts.budget = SearchBudget { starts: 3, iterations: 50, perturbative: 1, seed: 42 };
        opts.regularity_samples = 3;
        let a = DecoherenceReport::build("deco", &f, &opts).unwrap().to_json().unwrap();
        let b = DecoherenceReport::build("deco", &f, &opts).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["algebra_dim"], 2);
        assert!((parsed["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}
