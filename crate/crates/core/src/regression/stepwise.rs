use serde::{Deserialize, Serialize};

use super::fdist::f_pvalue;
use super::ols::{ols, OlsFit, PIVOT_TOL};
use super::{RegressionDesign, TrafficEstimate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig {
    pub alpha_enter: f64,
    pub alpha_remove: f64,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        StepwiseConfig {
            alpha_enter: 0.05,
            alpha_remove: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum Step {
    Enter {
        cluster: usize,
        partial_correlation: f64,
        p_value: f64,
    },
    Remove {
        cluster: usize,
        p_value: f64,
    },
}

/// A residual sum of squares this small relative to SST is an exact fit.
const EXACT_FIT: f64 = 1e-20;

struct Fitter<'a> {
    design: &'a RegressionDesign,
    n: usize,
    sst: f64,
}

impl Fitter<'_> {
    /// Fit intercept plus the given design columns (1-based cluster numbers).
    fn fit(&self, model: &[usize]) -> Result<OlsFit> {
        let mut cols: Vec<&[f64]> = vec![self.design.column(0)];
        cols.extend(model.iter().map(|&k| self.design.column(k)));
        ols(self.design.response(), &cols)
    }

    fn is_exact(&self, ssr: f64) -> bool {
        ssr <= EXACT_FIT * self.sst.max(f64::MIN_POSITIVE)
    }

    /// p-value of the partial F test comparing a reduced and a full model
    /// that differ by one column.
    fn partial_p(&self, ssr_reduced: f64, ssr_full: f64, params_full: usize) -> f64 {
        let df2 = self.n as f64 - params_full as f64;
        if df2 < 1.0 {
            return 1.0;
        }
        if self.is_exact(ssr_full) {
            return if self.is_exact(ssr_reduced) { 1.0 } else { 0.0 };
        }
        let f = ((ssr_reduced - ssr_full).max(0.0)) / (ssr_full / df2);
        f_pvalue(f, 1.0, df2)
    }
}

fn residualize(fitter: &Fitter<'_>, model: &[usize], column: &[f64]) -> Result<Vec<f64>> {
    let mut cols: Vec<&[f64]> = vec![fitter.design.column(0)];
    cols.extend(model.iter().map(|&k| fitter.design.column(k)));
    Ok(ols(column, &cols)?.residuals)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Forward stepwise selection with removal checks.
///
/// Each round enters the out-of-model center with the largest absolute
/// partial correlation against the current residual, provided its partial-F
/// p-value is at most `alpha_enter`. After every entry, in-model centers
/// whose p-value reaches `alpha_remove` are dropped one at a time until none
/// qualifies. The intercept is never tested. Coefficients come from a final
/// refit on the surviving centers.
pub fn stepwise_fit(design: &RegressionDesign, cfg: &StepwiseConfig) -> Result<TrafficEstimate> {
    let n = design.rows();
    let k = design.k();
    if n < 2 {
        return Err(Error::Regression(format!("need at least 2 observations, got {n}")));
    }
    let y = design.response();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let fitter = Fitter { design, n, sst };

    let mut model: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let mut current = fitter.fit(&model)?;
    // entries plus removals can never exceed this without cycling
    let max_steps = 4 * (k + 1) * (k + 1);

    while steps.len() < max_steps {
        if fitter.is_exact(current.ssr) || n <= model.len() + 2 {
            break;
        }
        let ry_norm = current.ssr.sqrt();
        let mut best: Option<(usize, f64)> = None;
        for cand in 1..=k {
            if model.contains(&cand) {
                continue;
            }
            let x = design.column(cand);
            let x_norm = dot(x, x).sqrt();
            let rx = residualize(&fitter, &model, x)?;
            let rx_norm = dot(&rx, &rx).sqrt();
            if x_norm == 0.0 || rx_norm <= PIVOT_TOL * x_norm {
                continue;
            }
            let pc = dot(&rx, &current.residuals) / (rx_norm * ry_norm);
            if best.is_none_or(|(_, b)| pc.abs() > b.abs()) {
                best = Some((cand, pc));
            }
        }
        let Some((cand, pc)) = best else { break };

        let mut trial = model.clone();
        trial.push(cand);
        let fit = fitter.fit(&trial)?;
        let p = fitter.partial_p(current.ssr, fit.ssr, trial.len() + 1);
        if p > cfg.alpha_enter {
            break;
        }
        model = trial;
        current = fit;
        steps.push(Step::Enter {
            cluster: cand,
            partial_correlation: pc,
            p_value: p,
        });

        loop {
            let mut worst: Option<(usize, f64, OlsFit)> = None;
            for (pos, _) in model.iter().enumerate() {
                let mut reduced = model.clone();
                reduced.remove(pos);
                let fit = fitter.fit(&reduced)?;
                let p = fitter.partial_p(fit.ssr, current.ssr, model.len() + 1);
                if worst.as_ref().is_none_or(|(_, wp, _)| p > *wp) {
                    worst = Some((pos, p, fit));
                }
            }
            match worst {
                Some((pos, p, fit)) if p >= cfg.alpha_remove => {
                    let cluster = model.remove(pos);
                    current = fit;
                    steps.push(Step::Remove { cluster, p_value: p });
                }
                _ => break,
            }
        }
    }

    let mut beta = vec![0.0; k + 1];
    if model.is_empty() {
        beta[0] = mean;
        let fallback = TrafficEstimate {
            beta,
            entered: Vec::new(),
            r_squared: 0.0,
            model_p_value: 1.0,
            steps,
        };
        return Err(Error::NoVariableEntered {
            fallback: Box::new(fallback),
        });
    }

    let fit = fitter.fit(&model)?;
    beta[0] = fit.coefficients[0];
    for (&cluster, &b) in model.iter().zip(&fit.coefficients[1..]) {
        beta[cluster] = b;
    }
    let r_squared = if sst > 0.0 {
        (1.0 - fit.ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let p = model.len() as f64;
    let df2 = n as f64 - p - 1.0;
    let model_p_value = if df2 < 1.0 {
        1.0
    } else if fitter.is_exact(fit.ssr) {
        0.0
    } else {
        f_pvalue(((sst - fit.ssr).max(0.0) / p) / (fit.ssr / df2), p, df2)
    };
    Ok(TrafficEstimate {
        beta,
        entered: model,
        r_squared,
        model_p_value,
        steps,
    })
}
