//! Two-sample tests and correlation.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use super::EvalError;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Which sample the observed effect favours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AGreater,
    BGreater,
    Equal,
}

impl Direction {
    fn of(x: f64) -> Self {
        if x > 0.0 {
            Direction::AGreater
        } else if x < 0.0 {
            Direction::BGreater
        } else {
            Direction::Equal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p_two_sided: f64,
    /// Half the two-sided p, in the direction of the observed effect.
    pub p_one_sided: f64,
    pub direction: Direction,
}

/// Two-sided Student-t tail `P(|T| ≥ |t|)` with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-sided standard normal tail `P(|Z| ≥ |z|)`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of
/// freedom.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<WelchResult, EvalError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EvalError::TooFewSamples(a.len().min(b.len())));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    if va == 0.0 && vb == 0.0 {
        return Err(EvalError::DegenerateVariance);
    }
    let diff = mean(a) - mean(b);
    let t = diff / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p = t_two_sided_p(t, df);
    Ok(WelchResult {
        t,
        df,
        p_two_sided: p,
        p_one_sided: p / 2.0,
        direction: Direction::of(diff),
    })
}

/// Mid-ranks (1-based) of `xs`, ties sharing the mean of their positions.
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_two_sided: f64,
    pub p_one_sided: f64,
    pub direction: Direction,
}

/// Mann–Whitney U with mid-rank ties, tie-corrected variance and a 0.5
/// continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitneyResult, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::TooFewSamples(0));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let ra: f64 = ranks[..a.len()].iter().sum();
    let u = ra - na * (na + 1.0) / 2.0;

    let n = na + nb;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_sum = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_sum += t * t * t - t;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if var <= 0.0 {
        return Err(EvalError::AllValuesTied);
    }
    let centred = u - na * nb / 2.0;
    let z = ((centred.abs() - 0.5).max(0.0)) / var.sqrt() * centred.signum();
    let p = normal_two_sided_p(z);
    Ok(MannWhitneyResult {
        u,
        z,
        p_two_sided: p,
        p_one_sided: p / 2.0,
        direction: Direction::of(centred),
    })
}

fn pearson_raw(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub n: usize,
    pub pearson: f64,
    pub spearman: f64,
}

/// Pearson r and Spearman ρ (Pearson on mid-ranks) of aligned samples.
pub fn correlate(x: &[f64], y: &[f64]) -> Result<Correlation, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::IdMismatch(format!("{} metric values vs {} MOS values", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(EvalError::InsufficientPairs(x.len()));
    }
    Ok(Correlation {
        n: x.len(),
        pearson: pearson_raw(x, y)?,
        spearman: pearson_raw(&mid_ranks(x), &mid_ranks(y))?,
    })
}

/// Order statistics with linear interpolation between closest ranks.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
