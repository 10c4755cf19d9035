use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest combined sample size tested by full enumeration.
pub const EXACT_MAX_TOTAL: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// x tends to be smaller than y.
    XLess,
    XGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    ExactEnumeration,
    NormalApproxTieCorrected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    pub n: usize,
    pub m: usize,
    pub u_x: f64,
    pub u_y: f64,
    pub p_one_tailed: f64,
    pub alternative: Alternative,
    pub method: TestMethod,
}

/// Midranks (1-based) of `values`, plus the tie-group sizes.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// One-tailed Mann-Whitney U test.
///
/// `u_x` counts pairs with x above y (ties count one half), so small `u_x`
/// supports [`Alternative::XLess`].
pub fn mann_whitney_one_tailed(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
) -> Result<MannWhitneyResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::input(
            "Mann-Whitney test needs two non-empty samples",
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::input("Mann-Whitney samples must be finite"));
    }
    let (n, m) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_x: f64 = ranks[..n].iter().sum();
    let u_x = rank_sum_x - (n * (n + 1)) as f64 / 2.0;
    let u_y = (n * m) as f64 - u_x;

    let (p, method) = if ties.is_empty() && n + m <= EXACT_MAX_TOTAL {
        (
            exact_p(n, m, u_x, alternative),
            TestMethod::ExactEnumeration,
        )
    } else {
        (
            normal_p(n, m, u_x, &ties, alternative),
            TestMethod::NormalApproxTieCorrected,
        )
    };
    Ok(MannWhitneyResult {
        n,
        m,
        u_x,
        u_y,
        p_one_tailed: p,
        alternative,
        method,
    })
}

/// Enumerates every assignment of ranks 1..=n+m to the x sample.
fn exact_p(n: usize, m: usize, u_obs: f64, alternative: Alternative) -> f64 {
    let total = n + m;
    // Ranks are integers without ties, so U is an exact integer.
    let u_obs = u_obs.round() as i64;
    let offset = (n * (n + 1) / 2) as i64;
    let (mut hits, mut all) = (0u64, 0u64);
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let rank_sum: i64 = (0..total)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b as i64 + 1)
            .sum();
        let u = rank_sum - offset;
        all += 1;
        let extreme = match alternative {
            Alternative::XLess => u <= u_obs,
            Alternative::XGreater => u >= u_obs,
        };
        hits += extreme as u64;
    }
    hits as f64 / all as f64
}

fn normal_p(n: usize, m: usize, u: f64, ties: &[usize], alternative: Alternative) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let mu = nf * mf / 2.0;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| (t as f64).powi(3) - t as f64)
        .sum::<f64>();
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if !(var > 0.0) {
        return 0.5;
    }
    let sd = var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    match alternative {
        Alternative::XLess => std_normal.cdf((u - mu + 0.5) / sd),
        Alternative::XGreater => 1.0 - std_normal.cdf((u - mu - 0.5) / sd),
    }
}
