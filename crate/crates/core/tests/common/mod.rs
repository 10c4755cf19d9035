use chronostim::diary::Alternative;
use itertools::Itertools;

/// Exact one-tailed Mann-Whitney p by relabeling every split of the pooled
/// sample, with U counted pair by pair.
pub fn brute_mwu_p(x: &[f64], y: &[f64], alt: Alternative) -> f64 {
    let u = |xs: &[f64], ys: &[f64]| -> f64 {
        xs.iter()
            .flat_map(|a| {
                ys.iter().map(move |b| {
                    if a > b {
                        1.0
                    } else if a == b {
                        0.5
                    } else {
                        0.0
                    }
                })
            })
            .sum()
    };
    let observed = u(x, y);
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (mut hits, mut total) = (0u64, 0u64);
    for pick in (0..pooled.len()).combinations(x.len()) {
        let xs: Vec<f64> = pick.iter().map(|&i| pooled[i]).collect();
        let ys: Vec<f64> = (0..pooled.len())
            .filter(|i| !pick.contains(i))
            .map(|i| pooled[i])
            .collect();
        let v = u(&xs, &ys);
        hits += match alt {
            Alternative::XLess => v <= observed,
            Alternative::XGreater => v >= observed,
        } as u64;
        total += 1;
    }
    hits as f64 / total as f64
}
