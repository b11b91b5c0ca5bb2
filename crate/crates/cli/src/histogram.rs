use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    /// Share of draws in the bin; the shares sum to one.
    pub frequency: f64,
    pub density: f64,
}

/// Equal-width bins over `[0, max(draws)]`; the last bin is closed.
pub fn histogram(draws: &[f64], bins: usize) -> Vec<Bin> {
    assert!(bins >= 1, "at least one bin");
    let hi = draws.iter().copied().fold(0.0_f64, f64::max);
    let width = if hi > 0.0 { hi / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in draws {
        let k = ((x / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = draws.len().max(1) as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| Bin {
            left: k as f64 * width,
            right: (k + 1) as f64 * width,
            frequency: c as f64 / n,
            density: c as f64 / n / width,
        })
        .collect()
}

pub fn to_csv(bins: &[Bin]) -> String {
    let mut out = String::from("bin_left,bin_right,frequency,density\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{},{}", b.left, b.right, b.frequency, b.density);
    }
    out
}
