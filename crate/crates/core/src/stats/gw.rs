//! Geometrically weighted aggregation of count distributions.
//!
//! `gw(C, α) = e^α Σ_k {1 - (1 - e^{-α})^k} C_k`. The per-unit weight
//! `w(k) = e^α {1 - r^k}` with `r = 1 - e^{-α}` has increments
//! `w(k + 1) - w(k) = r^k`, which is what change statistics consume.

/// `w(k)` evaluated stably: `-e^α · expm1(k · ln1p(-e^{-α}))`.
pub fn gw_weight(k: usize, decay: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let log_r = (-(-decay).exp()).ln_1p();
    if log_r == f64::NEG_INFINITY {
        // decay = 0: every unit with at least one partner counts once
        return 1.0;
    }
    -decay.exp() * (k as f64 * log_r).exp_m1()
}

/// `r^k`, the increment `w(k + 1) - w(k)`.
pub fn gw_increment(k: usize, decay: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let log_r = (-(-decay).exp()).ln_1p();
    (k as f64 * log_r).exp()
}

/// Applies the geometric weighting to `counts`, where `counts[k - 1]` is the
/// number of units with exactly `k` partners (`k >= 1`).
pub fn gw_transform(counts: &[u64], decay: f64) -> f64 {
    counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| c as f64 * gw_weight(idx + 1, decay))
        .sum()
}

/// Precomputed `w(k)` and `r^k` for `k = 0..=max`.
#[derive(Clone, Debug)]
pub(crate) struct GwTable {
    weight: Vec<f64>,
    increment: Vec<f64>,
}

impl GwTable {
    pub fn new(decay: f64, max: usize) -> Self {
        Self {
            weight: (0..=max).map(|k| gw_weight(k, decay)).collect(),
            increment: (0..=max).map(|k| gw_increment(k, decay)).collect(),
        }
    }

    #[inline]
    pub fn w(&self, k: usize) -> f64 {
        self.weight[k]
    }

    #[inline]
    pub fn inc(&self, k: usize) -> f64 {
        self.increment[k]
    }
}
