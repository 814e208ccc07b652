//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::beta::ln_beta;

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` with the two distances
/// computed without cancellation, so endpoint singularities of the form
/// `(x - a)^p` are resolved.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let node = |t: f64| -> Option<(f64, f64, f64, f64)> {
        let u = pi2 * t.sinh();
        let w = pi2 * t.cosh() / u.cosh().powi(2);
        // 1 - tanh(u) and 1 + tanh(u), both computed stably.
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (to_b, to_a) = if u >= 0.0 { (small, 2.0 - small) } else { (2.0 - small, small) };
        let (da, db) = (half * to_a, half * to_b);
        if da <= 0.0 || db <= 0.0 {
            return None;
        }
        Some((mid + half * u.tanh(), da, db, w))
    };
    let eval = |t: f64| node(t).map_or(0.0, |(x, da, db, w)| w * f(x, da, db));
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            add += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        sum += add;
        let next = sum * h * half;
        if (next - estimate).abs() <= 1e-15 * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Unnormalized-by-support sBeta density written from its formula, given
/// the distances of `x` to `-delta` and to `1 + delta`.
pub fn sbeta_density(dl: f64, dr: f64, a: f64, b: f64, delta: f64) -> f64 {
    ((a - 1.0) * dl.ln() + (b - 1.0) * dr.ln() - ln_beta(a, b) - (a + b - 2.0) * (1.0 + 2.0 * delta).ln()).exp()
}

/// `sbeta_density` evaluated at a point `x` of the support.
pub fn sbeta_density_at(x: f64, a: f64, b: f64, delta: f64) -> f64 {
    sbeta_density(x + delta, 1.0 + delta - x, a, b, delta)
}

/// Sampler for the sBeta distribution normalized over its support
/// `[-delta, 1 + delta]`: inverse CDF on a tabulated Beta CDF of
/// `y = (x + delta) / (1 + 2 delta)`, linearly interpolated.
pub struct SBetaSampler {
    cdf: Vec<f64>,
    delta: f64,
}

impl SBetaSampler {
    const CELLS: usize = 1 << 16;

    pub fn new(a: f64, b: f64, delta: f64) -> Self {
        let beta = Beta::new(a, b).unwrap();
        let cdf = (0..=Self::CELLS).map(|i| beta.cdf(i as f64 / Self::CELLS as f64)).collect();
        Self { cdf, delta }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random();
        let j = self.cdf.partition_point(|&c| c <= u).clamp(1, Self::CELLS);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        let y = (j as f64 - 1.0 + frac) / Self::CELLS as f64;
        y * (1.0 + 2.0 * self.delta) - self.delta
    }

    pub fn sample_n(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

/// Minimum total cost over all permutations (rows to distinct columns).
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..cost[row].len() {
            if !used[j] {
                used[j] = true;
                go(cost, row + 1, used, acc + cost[row][j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(cost, 0, &mut vec![false; cost.first().map_or(0, Vec::len)], 0.0, &mut best);
    best
}

/// Mutual-information based NMI written directly from label pairs.
pub fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    use std::collections::HashMap;
    let n = a.len() as f64;
    let mut ca: HashMap<usize, f64> = HashMap::new();
    let mut cb: HashMap<usize, f64> = HashMap::new();
    let mut cab: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1.0;
        *cb.entry(y).or_default() += 1.0;
        *cab.entry((x, y)).or_default() += 1.0;
    }
    let h = |m: &HashMap<usize, f64>| -m.values().map(|c| c / n * (c / n).ln()).sum::<f64>();
    let (ha, hb) = (h(&ca), h(&cb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = cab.iter().map(|(&(x, y), &c)| c / n * (c * n / (ca[&x] * cb[&y])).ln()).sum();
    mi / (0.5 * (ha + hb))
}
