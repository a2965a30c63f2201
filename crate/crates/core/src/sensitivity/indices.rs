//! First, second and total-order Sobol indices with bootstrap intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::design::{RowKind, SobolDesign};
use crate::error::{Error, Result};
use crate::sampler::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    /// Two-sided coverage of the percentile interval.
    pub confidence: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            confidence: 0.95,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl IndexEstimate {
    const ZERO: Self = Self {
        estimate: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
    };

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    /// Whether the interval excludes zero.
    pub fn is_significant(&self) -> bool {
        !self.contains(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairIndex {
    pub i: usize,
    pub j: usize,
    pub index: IndexEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub factors: Vec<String>,
    pub first: Vec<IndexEstimate>,
    pub total: Vec<IndexEstimate>,
    /// Empty unless the design included the `B_A` matrices.
    pub second: Vec<PairIndex>,
    pub evaluations: usize,
    pub variance: f64,
    /// The outputs had no variance, so every index is undefined and reported as 0.
    pub degenerate: bool,
}

impl SensitivityResult {
    /// Index of the factor with the largest first-order estimate.
    pub fn dominant_factor(&self) -> Option<usize> {
        (0..self.first.len()).max_by(|&a, &b| self.first[a].estimate.total_cmp(&self.first[b].estimate))
    }
}

/// Outputs of one base sample, gathered from its design block.
struct Block {
    a: f64,
    b: f64,
    ab: Vec<f64>,
    ba: Vec<f64>,
}

fn blocks(design: &SobolDesign, outputs: &[f64]) -> Vec<Block> {
    let k = design.dimension();
    outputs
        .chunks(design.block_size())
        .enumerate()
        .map(|(j, chunk)| {
            let mut block = Block {
                a: 0.0,
                b: 0.0,
                ab: vec![0.0; k],
                ba: vec![0.0; if design.second_order { k } else { 0 }],
            };
            for (r, &y) in chunk.iter().enumerate() {
                match design.row_kind(j * design.block_size() + r) {
                    RowKind::A => block.a = y,
                    RowKind::B => block.b = y,
                    RowKind::AB(i) => block.ab[i] = y,
                    RowKind::BA(i) => block.ba[i] = y,
                }
            }
            block
        })
        .collect()
}

struct Estimates {
    first: Vec<f64>,
    total: Vec<f64>,
    second: Vec<f64>,
}

/// Estimates over the base samples listed in `picks`, with outputs already
/// centred by the full-sample mean.
fn estimate(blocks: &[Block], picks: &[usize], k: usize, second_order: bool) -> Estimates {
    let n = picks.len() as f64;
    let mut mean = 0.0;
    for &j in picks {
        mean += blocks[j].a + blocks[j].b;
    }
    mean /= 2.0 * n;
    let mut var = 0.0;
    for &j in picks {
        var += (blocks[j].a - mean).powi(2) + (blocks[j].b - mean).powi(2);
    }
    var /= 2.0 * n;

    let mut first = vec![0.0; k];
    let mut total = vec![0.0; k];
    for &j in picks {
        let bl = &blocks[j];
        for i in 0..k {
            first[i] += bl.b * (bl.ab[i] - bl.a);
            total[i] += (bl.a - bl.ab[i]).powi(2);
        }
    }
    for i in 0..k {
        first[i] /= n * var;
        total[i] /= 2.0 * n * var;
    }

    let mut second = Vec::new();
    if second_order {
        for i in 0..k {
            for jx in i + 1..k {
                let mut s = 0.0;
                for &j in picks {
                    let bl = &blocks[j];
                    s += bl.ba[i] * bl.ab[jx] - bl.a * bl.b;
                }
                second.push(s / (n * var) - first[i] - first[jx]);
            }
        }
    }
    Estimates { first, total, second }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Percentile interval, widened if needed so that it contains the point estimate.
fn interval(estimate: f64, mut samples: Vec<f64>, confidence: f64) -> IndexEstimate {
    if samples.is_empty() {
        return IndexEstimate {
            estimate,
            ci_low: estimate,
            ci_high: estimate,
        };
    }
    samples.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - confidence);
    IndexEstimate {
        estimate,
        ci_low: quantile(&samples, tail).min(estimate),
        ci_high: quantile(&samples, 1.0 - tail).max(estimate),
    }
}

/// Computes the indices from `outputs`, which must hold one value per design row.
pub fn sobol_indices(design: &SobolDesign, outputs: &[f64], bootstrap: &BootstrapConfig) -> Result<SensitivityResult> {
    if outputs.len() != design.evaluations() {
        return Err(Error::OutputLength {
            expected: design.evaluations(),
            got: outputs.len(),
        });
    }
    if !(bootstrap.confidence > 0.0 && bootstrap.confidence < 1.0) {
        return Err(Error::InvalidConfig("bootstrap confidence must lie in (0, 1)".into()));
    }
    let k = design.dimension();
    let n = design.base_samples;
    let offset = outputs.iter().sum::<f64>() / outputs.len() as f64;
    let centred: Vec<f64> = outputs.iter().map(|y| y - offset).collect();
    let blocks = blocks(design, &centred);
    let all: Vec<usize> = (0..n).collect();

    let spread = centred.iter().map(|y| y.abs()).fold(0.0, f64::max);
    let scale = offset.abs().max(1.0);
    let pairs = if design.second_order { k * (k - 1) / 2 } else { 0 };
    if !(spread > 1e-12 * scale) {
        let pair_list = pair_indices(k, design.second_order)
            .map(|(i, j)| PairIndex {
                i,
                j,
                index: IndexEstimate::ZERO,
            })
            .collect();
        return Ok(SensitivityResult {
            factors: design.factors.names.clone(),
            first: vec![IndexEstimate::ZERO; k],
            total: vec![IndexEstimate::ZERO; k],
            second: pair_list,
            evaluations: outputs.len(),
            variance: 0.0,
            degenerate: true,
        });
    }

    let point = estimate(&blocks, &all, k, design.second_order);
    let mut boot_first = vec![Vec::with_capacity(bootstrap.resamples); k];
    let mut boot_total = vec![Vec::with_capacity(bootstrap.resamples); k];
    let mut boot_second = vec![Vec::with_capacity(bootstrap.resamples); pairs];
    let mut rng = stream_rng(bootstrap.seed, 0xB007);
    let mut picks = vec![0usize; n];
    for _ in 0..bootstrap.resamples {
        for p in picks.iter_mut() {
            *p = rng.random_range(0..n);
        }
        let e = estimate(&blocks, &picks, k, design.second_order);
        // A resample can be constant even when the full sample is not.
        if e.first.iter().chain(&e.total).chain(&e.second).all(|x| x.is_finite()) {
            for i in 0..k {
                boot_first[i].push(e.first[i]);
                boot_total[i].push(e.total[i]);
            }
            for (dst, v) in boot_second.iter_mut().zip(e.second) {
                dst.push(v);
            }
        }
    }

    let conf = bootstrap.confidence;
    let first = point.first.iter().zip(boot_first).map(|(&e, s)| interval(e, s, conf)).collect();
    let total = point.total.iter().zip(boot_total).map(|(&e, s)| interval(e, s, conf)).collect();
    let second = pair_indices(k, design.second_order)
        .zip(point.second.iter().zip(boot_second))
        .map(|((i, j), (&e, s))| PairIndex {
            i,
            j,
            index: interval(e, s, conf),
        })
        .collect();
    let mean = centred.iter().sum::<f64>() / centred.len() as f64;
    let variance = blocks.iter().map(|b| (b.a - mean).powi(2) + (b.b - mean).powi(2)).sum::<f64>() / (2 * n) as f64;
    Ok(SensitivityResult {
        factors: design.factors.names.clone(),
        first,
        total,
        second,
        evaluations: outputs.len(),
        variance,
        degenerate: false,
    })
}

fn pair_indices(k: usize, enabled: bool) -> impl Iterator<Item = (usize, usize)> {
    let k = if enabled { k } else { 0 };
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensitivity::{saltelli_design, FactorBox};

    fn evaluate(design: &SobolDesign, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        design.rows().iter().map(|r| f(r)).collect()
    }

    #[test]
    fn inactive_factors_are_exactly_zero() {
        let design = saltelli_design(FactorBox::unit(4), 1024, true).unwrap();
        let outputs = evaluate(&design, |x| 3.0 * x[0] + 1.0);
        let res = sobol_indices(&design, &outputs, &BootstrapConfig::default()).unwrap();
        for i in 1..4 {
            assert_eq!(res.first[i].estimate, 0.0);
            assert_eq!(res.total[i].estimate, 0.0);
        }
        assert!((res.first[0].estimate - 1.0).abs() < 0.05);
        assert!((res.total[0].estimate - 1.0).abs() < 0.05);
        assert_eq!(res.dominant_factor(), Some(0));
        assert!(res.second.iter().all(|p| p.index.estimate.abs() < 0.05));
    }

    #[test]
    fn linear_additive_model() {
        let coeffs = [1.0, 2.0, 3.0];
        // Uniform inputs on [0, 1] have variance 1/12, so S_i = c_i² / Σ c².
        let sum_sq: f64 = coeffs.iter().map(|c| c * c).sum();
        let design = saltelli_design(FactorBox::unit(3), 4096, false).unwrap();
        let outputs = evaluate(&design, |x| x.iter().zip(coeffs).map(|(x, c)| c * x).sum());
        let res = sobol_indices(&design, &outputs, &BootstrapConfig { resamples: 200, ..Default::default() }).unwrap();
        for (i, c) in coeffs.iter().enumerate() {
            let want = c * c / sum_sq;
            assert!((res.first[i].estimate - want).abs() < 0.02, "S{i}");
            assert!((res.total[i].estimate - want).abs() < 0.02, "ST{i}");
            assert!(res.first[i].contains(res.first[i].estimate));
        }
        let var = sum_sq / 12.0;
        assert!((res.variance - var).abs() / var < 0.05);
    }

    #[test]
    fn pure_interaction_shows_in_second_order() {
        // y = (x1 - 1/2)(x2 - 1/2) has no main effects.
        let design = saltelli_design(FactorBox::unit(3), 2048, true).unwrap();
        let outputs = evaluate(&design, |x| (x[0] - 0.5) * (x[1] - 0.5));
        let res = sobol_indices(&design, &outputs, &BootstrapConfig { resamples: 100, ..Default::default() }).unwrap();
        assert!(res.first[0].estimate.abs() < 0.05);
        assert!(res.first[1].estimate.abs() < 0.05);
        assert!((res.total[0].estimate - 1.0).abs() < 0.1);
        let s12 = res.second.iter().find(|p| p.i == 0 && p.j == 1).unwrap();
        assert!((s12.index.estimate - 1.0).abs() < 0.1);
        assert_eq!(res.second.len(), 3);
    }

    #[test]
    fn constant_output_is_degenerate() {
        let design = saltelli_design(FactorBox::unit(2), 16, true).unwrap();
        let outputs = vec![4.2; design.evaluations()];
        let res = sobol_indices(&design, &outputs, &BootstrapConfig::default()).unwrap();
        assert!(res.degenerate);
        assert!(res.first.iter().chain(&res.total).all(|e| *e == IndexEstimate::ZERO));
        assert_eq!(res.second.len(), 1);
    }

    #[test]
    fn wrong_output_length() {
        let design = saltelli_design(FactorBox::unit(2), 16, false).unwrap();
        let err = sobol_indices(&design, &[0.0; 10], &BootstrapConfig::default()).unwrap_err();
        assert!(matches!(err, Error::OutputLength { expected: 64, got: 10 }));
    }

    #[test]
    fn bootstrap_is_seeded() {
        let design = saltelli_design(FactorBox::unit(2), 64, false).unwrap();
        let outputs = evaluate(&design, |x| x[0] + x[1] * x[1]);
        let cfg = BootstrapConfig { resamples: 300, ..Default::default() };
        let a = sobol_indices(&design, &outputs, &cfg).unwrap();
        let b = sobol_indices(&design, &outputs, &cfg).unwrap();
        assert_eq!(a, b);
        let c = sobol_indices(&design, &outputs, &BootstrapConfig { seed: 9, ..cfg }).unwrap();
        assert_eq!(a.first[0].estimate, c.first[0].estimate);
        assert_ne!(a.first[0].ci_low, c.first[0].ci_low);
    }

    #[test]
    fn interval_shrinks_with_more_samples() {
        let f = |x: &[f64]| x[0] + 0.5 * x[1];
        let width = |n| {
            let design = saltelli_design(FactorBox::unit(2), n, false).unwrap();
            let res = sobol_indices(&design, &evaluate(&design, f), &BootstrapConfig::default()).unwrap();
            res.first[0].ci_high - res.first[0].ci_low
        };
        assert!(width(1024) < width(64));
    }
}
