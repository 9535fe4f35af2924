//! Run statistics: per-objective summaries, increase over a static
//! reference and the Mann-Whitney-Wilcoxon rank-sum test.

use thiserror::Error;

use crate::run::RunReport;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("no runs to aggregate")]
    Empty,
    #[error("each sample needs at least two values (got {0} and {1})")]
    SampleTooSmall(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub stdev: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stdev = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(Summary {
        mean: mean.clamp(min, max),
        min,
        max,
        stdev,
    })
}

/// `(min_dynamic - min_static) / min_static * 100`.
pub fn increase_percent(dynamic_min: f64, static_min: f64) -> f64 {
    (dynamic_min - static_min) / static_min * 100.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub instance: String,
    pub dynamicity: f64,
    pub runs: usize,
    pub nv: Summary,
    pub td: Summary,
    pub increase_nv: Option<f64>,
    pub increase_td: Option<f64>,
}

pub fn aggregate(reports: &[RunReport], reference: Option<&[RunReport]>) -> Result<AggregateStats, StatsError> {
    let first = reports.first().ok_or(StatsError::Empty)?;
    let nv: Vec<f64> = reports.iter().map(|r| r.nv as f64).collect();
    let td: Vec<f64> = reports.iter().map(|r| r.td_unscaled).collect();
    let nv = summarize(&nv)?;
    let td = summarize(&td)?;
    let (increase_nv, increase_td) = match reference {
        Some(refs) => {
            let rnv = summarize(&refs.iter().map(|r| r.nv as f64).collect::<Vec<_>>())?;
            let rtd = summarize(&refs.iter().map(|r| r.td_unscaled).collect::<Vec<_>>())?;
            (
                Some(increase_percent(nv.min, rnv.min)),
                Some(increase_percent(td.min, rtd.min)),
            )
        }
        None => (None, None),
    };
    Ok(AggregateStats {
        instance: first.instance.clone(),
        dynamicity: first.dynamicity,
        runs: reports.len(),
        nv,
        td,
        increase_nv,
        increase_td,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    pub z: f64,
    /// Two-sided, normal approximation with tie correction, no continuity
    /// correction.
    pub p_value: f64,
}

/// Midranks (1-based) of the pooled values, plus the tie term
/// `sum(t^3 - t)` over groups of equal values.
fn midranks(pooled: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSum, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::SampleTooSmall(a.len(), b.len()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let r_a: f64 = ranks[..a.len()].iter().sum();
    let u = r_a - na * (na + 1.0) / 2.0;
    let mean = na * nb / 2.0;
    let var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(RankSum {
            u,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let z = (u - mean) / var.sqrt();
    let p_value = libm::erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0);
    Ok(RankSum { u, z, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(nv: usize, td: f64) -> RunReport {
        RunReport {
            instance: "X".into(),
            dynamicity: 0.5,
            seed: 0,
            nv,
            td_unscaled: td,
            feasible_solutions: 0,
            duration_s: 0.0,
            hard_infeasible: vec![],
            event_log: None,
        }
    }

    #[test]
    fn summary_basics() {
        let s = summarize(&[3.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.stdev), (3.0, 3.0, 3.0, 0.0));
        let s = summarize(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.stdev - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(summarize(&[]), Err(StatsError::Empty));
    }

    #[test]
    fn increase_examples() {
        assert_eq!(increase_percent(12.0, 10.0), 20.0);
        let agg = aggregate(&[report(10, 828.937)], Some(&[report(10, 828.937)])).unwrap();
        assert_eq!(agg.increase_nv, Some(0.0));
        assert_eq!(agg.increase_td, Some(0.0));
        assert!(aggregate(&[], None).is_err());
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut reps: Vec<RunReport> = (0..7).map(|i| report(10 + i % 3, 800.0 + (i * i) as f64 * 1.7)).collect();
        let a = aggregate(&reps, None).unwrap();
        reps.reverse();
        reps.swap(1, 4);
        let b = aggregate(&reps, None).unwrap();
        assert_eq!(a.nv.min, b.nv.min);
        assert_eq!(a.td.max, b.td.max);
        assert!((a.td.mean - b.td.mean).abs() < 1e-9);
        assert!((a.td.stdev - b.td.stdev).abs() < 1e-9);
    }

    #[test]
    fn u_matches_pairwise_counting() {
        let a = [3.1, 5.0, 5.0, 7.2, 1.0];
        let b = [5.0, 2.2, 8.8, 3.1, 0.5];
        let mut pairs = 0.0;
        for x in a {
            for y in b {
                pairs += if x > y {
                    1.0
                } else if x == y {
                    0.5
                } else {
                    0.0
                };
            }
        }
        assert_eq!(rank_sum_test(&a, &b).unwrap().u, pairs);
    }

    #[test]
    fn p_values() {
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let b: Vec<f64> = (100..=129).map(f64::from).collect();
        assert!(rank_sum_test(&a, &b).unwrap().p_value < 1e-6);
        let same = rank_sum_test(&a, &a).unwrap();
        assert!((same.p_value - 1.0).abs() < 1e-12);
        assert_eq!(rank_sum_test(&[2.0, 2.0], &[2.0, 2.0, 2.0]).unwrap().p_value, 1.0);
        assert!(rank_sum_test(&[1.0], &[1.0, 2.0]).is_err());
        // no ties, 4 vs 4, complete separation: z = -8 / sqrt(12)
        let r = rank_sum_test(&[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 8.0]).unwrap();
        assert!((r.z + 8.0 / 12f64.sqrt()).abs() < 1e-12);
        assert!((r.p_value - 0.020_921_335_337_794_1).abs() < 1e-9);
    }
}
