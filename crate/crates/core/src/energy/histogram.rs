//! Distribution of cycles available per power cycle.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::params::EnergyParams;
use super::profile::HarvestProfile;
use super::sim::{ipc_cycles, DEFAULT_DT_S};

pub const MIN_HISTOGRAM_TRIALS: usize = 100;
pub const DEFAULT_BUCKETS: usize = 20;
/// Complete power cycles recorded per trial.
const IPCS_PER_TRIAL: usize = 4;
const TRIAL_LIMIT_S: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    /// Inclusive.
    pub low: u64,
    /// Exclusive.
    pub high: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleHistogram {
    pub buckets: Vec<Bucket>,
    pub samples: Vec<u64>,
}

impl CycleHistogram {
    pub fn from_samples(samples: Vec<u64>, n_buckets: usize) -> Self {
        let (Some(&lo), Some(&hi)) = (samples.iter().min(), samples.iter().max()) else {
            return CycleHistogram { buckets: Vec::new(), samples };
        };
        let n = n_buckets.max(1) as u64;
        let width = ((hi - lo) / n + 1).max(1);
        let n = (hi - lo) / width + 1;
        let mut buckets: Vec<Bucket> = (0..n)
            .map(|i| Bucket { low: lo + i * width, high: lo + (i + 1) * width, count: 0 })
            .collect();
        for &s in &samples {
            buckets[((s - lo) / width) as usize].count += 1;
        }
        CycleHistogram { buckets, samples }
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().map(|&x| x as f64).sum::<f64>() / self.samples.len() as f64
    }

    /// `bucket_low,bucket_high,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bucket_low,bucket_high,count\n");
        for b in &self.buckets {
            let _ = writeln!(s, "{},{},{}", b.low, b.high, b.count);
        }
        s
    }
}

/// Cycles executed in each complete power cycle over `trials` runs, each
/// with its own noise seed.
pub fn cycle_histogram(params: &EnergyParams, profile: &HarvestProfile, trials: usize, seed: u64) -> Result<CycleHistogram> {
    if trials < MIN_HISTOGRAM_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "histogram needs at least {MIN_HISTOGRAM_TRIALS} trials, got {trials}"
        )));
    }
    let mut samples = Vec::with_capacity(trials * IPCS_PER_TRIAL);
    for i in 0..trials {
        let p = profile.reseeded(rng::split(seed, i as u64));
        let ipcs = ipc_cycles(params, &p, IPCS_PER_TRIAL, TRIAL_LIMIT_S, DEFAULT_DT_S)?;
        samples.extend(ipcs.iter().map(|r| r.cycles));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("harvest never powers the load".into()));
    }
    Ok(CycleHistogram::from_samples(samples, DEFAULT_BUCKETS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::params::cycles_per_ipc;

    #[test]
    fn noiseless_profile_fills_one_bucket() {
        let p = EnergyParams::shipped();
        let h = cycle_histogram(&p, &HarvestProfile::noisy(100e-6, 0.0, 0), 100, 1).unwrap();
        assert_eq!(h.buckets.len(), 1);
        assert_eq!(h.buckets[0].count, 400);
    }

    #[test]
    fn noisy_profile_spreads_around_the_closed_form() {
        let p = EnergyParams::shipped();
        let h = cycle_histogram(&p, &HarvestProfile::noisy(100e-6, 0.1, 0), 100, 1).unwrap();
        assert!(h.buckets.len() > 1);
        assert!((h.mean() / cycles_per_ipc(&p) as f64 - 1.0).abs() < 0.1);
        assert_eq!(h.buckets.iter().map(|b| b.count).sum::<u64>(), 400);
        // Single mode.
        let counts: Vec<u64> = h.buckets.iter().map(|b| b.count).collect();
        let peak = counts.iter().enumerate().max_by_key(|x| x.1).unwrap().0;
        assert!(counts[..peak].windows(2).all(|w| w[0] <= w[1] + 10));
        assert!(counts[peak..].windows(2).all(|w| w[0] + 10 >= w[1]));
    }

    #[test]
    fn buckets_cover_samples() {
        let h = CycleHistogram::from_samples(vec![5, 5, 7, 30, 100], 4);
        assert_eq!(h.buckets.first().unwrap().low, 5);
        assert!(h.buckets.last().unwrap().high > 100);
        assert_eq!(h.buckets.iter().map(|b| b.count).sum::<u64>(), 5);
        assert!(h.to_csv().starts_with("bucket_low,bucket_high,count\n5,"));
        assert!(cycle_histogram(&EnergyParams::shipped(), &HarvestProfile::noisy(1e-4, 0.1, 0), 99, 0).is_err());
    }
}
