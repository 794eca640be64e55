//! Harvested power over time.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::params::distance_to_power;

/// Default length of one constant-power stretch of a noisy profile.
pub const DEFAULT_SEGMENT_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarvestProfile {
    Constant { power_w: f64 },
    /// Piecewise constant: each `segment_s` stretch draws
    /// `mean (1 + rel_sigma z)`, `z` standard normal, floored at zero.
    Noisy { mean_w: f64, rel_sigma: f64, seed: u64, segment_s: f64 },
    DistanceScaled { p_ref_w: f64, d_ref_m: f64, d_m: f64 },
}

impl HarvestProfile {
    pub fn noisy(mean_w: f64, rel_sigma: f64, seed: u64) -> Self {
        HarvestProfile::Noisy { mean_w, rel_sigma, seed, segment_s: DEFAULT_SEGMENT_S }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            HarvestProfile::Constant { power_w } => power_w.is_finite() && power_w >= 0.0,
            HarvestProfile::Noisy { mean_w, rel_sigma, segment_s, .. } => {
                mean_w.is_finite() && mean_w >= 0.0 && rel_sigma.is_finite() && rel_sigma >= 0.0
                    && segment_s.is_finite() && segment_s > 0.0
            }
            HarvestProfile::DistanceScaled { p_ref_w, d_ref_m, d_m } => {
                distance_to_power(d_m, p_ref_w, d_ref_m).is_ok_and(f64::is_finite)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid harvest profile {self:?}")))
        }
    }

    /// Long-run average power.
    pub fn mean_power(&self) -> f64 {
        match *self {
            HarvestProfile::Constant { power_w } => power_w,
            HarvestProfile::Noisy { mean_w, .. } => mean_w,
            HarvestProfile::DistanceScaled { p_ref_w, d_ref_m, d_m } => {
                distance_to_power(d_m, p_ref_w, d_ref_m).unwrap_or(0.0)
            }
        }
    }

    /// The same profile drawing its noise from `seed`.
    pub fn reseeded(&self, seed: u64) -> Self {
        match *self {
            HarvestProfile::Noisy { mean_w, rel_sigma, segment_s, .. } => {
                HarvestProfile::Noisy { mean_w, rel_sigma, seed, segment_s }
            }
            other => other,
        }
    }

    pub(crate) fn source(&self) -> PowerSource {
        match *self {
            HarvestProfile::Noisy { mean_w, rel_sigma, seed, segment_s } => PowerSource {
                segment_s,
                noise: Some((mean_w, rel_sigma, rng::stream(seed, 0))),
                segments: Vec::new(),
                constant: 0.0,
            },
            _ => PowerSource { segment_s: f64::INFINITY, noise: None, segments: Vec::new(), constant: self.mean_power() },
        }
    }
}

/// Lazily sampled power of one run.
pub(crate) struct PowerSource {
    segment_s: f64,
    noise: Option<(f64, f64, rng::Rng)>,
    segments: Vec<f64>,
    constant: f64,
}

impl PowerSource {
    /// Power at time `t` and the end of the stretch over which it holds.
    pub(crate) fn at(&mut self, t: f64) -> (f64, f64) {
        let Some((mean, sigma, rng)) = &mut self.noise else {
            return (self.constant, f64::INFINITY);
        };
        let mut k = (t / self.segment_s).floor() as usize;
        if (k + 1) as f64 * self.segment_s <= t {
            k += 1;
        }
        while self.segments.len() <= k {
            let z: f64 = StandardNormal.sample(rng);
            self.segments.push((*mean * (1.0 + *sigma * z)).max(0.0));
        }
        (self.segments[k], (k + 1) as f64 * self.segment_s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_distance() {
        let mut s = HarvestProfile::Constant { power_w: 1e-3 }.source();
        assert_eq!(s.at(5.0), (1e-3, f64::INFINITY));
        let d = HarvestProfile::DistanceScaled { p_ref_w: 4e-3, d_ref_m: 0.4, d_m: 0.8 };
        assert_eq!(d.mean_power(), 1e-3);
        assert!(HarvestProfile::DistanceScaled { p_ref_w: 4e-3, d_ref_m: 0.4, d_m: 0.0 }.validate().is_err());
    }

    #[test]
    fn noisy_is_seeded_piecewise_constant() {
        let p = HarvestProfile::noisy(1e-3, 0.1, 7);
        let (mut a, mut b) = (p.source(), p.source());
        let (x, end) = a.at(0.25);
        assert_eq!(end, 0.30000000000000004);
        assert_eq!(a.at(0.21).0, x);
        assert_eq!(b.at(0.25).0, x);
        assert_ne!(p.reseeded(8).source().at(0.25).0, x);
    }

    #[test]
    fn noisy_statistics() {
        let mut s = HarvestProfile::noisy(1e-3, 0.1, 1).source();
        let xs: Vec<f64> = (0..20_000).map(|k| s.at(k as f64 * 0.1 + 0.05).0).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((mean / 1e-3 - 1.0).abs() < 0.005);
        assert!((var.sqrt() / 1e-4 - 1.0).abs() < 0.03);
        let mut z = HarvestProfile::noisy(1e-3, 5.0, 1).source();
        assert!((0..1000).all(|k| z.at(k as f64 * 0.1).0 >= 0.0));
    }
}
