//! Success rate of a 1280-byte BLAKE2s hash against reader distance.

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::params::{distance_to_power, EnergyParams};
use super::profile::{HarvestProfile, DEFAULT_SEGMENT_S};
use super::sim::{success_rate, ExecutionPolicy, TaskSpec};

/// Cycles per byte of BLAKE2s on a 1280-byte message on the target MCU.
pub const BLAKE2S_LONG_CYCLES_PER_BYTE: u64 = 485;
pub const LONG_MESSAGE_BYTES: u64 = 1280;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub params: EnergyParams,
    /// Mean harvest at `d_ref_m`.
    pub p_ref_w: f64,
    pub d_ref_m: f64,
    pub rel_sigma: f64,
    pub segment_s: f64,
    pub distances_m: Vec<f64>,
    /// Distance at which the policies are compared head to head.
    pub mid_distance_m: f64,
    /// Distance at which only the checkpointing policy should work.
    pub far_distance_m: f64,
    pub task: TaskSpec,
    pub iem: ExecutionPolicy,
    pub timeout_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub distance_m: f64,
    pub power_w: f64,
    pub continuous: Option<f64>,
    pub iem: Option<f64>,
}

impl Experiment {
    /// The configuration tuned against the bundled calibration.
    pub fn shipped() -> Self {
        Self::with_params(EnergyParams::shipped())
    }

    pub fn with_params(params: EnergyParams) -> Self {
        Experiment {
            params,
            p_ref_w: 4.2e-3,
            d_ref_m: 0.4,
            rel_sigma: 0.35,
            segment_s: DEFAULT_SEGMENT_S,
            distances_m: vec![0.3, 0.35, 0.4, 0.45, 0.5, 0.6, 0.8, 1.0, 1.2, 1.5],
            mid_distance_m: 0.4,
            far_distance_m: 0.6,
            task: TaskSpec {
                total_cycles: BLAKE2S_LONG_CYCLES_PER_BYTE * LONG_MESSAGE_BYTES,
                checkpoint_granularity_cycles: 1000,
                checkpoint_cost_cycles: 200,
                restore_cost_cycles: 200,
            },
            iem: ExecutionPolicy::Iem { v_guard: 1.9, v_wake: 2.4 },
            timeout_s: 2.0,
        }
    }

    pub fn power_at(&self, distance_m: f64) -> Result<f64> {
        distance_to_power(distance_m, self.p_ref_w, self.d_ref_m)
    }

    pub fn profile_at(&self, distance_m: f64) -> Result<HarvestProfile> {
        Ok(HarvestProfile::Noisy {
            mean_w: self.power_at(distance_m)?,
            rel_sigma: self.rel_sigma,
            seed: 0,
            segment_s: self.segment_s,
        })
    }

    pub fn success_rate(&self, policy: &ExecutionPolicy, distance_m: f64, trials: usize, seed: u64) -> Result<f64> {
        let profile = self.profile_at(distance_m)?;
        success_rate(&self.params, &profile, &self.task, policy, trials, self.timeout_s, seed)
    }

    /// Success rates at every distance for the selected policies. Both
    /// policies see the same noise in the same trial.
    pub fn sweep(&self, continuous: bool, iem: bool, trials: usize, seed: u64) -> Result<Vec<SweepPoint>> {
        self.distances_m
            .iter()
            .map(|&d| {
                Ok(SweepPoint {
                    distance_m: d,
                    power_w: self.power_at(d)?,
                    continuous: if continuous {
                        Some(self.success_rate(&ExecutionPolicy::Continuous, d, trials, seed)?)
                    } else {
                        None
                    },
                    iem: if iem { Some(self.success_rate(&self.iem, d, trials, seed)?) } else { None },
                })
            })
            .collect()
    }
}
