//! Energy-harvesting device simulator.

pub mod experiment;
pub mod histogram;
pub mod params;
pub mod profile;
pub mod sim;

pub use experiment::{Experiment, SweepPoint};
pub use histogram::{cycle_histogram, CycleHistogram};
pub use params::{cycles_per_ipc, distance_to_power, energy_per_ipc, EnergyParams};
pub use profile::HarvestProfile;
pub use sim::{
    run_task, run_task_with_step, simulate_trace, success_rate, DeviceState, ExecutionPolicy, IpcRecord, SimOutcome,
    TaskSpec, Trace, TraceSample, DEFAULT_DT_S,
};
