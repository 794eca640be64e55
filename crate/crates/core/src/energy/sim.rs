//! Time-stepped simulation of the reservoir capacitor and the load.
//!
//! While the load is off the capacitor integrates the full stored energy
//! `C V^2 / 2` against harvest and leakage. That balance is linear between
//! changes in harvest power, so it is advanced in exact jumps.
//!
//! While the load is powered, the converter delivers `P` to the load by
//! drawing `P / eta(V)` from the capacitor, with `eta(V) = 1 - V_off / V`.
//! Tracked as the usable energy `U = C (V - V_off)^2 / 2` this becomes
//! `dU/dt = eta(V) P_harvest - P_state`, stepped with a midpoint rule.
//! Voltage thresholds and work completions inside a step are located by
//! interpolation, so event times do not snap to the step grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::params::EnergyParams;
use super::profile::{HarvestProfile, PowerSource};

/// Integration step while the load runs.
pub const DEFAULT_DT_S: f64 = 10e-6;
/// Sleep dynamics are slow; they step this many times coarser.
const SLEEP_STRIDE: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub total_cycles: u64,
    pub checkpoint_granularity_cycles: u64,
    pub checkpoint_cost_cycles: u64,
    pub restore_cost_cycles: u64,
}

impl TaskSpec {
    /// A task with no checkpoint overheads.
    pub fn plain(total_cycles: u64) -> Self {
        TaskSpec {
            total_cycles,
            checkpoint_granularity_cycles: 1,
            checkpoint_cost_cycles: 0,
            restore_cost_cycles: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.checkpoint_granularity_cycles > self.total_cycles.max(1) {
            return Err(Error::InvalidArgument(format!(
                "checkpoint granularity {} exceeds task length {}",
                self.checkpoint_granularity_cycles, self.total_cycles
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExecutionPolicy {
    /// Run until brownout, then start over.
    Continuous,
    /// Checkpoint and sleep once the capacitor falls to `v_guard`; resume
    /// once it recovers to `v_wake`.
    Iem { v_guard: f64, v_wake: f64 },
}

impl ExecutionPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ExecutionPolicy::Continuous => "continuous",
            ExecutionPolicy::Iem { .. } => "iem",
        }
    }

    pub fn validate(&self, params: &EnergyParams) -> Result<()> {
        if let ExecutionPolicy::Iem { v_guard, v_wake } = *self {
            if !(params.v_off < v_guard && v_guard < v_wake && v_wake <= params.v_on) {
                return Err(Error::InvalidArgument(format!(
                    "need v_off < v_guard < v_wake <= v_on, got guard {v_guard} wake {v_wake}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceState {
    Off,
    Active,
    Checkpoint,
    Sleep,
    Restore,
}

impl DeviceState {
    pub fn name(self) -> &'static str {
        match self {
            DeviceState::Off => "off",
            DeviceState::Active => "active",
            DeviceState::Checkpoint => "checkpoint",
            DeviceState::Sleep => "sleep",
            DeviceState::Restore => "restore",
        }
    }

    fn executes(self) -> bool {
        matches!(self, DeviceState::Active | DeviceState::Checkpoint | DeviceState::Restore)
    }
}

/// One stretch during which the load executed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpcRecord {
    pub start_s: f64,
    pub end_s: f64,
    pub cycles: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t_s: f64,
    pub v_cap: f64,
    pub state: DeviceState,
    pub cycles_done: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    /// Power cycles that ended by brownout or by the end of the run.
    pub ipcs: Vec<IpcRecord>,
    pub samples: Vec<TraceSample>,
}

impl Trace {
    /// `t_s,v_cap,state,cycles_done`, where `cycles_done` counts every
    /// cycle executed since the start.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_s,v_cap,state,cycles_done\n");
        for x in &self.samples {
            let _ = writeln!(s, "{:.9},{:.6},{},{}", x.t_s, x.v_cap, x.state.name(), x.cycles_done);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub completed: bool,
    pub wall_time_s: f64,
    /// Every cycle executed, including repeated work and checkpoint overheads.
    pub active_cycles_executed: u64,
    pub restarts: u64,
    pub checkpoints: u64,
    pub ipc_list: Vec<IpcRecord>,
    /// `(t_s, cycles)` each time saved task progress changes.
    pub progress_trace: Vec<(f64, u64)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Event {
    Brownout,
    Guard,
    Wake,
}

struct Engine<'a> {
    p: &'a EnergyParams,
    src: PowerSource,
    dt: f64,
    t: f64,
    v: f64,
    state: DeviceState,
    policy: ExecutionPolicy,
    total: f64,
    gran: f64,
    ckpt_cost: f64,
    restore_cost: f64,
    progress: f64,
    checkpoint: Option<f64>,
    overhead_left: f64,
    executed: f64,
    completed: bool,
    restarts: u64,
    checkpoints: u64,
    ipc_start: Option<f64>,
    ipc_cycles: f64,
    ipcs: Vec<IpcRecord>,
    progress_trace: Vec<(f64, u64)>,
    sample_every: Option<f64>,
    next_sample: f64,
    samples: Vec<TraceSample>,
}

impl<'a> Engine<'a> {
    fn new(p: &'a EnergyParams, profile: &HarvestProfile, policy: ExecutionPolicy, task: Option<&TaskSpec>, dt: f64) -> Self {
        let (total, gran, ckpt, restore) = match task {
            Some(t) => (
                t.total_cycles as f64,
                t.checkpoint_granularity_cycles.max(1) as f64,
                t.checkpoint_cost_cycles as f64,
                t.restore_cost_cycles as f64,
            ),
            None => (f64::INFINITY, 1.0, 0.0, 0.0),
        };
        Engine {
            p,
            src: profile.source(),
            dt,
            t: 0.0,
            v: 0.0,
            state: DeviceState::Off,
            policy,
            total,
            gran,
            ckpt_cost: ckpt,
            restore_cost: restore,
            progress: 0.0,
            checkpoint: None,
            overhead_left: 0.0,
            executed: 0.0,
            completed: false,
            restarts: 0,
            checkpoints: 0,
            ipc_start: None,
            ipc_cycles: 0.0,
            ipcs: Vec::new(),
            progress_trace: vec![(0.0, 0)],
            sample_every: None,
            next_sample: f64::INFINITY,
            samples: Vec::new(),
        }
    }

    fn usable(&self, v: f64) -> f64 {
        let d = (v - self.p.v_off).max(0.0);
        0.5 * self.p.capacitance_f * d * d
    }

    fn v_from_usable(&self, u: f64) -> f64 {
        self.p.v_off + (2.0 * u.max(0.0) / self.p.capacitance_f).sqrt()
    }

    fn stored(&self, v: f64) -> f64 {
        0.5 * self.p.capacitance_f * v * v
    }

    fn v_from_stored(&self, e: f64) -> f64 {
        (2.0 * e.max(0.0) / self.p.capacitance_f).sqrt()
    }

    fn sample(&mut self) {
        if self.sample_every.is_some() {
            self.samples.push(TraceSample {
                t_s: self.t,
                v_cap: self.v,
                state: self.state,
                cycles_done: self.executed.floor() as u64,
            });
        }
    }

    fn set_state(&mut self, s: DeviceState) {
        self.state = s;
        self.sample();
    }

    fn saved_progress(&self) -> u64 {
        if self.progress >= self.total {
            return self.total as u64;
        }
        match self.policy {
            ExecutionPolicy::Continuous => self.progress.floor() as u64,
            ExecutionPolicy::Iem { .. } => ((self.progress / self.gran).floor() * self.gran) as u64,
        }
    }

    fn note_progress(&mut self) {
        let x = self.saved_progress();
        if self.progress_trace.last().is_none_or(|&(_, last)| last != x) {
            self.progress_trace.push((self.t, x));
        }
    }

    fn open_ipc(&mut self) {
        self.ipc_start = Some(self.t);
        self.ipc_cycles = 0.0;
    }

    fn close_ipc(&mut self) {
        if let Some(start) = self.ipc_start.take() {
            self.ipcs.push(IpcRecord { start_s: start, end_s: self.t, cycles: self.ipc_cycles.round() as u64 });
        }
    }

    fn begin_overhead(&mut self, state: DeviceState, cycles: f64) {
        if cycles > 0.0 {
            self.overhead_left = cycles;
            self.set_state(state);
        } else {
            self.overhead_left = 0.0;
            self.finish_overhead(state);
        }
    }

    fn finish_overhead(&mut self, state: DeviceState) {
        match state {
            DeviceState::Checkpoint => {
                self.checkpoint = Some(self.progress);
                self.checkpoints += 1;
                self.close_ipc();
                self.set_state(DeviceState::Sleep);
            }
            DeviceState::Restore => self.set_state(DeviceState::Active),
            _ => unreachable!(),
        }
    }

    fn power_on(&mut self) {
        self.open_ipc();
        match self.policy {
            ExecutionPolicy::Iem { .. } if self.checkpoint.is_some() => {
                self.begin_overhead(DeviceState::Restore, self.restore_cost)
            }
            _ => self.set_state(DeviceState::Active),
        }
    }

    fn brownout(&mut self) {
        self.v = self.p.v_off;
        let was = self.state;
        if was != DeviceState::Sleep {
            self.close_ipc();
        }
        self.note_progress();
        match self.policy {
            ExecutionPolicy::Continuous => {
                if self.progress > 0.0 {
                    self.restarts += 1;
                }
                self.progress = 0.0;
            }
            ExecutionPolicy::Iem { .. } => {
                if was.executes() {
                    self.restarts += 1;
                }
                self.progress = self.checkpoint.unwrap_or(0.0);
            }
        }
        self.overhead_left = 0.0;
        self.note_progress();
        self.set_state(DeviceState::Off);
    }

    fn run(&mut self, t_end: f64, stop_after_ipcs: Option<usize>) {
        self.sample();
        while self.t < t_end && !self.completed {
            if stop_after_ipcs.is_some_and(|n| self.ipcs.len() >= n) {
                break;
            }
            if let Some(every) = self.sample_every {
                if self.t >= self.next_sample {
                    self.sample();
                    self.next_sample += every;
                    while self.next_sample <= self.t {
                        self.next_sample += every;
                    }
                }
            }
            if self.state == DeviceState::Off {
                self.step_off(t_end);
            } else {
                self.step_powered(t_end);
            }
        }
        if !self.completed {
            self.close_ipc();
        }
        self.sample();
    }

    fn step_off(&mut self, t_end: f64) {
        if self.v >= self.p.v_on {
            self.power_on();
            return;
        }
        let (ph, seg_end) = self.src.at(self.t);
        let rate = ph - self.p.p_leak_w;
        let limit = seg_end.min(t_end).min(self.next_sample);
        let e = self.stored(self.v);
        if rate > 0.0 {
            let t_hit = self.t + (self.stored(self.p.v_on) - e) / rate;
            if t_hit <= limit {
                self.t = t_hit;
                self.v = self.p.v_on;
                self.power_on();
                return;
            }
        }
        let e1 = (e + rate * (limit - self.t)).clamp(0.0, self.stored(self.p.v_max));
        self.t = limit;
        self.v = self.v_from_stored(e1);
    }

    fn step_powered(&mut self, t_end: f64) {
        let p = self.p;
        let (u_guard, u_wake) = match self.policy {
            ExecutionPolicy::Iem { v_guard, v_wake } => (self.usable(v_guard), self.usable(v_wake)),
            ExecutionPolicy::Continuous => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let u0 = self.usable(self.v);
        match self.state {
            DeviceState::Active if u0 <= u_guard => {
                self.progress = (self.progress / self.gran).floor() * self.gran;
                self.note_progress();
                return self.begin_overhead(DeviceState::Checkpoint, self.ckpt_cost);
            }
            DeviceState::Sleep if u0 >= u_wake => {
                self.open_ipc();
                return self.begin_overhead(DeviceState::Restore, self.restore_cost);
            }
            _ => {}
        }

        let (ph, seg_end) = self.src.at(self.t);
        let (draw, h) = if self.state == DeviceState::Sleep {
            (p.p_sleep_w, self.dt * SLEEP_STRIDE)
        } else {
            (p.p_load_w, self.dt)
        };
        let mut limit = (self.t + h).min(seg_end).min(t_end).min(self.next_sample);
        let mut work_done = false;
        if self.state.executes() {
            let left = if self.state == DeviceState::Active { self.total - self.progress } else { self.overhead_left };
            let t_work = self.t + left / p.f_cpu_hz;
            if t_work <= limit {
                limit = t_work;
                work_done = true;
            }
        }
        let h = limit - self.t;

        let rate = |u: f64| p.efficiency(self.v_from_usable(u)) * ph - draw;
        let k1 = rate(u0);
        let k2 = rate((u0 + 0.5 * h * k1).max(0.0));
        let u_max = self.usable(p.v_max);
        let u1 = (u0 + h * k2).min(u_max);

        let mut frac = 1.0;
        let mut event = None;
        if u1 < 0.0 {
            frac = u0 / (u0 - u1);
            event = Some(Event::Brownout);
        }
        if self.state == DeviceState::Active && u1 <= u_guard {
            let f = (u0 - u_guard) / (u0 - u1);
            if f <= frac {
                frac = f;
                event = Some(Event::Guard);
            }
        }
        if self.state == DeviceState::Sleep && u1 >= u_wake {
            frac = (u_wake - u0) / (u1 - u0);
            event = Some(Event::Wake);
        }
        let frac = frac.clamp(0.0, 1.0);
        if event.is_some() {
            work_done = false;
        }

        self.t += h * frac;
        self.v = match event {
            Some(Event::Brownout) => p.v_off,
            Some(Event::Guard) => match self.policy {
                ExecutionPolicy::Iem { v_guard, .. } => v_guard,
                ExecutionPolicy::Continuous => unreachable!(),
            },
            Some(Event::Wake) => match self.policy {
                ExecutionPolicy::Iem { v_wake, .. } => v_wake,
                ExecutionPolicy::Continuous => unreachable!(),
            },
            None => self.v_from_usable(u0 + (u1 - u0) * frac),
        };
        if self.state.executes() {
            let cycles = if work_done {
                if self.state == DeviceState::Active { self.total - self.progress } else { self.overhead_left }
            } else {
                p.f_cpu_hz * h * frac
            };
            self.executed += cycles;
            self.ipc_cycles += cycles;
            if self.state == DeviceState::Active {
                self.progress += cycles;
            } else {
                self.overhead_left -= cycles;
            }
        }

        match event {
            Some(Event::Brownout) => self.brownout(),
            // Handled at the top of the next step.
            Some(Event::Guard) | Some(Event::Wake) => {}
            None if work_done => match self.state {
                DeviceState::Active => {
                    self.progress = self.total;
                    self.completed = true;
                    self.close_ipc();
                    self.note_progress();
                    self.sample();
                }
                s => {
                    self.overhead_left = 0.0;
                    self.finish_overhead(s);
                }
            },
            None => {}
        }
    }
}

fn check_run(params: &EnergyParams, profile: &HarvestProfile, duration_s: f64, dt_s: f64) -> Result<()> {
    params.validate()?;
    profile.validate()?;
    if !(duration_s > 0.0 && duration_s.is_finite() && dt_s > 0.0 && dt_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("need positive finite duration and step, got {duration_s} and {dt_s}")));
    }
    Ok(())
}

/// Runs the device with an endless task, recording power cycles and
/// voltage samples at most `duration_s / 10000` apart plus every state change.
pub fn simulate_trace(params: &EnergyParams, profile: &HarvestProfile, duration_s: f64, dt_s: f64) -> Result<Trace> {
    check_run(params, profile, duration_s, dt_s)?;
    let mut e = Engine::new(params, profile, ExecutionPolicy::Continuous, None, dt_s);
    let every = (duration_s / 10_000.0).max(dt_s);
    e.sample_every = Some(every);
    e.next_sample = every;
    e.run(duration_s, None);
    Ok(Trace { ipcs: e.ipcs, samples: e.samples })
}

/// Per-IPC cycles of the first `n` complete power cycles, without samples.
pub(crate) fn ipc_cycles(params: &EnergyParams, profile: &HarvestProfile, n: usize, max_s: f64, dt_s: f64) -> Result<Vec<IpcRecord>> {
    check_run(params, profile, max_s, dt_s)?;
    let mut e = Engine::new(params, profile, ExecutionPolicy::Continuous, None, dt_s);
    e.run(max_s, Some(n));
    e.ipcs.truncate(n);
    Ok(e.ipcs)
}

/// Executes `task` from an empty capacitor until it completes or
/// `timeout_s` passes. A noisy profile draws its noise from `seed`.
pub fn run_task(
    params: &EnergyParams,
    profile: &HarvestProfile,
    task: &TaskSpec,
    policy: &ExecutionPolicy,
    timeout_s: f64,
    seed: u64,
) -> Result<SimOutcome> {
    run_task_with_step(params, profile, task, policy, timeout_s, seed, DEFAULT_DT_S)
}

pub fn run_task_with_step(
    params: &EnergyParams,
    profile: &HarvestProfile,
    task: &TaskSpec,
    policy: &ExecutionPolicy,
    timeout_s: f64,
    seed: u64,
    dt_s: f64,
) -> Result<SimOutcome> {
    check_run(params, profile, timeout_s, dt_s)?;
    task.validate()?;
    policy.validate(params)?;
    let profile = profile.reseeded(seed);
    let mut e = Engine::new(params, &profile, *policy, Some(task), dt_s);
    if task.total_cycles == 0 {
        e.completed = true;
    }
    e.run(timeout_s, None);
    Ok(SimOutcome {
        completed: e.completed,
        wall_time_s: e.t,
        active_cycles_executed: e.executed.round() as u64,
        restarts: e.restarts,
        checkpoints: e.checkpoints,
        ipc_list: e.ipcs,
        progress_trace: e.progress_trace,
    })
}

/// Fraction of `trials` runs that complete; trial `i` uses noise seed
/// `rng::split(seed, i)`.
pub fn success_rate(
    params: &EnergyParams,
    profile: &HarvestProfile,
    task: &TaskSpec,
    policy: &ExecutionPolicy,
    trials: usize,
    timeout_s: f64,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("success rate needs at least one trial".into()));
    }
    let mut ok = 0usize;
    for i in 0..trials {
        if run_task(params, profile, task, policy, timeout_s, rng::split(seed, i as u64))?.completed {
            ok += 1;
        }
    }
    Ok(ok as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::params::cycles_per_ipc;

    fn params() -> EnergyParams {
        EnergyParams::shipped()
    }

    /// Params whose power cycle holds `cycles` cycles.
    fn params_with_budget(cycles: f64) -> EnergyParams {
        let p = params();
        let e = cycles * p.p_load_w / p.f_cpu_hz;
        let dv = p.v_on - p.v_off;
        EnergyParams { capacitance_f: 2.0 * e / (dv * dv), ..p }
    }

    fn constant(w: f64) -> HarvestProfile {
        HarvestProfile::Constant { power_w: w }
    }

    fn iem(guard: f64) -> ExecutionPolicy {
        ExecutionPolicy::Iem { v_guard: guard, v_wake: 2.4 }
    }

    #[test]
    fn no_harvest_no_cycles() {
        let t = simulate_trace(&params(), &constant(0.0), 10.0, DEFAULT_DT_S).unwrap();
        assert!(t.ipcs.is_empty());
        assert!(t.samples.iter().all(|s| s.v_cap == 0.0 && s.state == DeviceState::Off));
    }

    #[test]
    fn saturating_harvest_runs_continuously() {
        let p = params();
        let t = simulate_trace(&p, &constant(50.0 * p.p_load_w), 1.0, DEFAULT_DT_S).unwrap();
        assert_eq!(t.ipcs.len(), 1);
        assert_eq!(t.ipcs[0].end_s, 1.0);
        assert!(t.ipcs[0].start_s < 0.01);
        assert!(t.samples.iter().all(|s| s.v_cap <= p.v_max + 1e-12));
        assert!((t.samples.last().unwrap().v_cap - p.v_max).abs() < 1e-9);
    }

    #[test]
    fn weak_harvest_matches_closed_form() {
        let p = params();
        let want = cycles_per_ipc(&p) as f64;
        let t = simulate_trace(&p, &constant(40e-6), 20.0, DEFAULT_DT_S).unwrap();
        assert!(t.ipcs.len() >= 3);
        for r in &t.ipcs[..t.ipcs.len() - 1] {
            assert!((r.cycles as f64 / want - 1.0).abs() < 0.05, "{} vs {want}", r.cycles);
        }
    }

    #[test]
    fn halving_the_step_changes_little() {
        let p = params();
        for w in [50e-6, 1e-3, 4e-3] {
            let a = ipc_cycles(&p, &constant(w), 2, 30.0, DEFAULT_DT_S).unwrap();
            let b = ipc_cycles(&p, &constant(w), 2, 30.0, DEFAULT_DT_S / 2.0).unwrap();
            assert_eq!(a.len(), 2);
            for (x, y) in a.iter().zip(&b) {
                assert!((x.cycles as f64 / y.cycles as f64 - 1.0).abs() < 0.01, "{w}: {x:?} {y:?}");
            }
        }
    }

    #[test]
    fn voltage_stays_in_range_and_energy_is_not_created() {
        let p = params();
        for (w, seed) in [(2e-3, 1), (8e-3, 2), (300e-6, 3)] {
            let prof = HarvestProfile::noisy(w, 0.5, seed);
            let t = simulate_trace(&p, &prof, 2.0, DEFAULT_DT_S).unwrap();
            assert!(t.samples.iter().all(|s| (0.0..=p.v_max + 1e-12).contains(&s.v_cap)));
            // Upper bound of harvested energy over the run.
            let mut src = prof.source();
            let mut harvested = 0.0;
            let mut tt = 0.0;
            while tt < 2.0 {
                let (x, end) = src.at(tt);
                harvested += x * (end.min(2.0) - tt);
                tt = end;
            }
            let e_end = 0.5 * p.capacitance_f * t.samples.last().unwrap().v_cap.powi(2);
            let work = t.samples.last().unwrap().cycles_done as f64 * p.p_load_w / p.f_cpu_hz;
            assert!(e_end + work <= harvested * 1.01, "{e_end} + {work} > {harvested}");
        }
    }

    #[test]
    fn one_long_ipc_completes_without_restart() {
        let p = params();
        let task = TaskSpec::plain(cycles_per_ipc(&p) / 2);
        let o = run_task(&p, &constant(40e-6), &task, &ExecutionPolicy::Continuous, 20.0, 0).unwrap();
        assert!(o.completed);
        assert_eq!(o.restarts, 0);
        assert_eq!(o.ipc_list.len(), 1);
        assert_eq!(o.active_cycles_executed, task.total_cycles);
    }

    #[test]
    fn continuous_never_finishes_a_task_longer_than_a_cycle() {
        let p = params_with_budget(10_000.0);
        let task = TaskSpec {
            total_cycles: 30_000,
            checkpoint_granularity_cycles: 1000,
            checkpoint_cost_cycles: 100,
            restore_cost_cycles: 100,
        };
        let prof = constant(20e-6);
        let c = run_task(&p, &prof, &task, &ExecutionPolicy::Continuous, 10.0, 0).unwrap();
        assert!(!c.completed);
        assert!(c.restarts >= 3);
        assert!(c.ipc_list.iter().all(|r| r.cycles < 30_000));
        // Progress resets to zero at every brownout.
        let zeros = c.progress_trace.iter().skip(1).filter(|&&(_, x)| x == 0).count();
        assert_eq!(zeros as u64, c.restarts);

        let i = run_task(&p, &prof, &task, &iem(1.9), 10.0, 0).unwrap();
        assert!(i.completed);
        assert_eq!(i.restarts, 0);
        assert_eq!(i.ipc_list.len(), 4);
        assert_eq!(i.checkpoints, 3);
    }

    #[test]
    fn iem_progress_never_decreases() {
        let e = crate::energy::Experiment::shipped();
        for seed in 0..10 {
            let prof = HarvestProfile::noisy(1e-3, 0.5, 0);
            let o = run_task(&e.params, &prof, &e.task, &e.iem, 3.0, seed).unwrap();
            assert_eq!(o.restarts, 0);
            assert!(o.progress_trace.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 <= w[1].0));
            if o.completed {
                assert_eq!(o.progress_trace.last().unwrap().1, e.task.total_cycles);
                assert!(o.active_cycles_executed >= e.task.total_cycles);
            }
        }
    }

    #[test]
    fn brownout_during_checkpoint_keeps_old_checkpoint() {
        // A guard so close to brownout that the checkpoint cannot finish.
        let p = params_with_budget(10_000.0);
        let task = TaskSpec {
            total_cycles: 30_000,
            checkpoint_granularity_cycles: 1000,
            checkpoint_cost_cycles: 5_000,
            restore_cost_cycles: 0,
        };
        let o = run_task(&p, &constant(20e-6), &task, &iem(1.85), 10.0, 0).unwrap();
        assert!(!o.completed);
        assert_eq!(o.checkpoints, 0);
        assert!(o.restarts >= 2);
        assert!(o.progress_trace.iter().all(|&(_, x)| x == 0 || x % 1000 == 0));
    }

    #[test]
    fn success_rate_extremes() {
        let e = crate::energy::Experiment::shipped();
        for pol in [ExecutionPolicy::Continuous, e.iem] {
            let none = success_rate(&e.params, &constant(0.0), &e.task, &pol, 5, 2.0, 0).unwrap();
            assert_eq!(none, 0.0);
            let lots = success_rate(&e.params, &constant(1.0), &e.task, &pol, 5, 2.0, 0).unwrap();
            assert_eq!(lots, 1.0);
        }
        assert!(success_rate(&e.params, &constant(1.0), &e.task, &e.iem, 0, 2.0, 0).is_err());
    }

    #[test]
    fn success_rate_grows_with_power() {
        let e = crate::energy::Experiment::shipped();
        for pol in [ExecutionPolicy::Continuous, e.iem] {
            let mut prev = 0.0;
            for k in 1..=10 {
                let prof = HarvestProfile::noisy(k as f64 * 0.6e-3, 0.35, 0);
                let r = success_rate(&e.params, &prof, &e.task, &pol, 40, 2.0, 9).unwrap();
                assert!(r >= prev, "{} at {k}: {r} < {prev}", pol.name());
                prev = r;
            }
            assert_eq!(prev, 1.0);
        }
    }

    #[test]
    fn bad_inputs_rejected() {
        let p = params();
        assert!(simulate_trace(&p, &constant(1e-3), 0.0, 1e-5).is_err());
        assert!(simulate_trace(&p, &constant(1e-3), 1.0, 0.0).is_err());
        assert!(simulate_trace(&p, &constant(f64::NAN), 1.0, 1e-5).is_err());
        let bad = EnergyParams { v_on: f64::INFINITY, ..p };
        assert!(simulate_trace(&bad, &constant(1e-3), 1.0, 1e-5).is_err());
        let task = TaskSpec::plain(10);
        let wake_high = ExecutionPolicy::Iem { v_guard: 1.9, v_wake: 2.5 };
        assert!(run_task(&p, &constant(1e-3), &task, &wake_high, 1.0, 0).is_err());
        let guard_low = ExecutionPolicy::Iem { v_guard: 1.8, v_wake: 2.4 };
        assert!(run_task(&p, &constant(1e-3), &task, &guard_low, 1.0, 0).is_err());
        let coarse = TaskSpec { checkpoint_granularity_cycles: 11, ..task };
        assert!(run_task(&p, &constant(1e-3), &coarse, &iem(1.9), 1.0, 0).is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let t = simulate_trace(&params(), &constant(5e-3), 0.1, DEFAULT_DT_S).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("t_s,v_cap,state,cycles_done\n"));
        assert!(csv.contains(",active,"));
        assert!(t.samples.windows(2).all(|w| w[0].t_s <= w[1].t_s));
    }
}
