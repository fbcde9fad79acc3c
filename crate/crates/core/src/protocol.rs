//! The GHZ protocol: coupling tuning, pulse schedules, target states, runs
//! under each model level, scoring and parameter sweeps.
//!
//! For a block with sideband matrix element `c = g' η_c √(mn)` the closed-form
//! dynamics rotate at `a = c/2` and `μ = √(a² + Ω²)`. A pulse of length
//! `t_p = pπ/μ` with `a t_p = π/4` (equivalently `μ/a = 4p`) maps each block
//! basis state `|s⟩` onto `(−1)^p (|s⟩ − i|s̄⟩)/√2`, where `|s̄⟩` has the ion
//! flipped and both modes moved to the other level of the block.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::evolution::{
    block_propagate, evolve_timedep_sampled, to_interaction_picture, Amplitudes, BlockState,
    StaticPropagator, STEPS_PER_PERIOD,
};
use crate::fock::{basis_state, HilbertShape, Label, QuantumState};
use crate::hamiltonian::{
    build_ld_hamiltonian, build_rwa_hamiltonian, BlockParams, LabHamiltonian, SystemParams,
    TimeDependentHamiltonian,
};
use crate::{Error, Result, C64};

/// Populations below this are left out of reports.
pub const POPULATION_FLOOR: f64 = 1e-6;
/// Top-level population that aborts a full-space run.
pub const TRUNCATION_LIMIT: f64 = 1e-4;
/// Relative tolerance on `μ/a = 4p` for untuned parameters.
pub const TUNING_TOL: f64 = 1e-9;
/// Trajectory samples used to watch the truncation boundary.
pub const WATCH_SAMPLES: usize = 65;

/// Hamiltonian level used to evolve the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Closed-form 4×4 Lamb-Dicke block.
    BlockAnalytic,
    /// Lamb-Dicke Hamiltonian on the full truncated space.
    LdFull,
    /// RWA Hamiltonian with all Lamb-Dicke orders on the full truncated space.
    RwaFull,
    /// Time-dependent lab-frame Hamiltonian, RK4.
    LabFrame,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::BlockAnalytic,
        Model::LdFull,
        Model::RwaFull,
        Model::LabFrame,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Model::BlockAnalytic => "block_analytic",
            Model::LdFull => "ld_full",
            Model::RwaFull => "rwa_full",
            Model::LabFrame => "lab_frame",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" | "block_analytic" => Ok(Model::BlockAnalytic),
            "ld" | "ld_full" => Ok(Model::LdFull),
            "rwa" | "rwa_full" => Ok(Model::RwaFull),
            "lab" | "lab_frame" => Ok(Model::LabFrame),
            other => Err(Error::InvalidArgument(format!(
                "unknown model '{other}' (expected block, ld, rwa or lab)"
            ))),
        }
    }
}

/// Cavity coupling `g` that makes `μ/a = 4p` in block `(m, n)`:
/// `g = 2Ω / (η_c √(mn) √(16p² − 1))`.
pub fn tune_block_coupling(omega: f64, eta_c: f64, m: usize, n: usize, p: u32) -> Result<f64> {
    if eta_c.is_nan() || eta_c <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tuning needs eta_c > 0 (got {eta_c})"
        )));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("pulse index p must be >= 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "block indices must be >= 1 (got m={m}, n={n})"
        )));
    }
    let p = p as f64;
    Ok(2.0 * omega / (eta_c * ((m * n) as f64).sqrt() * (16.0 * p * p - 1.0).sqrt()))
}

/// Tuned coupling for the `(1, 1)` block.
pub fn tune_coupling(omega: f64, eta_c: f64, p: u32) -> Result<f64> {
    tune_block_coupling(omega, eta_c, 1, 1, p)
}

/// Pulse timing and target of one protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolSchedule {
    pub p: u32,
    /// `pπ/μ`.
    pub t_p: f64,
    /// `a t_p`; `π/4` for GHZ schedules.
    pub a_t_product: f64,
    /// Physical cavity coupling `g` (before the `cos φ` node-offset factor).
    pub tuned_g: f64,
    pub block: BlockParams,
    pub initial: Label,
    pub target: QuantumState,
}

/// Partner of a block basis state: ion flipped, modes on the other block level.
pub fn ghz_partner(label: Label, m: usize, n: usize) -> Result<Label> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "block indices must be >= 1 (got m={m}, n={n})"
        )));
    }
    if label.m == m && label.n == n {
        Ok(Label::new(label.ion.flipped(), m - 1, n - 1))
    } else if label.m + 1 == m && label.n + 1 == n {
        Ok(Label::new(label.ion.flipped(), m, n))
    } else {
        Err(Error::Index(format!(
            "|{label}⟩ is not in block (m={m}, n={n})"
        )))
    }
}

/// `(−1)^p (|label⟩ − i|partner⟩)/√2`, the state reached after a GHZ pulse.
pub fn target_state(
    label: Label,
    m: usize,
    n: usize,
    p: u32,
    shape: HilbertShape,
) -> Result<QuantumState> {
    let partner = ghz_partner(label, m, n)?;
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    QuantumState::from_labels(
        shape,
        &[
            (label, C64::new(sign * FRAC_1_SQRT_2, 0.0)),
            (partner, C64::new(0.0, -sign * FRAC_1_SQRT_2)),
        ],
    )
}

/// `|⟨target|ψ⟩|²`.
pub fn fidelity(psi: &QuantumState, target: &QuantumState) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr())
}

/// Builds the schedule for block `(m, n)` and pulse index `p`.
///
/// With `tune`, `g` is replaced by the tuned coupling divided by `cos φ`, so
/// the effective coupling at the node offset is the tuned one. Without it,
/// the parameters must already satisfy `μ/a = 4p`. Returns the parameters
/// actually used alongside the schedule.
pub fn ghz_schedule(
    params: &SystemParams,
    shape: HilbertShape,
    initial: Label,
    m: usize,
    n: usize,
    p: u32,
    tune: bool,
) -> Result<(SystemParams, ProtocolSchedule)> {
    schedule_impl(params, shape, initial, m, n, p, tune, true)
}

#[allow(clippy::too_many_arguments)]
fn schedule_impl(
    params: &SystemParams,
    shape: HilbertShape,
    initial: Label,
    m: usize,
    n: usize,
    p: u32,
    tune: bool,
    require_tuned: bool,
) -> Result<(SystemParams, ProtocolSchedule)> {
    params.validate()?;
    if p == 0 {
        return Err(Error::InvalidArgument("pulse index p must be >= 1".into()));
    }
    let mut used = *params;
    if tune {
        let cos = params.phi.cos();
        if cos.abs() < 1e-12 {
            return Err(Error::Configuration(format!(
                "cannot tune the cavity coupling at node offset phi = {} (cos phi = 0)",
                params.phi
            )));
        }
        used.g = tune_block_coupling(params.omega, params.eta_c, m, n, p)? / cos;
    }
    let block = BlockParams::from_params(&used, m, n)?;
    if require_tuned && !tune {
        let ratio = block.mu / block.a;
        let want = 4.0 * p as f64;
        if ratio.is_nan() || (ratio - want).abs() > TUNING_TOL * want {
            return Err(Error::Configuration(format!(
                "parameters are not tuned for p = {p}: mu/a = {ratio:.12e}, need {want}; request tuning or fix g"
            )));
        }
    }
    if block.mu == 0.0 {
        return Err(Error::Configuration(
            "omega and the cavity coupling are both zero".into(),
        ));
    }
    let t_p = p as f64 * PI / block.mu;
    let target = target_state(initial, m, n, p, shape)?;
    Ok((
        used,
        ProtocolSchedule {
            p,
            t_p,
            a_t_product: block.a * t_p,
            tuned_g: used.g,
            block,
            initial,
            target,
        },
    ))
}

/// Everything needed to run the protocol once.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSetup {
    pub params: SystemParams,
    pub shape: HilbertShape,
    pub model: Model,
    pub initial: Label,
    /// Block indices `(m, n)`.
    pub block: (usize, usize),
    pub p: u32,
    /// Replace `g` by the tuned coupling.
    pub tune: bool,
    /// Interaction time overriding `t_p`; skips the tuning check.
    pub time: Option<f64>,
    /// RK4 step for the lab-frame model.
    pub dt: Option<f64>,
}

impl ProtocolSetup {
    /// `|g,0,0⟩` in block `(1, 1)`, `p = 1`, tuned.
    pub fn new(params: SystemParams, shape: HilbertShape, model: Model) -> Self {
        ProtocolSetup {
            params,
            shape,
            model,
            initial: Label::g(0, 0),
            block: (1, 1),
            p: 1,
            tune: true,
            time: None,
            dt: None,
        }
    }

    pub fn with_initial(mut self, initial: Label) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_p(mut self, p: u32) -> Self {
        self.p = p;
        self
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn with_tune(mut self, tune: bool) -> Self {
        self.tune = tune;
        self
    }

    pub fn schedule(&self) -> Result<(SystemParams, ProtocolSchedule)> {
        let (m, n) = self.block;
        schedule_impl(
            &self.params,
            self.shape,
            self.initial,
            m,
            n,
            self.p,
            self.tune,
            self.time.is_none(),
        )
    }

    /// RK4 step for a Hamiltonian whose spectral radius is at most `w_max`:
    /// the configured `dt`, or an eighth of the resolution limit.
    pub fn lab_dt(&self, w_max: f64) -> f64 {
        self.dt
            .unwrap_or_else(|| 2.0 * PI / w_max / STEPS_PER_PERIOD / 8.0)
    }
}

/// Score of the state reached by one run.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub model: Model,
    pub initial: Label,
    pub p: u32,
    /// Interaction time of the run.
    pub time: f64,
    pub t_p: f64,
    pub tuned_g: f64,
    /// `|⟨target|ψ⟩|²`.
    pub fidelity: f64,
    /// Population outside the four-state block.
    pub block_leakage: f64,
    /// Basis populations above [`POPULATION_FLOOR`], in storage order.
    pub populations: Vec<(Label, f64)>,
    pub norm: f64,
    /// Largest population seen on the truncation boundary.
    pub max_truncation_leak: f64,
}

/// One time point of a protocol trajectory.
#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub t: f64,
    pub state: QuantumState,
    pub fidelity: f64,
    pub norm: f64,
    pub block_leakage: f64,
}

/// Full trajectory of one run plus its final report.
#[derive(Clone, Debug)]
pub struct ProtocolSeries {
    pub params: SystemParams,
    pub schedule: ProtocolSchedule,
    pub points: Vec<SeriesPoint>,
    pub report: FidelityReport,
}

impl ProtocolSeries {
    /// Labels whose population exceeds [`POPULATION_FLOOR`] at any point.
    pub fn active_labels(&self) -> Vec<Label> {
        let set: BTreeSet<usize> = self
            .points
            .iter()
            .flat_map(|pt| {
                pt.state
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm_sqr() > POPULATION_FLOOR)
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>()
            })
            .collect();
        let shape = self.schedule.target.shape();
        set.into_iter().map(|i| shape.label(i)).collect()
    }
}

fn block_population(state: &QuantumState, block: &BlockParams) -> f64 {
    block
        .labels()
        .iter()
        .map(|&l| state.population(l).unwrap_or(0.0))
        .sum()
}

fn evenly_spaced(t_end: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples)
        .map(|k| t_end * k as f64 / (samples - 1) as f64)
        .collect()
}

/// Evolves the setup and records `samples` points from 0 to the interaction time.
pub fn protocol_series(setup: &ProtocolSetup, samples: usize) -> Result<ProtocolSeries> {
    let (params, schedule) = setup.schedule()?;
    let shape = setup.shape;
    let t_run = setup.time.unwrap_or(schedule.t_p);
    if !t_run.is_finite() || t_run <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "interaction time must be > 0 (got {t_run})"
        )));
    }
    let block = schedule.block;
    let initial = basis_state(shape, setup.initial)?;
    for l in block.labels() {
        shape.index(l)?;
    }

    let trajectory: Vec<(f64, QuantumState)> = match setup.model {
        Model::BlockAnalytic => {
            let start = BlockState::from_label(block, setup.initial)?;
            evenly_spaced(t_run, samples)
                .into_iter()
                .map(|t| Ok((t, block_propagate(&start, t)?.to_full(shape)?)))
                .collect::<Result<_>>()?
        }
        Model::LdFull | Model::RwaFull => {
            let h = if setup.model == Model::LdFull {
                build_ld_hamiltonian(&params, shape)?
            } else {
                build_rwa_hamiltonian(&params, shape)?
            };
            let prop = StaticPropagator::new(&h)?;
            // watch the truncation boundary on a fixed grid as well as the output grid
            let mut grid = evenly_spaced(t_run, samples);
            grid.extend(evenly_spaced(t_run, WATCH_SAMPLES));
            grid.sort_by(|a, b| a.total_cmp(b));
            grid.dedup();
            let watched: Vec<(f64, QuantumState)> = grid
                .iter()
                .map(|&t| {
                    (
                        t,
                        initial.with_amplitudes(prop.propagate(initial.amplitudes(), t)),
                    )
                })
                .collect();
            check_truncation(&watched, shape)?;
            evenly_spaced(t_run, samples)
                .into_iter()
                .map(|t| {
                    (
                        t,
                        initial.with_amplitudes(prop.propagate(initial.amplitudes(), t)),
                    )
                })
                .collect()
        }
        Model::LabFrame => {
            params.check_resonance()?;
            let lab = LabHamiltonian::new(params, shape)?;
            let run = evolve_timedep_sampled(
                &lab,
                &initial,
                t_run,
                setup.lab_dt(lab.max_frequency()),
                samples.max(WATCH_SAMPLES),
            )?;
            let pts: Vec<(f64, QuantumState)> = run
                .times
                .iter()
                .zip(&run.states)
                .map(|(&t, s)| (t, to_interaction_picture(s, &params, t)))
                .collect();
            check_truncation(&pts, shape)?;
            resample(&pts, samples)
        }
    };

    let points: Vec<SeriesPoint> = trajectory
        .into_iter()
        .map(|(t, state)| {
            let fid = fidelity(&state, &schedule.target)?;
            let norm = state.norm();
            let leak = (norm * norm - block_population(&state, &block)).max(0.0);
            Ok(SeriesPoint {
                t,
                state,
                fidelity: fid,
                norm,
                block_leakage: leak,
            })
        })
        .collect::<Result<_>>()?;

    let last = points.last().expect("at least two samples");
    let max_truncation_leak = match setup.model {
        Model::BlockAnalytic => 0.0,
        _ => points
            .iter()
            .map(|p| p.state.top_level_population())
            .fold(0.0, f64::max),
    };
    let report = FidelityReport {
        model: setup.model,
        initial: setup.initial,
        p: schedule.p,
        time: t_run,
        t_p: schedule.t_p,
        tuned_g: schedule.tuned_g,
        fidelity: last.fidelity,
        block_leakage: if setup.model == Model::BlockAnalytic {
            0.0
        } else {
            last.block_leakage
        },
        populations: last
            .state
            .populations()
            .into_iter()
            .filter(|&(_, p)| p > POPULATION_FLOOR)
            .collect(),
        norm: last.norm,
        max_truncation_leak,
    };
    Ok(ProtocolSeries {
        params,
        schedule,
        points,
        report,
    })
}

/// Picks `samples` points (end points included) from an evenly sampled run.
fn resample(points: &[(f64, QuantumState)], samples: usize) -> Vec<(f64, QuantumState)> {
    let samples = samples.max(2);
    if points.len() <= samples {
        return points.to_vec();
    }
    let last = points.len() - 1;
    let mut idx: Vec<usize> = (0..samples)
        .map(|j| ((j * last) as f64 / (samples - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx.into_iter().map(|i| points[i].clone()).collect()
}

fn check_truncation(points: &[(f64, QuantumState)], shape: HilbertShape) -> Result<()> {
    let worst = points
        .iter()
        .map(|(_, s)| s.top_level_population())
        .fold(0.0, f64::max);
    if worst > TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            population: worst,
            limit: TRUNCATION_LIMIT,
            suggested_vib: shape.vib_dim() + 2,
            suggested_cav: shape.cav_dim() + 2,
        });
    }
    Ok(())
}

/// Evolves to the interaction time and scores the final state.
pub fn run_protocol(setup: &ProtocolSetup) -> Result<FidelityReport> {
    Ok(protocol_series(setup, 2)?.report)
}

/// Parameter that a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    EtaC,
    EtaL,
    Phi,
    P,
    VibDim,
    CavDim,
    Dt,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 7] = [
        SweepAxis::EtaC,
        SweepAxis::EtaL,
        SweepAxis::Phi,
        SweepAxis::P,
        SweepAxis::VibDim,
        SweepAxis::CavDim,
        SweepAxis::Dt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::EtaC => "eta_c",
            SweepAxis::EtaL => "eta_l",
            SweepAxis::Phi => "phi",
            SweepAxis::P => "p",
            SweepAxis::VibDim => "vib_dim",
            SweepAxis::CavDim => "cav_dim",
            SweepAxis::Dt => "dt",
        }
    }

    fn integral(self) -> bool {
        matches!(self, SweepAxis::P | SweepAxis::VibDim | SweepAxis::CavDim)
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &ProtocolSetup, value: f64) -> Result<ProtocolSetup> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{} value must be finite",
                self.name()
            )));
        }
        if self.integral() && (value.fract() != 0.0 || value < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "{} takes positive integers (got {value})",
                self.name()
            )));
        }
        let mut s = base.clone();
        match self {
            SweepAxis::EtaC => s.params.eta_c = value,
            SweepAxis::EtaL => s.params.eta_l = value,
            SweepAxis::Phi => s.params.phi = value,
            SweepAxis::P => s.p = value as u32,
            SweepAxis::VibDim => s.shape = HilbertShape::new(value as usize, s.shape.cav_dim())?,
            SweepAxis::CavDim => s.shape = HilbertShape::new(s.shape.vib_dim(), value as usize)?,
            SweepAxis::Dt => s.dt = Some(value),
        }
        Ok(s)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s || (s == "eta_L" && *a == SweepAxis::EtaL))
            .ok_or_else(|| {
                let names: Vec<&str> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown sweep axis '{s}'; valid axes: {}",
                    names.join(", ")
                ))
            })
    }
}

/// One sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub report: FidelityReport,
}

/// Runs the protocol once per value, in parallel, keeping input order.
pub fn sweep(base: &ProtocolSetup, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one value".into(),
        ));
    }
    values
        .par_iter()
        .map(|&v| {
            let setup = axis.apply(base, v)?;
            Ok(SweepRow {
                value: v,
                report: run_protocol(&setup)?,
            })
        })
        .collect()
}
