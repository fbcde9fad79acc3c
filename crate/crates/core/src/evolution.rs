//! Time-evolution engines.
//!
//! * [`block_propagate`]: closed-form propagator of the Lamb-Dicke 4×4 block.
//! * [`evolve_static`]: `e^{−iHt}` through the eigendecomposition of a
//!   time-independent Hermitian `H`.
//! * [`evolve_timedep`]: fixed-step classical RK4 for `iψ' = H(t)ψ`, without
//!   renormalisation; norm drift is reported and bounded.
//! * [`to_interaction_picture`]: `U₀†(t)` for the free Hamiltonian.

use nalgebra::SymmetricEigen;

use crate::fock::{HilbertShape, Label, OperatorMatrix, QuantumState};
use crate::hamiltonian::{free_energy, BlockParams, SystemParams, TimeDependentHamiltonian};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Largest `|H − H†|` entry accepted by the static engine.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Largest norm drift tolerated by the RK4 engine.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Minimum number of steps per period of the fastest frequency.
pub const STEPS_PER_PERIOD: f64 = 50.0;

/// Anything carrying a state vector the engines can evolve.
pub trait Amplitudes: Clone + Send + Sync {
    fn amplitudes(&self) -> &CVector;

    fn with_amplitudes(&self, amplitudes: CVector) -> Self;

    /// Population on the truncation boundary; zero when there is none.
    fn truncation_leak(&self) -> f64;
}

impl Amplitudes for QuantumState {
    fn amplitudes(&self) -> &CVector {
        QuantumState::amplitudes(self)
    }

    fn with_amplitudes(&self, amplitudes: CVector) -> Self {
        QuantumState::from_amplitudes(self.shape(), amplitudes).expect("same shape")
    }

    fn truncation_leak(&self) -> f64 {
        self.top_level_population()
    }
}

/// State of one four-state block, in the order
/// `(|g,m,n⟩, |e,m,n⟩, |g,m−1,n−1⟩, |e,m−1,n−1⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockState {
    amplitudes: CVector,
    block: BlockParams,
}

impl BlockState {
    pub fn new(block: BlockParams, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != 4 {
            return Err(Error::Shape(format!(
                "block state needs 4 amplitudes, got {}",
                amplitudes.len()
            )));
        }
        Ok(BlockState { amplitudes, block })
    }

    /// Basis vector of the block for `label`.
    pub fn from_label(block: BlockParams, label: Label) -> Result<Self> {
        let pos = block
            .labels()
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| {
                Error::Index(format!(
                    "|{label}⟩ is not in block (m={}, n={})",
                    block.m, block.n
                ))
            })?;
        let mut amps = CVector::zeros(4);
        amps[pos] = C64::new(1.0, 0.0);
        Ok(BlockState {
            amplitudes: amps,
            block,
        })
    }

    pub fn block(&self) -> &BlockParams {
        &self.block
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// The same state written in a full truncated space.
    pub fn to_full(&self, shape: HilbertShape) -> Result<QuantumState> {
        let terms: Vec<(Label, C64)> = self
            .block
            .labels()
            .into_iter()
            .zip(self.amplitudes.iter().copied())
            .collect();
        QuantumState::from_labels(shape, &terms)
    }
}

impl Amplitudes for BlockState {
    fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    fn with_amplitudes(&self, amplitudes: CVector) -> Self {
        BlockState {
            amplitudes,
            block: self.block,
        }
    }

    fn truncation_leak(&self) -> f64 {
        0.0
    }
}

/// Swaps `|g,m,n⟩ ↔ |e,m−1,n−1⟩` and `|e,m,n⟩ ↔ |g,m−1,n−1⟩`; commutes with
/// the Lamb-Dicke block Hamiltonian.
pub const BLOCK_SYMMETRY: [usize; 4] = [3, 2, 1, 0];

/// Closed-form `e^{−iHt}` of the Lamb-Dicke block.
///
/// Columns for `|g,m−1,n−1⟩` and `|e,m−1,n−1⟩` are written out directly; the
/// other two follow from [`BLOCK_SYMMETRY`].
pub fn block_propagator(block: &BlockParams, t: f64) -> Result<CMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "propagation time must be finite and >= 0 (got {t})"
        )));
    }
    let a = block.a;
    let mu = block.mu;
    let (sa, ca) = (a * t).sin_cos();
    let (sm, cm) = (mu * t).sin_cos();
    // μ = 0 only when Ω = a = 0, i.e. H = 0.
    let (r, w, sinc) = if mu > 0.0 {
        (a / mu, block.omega / mu, sm)
    } else {
        (0.0, 0.0, 0.0)
    };
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);

    let mut u = CMatrix::zeros(4, 4);
    // initial |g,m−1,n−1⟩
    u[(2, 2)] = re(r * sa * sinc + ca * cm);
    u[(3, 2)] = im(-w * ca * sinc);
    u[(0, 2)] = re(-w * sa * sinc);
    u[(1, 2)] = im(r * ca * sinc - sa * cm);
    // initial |e,m−1,n−1⟩
    u[(3, 3)] = re(ca * cm - r * sa * sinc);
    u[(2, 3)] = im(-w * ca * sinc);
    u[(1, 3)] = re(-w * sa * sinc);
    u[(0, 3)] = im(-(r * ca * sinc + sa * cm));
    // upper states through the block symmetry: U = P U P
    let p = BLOCK_SYMMETRY;
    for (col, src) in [(0usize, 3usize), (1, 2)] {
        for row in 0..4 {
            u[(row, col)] = u[(p[row], src)];
        }
    }
    Ok(u)
}

/// Propagates a block state by time `t`.
pub fn block_propagate(initial: &BlockState, t: f64) -> Result<BlockState> {
    let u = block_propagator(&initial.block, t)?;
    Ok(initial.with_amplitudes(u * &initial.amplitudes))
}

/// Sequence of states produced by one engine run.
#[derive(Clone, Debug)]
pub struct EvolutionResult<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Population on the top phonon/photon levels at each time.
    pub truncation_leak: Vec<f64>,
    pub norms: Vec<f64>,
    pub model_tag: &'static str,
}

impl<S: Amplitudes> EvolutionResult<S> {
    fn from_states(times: Vec<f64>, states: Vec<S>, model_tag: &'static str) -> Self {
        let truncation_leak = states.iter().map(|s| s.truncation_leak()).collect();
        let norms = states.iter().map(|s| s.amplitudes().norm()).collect();
        EvolutionResult {
            times,
            states,
            truncation_leak,
            norms,
            model_tag,
        }
    }

    pub fn final_state(&self) -> &S {
        self.states.last().expect("non-empty evolution")
    }

    /// Largest `|‖ψ(t)‖ − 1|` over the run.
    pub fn max_norm_drift(&self) -> f64 {
        self.norms
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_truncation_leak(&self) -> f64 {
        self.truncation_leak.iter().copied().fold(0.0, f64::max)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no output times requested".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("output times must be finite".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "output times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_normalized<S: Amplitudes>(state: &S) -> Result<()> {
    let n = state.amplitudes().norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "initial state is not normalized (norm {n})"
        )));
    }
    Ok(())
}

/// Closed-form block evolution sampled at `times`.
pub fn evolve_block(initial: &BlockState, times: &[f64]) -> Result<EvolutionResult<BlockState>> {
    check_times(times)?;
    let states = times
        .iter()
        .map(|&t| block_propagate(initial, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult::from_states(
        times.to_vec(),
        states,
        "block_analytic",
    ))
}

/// Eigendecomposition of a time-independent Hamiltonian, reusable across
/// initial states and times.
#[derive(Clone, Debug)]
pub struct StaticPropagator {
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl StaticPropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let dev = h.hermiticity_error();
        if dev > HERMITICITY_TOL {
            return Err(Error::Model(format!(
                "Hamiltonian is not Hermitian (max |H - H†| = {dev:.3e})"
            )));
        }
        let eig = SymmetricEigen::new(h.entries().clone());
        Ok(StaticPropagator {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `e^{−iHt} ψ`.
    pub fn propagate(&self, psi: &CVector, t: f64) -> CVector {
        let coeffs = self.vectors.adjoint() * psi;
        let rotated = CVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.energies)
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        );
        &self.vectors * rotated
    }

    /// `e^{−iHt}` as a matrix.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let phases = CVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        );
        &self.vectors * CMatrix::from_diagonal(&phases) * self.vectors.adjoint()
    }
}

/// `ψ(t) = e^{−iHt} ψ(0)` at each requested time.
pub fn evolve_static<S: Amplitudes>(
    h: &OperatorMatrix,
    initial: &S,
    times: &[f64],
) -> Result<EvolutionResult<S>> {
    if h.dim() != initial.amplitudes().len() {
        return Err(Error::Shape(format!(
            "Hamiltonian of dimension {} and state of dimension {}",
            h.dim(),
            initial.amplitudes().len()
        )));
    }
    check_times(times)?;
    check_normalized(initial)?;
    let prop = StaticPropagator::new(h)?;
    let coeffs = prop.vectors.adjoint() * initial.amplitudes();
    let states = times
        .iter()
        .map(|&t| {
            let rotated = CVector::from_iterator(
                coeffs.len(),
                coeffs
                    .iter()
                    .zip(&prop.energies)
                    .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
            );
            initial.with_amplitudes(&prop.vectors * rotated)
        })
        .collect();
    Ok(EvolutionResult::from_states(
        times.to_vec(),
        states,
        "static",
    ))
}

/// Number of recorded samples used by [`evolve_timedep`].
pub const DEFAULT_SAMPLES: usize = 201;

/// Fixed-step RK4 integration of `iψ' = H(t)ψ` from 0 to `t_end`.
pub fn evolve_timedep<H, S>(h: &H, initial: &S, t_end: f64, dt: f64) -> Result<EvolutionResult<S>>
where
    H: TimeDependentHamiltonian + ?Sized,
    S: Amplitudes,
{
    evolve_timedep_sampled(h, initial, t_end, dt, DEFAULT_SAMPLES)
}

/// As [`evolve_timedep`], recording about `samples` evenly spaced states
/// (always including both end points).
///
/// The step actually used is `t_end / ceil(t_end / dt)`, never larger than
/// `dt`. Fails if `dt` exceeds `1/50` of the period of the fastest frequency
/// or if the norm drifts by more than [`MAX_NORM_DRIFT`].
pub fn evolve_timedep_sampled<H, S>(
    h: &H,
    initial: &S,
    t_end: f64,
    dt: f64,
    samples: usize,
) -> Result<EvolutionResult<S>>
where
    H: TimeDependentHamiltonian + ?Sized,
    S: Amplitudes,
{
    let dim = h.space().dim();
    if dim != initial.amplitudes().len() {
        return Err(Error::Shape(format!(
            "Hamiltonian of dimension {dim} and state of dimension {}",
            initial.amplitudes().len()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Configuration(format!(
            "time step must be > 0 (got {dt})"
        )));
    }
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "end time must be > 0 (got {t_end})"
        )));
    }
    let w_max = h.max_frequency();
    if w_max > 0.0 {
        let limit = 2.0 * std::f64::consts::PI / w_max / STEPS_PER_PERIOD;
        if dt > limit {
            return Err(Error::Configuration(format!(
                "time step {dt:.3e} exceeds resolution limit {limit:.3e} (1/50 of the period at frequency {w_max:.3e})"
            )));
        }
    }
    check_normalized(initial)?;

    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let step = t_end / steps as f64;
    let samples = samples.max(2);
    let mut record: Vec<usize> = (0..samples)
        .map(|j| ((j as f64) * steps as f64 / (samples - 1) as f64).round() as usize)
        .collect();
    record.dedup();

    let norm0 = initial.amplitudes().norm();
    let minus_i = C64::new(0.0, -1.0);
    let mut psi = initial.amplitudes().clone();
    let mut times = Vec::with_capacity(record.len());
    let mut states = Vec::with_capacity(record.len());
    let mut next = 0;
    if record[0] == 0 {
        times.push(0.0);
        states.push(initial.clone());
        next = 1;
    }
    let half = 0.5 * step;
    for k in 0..steps {
        let t = k as f64 * step;
        let k1 = h.apply(t, &psi) * minus_i;
        let k2 = h.apply(t + half, &(&psi + &k1 * C64::new(half, 0.0))) * minus_i;
        let k3 = h.apply(t + half, &(&psi + &k2 * C64::new(half, 0.0))) * minus_i;
        let k4 = h.apply(t + step, &(&psi + &k3 * C64::new(step, 0.0))) * minus_i;
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
            * C64::new(step / 6.0, 0.0);

        let drift = (psi.norm() - norm0).abs();
        if drift > MAX_NORM_DRIFT {
            return Err(Error::Accuracy {
                drift,
                time: t + step,
                limit: MAX_NORM_DRIFT,
            });
        }
        if next < record.len() && record[next] == k + 1 {
            times.push(if k + 1 == steps {
                t_end
            } else {
                (k + 1) as f64 * step
            });
            states.push(initial.with_amplitudes(psi.clone()));
            next += 1;
        }
    }
    Ok(EvolutionResult::from_states(times, states, "timedep"))
}

/// Applies `U₀†(t) = e^{+iH₀t}`; `H₀` is diagonal in the Fock basis.
pub fn to_interaction_picture(state: &QuantumState, params: &SystemParams, t: f64) -> QuantumState {
    rotate_free(state, params, t)
}

/// Inverse of [`to_interaction_picture`]: applies `e^{−iH₀t}`.
pub fn from_interaction_picture(
    state: &QuantumState,
    params: &SystemParams,
    t: f64,
) -> QuantumState {
    rotate_free(state, params, -t)
}

fn rotate_free(state: &QuantumState, params: &SystemParams, t: f64) -> QuantumState {
    let shape = state.shape();
    let amps = CVector::from_iterator(
        shape.dim(),
        shape
            .labels()
            .zip(state.amplitudes().iter())
            .map(|(l, a)| a * C64::from_polar(1.0, free_energy(params, l) * t)),
    );
    QuantumState::from_amplitudes(shape, amps).expect("same shape")
}
