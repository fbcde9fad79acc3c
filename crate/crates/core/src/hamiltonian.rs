//! Hamiltonians of the ion–laser–cavity system at each level of
//! approximation: lab frame, interaction picture under the rotating-wave
//! approximation, its Lamb-Dicke limit, and the 4×4 sideband block.
//!
//! All builders use `ħ = 1` and angular frequencies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fock::{
    embed, ladder_ops, number_op, pauli_ops, HilbertShape, Label, OperatorMatrix, Slot, Space,
};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative tolerance for the carrier and red-sideband resonance checks.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Physical constants of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Ion–laser coupling Ω.
    pub omega: f64,
    /// Ion–cavity coupling g.
    pub g: f64,
    /// Lamb-Dicke parameter of the laser.
    pub eta_l: f64,
    /// Lamb-Dicke parameter of the cavity mode.
    pub eta_c: f64,
    /// Trap frequency ν.
    pub nu: f64,
    /// Ion transition frequency ω₀.
    pub omega_0: f64,
    /// Cavity frequency ω_c.
    pub omega_c: f64,
    /// Laser frequency ω_L.
    pub omega_l: f64,
    /// Offset of the trap centre from the cavity node, in radians.
    pub phi: f64,
}

impl SystemParams {
    /// Parameters satisfying both resonance conditions: `ω_L = ω₀` and
    /// `ω_c = ω₀ − ν`.
    pub fn resonant(omega: f64, g: f64, eta_l: f64, eta_c: f64, nu: f64, omega_0: f64) -> Self {
        SystemParams {
            omega,
            g,
            eta_l,
            eta_c,
            nu,
            omega_0,
            omega_c: omega_0 - nu,
            omega_l: omega_0,
            phi: 0.0,
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let freqs = [
            ("omega", self.omega),
            ("g", self.g),
            ("nu", self.nu),
            ("omega_0", self.omega_0),
            ("omega_c", self.omega_c),
            ("omega_l", self.omega_l),
            ("eta_l", self.eta_l),
            ("eta_c", self.eta_c),
        ];
        for (name, v) in freqs {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Configuration(format!(
                    "{name} must be finite and >= 0 (got {v})"
                )));
            }
        }
        if !self.phi.is_finite() {
            return Err(Error::Configuration(format!(
                "phi must be finite (got {})",
                self.phi
            )));
        }
        Ok(())
    }

    pub fn carrier_resonant(&self) -> bool {
        close(self.omega_l, self.omega_0)
    }

    pub fn red_sideband_resonant(&self) -> bool {
        close(self.omega_0 - self.omega_c, self.nu)
    }

    /// Fails with a configuration error naming the first violated resonance.
    pub fn check_resonance(&self) -> Result<()> {
        self.validate()?;
        if !self.carrier_resonant() {
            return Err(Error::Configuration(format!(
                "carrier condition omega_l = omega_0 violated ({} vs {})",
                self.omega_l, self.omega_0
            )));
        }
        if !self.red_sideband_resonant() {
            return Err(Error::Configuration(format!(
                "red-sideband condition omega_0 - omega_c = nu violated ({} vs {})",
                self.omega_0 - self.omega_c,
                self.nu
            )));
        }
        Ok(())
    }

    /// Cavity coupling seen by the ion at node offset `phi`.
    pub fn effective_g(&self) -> f64 {
        effective_coupling(self.g, self.phi)
    }

    /// Largest frequency among the parameters.
    pub fn max_frequency(&self) -> f64 {
        [
            self.omega,
            self.g,
            self.nu,
            self.omega_0,
            self.omega_c,
            self.omega_l,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= RESONANCE_TOL * scale
}

/// `g cos φ`: the cavity coupling when the trap centre sits a phase `φ`
/// away from the standing-wave node.
pub fn effective_coupling(g: f64, phi: f64) -> f64 {
    g * phi.cos()
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `⟨m|Ô_k(η)|m⟩ = e^{−η²/2} Σ_{p=0}^{m} (−η²)^p m! / (p! (p+k)! (m−p)!)`.
pub fn o_k_element(k: usize, eta: f64, m: usize) -> f64 {
    let x = -eta * eta;
    let mut binom = 1.0; // C(m, p)
    let mut power = 1.0; // x^p
    let mut sum = 0.0;
    for p in 0..=m {
        sum += binom * power / factorial(p + k);
        binom *= (m - p) as f64 / (p + 1) as f64;
        power *= x;
    }
    (-0.5 * eta * eta).exp() * sum
}

/// Diagonal operator `Ô_k(η)` on a phonon space truncated to `dim` levels.
pub fn build_o_k(k: usize, eta: f64, dim: usize) -> Result<OperatorMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("O_k needs dim >= 1".into()));
    }
    let diag = CVector::from_iterator(dim, (0..dim).map(|m| C64::new(o_k_element(k, eta, m), 0.0)));
    OperatorMatrix::single(CMatrix::from_diagonal(&diag))
}

/// `F^L_{m,m} = ⟨m|Ô₀(η_L)|m⟩`.
pub fn matrix_element_f_l(m: usize, eta_l: f64) -> f64 {
    o_k_element(0, eta_l, m)
}

/// `F^c_{m,m−1} = ⟨m|η_c â† Ô₁(η_c)|m−1⟩ = η_c √m ⟨m−1|Ô₁|m−1⟩`.
pub fn matrix_element_f_c(m: usize, eta_c: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("F^c_{m,m-1} needs m >= 1".into()));
    }
    Ok(eta_c * (m as f64).sqrt() * o_k_element(1, eta_c, m - 1))
}

/// `f(η(â + â†))` on a truncated phonon space, through the eigenbasis of
/// the quadrature.
pub fn quadrature_function(eta: f64, dim: usize, f: impl Fn(f64) -> C64) -> Result<OperatorMatrix> {
    let (lo, hi) = ladder_ops(dim)?;
    let x = lo.add(&hi)?.scale(C64::new(eta, 0.0));
    x.hermitian_function(f)
}

/// Hamiltonian with explicit time dependence, consumed by the RK4 engine.
pub trait TimeDependentHamiltonian: Sync {
    fn space(&self) -> Space;

    fn matrix_at(&self, t: f64) -> CMatrix;

    /// `H(t) ψ`.
    fn apply(&self, t: f64, psi: &CVector) -> CVector {
        self.matrix_at(t) * psi
    }

    /// Frequency scale the time step must resolve.
    fn max_frequency(&self) -> f64;
}

/// A constant operator seen as a (trivially) time-dependent one.
impl TimeDependentHamiltonian for OperatorMatrix {
    fn space(&self) -> Space {
        OperatorMatrix::space(self)
    }

    fn matrix_at(&self, _t: f64) -> CMatrix {
        self.entries().clone()
    }

    fn apply(&self, _t: f64, psi: &CVector) -> CVector {
        self.entries() * psi
    }

    fn max_frequency(&self) -> f64 {
        // Spectral radius is bounded by the largest absolute row sum.
        (0..self.dim())
            .map(|i| self.entries().row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Lab-frame Hamiltonian `H₀ + H_int(t)`:
///
/// ```text
/// H₀     = ν(a†a + ½) + ω_c b†b + (ω₀/2) σ_z
/// H_int  = Ω [σ₊ e^{iη_L(a†+a) − iω_L t} + h.c.]
///        + g (σ₊ + σ₋)(b† + b) sin[η_c(a†+a) + φ]
/// ```
#[derive(Clone, Debug)]
pub struct LabHamiltonian {
    params: SystemParams,
    shape: HilbertShape,
    /// `H₀` plus the cavity term.
    static_part: CMatrix,
    /// `Ω σ₊ ⊗ e^{iη_L(a†+a)} ⊗ 1`.
    laser: CMatrix,
    laser_adjoint: CMatrix,
    /// Row-sum bound on the spectral radius at any time.
    spectral_bound: f64,
}

impl LabHamiltonian {
    pub fn new(params: SystemParams, shape: HilbertShape) -> Result<Self> {
        params.validate()?;
        let p = &params;
        let pauli = pauli_ops();
        let vib = shape.vib_dim();
        let cav = shape.cav_dim();
        let (b, b_dag) = ladder_ops(cav)?;

        let free = free_hamiltonian(p, shape)?;

        let displacement = quadrature_function(p.eta_l, vib, |x| C64::new(0.0, x).exp())?;
        let laser = embed(&pauli.plus, Slot::Ion, shape)?
            .matmul(&embed(&displacement, Slot::Vib, shape)?)?
            .scale(C64::new(p.omega, 0.0));

        let phi = p.phi;
        let sine = quadrature_function(p.eta_c, vib, |x| C64::new((x + phi).sin(), 0.0))?;
        let cavity = embed(&pauli.plus.add(&pauli.minus)?, Slot::Ion, shape)?
            .matmul(&embed(&sine, Slot::Vib, shape)?)?
            .matmul(&embed(&b.add(&b_dag)?, Slot::Cav, shape)?)?
            .scale(C64::new(p.g, 0.0));

        let static_part = free.add(&cavity)?.into_entries();
        let laser = laser.into_entries();
        let laser_adjoint = laser.adjoint();
        let spectral_bound = (0..shape.dim())
            .map(|i| {
                [&static_part, &laser, &laser_adjoint]
                    .iter()
                    .map(|m| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        Ok(LabHamiltonian {
            params,
            shape,
            static_part,
            laser,
            laser_adjoint,
            spectral_bound,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn shape(&self) -> HilbertShape {
        self.shape
    }

    pub fn at(&self, t: f64) -> OperatorMatrix {
        OperatorMatrix::new(Space::Full(self.shape), self.matrix_at(t))
            .expect("lab Hamiltonian dimension")
    }
}

impl TimeDependentHamiltonian for LabHamiltonian {
    fn space(&self) -> Space {
        Space::Full(self.shape)
    }

    fn matrix_at(&self, t: f64) -> CMatrix {
        let phase = C64::from_polar(1.0, -self.params.omega_l * t);
        &self.static_part + &self.laser * phase + &self.laser_adjoint * phase.conj()
    }

    fn apply(&self, t: f64, psi: &CVector) -> CVector {
        let phase = C64::from_polar(1.0, -self.params.omega_l * t);
        let mut out = &self.static_part * psi;
        out += (&self.laser * psi) * phase;
        out += (&self.laser_adjoint * psi) * phase.conj();
        out
    }

    fn max_frequency(&self) -> f64 {
        self.spectral_bound
    }
}

/// Diagonal energy of `|s, m, n⟩` under `H₀`.
pub fn free_energy(params: &SystemParams, label: Label) -> f64 {
    params.nu * (label.m as f64 + 0.5)
        + params.omega_c * label.n as f64
        + 0.5 * params.omega_0 * label.ion.sigma_z()
}

/// `H₀ = ν(a†a + ½) + ω_c b†b + (ω₀/2) σ_z`.
pub fn free_hamiltonian(params: &SystemParams, shape: HilbertShape) -> Result<OperatorMatrix> {
    let vib = shape.vib_dim();
    let cav = shape.cav_dim();
    let half = OperatorMatrix::identity(Space::Single(vib)).scale(C64::new(0.5, 0.0));
    let phonon = number_op(vib)?.add(&half)?.scale(C64::new(params.nu, 0.0));
    let photon = number_op(cav)?.scale(C64::new(params.omega_c, 0.0));
    let ion = pauli_ops().z.scale(C64::new(0.5 * params.omega_0, 0.0));
    embed(&phonon, Slot::Vib, shape)?
        .add(&embed(&photon, Slot::Cav, shape)?)?
        .add(&embed(&ion, Slot::Ion, shape)?)
}

/// Lab-frame Hamiltonian at time `t`.
pub fn build_lab_hamiltonian(
    params: &SystemParams,
    shape: HilbertShape,
    t: f64,
) -> Result<OperatorMatrix> {
    Ok(LabHamiltonian::new(*params, shape)?.at(t))
}

/// Interaction-picture Hamiltonian under the rotating-wave approximation:
///
/// ```text
/// H_I = Ω [σ₊ Ô₀^L + σ₋ Ô₀^L] + g' [σ₊ b (η_c Ô₁^c a) + h.c.],   g' = g cos φ
/// ```
///
/// Requires the carrier and red-sideband resonance conditions.
pub fn build_rwa_hamiltonian(params: &SystemParams, shape: HilbertShape) -> Result<OperatorMatrix> {
    params.check_resonance()?;
    let vib = shape.vib_dim();
    let cav = shape.cav_dim();
    let pauli = pauli_ops();
    let (a, _) = ladder_ops(vib)?;
    let (b, _) = ladder_ops(cav)?;

    let o0 = embed(&build_o_k(0, params.eta_l, vib)?, Slot::Vib, shape)?;
    let carrier = embed(&pauli.plus.add(&pauli.minus)?, Slot::Ion, shape)?
        .matmul(&o0)?
        .scale(C64::new(params.omega, 0.0));

    let phonon_part = build_o_k(1, params.eta_c, vib)?
        .matmul(&a)?
        .scale(C64::new(params.eta_c, 0.0));
    let sideband = embed(&pauli.plus, Slot::Ion, shape)?
        .matmul(&embed(&b, Slot::Cav, shape)?)?
        .matmul(&embed(&phonon_part, Slot::Vib, shape)?)?
        .scale(C64::new(params.effective_g(), 0.0));

    carrier.add(&sideband)?.add(&sideband.adjoint())
}

/// Lowest-order Lamb-Dicke limit of the RWA Hamiltonian:
/// `Ω σ_x + g' η_c (σ₊ a b + σ₋ a† b†)`.
pub fn build_ld_hamiltonian(params: &SystemParams, shape: HilbertShape) -> Result<OperatorMatrix> {
    params.check_resonance()?;
    let pauli = pauli_ops();
    let (a, _) = ladder_ops(shape.vib_dim())?;
    let (b, _) = ladder_ops(shape.cav_dim())?;
    let carrier =
        embed(&pauli.plus.add(&pauli.minus)?, Slot::Ion, shape)?.scale(C64::new(params.omega, 0.0));
    let sideband = embed(&pauli.plus, Slot::Ion, shape)?
        .matmul(&embed(&a, Slot::Vib, shape)?)?
        .matmul(&embed(&b, Slot::Cav, shape)?)?
        .scale(C64::new(params.effective_g() * params.eta_c, 0.0));
    carrier.add(&sideband)?.add(&sideband.adjoint())
}

/// Derived rates of one four-state block `{|g,m,n⟩, |e,m,n⟩, |g,m−1,n−1⟩, |e,m−1,n−1⟩}`.
///
/// `coupling = g' η_c √(mn)` is the sideband matrix element of the Lamb-Dicke
/// block. The closed-form propagator oscillates at `a = coupling / 2` and
/// `μ = √(a² + Ω²)`; its eigenfrequencies are `±μ ± a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    pub m: usize,
    pub n: usize,
    pub omega: f64,
    pub coupling: f64,
    pub a: f64,
    pub mu: f64,
}

impl BlockParams {
    pub fn new(m: usize, n: usize, omega: f64, coupling: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "block indices must be >= 1 (got m={m}, n={n})"
            )));
        }
        if !omega.is_finite() || !coupling.is_finite() {
            return Err(Error::InvalidArgument("block rates must be finite".into()));
        }
        let a = 0.5 * coupling;
        let mu = a.hypot(omega);
        Ok(BlockParams {
            m,
            n,
            omega,
            coupling,
            a,
            mu,
        })
    }

    /// Block rates for the given physical parameters (Lamb-Dicke limit).
    pub fn from_params(params: &SystemParams, m: usize, n: usize) -> Result<Self> {
        let coupling = params.effective_g() * params.eta_c * ((m * n) as f64).sqrt();
        Self::new(m, n, params.omega, coupling)
    }

    /// Basis of the block in matrix order.
    pub fn labels(&self) -> [Label; 4] {
        block_labels(self.m, self.n)
    }

    /// One period of the fast rotation, `2π/μ`.
    pub fn fast_period(&self) -> f64 {
        2.0 * PI / self.mu
    }
}

/// `(|g,m,n⟩, |e,m,n⟩, |g,m−1,n−1⟩, |e,m−1,n−1⟩)`.
pub fn block_labels(m: usize, n: usize) -> [Label; 4] {
    debug_assert!(m >= 1 && n >= 1);
    [
        Label::g(m, n),
        Label::e(m, n),
        Label::g(m - 1, n - 1),
        Label::e(m - 1, n - 1),
    ]
}

/// 4×4 block Hamiltonian in the basis of [`block_labels`].
///
/// With `ld_limit` the couplings are `(Ω, Ω, g'η_c√(mn))`; otherwise
/// `(Ω F^L_{m,m}, Ω F^L_{m−1,m−1}, g' F^c_{m,m−1} √n)`.
pub fn build_block_hamiltonian(
    params: &SystemParams,
    m: usize,
    n: usize,
    ld_limit: bool,
) -> Result<(OperatorMatrix, BlockParams)> {
    let block = BlockParams::from_params(params, m, n)?;
    let (upper, lower, side) = if ld_limit {
        (params.omega, params.omega, block.coupling)
    } else {
        (
            params.omega * matrix_element_f_l(m, params.eta_l),
            params.omega * matrix_element_f_l(m - 1, params.eta_l),
            params.effective_g() * matrix_element_f_c(m, params.eta_c)? * (n as f64).sqrt(),
        )
    };
    let mut h = CMatrix::zeros(4, 4);
    let mut set = |i: usize, j: usize, v: f64| {
        h[(i, j)] = C64::new(v, 0.0);
        h[(j, i)] = C64::new(v, 0.0);
    };
    set(0, 1, upper);
    set(2, 3, lower);
    set(0, 3, side);
    Ok((OperatorMatrix::new(Space::Single(4), h)?, block))
}

/// Restriction of a full-space operator to the span of the given labels.
pub fn restrict(op: &OperatorMatrix, labels: &[Label]) -> Result<OperatorMatrix> {
    let Space::Full(shape) = op.space() else {
        return Err(Error::Shape(
            "restriction needs a full-space operator".into(),
        ));
    };
    let idx: Vec<usize> = labels
        .iter()
        .map(|&l| shape.index(l))
        .collect::<Result<_>>()?;
    let k = idx.len();
    let sub = CMatrix::from_fn(k, k, |i, j| op.get(idx[i], idx[j]));
    OperatorMatrix::new(Space::Single(k), sub)
}
