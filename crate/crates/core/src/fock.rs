//! Truncated Fock-space and qubit algebra.
//!
//! The composite space is `ion ⊗ vib ⊗ cav` with the ion slowest: the flat
//! index of `|s, m, n⟩` is `(s · vib_dim + m) · cav_dim + n` where `g = 0`
//! and `e = 1`. Every operator and state in the crate uses this ordering.

use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result, C64};

/// Tolerance on the norm of a physical state.
pub const NORM_TOL: f64 = 1e-12;

/// Internal level of the two-level ion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ion {
    G,
    E,
}

impl Ion {
    pub fn index(self) -> usize {
        match self {
            Ion::G => 0,
            Ion::E => 1,
        }
    }

    /// Eigenvalue of `σ_z` (`|e⟩` is the upper level).
    pub fn sigma_z(self) -> f64 {
        match self {
            Ion::G => -1.0,
            Ion::E => 1.0,
        }
    }

    pub fn flipped(self) -> Ion {
        match self {
            Ion::G => Ion::E,
            Ion::E => Ion::G,
        }
    }
}

impl fmt::Display for Ion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ion::G => "g",
            Ion::E => "e",
        })
    }
}

/// Basis label `|s, m, n⟩`: ion level, phonon number, photon number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub ion: Ion,
    pub m: usize,
    pub n: usize,
}

impl Label {
    pub const fn new(ion: Ion, m: usize, n: usize) -> Self {
        Label { ion, m, n }
    }

    pub const fn g(m: usize, n: usize) -> Self {
        Label::new(Ion::G, m, n)
    }

    pub const fn e(m: usize, n: usize) -> Self {
        Label::new(Ion::E, m, n)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.ion, self.m, self.n)
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Parses `g,0,0`, `e,1,1`, also accepting `|g,0,0>` and whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "cannot parse basis label '{s}' (expected e.g. g,0,0)"
            ))
        };
        let trimmed: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && !matches!(c, '|' | '>' | '⟩' | '(' | ')'))
            .collect();
        let parts: Vec<&str> = trimmed.split([',', '_']).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let ion = match parts[0] {
            "g" | "G" => Ion::G,
            "e" | "E" => Ion::E,
            _ => return Err(bad()),
        };
        let m = parts[1].parse().map_err(|_| bad())?;
        let n = parts[2].parse().map_err(|_| bad())?;
        Ok(Label::new(ion, m, n))
    }
}

/// Subsystem of the tripartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Ion,
    Vib,
    Cav,
}

/// Dimensions of the truncated space `2 × vib_dim × cav_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertShape {
    vib_dim: usize,
    cav_dim: usize,
}

impl HilbertShape {
    pub const ION_DIM: usize = 2;

    pub fn new(vib_dim: usize, cav_dim: usize) -> Result<Self> {
        if vib_dim == 0 || cav_dim == 0 {
            return Err(Error::InvalidDimension(format!(
                "vib_dim and cav_dim must be >= 1 (got {vib_dim}x{cav_dim})"
            )));
        }
        Ok(HilbertShape { vib_dim, cav_dim })
    }

    pub fn vib_dim(&self) -> usize {
        self.vib_dim
    }

    pub fn cav_dim(&self) -> usize {
        self.cav_dim
    }

    pub fn dim(&self) -> usize {
        Self::ION_DIM * self.vib_dim * self.cav_dim
    }

    pub fn slot_dim(&self, slot: Slot) -> usize {
        match slot {
            Slot::Ion => Self::ION_DIM,
            Slot::Vib => self.vib_dim,
            Slot::Cav => self.cav_dim,
        }
    }

    pub fn contains(&self, label: Label) -> bool {
        label.m < self.vib_dim && label.n < self.cav_dim
    }

    pub fn index(&self, label: Label) -> Result<usize> {
        if !self.contains(label) {
            return Err(Error::Index(format!(
                "|{label}⟩ outside truncation {}x{}",
                self.vib_dim, self.cav_dim
            )));
        }
        Ok((label.ion.index() * self.vib_dim + label.m) * self.cav_dim + label.n)
    }

    pub fn label(&self, index: usize) -> Label {
        let n = index % self.cav_dim;
        let m = (index / self.cav_dim) % self.vib_dim;
        let ion = if index / (self.cav_dim * self.vib_dim) == 0 {
            Ion::G
        } else {
            Ion::E
        };
        Label::new(ion, m, n)
    }

    /// All basis labels in storage order.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.dim()).map(move |i| self.label(i))
    }

    /// Whether a basis state sits on the highest phonon or photon level.
    pub fn is_top_level(&self, label: Label) -> bool {
        label.m + 1 == self.vib_dim || label.n + 1 == self.cav_dim
    }
}

impl fmt::Display for HilbertShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.vib_dim, self.cav_dim)
    }
}

impl FromStr for HilbertShape {
    type Err = Error;

    /// Parses `NxM` (phonon truncation × photon truncation).
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidArgument(format!("shape '{s}' is not of the form NxM")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("shape '{s}' is not of the form NxM")))
        };
        HilbertShape::new(parse(a)?, parse(b)?)
    }
}

/// Space an operator acts on: the full tripartite space or a bare factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Full(HilbertShape),
    Single(usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Full(shape) => shape.dim(),
            Space::Single(d) => *d,
        }
    }
}

/// Dense complex square matrix tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    space: Space,
    entries: CMatrix,
}

impl OperatorMatrix {
    pub fn new(space: Space, entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Shape(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() != space.dim() {
            return Err(Error::Shape(format!(
                "operator dimension {} does not match space dimension {}",
                entries.nrows(),
                space.dim()
            )));
        }
        Ok(OperatorMatrix { space, entries })
    }

    pub fn single(entries: CMatrix) -> Result<Self> {
        let d = entries.nrows();
        Self::new(Space::Single(d), entries)
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        OperatorMatrix {
            space,
            entries: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        OperatorMatrix {
            space,
            entries: CMatrix::zeros(d, d),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Matrix element `⟨bra|H|ket⟩` between basis labels of a full-space operator.
    pub fn element(&self, bra: Label, ket: Label) -> Result<C64> {
        match self.space {
            Space::Full(shape) => Ok(self.entries[(shape.index(bra)?, shape.index(ket)?)]),
            Space::Single(_) => Err(Error::Shape(
                "labelled element of a single-factor operator".into(),
            )),
        }
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    /// Largest entry of `|H − H†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let diff = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.space != rhs.space {
            return Err(Error::Shape(format!(
                "cannot multiply operators on {:?} and {:?}",
                self.space, rhs.space
            )));
        }
        Ok(OperatorMatrix {
            space: self.space,
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.space != rhs.space {
            return Err(Error::Shape(format!(
                "cannot add operators on {:?} and {:?}",
                self.space, rhs.space
            )));
        }
        Ok(OperatorMatrix {
            space: self.space,
            entries: &self.entries + &rhs.entries,
        })
    }

    pub fn scale(&self, factor: C64) -> OperatorMatrix {
        OperatorMatrix {
            space: self.space,
            entries: &self.entries * factor,
        }
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "dimensions {} and {} differ",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Applies `f` to the spectrum of a Hermitian operator: `V f(Λ) V†`.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> C64) -> Result<OperatorMatrix> {
        if !self.is_hermitian(1e-9) {
            return Err(Error::Model(format!(
                "function of a non-Hermitian operator (deviation {:.3e})",
                self.hermiticity_error()
            )));
        }
        let eig = SymmetricEigen::new(self.entries.clone());
        let v = &eig.eigenvectors;
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&l| f(l)),
        ));
        Ok(OperatorMatrix {
            space: self.space,
            entries: v * diag * v.adjoint(),
        })
    }
}

/// Lowering and raising operators on a Fock space truncated to `dim` levels.
///
/// `lower[m−1][m] = √m`; the coupling out of the top level is dropped.
pub fn ladder_ops(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "ladder operators need dim >= 1".into(),
        ));
    }
    let mut lower = CMatrix::zeros(dim, dim);
    for m in 1..dim {
        lower[(m - 1, m)] = C64::new((m as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    Ok((
        OperatorMatrix {
            space: Space::Single(dim),
            entries: lower,
        },
        OperatorMatrix {
            space: Space::Single(dim),
            entries: raise,
        },
    ))
}

/// `a†a` on a truncated Fock space.
pub fn number_op(dim: usize) -> Result<OperatorMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(
            "number operator needs dim >= 1".into(),
        ));
    }
    let diag = CVector::from_iterator(dim, (0..dim).map(|m| C64::new(m as f64, 0.0)));
    Ok(OperatorMatrix {
        space: Space::Single(dim),
        entries: CMatrix::from_diagonal(&diag),
    })
}

/// Ion operators in basis order `(g, e)`.
#[derive(Clone, Debug)]
pub struct PauliOps {
    /// `diag(−1, +1)`.
    pub z: OperatorMatrix,
    /// `|e⟩⟨g|`.
    pub plus: OperatorMatrix,
    /// `|g⟩⟨e|`.
    pub minus: OperatorMatrix,
}

pub fn pauli_ops() -> PauliOps {
    let one = C64::new(1.0, 0.0);
    let mut z = CMatrix::zeros(2, 2);
    z[(0, 0)] = -one;
    z[(1, 1)] = one;
    let mut plus = CMatrix::zeros(2, 2);
    plus[(1, 0)] = one;
    let minus = plus.adjoint();
    let wrap = |entries| OperatorMatrix {
        space: Space::Single(2),
        entries,
    };
    PauliOps {
        z: wrap(z),
        plus: wrap(plus),
        minus: wrap(minus),
    }
}

/// Lifts a single-factor operator into the full space, identity elsewhere.
pub fn embed(op: &OperatorMatrix, slot: Slot, shape: HilbertShape) -> Result<OperatorMatrix> {
    let want = shape.slot_dim(slot);
    if op.dim() != want {
        return Err(Error::Shape(format!(
            "{slot:?} operator has dimension {}, shape {shape} needs {want}",
            op.dim()
        )));
    }
    let dim = shape.dim();
    let mut out = CMatrix::zeros(dim, dim);
    let labels: Vec<Label> = shape.labels().collect();
    let factor = |l: &Label| match slot {
        Slot::Ion => l.ion.index(),
        Slot::Vib => l.m,
        Slot::Cav => l.n,
    };
    let others_equal = |a: &Label, b: &Label| match slot {
        Slot::Ion => a.m == b.m && a.n == b.n,
        Slot::Vib => a.ion == b.ion && a.n == b.n,
        Slot::Cav => a.ion == b.ion && a.m == b.m,
    };
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            if others_equal(li, lj) {
                out[(i, j)] = op.entries[(factor(li), factor(lj))];
            }
        }
    }
    Ok(OperatorMatrix {
        space: Space::Full(shape),
        entries: out,
    })
}

/// Pure state over the truncated tripartite basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    shape: HilbertShape,
    amplitudes: CVector,
}

impl QuantumState {
    pub fn from_amplitudes(shape: HilbertShape, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                shape.dim()
            )));
        }
        Ok(QuantumState { shape, amplitudes })
    }

    /// Builds a state from `(label, amplitude)` pairs; unlisted amplitudes are zero.
    pub fn from_labels(shape: HilbertShape, terms: &[(Label, C64)]) -> Result<Self> {
        let mut amps = CVector::zeros(shape.dim());
        for &(label, amp) in terms {
            amps[shape.index(label)?] += amp;
        }
        Ok(QuantumState {
            shape,
            amplitudes: amps,
        })
    }

    pub fn shape(&self) -> HilbertShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: Label) -> Result<C64> {
        Ok(self.amplitudes[self.shape.index(label)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(QuantumState {
            shape: self.shape,
            amplitudes: &self.amplitudes / C64::new(n, 0.0),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "states on {} and {}",
                self.shape, other.shape
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn population(&self, label: Label) -> Result<f64> {
        Ok(self.amplitude(label)?.norm_sqr())
    }

    /// `(label, |amplitude|²)` for every basis state, in storage order.
    pub fn populations(&self) -> Vec<(Label, f64)> {
        self.shape
            .labels()
            .zip(self.amplitudes.iter())
            .map(|(l, a)| (l, a.norm_sqr()))
            .collect()
    }

    /// Population on the highest phonon or photon level.
    pub fn top_level_population(&self) -> f64 {
        self.shape
            .labels()
            .zip(self.amplitudes.iter())
            .filter(|(l, _)| self.shape.is_top_level(*l))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self> {
        if op.space != Space::Full(self.shape) {
            return Err(Error::Shape(format!(
                "operator on {:?} applied to state on {}",
                op.space, self.shape
            )));
        }
        Ok(QuantumState {
            shape: self.shape,
            amplitudes: &op.entries * &self.amplitudes,
        })
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        let h_psi = self.apply(op)?;
        self.inner(&h_psi)
    }
}

/// Unit vector on `|s, m, n⟩`.
pub fn basis_state(shape: HilbertShape, label: Label) -> Result<QuantumState> {
    let mut amps = CVector::zeros(shape.dim());
    amps[shape.index(label)?] = C64::new(1.0, 0.0);
    Ok(QuantumState {
        shape,
        amplitudes: amps,
    })
}

/// Reduced density matrix over a subset of the three subsystems.
///
/// Kept slots are stored in canonical order (ion, vib, cav) regardless of
/// the order requested.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.log2())
            .sum::<f64>()
            .max(0.0)
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(state: &QuantumState, keep: &[Slot]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace needs at least one kept subsystem".into(),
        ));
    }
    let shape = state.shape;
    let mut slots: Vec<Slot> = keep.to_vec();
    slots.sort();
    slots.dedup();
    let dims: Vec<usize> = slots.iter().map(|&s| shape.slot_dim(s)).collect();
    let kept_dim: usize = dims.iter().product();
    let traced_dim = shape.dim() / kept_dim;

    let digit = |l: &Label, s: Slot| match s {
        Slot::Ion => l.ion.index(),
        Slot::Vib => l.m,
        Slot::Cav => l.n,
    };
    let traced: Vec<Slot> = [Slot::Ion, Slot::Vib, Slot::Cav]
        .into_iter()
        .filter(|s| !slots.contains(s))
        .collect();
    let flat = |l: &Label, which: &[Slot]| {
        which
            .iter()
            .fold(0, |acc, &s| acc * shape.slot_dim(s) + digit(l, s))
    };

    // Reshape ψ into a kept × traced matrix M; then ρ = M M†.
    let mut m = CMatrix::zeros(kept_dim, traced_dim);
    for (label, amp) in shape.labels().zip(state.amplitudes.iter()) {
        m[(flat(&label, &slots), flat(&label, &traced))] = *amp;
    }
    let matrix = &m * m.adjoint();
    Ok(DensityMatrix {
        slots,
        dims,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ladder_dim_one_is_zero() {
        let (lo, hi) = ladder_ops(1).unwrap();
        assert_eq!(lo.get(0, 0), c(0.0, 0.0));
        assert_eq!(hi.get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn ladder_dim_three_elements() {
        let (lo, hi) = ladder_ops(3).unwrap();
        assert_eq!(lo.get(0, 1), c(1.0, 0.0));
        assert_eq!(lo.get(1, 2), c(2f64.sqrt(), 0.0));
        let nonzero = lo.entries().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(hi.entries(), &lo.entries().adjoint());
    }

    #[test]
    fn ladder_zero_dim_rejected() {
        assert!(matches!(ladder_ops(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn raise_lower_is_number_operator() {
        let (lo, hi) = ladder_ops(6).unwrap();
        let n = hi.matmul(&lo).unwrap();
        let expected = number_op(6).unwrap();
        assert!(n.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let p = pauli_ops();
        let anti = p
            .plus
            .matmul(&p.minus)
            .unwrap()
            .add(&p.minus.matmul(&p.plus).unwrap())
            .unwrap();
        assert_eq!(anti, OperatorMatrix::identity(Space::Single(2)));
        let x = p.plus.add(&p.minus).unwrap();
        assert_eq!(
            x.matmul(&x).unwrap(),
            OperatorMatrix::identity(Space::Single(2))
        );
        // σ_z|g⟩ = −|g⟩
        assert_eq!(p.z.get(0, 0), c(-1.0, 0.0));
        assert_eq!(p.z.get(1, 0), c(0.0, 0.0));
        assert_eq!(p.minus.entries(), &p.plus.entries().adjoint());
    }

    #[test]
    fn embed_identity_and_lifting() {
        let shape = HilbertShape::new(3, 2).unwrap();
        for (slot, d) in [(Slot::Ion, 2), (Slot::Vib, 3), (Slot::Cav, 2)] {
            let id = embed(&OperatorMatrix::identity(Space::Single(d)), slot, shape).unwrap();
            assert_eq!(id, OperatorMatrix::identity(Space::Full(shape)));
        }
        let sp = embed(&pauli_ops().plus, Slot::Ion, shape).unwrap();
        assert_eq!(
            sp.element(Label::e(1, 0), Label::g(1, 0)).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            sp.element(Label::e(1, 0), Label::g(0, 0)).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn embed_disjoint_slots_commute() {
        let shape = HilbertShape::new(4, 3).unwrap();
        let z = embed(&pauli_ops().z, Slot::Ion, shape).unwrap();
        let n = embed(&number_op(4).unwrap(), Slot::Vib, shape).unwrap();
        let ab = z.matmul(&n).unwrap();
        let ba = n.matmul(&z).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() == 0.0);
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let shape = HilbertShape::new(4, 3).unwrap();
        let (lo, _) = ladder_ops(3).unwrap();
        assert!(matches!(embed(&lo, Slot::Vib, shape), Err(Error::Shape(_))));
    }

    #[test]
    fn basis_state_properties() {
        let shape = HilbertShape::new(2, 2).unwrap();
        let g00 = basis_state(shape, Label::g(0, 0)).unwrap();
        assert_eq!(g00.norm(), 1.0);
        let e11 = basis_state(shape, Label::e(1, 1)).unwrap();
        let g11 = basis_state(shape, Label::g(1, 1)).unwrap();
        assert_eq!(e11.inner(&g11).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            basis_state(shape, Label::g(2, 0)),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            basis_state(shape, Label::g(0, 2)),
            Err(Error::Index(_))
        ));

        let mut sum = CMatrix::zeros(shape.dim(), shape.dim());
        for l in shape.labels() {
            let v = basis_state(shape, l).unwrap();
            sum += v.amplitudes() * v.amplitudes().adjoint();
        }
        assert_eq!(sum, CMatrix::identity(shape.dim(), shape.dim()));
    }

    #[test]
    fn index_ordering_is_ion_slowest() {
        let shape = HilbertShape::new(3, 4).unwrap();
        assert_eq!(shape.index(Label::g(0, 1)).unwrap(), 1);
        assert_eq!(shape.index(Label::g(1, 0)).unwrap(), 4);
        assert_eq!(shape.index(Label::e(0, 0)).unwrap(), 12);
        for i in 0..shape.dim() {
            assert_eq!(shape.index(shape.label(i)).unwrap(), i);
        }
    }

    #[test]
    fn shape_rejects_zero() {
        assert!(HilbertShape::new(0, 2).is_err());
        assert!(HilbertShape::new(2, 0).is_err());
        assert_eq!(
            "6x8".parse::<HilbertShape>().unwrap(),
            HilbertShape::new(6, 8).unwrap()
        );
        assert!("6by8".parse::<HilbertShape>().is_err());
    }

    #[test]
    fn label_parsing() {
        assert_eq!("g,0,0".parse::<Label>().unwrap(), Label::g(0, 0));
        assert_eq!("|e, 1, 1⟩".parse::<Label>().unwrap(), Label::e(1, 1));
        assert!("x,0,0".parse::<Label>().is_err());
        assert_eq!(Label::e(2, 3).to_string(), "e,2,3");
    }

    #[test]
    fn product_state_reduction_is_pure() {
        let shape = HilbertShape::new(3, 3).unwrap();
        let psi = basis_state(shape, Label::g(0, 0)).unwrap();
        let rho = partial_trace(&psi, &[Slot::Ion]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_ion_reduction_is_maximally_mixed() {
        let shape = HilbertShape::new(2, 2).unwrap();
        let psi = QuantumState::from_labels(
            shape,
            &[
                (Label::g(0, 0), c(FRAC_1_SQRT_2, 0.0)),
                (Label::e(1, 1), c(0.0, -FRAC_1_SQRT_2)),
            ],
        )
        .unwrap();
        let rho = partial_trace(&psi, &[Slot::Ion]).unwrap();
        let m = rho.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15);
        assert!((rho.entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_empty_keep_rejected() {
        let shape = HilbertShape::new(2, 2).unwrap();
        let psi = basis_state(shape, Label::g(0, 0)).unwrap();
        assert!(matches!(
            partial_trace(&psi, &[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn partial_trace_keep_all_is_projector() {
        let shape = HilbertShape::new(2, 3).unwrap();
        let psi = QuantumState::from_labels(
            shape,
            &[(Label::g(0, 2), c(0.6, 0.0)), (Label::e(1, 1), c(0.0, 0.8))],
        )
        .unwrap();
        let rho = partial_trace(&psi, &[Slot::Cav, Slot::Ion, Slot::Vib]).unwrap();
        let expected = psi.amplitudes() * psi.amplitudes().adjoint();
        assert!((rho.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn hermitian_function_of_number_operator() {
        let n = number_op(4).unwrap();
        let e = n.hermitian_function(|x| C64::new(0.0, x).exp()).unwrap();
        for m in 0..4 {
            assert!((e.get(m, m) - C64::new(0.0, m as f64).exp()).norm() < 1e-14);
        }
    }
}
