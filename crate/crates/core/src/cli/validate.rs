//! Self-checks run by `ghz-sim validate`.
//!
//! Every check compares two independent routes to the same quantity. The
//! `Ô_k` values enter through a provider so a deliberately corrupted
//! implementation can be plugged in and must be caught.

use std::f64::consts::PI;
use std::fmt;

use crate::evolution::{block_propagator, StaticPropagator, BLOCK_SYMMETRY};
use crate::fock::{ladder_ops, number_op, partial_trace, pauli_ops, HilbertShape, Label, Slot};
use crate::hamiltonian::{
    block_labels, build_block_hamiltonian, build_lab_hamiltonian, build_ld_hamiltonian,
    build_rwa_hamiltonian, o_k_element, restrict, BlockParams, SystemParams,
};
use crate::protocol::{ghz_schedule, target_state, tune_coupling};
use crate::{CMatrix, CVector, Result, C64};

/// Source of diagonal `Ô_k` elements: `(k, η, m) ↦ ⟨m|Ô_k|m⟩`.
pub type OkProvider<'a> = &'a (dyn Fn(usize, f64, usize) -> f64 + Sync);

/// Known-bad implementations for exercising the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Adds 1e-3 to every `Ô_k` element.
    OkPerturb,
}

pub const FAULT_SIZE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.measured.is_finite() && self.measured < self.threshold
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} < {:e} (measured {:.3e})",
            self.name, self.threshold, self.measured
        )
    }
}

/// Names and thresholds of the suite, in run order.
pub const CHECKS: [(&str, f64); 15] = [
    ("ladder_adjoint_pair", 1e-15),
    ("pauli_algebra", 1e-15),
    ("ok_series_vs_laguerre", 1e-12),
    ("rwa_block_elements", 1e-9),
    ("ld_block_restriction", 1e-15),
    ("hamiltonian_hermiticity", 1e-9),
    ("block_symmetry_commutes", 1e-15),
    ("block_schrodinger_residual", 1e-5),
    ("block_vs_eigen_propagator", 1e-10),
    ("block_composition", 1e-10),
    ("tuning_ratio", 1e-12),
    ("operation_time_rel_error", 1e-2),
    ("ghz_target_error", 1e-10),
    ("ghz_marginal_error", 1e-12),
    ("ld_convergence_ratio_error", 0.2),
];

fn ok_of_fault(fault: Option<Fault>) -> Box<dyn Fn(usize, f64, usize) -> f64 + Sync> {
    match fault {
        None => Box::new(o_k_element),
        Some(Fault::OkPerturb) => Box::new(|k, eta, m| o_k_element(k, eta, m) + FAULT_SIZE),
    }
}

/// `e^{−x/2} m!/(m+k)! L_m^{(k)}(x)` with `x = η²`, via the three-term
/// Laguerre recurrence.
pub fn ok_laguerre(k: usize, eta: f64, m: usize) -> f64 {
    let x = eta * eta;
    let a = k as f64;
    let (mut prev, mut cur) = (1.0, 1.0 + a - x);
    if m == 0 {
        cur = prev;
    }
    for j in 1..m {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    let ratio: f64 = (1..=k).map(|i| 1.0 / (m + i) as f64).product();
    (-0.5 * x).exp() * ratio * cur
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Low-discrepancy points in [0, 1).
fn golden(k: usize) -> f64 {
    (k as f64 * 0.618_033_988_749_894_9).fract()
}

pub fn run_checks(
    params: &SystemParams,
    shape: HilbertShape,
    fault: Option<Fault>,
) -> Result<Vec<CheckOutcome>> {
    let ok = ok_of_fault(fault);
    let ok: OkProvider = ok.as_ref();
    let measured = [
        ladder_check(shape)?,
        pauli_check(),
        ok_series_check(ok, params),
        rwa_block_check(ok, params, shape)?,
        ld_restriction_check(params, shape)?,
        hermiticity_check(params, shape)?,
        symmetry_check(params)?,
        schrodinger_check(params)?,
        eigen_check(params)?,
        composition_check(params)?,
        tuning_check(params)?,
        operation_time_check(params)?,
        target_check(params, shape)?,
        marginal_check()?,
        ld_convergence_check(ok, params)?,
    ];
    Ok(CHECKS
        .iter()
        .zip(measured)
        .map(|(&(name, threshold), measured)| CheckOutcome {
            name,
            measured,
            threshold,
        })
        .collect())
}

fn ladder_check(shape: HilbertShape) -> Result<f64> {
    let d = shape.vib_dim().max(shape.cav_dim());
    let (a, ad) = ladder_ops(d)?;
    let n = number_op(d)?;
    let pair = a.adjoint().max_abs_diff(&ad)?;
    let number = ad.matmul(&a)?.max_abs_diff(&n)?;
    Ok(pair.max(number))
}

fn pauli_check() -> f64 {
    let p = pauli_ops();
    // [σ₊, σ₋] = σ_z
    let comm = p.plus.entries() * p.minus.entries() - p.minus.entries() * p.plus.entries();
    max_abs(&(comm - p.z.entries()))
}

fn ok_series_check(ok: OkProvider, params: &SystemParams) -> f64 {
    let mut worst: f64 = 0.0;
    for eta in [params.eta_l, params.eta_c, 0.1, 0.3] {
        for k in 0..3 {
            for m in 0..12 {
                worst = worst.max((ok(k, eta, m) - ok_laguerre(k, eta, m)).abs());
            }
        }
    }
    worst
}

/// RWA Hamiltonian restricted to the (1,1) block against couplings built
/// from the provider, relative to Ω.
fn rwa_block_check(ok: OkProvider, params: &SystemParams, shape: HilbertShape) -> Result<f64> {
    let p = tuned(params)?;
    let h = build_rwa_hamiltonian(&p, shape)?;
    let sub = restrict(&h, &block_labels(1, 1))?;
    let g = p.effective_g();
    let expect = [
        ((0, 1), p.omega * ok(0, p.eta_l, 1)),
        ((2, 3), p.omega * ok(0, p.eta_l, 0)),
        ((0, 3), g * p.eta_c * ok(1, p.eta_c, 0)),
    ];
    Ok(expect
        .iter()
        .map(|&((i, j), v)| (sub.get(i, j) - C64::new(v, 0.0)).norm() / p.omega)
        .fold(0.0, f64::max))
}

fn ld_restriction_check(params: &SystemParams, shape: HilbertShape) -> Result<f64> {
    let p = tuned(params)?;
    let h = build_ld_hamiltonian(&p, shape)?;
    let mut worst: f64 = 0.0;
    for (m, n) in [(1, 1), (2, 1), (2, 2)] {
        if m >= shape.vib_dim() || n >= shape.cav_dim() {
            continue;
        }
        let (block, _) = build_block_hamiltonian(&p, m, n, true)?;
        worst = worst.max(restrict(&h, &block_labels(m, n))?.max_abs_diff(&block)? / p.omega);
    }
    Ok(worst)
}

fn hermiticity_check(params: &SystemParams, shape: HilbertShape) -> Result<f64> {
    let p = tuned(params)?;
    let mut worst = build_rwa_hamiltonian(&p, shape)?.hermiticity_error() / p.omega;
    worst = worst.max(build_ld_hamiltonian(&p, shape)?.hermiticity_error() / p.omega);
    for k in 0..4 {
        let t = golden(k + 1) * 1e-6;
        let h = build_lab_hamiltonian(&p, shape, t)?;
        worst = worst.max(h.hermiticity_error() / p.max_frequency());
    }
    Ok(worst)
}

fn tuned_block(params: &SystemParams) -> Result<BlockParams> {
    let (_, schedule) = ghz_schedule(
        params,
        HilbertShape::new(2, 2)?,
        Label::g(0, 0),
        1,
        1,
        1,
        true,
    )?;
    Ok(schedule.block)
}

fn tuned(params: &SystemParams) -> Result<SystemParams> {
    let g = tune_coupling(params.omega, params.eta_c, 1)?;
    let c = params.phi.cos();
    Ok(if c.abs() > 1e-12 {
        params.with_g(g / c)
    } else {
        params.with_g(g)
    })
}

fn block_matrix(block: &BlockParams) -> CMatrix {
    let mut h = CMatrix::zeros(4, 4);
    for (i, j, v) in [
        (0, 1, block.omega),
        (2, 3, block.omega),
        (0, 3, block.coupling),
    ] {
        h[(i, j)] = C64::new(v, 0.0);
        h[(j, i)] = C64::new(v, 0.0);
    }
    h
}

fn symmetry_check(params: &SystemParams) -> Result<f64> {
    let h = block_matrix(&tuned_block(params)?);
    let p = CMatrix::from_fn(4, 4, |i, j| {
        if BLOCK_SYMMETRY[j] == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(max_abs(&(&p * &h - &h * &p)))
}

/// Central-difference residual `‖i U̇ − H U‖ / ‖H‖` over scattered blocks and times.
fn schrodinger_check(params: &SystemParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let omega = params.omega * (0.5 + golden(k));
        let coupling = omega * (0.05 + 2.0 * golden(k + 100));
        let block = BlockParams::new(1, 1, omega, coupling)?;
        let h = block_matrix(&block);
        let scale = block.mu + omega;
        let t = 10.0 * golden(k + 200) / scale + 1.0 / scale;
        let dt = 1e-5 / scale;
        let du = (block_propagator(&block, t + dt)? - block_propagator(&block, t - dt)?)
            / C64::new(2.0 * dt, 0.0);
        let residual = du * C64::new(0.0, 1.0) - &h * block_propagator(&block, t)?;
        worst = worst.max(max_abs(&residual) / scale);
    }
    Ok(worst)
}

fn eigen_check(params: &SystemParams) -> Result<f64> {
    let (h, block) = build_block_hamiltonian(&tuned(params)?, 1, 1, true)?;
    let prop = StaticPropagator::new(&h)?;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let t = golden(k + 1) * 4.0 * PI / block.omega;
        worst = worst.max(max_abs(&(prop.unitary(t) - block_propagator(&block, t)?)));
    }
    Ok(worst)
}

fn composition_check(params: &SystemParams) -> Result<f64> {
    let block = tuned_block(params)?;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let t1 = golden(k + 1) / block.omega;
        let t2 = golden(k + 50) / block.omega;
        let lhs = block_propagator(&block, t1 + t2)?;
        let rhs = block_propagator(&block, t1)? * block_propagator(&block, t2)?;
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

fn tuning_check(params: &SystemParams) -> Result<f64> {
    let sh = HilbertShape::new(2, 2)?;
    let mut worst: f64 = 0.0;
    for p in 1..=5u32 {
        let (_, s) = ghz_schedule(params, sh, Label::g(0, 0), 1, 1, p, true)?;
        let want = 4.0 * p as f64;
        worst = worst.max((s.block.mu / s.block.a - want).abs() / want);
    }
    Ok(worst)
}

/// Relative distance of `t₁` from `π√15 / (4Ω)`.
fn operation_time_check(params: &SystemParams) -> Result<f64> {
    let (_, s) = ghz_schedule(
        params,
        HilbertShape::new(2, 2)?,
        Label::g(0, 0),
        1,
        1,
        1,
        true,
    )?;
    let expected = PI * 15f64.sqrt() / (4.0 * params.omega);
    Ok((s.t_p - expected).abs() / expected)
}

/// Closed-form state at `t_p` against the GHZ target for each table entry.
fn target_check(params: &SystemParams, shape: HilbertShape) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for start in block_labels(1, 1) {
        let (_, s) = ghz_schedule(params, shape, start, 1, 1, 1, true)?;
        let u = block_propagator(&s.block, s.t_p)?;
        let col = block_labels(1, 1)
            .iter()
            .position(|&l| l == start)
            .expect("label in block");
        let full = CVector::from_iterator(
            shape.dim(),
            shape.labels().map(|l| {
                block_labels(1, 1)
                    .iter()
                    .position(|&b| b == l)
                    .map_or(C64::new(0.0, 0.0), |i| u[(i, col)])
            }),
        );
        worst = worst.max(
            (full - s.target.amplitudes())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }
    Ok(worst)
}

fn marginal_check() -> Result<f64> {
    let sh = HilbertShape::new(2, 2)?;
    let mut worst: f64 = 0.0;
    for start in block_labels(1, 1) {
        let t = target_state(start, 1, 1, 1, sh)?;
        for slot in [Slot::Ion, Slot::Vib, Slot::Cav] {
            let rho = partial_trace(&t, &[slot])?;
            for ev in rho.eigenvalues() {
                worst = worst.max((ev - 0.5).abs());
            }
        }
    }
    Ok(worst)
}

/// Max-entry gap between the full-η block and its Lamb-Dicke limit is O(η²):
/// halving η should quarter it. Measures `|ratio/4 − 1|`.
fn ld_convergence_check(ok: OkProvider, params: &SystemParams) -> Result<f64> {
    let gap = |eta: f64| -> f64 {
        let side = params.omega; // sideband coupling gη held fixed
        [
            params.omega * (ok(0, eta, 1) - 1.0),
            params.omega * (ok(0, eta, 0) - 1.0),
            side * (ok(1, eta, 0) - 1.0),
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    };
    let ratio = gap(0.1) / gap(0.05);
    Ok((ratio / 4.0 - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams {
        let omega = 8.95e6;
        SystemParams::resonant(omega, 0.0, 0.05, 0.05, 20.0 * omega, 4000.0 * omega)
    }

    #[test]
    fn laguerre_route_matches_series() {
        for k in 0..4 {
            for m in 0..15 {
                for eta in [0.0, 0.05, 0.2, 0.7] {
                    assert!(
                        (ok_laguerre(k, eta, m) - o_k_element(k, eta, m)).abs() < 1e-13,
                        "{k} {m} {eta}"
                    );
                }
            }
        }
    }

    #[test]
    fn clean_suite_passes() {
        let out = run_checks(&params(), HilbertShape::new(4, 4).unwrap(), None).unwrap();
        assert_eq!(out.len(), CHECKS.len());
        for c in &out {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn perturbed_ok_is_caught() {
        let out = run_checks(
            &params(),
            HilbertShape::new(4, 4).unwrap(),
            Some(Fault::OkPerturb),
        )
        .unwrap();
        let failed: Vec<&str> = out.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        assert!(failed.contains(&"ok_series_vs_laguerre"), "{failed:?}");
        assert!(failed.contains(&"rwa_block_elements"), "{failed:?}");
    }

    #[test]
    fn outcome_line_format() {
        let c = CheckOutcome {
            name: "x",
            measured: 2e-7,
            threshold: 1e-5,
        };
        assert_eq!(c.to_string(), "PASS x < 1e-5 (measured 2.000e-7)");
    }
}
