//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use ghz_sim::evolution::{
    block_propagate, block_propagator, evolve_static, evolve_timedep, Amplitudes, BlockState,
    STEPS_PER_PERIOD,
};
use ghz_sim::fock::{basis_state, partial_trace, HilbertShape, Label, QuantumState, Slot};
use ghz_sim::hamiltonian::{
    block_labels, build_block_hamiltonian, build_ld_hamiltonian, build_rwa_hamiltonian,
    BlockParams, LabHamiltonian, SystemParams, TimeDependentHamiltonian,
};
use ghz_sim::protocol::{
    fidelity, ghz_schedule, protocol_series, target_state, tune_coupling, Model, ProtocolSetup,
};
use ghz_sim::{CVector, C64};
use rand::Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

const RABI_OMEGA: f64 = 8.95e6;

fn default_params() -> SystemParams {
    SystemParams::resonant(
        RABI_OMEGA,
        0.0,
        0.05,
        0.05,
        20.0 * RABI_OMEGA,
        4000.0 * RABI_OMEGA,
    )
}

fn c1_operation_time() -> Verdict {
    let (_, s) = ghz_schedule(
        &default_params(),
        shape(2, 2),
        Label::g(0, 0),
        1,
        1,
        1,
        true,
    )
    .unwrap();
    let closed = PI * 15f64.sqrt() / (4.0 * RABI_OMEGA);
    let rel = (s.t_p / 0.34e-6 - 1.0).abs();
    let agree = (s.t_p - closed).abs() / closed;
    verdict(
        rel < 0.01 && agree < 1e-12,
        format!("t1 = {:.6} us, |t1/0.34us - 1| = {rel:.2e} < 1e-2, schedule vs pi*sqrt15/(4 Omega) {agree:.1e}", s.t_p * 1e6),
    )
}

fn c2_tuning_identity() -> Verdict {
    let eta_c = 0.05;
    let g = tune_coupling(RABI_OMEGA, eta_c, 1).unwrap();
    let identity = g * eta_c * 15f64.sqrt() / RABI_OMEGA;
    let (_, s) = ghz_schedule(
        &default_params(),
        shape(2, 2),
        Label::g(0, 0),
        1,
        1,
        1,
        true,
    )
    .unwrap();
    let mu_err = (s.block.mu / (4.0 * RABI_OMEGA / 15f64.sqrt()) - 1.0).abs();
    let clause1 = (identity - 1.0).abs() < 1e-12;
    let clause2 = mu_err < 1e-12;
    verdict(
        clause1 && clause2,
        format!(
            "g*eta_c*sqrt15/Omega = {identity:.12} (want 1, {}); mu/(4 Omega/sqrt15) - 1 = {mu_err:.1e} ({}); \
             the closed-form propagator is exact only with the doubled coupling",
            if clause1 { "ok" } else { "FAILS" },
            if clause2 { "ok" } else { "FAILS" }
        ),
    )
}

fn c3_schrodinger_residual() -> Verdict {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let omega = RABI_OMEGA * r.gen_range(0.2..3.0);
        let a = omega * r.gen_range(0.02..2.0);
        let eta_c = 0.05;
        // sideband element 2a = g η_c in the (1,1) block
        let params = SystemParams {
            omega,
            g: 2.0 * a / eta_c,
            ..default_params()
        };
        let (h, block) = build_block_hamiltonian(&params, 1, 1, true).unwrap();
        assert!((block.a - a).abs() <= 1e-9 * a);
        let scale = block.mu + omega;
        let t = r.gen_range(1.0..40.0) / scale;
        let dt = 1e-5 / scale;
        let start = block_labels(1, 1)[k % 4];
        let psi0 = BlockState::from_label(block, start).unwrap();
        let at = |t: f64| block_propagate(&psi0, t).unwrap().amplitudes().clone();
        let dpsi = (at(t + dt) - at(t - dt)) / C64::new(2.0 * dt, 0.0);
        let hpsi = h.entries() * at(t);
        let residual = (dpsi * C64::new(0.0, 1.0) - &hpsi).norm() / hpsi.norm();
        worst = worst.max(residual);
    }
    verdict(
        worst < 1e-5,
        format!("max residual |i dPsi/dt - H Psi|/|H Psi| = {worst:.2e} < 1e-5 over 20 points"),
    )
}

fn c4_oracle_equivalence() -> Verdict {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let omega = r.gen_range(0.3..3.0);
        let coupling = r.gen_range(0.0..3.0);
        let block = BlockParams::new(1, 1, omega, coupling).unwrap();
        let h = block_matrix(omega, omega, coupling);
        for k in 0..100 {
            let t = 25.0 * k as f64 / 99.0;
            let exact = propagator(&h, t);
            let closed = block_propagator(&block, t).unwrap();
            for col in 0..4 {
                let psi0 = BlockState::from_label(block, block_labels(1, 1)[col]).unwrap();
                let got = block_propagate(&psi0, t).unwrap();
                worst = worst.max(max_abs_vec(&(got.amplitudes() - exact.column(col))));
                worst = worst.max(max_abs_vec(&(closed.column(col) - exact.column(col))));
            }
        }
    }
    verdict(
        worst < 1e-10,
        format!(
            "max |closed form - Taylor expm| = {worst:.2e} < 1e-10 (5 sets x 100 times x 4 states)"
        ),
    )
}

/// Independent transcription of the four-state table.
fn expected_ghz(start: Label, p: u32, sh: HilbertShape) -> CVector {
    let partner = match (start.ion, start.m) {
        (_, 0) => Label::new(start.ion.flipped(), 1, 1),
        _ => Label::new(start.ion.flipped(), 0, 0),
    };
    let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
    let h = sign / 2f64.sqrt();
    CVector::from_iterator(
        sh.dim(),
        sh.labels().map(|l| {
            if l == start {
                C64::new(h, 0.0)
            } else if l == partner {
                C64::new(0.0, -h)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    )
}

fn c5_states_table() -> Verdict {
    let sh = shape(3, 3);
    let mut worst: f64 = 0.0;
    for p in 1..=2 {
        for start in [
            Label::g(0, 0),
            Label::e(0, 0),
            Label::g(1, 1),
            Label::e(1, 1),
        ] {
            let setup = ProtocolSetup::new(default_params(), sh, Model::BlockAnalytic)
                .with_initial(start)
                .with_p(p);
            let series = protocol_series(&setup, 2).unwrap();
            let last = &series.points.last().unwrap().state;
            worst = worst.max(max_abs_vec(
                &(last.amplitudes() - expected_ghz(start, p, sh)),
            ));
        }
    }
    verdict(
        worst < 1e-10,
        format!("max amplitude deviation from table = {worst:.2e} < 1e-10 (4 states, p = 1, 2)"),
    )
}

fn c6_marginals() -> Verdict {
    let sh = shape(2, 2);
    let mut worst: f64 = 0.0;
    for start in [
        Label::g(0, 0),
        Label::e(0, 0),
        Label::g(1, 1),
        Label::e(1, 1),
    ] {
        let t = target_state(start, 1, 1, 1, sh).unwrap();
        for slot in [Slot::Ion, Slot::Vib, Slot::Cav] {
            for ev in partial_trace(&t, &[slot]).unwrap().eigenvalues() {
                worst = worst.max((ev - 0.5).abs());
            }
        }
    }
    verdict(
        worst < 1e-12,
        format!("max |eigenvalue - 1/2| over all marginals = {worst:.2e} < 1e-12"),
    )
}

fn c7_full_model_consistency() -> Verdict {
    let g = tune_coupling(RABI_OMEGA, 0.05, 1).unwrap();
    let params = default_params().with_g(g);
    let t1 = PI * 15f64.sqrt() / (4.0 * RABI_OMEGA);
    let run = |n: usize| {
        let sh = shape(n, n);
        let h = build_ld_hamiltonian(&params, sh).unwrap();
        let psi = basis_state(sh, Label::g(0, 0)).unwrap();
        let out = evolve_static(&h, &psi, &[t1]).unwrap();
        let last = out.final_state().clone();
        let target = target_state(Label::g(0, 0), 1, 1, 1, sh).unwrap();
        let in_block: f64 = block_labels(1, 1)
            .iter()
            .map(|&l| last.population(l).unwrap())
            .sum();
        (
            fidelity(&last, &target).unwrap(),
            last.norm() * last.norm() - in_block,
            last.norm(),
            out.max_truncation_leak(),
        )
    };
    let (f6, leak6, n6, top6) = run(6);
    let (f8, leak8, n8, _) = run(8);
    let diff = (f6 - f8).abs();
    let ok = diff < 1e-6
        && leak6 >= 0.0
        && leak8 >= 0.0
        && (n6 - 1.0).abs() < 1e-9
        && (n8 - 1.0).abs() < 1e-9;
    verdict(
        ok,
        format!(
            "F(6x6) = {f6:.9}, F(8x8) = {f8:.9}, |diff| = {diff:.1e} < 1e-6; leakage {leak8:.4} >= 0; \
             norm error {:.1e}; top-level population at 6x6 {top6:.1e}",
            (n6 - 1.0).abs().max((n8 - 1.0).abs())
        ),
    )
}

fn c8_lamb_dicke_convergence() -> Verdict {
    let sh = shape(4, 4);
    // tuned coupling: g η_c, the sideband strength, is the same at both η
    let gap = |eta: f64| {
        let p = scaled_params(tune_coupling(RABI_OMEGA, eta, 1).unwrap(), eta);
        let rwa = build_rwa_hamiltonian(&p, sh).unwrap();
        let ld = build_ld_hamiltonian(&p, sh).unwrap();
        rwa.max_abs_diff(&ld).unwrap()
    };
    let ratio = gap(0.1) / gap(0.05);
    verdict((ratio / 4.0 - 1.0).abs() < 0.2, format!("max-entry |H_rwa - H_ld| ratio eta 0.1 / 0.05 at tuned g = {ratio:.4} (want 4 +/- 20%)"))
}

fn c9_node_offset() -> Verdict {
    let g = tune_coupling(RABI_OMEGA, 0.05, 1).unwrap();
    let t1 = PI * 15f64.sqrt() / (4.0 * RABI_OMEGA);
    let mut worst: f64 = 0.0;
    for phi in [0.0, PI / 6.0, PI / 3.0] {
        let series = |params: SystemParams| {
            let setup = ProtocolSetup::new(params, shape(3, 3), Model::BlockAnalytic)
                .with_tune(false)
                .with_time(t1);
            protocol_series(&setup, 101)
                .unwrap()
                .points
                .iter()
                .map(|p| p.fidelity)
                .collect::<Vec<_>>()
        };
        let offset = series(default_params().with_g(g).with_phi(phi));
        let folded = series(default_params().with_g(g * phi.cos()));
        for (a, b) in offset.iter().zip(&folded) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        worst < 1e-6,
        format!("max fidelity-series gap (g, phi) vs (g cos phi, 0) = {worst:.2e} < 1e-6"),
    )
}

fn c10_integrator() -> Verdict {
    let sh = shape(3, 3);
    let params = SystemParams::resonant(
        RABI_OMEGA,
        0.8 * RABI_OMEGA,
        0.1,
        0.1,
        5.0 * RABI_OMEGA,
        50.0 * RABI_OMEGA,
    );
    let lab = LabHamiltonian::new(params, sh).unwrap();
    let psi: QuantumState = basis_state(sh, Label::g(1, 1)).unwrap();
    let t = 0.5 / RABI_OMEGA;
    let dt = 2.0 * PI / lab.max_frequency() / STEPS_PER_PERIOD;
    let end = |dt: f64| {
        evolve_timedep(&lab, &psi, t, dt)
            .unwrap()
            .final_state()
            .amplitudes()
            .clone()
    };
    let reference = end(dt / 8.0);
    let e1 = (end(dt) - &reference).norm();
    let e2 = (end(dt / 2.0) - &reference).norm();
    let order = (e1 / e2).log2();

    let ld = build_ld_hamiltonian(&default_params().with_g(9e7), sh).unwrap();
    let psi0 = basis_state(sh, Label::g(0, 0)).unwrap();
    let t_ld = 0.34e-6;
    let step = 2.0 * PI / ld.max_frequency() / STEPS_PER_PERIOD / 4.0;
    let rk = evolve_timedep(&ld, &psi0, t_ld, step).unwrap();
    let exact = evolve_static(&ld, &psi0, &[t_ld]).unwrap();
    let cross = max_abs_vec(&(rk.final_state().amplitudes() - exact.final_state().amplitudes()));
    verdict(
        order >= 3.8 && cross < 1e-8,
        format!("self-convergence order {order:.3} >= 3.8 (scaled lab model); constant-H vs static engine {cross:.1e} < 1e-8"),
    )
}

fn c11_cli() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("defaults.json");
    fs::write(&cfg, r#"{"units":"MHz","params":{"omega":8.95,"eta":0.05},"model":"block","initial":"g,0,0","p":1}"#).unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_ghz-sim"))
            .current_dir(dir.path())
            .args(args)
            .output()
            .unwrap()
    };
    let a = run(&["ghz", "--config", "defaults.json", "--output", "a.csv"]);
    let b = run(&["ghz", "--config", "defaults.json", "--output", "b.csv"]);
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap_or_default();
    let identical = a.status.success()
        && b.status.success()
        && !read("a.csv").is_empty()
        && read("a.csv") == read("b.csv")
        && read("a.summary.csv") == read("b.summary.csv");

    let crafted = [
        ("exit0.json", r#"{"model":"ld","shape":"8x8"}"#, 0),
        ("exit1.json", r#"{"model":"ld","shape":"3x3"}"#, 1),
        ("exit2.json", r#"{"params":{"omega":8.95,"nu":-1}}"#, 2),
    ];
    let mut codes = Vec::new();
    for (name, text, _) in crafted {
        fs::write(dir.path().join(name), text).unwrap();
        codes.push(run(&["ghz", "--config", name]).status.code().unwrap_or(-1));
    }
    let want: Vec<i32> = crafted.iter().map(|c| c.2).collect();
    verdict(
        identical && codes == want,
        format!("golden file byte-identical: {identical}; exit codes {codes:?} (want {want:?})"),
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        (
            1,
            "operation time",
            c1_operation_time,
            Duration::from_millis(500),
        ),
        (
            2,
            "tuning identity",
            c2_tuning_identity,
            Duration::from_millis(500),
        ),
        (
            3,
            "analytic solution validity",
            c3_schrodinger_residual,
            Duration::from_secs(1),
        ),
        (
            4,
            "oracle equivalence",
            c4_oracle_equivalence,
            Duration::from_secs(1),
        ),
        (
            5,
            "GHZ states table",
            c5_states_table,
            Duration::from_millis(500),
        ),
        (
            6,
            "GHZ maximal marginals",
            c6_marginals,
            Duration::from_millis(500),
        ),
        (
            7,
            "full-model consistency",
            c7_full_model_consistency,
            Duration::from_secs(5),
        ),
        (
            8,
            "Lamb-Dicke convergence",
            c8_lamb_dicke_convergence,
            Duration::from_secs(1),
        ),
        (
            9,
            "node-offset compensation",
            c9_node_offset,
            Duration::from_secs(1),
        ),
        (
            10,
            "integrator quality",
            c10_integrator,
            Duration::from_secs(10),
        ),
        (
            11,
            "CLI determinism and exit codes",
            c11_cli,
            Duration::from_secs(5),
        ),
    ];
    let mut failed = Vec::new();
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let in_time = took <= budget;
        let ok = v.passed && in_time;
        println!(
            "{} criterion {id:>2} {name}: {} [{:.3} s, budget {} s]",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs_f64()
        );
        if !ok {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
