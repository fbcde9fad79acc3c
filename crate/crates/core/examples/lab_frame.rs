//! Lab-frame integration against the rotating-wave model.
//!
//! Optical frequencies are out of reach for a fixed-step integrator, so the
//! hierarchy ω₀ ≫ ν ≫ Ω is compressed and then stretched: the gap between
//! the lab-frame and RWA fidelities should close as the ratios grow. Both
//! models share a small 3x3 truncation to keep the run short.

use std::f64::consts::PI;

use ghz_sim::evolution::{evolve_static, evolve_timedep, to_interaction_picture, STEPS_PER_PERIOD};
use ghz_sim::fock::{basis_state, HilbertShape, Label};
use ghz_sim::hamiltonian::{
    build_rwa_hamiltonian, LabHamiltonian, SystemParams, TimeDependentHamiltonian,
};
use ghz_sim::protocol::{fidelity, target_state, tune_coupling};

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let eta = 0.05;
    let g = tune_coupling(omega, eta, 1)?;
    let shape = HilbertShape::new(3, 3)?;
    let t1 = PI * 15f64.sqrt() / (4.0 * omega);
    let psi = basis_state(shape, Label::g(0, 0))?;
    let target = target_state(Label::g(0, 0), 1, 1, 1, shape)?;

    println!("nu/Omega  w0/nu   F(lab)        F(rwa)        |diff|       steps");
    for (nu_ratio, w0_ratio) in [(5.0, 5.0), (10.0, 10.0), (20.0, 10.0), (20.0, 20.0)] {
        let nu = nu_ratio * omega;
        let params = SystemParams::resonant(omega, g, eta, eta, nu, w0_ratio * nu);
        let lab = LabHamiltonian::new(params, shape)?;
        let dt = 2.0 * PI / lab.max_frequency() / STEPS_PER_PERIOD / 8.0;
        let run = evolve_timedep(&lab, &psi, t1, dt)?;
        let lab_state = to_interaction_picture(run.final_state(), &params, t1);
        let rwa = evolve_static(&build_rwa_hamiltonian(&params, shape)?, &psi, &[t1])?;
        let (fl, fr) = (
            fidelity(&lab_state, &target)?,
            fidelity(rwa.final_state(), &target)?,
        );
        println!(
            "{nu_ratio:<9} {w0_ratio:<7} {fl:.10}  {fr:.10}  {:.3e}    {}",
            (fl - fr).abs(),
            (t1 / dt).ceil()
        );
    }
    Ok(())
}
