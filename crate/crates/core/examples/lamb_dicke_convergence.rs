//! How fast the full RWA Hamiltonian approaches its Lamb-Dicke limit.
//!
//! With the tuned coupling the sideband strength g·η_c is fixed, so the
//! largest entry of H_rwa − H_ld should shrink as η².

use ghz_sim::fock::HilbertShape;
use ghz_sim::hamiltonian::{build_ld_hamiltonian, build_rwa_hamiltonian, SystemParams};
use ghz_sim::protocol::tune_coupling;

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let shape = HilbertShape::new(4, 4)?;
    let mut previous: Option<f64> = None;
    println!("eta      max|H_rwa - H_ld| / Omega   ratio to previous");
    for eta in [0.2, 0.1, 0.05, 0.025, 0.0125] {
        let g = tune_coupling(omega, eta, 1)?;
        let p = SystemParams::resonant(omega, g, eta, eta, 20.0 * omega, 4000.0 * omega);
        let gap = build_rwa_hamiltonian(&p, shape)?
            .max_abs_diff(&build_ld_hamiltonian(&p, shape)?)?
            / omega;
        let ratio = previous.map_or(String::from("-"), |prev| format!("{:.4}", prev / gap));
        println!("{eta:<8} {gap:<27.6e} {ratio}");
        previous = Some(gap);
    }
    Ok(())
}
