//! Leakage out of the four-state block under the full Lamb-Dicke and RWA
//! Hamiltonians, and its convergence as the Fock truncation grows.

use ghz_sim::fock::HilbertShape;
use ghz_sim::hamiltonian::SystemParams;
use ghz_sim::protocol::{run_protocol, Model, ProtocolSetup};
use ghz_sim::Error;

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let params = SystemParams::resonant(omega, 0.0, 0.05, 0.05, 20.0 * omega, 4000.0 * omega);

    println!("model      shape  fidelity      leakage      top-level");
    for model in [Model::LdFull, Model::RwaFull] {
        for n in [4, 6, 8, 10] {
            let setup = ProtocolSetup::new(params, HilbertShape::new(n, n)?, model);
            match run_protocol(&setup) {
                Ok(r) => println!(
                    "{:<10} {n}x{n}   {:.10}  {:.6e}  {:.2e}",
                    model.tag(),
                    r.fidelity,
                    r.block_leakage,
                    r.max_truncation_leak
                ),
                Err(Error::Truncation { population, suggested_vib, suggested_cav, .. }) => println!(
                    "{:<10} {n}x{n}   too small: top level holds {population:.1e}, try {suggested_vib}x{suggested_cav}",
                    model.tag()
                ),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
