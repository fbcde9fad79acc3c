//! Runs the built-in check suite, then again with a corrupted `Ô_k`
//! implementation to show the suite catching it.

use ghz_sim::cli::{run_checks, Fault};
use ghz_sim::fock::HilbertShape;
use ghz_sim::hamiltonian::SystemParams;

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let params = SystemParams::resonant(omega, 0.0, 0.05, 0.05, 20.0 * omega, 4000.0 * omega);
    let shape = HilbertShape::new(4, 4)?;
    for fault in [None, Some(Fault::OkPerturb)] {
        println!("fault: {fault:?}");
        for outcome in run_checks(&params, shape, fault)? {
            println!("  {outcome}");
        }
    }
    Ok(())
}
