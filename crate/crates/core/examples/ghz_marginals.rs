//! Entanglement diagnostics of the GHZ targets and of an evolving state.
//!
//! Every single-party reduction of the target is maximally mixed, so each
//! marginal entropy is one bit.

use ghz_sim::fock::{partial_trace, HilbertShape, Label, Slot};
use ghz_sim::hamiltonian::SystemParams;
use ghz_sim::protocol::{protocol_series, target_state, Model, ProtocolSetup};

fn main() -> ghz_sim::Result<()> {
    let shape = HilbertShape::new(2, 2)?;
    println!("target from    S(ion)    S(vib)    S(cav)   (bits)");
    for start in [
        Label::g(0, 0),
        Label::e(0, 0),
        Label::g(1, 1),
        Label::e(1, 1),
    ] {
        let t = target_state(start, 1, 1, 1, shape)?;
        let s: Vec<f64> = [Slot::Ion, Slot::Vib, Slot::Cav]
            .iter()
            .map(|&slot| partial_trace(&t, &[slot]).map(|r| r.entropy()))
            .collect::<ghz_sim::Result<_>>()?;
        println!("|{start}>        {:.6}  {:.6}  {:.6}", s[0], s[1], s[2]);
    }

    let omega = 8.95e6;
    let params = SystemParams::resonant(omega, 0.0, 0.05, 0.05, 20.0 * omega, 4000.0 * omega);
    let series = protocol_series(&ProtocolSetup::new(params, shape, Model::BlockAnalytic), 9)?;
    println!("\nt (us)     S(ion)    purity(ion)  fidelity");
    for pt in &series.points {
        let rho = partial_trace(&pt.state, &[Slot::Ion])?;
        println!(
            "{:<10.5} {:.6}  {:.6}     {:.6}",
            pt.t * 1e6,
            rho.entropy(),
            rho.purity(),
            pt.fidelity
        );
    }
    Ok(())
}
