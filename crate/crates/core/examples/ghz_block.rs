//! Tuned single-step GHZ generation in the four-state block.
//!
//! Prints the tuned coupling and operation time for the first few pulse
//! indices, then the state reached from each of the four basis states.

use ghz_sim::fock::{HilbertShape, Label};
use ghz_sim::hamiltonian::SystemParams;
use ghz_sim::protocol::{protocol_series, tune_coupling, Model, ProtocolSetup};

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let eta = 0.05;
    let params = SystemParams::resonant(omega, 0.0, eta, eta, 20.0 * omega, 4000.0 * omega);
    let shape = HilbertShape::new(3, 3)?;

    println!("p   g (MHz)      t_p (us)");
    for p in 1..=4 {
        let setup = ProtocolSetup::new(params, shape, Model::BlockAnalytic).with_p(p);
        let (_, s) = setup.schedule()?;
        println!(
            "{p}   {:<11.6}  {:.6}",
            tune_coupling(omega, eta, p)? * 1e-6,
            s.t_p * 1e6
        );
    }

    println!();
    for start in [
        Label::g(0, 0),
        Label::e(0, 0),
        Label::g(1, 1),
        Label::e(1, 1),
    ] {
        let setup = ProtocolSetup::new(params, shape, Model::BlockAnalytic).with_initial(start);
        let series = protocol_series(&setup, 2)?;
        let last = &series.points.last().expect("two samples").state;
        let terms: Vec<String> = last
            .populations()
            .into_iter()
            .filter(|(_, p)| *p > 1e-12)
            .map(|(l, _)| {
                let a = last.amplitude(l).expect("label in shape");
                format!("({:+.4}{:+.4}i)|{l}>", a.re, a.im)
            })
            .collect();
        println!(
            "|{start}> -> {}   fidelity {:.12}",
            terms.join(" "),
            series.report.fidelity
        );
    }
    Ok(())
}
