//! Parallel sweep of the cavity Lamb-Dicke parameter under the RWA model,
//! written as CSV to stdout through the table writer.

use ghz_sim::fock::HilbertShape;
use ghz_sim::hamiltonian::SystemParams;
use ghz_sim::io::{Cell, Table};
use ghz_sim::protocol::{sweep, Model, ProtocolSetup, SweepAxis};

fn main() -> ghz_sim::Result<()> {
    let omega = 8.95e6;
    let params = SystemParams::resonant(omega, 0.0, 0.05, 0.05, 20.0 * omega, 4000.0 * omega);
    let base = ProtocolSetup::new(params, HilbertShape::new(10, 10)?, Model::RwaFull);
    let values = [0.02, 0.035, 0.05, 0.075, 0.1];
    let rows = sweep(&base, SweepAxis::EtaC, &values)?;

    let mut table = Table::new(
        ["eta_c", "tuned_g_mhz", "fidelity", "block_leakage"]
            .map(String::from)
            .to_vec(),
    );
    for row in rows {
        let r = row.report;
        table.push(vec![
            Cell::Num(row.value),
            Cell::Num(r.tuned_g * 1e-6),
            Cell::Num(r.fidelity),
            Cell::Num(r.block_leakage),
        ])?;
    }
    table.write_csv(std::io::stdout().lock())
}
