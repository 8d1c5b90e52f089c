//! Effective blockade shift of a random register from its chain of
//! doubly excited states, printed as CSV.

use blockade_gate::blockade::{build_chain, effective_shift};
use blockade_gate::register::{average_shift, sample_shifts, ShiftDistribution};

fn main() -> blockade_gate::Result<()> {
    let dist = ShiftDistribution::new(15.0, 1500.0, false, 7)?;
    let shifts = sample_shifts(&dist, 5)?;
    let chain = build_chain(&shifts)?;
    let eff = effective_shift(&chain)?;
    // for one driven subset the effective shift equals the harmonic mean
    println!(
        "# effective shift {eff:.6}, harmonic mean {:.6}",
        average_shift(&shifts)?
    );
    chain.write_csv(std::io::stdout().lock())
}
