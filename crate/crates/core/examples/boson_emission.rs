//! Boson emission statistics: the missing single-emission line for one boson
//! per well, and the binomial law for all bosons in one well.

use distant_wells::boson::{emission_distribution, equal_fill_even_distribution, rotate_fock};
use distant_wells::{Parity, WellPair};

fn main() -> distant_wells::Result<()> {
    for y in [0.25, 1.0, 4.0] {
        let pair = WellPair::from_widths(1.0, y, Parity::Even, 0.0, 0.0)?;
        println!(
            "N = (1, 1), y = {y}: {:?}",
            emission_distribution(&pair, 1, 1)?.probabilities
        );
    }
    let pair = WellPair::from_widths(1.0, 2.0, Parity::Even, 0.0, 0.0)?;
    println!(
        "N = (4, 0), y = 2: {:?}",
        emission_distribution(&pair, 4, 0)?.probabilities
    );
    println!("N = (3, 3), y = 1: {:?}", equal_fill_even_distribution(3).probabilities);
    for (nd, nb, a) in rotate_fock(2, 1, 1.0, Parity::Odd)?.terms() {
        println!("  |{nd}, {nb}>  {a:+.5}");
    }
    Ok(())
}
