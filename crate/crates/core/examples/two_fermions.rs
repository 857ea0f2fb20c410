//! Two electrons, one per well: exactly one is emitted and the other is left
//! in the dark state. The free-fermion oracle confirms it.

use distant_wells::fermion::two_electron_asymptotic;
use distant_wells::oracle::slater::two_fermion_run;
use distant_wells::oracle::{DiscretizedReservoir, SingleParticleOracle};
use distant_wells::{Parity, WellPair};

fn main() -> distant_wells::Result<()> {
    let y = 4.0;
    let pair = WellPair::from_widths(1.0, y, Parity::Even, 0.0, 0.0)?;
    for branch in two_electron_asymptotic(&pair)? {
        println!(
            "{} emitted with probability {:.3}: {:?}",
            branch.reservoir_count, branch.probability, branch.terms
        );
    }
    let g = 1.0 + y;
    let oracle = SingleParticleOracle::new(&pair, DiscretizedReservoir::new(20.0 * g, 800)?)?;
    let s = two_fermion_run(&oracle, &[50.0 / g])[0];
    println!(
        "oracle: P(1 emitted) = {:.5}, retained sigma = ({:.4}, {:.4}, {:.4})",
        s.p_one_emitted, s.retained.s11, s.retained.s22, s.retained.s12.re
    );
    Ok(())
}
