//! A particle started in well 1 of two identical, aligned wells: a quarter
//! of the probability stays in each well forever.

use distant_wells::single::{evolve_master, DotDensity};
use distant_wells::WellPair;

fn main() -> distant_wells::Result<()> {
    let pair = WellPair::symmetric(1.0, 0.0)?;
    for t in [0.0, 1.0, 3.0, 10.0, 30.0] {
        let s = evolve_master(&pair, DotDensity::LEFT, t, 0.005)?;
        println!(
            "t = {t:5.1}  sigma11 = {:.6}  sigma22 = {:.6}  sigma12 = {:+.6}",
            s.s11, s.s22, s.s12.re
        );
    }
    Ok(())
}
