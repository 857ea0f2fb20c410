//! Two pairs of wells side by side with an on-site interaction. Tuning one
//! pair into resonance decides whether an electron stays trapped.

use distant_wells::fermion::{bipartition_entangled, three_electron_asymptotic, two_electron_parallel_asymptotic};
use distant_wells::{ParallelWellPair, Parity, WellPair};

fn main() -> distant_wells::Result<()> {
    let u = 4.0;
    for e2 in [2.0, 8.0] {
        let base = WellPair::from_widths(1.0, 1.0, Parity::Even, -2.0, e2)?;
        let model = ParallelWellPair::new(base, 1.0, u)?;
        for b in two_electron_parallel_asymptotic(&model)? {
            println!("E2 = {e2}: {} emitted, p = {:.3}", b.reservoir_count, b.probability);
        }
    }

    let model = ParallelWellPair::new(WellPair::from_widths(1.0, 2.0, Parity::Even, 0.0, 0.0)?, 1.5, 0.0)?;
    for b in three_electron_asymptotic(&model)? {
        let entangled = bipartition_entangled(&b.terms, 2)?;
        println!(
            "three electrons: {} emitted, p = {:.3}, wells entangled: {entangled}",
            b.reservoir_count, b.probability
        );
        for t in &b.terms {
            println!("  {:?} {:+.4}", t.occupation, t.amplitude.re);
        }
    }
    Ok(())
}
