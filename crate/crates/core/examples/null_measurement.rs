use distant_wells::basis::{null_measurement_project, rotate};
use distant_wells::single::{evolve_amplitudes, SingleParticleState};
use distant_wells::{Parity, WellPair};
use num_complex::Complex64;

fn main() -> distant_wells::Result<()> {
    let pair = WellPair::from_widths(1.0, 3.0, Parity::Even, 0.0, 0.0)?;
    let b = evolve_amplitudes(&pair, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 2.0)?;
    let before = SingleParticleState::from_amplitudes(b[0], b[1], 2.0)?;
    let after = null_measurement_project(&before)?;
    println!("dot occupation before detection: {:.6}", before.dot_occupation());
    println!(
        "after a null result: sigma11 = {:.6}, sigma22 = {:.6}",
        after.sigma11, after.sigma22
    );
    let rb = rotate(&pair);
    println!(
        "dark/bright split: {:?}",
        rb.to_rotated(after.amplitudes.unwrap()).map(|z| z.norm_sqr())
    );
    Ok(())
}
