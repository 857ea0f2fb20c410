//! Checks the wide-band description against a finite reservoir and shows
//! that the dark state never leaves the wells.

use distant_wells::basis::dark_state;
use distant_wells::oracle::{DiscretizedReservoir, SingleParticleOracle};
use distant_wells::single::{analytic_sigma_symmetric, time_grid};
use distant_wells::{Parity, WellPair};
use num_complex::Complex64;

fn main() -> distant_wells::Result<()> {
    let pair = WellPair::symmetric(1.0, 0.0)?.with_cutoff(20.0);
    let oracle = SingleParticleOracle::new(&pair, DiscretizedReservoir::for_pair(&pair, 800)?)?;
    let left = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let run = oracle.run(left, &time_grid(8.0, 9))?;
    for s in &run.trajectory.states {
        let exact = analytic_sigma_symmetric(1.0, 0.0, s.t).s11;
        println!("t = {:3.0}  oracle {:.5}  wide band {:.5}", s.t, s.sigma11, exact);
    }

    let pair = WellPair::from_widths(1.0, 4.0, Parity::Odd, 0.0, 0.0)?;
    let res = DiscretizedReservoir::for_pair(&pair, 400)?;
    let horizon = 0.5 * res.recurrence_time();
    let oracle = SingleParticleOracle::new(&pair, res)?;
    let d = dark_state(&pair).map(|x| Complex64::new(x, 0.0));
    let run = oracle.run(d, &time_grid(0.99 * horizon, 5))?;
    for s in &run.trajectory.states {
        println!("dark state, t = {:7.2}: dot occupation {:.12}", s.t, s.dot_occupation());
    }
    Ok(())
}
