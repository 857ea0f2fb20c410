//! Slightly misaligned levels: the trapped fraction leaks out slowly, with a
//! lifetime that grows as the detuning shrinks.

use distant_wells::single::{dwell_time, master_trajectory, time_grid, DotDensity};
use distant_wells::{Parity, WellPair};

fn main() -> distant_wells::Result<()> {
    for (y, eps) in [(1.0, 0.1), (10.0, 0.1), (1.0, 0.05)] {
        let pair = WellPair::from_widths(1.0, y, Parity::Even, 0.5 * eps, -0.5 * eps)?;
        let tau = dwell_time(&pair)?;
        let times = time_grid(4.0 * tau, 401);
        let traj = master_trajectory(&pair, DotDensity::LEFT, &times, 0.01 / (1.0 + y))?;
        let fitted = 1.0 / traj.fitted_decay_rate(tau)?;
        println!("y = {y:4}  eps = {eps:4}  tau = {tau:9.2}  fitted = {fitted:9.2}");
    }
    Ok(())
}
