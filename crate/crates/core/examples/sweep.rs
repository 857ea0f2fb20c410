//! Runs a small scenario sweep in memory and prints the CSV it would write.

use distant_wells::scenario::{run, Format, Kind, ScenarioConfig};

const CONFIG: &str = r#"
[model]
omega1 = 0.3989422804014327
omega2 = 0.3989422804014327
rho = 1.0

[time]
t_max = 30.0
n_points = 31

[sweep]
axis1 = "y"
values1 = [0.1, 1.0, 10.0]
statistics = ["sigma11_final", "sigma11_asymptotic", "p0"]
"#;

fn main() -> distant_wells::Result<()> {
    let cfg = ScenarioConfig::from_toml_str(CONFIG)?;
    print!("{}", run(Kind::Sweep, &cfg, Format::Csv)?.body);
    Ok(())
}
