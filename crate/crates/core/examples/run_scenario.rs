//! Builds a config in memory, runs it and prints the report rows; the same
//! path the `lelong` binary takes.

use lelong_lab::scenario::{parse_config, run_scenario, Overrides};

const CONFIG: &str = r#"
[defaults]
ball = [{ center = [0.0, 0.0], radius = 0.5 }]
r_max = 0.25
count = 8
tol = 1e-6

[t3]
current = "T3"
checks = ["profile", "limit", "condition_c"]
expect_limit = 0.21875
expect_c = "trivially-holds"

[t4_scaling]
current = "T4"
checks = ["scaling"]
scaling_p = [3]
"#;

fn main() -> lelong_lab::Result<()> {
    for sc in parse_config(CONFIG, &Overrides::default())? {
        let out = run_scenario(&sc);
        for row in &out.rows {
            let r = row.r.map(|r| format!("{r:.4e}")).unwrap_or_default();
            println!("{:<11} {:<28} {:>11} {:>+16.10} {:>9.1e}  {}", row.scenario, row.check, r, row.value, row.error, row.verdict);
        }
    }
    Ok(())
}
