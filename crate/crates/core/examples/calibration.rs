//! Integrals with known values: true error against the reported one.

use lelong_lab::calibration::run_calibration;
use lelong_lab::quadrature::QuadOptions;

fn main() -> lelong_lab::Result<()> {
    for tol in [1e-3, 1e-6] {
        println!("tol = {tol:e}");
        for c in run_calibration(&QuadOptions::new(tol, 1))? {
            println!(
                "  {:<18} {:>14.10} exact {:>14.10}  true error {:.1e}  reported {:.1e}  {:<11} {}",
                c.name,
                c.estimate.value,
                c.exact,
                c.true_error(),
                c.estimate.error,
                c.estimate.strategy,
                if c.honest() { "ok" } else { "DISHONEST" }
            );
        }
    }
    Ok(())
}
