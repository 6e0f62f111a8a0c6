//! Walks the catalog of model currents and evaluates each density at one
//! point against `β^{n-k} ∧ β_v^m`.

use lelong_lab::currents::{catalog, density_at, CATALOG_NAMES};
use lelong_lab::forms::{CPoint, HermitianForm, C64};

fn main() -> lelong_lab::Result<()> {
    for name in CATALOG_NAMES {
        let t = catalog(name)?;
        let (n, m) = (t.split.n, t.split.m);
        let z = HermitianForm::identity(n).embed(n + m, 0);
        let v = HermitianForm::identity(m).embed(n + m, n);
        let mut tests = vec![z; n - t.bidegree];
        tests.extend(std::iter::repeat(v).take(m));
        // a generic point off every singular locus
        let coords = (0..n + m).map(|j| C64::new(0.11 + 0.07 * j as f64, -0.05 * j as f64)).collect();
        let p = CPoint::new(coords, t.split)?;
        let d = density_at(&t, &p, &tests)?;
        println!(
            "{:<5} (n={}, m={}) k={} {:<7} density {:+.6}   {}",
            t.name,
            n,
            m,
            t.bidegree,
            t.class.label(),
            d,
            t.describe()
        );
    }
    println!("\n{}", lelong_lab::scenario::list_catalog());
    Ok(())
}
