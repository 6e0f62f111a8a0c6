//! The pointwise kernel: complex Hessians of a weight and the coefficient of
//! a wedge of (1,1)-forms.

use lelong_lab::fields::Field;
use lelong_lab::forms::{complex_hessian, mixed_wedge_coeff, wedge_by_permutations, CPoint, HermitianForm, Split, C64};

fn main() -> lelong_lab::Result<()> {
    let split = Split::new(2, 1)?;
    let p = CPoint::new(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.4), C64::new(0.5, 0.0)], split)?;

    // dd^c log(|z1|^2 + |z2|^2): rank one less than full, kernel along z
    let u = Field::log(1.0, Field::norm_sqr_of(3, &[0, 1]));
    let h = complex_hessian(&u, &p)?;
    let z: Vec<String> = p.z().iter().map(|c| format!("{c:.2}")).collect();
    println!("Hessian of log|z|^2 at z = ({}), t = {:.2}:", z.join(", "), p.t()[0]);
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:+.4}{:+.4}i", h.matrix()[(i, j)].re, h.matrix()[(i, j)].im)).collect();
        println!("  [{}]", row.join(", "));
    }

    let a = HermitianForm::diag(&[2.0, 3.0, 5.0]);
    let id = HermitianForm::identity(3);
    let c = mixed_wedge_coeff(&[a.clone(), a.clone(), a.clone()])?;
    println!("a^a^a = {c}  (3! det a = {})", 6.0 * a.matrix().det().re);
    let mixed = [a.clone(), id.clone(), h.clone()];
    println!(
        "a^1^h = {:.12}, by permutation expansion {:.12}",
        mixed_wedge_coeff(&mixed)?,
        wedge_by_permutations(&mixed)?
    );
    Ok(())
}
