//! Wedge, exterior derivative and Hodge star on the Heisenberg algebra.

use hetforge::exterior::{Form, FrameAlgebra};
use hetforge::scalar::qi;

fn main() -> hetforge::Result<()> {
    // de^3 = e^12, i.e. f^3_12 = -1 (indices are 0-based here)
    let heis = FrameAlgebra::new(3, &[(2, 0, 1, qi(-1))])?;
    let e = |i: usize| Form::basis(3, &[i]);

    println!("de3 = {}", heis.d(&e(2)));
    println!("d(e1 ^ e3) = {}", heis.d(&e(0).wedge(&e(2))));
    println!("*e3 = {}", heis.hodge(&e(2))?);
    println!("d*e3 = {} (e3 is coclosed)", heis.d(&heis.hodge(&e(2))?));
    Ok(())
}
