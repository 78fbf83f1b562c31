//! Rebuild the Nagata automorphism from `(y + x^2 z, z)` and one elementary over `S`.

use rescoord::catalog;
use rescoord::reduce::at2_pipeline;

fn main() -> rescoord::Result<()> {
    let ex = catalog::nagata();
    println!("{}", ex.description);
    println!("word      = {}", ex.word);
    println!("expanded  = {}", ex.word.to_endo());
    println!("jacobian  = {}", ex.word.to_endo().jacobian().determinant);

    let (alpha, word) = ex.at2_inputs().expect("nagata has pipeline inputs");
    let cert = at2_pipeline(&alpha, &word)?;
    println!("theta(y)  = {}", cert.theta_y(0));
    println!("conjugate = {}", cert.conjugates[0].endo());
    println!("all checks pass: {}", cert.checks.all_pass());
    Ok(())
}
