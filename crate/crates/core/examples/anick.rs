//! Anick's automorphism over `Q[t]`, produced by the elementary-word pipeline.

use rescoord::catalog;
use rescoord::reduce::at2_pipeline;

fn main() -> rescoord::Result<()> {
    let ex = catalog::anick();
    let (alpha, word) = ex.at2_inputs().expect("anick has pipeline inputs");
    let cert = at2_pipeline(&alpha, &word)?;
    println!("theta(y)  = {}", cert.theta_y(0));
    println!("conjugate = {}", cert.conjugates[0].endo());
    println!("expected  = {}", ex.expected.as_ref().expect("closed form"));
    println!("evidence  = {}", cert.evidence);
    Ok(())
}
