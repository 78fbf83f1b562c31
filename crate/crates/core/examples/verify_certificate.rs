//! Serialize a certificate, tamper with a copy, and re-check both from JSON.

use rescoord::catalog;
use rescoord::reduce::{at2_pipeline, CertificateJson};

fn main() -> rescoord::Result<()> {
    let ex = catalog::venereau();
    let (alpha, word) = ex.at2_inputs().expect("pipeline inputs");
    let text = at2_pipeline(&alpha, &word)?.to_json_string()?;
    println!("certificate: {} bytes", text.len());

    let report = CertificateJson::from_json_str(&text)?.verify()?;
    println!(
        "stored: passed = {}, evidence = {}",
        report.passed(),
        report.evidence
    );

    let mut forged = CertificateJson::from_json_str(&text)?;
    forged.theta_y[0] = "y + x*z".into();
    let report = forged.verify()?;
    println!("forged: passed = {}", report.passed());
    Ok(())
}
