//! Vénéreau-type polynomials: the weight sequence of the five-generator word and
//! a certified coordinate system over `R` for several choices of `Q`.

use std::time::Instant;

use rescoord::catalog;
use rescoord::reduce::at2_pipeline;
use rescoord::ring::parse_poly;
use rescoord::weights::sigma_sequence;

fn main() -> rescoord::Result<()> {
    let seq = sigma_sequence(&catalog::venereau_word())?;
    let taus: Vec<String> = seq.sigmas.iter().map(ToString::to_string).collect();
    println!("sigma sequence: {}", taus.join(","));

    let qctx = catalog::venereau_q_context();
    for q in ["w1", "w2", "w1 + x*w2", "w1^2"] {
        let ex = catalog::venereau_type(&parse_poly(q, &qctx)?)?;
        let (alpha, word) = ex.at2_inputs().expect("pipeline inputs");
        let start = Instant::now();
        let cert = at2_pipeline(&alpha, &word)?;
        println!(
            "Q = {q:<10} theta(y) has {} terms, matches: {}, evidence: {}, {:.2?}",
            cert.theta_y(0).len(),
            cert.theta_y(0) == &ex.expected_y,
            cert.evidence,
            start.elapsed()
        );
    }
    Ok(())
}
