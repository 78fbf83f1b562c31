//! The rewriting pipeline for two `z`-variables, printing its trace.

use rescoord::group::{Automorphism, GenPerm, Generator, Slot};
use rescoord::mt2::{mt2_pipeline, mt2_stages, technical_conditions, Mt2Input};
use rescoord::ring::{parse_poly, RingContext};

fn main() -> rescoord::Result<()> {
    let ctx = RingContext::new(1, 2, 0)?;
    let ez = |k, s: &str| Generator::z_elementary(k, parse_poly(s, &ctx).expect("poly"));
    let alpha = Automorphism::from_generator(
        &ctx,
        Generator::elementary(Slot::Y(0), parse_poly("x^2*z1", &ctx)?)?,
    );
    let inputs = [
        Mt2Input::new(alpha, GenPerm::identity(2), ez(0, "y/x - y/x^2")?),
        Mt2Input::bare(&ctx, ez(0, "y/x^2")?),
    ];

    let report = technical_conditions(&mt2_stages(&ctx, &inputs)?)?;
    println!(
        "technical conditions equivalent at every stage: {}",
        report.all_equivalent
    );

    let cert = mt2_pipeline(&ctx, &inputs)?;
    for line in cert.rewrite_trace.as_deref().unwrap_or_default() {
        println!("  {line}");
    }
    println!("theta(y) = {}", cert.theta_y(0));
    println!("theta    = {}", cert.theta.endo());
    Ok(())
}
