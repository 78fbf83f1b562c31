//! Russell-type coordinates `y + x f(x, y) + lambda x^s z` for a few parameters.

use rescoord::catalog;
use rescoord::reduce::at2_pipeline;
use rescoord::ring::{parse_poly, rat, RingContext};

fn main() -> rescoord::Result<()> {
    let ctx = RingContext::new(1, 1, 0)?;
    for (f, s, lambda) in [
        ("y^2", 1, rat(1, 1)),
        ("x*y^3 - y", 3, rat(-2, 3)),
        ("0", 2, rat(5, 1)),
    ] {
        let ex = catalog::russell(&parse_poly(f, &ctx)?, s, &lambda)?;
        let (alpha, word) = ex.at2_inputs().expect("pipeline inputs");
        let cert = at2_pipeline(&alpha, &word)?;
        println!("f = {f}, s = {s}, lambda = {lambda}");
        println!("  theta = {}", cert.theta.endo());
    }
    Ok(())
}
