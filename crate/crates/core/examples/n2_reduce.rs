//! One `y`, one `z`: strip the `x`-free part of the `z`-tail until the map is over `R`.

use rescoord::group::{Automorphism, Generator, GeneratorWord, Slot};
use rescoord::reduce::n2_reduce;
use rescoord::ring::{parse_poly, RingContext};

fn main() -> rescoord::Result<()> {
    let ctx = RingContext::new(1, 1, 0)?;
    let gens = vec![
        Generator::z_elementary(0, parse_poly("y^3/x^2 + y^2/x", &ctx)?)?,
        Generator::elementary(Slot::Y(0), parse_poly("x^3*z", &ctx)?)?,
    ];
    let phi = Automorphism::from_word(GeneratorWord::new(&ctx, gens)?);
    let red = n2_reduce(&phi)?;
    println!("input       = {}", phi.endo());
    println!("corrections = {}", red.corrections);
    println!("t           = {:?}", red.t_trace);
    println!("theta       = {}", red.theta.endo());
    println!("inverse     = {}", red.theta.inverse_endo());
    Ok(())
}
