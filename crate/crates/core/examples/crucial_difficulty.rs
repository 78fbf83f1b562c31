//! A triangular map in three `z`-variables whose weighted generator images stay
//! over `R` while an element of `A_tau` leaves `x A_tau`.

use rescoord::catalog;
use rescoord::ring::XOrder;

fn main() {
    let cd = catalog::crucial_difficulty_example();
    let (in_a_tau, in_x_a_tau) = cd.p_membership();
    println!("tau      = {}", cd.tau);
    println!("omega    = {}", cd.example.word.to_endo());
    println!("P        = {}", cd.p);
    println!("P in A_tau: {in_a_tau}, P in x A_tau: {in_x_a_tau}");
    println!("omega(P) = {}", cd.value);
    if let XOrder::Finite(o) = cd.value.x_order() {
        println!("x-order of omega(P): {o}");
    }
    println!("with the other sign: {}", cd.value_sign_swapped);
}
