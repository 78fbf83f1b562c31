//! Membership tests for `IA^tau` and `EA^tau`.

use super::endo::Endo;
use super::generator::{Generator, Slot};
use crate::error::{Error, Result};
use crate::ring::{Poly, XOrder};
use crate::weights::{a_tau_member, maps_a_tau_into, WeightVector};

/// Witnesses `F, G` with `alpha = (y + x F, z_k + x^{1 - t_k} G_k)`, `F, G` in `A_tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IaWitness {
    pub f: Vec<Poly>,
    pub g: Vec<Poly>,
}

/// Decompose `alpha` as an element of `IA^tau`.
pub fn canonical_ia_form(alpha: &Endo, tau: &WeightVector) -> Result<IaWitness> {
    let ctx = alpha.ctx();
    tau.ensure_len(ctx.n())?;
    let check = |w: Poly, what: &str| -> Result<Poly> {
        if let XOrder::Finite(o) = w.x_order() {
            if o < 0 {
                return Err(Error::ShapeMismatch(format!(
                    "{what} = {w} has x-order {o}"
                )));
            }
        }
        if !a_tau_member(&w, tau) {
            return Err(Error::WitnessNotInATau(format!(
                "{what} = {w} for tau = {tau}"
            )));
        }
        Ok(w)
    };
    let mut f = Vec::with_capacity(ctx.m());
    for j in 0..ctx.m() {
        let d = alpha.y_image(j) - &Poly::y(ctx, j);
        f.push(check(d.shift_x(-1), &format!("F_{}", j + 1))?);
    }
    let mut g = Vec::with_capacity(ctx.n());
    for k in 0..ctx.n() {
        let d = alpha.z_image(k) - &Poly::z(ctx, k);
        g.push(check(
            d.shift_x(tau.entries()[k] - 1),
            &format!("G_{}", k + 1),
        )?);
    }
    Ok(IaWitness { f, g })
}

pub fn is_in_ia_tau(alpha: &Endo, tau: &WeightVector) -> bool {
    canonical_ia_form(alpha, tau).is_ok()
}

/// Check that an elementary generator lies in `EA^tau`.
pub fn validate_elementary_tau(g: &Generator, tau: &WeightVector) -> Result<()> {
    let Generator::Elementary { slot, poly } = g else {
        return Err(Error::InvalidGenerator(format!("{g} is not elementary")));
    };
    let ctx = poly.ctx();
    tau.ensure_len(ctx.n())?;
    if poly.involves(slot.var_index(ctx)) {
        return Err(Error::InvalidGenerator(format!(
            "{g} involves its own variable"
        )));
    }
    let scaled = match slot {
        Slot::Y(_) => poly.clone(),
        Slot::Z(k) => poly.shift_x(tau.entries()[*k]),
    };
    if a_tau_member(&scaled, tau) {
        Ok(())
    } else {
        Err(Error::MembershipViolation(format!(
            "{scaled} is not in A_tau for tau = {tau}"
        )))
    }
}

/// Whether `phi` and `phi_inv` both map `A_tau` into itself.
pub fn preserves_a_tau(phi: &Endo, phi_inv: &Endo, tau: &WeightVector) -> bool {
    maps_a_tau_into(phi, tau, tau) && maps_a_tau_into(phi_inv, tau, tau)
}

/// Whether `phi` fixes every `y_j`.
pub fn fixes_y(phi: &Endo) -> bool {
    let ctx = phi.ctx();
    (0..ctx.m()).all(|j| phi.y_image(j) == &Poly::y(ctx, j))
}
