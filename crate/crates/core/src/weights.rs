//! Weight vectors `tau`, the algebras `A_tau = R[y][x^{t_1} z_1, .., x^{t_n} z_n]`,
//! and the minimal-weight computations driving the reduction pipelines.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Endo, GenPerm, Generator, GeneratorWord, Slot};
use crate::ring::{Poly, RingContext, XOrder};

/// Integer weights on the z-variables. Entries may transiently be negative
/// (images under a generalized permutation); `is_natural` reports whether
/// the vector lies in `N^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<i64>);

impl WeightVector {
    pub fn new(entries: Vec<i64>) -> Self {
        WeightVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        WeightVector(vec![0; n])
    }

    /// `e_k` (0-based `k`).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        WeightVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_natural(&self) -> bool {
        self.0.iter().all(|&t| t >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    pub fn ensure_natural(&self) -> Result<()> {
        if self.is_natural() {
            Ok(())
        } else {
            Err(Error::NotNatural(self.to_string()))
        }
    }

    pub fn ensure_len(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::WeightLength {
                expected: n,
                got: self.0.len(),
            })
        }
    }

    /// Componentwise partial order; `None` when incomparable.
    pub fn compare(&self, other: &WeightVector) -> Option<Ordering> {
        let mut le = true;
        let mut ge = true;
        for (a, b) in self.0.iter().zip(&other.0) {
            le &= a <= b;
            ge &= a >= b;
        }
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    pub fn le(&self, other: &WeightVector) -> bool {
        matches!(self.compare(other), Some(Ordering::Less | Ordering::Equal))
    }

    pub fn ge(&self, other: &WeightVector) -> bool {
        other.le(self)
    }

    pub fn sub(&self, other: &WeightVector) -> WeightVector {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &WeightVector) -> WeightVector {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn max(&self, other: &WeightVector) -> WeightVector {
        WeightVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// `Some((k, delta))` when `self = delta * e_k` (the zero vector reports `k = 0`).
    pub fn as_rank_one(&self) -> Option<(usize, i64)> {
        let nonzero: Vec<usize> = (0..self.0.len()).filter(|&k| self.0[k] != 0).collect();
        match nonzero.as_slice() {
            [] => Some((0, 0)),
            [k] => Some((*k, self.0[*k])),
            _ => None,
        }
    }

    /// Every vector `sigma` with `0 <= sigma <= self`, in lexicographic order.
    pub fn box_points(&self) -> Vec<WeightVector> {
        let mut out = vec![Vec::new()];
        for &t in &self.0 {
            let mut next = Vec::new();
            for prefix in &out {
                for s in 0..=t.max(0) {
                    let mut v = prefix.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(WeightVector).collect()
    }

    pub fn box_size(&self) -> u128 {
        self.0.iter().map(|&t| (t.max(0) + 1) as u128).product()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

fn z_weight(ctx: &RingContext, exps: &[u32], tau: &WeightVector) -> i64 {
    (0..ctx.n())
        .map(|k| tau.0[k] * exps[ctx.z_index(k)] as i64)
        .sum()
}

/// Membership in `A_tau`: every term `x^a * (u, y)-part * z^b` has `a >= sum_k t_k b_k`.
pub fn a_tau_member(p: &Poly, tau: &WeightVector) -> bool {
    let ctx = p.ctx();
    p.terms()
        .all(|(m, _)| m.x_exp() >= z_weight(ctx, m.exps(), tau))
}

/// The part of `P` (assumed in `A_tau`) that is not in `x A_tau`.
pub fn a_tau_leading(p: &Poly, tau: &WeightVector) -> Poly {
    let ctx = p.ctx();
    p.filter_terms(|m, _| m.x_exp() <= z_weight(ctx, m.exps(), tau))
}

/// Smallest `d >= 0` with `x^d * P` in `A_tau`.
pub fn a_tau_deficiency(p: &Poly, tau: &WeightVector) -> Result<i64> {
    if p.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(deficiency_or_zero(p, tau))
}

pub(crate) fn deficiency_or_zero(p: &Poly, tau: &WeightVector) -> i64 {
    let ctx = p.ctx();
    p.terms()
        .map(|(m, _)| z_weight(ctx, m.exps(), tau) - m.x_exp())
        .max()
        .unwrap_or(0)
        .max(0)
}

/// Componentwise-minimal `tau` with `e(A_tau)` inside `R^{[m+n]}`.
pub fn minimal_tau(e: &Endo) -> Result<WeightVector> {
    let ctx = e.ctx();
    for j in 0..ctx.m() {
        if !e.image(j).is_over_r() {
            return Err(Error::YImageNotIntegral(format!(
                "image of {} is {}",
                ctx.name(ctx.y_index(j)),
                e.image(j)
            )));
        }
    }
    let tau = (0..ctx.n())
        .map(|k| match e.image(ctx.m() + k).x_order() {
            XOrder::Finite(o) => (-o).max(0),
            XOrder::Infinite => 0,
        })
        .collect();
    Ok(WeightVector(tau))
}

/// Result of [`sigma_sequence`]: `sigmas[i]` is `sigma_i` for `0 <= i <= q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSequence {
    pub sigmas: Vec<WeightVector>,
    pub monotone: bool,
}

/// Backwards recursion for the minimal `sigma_i` with `Phi_i(A_{sigma_i})` in `A_{sigma_{i+1}}`,
/// starting from `sigma_{q+1} = 0`.
pub fn sigma_sequence(word: &GeneratorWord) -> Result<SigmaSequence> {
    let ctx = word.ctx();
    let mut next = WeightVector::zero(ctx.n());
    let mut sigmas = vec![WeightVector::zero(ctx.n()); word.len()];
    for (i, g) in word.generators().iter().enumerate().rev() {
        let (k, tail) = match g {
            Generator::Elementary {
                slot: Slot::Z(k),
                poly,
            } => (*k, poly),
            _ => return Err(Error::NonElementaryGenerator(i)),
        };
        let mut sigma = next.clone();
        sigma.0[k] = next.0[k].max(deficiency_or_zero(tail, &next));
        sigmas[i] = sigma.clone();
        next = sigma;
    }
    let monotone = sigmas.windows(2).all(|w| w[0].ge(&w[1]));
    Ok(SigmaSequence { sigmas, monotone })
}

/// `rho(tau)_i = t_{pi^{-1}(i)} + r_i`.
pub fn rho_apply_tau(rho: &GenPerm, tau: &WeightVector) -> WeightVector {
    let n = tau.len();
    let inv = rho.inverse_perm();
    WeightVector((0..n).map(|i| tau.0[inv[i]] + rho.r()[i]).collect())
}

/// Whether `x^{t_k} z_k` lies in `A_tau` after applying `e`, for every generator of `A_tau`.
pub fn maps_a_tau_into(e: &Endo, from: &WeightVector, into: &WeightVector) -> bool {
    let ctx = e.ctx();
    (0..ctx.m()).all(|j| a_tau_member(e.image(j), into))
        && (0..ctx.n()).all(|k| a_tau_member(&e.image(ctx.m() + k).shift_x(from.0[k]), into))
}

/// Whether `e(A_tau)` lies in `R^{[m+n]}`.
pub fn maps_a_tau_into_r(e: &Endo, tau: &WeightVector) -> bool {
    let zero = WeightVector::zero(e.ctx().n());
    maps_a_tau_into(e, tau, &zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_poly, rat};

    fn w(v: &[i64]) -> WeightVector {
        WeightVector::new(v.to_vec())
    }

    #[test]
    fn membership_examples() {
        let ctx = RingContext::new(1, 3, 0).unwrap();
        let p = parse_poly("y*(x^2*z3) + (x*z2)^2", &ctx).unwrap();
        assert!(a_tau_member(&p, &w(&[0, 1, 2])));
        assert!(!a_tau_member(&p, &w(&[0, 1, 3])));
        assert!(a_tau_member(
            &parse_poly("x^3*y^2 + y", &ctx).unwrap(),
            &w(&[3, 3, 3])
        ));
        let ctx2 = RingContext::new(0, 2, 0).unwrap();
        assert!(!a_tau_member(&Poly::z(&ctx2, 0), &w(&[1, 0])));
        assert!(a_tau_member(
            &parse_poly("x*z1", &ctx2).unwrap(),
            &w(&[1, 0])
        ));
    }

    #[test]
    fn deficiency_examples() {
        let ctx = RingContext::new(1, 2, 0).unwrap();
        assert_eq!(a_tau_deficiency(&Poly::z(&ctx, 0), &w(&[2, 0])).unwrap(), 2);
        assert_eq!(
            a_tau_deficiency(&parse_poly("x^2*z1", &ctx).unwrap(), &w(&[2, 0])).unwrap(),
            0
        );
        assert_eq!(
            a_tau_deficiency(&parse_poly("y*z2^2", &ctx).unwrap(), &w(&[0, 3])).unwrap(),
            6
        );
        assert_eq!(
            a_tau_deficiency(&Poly::zero(&ctx), &w(&[0, 3])),
            Err(Error::ZeroInput)
        );
    }

    #[test]
    fn partial_order() {
        assert_eq!(w(&[1, 2]).compare(&w(&[1, 3])), Some(Ordering::Less));
        assert_eq!(w(&[1, 2]).compare(&w(&[2, 1])), None);
        assert_eq!(
            w(&[0, 2, 0]).sub(&w(&[0, 0, 0])).as_rank_one(),
            Some((1, 2))
        );
        assert_eq!(w(&[1, 1]).as_rank_one(), None);
        assert_eq!(w(&[1, 2]).box_points().len(), 6);
    }

    #[test]
    fn rho_formula() {
        let rho = GenPerm::new(vec![1, 0], vec![rat(1, 1), rat(1, 1)], vec![1, -1]).unwrap();
        assert_eq!(rho_apply_tau(&rho, &w(&[2, 3])), w(&[4, 1]));
        let id = GenPerm::identity(2);
        assert_eq!(rho_apply_tau(&id, &w(&[2, 3])), w(&[2, 3]));
    }
}
