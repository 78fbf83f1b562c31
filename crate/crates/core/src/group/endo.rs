use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{JacobianReport, Poly, RingContext};
use crate::weights::WeightVector;

/// An `S`-algebra endomorphism of `S[y, z]`, stored as the images of
/// `(y_1..y_m, z_1..z_n)`.
///
/// Composition follows polynomial maps: `(a o b)(v) = a(v)[vars := b(vars)]`,
/// so applying `a o b` to a polynomial applies `a` first.
#[derive(Clone, PartialEq, Eq)]
pub struct Endo {
    ctx: Arc<RingContext>,
    images: Vec<Poly>,
}

impl Endo {
    pub fn identity(ctx: &Arc<RingContext>) -> Self {
        let images = (0..ctx.dim())
            .map(|s| Poly::var(ctx, ctx.slot_index(s)))
            .collect();
        Endo {
            ctx: ctx.clone(),
            images,
        }
    }

    pub fn from_images(ctx: &Arc<RingContext>, images: Vec<Poly>) -> Result<Self> {
        if images.len() != ctx.dim() {
            return Err(Error::MissingImage(images.len()));
        }
        for img in &images {
            RingContext::ensure_same(ctx, img.ctx())?;
        }
        Ok(Endo {
            ctx: ctx.clone(),
            images,
        })
    }

    pub(crate) fn from_images_unchecked(ctx: &Arc<RingContext>, images: Vec<Poly>) -> Self {
        Endo {
            ctx: ctx.clone(),
            images,
        }
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    /// Image of the acted-on variable at position `pos` (`y`'s first).
    pub fn image(&self, pos: usize) -> &Poly {
        &self.images[pos]
    }

    pub fn y_image(&self, j: usize) -> &Poly {
        &self.images[j]
    }

    pub fn z_image(&self, k: usize) -> &Poly {
        &self.images[self.ctx.m() + k]
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    fn is_var_at(&self, pos: usize) -> bool {
        self.images[pos].as_scaled_var().is_some_and(|(c, r, idx)| {
            num_traits::One::is_one(&c) && r == 0 && idx == self.ctx.slot_index(pos)
        })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.images.len()).all(|p| self.is_var_at(p))
    }

    /// Images for substitution, with `None` where the variable is fixed.
    fn substitution(&self) -> Vec<Option<Poly>> {
        (0..self.images.len())
            .map(|p| (!self.is_var_at(p)).then(|| self.images[p].clone()))
            .collect()
    }

    pub fn compose(&self, other: &Endo) -> Endo {
        self.compose_limited(other, usize::MAX)
            .expect("unbounded composition")
    }

    /// `self o other`, or `None` once an image exceeds `limit` terms.
    pub fn compose_limited(&self, other: &Endo, limit: usize) -> Option<Endo> {
        assert!(
            RingContext::same(&self.ctx, &other.ctx),
            "context mismatch in composition"
        );
        let sub = other.substitution();
        let images = (0..self.images.len())
            .map(|p| {
                if self.is_var_at(p) {
                    Some(other.images[p].clone())
                } else {
                    self.images[p]
                        .substitute_limited(&sub, limit)
                        .filter(|q| q.len() <= limit)
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Endo {
            ctx: self.ctx.clone(),
            images,
        })
    }

    /// Apply, or `None` once the result exceeds `limit` terms.
    pub fn apply_limited(&self, p: &Poly, limit: usize) -> Option<Poly> {
        assert!(
            RingContext::same(&self.ctx, p.ctx()),
            "context mismatch in application"
        );
        p.substitute_limited(&self.substitution(), limit)
            .filter(|q| q.len() <= limit)
    }

    /// Largest total degree of a term, counting every variable but `x`.
    pub fn degree(&self) -> u64 {
        self.images
            .iter()
            .flat_map(|p| p.terms().map(|(m, _)| m.degree()))
            .max()
            .unwrap_or(0)
    }

    /// Largest number of terms in an image.
    pub fn size(&self) -> usize {
        self.images.iter().map(Poly::len).max().unwrap_or(0)
    }

    /// Apply to a polynomial: substitute the images into `p`.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        RingContext::ensure_same(&self.ctx, p.ctx())?;
        Ok(p.substitute_unchecked(&self.substitution()))
    }

    pub fn is_over_r(&self) -> bool {
        self.images.iter().all(Poly::is_over_r)
    }

    pub fn mod_x(&self) -> Result<Endo> {
        let images = self.images.iter().map(Poly::mod_x).collect::<Result<_>>()?;
        Ok(Endo {
            ctx: self.ctx.clone(),
            images,
        })
    }

    /// Whether every image is congruent to its variable modulo `x R^{[m+n]}`.
    pub fn is_identity_mod_x(&self) -> bool {
        (0..self.images.len()).all(|p| {
            let d = &self.images[p] - &Poly::var(&self.ctx, self.ctx.slot_index(p));
            d.divisible_by_x()
        })
    }

    pub fn jacobian(&self) -> JacobianReport {
        JacobianReport::of_images(&self.ctx, &self.images)
    }

    /// Conjugate `D^{-1} e D` with `D = (y, x^t z)`.
    pub fn conjugate_by(&self, tau: &WeightVector) -> Endo {
        let t = tau.entries();
        let m = self.ctx.m();
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(p, img)| {
                let s = img.scale_z(t);
                if p >= m {
                    s.shift_x(-t[p - m])
                } else {
                    s
                }
            })
            .collect();
        Endo {
            ctx: self.ctx.clone(),
            images,
        }
    }

    /// Image strings in variable order.
    pub fn image_strings(&self) -> Vec<String> {
        self.images.iter().map(|p| p.to_string()).collect()
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn endo(ctx: &Arc<RingContext>, images: &[&str]) -> Endo {
        Endo::from_images(
            ctx,
            images.iter().map(|s| parse_poly(s, ctx).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn composition_order() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let a = endo(&ctx, &["y", "z + y^2"]);
        let b = endo(&ctx, &["y + z", "z"]);
        let ab = a.compose(&b);
        assert_eq!(ab, endo(&ctx, &["y + z", "z + (y + z)^2"]));
        let p = parse_poly("z", &ctx).unwrap();
        assert_eq!(
            ab.apply(&p).unwrap(),
            b.apply(&a.apply(&p).unwrap()).unwrap()
        );
    }

    #[test]
    fn identity_mod_x() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        assert!(endo(&ctx, &["y + x*z", "z - x^2*y"]).is_identity_mod_x());
        assert!(!endo(&ctx, &["y + z", "z"]).is_identity_mod_x());
        assert!(!endo(&ctx, &["y", "z + y/x"]).is_identity_mod_x());
    }

    #[test]
    fn jacobian_of_nagata_like_map() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let e = endo(&ctx, &["y + x*z", "z"]);
        assert_eq!(e.jacobian().unit_constant(), Some(crate::ring::rat(1, 1)));
    }
}
