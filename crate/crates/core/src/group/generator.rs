use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::endo::Endo;
use crate::error::{Error, Result};
use crate::ring::{determinant, Poly, RingContext};
use crate::weights::WeightVector;

/// A variable acted on by an elementary generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Y(usize),
    Z(usize),
}

impl Slot {
    /// Position among the acted-on variables `(y_1..y_m, z_1..z_n)`.
    pub fn position(self, ctx: &RingContext) -> usize {
        match self {
            Slot::Y(j) => j,
            Slot::Z(k) => ctx.m() + k,
        }
    }

    pub fn from_position(ctx: &RingContext, pos: usize) -> Slot {
        if pos < ctx.m() {
            Slot::Y(pos)
        } else {
            Slot::Z(pos - ctx.m())
        }
    }

    pub fn var_index(self, ctx: &RingContext) -> usize {
        ctx.slot_index(self.position(ctx))
    }
}

/// Generalized permutation: `z_i -> lambda_{pi(i)} x^{r_{pi(i)}} z_{pi(i)}`.
///
/// `lambda` and `r` are indexed by the target variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenPerm {
    perm: Vec<usize>,
    lambda: Vec<BigRational>,
    r: Vec<i64>,
}

impl GenPerm {
    pub fn new(perm: Vec<usize>, lambda: Vec<BigRational>, r: Vec<i64>) -> Result<Self> {
        let n = perm.len();
        if lambda.len() != n || r.len() != n {
            return Err(Error::InvalidGenerator(
                "permutation data of unequal lengths".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidGenerator(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        if lambda.iter().any(Zero::is_zero) {
            return Err(Error::InvalidGenerator("zero scaling factor".into()));
        }
        Ok(GenPerm { perm, lambda, r })
    }

    pub fn identity(n: usize) -> Self {
        GenPerm {
            perm: (0..n).collect(),
            lambda: vec![BigRational::one(); n],
            r: vec![0; n],
        }
    }

    /// Diagonal `z_i -> lambda_i x^{r_i} z_i`.
    pub fn diagonal(lambda: Vec<BigRational>, r: Vec<i64>) -> Result<Self> {
        Self::new((0..r.len()).collect(), lambda, r)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn lambda(&self) -> &[BigRational] {
        &self.lambda
    }

    pub fn r(&self) -> &[i64] {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.lambda.iter().all(One::is_one)
            && self.r.iter().all(|&r| r == 0)
    }

    pub fn inverse(&self) -> GenPerm {
        let perm = self.inverse_perm();
        let lambda = (0..self.n())
            .map(|i| self.lambda[self.perm[i]].recip())
            .collect();
        let r = (0..self.n()).map(|i| -self.r[self.perm[i]]).collect();
        GenPerm { perm, lambda, r }
    }

    /// `self` followed by `other` in the composition order of [`Endo::compose`].
    pub fn compose(&self, other: &GenPerm) -> GenPerm {
        // (a o b)_i = lambda_a x^{r_a} * b_{a(i)}.
        let n = self.n();
        let mut perm = vec![0; n];
        let mut lambda = vec![BigRational::one(); n];
        let mut r = vec![0; n];
        for (i, &j) in self.perm.iter().enumerate() {
            let k = other.perm[j];
            perm[i] = k;
            lambda[k] = &self.lambda[j] * &other.lambda[k];
            r[k] = self.r[j] + other.r[k];
        }
        GenPerm { perm, lambda, r }
    }

    pub fn image(&self, ctx: &Arc<RingContext>, i: usize) -> Poly {
        let t = self.perm[i];
        Poly::z(ctx, t).shift_x(self.r[t]).scale(&self.lambda[t])
    }

    /// Conjugate `D^{-1} rho D` with `D = (y, x^t z)`.
    pub fn conjugate_by(&self, tau: &WeightVector) -> GenPerm {
        let t = tau.entries();
        let inv = self.inverse_perm();
        let r = (0..self.n())
            .map(|j| self.r[j] + t[j] - t[inv[j]])
            .collect();
        GenPerm {
            perm: self.perm.clone(),
            lambda: self.lambda.clone(),
            r,
        }
    }
}

/// A generator of the automorphism groups handled here.
#[derive(Clone, PartialEq, Eq)]
pub enum Generator {
    /// `v -> v + poly` for the slot variable `v`; `poly` does not involve `v`.
    Elementary {
        slot: Slot,
        poly: Poly,
    },
    /// `z_i -> sum_j matrix[i][j] z_j` with z-free entries and unit determinant.
    Linear {
        matrix: Vec<Vec<Poly>>,
        inverse: Vec<Vec<Poly>>,
    },
    GenPerm(GenPerm),
    /// An automorphism given by its images together with its inverse.
    Explicit {
        images: Endo,
        inverse: Endo,
    },
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Generator {
    pub fn elementary(slot: Slot, poly: Poly) -> Result<Self> {
        let ctx = poly.ctx().clone();
        match slot {
            Slot::Y(j) if j >= ctx.m() => {
                return Err(Error::InvalidGenerator(format!("no variable y{}", j + 1)))
            }
            Slot::Z(k) if k >= ctx.n() => {
                return Err(Error::InvalidGenerator(format!("no variable z{}", k + 1)))
            }
            _ => {}
        }
        if poly.involves(slot.var_index(&ctx)) {
            return Err(Error::InvalidGenerator(format!(
                "elementary tail {poly} involves {}",
                ctx.name(slot.var_index(&ctx))
            )));
        }
        Ok(Generator::Elementary { slot, poly })
    }

    pub fn z_elementary(k: usize, poly: Poly) -> Result<Self> {
        Self::elementary(Slot::Z(k), poly)
    }

    pub fn linear(ctx: &Arc<RingContext>, matrix: Vec<Vec<Poly>>) -> Result<Self> {
        let n = ctx.n();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGenerator(format!(
                "linear part must be {n}x{n}"
            )));
        }
        for entry in matrix.iter().flatten() {
            RingContext::ensure_same(ctx, entry.ctx())?;
            if (0..n).any(|k| entry.involves(ctx.z_index(k))) {
                return Err(Error::InvalidGenerator(format!(
                    "linear entry {entry} involves z"
                )));
            }
        }
        let det = determinant(ctx, &matrix);
        let det_inv = det.unit_inverse().ok_or_else(|| {
            Error::InvalidGenerator(format!("linear determinant {det} is not a unit"))
        })?;
        let inverse = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // adj(M)_{ij} = (-1)^{i+j} det(M without row j, column i).
                        let minor: Vec<Vec<Poly>> = (0..n)
                            .filter(|&r| r != j)
                            .map(|r| {
                                (0..n)
                                    .filter(|&c| c != i)
                                    .map(|c| matrix[r][c].clone())
                                    .collect()
                            })
                            .collect();
                        let cof = determinant(ctx, &minor);
                        let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                        &cof * &det_inv
                    })
                    .collect()
            })
            .collect();
        Ok(Generator::Linear { matrix, inverse })
    }

    pub fn explicit(images: Endo, inverse: Endo) -> Result<Self> {
        RingContext::ensure_same(images.ctx(), inverse.ctx())?;
        if !images.compose(&inverse).is_identity() || !inverse.compose(&images).is_identity() {
            return Err(Error::InvalidGenerator(
                "explicit inverse does not invert the images".into(),
            ));
        }
        Ok(Generator::Explicit { images, inverse })
    }

    pub fn is_elementary(&self) -> bool {
        matches!(self, Generator::Elementary { .. })
    }

    pub fn is_tame(&self) -> bool {
        !matches!(self, Generator::Explicit { .. })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Generator::Elementary { poly, .. } => poly.is_zero(),
            Generator::GenPerm(p) => p.is_identity(),
            Generator::Linear { matrix, .. } => matrix.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, e)| if i == j { e.is_one() } else { e.is_zero() })
            }),
            Generator::Explicit { images, .. } => images.is_identity(),
        }
    }

    pub fn to_endo(&self, ctx: &Arc<RingContext>) -> Endo {
        let mut images: Vec<Poly> = (0..ctx.dim())
            .map(|s| Poly::var(ctx, ctx.slot_index(s)))
            .collect();
        match self {
            Generator::Elementary { slot, poly } => {
                let pos = slot.position(ctx);
                images[pos] = &images[pos] + poly;
            }
            Generator::Linear { matrix, .. } => {
                for (i, row) in matrix.iter().enumerate() {
                    let mut acc = Poly::zero(ctx);
                    for (j, e) in row.iter().enumerate() {
                        acc = &acc + &(e * &Poly::z(ctx, j));
                    }
                    images[ctx.m() + i] = acc;
                }
            }
            Generator::GenPerm(p) => {
                for i in 0..ctx.n() {
                    images[ctx.m() + i] = p.image(ctx, i);
                }
            }
            Generator::Explicit { images: e, .. } => return e.clone(),
        }
        Endo::from_images_unchecked(ctx, images)
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Elementary { slot, poly } => Generator::Elementary {
                slot: *slot,
                poly: -poly,
            },
            Generator::Linear { matrix, inverse } => Generator::Linear {
                matrix: inverse.clone(),
                inverse: matrix.clone(),
            },
            Generator::GenPerm(p) => Generator::GenPerm(p.inverse()),
            Generator::Explicit { images, inverse } => Generator::Explicit {
                images: inverse.clone(),
                inverse: images.clone(),
            },
        }
    }

    /// Conjugate `D^{-1} g D` with `D = (y, x^t z)`.
    pub fn conjugate_by(&self, tau: &WeightVector) -> Generator {
        let t = tau.entries();
        match self {
            Generator::Elementary { slot, poly } => {
                let scaled = poly.scale_z(t);
                let poly = match slot {
                    Slot::Y(_) => scaled,
                    Slot::Z(k) => scaled.shift_x(-t[*k]),
                };
                Generator::Elementary { slot: *slot, poly }
            }
            Generator::Linear { matrix, inverse } => {
                let conj = |m: &Vec<Vec<Poly>>| -> Vec<Vec<Poly>> {
                    m.iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.iter()
                                .enumerate()
                                .map(|(j, e)| e.shift_x(t[j] - t[i]))
                                .collect()
                        })
                        .collect()
                };
                Generator::Linear {
                    matrix: conj(matrix),
                    inverse: conj(inverse),
                }
            }
            Generator::GenPerm(p) => Generator::GenPerm(p.conjugate_by(tau)),
            Generator::Explicit { images, inverse } => Generator::Explicit {
                images: images.conjugate_by(tau),
                inverse: inverse.conjugate_by(tau),
            },
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Elementary { slot, poly } => {
                let ctx = poly.ctx();
                let v = ctx.name(slot.var_index(ctx));
                write!(f, "{v} -> {v} + ({poly})")
            }
            Generator::Linear { matrix, .. } => {
                write!(f, "linear[")?;
                for (i, row) in matrix.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                    write!(f, "{}", cells.join(", "))?;
                }
                write!(f, "]")
            }
            Generator::GenPerm(p) => {
                write!(f, "genperm(perm={:?}, lambda=[", p.perm)?;
                let l: Vec<String> = p.lambda.iter().map(|c| c.to_string()).collect();
                write!(f, "{}], r={:?})", l.join(", "), p.r)
            }
            Generator::Explicit { images, .. } => write!(f, "explicit{images}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_poly, rat};

    #[test]
    fn genperm_inverse_and_compose() {
        let ctx = RingContext::new(0, 3, 0).unwrap();
        let rho = GenPerm::new(
            vec![2, 0, 1],
            vec![rat(2, 1), rat(3, 1), rat(-1, 1)],
            vec![1, -2, 4],
        )
        .unwrap();
        let g = Generator::GenPerm(rho.clone());
        let e = g.to_endo(&ctx).compose(&g.inverse().to_endo(&ctx));
        assert!(e.is_identity());
        let both = Generator::GenPerm(rho.compose(&rho.inverse()));
        assert!(both.is_identity());
        let sq = Generator::GenPerm(rho.compose(&rho)).to_endo(&ctx);
        assert_eq!(sq, g.to_endo(&ctx).compose(&g.to_endo(&ctx)));
    }

    #[test]
    fn linear_inverse() {
        let ctx = RingContext::new(1, 2, 0).unwrap();
        let m = vec![
            vec![Poly::integer(&ctx, 1), parse_poly("y/x", &ctx).unwrap()],
            vec![Poly::zero(&ctx), parse_poly("2*x", &ctx).unwrap()],
        ];
        let g = Generator::linear(&ctx, m).unwrap();
        assert!(g
            .to_endo(&ctx)
            .compose(&g.inverse().to_endo(&ctx))
            .is_identity());
        let bad = vec![
            vec![Poly::y(&ctx, 0), Poly::zero(&ctx)],
            vec![Poly::zero(&ctx), Poly::integer(&ctx, 1)],
        ];
        assert!(Generator::linear(&ctx, bad).is_err());
    }

    #[test]
    fn elementary_rejects_own_variable() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        assert!(Generator::z_elementary(0, parse_poly("z*y", &ctx).unwrap()).is_err());
        assert!(Generator::z_elementary(0, parse_poly("y^2", &ctx).unwrap()).is_ok());
    }

    #[test]
    fn conjugation_matches_endo_conjugation() {
        let ctx = RingContext::new(1, 2, 0).unwrap();
        let tau = WeightVector::new(vec![1, 0]);
        let g = Generator::z_elementary(0, parse_poly("z2", &ctx).unwrap()).unwrap();
        let c = g.conjugate_by(&tau).to_endo(&ctx);
        assert_eq!(c.image(1).to_string(), "z1 + x^-1*z2");
        assert_eq!(c, g.to_endo(&ctx).conjugate_by(&tau));
        let rho = Generator::GenPerm(
            GenPerm::new(vec![1, 0], vec![rat(1, 1), rat(1, 1)], vec![1, -1]).unwrap(),
        );
        assert_eq!(
            rho.conjugate_by(&tau).to_endo(&ctx),
            rho.to_endo(&ctx).conjugate_by(&tau)
        );
    }
}
