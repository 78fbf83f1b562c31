use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variable layout of `A[x][y_1..y_m, z_1..z_n]` with `A = Q[u_1..u_p]`.
///
/// Exponent vectors are stored in the order `(u_1..u_p, y_1..y_m, z_1..z_n)`;
/// the Laurent variable `x` is kept apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingContext {
    m: usize,
    n: usize,
    p: usize,
    names: Vec<String>,
}

/// Serialized form of a [`RingContext`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub p: usize,
    /// Names in `(u.., y.., z..)` order. Defaults are used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

fn default_names(prefix: &str, count: usize) -> Vec<String> {
    if count == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=count).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl RingContext {
    /// Context with default names: `y` / `y1..ym`, `z` / `z1..zn`, `u` / `u1..up`.
    pub fn new(m: usize, n: usize, p: usize) -> Result<Arc<Self>> {
        let mut names = default_names("u", p);
        names.extend(default_names("y", m));
        names.extend(default_names("z", n));
        Self::with_names(m, n, p, names)
    }

    /// Context with explicit names, given in `(u.., y.., z..)` order.
    pub fn with_names(m: usize, n: usize, p: usize, names: Vec<String>) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidContext(
                "at least one z-variable is required".into(),
            ));
        }
        if names.len() != m + n + p {
            return Err(Error::InvalidContext(format!(
                "expected {} variable names, got {}",
                m + n + p,
                names.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            let valid = a.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || a == "x" {
                return Err(Error::InvalidContext(format!(
                    "invalid variable name `{a}`"
                )));
            }
            if names[..i].contains(a) {
                return Err(Error::InvalidContext(format!(
                    "duplicate variable name `{a}`"
                )));
            }
        }
        Ok(Arc::new(RingContext { m, n, p, names }))
    }

    pub fn from_spec(spec: &ContextSpec) -> Result<Arc<Self>> {
        match &spec.names {
            Some(names) => Self::with_names(spec.m, spec.n, spec.p, names.clone()),
            None => Self::new(spec.m, spec.n, spec.p),
        }
    }

    pub fn spec(&self) -> ContextSpec {
        ContextSpec {
            m: self.m,
            n: self.n,
            p: self.p,
            names: Some(self.names.clone()),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of non-`x` variables.
    pub fn nvars(&self) -> usize {
        self.m + self.n + self.p
    }

    /// Number of variables an endomorphism acts on (`m + n`).
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn u_index(&self, i: usize) -> usize {
        debug_assert!(i < self.p);
        i
    }

    pub fn y_index(&self, j: usize) -> usize {
        debug_assert!(j < self.m);
        self.p + j
    }

    pub fn z_index(&self, k: usize) -> usize {
        debug_assert!(k < self.n);
        self.p + self.m + k
    }

    /// Exponent index of the `slot`-th acted-on variable (y's first, then z's).
    pub fn slot_index(&self, slot: usize) -> usize {
        debug_assert!(slot < self.dim());
        self.p + slot
    }

    pub fn is_z_index(&self, idx: usize) -> bool {
        idx >= self.p + self.m
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Resolve a variable name (or one of the indexed aliases) to its exponent index.
    pub fn lookup(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        let (prefix, digits) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
        let i: usize = digits.parse().ok()?;
        if i == 0 {
            return None;
        }
        let i = i - 1;
        match prefix {
            "u" if i < self.p => Some(self.u_index(i)),
            "y" if i < self.m => Some(self.y_index(i)),
            "z" if i < self.n => Some(self.z_index(i)),
            _ => None,
        }
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }

    pub fn ensure_same(a: &Arc<Self>, b: &Arc<Self>) -> Result<()> {
        if Self::same(a, b) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_names_and_aliases() {
        let ctx = RingContext::new(1, 3, 1).unwrap();
        assert_eq!(ctx.names(), &["u", "y", "z1", "z2", "z3"]);
        assert_eq!(ctx.lookup("y"), Some(1));
        assert_eq!(ctx.lookup("y1"), Some(1));
        assert_eq!(ctx.lookup("u1"), Some(0));
        assert_eq!(ctx.lookup("z3"), Some(4));
        assert_eq!(ctx.lookup("z4"), None);
        assert_eq!(ctx.lookup("w"), None);
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(RingContext::new(1, 0, 0).is_err());
        assert!(RingContext::with_names(1, 1, 0, vec!["y".into(), "y".into()]).is_err());
        assert!(RingContext::with_names(1, 1, 0, vec!["y".into(), "x".into()]).is_err());
    }
}
