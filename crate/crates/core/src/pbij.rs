//! Partially defined injective maps on a finite ground set `{0, .., n-1}` —
//! the concrete carrier for everything Wagner-Preston touches.

use std::cmp::Ordering;

use crate::error::{Error, Result};

const UNDEF: u16 = u16::MAX;

/// A partial bijection on `{0, .., ground-1}`.
///
/// Stored as a dense map with a sentinel for undefined points; `ground`
/// must stay below `u16::MAX`. Products compose like functions:
/// `(s.compose(t))(x) = s(t(x))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialBijection {
    map: Vec<u16>,
}

impl PartialBijection {
    pub fn empty(ground: usize) -> Self {
        assert!(ground >= 1 && ground < UNDEF as usize);
        PartialBijection { map: vec![UNDEF; ground] }
    }

    pub fn identity(ground: usize) -> Self {
        assert!(ground >= 1 && ground < UNDEF as usize);
        PartialBijection { map: (0..ground as u16).collect() }
    }

    pub fn singleton(ground: usize, src: usize, dst: usize) -> Self {
        let mut f = Self::empty(ground);
        assert!(src < ground && dst < ground);
        f.map[src] = dst as u16;
        f
    }

    /// Build from (source, target) pairs, rejecting repeats on either side.
    pub fn from_pairs(ground: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut f = Self::empty(ground);
        let mut hit = vec![false; ground];
        for &(s, d) in pairs {
            if s >= ground || d >= ground {
                return Err(Error::InvalidArgument(format!(
                    "pair ({s},{d}) outside ground set of size {ground}"
                )));
            }
            if f.map[s] != UNDEF {
                return Err(Error::InvalidArgument(format!("source {s} repeated")));
            }
            if hit[d] {
                return Err(Error::InvalidArgument(format!("target {d} repeated")));
            }
            f.map[s] = d as u16;
            hit[d] = true;
        }
        Ok(f)
    }

    pub fn ground(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, p: usize) -> Option<usize> {
        match self.map[p] {
            UNDEF => None,
            d => Some(d as usize),
        }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != UNDEF)
            .map(|(s, &d)| (s, d as usize))
            .collect()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != UNDEF)
            .map(|(s, _)| s)
    }

    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.map.iter().filter(|&&d| d != UNDEF).map(|&d| d as usize).collect();
        r.sort_unstable();
        r
    }

    pub fn domain_size(&self) -> usize {
        self.map.iter().filter(|&&d| d != UNDEF).count()
    }

    pub fn is_empty_map(&self) -> bool {
        self.map.iter().all(|&d| d == UNDEF)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(s, &d)| d == s as u16)
    }

    /// Idempotent iff the map fixes every point of its domain.
    pub fn is_idempotent(&self) -> bool {
        self.map
            .iter()
            .enumerate()
            .all(|(s, &d)| d == UNDEF || d == s as u16)
    }

    /// `(self ∘ other)(x) = self(other(x))` on the largest domain where both apply.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ground(), other.ground());
        let map = other
            .map
            .iter()
            .map(|&mid| if mid == UNDEF { UNDEF } else { self.map[mid as usize] })
            .collect();
        PartialBijection { map }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = Self::empty(self.ground());
        for (s, &d) in self.map.iter().enumerate() {
            if d != UNDEF {
                inv.map[d as usize] = s as u16;
            }
        }
        inv
    }

    /// Union of graphs, if the result is still single-valued and injective.
    pub fn union(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.ground(), other.ground());
        let mut map = self.map.clone();
        for (s, &d) in other.map.iter().enumerate() {
            if d == UNDEF {
                continue;
            }
            if map[s] == UNDEF {
                map[s] = d;
            } else if map[s] != d {
                return None;
            }
        }
        let mut hit = vec![false; self.ground()];
        for &d in &map {
            if d != UNDEF {
                if hit[d as usize] {
                    return None;
                }
                hit[d as usize] = true;
            }
        }
        Some(PartialBijection { map })
    }

    /// Intersection of graphs (always a partial bijection).
    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ground(), other.ground());
        let map = self
            .map
            .iter()
            .zip(&other.map)
            .map(|(&a, &b)| if a == b { a } else { UNDEF })
            .collect();
        PartialBijection { map }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.map
            .iter()
            .zip(&other.map)
            .all(|(&a, &b)| a == UNDEF || a == b)
    }
}

impl std::fmt::Debug for PartialBijection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty_map() {
            return write!(f, "{{∅/{}}}", self.ground());
        }
        write!(f, "{{")?;
        let mut first = true;
        for (s, d) in self.pairs() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{s}→{d}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

/// Lexicographic order on the sorted list of graph pairs. This is the
/// tie-breaking order used for deterministic element numbering.
impl Ord for PartialBijection {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.map.iter().enumerate().filter(|(_, &d)| d != UNDEF);
        let mut b = other.map.iter().enumerate().filter(|(_, &d)| d != UNDEF);
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((s1, d1)), Some((s2, d2))) => {
                    let c = s1.cmp(&s2).then(d1.cmp(d2));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
            }
        }
    }
}

impl PartialOrd for PartialBijection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All partial injections on `{0,..,ground-1}`, i.e. the symmetric inverse
/// monoid realized element by element. Grows as sum of C(n,k)^2 k!.
pub fn enumerate_all(ground: usize, cap: usize) -> Result<Vec<PartialBijection>> {
    let mut out = vec![PartialBijection::empty(ground)];
    // extend maps point by point: at step s decide image of s or skip
    fn rec(
        ground: usize,
        s: usize,
        cur: &mut PartialBijection,
        used: &mut Vec<bool>,
        out: &mut Vec<PartialBijection>,
        cap: usize,
    ) -> Result<()> {
        if s == ground {
            return Ok(());
        }
        rec(ground, s + 1, cur, used, out, cap)?;
        for d in 0..ground {
            if !used[d] {
                cur.map[s] = d as u16;
                used[d] = true;
                if !cur.is_empty_map() {
                    out.push(cur.clone());
                    if out.len() > cap {
                        return Err(Error::SizeLimit { cap });
                    }
                }
                rec(ground, s + 1, cur, used, out, cap)?;
                used[d] = false;
                cur.map[s] = UNDEF;
            }
        }
        Ok(())
    }
    let mut cur = PartialBijection::empty(ground);
    let mut used = vec![false; ground];
    rec(ground, 0, &mut cur, &mut used, &mut out, cap)?;
    out.sort();
    Ok(out)
}
