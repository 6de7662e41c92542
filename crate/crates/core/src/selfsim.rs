//! Self-similar group actions on words, the 2-odometer, the triples
//! (prefix, group element, prefix) with the three-case product, and
//! finite-depth truncation monoids realized as partial bijections on X^n.

use crate::error::{Error, Result};
use crate::means::{self, MeanPolytope};
use crate::monoid::{ClosureOptions, FiniteInverseMonoid};
use crate::pbij::PartialBijection;
use crate::ratio::Rat;

pub type Letter = usize;
pub type Word = Vec<Letter>;

/// A length-preserving action of group elements on words, given by letter
/// rules: g moves the first letter and restricts to a new element acting on
/// the tail, so g(xα) = (g·x)(g|_x · α).
pub trait SelfSimilarAction {
    type G: Clone + PartialEq + std::fmt::Debug;

    fn alphabet(&self) -> usize;
    fn identity(&self) -> Self::G;
    fn act_letter(&self, g: &Self::G, x: Letter) -> Letter;
    fn restrict_letter(&self, g: &Self::G, x: Letter) -> Self::G;

    fn act(&self, g: &Self::G, w: &[Letter]) -> Word {
        let mut out = Word::with_capacity(w.len());
        let mut cur = g.clone();
        for &x in w {
            out.push(self.act_letter(&cur, x));
            cur = self.restrict_letter(&cur, x);
        }
        out
    }

    fn restrict(&self, g: &Self::G, w: &[Letter]) -> Self::G {
        let mut cur = g.clone();
        for &x in w {
            cur = self.restrict_letter(&cur, x);
        }
        cur
    }
}

/// A self-similar action whose elements form a group we can multiply and
/// invert; needed for the symbolic triple product.
pub trait GroupSelfSimilar: SelfSimilarAction {
    fn mul(&self, a: &Self::G, b: &Self::G) -> Self::G;
    fn inv(&self, a: &Self::G) -> Self::G;
}

// ---------------------------------------------------------------------
// the 2-odometer

/// The binary odometer: words are read least significant digit first, z
/// adds one. z·0 = 1 with trivial restriction; z·1 = 0 restricting to z
/// (the carry). Elements are integer exponents of z.
#[derive(Clone, Copy, Debug, Default)]
pub struct Odometer;

impl SelfSimilarAction for Odometer {
    type G = i64;

    fn alphabet(&self) -> usize {
        2
    }

    fn identity(&self) -> i64 {
        0
    }

    fn act_letter(&self, g: &i64, x: Letter) -> Letter {
        (x as i64 + g).rem_euclid(2) as Letter
    }

    fn restrict_letter(&self, g: &i64, x: Letter) -> i64 {
        // the carry: (x + k - (x + k mod 2)) / 2
        let sum = x as i64 + g;
        (sum - sum.rem_euclid(2)) / 2
    }
}

impl GroupSelfSimilar for Odometer {
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }

    fn inv(&self, a: &i64) -> i64 {
        -a
    }
}

// ---------------------------------------------------------------------
// finite-state actions from tables

/// A finite-state self-similar action: states act on letters and restrict
/// to states. `None` plays the formal identity. Each state must permute
/// the alphabet so the word action is bijective per length.
#[derive(Clone, Debug)]
pub struct Automaton {
    pub alphabet: usize,
    pub states: Vec<String>,
    act: Vec<Vec<Letter>>,
    restrict: Vec<Vec<usize>>,
}

impl Automaton {
    pub fn new(
        alphabet: usize,
        states: Vec<String>,
        act: Vec<Vec<Letter>>,
        restrict: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = states.len();
        if act.len() != n || restrict.len() != n {
            return Err(Error::InvalidArgument("table shape mismatch".into()));
        }
        for (s, row) in act.iter().enumerate() {
            if row.len() != alphabet {
                return Err(Error::InvalidArgument("act row length mismatch".into()));
            }
            let mut seen = vec![false; alphabet];
            for &y in row {
                if y >= alphabet || seen[y] {
                    return Err(Error::InvalidArgument(format!(
                        "state {s} does not permute the alphabet"
                    )));
                }
                seen[y] = true;
            }
        }
        for row in &restrict {
            if row.len() != alphabet || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidArgument("restrict row out of range".into()));
            }
        }
        Ok(Automaton { alphabet, states, act, restrict })
    }
}

impl SelfSimilarAction for Automaton {
    /// `None` is the formal identity, `Some(i)` the i-th state.
    type G = Option<usize>;

    fn alphabet(&self) -> usize {
        self.alphabet
    }

    fn identity(&self) -> Self::G {
        None
    }

    fn act_letter(&self, g: &Self::G, x: Letter) -> Letter {
        match g {
            None => x,
            Some(s) => self.act[*s][x],
        }
    }

    fn restrict_letter(&self, g: &Self::G, x: Letter) -> Self::G {
        match g {
            None => None,
            Some(s) => Some(self.restrict[*s][x]),
        }
    }
}

// ---------------------------------------------------------------------
// triples and their product

/// (α, g, β): acts on words as βw ↦ α(g·w). Zero is represented as
/// `None` at the product level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple<G> {
    pub alpha: Word,
    pub g: G,
    pub beta: Word,
}

impl<G: Clone> Triple<G> {
    pub fn idempotent(alpha: &[Letter], identity: G) -> Self {
        Triple { alpha: alpha.to_vec(), g: identity, beta: alpha.to_vec() }
    }

    /// Membership in the equal-length subsemigroup.
    pub fn is_balanced(&self) -> bool {
        self.alpha.len() == self.beta.len()
    }
}

pub fn triple_star<A: GroupSelfSimilar>(a: &A, t: &Triple<A::G>) -> Triple<A::G> {
    Triple { alpha: t.beta.clone(), g: a.inv(&t.g), beta: t.alpha.clone() }
}

/// The three-case product; `None` is the zero of the semigroup.
pub fn triple_product<A: GroupSelfSimilar>(
    a: &A,
    s: &Triple<A::G>,
    t: &Triple<A::G>,
) -> Option<Triple<A::G>> {
    let beta = &s.beta;
    let gamma = &t.alpha;
    if gamma.len() >= beta.len() && gamma[..beta.len()] == beta[..] {
        // γ = β γ'
        let gamma_p = &gamma[beta.len()..];
        let mut alpha = s.alpha.clone();
        alpha.extend(a.act(&s.g, gamma_p));
        let g = a.mul(&a.restrict(&s.g, gamma_p), &t.g);
        Some(Triple { alpha, g, beta: t.beta.clone() })
    } else if beta.len() > gamma.len() && beta[..gamma.len()] == gamma[..] {
        // β = γ β'
        let beta_p = &beta[gamma.len()..];
        let hinv = a.inv(&t.g);
        let g = a.mul(&s.g, &a.inv(&a.restrict(&hinv, beta_p)));
        let mut nu = t.beta.clone();
        nu.extend(a.act(&hinv, beta_p));
        Some(Triple { alpha: s.alpha.clone(), g, beta: nu })
    } else {
        None
    }
}

/// Realize a triple as the partial bijection βw ↦ α(g·w) on the words of
/// length `n`, numbered lexicographically.
pub fn realize_triple<A: SelfSimilarAction>(
    a: &A,
    t: &Triple<A::G>,
    n: usize,
) -> Result<PartialBijection> {
    if t.beta.len() > n || t.alpha.len() > n {
        return Err(Error::InvalidArgument("triple words longer than the depth".into()));
    }
    if t.alpha.len() != t.beta.len() {
        return Err(Error::InvalidArgument("triple is not balanced".into()));
    }
    let k = a.alphabet();
    let tail = n - t.beta.len();
    let ground = k.pow(n as u32);
    let mut pairs = Vec::with_capacity(k.pow(tail as u32));
    let mut w = vec![0usize; tail];
    loop {
        let image = a.act(&t.g, &w);
        let mut from = t.beta.clone();
        from.extend(&w);
        let mut to = t.alpha.clone();
        to.extend(&image);
        pairs.push((word_index(&from, k), word_index(&to, k)));
        if !next_word(&mut w, k) {
            break;
        }
    }
    PartialBijection::from_pairs(ground, &pairs)
}

/// Lexicographic numbering of fixed-length words.
pub fn word_index(w: &[Letter], alphabet: usize) -> usize {
    w.iter().fold(0, |acc, &x| acc * alphabet + x)
}

pub fn all_words(len: usize, alphabet: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(alphabet.pow(len as u32));
    let mut w = vec![0usize; len];
    loop {
        out.push(w.clone());
        if !next_word(&mut w, alphabet) {
            break;
        }
    }
    out
}

fn next_word(w: &mut [Letter], alphabet: usize) -> bool {
    for i in (0..w.len()).rev() {
        w[i] += 1;
        if w[i] < alphabet {
            return true;
        }
        w[i] = 0;
    }
    false
}

// ---------------------------------------------------------------------
// depth truncations

/// The depth-n truncation: the closure of the realized generator triples
/// (ε, g, ε) for g in `group_gens` together with the cylinder idempotents
/// of length ≤ max_len, all acting on X^n.
///
/// Joins are deliberately not closed over: the join closure of a shift
/// monoid on X^n is the whole symmetric inverse monoid on k^n points. The
/// result is atomistic (cylinders split into the level-n cylinders below
/// them), which is exactly what the mean machinery needs.
pub fn depth_truncation<A: SelfSimilarAction>(
    a: &A,
    n: usize,
    max_len: usize,
    group_gens: &[A::G],
    cap: usize,
) -> Result<FiniteInverseMonoid> {
    if n == 0 || max_len > n {
        return Err(Error::InvalidArgument("need 0 < max_len <= n".into()));
    }
    let k = a.alphabet();
    let ground = k
        .checked_pow(n as u32)
        .filter(|&g| g < u16::MAX as usize)
        .ok_or(Error::SizeLimit { cap })?;
    let mut gens: Vec<PartialBijection> = Vec::new();
    for g in group_gens {
        gens.push(realize_triple(a, &Triple { alpha: vec![], g: g.clone(), beta: vec![] }, n)?);
    }
    for len in 1..=max_len {
        for alpha in all_words(len, k) {
            gens.push(realize_triple(a, &Triple::idempotent(&alpha, a.identity()), n)?);
        }
    }
    let _ = ground;
    FiniteInverseMonoid::closure(
        &gens,
        ground,
        &ClosureOptions { adjoin_identity: true, join_closure: false, cap },
    )
}

/// Mean uniqueness on the depth-n truncation, with the cylinder values.
#[derive(Clone, Debug)]
pub struct UniqueMeanReport {
    pub unique: bool,
    pub single_atom_orbit: bool,
    /// μ(C(α)) = |X|^{-|α|} for every cylinder of length ≤ n
    pub cylinder_values_match: bool,
    pub polytope: MeanPolytope,
}

pub fn unique_mean_check<A: SelfSimilarAction>(
    a: &A,
    n: usize,
    group_gens: &[A::G],
    cap: usize,
) -> Result<UniqueMeanReport> {
    let m = depth_truncation(a, n, n, group_gens, cap)?;
    let polytope = means::mean_polytope(&m)?;
    let unique = polytope.vertices.len() == 1;
    let single_atom_orbit = polytope.orbits.len() == 1;
    let k = a.alphabet();
    let mut cylinder_values_match = unique;
    if unique {
        let mu = &polytope.vertices[0];
        'outer: for len in 0..=n {
            let expected = Rat::new(1.into(), (k.pow(len as u32) as i64).into());
            for alpha in all_words(len, k) {
                let cyl = realize_triple(a, &Triple::idempotent(&alpha, a.identity()), n)?;
                let id = m
                    .element_id(&cyl)
                    .ok_or_else(|| Error::SelfCheck("cylinder not in truncation".into()))?;
                if mu.evaluate(&m, id)? != expected {
                    cylinder_values_match = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(UniqueMeanReport { unique, single_atom_orbit, cylinder_values_match, polytope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    /// independent oracle: the odometer is binary addition, least
    /// significant digit first, truncated to the word length
    fn increment_oracle(w: &[Letter], k: i64) -> Word {
        let n = w.len();
        let val: i64 = w.iter().rev().fold(0, |acc, &b| acc * 2 + b as i64);
        let modulus = 1i64 << n;
        let new = (val + k).rem_euclid(modulus);
        (0..n).map(|i| ((new >> i) & 1) as usize).collect()
    }

    #[test]
    fn odometer_letter_rules() {
        let od = Odometer;
        // z·0 = 1 restricting to e; z·1 = 0 restricting to z
        assert_eq!(od.act_letter(&1, 0), 1);
        assert_eq!(od.restrict_letter(&1, 0), 0);
        assert_eq!(od.act_letter(&1, 1), 0);
        assert_eq!(od.restrict_letter(&1, 1), 1);
        // examples: 011 -> 111, 111 -> 000
        assert_eq!(od.act(&1, &[0, 1, 1]), vec![1, 1, 1]);
        assert_eq!(od.act(&1, &[1, 1, 1]), vec![0, 0, 0]);
        assert_eq!(od.act(&0, &[1, 0, 1]), vec![1, 0, 1]);
    }

    #[test]
    fn odometer_matches_increment_oracle() {
        let od = Odometer;
        for n in 1..=6 {
            for w in all_words(n, 2) {
                for k in -5i64..=9 {
                    assert_eq!(od.act(&k, &w), increment_oracle(&w, k), "k={k}, w={w:?}");
                }
            }
        }
    }

    #[test]
    fn cocycle_identities() {
        let od = Odometer;
        for len in 0..=6 {
            for w in all_words(len, 2) {
                for g in -3i64..=3 {
                    for h in -3i64..=3 {
                        let gh = od.mul(&g, &h);
                        assert_eq!(od.act(&gh, &w), od.act(&g, &od.act(&h, &w)));
                        assert_eq!(
                            od.restrict(&gh, &w),
                            od.mul(&od.restrict(&g, &od.act(&h, &w)), &od.restrict(&h, &w))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn action_is_bijective_per_length() {
        let od = Odometer;
        for n in 1..=8 {
            for k in [-2i64, 1, 3] {
                let mut images: Vec<Word> =
                    all_words(n, 2).iter().map(|w| od.act(&k, w)).collect();
                images.sort();
                images.dedup();
                assert_eq!(images.len(), 1 << n);
            }
        }
    }

    #[test]
    fn triple_products() {
        let od = Odometer;
        let id = Triple::idempotent(&[], 0i64);
        let s = Triple { alpha: vec![0], g: 0i64, beta: vec![1] };
        let t = Triple { alpha: vec![1], g: 1, beta: vec![0] };
        // identity acts trivially
        assert_eq!(triple_product(&od, &id, &s).unwrap(), s);
        assert_eq!(triple_product(&od, &s, &id).unwrap(), s);
        // (0, e, 1)(1, z, 0) = (0, z, 0)
        let st = triple_product(&od, &s, &t).unwrap();
        assert_eq!(st, Triple { alpha: vec![0], g: 1, beta: vec![0] });
        // prefix mismatch is zero
        let u = Triple { alpha: vec![0], g: 1, beta: vec![1] };
        assert!(triple_product(&od, &s, &u).is_none());
        // star swaps and inverts
        assert_eq!(triple_star(&od, &t), Triple { alpha: vec![0], g: -1, beta: vec![1] });
    }

    #[test]
    fn triple_product_matches_realized_composition() {
        let od = Odometer;
        let n = 4;
        let mut triples: Vec<Triple<i64>> = Vec::new();
        for len in 0..=3usize {
            for alpha in all_words(len, 2) {
                for beta in all_words(len, 2) {
                    for g in -2i64..=2 {
                        triples.push(Triple { alpha: alpha.clone(), g, beta: beta.clone() });
                    }
                }
            }
        }
        // associativity on a deterministic slice and agreement with the
        // partial-bijection composition on all pairs
        for (i, s) in triples.iter().enumerate() {
            for (j, t) in triples.iter().enumerate() {
                let sym = triple_product(&od, s, t);
                let fs = realize_triple(&od, s, n).unwrap();
                let ft = realize_triple(&od, t, n).unwrap();
                let comp = fs.compose(&ft);
                match sym {
                    Some(ref p) => {
                        assert_eq!(realize_triple(&od, p, n).unwrap(), comp, "s={s:?} t={t:?}")
                    }
                    None => assert!(comp.is_empty_map(), "s={s:?} t={t:?}"),
                }
                if (i + j) % 97 == 0 {
                    for r in triples.iter().step_by(111) {
                        let left = sym.as_ref().and_then(|p| triple_product(&od, p, r));
                        let right = triple_product(&od, t, r)
                            .and_then(|q| triple_product(&od, s, &q));
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn depth_truncation_shapes() {
        let od = Odometer;
        // n = 1 with just z: {0, z|X, Id, {0→0},{1→1},{0→1},{1→0}} = I(2) as
        // cylinders of length 1 are the two singletons
        let m = depth_truncation(&od, 1, 1, &[1], 100_000).unwrap();
        assert_eq!(m.size(), 7);
        assert_eq!(m.atoms().len(), 2);

        // n = 2: shifts restricted to cylinders: (2^{n+1}-1)·2^n + 1
        let m2 = depth_truncation(&od, 2, 2, &[1], 100_000).unwrap();
        assert_eq!(m2.size(), 7 * 4 + 1);
        assert_eq!(m2.atoms().len(), 4);
        // not distributive: disjoint non-sibling cylinder joins are missing
        assert!(!m2.is_distributive());
        assert!(m2.is_atomistic());

        // idempotents only: the cylinder semilattice
        let e2 = depth_truncation(&od, 2, 2, &[], 100_000).unwrap();
        assert_eq!(e2.size(), 8);
        let p = means::mean_polytope(&e2).unwrap();
        assert_eq!(p.orbits.len(), 4);
        assert_eq!(p.dimension, 3);
    }

    #[test]
    fn unique_mean_small_depths() {
        let od = Odometer;
        for n in 1..=4 {
            let report = unique_mean_check(&od, n, &[1], 100_000).unwrap();
            assert!(report.unique, "depth {n}");
            assert!(report.single_atom_orbit);
            assert!(report.cylinder_values_match);
            let mu = &report.polytope.vertices[0];
            assert!(mu.weights.iter().all(|w| *w == rat(1, 1 << n)));
        }
    }

    #[test]
    fn automaton_odometer_agrees() {
        // the odometer as a one-state automaton: state z with z(0)=1 rest
        // id, z(1)=0 rest z; identity is the implicit None
        let aut = Automaton::new(
            2,
            vec!["z".into()],
            vec![vec![1, 0]],
            vec![vec![0, 0]],
        )
        .unwrap();
        // restrict table: z|_0 should be identity, not z; encode via two
        // states instead
        let aut2 = Automaton::new(
            2,
            vec!["e".into(), "z".into()],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0, 0], vec![0, 1]],
        )
        .unwrap();
        let od = Odometer;
        for w in all_words(5, 2) {
            assert_eq!(aut2.act(&Some(1), &w), od.act(&1, &w));
        }
        drop(aut);
        // truncation through the automaton matches the odometer's
        let m_aut = depth_truncation(&aut2, 2, 2, &[Some(1)], 100_000).unwrap();
        let m_od = depth_truncation(&od, 2, 2, &[1], 100_000).unwrap();
        assert_eq!(m_aut.size(), m_od.size());
    }

    #[test]
    fn automaton_validation() {
        // state that does not permute the alphabet
        assert!(Automaton::new(2, vec!["b".into()], vec![vec![0, 0]], vec![vec![0, 0]]).is_err());
        assert!(Automaton::new(2, vec!["b".into()], vec![vec![0, 1]], vec![vec![0, 5]]).is_err());
    }
}
