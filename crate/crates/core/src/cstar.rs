//! Finite-dimensional matrix model of the universal C*-algebra of a finite
//! Boolean inverse monoid with principal tight groupoid, and the
//! correspondence between normalized traces and invariant means.
//!
//! Per atom orbit O, an element s becomes the |O|×|O| zero-one matrix with
//! entry (i,j) = 1 exactly when atom a_j lies below s*s and s·a_j·s* = a_i.
//! These are partial permutation matrices; the linear span of all of them
//! is the full block-matrix algebra exactly in the principal case.

use std::collections::HashMap;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{IntMatrix, RatMatrix, RowBasis};
use crate::means::{self, InvariantMean};
use crate::monoid::{ElemId, FiniteInverseMonoid};
use crate::ratio::Rat;

/// Full axiom sweeps are exhaustive up to this element count and sampled
/// beyond it.
const VERIFY_CAP: usize = 2_000;

/// The representation by atom-orbit blocks.
pub struct AtomRep<'a> {
    m: &'a FiniteInverseMonoid,
    pub atoms: Vec<ElemId>,
    /// per orbit: positions into `atoms`
    pub orbits: Vec<Vec<usize>>,
    /// position of each atom inside its orbit: atom pos -> (orbit, slot)
    slot: Vec<(usize, usize)>,
}

/// An element of the modeled *-algebra: one rational block per orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelElement {
    pub blocks: Vec<RatMatrix>,
}

/// A normalized trace: nonnegative orbit weights summing to 1, evaluated as
/// the weighted sum of normalized block traces.
#[derive(Clone, Debug)]
pub struct TraceFunctional {
    pub orbit_sizes: Vec<usize>,
    pub orbit_weights: Vec<Rat>,
}

impl<'a> AtomRep<'a> {
    pub fn new(m: &'a FiniteInverseMonoid) -> Result<Self> {
        let (atoms, orbits) = means::atom_orbits(m)?;
        let mut slot = vec![(0usize, 0usize); atoms.len()];
        for (oi, orbit) in orbits.iter().enumerate() {
            for (si, &ap) in orbit.iter().enumerate() {
                slot[ap] = (oi, si);
            }
        }
        let rep = AtomRep { m, atoms, orbits, slot };
        rep.verify()?;
        Ok(rep)
    }

    pub fn monoid(&self) -> &FiniteInverseMonoid {
        self.m
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.len()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.atoms.len()
    }

    fn atom_pos(&self, a: ElemId) -> usize {
        self.atoms.binary_search(&a).expect("atoms are sorted")
    }

    /// The zero-one blocks of π(s).
    pub fn blocks_of(&self, s: ElemId) -> Vec<IntMatrix> {
        let m = self.m;
        let mut blocks: Vec<IntMatrix> =
            self.orbits.iter().map(|o| IntMatrix::zeros(o.len(), o.len())).collect();
        let dom = m.product(m.star(s), s);
        for (j, &a) in self.atoms.iter().enumerate() {
            if m.product(a, dom) != a {
                continue;
            }
            let b = m.product(m.product(s, a), m.star(s));
            let (oj, sj) = self.slot[j];
            let (oi, si) = self.slot[self.atom_pos(b)];
            debug_assert_eq!(oi, oj, "conjugation stays inside the orbit");
            blocks[oj].set(si, sj, 1);
        }
        blocks
    }

    /// π(s) as one block-diagonal integer matrix.
    pub fn full_matrix(&self, s: ElemId) -> IntMatrix {
        block_diag(&self.blocks_of(s))
    }

    /// δ_s as a model element over the rationals.
    pub fn delta(&self, s: ElemId) -> ModelElement {
        ModelElement { blocks: self.blocks_of(s).iter().map(IntMatrix::to_rational).collect() }
    }

    pub fn zero_element(&self) -> ModelElement {
        ModelElement {
            blocks: self.block_sizes().iter().map(|&k| RatMatrix::zeros(k, k)).collect(),
        }
    }

    /// The four Boolean-representation axioms, exhaustive up to
    /// `VERIFY_CAP` elements and on a deterministic sample beyond.
    fn verify(&self) -> Result<()> {
        let m = self.m;
        let n = m.size();
        if !self.full_matrix(m.zero()).is_zero() {
            return Err(Error::SelfCheck("π(0) != 0".into()));
        }
        let ids: Vec<ElemId> = if n <= VERIFY_CAP {
            (0..n).collect()
        } else {
            let step = n / VERIFY_CAP + 1;
            (0..n).step_by(step).collect()
        };
        let mats: HashMap<ElemId, IntMatrix> =
            ids.iter().map(|&s| (s, self.full_matrix(s))).collect();
        let ok = exec::map_collect(&ids, |&s| {
            let ms = &mats[&s];
            if self.full_matrix(m.star(s)) != ms.transpose() {
                return false;
            }
            ids.iter().all(|&t| {
                let prod = self.full_matrix(m.product(s, t));
                if prod != ms.mul(&mats[&t]) {
                    return false;
                }
                if m.compatible(s, t) {
                    if let Ok(j) = m.join_pair(s, t) {
                        let sst = m.product(m.product(s, m.star(s)), t);
                        let lhs = self.full_matrix(j);
                        let rhs = ms.add(&mats[&t]).sub(&self.full_matrix(sst));
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
                true
            })
        });
        if ok.iter().all(|&b| b) {
            Ok(())
        } else {
            Err(Error::SelfCheck("atom representation violates an axiom".into()))
        }
    }

    /// Injectivity of π on elements.
    pub fn is_faithful(&self) -> bool {
        let mut seen: HashMap<Vec<i64>, ElemId> = HashMap::new();
        for s in 0..self.m.size() {
            let mat = self.full_matrix(s);
            if seen.insert(mat.data, s).is_some() {
                return false;
            }
        }
        true
    }
}

fn block_diag(blocks: &[IntMatrix]) -> IntMatrix {
    let dim: usize = blocks.iter().map(|b| b.rows).sum();
    let mut out = IntMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(off + i, off + j, b.at(i, j));
            }
        }
        off += b.rows;
    }
    out
}

impl ModelElement {
    pub fn add(&self, other: &Self) -> Self {
        ModelElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ModelElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        ModelElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        ModelElement { blocks: self.blocks.iter().map(|b| b.scale(k)).collect() }
    }

    /// The adjoint; coefficients are rational, so this is the transpose.
    pub fn star(&self) -> Self {
        ModelElement { blocks: self.blocks.iter().map(|b| b.transpose()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn flatten(&self) -> Vec<Rat> {
        self.blocks.iter().flat_map(|b| b.flatten()).collect()
    }
}

impl TraceFunctional {
    pub fn eval(&self, x: &ModelElement) -> Rat {
        let mut out = Rat::zero();
        for (o, b) in x.blocks.iter().enumerate() {
            let k = Rat::from_integer((self.orbit_sizes[o] as i64).into());
            out += &self.orbit_weights[o] * b.trace() / k;
        }
        out
    }
}

/// Restriction to the diagonal, blockwise — the finite model of the
/// conditional expectation onto functions on the unit space.
pub fn conditional_expectation(x: &ModelElement) -> ModelElement {
    let blocks = x
        .blocks
        .iter()
        .map(|b| {
            let mut d = RatMatrix::zeros(b.rows, b.cols);
            for i in 0..b.rows {
                *d.at_mut(i, i) = b.at(i, i).clone();
            }
            d
        })
        .collect();
    ModelElement { blocks }
}

/// Monoid-side principality: an element whose support and range are the
/// same atom must be that atom. Returns the first offender.
pub fn principal_witness(m: &FiniteInverseMonoid) -> Option<ElemId> {
    m.atomic_support_elements().into_iter().find(|&u| {
        let d = m.product(m.star(u), u);
        let r = m.product(u, m.star(u));
        d == r && u != d
    })
}

/// Build the trace corresponding to an invariant mean. Refuses
/// non-principal monoids, surfacing the isotropy witness, since there the
/// trace space is strictly larger than the mean space.
pub fn trace_from_mean(
    rep: &AtomRep,
    mean: &InvariantMean,
) -> Result<TraceFunctional> {
    let m = rep.monoid();
    means::validate_mean(m, mean)?;
    if let Some(w) = principal_witness(m) {
        return Err(Error::NotPrincipal { witness: w });
    }
    let orbit_sizes = rep.block_sizes();
    let orbit_weights: Vec<Rat> = rep
        .orbits
        .iter()
        .map(|o| {
            let w = &mean.weights[o[0]];
            Rat::from_integer((o.len() as i64).into()) * w
        })
        .collect();
    let tau = TraceFunctional { orbit_sizes, orbit_weights };

    // τ(δ_s) = μ(e_s), exhaustively on small monoids, sampled beyond
    let n = m.size();
    let ids: Vec<ElemId> = if n <= VERIFY_CAP {
        (0..n).collect()
    } else {
        (0..n).step_by(n / VERIFY_CAP + 1).collect()
    };
    for &s in &ids {
        let via_trace = tau.eval(&rep.delta(s));
        let via_mean = mean.evaluate(m, m.e_of(s)?)?;
        if via_trace != via_mean {
            return Err(Error::SelfCheck(format!("τ(δ_{s}) != μ(e_{s})")));
        }
    }
    Ok(tau)
}

/// μ_τ(e) = τ(δ_e); validated against the mean constraints.
pub fn mean_from_trace(rep: &AtomRep, tau: &TraceFunctional) -> Result<InvariantMean> {
    let m = rep.monoid();
    let weights: Vec<Rat> = (0..rep.atoms.len())
        .map(|ap| {
            let (o, _) = rep.slot_of(ap);
            &tau.orbit_weights[o] / Rat::from_integer((tau.orbit_sizes[o] as i64).into())
        })
        .collect();
    let mean = InvariantMean { atoms: rep.atoms.clone(), weights };
    means::validate_mean(m, &mean)?;
    Ok(mean)
}

impl AtomRep<'_> {
    fn slot_of(&self, atom_pos: usize) -> (usize, usize) {
        self.slot[atom_pos]
    }
}

/// Dimension of span{π(s)} inside the block-matrix algebra, with early
/// exit once the span is full.
pub fn span_dimension(rep: &AtomRep) -> usize {
    let m = rep.monoid();
    let full: usize = rep.block_sizes().iter().map(|k| k * k).sum();
    let cols = rep.total_dim() * rep.total_dim();
    let mut basis = RowBasis::new(cols);
    for s in 0..m.size() {
        basis.insert(rep.full_matrix(s).to_rational().flatten());
        if basis.rank() == full {
            break;
        }
    }
    basis.rank()
}

// ---------------------------------------------------------------------
// tight representations

/// Verify tightness of an arbitrary matrix representation of a Boolean
/// inverse monoid. The check is the cover-join equation, reduced to:
///  (B1) multiplicativity on idempotents,
///  (B2) π(e)(1-π(f)) = π(e·f⊥),
///  (A)  for every idempotent m and every cover Z of m↓: ∨π(z) = π(m);
/// (B1)+(B2) collapse the X/Y products of the general equation to π(m).
/// Exhaustive over covers when |E(S)| ≤ 16, sampled deterministically
/// beyond that.
pub fn verify_tight<F>(m: &FiniteInverseMonoid, dim: usize, rep: F) -> Result<bool>
where
    F: Fn(ElemId) -> IntMatrix + Sync,
{
    let skel = m.boolean_skeleton()?;
    let Some(comp) = &skel.complement else {
        return Err(Error::Structure("tightness check needs a Boolean idempotent algebra".into()));
    };
    let e = &skel.idempotents;
    let k = e.len();
    let identity = IntMatrix::identity(dim);
    let mats: Vec<IntMatrix> = e.iter().map(|&x| rep(x)).collect();

    // (B1) and (B2)
    for i in 0..k {
        for j in 0..k {
            if mats[i].mul(&mats[j]) != rep(m.product(e[i], e[j])) {
                return Ok(false);
            }
            let rhs = rep(m.product(e[i], e[comp[j]]));
            let lhs = mats[i].mul(&identity.sub(&mats[j]));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }

    // (A): covers of down-sets
    let exhaustive = k <= 16;
    let join = |a: &IntMatrix, b: &IntMatrix| -> IntMatrix {
        // p ∨ q = p + q - pq for commuting projections
        a.add(b).sub(&a.mul(b))
    };
    for (mi, &me) in e.iter().enumerate() {
        if me == m.zero() {
            continue;
        }
        let down: Vec<usize> = (0..k)
            .filter(|&j| e[j] != m.zero() && m.product(e[j], me) == e[j])
            .collect();
        let nsub: u64 = 1u64 << down.len().min(62);
        let budget: u64 = if exhaustive { nsub } else { 4096.min(nsub) };
        for mask in 1..budget {
            let z: Vec<usize> = down
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &j)| j)
                .collect();
            // Z covers m↓ iff ∨Z = m
            let join_elem = z.iter().try_fold(m.zero(), |acc, &j| m.join_pair(acc, e[j]).ok());
            if join_elem != Some(me) {
                continue;
            }
            let mut acc = IntMatrix::zeros(dim, dim);
            for &j in &z {
                acc = join(&acc, &mats[j]);
            }
            if acc != mats[mi] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The rest of the Boolean-representation axioms for an arbitrary matrix
/// representation: π(0) = 0, multiplicativity, star-compatibility, and
/// axiom (4) on all compatible pairs.
pub fn verify_boolean_representation<F>(m: &FiniteInverseMonoid, rep: F) -> bool
where
    F: Fn(ElemId) -> IntMatrix + Sync,
{
    if !rep(m.zero()).is_zero() {
        return false;
    }
    let n = m.size();
    exec::all_range(n, |s| {
        let ms = rep(s);
        if rep(m.star(s)) != ms.transpose() {
            return false;
        }
        (0..n).all(|t| {
            let mt = rep(t);
            if rep(m.product(s, t)) != ms.mul(&mt) {
                return false;
            }
            if m.compatible(s, t) {
                if let Ok(j) = m.join_pair(s, t) {
                    let sst = m.product(m.product(s, m.star(s)), t);
                    if rep(j) != ms.add(&mt).sub(&rep(sst)) {
                        return false;
                    }
                }
            }
            true
        })
    })
}

// ---------------------------------------------------------------------
// positivity

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub trials: usize,
    pub all_nonnegative: bool,
    pub faithful_mean: bool,
    pub zero_forces_zero: bool,
}

/// Seeded random elements x = Σ aᵢ δ_{sᵢ} with coefficients in
/// {-3..3}/{1..4}; checks τ_μ(x*x) ≥ 0 exactly, and when μ is faithful,
/// that τ_μ(x*x) = 0 forces x = 0 in the model.
pub fn positivity_check(
    rep: &AtomRep,
    mean: &InvariantMean,
    trials: usize,
    seed: u64,
) -> Result<PositivityReport> {
    let m = rep.monoid();
    let tau = trace_from_mean(rep, mean)?;
    let faithful = mean.is_faithful();
    let results: Vec<(bool, bool)> = exec::map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let terms = rng.gen_range(1..=4usize);
        let mut x = rep.zero_element();
        for _ in 0..terms {
            let s = rng.gen_range(0..m.size());
            let num: i64 = rng.gen_range(-3..=3);
            let den: i64 = rng.gen_range(1..=4);
            let coeff = Rat::new(num.into(), den.into());
            x = x.add(&rep.delta(s).scale(&coeff));
        }
        let val = tau.eval(&x.star().mul(&x));
        let nonneg = !val.is_negative();
        let zero_ok = !(faithful && val.is_zero()) || x.is_zero();
        (nonneg, zero_ok)
    });
    Ok(PositivityReport {
        trials,
        all_nonnegative: results.iter().all(|r| r.0),
        faithful_mean: faithful,
        zero_forces_zero: results.iter().all(|r| r.1),
    })
}
