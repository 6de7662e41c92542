//! The affine space of normalized invariant means, computed exactly over
//! atom weights, and its identification with invariant measures on the unit
//! space of the tight groupoid.
//!
//! A mean is stored through its atom weights: in a finite Boolean inverse
//! monoid every idempotent is the orthogonal join of the atoms below it, so
//! the atom values determine the mean and additivity is automatic. The
//! polytope is produced twice — once from the atom-orbit structure, once by
//! a raw vertex-enumeration oracle on the constraint system — and the two
//! answers are required to agree.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::germs::FiniteGroupoid;
use crate::linalg::{self, LinearSystem};
use crate::monoid::{ElemId, FiniteInverseMonoid};
use crate::ratio::Rat;

const ORACLE_BUDGET: usize = 2_000_000;

/// A normalized invariant mean, stored by its atom weights (atoms in the
/// monoid's canonical order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantMean {
    pub atoms: Vec<ElemId>,
    pub weights: Vec<Rat>,
}

impl InvariantMean {
    /// μ(e) = Σ of the weights of the atoms below e.
    pub fn evaluate(&self, m: &FiniteInverseMonoid, e: ElemId) -> Result<Rat> {
        if !m.is_idempotent(e) {
            return Err(Error::InvalidArgument(format!("{e} is not an idempotent")));
        }
        let mut total = Rat::zero();
        for (i, &a) in self.atoms.iter().enumerate() {
            if m.product(a, e) == a {
                total += &self.weights[i];
            }
        }
        Ok(total)
    }

    pub fn is_faithful(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }
}

/// The invariance constraints on atom weights: one equation
/// weight(u*u) = weight(uu*) per element u with atomic support, plus the
/// normalization Σ = 1 and nonnegativity.
#[derive(Clone, Debug)]
pub struct MeanConstraints {
    pub atoms: Vec<ElemId>,
    /// positions into `atoms`, with i < j, deduplicated
    pub pairs: Vec<(usize, usize)>,
}

pub fn mean_constraints(m: &FiniteInverseMonoid) -> Result<MeanConstraints> {
    let atoms = m.atoms().to_vec();
    if atoms.is_empty() {
        return Err(Error::Structure("monoid has no atoms".into()));
    }
    let pos = |a: ElemId| atoms.binary_search(&a).expect("atom order is sorted");
    let mut pairs = Vec::new();
    for u in m.atomic_support_elements() {
        let s = pos(m.product(m.star(u), u));
        let r = pos(m.product(u, m.star(u)));
        if s != r {
            pairs.push((s.min(r), s.max(r)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(MeanConstraints { atoms, pairs })
}

/// The exact polytope of normalized invariant means.
#[derive(Clone, Debug)]
pub struct MeanPolytope {
    pub atoms: Vec<ElemId>,
    /// atom positions partitioned into orbits of the conjugation action
    pub orbits: Vec<Vec<usize>>,
    /// extreme points, sorted lexicographically by weight vector
    pub vertices: Vec<InvariantMean>,
    pub dimension: usize,
}

impl MeanPolytope {
    /// Barycenter of the vertices; faithful whenever every atom sits in
    /// some orbit, i.e. always.
    pub fn barycenter(&self) -> InvariantMean {
        let k = Rat::from_integer((self.vertices.len() as i64).into());
        let mut weights = vec![Rat::zero(); self.atoms.len()];
        for v in &self.vertices {
            for (i, w) in v.weights.iter().enumerate() {
                weights[i] += w / &k;
            }
        }
        InvariantMean { atoms: self.atoms.clone(), weights }
    }
}

/// Atoms together with their partition into orbits of the conjugation
/// action a ↦ s·a·s*. Orbits are listed by smallest member; entries are
/// positions into the atom list.
pub fn atom_orbits(m: &FiniteInverseMonoid) -> Result<(Vec<ElemId>, Vec<Vec<usize>>)> {
    let cons = mean_constraints(m)?;
    let n = cons.atoms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &(i, j) in &cons.pairs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut root_to_orbit: std::collections::HashMap<usize, usize> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        let k = *root_to_orbit.entry(r).or_insert_with(|| {
            orbits.push(Vec::new());
            orbits.len() - 1
        });
        orbits[k].push(i);
    }
    orbits.sort_by_key(|o| o[0]);
    Ok((cons.atoms, orbits))
}

pub fn mean_polytope(m: &FiniteInverseMonoid) -> Result<MeanPolytope> {
    if !m.is_atomistic() {
        return Err(Error::Structure(
            "idempotents do not decompose into atoms; means are not determined by atom weights"
                .into(),
        ));
    }
    let cons = mean_constraints(m)?;
    let n = cons.atoms.len();
    let (_, orbits) = atom_orbits(m)?;
    let mut orbit_vertices: Vec<Vec<Rat>> = orbits
        .iter()
        .map(|o| {
            let w = Rat::new(1.into(), (o.len() as i64).into());
            let mut v = vec![Rat::zero(); n];
            for &i in o {
                v[i] = w.clone();
            }
            v
        })
        .collect();
    orbit_vertices.sort();

    // independent oracle: raw vertex enumeration of the constraint system
    let mut rows: Vec<(Vec<(usize, Rat)>, Rat)> = cons
        .pairs
        .iter()
        .map(|&(i, j)| (vec![(i, Rat::one()), (j, -Rat::one())], Rat::zero()))
        .collect();
    rows.push(((0..n).map(|i| (i, Rat::one())).collect(), Rat::one()));
    let sys = LinearSystem { n_vars: n, rows };
    let oracle_vertices = linalg::polytope_vertices(&sys, ORACLE_BUDGET)?;

    if orbit_vertices != oracle_vertices {
        return Err(Error::SelfCheck(format!(
            "orbit-uniform vertex set ({}) disagrees with LP oracle ({})",
            orbit_vertices.len(),
            oracle_vertices.len()
        )));
    }

    let dimension = linalg::affine_dimension(&orbit_vertices);
    if dimension != orbits.len() - 1 {
        return Err(Error::SelfCheck(format!(
            "affine dimension {} != #orbits - 1 = {}",
            dimension,
            orbits.len() - 1
        )));
    }

    let vertices = orbit_vertices
        .into_iter()
        .map(|weights| InvariantMean { atoms: cons.atoms.clone(), weights })
        .collect();
    Ok(MeanPolytope { atoms: cons.atoms, orbits, vertices, dimension })
}

/// Check the defining constraints: nonnegative, normalized, invariant.
pub fn validate_mean(m: &FiniteInverseMonoid, mean: &InvariantMean) -> Result<()> {
    if mean.atoms != m.atoms() {
        return Err(Error::Validation("atom list mismatch".into()));
    }
    if mean.weights.len() != mean.atoms.len() {
        return Err(Error::Validation("weight length mismatch".into()));
    }
    if mean.weights.iter().any(|w| w.is_negative()) {
        return Err(Error::Validation("negative atom weight".into()));
    }
    let total: Rat = mean.weights.iter().sum();
    if !total.is_one() {
        return Err(Error::Validation(format!("weights sum to {total}, not 1")));
    }
    let cons = mean_constraints(m)?;
    for &(i, j) in &cons.pairs {
        if mean.weights[i] != mean.weights[j] {
            return Err(Error::Validation(format!(
                "invariance fails between atoms {} and {}",
                mean.atoms[i], mean.atoms[j]
            )));
        }
    }
    Ok(())
}

/// A probability weighting of the unit space, invariant in the sense that
/// every bisection moves no mass: ν(d(U)) = ν(r(U)). Additivity reduces
/// this to single arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitMeasure {
    pub weights: Vec<Rat>,
}

pub fn validate_measure(g: &FiniteGroupoid, nu: &UnitMeasure) -> Result<()> {
    if nu.weights.len() != g.n_units() {
        return Err(Error::Validation("unit count mismatch".into()));
    }
    if nu.weights.iter().any(|w| w.is_negative()) {
        return Err(Error::Validation("negative unit mass".into()));
    }
    let total: Rat = nu.weights.iter().sum();
    if !total.is_one() {
        return Err(Error::Validation(format!("masses sum to {total}, not 1")));
    }
    for a in 0..g.n_arrows() {
        if nu.weights[g.source(a)] != nu.weights[g.range(a)] {
            return Err(Error::Validation(format!("arrow {a} moves mass")));
        }
    }
    Ok(())
}

/// The affine isomorphism M(S) → IM(𝒢_tight(S)): the unit at atom a gets
/// the mean's weight at a. `g` must be the tight groupoid of `m`, whose
/// units are the atoms in canonical order.
pub fn measure_from_mean(
    m: &FiniteInverseMonoid,
    g: &FiniteGroupoid,
    mean: &InvariantMean,
) -> Result<UnitMeasure> {
    validate_mean(m, mean)?;
    if g.n_units() != mean.atoms.len() {
        return Err(Error::InvalidArgument(
            "groupoid units do not match the atom list".into(),
        ));
    }
    let nu = UnitMeasure { weights: mean.weights.clone() };
    validate_measure(g, &nu)?;
    Ok(nu)
}

/// Inverse direction: η_ν(e) = ν(D_e), which on atoms is ν itself.
pub fn mean_from_measure(
    m: &FiniteInverseMonoid,
    g: &FiniteGroupoid,
    nu: &UnitMeasure,
) -> Result<InvariantMean> {
    validate_measure(g, nu)?;
    if g.n_units() != m.atoms().len() {
        return Err(Error::InvalidArgument(
            "groupoid units do not match the atom list".into(),
        ));
    }
    let mean = InvariantMean { atoms: m.atoms().to_vec(), weights: nu.weights.clone() };
    validate_mean(m, &mean)?;
    Ok(mean)
}
