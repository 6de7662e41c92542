//! Wire formats. Rationals travel as "p/q" strings; element ids and unit
//! ids are the canonical construction order, so identical inputs produce
//! identical documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::af::BratteliDiagram;
use crate::cstar::{AtomRep, TraceFunctional};
use crate::error::{Error, Result};
use crate::germs::FiniteGroupoid;
use crate::means::MeanPolytope;
use crate::monoid::{ClosureOptions, FiniteInverseMonoid};
use crate::pbij::PartialBijection;
use crate::ratio::to_pq;
use crate::selfsim::Automaton;

/// Input description of a monoid: ground size, generators as pair lists,
/// and whether to adjoin the identity map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub ground: usize,
    pub generators: Vec<Vec<(usize, usize)>>,
    #[serde(default)]
    pub adjoin_identity: bool,
}

impl MonoidSpec {
    pub fn build(&self, cap: usize) -> Result<FiniteInverseMonoid> {
        let gens: Vec<PartialBijection> = self
            .generators
            .iter()
            .map(|pairs| PartialBijection::from_pairs(self.ground, pairs))
            .collect::<Result<_>>()?;
        FiniteInverseMonoid::closure(
            &gens,
            self.ground,
            &ClosureOptions { adjoin_identity: self.adjoin_identity, join_closure: true, cap },
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowJson {
    pub src: usize,
    pub rng: usize,
}

/// Groupoid export: unit count, arrows, and the composition table as
/// (left, right, result) triples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub units: usize,
    pub arrows: Vec<ArrowJson>,
    pub compose: Vec<(usize, usize, usize)>,
}

impl GroupoidJson {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let arrows = (0..g.n_arrows())
            .map(|a| ArrowJson { src: g.source(a), rng: g.range(a) })
            .collect();
        let mut compose = Vec::new();
        for a in 0..g.n_arrows() {
            for b in 0..g.n_arrows() {
                if let Some(c) = g.compose(a, b) {
                    compose.push((a, b, c));
                }
            }
        }
        GroupoidJson { units: g.n_units(), arrows, compose }
    }
}

/// Mean polytope export with rationals as "p/q".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub atoms: Vec<usize>,
    pub vertices: Vec<Vec<String>>,
    pub dimension: usize,
}

impl PolytopeJson {
    pub fn from_polytope(p: &MeanPolytope) -> Self {
        PolytopeJson {
            atoms: p.atoms.clone(),
            vertices: p
                .vertices
                .iter()
                .map(|v| v.weights.iter().map(to_pq).collect())
                .collect(),
            dimension: p.dimension,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitWeightJson {
    pub size: usize,
    pub weight: String,
}

/// Trace export: orbit weights and τ(δ_s) per element id.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceJson {
    pub orbits: Vec<OrbitWeightJson>,
    pub tau_of: BTreeMap<String, String>,
}

impl TraceJson {
    pub fn from_trace(rep: &AtomRep, tau: &TraceFunctional) -> Self {
        let orbits = tau
            .orbit_sizes
            .iter()
            .zip(&tau.orbit_weights)
            .map(|(&size, w)| OrbitWeightJson { size, weight: to_pq(w) })
            .collect();
        let tau_of = (0..rep.monoid().size())
            .map(|s| (s.to_string(), to_pq(&tau.eval(&rep.delta(s)))))
            .collect();
        TraceJson { orbits, tau_of }
    }
}

/// Bratteli diagram input: level sizes and (level, src, dst, multiplicity)
/// edges.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramJson {
    pub levels: Vec<usize>,
    pub edges: Vec<(usize, usize, usize, usize)>,
}

impl DiagramJson {
    pub fn build(&self) -> Result<BratteliDiagram> {
        BratteliDiagram::new(self.levels.clone(), &self.edges)
    }
}

/// Finite-state self-similar action input; states are referenced by name.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionJson {
    pub alphabet: usize,
    pub states: Vec<String>,
    pub act: Vec<(String, usize, usize)>,
    pub restrict: Vec<(String, usize, String)>,
}

impl ActionJson {
    pub fn build(&self) -> Result<Automaton> {
        let idx = |name: &str| -> Result<usize> {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown state '{name}'")))
        };
        let n = self.states.len();
        let mut act = vec![vec![usize::MAX; self.alphabet]; n];
        for (state, letter, image) in &self.act {
            let s = idx(state)?;
            if *letter >= self.alphabet {
                return Err(Error::InvalidArgument(format!("letter {letter} out of range")));
            }
            act[s][*letter] = *image;
        }
        let mut restrict = vec![vec![usize::MAX; self.alphabet]; n];
        for (state, letter, target) in &self.restrict {
            let s = idx(state)?;
            if *letter >= self.alphabet {
                return Err(Error::InvalidArgument(format!("letter {letter} out of range")));
            }
            restrict[s][*letter] = idx(target)?;
        }
        if act.iter().flatten().any(|&x| x == usize::MAX)
            || restrict.iter().flatten().any(|&x| x == usize::MAX)
        {
            return Err(Error::InvalidArgument("incomplete act/restrict tables".into()));
        }
        Automaton::new(self.alphabet, self.states.clone(), act, restrict)
    }
}
