//! Bratteli diagrams and their finite-level inverse-monoid shadow: the
//! dimension recursion k_i, the blockwise symmetric inverse monoids S_i on
//! root paths, the level embeddings S_i ↪ S_{i+1}, level mean simplices,
//! and coherent sequences of means across levels.

use std::collections::HashMap;

use num::Zero;

use crate::cstar::{span_dimension, AtomRep};
use crate::error::{Error, Result};
use crate::germs::tight_groupoid;
use crate::means::{self};
use crate::monoid::{ElemId, FiniteInverseMonoid};
use crate::pbij::{enumerate_all, PartialBijection};
use crate::ratio::Rat;

/// A finite-depth Bratteli diagram. Multiplicity is stored by repeating
/// edges; the repeated copies are distinct labels, which is what the path
/// alphabet needs.
#[derive(Clone, Debug)]
pub struct BratteliDiagram {
    levels: Vec<usize>,
    /// edges[i]: ordered list of (source in V_i, target in V_{i+1})
    edges: Vec<Vec<(usize, usize)>>,
}

impl BratteliDiagram {
    /// `levels` are the sizes |V_0|, .., |V_n|; `edges` lists
    /// (level, src, dst, multiplicity).
    pub fn new(levels: Vec<usize>, edge_spec: &[(usize, usize, usize, usize)]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidDiagram("no levels (item 1)".into()));
        }
        let depth = levels.len() - 1;
        let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); depth];
        for &(lvl, src, dst, mult) in edge_spec {
            if lvl >= depth {
                return Err(Error::InvalidDiagram(format!(
                    "edge level {lvl} beyond depth {depth} (item 3)"
                )));
            }
            if src >= levels[lvl] || dst >= levels[lvl + 1] {
                return Err(Error::InvalidDiagram(format!(
                    "edge ({lvl},{src},{dst}) out of range (item 3)"
                )));
            }
            if mult == 0 {
                return Err(Error::InvalidDiagram("zero multiplicity edge".into()));
            }
            for _ in 0..mult {
                edges[lvl].push((src, dst));
            }
        }
        for level in &mut edges {
            level.sort_unstable();
        }
        let b = BratteliDiagram { levels, edges };
        b.validate()?;
        Ok(b)
    }

    /// Defining items: a unique root; nonempty levels; every vertex past
    /// the root has an incoming edge, and every vertex before the last
    /// level an outgoing one.
    pub fn validate(&self) -> Result<()> {
        if self.levels[0] != 1 {
            return Err(Error::InvalidDiagram(format!(
                "root level has {} vertices, expected 1 (item 2)",
                self.levels[0]
            )));
        }
        if self.levels.iter().any(|&n| n == 0) {
            return Err(Error::InvalidDiagram("empty vertex level (item 1)".into()));
        }
        for i in 0..self.depth() {
            for v in 0..self.levels[i + 1] {
                if !self.edges[i].iter().any(|&(_, d)| d == v) {
                    return Err(Error::InvalidDiagram(format!(
                        "vertex {v} at level {} has no incoming edge (item 4)",
                        i + 1
                    )));
                }
            }
            for v in 0..self.levels[i] {
                if !self.edges[i].iter().any(|&(s, _)| s == v) {
                    return Err(Error::InvalidDiagram(format!(
                        "vertex {v} at level {i} has no outgoing edge (item 4)"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level_size(&self, i: usize) -> usize {
        self.levels[i]
    }

    pub fn edges_at(&self, i: usize) -> &[(usize, usize)] {
        &self.edges[i]
    }

    /// k_i by the recursion k_i(v) = Σ over incoming edges of k_{i-1} at
    /// the edge source, with k_0 = (1) at the root.
    pub fn dims(&self, i: usize) -> Result<Vec<u64>> {
        if i > self.depth() {
            return Err(Error::InvalidArgument(format!("level {i} beyond depth")));
        }
        let mut k = vec![1u64];
        for lvl in 0..i {
            let mut next = vec![0u64; self.levels[lvl + 1]];
            for &(s, d) in &self.edges[lvl] {
                next[d] += k[s];
            }
            k = next;
        }
        Ok(k)
    }

    /// Paths from the root to level i, each a tuple of edges given by their
    /// positions in the per-level edge lists, in lexicographic order.
    pub fn paths(&self, i: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        let mut terminals: Vec<usize> = vec![0];
        for lvl in 0..i {
            let mut next_paths = Vec::new();
            let mut next_terms = Vec::new();
            for (p, &t) in out.iter().zip(&terminals) {
                for (ei, &(s, d)) in self.edges[lvl].iter().enumerate() {
                    if s == t {
                        let mut q = p.clone();
                        q.push(ei);
                        next_paths.push(q);
                        next_terms.push(d);
                    }
                }
            }
            out = next_paths;
            terminals = next_terms;
        }
        out
    }

    /// Terminal vertex of each path at level i, aligned with `paths(i)`.
    pub fn path_terminals(&self, i: usize) -> Vec<usize> {
        let paths = self.paths(i);
        paths
            .iter()
            .map(|p| {
                let mut t = 0usize;
                for (lvl, &ei) in p.iter().enumerate() {
                    t = self.edges[lvl][ei].1;
                }
                t
            })
            .collect()
    }

    // ----- stock diagrams -----

    /// One vertex per level with a double edge: the 2^∞ (CAR / binary
    /// odometer) diagram.
    pub fn two_infinity(depth: usize) -> Self {
        let levels = vec![1; depth + 1];
        let spec: Vec<(usize, usize, usize, usize)> =
            (0..depth).map(|i| (i, 0, 0, 2)).collect();
        Self::new(levels, &spec).expect("2^infinity diagram is valid")
    }

    /// Two vertices per level, edge matrix [[1,1],[1,0]]: block sizes are
    /// consecutive Fibonacci numbers.
    pub fn fibonacci(depth: usize) -> Self {
        assert!(depth >= 1);
        let mut levels = vec![2; depth + 1];
        levels[0] = 1;
        let mut spec: Vec<(usize, usize, usize, usize)> = vec![(0, 0, 0, 1), (0, 0, 1, 1)];
        for i in 1..depth {
            spec.push((i, 0, 0, 1));
            spec.push((i, 1, 0, 1));
            spec.push((i, 0, 1, 1));
        }
        Self::new(levels, &spec).expect("fibonacci diagram is valid")
    }

    /// Single edge level with `n` parallel edges to one vertex.
    pub fn single_vertex(n_edges: usize) -> Self {
        Self::new(vec![1, 1], &[(0, 0, 0, n_edges)]).expect("single vertex diagram")
    }

    /// Two towers that never interact after the root; the level simplices
    /// stay one-dimensional at every depth.
    pub fn disconnected_towers(depth: usize) -> Self {
        assert!(depth >= 1);
        let mut levels = vec![2; depth + 1];
        levels[0] = 1;
        let mut spec = vec![(0, 0, 0, 1), (0, 0, 1, 1)];
        for i in 1..depth {
            spec.push((i, 0, 0, 1));
            spec.push((i, 1, 1, 1));
        }
        Self::new(levels, &spec).expect("tower diagram")
    }
}

/// The truncation monoid S_i: all partial bijections of the level-i path
/// set that preserve the terminal vertex, i.e. the direct sum over V_i of
/// full symmetric inverse monoids on the path blocks.
pub fn truncation_monoid(
    b: &BratteliDiagram,
    i: usize,
    cap: usize,
) -> Result<FiniteInverseMonoid> {
    if i == 0 || i > b.depth() {
        return Err(Error::InvalidArgument(format!("level {i} out of range")));
    }
    let terminals = b.path_terminals(i);
    let n_paths = terminals.len();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); b.level_size(i)];
    for (p, &t) in terminals.iter().enumerate() {
        blocks[t].push(p);
    }

    // size check before enumerating: Π_v |I(k_v)|
    let mut expected: u128 = 1;
    for blk in &blocks {
        expected = expected.saturating_mul(count_partial_injections(blk.len()));
        if expected > cap as u128 {
            return Err(Error::SizeLimit { cap });
        }
    }

    let per_block: Vec<Vec<PartialBijection>> = blocks
        .iter()
        .map(|blk| enumerate_all(blk.len().max(1), cap))
        .collect::<Result<_>>()?;

    let mut elements: Vec<PartialBijection> = vec![PartialBijection::empty(n_paths.max(1))];
    for (v, blk) in blocks.iter().enumerate() {
        let mut next = Vec::with_capacity(elements.len() * per_block[v].len());
        for base in &elements {
            for local in &per_block[v] {
                let mut combined = base.clone();
                if !blk.is_empty() {
                    for (ls, ld) in local.pairs() {
                        combined = combined
                            .union(&PartialBijection::singleton(n_paths, blk[ls], blk[ld]))
                            .expect("blocks are disjoint");
                    }
                }
                next.push(combined);
            }
        }
        elements = next;
        if elements.len() > cap {
            return Err(Error::SizeLimit { cap });
        }
    }
    let verify = elements.len() <= 512;
    let m = FiniteInverseMonoid::from_elements(elements, verify)?;
    if m.size() as u128 != expected {
        return Err(Error::SelfCheck(format!(
            "truncation size {} != product of block counts {expected}",
            m.size()
        )));
    }
    Ok(m)
}

fn count_partial_injections(n: usize) -> u128 {
    // Σ_k C(n,k)^2 k!; blocks past 20 points dwarf every usable cap
    if n > 20 {
        return u128::MAX;
    }
    let mut total: u128 = 0;
    for k in 0..=n {
        let mut c: u128 = 1;
        for j in 0..k {
            c = c * (n - j) as u128 / (j + 1) as u128;
        }
        let mut kfact: u128 = 1;
        for j in 1..=k {
            kfact *= j as u128;
        }
        total = total.saturating_add(c.saturating_mul(c).saturating_mul(kfact));
    }
    total
}

/// The level embedding S_i ↪ S_{i+1}: an element acting on paths to v is
/// copied onto every one-edge extension of those paths. Returns the image
/// id in `upper` for every element of `lower`.
pub fn embed(
    b: &BratteliDiagram,
    i: usize,
    lower: &FiniteInverseMonoid,
    upper: &FiniteInverseMonoid,
) -> Result<Vec<ElemId>> {
    if i == 0 || i >= b.depth() {
        return Err(Error::InvalidArgument(format!("no embedding from level {i}")));
    }
    let paths_lo = b.paths(i);
    let paths_hi = b.paths(i + 1);
    let terms_lo = b.path_terminals(i);
    let hi_index: HashMap<&[usize], usize> =
        paths_hi.iter().enumerate().map(|(k, p)| (p.as_slice(), k)).collect();
    let n_hi = paths_hi.len();

    let mut out = Vec::with_capacity(lower.size());
    for s in 0..lower.size() {
        let map = lower
            .pbij(s)
            .ok_or_else(|| Error::InvalidArgument("lower monoid is not realized".into()))?;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (p, q) in map.pairs() {
            let v = terms_lo[p];
            debug_assert_eq!(v, terms_lo[q], "terminal vertex is preserved");
            for (ei, &(src, _)) in b.edges_at(i).iter().enumerate() {
                if src != v {
                    continue;
                }
                let mut from = paths_lo[p].clone();
                from.push(ei);
                let mut to = paths_lo[q].clone();
                to.push(ei);
                pairs.push((hi_index[from.as_slice()], hi_index[to.as_slice()]));
            }
        }
        let image = PartialBijection::from_pairs(n_hi, &pairs)?;
        let id = upper
            .element_id(&image)
            .ok_or_else(|| Error::SelfCheck("embedding image missing upstairs".into()))?;
        out.push(id);
    }
    // injectivity
    let mut seen = vec![false; upper.size()];
    for &id in &out {
        if seen[id] {
            return Err(Error::SelfCheck("embedding is not injective".into()));
        }
        seen[id] = true;
    }
    Ok(out)
}

/// The level-i mean simplex computed from the diagram alone: one vertex
/// per terminal vertex v, giving every path into v the weight 1/k_i(v).
#[derive(Clone, Debug)]
pub struct LevelMeans {
    pub level: usize,
    pub terminals: Vec<usize>,
    pub vertices: Vec<Vec<Rat>>,
    pub dimension: usize,
}

pub fn level_means(b: &BratteliDiagram, i: usize) -> Result<LevelMeans> {
    if i == 0 || i > b.depth() {
        return Err(Error::InvalidArgument(format!("level {i} out of range")));
    }
    let terminals = b.path_terminals(i);
    let k = b.dims(i)?;
    let mut vertices: Vec<Vec<Rat>> = (0..b.level_size(i))
        .map(|v| {
            let w = Rat::new(1.into(), (k[v] as i64).into());
            terminals
                .iter()
                .map(|&t| if t == v { w.clone() } else { Rat::zero() })
                .collect()
        })
        .collect();
    vertices.sort();
    let dimension = b.level_size(i) - 1;
    Ok(LevelMeans { level: i, terminals, vertices, dimension })
}

/// Cross-check of `level_means` against the generic mean polytope of the
/// built truncation monoid.
pub fn level_means_agree(b: &BratteliDiagram, i: usize, cap: usize) -> Result<bool> {
    let lm = level_means(b, i)?;
    let m = truncation_monoid(b, i, cap)?;
    let p = means::mean_polytope(&m)?;
    let mut poly_vertices: Vec<Vec<Rat>> = p.vertices.iter().map(|v| v.weights.clone()).collect();
    poly_vertices.sort();
    Ok(poly_vertices == lm.vertices && p.dimension == lm.dimension)
}

/// Coherent sequences of level means down to `depth`: level-i weights must
/// be the sums of the level-(i+1) weights over one-edge extensions. The
/// deepest level determines everything, so the solution polytope is the
/// k-weighted simplex at `depth`, pulled back through the recursion.
#[derive(Clone, Debug)]
pub struct CoherentMeans {
    pub depth: usize,
    /// per vertex of the solution polytope: per level 1..=depth, the
    /// weight of each diagram vertex
    pub vertices: Vec<Vec<Vec<Rat>>>,
    pub unique: bool,
}

pub fn coherent_means(b: &BratteliDiagram, depth: usize) -> Result<CoherentMeans> {
    if depth == 0 || depth > b.depth() {
        return Err(Error::InvalidArgument(format!("depth {depth} out of range")));
    }
    let k = b.dims(depth)?;
    let nv = b.level_size(depth);
    // vertices of {w >= 0 : Σ k(v) w(v) = 1} are e_v / k(v)
    let mut deepest: Vec<Vec<Rat>> = (0..nv)
        .map(|v| {
            let mut w = vec![Rat::zero(); nv];
            w[v] = Rat::new(1.into(), (k[v] as i64).into());
            w
        })
        .collect();
    deepest.sort();
    let vertices = deepest
        .into_iter()
        .map(|wd| {
            let mut per_level = vec![wd];
            for lvl in (1..depth).rev() {
                let upper = &per_level[0];
                let mut w = vec![Rat::zero(); b.level_size(lvl)];
                for &(s, d) in b.edges_at(lvl) {
                    let v = &w[s] + &upper[d];
                    w[s] = v;
                }
                per_level.insert(0, w);
            }
            per_level
        })
        .collect::<Vec<_>>();
    // each pulled-back level must be normalized
    for v in &vertices {
        for (lvl, w) in v.iter().enumerate() {
            let ki = b.dims(lvl + 1)?;
            let total: Rat = w
                .iter()
                .zip(&ki)
                .map(|(wi, &kv)| wi * Rat::from_integer((kv as i64).into()))
                .sum();
            if !num::One::is_one(&total) {
                return Err(Error::SelfCheck(format!(
                    "coherent pullback at level {} is not normalized",
                    lvl + 1
                )));
            }
        }
    }
    let unique = vertices.len() == 1;
    Ok(CoherentMeans { depth, vertices, unique })
}

/// Finite-level shadow of the AF theorem: the tight groupoid of S_i has
/// orbit sizes {k_i(v)} and the representation spans a block algebra of
/// dimension Σ k_i(v)².
pub fn block_dims_check(b: &BratteliDiagram, i: usize, cap: usize) -> Result<bool> {
    let m = truncation_monoid(b, i, cap)?;
    let g = tight_groupoid(&m)?;
    let mut orbit_sizes: Vec<usize> = g.orbits().iter().map(|o| o.len()).collect();
    orbit_sizes.sort_unstable();
    let mut expected: Vec<usize> = b.dims(i)?.iter().map(|&x| x as usize).collect();
    expected.sort_unstable();
    if orbit_sizes != expected {
        return Ok(false);
    }
    let rep = AtomRep::new(&m)?;
    let want: usize = expected.iter().map(|&x| x * x).sum();
    Ok(span_dimension(&rep) == want)
}
