//! Acceptance suite. Each test drives one criterion end to end at its
//! stated tolerance (exact rational equality throughout) and prints one
//! PASS line; a failure panics with the offending detail.

use std::collections::HashMap;
use std::process::Command;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use invmono::af::{self, BratteliDiagram};
use invmono::cstar::{
    positivity_check, principal_witness, trace_from_mean, verify_boolean_representation,
    verify_tight, AtomRep,
};
use invmono::germs::{
    ample_semigroup, groupoids_isomorphic, stone_roundtrip, tight_groupoid, FiniteGroupoid,
};
use invmono::means::{mean_from_measure, mean_polytope, measure_from_mean};
use invmono::monoid::{ClosureOptions, ElemId, FiniteInverseMonoid};
use invmono::pbij::PartialBijection;
use invmono::random::{boolean_monoid_suite, RandomMonoidConfig};
use invmono::ratio::{rat, rat_int, Rat};
use invmono::selfsim::{
    all_words, realize_triple, triple_product, unique_mean_check, GroupSelfSimilar, Odometer,
    SelfSimilarAction, Triple,
};
use invmono::Error;

fn i3() -> FiniteInverseMonoid {
    let mut gens = Vec::new();
    for s in 0..3 {
        for d in 0..3 {
            gens.push(PartialBijection::singleton(3, s, d));
        }
    }
    FiniteInverseMonoid::closure(
        &gens,
        3,
        &ClosureOptions { adjoin_identity: true, ..Default::default() },
    )
    .unwrap()
}

fn z2_with_zero() -> FiniteInverseMonoid {
    let swap = PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
    FiniteInverseMonoid::closure(
        &[swap],
        2,
        &ClosureOptions { adjoin_identity: true, ..Default::default() },
    )
    .unwrap()
}

/// 200 seeded random Boolean inverse monoids shared by criteria 4, 5, 6, 9.
fn suite() -> &'static [(u64, FiniteInverseMonoid)] {
    static SUITE: OnceLock<Vec<(u64, FiniteInverseMonoid)>> = OnceLock::new();
    SUITE.get_or_init(|| boolean_monoid_suite(200, &RandomMonoidConfig::default()))
}

#[test]
fn criterion_1_i3_end_to_end() {
    let m = i3();
    assert_eq!(m.size(), 34);
    assert_eq!(m.idempotents().len(), 8);
    assert_eq!(m.atoms().len(), 3);
    assert!(m.is_boolean());
    assert!(m.condition_h());

    let g = tight_groupoid(&m).unwrap();
    assert_eq!(g.n_units(), 3);
    assert_eq!(g.n_arrows(), 9);
    assert!(g.is_principal());
    assert!(g.is_minimal());
    assert!(groupoids_isomorphic(&g, &FiniteGroupoid::full_relation(3)));

    let p = mean_polytope(&m).unwrap();
    assert_eq!(p.vertices.len(), 1);
    let mu = &p.vertices[0];
    // μ(Id_U) = |U|/3 exactly, over every idempotent
    for &e in m.idempotents() {
        let size = m.pbij(e).unwrap().domain_size() as i64;
        assert_eq!(mu.evaluate(&m, e).unwrap(), rat(size, 3));
    }

    let rep = AtomRep::new(&m).unwrap();
    let tau = trace_from_mean(&rep, mu).unwrap();
    for s in 0..m.size() {
        let lhs = tau.eval(&rep.delta(s));
        let rhs = mu.evaluate(&m, m.e_of(s).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "τ(δ_{s}) != μ(e_{s})");
    }
    println!("ACCEPTANCE 1 (I3 end-to-end): PASS");
}

#[test]
fn criterion_2_z2_counterexample() {
    let m = z2_with_zero();
    let p = mean_polytope(&m).unwrap();
    assert_eq!(p.vertices.len(), 1, "mean polytope must be a single point");
    assert_eq!(p.vertices[0].weights, vec![rat_int(1)]);

    let g = tight_groupoid(&m).unwrap();
    assert!(!g.is_principal());
    assert!(g.principal_witness().is_some());
    assert_eq!(g.isotropy(0).arrows.len(), 2);

    let swap = m
        .element_id(&PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap())
        .unwrap();
    let rep = AtomRep::new(&m).unwrap();
    match trace_from_mean(&rep, &p.vertices[0]) {
        Err(Error::NotPrincipal { witness }) => assert_eq!(witness, swap),
        other => panic!("expected refusal, got {other:?}"),
    }

    // the CLI front end refuses with exit code 4 and reports the witness
    let fixture = format!(
        "{}/tests/fixtures/z2.json",
        env!("CARGO_MANIFEST_DIR")
    );
    let out = Command::new(env!("CARGO_BIN_EXE_invmono"))
        .args(["traces", "--input", &fixture])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["error"], "not_principal");
    println!("ACCEPTANCE 2 (Z2 counterexample): PASS");
}

#[test]
fn criterion_3_stone_roundtrip() {
    for k in 2..=4 {
        assert!(
            stone_roundtrip(&FiniteGroupoid::full_relation(k)).unwrap(),
            "full relation on {k}"
        );
    }
    let du = FiniteGroupoid::disjoint_union(
        &FiniteGroupoid::full_relation(2),
        &FiniteGroupoid::full_relation(3),
    );
    assert!(stone_roundtrip(&du).unwrap());
    assert_eq!(ample_semigroup(&FiniteGroupoid::full_relation(3)).unwrap().size(), 34);
    println!("ACCEPTANCE 3 (Stone roundtrip): PASS");
}

fn idempotent_leq(m: &FiniteInverseMonoid, e: ElemId, f: ElemId) -> bool {
    m.product(e, f) == e
}

#[test]
fn criterion_4_lemma_suite() {
    let monoids = suite();
    assert_eq!(monoids.len(), 200);
    for (seed, m) in monoids {
        assert!(m.condition_h(), "seed {seed}: (H) fails");
        let n = m.size();
        // e_of internally cross-checks the join of fixed idempotents
        // against the meet form s ∧ s*s
        let e_of: Vec<ElemId> =
            (0..n).map(|s| m.e_of(s).unwrap_or_else(|e| panic!("seed {seed}: {e}"))).collect();
        for s in 0..n {
            assert_eq!(e_of[m.star(s)], e_of[s], "seed {seed}: e_s* != e_s at {s}");
        }

        let poly = mean_polytope(m).unwrap();
        // μ(e) per vertex for every idempotent, for O(1) pair checks
        let mut mu_at: HashMap<ElemId, Vec<Rat>> = HashMap::new();
        for &e in m.idempotents() {
            let vals = poly.vertices.iter().map(|v| v.evaluate(m, e).unwrap()).collect();
            mu_at.insert(e, vals);
        }

        for s in 0..n {
            let ss = m.product(s, m.star(s));
            for t in 0..n {
                let st = m.product(s, t);
                let ts = m.product(t, s);
                let est = e_of[st];
                let ets = e_of[ts];
                let tt = m.product(m.star(t), t);
                assert!(idempotent_leq(m, est, ss), "seed {seed}: e_st !<= ss* ({s},{t})");
                assert!(idempotent_leq(m, est, tt), "seed {seed}: e_st !<= t*t ({s},{t})");
                let conj = m.product(m.product(m.star(s), est), s);
                assert_eq!(conj, ets, "seed {seed}: s* e_st s != e_ts ({s},{t})");
                assert_eq!(mu_at[&est], mu_at[&ets], "seed {seed}: μ(e_st) != μ(e_ts)");
            }
        }

        // e_{s*t} e_{t*r} ≤ e_{s*r}: exhaustive under a triple budget,
        // seeded sampling beyond it
        let check_triple = |s: ElemId, t: ElemId, r: ElemId| {
            let a = e_of[m.product(m.star(s), t)];
            let b = e_of[m.product(m.star(t), r)];
            let c = e_of[m.product(m.star(s), r)];
            let ab = m.product(a, b);
            assert!(
                idempotent_leq(m, ab, c),
                "seed {seed}: e_s*t e_t*r !<= e_s*r ({s},{t},{r})"
            );
        };
        if n * n * n <= 30_000_000 {
            for s in 0..n {
                for t in 0..n {
                    for r in 0..n {
                        check_triple(s, t, r);
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..300_000 {
                check_triple(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            }
        }
    }
    println!("ACCEPTANCE 4 (lemma suite, 200 monoids): PASS");
}

#[test]
fn criterion_5_tight_equals_boolean_representation() {
    let monoids = suite();
    let mut exhaustive = 0;
    for (seed, m) in monoids {
        // AtomRep::new verifies multiplicativity, star-compatibility, and
        // axiom (4) on all compatible pairs while building
        let rep = AtomRep::new(m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(
            verify_boolean_representation(m, |s| rep.full_matrix(s)),
            "seed {seed}: axiom sweep failed"
        );
        if m.idempotents().len() <= 16 {
            exhaustive += 1;
            assert!(
                verify_tight(m, rep.total_dim(), |s| rep.full_matrix(s)).unwrap(),
                "seed {seed}: tightness fails"
            );
        }
    }
    assert!(exhaustive > 50, "suite should contain many small-E monoids");
    println!("ACCEPTANCE 5 (tight = Boolean representation, {exhaustive} exhaustive): PASS");
}

#[test]
fn criterion_6_mean_polytope_is_orbit_simplex() {
    let monoids = suite();
    for (seed, m) in monoids {
        // mean_polytope cross-validates the orbit-uniform vertex set
        // against the LP vertex-enumeration oracle and the affine
        // dimension against #orbits - 1; any disagreement is an error
        let p = mean_polytope(m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(p.dimension, p.orbits.len() - 1, "seed {seed}");
        let g = tight_groupoid(m).unwrap();
        for v in &p.vertices {
            let nu = measure_from_mean(m, &g, v).unwrap();
            let back = mean_from_measure(m, &g, &nu).unwrap();
            assert_eq!(&back, v, "seed {seed}: roundtrip moved a vertex");
        }
    }
    println!("ACCEPTANCE 6 (mean polytope = orbit simplex, 200 monoids): PASS");
}

#[test]
fn criterion_7_af_pipeline() {
    let b = BratteliDiagram::two_infinity(10);
    for i in 0..=10 {
        assert_eq!(b.dims(i).unwrap(), vec![1u64 << i], "k_{i}");
    }
    for i in 1..=10 {
        let lm = af::level_means(&b, i).unwrap();
        assert_eq!(lm.vertices.len(), 1, "level {i}");
        assert!(lm.vertices[0].iter().all(|w| *w == rat(1, 1 << i)));
    }
    // the generic polytope on the built truncation agrees where it fits
    assert!(af::level_means_agree(&b, 1, 100_000).unwrap());
    assert!(af::level_means_agree(&b, 2, 100_000).unwrap());

    let c = af::coherent_means(&b, 6).unwrap();
    assert!(c.unique);
    for (lvl, w) in c.vertices[0].iter().enumerate() {
        assert_eq!(w, &vec![rat(1, 1 << (lvl + 1))], "coherent level {}", lvl + 1);
    }

    assert!(af::block_dims_check(&b, 1, 100_000).unwrap());
    assert!(af::block_dims_check(&b, 2, 100_000).unwrap());
    // level 3 is the 8-point block: |I(8)| elements, still exact
    assert!(af::block_dims_check(&b, 3, 2_000_000).unwrap());

    // Fibonacci: blocks are consecutive Fibonacci numbers (independent
    // matrix-power oracle) and every level polytope is a segment
    let f = BratteliDiagram::fibonacci(8);
    let mut fib = vec![1u64, 1];
    for i in 2..=8 {
        let next = fib[i - 1] + fib[i - 2];
        fib.push(next);
    }
    for i in 1..=8 {
        let mut k = vec![vec![1u64]];
        for lvl in 0..i {
            let prev = &k[lvl];
            let mut next = vec![0u64; f.level_size(lvl + 1)];
            for &(s, d) in f.edges_at(lvl) {
                next[d] += prev[s];
            }
            k.push(next);
        }
        assert_eq!(k[i], f.dims(i).unwrap());
        assert_eq!(f.dims(i).unwrap(), vec![fib[i], fib[i - 1]]);
        let lm = af::level_means(&f, i).unwrap();
        assert_eq!(lm.vertices.len(), 2, "Fibonacci level {i}");
    }
    assert!(af::block_dims_check(&f, 2, 100_000).unwrap());
    assert!(af::block_dims_check(&f, 3, 100_000).unwrap());
    println!("ACCEPTANCE 7 (AF pipeline): PASS");
}

#[test]
fn criterion_8_odometer() {
    let od = Odometer;
    for n in 1..=8 {
        let report = unique_mean_check(&od, n, &[1], 300_000).unwrap();
        assert!(report.single_atom_orbit, "depth {n}: atom orbit split");
        assert!(report.unique, "depth {n}: mean not unique");
        assert!(report.cylinder_values_match, "depth {n}: μ(C(α)) != 2^-|α|");
    }

    // cocycle identities, exhaustive to word length 6
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

    // triple products match realized-bijection composition, exhaustive to
    // word length 3
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
    let depth = 4;
    let realized: Vec<PartialBijection> =
        triples.iter().map(|t| realize_triple(&od, t, depth).unwrap()).collect();
    for (i, s) in triples.iter().enumerate() {
        for (j, t) in triples.iter().enumerate() {
            let comp = realized[i].compose(&realized[j]);
            match triple_product(&od, s, t) {
                Some(p) => assert_eq!(realize_triple(&od, &p, depth).unwrap(), comp),
                None => assert!(comp.is_empty_map()),
            }
        }
    }
    println!("ACCEPTANCE 8 (odometer, depths 1..8): PASS");
}

#[test]
fn criterion_9_positivity() {
    let monoids = suite();
    let mut principal_count = 0;
    for (seed, m) in monoids {
        if principal_witness(m).is_some() {
            continue;
        }
        principal_count += 1;
        let rep = AtomRep::new(m).unwrap();
        let p = mean_polytope(m).unwrap();
        let mu = p.barycenter();
        assert!(mu.is_faithful(), "seed {seed}: barycenter must be faithful");
        let report = positivity_check(&rep, &mu, 100, *seed).unwrap();
        assert!(report.all_nonnegative, "seed {seed}: τ(x*x) < 0");
        assert!(report.zero_forces_zero, "seed {seed}: τ(x*x) = 0 with x != 0");
    }
    assert!(principal_count > 50, "suite should contain many principal monoids");

    // the worked example too
    let m = i3();
    let rep = AtomRep::new(&m).unwrap();
    let p = mean_polytope(&m).unwrap();
    let report = positivity_check(&rep, &p.vertices[0], 100, 0).unwrap();
    assert!(report.all_nonnegative && report.zero_forces_zero);
    println!("ACCEPTANCE 9 (positivity, {principal_count} principal monoids): PASS");
}
