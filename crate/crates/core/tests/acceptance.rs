//! Acceptance suite. Each test covers one criterion, runs it at the stated
//! tolerance (all exact), and prints one pass line; a failed assertion is
//! the fail line.

mod common;

use std::time::{Duration, Instant};

use kweb_core::classify::{are_lpa_isomorphic_amplified, canonical_form};
use kweb_core::graph::{Graph, Multiplicity, VertexSet};
use kweb_core::lattice::enumerate_lattice;
use kweb_core::moves::{amplified_transitive_closure, amplify, move_t};
use kweb_core::zmod::smith_normal_form;
use kweb_core::{
    build_kweb, compare_kwebs, k_groups_of_pair, six_term, CompareOptions, Config, KWeb, Verdict,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: usize, what: &str, elapsed: Duration) {
    println!(
        "acceptance {criterion}: PASS ({what}) in {:.2}s",
        elapsed.as_secs_f64()
    );
}

fn parse(text: &str) -> Graph {
    Graph::parse(text).unwrap()
}

/// Criterion 1: single vertex with n loops, n = 2..9: K0 has invariant
/// factors [n-1] (trivial for n = 2) and K1 = 0. Exact, < 1 s total.
#[test]
fn acceptance_1_cuntz_ladder() {
    let start = Instant::now();
    for n in 2..=9u64 {
        let g = parse(&format!("vertices v\nedge v v {n}"));
        let lat = enumerate_lattice(&g, 20).unwrap();
        let kg = k_groups_of_pair(&g, &lat, lat.bottom(), lat.top()).unwrap();
        if n == 2 {
            assert!(kg.k0().torsion().is_empty(), "n=2 must be trivial");
            assert_eq!(kg.k0().free_rank(), 0);
        } else {
            assert_eq!(kg.k0().torsion(), &[BigInt::from(n - 1)], "n = {n}");
            assert_eq!(kg.k0().free_rank(), 0);
        }
        assert!(kg.k1().is_trivial(), "K1 must vanish for n = {n}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(1, "Cuntz ladder n=2..9", elapsed);
}

/// Random row-finite Condition (K) corpus: ≤ 7 vertices, multiplicities ≤ 3.
/// Lattice size is capped to keep triple counts at desk scale.
fn condition_k_corpus(count: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(20260809);
    let mut corpus = Vec::new();
    while corpus.len() < count {
        let n = rng.gen_range(1..=7);
        let density = rng.gen_range(0.25..0.75);
        let g = common::random_finite_graph(&mut rng, n, density, 3);
        if !g.satisfies_condition_k() {
            continue;
        }
        let lat = enumerate_lattice(&g, 20).unwrap();
        if lat.len() > 24 {
            continue;
        }
        corpus.push(g);
    }
    corpus
}

/// Criterion 2: every triple of every lattice in a ≥100-graph random
/// row-finite Condition (K) corpus yields a six-term sequence passing
/// exactness at all six nodes with vanishing composites. Zero failures,
/// < 60 s. (`build_kweb` verifies exactness and the composites for every
/// triple and aborts on any failure.)
#[test]
fn acceptance_2_six_term_exactness() {
    let start = Instant::now();
    let corpus = condition_k_corpus(100);
    let mut triples = 0usize;
    for g in &corpus {
        let web = build_kweb(g, &Config::default()).expect("exactness verification failed");
        triples += web.sequences().len();
    }
    assert!(triples > 100, "corpus produced too few triples: {triples}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(
        2,
        &format!("{} graphs, {triples} six-term sequences", corpus.len()),
        elapsed,
    );
}

/// Criterion 3: on the same corpus, whenever the presentation 1 − Bᵗ of a
/// subquotient is square and nonsingular, |K0| equals |det| from the
/// independent Bareiss routine and K1 = 0. Exact, zero failures.
#[test]
fn acceptance_3_determinant_oracle() {
    let start = Instant::now();
    let corpus = condition_k_corpus(100);
    let mut checked = 0usize;
    for g in &corpus {
        let web = build_kweb(g, &Config::default()).unwrap();
        for kg in web.groups().values() {
            let m = kg.presentation();
            if m.rows() != m.cols() {
                continue;
            }
            let det = m.det_bareiss();
            if det.is_zero() {
                continue;
            }
            checked += 1;
            assert_eq!(kg.k0().order(), Some(det.abs()), "order mismatch");
            assert!(kg.k1().is_trivial());
        }
    }
    assert!(checked > 100, "too few nonsingular pairs: {checked}");
    let elapsed = start.elapsed();
    pass(3, &format!("{checked} nonsingular subquotients"), elapsed);
}

/// Criterion 4: 500 random matrices up to 8×8 with entries in [-9, 9]:
/// U·A·V = S exactly, |det U| = |det V| = 1, divisibility chain holds, and
/// the invariant factors are stable under row/column permutations. Exact.
#[test]
fn acceptance_4_snf_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let one = BigInt::from(1);
    for _ in 0..500 {
        let rows = rng.gen_range(0..=8usize);
        let cols = rng.gen_range(0..=8usize);
        let m = kweb_core::zmod::IntMatrix::from_fn(rows, cols, |_, _| {
            BigInt::from(rng.gen_range(-9i64..=9))
        });
        let d = smith_normal_form(&m);
        assert_eq!(d.u.mul(&m).mul(&d.v), d.s, "UAV != S");
        assert_eq!(d.u.det_bareiss().abs(), one);
        assert_eq!(d.v.det_bareiss().abs(), one);
        let diag = d.diagonal();
        for w in diag.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
            }
        }
        let rp = common::random_permutation(&mut rng, rows);
        let cp = common::random_permutation(&mut rng, cols);
        let permuted =
            kweb_core::zmod::IntMatrix::from_fn(rows, cols, |i, j| m.get(rp[i], cp[j]).clone());
        assert_eq!(
            diag,
            smith_normal_form(&permuted).diagonal(),
            "permutation instability"
        );
    }
    pass(4, "500 random SNF decompositions", start.elapsed());
}

/// Criterion 5: 200-graph corpus with ≤ 8 vertices: enumerate_lattice equals
/// the brute-force subset filter. Exact, < 30 s.
#[test]
fn acceptance_5_lattice_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..200 {
        let n = rng.gen_range(0..=8usize);
        let density = rng.gen_range(0.1..0.8);
        let g = if i % 3 == 0 {
            common::random_mixed_graph(&mut rng, n, density, 3, 0.4)
        } else {
            common::random_finite_graph(&mut rng, n, density, 3)
        };
        let lat = enumerate_lattice(&g, 20).unwrap();
        let oracle = common::oracle_lattice(&g);
        assert_eq!(lat.elements(), &oracle[..], "graph {}", g.serialize());
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(5, "200 graphs vs brute-force filter", elapsed);
}

/// Criterion 6: Condition (K) agrees with brute-force simple-cycle
/// enumeration, exhaustively over all graphs on ≤ 3 vertices with
/// multiplicities in {0,1,2} plus 500 random 5-vertex graphs. Exact.
#[test]
fn acceptance_6_condition_k_oracle() {
    let start = Instant::now();
    // exhaustive: n = 1, 2, 3 with entries 0, 1, 2
    let mut exhaustive = 0usize;
    for n in 1..=3usize {
        let cells = n * n;
        let total = 3usize.pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let mut mult = vec![vec![Multiplicity::Finite(0); n]; n];
            for row in mult.iter_mut() {
                for entry in row.iter_mut() {
                    *entry = Multiplicity::Finite((c % 3) as u64);
                    c /= 3;
                }
            }
            let labels = (0..n).map(|i| format!("v{i}")).collect();
            let g = Graph::new(labels, mult).unwrap();
            assert_eq!(
                g.satisfies_condition_k(),
                common::oracle_condition_k(&g),
                "disagreement on {}",
                g.serialize()
            );
            exhaustive += 1;
        }
    }
    assert_eq!(exhaustive, 3 + 81 + 19683);
    // plus 500 random 5-vertex graphs, some with INF entries
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..500 {
        let density = rng.gen_range(0.1..0.6);
        let g = if i % 4 == 0 {
            common::random_mixed_graph(&mut rng, 5, density, 3, 0.3)
        } else {
            common::random_finite_graph(&mut rng, 5, density, 3)
        };
        assert_eq!(
            g.satisfies_condition_k(),
            common::oracle_condition_k(&g),
            "disagreement on {}",
            g.serialize()
        );
    }
    pass(6, "19767 exhaustive + 500 random graphs", start.elapsed());
}

/// Criterion 7: move-T invariance: for 100 random graphs with an INF edge
/// and a random admissible path, the canonical form of the amplified
/// transitive closure is unchanged, and compare_kwebs on the amplifications
/// returns AmplifiedIsomorphic. Exact.
#[test]
fn acceptance_7_move_t_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0usize;
    while done < 100 {
        let n = rng.gen_range(2..=5usize);
        let mut g = common::random_mixed_graph(&mut rng, n, 0.55, 3, 0.5);
        // force an INF edge to exist
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g = g.with_edge(a, b, Multiplicity::Infinite);

        // random admissible path: start at the INF edge, extend randomly
        let mut path = vec![a, b];
        for _ in 0..rng.gen_range(0..3usize) {
            let at = *path.last().unwrap();
            let next: Vec<usize> = (0..n).filter(|&w| !g.mult(at, w).is_zero()).collect();
            if next.is_empty() {
                break;
            }
            path.push(next[rng.gen_range(0..next.len())]);
        }
        let moved = move_t(&g, &path).expect("path is admissible by construction");

        let c1 = canonical_form(&amplified_transitive_closure(&g), 10).unwrap();
        let c2 = canonical_form(&amplified_transitive_closure(&moved), 10).unwrap();
        assert_eq!(c1.bits(), c2.bits(), "canonical form changed by move-T");

        let w1 = build_kweb(&amplify(&g), &Config::default()).unwrap();
        let w2 = build_kweb(&amplify(&moved), &Config::default()).unwrap();
        match compare_kwebs(&w1, &w2, &CompareOptions::default()).unwrap() {
            Verdict::AmplifiedIsomorphic { .. } => {}
            other => panic!("expected AmplifiedIsomorphic, got {other:?}"),
        }
        done += 1;
    }
    pass(7, "100 random admissible moves", start.elapsed());
}

/// All 512 amplified graphs on 3 vertices.
fn all_3vertex_amplified() -> Vec<Graph> {
    let mut out = Vec::new();
    for code in 0u32..512 {
        let mut mult = vec![vec![Multiplicity::Finite(0); 3]; 3];
        for k in 0..9 {
            if code >> k & 1 == 1 {
                mult[k / 3][k % 3] = Multiplicity::Infinite;
            }
        }
        let labels = (0..3).map(|i| format!("v{i}")).collect();
        out.push(Graph::new(labels, mult).unwrap());
    }
    out
}

fn rank_data(web: &KWeb, index_map: Option<&Vec<usize>>) -> Vec<((usize, usize), usize)> {
    web.groups()
        .iter()
        .map(|(&(a, b), kg)| {
            let key = match index_map {
                Some(m) => (m[a], m[b]),
                None => (a, b),
            };
            (key, kg.k0().free_rank())
        })
        .collect()
}

/// Criterion 8: exhaustive consistency over all 512 amplified graphs on 3
/// vertices: equal canonical forms imply equal lattice size and equal
/// per-pair free-rank data under the witness bijection; no pair may be
/// AmplifiedIsomorphic with mismatched K-web ranks. Distinct canonical forms
/// with equal coarse invariants must still leave the general comparator
/// Consistent or Distinguished (never AmplifiedIsomorphic). Zero
/// violations, < 5 min.
#[test]
fn acceptance_8_amplified_exhaustive() {
    let start = Instant::now();
    let graphs = all_3vertex_amplified();
    let cfg = Config::default();
    let webs: Vec<KWeb> = graphs
        .iter()
        .map(|g| build_kweb(g, &cfg).unwrap())
        .collect();
    let canons: Vec<u128> = graphs
        .iter()
        .map(|g| {
            canonical_form(&amplified_transitive_closure(g), 10)
                .unwrap()
                .bits()
        })
        .collect();

    // amplified law: every k0 free of rank |H2 \ H1|, k1 = 0
    for (g, web) in graphs.iter().zip(&webs) {
        let _ = g;
        for (&(a, b), kg) in web.groups() {
            let expected = web
                .lattice()
                .element(b)
                .difference(web.lattice().element(a))
                .len();
            assert_eq!(kg.k0().free_rank(), expected);
            assert!(kg.k0().torsion().is_empty());
            assert!(kg.k1().is_trivial());
        }
    }

    let mut iso_pairs = 0usize;
    let mut coarse_equal_nonisomorphic = 0usize;
    let mut general_consistent = 0usize;
    for i in 0..graphs.len() {
        for j in i + 1..graphs.len() {
            if canons[i] == canons[j] {
                iso_pairs += 1;
                let decision = are_lpa_isomorphic_amplified(&graphs[i], &graphs[j], 10).unwrap();
                let witness = decision.witness.expect("equal canonical forms");
                // induced lattice map: H -> bijection image of H
                let li = webs[i].lattice();
                let lj = webs[j].lattice();
                assert_eq!(li.len(), lj.len(), "lattice sizes differ");
                let index_map: Vec<usize> = li
                    .elements()
                    .iter()
                    .map(|e| {
                        let image: VertexSet = e.iter().map(|v| witness[v]).collect();
                        lj.index_of(image)
                            .expect("witness must map lattice to lattice")
                    })
                    .collect();
                let mut left = rank_data(&webs[i], Some(&index_map));
                let mut right = rank_data(&webs[j], None);
                left.sort_unstable();
                right.sort_unstable();
                assert_eq!(left, right, "per-pair free ranks differ under witness");
            } else {
                // coarse invariants: lattice size plus the multiset of free ranks
                let coarse = |w: &KWeb| {
                    let mut ranks: Vec<usize> =
                        w.groups().values().map(|kg| kg.k0().free_rank()).collect();
                    ranks.sort_unstable();
                    (w.lattice().len(), ranks)
                };
                if coarse(&webs[i]) == coarse(&webs[j]) {
                    coarse_equal_nonisomorphic += 1;
                    let opts = CompareOptions {
                        force_general: true,
                        ..Default::default()
                    };
                    match compare_kwebs(&webs[i], &webs[j], &opts).unwrap() {
                        Verdict::Consistent { .. } => general_consistent += 1,
                        Verdict::Distinguished { .. } => {}
                        other => panic!("general comparator returned {other:?}"),
                    }
                }
            }
        }
    }
    assert!(iso_pairs > 0, "expected some isomorphic pairs");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    pass(
        8,
        &format!(
            "512 graphs, {iso_pairs} isomorphic pairs, \
             {coarse_equal_nonisomorphic} coarse-equal non-isomorphic pairs \
             ({general_consistent} consistent under the general comparator)"
        ),
        elapsed,
    );
}

/// Criterion 9: the two-vertex graph with 3 loops at each vertex and one
/// connecting edge yields 0 → Z/2 → Z/4 → Z/2 → 0 with injective iota0 and
/// surjective pi0: a non-split extension captured by the six-term data.
#[test]
fn acceptance_9_worked_extension() {
    let start = Instant::now();
    let g = parse("vertices v w\nedge v v 3\nedge w w 3\nedge v w 1");
    let lat = enumerate_lattice(&g, 20).unwrap();
    assert_eq!(lat.len(), 3);
    let st = six_term(&g, &lat, 0, 1, 2, false).unwrap();

    assert_eq!(st.iota0.domain().torsion(), &[BigInt::from(2)]);
    assert_eq!(st.iota0.codomain().torsion(), &[BigInt::from(4)]);
    assert_eq!(st.pi0.codomain().torsion(), &[BigInt::from(2)]);
    // K1 row is zero
    assert!(st.iota1.domain().is_trivial());
    assert!(st.iota1.codomain().is_trivial());
    assert!(st.pi1.codomain().is_trivial());

    // iota0 injective: the order-2 generator maps to the order-2 element of Z/4
    let image = st.iota0.apply(&kweb_core::zmod::basis_vec(1, 0));
    assert_eq!(
        st.iota0.codomain().element_order(&image),
        Some(BigInt::from(2))
    );
    assert!(st.pi0.is_surjective());
    // non-split: the middle is Z/4, not Z/2 + Z/2
    assert_eq!(st.iota0.codomain().torsion(), &[BigInt::from(4)]);
    pass(9, "0 → Z/2 → Z/4 → Z/2 → 0 extension", start.elapsed());
}

/// Criterion 10: unit-class tracking. Relabelings of any graph compare as
/// Consistent with unit_matched = true; the 2-loop and 3-loop singletons are
/// Distinguished. Exact.
#[test]
fn acceptance_10_unit_class_tracking() {
    let start = Instant::now();
    let texts = [
        "vertices v w\nedge v v 3\nedge w w 3\nedge v w 1",
        "vertices v\nedge v v 4",
        "vertices a b c\nedge a a 2\nedge a b 1\nedge b b 3\nedge b c 1",
        "vertices v\nedge v v 1", // Condition (K) fails; comparison still exact
        "vertices a b c d\nedge a b 1\nedge b a 2\nedge c d 1\nedge a c 1",
    ];
    let cfg = Config::default();
    let opts = CompareOptions {
        require_unit: true,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for text in texts {
        let g = parse(text);
        let w1 = build_kweb(&g, &cfg).unwrap();
        for _ in 0..3 {
            let perm = common::random_permutation(&mut rng, g.n());
            let w2 = build_kweb(&g.permuted(&perm), &cfg).unwrap();
            match compare_kwebs(&w1, &w2, &opts).unwrap() {
                Verdict::Consistent { unit_matched, .. } => {
                    assert_eq!(unit_matched, Some(true), "unit not matched for {text}");
                }
                other => panic!("expected Consistent for {text}, got {other:?}"),
            }
        }
    }

    let w2loops = build_kweb(&parse("vertices v\nedge v v 2"), &cfg).unwrap();
    let w3loops = build_kweb(&parse("vertices v\nedge v v 3"), &cfg).unwrap();
    match compare_kwebs(&w2loops, &w3loops, &opts).unwrap() {
        Verdict::Distinguished { .. } => {}
        other => panic!("expected Distinguished, got {other:?}"),
    }
    pass(
        10,
        "relabelings match units; 2 vs 3 loops distinguished",
        start.elapsed(),
    );
}
