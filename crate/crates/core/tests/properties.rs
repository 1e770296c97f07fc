use std::sync::Arc;

use pebbling::cert::{covering_bound, lp_relaxation_bound, CertificateBundle};
use pebbling::heuristic::random_strategy;
use pebbling::oracle::{is_solvable, rooted_pebbling_number};
use pebbling::strategy::{symmetric_mirror, validate_strategy, TreeStrategy};
use pebbling::{catalog, Configuration, DyadicRational, Graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected graph on `n` vertices: a random tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|v| (0..v).boxed()).collect();
            (Just(n), parents, prop::collection::vec(any::<bool>(), n * n))
        })
        .prop_map(|(n, parents, extra)| {
            let labels: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            for a in 0..n {
                for b in a + 1..n {
                    if extra[a * n + b] && extra[b * n + a] {
                        edges.push((a, b));
                    }
                }
            }
            Graph::new("rand", &labels, edges.iter().map(|&(a, b)| (&labels[a], &labels[b]))).unwrap()
        })
}

proptest! {
    #[test]
    fn distance_is_a_metric(g in connected_graph(9)) {
        let n = g.len();
        let d: Vec<Vec<usize>> = (0..n).map(|u| g.distances_from(u).unwrap()).collect();
        for u in 0..n {
            prop_assert_eq!(d[u][u], 0);
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                prop_assert_eq!(d[u][v] == 1, g.has_edge(u, v));
                for w in 0..n {
                    prop_assert!(d[u][w] <= d[u][v] + d[v][w]);
                }
            }
        }
    }

    #[test]
    fn product_counts_and_distances(g in connected_graph(5), h in connected_graph(5)) {
        let p = g.cartesian_product(&h);
        prop_assert_eq!(p.len(), g.len() * h.len());
        prop_assert_eq!(p.edge_count(), g.len() * h.edge_count() + g.edge_count() * h.len());
        // Row-major order: vertex (a,b) has index a * |H| + b.
        for a in 0..g.len() {
            for b in 0..h.len() {
                let dist = p.distances_from(a * h.len() + b).unwrap();
                for c in 0..g.len() {
                    for e in 0..h.len() {
                        prop_assert_eq!(dist[c * h.len() + e], g.dist(a, c).unwrap() + h.dist(b, e).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn bidirect_round_trip(g in connected_graph(9)) {
        let arcs = g.bidirect();
        prop_assert_eq!(arcs.arc_count(), 2 * g.edge_count());
        let mut back: Vec<(usize, usize)> = arcs.arcs.iter().filter(|(a, b)| a < b).copied().collect();
        back.sort_unstable();
        let mut edges = g.edges().to_vec();
        edges.sort_unstable();
        prop_assert_eq!(back, edges);
        for &(a, b) in &arcs.arcs {
            prop_assert!(arcs.arcs.contains(&(b, a)));
        }
        let indeg: usize = (0..g.len()).map(|v| arcs.incoming(v).count()).sum();
        prop_assert_eq!(indeg, arcs.arc_count());
    }

    #[test]
    fn solvability_is_monotone(g in connected_graph(6), counts in prop::collection::vec(0u32..5, 6), extra in 0usize..6, root in 0usize..6) {
        let n = g.len();
        let root = root % n;
        let c = Configuration::from_counts(counts[..n].to_vec());
        let mut bigger = c.clone();
        bigger.set(extra % n, c.get(extra % n) + 1);
        if is_solvable(&g, root, &c).unwrap() {
            prop_assert!(is_solvable(&g, root, &bigger).unwrap());
        }
    }

    #[test]
    fn bounds_sandwich_the_pebbling_number(g in connected_graph(6), root in 0usize..6, seed in any::<u64>(), t in 1usize..4) {
        let g = Arc::new(g);
        let root = root % g.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut strategies: Vec<TreeStrategy> = (0..t).map(|_| random_strategy(g.clone(), root, &mut rng).unwrap()).collect();
        // Add a full-depth strategy so every vertex is covered.
        let (t, ell) = (1, g.len() as u32);
        let p = pebbling::milp::ModelParams::new(t, ell, pebbling::milp::Variant::Ts).unwrap();
        strategies.extend(pebbling::heuristic::heuristic_generate(g.clone(), root, p, seed).unwrap().strategies().iter().cloned());
        let bundle = CertificateBundle::new(g.clone(), root, strategies).unwrap();
        let cov = covering_bound(&bundle).unwrap().bound;
        let lp = lp_relaxation_bound(&bundle).unwrap().bound;
        let pi = rooted_pebbling_number(&g, root).unwrap() as u64;
        prop_assert!(pi <= lp, "pi {} lp {}", pi, lp);
        prop_assert!(lp <= cov, "lp {} covering {}", lp, cov);
    }

    #[test]
    fn mirror_is_an_involution_preserving_validity(seed in any::<u64>(), perturb in any::<bool>(), key in prop::sample::select(vec!["lemke", "path_3", "cycle_4"])) {
        let g = Arc::new(catalog(&format!("{key}_square")).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let root = (seed % g.len() as u64) as usize;
        let mut s = random_strategy(g.clone(), root, &mut rng).unwrap();
        if perturb {
            // Scaling one weight up may break doubling; the verdict must still match.
            let arcs: Vec<(usize, usize, DyadicRational)> = s.arcs().iter().map(|&(p, c, w)| (p, c, w.clone())).collect();
            let k = (seed as usize / 7) % arcs.len();
            let edges = arcs.iter().enumerate().map(|(i, (p, c, w))| (*p, *c, if i == k { w.mul_int(3) } else { w.clone() }));
            s = TreeStrategy::from_edges(g.clone(), root, edges).unwrap();
        }
        let m = symmetric_mirror(&s).unwrap();
        prop_assert_eq!(symmetric_mirror(&m).unwrap(), s.clone());
        prop_assert_eq!(validate_strategy(&m).is_ok(), validate_strategy(&s).is_ok());
        prop_assert_eq!(m.total_weight(), s.total_weight());
    }
}
