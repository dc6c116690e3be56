//! Cross-validates the three routes to c_1 on every connected graph with
//! up to 5 vertices: the biconnected-component formula, an exact integer
//! enumeration of the line fiber, and the homotopy solver on the same
//! edge values.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use realcount::codec::canonical_form;
use realcount::counting::{c1, count_by_solve, CountOptions, CountValue};
use realcount::graph::Graph;
use realcount::homotopy::{solve, TrackerConfig};
use realcount::polysys::{euclidean_system, InstanceSpec, Model};

/// All connected graphs on 1..=max_n vertices, one per isomorphism class.
fn connected_graphs(max_n: u32) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(u32, u32)> = (1..=n)
            .flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)))
            .collect();
        let mut seen = HashSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(n, edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let canon = canonical_form(&g).unwrap();
            if seen.insert(canon) {
                out.push(g);
            }
        }
    }
    out
}

/// Exact fiber size of the pinned d=1 system at integer edge lengths:
/// sign assignments over a spanning tree, checked on the chords.
fn line_fiber_oracle(g: &Graph, coords: &[i64]) -> usize {
    let n = g.vertex_count() as usize;
    let adj = g.adjacency();
    // BFS tree from vertex 1.
    let mut parent = vec![0u32; n + 1];
    let mut order = vec![1u32];
    let mut seen = vec![false; n + 1];
    seen[1] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &adj[u as usize] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                parent[v as usize] = u;
                order.push(v);
            }
        }
    }
    assert_eq!(order.len(), n, "oracle needs a connected graph");
    let delta = |u: u32, v: u32| (coords[u as usize - 1] - coords[v as usize - 1]).abs();
    let tree_edges: Vec<(u32, u32)> = order[1..].iter().map(|&v| (parent[v as usize], v)).collect();
    let chords: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            !tree_edges
                .iter()
                .any(|&(a, b)| (a.min(b), a.max(b)) == (u, v))
        })
        .collect();
    let mut solutions: HashSet<Vec<i64>> = HashSet::new();
    for signs in 0u32..(1 << tree_edges.len()) {
        let mut x = vec![0i64; n + 1];
        for (i, &(p, v)) in tree_edges.iter().enumerate() {
            let d = delta(p, v);
            x[v as usize] = x[p as usize] + if signs >> i & 1 == 1 { -d } else { d };
        }
        let consistent = chords.iter().all(|&(u, v)| {
            let diff = (x[u as usize] - x[v as usize]).abs();
            diff == delta(u, v)
        });
        if consistent {
            solutions.insert(x[1..].to_vec());
        }
    }
    solutions.len()
}

#[test]
fn c1_three_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1);
    let mut checked = 0;
    for g in connected_graphs(5) {
        if g.vertex_count() < 2 {
            continue;
        }
        // Distinct integer coordinates keep the fiber free of accidental
        // coincidences with overwhelming likelihood.
        let coords: Vec<i64> = (0..g.vertex_count())
            .map(|_| rng.gen_range(-1_000_000..=1_000_000))
            .collect();
        let oracle = line_fiber_oracle(&g, &coords);

        let formula = match c1(&g) {
            CountValue::Finite(k) => k,
            CountValue::Infinite => panic!("connected graph reported infinite"),
        };
        assert_eq!(
            oracle as u64,
            2 * formula,
            "oracle fiber vs 2 * 2^(k-1) on {g:?}"
        );

        // The homotopy route on exactly the same edge values.
        let lambda: BTreeMap<(u32, u32), Complex64> = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                let d = (coords[u as usize - 1] - coords[v as usize - 1]) as f64 / 1e6;
                ((u, v), Complex64::new(0.5 * d * d, 0.0))
            })
            .collect();
        let inst =
            InstanceSpec::from_lambda(g.clone(), 1, Model::Euclidean, vec![1], lambda, 1).unwrap();
        let sys = euclidean_system(&inst).unwrap();
        let res = solve(&sys, &TrackerConfig::with_seed(5)).unwrap();
        let kept = realcount::counting::surplus_filter(&sys, &res, 1e-6);
        assert_eq!(
            kept.len(),
            oracle,
            "homotopy fiber vs oracle on {g:?}"
        );
        checked += 1;
    }
    // 1 + 2 + 6 + 21 connected classes on 2..=5 vertices.
    assert_eq!(checked, 30);
}

#[test]
fn spherical_c1_equals_euclidean_c1() {
    let opts = CountOptions {
        trials: 1,
        ..CountOptions::with_seed(2)
    };
    for g in connected_graphs(4) {
        let e = realcount::counting::realisation_count(&g, 1, Model::Euclidean, &opts).unwrap();
        let s = realcount::counting::realisation_count(&g, 1, Model::Spherical, &opts).unwrap();
        assert_eq!(e.value, s.value, "c*_1 = c_1 on {g:?}");
        // And a direct spherical d=1 solve agrees with the formula.
        if g.vertex_count() >= 2 {
            let direct = count_by_solve(&g, 1, Model::Spherical, &opts).unwrap();
            assert_eq!(direct.value, c1(&g), "direct spherical d=1 on {g:?}");
        }
    }
}
