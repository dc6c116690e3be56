//! Generic rigidity: rigidity matrices, randomized exact rank tests,
//! rigidity/independence decisions, greedy independent spanning subgraphs,
//! the (2,3) pebble game and enumeration of small minimally 2-rigid graphs.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::codec::{orbit_codes, GraphCode};
use crate::error::RigidityError;
use crate::graph::Graph;
use crate::linalg::{rank_f64, rank_int};

/// Coordinate range for randomized integer realisations.
const COORD_RANGE: i64 = 1_000_000;

/// Default number of random rank trials; the maximum over trials is kept,
/// since a non-generic sample can only underestimate the rank.
pub const DEFAULT_RANK_TRIALS: u32 = 3;

/// A real realisation: vertex `v` (1-based) sits at `coords[v - 1]`,
/// a point of dimension `d`.
#[derive(Clone, Debug)]
pub struct RealisationReal {
    pub d: u32,
    pub coords: Vec<Vec<f64>>,
}

impl RealisationReal {
    pub fn new(d: u32, coords: Vec<Vec<f64>>) -> Self {
        assert!(coords.iter().all(|p| p.len() == d as usize));
        RealisationReal { d, coords }
    }
}

/// Result of a randomized generic-rank computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub target_rigid_rank: usize,
    pub trials: u32,
    pub d: u32,
}

impl RankReport {
    pub fn is_rigid_rank(&self) -> bool {
        self.rank == self.target_rigid_rank
    }
}

/// `d*n - C(d+1,2)` for `n >= d+1`, else `C(n,2)`: the rank a generic
/// realisation of a rigid graph attains.
pub fn target_rigid_rank(n: u32, d: u32) -> usize {
    if n >= d + 1 {
        (d as usize) * (n as usize) - ((d as usize) * (d as usize + 1)) / 2
    } else {
        (n as usize) * (n as usize - 1) / 2
    }
}

/// The `|E| x d*n` rigidity matrix: the row of edge `vw` carries
/// `p_v - p_w` in the block of `v` and `p_w - p_v` in the block of `w`.
pub fn rigidity_matrix(g: &Graph, p: &RealisationReal) -> Vec<Vec<f64>> {
    assert_eq!(
        p.coords.len(),
        g.vertex_count() as usize,
        "realisation must cover all vertices"
    );
    let d = p.d as usize;
    let n = g.vertex_count() as usize;
    let mut m = vec![vec![0.0; d * n]; g.edge_count()];
    for (row, &(u, v)) in g.edges().iter().enumerate() {
        let (ui, vi) = (u as usize - 1, v as usize - 1);
        for j in 0..d {
            let diff = p.coords[ui][j] - p.coords[vi][j];
            m[row][ui * d + j] = diff;
            m[row][vi * d + j] = -diff;
        }
    }
    m
}

/// Rigidity matrix over the rationals, for exact rank identities.
pub fn rigidity_matrix_rational(g: &Graph, p: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let d = p[0].len();
    let n = g.vertex_count() as usize;
    let zero = BigRational::from(BigInt::from(0));
    let mut m = vec![vec![zero; d * n]; g.edge_count()];
    for (row, &(u, v)) in g.edges().iter().enumerate() {
        let (ui, vi) = (u as usize - 1, v as usize - 1);
        for j in 0..d {
            let diff = &p[ui][j] - &p[vi][j];
            m[row][ui * d + j] = diff.clone();
            m[row][vi * d + j] = -diff;
        }
    }
    m
}

/// The ambient spherical Jacobian rows stacked over the sphere-constraint
/// rows, over the rationals. The rank of the spherical map restricted to
/// the tangent space is the rank of this stack minus the vertex count.
pub fn spherical_jacobian_stack_rational(
    g: &Graph,
    q: &[Vec<BigRational>],
) -> Vec<Vec<BigRational>> {
    let coords = q[0].len();
    let n = g.vertex_count() as usize;
    let zero = BigRational::from(BigInt::from(0));
    let mut stacked: Vec<Vec<BigRational>> = Vec::new();
    for &(u, v) in g.edges() {
        let (ui, vi) = (u as usize - 1, v as usize - 1);
        let mut row = vec![zero.clone(); coords * n];
        for j in 0..coords {
            row[ui * coords + j] = -q[vi][j].clone();
            row[vi * coords + j] = -q[ui][j].clone();
        }
        stacked.push(row);
    }
    for (vi, qv) in q.iter().enumerate() {
        let mut row = vec![zero.clone(); coords * n];
        for (j, x) in qv.iter().enumerate() {
            row[vi * coords + j] = x.clone();
        }
        stacked.push(row);
    }
    stacked
}

/// Integer rigidity matrix for exact rank computations.
fn rigidity_matrix_int(g: &Graph, coords: &[Vec<i64>], d: usize) -> Vec<Vec<BigInt>> {
    let n = g.vertex_count() as usize;
    let mut m = vec![vec![BigInt::from(0); d * n]; g.edge_count()];
    for (row, &(u, v)) in g.edges().iter().enumerate() {
        let (ui, vi) = (u as usize - 1, v as usize - 1);
        for j in 0..d {
            let diff = coords[ui][j] - coords[vi][j];
            m[row][ui * d + j] = BigInt::from(diff);
            m[row][vi * d + j] = BigInt::from(-diff);
        }
    }
    m
}

fn random_int_coords(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-COORD_RANGE..=COORD_RANGE)).collect())
        .collect()
}

/// Exact generic rank: the maximum rigidity-matrix rank over `trials`
/// random integer realisations, computed fraction-free over the integers.
pub fn generic_rank(g: &Graph, d: u32, trials: u32, seed: u64) -> RankReport {
    assert!(trials >= 1);
    let n = g.vertex_count();
    let mut best = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(t as u64 + 1)));
        let coords = random_int_coords(&mut rng, n as usize, d as usize);
        let rank = rank_int(rigidity_matrix_int(g, &coords, d as usize));
        best = best.max(rank);
        if best == target_rigid_rank(n, d).min(g.edge_count()) {
            break; // cannot grow further
        }
    }
    RankReport {
        rank: best,
        target_rigid_rank: target_rigid_rank(n, d),
        trials,
        d,
    }
}

/// Floating-point pre-filter version of [`generic_rank`] (threshold 1e-9
/// relative to the largest entry). The exact mode is authoritative.
pub fn generic_rank_float(g: &Graph, d: u32, trials: u32, seed: u64) -> RankReport {
    assert!(trials >= 1);
    let n = g.vertex_count();
    let mut best = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(t as u64 + 1)));
        let coords: Vec<Vec<f64>> = random_int_coords(&mut rng, n as usize, d as usize)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x as f64).collect())
            .collect();
        let p = RealisationReal::new(d, coords);
        best = best.max(rank_f64(rigidity_matrix(g, &p), 1e-9));
    }
    RankReport {
        rank: best,
        target_rigid_rank: target_rigid_rank(n, d),
        trials,
        d,
    }
}

/// Generic rigidity test: either `n <= d` and the graph is complete, or the
/// generic rank reaches `d*n - C(d+1,2)`.
pub fn is_d_rigid(g: &Graph, d: u32) -> bool {
    if g.vertex_count() <= d {
        return g.is_complete();
    }
    generic_rank(g, d, DEFAULT_RANK_TRIALS, 0xD1CE).is_rigid_rank()
}

/// Generic independence: rank equals the edge count.
pub fn is_d_independent(g: &Graph, d: u32) -> bool {
    generic_rank(g, d, DEFAULT_RANK_TRIALS, 0xD1CE).rank == g.edge_count()
}

pub fn is_minimally_d_rigid(g: &Graph, d: u32) -> bool {
    if g.vertex_count() <= d {
        return g.is_complete();
    }
    let report = generic_rank(g, d, DEFAULT_RANK_TRIALS, 0xD1CE);
    report.is_rigid_rank() && report.rank == g.edge_count()
}

/// Greedy d-independent spanning subgraph of a d-rigid graph: edges are
/// added while they increase the exact rank, stopping at the rigid target.
/// The remaining edges form the surplus set.
pub fn independent_spanning_rigid_subgraph(
    g: &Graph,
    d: u32,
    seed: u64,
) -> Result<Vec<(u32, u32)>, RigidityError> {
    if !is_d_rigid(g, d) {
        return Err(RigidityError::NotRigid { d });
    }
    let n = g.vertex_count() as usize;
    let target = target_rigid_rank(g.vertex_count(), d);
    // Up to three attempts with fresh coordinates; a non-generic sample can
    // only under-count, which shows up as a short subgraph.
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (attempt.wrapping_mul(0xA5A5_5A5A)));
        let coords = random_int_coords(&mut rng, n, d as usize);
        let mut chosen: Vec<(u32, u32)> = Vec::new();
        let mut rank = 0usize;
        for &(u, v) in g.edges() {
            if rank == target {
                break;
            }
            chosen.push((u, v));
            let sub = Graph::new(g.vertex_count(), chosen.iter().copied()).unwrap();
            let new_rank = rank_int(rigidity_matrix_int(&sub, &coords, d as usize));
            if new_rank > rank {
                rank = new_rank;
            } else {
                chosen.pop();
            }
        }
        if rank == target {
            return Ok(chosen);
        }
    }
    Err(RigidityError::NotRigid { d })
}

/// Classification of a graph under (2,3)-sparsity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sparsity {
    /// (2,3)-tight: minimally 2-rigid (Laman).
    Tight,
    /// Every subgraph satisfies the sparsity count but |E| < 2n - 3.
    SparseNotTight,
    /// Some subgraph violates the count.
    NotSparse,
}

/// The (2,3) pebble game. Each vertex starts with two pebbles; inserting an
/// edge requires four pebbles on its endpoints and consumes one.
pub fn pebble_game_2_3(g: &Graph) -> Sparsity {
    let n = g.vertex_count() as usize;
    let mut pebbles = vec![2u8; n + 1];
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n + 1]; // directed edges
    for &(u, v) in g.edges() {
        while (pebbles[u as usize] + pebbles[v as usize]) < 4 {
            if !pull_pebble(&mut out, &mut pebbles, u, v) && !pull_pebble(&mut out, &mut pebbles, v, u) {
                break;
            }
        }
        if pebbles[u as usize] + pebbles[v as usize] < 4 {
            return Sparsity::NotSparse;
        }
        pebbles[u as usize] -= 1;
        out[u as usize].push(v);
    }
    if g.edge_count() == 2 * n - 3 {
        Sparsity::Tight
    } else {
        Sparsity::SparseNotTight
    }
}

/// DFS for a free pebble reachable from `root` (never taking one from
/// `root` or `other`); reverses the path to move the pebble to `root`.
fn pull_pebble(out: &mut [Vec<u32>], pebbles: &mut [u8], root: u32, other: u32) -> bool {
    let n = out.len();
    let mut seen = vec![false; n];
    let mut parent: Vec<u32> = vec![0; n];
    let mut stack = vec![root];
    seen[root as usize] = true;
    seen[other as usize] = true; // pebbles on `other` are reserved for the edge
    while let Some(u) = stack.pop() {
        for i in 0..out[u as usize].len() {
            let w = out[u as usize][i];
            if seen[w as usize] {
                continue;
            }
            seen[w as usize] = true;
            parent[w as usize] = u;
            if pebbles[w as usize] > 0 {
                // Reverse the path root -> ... -> w.
                pebbles[w as usize] -= 1;
                pebbles[root as usize] += 1;
                let mut cur = w;
                while cur != root {
                    let p = parent[cur as usize];
                    let pos = out[p as usize].iter().position(|&x| x == cur).unwrap();
                    out[p as usize].swap_remove(pos);
                    out[cur as usize].push(p);
                    cur = p;
                }
                return true;
            }
            stack.push(w);
        }
    }
    false
}

/// Enumeration cap: all `C(C(n,2), 2n-3)` edge subsets are filtered, which
/// is only a desk-scale computation for `n <= 7`.
pub const ENUMERATE_MAX_N: u32 = 7;

/// All isomorphism classes of minimally 2-rigid graphs on `n` vertices with
/// minimum degree at least `min_degree`, as sorted canonical codes.
pub fn enumerate_min_rigid(n: u32, d: u32, min_degree: u32) -> Result<Vec<GraphCode>, RigidityError> {
    if d != 2 {
        return Err(RigidityError::UnsupportedDimension { d, supported: 2 });
    }
    if n > ENUMERATE_MAX_N {
        return Err(RigidityError::Capacity {
            n,
            max: ENUMERATE_MAX_N,
        });
    }
    if n < 2 {
        return Ok(Vec::new()); // 2n - 3 < 1 edge: nothing to enumerate
    }
    let pair_count = (n * (n - 1) / 2) as usize;
    let target_edges = (2 * n - 3) as usize;
    let pairs: Vec<(u32, u32)> = (1..=n)
        .flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)))
        .collect();

    let mut seen: HashSet<u64> = HashSet::new();
    let mut classes: Vec<u64> = Vec::new();

    // Gosper's hack over bitmasks with popcount = target_edges.
    let limit: u64 = 1u64 << pair_count;
    let mut mask: u64 = (1u64 << target_edges) - 1;
    while mask < limit {
        if admit_subset(&pairs, mask, n, min_degree) {
            let edges: Vec<(u32, u32)> = (0..pair_count)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            let g = Graph::new(n, edges.iter().copied()).unwrap();
            if pebble_game_2_3(&g) == Sparsity::Tight {
                let labelled = labelled_code(&pairs, mask, pair_count);
                if !seen.contains(&labelled) {
                    let (canonical, orbit) = orbit_codes(n, &edges);
                    seen.extend(orbit);
                    classes.push(canonical);
                }
            }
        }
        // Next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    classes.sort_unstable();
    Ok(classes
        .into_iter()
        .map(|v| GraphCode::with_hint(v.into(), n))
        .collect())
}

/// Quick degree filter on a subset mask.
fn admit_subset(pairs: &[(u32, u32)], mask: u64, n: u32, min_degree: u32) -> bool {
    let mut deg = [0u8; 16];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
    }
    (1..=n as usize).all(|v| deg[v] as u32 >= min_degree)
}

/// The labelled u64 code of a subset mask (bit i of the mask is pair i in
/// row-wise order, which is bit `C(n,2)-1-i` of the code).
fn labelled_code(pairs: &[(u32, u32)], mask: u64, pair_count: usize) -> u64 {
    let mut code = 0u64;
    for i in 0..pair_count {
        if mask >> i & 1 == 1 {
            code |= 1 << (pair_count - 1 - i);
        }
    }
    let _ = pairs;
    code
}
