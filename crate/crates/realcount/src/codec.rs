//! Integer codes for graphs: the bits of the code are the strict upper
//! triangle of the adjacency matrix read row-wise (`a_12 a_13 .. a_1n a_23 ..`),
//! most significant bit first, so e.g. the triangle is `(1,1,1)_2 = 7`.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::GraphError;
use crate::graph::Graph;

/// Maximum vertex count for the brute-force canonical form.
pub const CANONICAL_MAX_N: u32 = 10;

/// An adjacency-code integer, optionally carrying an explicit vertex count.
///
/// Without `n_hint` the vertex count resolves to the minimal `n` with
/// `C(n,2) >= bit-length(value)`; the hint allows graphs whose high-index
/// rows are all zero (e.g. trailing isolated vertices after relabelling).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphCode {
    pub value: BigUint,
    pub n_hint: Option<u32>,
}

impl GraphCode {
    pub fn new(value: BigUint) -> Self {
        GraphCode { value, n_hint: None }
    }

    pub fn with_hint(value: BigUint, n: u32) -> Self {
        GraphCode {
            value,
            n_hint: Some(n),
        }
    }

    /// Parses a decimal string, as used in CSV files and on the CLI.
    pub fn parse(s: &str) -> Result<Self, GraphError> {
        let value = s
            .trim()
            .parse::<BigUint>()
            .map_err(|_| GraphError::InvalidCode(format!("not a decimal integer: {s:?}")))?;
        Ok(GraphCode::new(value))
    }

    /// The vertex count this code resolves to.
    pub fn resolved_n(&self) -> Result<u32, GraphError> {
        let bits = self.value.bits();
        match self.n_hint {
            Some(n) => {
                if pairs(n) < bits {
                    Err(GraphError::InvalidCode(format!(
                        "n_hint {n} gives only {} bit positions for a {bits}-bit code",
                        pairs(n)
                    )))
                } else {
                    Ok(n)
                }
            }
            None => Ok(minimal_n(bits)),
        }
    }
}

impl std::fmt::Display for GraphCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn pairs(n: u32) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

fn minimal_n(bits: u64) -> u32 {
    let mut n = 1u32;
    while pairs(n) < bits {
        n += 1;
    }
    n
}

/// Row-wise index of the pair `(i, j)` (1-based, `i < j`) in the strict
/// upper triangle of an `n x n` matrix.
fn pair_index(i: u32, j: u32, n: u32) -> u64 {
    debug_assert!(1 <= i && i < j && j <= n);
    let i = i as u64;
    let j = j as u64;
    let n = n as u64;
    // Pairs in rows before i, plus the offset within row i.
    (i - 1) * n - i * (i - 1) / 2 + (j - i - 1)
}

/// Decodes a code into a graph. Bit 1 at row-wise position `(i, j)` means
/// the edge `ij` is present; the bit string is the code value left-padded
/// with zeros to `C(n,2)` binary digits.
pub fn decode_graph(code: &GraphCode) -> Result<Graph, GraphError> {
    let n = code.resolved_n()?;
    let total = pairs(n);
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let idx = pair_index(i, j, n);
            // Position from the most significant end; LSB is the last pair.
            let bit_pos = total - 1 - idx;
            if code.value.bit(bit_pos) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Encodes a graph under its current labelling. The returned code carries
/// the vertex count as a hint so that trailing isolated vertices survive a
/// round trip.
pub fn encode_graph(g: &Graph) -> GraphCode {
    let n = g.vertex_count();
    let total = pairs(n);
    let mut value = BigUint::zero();
    for &(u, v) in g.edges() {
        let bit_pos = total - 1 - pair_index(u, v, n);
        value.set_bit(bit_pos, true);
    }
    GraphCode::with_hint(value, n)
}

/// Encodes a graph on up to 10 vertices as a plain `u64` (`C(10,2) = 45`
/// bits). Used by the canonical form and by the enumerator.
fn encode_u64(n: u32, edges: &[(u32, u32)], perm: &[u32]) -> u64 {
    let total = pairs(n);
    let mut value = 0u64;
    for &(u, v) in edges {
        let (a, b) = (perm[u as usize], perm[v as usize]);
        let (a, b) = (a.min(b), a.max(b));
        value |= 1 << (total - 1 - pair_index(a, b, n));
    }
    value
}

/// Minimal encode value over all vertex relabellings, by brute force over
/// permutations. Capped at `n <= 10`.
pub fn canonical_form(g: &Graph) -> Result<GraphCode, GraphError> {
    let n = g.vertex_count();
    if n > CANONICAL_MAX_N {
        return Err(GraphError::Capacity {
            n,
            max: CANONICAL_MAX_N,
        });
    }
    if n <= 1 {
        return Ok(GraphCode::with_hint(BigUint::zero(), n));
    }
    let mut best = u64::MAX;
    let mut perm: Vec<u32> = (0..=n).collect(); // perm[v] = new label of v
    permute_all(&mut perm, 1, &mut |p| {
        let code = encode_u64(n, g.edges(), p);
        if code < best {
            best = code;
        }
    });
    Ok(GraphCode::with_hint(BigUint::from(best), n))
}

/// Calls `f` with every permutation of `perm[start..]` (Heap-style recursion).
fn permute_all<F: FnMut(&[u32])>(perm: &mut Vec<u32>, start: usize, f: &mut F) {
    if start == perm.len() {
        f(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permute_all(perm, start + 1, f);
        perm.swap(start, i);
    }
}

/// All relabellings of a labelled edge set as `u64` codes, together with the
/// minimum (the canonical code). Used by the enumerator to mark off whole
/// isomorphism orbits at once.
pub(crate) fn orbit_codes(n: u32, edges: &[(u32, u32)]) -> (u64, Vec<u64>) {
    let mut best = u64::MAX;
    let mut orbit = Vec::new();
    let mut perm: Vec<u32> = (0..=n).collect();
    permute_all(&mut perm, 1, &mut |p| {
        let code = encode_u64(n, edges, p);
        orbit.push(code);
        if code < best {
            best = code;
        }
    });
    (best, orbit)
}
