//! Pinned complex polynomial systems whose finite solutions are the fibers
//! counted by the realisation numbers: the Euclidean squared-edge-length
//! system on the triangularly pinned coordinate space, the spherical system
//! with one vertex pinned to (1,0,...,0), and the cone-at-infinity variant.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::SystemError;
use crate::graph::Graph;
use crate::rigidity::{independent_spanning_rigid_subgraph, target_rigid_rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Euclidean,
    Spherical,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Euclidean => write!(f, "euclidean"),
            Model::Spherical => write!(f, "spherical"),
        }
    }
}

/// Everything needed to instantiate one fiber-counting problem: the graph,
/// dimension, model, pin sequence, and the sampled edge values.
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub graph: Graph,
    pub d: u32,
    pub model: Model,
    /// Pin sequence `v_1, ..., v_d` (distinct vertices).
    pub pin_vertices: Vec<u32>,
    /// Edge values, keyed by `(u, v)` with `u < v`. In both models
    /// `lambda_vw = (1/2) * ||p_v - p_w||^2`.
    pub lambda: BTreeMap<(u32, u32), Complex64>,
    pub seed: u64,
    /// The sampled realisation that generated `lambda`, for audit. Points
    /// have `d` coordinates in the Euclidean model, `d + 1` in the
    /// spherical model.
    pub source_realisation: Option<Vec<Vec<f64>>>,
}

impl InstanceSpec {
    /// Builds an instance from explicit edge values.
    pub fn from_lambda(
        graph: Graph,
        d: u32,
        model: Model,
        pin_vertices: Vec<u32>,
        lambda: BTreeMap<(u32, u32), Complex64>,
        seed: u64,
    ) -> Result<Self, SystemError> {
        validate_pins(&graph, d, &pin_vertices)?;
        if lambda.len() != graph.edge_count()
            || !graph.edges().iter().all(|e| lambda.contains_key(e))
        {
            return Err(SystemError::LambdaMismatch);
        }
        Ok(InstanceSpec {
            graph,
            d,
            model,
            pin_vertices,
            lambda,
            seed,
            source_realisation: None,
        })
    }

    /// The audit format: seed, model, d, pin list, then one
    /// `u v re im` line per edge.
    pub fn audit_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed {}\n", self.seed));
        out.push_str(&format!("model {}\n", self.model));
        out.push_str(&format!("d {}\n", self.d));
        let pins: Vec<String> = self.pin_vertices.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("pins {}\n", pins.join(" ")));
        for (&(u, v), z) in &self.lambda {
            out.push_str(&format!("{u} {v} {:?} {:?}\n", z.re, z.im));
        }
        out
    }
}

fn validate_pins(graph: &Graph, d: u32, pins: &[u32]) -> Result<(), SystemError> {
    let n = graph.vertex_count();
    let mut sorted = pins.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if pins.len() != d as usize || sorted.len() != d as usize {
        return Err(SystemError::BadPins { d });
    }
    if pins.iter().any(|&v| v < 1 || v > n) {
        return Err(SystemError::BadPins { d });
    }
    Ok(())
}

/// Default pin sequence: the vertices `1..=d`, re-ordered so that
/// `v_1 v_2` is an edge when some pair inside `{1..d}` is adjacent.
pub fn default_pins(graph: &Graph, d: u32) -> Vec<u32> {
    let mut pins: Vec<u32> = (1..=d).collect();
    if d >= 2 {
        'outer: for i in 1..=d {
            for j in (i + 1)..=d {
                if graph.has_edge(i, j) {
                    pins.retain(|&v| v != i && v != j);
                    pins.insert(0, j);
                    pins.insert(0, i);
                    break 'outer;
                }
            }
        }
    }
    pins
}

/// Samples a generic instance. Euclidean coordinates are uniform in
/// [-1, 1] with an extra perturbation of magnitude ~1e-3; spherical points
/// are normalised (d+1)-dimensional Gaussians on the real unit sphere. The
/// instance is realisable by construction, so the fiber is nonempty.
pub fn sample_instance(graph: &Graph, d: u32, model: Model, seed: u64) -> InstanceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.vertex_count() as usize;
    let pins = default_pins(graph, d);
    let (points, lambda): (Vec<Vec<f64>>, BTreeMap<(u32, u32), Complex64>) = match model {
        Model::Euclidean => {
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..d as usize)
                        .map(|_| rng.gen_range(-1.0..1.0) + 1e-3 * rng.gen_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let lam = graph
                .edges()
                .iter()
                .map(|&(u, v)| {
                    let (pu, pv) = (&pts[u as usize - 1], &pts[v as usize - 1]);
                    let s: f64 = pu.iter().zip(pv).map(|(a, b)| (a - b) * (a - b)).sum();
                    ((u, v), Complex64::new(0.5 * s, 0.0))
                })
                .collect();
            (pts, lam)
        }
        Model::Spherical => {
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut p: Vec<f64> = (0..=d as usize).map(|_| gaussian(&mut rng)).collect();
                    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    p.iter_mut().for_each(|x| *x /= norm);
                    p
                })
                .collect();
            let lam = graph
                .edges()
                .iter()
                .map(|&(u, v)| {
                    let (pu, pv) = (&pts[u as usize - 1], &pts[v as usize - 1]);
                    let dot: f64 = pu.iter().zip(pv).map(|(a, b)| a * b).sum();
                    ((u, v), Complex64::new(1.0 - dot, 0.0))
                })
                .collect();
            (pts, lam)
        }
    };
    InstanceSpec {
        graph: graph.clone(),
        d,
        model,
        pin_vertices: pins,
        lambda,
        seed,
        source_realisation: Some(points),
    }
}

/// Box-Muller standard normal.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A sparse polynomial: a sum of complex-coefficient monomials, each with a
/// dense exponent vector over the system's variables.
#[derive(Clone, Debug)]
pub struct Polynomial {
    terms: Vec<(Complex64, Vec<u8>)>,
    nvars: usize,
}

impl Polynomial {
    /// Normalises: merges duplicate exponent vectors, drops zero
    /// coefficients, checks uniform exponent length.
    pub fn new(nvars: usize, raw: Vec<(Complex64, Vec<u8>)>) -> Self {
        let mut map: HashMap<Vec<u8>, Complex64> = HashMap::new();
        for (c, e) in raw {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            *map.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut terms: Vec<(Complex64, Vec<u8>)> = map
            .into_iter()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(e, c)| (c, e))
            .collect();
        terms.sort_by(|a, b| b.1.cmp(&a.1));
        Polynomial { terms, nvars }
    }

    pub fn terms(&self) -> &[(Complex64, Vec<u8>)] {
        &self.terms
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t *= x[i];
                }
            }
            acc += t;
        }
        acc
    }
}

/// A square core system plus surplus filter equations and the pin values
/// that were substituted away.
#[derive(Clone, Debug)]
pub struct PolySystem {
    /// Unpinned coordinates, as `(vertex, coordinate-index)` pairs
    /// (1-based on both components), vertex-major.
    pub variables: Vec<(u32, u32)>,
    /// The square core: as many equations as variables, all of degree <= 2.
    pub equations: Vec<Polynomial>,
    /// Extra edge equations, applied only as filters on solved points.
    pub surplus: Vec<Polynomial>,
    /// Coordinates fixed by the pinning, with their values.
    pub pin_values: BTreeMap<(u32, u32), Complex64>,
}

impl PolySystem {
    /// Maximum absolute equation value over core and surplus.
    pub fn residual(&self, point: &[Complex64]) -> Result<f64, SystemError> {
        if point.len() != self.variables.len() {
            return Err(SystemError::ArityMismatch {
                expected: self.variables.len(),
                got: point.len(),
            });
        }
        let mut worst = 0.0f64;
        for eq in self.equations.iter().chain(self.surplus.iter()) {
            worst = worst.max(eq.eval(point).norm());
        }
        Ok(worst)
    }

    /// Maximum absolute value over the surplus equations only.
    pub fn surplus_residual(&self, point: &[Complex64]) -> f64 {
        self.surplus
            .iter()
            .map(|eq| eq.eval(point).norm())
            .fold(0.0, f64::max)
    }
}

/// Either a variable index or a pinned constant.
#[derive(Clone, Copy)]
enum Atom {
    Var(usize),
    Const(Complex64),
}

struct SystemBuilder {
    nvars: usize,
    var_of: HashMap<(u32, u32), usize>,
    pin_values: BTreeMap<(u32, u32), Complex64>,
}

impl SystemBuilder {
    /// Variables = all (vertex, coord) pairs not pinned, vertex-major.
    fn new(n: u32, coords: u32, pins: &BTreeMap<(u32, u32), Complex64>) -> (Self, Vec<(u32, u32)>) {
        let mut variables = Vec::new();
        let mut var_of = HashMap::new();
        for v in 1..=n {
            for j in 1..=coords {
                if !pins.contains_key(&(v, j)) {
                    var_of.insert((v, j), variables.len());
                    variables.push((v, j));
                }
            }
        }
        (
            SystemBuilder {
                nvars: variables.len(),
                var_of,
                pin_values: pins.clone(),
            },
            variables,
        )
    }

    fn atom(&self, v: u32, j: u32) -> Atom {
        match self.var_of.get(&(v, j)) {
            Some(&i) => Atom::Var(i),
            None => Atom::Const(self.pin_values[&(v, j)]),
        }
    }

    fn monomial(&self, vars: &[usize]) -> Vec<u8> {
        let mut e = vec![0u8; self.nvars];
        for &v in vars {
            e[v] += 1;
        }
        e
    }

    /// coeff * a * b as raw terms.
    fn product(&self, coeff: f64, a: Atom, b: Atom, out: &mut Vec<(Complex64, Vec<u8>)>) {
        let c = Complex64::new(coeff, 0.0);
        match (a, b) {
            (Atom::Var(i), Atom::Var(j)) => out.push((c, self.monomial(&[i, j]))),
            (Atom::Var(i), Atom::Const(k)) | (Atom::Const(k), Atom::Var(i)) => {
                out.push((c * k, self.monomial(&[i])))
            }
            (Atom::Const(k1), Atom::Const(k2)) => out.push((c * k1 * k2, self.monomial(&[]))),
        }
    }

    /// (1/2) * ||p_u - p_v||^2 - lambda over coordinates `1..=coords`.
    fn edge_equation(&self, u: u32, v: u32, coords: u32, lambda: Complex64) -> Polynomial {
        let mut raw = Vec::new();
        for j in 1..=coords {
            let (a, b) = (self.atom(u, j), self.atom(v, j));
            self.product(0.5, a, a, &mut raw);
            self.product(-1.0, a, b, &mut raw);
            self.product(0.5, b, b, &mut raw);
        }
        raw.push((-lambda, self.monomial(&[])));
        Polynomial::new(self.nvars, raw)
    }

    /// ||p_v||^2 - 1 over coordinates `1..=coords`.
    fn sphere_equation(&self, v: u32, coords: u32) -> Polynomial {
        let mut raw = Vec::new();
        for j in 1..=coords {
            let a = self.atom(v, j);
            self.product(1.0, a, a, &mut raw);
        }
        raw.push((Complex64::new(-1.0, 0.0), self.monomial(&[])));
        Polynomial::new(self.nvars, raw)
    }

    /// (1 - p_u . p_v) - lambda over coordinates `1..=coords`.
    fn dot_edge_equation(&self, u: u32, v: u32, coords: u32, lambda: Complex64) -> Polynomial {
        let mut raw = Vec::new();
        for j in 1..=coords {
            self.product(-1.0, self.atom(u, j), self.atom(v, j), &mut raw);
        }
        raw.push((Complex64::new(1.0, 0.0) - lambda, self.monomial(&[])));
        Polynomial::new(self.nvars, raw)
    }

    /// (r/2) * ||p_v||^2 - [p_v]_{last} - h over coordinates `1..=coords`.
    fn height_equation(&self, v: u32, coords: u32, r: Complex64, h: Complex64) -> Polynomial {
        let mut raw = Vec::new();
        for j in 1..=coords {
            let a = self.atom(v, j);
            match a {
                Atom::Var(i) => raw.push((0.5 * r, self.monomial(&[i, i]))),
                Atom::Const(k) => raw.push((0.5 * r * k * k, self.monomial(&[]))),
            }
        }
        match self.atom(v, coords) {
            Atom::Var(i) => raw.push((Complex64::new(-1.0, 0.0), self.monomial(&[i]))),
            Atom::Const(k) => raw.push((-k, self.monomial(&[]))),
        }
        raw.push((-h, self.monomial(&[])));
        Polynomial::new(self.nvars, raw)
    }
}

/// Splits the edge set into a d-independent core of the right cardinality
/// and a surplus remainder. All edges are core for a minimally d-rigid
/// graph.
fn core_surplus_split(
    graph: &Graph,
    d: u32,
    seed: u64,
) -> Result<(Vec<(u32, u32)>, Vec<(u32, u32)>), SystemError> {
    let target = target_rigid_rank(graph.vertex_count(), d);
    if graph.edge_count() == target {
        return Ok((graph.edges().to_vec(), Vec::new()));
    }
    let core = independent_spanning_rigid_subgraph(graph, d, seed)?;
    let surplus = graph
        .edges()
        .iter()
        .copied()
        .filter(|e| !core.contains(e))
        .collect();
    Ok((core, surplus))
}

/// The Euclidean pinned system: coordinate `j` of pin vertex `v_k` is fixed
/// to zero for `j >= k`, leaving `d*n - C(d+1,2)` variables; the core holds
/// one squared-edge-length equation per d-independent edge.
pub fn euclidean_system(inst: &InstanceSpec) -> Result<PolySystem, SystemError> {
    if inst.model != Model::Euclidean {
        return Err(SystemError::ModelMismatch);
    }
    let d = inst.d;
    let n = inst.graph.vertex_count();
    if n < d + 1 {
        return Err(SystemError::TooFewVertices { needed: d + 1, got: n });
    }
    validate_pins(&inst.graph, d, &inst.pin_vertices)?;
    let mut pins = BTreeMap::new();
    for (k, &v) in inst.pin_vertices.iter().enumerate() {
        for j in (k as u32 + 1)..=d {
            pins.insert((v, j), Complex64::new(0.0, 0.0));
        }
    }
    let (builder, variables) = SystemBuilder::new(n, d, &pins);
    let (core, surplus_edges) = core_surplus_split(&inst.graph, d, inst.seed)?;
    let equations: Vec<Polynomial> = core
        .iter()
        .map(|&(u, v)| builder.edge_equation(u, v, d, inst.lambda[&(u, v)]))
        .collect();
    let surplus: Vec<Polynomial> = surplus_edges
        .iter()
        .map(|&(u, v)| builder.edge_equation(u, v, d, inst.lambda[&(u, v)]))
        .collect();
    debug_assert_eq!(equations.len(), variables.len());
    Ok(PolySystem {
        variables,
        equations,
        surplus,
        pin_values: pins,
    })
}

/// The spherical pinned system: `v_1` is fixed to `(1, 0, ..., 0)`,
/// coordinate `j` of `v_k` is zero for `j >= k + 1`, and every vertex other
/// than `v_1` carries a unit-sphere equation.
pub fn spherical_system(inst: &InstanceSpec) -> Result<PolySystem, SystemError> {
    if inst.model != Model::Spherical {
        return Err(SystemError::ModelMismatch);
    }
    let d = inst.d;
    let n = inst.graph.vertex_count();
    if n < d + 1 {
        return Err(SystemError::TooFewVertices { needed: d + 1, got: n });
    }
    validate_pins(&inst.graph, d, &inst.pin_vertices)?;
    let coords = d + 1;
    let mut pins = BTreeMap::new();
    for (k0, &v) in inst.pin_vertices.iter().enumerate() {
        let k = k0 as u32 + 1;
        if k == 1 {
            pins.insert((v, 1), Complex64::new(1.0, 0.0));
        }
        for j in (k + 1)..=coords {
            pins.insert((v, j), Complex64::new(0.0, 0.0));
        }
    }
    let (builder, variables) = SystemBuilder::new(n, coords, &pins);
    let (core, surplus_edges) = core_surplus_split(&inst.graph, d, inst.seed)?;
    let v1 = inst.pin_vertices[0];
    let mut equations: Vec<Polynomial> = (1..=n)
        .filter(|&v| v != v1)
        .map(|v| builder.sphere_equation(v, coords))
        .collect();
    equations.extend(
        core.iter()
            .map(|&(u, v)| builder.dot_edge_equation(u, v, coords, inst.lambda[&(u, v)])),
    );
    let surplus: Vec<Polynomial> = surplus_edges
        .iter()
        .map(|&(u, v)| builder.dot_edge_equation(u, v, coords, inst.lambda[&(u, v)]))
        .collect();
    debug_assert_eq!(equations.len(), variables.len());
    Ok(PolySystem {
        variables,
        equations,
        surplus,
        pin_values: pins,
    })
}

/// The cone-at-infinity system over `Z_{G,d+1}`: edge equations one
/// dimension up plus height equations `(r/2)||p_v||^2 - [p_v]_{d+1} - h_v`
/// for every vertex except `v_1`. At `r = 0` with a flat lambda it
/// degenerates to the Euclidean d-system.
pub fn cone_at_infinity_system(
    graph: &Graph,
    d: u32,
    lambda: &BTreeMap<(u32, u32), Complex64>,
    h_values: &BTreeMap<u32, Complex64>,
    r: Complex64,
) -> Result<PolySystem, SystemError> {
    let n = graph.vertex_count();
    if n < d + 1 {
        return Err(SystemError::TooFewVertices { needed: d + 1, got: n });
    }
    if lambda.len() != graph.edge_count() || !graph.edges().iter().all(|e| lambda.contains_key(e)) {
        return Err(SystemError::LambdaMismatch);
    }
    let pins_seq = default_pins(graph, d);
    let coords = d + 1;
    let mut pins = BTreeMap::new();
    for (k0, &v) in pins_seq.iter().enumerate() {
        let k = k0 as u32 + 1;
        for j in k..=d {
            pins.insert((v, j), Complex64::new(0.0, 0.0));
        }
    }
    pins.insert((pins_seq[0], coords), Complex64::new(0.0, 0.0));
    let (builder, variables) = SystemBuilder::new(n, coords, &pins);
    let (core, surplus_edges) = core_surplus_split(graph, d, 0)?;
    let v1 = pins_seq[0];
    let mut equations: Vec<Polynomial> = core
        .iter()
        .map(|&(u, v)| builder.edge_equation(u, v, coords, lambda[&(u, v)]))
        .collect();
    for v in 1..=n {
        if v == v1 {
            continue;
        }
        let h = h_values.get(&v).copied().unwrap_or(Complex64::new(0.0, 0.0));
        equations.push(builder.height_equation(v, coords, r, h));
    }
    let surplus: Vec<Polynomial> = surplus_edges
        .iter()
        .map(|&(u, v)| builder.edge_equation(u, v, coords, lambda[&(u, v)]))
        .collect();
    debug_assert_eq!(equations.len(), variables.len());
    Ok(PolySystem {
        variables,
        equations,
        surplus,
        pin_values: pins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::three_prism;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sample_k2_lambda() {
        // K_2 with p = (0), (1): lambda = 1/2.
        let g = Graph::complete(2);
        let mut lambda = BTreeMap::new();
        lambda.insert((1, 2), c(0.5));
        let inst = InstanceSpec::from_lambda(g, 1, Model::Euclidean, vec![1], lambda, 0).unwrap();
        let sys = euclidean_system(&inst).unwrap();
        assert_eq!(sys.variables, vec![(2, 1)]);
        assert_eq!(sys.equations.len(), 1);
        // x = 1 and x = -1 both solve (1/2) x^2 = 1/2.
        assert!(sys.residual(&[c(1.0)]).unwrap() < 1e-12);
        assert!(sys.residual(&[c(-1.0)]).unwrap() < 1e-12);
        assert!(sys.residual(&[c(2.0)]).unwrap() > 1.0);
    }

    #[test]
    fn equilateral_triangle_lambda() {
        let g = Graph::complete(3);
        let inst = sample_instance(&g, 2, Model::Euclidean, 5);
        // Sampled lambda comes from a real realisation, so every value is
        // real and nonnegative.
        for z in inst.lambda.values() {
            assert_eq!(z.im, 0.0);
            assert!(z.re >= 0.0);
        }
        let p = inst.source_realisation.as_ref().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].len(), 2);
    }

    #[test]
    fn spherical_sample_on_unit_sphere() {
        let g = three_prism();
        let inst = sample_instance(&g, 2, Model::Spherical, 9);
        for p in inst.source_realisation.as_ref().unwrap() {
            let norm: f64 = p.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // Antipodal points give lambda = 2; aligned points give 0; sampled
        // values must lie in between.
        for z in inst.lambda.values() {
            assert!(z.re > 0.0 && z.re < 2.0);
        }
    }

    #[test]
    fn prism_system_shapes() {
        let g = three_prism();
        let inst = sample_instance(&g, 2, Model::Euclidean, 1);
        let sys = euclidean_system(&inst).unwrap();
        assert_eq!(sys.variables.len(), 9);
        assert_eq!(sys.equations.len(), 9);
        assert_eq!(sys.surplus.len(), 0);
        assert!(sys.equations.iter().all(|e| e.total_degree() == 2));

        let inst = sample_instance(&g, 2, Model::Spherical, 1);
        let sys = spherical_system(&inst).unwrap();
        assert_eq!(sys.variables.len(), 14);
        assert_eq!(sys.equations.len(), 14);
        assert_eq!(sys.surplus.len(), 0);
    }

    #[test]
    fn k4_overdetermined_split() {
        let g = Graph::complete(4);
        let inst = sample_instance(&g, 2, Model::Euclidean, 2);
        let sys = euclidean_system(&inst).unwrap();
        assert_eq!(sys.variables.len(), 5);
        assert_eq!(sys.equations.len(), 5);
        assert_eq!(sys.surplus.len(), 1);
    }

    #[test]
    fn k3_spherical_d1_split() {
        // K_3 is not 1-independent: the core is a spanning tree, one edge
        // becomes surplus.
        let g = Graph::complete(3);
        let inst = sample_instance(&g, 1, Model::Spherical, 3);
        let sys = spherical_system(&inst).unwrap();
        assert_eq!(sys.variables.len(), 4);
        assert_eq!(sys.equations.len(), 4); // 2 sphere + 2 tree edges
        assert_eq!(sys.surplus.len(), 1);
    }

    #[test]
    fn k4_spherical_d3_is_square_without_surplus() {
        // K_4 is minimally 3-rigid: 9 variables, 3 sphere + 6 edge
        // equations, no surplus.
        let g = Graph::complete(4);
        let inst = sample_instance(&g, 3, Model::Spherical, 4);
        let sys = spherical_system(&inst).unwrap();
        assert_eq!(sys.variables.len(), 9);
        assert_eq!(sys.equations.len(), 9);
        assert_eq!(sys.surplus.len(), 0);
    }

    #[test]
    fn pin_counting_formulae() {
        for (g, d) in [
            (three_prism(), 2u32),
            (Graph::complete(4), 2),
            (Graph::complete(4), 3),
            (Graph::complete(5), 3),
            (three_prism().cone(), 3),
        ] {
            let n = g.vertex_count() as usize;
            let dd = d as usize;
            let inst = sample_instance(&g, d, Model::Euclidean, 17);
            let sys = euclidean_system(&inst).unwrap();
            assert_eq!(sys.variables.len(), dd * n - dd * (dd + 1) / 2);
            assert_eq!(sys.equations.len(), sys.variables.len());

            let inst = sample_instance(&g, d, Model::Spherical, 17);
            let sys = spherical_system(&inst).unwrap();
            assert_eq!(
                sys.variables.len(),
                (dd + 1) * n - (dd + 1) - dd * (dd - 1) / 2
            );
            assert_eq!(sys.equations.len(), sys.variables.len());
        }
    }

    #[test]
    fn residual_examples() {
        // Unit sphere equation at the origin evaluates to 1.
        let g = Graph::complete(2);
        let inst = sample_instance(&g, 1, Model::Spherical, 1);
        let sys = spherical_system(&inst).unwrap();
        let zeros = vec![c(0.0); sys.variables.len()];
        // The sphere equation for v_2 contributes exactly |-1| = 1; edge
        // equations contribute |1 - lambda|.
        let r = sys.residual(&zeros).unwrap();
        assert!(r >= 1.0 - 1e-12);
        assert!(sys.residual(&[c(0.0)]).is_err());
    }

    #[test]
    fn default_pin_reordering() {
        // Prism: no edge inside {1,2}, pins stay (1,2).
        assert_eq!(default_pins(&three_prism(), 2), vec![1, 2]);
        // Prism cone in d=3: 2-3 is an edge, so it leads.
        assert_eq!(default_pins(&three_prism(), 3), vec![2, 3, 1]);
        // K_4: 1-2 is an edge.
        assert_eq!(default_pins(&Graph::complete(4), 2), vec![1, 2]);
    }

    #[test]
    fn audit_format() {
        let g = Graph::complete(2);
        let mut lambda = BTreeMap::new();
        lambda.insert((1, 2), c(0.5));
        let inst = InstanceSpec::from_lambda(g, 1, Model::Euclidean, vec![1], lambda, 42).unwrap();
        let text = inst.audit_text();
        assert!(text.starts_with("seed 42\nmodel euclidean\nd 1\npins 1\n"));
        assert!(text.contains("1 2 0.5 0.0"));
    }

    #[test]
    fn cone_at_infinity_shape() {
        let g = three_prism();
        let inst = sample_instance(&g, 2, Model::Euclidean, 8);
        // Flat lambda, h = 0, r = 0.
        let sys = cone_at_infinity_system(
            &g,
            2,
            &inst.lambda,
            &BTreeMap::new(),
            c(0.0),
        )
        .unwrap();
        // (d+1)n - C(d+1,2) - 1 = 18 - 3 - 1 = 14 variables; 9 edges + 5
        // height equations.
        assert_eq!(sys.variables.len(), 14);
        assert_eq!(sys.equations.len(), 14);
    }
}
