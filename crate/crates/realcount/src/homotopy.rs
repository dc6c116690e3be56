//! Total-degree homotopy continuation for square quadratic systems.
//!
//! All 2^m paths of the start system `x_i^2 - c_i = 0` are tracked along
//! `H(x,t) = gamma * t * S(x) + (1 - t) * F(x)` from t = 1 to t = 0 with a
//! first-order predictor and a Newton corrector, then endpoints are
//! refined, classified and deduplicated. Paths whose coordinates blow up
//! are classified at infinity and discarded, not compactified.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::SolveError;
use crate::polysys::{PolySystem, Polynomial};

/// Hard cap on the variable count: 2^24 paths is the practical ceiling.
pub const MAX_VARIABLES: usize = 24;

/// Retry with a fresh gamma when more than this fraction of paths fail.
const RETRY_FAILURE_RATE: f64 = 0.001;
/// Give up (unreliable result) when more than this fraction still fails.
const FATAL_FAILURE_RATE: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct TrackerConfig {
    /// Unit-modulus homotopy twist; `None` draws one from the seed.
    pub gamma: Option<Complex64>,
    pub initial_step: f64,
    pub min_step: f64,
    pub newton_tol: f64,
    pub max_corrector_iters: u32,
    pub infinity_threshold: f64,
    pub dedup_tol: f64,
    pub endpoint_refine_iters: u32,
    pub seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            gamma: None,
            initial_step: 0.05,
            min_step: 1e-8,
            newton_tol: 1e-10,
            max_corrector_iters: 5,
            infinity_threshold: 1e8,
            dedup_tol: 1e-6,
            endpoint_refine_iters: 20,
            seed: 0,
        }
    }
}

impl TrackerConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrackerConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStatus {
    FiniteNonsingular,
    AtInfinity,
    Singular,
    TrackingFailed,
}

/// One tracked path's terminal record. Paths classified at infinity carry
/// an empty point vector; the coordinates are discarded, not compactified.
#[derive(Clone, Debug)]
pub struct Endpoint {
    pub point: Vec<Complex64>,
    pub status: PathStatus,
    pub residual: f64,
    pub jacobian_condition: f64,
    pub path_index: u64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Deduplicated finite nonsingular solutions, sorted lexicographically
    /// by (re, im) coordinate pairs.
    pub distinct_solutions: Vec<Vec<Complex64>>,
    pub raw_count: u64,
    pub endpoints: Vec<Endpoint>,
    pub paths_failed: usize,
    pub config_used: TrackerConfig,
    /// The gamma of the primary run.
    pub gamma: Complex64,
}

impl SolveResult {
    /// Debug dump: one `status residual condition point...` line per endpoint.
    pub fn endpoint_dump(&self) -> String {
        let mut out = String::new();
        for e in &self.endpoints {
            let status = match e.status {
                PathStatus::FiniteNonsingular => "finite-nonsingular",
                PathStatus::AtInfinity => "at-infinity",
                PathStatus::Singular => "singular",
                PathStatus::TrackingFailed => "tracking-failed",
            };
            out.push_str(&format!("{status} {:e} {:e}", e.residual, e.jacobian_condition));
            for z in &e.point {
                out.push_str(&format!(" {:?} {:?}", z.re, z.im));
            }
            out.push('\n');
        }
        out
    }
}

/// The start system `x_i^2 - c_i = 0` with its 2^m sign-choice roots.
#[derive(Clone, Debug)]
pub struct StartSystem {
    pub gamma: Complex64,
    pub constants: Vec<Complex64>,
    roots: Vec<Complex64>,
}

impl StartSystem {
    pub fn new(gamma: Complex64, constants: Vec<Complex64>) -> Self {
        let roots = constants.iter().map(|c| c.sqrt()).collect();
        StartSystem {
            gamma,
            constants,
            roots,
        }
    }

    /// Draws gamma on the unit circle and nonzero constants with modulus
    /// near one from the config seed.
    pub fn generate(m: usize, cfg: &TrackerConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5bd1_e995);
        let gamma = cfg.gamma.unwrap_or_else(|| unit_complex(&mut rng));
        let constants = (0..m)
            .map(|_| {
                let r: f64 = rng.gen_range(0.7..1.3);
                unit_complex(&mut rng) * r
            })
            .collect();
        StartSystem::new(gamma, constants)
    }

    /// Fresh gamma and constants (automatic retry).
    fn regenerate(&self, rng: &mut ChaCha8Rng) -> Self {
        let m = self.constants.len();
        let gamma = unit_complex(rng);
        let constants = (0..m)
            .map(|_| {
                let r: f64 = rng.gen_range(0.7..1.3);
                unit_complex(rng) * r
            })
            .collect();
        StartSystem::new(gamma, constants)
    }

    pub fn path_count(&self) -> u64 {
        1u64 << self.constants.len()
    }

    /// The start root indexed by sign bitmask.
    pub fn root(&self, index: u64) -> Vec<Complex64> {
        self.roots
            .iter()
            .enumerate()
            .map(|(i, &r)| if index >> i & 1 == 1 { -r } else { r })
            .collect()
    }
}

fn unit_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::new(theta.cos(), theta.sin())
}

/// A square quadratic system compiled for fast evaluation.
struct Compiled {
    m: usize,
    // Per equation: quadratic terms (c, i, j) with i <= j, linear terms,
    // and the constant.
    quad: Vec<Vec<(Complex64, u32, u32)>>,
    lin: Vec<Vec<(Complex64, u32)>>,
    constant: Vec<Complex64>,
}

impl Compiled {
    fn from_polys(m: usize, polys: &[Polynomial]) -> Result<Self, SolveError> {
        let mut quad = Vec::with_capacity(polys.len());
        let mut lin = Vec::with_capacity(polys.len());
        let mut constant = Vec::with_capacity(polys.len());
        for p in polys {
            let mut q = Vec::new();
            let mut l = Vec::new();
            let mut k = Complex64::new(0.0, 0.0);
            for (c, exps) in p.terms() {
                let mut vars: Vec<(u32, u8)> = Vec::new();
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        vars.push((i as u32, e));
                    }
                }
                let degree: u32 = vars.iter().map(|&(_, e)| e as u32).sum();
                match degree {
                    0 => k += c,
                    1 => l.push((*c, vars[0].0)),
                    2 => {
                        if vars.len() == 1 {
                            q.push((*c, vars[0].0, vars[0].0));
                        } else {
                            q.push((*c, vars[0].0, vars[1].0));
                        }
                    }
                    d => return Err(SolveError::DegreeTooHigh { degree: d }),
                }
            }
            quad.push(q);
            lin.push(l);
            constant.push(k);
        }
        Ok(Compiled {
            m,
            quad,
            lin,
            constant,
        })
    }

    fn eval(&self, x: &[Complex64], out: &mut [Complex64]) {
        for e in 0..self.quad.len() {
            let mut acc = self.constant[e];
            for &(c, i, j) in &self.quad[e] {
                acc += c * x[i as usize] * x[j as usize];
            }
            for &(c, i) in &self.lin[e] {
                acc += c * x[i as usize];
            }
            out[e] = acc;
        }
    }

    /// Adds the Jacobian scaled by `scale` into the zeroed row-major buffer.
    fn add_jacobian(&self, x: &[Complex64], scale: Complex64, jac: &mut [Complex64]) {
        let m = self.m;
        for e in 0..self.quad.len() {
            let row = &mut jac[e * m..(e + 1) * m];
            for &(c, i, j) in &self.quad[e] {
                let sc = scale * c;
                if i == j {
                    row[i as usize] += (sc + sc) * x[i as usize];
                } else {
                    row[i as usize] += sc * x[j as usize];
                    row[j as usize] += sc * x[i as usize];
                }
            }
            for &(c, i) in &self.lin[e] {
                row[i as usize] += scale * c;
            }
        }
    }

    fn max_residual(&self, x: &[Complex64]) -> f64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.quad.len()];
        self.eval(x, &mut buf);
        buf.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// In-place LU with partial pivoting; returns the pivot magnitude extremes
/// for a cheap condition estimate, or `None` when a pivot vanishes.
fn lu_decompose(a: &mut [Complex64], m: usize, piv: &mut [usize]) -> Option<(f64, f64)> {
    let mut max_diag = 0.0f64;
    let mut min_diag = f64::INFINITY;
    for k in 0..m {
        let mut best = k;
        let mut best_norm = a[k * m + k].norm_sqr();
        for i in (k + 1)..m {
            let nrm = a[i * m + k].norm_sqr();
            if nrm > best_norm {
                best_norm = nrm;
                best = i;
            }
        }
        if best_norm == 0.0 {
            return None;
        }
        if best != k {
            for j in 0..m {
                a.swap(k * m + j, best * m + j);
            }
        }
        piv[k] = best;
        let pivot = a[k * m + k];
        let pn = pivot.norm();
        max_diag = max_diag.max(pn);
        min_diag = min_diag.min(pn);
        let inv = pivot.inv();
        for i in (k + 1)..m {
            let f = a[i * m + k] * inv;
            a[i * m + k] = f;
            if f.norm_sqr() != 0.0 {
                for j in (k + 1)..m {
                    let t = f * a[k * m + j];
                    a[i * m + j] -= t;
                }
            }
        }
    }
    Some((max_diag, min_diag))
}

/// Solves LUx = b in place using the factorization from [`lu_decompose`].
/// All row swaps are applied up front: the stored L factors refer to the
/// final row order, so interleaving swaps with the substitution would mix
/// rows that later pivots move.
fn lu_solve(a: &[Complex64], m: usize, piv: &[usize], b: &mut [Complex64]) {
    for k in 0..m {
        b.swap(k, piv[k]);
    }
    for k in 0..m {
        let bk = b[k];
        if bk.norm_sqr() != 0.0 {
            for i in (k + 1)..m {
                let t = a[i * m + k] * bk;
                b[i] -= t;
            }
        }
    }
    for k in (0..m).rev() {
        let mut acc = b[k];
        for j in (k + 1)..m {
            acc -= a[k * m + j] * b[j];
        }
        b[k] = acc / a[k * m + k];
    }
}

/// Scratch buffers reused across one path.
struct Work {
    jac: Vec<Complex64>,
    piv: Vec<usize>,
    rhs: Vec<Complex64>,
    x: Vec<Complex64>,
    xtry: Vec<Complex64>,
    /// True while `jac`/`piv` hold an LU of the homotopy Jacobian at the
    /// current accepted point, reusable by the next predictor.
    lu_valid: bool,
}

impl Work {
    fn new(m: usize) -> Self {
        Work {
            jac: vec![Complex64::new(0.0, 0.0); m * m],
            piv: vec![0; m],
            rhs: vec![Complex64::new(0.0, 0.0); m],
            x: vec![Complex64::new(0.0, 0.0); m],
            xtry: vec![Complex64::new(0.0, 0.0); m],
            lu_valid: false,
        }
    }
}

fn inf_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
}

struct Tracker<'a> {
    target: &'a Compiled,
    start: &'a StartSystem,
    cfg: &'a TrackerConfig,
}

impl<'a> Tracker<'a> {
    /// Homotopy value H(x, t) into `out`.
    fn eval_h(&self, x: &[Complex64], t: f64, out: &mut [Complex64]) {
        self.target.eval(x, out);
        let gt = self.start.gamma * t;
        let one_minus_t = Complex64::new(1.0 - t, 0.0);
        for (i, o) in out.iter_mut().enumerate() {
            let s = x[i] * x[i] - self.start.constants[i];
            *o = *o * one_minus_t + gt * s;
        }
    }

    /// Homotopy Jacobian at (x, t) into `jac` (zeroed here).
    fn jac_h(&self, x: &[Complex64], t: f64, jac: &mut [Complex64]) {
        jac.fill(Complex64::new(0.0, 0.0));
        let m = self.target.m;
        self.target
            .add_jacobian(x, Complex64::new(1.0 - t, 0.0), jac);
        let gt = self.start.gamma * t;
        for i in 0..m {
            jac[i * m + i] += (gt + gt) * x[i];
        }
    }

    /// dH/dt = gamma * S(x) - F(x) into `out`.
    fn dh_dt(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.target.eval(x, out);
        for (i, o) in out.iter_mut().enumerate() {
            let s = x[i] * x[i] - self.start.constants[i];
            *o = self.start.gamma * s - *o;
        }
    }

    /// Newton corrector for H(., t) starting from `w.xtry`; returns true on
    /// convergence (result left in `w.xtry`).
    ///
    /// Acceptance is two orders looser than `newton_tol`: staying in the
    /// path's basin does not need the final polish accuracy, and the Newton
    /// step bottoms out at `eps * cond * |x|` wherever the Jacobian
    /// condition spikes. Endpoints are polished separately.
    /// Returns the number of Newton iterations used, or None on failure.
    fn correct(&self, t: f64, max_first_step: f64, w: &mut Work) -> Option<u32> {
        let m = self.target.m;
        let track_tol = (self.cfg.newton_tol * 100.0).max(1e-9);
        let budget = self.cfg.max_corrector_iters;
        // Near-singular bands contract only linearly; grant extra
        // iterations while each one still halves the step, up to 2x the
        // configured budget.
        let hard_cap = budget.saturating_mul(2);
        let mut prev_step = f64::INFINITY;
        let mut iters = 0u32;
        loop {
            iters += 1;
            if iters > hard_cap {
                return None;
            }
            self.jac_h(&w.xtry, t, &mut w.jac);
            lu_decompose(&mut w.jac, m, &mut w.piv)?;
            self.eval_h(&w.xtry, t, &mut w.rhs);
            lu_solve(&w.jac, m, &w.piv, &mut w.rhs);
            for i in 0..m {
                w.xtry[i] -= w.rhs[i];
            }
            let step = inf_norm(&w.rhs);
            if !step.is_finite() {
                return None;
            }
            let scale = 1.0 + inf_norm(&w.xtry);
            // A first correction far larger than the predicted move means
            // the corrector is pulling towards a different sheet; reject
            // and let the step size shrink instead.
            if iters == 1 && step > max_first_step.max(4.0 * track_tol * scale) {
                return None;
            }
            if step <= track_tol * scale {
                w.lu_valid = true;
                return Some(iters);
            }
            if iters >= budget {
                if step > 0.5 * prev_step {
                    return None;
                }
            } else if step > 2.0 * prev_step {
                return None; // diverging; no point burning iterations
            }
            prev_step = step;
        }
    }

    /// Newton refinement of `w.x` against the target system; returns
    /// (residual, condition estimate).
    fn refine_endpoint(&self, w: &mut Work) -> (f64, f64) {
        let m = self.target.m;
        let mut cond = f64::INFINITY;
        let mut prev_step = f64::INFINITY;
        let mut grew = 0u32;
        for _ in 0..self.cfg.endpoint_refine_iters {
            w.jac.fill(Complex64::new(0.0, 0.0));
            self.target
                .add_jacobian(&w.x, Complex64::new(1.0, 0.0), &mut w.jac);
            let Some((mx, mn)) = lu_decompose(&mut w.jac, m, &mut w.piv) else {
                return (self.target.max_residual(&w.x), f64::INFINITY);
            };
            cond = if mn > 0.0 { mx / mn } else { f64::INFINITY };
            self.target.eval(&w.x, &mut w.rhs);
            lu_solve(&w.jac, m, &w.piv, &mut w.rhs);
            let step = inf_norm(&w.rhs);
            if !step.is_finite() {
                break;
            }
            for i in 0..m {
                w.x[i] -= w.rhs[i];
            }
            if step <= self.cfg.newton_tol * (1.0 + inf_norm(&w.x)) {
                break;
            }
            // Not contracting: this is no root, stop burning iterations.
            if step > prev_step {
                grew += 1;
                if grew >= 2 {
                    break;
                }
            } else {
                grew = 0;
            }
            prev_step = step;
        }
        (self.target.max_residual(&w.x), cond)
    }

    fn track(&self, path_index: u64, w: &mut Work) -> Endpoint {
        let root = self.start.root(path_index);
        self.track_from(path_index, &root, w)
    }

    fn track_from(&self, path_index: u64, x0: &[Complex64], w: &mut Work) -> Endpoint {
        let m = self.target.m;
        let cfg = self.cfg;
        w.x.copy_from_slice(x0);
        let mut t = 1.0f64;
        let mut h = cfg.initial_step;
        let mut streak = 0u32;
        let mut steps = 0u32;
        let max_steps = 5_000u32;
        // Below t_end the endpoint polish takes over: a regular root is
        // inside its Newton basin well before that, while paths to infinity
        // have left every bounded region or keep failing the polish.
        let t_end = 1e-6f64;
        // Reference norm after the start-system transient; sustained growth
        // against it marks a diverging path.
        let mut norm_ref = f64::INFINITY;
        // Once t crosses each of these, try finishing early: converged
        // paths return immediately instead of tracking to t_end.
        let mut early_rungs: &[f64] = &[1e-3, 1e-4, 1e-5];

        while t > t_end {
            steps += 1;
            let norm = inf_norm(&w.x);
            if !norm.is_finite() {
                return self.failed(path_index);
            }
            if t < 0.5 {
                norm_ref = norm_ref.min(norm.max(1.0));
            }
            if t < 0.1 && norm > cfg.infinity_threshold {
                return self.at_infinity(path_index);
            }
            if steps > max_steps {
                return self.finish(path_index, norm_ref, w);
            }
            if let Some((&rung, rest)) = early_rungs.split_first() {
                if t < rung {
                    early_rungs = rest;
                    let saved = w.x.clone();
                    let e = self.finish(path_index, norm_ref, w);
                    if e.status != PathStatus::TrackingFailed {
                        return e;
                    }
                    w.x = saved;
                    w.lu_valid = false;
                }
            }
            let h_eff = h.min(t - t_end);
            // First-order predictor: x += h * J^{-1} dH/dt. The corrector
            // leaves an LU of the Jacobian at (essentially) the current
            // point, which the tangent solve can reuse.
            let have_lu = w.lu_valid || {
                self.jac_h(&w.x, t, &mut w.jac);
                lu_decompose(&mut w.jac, m, &mut w.piv).is_some()
            };
            let mut moved = f64::INFINITY;
            w.xtry.copy_from_slice(&w.x);
            if have_lu {
                self.dh_dt(&w.x, &mut w.rhs);
                lu_solve(&w.jac, m, &w.piv, &mut w.rhs);
                for i in 0..m {
                    w.xtry[i] += w.rhs[i] * h_eff;
                }
                moved = h_eff * inf_norm(&w.rhs);
            }
            w.lu_valid = false;
            let t_new = t - h_eff;
            let outcome = if moved.is_finite() {
                self.correct(t_new, 0.25 * moved.max(1e-14), w)
            } else {
                None
            };
            match outcome {
                Some(_) => {
                    w.x.copy_from_slice(&w.xtry);
                    t = t_new;
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(cfg.initial_step);
                        streak = 0;
                    }
                }
                None => {
                    streak = 0;
                    h *= 0.5;
                    // The step floor is relative to t: endgame steps may be
                    // far smaller than min_step without counting as a stall.
                    if h < (cfg.min_step * t).max(1e-15) {
                        return self.finish(path_index, norm_ref, w);
                    }
                }
            }
        }
        self.finish(path_index, norm_ref, w)
    }

    fn at_infinity(&self, path_index: u64) -> Endpoint {
        Endpoint {
            point: Vec::new(),
            status: PathStatus::AtInfinity,
            residual: f64::INFINITY,
            jacobian_condition: f64::INFINITY,
            path_index,
        }
    }

    fn failed(&self, path_index: u64) -> Endpoint {
        Endpoint {
            point: Vec::new(),
            status: PathStatus::TrackingFailed,
            residual: f64::INFINITY,
            jacobian_condition: f64::INFINITY,
            path_index,
        }
    }

    /// Endpoint phase: polish against the target system and classify. The
    /// polish must stay near the tracked point; a large move means the
    /// tracker did not actually deliver the root it polished onto, so such
    /// paths never count as finite. At a generic instance every finite
    /// fiber point is regular, so a failed polish on a path with strong
    /// norm growth is a path to infinity; anything else is an honest
    /// tracking failure, which the gamma retry re-runs.
    fn finish(&self, path_index: u64, norm_ref: f64, w: &mut Work) -> Endpoint {
        let pre_norm = inf_norm(&w.x);
        if !pre_norm.is_finite() {
            return self.failed(path_index);
        }
        if pre_norm > self.cfg.infinity_threshold {
            return self.at_infinity(path_index);
        }
        let before = w.x.clone();
        let (residual, cond) = self.refine_endpoint(w);
        let moved = before
            .iter()
            .zip(&w.x)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        let stayed = moved <= 1e-2 * (1.0 + pre_norm);
        let status = if residual <= self.cfg.newton_tol * 10.0 && cond < 1e10 && stayed {
            PathStatus::FiniteNonsingular
        } else if residual <= self.cfg.newton_tol.sqrt() && cond >= 1e10 && stayed {
            PathStatus::Singular
        } else if pre_norm > 1e3 || (norm_ref.is_finite() && pre_norm >= 10.0 * norm_ref && pre_norm > 50.0)
        {
            PathStatus::AtInfinity
        } else {
            PathStatus::TrackingFailed
        };
        Endpoint {
            point: match status {
                PathStatus::FiniteNonsingular | PathStatus::Singular => w.x.clone(),
                _ => Vec::new(),
            },
            status,
            residual,
            jacobian_condition: cond,
            path_index,
        }
    }
}

/// Tracks every total-degree path of the square core of `sys`. Surplus
/// equations are not applied here; the counting layer filters with them.
pub fn solve(sys: &PolySystem, cfg: &TrackerConfig) -> Result<SolveResult, SolveError> {
    let m = sys.variables.len();
    if sys.equations.len() != m {
        return Err(SolveError::NotSquare {
            equations: sys.equations.len(),
            variables: m,
        });
    }
    if m > MAX_VARIABLES {
        return Err(SolveError::PathBudget {
            variables: m,
            max: MAX_VARIABLES,
        });
    }
    let compiled = Compiled::from_polys(m, &sys.equations)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc2b2_ae35);
    let start = StartSystem::generate(m, cfg);
    let gamma = start.gamma;
    let mut endpoints = run_all_paths(&compiled, &start, cfg);
    let mut extra_finite: Vec<Endpoint> = Vec::new();

    // One automatic retry with a fresh gamma. Endpoint sets are merged:
    // failed paths take the retry's outcome, and every finite endpoint of
    // the retry joins the dedup pool, so a root lost by one gamma is still
    // collected from the other.
    let total = endpoints.len();
    let failed = count_failed(&endpoints);
    if failed as f64 > RETRY_FAILURE_RATE * total as f64 {
        let retry_start = start.regenerate(&mut rng);
        let retry = run_all_paths(&compiled, &retry_start, cfg);
        for (e, r) in endpoints.iter_mut().zip(retry) {
            if e.status == PathStatus::TrackingFailed && r.status != PathStatus::TrackingFailed {
                *e = r;
            } else if r.status == PathStatus::FiniteNonsingular {
                extra_finite.push(r);
            }
        }
    }
    let paths_failed = count_failed(&endpoints);
    if paths_failed as f64 > FATAL_FAILURE_RATE * total as f64 {
        return Err(SolveError::Unreliable {
            failed: paths_failed,
            total,
        });
    }

    // Deduplicate finite endpoints, preferring the smallest residual as
    // cluster representative.
    let mut finite: Vec<&Endpoint> = endpoints
        .iter()
        .chain(extra_finite.iter())
        .filter(|e| e.status == PathStatus::FiniteNonsingular)
        .collect();
    finite.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut reps: Vec<Vec<Complex64>> = Vec::new();
    for e in &finite {
        if !reps
            .iter()
            .any(|r| within_tol(r, &e.point, cfg.dedup_tol))
        {
            reps.push(e.point.clone());
        }
    }
    sort_points(&mut reps);
    let raw_count = reps.len() as u64;
    debug_assert!(raw_count <= start.path_count());

    Ok(SolveResult {
        distinct_solutions: reps,
        raw_count,
        endpoints,
        paths_failed,
        config_used: cfg.clone(),
        gamma,
    })
}

fn count_failed(endpoints: &[Endpoint]) -> usize {
    endpoints
        .iter()
        .filter(|e| e.status == PathStatus::TrackingFailed)
        .count()
}

fn run_all_paths(compiled: &Compiled, start: &StartSystem, cfg: &TrackerConfig) -> Vec<Endpoint> {
    let tracker = Tracker {
        target: compiled,
        start,
        cfg,
    };
    let total = start.path_count();
    (0..total)
        .into_par_iter()
        .map_init(
            || Work::new(compiled.m),
            |w, idx| tracker.track(idx, w),
        )
        .collect()
}

/// Relative closeness: inf-norm distance below `tol * max(1, |a|, |b|)`.
fn within_tol(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let scale = 1.0f64.max(inf_norm(a)).max(inf_norm(b));
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).norm() <= tol * scale)
}

fn sort_points(points: &mut [Vec<Complex64>]) {
    points.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Tracks a single path of `sys` from `start_point`, which must be a root
/// of `start`. Exposed for diagnostics and tests; [`solve`] runs all paths.
pub fn track_path(
    start: &StartSystem,
    start_point: &[Complex64],
    sys: &PolySystem,
    cfg: &TrackerConfig,
) -> Result<Endpoint, SolveError> {
    let m = sys.variables.len();
    if sys.equations.len() != m {
        return Err(SolveError::NotSquare {
            equations: sys.equations.len(),
            variables: m,
        });
    }
    let compiled = Compiled::from_polys(m, &sys.equations)?;
    let tracker = Tracker {
        target: &compiled,
        start,
        cfg,
    };
    // Locate the sign pattern matching the given start point (for the
    // path_index bookkeeping only), then track from the point itself.
    let mut index = 0u64;
    for (i, (p, r)) in start_point.iter().zip(&start.roots).enumerate() {
        if (p + r).norm() < (p - r).norm() {
            index |= 1 << i;
        }
    }
    Ok(tracker.track_from(index, start_point, &mut Work::new(m)))
}

/// Greedy clustering by relative distance; representatives are returned in
/// lexicographic (re, im) order.
pub fn dedup(points: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        for (x, y) in points[a].iter().zip(points[b].iter()) {
            match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut reps: Vec<Vec<Complex64>> = Vec::new();
    for &i in &order {
        if !reps.iter().any(|r| within_tol(r, &points[i], tol)) {
            reps.push(points[i].clone());
        }
    }
    reps
}
