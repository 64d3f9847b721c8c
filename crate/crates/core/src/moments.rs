//! Exact combinatorial engine for the trace-moment method.
//!
//! The k-th moment of the empirical spectral distribution of a symmetric
//! random matrix is a normalized sum of expectations
//! `E[X(i_1,i_2) X(i_2,i_3) ... X(i_k,i_1)]` over all index tuples. Each
//! tuple induces a closed walk, hence a multigraph on its distinct
//! indices; the walk's edge multiplicities determine the expectation
//! under any of the entry-correlation models implemented here. This
//! module classifies tuples, counts the tree-like leading class, and
//! evaluates exact finite-N expected trace moments by exhaustive
//! enumeration (desk scale: at most 1e8 tuples).

use crate::curie_weiss::{exact_joint_moment, CwParams};
use crate::error::{Error, Result};
use crate::sampling::ScalarDist;
use rayon::prelude::*;

/// Maximum walk length supported by the fixed-size edge accumulator.
pub const MAX_WALK: usize = 16;

const ENUMERATION_CAP: f64 = 1e8;

/// `C_l = binom(2l, l) / (l + 1)`, exactly.
pub fn catalan(l: u32) -> u128 {
    let mut c: u128 = 1;
    for n in 0..l as u128 {
        // C_{n+1} = C_n * 2(2n+1) / (n+2); the product is exactly divisible
        c = c
            .checked_mul(2 * (2 * n + 1))
            .expect("catalan overflow")
            / (n + 2);
    }
    c
}

/// Edge multiset of a closed walk: unordered pairs (loops allowed) with
/// multiplicities summing to the walk length.
#[derive(Clone, Debug, Default)]
pub struct EdgeMultiset {
    edges: Vec<(usize, usize, u32)>, // (min, max, multiplicity)
}

impl EdgeMultiset {
    /// Build from the cyclic edge sequence `{i_1,i_2}, ..., {i_k,i_1}`.
    pub fn from_walk(walk: &[usize]) -> Self {
        let mut edges: Vec<(usize, usize, u32)> = Vec::with_capacity(walk.len());
        for step in 0..walk.len() {
            let a = walk[step];
            let b = walk[(step + 1) % walk.len()];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            match edges.iter_mut().find(|(x, y, _)| *x == lo && *y == hi) {
                Some(e) => e.2 += 1,
                None => edges.push((lo, hi, 1)),
            }
        }
        EdgeMultiset { edges }
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.edges
            .iter()
            .find(|(x, y, _)| *x == lo && *y == hi)
            .map(|e| e.2)
            .unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.edges.iter().map(|e| e.2 as usize).sum()
    }

    /// Connectivity of the underlying simple graph (always true for a
    /// closed walk; exposed so the property can be checked).
    pub fn is_connected(&self) -> bool {
        let mut vertices: Vec<usize> = Vec::new();
        for &(a, b, _) in &self.edges {
            if !vertices.contains(&a) {
                vertices.push(a);
            }
            if !vertices.contains(&b) {
                vertices.push(b);
            }
        }
        if vertices.is_empty() {
            return true;
        }
        let mut reached = vec![false; vertices.len()];
        reached[0] = true;
        let mut frontier = vec![vertices[0]];
        while let Some(v) = frontier.pop() {
            for &(a, b, _) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                let idx = vertices.iter().position(|&u| u == other).unwrap();
                if !reached[idx] {
                    reached[idx] = true;
                    frontier.push(other);
                }
            }
        }
        reached.iter().all(|&r| r)
    }
}

/// Classification of an index tuple by its walk multigraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleClass {
    /// Number of distinct indices (vertices).
    pub distinct_vertices: usize,
    /// Number of edges traversed exactly once.
    pub single_edges: usize,
    /// Every edge has multiplicity exactly two.
    pub all_double: bool,
    /// Tree-like leading class: `all_double` and `vertices = 1 + k/2`.
    pub in_ik: bool,
}

/// Fixed-capacity edge accumulator for the enumeration hot path.
#[derive(Clone)]
struct EdgeAccum {
    items: [(u32, u32, u32); MAX_WALK],
    len: usize,
}

impl EdgeAccum {
    fn new() -> Self {
        EdgeAccum {
            items: [(0, 0, 0); MAX_WALK],
            len: 0,
        }
    }

    #[inline(always)]
    fn load(&mut self, walk: &[u32]) {
        self.len = 0;
        for step in 0..walk.len() {
            let a = walk[step];
            let b = walk[if step + 1 == walk.len() { 0 } else { step + 1 }];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let mut found = false;
            for item in self.items[..self.len].iter_mut() {
                if item.0 == lo && item.1 == hi {
                    item.2 += 1;
                    found = true;
                    break;
                }
            }
            if !found {
                self.items[self.len] = (lo, hi, 1);
                self.len += 1;
            }
        }
    }

    #[inline(always)]
    fn edges(&self) -> &[(u32, u32, u32)] {
        &self.items[..self.len]
    }
}

#[inline(always)]
fn distinct_count(walk: &[u32]) -> usize {
    let mut seen = [0u32; MAX_WALK];
    let mut n = 0;
    'outer: for &v in walk {
        for &s in &seen[..n] {
            if s == v {
                continue 'outer;
            }
        }
        seen[n] = v;
        n += 1;
    }
    n
}

fn classify_impl(walk: &[u32], accum: &mut EdgeAccum) -> TupleClass {
    let k = walk.len();
    accum.load(walk);
    let mut single_edges = 0;
    let mut all_double = true;
    for &(_, _, mult) in accum.edges() {
        if mult == 1 {
            single_edges += 1;
        }
        if mult != 2 {
            all_double = false;
        }
    }
    let distinct_vertices = distinct_count(walk);
    let in_ik = k % 2 == 0 && all_double && distinct_vertices == 1 + k / 2;
    TupleClass {
        distinct_vertices,
        single_edges,
        all_double,
        in_ik,
    }
}

/// Classify an index tuple by its closed-walk multigraph.
pub fn classify(walk: &[usize]) -> TupleClass {
    assert!(
        walk.len() <= MAX_WALK && !walk.is_empty(),
        "walk length must lie in 1..={MAX_WALK}"
    );
    let w: Vec<u32> = walk.iter().map(|&i| i as u32).collect();
    classify_impl(&w, &mut EdgeAccum::new())
}

fn check_cap(n: usize, k: usize) -> Result<()> {
    if k > MAX_WALK {
        return Err(Error::ResourceCap(format!(
            "walk length {k} exceeds the supported maximum {MAX_WALK}"
        )));
    }
    if (n as f64).powi(k as i32) > ENUMERATION_CAP {
        return Err(Error::ResourceCap(format!(
            "enumeration over {n}^{k} tuples exceeds the {ENUMERATION_CAP:.0} budget"
        )));
    }
    Ok(())
}

/// Sum `f` over all `n^k` index tuples, partitioned across workers by the
/// leading index and combined by a pairwise tree reduction so the result
/// does not depend on scheduling.
fn enumerate_sum<F>(n: usize, k: usize, f: F) -> f64
where
    F: Fn(&[u32], &mut EdgeAccum) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut walk = vec![0u32; k];
            walk[0] = first as u32;
            let mut accum = EdgeAccum::new();
            let mut sum = 0.0;
            loop {
                sum += f(&walk, &mut accum);
                let mut pos = k - 1;
                loop {
                    if pos == 0 {
                        return sum;
                    }
                    walk[pos] += 1;
                    if (walk[pos] as usize) < n {
                        break;
                    }
                    walk[pos] = 0;
                    pos -= 1;
                }
            }
        })
        .collect();
    pairwise_sum(&partials)
}

/// Pairwise tree reduction.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Count, by exhaustive enumeration, the tuples in the tree-like leading
/// class (every edge doubled, `1 + k/2` distinct indices).
pub fn count_ik(n: usize, k: usize) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("count_ik requires n >= 1 and k >= 1".into()));
    }
    check_cap(n, k)?;
    let total = enumerate_sum(n, k, |walk, accum| {
        if classify_impl(walk, accum).in_ik {
            1.0
        } else {
            0.0
        }
    });
    Ok(total.round() as u64)
}

/// Closed form for the same count: `C_{k/2} * n (n-1) ... (n - k/2)`
/// (zero for odd `k` or when the falling factorial runs out).
pub fn count_ik_closed_form(n: usize, k: usize) -> u128 {
    if k % 2 == 1 {
        return 0;
    }
    let mut product: u128 = catalan(k as u32 / 2);
    for t in 0..=(k / 2) {
        if t >= n {
            return 0;
        }
        product *= (n - t) as u128;
    }
    product
}

/// Entry-correlation models for the expected trace moment.
#[derive(Clone, Debug)]
pub enum CorrelationModel {
    /// Independent centered unit-variance entries with the given law.
    IidCentered(ScalarDist),
    /// Entries are distinct spins of one Curie-Weiss configuration on
    /// `N^2` sites.
    FullCw { beta: f64 },
    /// Entries are i.i.d. signs with bias `tau`, mixed over atoms
    /// `(weight, tau)`.
    ExchangeableSpin { atoms: Vec<(f64, f64)> },
    /// One independent draw per diagonal, constant along it (random
    /// Toeplitz): entries at the same `|i-j|` are the same variable.
    ToeplitzDiagonal(ScalarDist),
    /// Independent entries inside a band of half-width `b`, identically
    /// zero outside; normalized by the band width `2b+1` instead of `N`.
    BandedIid {
        dist: ScalarDist,
        half_width: usize,
        periodic: bool,
    },
}

impl CorrelationModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationModel::IidCentered(d) => {
                d.validate()?;
                if d.mean() != 0.0 || d.variance() != 1.0 {
                    return Err(Error::Config(
                        "iid model requires a centered unit-variance entry law".into(),
                    ));
                }
                Ok(())
            }
            CorrelationModel::FullCw { beta } => {
                if *beta >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config("beta must be >= 0".into()))
                }
            }
            CorrelationModel::ExchangeableSpin { atoms } => {
                let total: f64 = atoms.iter().map(|(w, _)| w).sum();
                if atoms.is_empty() || (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Config("atom weights must sum to 1".into()));
                }
                if atoms.iter().any(|&(_, t)| !(-1.0..=1.0).contains(&t)) {
                    return Err(Error::Config("atom biases must lie in [-1, 1]".into()));
                }
                Ok(())
            }
            CorrelationModel::ToeplitzDiagonal(d) => d.validate(),
            CorrelationModel::BandedIid { dist, .. } => dist.validate(),
        }
    }

    /// Per-entry normalization: `1/sqrt(N)` except for the band model,
    /// which is normalized by its band width.
    fn entry_scale(&self, n: usize) -> f64 {
        match self {
            CorrelationModel::BandedIid { half_width, .. } => {
                1.0 / ((2 * half_width + 1) as f64).sqrt()
            }
            _ => 1.0 / (n as f64).sqrt(),
        }
    }

    /// Exact `E[X(i_1,i_2) ... X(i_k,i_1)]` for one tuple.
    pub fn expected_product(&self, walk: &[usize], n: usize) -> Result<f64> {
        self.validate()?;
        if walk.is_empty() || walk.len() > MAX_WALK {
            return Err(Error::Domain(format!(
                "walk length must lie in 1..={MAX_WALK}"
            )));
        }
        if walk.iter().any(|&i| i >= n) {
            return Err(Error::Domain("tuple index out of range".into()));
        }
        let ctx = ModelCtx::prepare(self, n, walk.len())?;
        let w: Vec<u32> = walk.iter().map(|&i| i as u32).collect();
        let mut accum = EdgeAccum::new();
        Ok(ctx.eval(&w, &mut accum))
    }
}

/// Precomputed per-model state shared across an enumeration.
enum ModelCtx {
    Iid {
        moments: [f64; MAX_WALK + 1],
    },
    FullCw {
        joint: Vec<f64>,
    },
    Spin {
        atoms: Vec<(f64, f64)>,
    },
    Toeplitz {
        moments: [f64; MAX_WALK + 1],
    },
    Band {
        moments: [f64; MAX_WALK + 1],
        half_width: u32,
        periodic: bool,
        n: u32,
    },
}

fn moment_table(dist: ScalarDist) -> [f64; MAX_WALK + 1] {
    let mut t = [0.0; MAX_WALK + 1];
    for (k, slot) in t.iter_mut().enumerate() {
        *slot = dist.moment(k as u32);
    }
    t
}

impl ModelCtx {
    fn prepare(model: &CorrelationModel, n: usize, k: usize) -> Result<Self> {
        Ok(match model {
            CorrelationModel::IidCentered(d) => ModelCtx::Iid {
                moments: moment_table(*d),
            },
            CorrelationModel::FullCw { beta } => {
                let spins = n * n;
                let params = CwParams::new(*beta, spins)?;
                let mut joint = Vec::with_capacity(k + 1);
                for l in 0..=k {
                    joint.push(if l > spins {
                        0.0
                    } else {
                        exact_joint_moment(&params, l)?
                    });
                }
                ModelCtx::FullCw { joint }
            }
            CorrelationModel::ExchangeableSpin { atoms } => ModelCtx::Spin {
                atoms: atoms.clone(),
            },
            CorrelationModel::ToeplitzDiagonal(d) => ModelCtx::Toeplitz {
                moments: moment_table(*d),
            },
            CorrelationModel::BandedIid {
                dist,
                half_width,
                periodic,
            } => ModelCtx::Band {
                moments: moment_table(*dist),
                half_width: *half_width as u32,
                periodic: *periodic,
                n: n as u32,
            },
        })
    }

    #[inline(always)]
    fn eval(&self, walk: &[u32], accum: &mut EdgeAccum) -> f64 {
        match self {
            ModelCtx::Iid { moments } => {
                accum.load(walk);
                let mut product = 1.0;
                for &(_, _, mult) in accum.edges() {
                    product *= moments[mult as usize];
                    if product == 0.0 {
                        return 0.0;
                    }
                }
                product
            }
            ModelCtx::FullCw { joint } => {
                accum.load(walk);
                let odd = accum
                    .edges()
                    .iter()
                    .filter(|&&(_, _, m)| m % 2 == 1)
                    .count();
                joint[odd]
            }
            ModelCtx::Spin { atoms } => {
                accum.load(walk);
                let odd = accum
                    .edges()
                    .iter()
                    .filter(|&&(_, _, m)| m % 2 == 1)
                    .count() as i32;
                atoms.iter().map(|&(w, tau)| w * tau.powi(odd)).sum()
            }
            ModelCtx::Toeplitz { moments } => {
                // entries on the same diagonal are one variable: group the
                // walk's steps by |i - j|
                let mut dist_mult = [(0u32, 0u32); MAX_WALK];
                let mut len = 0;
                for step in 0..walk.len() {
                    let a = walk[step];
                    let b = walk[if step + 1 == walk.len() { 0 } else { step + 1 }];
                    let d = a.abs_diff(b);
                    let mut found = false;
                    for item in dist_mult[..len].iter_mut() {
                        if item.0 == d {
                            item.1 += 1;
                            found = true;
                            break;
                        }
                    }
                    if !found {
                        dist_mult[len] = (d, 1);
                        len += 1;
                    }
                }
                let mut product = 1.0;
                for &(_, mult) in &dist_mult[..len] {
                    product *= moments[mult as usize];
                    if product == 0.0 {
                        return 0.0;
                    }
                }
                product
            }
            ModelCtx::Band {
                moments,
                half_width,
                periodic,
                n,
            } => {
                for step in 0..walk.len() {
                    let a = walk[step];
                    let b = walk[if step + 1 == walk.len() { 0 } else { step + 1 }];
                    let mut d = a.abs_diff(b);
                    if *periodic {
                        d = d.min(n - d);
                    }
                    if d > *half_width {
                        return 0.0;
                    }
                }
                accum.load(walk);
                let mut product = 1.0;
                for &(_, _, mult) in accum.edges() {
                    product *= moments[mult as usize];
                    if product == 0.0 {
                        return 0.0;
                    }
                }
                product
            }
        }
    }
}

/// Exact finite-N expected moment of the (normalized) empirical spectral
/// distribution: the per-entry scale to the k-th power times
/// `(1/N) * sum over all N^k tuples of expected_product`.
pub fn expected_trace_moment(model: &CorrelationModel, n: usize, k: usize) -> Result<f64> {
    model.validate()?;
    if n == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if k == 0 {
        return Ok(1.0);
    }
    check_cap(n, k)?;
    let ctx = ModelCtx::prepare(model, n, k)?;
    let raw = enumerate_sum(n, k, |walk, accum| ctx.eval(walk, accum));
    Ok(raw * ctx_scale(model, n, k))
}

fn ctx_scale(model: &CorrelationModel, n: usize, k: usize) -> f64 {
    model.entry_scale(n).powi(k as i32) / n as f64
}
