//! Symmetric random-matrix builders: the independent full-matrix
//! ensemble, band and profile variants, block constructions with shared
//! entries, diagonal processes and fillings, Curie-Weiss ensembles, and
//! exchangeable-spin mixtures — plus the scaling rule for each and the
//! structural helpers (wrap distance, profile integral, filling maps,
//! sparse-dependence counters).

use crate::curie_weiss::{sample_cw_prefix, CwParams};
use crate::error::{Error, Result};
use crate::sampling::{sample_process, ProcessSpec, RngStream, ScalarDist};
use std::collections::HashMap;

/// Dense real symmetric matrix. The constructor API keeps the invariant
/// `entry(i,j) == entry(j,i)` exact: writes always set both positions.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>, // row-major n*n
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline(always)]
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Exact symmetry check (used by tests; construction guarantees it).
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

/// Distance of two (1-based) indices on the cycle Z/NZ:
/// `min(|i-j|, N - |i-j|)`.
pub fn wrap_dist(i: usize, j: usize, n: usize) -> Result<usize> {
    if i < 1 || i > n || j < 1 || j > n {
        return Err(Error::Domain(format!(
            "indices ({i}, {j}) out of range 1..={n}"
        )));
    }
    let d = i.abs_diff(j);
    Ok(d.min(n - d))
}

#[inline(always)]
fn wrap_dist0(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Step-function variance profile `alpha` on `[0, 1]`: a Riemann-integrable
/// representative whose squared double integral `Phi` has a closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    segments: Vec<(f64, f64)>, // (segment end, value); ends increase to 1
}

impl Profile {
    pub fn from_steps(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("profile needs at least one segment".into()));
        }
        let mut prev = 0.0;
        for &(end, value) in &segments {
            if !end.is_finite() || !value.is_finite() || end <= prev {
                return Err(Error::Config(
                    "profile segment ends must increase strictly from 0 to 1".into(),
                ));
            }
            prev = end;
        }
        if prev != 1.0 {
            return Err(Error::Config(format!(
                "profile must cover [0, 1], last end was {prev}"
            )));
        }
        Ok(Profile { segments })
    }

    /// Indicator of a union of disjoint, increasing subintervals of [0,1].
    pub fn indicator(intervals: &[(f64, f64)]) -> Result<Self> {
        let mut segments = Vec::new();
        let mut cursor = 0.0;
        for &(lo, hi) in intervals {
            if lo < cursor || hi <= lo || hi > 1.0 {
                return Err(Error::Config(
                    "indicator intervals must be disjoint, increasing, inside [0, 1]".into(),
                ));
            }
            if lo > cursor {
                segments.push((lo, 0.0));
            }
            segments.push((hi, 1.0));
            cursor = hi;
        }
        if cursor < 1.0 {
            segments.push((1.0, 0.0));
        }
        Profile::from_steps(segments)
    }

    pub fn value(&self, x: f64) -> f64 {
        for &(end, value) in &self.segments {
            if x < end {
                return value;
            }
        }
        self.segments.last().map(|&(_, v)| v).unwrap_or(0.0)
    }

    /// `Phi = \int_0^1 \int_0^1 alpha^2(|x-y|) dx dy`, exactly:
    /// the difference density of `|x-y|` is `2(1-u)`, so each step
    /// `[a, b)` with value `v` contributes `v^2 [2(b-a) - (b^2-a^2)]`.
    pub fn phi(&self) -> Result<f64> {
        let mut total = 0.0;
        let mut a = 0.0;
        for &(b, v) in &self.segments {
            total += v * v * (2.0 * (b - a) - (b * b - a * a));
            a = b;
        }
        if total <= 0.0 {
            return Err(Error::Config(
                "profile is identically zero: Phi would vanish".into(),
            ));
        }
        Ok(total)
    }
}

/// Order in which a single scalar sequence fills the upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillingOrder {
    /// Main diagonal first, then each superdiagonal outward.
    Diagonal,
    /// Row 1 left to right, then row 2 from the diagonal, and so on.
    RowByRow,
}

/// The full bijection `{0, .., N(N+1)/2 - 1} -> {(i, j) : i <= j}`
/// (0-based on both sides).
pub fn filling_map(n: usize, order: FillingOrder) -> Vec<(usize, usize)> {
    let mut map = Vec::with_capacity(n * (n + 1) / 2);
    match order {
        FillingOrder::Diagonal => {
            for offset in 0..n {
                for i in 0..n - offset {
                    map.push((i, i + offset));
                }
            }
        }
        FillingOrder::RowByRow => {
            for i in 0..n {
                for j in i..n {
                    map.push((i, j));
                }
            }
        }
    }
    map
}

/// Rule producing the band half-width `b_N` from the dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BandwidthRule {
    Fixed(usize),
    /// `b = ceil(coeff * N^exponent)`.
    Power { coeff: f64, exponent: f64 },
    /// `b = ceil(fraction * N)`.
    LinearFraction(f64),
}

impl BandwidthRule {
    pub fn half_width(&self, n: usize) -> Result<usize> {
        let b = match self {
            BandwidthRule::Fixed(b) => *b,
            BandwidthRule::Power { coeff, exponent } => {
                if *coeff <= 0.0 || *exponent < 0.0 {
                    return Err(Error::Config(
                        "power bandwidth needs coeff > 0 and exponent >= 0".into(),
                    ));
                }
                (coeff * (n as f64).powf(*exponent)).ceil() as usize
            }
            BandwidthRule::LinearFraction(c) => {
                if *c <= 0.0 || *c > 1.0 {
                    return Err(Error::Config(
                        "linear bandwidth fraction must lie in (0, 1]".into(),
                    ));
                }
                (c * n as f64).ceil() as usize
            }
        };
        if 2 * b + 1 > n {
            return Err(Error::Config(format!(
                "band width 2b+1 = {} exceeds dimension {n}",
                2 * b + 1
            )));
        }
        Ok(b)
    }
}

/// Entry-sharing pattern for the 2x2 block construction from two
/// independent symmetric blocks A and B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockPattern {
    /// `[[A, B], [B, A]]`
    Sym,
    /// `[[A, B], [B, -A]]`
    Antisym,
}

/// Declarative description of a symmetric random-matrix ensemble.
#[derive(Clone, Debug)]
pub enum EnsembleSpec {
    /// I.i.d. entries up to symmetry.
    Wigner { dist: ScalarDist },
    /// I.i.d. entries inside a band, zero outside; the periodic variant
    /// measures distance modulo N.
    BandWigner {
        dist: ScalarDist,
        bandwidth: BandwidthRule,
        periodic: bool,
    },
    /// Entry (i, j) is `alpha(|i-j|/N)` times an i.i.d. draw.
    ProfileBand { dist: ScalarDist, profile: Profile },
    /// 2N' x 2N' block matrix reusing two N' x N' independent blocks.
    SparseBlock {
        pattern: BlockPattern,
        dist: ScalarDist,
    },
    /// Fresh independent process path on every diagonal.
    DiagonalProcess { process: ProcessSpec },
    /// Fresh independent Curie-Weiss vector on every diagonal.
    DiagonalCw { beta: f64 },
    /// One process path laid out over the upper triangle by a filling.
    FilledProcess {
        process: ProcessSpec,
        filling: FillingOrder,
    },
    /// Upper triangle taken from one Curie-Weiss configuration on N^2
    /// sites.
    FullCw { beta: f64 },
    /// Draw a bias `tau` from the mixture once per matrix, then i.i.d.
    /// `±1` entries with that bias.
    ExchangeableSpin { atoms: Vec<(f64, f64)> },
    /// The all-ones matrix (rank one, known spectrum).
    RankOne,
}

impl EnsembleSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        match self {
            EnsembleSpec::Wigner { dist } => dist.validate(),
            EnsembleSpec::BandWigner {
                dist, bandwidth, ..
            } => {
                dist.validate()?;
                bandwidth.half_width(n).map(|_| ())
            }
            EnsembleSpec::ProfileBand { dist, profile } => {
                dist.validate()?;
                profile.phi().map(|_| ())
            }
            EnsembleSpec::SparseBlock { dist, .. } => {
                dist.validate()?;
                if n % 2 != 0 {
                    return Err(Error::Config(format!(
                        "block construction needs an even dimension, got {n}"
                    )));
                }
                Ok(())
            }
            EnsembleSpec::DiagonalProcess { process } => process.validate(),
            EnsembleSpec::FilledProcess { process, .. } => process.validate(),
            EnsembleSpec::DiagonalCw { beta } | EnsembleSpec::FullCw { beta } => {
                if *beta >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config("beta must be >= 0".into()))
                }
            }
            EnsembleSpec::ExchangeableSpin { atoms } => {
                let total: f64 = atoms.iter().map(|(w, _)| w).sum();
                if atoms.is_empty() || (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Config("mixture weights must sum to 1".into()));
                }
                if atoms.iter().any(|&(w, t)| w <= 0.0 || !(-1.0..=1.0).contains(&t)) {
                    return Err(Error::Config(
                        "mixture atoms need weight > 0 and bias in [-1, 1]".into(),
                    ));
                }
                Ok(())
            }
            EnsembleSpec::RankOne => Ok(()),
        }
    }
}

fn fill_wigner(m: &mut SymMatrix, dist: ScalarDist, stream: &mut RngStream) {
    let n = m.dim();
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, dist.sample(stream));
        }
    }
}

/// Sample a symmetric matrix for the given ensemble. The stream is taken
/// by reference: builders derive child streams internally, so the same
/// `(spec, n, stream)` always yields the same matrix.
pub fn build(spec: &EnsembleSpec, n: usize, stream: &RngStream) -> Result<SymMatrix> {
    spec.validate(n)?;
    let mut m = SymMatrix::zeros(n);
    match spec {
        EnsembleSpec::Wigner { dist } => {
            fill_wigner(&mut m, *dist, &mut stream.child("entries", 0));
        }
        EnsembleSpec::BandWigner {
            dist,
            bandwidth,
            periodic,
        } => {
            let b = bandwidth.half_width(n)?;
            let mut s = stream.child("entries", 0);
            for i in 0..n {
                for j in i..n {
                    let d = if *periodic {
                        wrap_dist0(i, j, n)
                    } else {
                        j - i
                    };
                    if d <= b {
                        m.set_sym(i, j, dist.sample(&mut s));
                    }
                }
            }
        }
        EnsembleSpec::ProfileBand { dist, profile } => {
            let mut s = stream.child("entries", 0);
            for i in 0..n {
                for j in i..n {
                    let alpha = profile.value((j - i) as f64 / n as f64);
                    m.set_sym(i, j, alpha * dist.sample(&mut s));
                }
            }
        }
        EnsembleSpec::SparseBlock { pattern, dist } => {
            let half = n / 2;
            let mut a = SymMatrix::zeros(half);
            let mut b = SymMatrix::zeros(half);
            fill_wigner(&mut a, *dist, &mut stream.child("block-a", 0));
            fill_wigner(&mut b, *dist, &mut stream.child("block-b", 0));
            let lower_sign = match pattern {
                BlockPattern::Sym => 1.0,
                BlockPattern::Antisym => -1.0,
            };
            for p in 0..half {
                for q in 0..half {
                    m.set_sym(p, q, a.get(p, q));
                    m.set_sym(p, half + q, b.get(p, q));
                    if p <= q {
                        m.set_sym(half + p, half + q, lower_sign * a.get(p, q));
                    }
                }
            }
        }
        EnsembleSpec::DiagonalProcess { process } => {
            for offset in 0..n {
                let mut s = stream.child("diag", offset as u64);
                let path = sample_process(process, n - offset, &mut s)?;
                for (i, &v) in path.iter().enumerate() {
                    m.set_sym(i, i + offset, v);
                }
            }
        }
        EnsembleSpec::DiagonalCw { beta } => {
            let params = CwParams::new(*beta, n)?;
            for offset in 0..n {
                let mut s = stream.child("diag", offset as u64);
                let spins = sample_cw_prefix(&params, n - offset, &mut s);
                for (i, &v) in spins.iter().enumerate() {
                    m.set_sym(i, i + offset, v);
                }
            }
        }
        EnsembleSpec::FilledProcess { process, filling } => {
            let mut s = stream.child("path", 0);
            let len = n * (n + 1) / 2;
            let path = sample_process(process, len, &mut s)?;
            for (value, &(i, j)) in path.iter().zip(filling_map(n, *filling).iter()) {
                m.set_sym(i, j, *value);
            }
        }
        EnsembleSpec::FullCw { beta } => {
            let params = CwParams::new(*beta, n * n)?;
            let mut s = stream.child("spins", 0);
            let spins = sample_cw_prefix(&params, n * (n + 1) / 2, &mut s);
            let mut it = spins.iter();
            for i in 0..n {
                for j in i..n {
                    m.set_sym(i, j, *it.next().expect("prefix length"));
                }
            }
        }
        EnsembleSpec::ExchangeableSpin { atoms } => {
            let mut s = stream.child("tau", 0);
            let u = s.next_f64();
            let mut acc = 0.0;
            let mut tau = atoms.last().map(|&(_, t)| t).unwrap_or(0.0);
            for &(w, t) in atoms {
                acc += w;
                if u < acc {
                    tau = t;
                    break;
                }
            }
            fill_wigner(
                &mut m,
                ScalarDist::TwoPoint(tau),
                &mut stream.child("entries", 0),
            );
        }
        EnsembleSpec::RankOne => {
            for i in 0..n {
                for j in i..n {
                    m.set_sym(i, j, 1.0);
                }
            }
        }
    }
    Ok(m)
}

/// Natural spectral normalization for an ensemble: `1/sqrt(N)` for
/// full-matrix variants, `1/sqrt(2b+1)` for band matrices, and
/// `1/sqrt(Phi N)` for profile matrices.
pub fn norm_factor(spec: &EnsembleSpec, n: usize) -> Result<f64> {
    Ok(match spec {
        EnsembleSpec::BandWigner { bandwidth, .. } => {
            let b = bandwidth.half_width(n)?;
            1.0 / ((2 * b + 1) as f64).sqrt()
        }
        EnsembleSpec::ProfileBand { profile, .. } => 1.0 / (profile.phi()? * n as f64).sqrt(),
        _ => 1.0 / (n as f64).sqrt(),
    })
}

/// The three sparsity statistics of an entry-sharing equivalence relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparseCounts {
    /// `max_i |{(j,k,l) : (i,j) ~ (k,l)}|` — must be o(N^2).
    pub max_row_related: u64,
    /// `|{(i,j,l) : (i,j) ~ (j,l), l != i}|` — must be o(N^2).
    pub chain_triples: u64,
    /// `max_{i,j,k} |{l : (i,j) ~ (k,l)}|` — must stay bounded.
    pub class_bound: u64,
}

/// Source variable of entry `(i, j)` in the block construction: which of
/// the two independent symmetric blocks it reads, and at which (sorted)
/// in-block position. Both patterns share this map; the `-A` sign does
/// not change which entries are dependent.
fn block_source(i: usize, j: usize, half: usize) -> (u8, usize, usize) {
    let (block, p, q) = match (i < half, j < half) {
        (true, true) => (0u8, i, j),
        (false, false) => (0u8, i - half, j - half),
        (true, false) => (1u8, i, j - half),
        (false, true) => (1u8, i - half, j),
    };
    (block, p.min(q), p.max(q))
}

/// Enumerate the entry-sharing equivalence relation of a block pattern at
/// dimension `n = 2N'` and report its sparsity statistics.
pub fn verify_sparse_counts(pattern: BlockPattern, n: usize) -> Result<SparseCounts> {
    let _ = pattern; // both patterns induce the same relation
    if n % 2 != 0 || n == 0 {
        return Err(Error::Config(format!(
            "block construction needs an even dimension, got {n}"
        )));
    }
    let half = n / 2;
    let mut classes: HashMap<(u8, usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            classes.entry(block_source(i, j, half)).or_default().push((i, j));
        }
    }

    let mut max_row_related = 0u64;
    for i in 0..n {
        let mut related = 0u64;
        for j in 0..n {
            related += classes[&block_source(i, j, half)].len() as u64;
        }
        max_row_related = max_row_related.max(related);
    }

    let mut chain_triples = 0u64;
    let mut class_bound = 0u64;
    for i in 0..n {
        for j in 0..n {
            let members = &classes[&block_source(i, j, half)];
            for &(k, l) in members {
                if k == j && l != i {
                    chain_triples += 1;
                }
            }
            for k in 0..n {
                let with_first_k = members.iter().filter(|&&(a, _)| a == k).count() as u64;
                class_bound = class_bound.max(with_first_k);
            }
        }
    }

    Ok(SparseCounts {
        max_row_related,
        chain_triples,
        class_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::derive_stream;

    #[test]
    fn wrap_distance_examples() {
        assert_eq!(wrap_dist(1, 8, 8).unwrap(), 1);
        assert_eq!(wrap_dist(1, 5, 8).unwrap(), 4);
        assert_eq!(wrap_dist(3, 3, 9).unwrap(), 0);
        assert!(wrap_dist(0, 3, 8).is_err());
        assert!(wrap_dist(1, 9, 8).is_err());
    }

    #[test]
    fn profile_phi_closed_forms() {
        let one = Profile::from_steps(vec![(1.0, 1.0)]).unwrap();
        assert!((one.phi().unwrap() - 1.0).abs() < 1e-15);

        let near = Profile::indicator(&[(0.0, 0.25)]).unwrap();
        assert!((near.phi().unwrap() - 0.4375).abs() < 1e-15);

        let wrap = Profile::indicator(&[(0.0, 0.25), (0.75, 1.0)]).unwrap();
        assert!((wrap.phi().unwrap() - 0.5).abs() < 1e-15);

        let zero = Profile::from_steps(vec![(1.0, 0.0)]).unwrap();
        assert!(zero.phi().is_err());
    }

    #[test]
    fn filling_examples() {
        // diagonal order, N = 3: 1-based index 4 -> (1,2), index 6 -> (1,3)
        let map = filling_map(3, FillingOrder::Diagonal);
        assert_eq!(map[3], (0, 1));
        assert_eq!(map[5], (0, 2));
        // row-by-row, N = 3: index 2 -> (1,2), index 6 -> (3,3)
        let map = filling_map(3, FillingOrder::RowByRow);
        assert_eq!(map[1], (0, 1));
        assert_eq!(map[5], (2, 2));
    }

    #[test]
    fn filling_is_a_bijection() {
        for n in 1..=12 {
            for order in [FillingOrder::Diagonal, FillingOrder::RowByRow] {
                let map = filling_map(n, order);
                assert_eq!(map.len(), n * (n + 1) / 2);
                let mut seen = vec![false; n * n];
                for &(i, j) in &map {
                    assert!(i <= j && j < n);
                    assert!(!seen[i * n + j], "duplicate at ({i},{j})");
                    seen[i * n + j] = true;
                }
            }
        }
    }

    fn all_specs() -> Vec<EnsembleSpec> {
        vec![
            EnsembleSpec::Wigner {
                dist: ScalarDist::Rademacher,
            },
            EnsembleSpec::Wigner {
                dist: ScalarDist::StdGaussian,
            },
            EnsembleSpec::BandWigner {
                dist: ScalarDist::Rademacher,
                bandwidth: BandwidthRule::Fixed(3),
                periodic: false,
            },
            EnsembleSpec::BandWigner {
                dist: ScalarDist::StdGaussian,
                bandwidth: BandwidthRule::LinearFraction(0.125),
                periodic: true,
            },
            EnsembleSpec::ProfileBand {
                dist: ScalarDist::Rademacher,
                profile: Profile::indicator(&[(0.0, 0.25), (0.75, 1.0)]).unwrap(),
            },
            EnsembleSpec::SparseBlock {
                pattern: BlockPattern::Antisym,
                dist: ScalarDist::Rademacher,
            },
            EnsembleSpec::SparseBlock {
                pattern: BlockPattern::Sym,
                dist: ScalarDist::StdGaussian,
            },
            EnsembleSpec::DiagonalProcess {
                process: ProcessSpec::GaussAr1 { rho: 0.5 },
            },
            EnsembleSpec::DiagonalProcess {
                process: ProcessSpec::Constant(ScalarDist::Rademacher),
            },
            EnsembleSpec::DiagonalCw { beta: 1.3 },
            EnsembleSpec::FilledProcess {
                process: ProcessSpec::MarkovTwoState { flip: 0.25 },
                filling: FillingOrder::Diagonal,
            },
            EnsembleSpec::FilledProcess {
                process: ProcessSpec::Iid(ScalarDist::StdGaussian),
                filling: FillingOrder::RowByRow,
            },
            EnsembleSpec::FullCw { beta: 0.8 },
            EnsembleSpec::ExchangeableSpin {
                atoms: vec![(0.5, 0.0), (0.5, 0.8)],
            },
            EnsembleSpec::RankOne,
        ]
    }

    #[test]
    fn every_built_matrix_is_exactly_symmetric() {
        let stream = derive_stream(77, &[("sym", 0)]);
        for (idx, spec) in all_specs().iter().enumerate() {
            let m = build(spec, 16, &stream.child("spec", idx as u64)).unwrap();
            assert!(m.is_symmetric(), "spec #{idx} broke symmetry");
        }
    }

    #[test]
    fn build_is_deterministic() {
        let stream = derive_stream(123, &[("det", 0)]);
        for (idx, spec) in all_specs().iter().enumerate() {
            let a = build(spec, 12, &stream.child("spec", idx as u64)).unwrap();
            let b = build(spec, 12, &stream.child("spec", idx as u64)).unwrap();
            assert_eq!(a, b, "spec #{idx} not deterministic");
        }
    }

    #[test]
    fn band_structure() {
        let stream = derive_stream(3, &[("band", 0)]);
        let plain = build(
            &EnsembleSpec::BandWigner {
                dist: ScalarDist::Rademacher,
                bandwidth: BandwidthRule::Fixed(1),
                periodic: false,
            },
            8,
            &stream,
        )
        .unwrap();
        // corners are identically zero off the band
        assert_eq!(plain.get(0, 7), 0.0);
        assert_eq!(plain.get(0, 2), 0.0);
        assert_ne!(plain.get(0, 1), 0.0);

        let periodic = build(
            &EnsembleSpec::BandWigner {
                dist: ScalarDist::Rademacher,
                bandwidth: BandwidthRule::Fixed(1),
                periodic: true,
            },
            8,
            &stream,
        )
        .unwrap();
        // wrap distance |1-8|_8 = 1 lies inside the band
        assert_ne!(periodic.get(0, 7), 0.0);
        // every row carries exactly 2b+1 live entries
        for i in 0..8 {
            let live = (0..8)
                .filter(|&j| periodic.get(i, j) != 0.0)
                .count();
            assert_eq!(live, 3, "row {i}");
        }

        // bandwidth must fit the dimension
        assert!(BandwidthRule::Fixed(4).half_width(8).is_err());
        assert_eq!(BandwidthRule::Fixed(3).half_width(8).unwrap(), 3);
        assert_eq!(
            BandwidthRule::LinearFraction(0.125).half_width(2048).unwrap(),
            256
        );
        assert_eq!(
            BandwidthRule::Power {
                coeff: 1.0,
                exponent: 0.6
            }
            .half_width(2048)
            .unwrap(),
            98 // ceil(2048^0.6) = ceil(97.006)
        );
    }

    #[test]
    fn rank_one_is_all_ones() {
        let m = build(&EnsembleSpec::RankOne, 5, &RngStream::new(0)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn toeplitz_generator_is_constant_per_diagonal() {
        let spec = EnsembleSpec::DiagonalProcess {
            process: ProcessSpec::Constant(ScalarDist::Rademacher),
        };
        let m = build(&spec, 10, &RngStream::new(5)).unwrap();
        for offset in 0..10 {
            let v = m.get(0, offset);
            for i in 0..10 - offset {
                assert_eq!(m.get(i, i + offset), v, "offset {offset}");
            }
        }
        // diagonals vary (overwhelmingly likely over 10 sign draws)
        let distinct: std::collections::HashSet<u64> =
            (0..10).map(|o| m.get(0, o).to_bits()).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn full_cw_beta_zero_entries_are_fair_iid_signs() {
        let mut sum = 0.0;
        let mut pair = 0.0;
        let mut count = 0.0;
        for rep in 0..40u64 {
            let stream = derive_stream(9, &[("fullcw", rep)]);
            let m = build(&EnsembleSpec::FullCw { beta: 0.0 }, 24, &stream).unwrap();
            for i in 0..24 {
                for j in i..24 {
                    sum += m.get(i, j);
                    count += 1.0;
                }
            }
            for i in 0..24 {
                pair += m.get(i, i) * m.get(i, (i + 1) % 24);
            }
        }
        assert!(
            (sum / count).abs() < 4.0 / count.sqrt(),
            "mean {}",
            sum / count
        );
        assert!((pair / (40.0 * 24.0)).abs() < 0.12);
    }

    #[test]
    fn full_cw_pair_correlation_is_position_independent() {
        // exchangeability: the empirical pair correlation between two
        // fixed entries does not depend on which entries are chosen
        let beta = 0.8;
        let n = 8;
        let reps = 4000;
        let mut near = 0.0;
        let mut far = 0.0;
        for rep in 0..reps {
            let stream = derive_stream(31, &[("xch", rep)]);
            let m = build(&EnsembleSpec::FullCw { beta }, n, &stream).unwrap();
            near += m.get(0, 1) * m.get(0, 2);
            far += m.get(0, 1) * m.get(5, 7);
        }
        near /= reps as f64;
        far /= reps as f64;
        // both estimate the same 2-spin moment; noise is ~1/sqrt(reps)
        assert!(
            (near - far).abs() < 4.0 / (reps as f64).sqrt(),
            "near {near} vs far {far}"
        );
    }

    #[test]
    fn exchangeable_single_atom_reduces_to_fair_signs() {
        let spec = EnsembleSpec::ExchangeableSpin {
            atoms: vec![(1.0, 0.0)],
        };
        let m = build(&spec, 32, &RngStream::new(17)).unwrap();
        let mut sum = 0.0;
        let mut count = 0.0;
        for i in 0..32 {
            for j in i..32 {
                assert_eq!(m.get(i, j).abs(), 1.0);
                sum += m.get(i, j);
                count += 1.0;
            }
        }
        assert!((sum / count).abs() < 4.0 / count.sqrt());
    }

    #[test]
    fn filled_iid_matches_wigner_moments() {
        // an i.i.d. path in any filling order is a Wigner matrix in
        // distribution: second and fourth spectral moments agree within
        // Monte Carlo error
        use crate::spectra::{eig_sym, Esd};
        let n = 32;
        let reps = 60u64;
        let mut means = Vec::new();
        for (tag, spec) in [
            (
                "wigner",
                EnsembleSpec::Wigner {
                    dist: ScalarDist::StdGaussian,
                },
            ),
            (
                "diag",
                EnsembleSpec::FilledProcess {
                    process: ProcessSpec::Iid(ScalarDist::StdGaussian),
                    filling: FillingOrder::Diagonal,
                },
            ),
            (
                "rows",
                EnsembleSpec::FilledProcess {
                    process: ProcessSpec::Iid(ScalarDist::StdGaussian),
                    filling: FillingOrder::RowByRow,
                },
            ),
        ] {
            let mut m4 = 0.0;
            for rep in 0..reps {
                let stream = derive_stream(55, &[(tag, rep)]);
                let m = build(&spec, n, &stream).unwrap();
                let spectrum = eig_sym(&m).unwrap();
                let esd = Esd::from_spectrum(&spectrum, 1.0 / (n as f64).sqrt());
                m4 += esd.moment(4);
            }
            means.push(m4 / reps as f64);
        }
        for pair in means.windows(2) {
            assert!(
                (pair[0] - pair[1]).abs() < 0.2,
                "fourth moments diverge: {means:?}"
            );
        }
    }

    #[test]
    fn norm_factors() {
        let wigner = EnsembleSpec::Wigner {
            dist: ScalarDist::Rademacher,
        };
        assert!((norm_factor(&wigner, 100).unwrap() - 0.1).abs() < 1e-15);

        let band = EnsembleSpec::BandWigner {
            dist: ScalarDist::Rademacher,
            bandwidth: BandwidthRule::Fixed(12),
            periodic: true,
        };
        assert!((norm_factor(&band, 100).unwrap() - 0.2).abs() < 1e-15);

        let profile = EnsembleSpec::ProfileBand {
            dist: ScalarDist::Rademacher,
            profile: Profile::from_steps(vec![(1.0, 1.0)]).unwrap(),
        };
        assert!((norm_factor(&profile, 100).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn sparse_counts_are_small() {
        for pattern in [BlockPattern::Sym, BlockPattern::Antisym] {
            let counts = verify_sparse_counts(pattern, 8).unwrap();
            assert!(counts.class_bound <= 2, "{counts:?}");
            // each row touches O(N) related triples, not O(N^2)
            assert_eq!(counts.max_row_related, 4 * 8 - 4);
            assert_eq!(counts.chain_triples, 0);
        }
        let mut prev = 0;
        for n in [8usize, 16, 32, 64] {
            let c = verify_sparse_counts(BlockPattern::Sym, n).unwrap();
            assert!(c.max_row_related > prev);
            assert!(c.max_row_related < (n * n) as u64 / 2);
            prev = c.max_row_related;
        }
        assert!(verify_sparse_counts(BlockPattern::Sym, 7).is_err());
    }

    #[test]
    fn sparse_block_reuses_entries() {
        let stream = derive_stream(2, &[("blocks", 0)]);
        let sym = build(
            &EnsembleSpec::SparseBlock {
                pattern: BlockPattern::Sym,
                dist: ScalarDist::StdGaussian,
            },
            16,
            &stream,
        )
        .unwrap();
        let anti = build(
            &EnsembleSpec::SparseBlock {
                pattern: BlockPattern::Antisym,
                dist: ScalarDist::StdGaussian,
            },
            16,
            &stream,
        )
        .unwrap();
        for p in 0..8 {
            for q in 0..8 {
                assert_eq!(sym.get(8 + p, 8 + q), sym.get(p, q));
                assert_eq!(anti.get(8 + p, 8 + q), -anti.get(p, q));
                assert_eq!(sym.get(p, 8 + q), sym.get(q, 8 + p));
            }
        }
    }
}
