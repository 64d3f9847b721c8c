//! Deterministic, splittable random streams and the scalar/process
//! samplers used by every ensemble generator.
//!
//! A [`RngStream`] is a value: it is derived from a seed and a label path
//! (e.g. `("size", 1024) / ("rep", 3)`), and two streams with the same
//! derivation produce bit-identical output. Distinct label paths give
//! statistically independent streams, which is what makes replica-parallel
//! Monte Carlo reproducible regardless of scheduling.

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stafford's "mix13" finalizer (the splitmix64 output function).
#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A counter-based random stream identified by `(seed, label_path)`.
///
/// Output `i` is `mix64(key + (i+1)*GOLDEN)` where `key` is a hash of the
/// derivation path, so the sequence is random-access and the stream state
/// is just an explicit counter. Streams are cheap to clone; a clone
/// replays the same sequence from its current position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    counter: u64,
}

impl RngStream {
    /// Root stream for a seed (empty label path).
    pub fn new(seed: u64) -> Self {
        RngStream {
            key: mix64(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Child stream labelled by a `(name, index)` pair. Derivation chains,
    /// so the order of labels matters.
    pub fn child(&self, label: &str, index: u64) -> Self {
        let tag = fnv1a64(label.as_bytes());
        RngStream {
            key: mix64(self.key ^ tag.rotate_left(17) ^ mix64(index.wrapping_add(GOLDEN))),
            counter: 0,
        }
    }

    /// Next raw 64-bit word.
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline(always)]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Fair random sign.
    #[inline(always)]
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard Gaussian pair via Marsaglia's polar method.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                return (u * m, v * m);
            }
        }
    }

    /// Single standard Gaussian draw (discards the pair partner).
    pub fn next_gaussian(&mut self) -> f64 {
        self.next_gaussian_pair().0
    }
}

/// Derive a stream from a seed and a full label path.
pub fn derive_stream(seed: u64, label_path: &[(&str, u64)]) -> RngStream {
    let mut s = RngStream::new(seed);
    for &(label, index) in label_path {
        s = s.child(label, index);
    }
    s
}

/// Scalar entry laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarDist {
    /// Fair random sign: mean 0, variance 1.
    Rademacher,
    /// Standard normal: mean 0, variance 1.
    StdGaussian,
    /// `+1` with probability `(1+t)/2`, `-1` otherwise: mean `t`,
    /// variance `1 - t^2`.
    TwoPoint(f64),
}

impl ScalarDist {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarDist::TwoPoint(t) if !(-1.0..=1.0).contains(t) => Err(Error::Config(format!(
                "two-point bias must lie in [-1, 1], got {t}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ScalarDist::Rademacher | ScalarDist::StdGaussian => 0.0,
            ScalarDist::TwoPoint(t) => *t,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            ScalarDist::Rademacher | ScalarDist::StdGaussian => 1.0,
            ScalarDist::TwoPoint(t) => 1.0 - t * t,
        }
    }

    /// Raw k-th moment `E[X^k]`.
    pub fn moment(&self, k: u32) -> f64 {
        match self {
            ScalarDist::Rademacher => {
                if k % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarDist::StdGaussian => {
                if k % 2 == 1 {
                    0.0
                } else {
                    // (k-1)!! for even k
                    let mut m = 1.0;
                    let mut j = k as i64 - 1;
                    while j > 1 {
                        m *= j as f64;
                        j -= 2;
                    }
                    m
                }
            }
            ScalarDist::TwoPoint(t) => {
                if k % 2 == 0 {
                    1.0
                } else {
                    *t
                }
            }
        }
    }

    /// One draw.
    #[inline]
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        match self {
            ScalarDist::Rademacher => stream.next_sign(),
            ScalarDist::StdGaussian => stream.next_gaussian(),
            ScalarDist::TwoPoint(t) => {
                if stream.next_f64() < 0.5 * (1.0 + t) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// `n` i.i.d. draws. Gaussian draws are generated pairwise so no polar
/// rejection work is wasted.
pub fn sample_iid(dist: ScalarDist, n: usize, stream: &mut RngStream) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    match dist {
        ScalarDist::StdGaussian => {
            while out.len() + 2 <= n {
                let (a, b) = stream.next_gaussian_pair();
                out.push(a);
                out.push(b);
            }
            if out.len() < n {
                out.push(stream.next_gaussian());
            }
        }
        _ => {
            for _ in 0..n {
                out.push(dist.sample(stream));
            }
        }
    }
    out
}

/// Stationary scalar processes used to fill matrix diagonals.
#[derive(Clone, Debug, PartialEq)]
pub enum ProcessSpec {
    /// Independent draws from a scalar law.
    Iid(ScalarDist),
    /// Two-state (+1/-1) chain started from the uniform measure; flips
    /// with probability `flip` at each step. Lag-l correlation
    /// `(1 - 2 flip)^l`.
    MarkovTwoState { flip: f64 },
    /// Stationary AR(1) with unit marginal variance: `Y_{n+1} = rho Y_n +
    /// sqrt(1 - rho^2) eps_n`. Lag-l covariance `rho^l`.
    GaussAr1 { rho: f64 },
    /// The whole path equals the first draw (Toeplitz generator).
    Constant(ScalarDist),
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Iid(d) | ProcessSpec::Constant(d) => d.validate(),
            ProcessSpec::MarkovTwoState { flip } => {
                if *flip > 0.0 && *flip < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "markov flip probability must lie in (0, 1), got {flip}"
                    )))
                }
            }
            ProcessSpec::GaussAr1 { rho } => {
                if rho.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "ar(1) coefficient must satisfy |rho| < 1, got {rho}"
                    )))
                }
            }
        }
    }
}

/// Stationary path of length `n`.
pub fn sample_process(spec: &ProcessSpec, n: usize, stream: &mut RngStream) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(match spec {
        ProcessSpec::Iid(dist) => sample_iid(*dist, n, stream),
        ProcessSpec::MarkovTwoState { flip } => {
            let mut path = Vec::with_capacity(n);
            let mut state = stream.next_sign();
            path.push(state);
            for _ in 1..n {
                if stream.next_f64() < *flip {
                    state = -state;
                }
                path.push(state);
            }
            path
        }
        ProcessSpec::GaussAr1 { rho } => {
            let innovations = sample_iid(ScalarDist::StdGaussian, n, stream);
            let scale = (1.0 - rho * rho).sqrt();
            let mut path = Vec::with_capacity(n);
            let mut y = innovations[0];
            path.push(y);
            for eps in &innovations[1..] {
                y = rho * y + scale * eps;
                path.push(y);
            }
            path
        }
        ProcessSpec::Constant(dist) => {
            let y = dist.sample(stream);
            vec![y; n]
        }
    })
}
