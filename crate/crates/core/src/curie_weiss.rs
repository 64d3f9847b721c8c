//! Exact Curie-Weiss machinery: magnetization distribution, exact
//! sampling, exact and asymptotic joint spin moments, the fixed-point
//! magnetization m(beta), and the tilt-integral (de Finetti) route to the
//! same moments via quadrature.
//!
//! A Curie-Weiss configuration of `M` spins in `{-1,+1}^M` carries weight
//! proportional to `exp(beta * S^2 / (2M))` where `S` is the total spin.
//! Everything here works off that weight exactly; nothing is Monte Carlo.

use crate::error::{Error, Result};
use crate::quad;
use crate::sampling::RngStream;

/// Inverse temperature and spin count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CwParams {
    pub beta: f64,
    pub spins: usize,
}

impl CwParams {
    pub fn new(beta: f64, spins: usize) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Config(format!(
                "inverse temperature must be a finite value >= 0, got {beta}"
            )));
        }
        if spins == 0 {
            return Err(Error::Config("spin count must be >= 1".into()));
        }
        Ok(CwParams { beta, spins })
    }
}

/// Spontaneous magnetization: the unique positive root of
/// `tanh(beta m) = m` for `beta > 1`, and `0` for `beta <= 1`.
///
/// Bisection (the fixed-point equation is monotone in the bracket)
/// followed by a Newton polish; the result satisfies
/// `|tanh(beta m) - m| <= 1e-12`.
pub fn solve_m(beta: f64) -> f64 {
    if beta <= 1.0 {
        return 0.0;
    }
    let f = |m: f64| (beta * m).tanh() - m;
    let mut lo = 1e-9;
    let mut hi = 1.0;
    // f(lo) > 0 for beta > 1, f(1) = tanh(beta) - 1 < 0
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut m = 0.5 * (lo + hi);
    for _ in 0..4 {
        let t = (beta * m).tanh();
        let deriv = beta * (1.0 - t * t) - 1.0;
        if deriv.abs() > 1e-300 {
            m -= (t - m) / deriv;
        }
    }
    // tanh saturates in f64 for large beta; keep the contract m < 1
    m.clamp(0.0, 1.0 - f64::EPSILON)
}

/// Compensated (Kahan) sum; the magnetization PMF has millions of terms
/// for full-matrix ensembles and plain summation drifts past 1e-12.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `ln(k!)` for `k = 0..=n` as a cumulative table.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        t.push(acc);
    }
    t
}

/// Exact distribution of the total spin `S = sum_i xi_i` under the
/// Curie-Weiss measure. Support is `{-M, -M+2, ..., M}`, indexed by the
/// number of up-spins `k` (so `S = 2k - M`).
#[derive(Clone, Debug)]
pub struct MagnetizationPmf {
    spins: usize,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MagnetizationPmf {
    pub fn spins(&self) -> usize {
        self.spins
    }

    /// Probability of `k` up-spins.
    pub fn prob_up_count(&self, k: usize) -> f64 {
        self.probs[k]
    }

    /// Probability of total spin `s` (zero off the lattice `-M + 2k`).
    pub fn prob_total(&self, s: i64) -> f64 {
        let m = self.spins as i64;
        if s < -m || s > m || (s + m) % 2 != 0 {
            return 0.0;
        }
        self.probs[((s + m) / 2) as usize]
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.spins as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(k, &p)| (2 * k as i64 - m, p))
    }

    /// Draw a total-spin value by inverse CDF.
    pub fn sample_total(&self, stream: &mut RngStream) -> i64 {
        let u = stream.next_f64();
        let k = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => i + 1,
            Err(i) => i,
        };
        2 * k.min(self.spins) as i64 - self.spins as i64
    }
}

/// Exact magnetization PMF: `p(k ups) ∝ C(M,k) exp(beta (2k-M)^2 / (2M))`,
/// computed in the log domain with log-sum-exp normalization so it stays
/// finite for millions of spins.
pub fn magnetization_pmf(params: &CwParams) -> MagnetizationPmf {
    let m = params.spins;
    let lf = ln_factorials(m);
    let mut logw = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let s = 2.0 * k as f64 - m as f64;
        // grouped so the expression is symmetric in k <-> M-k term by
        // term, making p(s) = p(-s) exact in floating point
        let lw = lf[m] - (lf[k] + lf[m - k]) + params.beta * s * s / (2.0 * m as f64);
        logw.push(lw);
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logw.iter().map(|lw| (lw - max).exp()).collect();
    let norm = kahan_sum(probs.iter().cloned());
    for p in &mut probs {
        *p /= norm;
    }
    let mut cumulative = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    let mut comp = 0.0;
    for &p in &probs {
        let y = p - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        cumulative.push(acc);
    }
    MagnetizationPmf {
        spins: m,
        probs,
        cumulative,
    }
}

/// Exact sample from the Curie-Weiss measure: draw the total spin from
/// the magnetization PMF, then place that many up-spins uniformly at
/// random. Runs in O(M) by drawing positions as sequential conditional
/// Bernoullis.
pub fn sample_cw(params: &CwParams, stream: &mut RngStream) -> Vec<f64> {
    sample_cw_prefix(params, params.spins, stream)
}

/// First `len` spins of an exact Curie-Weiss sample (the marginal of any
/// `len` coordinates, by exchangeability). Used by the full-matrix
/// ensemble, which needs only the upper triangle of an `N^2`-spin draw.
pub fn sample_cw_prefix(params: &CwParams, len: usize, stream: &mut RngStream) -> Vec<f64> {
    let m = params.spins;
    let len = len.min(m);
    let pmf = magnetization_pmf(params);
    let total = pmf.sample_total(stream);
    let mut ups = ((m as i64 + total) / 2) as usize;
    let mut remaining = m;
    let mut spins = Vec::with_capacity(len);
    for _ in 0..len {
        let p = ups as f64 / remaining as f64;
        if stream.next_f64() < p {
            spins.push(1.0);
            ups -= 1;
        } else {
            spins.push(-1.0);
        }
        remaining -= 1;
    }
    spins
}

/// Conditional moment `E(xi_1 ... xi_l | k up-spins among M)` under the
/// uniform arrangement: a hypergeometric sum over how many of the first
/// `l` positions are up.
fn conditional_product_moment(lf: &[f64], m: usize, l: usize, k: usize) -> f64 {
    let ln_choose = |n: usize, r: usize| -> f64 { lf[n] - lf[r] - lf[n - r] };
    let ln_total = ln_choose(m, k);
    let mut sum = 0.0;
    for j in 0..=l.min(k) {
        if k - j > m - l {
            continue;
        }
        let ln_ways = ln_choose(l, j) + ln_choose(m - l, k - j) - ln_total;
        let sign = if (l - j) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_ways.exp();
    }
    sum
}

/// Exact joint moment `E(xi_1 xi_2 ... xi_l)` of `l` distinct Curie-Weiss
/// spins, via the magnetization PMF and the conditional hypergeometric
/// moment. Odd `l` vanishes by sign symmetry.
pub fn exact_joint_moment(params: &CwParams, l: usize) -> Result<f64> {
    let m = params.spins;
    if l > m {
        return Err(Error::Domain(format!(
            "joint moment order {l} exceeds spin count {m}"
        )));
    }
    if l == 0 {
        return Ok(1.0);
    }
    if l % 2 == 1 {
        return Ok(0.0);
    }
    let pmf = magnetization_pmf(params);
    let lf = ln_factorials(m);
    let total = kahan_sum(
        pmf.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| p * conditional_product_moment(&lf, m, l, k)),
    );
    Ok(total)
}

/// Joint moment via the tilt-integral representation: the Curie-Weiss
/// measure is a mixture of i.i.d. spin measures `P_t` with a weight
/// `exp(-M F_beta(t)/2) / (1-t^2)`, under which `E_t(xi_1...xi_l) = t^l`
/// for distinct spins. The substitution `t = tanh(u)` removes the
/// endpoint singularity: the integrand becomes
/// `tanh(u)^l * exp(M (ln cosh u - u^2/(2 beta)))`,
/// and the normalization is handled by dividing by the `l = 0` integral,
/// so the representation's overall constant is irrelevant.
pub fn hs_joint_moment(params: &CwParams, l: usize) -> Result<f64> {
    if params.beta <= 0.0 {
        return Err(Error::Domain(
            "tilt representation requires beta > 0".into(),
        ));
    }
    if l % 2 == 1 {
        return Ok(0.0); // odd integrand against an even weight
    }
    let beta = params.beta;
    let m = params.spins as f64;
    let g = |u: f64| u.cosh().ln() - u * u / (2.0 * beta);
    // g peaks at u = 0 for beta <= 1 and at u* = beta * m(beta) otherwise
    let u_star = beta * solve_m(beta);
    let g_max = g(u_star);
    // cut the tail where the weight is below exp(-45) of the peak
    let mut hi = u_star + 1.0;
    while m * (g(hi) - g_max) > -45.0 {
        hi = hi * 2.0 + 1.0;
    }
    let weight = move |u: f64| (m * (g(u) - g_max)).exp();
    let numer = quad::integrate(&|u: f64| u.tanh().powi(l as i32) * weight(u), -hi, hi, 1e-12, 0.0)?;
    let denom = quad::integrate(&weight, -hi, hi, 1e-12, 0.0)?;
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::Numerical(
            "tilt-weight normalization integral degenerated".into(),
        ));
    }
    Ok(numer / denom)
}

/// Leading-order joint moment of `l` distinct spins as the spin count
/// grows: `(l-1)!! (beta/(1-beta))^{l/2} M^{-l/2}` below the critical
/// temperature and `m(beta)^l` above it. The critical case `beta = 1`
/// has an unspecified constant and is rejected.
pub fn asymptotic_joint_moment(beta: f64, spins: usize, l: usize) -> Result<f64> {
    if l % 2 == 1 {
        return Ok(0.0);
    }
    if beta == 1.0 {
        return Err(Error::Domain(
            "critical temperature beta = 1 is not supported".into(),
        ));
    }
    if beta < 1.0 {
        let mut dfact = 1.0;
        let mut j = l as i64 - 1;
        while j > 1 {
            dfact *= j as f64;
            j -= 2;
        }
        let ratio = beta / (1.0 - beta);
        Ok(dfact * ratio.powi(l as i32 / 2) / (spins as f64).powi(l as i32 / 2))
    } else {
        Ok(solve_m(beta).powi(l as i32))
    }
}
