//! Dense symmetric eigensolver and spectral statistics.
//!
//! The solver is the classic two-stage scheme: Householder reduction to
//! tridiagonal form followed by QL iteration with implicit Wilkinson
//! shifts. Eigenvectors are never accumulated — nothing downstream needs
//! them — which keeps the reduction at roughly two thirds of the full
//! EVD cost and the QL sweep at O(N^2).

use crate::ensembles::SymMatrix;
use crate::error::{Error, Result};

/// Sorted eigenvalues of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>, // ascending
}

impl Spectrum {
    pub fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Spectrum { values }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    /// Largest eigenvalue modulus.
    pub fn op_norm(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0.0,
        }
    }

    /// Second-largest eigenvalue modulus.
    pub fn second_norm(&self) -> Result<f64> {
        let n = self.values.len();
        if n < 2 {
            return Err(Error::Domain(
                "second-largest modulus needs at least two eigenvalues".into(),
            ));
        }
        let lo = self.values[0].abs();
        let hi = self.values[n - 1].abs();
        Ok(if lo >= hi {
            self.values[1].abs().max(hi)
        } else {
            lo.max(self.values[n - 2].abs())
        })
    }
}

/// Householder reduction of a symmetric matrix (row-major, destroyed) to
/// tridiagonal form: `d` receives the diagonal, `e[1..]` the subdiagonal.
///
/// The active leading block is kept fully symmetric so every inner loop
/// runs over contiguous rows (the rank-2 update writes both triangles in
/// one pass; its two product terms commute, so symmetry stays bit-exact).
fn tridiagonalize(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    // Rows below eps * |A| are treated as zero. Low-rank inputs shrink
    // the trailing block quadratically per step, and without the cutoff
    // the cascade underflows into subnormals and poisons the reduction;
    // dropping such a row perturbs eigenvalues by O(eps * |A|) only.
    let anorm: f64 = a.iter().fold(0.0, |m, x| m.max(x.abs()));
    let negligible = anorm * f64::EPSILON;
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        if i > 1 {
            let (head, tail) = a.split_at_mut(i * n);
            let u = &mut tail[..i]; // row i over columns 0..i
            let scale: f64 = u.iter().map(|x| x.abs()).sum();
            if scale <= negligible {
                e[i] = u[i - 1];
            } else {
                let inv = 1.0 / scale;
                let mut h = 0.0;
                for v in u.iter_mut() {
                    *v *= inv;
                    h += *v * *v;
                }
                let f = u[i - 1];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                u[i - 1] = f - g;
                // p = A u / h over the leading i x i block
                let mut f_acc = 0.0;
                for j in 0..i {
                    let row = &head[j * n..j * n + i];
                    let mut dot = 0.0;
                    for (rv, uv) in row.iter().zip(u.iter()) {
                        dot += rv * uv;
                    }
                    let pj = dot / h;
                    p[j] = pj;
                    f_acc += pj * u[j];
                }
                let hh = f_acc / (2.0 * h);
                for (pj, uj) in p[..i].iter_mut().zip(u.iter()) {
                    *pj -= hh * uj;
                }
                // A -= u p^T + p u^T
                for j in 0..i {
                    let (uj, pj) = (u[j], p[j]);
                    let row = &mut head[j * n..j * n + i];
                    for ((rv, &pk), &uk) in row.iter_mut().zip(p[..i].iter()).zip(u.iter()) {
                        *rv -= uj * pk + pj * uk;
                    }
                }
            }
        } else {
            e[i] = a[n];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
}

/// QL iteration with implicit shifts on a tridiagonal matrix; `d` and `e`
/// as produced by [`tridiagonalize`]. An off-diagonal element counts as
/// negligible when `|e| <= eps * (|d_i| + |d_{i+1}|)`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical(format!(
                    "QL iteration failed to converge for eigenvalue {l} after 50 sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut premature = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    premature = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if premature {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, sorted ascending.
pub fn eig_sym(matrix: &SymMatrix) -> Result<Spectrum> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(Spectrum { values: Vec::new() });
    }
    if n == 1 {
        return Ok(Spectrum {
            values: vec![matrix.get(0, 0)],
        });
    }
    let mut a = matrix.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, n, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, n)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalue NaN"));
    Ok(Spectrum { values: d })
}

/// Empirical spectral distribution: the uniform measure on the scaled
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct Esd {
    values: Vec<f64>, // sorted ascending
}

impl Esd {
    pub fn from_spectrum(spectrum: &Spectrum, scale: f64) -> Self {
        Esd {
            values: spectrum.eigenvalues().iter().map(|l| l * scale).collect(),
        }
    }

    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|x, y| x.partial_cmp(y).expect("NaN sample"));
        Esd { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Drop the `k` samples of largest modulus (outlier removal for
    /// rank-one-perturbed ensembles).
    pub fn drop_top_modulus(&self, k: usize) -> Esd {
        let mut keep = self.values.clone();
        for _ in 0..k.min(keep.len()) {
            let first = keep.first().map(|x| x.abs()).unwrap_or(0.0);
            let last = keep.last().map(|x| x.abs()).unwrap_or(0.0);
            if first >= last {
                keep.remove(0);
            } else {
                keep.pop();
            }
        }
        Esd { values: keep }
    }

    /// k-th sample moment `(1/N) sum x_i^k`.
    pub fn moment(&self, k: u32) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values
            .iter()
            .map(|x| x.powi(k as i32))
            .sum::<f64>()
            / self.values.len() as f64
    }

    /// Right-continuous empirical CDF.
    pub fn empirical_cdf(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= x);
        count as f64 / self.values.len() as f64
    }

    /// Kolmogorov-Smirnov distance against a reference CDF, evaluated at
    /// every sample point from both one-sided limits of the empirical CDF.
    pub fn ks<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.values.len() as f64;
        let mut sup: f64 = 0.0;
        for (i, &x) in self.values.iter().enumerate() {
            let f = cdf(x);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            sup = sup.max(above.abs()).max(below.abs());
        }
        sup
    }
}

/// Histogram with normalized bin densities (they integrate to one over
/// the binned samples).
#[derive(Clone, Debug)]
pub struct Histogram {
    pub edges: Vec<f64>, // len = bins + 1
    pub counts: Vec<u64>,
    pub densities: Vec<f64>,
    /// Samples outside the requested window, reported rather than
    /// silently dropped.
    pub outliers: u64,
}

impl Histogram {
    /// Bin samples over `[lo, hi]` into `bins` equal-width cells.
    /// Samples outside the window count as outliers; densities are
    /// normalized over the in-window mass.
    pub fn with_bins(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
        if bins == 0 || !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::Config("histogram needs bins >= 1 and hi > lo".into()));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        let mut outliers = 0u64;
        for &v in values {
            if v < lo || v > hi {
                outliers += 1;
                continue;
            }
            let mut b = ((v - lo) / width) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b] += 1;
        }
        let inside: u64 = counts.iter().sum();
        let densities = counts
            .iter()
            .map(|&c| {
                if inside == 0 {
                    0.0
                } else {
                    c as f64 / (inside as f64 * width)
                }
            })
            .collect();
        let edges = (0..=bins).map(|b| lo + b as f64 * width).collect();
        Ok(Histogram {
            edges,
            counts,
            densities,
            outliers,
        })
    }

    /// Freedman-Diaconis binning over the sample range (or a given
    /// window).
    pub fn freedman_diaconis(values: &[f64], window: Option<(f64, f64)>) -> Result<Histogram> {
        if values.is_empty() {
            return Err(Error::Config("histogram of an empty sample".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|x, y| x.partial_cmp(y).expect("NaN sample"));
        let (lo, hi) = window.unwrap_or((sorted[0], *sorted.last().unwrap()));
        let n = sorted.len();
        let q = |p: f64| sorted[(p * (n - 1) as f64).round() as usize];
        let iqr = q(0.75) - q(0.25);
        let spread = hi - lo;
        let bins = if iqr > 0.0 && spread > 0.0 {
            let h = 2.0 * iqr / (n as f64).cbrt();
            ((spread / h).ceil() as usize).clamp(1, 400)
        } else {
            1
        };
        let (lo, hi) = if spread > 0.0 {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        };
        Histogram::with_bins(&sorted, bins, lo, hi)
    }

    /// `sum(width * density)` — equals one whenever any sample fell
    /// inside the window.
    pub fn density_integral(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| (w[1] - w[0]) * d)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build, EnsembleSpec};
    use crate::laws::sc_cdf;
    use crate::sampling::{derive_stream, RngStream, ScalarDist};

    fn matrix_from_rows(rows: &[&[f64]]) -> SymMatrix {
        let n = rows.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set_sym(i, j, rows[i][j]);
            }
        }
        m
    }

    #[test]
    fn small_closed_forms() {
        let m = matrix_from_rows(&[&[-3.0, 0.0], &[0.0, 1.0]]);
        let s = eig_sym(&m).unwrap();
        assert!((s.eigenvalues()[0] + 3.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
        assert_eq!(s.op_norm(), 3.0);

        let m = matrix_from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = eig_sym(&m).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_spectrum_is_exact() {
        let n = 5;
        let m = build(&EnsembleSpec::RankOne, n, &RngStream::new(0)).unwrap();
        let s = eig_sym(&m).unwrap();
        let ev = s.eigenvalues();
        for &l in &ev[..n - 1] {
            assert!(l.abs() < 1e-12 * n as f64, "zero eigenvalue came out {l}");
        }
        assert!((ev[n - 1] - n as f64).abs() < 1e-12 * n as f64);
        assert_eq!(s.op_norm(), ev[n - 1]);
        assert!(s.second_norm().unwrap() < 1e-12 * n as f64);

        // scaled ESD is (n-1)/n mass at zero plus 1/n at sqrt(n)
        let esd = Esd::from_spectrum(&s, 1.0 / (n as f64).sqrt());
        assert!((esd.empirical_cdf(0.5) - 0.8).abs() < 1e-15);
        assert!((esd.values()[n - 1] - (n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn second_norm_cases() {
        let s = Spectrum::from_sorted(vec![-3.0, 1.0, 2.0]);
        assert_eq!(s.second_norm().unwrap(), 2.0);
        let s = Spectrum::from_sorted(vec![-1.0, -1.0]);
        assert_eq!(s.second_norm().unwrap(), 1.0);
        let s = Spectrum::from_sorted(vec![0.5]);
        assert!(s.second_norm().is_err());
        let s = Spectrum::from_sorted(vec![0.0, 0.0, 0.0]);
        assert_eq!(s.op_norm(), 0.0);
    }

    #[test]
    fn trace_identities_on_random_matrices() {
        let stream = derive_stream(41, &[("spectra", 0)]);
        for rep in 0..12u64 {
            let n = 20 + 7 * rep as usize;
            let m = build(
                &EnsembleSpec::Wigner {
                    dist: ScalarDist::StdGaussian,
                },
                n,
                &stream.child("rep", rep),
            )
            .unwrap();
            let s = eig_sym(&m).unwrap();
            let tol = 1e-9 * n as f64 * s.op_norm().max(1.0);
            assert!((s.sum() - m.trace()).abs() < tol, "trace identity");
            assert!(
                (s.sum_squares() - m.frobenius_sq()).abs() < tol,
                "frobenius identity"
            );
            // (1/N) tr M^2 <= ||M||^2 <= tr M^2
            let mean_sq = s.sum_squares() / n as f64;
            assert!(mean_sq <= s.op_norm().powi(2) + tol);
            assert!(s.op_norm().powi(2) <= s.sum_squares() + tol);
        }
    }

    /// Characteristic polynomial coefficients via Faddeev-LeVerrier
    /// (exact in the traces of matrix powers).
    fn char_poly(m: &SymMatrix) -> Vec<f64> {
        let n = m.dim();
        let mut power = vec![0.0; n * n];
        for i in 0..n {
            power[i * n + i] = 1.0;
        }
        let mut traces = Vec::new(); // tr(M^1), ..., tr(M^n)
        for _ in 0..n {
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    let mik = m.get(i, k);
                    for j in 0..n {
                        next[i * n + j] += mik * power[k * n + j];
                    }
                }
            }
            power = next;
            traces.push((0..n).map(|i| power[i * n + i]).sum::<f64>());
        }
        // Newton's identities: c_0 = 1, c_k = -(1/k) sum_{i=1..k} c_{k-i} p_i
        let mut coeffs = vec![1.0];
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += coeffs[k - i] * traces[i - 1];
            }
            coeffs.push(-acc / k as f64);
        }
        coeffs // p(x) = sum coeffs[k] x^{n-k}
    }

    fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    /// All real roots of a polynomial with all-real roots, by recursive
    /// bracketing on the roots of the derivative plus bisection.
    fn real_roots(coeffs: &[f64]) -> Vec<f64> {
        let degree = coeffs.len() - 1;
        if degree == 1 {
            return vec![-coeffs[1] / coeffs[0]];
        }
        let deriv: Vec<f64> = coeffs[..degree]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (degree - i) as f64)
            .collect();
        let critical = real_roots(&deriv);
        let bound = 1.0
            + coeffs[1..]
                .iter()
                .map(|c| (c / coeffs[0]).abs())
                .fold(0.0, f64::max);
        let mut brackets = vec![-bound];
        brackets.extend(critical);
        brackets.push(bound);
        let mut roots = Vec::new();
        for w in brackets.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (flo, fhi) = (eval_poly(coeffs, lo), eval_poly(coeffs, hi));
            if flo == 0.0 {
                roots.push(lo);
                continue;
            }
            if flo * fhi > 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval_poly(coeffs, mid) * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        roots
    }

    #[test]
    fn matches_characteristic_polynomial_roots() {
        let stream = derive_stream(43, &[("oracle", 0)]);
        let mut checked = 0;
        for rep in 0..300u64 {
            let n = 2 + (rep % 3) as usize; // 2, 3, 4
            let m = build(
                &EnsembleSpec::Wigner {
                    dist: ScalarDist::StdGaussian,
                },
                n,
                &stream.child("rep", rep),
            )
            .unwrap();
            let s = eig_sym(&m).unwrap();
            let mut roots = real_roots(&char_poly(&m));
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(roots.len(), n, "root finder lost a root at rep {rep}");
            for (l, r) in s.eigenvalues().iter().zip(&roots) {
                assert!((l - r).abs() < 1e-10, "rep {rep}: {l} vs {r}");
            }
            checked += 1;
        }
        assert_eq!(checked, 300);
    }

    #[test]
    fn repeated_and_clustered_eigenvalues() {
        // diag(2, 2, 2) plus a tiny symmetric perturbation
        let mut m = SymMatrix::zeros(3);
        for i in 0..3 {
            m.set_sym(i, i, 2.0);
        }
        m.set_sym(0, 1, 1e-13);
        let s = eig_sym(&m).unwrap();
        for &l in s.eigenvalues() {
            assert!((l - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_statistic_examples() {
        // ESD against its own empirical CDF: sup is 1/n
        let esd = Esd::from_values(vec![0.1, 0.4, 0.9, 1.3]);
        let own = esd.clone();
        let d = esd.ks(|x| own.empirical_cdf(x));
        assert!((d - 0.25).abs() < 1e-15);

        // point mass at zero against the standard semicircle: jump of 1/2
        let point = Esd::from_values(vec![0.0; 64]);
        let d = point.ks(|x| sc_cdf(1.0, x));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn esd_moments() {
        let esd = Esd::from_values(vec![-1.0, 0.0, 2.0]);
        assert_eq!(esd.moment(0), 1.0);
        assert!((esd.moment(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((esd.moment(2) - 5.0 / 3.0).abs() < 1e-15);
        let dropped = esd.drop_top_modulus(1);
        assert_eq!(dropped.values(), &[-1.0, 0.0]);
    }

    #[test]
    fn second_moment_is_scaled_frobenius() {
        let stream = derive_stream(44, &[("esd", 0)]);
        let n = 30;
        let m = build(
            &EnsembleSpec::Wigner {
                dist: ScalarDist::Rademacher,
            },
            n,
            &stream,
        )
        .unwrap();
        let s = eig_sym(&m).unwrap();
        let scale = 1.0 / (n as f64).sqrt();
        let esd = Esd::from_spectrum(&s, scale);
        let expect = m.frobenius_sq() * scale * scale / n as f64;
        assert!((esd.moment(2) - expect).abs() < 1e-9);
    }

    #[test]
    fn histogram_normalization_and_outliers() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64) / 250.0 - 2.0).collect();
        let h = Histogram::freedman_diaconis(&values, None).unwrap();
        assert!((h.density_integral() - 1.0).abs() < 1e-6);
        assert_eq!(h.outliers, 0);

        let h = Histogram::with_bins(&values, 10, -1.0, 1.0).unwrap();
        assert!(h.outliers > 0);
        assert!((h.density_integral() - 1.0).abs() < 1e-6);

        // degenerate sample still yields a valid histogram
        let h = Histogram::freedman_diaconis(&[1.0, 1.0, 1.0], None).unwrap();
        assert!((h.density_integral() - 1.0).abs() < 1e-12);
    }
}
