//! Closed-form limit laws: the semicircle family, finite mixtures of
//! semicircles (with point masses for zero-variance components), and the
//! Curie-Weiss limiting variance.

use crate::curie_weiss::solve_m;
use crate::error::{Error, Result};
use crate::moments::catalan;
use std::f64::consts::PI;

/// Semicircle distribution with variance `v`: density
/// `sqrt(4v - x^2) / (2 pi v)` on `[-2 sqrt(v), 2 sqrt(v)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Semicircle {
    v: f64,
}

impl Semicircle {
    pub fn new(v: f64) -> Result<Self> {
        if v > 0.0 && v.is_finite() {
            Ok(Semicircle { v })
        } else {
            Err(Error::Config(format!(
                "semicircle variance must be positive, got {v}"
            )))
        }
    }

    pub fn variance(&self) -> f64 {
        self.v
    }

    pub fn radius(&self) -> f64 {
        2.0 * self.v.sqrt()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let r2 = 4.0 * self.v - x * x;
        if r2 <= 0.0 {
            0.0
        } else {
            r2.sqrt() / (2.0 * PI * self.v)
        }
    }

    /// Antiderivative of the density:
    /// `1/2 + x sqrt(4v - x^2) / (4 pi v) + asin(x / (2 sqrt v)) / pi`.
    pub fn cdf(&self, x: f64) -> f64 {
        let r = self.radius();
        if x <= -r {
            0.0
        } else if x >= r {
            1.0
        } else {
            0.5 + x * (4.0 * self.v - x * x).sqrt() / (4.0 * PI * self.v)
                + (x / r).asin() / PI
        }
    }

    /// `v^{k/2} C_{k/2}` for even `k`, zero for odd `k`.
    pub fn moment(&self, k: u32) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            self.v.powi(k as i32 / 2) * catalan(k / 2) as f64
        }
    }
}

pub fn sc_pdf(v: f64, x: f64) -> f64 {
    Semicircle { v }.pdf(x)
}

pub fn sc_cdf(v: f64, x: f64) -> f64 {
    Semicircle { v }.cdf(x)
}

pub fn sc_moment(v: f64, k: u32) -> f64 {
    Semicircle { v }.moment(k)
}

/// Finite mixture of semicircles. A component with variance zero is a
/// point mass at the origin (the degenerate limit of the family).
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureSc {
    components: Vec<(f64, f64)>, // (weight, variance)
}

impl MixtureSc {
    pub fn new(components: Vec<(f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("mixture needs at least one component".into()));
        }
        let mut total = 0.0;
        for &(w, v) in &components {
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::Config(format!("mixture weight must be > 0, got {w}")));
            }
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Config(format!(
                    "mixture variance must be >= 0, got {v}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(MixtureSc { components })
    }

    /// Mixture over spin biases: atom `tau` contributes a semicircle of
    /// variance `1 - tau^2`.
    pub fn from_spin_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        MixtureSc::new(
            atoms
                .iter()
                .map(|&(w, tau)| (w, 1.0 - tau * tau))
                .collect(),
        )
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.components
            .iter()
            .map(|&(w, v)| {
                if v == 0.0 {
                    if k == 0 {
                        w
                    } else {
                        0.0
                    }
                } else {
                    w * sc_moment(v, k)
                }
            })
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|&(w, v)| {
                if v == 0.0 {
                    if x >= 0.0 {
                        w
                    } else {
                        0.0
                    }
                } else {
                    w * sc_cdf(v, x)
                }
            })
            .sum()
    }

    /// Density of the absolutely continuous part (atoms excluded).
    pub fn pdf_continuous(&self, x: f64) -> f64 {
        self.components
            .iter()
            .filter(|&&(_, v)| v > 0.0)
            .map(|&(w, v)| w * sc_pdf(v, x))
            .sum()
    }
}

/// Variance of the bulk law for the full Curie-Weiss ensemble:
/// `v(beta) = 1 - m(beta)^2`.
pub fn cw_variance(beta: f64) -> f64 {
    let m = solve_m(beta);
    1.0 - m * m
}

/// A reference law a spectrum can be tested against.
#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    Semicircle(f64),
    Mixture(MixtureSc),
}

impl Law {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Law::Semicircle(v) => sc_cdf(*v, x),
            Law::Mixture(m) => m.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Law::Semicircle(v) => sc_pdf(*v, x),
            Law::Mixture(m) => m.pdf_continuous(x),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Law::Semicircle(v) => format!("sc(v={v})"),
            Law::Mixture(m) => {
                let parts: Vec<String> = m
                    .components()
                    .iter()
                    .map(|(w, v)| format!("{w}*sc(v={v})"))
                    .collect();
                format!("mix({})", parts.join("+"))
            }
        }
    }
}
