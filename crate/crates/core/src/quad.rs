//! Adaptive Gauss-Kronrod quadrature (15-point Kronrod / 7-point Gauss).

use crate::error::{Error, Result};

// QUADPACK dqk15 nodes and weights (positive half of [-1, 1]).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Kronrod-15 panel: returns `(kronrod, |kronrod - gauss|)`.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        kron += WGK[i] * (f1 + f2);
        // odd Kronrod indices are the embedded Gauss nodes
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    (kron * h, (kron - gauss).abs() * h)
}

/// Integrate `f` over `[a, b]`, globally adaptive: the panel with the
/// largest Kronrod error estimate is bisected until the total estimate
/// drops below `max(abs_tol, rel_tol * |I|)` or the subdivision budget
/// runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_PANELS: usize = 4096;
    let mut panels = vec![(a, b, kronrod15(f, a, b))];
    loop {
        let total: f64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        let tol = abs_tol
            .max(rel_tol * total.abs())
            .max(f64::EPSILON * total.abs());
        if err <= tol {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Numerical(format!(
                "quadrature did not converge on [{a}, {b}] (error estimate {err:.3e})"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).expect("NaN error estimate"))
            .map(|(i, _)| i)
            .expect("nonempty panel list");
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Numerical(format!(
                "quadrature stalled on a degenerate panel [{lo}, {hi}]"
            )));
        }
        panels.push((lo, mid, kronrod15(f, lo, mid)));
        panels.push((mid, hi, kronrod15(f, mid, hi)));
    }
}
