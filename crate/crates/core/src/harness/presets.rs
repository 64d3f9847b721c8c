//! Named experiment presets, one per headline limit theorem studied by
//! the laboratory. Each preset is an ordinary config-text document, so
//! `--preset` and `--config` go through the same parser.

use super::config::{parse_config, ExperimentConfig};
use crate::error::{Error, Result};

pub const PRESETS: &[(&str, &str)] = &[
    (
        "wigner-semicircle",
        "name = wigner-semicircle\nseed = 1729\nsizes = 1024\nreplicas = 20\nk_max = 6\n\
         cell.rademacher.ensemble = wigner\ncell.rademacher.dist = rademacher\n\
         cell.rademacher.ks = sc:1\n\
         cell.gaussian.ensemble = wigner\ncell.gaussian.dist = gaussian\n\
         cell.gaussian.ks = sc:1\n",
    ),
    (
        "wigner-norm",
        "name = wigner-norm\nseed = 1729\nsizes = 2048\nreplicas = 10\nk_max = 2\n\
         cell.rademacher.ensemble = wigner\ncell.rademacher.dist = rademacher\n\
         cell.rademacher.ks = sc:1\n",
    ),
    (
        "band-sub-linear",
        "name = band-sub-linear\nseed = 1729\nsizes = 2048\nreplicas = 5\nk_max = 6\n\
         cell.band.ensemble = band\ncell.band.dist = rademacher\n\
         cell.band.band = power:1:0.6\ncell.band.periodic = false\ncell.band.ks = sc:1\n",
    ),
    (
        "band-linear-nonperiodic",
        "name = band-linear-nonperiodic\nseed = 1729\nsizes = 2048\nreplicas = 10\nk_max = 6\n\
         cell.band.ensemble = band\ncell.band.dist = rademacher\n\
         cell.band.band = linear:0.125\ncell.band.periodic = false\ncell.band.ks = sc:1\n",
    ),
    (
        "band-periodic",
        "name = band-periodic\nseed = 1729\nsizes = 2048\nreplicas = 5\nk_max = 6\n\
         cell.band.ensemble = band\ncell.band.dist = rademacher\n\
         cell.band.band = linear:0.125\ncell.band.periodic = true\ncell.band.ks = sc:1\n",
    ),
    (
        "profile-catalano-pair",
        "name = profile-catalano-pair\nseed = 1729\nsizes = 2048\nreplicas = 8\nk_max = 6\n\
         cell.symmetric.ensemble = profile-band\ncell.symmetric.dist = rademacher\n\
         cell.symmetric.profile = 0.25:1,0.75:0,1:1\ncell.symmetric.ks = sc:1\n\
         cell.one-sided.ensemble = profile-band\ncell.one-sided.dist = rademacher\n\
         cell.one-sided.profile = 0.25:1,1:0\ncell.one-sided.ks = sc:1\n",
    ),
    (
        "sparse-blocks",
        "name = sparse-blocks\nseed = 1729\nsizes = 2048\nreplicas = 5\nk_max = 6\n\
         cell.sym.ensemble = sparse-block\ncell.sym.dist = rademacher\n\
         cell.sym.pattern = sym\ncell.sym.ks = sc:1\n\
         cell.antisym.ensemble = sparse-block\ncell.antisym.dist = rademacher\n\
         cell.antisym.pattern = antisym\ncell.antisym.ks = sc:1\n",
    ),
    (
        "toeplitz",
        "name = toeplitz\nseed = 1729\nsizes = 1024\nreplicas = 20\nk_max = 6\n\
         cell.toeplitz.ensemble = diagonal-process\ncell.toeplitz.process = const:rademacher\n\
         cell.toeplitz.ks = sc:1\n",
    ),
    (
        "ar1-diagonals",
        "name = ar1-diagonals\nseed = 1729\nsizes = 1024\nreplicas = 6\nk_max = 6\n\
         cell.ar1.ensemble = diagonal-process\ncell.ar1.process = ar1:0.5\ncell.ar1.ks = sc:1\n",
    ),
    (
        "markov-diagonal-filling",
        "name = markov-diagonal-filling\nseed = 1729\nsizes = 1024\nreplicas = 6\nk_max = 6\n\
         cell.markov.ensemble = filled-process\ncell.markov.process = markov:0.25\n\
         cell.markov.filling = diagonal\ncell.markov.ks = sc:1\n",
    ),
    (
        "cw-diagonal-sweep",
        "name = cw-diagonal-sweep\nseed = 1729\nsizes = 1024\nreplicas = 8\nk_max = 6\n\
         cell.subcritical.ensemble = diagonal-cw\ncell.subcritical.beta = 0.5\n\
         cell.subcritical.ks = sc:1\n\
         cell.supercritical.ensemble = diagonal-cw\ncell.supercritical.beta = 2\n\
         cell.supercritical.ks = sc:1\n",
    ),
    (
        "cw-full-sweep",
        "name = cw-full-sweep\nseed = 1729\nsizes = 1024\nreplicas = 6\nk_max = 6\n\
         cell.subcritical.ensemble = full-cw\ncell.subcritical.beta = 0.5\n\
         cell.subcritical.ks = sc:1\n\
         cell.critical.ensemble = full-cw\ncell.critical.beta = 1\ncell.critical.ks = sc:1\n\
         cell.supercritical.ensemble = full-cw\ncell.supercritical.beta = 2\n\
         cell.supercritical.ks = cw:2\ncell.supercritical.drop_top = 1\n",
    ),
    (
        "cw-norm-sweep",
        "name = cw-norm-sweep\nseed = 1729\nsizes = 256, 512, 1024\nreplicas = 4\nk_max = 2\n\
         cell.subcritical.ensemble = full-cw\ncell.subcritical.beta = 0.5\n\
         cell.subcritical.scaling = sqrt-n\n\
         cell.critical.ensemble = full-cw\ncell.critical.beta = 1\n\
         cell.critical.scaling = pow:0.6\n\
         cell.supercritical.ensemble = full-cw\ncell.supercritical.beta = 2\n\
         cell.supercritical.scaling = inv-n\n\
         cell.supercritical-root.ensemble = full-cw\ncell.supercritical-root.beta = 2\n\
         cell.supercritical-root.scaling = sqrt-n\n",
    ),
    (
        "exchangeable-mixture",
        "name = exchangeable-mixture\nseed = 1729\nsizes = 1024\nreplicas = 20\nk_max = 6\n\
         cell.mixture.ensemble = exchangeable-spin\ncell.mixture.atoms = 0.5:0,0.5:0.8\n\
         cell.mixture.ks = mix:0.5:1,0.5:0.36\ncell.mixture.drop_top = 1\n",
    ),
    (
        "rank-one",
        "name = rank-one\nseed = 1729\nsizes = 100\nreplicas = 1\nk_max = 2\n\
         cell.ones.ensemble = rank-one\n",
    ),
];

/// Names of all available presets.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

/// Resolve a preset by name.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match PRESETS.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => parse_config(text),
        None => Err(Error::Config(format!(
            "unknown preset '{name}'; available: {}",
            preset_names().join(", ")
        ))),
    }
}
