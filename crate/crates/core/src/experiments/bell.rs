use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::Result;

use super::{bindings, Preset};

/// Coincidence-normalized correlation between the two analyzers of `fig2`:
/// `(P15 + P26 - P16 - P25) / (P15 + P16 + P25 + P26)`.
pub fn correlation(preset: &Preset, phi1: f64, phi2: f64) -> Result<f64> {
    let rates = preset.gated_rates(&bindings([("phi1", phi1), ("phi2", phi2)]))?;
    let get = |n: &str| rates.get(n).unwrap_or(0.0);
    let (p15, p16, p25, p26) = (get("P15"), get("P16"), get("P25"), get("P26"));
    Ok((p15 + p26 - p16 - p25) / (p15 + p16 + p25 + p26))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    /// `table[x][y]` = E(a_x, b_y) with `a_0 = a`, `a_1 = a'`, `b_0 = b`, `b_1 = b'`.
    pub table: [[f64; 2]; 2],
    pub s: f64,
}

/// `S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|`.
pub fn chsh(preset: &Preset, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<ChshResult> {
    let mut table = [[0.0; 2]; 2];
    for (x, &alpha) in [a, a_prime].iter().enumerate() {
        for (y, &beta) in [b, b_prime].iter().enumerate() {
            table[x][y] = correlation(preset, alpha, beta)?;
        }
    }
    let s = (table[0][0] - table[0][1] + table[1][0] + table[1][1]).abs();
    Ok(ChshResult { table, s })
}

/// Settings `(a, a', b, b')` that maximize `S` for a correlation of the form
/// `+-cos(phi1 + phi2)`.
pub fn optimal_chsh_settings() -> (f64, f64, f64, f64) {
    (0.0, FRAC_PI_2, -FRAC_PI_4, -3.0 * FRAC_PI_4)
}
