//! Test-only oracles, independent of the library's evolution engines.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mzwave::experiments::Preset;
use mzwave::{Bindings, ModeUnitary};
use num_complex::Complex64;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Output amplitudes of `U` acting on the occupation `input`, by expanding
/// `prod_k (sum_o U[o][m_k] a_o^dag)` over every ordered choice of output
/// modes and collecting monomials.
pub fn brute_force_amplitudes(u: &ModeUnitary, input: &[usize]) -> BTreeMap<Vec<usize>, Complex64> {
    let modes = u.dim();
    let photons: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(m, &n)| std::iter::repeat_n(m, n))
        .collect();
    let n = photons.len();
    let mut monomials: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    let total = modes.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut counts = vec![0; modes];
        let mut coeff = Complex64::new(1.0, 0.0);
        for &src in &photons {
            let out = c % modes;
            c /= modes;
            counts[out] += 1;
            coeff *= u.get(out, src);
        }
        *monomials.entry(counts).or_default() += coeff;
    }
    let input_norm: f64 = input.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
    monomials
        .into_iter()
        .map(|(counts, coeff)| {
            let out_norm: f64 = counts.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            (counts, coeff * out_norm / input_norm)
        })
        .collect()
}

/// Full output distribution of a preset, from the brute-force expansion.
pub fn brute_force_distribution(preset: &Preset, bindings: &Bindings) -> BTreeMap<Vec<usize>, f64> {
    let mut input = vec![0; preset.circuit.modes()];
    for &(m, n) in preset.circuit.sources() {
        input[m] = n;
    }
    let u = preset.circuit.compose(bindings).unwrap();
    brute_force_amplitudes(&u, &input)
        .into_iter()
        .map(|(k, a)| (k, a.norm_sqr()))
        .collect()
}

/// Sum of brute-force probabilities over outputs accepted by `keep`.
pub fn brute_force_probability(
    preset: &Preset,
    bindings: &Bindings,
    keep: impl Fn(&[usize]) -> bool,
) -> f64 {
    brute_force_distribution(preset, bindings)
        .into_iter()
        .filter(|(k, _)| keep(k))
        .map(|(_, p)| p)
        .sum()
}

pub fn grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| std::f64::consts::TAU * k as f64 / n as f64)
        .collect()
}
