use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{Bindings, Preset};

pub const MIN_SCAN_STEPS: usize = 32;

const GRID_TOL: f64 = 1e-9;
/// Harmonics weaker than this are treated as absent.
const HARMONIC_FLOOR: f64 = 1e-12;

/// Outcome probabilities sampled along a phase sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Parameters driven together by the sweep.
    pub params: Vec<String>,
    pub grid: Vec<f64>,
    pub herald_probability: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl ScanResult {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Sweeps `params` together over the uniform grid `[0, 2pi)`.
pub fn scan_phase(
    preset: &Preset,
    params: &[&str],
    fixed: &Bindings,
    steps: usize,
) -> Result<ScanResult> {
    if steps < MIN_SCAN_STEPS {
        return Err(Error::TooFewSamples {
            min: MIN_SCAN_STEPS,
            got: steps,
        });
    }
    scan_range(preset, params, fixed, 0.0, TAU, steps)
}

/// Sweeps `params` together over `from + k (to - from) / steps`, `k < steps`.
///
/// Grid points are evaluated in parallel; rows come back in grid order.
pub fn scan_range(
    preset: &Preset,
    params: &[&str],
    fixed: &Bindings,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<ScanResult> {
    for p in params {
        if !preset.circuit.params().contains(*p) {
            return Err(Error::UndeclaredParameter(p.to_string()));
        }
    }
    let step = (to - from) / steps as f64;
    let grid: Vec<f64> = (0..steps).map(|k| from + k as f64 * step).collect();
    let rows = grid
        .par_iter()
        .map(|&phi| {
            let mut b = fixed.clone();
            for p in params {
                b.insert(p.to_string(), phi);
            }
            preset.gated_rates(&b)
        })
        .collect::<Result<Vec<_>>>()?;
    let columns = preset
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (o.name.clone(), rows.iter().map(|r| r.rates[i].1).collect()))
        .collect();
    Ok(ScanResult {
        params: params.iter().map(|p| p.to_string()).collect(),
        grid,
        herald_probability: rows.iter().map(|r| r.herald_probability).collect(),
        columns,
    })
}

/// Dominant Fourier harmonic of a fringe sampled over one full period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    /// `None` when the samples are flat.
    pub harmonic: Option<usize>,
    pub mean: f64,
    pub magnitude: f64,
    /// Argument of the dominant coefficient `c_k`.
    pub phase: f64,
    pub visibility: f64,
    /// Largest deviation of the samples from `c_0 + 2 Re(c_k e^{ik phi})`.
    pub residual: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let n = grid.len();
    let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let uniform = grid
        .iter()
        .enumerate()
        .all(|(j, &g)| (g - grid[0] - j as f64 * step).abs() <= GRID_TOL);
    if !uniform || (step * n as f64 - TAU).abs() > GRID_TOL {
        return Err(Error::NonUniformGrid);
    }
    Ok(())
}

pub fn fit_fringe(grid: &[f64], samples: &[f64]) -> Result<FringeFit> {
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    let n = samples.len();
    if n < MIN_SCAN_STEPS {
        return Err(Error::TooFewSamples {
            min: MIN_SCAN_STEPS,
            got: n,
        });
    }
    check_grid(grid)?;

    let coefficient = |k: usize| -> Complex64 {
        grid.iter()
            .zip(samples)
            .map(|(&phi, &y)| y * Complex64::from_polar(1.0, -(k as f64) * phi))
            .sum::<Complex64>()
            / n as f64
    };
    let mean = coefficient(0).re;
    let (mut best_k, mut best_c) = (0, Complex64::new(0.0, 0.0));
    for k in 1..=n / 2 {
        let c = coefficient(k);
        if c.norm() > best_c.norm() {
            best_k = k;
            best_c = c;
        }
    }
    let harmonic = (best_c.norm() > HARMONIC_FLOOR).then_some(best_k);

    // the Nyquist term has no conjugate partner
    let fold = if 2 * best_k == n { 1.0 } else { 2.0 };
    let residual = grid
        .iter()
        .zip(samples)
        .map(|(&phi, &y)| {
            let model = match harmonic {
                Some(k) => mean + fold * (best_c * Complex64::from_polar(1.0, k as f64 * phi)).re,
                None => mean,
            };
            (y - model).abs()
        })
        .fold(0.0, f64::max);

    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let visibility = if max + min > 0.0 {
        ((max - min) / (max + min)).clamp(0.0, 1.0)
    } else {
        0.0
    };

    Ok(FringeFit {
        harmonic,
        mean,
        magnitude: if harmonic.is_some() {
            best_c.norm()
        } else {
            0.0
        },
        phase: best_c.arg(),
        visibility,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    #[test]
    fn analytic_two_phi_fringe() {
        let g = grid(64);
        let y: Vec<f64> = g.iter().map(|p| (1.0 - (2.0 * p).cos()) / 4.0).collect();
        let fit = fit_fringe(&g, &y).unwrap();
        assert_eq!(fit.harmonic, Some(2));
        assert!((fit.mean - 0.25).abs() < 1e-12);
        assert!((fit.magnitude - 0.125).abs() < 1e-12);
        assert!((fit.visibility - 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn flat_samples_have_no_harmonic() {
        let g = grid(32);
        let fit = fit_fringe(&g, &[0.3; 32]).unwrap();
        assert_eq!(fit.harmonic, None);
        assert_eq!(fit.visibility, 0.0);
        assert!(fit.residual < 1e-15);
    }

    #[test]
    fn grid_checks() {
        assert!(matches!(
            fit_fringe(&grid(16), &[0.0; 16]),
            Err(Error::TooFewSamples { min: 32, got: 16 })
        ));
        let mut g = grid(40);
        g[7] += 1e-3;
        assert_eq!(fit_fringe(&g, &[0.0; 40]), Err(Error::NonUniformGrid));
        let half: Vec<f64> = grid(40).iter().map(|p| p / 2.0).collect();
        assert_eq!(fit_fringe(&half, &[0.0; 40]), Err(Error::NonUniformGrid));
    }

    #[test]
    fn nyquist_harmonic_reconstructs() {
        let g = grid(32);
        let y: Vec<f64> = g.iter().map(|p| 0.5 + 0.5 * (16.0 * p).cos()).collect();
        let fit = fit_fringe(&g, &y).unwrap();
        assert_eq!(fit.harmonic, Some(16));
        assert!(fit.residual < 1e-9);
    }
}
