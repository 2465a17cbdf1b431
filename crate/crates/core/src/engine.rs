//! State evolution and post-selection.
//!
//! Two independent engines evolve Fock states: [`evolve_full`] expands every
//! basis transition into a permanent of the composed transfer matrix, and
//! [`evolve_elementwise`] pushes amplitudes through one element at a time by
//! binomial expansion of the transformed creation operators. Each serves as
//! the other's oracle.

use std::sync::Arc;

use num_complex::Complex64;

use crate::circuit::{Bindings, Circuit, Element, ModeUnitary};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, StateVector};
use crate::permanent::{permanent, SquareMatrix};

pub const MAX_PHOTONS: usize = 6;
pub const MAX_MODES: usize = 12;

/// Below this a herald outcome counts as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-20;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_limits(modes: usize, photons: usize) -> Result<()> {
    if photons > MAX_PHOTONS {
        return Err(Error::PhotonLimit {
            photons,
            limit: MAX_PHOTONS,
        });
    }
    if modes > MAX_MODES {
        return Err(Error::ModeLimit {
            modes,
            limit: MAX_MODES,
        });
    }
    Ok(())
}

/// Mode index repeated once per photon: `(2,0,1)` -> `[0,0,2]`.
fn expand_modes(v: &FockVector) -> Vec<usize> {
    v.counts()
        .iter()
        .enumerate()
        .flat_map(|(m, &n)| std::iter::repeat_n(m, n))
        .collect()
}

fn occupation_norm(v: &FockVector) -> f64 {
    v.counts().iter().map(|&n| factorial(n)).product()
}

/// `<output| U |input>` for Fock states.
pub fn transition_amplitude(
    u: &ModeUnitary,
    input: &FockVector,
    output: &FockVector,
) -> Result<Complex64> {
    for v in [input, output] {
        if v.modes() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                got: v.modes(),
            });
        }
    }
    let (n_in, n_out) = (input.photons(), output.photons());
    if n_in != n_out {
        return Err(Error::PhotonNumberMismatch {
            input: n_in,
            output: n_out,
        });
    }
    check_limits(u.dim(), n_in)?;
    Ok(transition_unchecked(
        u,
        &expand_modes(input),
        occupation_norm(input),
        output,
    ))
}

fn transition_unchecked(
    u: &ModeUnitary,
    columns: &[usize],
    input_norm: f64,
    output: &FockVector,
) -> Complex64 {
    let rows = expand_modes(output);
    let sub = SquareMatrix::from_fn(columns.len(), |r, c| u.get(rows[r], columns[c]));
    permanent(&sub) / (input_norm * occupation_norm(output)).sqrt()
}

/// Applies `u` to `psi` through permanents of the full transfer matrix.
pub fn evolve_full(u: &ModeUnitary, psi: &StateVector) -> Result<StateVector> {
    let basis = psi.basis();
    if basis.modes() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: basis.modes(),
        });
    }
    check_limits(basis.modes(), basis.photons())?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (input, amp) in basis.iter().zip(psi.amplitudes()) {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let columns = expand_modes(input);
        let input_norm = occupation_norm(input);
        for (slot, output) in out.iter_mut().zip(basis.iter()) {
            *slot += transition_unchecked(u, &columns, input_norm, output) * amp;
        }
    }
    StateVector::from_amplitudes(Arc::clone(basis), out)
}

/// Applies the circuit element by element, never forming the full matrix.
pub fn evolve_elementwise(
    circuit: &Circuit,
    bindings: &Bindings,
    psi: &StateVector,
) -> Result<StateVector> {
    if psi.basis().modes() != circuit.modes() {
        return Err(Error::DimensionMismatch {
            expected: circuit.modes(),
            got: psi.basis().modes(),
        });
    }
    circuit.check_bindings(bindings)?;
    let mut state = psi.clone();
    for el in circuit.elements() {
        state = apply_element(el, bindings, &state)?;
    }
    Ok(state)
}

fn apply_element(el: &Element, bindings: &Bindings, psi: &StateVector) -> Result<StateVector> {
    let basis = psi.basis();
    match el {
        Element::PhaseShifter(m, phase) => {
            let phi = phase.resolve(bindings)?;
            Ok(apply_diagonal(psi, *m, |n| {
                Complex64::from_polar(1.0, phi * n as f64)
            }))
        }
        Element::Mirror(m) => Ok(apply_diagonal(psi, *m, |n| {
            Complex64::new(0.0, 1.0).powu(n as u32)
        })),
        Element::BeamSplitter(i, j) => {
            let (i, j) = (*i, *j);
            if i == j {
                return Err(Error::SameModes(i));
            }
            let s = std::f64::consts::FRAC_1_SQRT_2;
            // a_i^dag -> t a_i^dag + r a_j^dag, a_j^dag -> r a_i^dag + t a_j^dag
            let t = Complex64::new(s, 0.0);
            let r = Complex64::new(0.0, s);
            let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
            let mut target = Vec::with_capacity(basis.modes());
            for (v, amp) in basis.iter().zip(psi.amplitudes()) {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let (ni, nj) = (v.get(i), v.get(j));
                let total = ni + nj;
                let norm_in = (factorial(ni) * factorial(nj)).sqrt();
                // coefficient of (a_i^dag)^p (a_j^dag)^(total-p)
                let mut coeff = vec![Complex64::new(0.0, 0.0); total + 1];
                for k in 0..=ni {
                    let from_i = binom(ni, k) * t.powu(k as u32) * r.powu((ni - k) as u32);
                    for l in 0..=nj {
                        let from_j = binom(nj, l) * r.powu(l as u32) * t.powu((nj - l) as u32);
                        coeff[k + l] += from_i * from_j;
                    }
                }
                for (p, c) in coeff.into_iter().enumerate() {
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    target.clear();
                    target.extend_from_slice(v.counts());
                    target[i] = p;
                    target[j] = total - p;
                    let scale = (factorial(p) * factorial(total - p)).sqrt() / norm_in;
                    let idx = basis.rank(&FockVector::new(target.clone()))?;
                    out[idx] += c * scale * amp;
                }
            }
            StateVector::from_amplitudes(Arc::clone(basis), out)
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    crate::fock::binomial(n, k) as f64
}

fn apply_diagonal(
    psi: &StateVector,
    mode: usize,
    factor: impl Fn(usize) -> Complex64,
) -> StateVector {
    let amps = psi
        .basis()
        .iter()
        .zip(psi.amplitudes())
        .map(|(v, a)| a * factor(v.get(mode)))
        .collect();
    StateVector::from_amplitudes(Arc::clone(psi.basis()), amps).expect("same basis")
}

/// Per-mode detector constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Exactly(usize),
    Any,
}

impl Constraint {
    pub fn admits(self, n: usize) -> bool {
        match self {
            Constraint::Exactly(k) => k == n,
            Constraint::Any => true,
        }
    }
}

/// Detector readout to post-select on, one constraint per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionPattern(Vec<Constraint>);

impl DetectionPattern {
    pub fn any(modes: usize) -> Self {
        DetectionPattern(vec![Constraint::Any; modes])
    }

    pub fn from_constraints(constraints: Vec<Constraint>) -> Self {
        DetectionPattern(constraints)
    }

    /// `modes`-wide pattern with the listed `(mode, count)` pins.
    pub fn exact(modes: usize, pins: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::any(modes);
        for &(mode, n) in pins {
            p = p.with(mode, n)?;
        }
        Ok(p)
    }

    pub fn with(mut self, mode: usize, n: usize) -> Result<Self> {
        let modes = self.0.len();
        let slot = self
            .0
            .get_mut(mode)
            .ok_or(Error::ModeOutOfRange { mode, modes })?;
        *slot = Constraint::Exactly(n);
        Ok(self)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn matches(&self, v: &FockVector) -> bool {
        self.0.iter().zip(v.counts()).all(|(c, &n)| c.admits(n))
    }

    /// Both patterns at once; `None` when they pin a mode to different counts.
    pub fn intersect(&self, other: &DetectionPattern) -> Option<DetectionPattern> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| match (a, b) {
                (Constraint::Any, c) | (c, Constraint::Any) => Some(*c),
                (Constraint::Exactly(x), Constraint::Exactly(y)) if x == y => Some(*a),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(DetectionPattern)
    }
}

/// Probability that the detectors read out `pattern`.
pub fn pattern_probability(psi: &StateVector, pattern: &DetectionPattern) -> Result<f64> {
    if pattern.modes() != psi.basis().modes() {
        return Err(Error::DimensionMismatch {
            expected: psi.basis().modes(),
            got: pattern.modes(),
        });
    }
    Ok(psi
        .probabilities()
        .filter(|(v, _)| pattern.matches(v))
        .map(|(_, p)| p)
        .sum())
}

/// Result of measuring some modes and keeping the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalResult {
    pub probability: f64,
    /// Original indices of the modes still carried by `reduced_state`.
    pub kept_modes: Vec<usize>,
    pub reduced_state: StateVector,
}

/// Projects onto the herald outcome and renormalizes the unmeasured modes.
pub fn condition(psi: &StateVector, heralds: &[(usize, usize)]) -> Result<ConditionalResult> {
    let basis = psi.basis();
    let modes = basis.modes();
    let mut measured = vec![false; modes];
    for &(mode, _) in heralds {
        if mode >= modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        if measured[mode] {
            return Err(Error::DuplicateHerald(mode));
        }
        measured[mode] = true;
    }
    let kept_modes: Vec<usize> = (0..modes).filter(|&m| !measured[m]).collect();
    let heralded: usize = heralds.iter().map(|h| h.1).sum();
    if heralded > basis.photons() {
        return Err(Error::ZeroProbability);
    }
    let pattern = DetectionPattern::exact(modes, heralds)?;
    let reduced_basis = Arc::new(FockBasis::enumerate(
        kept_modes.len(),
        basis.photons() - heralded,
    ));
    let mut amps = vec![Complex64::new(0.0, 0.0); reduced_basis.len()];
    let mut probability = 0.0;
    for (v, a) in basis.iter().zip(psi.amplitudes()) {
        if !pattern.matches(v) {
            continue;
        }
        probability += a.norm_sqr();
        let reduced = FockVector::new(kept_modes.iter().map(|&m| v.get(m)).collect());
        amps[reduced_basis.rank(&reduced)?] += a;
    }
    if probability <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability);
    }
    let reduced_state = StateVector::from_amplitudes(reduced_basis, amps)?.normalize()?;
    Ok(ConditionalResult {
        probability,
        kept_modes,
        reduced_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::PhaseExpr;

    fn fv(c: &[usize]) -> FockVector {
        FockVector::new(c.to_vec())
    }

    #[test]
    fn hong_ou_mandel_null() {
        let u = ModeUnitary::beam_splitter(2, 0, 1).unwrap();
        let amp = transition_amplitude(&u, &fv(&[1, 1]), &fv(&[1, 1])).unwrap();
        assert!(amp.norm_sqr() <= 1e-30);
        let bunched = transition_amplitude(&u, &fv(&[1, 1]), &fv(&[2, 0])).unwrap();
        assert!((bunched.norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identity_transitions() {
        let u = ModeUnitary::identity(3);
        let basis = FockBasis::enumerate(3, 3);
        for a in basis.iter() {
            for b in basis.iter() {
                let amp = transition_amplitude(&u, a, b).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((amp - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn transition_errors() {
        let u = ModeUnitary::identity(2);
        assert_eq!(
            transition_amplitude(&u, &fv(&[1, 1]), &fv(&[1, 0])),
            Err(Error::PhotonNumberMismatch {
                input: 2,
                output: 1
            })
        );
        let big = ModeUnitary::identity(2);
        assert!(matches!(
            transition_amplitude(&big, &fv(&[7, 0]), &fv(&[7, 0])),
            Err(Error::PhotonLimit { photons: 7, .. })
        ));
    }

    #[test]
    fn phase_shifter_multiplies_by_occupation() {
        let circ = Circuit::builder(2)
            .source(0, 1)
            .source(1, 2)
            .phase(1, PhaseExpr::Literal(0.7))
            .build()
            .unwrap();
        let psi = StateVector::from_sources(2, &[(0, 1), (1, 2)]).unwrap();
        let out = evolve_elementwise(&circ, &Bindings::new(), &psi).unwrap();
        let amp = out.amplitude(&fv(&[1, 2])).unwrap();
        assert!((amp - Complex64::from_polar(1.0, 1.4)).norm() < 1e-15);
    }

    #[test]
    fn elementwise_hom() {
        let circ = Circuit::builder(2)
            .source(0, 1)
            .source(1, 1)
            .bs(0, 1)
            .build()
            .unwrap();
        let psi = StateVector::from_sources(2, &[(0, 1), (1, 1)]).unwrap();
        let out = evolve_elementwise(&circ, &Bindings::new(), &psi).unwrap();
        let full = evolve_full(&circ.compose(&Bindings::new()).unwrap(), &psi).unwrap();
        assert!(out.amplitude(&fv(&[1, 1])).unwrap().norm() < 1e-15);
        for (a, b) in out.amplitudes().iter().zip(full.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pattern_basics() {
        let psi = StateVector::from_sources(3, &[(1, 2)]).unwrap();
        assert!(
            (pattern_probability(&psi, &DetectionPattern::any(3)).unwrap() - 1.0).abs() < 1e-15
        );
        let p = DetectionPattern::exact(3, &[(1, 2)]).unwrap();
        assert_eq!(pattern_probability(&psi, &p).unwrap(), 1.0);
        assert!(pattern_probability(&psi, &DetectionPattern::any(2)).is_err());
        let a = DetectionPattern::exact(3, &[(0, 1)]).unwrap();
        let b = DetectionPattern::exact(3, &[(0, 2)]).unwrap();
        assert!(a.intersect(&b).is_none());
        assert!(a.intersect(&DetectionPattern::any(3)).is_some());
    }

    #[test]
    fn conditioning() {
        let psi = StateVector::from_sources(3, &[(0, 2)]).unwrap();
        let res = condition(&psi, &[(2, 0)]).unwrap();
        assert_eq!(res.probability, 1.0);
        assert_eq!(res.kept_modes, vec![0, 1]);
        assert_eq!(
            res.reduced_state.amplitude(&fv(&[2, 0])).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(condition(&psi, &[(0, 3)]), Err(Error::ZeroProbability));
        assert_eq!(condition(&psi, &[(1, 1)]), Err(Error::ZeroProbability));
        assert_eq!(
            condition(&psi, &[(1, 0), (1, 0)]),
            Err(Error::DuplicateHerald(1))
        );
    }

    #[test]
    fn measuring_every_mode_leaves_vacuum() {
        let psi = StateVector::from_sources(2, &[(0, 1)]).unwrap();
        let res = condition(&psi, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(res.reduced_state.basis().len(), 1);
        assert!(res.kept_modes.is_empty());
    }
}
