//! Apparatus presets, gated rates, fringe fitting and the Bell test.

mod bell;
mod fringe;
mod presets;

pub use bell::{chsh, correlation, optimal_chsh_settings, ChshResult};
pub use fringe::{fit_fringe, scan_phase, scan_range, FringeFit, ScanResult, MIN_SCAN_STEPS};
pub use presets::{
    build, build_fig1, build_fig2, build_fig3, build_ifm, build_sec4, build_single,
    which_path_check, WhichPath, PRESET_NAMES,
};

use std::fmt;
use std::str::FromStr;

use crate::circuit::{Bindings, Circuit};
use crate::engine::{
    condition, evolve_full, pattern_probability, ConditionalResult, DetectionPattern,
    ZERO_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, StateVector};

/// How the bright output channel is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectorModel {
    /// Extra 50-50 splitters fan the channel out to single-photon detectors.
    Cascade,
    /// Ideal photon-number-resolving detectors on the output channels.
    #[default]
    Resolving,
}

impl FromStr for DetectorModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cascade" => Ok(DetectorModel::Cascade),
            "resolving" => Ok(DetectorModel::Resolving),
            other => Err(format!("unknown detector model `{other}`")),
        }
    }
}

impl fmt::Display for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorModel::Cascade => "cascade",
            DetectorModel::Resolving => "resolving",
        })
    }
}

/// A named detector outcome: a disjoint union of patterns, scaled by `weight`.
///
/// Ordered two-photon outcomes such as "one at 1, one at 2" versus "one at 2,
/// one at 1" are the same Fock event; each carries weight 1/2 of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub patterns: Vec<DetectionPattern>,
    pub weight: f64,
    /// Whether this outcome belongs to the preset's complete partition.
    pub partition: bool,
}

impl Outcome {
    pub fn new(name: &str, patterns: Vec<DetectionPattern>) -> Self {
        Outcome {
            name: name.to_string(),
            patterns,
            weight: 1.0,
            partition: true,
        }
    }

    pub fn weighted(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn extra(mut self) -> Self {
        self.partition = false;
        self
    }
}

/// An apparatus together with the outcomes it reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub model: DetectorModel,
    pub circuit: Circuit,
    pub outcomes: Vec<Outcome>,
    /// Number of leading elements before the final recombining splitters.
    pub interior_len: usize,
}

/// Herald probability plus outcome probabilities conditioned on it.
#[derive(Debug, Clone, PartialEq)]
pub struct GatedRates {
    pub herald_probability: f64,
    pub rates: Vec<(String, f64)>,
}

impl GatedRates {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.rates.iter().find(|(n, _)| n == name).map(|r| r.1)
    }
}

impl Preset {
    /// Wraps an arbitrary circuit: one outcome per Fock state of the
    /// unheralded modes, named `n` followed by the counts, e.g. `n1_0`.
    pub fn from_circuit(name: &str, circuit: Circuit) -> Preset {
        let modes = circuit.modes();
        let heralded: Vec<usize> = circuit.heralds().iter().map(|h| h.0).collect();
        let kept: Vec<usize> = (0..modes).filter(|m| !heralded.contains(m)).collect();
        let remaining = circuit.photons() - circuit.heralds().iter().map(|h| h.1).sum::<usize>();
        let outcomes = FockBasis::enumerate(kept.len(), remaining)
            .iter()
            .map(|v| {
                let pins: Vec<(usize, usize)> = kept
                    .iter()
                    .copied()
                    .zip(v.counts().iter().copied())
                    .collect();
                let label = v
                    .counts()
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join("_");
                let pattern =
                    DetectionPattern::exact(modes, &pins).expect("kept modes are in range");
                Outcome::new(&format!("n{label}"), vec![pattern])
            })
            .collect();
        let interior_len = circuit.elements().len();
        Preset {
            name: name.to_string(),
            model: DetectorModel::Resolving,
            circuit,
            outcomes,
            interior_len,
        }
    }

    pub fn herald_pattern(&self) -> DetectionPattern {
        DetectionPattern::exact(self.circuit.modes(), self.circuit.heralds())
            .expect("heralds validated with the circuit")
    }

    pub fn input_state(&self) -> Result<StateVector> {
        StateVector::from_sources(self.circuit.modes(), self.circuit.sources())
    }

    /// Output state of the full apparatus.
    pub fn output_state(&self, bindings: &Bindings) -> Result<StateVector> {
        let u = self.circuit.compose(bindings)?;
        evolve_full(&u, &self.input_state()?)
    }

    /// Heralded state of the modes inside the interferometer, before recombination.
    pub fn interior_state(&self, bindings: &Bindings) -> Result<ConditionalResult> {
        let inner = self.circuit.truncated(self.interior_len);
        let u = inner.compose(bindings)?;
        let psi = evolve_full(&u, &self.input_state()?)?;
        condition(&psi, self.circuit.heralds())
    }

    pub fn outcome_names(&self) -> Vec<&str> {
        self.outcomes.iter().map(|o| o.name.as_str()).collect()
    }

    /// Probability of `outcome` jointly with the heralds, on a given output state.
    pub fn joint_probability(&self, psi: &StateVector, outcome: &Outcome) -> Result<f64> {
        let herald = self.herald_pattern();
        let mut total = 0.0;
        for p in &outcome.patterns {
            if let Some(joint) = herald.intersect(p) {
                total += pattern_probability(psi, &joint)?;
            }
        }
        Ok(total * outcome.weight)
    }

    pub fn gated_rates(&self, bindings: &Bindings) -> Result<GatedRates> {
        let psi = self.output_state(bindings)?;
        let herald_probability = pattern_probability(&psi, &self.herald_pattern())?;
        if herald_probability <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbability);
        }
        let rates = self
            .outcomes
            .iter()
            .map(|o| {
                Ok((
                    o.name.clone(),
                    self.joint_probability(&psi, o)? / herald_probability,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GatedRates {
            herald_probability,
            rates,
        })
    }
}

/// Conditional outcome probabilities for `preset` at `bindings`.
pub fn gated_rates(preset: &Preset, bindings: &Bindings) -> Result<GatedRates> {
    preset.gated_rates(bindings)
}

/// Bindings from `(name, value)` pairs.
pub fn bindings<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
