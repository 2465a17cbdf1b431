//! The interferometers under study, wired mode by mode.
//!
//! Beam splitters act in place: `bs i j` leaves the transmitted part of input
//! `i` on mode `i`. Mode indices are therefore reused as a photon travels, e.g.
//! in `fig1` mode 2 carries the third photon (path d), then path e, then
//! output channel 1.

use crate::circuit::{Circuit, PhaseExpr};
use crate::engine::{condition, evolve_full, DetectionPattern};
use crate::error::{Error, Result};

use super::{Bindings, DetectorModel, Outcome, Preset};

pub const PRESET_NAMES: [&str; 6] = ["fig1", "fig2", "fig3", "sec4", "single", "ifm"];

fn pins(modes: usize, pins: &[(usize, usize)]) -> DetectionPattern {
    DetectionPattern::exact(modes, pins).expect("preset modes are in range")
}

/// Looks a preset up by name.
pub fn build(name: &str, model: DetectorModel) -> Result<Preset> {
    match name {
        "fig1" => Ok(build_fig1(model)),
        "fig2" => Ok(build_fig2()),
        "fig3" => Ok(build_fig3(model)),
        "sec4" => Ok(build_sec4()),
        "single" => Ok(build_single()),
        "ifm" => Ok(build_ifm()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Two-photon Mach-Zehnder with a third photon heralded at D_A.
///
/// Modes: 0 a/b/D_A, 1 c/loss, 2 d/e/channel 1, 3 f/channel 2, and in the
/// cascade model 4 for the second output of H5.
pub fn build_fig1(model: DetectorModel) -> Preset {
    let modes = match model {
        DetectorModel::Resolving => 4,
        DetectorModel::Cascade => 5,
    };
    let mut b = Circuit::builder(modes)
        .param("phi")
        .source(0, 2)
        .source(2, 1)
        .bs(0, 1) // H1
        .bs(0, 2) // H2
        .bs(1, 3) // H3
        .phase(2, PhaseExpr::param("phi"))
        .bs(2, 3) // H4
        .herald(0, 1)
        .herald(1, 0)
        .label("DA", 0)
        .label("loss", 1)
        .label("ch2", 3);
    let outcomes = match model {
        DetectorModel::Resolving => {
            b = b.label("ch1", 2);
            vec![
                Outcome::new("R11", vec![pins(modes, &[(2, 2)])]),
                Outcome::new("R12", vec![pins(modes, &[(2, 1)])]).weighted(0.5),
                Outcome::new("R21", vec![pins(modes, &[(2, 1)])]).weighted(0.5),
                Outcome::new("R22", vec![pins(modes, &[(3, 2)])]),
            ]
        }
        DetectorModel::Cascade => {
            b = b.bs(2, 4).label("site5", 2).label("site6", 4);
            vec![
                Outcome::new("R11", vec![pins(modes, &[(3, 0)])]),
                Outcome::new("R12", vec![pins(modes, &[(3, 1)])]).weighted(0.5),
                Outcome::new("R21", vec![pins(modes, &[(3, 1)])]).weighted(0.5),
                Outcome::new("R22", vec![pins(modes, &[(3, 2)])]),
                Outcome::new("triple", vec![pins(modes, &[(2, 1), (4, 1)])]).extra(),
            ]
        }
    };
    Preset {
        name: "fig1".into(),
        model,
        circuit: b.build().expect("fig1 wiring is valid"),
        outcomes,
        interior_len: 4,
    }
}

/// Each interferometer arm branches in two; the pair is analysed by two
/// separate beam splitters with phases phi1 and phi2.
///
/// Modes: 0 D_A, 1 loss, 2 e/g/site 1, 3 f/i/site 2, 4 h/site 5, 5 j/site 6.
pub fn build_fig2() -> Preset {
    let modes = 6;
    let circuit = Circuit::builder(modes)
        .param("phi1")
        .param("phi2")
        .source(0, 2)
        .source(2, 1)
        .bs(0, 1) // H1
        .bs(0, 2) // H2
        .bs(1, 3) // H3
        .bs(2, 4) // e -> g, h
        .bs(3, 5) // f -> i, j
        .phase(2, PhaseExpr::param("phi1"))
        .phase(4, PhaseExpr::param("phi2"))
        .bs(2, 3) // H4
        .bs(4, 5) // H5
        .herald(0, 1)
        .herald(1, 0)
        .label("DA", 0)
        .label("loss", 1)
        .label("site1", 2)
        .label("site2", 3)
        .label("site5", 4)
        .label("site6", 5)
        .build()
        .expect("fig2 wiring is valid");
    let same_side = vec![
        pins(modes, &[(2, 2)]),
        pins(modes, &[(3, 2)]),
        pins(modes, &[(2, 1), (3, 1)]),
        pins(modes, &[(4, 2)]),
        pins(modes, &[(5, 2)]),
        pins(modes, &[(4, 1), (5, 1)]),
    ];
    Preset {
        name: "fig2".into(),
        model: DetectorModel::Resolving,
        circuit,
        outcomes: vec![
            Outcome::new("P15", vec![pins(modes, &[(2, 1), (4, 1)])]),
            Outcome::new("P16", vec![pins(modes, &[(2, 1), (5, 1)])]),
            Outcome::new("P25", vec![pins(modes, &[(3, 1), (4, 1)])]),
            Outcome::new("P26", vec![pins(modes, &[(3, 1), (5, 1)])]),
            Outcome::new("same_side", same_side),
        ],
        interior_len: 7,
    }
}

/// The two-photon interferometer without the third photon, H2 and H3 acting
/// as mirrors. Modes: 0 b/e/port 2, 1 c/f/port 1.
fn mirrored_mz(photons: usize) -> Circuit {
    Circuit::builder(2)
        .param("phi")
        .source(0, photons)
        .bs(0, 1) // H1
        .mirror(0)
        .mirror(1)
        .phase(0, PhaseExpr::param("phi"))
        .bs(0, 1) // H4
        .label("port1", 1)
        .label("port2", 0)
        .build()
        .expect("mirrored interferometer wiring is valid")
}

pub fn build_sec4() -> Preset {
    Preset {
        name: "sec4".into(),
        model: DetectorModel::Resolving,
        circuit: mirrored_mz(2),
        outcomes: vec![
            Outcome::new("P11", vec![pins(2, &[(1, 2)])]),
            Outcome::new("P12+P21", vec![pins(2, &[(1, 1)])]),
            Outcome::new("P22", vec![pins(2, &[(0, 2)])]),
        ],
        interior_len: 4,
    }
}

pub fn build_single() -> Preset {
    Preset {
        name: "single".into(),
        model: DetectorModel::Resolving,
        circuit: mirrored_mz(1),
        outcomes: vec![
            Outcome::new("P1", vec![pins(2, &[(1, 1)])]),
            Outcome::new("P2", vec![pins(2, &[(0, 1)])]),
        ],
        interior_len: 4,
    }
}

/// Three photons through the interferometer, two more heralded at sites 3 and 4.
///
/// Modes: 0 a/b/site 3, 1 c/site 4, 2 d/e/channel 1, 3 h/f/channel 2; the
/// cascade adds 4 (site 7) and 5 (site 6), leaving site 5 on mode 2.
pub fn build_fig3(model: DetectorModel) -> Preset {
    let modes = match model {
        DetectorModel::Resolving => 4,
        DetectorModel::Cascade => 6,
    };
    let mut b = Circuit::builder(modes)
        .param("phi")
        .source(0, 3)
        .source(2, 1)
        .source(3, 1)
        .bs(0, 1) // H1
        .bs(0, 2) // H2
        .bs(1, 3) // H3
        .phase(2, PhaseExpr::param("phi"))
        .bs(2, 3) // H4
        .herald(0, 1)
        .herald(1, 1)
        .label("site3", 0)
        .label("site4", 1)
        .label("ch2", 3);
    let by_ch2 = |n: usize| pins(modes, &[(3, n)]);
    let mut outcomes = vec![
        Outcome::new("N30", vec![by_ch2(0)]),
        Outcome::new("N21", vec![by_ch2(1)]),
        Outcome::new("N12", vec![by_ch2(2)]),
        Outcome::new("N03", vec![by_ch2(3)]),
    ];
    match model {
        DetectorModel::Resolving => {
            b = b.label("ch1", 2);
        }
        DetectorModel::Cascade => {
            b = b
                .bs(2, 4)
                .bs(2, 5)
                .label("site5", 2)
                .label("site6", 5)
                .label("site7", 4);
            outcomes.push(
                Outcome::new("fivefold", vec![pins(modes, &[(2, 1), (4, 1), (5, 1)])]).extra(),
            );
        }
    }
    Preset {
        name: "fig3".into(),
        model,
        circuit: b.build().expect("fig3 wiring is valid"),
        outcomes,
        interior_len: 4,
    }
}

/// H1 and H2 only: a photon from a meets a photon from d.
///
/// Modes: 0 a/b/site 3, 1 c, 2 d/e.
pub fn build_ifm() -> Preset {
    let circuit = Circuit::builder(3)
        .source(0, 1)
        .source(2, 1)
        .bs(0, 1) // H1
        .bs(0, 2) // H2
        .herald(0, 1)
        .label("site3", 0)
        .label("c", 1)
        .label("e", 2)
        .build()
        .expect("ifm wiring is valid");
    Preset {
        name: "ifm".into(),
        model: DetectorModel::Resolving,
        circuit,
        outcomes: vec![
            Outcome::new("c1", vec![pins(3, &[(1, 1)])]),
            Outcome::new("c0", vec![pins(3, &[(1, 0)])]),
        ],
        interior_len: 2,
    }
}

/// Which-path inference from a single click at site 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhichPath {
    /// P(exactly one photon at site 3).
    pub herald_probability: f64,
    /// P(one photon in c | exactly one at site 3).
    pub photon_in_c: f64,
}

pub fn which_path_check() -> Result<WhichPath> {
    let preset = build_ifm();
    let psi = evolve_full(
        &preset.circuit.compose(&Bindings::new())?,
        &preset.input_state()?,
    )?;
    let heralded = condition(&psi, preset.circuit.heralds())?;
    // reduced modes are (c, e)
    let photon_in_c = heralded
        .reduced_state
        .probabilities()
        .filter(|(v, _)| v.get(0) == 1)
        .map(|(_, p)| p)
        .sum();
    Ok(WhichPath {
        herald_probability: heralded.probability,
        photon_in_c,
    })
}
