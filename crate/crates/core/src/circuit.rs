//! Optical elements, circuits and their single-photon transfer matrices.
//!
//! A 50-50 beam splitter on modes `(i, j)` sends input `i` to
//! `(out_i + i*out_j)/sqrt(2)` and input `j` to `(i*out_i + out_j)/sqrt(2)`.
//! A phase shifter multiplies its mode by `e^{i phi}`, a mirror by `i`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parameter name -> angle in radians.
pub type Bindings = BTreeMap<String, f64>;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A phase angle, either fixed or named.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseExpr {
    Literal(f64),
    Param(String),
}

impl PhaseExpr {
    pub fn param(name: &str) -> Self {
        PhaseExpr::Param(name.to_string())
    }

    pub fn resolve(&self, bindings: &Bindings) -> Result<f64> {
        match self {
            PhaseExpr::Literal(v) => Ok(*v),
            PhaseExpr::Param(name) => bindings
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnboundParameter(name.clone())),
        }
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest representation that parses back exactly
            PhaseExpr::Literal(v) => write!(f, "{v}"),
            PhaseExpr::Param(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    BeamSplitter(usize, usize),
    PhaseShifter(usize, PhaseExpr),
    Mirror(usize),
}

impl Element {
    pub fn modes(&self) -> Vec<usize> {
        match self {
            Element::BeamSplitter(i, j) => vec![*i, *j],
            Element::PhaseShifter(m, _) | Element::Mirror(m) => vec![*m],
        }
    }

    pub fn unitary(&self, modes: usize, bindings: &Bindings) -> Result<ModeUnitary> {
        match self {
            Element::BeamSplitter(i, j) => ModeUnitary::beam_splitter(modes, *i, *j),
            Element::PhaseShifter(m, phase) => {
                ModeUnitary::phase(modes, *m, phase.resolve(bindings)?)
            }
            Element::Mirror(m) => ModeUnitary::mirror(modes, *m),
        }
    }
}

/// Validated interferometer description.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    modes: usize,
    params: BTreeSet<String>,
    sources: Vec<(usize, usize)>,
    elements: Vec<Element>,
    heralds: Vec<(usize, usize)>,
    labels: BTreeMap<String, usize>,
}

impl Circuit {
    pub fn new(
        modes: usize,
        params: BTreeSet<String>,
        sources: Vec<(usize, usize)>,
        elements: Vec<Element>,
        heralds: Vec<(usize, usize)>,
        labels: BTreeMap<String, usize>,
    ) -> Result<Self> {
        let circuit = Circuit {
            modes,
            params,
            sources,
            elements,
            heralds,
            labels,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn builder(modes: usize) -> CircuitBuilder {
        CircuitBuilder {
            modes,
            params: BTreeSet::new(),
            sources: Vec::new(),
            elements: Vec::new(),
            heralds: Vec::new(),
            labels: BTreeMap::new(),
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes,
            });
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::ModeOutOfRange { mode: 0, modes: 0 });
        }
        for p in &self.params {
            if !is_identifier(p) {
                return Err(Error::InvalidIdentifier(p.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for &(mode, _) in &self.sources {
            self.check_mode(mode)?;
            if !seen.insert(mode) {
                return Err(Error::DuplicateSource(mode));
            }
        }
        for el in &self.elements {
            for m in el.modes() {
                self.check_mode(m)?;
            }
            match el {
                Element::BeamSplitter(i, j) if i == j => return Err(Error::SameModes(*i)),
                Element::PhaseShifter(_, PhaseExpr::Literal(v)) if !v.is_finite() => {
                    return Err(Error::NonFiniteAngle(*v))
                }
                Element::PhaseShifter(_, PhaseExpr::Param(p)) if !self.params.contains(p) => {
                    return Err(Error::UndeclaredParameter(p.clone()))
                }
                _ => {}
            }
        }
        let mut seen = BTreeSet::new();
        for &(mode, _) in &self.heralds {
            self.check_mode(mode)?;
            if !seen.insert(mode) {
                return Err(Error::DuplicateHerald(mode));
            }
        }
        let demanded: usize = self.heralds.iter().map(|h| h.1).sum();
        if demanded > self.photons() {
            return Err(Error::HeraldExceedsPhotons {
                demanded,
                available: self.photons(),
            });
        }
        for (name, &mode) in &self.labels {
            if !is_identifier(name) {
                return Err(Error::InvalidIdentifier(name.clone()));
            }
            self.check_mode(mode)?;
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.sources.iter().map(|s| s.1).sum()
    }

    pub fn params(&self) -> &BTreeSet<String> {
        &self.params
    }

    pub fn sources(&self) -> &[(usize, usize)] {
        &self.sources
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn heralds(&self) -> &[(usize, usize)] {
        &self.heralds
    }

    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn label_of(&self, mode: usize) -> Option<&str> {
        self.labels
            .iter()
            .find(|(_, &m)| m == mode)
            .map(|(name, _)| name.as_str())
    }

    pub fn mode_by_label(&self, name: &str) -> Option<usize> {
        self.labels.get(name).copied()
    }

    /// Copy keeping only the first `len` elements.
    pub fn truncated(&self, len: usize) -> Circuit {
        let mut c = self.clone();
        c.elements.truncate(len);
        c
    }

    /// Returns the first parameter without a binding, if any.
    pub fn check_bindings(&self, bindings: &Bindings) -> Result<()> {
        match self.params.iter().find(|p| !bindings.contains_key(*p)) {
            Some(p) => Err(Error::UnboundParameter(p.clone())),
            None => Ok(()),
        }
    }

    /// Total transfer matrix `U_k ... U_1`, first element applied first.
    pub fn compose(&self, bindings: &Bindings) -> Result<ModeUnitary> {
        self.check_bindings(bindings)?;
        compose_elements(self.modes, &self.elements, bindings)
    }
}

pub fn compose_elements(
    modes: usize,
    elements: &[Element],
    bindings: &Bindings,
) -> Result<ModeUnitary> {
    let mut total = ModeUnitary::identity(modes);
    for el in elements {
        total = el.unitary(modes, bindings)?.mul(&total)?;
    }
    Ok(total)
}

pub struct CircuitBuilder {
    modes: usize,
    params: BTreeSet<String>,
    sources: Vec<(usize, usize)>,
    elements: Vec<Element>,
    heralds: Vec<(usize, usize)>,
    labels: BTreeMap<String, usize>,
}

impl CircuitBuilder {
    pub fn param(mut self, name: &str) -> Self {
        self.params.insert(name.to_string());
        self
    }

    pub fn source(mut self, mode: usize, count: usize) -> Self {
        self.sources.push((mode, count));
        self
    }

    pub fn bs(mut self, i: usize, j: usize) -> Self {
        self.elements.push(Element::BeamSplitter(i, j));
        self
    }

    pub fn phase(mut self, mode: usize, phase: PhaseExpr) -> Self {
        self.elements.push(Element::PhaseShifter(mode, phase));
        self
    }

    pub fn mirror(mut self, mode: usize) -> Self {
        self.elements.push(Element::Mirror(mode));
        self
    }

    pub fn herald(mut self, mode: usize, count: usize) -> Self {
        self.heralds.push((mode, count));
        self
    }

    pub fn label(mut self, name: &str, mode: usize) -> Self {
        self.labels.insert(name.to_string(), mode);
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(
            self.modes,
            self.params,
            self.sources,
            self.elements,
            self.heralds,
            self.labels,
        )
    }
}

/// Square transfer matrix, `get(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ModeUnitary {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        ModeUnitary { dim, entries }
    }

    /// Row-major construction; `rows[out][in]`.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(ModeUnitary { dim, entries })
    }

    pub fn beam_splitter(dim: usize, i: usize, j: usize) -> Result<Self> {
        for m in [i, j] {
            if m >= dim {
                return Err(Error::ModeOutOfRange {
                    mode: m,
                    modes: dim,
                });
            }
        }
        if i == j {
            return Err(Error::SameModes(i));
        }
        let mut u = Self::identity(dim);
        let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let r = Complex64::new(0.0, FRAC_1_SQRT_2);
        u.set(i, i, t);
        u.set(j, j, t);
        u.set(i, j, r);
        u.set(j, i, r);
        Ok(u)
    }

    pub fn phase(dim: usize, mode: usize, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFiniteAngle(phi));
        }
        Self::diagonal(dim, mode, Complex64::from_polar(1.0, phi))
    }

    pub fn mirror(dim: usize, mode: usize) -> Result<Self> {
        Self::diagonal(dim, mode, Complex64::new(0.0, 1.0))
    }

    fn diagonal(dim: usize, mode: usize, value: Complex64) -> Result<Self> {
        if mode >= dim {
            return Err(Error::ModeOutOfRange { mode, modes: dim });
        }
        let mut u = Self::identity(dim);
        u.set(mode, mode, value);
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, out: usize, input: usize) -> Complex64 {
        self.entries[out * self.dim + input]
    }

    pub fn set(&mut self, out: usize, input: usize, value: Complex64) {
        self.entries[out * self.dim + input] = value;
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &ModeUnitary) -> Result<ModeUnitary> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * rhs.entries[k * n + c];
                }
            }
        }
        Ok(ModeUnitary { dim: n, entries })
    }

    pub fn scaled(&self, factor: Complex64) -> ModeUnitary {
        ModeUnitary {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut acc: Complex64 =
                    (0..n).map(|r| self.get(r, j).conj() * self.get(r, k)).sum();
                if j == k {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// Outcome of [`check_unitary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

pub fn check_unitary(u: &ModeUnitary, tol: f64) -> UnitarityCheck {
    let max_deviation = u.unitarity_deviation();
    UnitarityCheck {
        passed: max_deviation <= tol,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mz(modes: usize) -> Circuit {
        Circuit::builder(modes)
            .param("phi")
            .source(0, 1)
            .bs(0, 1)
            .phase(0, PhaseExpr::param("phi"))
            .bs(0, 1)
            .build()
            .unwrap()
    }

    fn bind(phi: f64) -> Bindings {
        [("phi".to_string(), phi)].into_iter().collect()
    }

    #[test]
    fn beam_splitter_block() {
        let u = ModeUnitary::beam_splitter(2, 0, 1).unwrap();
        let s = FRAC_1_SQRT_2;
        assert_eq!(u.get(0, 0), c(s, 0.0));
        assert_eq!(u.get(0, 1), c(0.0, s));
        assert_eq!(u.get(1, 0), c(0.0, s));
        assert_eq!(u.get(1, 1), c(s, 0.0));
        assert!(check_unitary(&u, 1e-12).passed);

        let u = ModeUnitary::beam_splitter(3, 0, 2).unwrap();
        assert_eq!(u.get(1, 0), c(0.0, 0.0));
        assert_eq!(u.get(1, 1), c(1.0, 0.0));
        assert_eq!(u.get(1, 2), c(0.0, 0.0));

        assert_eq!(
            ModeUnitary::beam_splitter(2, 1, 1),
            Err(Error::SameModes(1))
        );
        assert!(ModeUnitary::beam_splitter(2, 0, 2).is_err());
    }

    #[test]
    fn phases_and_mirrors() {
        assert_eq!(
            ModeUnitary::phase(3, 1, 0.0).unwrap(),
            ModeUnitary::identity(3)
        );
        let u = ModeUnitary::phase(1, 0, PI).unwrap();
        assert!((u.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);
        let m = ModeUnitary::mirror(2, 1).unwrap();
        assert_eq!(m.get(1, 1), c(0.0, 1.0));
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert!(ModeUnitary::phase(2, 2, 0.0).is_err());
        assert!(ModeUnitary::mirror(2, 5).is_err());
    }

    #[test]
    fn compose_empty_is_identity() {
        let circ = Circuit::builder(3).source(0, 1).build().unwrap();
        assert_eq!(
            circ.compose(&Bindings::new()).unwrap(),
            ModeUnitary::identity(3)
        );
    }

    #[test]
    fn mach_zehnder_transfer() {
        let u = mz(2).compose(&bind(0.0)).unwrap();
        assert!((u.get(1, 0).norm_sqr() - 1.0).abs() < 1e-15);
        assert!(u.get(0, 0).norm_sqr() < 1e-15);
        for k in 0..64 {
            let phi = 2.0 * PI * k as f64 / 64.0;
            let u = mz(2).compose(&bind(phi)).unwrap();
            assert!((u.get(1, 0).norm_sqr() - (1.0 + phi.cos()) / 2.0).abs() < 1e-12);
            assert!((u.get(0, 0).norm_sqr() - (1.0 - phi.cos()) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unbound_parameter_is_named() {
        assert_eq!(
            mz(2).compose(&Bindings::new()),
            Err(Error::UnboundParameter("phi".into()))
        );
    }

    #[test]
    fn unitarity_check_flags_scaled_entry() {
        assert_eq!(
            check_unitary(&ModeUnitary::identity(4), 0.0).max_deviation,
            0.0
        );
        let mut u = ModeUnitary::beam_splitter(2, 0, 1).unwrap();
        assert!(check_unitary(&u, 1e-12).max_deviation <= 1e-12);
        u.set(0, 0, u.get(0, 0) * 1.01);
        let check = check_unitary(&u, 1e-9);
        assert!(!check.passed);
        assert!(check.max_deviation > 1e-3);
    }

    #[test]
    fn compose_is_associative_over_grouping() {
        let circ = Circuit::builder(3)
            .source(0, 1)
            .bs(0, 1)
            .phase(1, PhaseExpr::Literal(0.3))
            .bs(1, 2)
            .mirror(2)
            .bs(0, 2)
            .phase(0, PhaseExpr::Literal(-1.1))
            .build()
            .unwrap();
        let b = Bindings::new();
        let all = circ.compose(&b).unwrap();
        for split in 0..=circ.elements().len() {
            let (head, tail) = circ.elements().split_at(split);
            let h = compose_elements(3, head, &b).unwrap();
            let t = compose_elements(3, tail, &b).unwrap();
            let joined = t.mul(&h).unwrap();
            for r in 0..3 {
                for k in 0..3 {
                    assert!((joined.get(r, k) - all.get(r, k)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Circuit::builder(2).source(0, 1).bs(0, 0).build(),
            Err(Error::SameModes(0))
        );
        assert_eq!(
            Circuit::builder(2)
                .source(0, 1)
                .phase(0, PhaseExpr::param("x"))
                .build(),
            Err(Error::UndeclaredParameter("x".into()))
        );
        assert_eq!(
            Circuit::builder(2)
                .source(0, 1)
                .herald(1, 0)
                .herald(1, 0)
                .build(),
            Err(Error::DuplicateHerald(1))
        );
        assert_eq!(
            Circuit::builder(2).source(0, 1).herald(1, 2).build(),
            Err(Error::HeraldExceedsPhotons {
                demanded: 2,
                available: 1
            })
        );
        assert_eq!(
            Circuit::builder(2).source(0, 1).label("x", 4).build(),
            Err(Error::ModeOutOfRange { mode: 4, modes: 2 })
        );
        assert!(Circuit::builder(2)
            .source(0, 1)
            .phase(0, PhaseExpr::Literal(f64::NAN))
            .build()
            .is_err());
    }
}
