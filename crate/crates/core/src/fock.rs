//! Occupation-number basis and state vectors.
//!
//! The basis for `modes` modes and `photons` photons holds every vector of
//! nonnegative counts summing to `photons`, ordered lexicographically
//! descending with mode 0 most significant: for two modes and two photons
//! that is `(2,0), (1,1), (0,2)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockVector(Vec<usize>);

impl FockVector {
    pub fn new(counts: Vec<usize>) -> Self {
        FockVector(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        FockVector(vec![0; modes])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode]
    }
}

impl From<Vec<usize>> for FockVector {
    fn from(v: Vec<usize>) -> Self {
        FockVector(v)
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

/// Binomial coefficient; exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of ways to spread `photons` over `modes` modes.
pub fn basis_size(modes: usize, photons: usize) -> usize {
    if modes == 0 {
        return usize::from(photons == 0);
    }
    binomial(photons + modes - 1, photons)
}

/// Canonically ordered fixed-(modes, photons) basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    photons: usize,
    elements: Vec<FockVector>,
}

impl FockBasis {
    /// Enumerates every occupation vector in canonical order.
    ///
    /// A zero-mode basis holds only the empty vector (when `photons` is 0);
    /// it appears when every mode of a state has been measured.
    pub fn enumerate(modes: usize, photons: usize) -> Self {
        let mut elements = Vec::with_capacity(basis_size(modes, photons));
        if modes == 0 {
            if photons == 0 {
                elements.push(FockVector(Vec::new()));
            }
        } else {
            let mut current = vec![0; modes];
            fill(&mut current, 0, photons, &mut elements);
        }
        FockBasis {
            modes,
            photons,
            elements,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[FockVector] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &FockVector> {
        self.elements.iter()
    }

    /// Position of `v` in the canonical order.
    ///
    /// Counts the vectors that precede `v`: at each mode, every larger count
    /// that still fits contributes all completions of the remaining modes.
    pub fn rank(&self, v: &FockVector) -> Result<usize> {
        if v.modes() != self.modes || v.photons() != self.photons {
            return Err(Error::NotInBasis(v.counts().to_vec()));
        }
        let mut index = 0;
        let mut remaining = self.photons;
        for (m, &n) in v.counts().iter().enumerate() {
            let rest = self.modes - m - 1;
            if rest == 0 {
                break;
            }
            for larger in (n + 1)..=remaining {
                index += basis_size(rest, remaining - larger);
            }
            remaining -= n;
        }
        Ok(index)
    }

    pub fn unrank(&self, index: usize) -> Result<&FockVector> {
        self.elements.get(index).ok_or(Error::IndexOutOfRange {
            index,
            size: self.len(),
        })
    }
}

fn fill(current: &mut [usize], mode: usize, remaining: usize, out: &mut Vec<FockVector>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockVector(current.to_vec()));
        current[mode] = 0;
        return;
    }
    for n in (0..=remaining).rev() {
        current[mode] = n;
        fill(current, mode + 1, remaining - n, out);
    }
    current[mode] = 0;
}

/// Complex amplitudes over a shared [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        StateVector { basis, amplitudes }
    }

    pub fn from_amplitudes(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: amplitudes.len(),
            });
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// The basis state `v` with amplitude 1.
    pub fn basis_state(basis: Arc<FockBasis>, v: &FockVector) -> Result<Self> {
        let index = basis.rank(v)?;
        let mut state = Self::zeros(basis);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Product input with `count` photons injected into each listed mode.
    pub fn from_sources(modes: usize, sources: &[(usize, usize)]) -> Result<Self> {
        let mut counts = vec![0; modes];
        let mut seen = vec![false; modes];
        for &(mode, count) in sources {
            if mode >= modes {
                return Err(Error::ModeOutOfRange { mode, modes });
            }
            if seen[mode] {
                return Err(Error::DuplicateSource(mode));
            }
            seen[mode] = true;
            counts[mode] = count;
        }
        let v = FockVector(counts);
        let basis = Arc::new(FockBasis::enumerate(modes, v.photons()));
        Self::basis_state(basis, &v)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, v: &FockVector) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.rank(v)?])
    }

    pub fn probabilities(&self) -> impl Iterator<Item = (&FockVector, f64)> {
        self.basis
            .iter()
            .zip(&self.amplitudes)
            .map(|(v, a)| (v, a.norm_sqr()))
    }

    fn same_basis(&self, other: &StateVector) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis)
            || (self.basis.modes == other.basis.modes && self.basis.photons == other.basis.photons)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            basis: Arc::clone(&self.basis),
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(modes: usize, photons: usize) -> Vec<Vec<usize>> {
        // every vector in [0, photons]^modes, filtered by total
        let mut out = Vec::new();
        let total = (photons + 1).pow(modes as u32);
        for code in 0..total {
            let mut c = code;
            let v: Vec<usize> = (0..modes)
                .map(|_| {
                    let d = c % (photons + 1);
                    c /= photons + 1;
                    d
                })
                .collect();
            if v.iter().sum::<usize>() == photons {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn two_modes_two_photons() {
        let b = FockBasis::enumerate(2, 2);
        let got: Vec<_> = b.iter().map(|v| v.counts().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn single_mode() {
        let b = FockBasis::enumerate(1, 3);
        assert_eq!(b.len(), 1);
        assert_eq!(b.elements()[0].counts(), &[3]);
    }

    #[test]
    fn size_matches_stars_and_bars() {
        assert_eq!(FockBasis::enumerate(4, 3).len(), 20);
        for modes in 1..=8 {
            for photons in 0..=5 {
                let b = FockBasis::enumerate(modes, photons);
                assert_eq!(b.len(), basis_size(modes, photons));
                assert_eq!(b.len(), brute_force(modes, photons).len());
            }
        }
    }

    #[test]
    fn ordering_is_descending_lexicographic() {
        let b = FockBasis::enumerate(4, 3);
        let mut sorted = brute_force(4, 3);
        sorted.sort_by(|x, y| y.cmp(x));
        let got: Vec<_> = b.iter().map(|v| v.counts().to_vec()).collect();
        assert_eq!(got, sorted);
    }

    #[test]
    fn rank_unrank_bijection() {
        for modes in 1..=6 {
            for photons in 0..=4 {
                let b = FockBasis::enumerate(modes, photons);
                for (i, v) in b.iter().enumerate() {
                    assert_eq!(b.rank(v).unwrap(), i);
                    assert_eq!(b.unrank(i).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn rank_rejects_foreign_vectors() {
        let b = FockBasis::enumerate(3, 2);
        assert!(matches!(
            b.rank(&FockVector::new(vec![1, 1, 1])),
            Err(Error::NotInBasis(_))
        ));
        assert!(b.rank(&FockVector::new(vec![2, 0])).is_err());
        assert!(matches!(
            b.unrank(6),
            Err(Error::IndexOutOfRange { index: 6, size: 6 })
        ));
    }

    #[test]
    fn sources() {
        let s = StateVector::from_sources(2, &[(0, 2)]).unwrap();
        assert_eq!(
            s.amplitude(&FockVector::new(vec![2, 0])).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let s = StateVector::from_sources(4, &[(0, 2), (3, 1)]).unwrap();
        assert_eq!(s.basis().photons(), 3);
        assert_eq!(
            s.amplitude(&FockVector::new(vec![2, 0, 0, 1])).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(s.norm(), 1.0);
        let vac = StateVector::from_sources(3, &[]).unwrap();
        assert_eq!(vac.basis().len(), 1);
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));

        assert_eq!(
            StateVector::from_sources(2, &[(0, 1), (0, 1)]),
            Err(Error::DuplicateSource(0))
        );
        assert_eq!(
            StateVector::from_sources(2, &[(2, 1)]),
            Err(Error::ModeOutOfRange { mode: 2, modes: 2 })
        );
    }

    #[test]
    fn inner_products_and_normalize() {
        let b = Arc::new(FockBasis::enumerate(2, 1));
        let e0 = StateVector::basis_state(b.clone(), b.unrank(0).unwrap()).unwrap();
        let e1 = StateVector::basis_state(b.clone(), b.unrank(1).unwrap()).unwrap();
        assert_eq!(e0.inner_product(&e0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(e0.inner_product(&e1).unwrap(), Complex64::new(0.0, 0.0));

        let s = StateVector::from_amplitudes(
            b.clone(),
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        )
        .unwrap()
        .normalize()
        .unwrap();
        for a in s.amplitudes() {
            assert!((a.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let again = s.normalize().unwrap();
        for (a, b) in s.amplitudes().iter().zip(again.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        assert_eq!(StateVector::zeros(b).normalize(), Err(Error::ZeroNorm));
        let other = StateVector::from_sources(3, &[(0, 1)]).unwrap();
        assert_eq!(e0.inner_product(&other), Err(Error::BasisMismatch));
    }
}
