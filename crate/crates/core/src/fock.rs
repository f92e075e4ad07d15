//! Exact finite Fock-space state algebra.
//!
//! States are finite superpositions of occupation configurations; ladder
//! operators act term by term with the fermionic sign worked out against a
//! fixed canonical ordering. Every quadratic expectation value is obtained
//! by literally applying the operator string to the state and contracting
//! with the original state, so the numbers coming out of this module serve
//! as the exact oracle for every closed form downstream.
//!
//! Canonical ordering: a configuration denotes the state
//! `b'(e1) b'(e2) ... d'(h1) d'(h2) ... |vacuum>` with electron indices
//! ascending, then positron indices ascending. All signs follow from
//! anticommuting operators into that order.
//!
//! State values are immutable after construction; every operation returns a
//! new value, so concurrent reads are safe.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues_doubled;
use crate::scalar::Scalar;
use crate::spectral_basis::{Mode, SimulationDomain};

/// Hard limits keeping every expectation value an exact brute-force sum.
pub const MAX_OCCUPIED_PER_CONFIG: usize = 8;
pub const MAX_CONFIGURATIONS: usize = 64;

/// Amplitudes whose magnitude drops below this after arithmetic are pruned.
pub const AMPLITUDE_PRUNE: f64 = 1e-15;

/// One occupation configuration: which electron and positron modes carry a
/// particle. Mode identity is the integer momentum index; electrons are the
/// positive-energy species, positrons the negative-energy one.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationConfig {
    electrons: Vec<i64>,
    positrons: Vec<i64>,
}

impl OccupationConfig {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Build a configuration from unsorted index lists. Duplicate indices
    /// within a species violate the exclusion principle and are rejected, as
    /// is the excluded zero mode.
    pub fn new(mut electrons: Vec<i64>, mut positrons: Vec<i64>) -> Result<Self> {
        electrons.sort_unstable();
        positrons.sort_unstable();
        for list in [&electrons, &positrons] {
            if list.contains(&0) {
                return Err(Error::ZeroMode);
            }
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidState(
                    "repeated mode within a configuration".into(),
                ));
            }
        }
        Ok(Self { electrons, positrons })
    }

    pub fn electrons(&self) -> &[i64] {
        &self.electrons
    }

    pub fn positrons(&self) -> &[i64] {
        &self.positrons
    }

    pub fn occupied(&self) -> usize {
        self.electrons.len() + self.positrons.len()
    }

    fn check_cutoff(&self, r_max: i64) -> Result<()> {
        for &r in self.electrons.iter().chain(self.positrons.iter()) {
            if r.abs() > r_max {
                return Err(Error::ModeOutsideCutoff { r, r_max });
            }
        }
        Ok(())
    }
}

impl fmt::Display for OccupationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{:?} h{:?}", self.electrons, self.positrons)
    }
}

/// The four ladder operators of the mode expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    ElectronCreation,
    ElectronAnnihilation,
    PositronCreation,
    PositronAnnihilation,
}

/// Finite superposition of occupation configurations with complex
/// amplitudes. Values are immutable; every operation returns a new state.
#[derive(Clone, Debug)]
pub struct FockStateVector<S: Scalar> {
    terms: BTreeMap<OccupationConfig, Complex<S>>,
}

impl<S: Scalar> FockStateVector<S> {
    /// The vacuum: the empty configuration with amplitude one.
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(OccupationConfig::vacuum(), Complex::new(S::one(), S::zero()));
        Self { terms }
    }

    /// The zero vector (no terms). A valid result of operator application.
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    /// Assemble a state from configuration/amplitude pairs, merging
    /// duplicates. Not normalized.
    pub fn from_terms(pairs: Vec<(OccupationConfig, Complex<S>)>) -> Result<Self> {
        let mut terms: BTreeMap<OccupationConfig, Complex<S>> = BTreeMap::new();
        for (config, amp) in pairs {
            if config.occupied() > MAX_OCCUPIED_PER_CONFIG {
                return Err(Error::InvalidState(format!(
                    "configuration occupies {} modes; limit is {MAX_OCCUPIED_PER_CONFIG}",
                    config.occupied()
                )));
            }
            let slot = terms
                .entry(config)
                .or_insert_with(|| Complex::new(S::zero(), S::zero()));
            *slot += amp;
        }
        if terms.len() > MAX_CONFIGURATIONS {
            return Err(Error::InvalidState(format!(
                "{} configurations exceed the limit of {MAX_CONFIGURATIONS}",
                terms.len()
            )));
        }
        let mut state = Self { terms };
        state.prune();
        Ok(state)
    }

    /// The normalized equal superposition of two single-electron
    /// configurations at distinct positive momenta.
    pub fn two_electron_superposition(p: Mode, q: Mode) -> Result<Self> {
        for mode in [p, q] {
            if mode.sign != crate::spectral_basis::EnergySign::Positive {
                return Err(Error::InvalidState(
                    "two-mode superposition takes positive-energy modes".into(),
                ));
            }
            if mode.r <= 0 {
                return Err(Error::InvalidState(
                    "two-mode superposition takes positive momenta".into(),
                ));
            }
        }
        if p.r == q.r {
            return Err(Error::InvalidState(
                "two-mode superposition needs distinct momenta".into(),
            ));
        }
        let amp = Complex::new(S::one() / S::cast(2.0).sqrt(), S::zero());
        Self::from_terms(vec![
            (OccupationConfig::new(vec![p.r], vec![])?, amp),
            (OccupationConfig::new(vec![q.r], vec![])?, amp),
        ])
    }

    /// Apply a ladder operator for mode index `r`, returning the
    /// (unnormalized) image. Annihilating an empty mode or creating an
    /// occupied one kills the term.
    pub fn apply(&self, kind: LadderKind, r: i64) -> Self {
        let mut out: BTreeMap<OccupationConfig, Complex<S>> = BTreeMap::new();
        for (config, &amp) in &self.terms {
            let (new_config, parity) = match kind {
                LadderKind::ElectronCreation => {
                    match config.electrons.binary_search(&r) {
                        Ok(_) => continue, // exclusion principle
                        Err(pos) => {
                            let mut e = config.electrons.clone();
                            e.insert(pos, r);
                            (
                                OccupationConfig {
                                    electrons: e,
                                    positrons: config.positrons.clone(),
                                },
                                pos,
                            )
                        }
                    }
                }
                LadderKind::ElectronAnnihilation => match config.electrons.binary_search(&r) {
                    Err(_) => continue,
                    Ok(pos) => {
                        let mut e = config.electrons.clone();
                        e.remove(pos);
                        (
                            OccupationConfig {
                                electrons: e,
                                positrons: config.positrons.clone(),
                            },
                            pos,
                        )
                    }
                },
                LadderKind::PositronCreation => match config.positrons.binary_search(&r) {
                    Ok(_) => continue,
                    Err(pos) => {
                        let mut h = config.positrons.clone();
                        h.insert(pos, r);
                        (
                            OccupationConfig {
                                electrons: config.electrons.clone(),
                                positrons: h,
                            },
                            config.electrons.len() + pos,
                        )
                    }
                },
                LadderKind::PositronAnnihilation => match config.positrons.binary_search(&r) {
                    Err(_) => continue,
                    Ok(pos) => {
                        let mut h = config.positrons.clone();
                        h.remove(pos);
                        (
                            OccupationConfig {
                                electrons: config.electrons.clone(),
                                positrons: h,
                            },
                            config.electrons.len() + pos,
                        )
                    }
                },
            };
            let sign = if parity % 2 == 0 { S::one() } else { -S::one() };
            let slot = out
                .entry(new_config)
                .or_insert_with(|| Complex::new(S::zero(), S::zero()));
            *slot += amp * sign;
        }
        let mut state = Self { terms: out };
        state.prune();
        state
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<S> {
        let mut acc = Complex::new(S::zero(), S::zero());
        for (config, amp) in &self.terms {
            if let Some(b) = other.terms.get(config) {
                acc += amp.conj() * *b;
            }
        }
        acc
    }

    pub fn norm(&self) -> S {
        self.inner(self).re.sqrt()
    }

    /// Rescale to unit norm; the zero vector cannot be normalized.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= S::cast(AMPLITUDE_PRUNE) {
            return Err(Error::InvalidState("cannot normalize a null state".into()));
        }
        let inv = Complex::new(S::one() / norm, S::zero());
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|(c, a)| (c.clone(), *a * inv))
                .collect(),
        })
    }

    /// Complex-linear combination of states.
    pub fn linear_combination(parts: &[(Complex<S>, &Self)]) -> Self {
        let mut terms: BTreeMap<OccupationConfig, Complex<S>> = BTreeMap::new();
        for (coeff, state) in parts {
            for (config, amp) in &state.terms {
                let slot = terms
                    .entry(config.clone())
                    .or_insert_with(|| Complex::new(S::zero(), S::zero()));
                *slot += *coeff * *amp;
            }
        }
        let mut state = Self { terms };
        state.prune();
        state
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationConfig, &Complex<S>)> {
        self.terms.iter()
    }

    pub fn config_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorted union of electron mode indices occupied in any configuration.
    pub fn active_electron_modes(&self) -> Vec<i64> {
        let mut set: Vec<i64> = self
            .terms
            .keys()
            .flat_map(|c| c.electrons.iter().copied())
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Sorted union of positron mode indices occupied in any configuration.
    pub fn active_positron_modes(&self) -> Vec<i64> {
        let mut set: Vec<i64> = self
            .terms
            .keys()
            .flat_map(|c| c.positrons.iter().copied())
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Fail if any occupied mode lies outside the domain cutoff.
    pub fn check_cutoff(&self, domain: &SimulationDomain<S>) -> Result<()> {
        for config in self.terms.keys() {
            config.check_cutoff(domain.r_max())?;
        }
        Ok(())
    }

    fn prune(&mut self) {
        let floor = S::cast(AMPLITUDE_PRUNE);
        self.terms.retain(|_, amp| amp.norm_sqr().sqrt() > floor);
    }
}

/// Wire format for states: one entry per configuration with a complex
/// amplitude and the occupied mode indices per species.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateDescription {
    pub terms: Vec<StateTermDescription>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateTermDescription {
    /// Amplitude as `[re, im]`.
    pub amplitude: [f64; 2],
    #[serde(default)]
    pub electrons: Vec<i64>,
    #[serde(default)]
    pub positrons: Vec<i64>,
}

impl StateDescription {
    /// Build and normalize the described state, validating every mode
    /// against the domain cutoff.
    pub fn build<S: Scalar>(&self, domain: &SimulationDomain<S>) -> Result<FockStateVector<S>> {
        if self.terms.is_empty() {
            return Err(Error::InvalidState("state description has no terms".into()));
        }
        let mut pairs = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let config = OccupationConfig::new(term.electrons.clone(), term.positrons.clone())?;
            config.check_cutoff(domain.r_max())?;
            pairs.push((
                config,
                Complex::new(S::cast(term.amplitude[0]), S::cast(term.amplitude[1])),
            ));
        }
        FockStateVector::from_terms(pairs)?.normalized()
    }
}

/// Exact expectation values of every quadratic operator pairing for one
/// state, restricted to the modes the state actually occupies (all other
/// entries vanish identically).
///
/// Blocks: `normal[i][j] = <b'_i b_j>` over `electron_modes`,
/// `hole[i][j] = <d'_i d_j>` over `positron_modes`, and the anomalous block
/// `pair[i][j] = <d_i b_j>` with rows over positron and columns over
/// electron modes. The conjugate anomalous block is `pair` conjugated.
#[derive(Clone, Debug)]
pub struct BilinearMatrices<S: Scalar> {
    pub electron_modes: Vec<i64>,
    pub positron_modes: Vec<i64>,
    pub normal: Vec<Vec<Complex<S>>>,
    pub hole: Vec<Vec<Complex<S>>>,
    pub pair: Vec<Vec<Complex<S>>>,
}

impl<S: Scalar> BilinearMatrices<S> {
    /// Largest deviation from Hermiticity across the normal and hole blocks.
    #[allow(clippy::needless_range_loop)]
    pub fn hermiticity_defect(&self) -> S {
        let mut worst = S::zero();
        for block in [&self.normal, &self.hole] {
            let n = block.len();
            for i in 0..n {
                for j in 0..n {
                    let defect = (block[i][j] - block[j][i].conj()).norm();
                    worst = worst.max(defect);
                }
            }
        }
        worst
    }

    /// Smallest and largest eigenvalue across both occupation blocks;
    /// `None` when the state occupies nothing.
    pub fn occupation_eigenvalue_range(&self) -> Option<(S, S)> {
        let mut range: Option<(S, S)> = None;
        for block in [&self.normal, &self.hole] {
            if block.is_empty() {
                continue;
            }
            let eig = hermitian_eigenvalues_doubled(block);
            let lo = eig[0];
            let hi = eig[eig.len() - 1];
            range = Some(match range {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        }
        range
    }

    /// Expected electron number: the trace of the normal block.
    pub fn electron_count(&self) -> S {
        (0..self.normal.len()).fold(S::zero(), |acc, i| acc + self.normal[i][i].re)
    }

    /// Expected positron number: the trace of the hole block.
    pub fn positron_count(&self) -> S {
        (0..self.hole.len()).fold(S::zero(), |acc, i| acc + self.hole[i][i].re)
    }

    pub fn is_empty(&self) -> bool {
        self.electron_modes.is_empty() && self.positron_modes.is_empty()
    }
}

/// Compute every bilinear expectation by operator application: apply the
/// operator string to the state and contract with the original state.
/// Expects a normalized state.
pub fn bilinear_matrices<S: Scalar>(state: &FockStateVector<S>) -> BilinearMatrices<S> {
    let electron_modes = state.active_electron_modes();
    let positron_modes = state.active_positron_modes();

    let normal = electron_modes
        .iter()
        .map(|&ri| {
            electron_modes
                .iter()
                .map(|&rj| {
                    let image = state
                        .apply(LadderKind::ElectronAnnihilation, rj)
                        .apply(LadderKind::ElectronCreation, ri);
                    state.inner(&image)
                })
                .collect()
        })
        .collect();

    let hole = positron_modes
        .iter()
        .map(|&ri| {
            positron_modes
                .iter()
                .map(|&rj| {
                    let image = state
                        .apply(LadderKind::PositronAnnihilation, rj)
                        .apply(LadderKind::PositronCreation, ri);
                    state.inner(&image)
                })
                .collect()
        })
        .collect();

    let pair = positron_modes
        .iter()
        .map(|&ri| {
            electron_modes
                .iter()
                .map(|&rj| {
                    let image = state
                        .apply(LadderKind::ElectronAnnihilation, rj)
                        .apply(LadderKind::PositronAnnihilation, ri);
                    state.inner(&image)
                })
                .collect()
        })
        .collect();

    BilinearMatrices {
        electron_modes,
        positron_modes,
        normal,
        hole,
        pair,
    }
}
