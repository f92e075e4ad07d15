//! Periodic simulation box, momentum lattice, and the plane-wave spinor
//! eigenbasis of the free Hamiltonian `H0 = -i sigma3 d/dz`.
//!
//! Momenta live on the lattice `p = 2 pi r / L` with integer `r`,
//! `1 <= |r| <= r_max`. The zero mode is excluded: the chiral spinor factor
//! is undefined at `p = 0`. The symmetric cutoff makes vacuum sums cancel in
//! `+p / -p` pairs.
//!
//! Overlaps and derivatives of basis functions are evaluated in closed form;
//! grid quadrature appears only in tests as an independent oracle. All
//! operations here are pure functions of immutable inputs.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Periodic spatial domain with a uniform grid and a symmetric momentum
/// cutoff.
#[derive(Clone, Debug)]
pub struct SimulationDomain<S> {
    length: S,
    n_z: usize,
    r_max: i64,
}

impl<S: Scalar> SimulationDomain<S> {
    /// A box of the given length with `n_z` uniform grid points
    /// `z_j = -L/2 + j dz` and mode integers restricted to `|r| <= r_max`.
    pub fn new(length: S, n_z: usize, r_max: i64) -> Result<Self> {
        if !length.is_finite() || length <= S::zero() {
            return Err(Error::InvalidDomain(format!(
                "box length must be positive and finite, got {length}"
            )));
        }
        if n_z < 2 {
            return Err(Error::InvalidDomain(format!(
                "need at least 2 grid points, got {n_z}"
            )));
        }
        if r_max < 1 {
            return Err(Error::InvalidDomain(format!(
                "momentum cutoff must be at least 1, got {r_max}"
            )));
        }
        Ok(Self { length, n_z, r_max })
    }

    pub fn length(&self) -> S {
        self.length
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn r_max(&self) -> i64 {
        self.r_max
    }

    /// Grid spacing `L / n_z`.
    pub fn dz(&self) -> S {
        self.length / S::cast(self.n_z)
    }

    /// Momentum quantum `2 pi / L`.
    pub fn momentum_step(&self) -> S {
        S::cast(2.0) * S::PI() / self.length
    }

    /// Grid point `z_j = -L/2 + j dz`.
    pub fn z_at(&self, j: usize) -> S {
        debug_assert!(j < self.n_z);
        -self.length * S::cast(0.5) + self.dz() * S::cast(j)
    }

    pub fn z_points(&self) -> Vec<S> {
        (0..self.n_z).map(|j| self.z_at(j)).collect()
    }

    /// Map `z` into the fundamental cell `[-L/2, L/2)`.
    pub fn wrap(&self, z: S) -> S {
        let half = self.length * S::cast(0.5);
        let shifted = (z + half) / self.length;
        let frac = shifted - shifted.floor();
        frac * self.length - half
    }

    /// Fail unless the grid resolves the given harmonic index without
    /// aliasing (`n_z > 2 |harmonic|`).
    pub fn check_resolves_harmonic(&self, harmonic: i64) -> Result<()> {
        let needed = 2 * harmonic.unsigned_abs() as usize;
        if self.n_z > needed {
            Ok(())
        } else {
            Err(Error::GridResolution {
                harmonic,
                required: needed,
                n_z: self.n_z,
            })
        }
    }
}

/// Momentum `p = 2 pi r / L` of an integer mode index within the cutoff.
pub fn momentum_of<S: Scalar>(r: i64, domain: &SimulationDomain<S>) -> Result<S> {
    if r.abs() > domain.r_max() {
        return Err(Error::ModeOutsideCutoff {
            r,
            r_max: domain.r_max(),
        });
    }
    Ok(S::cast(r) * domain.momentum_step())
}

/// Sign of the single-particle energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn value<S: Scalar>(self) -> S {
        match self {
            EnergySign::Positive => S::one(),
            EnergySign::Negative => -S::one(),
        }
    }

    fn unit(self) -> i64 {
        match self {
            EnergySign::Positive => 1,
            EnergySign::Negative => -1,
        }
    }
}

/// A single-particle plane-wave eigenstate of the free Hamiltonian, labelled
/// by the sign of its energy and its integer momentum index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub sign: EnergySign,
    pub r: i64,
}

impl Mode {
    /// Validated constructor; the zero mode and indices beyond the cutoff
    /// are rejected.
    pub fn new<S: Scalar>(sign: EnergySign, r: i64, domain: &SimulationDomain<S>) -> Result<Self> {
        if r == 0 {
            return Err(Error::ZeroMode);
        }
        if r.abs() > domain.r_max() {
            return Err(Error::ModeOutsideCutoff {
                r,
                r_max: domain.r_max(),
            });
        }
        Ok(Self { sign, r })
    }

    pub fn positive_energy<S: Scalar>(r: i64, domain: &SimulationDomain<S>) -> Result<Self> {
        Self::new(EnergySign::Positive, r, domain)
    }

    pub fn negative_energy<S: Scalar>(r: i64, domain: &SimulationDomain<S>) -> Result<Self> {
        Self::new(EnergySign::Negative, r, domain)
    }

    pub fn momentum<S: Scalar>(&self, domain: &SimulationDomain<S>) -> S {
        S::cast(self.r) * domain.momentum_step()
    }

    /// Energy eigenvalue `sign * |p|`.
    pub fn energy<S: Scalar>(&self, domain: &SimulationDomain<S>) -> S {
        self.sign.value::<S>() * self.momentum(domain).abs()
    }

    /// Integer spinor weights `(1 + lambda sgn p, 1 - lambda sgn p)`, each 0
    /// or 2: exactly one chiral component of the eigenspinor is populated.
    pub(crate) fn chiral_weights(&self) -> (i64, i64) {
        let ls = self.sign.unit() * self.r.signum();
        (1 + ls, 1 - ls)
    }
}

/// Two-component spinor value; `upper` rides right-moving characteristics,
/// `lower` left-moving ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor<S> {
    pub upper: Complex<S>,
    pub lower: Complex<S>,
}

impl<S: Scalar> Spinor<S> {
    /// Conjugate contraction `self^dagger other`.
    pub fn dot(&self, other: &Self) -> Complex<S> {
        self.upper.conj() * other.upper + self.lower.conj() * other.lower
    }

    /// Contraction through `sigma3`: `self^dagger sigma3 other`.
    pub fn sigma3_dot(&self, other: &Self) -> Complex<S> {
        self.upper.conj() * other.upper - self.lower.conj() * other.lower
    }

    pub fn scale(&self, factor: Complex<S>) -> Self {
        Self {
            upper: self.upper * factor,
            lower: self.lower * factor,
        }
    }

    pub fn norm_sqr(&self) -> S {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }
}

/// Normalized eigenspinor of the free Hamiltonian at `z`:
/// `(1/(2 sqrt L)) (1 + lambda sgn p, 1 - lambda sgn p)^T e^{i p z}`.
pub fn eigenfunction<S: Scalar>(mode: Mode, z: S, domain: &SimulationDomain<S>) -> Spinor<S> {
    let (wu, wl) = mode.chiral_weights();
    let p = mode.momentum(domain);
    let norm = S::one() / (S::cast(2.0) * domain.length().sqrt());
    let phase = Complex::new(S::zero(), p * z).exp();
    Spinor {
        upper: phase * Complex::new(norm * S::cast(wu), S::zero()),
        lower: phase * Complex::new(norm * S::cast(wl), S::zero()),
    }
}

/// Free time evolution of an eigenspinor: the instantaneous eigenfunction
/// times the phase `e^{-i energy t}`.
pub fn evolved_eigenfunction<S: Scalar>(
    mode: Mode,
    z: S,
    t: S,
    domain: &SimulationDomain<S>,
) -> Spinor<S> {
    let phase = Complex::new(S::zero(), -mode.energy(domain) * t).exp();
    eigenfunction(mode, z, domain).scale(phase)
}

/// Closed-form overlap of two basis modes over the box: plane-wave
/// orthogonality in `r` times the chiral spinor contraction, i.e. exactly
/// the Kronecker delta in both labels.
pub fn inner_product<S: Scalar>(a: Mode, b: Mode, _domain: &SimulationDomain<S>) -> Complex<S> {
    if a.r != b.r {
        return Complex::new(S::zero(), S::zero());
    }
    let (ua, la) = a.chiral_weights();
    let (ub, lb) = b.chiral_weights();
    let value = S::cast(ua * ub + la * lb) / S::cast(4.0);
    Complex::new(value, S::zero())
}
