//! The standard verification suite: every structural invariant of the
//! toolkit measured against a pinned tolerance, in one runnable battery.
//!
//! Checks are either *gating* (a failure means the build is wrong) or
//! *advisory* (reported for inspection, never failing the suite). The
//! advisory entries cover the closed-form estimator, which is parameterized
//! by a measured amplitude and deliberately kept out of the gate.

use num_complex::Complex64;

use crate::extraction::{
    delta_energy_closed_form, delta_energy_quadrature, run_extraction, sweep_f, ExperimentConfig,
};
use crate::fock::{bilinear_matrices, FockStateVector, LadderKind, OccupationConfig};
use crate::observables::{
    closed_form_current, component_densities, current_profile, energy_density_wave, free_energy,
    CurrentWave,
};
use crate::potential_dynamics::{
    pde_residual, phase_rotations, solve_phases, PotentialField, PotentialTable,
};
use crate::quadrature::{spectral_derivative, trapezoid_periodic};
use crate::spectral_basis::{eigenfunction, inner_product, EnergySign, Mode, SimulationDomain};

/// Pinned tolerances with their origins.
pub mod tolerances {
    /// Closed-form identities evaluated in floating point: orthonormality,
    /// interference-form residual, reality of mode sums, chirality identity,
    /// rigid transport, null results.
    pub const EXACT_IDENTITY: f64 = 1e-12;
    /// Pure operator-algebra statements (anticommutators, Hermiticity):
    /// only rounding of complex sums over a handful of terms.
    pub const OPERATOR_ALGEBRA: f64 = 1e-14;
    /// Occupation eigenvalues may leak out of [0, 1] by rounding only.
    pub const OCCUPATION_BOUNDS: f64 = 1e-12;
    /// Spectral differentiation of resolved plane waves.
    pub const EIGENRELATION_REL: f64 = 1e-10;
    /// Grid integral of the energy density against the exact total energy.
    pub const ENERGY_CONSERVATION: f64 = 1e-10;
    /// Unit modulus of the diagonal phase rotations.
    pub const ROTATION_UNITARITY: f64 = 1e-14;
    /// Transport solver against the static-cosine reference at 2048 panels.
    pub const SOLVER_REFERENCE: f64 = 1e-8;
    /// Minimum observed convergence order for solver and estimator studies.
    pub const MIN_ORDER: f64 = 1.9;
    /// Quadrature vs direct estimator at desk-scale grids.
    pub const ESTIMATOR_AGREEMENT_REL: f64 = 1e-6;
    /// Relative spread of delta/f across a coupling sweep.
    pub const SWEEP_LINEARITY_REL: f64 = 1e-9;
}

/// Direction of a check's comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Pass when `measured <= threshold`.
    AtMost,
    /// Pass when `measured >= threshold`.
    AtLeast,
    /// Pass when `measured < threshold` (strict).
    Below,
}

/// One verification check's outcome.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub gating: bool,
    pub note: String,
}

impl CheckOutcome {
    fn new(
        name: &'static str,
        measured: f64,
        threshold: f64,
        comparison: Comparison,
        gating: bool,
        note: impl Into<String>,
    ) -> Self {
        let passed = match comparison {
            Comparison::AtMost => measured <= threshold,
            Comparison::AtLeast => measured >= threshold,
            Comparison::Below => measured < threshold,
        } && measured.is_finite();
        Self {
            name,
            measured,
            threshold,
            comparison,
            passed,
            gating,
            note: note.into(),
        }
    }

    pub fn comparison_symbol(&self) -> &'static str {
        match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Below => "<",
        }
    }
}

fn format_seq(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Deterministic generator for the randomized algebra checks.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn amplitude(&mut self) -> Complex64 {
        Complex64::new(self.uniform() - 0.5, self.uniform() - 0.5)
    }

    fn pick(&mut self, pool: &[i64]) -> i64 {
        pool[(self.next_u64() % pool.len() as u64) as usize]
    }
}

fn random_state(rng: &mut SplitMix64) -> FockStateVector<f64> {
    let pool: Vec<i64> = (-3i64..=3).filter(|&r| r != 0).collect();
    loop {
        let n_terms = 1 + (rng.next_u64() % 3) as usize;
        let mut pairs = Vec::new();
        for _ in 0..n_terms {
            let mut electrons = Vec::new();
            let mut positrons = Vec::new();
            for _ in 0..(rng.next_u64() % 3) {
                electrons.push(rng.pick(&pool));
            }
            for _ in 0..(rng.next_u64() % 3) {
                positrons.push(rng.pick(&pool));
            }
            electrons.sort_unstable();
            electrons.dedup();
            positrons.sort_unstable();
            positrons.dedup();
            let config = OccupationConfig::new(electrons, positrons).expect("deduped");
            pairs.push((config, rng.amplitude()));
        }
        let state = FockStateVector::from_terms(pairs).expect("within limits");
        if let Ok(normalized) = state.normalized() {
            return normalized;
        }
    }
}

fn desk_domain() -> SimulationDomain<f64> {
    SimulationDomain::new(2.0 * std::f64::consts::PI, 256, 16).unwrap()
}

fn interference_state(domain: &SimulationDomain<f64>) -> FockStateVector<f64> {
    let p = Mode::positive_energy(2, domain).unwrap();
    let q = Mode::positive_energy(1, domain).unwrap();
    FockStateVector::two_electron_superposition(p, q).unwrap()
}

fn all_modes(domain: &SimulationDomain<f64>) -> Vec<Mode> {
    (-domain.r_max()..=domain.r_max())
        .filter(|&r| r != 0)
        .flat_map(|r| {
            [
                Mode::new(EnergySign::Positive, r, domain).unwrap(),
                Mode::new(EnergySign::Negative, r, domain).unwrap(),
            ]
        })
        .collect()
}

fn check_orthonormality_closed_form() -> CheckOutcome {
    let domain = desk_domain();
    let modes = all_modes(&domain);
    let mut worst = 0.0f64;
    for &a in &modes {
        for &b in &modes {
            let expect = if a == b { 1.0 } else { 0.0 };
            let got = inner_product(a, b, &domain);
            worst = worst.max((got.re - expect).abs().max(got.im.abs()));
        }
    }
    CheckOutcome::new(
        "orthonormality_closed_form",
        worst,
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        format!("all {} mode pairs at cutoff 16", modes.len() * modes.len()),
    )
}

#[allow(clippy::needless_range_loop)]
fn check_orthonormality_quadrature() -> CheckOutcome {
    // Independent oracle: trapezoid quadrature of the sampled spinors on a
    // grid resolving every harmonic difference.
    let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, 128, 16).unwrap();
    let modes = all_modes(&domain);
    let spinors: Vec<Vec<_>> = modes
        .iter()
        .map(|&m| {
            (0..domain.n_z())
                .map(|j| eigenfunction(m, domain.z_at(j), &domain))
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for (i, &a) in modes.iter().enumerate() {
        for (j, &b) in modes.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..domain.n_z() {
                acc += spinors[i][k].dot(&spinors[j][k]);
            }
            acc *= Complex64::from(domain.dz());
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((acc.re - expect).abs().max(acc.im.abs()));
        }
    }
    CheckOutcome::new(
        "orthonormality_grid_quadrature",
        worst,
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        "trapezoid oracle over every mode pair",
    )
}

#[allow(clippy::needless_range_loop)]
fn check_eigenrelation() -> CheckOutcome {
    let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, 128, 16).unwrap();
    let scale = 1.0 / domain.length().sqrt();
    let mut worst = 0.0f64;
    for mode in all_modes(&domain) {
        let energy = mode.energy(&domain);
        let n = domain.n_z();
        let mut comp = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for j in 0..n {
            let s = eigenfunction(mode, domain.z_at(j), &domain);
            comp[0][j] = s.upper.re;
            comp[1][j] = s.upper.im;
            comp[2][j] = s.lower.re;
            comp[3][j] = s.lower.im;
        }
        let d: Vec<Vec<f64>> = comp
            .iter()
            .map(|c| spectral_derivative(c, domain.length()))
            .collect();
        for j in 0..n {
            let s = eigenfunction(mode, domain.z_at(j), &domain);
            let h_upper = Complex64::new(d[1][j], -d[0][j]);
            let h_lower = Complex64::new(-d[3][j], d[2][j]);
            let defect = (h_upper - s.upper * energy)
                .norm()
                .max((h_lower - s.lower * energy).norm());
            worst = worst.max(defect / (scale * energy.abs().max(1.0)));
        }
    }
    CheckOutcome::new(
        "eigenrelation_spectral",
        worst,
        tolerances::EIGENRELATION_REL,
        Comparison::AtMost,
        true,
        "H0 acting via grid spectral derivative vs energy eigenvalue",
    )
}

fn check_car_algebra() -> CheckOutcome {
    let mut rng = SplitMix64(0x5eed_0001);
    let pool: Vec<i64> = (-3i64..=3).filter(|&r| r != 0).collect();
    let mut worst = 0.0f64;
    for _ in 0..12 {
        let state = random_state(&mut rng);
        for _ in 0..8 {
            let p = rng.pick(&pool);
            let q = rng.pick(&pool);
            let delta = if p == q { 1.0 } else { 0.0 };
            let anti = |a: LadderKind, ar: i64, b: LadderKind, br: i64| {
                let ab = state.apply(b, br).apply(a, ar);
                let ba = state.apply(a, ar).apply(b, br);
                state.inner(&FockStateVector::linear_combination(&[
                    (Complex64::new(1.0, 0.0), &ab),
                    (Complex64::new(1.0, 0.0), &ba),
                ]))
            };
            let cases = [
                (
                    anti(
                        LadderKind::ElectronAnnihilation,
                        p,
                        LadderKind::ElectronCreation,
                        q,
                    ),
                    delta,
                ),
                (
                    anti(
                        LadderKind::PositronAnnihilation,
                        p,
                        LadderKind::PositronCreation,
                        q,
                    ),
                    delta,
                ),
                (
                    anti(
                        LadderKind::ElectronAnnihilation,
                        p,
                        LadderKind::ElectronAnnihilation,
                        q,
                    ),
                    0.0,
                ),
                (
                    anti(
                        LadderKind::ElectronCreation,
                        p,
                        LadderKind::PositronCreation,
                        q,
                    ),
                    0.0,
                ),
                (
                    anti(
                        LadderKind::ElectronAnnihilation,
                        p,
                        LadderKind::PositronCreation,
                        q,
                    ),
                    0.0,
                ),
            ];
            for (value, expect) in cases {
                worst = worst.max((value - Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    CheckOutcome::new(
        "car_anticommutators",
        worst,
        tolerances::OPERATOR_ALGEBRA,
        Comparison::AtMost,
        true,
        "randomized states, every operator species pairing",
    )
}

fn check_bilinear_hermiticity() -> CheckOutcome {
    let mut rng = SplitMix64(0x5eed_0002);
    let mut worst = 0.0f64;
    for _ in 0..12 {
        let state = random_state(&mut rng);
        worst = worst.max(bilinear_matrices(&state).hermiticity_defect());
    }
    CheckOutcome::new(
        "bilinear_hermiticity",
        worst,
        tolerances::OPERATOR_ALGEBRA,
        Comparison::AtMost,
        true,
        "normal and hole blocks of randomized states",
    )
}

fn check_occupation_bounds() -> CheckOutcome {
    let mut rng = SplitMix64(0x5eed_0003);
    let mut worst = 0.0f64;
    for _ in 0..12 {
        let state = random_state(&mut rng);
        if let Some((lo, hi)) = bilinear_matrices(&state).occupation_eigenvalue_range() {
            worst = worst.max((-lo).max(hi - 1.0).max(0.0));
        }
    }
    CheckOutcome::new(
        "occupation_bounds",
        worst,
        tolerances::OCCUPATION_BOUNDS,
        Comparison::AtMost,
        true,
        "occupation eigenvalues confined to [0, 1]",
    )
}

fn check_current_reality_and_form() -> (CheckOutcome, CheckOutcome) {
    let domain = desk_domain();
    let state = interference_state(&domain);
    let p = Mode::positive_energy(2, &domain).unwrap();
    let q = Mode::positive_energy(1, &domain).unwrap();
    let wave = CurrentWave::new(&state, &domain, 1.0);
    let amplitude = wave.spatial_mean(0.0);
    let mut residue = 0.0f64;
    let mut form = 0.0f64;
    for ti in 0..64 {
        let t = domain.length() * ti as f64 / 64.0;
        let profile = wave.sample_profile(&domain, t, 1.0).unwrap();
        residue = residue.max(profile.max_imag_residue);
        for j in 0..domain.n_z() {
            let expect = closed_form_current(p, q, domain.z_at(j), t, amplitude, &domain).unwrap();
            form = form.max((profile.values[j] - expect).abs());
        }
    }
    (
        CheckOutcome::new(
            "current_reality",
            residue,
            tolerances::EXACT_IDENTITY,
            Comparison::AtMost,
            true,
            "imaginary residue of the mode sum over a 256x64 sample",
        ),
        CheckOutcome::new(
            "interference_form_residual",
            form,
            tolerances::EXACT_IDENTITY,
            Comparison::AtMost,
            true,
            format!("fitted amplitude {amplitude:.12e}"),
        ),
    )
}

fn check_chirality_identity() -> CheckOutcome {
    let domain = desk_domain();
    let state = interference_state(&domain);
    let q_charge = 1.7;
    let mut worst = 0.0f64;
    for &t in &[0.0, 0.31, 1.2] {
        let profile = current_profile(&state, t, &domain, q_charge).unwrap();
        let densities = component_densities(&state, t, &domain).unwrap();
        for j in 0..domain.n_z() {
            let diff = densities.right[j] - densities.left[j];
            worst = worst.max((diff - profile.values[j] / q_charge).abs());
        }
    }
    CheckOutcome::new(
        "chirality_identity",
        worst,
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        "density difference equals current per unit charge",
    )
}

fn check_free_transport() -> CheckOutcome {
    let domain = desk_domain();
    let state = interference_state(&domain);
    let wave = CurrentWave::new(&state, &domain, 1.0);
    let shift = 37usize;
    let t = domain.dz() * shift as f64;
    let mut worst = 0.0f64;
    for j in 0..domain.n_z() {
        let moved = wave.value_at(domain.z_at(j), t);
        let original = wave.value_at(domain.z_at((j + domain.n_z() - shift) % domain.n_z()), 0.0);
        worst = worst.max((moved - original).abs());
    }
    CheckOutcome::new(
        "free_transport",
        worst,
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        "right-moving profile shifts rigidly by one grid-aligned step",
    )
}

fn check_energy_conservation() -> CheckOutcome {
    let domain = desk_domain();
    let state = interference_state(&domain);
    let reference = free_energy(&state, &domain);
    let wave = energy_density_wave(&state, &domain);
    let mut worst = 0.0f64;
    for ti in 0..16 {
        let t = 2.0 * ti as f64 / 16.0;
        let (values, _) = wave.sample(&domain, t);
        let integral = trapezoid_periodic(&values, domain.dz());
        worst = worst.max((integral - reference).abs());
    }
    CheckOutcome::new(
        "energy_conservation",
        worst,
        tolerances::ENERGY_CONSERVATION,
        Comparison::AtMost,
        true,
        "grid energy integral is time independent",
    )
}

fn check_transport_solver() -> (CheckOutcome, CheckOutcome, CheckOutcome, CheckOutcome) {
    let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, 32, 16).unwrap();
    let v0 = 1.0;
    let k = 1.0;
    let q = 1.0;
    let reference_r = |z: f64, t: f64| q * v0 / k * ((k * z).sin() - (k * (z - t)).sin());
    let reference_l = |z: f64, t: f64| q * v0 / k * ((k * (z + t)).sin() - (k * z).sin());
    let solve = |n_t: usize| {
        let potential =
            PotentialField::analytic(move |z: f64, _t| v0 * (k * z).cos(), 1.0).unwrap();
        let phases = solve_phases(&potential, &domain, n_t, q).unwrap();
        let mut worst = 0.0f64;
        for level in 0..=n_t {
            let t = phases.t_at(level);
            for j in 0..domain.n_z() {
                let z = domain.z_at(j);
                worst = worst.max((phases.right_level(level)[j] - reference_r(z, t)).abs());
                worst = worst.max((phases.left_level(level)[j] - reference_l(z, t)).abs());
            }
        }
        (phases, worst)
    };

    let (phases, reference_error) = solve(2048);
    let mut unitarity = 0.0f64;
    let mut initial = 0.0f64;
    for level in 0..=phases.n_t() {
        for w in phase_rotations(&phases, phases.t_at(level)).unwrap() {
            unitarity = unitarity.max(w.unitarity_defect()).max(w.sigma3_defect());
        }
    }
    for j in 0..phases.n_z() {
        initial = initial
            .max(phases.right_level(0)[j].abs())
            .max(phases.left_level(0)[j].abs());
    }

    let errors: Vec<f64> = [8usize, 16, 32].iter().map(|&n| solve(n).1).collect();
    let order = (errors[0] / errors[1])
        .log2()
        .min((errors[1] / errors[2]).log2());

    (
        CheckOutcome::new(
            "transport_solver_reference",
            reference_error,
            tolerances::SOLVER_REFERENCE,
            Comparison::AtMost,
            true,
            "static-cosine closed form at 2048 panels, full grid",
        ),
        CheckOutcome::new(
            "transport_solver_order",
            order,
            tolerances::MIN_ORDER,
            Comparison::AtLeast,
            true,
            format!("errors {} at 8/16/32 panels", format_seq(&errors)),
        ),
        CheckOutcome::new(
            "rotation_unitarity",
            unitarity,
            tolerances::ROTATION_UNITARITY,
            Comparison::AtMost,
            true,
            "unit modulus and sigma3 conjugation at every grid point",
        ),
        CheckOutcome::new(
            "phase_initial_condition",
            initial,
            1e-15,
            Comparison::AtMost,
            true,
            "phases vanish identically at the window start",
        ),
    )
}

fn check_pde_residual_order() -> CheckOutcome {
    let f = |z: f64, t: f64| z.cos() * (1.0 + 0.5 * t);
    let mut residuals = Vec::new();
    for n in [32usize, 64, 128] {
        let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, n, 16).unwrap();
        let potential = PotentialField::analytic(f, 1.0).unwrap();
        let phases = solve_phases(&potential, &domain, n, 1.0).unwrap();
        let (r, l) = pde_residual(&phases, &potential, &domain, 1.0);
        residuals.push(r.max(l));
    }
    let order = (residuals[0] / residuals[1])
        .log2()
        .min((residuals[1] / residuals[2]).log2());
    CheckOutcome::new(
        "pde_residual_order",
        order,
        tolerances::MIN_ORDER,
        Comparison::AtLeast,
        true,
        format!("centered-difference residuals {}", format_seq(&residuals)),
    )
}

fn check_estimators() -> (CheckOutcome, CheckOutcome, CheckOutcome, CheckOutcome) {
    let config = ExperimentConfig::<f64>::desk_scale().unwrap();
    let f = 40.0;
    let potential =
        PotentialField::feedback(&config.state, f, config.t_f, &config.domain, config.q_charge)
            .unwrap();
    let report = run_extraction(&config, &potential).unwrap();

    // Convergence study on tabulated data, where the two estimators sample
    // the potential through genuinely different routes: the quadrature
    // estimator hits table nodes exactly while the characteristic solver
    // interpolates off-grid. The disagreement then carries measurable
    // second-order error. (For potentials the grid resolves exactly the two
    // estimators coincide to rounding; that identity is checked separately.)
    let smooth = |z: f64, t: f64| (z + 0.4).cos() * (1.0 + 0.5 * (std::f64::consts::PI * t).sin());
    let mut disagreements = Vec::new();
    for n in [32usize, 64, 128] {
        let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, n, 16).unwrap();
        let study =
            ExperimentConfig::new(domain.clone(), config.state.clone(), 1.0, n, 1.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..=n)
            .map(|ti| {
                let t = ti as f64 / n as f64;
                (0..n).map(|j| smooth(domain.z_at(j), t)).collect()
            })
            .collect();
        let table = PotentialTable::from_rows(rows, domain.length(), 1.0).unwrap();
        let tabulated = PotentialField::from_table(table).unwrap();
        let r = run_extraction(&study, &tabulated).unwrap();
        disagreements.push((r.quadrature.delta - r.direct.delta).abs());
    }
    let order = (disagreements[0] / disagreements[1])
        .log2()
        .min((disagreements[1] / disagreements[2]).log2());

    let closed = report.closed_form.expect("feedback on interference state");
    let closed_rel = ((report.quadrature.delta - closed.delta) / closed.delta).abs();
    let amplitude_ratio = report.amplitude_oracle.unwrap() / report.amplitude_reference.unwrap();

    (
        CheckOutcome::new(
            "estimator_agreement",
            report.rel_disagreement,
            tolerances::ESTIMATOR_AGREEMENT_REL,
            Comparison::AtMost,
            true,
            format!("desk-scale feedback run at f = {f}"),
        ),
        CheckOutcome::new(
            "estimator_convergence_order",
            order,
            tolerances::MIN_ORDER,
            Comparison::AtLeast,
            true,
            format!(
                "disagreements {} under joint refinement",
                format_seq(&disagreements)
            ),
        ),
        CheckOutcome::new(
            "closed_form_agreement",
            closed_rel,
            tolerances::ESTIMATOR_AGREEMENT_REL,
            Comparison::AtMost,
            false,
            "advisory: closed form with the measured amplitude",
        ),
        CheckOutcome::new(
            "interference_amplitude_ratio",
            amplitude_ratio,
            0.0,
            Comparison::AtLeast,
            false,
            format!(
                "advisory: measured {:.12e} vs reference {:.12e}; the exact \
                 mode sum fixes the amplitude at q/L",
                report.amplitude_oracle.unwrap(),
                report.amplitude_reference.unwrap()
            ),
        ),
    )
}

fn check_null_results() -> (CheckOutcome, CheckOutcome) {
    let config = ExperimentConfig::<f64>::desk_scale().unwrap();
    let vacuum = FockStateVector::vacuum();
    let domain = &config.domain;

    // A battery of five structurally different potentials.
    let mut potentials: Vec<PotentialField<f64>> = vec![
        PotentialField::feedback(&config.state, 7.0, 1.0, domain, 1.0).unwrap(),
        PotentialField::analytic(|z: f64, t: f64| (z - 2.0 * t).cos(), 1.0).unwrap(),
        PotentialField::analytic(|z: f64, t: f64| (2.0 * z).sin() * (3.0 * t).sin(), 1.0)
            .unwrap(),
        PotentialField::analytic(|_z, t: f64| 2.0 + t, 1.0).unwrap(),
    ];
    let rows: Vec<Vec<f64>> = (0..=32)
        .map(|ti| {
            let t = ti as f64 / 32.0;
            (0..domain.n_z())
                .map(|j| (domain.z_at(j) * 3.0).cos() * (1.0 + t * t))
                .collect()
        })
        .collect();
    potentials.push(
        PotentialField::from_table(PotentialTable::from_rows(rows, domain.length(), 1.0).unwrap())
            .unwrap(),
    );

    let mut vacuum_worst = 0.0f64;
    for potential in &potentials {
        let delta = delta_energy_quadrature(potential, &vacuum, &config).unwrap();
        vacuum_worst = vacuum_worst.max(delta.abs());
    }

    let uniform =
        PotentialField::analytic(|_z, t: f64| 5.0 * (1.0 + (2.0 * t).sin()), 1.0).unwrap();
    let uniform_delta = delta_energy_quadrature(&uniform, &config.state, &config)
        .unwrap()
        .abs();

    (
        CheckOutcome::new(
            "null_vacuum_state",
            vacuum_worst,
            tolerances::EXACT_IDENTITY,
            Comparison::AtMost,
            true,
            "five potentials extract nothing from the vacuum",
        ),
        CheckOutcome::new(
            "null_uniform_potential",
            uniform_delta,
            tolerances::EXACT_IDENTITY,
            Comparison::AtMost,
            true,
            "spatially uniform potential extracts nothing",
        ),
    )
}

fn check_sweep() -> (CheckOutcome, CheckOutcome) {
    let config = ExperimentConfig::<f64>::desk_scale().unwrap();
    let couplings = [1.0, 10.0, 100.0, 1000.0, 10000.0];
    let table = sweep_f(&config, &couplings).unwrap();
    let monotone = table
        .rows
        .windows(2)
        .all(|w| w[1].quadrature.delta < w[0].quadrature.delta);
    let all_negative = table.rows.iter().all(|r| r.quadrature.delta < 0.0);
    let last = table.rows.last().unwrap();
    let margin = last.quadrature.xi0_final + 10.0 * last.xi0_initial;

    let linearity = CheckOutcome::new(
        "sweep_linearity",
        table.max_linearity_deviation,
        tolerances::SWEEP_LINEARITY_REL,
        Comparison::AtMost,
        true,
        "delta scales linearly over four decades of coupling",
    );
    let mut unbounded = CheckOutcome::new(
        "energy_unbounded_below",
        margin,
        0.0,
        Comparison::Below,
        true,
        format!(
            "final energy {:.6e} vs initial {:.6e}; monotone {}",
            last.quadrature.xi0_final, last.xi0_initial, monotone
        ),
    );
    unbounded.passed = unbounded.passed && monotone && all_negative;
    (linearity, unbounded)
}

fn check_estimator_identity() -> CheckOutcome {
    // Both chiral densities transport rigidly, so for potentials whose
    // harmonics the grid resolves the direct estimator reduces to exactly
    // the quadrature estimator's weighted sums. Checked on a state mixing
    // species and chiralities.
    let domain = SimulationDomain::new(2.0 * std::f64::consts::PI, 64, 16).unwrap();
    let vacuum: FockStateVector<f64> = FockStateVector::vacuum();
    let with_positron = |e: i64, h: i64| {
        vacuum
            .apply(LadderKind::PositronCreation, h)
            .apply(LadderKind::ElectronCreation, e)
    };
    let mixed = FockStateVector::linear_combination(&[
        (Complex64::new(1.0, 0.0), &with_positron(1, 1)),
        (Complex64::new(1.0, 0.0), &with_positron(1, 3)),
        (Complex64::new(1.0, 0.0), &with_positron(2, 1)),
        (Complex64::new(1.0, 0.0), &with_positron(2, 3)),
    ])
    .normalized()
    .unwrap();
    let config = ExperimentConfig::new(domain, mixed, 1.0, 48, 1.0).unwrap();
    let potential = PotentialField::analytic(
        |z: f64, t: f64| {
            (z + 0.4).cos() * (std::f64::consts::PI * t).sin().powi(2) + 0.3 * (2.0 * z).sin()
        },
        1.0,
    )
    .unwrap();
    let report = run_extraction(&config, &potential).unwrap();
    CheckOutcome::new(
        "estimator_identity_resolved_potentials",
        (report.quadrature.delta - report.direct.delta).abs(),
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        "rigid chiral transport collapses the two estimators to rounding",
    )
}

fn check_closed_form_consistency() -> CheckOutcome {
    // The quadrature value must match the analytic evaluation of the
    // feedback pairing for the interference state, coupling by coupling.
    let config = ExperimentConfig::<f64>::desk_scale().unwrap();
    let p = Mode::positive_energy(2, &config.domain).unwrap();
    let q = Mode::positive_energy(1, &config.domain).unwrap();
    let amplitude = CurrentWave::new(&config.state, &config.domain, 1.0).spatial_mean(0.0);
    let mut worst = 0.0f64;
    for &f in &[1.0, 64.0] {
        let potential =
            PotentialField::feedback(&config.state, f, config.t_f, &config.domain, 1.0).unwrap();
        let quad = delta_energy_quadrature(&potential, &config.state, &config).unwrap();
        let closed =
            delta_energy_closed_form(f, config.t_f, p, q, amplitude, &config.domain).unwrap();
        worst = worst.max(((quad - closed) / closed).abs());
    }
    CheckOutcome::new(
        "quadrature_vs_analytic_pairing",
        worst,
        tolerances::EXACT_IDENTITY,
        Comparison::AtMost,
        true,
        "2D quadrature reproduces the analytic window integral",
    )
}

/// Run the complete battery. Gating checks must all pass for a healthy
/// build; advisory entries are informational.
pub fn run_standard_suite() -> Vec<CheckOutcome> {
    let (reality, form) = check_current_reality_and_form();
    let (reference, order, unitarity, initial) = check_transport_solver();
    let (agreement, est_order, closed_advisory, amplitude_advisory) = check_estimators();
    let (null_vacuum, null_uniform) = check_null_results();
    let (linearity, unbounded) = check_sweep();
    vec![
        check_orthonormality_closed_form(),
        check_orthonormality_quadrature(),
        check_eigenrelation(),
        check_car_algebra(),
        check_bilinear_hermiticity(),
        check_occupation_bounds(),
        reality,
        form,
        check_chirality_identity(),
        check_free_transport(),
        check_energy_conservation(),
        reference,
        order,
        unitarity,
        initial,
        check_pde_residual_order(),
        agreement,
        est_order,
        check_estimator_identity(),
        check_closed_form_consistency(),
        null_vacuum,
        null_uniform,
        linearity,
        unbounded,
        closed_advisory,
        amplitude_advisory,
    ]
}
