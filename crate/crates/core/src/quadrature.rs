//! Quadrature rules and spectral differentiation on uniform grids.
//!
//! The periodic trapezoid rule is exact for every Fourier harmonic the grid
//! resolves, so it serves as the spatial integrator throughout. Time
//! integrals over smooth data use composite Simpson; tabulated data falls
//! back to the trapezoid rule.

use crate::scalar::Scalar;

/// Quadrature rule for uniformly sampled integrands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadRule {
    /// Second order; the right choice for data only known at the nodes.
    Trapezoid,
    /// Fourth order on smooth integrands. Odd panel counts are closed with a
    /// 3/8 tail block.
    Simpson,
}

/// Sum of samples times the step: the trapezoid rule on a periodic grid
/// where the first point stands in for the absent duplicate endpoint.
pub fn trapezoid_periodic<S: Scalar>(values: &[S], step: S) -> S {
    values.iter().fold(S::zero(), |acc, &v| acc + v) * step
}

/// Composite quadrature over samples at uniform spacing `step`.
///
/// `values` holds the integrand at the panel boundaries, so `values.len() - 1`
/// panels are integrated. Fewer than two samples integrate to zero.
pub fn integrate_samples<S: Scalar>(values: &[S], step: S, rule: QuadRule) -> S {
    match rule {
        QuadRule::Trapezoid => trapezoid_samples(values, step),
        QuadRule::Simpson => simpson_samples(values, step),
    }
}

fn trapezoid_samples<S: Scalar>(values: &[S], step: S) -> S {
    if values.len() < 2 {
        return S::zero();
    }
    let half = S::cast(0.5);
    let interior = values[1..values.len() - 1]
        .iter()
        .fold(S::zero(), |acc, &v| acc + v);
    step * (interior + half * (values[0] + values[values.len() - 1]))
}

fn simpson_samples<S: Scalar>(values: &[S], step: S) -> S {
    let panels = values.len().saturating_sub(1);
    match panels {
        0 => S::zero(),
        1 => trapezoid_samples(values, step),
        _ if panels.is_multiple_of(2) => simpson_even(values, step),
        // Odd panel count: Simpson on the leading even block, 3/8 on the tail.
        _ => {
            let split = values.len() - 4;
            let head = if split == 0 {
                S::zero()
            } else {
                simpson_even(&values[..=split], step)
            };
            head + simpson_38(&values[split..], step)
        }
    }
}

fn simpson_even<S: Scalar>(values: &[S], step: S) -> S {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let two = S::cast(2.0);
    let four = S::cast(4.0);
    let mut acc = values[0] + values[n];
    for (i, &v) in values.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { four * v } else { two * v };
    }
    acc * step / S::cast(3.0)
}

fn simpson_38<S: Scalar>(values: &[S], step: S) -> S {
    debug_assert_eq!(values.len(), 4);
    let three = S::cast(3.0);
    (values[0] + three * values[1] + three * values[2] + values[3])
        * step
        * S::cast(3.0 / 8.0)
}

/// Integrate `f` over `[a, b]` with `panels` uniform panels.
///
/// With the Simpson rule a single panel is subdivided once so the composite
/// rule keeps its full order down to one requested panel.
pub fn integrate_fn<S: Scalar>(
    f: impl Fn(S) -> S,
    a: S,
    b: S,
    panels: usize,
    rule: QuadRule,
) -> S {
    if panels == 0 || a == b {
        return S::zero();
    }
    let panels = if rule == QuadRule::Simpson && panels == 1 {
        2
    } else {
        panels
    };
    let step = (b - a) / S::cast(panels);
    let values: Vec<S> = (0..=panels).map(|i| f(a + step * S::cast(i))).collect();
    integrate_samples(&values, step, rule)
}

/// Derivative of a periodic real sample set by discrete Fourier transform.
///
/// Exact (to rounding) for data whose harmonics the grid resolves; the
/// unpaired Nyquist mode on even grids is dropped, which is the standard
/// convention for the first derivative.
pub fn spectral_derivative<S: Scalar>(values: &[S], domain_length: S) -> Vec<S> {
    let n = values.len();
    assert!(n >= 2, "spectral derivative needs at least two samples");
    let two_pi = S::PI() * S::cast(2.0);
    // Forward transform (naive DFT; grids here are small).
    let mut spec_re = vec![S::zero(); n];
    let mut spec_im = vec![S::zero(); n];
    for (k, (sr, si)) in spec_re.iter_mut().zip(spec_im.iter_mut()).enumerate() {
        let mut re = S::zero();
        let mut im = S::zero();
        for (j, &v) in values.iter().enumerate() {
            // Reduce j*k modulo n before forming the angle to keep precision.
            let angle = -two_pi * S::cast((j * k) % n) / S::cast(n);
            re += v * angle.cos();
            im += v * angle.sin();
        }
        *sr = re;
        *si = im;
    }
    // Multiply by i * k_phys and invert.
    let mut out = vec![S::zero(); n];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = S::zero();
        for k in 0..n {
            let signed = if 2 * k > n { k as i64 - n as i64 } else { k as i64 };
            if n.is_multiple_of(2) && 2 * k == n {
                continue; // unpaired Nyquist mode
            }
            let k_phys = two_pi * S::cast(signed) / domain_length;
            // i * k_phys * (re + i im) = -k_phys*im + i k_phys*re
            let dre = -k_phys * spec_im[k];
            let dim = k_phys * spec_re[k];
            let angle = two_pi * S::cast((j * k) % n) / S::cast(n);
            acc = acc + dre * angle.cos() - dim * angle.sin();
        }
        *slot = acc / S::cast(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn simpson_exact_on_cubics() {
        // f(x) = x^3 - 2x + 1 over [0, 2]; exact integral = 4 - 4 + 2 = 2.
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        for panels in [2usize, 4, 8] {
            let got = integrate_fn(f, 0.0, 2.0, panels, QuadRule::Simpson);
            assert_relative_eq!(got, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_odd_panel_tail_is_exact_on_cubics() {
        let f = |x: f64| x * x * x;
        for panels in [3usize, 5, 7, 9] {
            let got = integrate_fn(f, 0.0, 1.0, panels, QuadRule::Simpson);
            assert_relative_eq!(got, 0.25, epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_single_panel_subdivides() {
        let f = |x: f64| x * x;
        let got = integrate_fn(f, 0.0, 1.0, 1, QuadRule::Simpson);
        assert_relative_eq!(got, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn simpson_converges_fourth_order() {
        let f = |x: f64| (3.0 * x).sin().exp();
        let exact = integrate_fn(f, 0.0, 1.0, 4096, QuadRule::Simpson);
        let e1 = (integrate_fn(f, 0.0, 1.0, 16, QuadRule::Simpson) - exact).abs();
        let e2 = (integrate_fn(f, 0.0, 1.0, 32, QuadRule::Simpson) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    #[test]
    fn periodic_trapezoid_kills_resolved_harmonics() {
        let n = 32;
        let dz = 2.0 * PI / n as f64;
        for k in 1..=10i64 {
            let values: Vec<f64> = (0..n)
                .map(|j| (k as f64 * (j as f64 * dz - PI)).cos())
                .collect();
            let integral = trapezoid_periodic(&values, dz);
            assert!(integral.abs() < 1e-13, "harmonic {k} left {integral}");
        }
    }

    #[test]
    fn spectral_derivative_exact_for_trig() {
        let n = 64;
        let length = 2.0 * PI;
        let dz = length / n as f64;
        let z: Vec<f64> = (0..n).map(|j| -length / 2.0 + j as f64 * dz).collect();
        let values: Vec<f64> = z.iter().map(|&z| (3.0 * z).sin() + 0.5 * (7.0 * z).cos()).collect();
        let expect: Vec<f64> = z
            .iter()
            .map(|&z| 3.0 * (3.0 * z).cos() - 3.5 * (7.0 * z).sin())
            .collect();
        let got = spectral_derivative(&values, length);
        for (g, e) in got.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, epsilon = 1e-11);
        }
    }

    #[test]
    fn spectral_derivative_of_constant_vanishes() {
        let got = spectral_derivative(&[4.2f64; 16], 10.0);
        for g in got {
            assert!(g.abs() < 1e-13);
        }
    }

    #[test]
    fn trapezoid_matches_closed_form_on_line() {
        // Linear integrand: trapezoid is exact.
        let values: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64 + 1.0).collect();
        let got = integrate_samples(&values, 0.5, QuadRule::Trapezoid);
        // integral of 4x+1 over [0,5] = 55
        assert_relative_eq!(got, 55.0, epsilon = 1e-12);
    }
}
