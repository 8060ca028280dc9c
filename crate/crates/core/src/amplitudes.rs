//! Closed-form probability amplitudes of the displaced-frame dynamics.
//!
//! The undriven Hamiltonian conserves the total excitation, so the state
//! starting from `|1,1,n⟩` stays inside a nine-ket manifold. Exchange symmetry
//! reduces that manifold to six amplitudes C₁…C₆, one per slot of
//! [`SLOT_KETS`](crate::model::SLOT_KETS), each living at photon number
//! `n + photon_offsets[slot]`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{coherent_amplitudes, coupling, initial_amplitude, ConfigKind, Frame, JointState, SystemParams, SLOT_KETS, SLOT_MULTIPLICITY};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The six amplitudes of manifold `n` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub n: usize,
    pub t: f64,
    pub c: [Complex64; 6],
}

impl AmplitudeSet {
    /// Multiplicity-weighted norm `|C₁|² + 2|C₂|² + 2|C₃|² + 2|C₄|² + |C₅|² + |C₆|²`.
    pub fn weighted_norm(&self) -> f64 {
        self.c.iter().zip(SLOT_MULTIPLICITY).map(|(c, w)| w as f64 * c.norm_sqr()).sum()
    }

    fn scaled(n: usize, t: f64, unit: [Complex64; 6], scale: f64) -> Self {
        AmplitudeSet { n, t, c: unit.map(|c| c * scale) }
    }
}

/// Auxiliary constants of the Ξ-type solution for one manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCoefficients {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
    pub eta: f64,
    /// Upper effective frequency, `β₁² = (x3 + η)/2`.
    pub beta1: f64,
    /// Lower effective frequency, `β₂² = (x3 - η)/2`.
    pub beta2: f64,
    /// `V(n+1) … V(n+4)`.
    pub v: [f64; 4],
}

pub fn xi_coefficients(n: usize, g: f64) -> Result<XiCoefficients> {
    let v = [1, 2, 3, 4].map(|j| coupling(n + j, g));
    let [v1, v2, v3, v4] = v;
    let (s1, s2, s3, s4) = (v1 * v1, v2 * v2, v3 * v3, v4 * v4);
    let x1 = 6.0 * v1 * v2 * v3 * v4;
    let x4 = 6.0 * s1 * s3 + 4.0 * s1 * s4;
    let x2 = x4 + 6.0 * s2 * s4;
    let x3 = 2.0 * (s1 + s4) + 3.0 * (s2 + s3);
    let x5 = 2.0 * v1 * v2 * s4;
    let eta = (x3 * x3 - 4.0 * x2).max(0.0).sqrt();
    if !(eta >= 1e-12 * x3) {
        return Err(Error::DegenerateSpectrum { n, eta, x3 });
    }
    let beta1 = (0.5 * (x3 + eta)).sqrt();
    // x3 - η loses digits when η ≈ x3, the product form does not
    let beta2 = (x2 / (beta1 * beta1)).sqrt();
    Ok(XiCoefficients { x1, x2, x3, x4, x5, eta, beta1, beta2, v })
}

/// V-type amplitudes for a manifold whose `|1,1,n⟩` amplitude is 1 at `t = 0`.
pub fn unit_amplitudes_v(n: usize, t: f64, g: f64) -> [Complex64; 6] {
    let v1 = coupling(n + 1, g);
    let v2 = coupling(n + 2, g);
    let theta2 = v1 * v1 + v2 * v2;
    let theta = theta2.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;

    let (sin_r, cos_r) = (sqrt2 * v1 * t).sin_cos();
    let (sin_th, _) = (theta * t).sin_cos();
    let (sin_2th, cos_2th) = (2.0 * theta * t).sin_cos();
    let sin2_th = sin_th * sin_th;

    let slow = (v1 * v1 + 2.0 * v2 * v2 + v1 * v1 * cos_2th) / theta2;
    let c1 = 0.25 * (2.0 * cos_r + slow);
    let c2 = -0.5 * v1 * v1 * sin2_th / theta2;
    let c3 = -0.25 * (sqrt2 * sin_r + v1 * sin_2th / theta);
    let c4 = 0.25 * (sqrt2 * sin_r - v1 * sin_2th / theta);
    let c5 = 0.25 * (-2.0 * cos_r + slow);
    let c6 = -v1 * v2 * sin2_th / theta2;
    [c1.into(), c2.into(), I * c3, I * c4, c5.into(), c6.into()]
}

/// Ξ-type amplitudes for a manifold whose `|1,1,n⟩` amplitude is 1 at `t = 0`.
pub fn unit_amplitudes_xi(n: usize, t: f64, g: f64) -> Result<[Complex64; 6]> {
    let XiCoefficients { x1, x2, x4, x5, eta, beta1: b1, beta2: b2, v, .. } = xi_coefficients(n, g)?;
    let [v1, v2, _, v4] = v;
    let (b1s, b2s) = (b1 * b1, b2 * b2);
    let (sin1, cos1) = (b1 * t).sin_cos();
    let (sin2, cos2) = (b2 * t).sin_cos();
    let x2eta = x2 * eta;
    let v1s = v1 * v1;

    let c1 = ((x2 - x4) * eta + (2.0 * v1s * x2 - b2s * x4) * cos1 - (2.0 * v1s * x2 - b1s * x4) * cos2) / x2eta;
    let c2 = ((x4 - 2.0 * b1s * v1s) * b2 * sin1 - (x4 - 2.0 * b2s * v1s) * b1 * sin2) / (2.0 * b1 * b2 * eta * v1);
    let c3 = (-x5 * eta - (b2s * x5 - v1 * v2 * x2) * cos1 + (b1s * x5 - v1 * v2 * x2) * cos2) / x2eta;
    let c4 = -x1 / (2.0 * v4 * eta) * (sin1 / b1 - sin2 / b2);
    let c5 = 2.0 * c3;
    let c6 = x1 / x2eta * (eta - b1s * cos2 + b2s * cos1);
    Ok([c1.into(), I * c2, c3.into(), I * c4, c5.into(), c6.into()])
}

/// Λ-type amplitudes for a manifold whose `|1,1,n⟩` amplitude is 1 at `t = 0`.
///
/// The effective frequency is `V₃ = √(V₁² + V₂²)`.
pub fn unit_amplitudes_lambda(n: usize, t: f64, g: f64) -> [Complex64; 6] {
    let v1 = coupling(n + 1, g);
    let v2 = coupling(n + 2, g);
    let v3s = v1 * v1 + v2 * v2;
    let v3 = v3s.sqrt();
    let (sin_v, _) = (v3 * t).sin_cos();
    let (sin_2v, cos_2v) = (2.0 * v3 * t).sin_cos();

    let c1 = (v2 * v2 + v1 * v1 * cos_2v) / v3s;
    let c23 = -v1 * sin_2v / (2.0 * v3);
    let c456 = -v1 * v2 * sin_v * sin_v / v3s;
    [c1.into(), I * c23, I * c23, c456.into(), c456.into(), c456.into()]
}

/// Unit-normalized manifold amplitudes for any configuration.
pub fn unit_amplitudes(kind: ConfigKind, n: usize, t: f64, g: f64) -> Result<[Complex64; 6]> {
    match kind {
        ConfigKind::V => Ok(unit_amplitudes_v(n, t, g)),
        ConfigKind::Xi => unit_amplitudes_xi(n, t, g),
        ConfigKind::Lambda => Ok(unit_amplitudes_lambda(n, t, g)),
    }
}

pub fn amplitudes_v(n: usize, t: f64, params: &SystemParams) -> AmplitudeSet {
    AmplitudeSet::scaled(n, t, unit_amplitudes_v(n, t, params.g), initial_amplitude(n, params.beta))
}

pub fn amplitudes_xi(n: usize, t: f64, params: &SystemParams) -> Result<AmplitudeSet> {
    Ok(AmplitudeSet::scaled(n, t, unit_amplitudes_xi(n, t, params.g)?, initial_amplitude(n, params.beta)))
}

pub fn amplitudes_lambda(n: usize, t: f64, params: &SystemParams) -> AmplitudeSet {
    AmplitudeSet::scaled(n, t, unit_amplitudes_lambda(n, t, params.g), initial_amplitude(n, params.beta))
}

/// Amplitudes of manifold `n` at physical time `t` for the configuration in `params`.
pub fn amplitudes(n: usize, t: f64, params: &SystemParams) -> Result<AmplitudeSet> {
    let unit = unit_amplitudes(params.kind(), n, t, params.g)?;
    Ok(AmplitudeSet::scaled(n, t, unit, initial_amplitude(n, params.beta)))
}

/// Transformed-frame joint state `|ψ₂(t)⟩` at physical time `t`.
///
/// Manifolds whose highest ket would exceed `n_max` are left out entirely.
pub fn assemble_state(t: f64, params: &SystemParams) -> Result<JointState> {
    let cfg = params.config;
    let n_max = params.n_max;
    let mut state = JointState::zeros(n_max, Frame::Transformed);
    let Some(last) = n_max.checked_sub(cfg.max_offset()) else {
        return Ok(state);
    };
    let weights = coherent_amplitudes(params.beta, last);
    for (n, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let unit = unit_amplitudes(cfg.kind, n, t, params.g)?;
        for (slot, kets) in SLOT_KETS.iter().enumerate() {
            let m = n + cfg.photon_offsets[slot];
            let value = unit[slot] * w;
            for &(a, b) in kets.iter() {
                state.set(a, b, m, value);
            }
        }
    }
    Ok(state)
}

/// [`assemble_state`] at every dimensionless time of `params.t_grid`.
pub fn assemble_trajectory(params: &SystemParams) -> Result<Vec<JointState>> {
    params.t_grid.par_iter().map(|&gt| assemble_state(params.time(gt), params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_initial_joint_state;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn v_type_at_zero() {
        for n in [0, 1, 7, 40] {
            let c = unit_amplitudes_v(n, 0.0, 1.3);
            assert!(close(c[0], 1.0.into(), 1e-15));
            assert!(c[1..].iter().all(|x| x.norm() < 1e-15));
        }
    }

    #[test]
    fn v_type_half_period() {
        let theta = 3f64.sqrt();
        let c = unit_amplitudes_v(0, PI / theta, 1.0);
        assert!(c[5].norm() < 1e-15);
        assert!(c[1].norm() < 1e-15);
    }

    #[test]
    fn xi_coefficients_n0() {
        let x = xi_coefficients(0, 1.0).unwrap();
        assert!((x.x1 - 12.0 * 6f64.sqrt()).abs() < 1e-12);
        assert!((x.x1 - 29.393876913398135).abs() < 1e-12);
        assert!((x.x2 - 82.0).abs() < 1e-12);
        assert!((x.x3 - 25.0).abs() < 1e-12);
        assert!((x.x4 - 34.0).abs() < 1e-12);
        assert!((x.x5 - 8.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((x.eta - 297f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn xi_coefficient_identities() {
        for n in [0, 1, 2, 10, 100, 250] {
            for g in [0.3, 1.0, 2.5] {
                let x = xi_coefficients(n, g).unwrap();
                let (b1s, b2s) = (x.beta1 * x.beta1, x.beta2 * x.beta2);
                assert!((b1s - b2s - x.eta).abs() <= 1e-12 * x.x3, "n={n}");
                assert!((b1s + b2s - x.x3).abs() <= 1e-12 * x.x3);
                assert!((b1s * b2s - x.x2).abs() <= 1e-12 * x.x2);
                let [_, v2, _, v4] = x.v;
                assert!((x.x2 - x.x4 - 6.0 * v2 * v2 * v4 * v4).abs() <= 1e-12 * x.x2);
            }
        }
    }

    #[test]
    fn xi_type_at_zero_and_c5_ratio() {
        for n in [0, 3, 30] {
            let c = unit_amplitudes_xi(n, 0.0, 1.0).unwrap();
            assert!(close(c[0], 1.0.into(), 1e-13));
            assert!(c[1..].iter().all(|x| x.norm() < 1e-13));
            for t in [0.1, 0.7, 3.3, 12.0] {
                let c = unit_amplitudes_xi(n, t, 1.0).unwrap();
                assert_eq!(c[4], c[2] * 2.0);
            }
        }
    }

    #[test]
    fn lambda_type_quarter_period() {
        let v3 = 3f64.sqrt();
        let p = SystemParams::with_gamma(ConfigKind::Lambda, 1.0, 0.5, 1.0).unwrap();
        let a = amplitudes_lambda(0, PI / (2.0 * v3), &p);
        let c0 = initial_amplitude(0, p.beta);
        assert!(close(a.c[0], (c0 / 3.0).into(), 1e-15));
        assert!(a.c[1].norm() < 1e-15 && a.c[2].norm() < 1e-15);
        for k in 3..6 {
            assert!(close(a.c[k], (-(2f64.sqrt()) * c0 / 3.0).into(), 1e-15));
        }
        assert!((a.weighted_norm() - c0 * c0).abs() < 1e-15);
    }

    #[test]
    fn periodic_zeros() {
        for n in [0, 2, 9] {
            let v1 = coupling(n + 1, 1.0);
            let v2 = coupling(n + 2, 1.0);
            let theta = (v1 * v1 + v2 * v2).sqrt();
            for k in 1..4 {
                let t = k as f64 * PI / theta;
                assert!(unit_amplitudes_v(n, t, 1.0)[5].norm() < 1e-13);
                let l = unit_amplitudes_lambda(n, t, 1.0);
                assert!(l[3..].iter().all(|c| c.norm() < 1e-13));
            }
        }
    }

    #[test]
    fn per_manifold_unitarity() {
        let p = SystemParams::with_gamma(ConfigKind::V, 1.0, 2.0, 5.0).unwrap();
        for kind in ConfigKind::ALL {
            let mut p = p.clone();
            p.config = kind.into();
            for n in [0, 1, 5, 49, 120] {
                let w = initial_amplitude(n, p.beta).powi(2);
                for t in [0.1, 1.0, 5.0, 20.0] {
                    let a = amplitudes(n, t, &p).unwrap();
                    assert!((a.weighted_norm() - w).abs() <= 1e-12, "{kind} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn assembled_state_at_zero_is_initial_state() {
        for kind in ConfigKind::ALL {
            let p = SystemParams::with_gamma(kind, 1.0, 2.0, 5.0).unwrap();
            let s = assemble_state(0.0, &p).unwrap();
            let s0 = build_initial_joint_state(&p);
            assert!(s.max_abs_diff(&s0).unwrap() < 1e-12);
        }
    }

    #[test]
    fn assembled_state_norm_and_symmetry() {
        for kind in ConfigKind::ALL {
            let p = SystemParams::with_gamma(kind, 1.0, 2.0, 5.0).unwrap();
            for gt in [0.3, 2.0, 11.0, 25.0] {
                let s = assemble_state(p.time(gt), &p).unwrap();
                assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                assert_eq!(s.exchange_asymmetry(), 0.0);
            }
        }
    }
}
