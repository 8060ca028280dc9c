//! Nonclassicality diagnostics: von Neumann entropy, negativity, the Mandel
//! parameter and normal quadrature squeezing.
//!
//! Field moments are evaluated on the transformed-frame state with shifted
//! ladder operators, `⟨ψ|â†ᵖ âᵠ|ψ⟩ = ⟨ψ₂|(â† − γ)ᵖ (â − γ)ᵠ|ψ₂⟩`, so no
//! numerical displacement is needed.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::density::{partial_transpose_b, rho_atoms, slot_pair_index, DensityMatrix, LAMBDA_SUPPORT_SLOTS};
use crate::error::{Error, Result};
use crate::model::JointState;

/// Eigenvalues below this are treated as zero in the entropy.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// Population at `m = n_max` above which moments are flagged as truncated.
pub const TRUNCATION_WARNING: f64 = 1e-10;

/// All four diagnostics at one dimensionless time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSample {
    pub gt: f64,
    /// Atom–field entanglement in nats.
    pub entropy: f64,
    /// Atom–atom negativity.
    pub negativity: f64,
    /// `None` when the mean photon number vanishes.
    pub mandel_q: Option<f64>,
    pub s_x: f64,
    pub s_y: f64,
}

/// `−Σ ξ ln ξ` over the eigenvalues of `rho`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&x| x > ENTROPY_CLAMP)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Nonzero spectrum of a Λ-type two-atom density matrix from its cubic
/// characteristic polynomial `ξ³ + ϱ₁ξ² + ϱ₂ξ + ϱ₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanoEigenvalues {
    pub xi: [f64; 3],
    pub varrho: [f64; 3],
    pub varpi: f64,
}

/// Three nonzero eigenvalues of a Λ-type atomic density matrix.
///
/// The support is spanned by `|1,1⟩`, `(|1,2⟩+|2,1⟩+|1,3⟩+|3,1⟩)/2` and
/// `(|2,2⟩+|3,3⟩+|2,3⟩+|3,2⟩)/2`; the weights 1, 4, 4 in the coefficients
/// come from those normalizations.
pub fn cardano_eigenvalues(rho: &DensityMatrix) -> Result<CardanoEigenvalues> {
    let [i1, i2, i4] = LAMBDA_SUPPORT_SLOTS.map(slot_pair_index);
    let r = |i: usize, j: usize| rho.get(i, j);
    let (r11, r22, r44) = (r(i1, i1), r(i2, i2), r(i4, i4));
    let (r12, r21, r14, r41, r24, r42) = (r(i1, i2), r(i2, i1), r(i1, i4), r(i4, i1), r(i2, i4), r(i4, i2));

    let rho1 = (-r11 - 4.0 * (r22 + r44)).re;
    let rho2 = (-4.0 * (r12 * r21 + r14 * r41 + 4.0 * r24 * r42) + 4.0 * r11 * (r22 + r44) + 16.0 * r22 * r44).re;
    let rho3 = (16.0 * r14 * (r22 * r41 - r21 * r42) + 16.0 * r12 * (r21 * r44 - r24 * r41) + 16.0 * r11 * (r24 * r42 - r22 * r44)).re;

    let disc = rho1 * rho1 - 3.0 * rho2;
    let scale = rho1 * rho1;
    if disc < -1e-12 * scale.max(1.0) {
        return Err(Error::IllConditioned(disc));
    }
    let varrho = [rho1, rho2, rho3];
    if disc <= 1e-15 * scale {
        let x = -rho1 / 3.0;
        return Ok(CardanoEigenvalues { xi: [x; 3], varrho, varpi: 0.0 });
    }
    let arg = (9.0 * rho1 * rho2 - 2.0 * rho1.powi(3) - 27.0 * rho3) / (2.0 * disc.powf(1.5));
    let varpi = arg.clamp(-1.0, 1.0).acos() / 3.0;
    let amp = 2.0 / 3.0 * disc.sqrt();
    let xi = [0, 1, 2].map(|j| -rho1 / 3.0 + amp * (varpi + 2.0 * PI * j as f64 / 3.0).cos());
    Ok(CardanoEigenvalues { xi, varrho, varpi })
}

/// Raw negativity `(‖ρ^{T_B}‖₁ − 1)/(d − 1)` for two qutrits, before clamping.
pub fn negativity_raw(rho: &DensityMatrix) -> Result<f64> {
    let mu = partial_transpose_b(rho).eigenvalues()?;
    let trace_norm: f64 = mu.iter().map(|x| x.abs()).sum();
    Ok((trace_norm - 1.0) / 2.0)
}

/// Negativity clamped to `[0, 1]`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(negativity_raw(rho)?.clamp(0.0, 1.0))
}

/// `(â − γ)` applied to every field component.
fn shifted_lowering(state: &JointState, gamma: f64) -> JointState {
    let mut out = JointState::zeros(state.n_max(), state.frame);
    let d = state.field_dim();
    for k in 0..9 {
        let src = state.field_component(k);
        let dst = out.field_component_mut(k);
        for m in 0..d {
            let down = if m + 1 < d { src[m + 1] * ((m + 1) as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
            dst[m] = down - src[m] * gamma;
        }
    }
    out
}

fn powered(state: &JointState, gamma: f64, power: usize) -> JointState {
    (0..power).fold(state.clone(), |s, _| shifted_lowering(&s, gamma))
}

fn warn_if_truncated(state: &JointState) {
    let top = state.n_max();
    let edge: f64 = (0..9).map(|k| state.field_component(k)[top].norm_sqr()).sum();
    if edge > TRUNCATION_WARNING {
        warn!("population {edge:e} at the Fock cutoff n_max = {top}; field moments may be truncated");
    }
}

/// Lab-frame normally ordered moment `⟨â†ᵖ âᵠ⟩` from the transformed-frame
/// state: `⟨ψ₂|(â† − γ)ᵖ (â − γ)ᵠ|ψ₂⟩`.
pub fn field_moment(state2: &JointState, gamma: f64, p: usize, q: usize) -> Complex64 {
    warn_if_truncated(state2);
    let left = powered(state2, gamma, p);
    let right = powered(state2, gamma, q);
    left.inner(&right).expect("same truncation")
}

/// The lab-frame moments needed by the Mandel parameter and squeezing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    /// `⟨â⟩`
    pub a: Complex64,
    /// `⟨â²⟩`
    pub a2: Complex64,
    /// `⟨â†â⟩`
    pub n: f64,
    /// `⟨â†²â²⟩`
    pub n_factorial2: f64,
}

impl FieldMoments {
    pub fn compute(state2: &JointState, gamma: f64) -> Self {
        warn_if_truncated(state2);
        let one = shifted_lowering(state2, gamma);
        let two = shifted_lowering(&one, gamma);
        FieldMoments {
            a: state2.inner(&one).expect("same truncation"),
            a2: state2.inner(&two).expect("same truncation"),
            n: one.norm_sqr(),
            n_factorial2: two.norm_sqr(),
        }
    }

    pub fn mandel_q(&self) -> Result<f64> {
        if !(self.n >= 1e-12) {
            return Err(Error::UndefinedMandel(self.n));
        }
        let n2 = self.n + self.n_factorial2;
        Ok((n2 - self.n * self.n) / self.n - 1.0)
    }

    /// `(S_x, S_y)`; a quadrature is squeezed when its value lies in `(−1, 0)`.
    pub fn squeezing(&self) -> (f64, f64) {
        let s_x = 2.0 * self.n + 2.0 * self.a2.re - 4.0 * self.a.re * self.a.re;
        let s_y = 2.0 * self.n - 2.0 * self.a2.re - 4.0 * self.a.im * self.a.im;
        (s_x, s_y)
    }
}

/// Mandel `Q = (⟨n²⟩ − ⟨n⟩²)/⟨n⟩ − 1` of the lab-frame field.
pub fn mandel_q(state2: &JointState, gamma: f64) -> Result<f64> {
    FieldMoments::compute(state2, gamma).mandel_q()
}

/// Normal squeezing parameters `(S_x, S_y)` of the lab-frame field.
pub fn squeezing(state2: &JointState, gamma: f64) -> (f64, f64) {
    FieldMoments::compute(state2, gamma).squeezing()
}

pub fn is_squeezed(s: f64) -> bool {
    -1.0 < s && s < 0.0
}

/// Every diagnostic for one transformed-frame state.
pub fn measure_sample(gt: f64, state2: &JointState, gamma: f64) -> Result<MeasureSample> {
    let rho = rho_atoms(state2);
    let entropy = von_neumann_entropy(&rho)?;
    let negativity = negativity(&rho)?;
    let moments = FieldMoments::compute(state2, gamma);
    let mandel_q = match moments.mandel_q() {
        Ok(q) => Some(q),
        Err(Error::UndefinedMandel(_)) => None,
        Err(e) => return Err(e),
    };
    let (s_x, s_y) = moments.squeezing();
    Ok(MeasureSample { gt, entropy, negativity, mandel_q, s_x, s_y })
}
