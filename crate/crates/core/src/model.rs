//! Atomic configurations, system parameters and the truncated joint
//! atom–atom–field state.
//!
//! Atomic levels are labelled 1, 2, 3. A two-atom ket `|a,b⟩` is flattened to
//! the pair index `k = 3(a-1) + (b-1)` and the joint amplitude array is stored
//! with the photon number `m` running fastest.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Poisson tail weight that the Fock truncation must leave behind.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Largest photon offset over all configurations. Used by the truncation rule.
pub const MAX_PHOTON_OFFSET: usize = 4;

/// Number of times each amplitude slot appears in the exchange-symmetric ansatz.
pub const SLOT_MULTIPLICITY: [usize; 6] = [1, 2, 2, 2, 1, 1];

/// Atomic kets `(a, b)` populated by each of the six amplitude slots. Slots
/// 2 to 4 carry both atom orderings. The same kets are used by all three
/// configurations; only the attached photon offsets differ.
pub const SLOT_KETS: [&[(usize, usize)]; 6] = [
    &[(1, 1)],
    &[(1, 2), (2, 1)],
    &[(1, 3), (3, 1)],
    &[(2, 3), (3, 2)],
    &[(2, 2)],
    &[(3, 3)],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigKind {
    V,
    Xi,
    Lambda,
}

impl ConfigKind {
    pub const ALL: [ConfigKind; 3] = [ConfigKind::V, ConfigKind::Xi, ConfigKind::Lambda];

    pub fn name(self) -> &'static str {
        match self {
            ConfigKind::V => "V",
            ConfigKind::Xi => "Xi",
            ConfigKind::Lambda => "Lambda",
        }
    }
}

impl fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v" => Ok(ConfigKind::V),
            "xi" | "ξ" | "ladder" => Ok(ConfigKind::Xi),
            "lambda" | "λ" => Ok(ConfigKind::Lambda),
            other => Err(format!("unknown atomic configuration `{other}` (expected V, Xi or Lambda)")),
        }
    }
}

/// Level scheme of a single three-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomicConfiguration {
    pub kind: ConfigKind,
    /// The two transition operators `σ_ij = |i⟩⟨j|` as `(i, j)`. In the
    /// interaction `σ a + σ† a†` the operator `σ_ij` absorbs a photon while
    /// moving the atom from `j` to `i`.
    pub transition_pairs: [(usize, usize); 2],
    /// Photon-number offset attached to each amplitude slot C₁…C₆.
    pub photon_offsets: [usize; 6],
}

impl AtomicConfiguration {
    pub const fn new(kind: ConfigKind) -> Self {
        match kind {
            ConfigKind::V => AtomicConfiguration {
                kind,
                transition_pairs: [(1, 3), (2, 3)],
                photon_offsets: [0, 0, 1, 1, 0, 2],
            },
            ConfigKind::Xi => AtomicConfiguration {
                kind,
                transition_pairs: [(1, 2), (2, 3)],
                photon_offsets: [0, 1, 2, 3, 2, 4],
            },
            ConfigKind::Lambda => AtomicConfiguration {
                kind,
                transition_pairs: [(1, 2), (1, 3)],
                photon_offsets: [0, 1, 1, 2, 2, 2],
            },
        }
    }

    pub fn max_offset(&self) -> usize {
        self.photon_offsets.iter().copied().max().unwrap_or(0)
    }

    /// Number of excitation quanta stored in an atom sitting in `level`.
    pub fn level_excitation(&self, level: usize) -> usize {
        match (self.kind, level) {
            (ConfigKind::V, 1 | 2) => 1,
            (ConfigKind::Xi, 1) => 2,
            (ConfigKind::Xi, 2) => 1,
            (ConfigKind::Lambda, 1) => 1,
            _ => 0,
        }
    }

    /// Conserved excitation number of `|a,b,m⟩` under the displaced
    /// Hamiltonian.
    pub fn excitation(&self, a: usize, b: usize, m: usize) -> usize {
        self.level_excitation(a) + self.level_excitation(b) + m
    }

    /// Excitation manifold index `n` of `|a,b,m⟩`, i.e. the photon number the
    /// manifold has in its `|1,1,n⟩` ket, or `None` if the ket lies below
    /// every manifold reached from `|1,1⟩`.
    pub fn manifold(&self, a: usize, b: usize, m: usize) -> Option<usize> {
        self.excitation(a, b, m).checked_sub(2 * self.level_excitation(1))
    }

    /// Expands the ansatz for manifold `n` into `(slot, a, b, m)` kets.
    pub fn manifold_kets(&self, n: usize) -> Vec<(usize, usize, usize, usize)> {
        let mut kets = Vec::with_capacity(9);
        for (slot, pairs) in SLOT_KETS.iter().enumerate() {
            for &(a, b) in pairs.iter() {
                kets.push((slot, a, b, n + self.photon_offsets[slot]));
            }
        }
        kets
    }
}

impl From<ConfigKind> for AtomicConfiguration {
    fn from(kind: ConfigKind) -> Self {
        AtomicConfiguration::new(kind)
    }
}

/// Flattened atomic pair index for levels `a, b ∈ {1,2,3}`.
#[inline]
pub fn pair_index(a: usize, b: usize) -> usize {
    debug_assert!((1..=3).contains(&a) && (1..=3).contains(&b));
    3 * (a - 1) + (b - 1)
}

/// Inverse of [`pair_index`].
#[inline]
pub fn pair_levels(k: usize) -> (usize, usize) {
    (k / 3 + 1, k % 3 + 1)
}

/// Coupling strength `V(n) = g √n` of the `n`-photon transition.
pub fn coupling(n: usize, g: f64) -> f64 {
    g * (n as f64).sqrt()
}

/// `ln n!`, accumulated as a sum of logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Fock amplitude `⟨n|β⟩ = exp(-β²/2) βⁿ / √n!` of a real coherent state.
pub fn initial_amplitude(n: usize, beta: f64) -> f64 {
    coherent_amplitude(n, beta, ln_factorial(n))
}

fn coherent_amplitude(n: usize, beta: f64, ln_fact: f64) -> f64 {
    if beta == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let log_mag = 0.5 * (2.0 * n as f64 * beta.abs().ln() - beta * beta - ln_fact);
    let sign = if beta < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_mag.exp()
}

/// Coherent amplitudes `⟨m|β⟩` for `m = 0..=n_max`.
pub fn coherent_amplitudes(beta: f64, n_max: usize) -> Vec<f64> {
    let mut ln_fact = 0.0;
    (0..=n_max)
        .map(|m| {
            if m > 1 {
                ln_fact += (m as f64).ln();
            }
            coherent_amplitude(m, beta, ln_fact)
        })
        .collect()
}

/// Default Fock truncation `⌈β² + 10β + 24⌉`.
pub fn default_n_max(beta: f64) -> usize {
    (beta * beta + 10.0 * beta.abs() + 24.0).ceil() as usize
}

/// Poisson weight `Σ_{n > n_max - 4} |⟨n|β⟩|²` that the truncation discards.
pub fn tail_weight(beta: f64, n_max: usize) -> f64 {
    let start = (n_max + 1).saturating_sub(MAX_PHOTON_OFFSET);
    let mean = beta * beta;
    let mut ln_fact = ln_factorial(start);
    let mut total = 0.0;
    let mut n = start;
    loop {
        let p = coherent_amplitude(n, beta, ln_fact).powi(2);
        total += p;
        if (n as f64) > mean && p < 1e-30 * total.max(1e-300) {
            break;
        }
        if (n as f64) > mean && p == 0.0 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    total
}

/// Physical parameters of a run under the resonance conditions
/// `Δ = Δ₁ = Δ₂ = 0`, `g₁ = g₂ = g`, `λ₁ = λ₂ = λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub config: AtomicConfiguration,
    /// Atom–cavity coupling.
    pub g: f64,
    /// Atom–classical-drive coupling.
    pub lambda: f64,
    /// `λ / g`.
    pub gamma: f64,
    /// Real amplitude of the initial coherent field.
    pub alpha: f64,
    /// `α + γ`, the coherent amplitude in the displaced frame.
    pub beta: f64,
    pub n_max: usize,
    /// Dimensionless times `gt`.
    pub t_grid: Vec<f64>,
}

impl SystemParams {
    /// Parameters from the couplings `g` and `λ`, with the default truncation
    /// and an empty time grid.
    pub fn new(kind: ConfigKind, g: f64, lambda: f64, alpha: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be positive, got {g}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
        }
        let gamma = lambda / g;
        let beta = alpha + gamma;
        Ok(SystemParams {
            config: AtomicConfiguration::new(kind),
            g,
            lambda,
            gamma,
            alpha,
            beta,
            n_max: default_n_max(beta),
            t_grid: Vec::new(),
        })
    }

    /// Parameters from the ratio `γ = λ/g`.
    pub fn with_gamma(kind: ConfigKind, g: f64, gamma: f64, alpha: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {gamma}")));
        }
        let mut p = SystemParams::new(kind, g, gamma * g, alpha)?;
        // keep γ exactly as given rather than (γg)/g
        p.gamma = gamma;
        p.beta = alpha + gamma;
        p.n_max = default_n_max(p.beta);
        Ok(p)
    }

    /// Overrides the Fock truncation, rejecting values whose discarded
    /// Poisson tail exceeds [`TAIL_TOLERANCE`].
    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        if n_max < MAX_PHOTON_OFFSET {
            return Err(Error::InvalidParameter(format!("n_max must be at least {MAX_PHOTON_OFFSET}, got {n_max}")));
        }
        let tail = tail_weight(self.beta, n_max);
        if tail >= TAIL_TOLERANCE {
            return Err(Error::TruncationInsufficient { n_max, tail });
        }
        self.n_max = n_max;
        Ok(self)
    }

    /// Uniform grid of `steps` points over `gt ∈ [0, gt_max]`.
    pub fn with_uniform_grid(mut self, gt_max: f64, steps: usize) -> Result<Self> {
        if !(gt_max.is_finite() && gt_max > 0.0) {
            return Err(Error::InvalidParameter(format!("gt_max must be positive, got {gt_max}")));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("steps must be at least 2, got {steps}")));
        }
        self.t_grid = uniform_grid(gt_max, steps);
        Ok(self)
    }

    pub fn kind(&self) -> ConfigKind {
        self.config.kind
    }

    /// Physical time corresponding to a dimensionless time `gt`.
    pub fn time(&self, gt: f64) -> f64 {
        gt / self.g
    }
}

pub fn uniform_grid(gt_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|i| gt_max * i as f64 / last).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Displaced frame, `|ψ₂⟩ = D(γ)|ψ⟩`, evolving under the undriven Hamiltonian.
    Transformed,
    /// Laboratory (rotating) frame `|ψ⟩`.
    Lab,
}

/// Joint amplitude array over `(a, b, m)` with `a, b ∈ {1,2,3}` and
/// `m ∈ 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n_max: usize,
    pub frame: Frame,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn zeros(n_max: usize, frame: Frame) -> Self {
        JointState { n_max, frame, amps: vec![Complex64::new(0.0, 0.0); 9 * (n_max + 1)] }
    }

    pub fn from_vec(n_max: usize, frame: Frame, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 9 * (n_max + 1);
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: amps.len() });
        }
        Ok(JointState { n_max, frame, amps })
    }

    /// `|a,b⟩ ⊗ |β⟩` with the coherent factor truncated at `n_max`.
    pub fn product_coherent(a: usize, b: usize, beta: f64, n_max: usize, frame: Frame) -> Self {
        let mut s = JointState::zeros(n_max, frame);
        let k = pair_index(a, b);
        for (m, c) in coherent_amplitudes(beta, n_max).into_iter().enumerate() {
            let i = s.index_k(k, m);
            s.amps[i] = Complex64::new(c, 0.0);
        }
        s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, m: usize) -> usize {
        self.index_k(pair_index(a, b), m)
    }

    #[inline]
    pub fn index_k(&self, k: usize, m: usize) -> usize {
        debug_assert!(k < 9 && m <= self.n_max);
        k * (self.n_max + 1) + m
    }

    pub fn get(&self, a: usize, b: usize, m: usize) -> Complex64 {
        self.amps[self.index(a, b, m)]
    }

    pub fn set(&mut self, a: usize, b: usize, m: usize, value: Complex64) {
        let i = self.index(a, b, m);
        self.amps[i] = value;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.amps
    }

    /// Field amplitudes attached to the atomic pair index `k`.
    pub fn field_component(&self, k: usize) -> &[Complex64] {
        let d = self.n_max + 1;
        &self.amps[k * d..(k + 1) * d]
    }

    pub fn field_component_mut(&mut self, k: usize) -> &mut [Complex64] {
        let d = self.n_max + 1;
        &mut self.amps[k * d..(k + 1) * d]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &JointState) -> Result<Complex64> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum())
    }

    /// Largest `|amplitude(a,b,m) - amplitude(b,a,m)|`.
    pub fn exchange_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 1..=3 {
            for b in (a + 1)..=3 {
                for m in 0..=self.n_max {
                    worst = worst.max((self.get(a, b, m) - self.get(b, a, m)).norm());
                }
            }
        }
        worst
    }

    /// Largest entrywise distance to another state of the same truncation.
    pub fn max_abs_diff(&self, other: &JointState) -> Result<f64> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }

    /// Copy with a different truncation. Amplitudes above the new `n_max` are
    /// dropped, new entries are zero.
    pub fn resized(&self, n_max: usize) -> JointState {
        let mut out = JointState::zeros(n_max, self.frame);
        let keep = self.n_max.min(n_max) + 1;
        for k in 0..9 {
            out.field_component_mut(k)[..keep].copy_from_slice(&self.field_component(k)[..keep]);
        }
        out
    }
}

/// Initial transformed-frame state `|1,1⟩|β⟩`.
pub fn build_initial_joint_state(params: &SystemParams) -> JointState {
    JointState::product_coherent(1, 1, params.beta, params.n_max, Frame::Transformed)
}
