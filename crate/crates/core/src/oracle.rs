//! Brute-force reference path: explicit Hamiltonians over the truncated
//! product basis, a fixed-step RK4 Schrödinger integrator with step-halving
//! control, and a numerical displacement operator.
//!
//! Nothing here uses the closed-form amplitudes, so the two paths can check
//! each other.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{pair_index, AtomicConfiguration, Frame, JointState, SLOT_KETS};

/// Which Hamiltonian a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianFrame {
    /// Cavity coupling plus the classical drive.
    Driven,
    /// Cavity coupling only (displaced frame).
    Displaced,
}

/// Sparse Hermitian matrix in compressed-row form over the basis ordering of
/// [`JointState`].
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub frame: HamiltonianFrame,
    n_max: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl HamiltonianMatrix {
    fn from_entries(frame: HamiltonianFrame, n_max: usize, entries: BTreeMap<(usize, usize), Complex64>) -> Self {
        let dim = 9 * (n_max + 1);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        let mut row = 0;
        for ((i, j), v) in entries {
            while row < i {
                row_ptr.push(cols.len());
                row += 1;
            }
            cols.push(j);
            vals.push(v);
        }
        while row < dim {
            row_ptr.push(cols.len());
            row += 1;
        }
        HamiltonianMatrix { frame, n_max, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        9 * (self.n_max + 1)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Matrix element `⟨i|H|j⟩`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(pos) => self.vals[self.row_ptr[i] + pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.cols[p], self.vals[p]))
        })
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.entries().map(|(i, j, v)| (v - self.get(j, i).conj()).norm()).fold(0.0, f64::max)
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> crate::linalg::CMatrix {
        let mut m = crate::linalg::CMatrix::zeros(self.dim());
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }
}

fn basis_index(n_max: usize, a: usize, b: usize, m: usize) -> usize {
    pair_index(a, b) * (n_max + 1) + m
}

fn add_hermitian_pair(entries: &mut BTreeMap<(usize, usize), Complex64>, i: usize, j: usize, v: f64) {
    *entries.entry((i, j)).or_default() += v;
    *entries.entry((j, i)).or_default() += v;
}

/// Visits every `(source, target, photon_factor)` link of `Σ_j σ⁽ʲ⁾ â` for
/// both transitions and both atoms; `photon_factor` is `√m` for an absorbed
/// photon. When `absorb` is false the photon number is left unchanged and
/// the factor is 1.
fn for_each_lowering(cfg: &AtomicConfiguration, n_max: usize, absorb: bool, mut f: impl FnMut(usize, usize, f64)) {
    for &(upper, lower) in cfg.transition_pairs.iter() {
        for a in 1..=3 {
            for b in 1..=3 {
                for m in 0..=n_max {
                    let (m_to, factor) = if absorb {
                        if m == 0 {
                            continue;
                        }
                        (m - 1, (m as f64).sqrt())
                    } else {
                        (m, 1.0)
                    };
                    let src = basis_index(n_max, a, b, m);
                    if a == lower {
                        f(src, basis_index(n_max, upper, b, m_to), factor);
                    }
                    if b == lower {
                        f(src, basis_index(n_max, a, upper, m_to), factor);
                    }
                }
            }
        }
    }
}

/// Displaced-frame Hamiltonian `g Σ_j (σ₁⁽ʲ⁾ â + σ₂⁽ʲ⁾ â + h.c.)`.
pub fn build_h2(cfg: &AtomicConfiguration, g: f64, n_max: usize) -> HamiltonianMatrix {
    let mut entries = BTreeMap::new();
    if g != 0.0 {
        for_each_lowering(cfg, n_max, true, |src, dst, k| add_hermitian_pair(&mut entries, dst, src, g * k));
    }
    HamiltonianMatrix::from_entries(HamiltonianFrame::Displaced, n_max, entries)
}

/// Driven Hamiltonian `H₂ + λ Σ_j (σ₁⁽ʲ⁾ + σ₂⁽ʲ⁾ + h.c.)` in the frame rotating
/// with the drive, on resonance.
pub fn build_h1(cfg: &AtomicConfiguration, g: f64, lambda: f64, n_max: usize) -> HamiltonianMatrix {
    let mut entries = BTreeMap::new();
    if g != 0.0 {
        for_each_lowering(cfg, n_max, true, |src, dst, k| add_hermitian_pair(&mut entries, dst, src, g * k));
    }
    if lambda != 0.0 {
        for_each_lowering(cfg, n_max, false, |src, dst, _| add_hermitian_pair(&mut entries, dst, src, lambda));
    }
    HamiltonianMatrix::from_entries(HamiltonianFrame::Driven, n_max, entries)
}

/// Step control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Initial step in physical time units.
    pub dt: f64,
    /// Largest allowed entrywise change between two successive step sizes.
    pub tolerance: f64,
    pub max_halvings: usize,
}

impl IntegratorOptions {
    /// Default control for coupling `g`: step `gΔt = 10⁻³`, tolerance `10⁻¹⁰`.
    pub fn for_coupling(g: f64) -> Self {
        IntegratorOptions { dt: 1e-3 / g, tolerance: 1e-10, max_halvings: 6 }
    }
}

/// Integrated trajectory and its error diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<JointState>,
    /// Step size of the returned solution.
    pub dt: f64,
    /// Entrywise change from the previous step size (Richardson estimate).
    pub halving_difference: f64,
    /// Largest `|‖ψ(t)‖² − ‖ψ(0)‖²|` along the returned solution.
    pub norm_drift: f64,
}

/// Integrates `i dψ/dt = H ψ` from `psi0` at `t = 0` and returns the state at
/// each time of `times` (physical units, nondecreasing, nonnegative).
///
/// The fixed-step RK4 solution is recomputed with the step halved until two
/// successive solutions agree to `options.tolerance` at every grid time.
pub fn integrate(h: &HamiltonianMatrix, psi0: &JointState, times: &[f64], options: IntegratorOptions) -> Result<Trajectory> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: psi0.dim() });
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("integration times must be nonnegative and nondecreasing".into()));
    }
    if !(options.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {}", options.dt)));
    }

    let mut dt = options.dt;
    let mut coarse = rk4_run(h, psi0, times, dt);
    let mut achieved = f64::INFINITY;
    for _ in 0..options.max_halvings {
        dt *= 0.5;
        let fine = rk4_run(h, psi0, times, dt);
        achieved = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| c.max_abs_diff(f).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        if achieved <= options.tolerance {
            let n0 = psi0.norm_sqr();
            let norm_drift = fine.iter().map(|s| (s.norm_sqr() - n0).abs()).fold(0.0, f64::max);
            return Ok(Trajectory { states: fine, dt, halving_difference: achieved, norm_drift });
        }
        coarse = fine;
    }
    Err(Error::NonConvergence { achieved, tolerance: options.tolerance })
}

fn rk4_run(h: &HamiltonianMatrix, psi0: &JointState, times: &[f64], dt: f64) -> Vec<JointState> {
    let mut y = psi0.amplitudes().to_vec();
    let n = y.len();
    let mut k = vec![Complex64::new(0.0, 0.0); n];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
            let step = span / steps as f64;
            for _ in 0..steps {
                rk4_step(h, &mut y, step, &mut k, &mut tmp, &mut acc);
            }
        }
        t = target;
        out.push(JointState::from_vec(psi0.n_max(), psi0.frame, y.clone()).expect("dimension fixed"));
    }
    out
}

/// One classical RK4 step. For the linear system `y' = -iHy` this is the
/// fourth-order Taylor polynomial of `exp(-iHΔt)`, which is what is computed.
fn rk4_step(
    h: &HamiltonianMatrix,
    y: &mut [Complex64],
    dt: f64,
    term: &mut [Complex64],
    tmp: &mut [Complex64],
    acc: &mut [Complex64],
) {
    let minus_i = Complex64::new(0.0, -1.0);
    acc.copy_from_slice(y);
    term.copy_from_slice(y);
    for order in 1..=4 {
        h.apply(term, tmp);
        let f = minus_i * (dt / order as f64);
        for (t, (x, a)) in term.iter_mut().zip(tmp.iter().zip(acc.iter_mut())) {
            *t = x * f;
            *a += *t;
        }
    }
    y.copy_from_slice(acc);
}

/// Norm change above which [`displace`] reports truncation loss.
pub const DISPLACEMENT_LOSS_TOLERANCE: f64 = 1e-6;

/// Extra Fock levels used while displacing by `gamma`.
pub fn displacement_padding(gamma: f64) -> usize {
    4 * (gamma * gamma + 10.0 * gamma.abs()).ceil() as usize
}

/// Applies `D(γ) = exp(γ â† − γ â)` (real `γ`) to the field factor of every
/// atomic component.
///
/// The generator is applied on a Fock space padded by
/// [`displacement_padding`], as repeated short Taylor steps of norm at most
/// 1/2, and the result is cut back to the input truncation.
pub fn displace(state: &JointState, gamma: f64) -> Result<JointState> {
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("displacement must be finite, got {gamma}")));
    }
    let n_max = state.n_max();
    let padded = n_max + displacement_padding(gamma);
    let mut out = JointState::zeros(n_max, state.frame);
    for k in 0..9 {
        let src = state.field_component(k);
        if src.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); padded + 1];
        v[..=n_max].copy_from_slice(src);
        displace_field(&mut v, gamma);
        out.field_component_mut(k).copy_from_slice(&v[..=n_max]);
    }
    let loss = (out.norm_sqr() - state.norm_sqr()).abs();
    if loss > DISPLACEMENT_LOSS_TOLERANCE {
        return Err(Error::TruncationLoss { loss });
    }
    Ok(out)
}

/// Laboratory-frame state `|ψ⟩ = D(−γ)|ψ₂⟩` of a transformed-frame state.
pub fn lab_state(state2: &JointState, gamma: f64) -> Result<JointState> {
    let mut lab = displace(state2, -gamma)?;
    lab.frame = Frame::Lab;
    Ok(lab)
}

/// In-place `exp(γ(â† − â)) v` on a Fock vector truncated at `v.len() - 1`.
pub fn displace_field(v: &mut [Complex64], gamma: f64) {
    if gamma == 0.0 || v.is_empty() {
        return;
    }
    let dim = v.len();
    let sqrt: Vec<f64> = (0..=dim).map(|m| (m as f64).sqrt()).collect();
    let bound = 2.0 * gamma.abs() * sqrt[dim];
    let substeps = (bound / 0.5).ceil().max(1.0) as usize;
    let h = gamma / substeps as f64;

    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..substeps {
        term.copy_from_slice(v);
        for order in 1..=60 {
            // next = h (â† − â) term / order
            let f = h / order as f64;
            for m in 0..dim {
                let up = if m > 0 { sqrt[m] * term[m - 1] } else { Complex64::new(0.0, 0.0) };
                let down = if m + 1 < dim { sqrt[m + 1] * term[m + 1] } else { Complex64::new(0.0, 0.0) };
                next[m] = (up - down) * f;
            }
            std::mem::swap(&mut term, &mut next);
            let mut size = 0.0;
            for (x, t) in v.iter_mut().zip(term.iter()) {
                *x += *t;
                size += t.norm_sqr();
            }
            if size < 1e-36 {
                break;
            }
        }
    }
}

/// Reads the six slot amplitudes of manifold `n` out of a joint state, using
/// the first atomic ordering of each slot.
pub fn manifold_slot_amplitudes(state: &JointState, cfg: &AtomicConfiguration, n: usize) -> [Complex64; 6] {
    std::array::from_fn(|slot| {
        let (a, b) = SLOT_KETS[slot][0];
        let m = n + cfg.photon_offsets[slot];
        if m <= state.n_max() {
            state.get(a, b, m)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Integrates the single manifold that starts in `|1,1,n⟩` and returns its
/// six slot amplitudes at each physical time.
pub fn integrate_manifold(cfg: &AtomicConfiguration, n: usize, g: f64, times: &[f64]) -> Result<Vec<[Complex64; 6]>> {
    let n_max = n + cfg.max_offset();
    let h = build_h2(cfg, g, n_max);
    let mut psi0 = JointState::zeros(n_max, Frame::Transformed);
    psi0.set(1, 1, n, Complex64::new(1.0, 0.0));
    let traj = integrate(&h, &psi0, times, IntegratorOptions::for_coupling(g))?;
    Ok(traj.states.iter().map(|s| manifold_slot_amplitudes(s, cfg, n)).collect())
}
