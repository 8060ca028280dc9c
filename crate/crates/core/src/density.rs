//! Reduced density matrices of the two-atom and field subsystems.

use num_complex::Complex64;

use crate::amplitudes::unit_amplitudes;
use crate::error::Result;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::model::{coherent_amplitudes, pair_index, JointState, SystemParams, SLOT_KETS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityLabel {
    /// Two-atom state, 9×9, basis `k = 3(a-1) + (b-1)`.
    Atoms,
    /// Field state, (n_max+1)×(n_max+1), Fock basis.
    Field,
    /// Partial transpose of an atomic state on atom B.
    AtomsPartialTranspose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub label: DensityLabel,
    pub matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(label: DensityLabel, matrix: CMatrix) -> Self {
        DensityMatrix { label, matrix }
    }

    /// Two-atom density matrix of a pure two-qutrit vector indexed by pair index.
    pub fn pure_atoms(v: &[Complex64; 9]) -> Self {
        DensityMatrix::new(DensityLabel::Atoms, CMatrix::outer(v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `ρ_atoms(k, k') = Σ_m ψ(k, m) ψ*(k', m)`.
pub fn rho_atoms(state: &JointState) -> DensityMatrix {
    let comps: Vec<&[Complex64]> = (0..9).map(|k| state.field_component(k)).collect();
    let mut m = CMatrix::zeros(9);
    for i in 0..9 {
        for j in i..9 {
            let s: Complex64 = comps[i].iter().zip(comps[j]).map(|(x, y)| x * y.conj()).sum();
            m[(i, j)] = s;
            m[(j, i)] = s.conj();
        }
        m[(i, i)].im = 0.0;
    }
    DensityMatrix::new(DensityLabel::Atoms, m)
}

/// `ρ_field(m, m') = Σ_k ψ(k, m) ψ*(k, m')`.
pub fn rho_field(state: &JointState) -> DensityMatrix {
    let d = state.field_dim();
    let mut m = CMatrix::zeros(d);
    for k in 0..9 {
        let v = state.field_component(k);
        for i in 0..d {
            if v[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in i..d {
                m[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    for i in 0..d {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..d {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::new(DensityLabel::Field, m)
}

/// `ρ^{T_B}((a,b),(a',b')) = ρ((a,b'),(a',b))`.
pub fn partial_transpose_b(rho: &DensityMatrix) -> DensityMatrix {
    let m = CMatrix::from_fn(9, |row, col| {
        let (a, b) = (row / 3, row % 3);
        let (a2, b2) = (col / 3, col % 3);
        rho.matrix[(3 * a + b2, 3 * a2 + b)]
    });
    let label = match rho.label {
        DensityLabel::AtomsPartialTranspose => DensityLabel::Atoms,
        _ => DensityLabel::AtomsPartialTranspose,
    };
    DensityMatrix::new(label, m)
}

/// Slot correlations `ρ_ij = Σ_m C_i(m) C_j*(m)` with each slot's amplitude
/// indexed by its photon number, for the six ansatz slots. This is the
/// shortcut form of the atomic density matrix; the generic partial trace in
/// [`rho_atoms`] is the primary path.
pub fn slot_correlations(t: f64, params: &SystemParams) -> Result<[[Complex64; 6]; 6]> {
    let cfg = params.config;
    let n_max = params.n_max;
    let d = n_max + 1;
    // slot_fields[i][m] = C_i at photon number m
    let mut slot_fields = vec![vec![Complex64::new(0.0, 0.0); d]; 6];
    if let Some(last) = n_max.checked_sub(cfg.max_offset()) {
        for (n, w) in coherent_amplitudes(params.beta, last).into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let unit = unit_amplitudes(cfg.kind, n, t, params.g)?;
            for slot in 0..6 {
                slot_fields[slot][n + cfg.photon_offsets[slot]] = unit[slot] * w;
            }
        }
    }
    let mut out = [[Complex64::new(0.0, 0.0); 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = slot_fields[i].iter().zip(&slot_fields[j]).map(|(x, y)| x * y.conj()).sum();
        }
    }
    Ok(out)
}

/// Pair index of the first atomic ket of each slot.
pub fn slot_pair_index(slot: usize) -> usize {
    let (a, b) = SLOT_KETS[slot][0];
    pair_index(a, b)
}

/// Representative slots spanning the Λ-type atomic support: C₁ (`|1,1⟩`),
/// C₂ (`|1,2⟩`) and C₄ (`|2,3⟩`). C₃ equals C₂ and C₅, C₆ equal C₄.
pub const LAMBDA_SUPPORT_SLOTS: [usize; 3] = [0, 1, 3];
