use nalgebra::DMatrix;

use crate::C64;

use super::{FieldState, JointState};

/// Dense field density matrix `ρ_{mn} = ⟨m|ρ|n⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(field: &FieldState) -> Self {
        let a = field.amplitudes();
        let dim = a.len();
        Self { matrix: DMatrix::from_fn(dim, dim, |m, n| a[m] * a[n].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m, n)]
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermitian_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for m in 0..dim {
            for n in m..dim {
                worst = worst.max((self.matrix[(m, n)] - self.matrix[(n, m)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `tr(ρσ)`
    pub fn overlap(&self, other: &DensityMatrix) -> C64 {
        (&self.matrix * &other.matrix).trace()
    }
}

/// Reduced field state `Tr_atoms |Ψ⟩⟨Ψ|`, `ρ_{mn} = Σ_k A_{k,m} conj(A_{k,n})`.
///
/// The trace is basis independent, so the joint state's atomic basis does not
/// matter.
pub fn partial_trace_field(state: &JointState) -> DensityMatrix {
    let dim = state.cutoff() + 1;
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..4 {
        let a = state.component(k);
        for m in 0..dim {
            if a[m] == C64::default() {
                continue;
            }
            for n in 0..dim {
                matrix[(m, n)] += a[m] * a[n].conj();
            }
        }
    }
    DensityMatrix { matrix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, AtomicState};

    #[test]
    fn product_state_reduces_to_pure_field() {
        let field = coherent_state(C64::from_polar(2.5, -0.6), 60).unwrap();
        let atom = AtomicState::new(
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.5),
            C64::new(0.5, 0.0),
            C64::new(-0.5, 0.0),
            0.4,
        );
        let rho = partial_trace_field(&JointState::product(&atom, &field));
        let pure = DensityMatrix::pure(&field);
        let diff = (rho.matrix() - pure.matrix()).norm();
        assert!(diff < 1e-10);
        assert!((rho.trace() - 1.0).norm() < 1e-10);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        assert!(rho.hermitian_residual() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-10);
        // ρ_{mn} = α_m conj(α_n)
        let a = field.amplitudes();
        assert!((rho.get(3, 5) - a[3] * a[5].conj()).norm() < 1e-14);
    }
}
