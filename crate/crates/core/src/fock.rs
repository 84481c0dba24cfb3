//! Truncated Fock-space algebra for the composite system R₁ ⊗ Q ⊗ R₂.
//!
//! Basis convention: states are indexed row-major over the fixed tensor order
//! (R₁, Q, R₂), i.e. `index = n1·(qubit_levels·(n_max+1)) + q·(n_max+1) + n2`
//! with `nk ∈ 0..=n_max` photons in resonator k and `q` the qubit level
//! (0 = ground, 1 = excited, 2 = second transmon level when present).
//!
//! Everything here is dense: the largest space used anywhere is a few hundred
//! dimensions, where dense Hermitian eigendecomposition is exact and fast.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const QUBIT_GROUND: usize = 0;
pub const QUBIT_EXCITED: usize = 1;

/// Truncated composite Hilbert space for (R₁, Q, R₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    n_max: usize,
    qubit_levels: usize,
}

impl HilbertSpace {
    /// `n_max`: photon truncation per resonator (levels |0⟩..|n_max⟩).
    /// `qubit_levels`: 2 for a strict qubit, 3 for a transmon with one
    /// anharmonically shifted level.
    ///
    /// Panics on any other level count.
    pub fn new(n_max: usize, qubit_levels: usize) -> Self {
        assert!(
            qubit_levels == 2 || qubit_levels == 3,
            "qubit_levels must be 2 or 3, got {qubit_levels}"
        );
        Self { n_max, qubit_levels }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn qubit_levels(&self) -> usize {
        self.qubit_levels
    }

    pub fn resonator_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.resonator_dim() * self.qubit_levels * self.resonator_dim()
    }

    /// Row-major index of |n₁, q, n₂⟩ over the fixed order (R₁, Q, R₂).
    pub fn index(&self, n1: usize, q: usize, n2: usize) -> usize {
        debug_assert!(n1 <= self.n_max && q < self.qubit_levels && n2 <= self.n_max);
        (n1 * self.qubit_levels + q) * self.resonator_dim() + n2
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let rd = self.resonator_dim();
        let n2 = idx % rd;
        let rest = idx / rd;
        let q = rest % self.qubit_levels;
        let n1 = rest / self.qubit_levels;
        (n1, q, n2)
    }
}

/// One of the three subsystems, in tensor order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    R1,
    Q,
    R2,
}

/// Dense complex operator over a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    mat: DMatrix<Complex64>,
}

impl Operator {
    pub fn from_matrix(space: HilbertSpace, mat: DMatrix<Complex64>) -> Self {
        assert_eq!(mat.nrows(), space.dim(), "operator dimension mismatch");
        assert_eq!(mat.ncols(), space.dim(), "operator dimension mismatch");
        Self { space, mat }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        Self { space, mat: DMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self { space, mat: DMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Operator {
        Self { space: self.space, mat: self.mat.adjoint() }
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// max |H − H†| / max |H| (0 for the zero operator).
    pub fn hermiticity_deviation(&self) -> f64 {
        let scale = self.mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let adj = self.mat.adjoint();
        let dev = (&self.mat - adj).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        dev / scale
    }

    /// Hermitian up to relative tolerance 1e-12.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= 1e-12
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Self { space: self.space, mat: &self.mat * Complex64::new(factor, 0.0) }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.space, psi.space, "operator/state space mismatch");
        StateVector { space: self.space, vec: &self.mat * &psi.vec }
    }

    pub fn expectation(&self, psi: &StateVector) -> Complex64 {
        psi.inner(&self.apply(psi))
    }
}

macro_rules! op_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.space, rhs.space, "operator space mismatch");
                Operator { space: self.space, mat: &self.mat $op &rhs.mat }
            }
        }
    };
}

op_binop!(Add, add, +);
op_binop!(Sub, sub, -);

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator { space: self.space, mat: &self.mat * &rhs.mat }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

/// Dense state vector over a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    vec: DVector<Complex64>,
}

impl StateVector {
    pub fn from_vector(space: HilbertSpace, vec: DVector<Complex64>) -> Self {
        assert_eq!(vec.len(), space.dim(), "state dimension mismatch");
        Self { space, vec }
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self { space, vec: DVector::zeros(space.dim()) }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vec
    }

    pub fn vector_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.vec
    }

    pub fn amplitude(&self, n1: usize, q: usize, n2: usize) -> Complex64 {
        self.vec[self.space.index(n1, q, n2)]
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        Self { space: self.space, vec: &self.vec / Complex64::new(n, 0.0) }
    }

    /// ⟨self|other⟩ (antilinear in `self`).
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.space, other.space, "state space mismatch");
        self.vec.dotc(&other.vec)
    }

    /// |⟨self|other⟩|².
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Truncated lowering operator on one resonator or the qubit ladder, embedded
/// in the composite space. For the qubit with `qubit_levels = 2` this is σ̂⁻.
pub fn annihilator(space: HilbertSpace, sub: Subsystem) -> Operator {
    let local_dim = match sub {
        Subsystem::R1 | Subsystem::R2 => space.resonator_dim(),
        Subsystem::Q => space.qubit_levels(),
    };
    let mut a = DMatrix::<Complex64>::zeros(local_dim, local_dim);
    for n in 1..local_dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    embed(space, sub, &a)
}

/// Raising operator, the adjoint of [`annihilator`].
pub fn creator(space: HilbertSpace, sub: Subsystem) -> Operator {
    annihilator(space, sub).dagger()
}

/// Number operator a†a on one subsystem.
pub fn number_operator(space: HilbertSpace, sub: Subsystem) -> Operator {
    let a = annihilator(space, sub);
    &a.dagger() * &a
}

/// Total excitation operator N̂ = b̂†b̂ + Σ_k â_k†â_k. Commutes with every
/// excitation-conserving Hamiltonian; a truncation/leakage diagnostic
/// otherwise.
pub fn total_excitation_operator(space: HilbertSpace) -> Operator {
    &(&number_operator(space, Subsystem::R1) + &number_operator(space, Subsystem::Q))
        + &number_operator(space, Subsystem::R2)
}

/// Embed a local matrix on one subsystem via Kronecker products in the fixed
/// (R₁, Q, R₂) order.
pub fn embed(space: HilbertSpace, sub: Subsystem, local: &DMatrix<Complex64>) -> Operator {
    let rd = space.resonator_dim();
    let ql = space.qubit_levels();
    let (d_expected, pre, post) = match sub {
        Subsystem::R1 => (rd, 1, ql * rd),
        Subsystem::Q => (ql, rd, rd),
        Subsystem::R2 => (rd, rd * ql, 1),
    };
    assert_eq!(local.nrows(), d_expected, "local operator dimension mismatch");
    assert_eq!(local.ncols(), d_expected, "local operator dimension mismatch");
    let id_pre = DMatrix::<Complex64>::identity(pre, pre);
    let id_post = DMatrix::<Complex64>::identity(post, post);
    Operator::from_matrix(space, id_pre.kronecker(local).kronecker(&id_post))
}

/// Unit basis vector |n₁, q, n₂⟩.
pub fn basis_state(space: HilbertSpace, n1: usize, q: usize, n2: usize) -> Result<StateVector> {
    if n1 > space.n_max() || n2 > space.n_max() || q >= space.qubit_levels() {
        return Err(Error::IndexOutOfRange {
            n1,
            q,
            n2,
            n_max: space.n_max(),
            qubit_levels: space.qubit_levels(),
        });
    }
    let mut v = DVector::zeros(space.dim());
    v[space.index(n1, q, n2)] = Complex64::new(1.0, 0.0);
    Ok(StateVector::from_vector(space, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn space() -> HilbertSpace {
        HilbertSpace::new(3, 2)
    }

    #[test]
    fn index_bijection_is_row_major() {
        let s = HilbertSpace::new(2, 3);
        let mut seen = vec![false; s.dim()];
        let mut expected = 0;
        for n1 in 0..=2 {
            for q in 0..3 {
                for n2 in 0..=2 {
                    let idx = s.index(n1, q, n2);
                    assert_eq!(idx, expected, "row-major order over (R1, Q, R2)");
                    assert_eq!(s.unindex(idx), (n1, q, n2));
                    seen[idx] = true;
                    expected += 1;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
        assert_eq!(s.dim(), 3 * 3 * 3);
    }

    #[test]
    fn annihilator_matrix_elements() {
        let s = space();
        let a1 = annihilator(s, Subsystem::R1);
        // ⟨n−1, g, 0| a₁ |n, g, 0⟩ = √n
        for n in 1..=s.n_max() {
            let from = basis_state(s, n, 0, 0).unwrap();
            let to = basis_state(s, n - 1, 0, 0).unwrap();
            let elem = to.inner(&a1.apply(&from));
            assert_abs_diff_eq!(elem.re, (n as f64).sqrt(), epsilon = 1e-14);
            assert_abs_diff_eq!(elem.im, 0.0, epsilon = 1e-14);
        }
        // vacuum annihilation
        let vac = basis_state(s, 0, 0, 0).unwrap();
        assert_abs_diff_eq!(a1.apply(&vac).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn commutator_truncation_artifact() {
        // [a, a†] = 1 below the truncation; the (n_max, n_max) diagonal entry
        // of the commutator is -n_max.
        let s = space();
        let a = annihilator(s, Subsystem::R1);
        let comm = a.commutator(&a.dagger());
        for n1 in 0..=s.n_max() {
            let b = basis_state(s, n1, 0, 0).unwrap();
            let val = comm.expectation(&b).re;
            if n1 < s.n_max() {
                assert_abs_diff_eq!(val, 1.0, epsilon = 1e-13);
            } else {
                assert_abs_diff_eq!(val, -(s.n_max() as f64), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn qubit_annihilator_is_sigma_minus() {
        let s = space();
        let sm = annihilator(s, Subsystem::Q);
        let e = basis_state(s, 0, QUBIT_EXCITED, 0).unwrap();
        let g = basis_state(s, 0, QUBIT_GROUND, 0).unwrap();
        assert_abs_diff_eq!(g.inner(&sm.apply(&e)).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sm.apply(&g).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn basis_states_orthonormal() {
        let s = HilbertSpace::new(2, 2);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let (a1, aq, a2) = s.unindex(i);
                let (b1, bq, b2) = s.unindex(j);
                let va = basis_state(s, a1, aq, a2).unwrap();
                let vb = basis_state(s, b1, bq, b2).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(va.inner(&vb).re, expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn basis_state_rejects_out_of_range() {
        let s = space();
        assert!(matches!(basis_state(s, 4, 0, 0), Err(crate::Error::IndexOutOfRange { .. })));
        assert!(matches!(basis_state(s, 0, 2, 0), Err(crate::Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn total_excitation_eigenstates() {
        let s = space();
        let n_op = total_excitation_operator(s);
        let ng0 = basis_state(s, 3, 0, 0).unwrap();
        assert_abs_diff_eq!(n_op.expectation(&ng0).re, 3.0, epsilon = 1e-13);
        let oneone = basis_state(s, 1, 1, 1).unwrap();
        assert_abs_diff_eq!(n_op.expectation(&oneone).re, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn disjoint_subsystems_commute() {
        let s = HilbertSpace::new(2, 3);
        let ops = [
            annihilator(s, Subsystem::R1),
            annihilator(s, Subsystem::Q),
            annihilator(s, Subsystem::R2),
        ];
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                if i != j {
                    assert_abs_diff_eq!(a.commutator(b).frobenius_norm(), 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn creator_is_elementwise_conjugate_transpose() {
        let s = space();
        let a = annihilator(s, Subsystem::R1);
        let adag = creator(s, Subsystem::R1);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert_eq!(adag.matrix()[(i, j)], a.matrix()[(j, i)].conj());
            }
        }
    }

    #[test]
    fn hermiticity_predicate() {
        let s = HilbertSpace::new(1, 2);
        let n = number_operator(s, Subsystem::R1);
        assert!(n.is_hermitian());
        let a = annihilator(s, Subsystem::R1);
        assert!(!a.is_hermitian());
        assert!(Operator::zeros(s).is_hermitian());
    }

    proptest! {
        #[test]
        fn unindex_roundtrip(n1 in 0usize..4, q in 0usize..2, n2 in 0usize..4) {
            let s = HilbertSpace::new(3, 2);
            prop_assert_eq!(s.unindex(s.index(n1, q, n2)), (n1, q, n2));
        }
    }
}
