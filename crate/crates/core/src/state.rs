//! Multi-mode pure states, partial traces and projective measurement.
//!
//! Amplitudes are stored row-major with mode 0 most significant, so the
//! amplitude vector of `a ⊗ b` is `kron(a, b)`.

use ndarray::{Array1, Array2, ArrayD, IxDyn};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spin::{self, Axis, BasisTag, ModeOperator, Spin};

/// Normalization tolerance for [`PureState::new`].
pub const NORM_TOL: f64 = 1e-12;
/// Branches below this probability are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub dims: Vec<usize>,
    pub amplitudes: Array1<C64>,
    pub basis: Vec<BasisTag>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Array1<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let n = linalg::norm(amplitudes.view());
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        let basis = vec![BasisTag::Z_SPIN; dims.len()];
        Ok(PureState { dims, amplitudes, basis })
    }

    /// Normalizes `amplitudes`; fails on a (numerically) zero vector.
    pub fn from_unnormalized(dims: Vec<usize>, amplitudes: Array1<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let n = linalg::norm(amplitudes.view());
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::DegenerateInput(format!("vector norm {n:e}")));
        }
        let basis = vec![BasisTag::Z_SPIN; dims.len()];
        Ok(PureState { dims, amplitudes: amplitudes / C64::new(n, 0.0), basis })
    }

    /// One-mode state from a vector assumed normalized.
    pub(crate) fn single(amplitudes: Array1<C64>) -> Self {
        PureState {
            dims: vec![amplitudes.len()],
            amplitudes,
            basis: vec![BasisTag::Z_SPIN],
        }
    }

    /// Two-mode state from a coefficient matrix `Φ[m, n]`.
    pub fn from_matrix(phi: &Array2<C64>) -> Result<Self> {
        let (r, c) = phi.dim();
        let amps = Array1::from_iter(phi.iter().copied());
        PureState::new(vec![r, c], amps)
    }

    /// `Φ[m, n]` for a two-mode state.
    pub fn to_matrix(&self) -> Result<Array2<C64>> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dims.len() });
        }
        Ok(self
            .amplitudes
            .clone()
            .into_shape_with_order((self.dims[0], self.dims[1]))
            .expect("dims match"))
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(self.amplitudes.view())
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(linalg::inner(self.amplitudes.view(), other.amplitudes.view()))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut basis = self.basis.clone();
        basis.extend_from_slice(&other.basis);
        PureState {
            dims,
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
            basis,
        }
    }

    fn tensor_view(&self) -> ArrayD<C64> {
        self.amplitudes
            .clone()
            .into_shape_with_order(IxDyn(&self.dims))
            .expect("dims match")
    }

    fn replace(&self, t: ArrayD<C64>) -> PureState {
        PureState {
            dims: self.dims.clone(),
            amplitudes: Array1::from_iter(t.iter().copied()),
            basis: self.basis.clone(),
        }
    }

    /// Applies a one-mode operator to `mode`.
    pub fn apply_local(&self, mode: usize, op: &Array2<C64>) -> Result<PureState> {
        self.check_modes(&[mode])?;
        check_square(op, self.dims[mode])?;
        Ok(self.replace(apply_on_axes(&self.tensor_view(), &[mode], op)))
    }

    /// Applies an operator on the ordered mode pair `(m, n)`; `op` is indexed
    /// as `kron(mode m, mode n)`.
    pub fn apply_two_mode(&self, modes: (usize, usize), op: &Array2<C64>) -> Result<PureState> {
        self.check_modes(&[modes.0, modes.1])?;
        check_square(op, self.dims[modes.0] * self.dims[modes.1])?;
        Ok(self.replace(apply_on_axes(&self.tensor_view(), &[modes.0, modes.1], op)))
    }

    /// `exp(iα A^{(m)} B^{(n)})` applied through the product eigenbasis of
    /// `A ⊗ B`, where `a` and `b` hold the eigendecompositions.
    pub fn apply_ising(
        &self,
        modes: (usize, usize),
        alpha: f64,
        a: &MeasurementBasis,
        b: &MeasurementBasis,
    ) -> Result<PureState> {
        self.check_modes(&[modes.0, modes.1])?;
        check_square(&a.vectors, self.dims[modes.0])?;
        check_square(&b.vectors, self.dims[modes.1])?;
        Ok(self.replace(apply_ising_tensor(&self.tensor_view(), modes, alpha, a, b)))
    }

    pub fn expectation(&self, mode: usize, op: &Array2<C64>) -> Result<C64> {
        let v = self.apply_local(mode, op)?;
        Ok(linalg::inner(self.amplitudes.view(), v.amplitudes.view()))
    }

    /// `⟨O²⟩ - ⟨O⟩²` for Hermitian `op`.
    pub fn variance(&self, mode: usize, op: &Array2<C64>) -> Result<f64> {
        let v = self.apply_local(mode, op)?;
        let mean = linalg::inner(self.amplitudes.view(), v.amplitudes.view()).re;
        let second = v.amplitudes.iter().map(|x| x.norm_sqr()).sum::<f64>();
        Ok((second - mean * mean).max(0.0))
    }

    /// Reduced density matrix on `keep` (in the given order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Array2<C64>> {
        if keep.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        self.check_modes(keep)?;
        let m = group_modes(&self.tensor_view(), keep);
        Ok(m.dot(&linalg::dagger(&m)))
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        check_mode_list(modes, self.modes())
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    let prod: usize = dims.iter().product();
    if dims.is_empty() || prod != len {
        return Err(Error::DimensionMismatch { expected: prod, found: len });
    }
    Ok(())
}

fn check_square(op: &Array2<C64>, n: usize) -> Result<()> {
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: op.nrows().max(op.ncols()) });
    }
    Ok(())
}

pub(crate) fn check_mode_list(modes: &[usize], count: usize) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= count {
            return Err(Error::ModeOutOfRange { mode: m, modes: count });
        }
        if modes[..i].contains(&m) {
            return Err(Error::RepeatedMode(m));
        }
    }
    Ok(())
}

/// Reshapes a tensor into a matrix with the `rows` axes (in order) as row
/// index and the remaining axes (in order) as column index.
pub(crate) fn group_modes(t: &ArrayD<C64>, rows: &[usize]) -> Array2<C64> {
    let nd = t.ndim();
    let rest: Vec<usize> = (0..nd).filter(|a| !rows.contains(a)).collect();
    let perm: Vec<usize> = rows.iter().chain(rest.iter()).copied().collect();
    let r: usize = rows.iter().map(|&a| t.shape()[a]).product();
    let c: usize = rest.iter().map(|&a| t.shape()[a]).product();
    let p = t.view().permuted_axes(IxDyn(&perm));
    Array2::from_shape_vec((r, c), p.iter().copied().collect()).expect("sizes match")
}

/// Applies `op` (indexed as the Kronecker product of the listed axes) to the
/// given tensor axes.
pub(crate) fn apply_on_axes(t: &ArrayD<C64>, axes: &[usize], op: &Array2<C64>) -> ArrayD<C64> {
    let nd = t.ndim();
    let shape = t.shape().to_vec();
    let rest: Vec<usize> = (0..nd).filter(|a| !axes.contains(a)).collect();
    let perm: Vec<usize> = rest.iter().chain(axes.iter()).copied().collect();
    let d: usize = axes.iter().map(|&a| shape[a]).product();
    let r: usize = rest.iter().map(|&a| shape[a]).product();
    let p = t.view().permuted_axes(IxDyn(&perm));
    let m = Array2::from_shape_vec((r, d), p.iter().copied().collect()).expect("sizes match");
    let out = m.dot(&op.t());
    let pshape: Vec<usize> = perm.iter().map(|&a| shape[a]).collect();
    let out = out.into_shape_with_order(IxDyn(&pshape)).expect("sizes match");
    let mut inv = vec![0; nd];
    for (i, &a) in perm.iter().enumerate() {
        inv[a] = i;
    }
    out.permuted_axes(IxDyn(&inv)).as_standard_layout().into_owned()
}

pub(crate) fn apply_ising_tensor(
    t: &ArrayD<C64>,
    modes: (usize, usize),
    alpha: f64,
    a: &MeasurementBasis,
    b: &MeasurementBasis,
) -> ArrayD<C64> {
    let mut x = apply_on_axes(t, &[modes.0], &linalg::dagger(&a.vectors));
    x = apply_on_axes(&x, &[modes.1], &linalg::dagger(&b.vectors));
    let phases = Array2::from_shape_fn((a.values.len(), b.values.len()), |(i, k)| {
        C64::from_polar(1.0, alpha * a.values[i] * b.values[k])
    });
    for (idx, v) in x.indexed_iter_mut() {
        *v *= phases[[idx[modes.0], idx[modes.1]]];
    }
    x = apply_on_axes(&x, &[modes.0], &a.vectors);
    apply_on_axes(&x, &[modes.1], &b.vectors)
}

/// Orthonormal eigenbasis of a one-mode observable: column `k` of `vectors`
/// has eigenvalue `values[k]`, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

impl MeasurementBasis {
    /// Eigenbasis of `J_axis`.
    pub fn spin(s: Spin, axis: Axis) -> Self {
        MeasurementBasis { values: s.m_values(), vectors: spin::spin_basis(s, axis) }
    }

    /// Eigenbasis of the phase operator `θ_axis`.
    pub fn phase(s: Spin, axis: Axis) -> Self {
        MeasurementBasis { values: s.m_values(), vectors: spin::phase_basis(s, axis) }
    }

    /// Diagonalizes a Hermitian observable; rejects degenerate spectra, since
    /// measurement branches are rank-1 projections.
    pub fn from_observable(op: &Array2<C64>) -> Result<Self> {
        let e = linalg::eigh(op)?;
        if e.min_gap() < DEGENERACY_TOL {
            return Err(Error::DegenerateInput("observable spectrum is degenerate".into()));
        }
        Ok(MeasurementBasis { values: e.values, vectors: e.vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBranch {
    pub outcomes: Vec<f64>,
    pub indices: Vec<usize>,
    pub probability: f64,
    pub post_state: Option<PureState>,
}

/// Unnormalized post-measurement blocks for every outcome tuple, in
/// lexicographic order of eigenvalue indices. Each block lives on the
/// unmeasured modes (in their original order).
pub(crate) fn project_all(
    state: &PureState,
    modes: &[usize],
    bases: &[&MeasurementBasis],
) -> Vec<(Vec<usize>, Array1<C64>)> {
    let mut t = state.tensor_view();
    for (&m, b) in modes.iter().zip(bases) {
        t = apply_on_axes(&t, &[m], &linalg::dagger(&b.vectors));
    }
    let m = group_modes(&t, modes);
    let shape: Vec<usize> = modes.iter().map(|&a| state.dims[a]).collect();
    (0..m.nrows())
        .map(|r| {
            let mut idx = vec![0; shape.len()];
            let mut rem = r;
            for k in (0..shape.len()).rev() {
                idx[k] = rem % shape[k];
                rem /= shape[k];
            }
            (idx, m.row(r).to_owned())
        })
        .collect()
}

/// Joint measurement of one observable per listed mode. Each observable must
/// have a non-degenerate spectrum. Branches with probability below
/// [`BRANCH_CUTOFF`] are dropped; the rest are not rescaled.
pub fn measure_commuting(
    state: &PureState,
    observables: &[(usize, ModeOperator)],
) -> Result<Vec<MeasurementBranch>> {
    if observables.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    let modes: Vec<usize> = observables.iter().map(|(m, _)| *m).collect();
    check_mode_list(&modes, state.modes())?;
    let mut bases = Vec::with_capacity(modes.len());
    for (m, op) in observables {
        check_square(&op.matrix, state.dims[*m])?;
        let b = MeasurementBasis::from_observable(&op.matrix)
            .map_err(|_| Error::DegenerateObservable(*m))?;
        bases.push(b);
    }
    let refs: Vec<&MeasurementBasis> = bases.iter().collect();
    Ok(measure_in_bases(state, &modes, &refs))
}

/// Measurement in explicitly given orthonormal bases.
pub fn measure_in_bases(
    state: &PureState,
    modes: &[usize],
    bases: &[&MeasurementBasis],
) -> Vec<MeasurementBranch> {
    let rest_dims: Vec<usize> = (0..state.modes())
        .filter(|a| !modes.contains(a))
        .map(|a| state.dims[a])
        .collect();
    let rest_basis: Vec<BasisTag> = (0..state.modes())
        .filter(|a| !modes.contains(a))
        .map(|a| state.basis[a])
        .collect();
    project_all(state, modes, bases)
        .into_iter()
        .filter_map(|(idx, block)| {
            let p = block.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if p < BRANCH_CUTOFF {
                return None;
            }
            let outcomes = idx.iter().zip(bases).map(|(&i, b)| b.values[i]).collect();
            let post_state = if rest_dims.is_empty() {
                None
            } else {
                let amps = block / C64::new(p.sqrt(), 0.0);
                Some(PureState { dims: rest_dims.clone(), amplitudes: amps, basis: rest_basis.clone() })
            };
            Some(MeasurementBranch { outcomes, indices: idx, probability: p, post_state })
        })
        .collect()
}

/// Embeds a one-mode operator at `mode` of a register with `dims`, padding
/// identities elsewhere.
pub fn embed(op: &Array2<C64>, mode: usize, dims: &[usize]) -> Result<Array2<C64>> {
    check_mode_list(&[mode], dims.len())?;
    check_square(op, dims[mode])?;
    let mut out = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for (k, &d) in dims.iter().enumerate() {
        let f = if k == mode { op.clone() } else { linalg::identity(d) };
        out = linalg::kron(&out, &f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_state, seeded_rng};
    use crate::spin::{highest_weight_vector, spin_matrix};
    use crate::linalg::ZERO;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn basis_vec(n: usize, k: usize) -> Array1<C64> {
        Array1::from_shape_fn(n, |i| if i == k { C64::new(1.0, 0.0) } else { ZERO })
    }

    #[test]
    fn rejects_unnormalized() {
        let v = Array1::from_elem(2, C64::new(1.0, 0.0));
        assert!(matches!(PureState::new(vec![2], v.clone()), Err(Error::NotNormalized(_))));
        assert!(PureState::from_unnormalized(vec![2], v).is_ok());
        assert!(PureState::from_unnormalized(vec![2], Array1::zeros(2)).is_err());
    }

    #[test]
    fn local_operator_on_second_mode() {
        let s = Spin::HALF;
        // |↑⟩ ⊗ |↓⟩ with index 1 = m=+1/2
        let st = PureState::single(basis_vec(2, 1)).tensor(&PureState::single(basis_vec(2, 0)));
        let jz = spin_matrix(s, Axis::Z);
        assert_abs_diff_eq!(st.expectation(1, &jz).unwrap().re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(st.expectation(0, &jz).unwrap().re, 0.5, epsilon = 1e-15);
        let full = embed(&jz, 1, &[2, 2]).unwrap();
        let direct = full.dot(&st.amplitudes);
        let via = st.apply_local(1, &jz).unwrap();
        assert!((direct - via.amplitudes).iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn two_mode_operator_matches_embedding() {
        let mut rng = seeded_rng(3);
        let st = haar_state(&[2, 3, 2], &mut rng);
        let a = spin_matrix(Spin::from_twice(1), Axis::Y);
        let b = spin_matrix(Spin::from_twice(1), Axis::X);
        let op = linalg::kron(&a, &b);
        // modes (2, 0): op acts as a on mode 2 and b on mode 0
        let got = st.apply_two_mode((2, 0), &op).unwrap();
        let want = st.apply_local(2, &a).unwrap().apply_local(0, &b).unwrap();
        assert!((got.amplitudes - want.amplitudes).iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn ising_matches_dense_exponential() {
        let s = Spin::from_twice(2);
        let mut rng = seeded_rng(11);
        let st = haar_state(&[3, 3, 3], &mut rng);
        let a = MeasurementBasis::spin(s, Axis::Y);
        let b = MeasurementBasis::spin(s, Axis::Z);
        let g = linalg::kron(&spin_matrix(s, Axis::Y), &spin_matrix(s, Axis::Z));
        let u = linalg::expm_i(&g, 0.7).unwrap();
        let dense = st.apply_two_mode((1, 2), &u).unwrap();
        let fast = st.apply_ising((1, 2), 0.7, &a, &b).unwrap();
        let d = linalg::norm((&dense.amplitudes - &fast.amplitudes).view());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn partial_trace_of_products_and_singlet() {
        let a = highest_weight_vector(Spin::from_twice(2), Axis::X);
        let b = highest_weight_vector(Spin::from_twice(2), Axis::Y);
        let st = PureState::single(a).tensor(&PureState::single(b));
        let rho = st.partial_trace(&[0]).unwrap();
        let e = linalg::eigh(&rho).unwrap();
        assert_abs_diff_eq!(e.values[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-12);
        let r = 0.5_f64.sqrt();
        let singlet = PureState::new(
            vec![2, 2],
            Array1::from(vec![ZERO, C64::new(r, 0.0), C64::new(-r, 0.0), ZERO]),
        )
        .unwrap();
        let rho = singlet.partial_trace(&[1]).unwrap();
        assert!((rho[[0, 0]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((rho[[1, 1]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(rho[[0, 1]].norm() < 1e-15);
        assert_eq!(singlet.partial_trace(&[]).unwrap_err(), Error::EmptyModeSet);
    }

    #[test]
    fn measurement_anchors() {
        let s = Spin::from_twice(3);
        let top = PureState::single(basis_vec(4, 3));
        let br = measure_commuting(&top, &[(0, spin::spin_operator(s, Axis::Z))]).unwrap();
        assert_eq!(br.len(), 1);
        assert_abs_diff_eq!(br[0].probability, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(br[0].outcomes[0], 1.5, epsilon = 1e-15);

        let x = PureState::single(highest_weight_vector(Spin::HALF, Axis::X));
        let br = measure_commuting(&x, &[(0, spin::spin_operator(Spin::HALF, Axis::Z))]).unwrap();
        assert_eq!(br.len(), 2);
        for b in &br {
            assert_abs_diff_eq!(b.probability, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn measurement_errors() {
        let mut rng = seeded_rng(1);
        let st = haar_state(&[2, 2], &mut rng);
        let z = spin::spin_operator(Spin::HALF, Axis::Z);
        assert_eq!(
            measure_commuting(&st, &[(0, z.clone()), (0, z.clone())]).unwrap_err(),
            Error::RepeatedMode(0)
        );
        assert!(matches!(
            measure_commuting(&st, &[(2, z.clone())]).unwrap_err(),
            Error::ModeOutOfRange { .. }
        ));
        let id = ModeOperator::identity(2);
        assert_eq!(measure_commuting(&st, &[(1, id)]).unwrap_err(), Error::DegenerateObservable(1));
    }

    #[test]
    fn three_mode_measurement_matches_projector_sum() {
        // oracle: explicit N³×N³ projectors |a⟩⟨a| ⊗ |b⟩⟨b| on modes 1, 2
        let s = Spin::from_twice(2);
        let mut rng = seeded_rng(42);
        let st = haar_state(&[3, 3, 3], &mut rng);
        let obs = [
            (1, spin::spin_operator(s, Axis::Z)),
            (2, spin::spin_operator(s, Axis::Y)),
        ];
        let br = measure_commuting(&st, &obs).unwrap();
        let total: f64 = br.iter().map(|b| b.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        let ea = linalg::eigh(&obs[0].1.matrix).unwrap();
        let eb = linalg::eigh(&obs[1].1.matrix).unwrap();
        for b in &br {
            let va = ea.vectors.column(b.indices[0]).to_owned();
            let vb = eb.vectors.column(b.indices[1]).to_owned();
            let pa = outer(&va);
            let pb = outer(&vb);
            let proj = linalg::kron(&linalg::kron(&linalg::identity(3), &pa), &pb);
            let p = linalg::norm(proj.dot(&st.amplitudes).view()).powi(2);
            assert_abs_diff_eq!(p, b.probability, epsilon = 1e-12);
        }
    }

    fn outer(v: &Array1<C64>) -> Array2<C64> {
        Array2::from_shape_fn((v.len(), v.len()), |(i, k)| v[i] * v[k].conj())
    }

    proptest! {
        #[test]
        fn tensor_norm_multiplies(seed in 0u64..200) {
            let mut rng = seeded_rng(seed);
            let a = haar_state(&[3], &mut rng).amplitudes * C64::new(1.7, 0.0);
            let b = haar_state(&[4], &mut rng).amplitudes * C64::new(0.4, 0.0);
            let k = linalg::kron_vec(&a, &b);
            let lhs = linalg::norm(k.view());
            prop_assert!((lhs - linalg::norm(a.view()) * linalg::norm(b.view())).abs() < 1e-12);
        }

        #[test]
        fn measurement_is_complete(seed in 0u64..200, twice in 1u32..4) {
            let s = Spin::from_twice(twice);
            let n = s.dim();
            let mut rng = seeded_rng(seed);
            let st = haar_state(&[n, n, n], &mut rng);
            let obs = [(0, spin::spin_operator(s, Axis::X)), (2, spin::phase_operator(s, Axis::Z))];
            let br = measure_commuting(&st, &obs).unwrap();
            let total: f64 = br.iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            for b in &br {
                let ps = b.post_state.as_ref().unwrap();
                prop_assert!((ps.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn reduced_state_is_a_density_matrix(seed in 0u64..100) {
            let mut rng = seeded_rng(seed);
            let st = haar_state(&[2, 3, 4], &mut rng);
            for keep in [vec![0], vec![2, 0], vec![1]] {
                let rho = st.partial_trace(&keep).unwrap();
                let tr: C64 = rho.diag().iter().sum();
                prop_assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-10);
                let e = linalg::eigh(&rho).unwrap();
                prop_assert!(e.values[0] > -1e-12);
            }
        }
    }
}
