//! Spin-j algebra: operators, eigenbases, coherent and phase states.
//!
//! Index `i` of a z-basis vector corresponds to `m = -j + i`, so every basis
//! and every spectrum in this crate is ordered by ascending `m`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ZERO};
use crate::state::PureState;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn from_twice(twice: u32) -> Self {
        Spin { twice }
    }

    /// Accepts any non-negative multiple of 1/2.
    pub fn new(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if !t.is_finite() || t < 0.0 || (t - t.round()).abs() > 1e-9 || t > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Ok(Spin { twice: t.round() as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn j(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// `m = -j, -j+1, ..., j`.
    pub fn m_values(self) -> Vec<f64> {
        let j = self.j();
        (0..self.dim()).map(|i| i as f64 - j).collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => num.checked_mul(2).map(Spin::from_twice).ok_or_else(bad),
                "2" => Ok(Spin::from_twice(num)),
                _ => Err(bad()),
            }
        } else {
            let j: f64 = s.parse().map_err(|_| bad())?;
            Spin::new(j).map_err(|_| bad())
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        f.write_str(s)
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown axis '{other}'"))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Spin,
    Phase,
}

/// Which basis a mode's coefficients are expressed in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisTag {
    pub axis: Axis,
    pub kind: BasisKind,
}

impl BasisTag {
    pub const Z_SPIN: BasisTag = BasisTag { axis: Axis::Z, kind: BasisKind::Spin };
}

impl Default for BasisTag {
    fn default() -> Self {
        BasisTag::Z_SPIN
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator {
    pub matrix: Array2<C64>,
    pub basis: BasisTag,
}

impl ModeOperator {
    pub fn new(matrix: Array2<C64>) -> Self {
        ModeOperator { matrix, basis: BasisTag::Z_SPIN }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(n: usize) -> Self {
        Self::new(linalg::identity(n))
    }

    pub fn dagger(&self) -> Self {
        ModeOperator { matrix: linalg::dagger(&self.matrix), basis: self.basis }
    }

    pub fn dot(&self, other: &ModeOperator) -> Self {
        ModeOperator { matrix: self.matrix.dot(&other.matrix), basis: self.basis }
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_deviation(&self.matrix) < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        linalg::unitarity_deviation(&self.matrix) < tol
    }

    /// `A ⊗ B` acting on a mode pair.
    pub fn kron(&self, other: &ModeOperator) -> Self {
        ModeOperator { matrix: linalg::kron(&self.matrix, &other.matrix), basis: self.basis }
    }
}

/// `J_+` in the z basis: `⟨m+1|J_+|m⟩ = sqrt(j(j+1) - m(m+1))`.
pub fn raising(spin: Spin) -> Array2<f64> {
    let j = spin.j();
    let ms = spin.m_values();
    let n = spin.dim();
    let mut jp = Array2::zeros((n, n));
    for i in 0..n.saturating_sub(1) {
        let m = ms[i];
        jp[[i + 1, i]] = (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt();
    }
    jp
}

/// Real matrices `(J_x, (J_+ - J_-)/2, J_z)`; note `J_y = -i` times the middle one.
pub fn real_components(spin: Spin) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let jp = raising(spin);
    let jm = jp.t().to_owned();
    let x = (&jp + &jm) * 0.5;
    let a = (&jp - &jm) * 0.5;
    let z = Array2::from_diag(&Array1::from(spin.m_values()));
    (x, a, z)
}

pub fn spin_matrix(spin: Spin, axis: Axis) -> Array2<C64> {
    let (x, a, z) = real_components(spin);
    match axis {
        Axis::X => linalg::from_real(&x),
        Axis::Y => a.mapv(|v| C64::new(0.0, -v)),
        Axis::Z => linalg::from_real(&z),
    }
}

/// `J_axis` in the z-spin basis.
pub fn spin_operator(spin: Spin, axis: Axis) -> ModeOperator {
    ModeOperator::new(spin_matrix(spin, axis))
}

/// Columns are `|jm⟩_axis` for ascending `m`, expressed in the z basis.
///
/// The x and y bases are the rotated z basis, `|jm⟩_x = e^{-iπJ_y/2}|jm⟩_z`
/// and `|jm⟩_y = e^{iπJ_x/2}|jm⟩_z`. This fixes the relative phases between
/// basis vectors, which matters for superpositions such as
/// `Σ_m |jm⟩_y|jm⟩_y`.
pub fn spin_basis(spin: Spin, axis: Axis) -> Array2<C64> {
    let n = spin.dim();
    let gen = match axis {
        Axis::Z => return linalg::identity(n),
        Axis::X => (spin_matrix(spin, Axis::Y), -PI / 2.0),
        Axis::Y => (spin_matrix(spin, Axis::X), PI / 2.0),
    };
    linalg::expm_i(&gen.0, gen.1).expect("spin generators are Hermitian")
}

/// Eigenvector of `J_axis` with eigenvalue `+j`, largest z-basis amplitude
/// real positive.
pub fn highest_weight_vector(spin: Spin, axis: Axis) -> Array1<C64> {
    let basis = spin_basis(spin, axis);
    let mut v = basis.column(spin.dim() - 1).to_owned();
    linalg::fix_phase(&mut v.view_mut());
    v
}

pub fn highest_weight_state(spin: Spin, axis: Axis) -> PureState {
    PureState::single(highest_weight_vector(spin, axis))
}

/// Real combination `x J_x + y J_y + z J_z`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Generator {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Generator {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Generator { x, y, z }
    }

    pub fn along(axis: Axis) -> Self {
        match axis {
            Axis::X => Generator::new(1.0, 0.0, 0.0),
            Axis::Y => Generator::new(0.0, 1.0, 0.0),
            Axis::Z => Generator::new(0.0, 0.0, 1.0),
        }
    }

    pub fn matrix(&self, spin: Spin) -> Array2<C64> {
        let (x, a, z) = real_components(spin);
        Array2::from_shape_fn(x.dim(), |(r, c)| {
            C64::new(self.x * x[[r, c]] + self.z * z[[r, c]], -self.y * a[[r, c]])
        })
    }
}

/// `exp(i·angle·G)`.
pub fn rotation(spin: Spin, generator: Generator, angle: f64) -> ModeOperator {
    let g = generator.matrix(spin);
    ModeOperator::new(linalg::expm_i(&g, angle).expect("generator is Hermitian"))
}

/// `|θ,φ⟩ = e^{iφJ_x} e^{iθJ_y} |jj⟩_x`.
pub fn coherent_vector(spin: Spin, theta: f64, phi: f64) -> Array1<C64> {
    let hw = highest_weight_vector(spin, Axis::X);
    let ry = rotation(spin, Generator::along(Axis::Y), theta);
    let rx = rotation(spin, Generator::along(Axis::X), phi);
    rx.apply(&ry.apply(&hw))
}

pub fn coherent_state(spin: Spin, theta: f64, phi: f64) -> PureState {
    PureState::single(coherent_vector(spin, theta, phi))
}

/// Coefficients of the phase state with label `m` over the `axis` spin basis.
/// Labels are taken modulo N, so any `m` with `m + j` integral is allowed.
fn phase_coefficients(spin: Spin, m: f64) -> Array1<C64> {
    let n = spin.dim() as f64;
    let norm = n.sqrt().recip();
    let shift = if spin.is_integer() { 0.0 } else { 0.5 };
    Array1::from_iter(
        spin.m_values()
            .into_iter()
            .map(|k| C64::from_polar(norm, 2.0 * PI * (m + shift) * (k + shift) / n)),
    )
}

/// `|~jm⟩_axis` in the z-spin basis.
pub fn phase_vector(spin: Spin, axis: Axis, m: f64) -> Array1<C64> {
    spin_basis(spin, axis).dot(&phase_coefficients(spin, m))
}

pub fn phase_state(spin: Spin, axis: Axis, m: f64) -> PureState {
    let mut s = PureState::single(phase_vector(spin, axis, m));
    s.basis[0] = BasisTag { axis, kind: BasisKind::Phase };
    s
}

/// Columns are `|~jm⟩_axis`, `m = -j..j` ascending.
pub fn phase_basis(spin: Spin, axis: Axis) -> Array2<C64> {
    let spin_b = spin_basis(spin, axis);
    let n = spin.dim();
    let mut coeffs = Array2::from_elem((n, n), ZERO);
    for (c, m) in spin.m_values().into_iter().enumerate() {
        coeffs.column_mut(c).assign(&phase_coefficients(spin, m));
    }
    spin_b.dot(&coeffs)
}

pub fn phase_states(spin: Spin, axis: Axis) -> Vec<PureState> {
    spin.m_values().into_iter().map(|m| phase_state(spin, axis, m)).collect()
}

/// `θ_axis = Σ_m m |~jm⟩⟨~jm|`.
pub fn phase_operator(spin: Spin, axis: Axis) -> ModeOperator {
    let b = phase_basis(spin, axis);
    let d: Vec<C64> = spin.m_values().into_iter().map(|m| C64::new(m, 0.0)).collect();
    ModeOperator {
        matrix: linalg::spectral_apply(&b, &d),
        basis: BasisTag::Z_SPIN,
    }
}

/// Levi-Civita helper for algebra checks: returns `(c, sign)` with
/// `[J_a, J_b] = i·sign·J_c`.
pub fn structure(a: Axis, b: Axis) -> Option<(Axis, f64)> {
    use Axis::*;
    match (a, b) {
        (X, Y) => Some((Z, 1.0)),
        (Y, Z) => Some((X, 1.0)),
        (Z, X) => Some((Y, 1.0)),
        (Y, X) => Some((Z, -1.0)),
        (Z, Y) => Some((X, -1.0)),
        (X, Z) => Some((Y, -1.0)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, frobenius, inner};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("1/2".parse::<Spin>().unwrap(), Spin::HALF);
        assert_eq!("0.5".parse::<Spin>().unwrap(), Spin::HALF);
        assert_eq!("3".parse::<Spin>().unwrap().dim(), 7);
        assert_eq!("7/2".parse::<Spin>().unwrap().to_string(), "7/2");
        assert!("1/3".parse::<Spin>().is_err());
        assert!("-1".parse::<Spin>().is_err());
        assert!(Spin::new(0.25).is_err());
    }

    #[test]
    fn spin_half_z_is_diagonal() {
        let z = spin_matrix(Spin::HALF, Axis::Z);
        assert_eq!(z[[0, 0]], C64::new(-0.5, 0.0));
        assert_eq!(z[[1, 1]], C64::new(0.5, 0.0));
        assert_eq!(z[[0, 1]], ZERO);
    }

    #[test]
    fn spin_one_y_spectrum() {
        // oracle: characteristic polynomial of the 3x3 J_y is -λ(λ²-1)
        let e = linalg::eigh(&spin_matrix(Spin::from_twice(2), Axis::Y)).unwrap();
        for (w, want) in e.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*w, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn highest_weight_x_spin_one() {
        let v = highest_weight_vector(Spin::from_twice(2), Axis::X);
        let s = 0.5_f64.sqrt();
        for (a, b) in v.iter().zip([0.5, s, 0.5]) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_anchors() {
        let s = Spin::HALF;
        let r = rotation(s, Generator::along(Axis::Z), PI);
        // index 0 is m = -1/2
        assert!((r.matrix[[0, 0]] - C64::from_polar(1.0, -PI / 2.0)).norm() < 1e-14);
        assert!((r.matrix[[1, 1]] - C64::from_polar(1.0, PI / 2.0)).norm() < 1e-14);
        let g = Generator::new(0.3, -0.4, 0.866);
        let norm = (g.x * g.x + g.y * g.y + g.z * g.z).sqrt();
        let full2 = rotation(s, g, 2.0 * PI / norm);
        assert!(frobenius(&(&full2.matrix + &linalg::identity(2))) < 1e-12);
        assert!(full2.is_unitary(1e-12));
        assert!(frobenius(&(rotation(s, g, 0.0).matrix - linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn coherent_state_pi_flips_spin_half() {
        let v = coherent_vector(Spin::HALF, PI, 0.0);
        let jx = spin_matrix(Spin::HALF, Axis::X);
        assert_abs_diff_eq!(inner(v.view(), jx.dot(&v).view()).re, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn phase_states_spin_half_explicit() {
        // N = 2, shifted labels (m+1/2) ∈ {0,1}, (n+1/2) ∈ {0,1}:
        // |~,-1/2⟩ = (|-1/2⟩ + |1/2⟩)/√2, |~,1/2⟩ = (|-1/2⟩ - |1/2⟩)/√2 in the z basis
        let s = Spin::HALF;
        let r = 0.5_f64.sqrt();
        let lo = phase_vector(s, Axis::Z, -0.5);
        let hi = phase_vector(s, Axis::Z, 0.5);
        assert!((lo[0] - C64::new(r, 0.0)).norm() < 1e-14 && (lo[1] - C64::new(r, 0.0)).norm() < 1e-14);
        assert!((hi[0] - C64::new(r, 0.0)).norm() < 1e-14 && (hi[1] + C64::new(r, 0.0)).norm() < 1e-14);
        // θ_z = -1/2|lo⟩⟨lo| + 1/2|hi⟩⟨hi| = -1/2 σ_x
        let th = phase_operator(s, Axis::Z).matrix;
        assert!((th[[0, 1]] - C64::new(-0.5, 0.0)).norm() < 1e-14);
        assert!(th[[0, 0]].norm() < 1e-14);
    }

    #[test]
    fn phase_and_spin_bases_are_conjugate() {
        for twice in 1..=6 {
            let s = Spin::from_twice(twice);
            let n = s.dim();
            for axis in Axis::ALL {
                let sb = spin_basis(s, axis);
                let pb = phase_basis(s, axis);
                assert!(linalg::unitarity_deviation(&pb) < 1e-12);
                let overlap = linalg::dagger(&sb).dot(&pb);
                for x in overlap.iter() {
                    assert_abs_diff_eq!(x.norm(), (n as f64).sqrt().recip(), epsilon = 1e-12);
                }
                let th = phase_operator(s, axis);
                assert!(th.is_hermitian(1e-12));
                let e = linalg::eigh(&th.matrix).unwrap();
                for (w, m) in e.values.iter().zip(s.m_values()) {
                    assert_abs_diff_eq!(*w, m, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigenbasis_columns_are_eigenvectors() {
        for twice in 0..=8 {
            let s = Spin::from_twice(twice);
            for axis in Axis::ALL {
                let b = spin_basis(s, axis);
                let op = spin_matrix(s, axis);
                let d: Vec<C64> = s.m_values().into_iter().map(|m| C64::new(m, 0.0)).collect();
                assert!(frobenius(&(linalg::spectral_apply(&b, &d) - &op)) < 1e-11);
            }
        }
    }

    proptest! {
        #[test]
        fn su2_algebra(twice in 0u32..=10) {
            let s = Spin::from_twice(twice);
            for a in Axis::ALL {
                for b in Axis::ALL {
                    if let Some((c, sign)) = structure(a, b) {
                        let lhs = commutator(&spin_matrix(s, a), &spin_matrix(s, b));
                        let rhs = spin_matrix(s, c).mapv(|v| v * C64::new(0.0, sign));
                        prop_assert!(frobenius(&(lhs - rhs)) < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn spectrum_is_m_values(twice in 0u32..=12) {
            let s = Spin::from_twice(twice);
            for axis in Axis::ALL {
                let e = linalg::eigh(&spin_matrix(s, axis)).unwrap();
                for (w, m) in e.values.iter().zip(s.m_values()) {
                    prop_assert!((w - m).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn coherent_forms_agree(twice in 1u32..=8, ti in 0usize..5, pi_ in 0usize..5) {
            let s = Spin::from_twice(twice);
            let theta = ti as f64 * PI / 4.0;
            let phi = pi_ as f64 * PI / 2.5;
            let a = coherent_vector(s, theta, phi);
            let g = Generator::new(0.0, phi.cos(), -phi.sin());
            let b = rotation(s, g, theta).apply(&highest_weight_vector(s, Axis::X));
            // equal up to the global phase e^{iφj} picked up by |jj⟩_x
            prop_assert!((1.0 - inner(a.view(), b.view()).norm()).abs() < 1e-10);
        }

        #[test]
        fn phase_labels_are_periodic(twice in 1u32..=7, k in -3i32..3) {
            let s = Spin::from_twice(twice);
            let n = s.dim() as f64;
            let m = s.m_values()[0];
            let a = phase_vector(s, Axis::Y, m);
            let b = phase_vector(s, Axis::Y, m + k as f64 * n);
            prop_assert!((inner(a.view(), b.view()).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coherent_theta_zero_is_highest_weight() {
        let s = Spin::from_twice(5);
        let hw = highest_weight_vector(s, Axis::X);
        for phi in [0.0, 0.7, 2.1] {
            let v = coherent_vector(s, 0.0, phi);
            assert_abs_diff_eq!(inner(hw.view(), v.view()).norm(), 1.0, epsilon = 1e-12);
        }
    }
}
