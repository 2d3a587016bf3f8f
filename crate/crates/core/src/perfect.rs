//! Exact teleportation with a Bell measurement built from
//! `e^{i(2π/N) J_y J_z}` followed by phase measurements.
//!
//! Abstract Bell states use labels `1..=N` with `|m⟩` the `m`-th basis
//! vector; all index arithmetic is reduced into `1..=N`.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ZERO};
use crate::spin::{self, Axis, Spin};
use crate::squeezed::maximally_entangled_state;
use crate::state::{MeasurementBasis, PureState};
use crate::teleport::{kraus_branches, TeleportOutcome, TwoModeUnitary};

pub const PERFECT_MAX_TWICE_J: u32 = 40;
pub const IDENTITY_TOL: f64 = 1e-10;
/// Above this the assembled branch map is not treated as unitary.
pub const UNITARY_TOL: f64 = 1e-8;

/// `((x − 1) mod N) + 1`.
pub fn mod1(x: i64, n: usize) -> usize {
    (x - 1).rem_euclid(n as i64) as usize + 1
}

/// ±1 sign.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `|p,q⟩ = N^{−1/2} Σ_m e^{i s₁ 2π m p/N} |m⟩|s₂m + s₃q⟩`. The conjugate
/// signs fix the phase-state convention of each mode,
/// `|~k⟩ = N^{−1/2} Σ_n e^{i s 2π k n/N} |n⟩`.
#[derive(Clone, Debug)]
pub struct BellBasis {
    pub n: usize,
    pub signs: [Sign; 3],
    pub conjugate_signs: [Sign; 2],
    states: Vec<PureState>,
}

impl BellBasis {
    pub fn new(n: usize, signs: [Sign; 3], conjugate_signs: [Sign; 2]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("Bell basis needs N >= 2, got {n}")));
        }
        let [s1, s2, s3] = signs.map(Sign::value);
        let mut states = Vec::with_capacity(n * n);
        for p in 1..=n as i64 {
            for q in 1..=n as i64 {
                let mut v = Array1::from_elem(n * n, ZERO);
                for m in 1..=n as i64 {
                    let second = mod1(s2 * m + s3 * q, n);
                    let phase = 2.0 * PI * (s1 * m * p) as f64 / n as f64;
                    v[(m as usize - 1) * n + second - 1] = C64::from_polar((n as f64).sqrt().recip(), phase);
                }
                states.push(PureState::new(vec![n, n], v)?);
            }
        }
        Ok(BellBasis { n, signs, conjugate_signs, states })
    }

    /// The standard basis: all signs positive.
    pub fn standard(n: usize) -> Result<Self> {
        BellBasis::new(n, [Sign::Plus; 3], [Sign::Plus; 2])
    }

    /// `p, q ∈ 1..=N`.
    pub fn state(&self, p: usize, q: usize) -> &PureState {
        &self.states[(p - 1) * self.n + (q - 1)]
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.states.iter().enumerate() {
            for (k, b) in self.states.iter().enumerate() {
                let g = linalg::inner(a.amplitudes.view(), b.amplitudes.view());
                let want = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// Phase state `|~k⟩` of `mode` (0 or 1) under its conjugate sign.
    pub fn phase_vector(&self, mode: usize, k: i64) -> Array1<C64> {
        let s = self.conjugate_signs[mode].value();
        let n = self.n as f64;
        Array1::from_iter(
            (1..=self.n as i64).map(|m| C64::from_polar(n.sqrt().recip(), 2.0 * PI * (s * k * m) as f64 / n)),
        )
    }

    /// `Σ_k k |~k⟩⟨~k|` on `mode`.
    pub fn phase_operator(&self, mode: usize) -> Array2<C64> {
        let cols: Vec<Array1<C64>> = (1..=self.n as i64).map(|k| self.phase_vector(mode, k)).collect();
        let b = Array2::from_shape_fn((self.n, self.n), |(r, c)| cols[c][r]);
        let d: Vec<C64> = (1..=self.n).map(|k| C64::new(k as f64, 0.0)).collect();
        linalg::spectral_apply(&b, &d)
    }

    /// Largest `1 − |overlap|` between each Bell state and
    /// `e^{−i s₅ s₂ (2π/N) n̂⊗θ̂} |~(s₄ s₁ p)⟩|s₃ q⟩`, where `n̂ = diag(1..N)`
    /// acts on the first mode and `θ̂` on the second.
    pub fn factorization_residual(&self) -> Result<f64> {
        let n = self.n;
        let [s1, s2, s3] = self.signs.map(Sign::value);
        let s4 = self.conjugate_signs[0].value();
        let s5 = self.conjugate_signs[1].value();
        let number = Array2::from_shape_fn((n, n), |(r, c)| if r == c { C64::new((r + 1) as f64, 0.0) } else { ZERO });
        let gen = linalg::kron(&number, &self.phase_operator(1));
        let u = linalg::expm_i(&gen, -((s5 * s2) as f64) * 2.0 * PI / n as f64)?;
        let mut worst: f64 = 0.0;
        for p in 1..=n {
            for q in 1..=n {
                let first = self.phase_vector(0, s4 * s1 * p as i64);
                let mut second = Array1::from_elem(n, ZERO);
                second[mod1(s3 * q as i64, n) - 1] = C64::new(1.0, 0.0);
                let rhs = u.dot(&linalg::kron_vec(&first, &second));
                let ov = linalg::inner(self.state(p, q).amplitudes.view(), rhs.view());
                worst = worst.max((1.0 - ov.norm()).abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub max_deviation: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(max_deviation: f64) -> Self {
        CheckReport { max_deviation, passed: max_deviation < IDENTITY_TOL }
    }
}

fn check_spin(spin: Spin) -> Result<()> {
    if spin.twice() == 0 {
        return Err(Error::InvalidSpin("0".into()));
    }
    if spin.twice() > PERFECT_MAX_TWICE_J {
        let n = spin.dim();
        return Err(Error::SizeCapExceeded { what: "perfect-protocol dimension N^4", size: n.pow(4), cap: 41usize.pow(4) });
    }
    Ok(())
}

/// Compares the Bell states, mapped onto spin systems through
/// `|m⟩ ≡ |j, m−j−1⟩_y` (first mode) and `|m⟩ ≡ |~j, m−j−1⟩_z` (second mode),
/// with `e^{±i(2π/N) J_y J_z} |~j p⟩_y |~j q⟩_z`.
///
/// `Plus` uses the `|m + q⟩` Bell form. `Minus` uses `|q − m⟩` with the
/// negative exponent; its phase labels shift to `(p, q−1)` for integer `j`
/// and `(p−1, q−1)` for half-odd-integer `j`.
pub fn bell_factorization_check(spin: Spin, sign: Sign) -> Result<CheckReport> {
    check_spin(spin)?;
    let n = spin.dim();
    let bell = BellBasis::new(n, [Sign::Plus, sign, Sign::Plus], [Sign::Plus; 2])?;
    let map = linalg::kron(&spin::spin_basis(spin, Axis::Y), &spin::phase_basis(spin, Axis::Z));
    let angle = sign.value() as f64 * 2.0 * PI / n as f64;
    let u = TwoModeUnitary::ising(spin, Axis::Y, Axis::Z, angle).to_dense();
    let mut worst: f64 = 0.0;
    for p in 1..=n {
        for q in 1..=n {
            let (lp, lq) = match (sign, spin.is_integer()) {
                (Sign::Plus, _) => (p as f64, q as f64),
                (Sign::Minus, true) => (p as f64, q as f64 - 1.0),
                (Sign::Minus, false) => (p as f64 - 1.0, q as f64 - 1.0),
            };
            let lhs = map.dot(&bell.state(p, q).amplitudes);
            let rhs = u.dot(&linalg::kron_vec(
                &spin::phase_vector(spin, Axis::Y, lp),
                &spin::phase_vector(spin, Axis::Z, lq),
            ));
            let ov = linalg::inner(lhs.view(), rhs.view());
            worst = worst.max((1.0 - ov.norm()).abs());
        }
    }
    Ok(CheckReport::new(worst))
}

/// Checks that every standard Bell state is an eigenvector of
/// `D = Σ mod(n−m) P_m ⊗ P_n` with eigenvalue `q` and of
/// `S = Σ mod(a+b) |~a~b⟩⟨~a~b|` with eigenvalue `p`.
pub fn mod_n_equivalence_check(n: usize) -> Result<CheckReport> {
    let bell = BellBasis::standard(n)?;
    let mut d = Array2::from_elem((n * n, n * n), ZERO);
    for m in 1..=n {
        for k in 1..=n {
            let i = (m - 1) * n + (k - 1);
            d[[i, i]] = C64::new(mod1(k as i64 - m as i64, n) as f64, 0.0);
        }
    }
    let phases: Vec<Array1<C64>> = (1..=n as i64).map(|k| bell.phase_vector(0, k)).collect();
    let mut cols = Array2::from_elem((n * n, n * n), ZERO);
    let mut vals = Vec::with_capacity(n * n);
    for a in 1..=n {
        for b in 1..=n {
            let c = (a - 1) * n + (b - 1);
            cols.column_mut(c).assign(&linalg::kron_vec(&phases[a - 1], &phases[b - 1]));
            vals.push(C64::new(mod1((a + b) as i64, n) as f64, 0.0));
        }
    }
    let s = linalg::spectral_apply(&cols, &vals);
    let mut worst: f64 = 0.0;
    for p in 1..=n {
        for q in 1..=n {
            let v = &bell.state(p, q).amplitudes;
            let rd = d.dot(v) - v.mapv(|x| x * q as f64);
            let rs = s.dot(v) - v.mapv(|x| x * p as f64);
            worst = worst.max(linalg::norm(rd.view())).max(linalg::norm(rs.view()));
        }
    }
    Ok(CheckReport::new(worst))
}

/// `mod_n_equivalence_check` at `N = 2j + 1`.
pub fn appendix_c_equivalence(spin: Spin) -> Result<CheckReport> {
    check_spin(spin)?;
    mod_n_equivalence_check(spin.dim())
}

#[derive(Clone, Debug)]
pub struct CorrectionEntry {
    /// Phase-state labels of the `θ_y` and `θ_z` outcomes.
    pub p: f64,
    pub q: f64,
    pub indices: (usize, usize),
    pub unitary: Array2<C64>,
    /// Bob's unnormalized conditional map, input → output.
    pub branch_map: Array2<C64>,
}

#[derive(Clone, Debug)]
pub struct CorrectionTable {
    pub spin: Spin,
    pub entries: Vec<CorrectionEntry>,
    /// Worst distance of a normalized branch map from unitarity.
    pub max_unitarity_deviation: f64,
}

impl CorrectionTable {
    pub fn entry(&self, indices: (usize, usize)) -> &CorrectionEntry {
        &self.entries[indices.0 * self.spin.dim() + indices.1]
    }
}

/// Branch maps of the exact protocol, ordered by (p index, q index).
pub fn perfect_branch_maps(spin: Spin) -> Result<Vec<(f64, f64, (usize, usize), Array2<C64>)>> {
    check_spin(spin)?;
    let resource = maximally_entangled_state(spin);
    let u = TwoModeUnitary::ising(spin, Axis::Y, Axis::Z, 2.0 * PI / spin.dim() as f64);
    let by = MeasurementBasis::phase(spin, Axis::Y);
    let bz = MeasurementBasis::phase(spin, Axis::Z);
    Ok(kraus_branches(&resource, &u, &by, &bz)?
        .into_iter()
        .map(|k| (k.a, k.b, k.indices, k.operator))
        .collect())
}

/// Inverse of a map proportional to a unitary, with the phase fixed so the
/// determinant is 1. Returns the inverse and the unitarity deviation.
fn normalized_inverse(map: &Array2<C64>) -> Result<(Array2<C64>, f64)> {
    let n = map.nrows();
    let scale = (linalg::frobenius(map).powi(2) / n as f64).sqrt();
    if scale == 0.0 {
        return Err(Error::NonUnitaryMap(f64::INFINITY));
    }
    let k = map.mapv(|x| x / scale);
    let dev = linalg::unitarity_deviation(&k);
    let inv = linalg::dagger(&k);
    let det = linalg::determinant(&inv)?;
    let fix = C64::from_polar(1.0, -det.arg() / n as f64);
    Ok((inv.mapv(|x| x * fix), dev))
}

/// Corrections obtained by sending each spin-basis input through the exact
/// protocol: column `k` of the branch map is Bob's conditional output for
/// `|k⟩_z`.
pub fn derive_correction(spin: Spin) -> Result<CorrectionTable> {
    let maps = perfect_branch_maps(spin)?;
    build_table(spin, maps)
}

fn build_table(spin: Spin, maps: Vec<(f64, f64, (usize, usize), Array2<C64>)>) -> Result<CorrectionTable> {
    let built: Vec<(CorrectionEntry, f64)> = maps
        .into_par_iter()
        .map(|(p, q, indices, map)| {
            let (unitary, dev) = normalized_inverse(&map)?;
            Ok((CorrectionEntry { p, q, indices, unitary, branch_map: map }, dev))
        })
        .collect::<Result<_>>()?;
    let max_dev = built.iter().map(|b| b.1).fold(0.0, f64::max);
    if max_dev > UNITARY_TOL {
        return Err(Error::NonUnitaryMap(max_dev));
    }
    Ok(CorrectionTable { spin, entries: built.into_iter().map(|b| b.0).collect(), max_unitarity_deviation: max_dev })
}

/// Same table, reconstructing each branch map from arbitrary inputs by least
/// squares, `Ξ Ψ† (Ψ Ψ†)⁻¹`, where `Ψ` holds the inputs and `Ξ` Bob's
/// unnormalized outputs as columns. Needs inputs spanning the space.
pub fn derive_correction_from_inputs(spin: Spin, inputs: &[PureState]) -> Result<CorrectionTable> {
    let n = spin.dim();
    if inputs.iter().any(|s| s.dims != [n]) {
        return Err(Error::DimensionMismatch { expected: n, found: inputs.iter().map(|s| s.dim()).find(|&d| d != n).unwrap_or(0) });
    }
    let psi = Array2::from_shape_fn((n, inputs.len()), |(r, c)| inputs[c].amplitudes[r]);
    let gram_inv = linalg::inverse(&psi.dot(&linalg::dagger(&psi)))?;
    let right = linalg::dagger(&psi).dot(&gram_inv);
    let maps = perfect_branch_maps(spin)?
        .into_iter()
        .map(|(p, q, idx, k)| {
            // the protocol is only observed through its outputs
            let xi = k.dot(&psi);
            (p, q, idx, xi.dot(&right))
        })
        .collect();
    build_table(spin, maps)
}

/// Runs the exact protocol on `input` and applies the derived corrections.
/// Outcome labels are the measured phase labels.
pub fn perfect_teleport(input: &PureState, spin: Spin) -> Result<Vec<TeleportOutcome>> {
    perfect_teleport_with(input, &derive_correction(spin)?)
}

pub fn perfect_teleport_with(input: &PureState, table: &CorrectionTable) -> Result<Vec<TeleportOutcome>> {
    let n = table.spin.dim();
    if input.dims != [n] {
        return Err(Error::DimensionMismatch { expected: n, found: input.dim() });
    }
    table
        .entries
        .iter()
        .map(|e| {
            let raw = e.branch_map.dot(&input.amplitudes);
            let p = linalg::norm(raw.view()).powi(2);
            let out = e.unitary.dot(&raw) / C64::new(p.sqrt(), 0.0);
            Ok(TeleportOutcome {
                a: e.p,
                b: e.q,
                probability: p,
                output_state: PureState { dims: vec![n], amplitudes: out, basis: input.basis.clone() },
            })
        })
        .collect()
}
