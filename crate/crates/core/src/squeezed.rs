//! Two-mode spin-squeezed resource states.
//!
//! The resource for parameter `μ` is the ground state of
//! `H(μ) = (J_z⁺)² + (J_y⁻)² − μ J_x⁺`, where `J_k^± = J_k^{(1)} ± J_k^{(2)}`.
//! Writing `J_y = −iA` with `A` real antisymmetric, `(J_y⁻)² = −(A⁻)²` and
//! `H` is real symmetric, so a real eigensolver suffices.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::random::{gaussian_vector, seeded_rng};
use crate::spin::{self, Axis, Spin};
use crate::state::PureState;

/// Default cap on the two-mode dimension `N²`.
pub const DEFAULT_DIM_CAP: usize = 10_000;
/// Ground states whose gap is below this are flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Tolerance for the `χ(1) < 0` entanglement witness.
pub const WITNESS_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SqueezedResource {
    pub spin: Spin,
    pub mu: f64,
    pub state: PureState,
    pub nu: f64,
    pub vz_plus: f64,
    pub vy_minus: f64,
    pub mean_jx_plus: f64,
    pub mean_jz_plus: f64,
    pub mean_jy_minus: f64,
    /// Gap between the two lowest eigenvalues of `H(μ)`.
    pub ground_gap: f64,
    pub degenerate: bool,
}

impl SqueezedResource {
    /// `V_Σ = V_z⁺ + V_y⁻`.
    pub fn v_sigma(&self) -> f64 {
        self.vz_plus + self.vy_minus
    }

    pub fn chi(&self, mu: f64) -> f64 {
        self.v_sigma() - mu * self.mean_jx_plus
    }
}

fn kron_real(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Real symmetric matrix of `H(μ)` on the two-mode z basis.
pub fn resource_hamiltonian(spin: Spin, mu: f64) -> Array2<f64> {
    let (x, a, _) = spin::real_components(spin);
    let n = spin.dim();
    let id = Array2::eye(n);
    let a2 = a.dot(&a);
    let mut h = kron_real(&a2, &id) + kron_real(&id, &a2) - kron_real(&a, &a) * 2.0;
    h.mapv_inplace(|v| -v);
    h = h - (kron_real(&x, &id) + kron_real(&id, &x)) * mu;
    let ms = spin.m_values();
    for i in 0..n {
        for k in 0..n {
            let s = ms[i] + ms[k];
            h[[i * n + k, i * n + k]] += s * s;
        }
    }
    h
}

pub fn solve_resource(spin: Spin, mu: f64) -> Result<SqueezedResource> {
    solve_resource_capped(spin, mu, DEFAULT_DIM_CAP)
}

pub fn solve_resource_capped(spin: Spin, mu: f64, cap: usize) -> Result<SqueezedResource> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidArgument(format!("mu must be finite and non-negative, got {mu}")));
    }
    let n = spin.dim();
    if n * n > cap {
        return Err(Error::SizeCapExceeded { what: "two-mode dimension", size: n * n, cap });
    }
    let h = resource_hamiltonian(spin, mu);
    let (values, vectors) = linalg::eigh_real(&h)?;
    let ground_gap = if values.len() > 1 { values[1] - values[0] } else { f64::INFINITY };
    let amps = vectors.column(0).mapv(|v| C64::new(v, 0.0));
    let state = PureState::from_unnormalized(vec![n, n], amps)?;
    let m = moments(&state, spin)?;
    Ok(SqueezedResource {
        spin,
        mu,
        state,
        nu: values[0],
        vz_plus: m.vz_plus,
        vy_minus: m.vy_minus,
        mean_jx_plus: m.mean_jx_plus,
        mean_jz_plus: m.mean_jz_plus,
        mean_jy_minus: m.mean_jy_minus,
        ground_gap,
        degenerate: ground_gap < DEGENERACY_GAP,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TwoModeMoments {
    pub mean_jz_plus: f64,
    pub vz_plus: f64,
    pub mean_jy_minus: f64,
    pub vy_minus: f64,
    pub mean_jx_plus: f64,
}

/// Mean and variance of `J^{(1)} + sign·J^{(2)}`.
fn combined(state: &PureState, op: &Array2<C64>, sign: f64) -> Result<(f64, f64)> {
    let a = state.apply_local(0, op)?.amplitudes;
    let b = state.apply_local(1, op)?.amplitudes;
    let v = a + b * C64::new(sign, 0.0);
    let mean = linalg::inner(state.amplitudes.view(), v.view()).re;
    let second = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    Ok((mean, (second - mean * mean).max(0.0)))
}

pub fn moments(state: &PureState, spin: Spin) -> Result<TwoModeMoments> {
    let n = spin.dim();
    if state.dims != [n, n] {
        return Err(Error::DimensionMismatch { expected: n * n, found: state.dim() });
    }
    let (mean_jz_plus, vz_plus) = combined(state, &spin::spin_matrix(spin, Axis::Z), 1.0)?;
    let (mean_jy_minus, vy_minus) = combined(state, &spin::spin_matrix(spin, Axis::Y), -1.0)?;
    let (mean_jx_plus, _) = combined(state, &spin::spin_matrix(spin, Axis::X), 1.0)?;
    Ok(TwoModeMoments { mean_jz_plus, vz_plus, mean_jy_minus, vy_minus, mean_jx_plus })
}

fn spin_of(state: &PureState) -> Result<Spin> {
    if state.dims.len() != 2 || state.dims[0] != state.dims[1] || state.dims[0] == 0 {
        return Err(Error::InvalidArgument("expected two modes of equal dimension".into()));
    }
    Ok(Spin::from_twice(state.dims[0] as u32 - 1))
}

/// `χ(μ) = V_z⁺ + V_y⁻ − μ⟨J_x⁺⟩`, with true variances.
pub fn chi(state: &PureState, mu: f64) -> Result<f64> {
    let m = moments(state, spin_of(state)?)?;
    Ok(m.vz_plus + m.vy_minus - mu * m.mean_jx_plus)
}

/// `χ(1) < 0` certifies entanglement; `false` is inconclusive.
pub fn is_witnessed_entangled(state: &PureState) -> Result<bool> {
    Ok(chi(state, 1.0)? < -WITNESS_TOL)
}

/// `N^{-1/2} Σ_m |jm⟩_y |jm⟩_y`, the `μ = 0` resource.
pub fn maximally_entangled_matrix(spin: Spin) -> Array2<C64> {
    let by = spin::spin_basis(spin, Axis::Y);
    let s = (spin.dim() as f64).sqrt().recip();
    by.dot(&by.t()).mapv(|v| v * s)
}

pub fn maximally_entangled_state(spin: Spin) -> PureState {
    PureState::from_matrix(&maximally_entangled_matrix(spin)).expect("normalized by construction")
}

#[derive(Clone, Debug)]
pub struct DirectOptions {
    pub max_iterations: usize,
    /// Largest `2j` accepted.
    pub max_twice_j: u32,
    /// Stop once the projected gradient norm falls below this.
    pub gradient_tol: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions { max_iterations: 500, max_twice_j: 10, gradient_tol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct DirectMinimum {
    pub state: PureState,
    pub chi: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `χ(μ)` over normalized two-mode states by projected gradient
/// descent from `seeds` random complex Gaussian starts; returns the best run.
/// `converged` is false if that run hit the iteration cap.
pub fn minimize_chi_direct(
    spin: Spin,
    mu: f64,
    seeds: usize,
    rng_seed: u64,
    opts: &DirectOptions,
) -> Result<DirectMinimum> {
    if spin.twice() > opts.max_twice_j {
        return Err(Error::SizeCapExceeded {
            what: "direct minimization 2j",
            size: spin.twice() as usize,
            cap: opts.max_twice_j as usize,
        });
    }
    if seeds == 0 {
        return Err(Error::InvalidArgument("seeds must be positive".into()));
    }
    let n = spin.dim();
    let id = linalg::identity(n);
    let plus = |op: &Array2<C64>, sign: f64| {
        linalg::kron(op, &id) + linalg::kron(&id, op).mapv(|v| v * sign)
    };
    let zp = plus(&spin::spin_matrix(spin, Axis::Z), 1.0);
    let ym = plus(&spin::spin_matrix(spin, Axis::Y), -1.0);
    let xp = plus(&spin::spin_matrix(spin, Axis::X), 1.0);
    let quad = zp.dot(&zp) + ym.dot(&ym) - xp.mapv(|v| v * mu);

    let mut rng = seeded_rng(rng_seed);
    let starts: Vec<Array1<C64>> = (0..seeds).map(|_| gaussian_vector(n * n, &mut rng)).collect();
    let runs: Vec<(Array1<C64>, f64, usize, bool)> = starts
        .into_par_iter()
        .map(|v0| descend(v0, &quad, &zp, &ym, opts))
        .collect();
    let (v, chi_val, iterations, converged) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("seeds > 0");
    Ok(DirectMinimum {
        state: PureState::from_unnormalized(vec![n, n], v)?,
        chi: chi_val,
        iterations,
        converged,
    })
}

/// `χ = ⟨Q⟩ − ⟨Z⟩² − ⟨Y⟩²` with `Q = Z² + Y² − μX`, and its Wirtinger
/// gradient `(Q − 2⟨Z⟩Z − 2⟨Y⟩Y)ψ`.
fn chi_and_gradient(
    v: &Array1<C64>,
    quad: &Array2<C64>,
    z: &Array2<C64>,
    y: &Array2<C64>,
) -> (f64, Array1<C64>) {
    let qv = quad.dot(v);
    let zv = z.dot(v);
    let yv = y.dot(v);
    let ez = linalg::inner(v.view(), zv.view()).re;
    let ey = linalg::inner(v.view(), yv.view()).re;
    let eq = linalg::inner(v.view(), qv.view()).re;
    let g = qv - zv * C64::new(2.0 * ez, 0.0) - yv * C64::new(2.0 * ey, 0.0);
    (eq - ez * ez - ey * ey, g)
}

fn descend(
    v0: Array1<C64>,
    quad: &Array2<C64>,
    z: &Array2<C64>,
    y: &Array2<C64>,
    opts: &DirectOptions,
) -> (Array1<C64>, f64, usize, bool) {
    let normalize = |v: Array1<C64>| {
        let n = linalg::norm(v.view());
        v / C64::new(n, 0.0)
    };
    let mut v = normalize(v0);
    let (mut f, mut g) = chi_and_gradient(&v, quad, z, y);
    let mut step = 0.05;
    for it in 0..opts.max_iterations {
        let overlap = linalg::inner(v.view(), g.view());
        let tangent = &g - &(v.clone() * overlap);
        let gnorm = linalg::norm(tangent.view());
        if gnorm < opts.gradient_tol {
            return (v, f, it, true);
        }
        loop {
            let trial = normalize(&v - &(tangent.clone() * C64::new(step, 0.0)));
            let (ft, gt) = chi_and_gradient(&trial, quad, z, y);
            if ft < f {
                v = trial;
                f = ft;
                g = gt;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                return (v, f, it, true);
            }
        }
    }
    (v, f, opts.max_iterations, false)
}

/// One row of the squeeze curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub mu: f64,
    /// `⟨J_x⁺⟩ / 2j`
    pub mean_jx_norm: f64,
    /// `V_Σ / 2j`
    pub v_sigma_norm: f64,
    /// `χ(1)` of the point's state.
    pub chi1: f64,
}

/// `μ = 0` followed by 60 log-spaced points on `[1e-3, 1e3]`.
pub fn default_mu_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend((0..60).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 59.0)));
    g
}

pub fn squeeze_curve(spin: Spin, mu_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if mu_grid.is_empty() {
        return Err(Error::InvalidArgument("empty mu grid".into()));
    }
    if spin.twice() == 0 {
        return Err(Error::InvalidSpin("0".into()));
    }
    let two_j = spin.twice() as f64;
    mu_grid
        .par_iter()
        .map(|&mu| {
            let r = solve_resource(spin, mu)?;
            Ok(CurvePoint {
                mu,
                mean_jx_norm: r.mean_jx_plus / two_j,
                v_sigma_norm: r.v_sigma() / two_j,
                chi1: r.chi(1.0),
            })
        })
        .collect()
}
