//! Entanglement swapping: the teleported mode is itself half of a maximally
//! entangled pair, and the figure of merit is the entanglement left between
//! Bob's mode and the untouched partner.
//!
//! Modes: resource on (0, 1), maximally entangled pair on (2, 3), interaction
//! on (1, 2), measurements on 1 and 2. Bob's correction is a local unitary
//! and cannot change the entanglement, so none is applied.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimize::{golden_section_max, nelder_mead, NelderMeadOptions};
use crate::random::seeded_rng;
use crate::spin::Spin;
use crate::squeezed::{maximally_entangled_matrix, solve_resource};
use crate::state::{PureState, BRANCH_CUTOFF};
use crate::teleport::{build_interaction, kraus_branches, protocol_bases, InteractionSpec};

/// Largest `2j` accepted by [`entanglement_swap`].
pub const SWAP_MAX_TWICE_J: u32 = 40;

/// Entropy of the reduced state of a pure two-mode state with coefficient
/// matrix `phi` (rows: first mode), in base-`N` logarithm where `N` is the
/// first-mode dimension. `phi` need not be normalized.
pub fn entanglement_of_matrix(phi: &Array2<C64>) -> Result<f64> {
    let n = phi.nrows();
    if n < 2 {
        return Ok(0.0);
    }
    let rho = phi.dot(&linalg::dagger(phi));
    let tr: f64 = (0..n).map(|i| rho[[i, i]].re).sum();
    if tr <= 0.0 {
        return Err(Error::NotNormalized(tr));
    }
    let e = linalg::eigh(&rho)?;
    let ln_n = (n as f64).ln();
    let s: f64 = e
        .values
        .iter()
        .map(|&l| l / tr)
        .filter(|&l| l >= 1e-14)
        .map(|l| -l * l.ln() / ln_n)
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// `E = −Tr ρ₁ log_N ρ₁` for a two-mode pure state.
pub fn entanglement_of_formation(state: &PureState) -> Result<f64> {
    if state.modes() != 2 || state.dims[0] != state.dims[1] {
        return Err(Error::InvalidArgument("entanglement needs two modes of equal dimension".into()));
    }
    entanglement_of_matrix(&state.to_matrix()?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapBranch {
    pub a: f64,
    pub b: f64,
    pub probability: f64,
    pub entanglement: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapResult {
    pub spin: Spin,
    pub interaction: InteractionSpec,
    pub resource_mu: f64,
    pub per_branch: Vec<SwapBranch>,
    pub average_e: f64,
}

pub fn entanglement_swap(spin: Spin, resource_mu: f64, interaction: &InteractionSpec) -> Result<SwapResult> {
    let resource = solve_resource(spin, resource_mu)?.state;
    let mut r = swap_with_resource(&resource, interaction)?;
    r.resource_mu = resource_mu;
    Ok(r)
}

/// Swap through an arbitrary two-mode resource (`resource_mu` is reported
/// as NaN).
pub fn swap_with_resource(resource: &PureState, interaction: &InteractionSpec) -> Result<SwapResult> {
    let n = resource.dims.first().copied().unwrap_or(0);
    if resource.dims.len() != 2 || resource.dims[1] != n || n < 2 {
        return Err(Error::InvalidArgument("resource must have two modes of equal dimension >= 2".into()));
    }
    let spin = Spin::from_twice(n as u32 - 1);
    if spin.twice() > SWAP_MAX_TWICE_J {
        return Err(Error::SizeCapExceeded { what: "swap dimension N^4", size: n.pow(4), cap: 41usize.pow(4) });
    }
    let u = build_interaction(interaction, spin)?;
    let (ba, bb) = protocol_bases(spin);
    let psi = maximally_entangled_matrix(spin);
    let mut per_branch = Vec::new();
    for k in kraus_branches(resource, &u, &ba, &bb)? {
        let out = k.operator.dot(&psi);
        let p: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        if p < BRANCH_CUTOFF {
            continue;
        }
        per_branch.push(SwapBranch { a: k.a, b: k.b, probability: p, entanglement: entanglement_of_matrix(&out)? });
    }
    let average_e = per_branch.iter().map(|b| b.probability * b.entanglement).sum();
    Ok(SwapResult { spin, interaction: interaction.clone(), resource_mu: f64::NAN, per_branch, average_e })
}

/// Swap objective for a resource solved once and reused across interactions.
pub fn average_entanglement(resource: &PureState, interaction: &InteractionSpec) -> Result<f64> {
    Ok(swap_with_resource(resource, interaction)?.average_e)
}

pub const ALPHA_SCAN_POINTS: usize = 64;
pub const ALPHA_XTOL: f64 = 1e-6;
/// Coarse peaks refined when looking for the global maximum.
const REFINED_PEAKS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaOptimum {
    /// Maximum of the lobe at smallest α.
    pub alpha: f64,
    pub entanglement: f64,
    /// Best maximum found on `(0, 2π]`.
    pub global_alpha: f64,
    pub global_entanglement: f64,
    /// Coarse scan `(α_k, E_k)`, `α_k = 2πk/64`, `k = 1..=64`.
    pub scan: Vec<(f64, f64)>,
}

/// Maximizes the swap entanglement over the scaled-α interaction.
pub fn optimize_alpha(spin: Spin, resource_mu: f64) -> Result<AlphaOptimum> {
    let resource = solve_resource(spin, resource_mu)?.state;
    let eval = |alpha: f64| average_entanglement(&resource, &InteractionSpec::ScaledAlpha(alpha));
    let alphas: Vec<f64> =
        (1..=ALPHA_SCAN_POINTS).map(|k| 2.0 * PI * k as f64 / ALPHA_SCAN_POINTS as f64).collect();
    let values = alphas.par_iter().map(|&a| eval(a)).collect::<Result<Vec<f64>>>()?;
    let scan: Vec<(f64, f64)> = alphas.iter().cloned().zip(values.iter().cloned()).collect();

    let m = values.len();
    let is_peak = |k: usize| {
        let left = if k == 0 { f64::NEG_INFINITY } else { values[k - 1] };
        let right = if k + 1 == m { f64::NEG_INFINITY } else { values[k + 1] };
        values[k] >= left && values[k] >= right
    };
    let peaks: Vec<usize> = (0..m).filter(|&k| is_peak(k)).collect();
    let first = peaks.first().copied().unwrap_or(0);
    let mut ranked = peaks.clone();
    ranked.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    let mut to_refine: Vec<usize> = ranked.into_iter().take(REFINED_PEAKS).collect();
    if !to_refine.contains(&first) {
        to_refine.push(first);
    }

    let step = 2.0 * PI / ALPHA_SCAN_POINTS as f64;
    let refined = to_refine
        .par_iter()
        .map(|&k| -> Result<(usize, f64, f64)> {
            let lo = (alphas[k] - step).max(1e-9);
            let hi = alphas[k] + step;
            let mut err = None;
            let opt = golden_section_max(
                |a| match eval(a) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                hi,
                ALPHA_XTOL,
                200,
            );
            if let Some(e) = err {
                return Err(e);
            }
            // never report worse than the coarse point itself
            if opt.value >= values[k] {
                Ok((k, opt.x, opt.value))
            } else {
                Ok((k, alphas[k], values[k]))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let (_, alpha, entanglement) = *refined.iter().find(|r| r.0 == first).expect("first peak refined");
    let (_, global_alpha, global_entanglement) = refined
        .iter()
        .cloned()
        .fold((0, alpha, entanglement), |best, r| if r.2 > best.2 { r } else { best });
    Ok(AlphaOptimum { alpha, entanglement, global_alpha, global_entanglement, scan })
}

pub const GENERAL_RESTARTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralOptimum {
    pub coefficients: [f64; 16],
    pub entanglement: f64,
    /// Entanglement reached by each restart, seeded restart first.
    pub restarts: Vec<f64>,
}

/// Restarted Nelder-Mead over the 16 interaction coefficients. Restart 0
/// starts from `seed_alpha` in the `J_y ⊗ J_z` slot; the others start
/// uniformly in `[−π, π]¹⁶` from a ChaCha stream keyed by `rng_seed`.
pub fn optimize_general_interaction(
    spin: Spin,
    resource_mu: f64,
    seed_alpha: f64,
    rng_seed: u64,
    opts: &NelderMeadOptions,
) -> Result<GeneralOptimum> {
    let resource = solve_resource(spin, resource_mu)?.state;
    // fail early on the size cap
    build_interaction(&InteractionSpec::General16([0.0; 16]), spin)?;
    let mut rng = seeded_rng(rng_seed);
    let mut starts = vec![{
        let mut c = [0.0; 16];
        c[6] = seed_alpha;
        c
    }];
    for _ in 1..GENERAL_RESTARTS {
        let mut c = [0.0; 16];
        for x in c.iter_mut() {
            *x = rng.random_range(-PI..PI);
        }
        starts.push(c);
    }
    let objective = |x: &[f64]| -> f64 {
        let mut c = [0.0; 16];
        c.copy_from_slice(x);
        average_entanglement(&resource, &InteractionSpec::General16(c)).map_or(f64::INFINITY, |e| -e)
    };
    let runs: Vec<([f64; 16], f64)> = starts
        .par_iter()
        .map(|s| {
            let r = nelder_mead(objective, s, opts);
            let mut c = [0.0; 16];
            c.copy_from_slice(&r.x);
            // the simplex only ever improves on its start, but keep the start if
            // the search wandered into non-finite territory
            let start = -objective(s);
            if -r.value >= start { (c, -r.value) } else { (*s, start) }
        })
        .collect();
    let best = runs
        .iter()
        .cloned()
        .fold(runs[0], |b, r| if r.1 > b.1 { r } else { b });
    Ok(GeneralOptimum { coefficients: best.0, entanglement: best.1, restarts: runs.iter().map(|r| r.1).collect() })
}
