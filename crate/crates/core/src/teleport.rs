//! Approximate teleportation through an Ising interaction.
//!
//! Mode layout: the resource occupies modes 0 (Bob) and 1 (Alice), the input
//! is mode 2. The interaction acts on modes (1, 2); Alice then measures `J_z`
//! on mode 1 (outcome `a`) and `J_y` on mode 2 (outcome `b`), and Bob rotates
//! mode 0.
//!
//! Because everything before Bob's rotation is linear in the input, each
//! outcome pair is described by an `N × N` operator `K_ab` whose column `k`
//! is Bob's unnormalized conditional state for input `|k⟩_z`. A
//! [`TeleportChannel`] stores these together with the per-outcome
//! corrections, which makes repeated fidelity evaluations cheap.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayD, IxDyn};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimize::golden_section_max;
use crate::quadrature::gauss_legendre_on;
use crate::spin::{self, Axis, Generator, Spin};
use crate::squeezed::solve_resource;
use crate::state::{self, MeasurementBasis, PureState, BRANCH_CUTOFF};

/// Largest `2j` for which the dense 16-coefficient interaction is built.
pub const GENERAL16_MAX_TWICE_J: u32 = 7;

#[derive(Clone, Debug, PartialEq)]
pub enum InteractionSpec {
    /// `exp(i J_y J_z / j)`.
    Kp,
    /// `exp(i α J_y J_z)`.
    ScaledAlpha(f64),
    /// `exp(i Σ α_{4r+c+1} A_r ⊗ A_c)` with `A = (J_x, J_y, J_z, I)`.
    General16([f64; 16]),
}

impl InteractionSpec {
    /// Coupling of the `J_y J_z` term for the Ising kinds.
    pub fn alpha(&self, spin: Spin) -> Option<f64> {
        match self {
            InteractionSpec::Kp => Some(1.0 / spin.j()),
            InteractionSpec::ScaledAlpha(a) => Some(*a),
            InteractionSpec::General16(_) => None,
        }
    }

    /// The general form with only the `J_y ⊗ J_z` coefficient set.
    pub fn embed_alpha(alpha: f64) -> Self {
        let mut c = [0.0; 16];
        c[6] = alpha;
        InteractionSpec::General16(c)
    }
}

/// A unitary on an ordered mode pair.
#[derive(Clone, Debug)]
pub enum TwoModeUnitary {
    /// `exp(iα A ⊗ B)` stored through the eigenbases of `A` and `B`.
    Ising { alpha: f64, first: MeasurementBasis, second: MeasurementBasis },
    /// Matrix indexed as `kron(first, second)`.
    Dense(Array2<C64>),
}

impl TwoModeUnitary {
    pub fn ising(spin: Spin, first: Axis, second: Axis, alpha: f64) -> Self {
        TwoModeUnitary::Ising {
            alpha,
            first: MeasurementBasis::spin(spin, first),
            second: MeasurementBasis::spin(spin, second),
        }
    }

    pub fn apply(&self, state: &PureState, modes: (usize, usize)) -> Result<PureState> {
        match self {
            TwoModeUnitary::Ising { alpha, first, second } => {
                state.apply_ising(modes, *alpha, first, second)
            }
            TwoModeUnitary::Dense(u) => state.apply_two_mode(modes, u),
        }
    }

    pub(crate) fn apply_tensor(&self, t: &ArrayD<C64>, modes: (usize, usize)) -> ArrayD<C64> {
        match self {
            TwoModeUnitary::Ising { alpha, first, second } => {
                state::apply_ising_tensor(t, modes, *alpha, first, second)
            }
            TwoModeUnitary::Dense(u) => state::apply_on_axes(t, &[modes.0, modes.1], u),
        }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        match self {
            TwoModeUnitary::Ising { alpha, first, second } => {
                let v = linalg::kron(&first.vectors, &second.vectors);
                let d: Vec<C64> = first
                    .values
                    .iter()
                    .flat_map(|a| second.values.iter().map(move |b| C64::from_polar(1.0, alpha * a * b)))
                    .collect();
                linalg::spectral_apply(&v, &d)
            }
            TwoModeUnitary::Dense(u) => u.clone(),
        }
    }
}

pub fn build_interaction(spec: &InteractionSpec, spin: Spin) -> Result<TwoModeUnitary> {
    match spec {
        InteractionSpec::Kp | InteractionSpec::ScaledAlpha(_) => {
            if spin.twice() == 0 {
                return Err(Error::InvalidSpin("0".into()));
            }
            let alpha = spec.alpha(spin).expect("ising kind");
            if !alpha.is_finite() {
                return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
            }
            Ok(TwoModeUnitary::ising(spin, Axis::Y, Axis::Z, alpha))
        }
        InteractionSpec::General16(c) => {
            if spin.twice() > GENERAL16_MAX_TWICE_J {
                let n = spin.dim();
                return Err(Error::SizeCapExceeded {
                    what: "general interaction dimension N^4",
                    size: n.pow(4),
                    cap: (GENERAL16_MAX_TWICE_J as usize + 1).pow(4),
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("interaction coefficients must be finite".into()));
            }
            Ok(TwoModeUnitary::Dense(linalg::expm_i(&general16_generator(spin, c), 1.0)?))
        }
    }
}

pub fn general16_generator(spin: Spin, c: &[f64; 16]) -> Array2<C64> {
    let ops = [
        spin::spin_matrix(spin, Axis::X),
        spin::spin_matrix(spin, Axis::Y),
        spin::spin_matrix(spin, Axis::Z),
        linalg::identity(spin.dim()),
    ];
    let n2 = spin.dim() * spin.dim();
    let mut g = Array2::zeros((n2, n2));
    for r in 0..4 {
        for col in 0..4 {
            let coef = c[4 * r + col];
            if coef != 0.0 {
                g = g + linalg::kron(&ops[r], &ops[col]).mapv(|v| v * coef);
            }
        }
    }
    g
}

/// One measurement outcome of the linear part of the protocol.
#[derive(Clone, Debug)]
pub struct KrausBranch {
    pub a: f64,
    pub b: f64,
    pub indices: (usize, usize),
    pub operator: Array2<C64>,
}

/// `K_ab[m, k]`: amplitude of Bob's `|m⟩_z` given input `|k⟩_z` and outcomes
/// `(a, b)` from measuring mode 1 in `basis_a` and mode 2 in `basis_b` after
/// `unitary` acts on modes (1, 2). Branches are ordered lexicographically.
pub fn kraus_branches(
    resource: &PureState,
    unitary: &TwoModeUnitary,
    basis_a: &MeasurementBasis,
    basis_b: &MeasurementBasis,
) -> Result<Vec<KrausBranch>> {
    let n = resource.dims.first().copied().unwrap_or(0);
    if resource.dims.len() != 2 || resource.dims[1] != n {
        return Err(Error::InvalidArgument("resource must have two modes of equal dimension".into()));
    }
    if basis_a.dim() != n || basis_b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis_a.dim().max(basis_b.dim()) });
    }
    // T[m0, m1, m2, k] = Φ[m0, m1] δ(m2, k); the last axis carries the input label
    let phi = resource.to_matrix()?;
    let mut t = ArrayD::<C64>::zeros(IxDyn(&[n, n, n, n]));
    for m0 in 0..n {
        for m1 in 0..n {
            let v = phi[[m0, m1]];
            for k in 0..n {
                t[[m0, m1, k, k].as_slice()] = v;
            }
        }
    }
    t = unitary.apply_tensor(&t, (1, 2));
    t = state::apply_on_axes(&t, &[1], &linalg::dagger(&basis_a.vectors));
    t = state::apply_on_axes(&t, &[2], &linalg::dagger(&basis_b.vectors));
    let grouped = state::group_modes(&t, &[1, 2]);
    let mut out = Vec::with_capacity(n * n);
    for ia in 0..n {
        for ib in 0..n {
            let row = grouped.row(ia * n + ib);
            let op = Array2::from_shape_fn((n, n), |(m, k)| row[m * n + k]);
            out.push(KrausBranch { a: basis_a.values[ia], b: basis_b.values[ib], indices: (ia, ib), operator: op });
        }
    }
    Ok(out)
}

/// The measurement bases of the protocol: `J_z` on mode 1, `J_y` on mode 2.
pub fn protocol_bases(spin: Spin) -> (MeasurementBasis, MeasurementBasis) {
    (MeasurementBasis::spin(spin, Axis::Z), MeasurementBasis::spin(spin, Axis::Y))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CorrectionStrategy {
    /// `V(a, b) = exp[i(a J_y − b J_z)/j]`.
    Simple,
    /// Rotate the conditional mean spin of a `|jj⟩_x` input back onto +x.
    OrientationPreserving,
}

impl std::str::FromStr for CorrectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simple" => Ok(CorrectionStrategy::Simple),
            "orient" | "orientation" | "orientation-preserving" => {
                Ok(CorrectionStrategy::OrientationPreserving)
            }
            other => Err(Error::InvalidArgument(format!("unknown strategy '{other}'"))),
        }
    }
}

/// `V(a, b) = exp[i(a J_y − b J_z)/j]`.
pub fn simple_correction(spin: Spin, a: f64, b: f64) -> Array2<C64> {
    let j = spin.j();
    spin::rotation(spin, Generator::new(0.0, a / j, -b / j), 1.0).matrix
}

/// Rotation taking the mean spin of `state` onto the +x axis about an axis in
/// the y-z plane. With means `(x, y, z)` and `ξ = arccos(x/|J|)/√(y²+z²)` the
/// generator is `ξ(−z J_y + y J_z)`, i.e. `V(−jξz, −jξy)`; identity when
/// `√(y²+z²) < 1e-12`.
pub fn orientation_correction(spin: Spin, state: &Array1<C64>) -> Array2<C64> {
    let mean = |axis| {
        let op = spin::spin_matrix(spin, axis);
        linalg::inner(state.view(), op.dot(state).view()).re
    };
    let (x, y, z) = (mean(Axis::X), mean(Axis::Y), mean(Axis::Z));
    let r = y.hypot(z);
    if r < 1e-12 {
        return linalg::identity(spin.dim());
    }
    let len = (x * x + y * y + z * z).sqrt();
    let xi = (x / len).clamp(-1.0, 1.0).acos() / r;
    spin::rotation(spin, Generator::new(0.0, -xi * z, xi * y), 1.0).matrix
}

/// `e^{iπaJ_z} e^{−iπbJ_y}`, the spin-1/2 correction in its printed form.
pub fn printed_pi_correction(spin: Spin, a: f64, b: f64) -> Array2<C64> {
    let rz = spin::rotation(spin, Generator::along(Axis::Z), PI * a).matrix;
    let ry = spin::rotation(spin, Generator::along(Axis::Y), -PI * b).matrix;
    rz.dot(&ry)
}

/// `e^{−iπbJ_z} e^{iπaJ_y}`: the spin-1/2, `α = π` correction that pairs `a`
/// with `J_y` and `b` with `J_z`, as `V(a, b)` does.
pub fn axis_consistent_pi_correction(spin: Spin, a: f64, b: f64) -> Array2<C64> {
    let rz = spin::rotation(spin, Generator::along(Axis::Z), -PI * b).matrix;
    let ry = spin::rotation(spin, Generator::along(Axis::Y), PI * a).matrix;
    rz.dot(&ry)
}

#[derive(Clone, Debug)]
pub struct ChannelBranch {
    pub a: f64,
    pub b: f64,
    pub indices: (usize, usize),
    pub kraus: Array2<C64>,
    pub correction: Array2<C64>,
    /// `correction · kraus`
    pub corrected: Array2<C64>,
}

/// Complete description of one protocol configuration, independent of the
/// input state.
#[derive(Clone, Debug)]
pub struct TeleportChannel {
    pub spin: Spin,
    pub branches: Vec<ChannelBranch>,
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub a: f64,
    pub b: f64,
    pub probability: f64,
    pub output_state: PureState,
}

impl TeleportChannel {
    /// Attaches corrections produced by `correction(a, b, kraus)`.
    pub fn from_kraus<F>(spin: Spin, kraus: Vec<KrausBranch>, mut correction: F) -> Self
    where
        F: FnMut(&KrausBranch) -> Array2<C64>,
    {
        let branches = kraus
            .into_iter()
            .map(|k| {
                let v = correction(&k);
                let corrected = v.dot(&k.operator);
                ChannelBranch { a: k.a, b: k.b, indices: k.indices, kraus: k.operator, correction: v, corrected }
            })
            .collect();
        TeleportChannel { spin, branches }
    }

    /// Unconditional fidelity `Σ_ab |⟨ψ|C_ab|ψ⟩|²` for a normalized input.
    pub fn fidelity(&self, input: &Array1<C64>) -> f64 {
        self.branches
            .iter()
            .map(|br| linalg::inner(input.view(), br.corrected.dot(input).view()).norm_sqr())
            .sum()
    }

    pub fn outcomes(&self, input: &PureState) -> Result<Vec<TeleportOutcome>> {
        let n = self.spin.dim();
        if input.dims != [n] {
            return Err(Error::DimensionMismatch { expected: n, found: input.dim() });
        }
        let mut out = Vec::with_capacity(self.branches.len());
        for br in &self.branches {
            let raw = br.kraus.dot(&input.amplitudes);
            let p = raw.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if p < BRANCH_CUTOFF {
                continue;
            }
            let v = br.corrected.dot(&input.amplitudes) / C64::new(p.sqrt(), 0.0);
            out.push(TeleportOutcome {
                a: br.a,
                b: br.b,
                probability: p,
                output_state: PureState { dims: vec![n], amplitudes: v, basis: input.basis.clone() },
            });
        }
        Ok(out)
    }

    /// `Σ_ab K_ab† K_ab`, the identity for a trace-preserving protocol.
    pub fn completeness(&self) -> Array2<C64> {
        let n = self.spin.dim();
        self.branches
            .iter()
            .fold(Array2::zeros((n, n)), |acc, br| acc + linalg::dagger(&br.kraus).dot(&br.kraus))
    }

    /// Probability-weighted mean of `Var(J_axis)` over Bob's corrected states.
    pub fn output_variance(&self, input: &PureState, axis: Axis) -> Result<f64> {
        output_variance(&self.outcomes(input)?, self.spin, axis)
    }
}

fn check_protocol_inputs(resource: &PureState) -> Result<Spin> {
    let n = resource.dims.first().copied().unwrap_or(0);
    if resource.dims.len() != 2 || resource.dims[1] != n || n < 2 {
        return Err(Error::InvalidArgument("resource must have two modes of equal dimension >= 2".into()));
    }
    Ok(Spin::from_twice(n as u32 - 1))
}

/// Builds the channel for a resource, interaction and correction strategy.
/// Orientation-preserving corrections are computed once per outcome from a
/// `|jj⟩_x` input and reused for every input.
pub fn teleport_channel(
    resource: &PureState,
    interaction: &InteractionSpec,
    strategy: CorrectionStrategy,
) -> Result<TeleportChannel> {
    let spin = check_protocol_inputs(resource)?;
    let u = build_interaction(interaction, spin)?;
    let (ba, bb) = protocol_bases(spin);
    let kraus = kraus_branches(resource, &u, &ba, &bb)?;
    let hw = spin::highest_weight_vector(spin, Axis::X);
    Ok(TeleportChannel::from_kraus(spin, kraus, |k| match strategy {
        CorrectionStrategy::Simple => simple_correction(spin, k.a, k.b),
        CorrectionStrategy::OrientationPreserving => {
            let st = k.operator.dot(&hw);
            let p = linalg::norm(st.view()).powi(2);
            if p < BRANCH_CUTOFF {
                linalg::identity(spin.dim())
            } else {
                orientation_correction(spin, &(st / C64::new(p.sqrt(), 0.0)))
            }
        }
    }))
}

/// Channel with caller-supplied corrections `V(a, b)`.
pub fn teleport_channel_with<F>(
    resource: &PureState,
    interaction: &InteractionSpec,
    correction: F,
) -> Result<TeleportChannel>
where
    F: Fn(f64, f64) -> Array2<C64>,
{
    let spin = check_protocol_inputs(resource)?;
    let u = build_interaction(interaction, spin)?;
    let (ba, bb) = protocol_bases(spin);
    let kraus = kraus_branches(resource, &u, &ba, &bb)?;
    Ok(TeleportChannel::from_kraus(spin, kraus, |k| correction(k.a, k.b)))
}

pub fn teleport(
    input: &PureState,
    resource: &PureState,
    interaction: &InteractionSpec,
    strategy: CorrectionStrategy,
) -> Result<Vec<TeleportOutcome>> {
    let ch = teleport_channel(resource, interaction, strategy)?;
    if input.dims != [ch.spin.dim()] {
        return Err(Error::DimensionMismatch { expected: ch.spin.dim(), found: input.dim() });
    }
    ch.outcomes(input)
}

/// Same protocol simulated on the full three-mode state vector, without the
/// channel decomposition.
pub fn teleport_direct(
    input: &PureState,
    resource: &PureState,
    interaction: &InteractionSpec,
    strategy: CorrectionStrategy,
) -> Result<Vec<TeleportOutcome>> {
    let spin = check_protocol_inputs(resource)?;
    if input.dims != [spin.dim()] {
        return Err(Error::DimensionMismatch { expected: spin.dim(), found: input.dim() });
    }
    let u = build_interaction(interaction, spin)?;
    let (ba, bb) = protocol_bases(spin);
    let run = |inp: &PureState| -> Result<Vec<state::MeasurementBranch>> {
        let joint = u.apply(&resource.tensor(inp), (1, 2))?;
        Ok(state::measure_in_bases(&joint, &[1, 2], &[&ba, &bb]))
    };
    let reference = match strategy {
        CorrectionStrategy::Simple => Vec::new(),
        CorrectionStrategy::OrientationPreserving => run(&spin::highest_weight_state(spin, Axis::X))?,
    };
    let mut out = Vec::new();
    for br in run(input)? {
        let v = match strategy {
            CorrectionStrategy::Simple => simple_correction(spin, br.outcomes[0], br.outcomes[1]),
            CorrectionStrategy::OrientationPreserving => reference
                .iter()
                .find(|r| r.indices == br.indices)
                .and_then(|r| r.post_state.as_ref())
                .map(|s| orientation_correction(spin, &s.amplitudes))
                .unwrap_or_else(|| linalg::identity(spin.dim())),
        };
        let post = br.post_state.expect("mode 0 is unmeasured");
        out.push(TeleportOutcome {
            a: br.outcomes[0],
            b: br.outcomes[1],
            probability: br.probability,
            output_state: post.apply_local(0, &v)?,
        });
    }
    Ok(out)
}

/// `|⟨ψ|ζ_ab⟩|²`.
pub fn fidelity_conditional(input: &PureState, outcome: &TeleportOutcome) -> Result<f64> {
    input.fidelity(&outcome.output_state)
}

/// `Σ_ab P(a,b|ψ) |⟨ψ|ζ_ab⟩|²`.
pub fn fidelity_unconditional(input: &PureState, outcomes: &[TeleportOutcome]) -> Result<f64> {
    outcomes
        .iter()
        .map(|o| Ok(o.probability * fidelity_conditional(input, o)?))
        .sum()
}

pub fn output_variance(outcomes: &[TeleportOutcome], spin: Spin, axis: Axis) -> Result<f64> {
    let op = spin::spin_matrix(spin, axis);
    outcomes
        .iter()
        .map(|o| Ok(o.probability * o.output_state.variance(0, &op)?))
        .sum()
}

/// `σ` for an angular width given in degrees: `(deg · π/180)²`.
pub fn sigma_from_degrees(deg: f64) -> f64 {
    (deg.to_radians()).powi(2)
}

/// Coherent-state ensemble weighted by `e^{−θ²/σ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub sigma: f64,
    pub theta_nodes: usize,
    pub phi_nodes: usize,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec { sigma: sigma_from_degrees(20.0), theta_nodes: 64, phi_nodes: 32 }
    }
}

impl EnsembleSpec {
    pub fn with_sigma(sigma: f64) -> Self {
        EnsembleSpec { sigma, ..Default::default() }
    }

    /// `λ = 2/(σj)`.
    pub fn lambda(&self, spin: Spin) -> f64 {
        2.0 / (self.sigma * spin.j())
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() || self.theta_nodes == 0 || self.phi_nodes == 0 {
            return Err(Error::InvalidArgument(format!("invalid ensemble {self:?}")));
        }
        Ok(())
    }
}

/// Weight-normalized solid-angle average of `f(|θ,φ⟩)` over the ensemble:
/// Gauss-Legendre in θ on `[0, π]`, uniform in φ. Nodes whose weight is below
/// `1e-18` of the peak are skipped (they still enter the normalization).
pub fn ensemble_average<F>(spin: Spin, ens: &EnsembleSpec, f: F) -> Result<f64>
where
    F: Fn(&Array1<C64>) -> f64 + Sync,
{
    ens.validate()?;
    let (thetas, tw) = gauss_legendre_on(ens.theta_nodes, 0.0, PI);
    let phis: Vec<f64> = (0..ens.phi_nodes).map(|k| 2.0 * PI * k as f64 / ens.phi_nodes as f64).collect();
    let hw = spin::highest_weight_vector(spin, Axis::X);
    let rx: Vec<Array2<C64>> = phis
        .iter()
        .map(|&p| spin::rotation(spin, Generator::along(Axis::X), p).matrix)
        .collect();
    let weights: Vec<f64> = thetas
        .iter()
        .zip(&tw)
        .map(|(t, w)| w * t.sin() * (-t * t / ens.sigma).exp())
        .collect();
    let norm: f64 = weights.iter().sum::<f64>() * ens.phi_nodes as f64;
    let peak = weights.iter().cloned().fold(0.0, f64::max);
    let rows: Vec<f64> = thetas
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&t, &w)| {
            if w < peak * 1e-18 {
                return 0.0;
            }
            let base = spin::rotation(spin, Generator::along(Axis::Y), t).apply(&hw);
            let s: f64 = rx.iter().map(|r| f(&r.dot(&base))).sum();
            w * s
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / norm)
}

pub fn average_fidelity(channel: &TeleportChannel, ens: &EnsembleSpec) -> Result<f64> {
    ensemble_average(channel.spin, ens, |psi| channel.fidelity(psi))
}

pub fn average_fidelity_ensemble(
    ens: &EnsembleSpec,
    resource: &PureState,
    interaction: &InteractionSpec,
    strategy: CorrectionStrategy,
) -> Result<f64> {
    average_fidelity(&teleport_channel(resource, interaction, strategy)?, ens)
}

/// `½(σj + 2)/(σj + 1)`.
pub fn classical_bound(sigma: f64, spin: Spin) -> f64 {
    let s = sigma * spin.j();
    0.5 * (s + 2.0) / (s + 1.0)
}

/// Objective maximized by [`optimize_mu`].
#[derive(Clone, Debug, PartialEq)]
pub enum MuObjective {
    /// `F(|jj⟩_x)`.
    CoherentX(CorrectionStrategy),
    Ensemble(CorrectionStrategy, EnsembleSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuOptimum {
    pub mu: f64,
    pub fidelity: f64,
    /// Set when a bracket endpoint scored at least as well as the interior
    /// optimum (the objective may not be unimodal on the bracket).
    pub endpoint_warning: bool,
}

pub const MU_BRACKET: (f64, f64) = (1e-3, 1e3);
pub const MU_ITERATIONS: usize = 40;

/// KP-protocol fidelity for resource parameter `mu`.
pub fn mu_objective(spin: Spin, mu: f64, objective: &MuObjective) -> Result<f64> {
    let r = solve_resource(spin, mu)?;
    match objective {
        MuObjective::CoherentX(s) => {
            let ch = teleport_channel(&r.state, &InteractionSpec::Kp, *s)?;
            Ok(ch.fidelity(&spin::highest_weight_vector(spin, Axis::X)))
        }
        MuObjective::Ensemble(s, ens) => {
            average_fidelity(&teleport_channel(&r.state, &InteractionSpec::Kp, *s)?, ens)
        }
    }
}

/// Golden-section search on `ln μ` over [`MU_BRACKET`].
pub fn optimize_mu(spin: Spin, objective: &MuObjective) -> Result<MuOptimum> {
    optimize_mu_in(spin, objective, MU_BRACKET, MU_ITERATIONS)
}

pub fn optimize_mu_in(
    spin: Spin,
    objective: &MuObjective,
    bracket: (f64, f64),
    iterations: usize,
) -> Result<MuOptimum> {
    if !(bracket.0 > 0.0 && bracket.1 > bracket.0) {
        return Err(Error::InvalidArgument(format!("invalid mu bracket {bracket:?}")));
    }
    let mut err = None;
    let mut eval = |lnmu: f64| match mu_objective(spin, lnmu.exp(), objective) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (la, lb) = (bracket.0.ln(), bracket.1.ln());
    let best = golden_section_max(&mut eval, la, lb, 0.0, iterations);
    let fa = eval(la);
    let fb = eval(lb);
    if let Some(e) = err {
        return Err(e);
    }
    let endpoint_warning = fa >= best.value || fb >= best.value;
    let (x, value) = if fa >= best.value && fa >= fb {
        (la, fa)
    } else if fb > best.value {
        (lb, fb)
    } else {
        (best.x, best.value)
    };
    Ok(MuOptimum { mu: x.exp(), fidelity: value, endpoint_warning })
}

/// Single-mode squeezed state: ground state of `J_axis² − μ_s J_x`.
pub fn squeezed_input(spin: Spin, mu_s: f64, axis: Axis) -> Result<PureState> {
    if !(mu_s >= 0.0) || !mu_s.is_finite() {
        return Err(Error::InvalidArgument(format!("mu_s must be finite and non-negative, got {mu_s}")));
    }
    let (x, a, z) = spin::real_components(spin);
    let sq = match axis {
        Axis::Z => z.dot(&z),
        Axis::Y => -a.dot(&a),
        Axis::X => return Err(Error::InvalidArgument("squeezing axis must be y or z".into())),
    };
    let h = sq - x * mu_s;
    let (_, vecs) = linalg::eigh_real(&h)?;
    let v = vecs.column(0).mapv(|t| C64::new(t, 0.0));
    PureState::from_unnormalized(vec![spin.dim()], v)
}

/// `e^{iθJ_y}|jj⟩_x − e^{−iθJ_y}|jj⟩_x`, normalized.
pub fn superposition_input(spin: Spin, theta: f64) -> Result<PureState> {
    let hw = spin::highest_weight_vector(spin, Axis::X);
    let plus = spin::rotation(spin, Generator::along(Axis::Y), theta).apply(&hw);
    let minus = spin::rotation(spin, Generator::along(Axis::Y), -theta).apply(&hw);
    let v = plus - minus;
    let n = linalg::norm(v.view());
    if n < 1e-13 {
        return Err(Error::DegenerateInput(format!("superposition norm {n:e} at theta = {theta}")));
    }
    PureState::from_unnormalized(vec![spin.dim()], v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_state, seeded_rng};
    use crate::squeezed::maximally_entangled_state;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn s(twice: u32) -> Spin {
        Spin::from_twice(twice)
    }

    #[test]
    fn interaction_anchors() {
        let sp = s(2);
        let zero = build_interaction(&InteractionSpec::ScaledAlpha(0.0), sp).unwrap().to_dense();
        assert!(linalg::frobenius(&(zero - linalg::identity(9))) < 1e-12);
        let kp = build_interaction(&InteractionSpec::Kp, Spin::HALF).unwrap().to_dense();
        let two = build_interaction(&InteractionSpec::ScaledAlpha(2.0), Spin::HALF).unwrap().to_dense();
        assert!(linalg::frobenius(&(kp - two)) < 1e-12);
        for twice in [1, 2, 3] {
            let a = build_interaction(&InteractionSpec::ScaledAlpha(0.83), s(twice)).unwrap().to_dense();
            let g = build_interaction(&InteractionSpec::embed_alpha(0.83), s(twice)).unwrap().to_dense();
            assert!(linalg::frobenius(&(a - g)) < 1e-11);
        }
        assert!(matches!(
            build_interaction(&InteractionSpec::General16([0.1; 16]), s(8)).unwrap_err(),
            Error::SizeCapExceeded { .. }
        ));
        let u = build_interaction(&InteractionSpec::General16([0.3; 16]), s(3)).unwrap().to_dense();
        assert!(linalg::unitarity_deviation(&u) < 1e-12);
    }

    #[test]
    fn channel_is_trace_preserving() {
        for twice in [1, 2, 5] {
            let r = solve_resource(s(twice), 0.7).unwrap();
            let ch = teleport_channel(&r.state, &InteractionSpec::Kp, CorrectionStrategy::Simple).unwrap();
            let c = ch.completeness();
            assert!(linalg::frobenius(&(c - linalg::identity(s(twice).dim()))) < 1e-10);
        }
    }

    #[test]
    fn channel_matches_state_vector_simulation() {
        let sp = s(4);
        let r = solve_resource(sp, 0.5).unwrap();
        let mut rng = seeded_rng(5);
        for strategy in [CorrectionStrategy::Simple, CorrectionStrategy::OrientationPreserving] {
            for interaction in [InteractionSpec::Kp, InteractionSpec::ScaledAlpha(1.3)] {
                let input = haar_state(&[sp.dim()], &mut rng);
                let a = teleport(&input, &r.state, &interaction, strategy).unwrap();
                let b = teleport_direct(&input, &r.state, &interaction, strategy).unwrap();
                assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    assert_eq!((x.a, x.b), (y.a, y.b));
                    assert_abs_diff_eq!(x.probability, y.probability, epsilon = 1e-12);
                    assert_abs_diff_eq!(x.output_state.fidelity(&y.output_state).unwrap(), 1.0, epsilon = 1e-10);
                }
                let fa = fidelity_unconditional(&input, &a).unwrap();
                let fb = fidelity_unconditional(&input, &b).unwrap();
                assert_abs_diff_eq!(fa, fb, epsilon = 1e-12);
                let ch = teleport_channel(&r.state, &interaction, strategy).unwrap();
                assert_abs_diff_eq!(ch.fidelity(&input.amplitudes), fa, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn orientation_correction_centres_coherent_output() {
        let sp = s(6);
        let r = solve_resource(sp, 0.5).unwrap();
        let hw = spin::highest_weight_state(sp, Axis::X);
        let out = teleport(&hw, &r.state, &InteractionSpec::Kp, CorrectionStrategy::OrientationPreserving).unwrap();
        let jy = spin::spin_matrix(sp, Axis::Y);
        let jz = spin::spin_matrix(sp, Axis::Z);
        let jx = spin::spin_matrix(sp, Axis::X);
        for o in &out {
            assert!(o.output_state.expectation(0, &jy).unwrap().re.abs() < 1e-9);
            assert!(o.output_state.expectation(0, &jz).unwrap().re.abs() < 1e-9);
            assert!(o.output_state.expectation(0, &jx).unwrap().re > -1e-9);
        }
    }

    #[test]
    fn orientation_correction_undoes_small_tilt() {
        let sp = s(10);
        let eps = 1e-4;
        let st = spin::rotation(sp, Generator::new(0.0, 0.3, -0.7), eps).apply(&spin::highest_weight_vector(sp, Axis::X));
        let v = orientation_correction(sp, &st);
        let back = v.dot(&st);
        let hw = spin::highest_weight_vector(sp, Axis::X);
        assert!(1.0 - linalg::inner(hw.view(), back.view()).norm() < 1e-12);
    }

    #[test]
    fn spin_half_pi_protocol() {
        let r = maximally_entangled_state(Spin::HALF);
        let good = teleport_channel_with(&r, &InteractionSpec::ScaledAlpha(PI), |a, b| {
            axis_consistent_pi_correction(Spin::HALF, a, b)
        })
        .unwrap();
        let mut rng = seeded_rng(8);
        for _ in 0..10 {
            let input = haar_state(&[2], &mut rng);
            assert_abs_diff_eq!(good.fidelity(&input.amplitudes), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn classical_bound_values() {
        assert_abs_diff_eq!(classical_bound(1.0, s(4)), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(classical_bound(1e9, s(40)), 0.5, epsilon = 1e-9);
        // oracle: σ = 0.349², j = 20 → σj = 2.43602, ½(4.43602/3.43602)
        assert_abs_diff_eq!(classical_bound(0.349f64.powi(2), s(40)), 0.645521, epsilon = 1e-5);
    }

    #[test]
    fn ensemble_limits() {
        let sp = s(6);
        let r = solve_resource(sp, 0.5).unwrap();
        let ch = teleport_channel(&r.state, &InteractionSpec::Kp, CorrectionStrategy::Simple).unwrap();
        let hw = spin::highest_weight_vector(sp, Axis::X);
        let narrow = average_fidelity(&ch, &EnsembleSpec { sigma: 1e-6, theta_nodes: 256, phi_nodes: 32 }).unwrap();
        assert_abs_diff_eq!(narrow, ch.fidelity(&hw), epsilon = 1e-4);
        // constant integrand → 1
        let one = ensemble_average(sp, &EnsembleSpec::default(), |_| 1.0).unwrap();
        assert_abs_diff_eq!(one, 1.0, epsilon = 1e-14);
        assert!(ensemble_average(sp, &EnsembleSpec::with_sigma(0.0), |_| 1.0).is_err());
    }

    #[test]
    fn mu_optimum_is_interior_and_locally_optimal() {
        let sp = s(2);
        let obj = MuObjective::CoherentX(CorrectionStrategy::Simple);
        let opt = optimize_mu(sp, &obj).unwrap();
        assert!(!opt.endpoint_warning);
        assert!(opt.mu > 1e-3 && opt.mu < 1e3);
        // grid oracle
        let grid: Vec<f64> = (0..=120).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 120.0)).collect();
        let best = grid.iter().map(|&m| mu_objective(sp, m, &obj).unwrap()).fold(f64::MIN, f64::max);
        assert!(opt.fidelity >= best - 1e-9);
        assert!(opt.fidelity >= mu_objective(sp, 2.0 * opt.mu, &obj).unwrap());
        assert!(opt.fidelity >= mu_objective(sp, 0.5 * opt.mu, &obj).unwrap());
    }

    #[test]
    fn squeezed_input_properties() {
        let sp = s(2);
        let big = squeezed_input(sp, 1e7, Axis::Y).unwrap();
        let jy = spin::spin_matrix(sp, Axis::Y);
        assert_abs_diff_eq!(big.variance(0, &jy).unwrap(), 0.5, epsilon = 1e-5);
        let small = squeezed_input(sp, 0.2, Axis::Y).unwrap();
        assert!(small.variance(0, &jy).unwrap() < 0.5);
        assert!(small.expectation(0, &jy).unwrap().re.abs() < 1e-12);
        let mut last = f64::INFINITY;
        for mu in [100.0, 10.0, 1.0, 0.1] {
            let v = squeezed_input(s(8), mu, Axis::Z).unwrap().variance(0, &spin::spin_matrix(s(8), Axis::Z)).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(squeezed_input(sp, 1.0, Axis::X).is_err());
    }

    #[test]
    fn superposition_input_properties() {
        let sp = s(5);
        let a = superposition_input(sp, 0.4).unwrap();
        let b = superposition_input(sp, -0.4).unwrap();
        let ov = a.inner(&b).unwrap();
        assert!((ov + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(superposition_input(sp, 0.0).unwrap_err(), Error::DegenerateInput(_)));
        // unnormalized norm² = 2 − 2 Re⟨jj|e^{−2iθJ_y}|jj⟩_x
        let hw = spin::highest_weight_vector(sp, Axis::X);
        let theta = 0.3;
        let raw = spin::rotation(sp, Generator::along(Axis::Y), theta).apply(&hw)
            - spin::rotation(sp, Generator::along(Axis::Y), -theta).apply(&hw);
        let r2 = spin::rotation(sp, Generator::along(Axis::Y), -2.0 * theta).apply(&hw);
        let want = 2.0 - 2.0 * linalg::inner(hw.view(), r2.view()).re;
        assert_abs_diff_eq!(linalg::norm(raw.view()).powi(2), want, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn probabilities_and_fidelities_are_bounded(seed in 0u64..1000, twice in 1u32..6, lmu in -2.0f64..2.0) {
            let sp = s(twice);
            let r = solve_resource(sp, 10f64.powf(lmu)).unwrap();
            let input = haar_state(&[sp.dim()], &mut seeded_rng(seed));
            for strategy in [CorrectionStrategy::Simple, CorrectionStrategy::OrientationPreserving] {
                let out = teleport(&input, &r.state, &InteractionSpec::Kp, strategy).unwrap();
                let total: f64 = out.iter().map(|o| o.probability).sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
                let fs: Vec<f64> = out.iter().map(|o| fidelity_conditional(&input, o).unwrap()).collect();
                for f in &fs {
                    prop_assert!(*f >= -1e-12 && *f <= 1.0 + 1e-12);
                }
                let fu = fidelity_unconditional(&input, &out).unwrap();
                let lo = fs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(fu >= lo - 1e-12 && fu <= hi + 1e-12);
                let mut rev = out.clone();
                rev.reverse();
                prop_assert!((fidelity_unconditional(&input, &rev).unwrap() - fu).abs() < 1e-12);
            }
        }
    }
}
