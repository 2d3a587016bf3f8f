//! One function per subcommand, each returning its tables in row order.

use rayon::prelude::*;
use spinport::perfect::{self, Sign};
use spinport::random::{haar_state, seeded_rng};
use spinport::spin::{self, Generator};
use spinport::squeezed;
use spinport::state::PureState;
use spinport::swap;
use spinport::teleport::{self, CorrectionStrategy, EnsembleSpec, InteractionSpec, MuObjective, TeleportChannel};
use spinport::{Axis, Spin};

use crate::config::{Command, InteractionKind, MuSetting, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

type Res<T> = Result<T, CliError>;

/// Tables to write, plus any failed internal checks (reported after the
/// tables are written).
pub struct Output {
    pub tables: Vec<Table>,
    pub failures: Vec<String>,
}

impl From<Table> for Output {
    fn from(t: Table) -> Self {
        Output { tables: vec![t], failures: Vec::new() }
    }
}

pub fn run(cfg: &RunConfig) -> Res<Output> {
    match cfg.command {
        Command::SqueezeCurve => squeeze_curve(cfg).map(|tables| Output { tables, failures: Vec::new() }),
        Command::FidelityVsJ => fidelity_vs_j(cfg).map(Output::from),
        Command::FidelityVsAngle => fidelity_vs_angle(cfg).map(Output::from),
        Command::SqueezeTransfer => squeeze_transfer(cfg).map(Output::from),
        Command::Superposition => superposition(cfg).map(Output::from),
        Command::Entanglement => entanglement(cfg).map(Output::from),
        Command::Perfect => perfect_checks(cfg),
    }
}

fn j_cell(s: Spin) -> Cell {
    Cell::Num(s.j())
}

fn strategy_name(s: CorrectionStrategy) -> &'static str {
    match s {
        CorrectionStrategy::Simple => "simple",
        CorrectionStrategy::OrientationPreserving => "orient",
    }
}

/// Resource parameter for teleportation runs.
fn resource_mu(cfg: &RunConfig, spin: Spin) -> Res<f64> {
    match &cfg.mu {
        MuSetting::Optimal => Ok(teleport::optimize_mu(spin, &MuObjective::CoherentX(CorrectionStrategy::Simple))?.mu),
        MuSetting::Values(v) => Ok(v[0]),
    }
}

fn interaction(cfg: &RunConfig) -> InteractionSpec {
    match (cfg.interaction, cfg.alpha) {
        (InteractionKind::Alpha, Some(a)) => InteractionSpec::ScaledAlpha(a),
        _ => InteractionSpec::Kp,
    }
}

fn ensemble(cfg: &RunConfig) -> EnsembleSpec {
    EnsembleSpec {
        sigma: teleport::sigma_from_degrees(cfg.sigma_deg),
        theta_nodes: cfg.quad_theta,
        phi_nodes: cfg.quad_phi,
    }
}

/// Channels for every requested strategy, in `[simple, orient]` slots.
fn channels(cfg: &RunConfig, resource: &PureState) -> Res<[Option<TeleportChannel>; 2]> {
    let mut out = [None, None];
    for s in cfg.strategies() {
        out[slot(s)] = Some(teleport::teleport_channel(resource, &interaction(cfg), s)?);
    }
    Ok(out)
}

fn slot(s: CorrectionStrategy) -> usize {
    usize::from(s == CorrectionStrategy::OrientationPreserving)
}

fn squeeze_curve(cfg: &RunConfig) -> Res<Vec<Table>> {
    let MuSetting::Values(grid) = &cfg.mu else { unreachable!("validated in config") };
    cfg.spins
        .iter()
        .map(|&s| {
            let mut t = Table::new(vec!["j", "mu", "mean_jx_norm", "v_sigma_norm", "v_sigma_norm_witness"]);
            t.tag = Some(format!("j{}", s.j()));
            for p in squeezed::squeeze_curve(s, grid)? {
                t.push(vec![j_cell(s), p.mu.into(), p.mean_jx_norm.into(), p.v_sigma_norm.into(), p.mean_jx_norm.into()]);
            }
            Ok(t)
        })
        .collect()
}

fn fidelity_vs_j(cfg: &RunConfig) -> Res<Table> {
    let mut t = Table::new(vec![
        "j",
        "F_jjx_simple",
        "F_jjx_orient",
        "Fav_simple",
        "Fav_orient",
        "classical_bound",
        "mu",
    ]);
    let ens = ensemble(cfg);
    for &s in &cfg.spins {
        let mu = resource_mu(cfg, s)?;
        let r = squeezed::solve_resource(s, mu)?;
        let chans = channels(cfg, &r.state)?;
        let hw = spin::highest_weight_vector(s, Axis::X);
        let jjx: Vec<Option<f64>> = chans.iter().map(|c| c.as_ref().map(|c| c.fidelity(&hw))).collect();
        let fav = chans
            .iter()
            .map(|c| c.as_ref().map(|c| teleport::average_fidelity(c, &ens)).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        t.push(vec![
            j_cell(s),
            jjx[0].into(),
            jjx[1].into(),
            fav[0].into(),
            fav[1].into(),
            teleport::classical_bound(ens.sigma, s).into(),
            mu.into(),
        ]);
    }
    Ok(t)
}

fn fidelity_vs_angle(cfg: &RunConfig) -> Res<Table> {
    let mut t = Table::new(vec![
        "j",
        "theta_deg",
        "F_y_simple",
        "F_y_orient",
        "F_z_simple",
        "F_z_orient",
        "F_y_no_entanglement",
        "F_z_no_entanglement",
        "F_always_jjx",
        "mu",
    ]);
    for &s in &cfg.spins {
        let mu = resource_mu(cfg, s)?;
        let r = squeezed::solve_resource(s, mu)?;
        let chans = channels(cfg, &r.state)?;
        let hw = spin::highest_weight_state(s, Axis::X);
        let product = hw.tensor(&hw);
        let unentangled = teleport::teleport_channel(&product, &interaction(cfg), CorrectionStrategy::Simple)?;
        let rows: Vec<Vec<Cell>> = cfg
            .theta_grid_deg()
            .par_iter()
            .map(|&deg| {
                let th = deg.to_radians();
                let input = |axis| spin::rotation(s, Generator::along(axis), th).apply(&hw.amplitudes);
                let (vy, vz) = (input(Axis::Y), input(Axis::Z));
                let f = |c: &Option<TeleportChannel>, v| Cell::from(c.as_ref().map(|c| c.fidelity(v)));
                let always = spinport::linalg::inner(hw.amplitudes.view(), vy.view()).norm_sqr();
                vec![
                    j_cell(s),
                    deg.into(),
                    f(&chans[0], &vy),
                    f(&chans[1], &vy),
                    f(&chans[0], &vz),
                    f(&chans[1], &vz),
                    unentangled.fidelity(&vy).into(),
                    unentangled.fidelity(&vz).into(),
                    always.into(),
                    mu.into(),
                ]
            })
            .collect();
        t.rows.extend(rows);
    }
    Ok(t)
}

/// `10^{k/4}`, `k = −8..=16`.
fn squeezing_grid() -> Vec<f64> {
    (-8..=16).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

fn squeeze_transfer(cfg: &RunConfig) -> Res<Table> {
    let mut t = Table::new(vec![
        "j",
        "axis",
        "strategy",
        "mu_s",
        "input_v",
        "output_v",
        "identity_v",
        "fidelity",
        "mu",
    ]);
    for &s in &cfg.spins {
        let mu = resource_mu(cfg, s)?;
        let r = squeezed::solve_resource(s, mu)?;
        let chans = channels(cfg, &r.state)?;
        let mut inputs: Vec<(Axis, f64, PureState)> = Vec::new();
        for axis in [Axis::Y, Axis::Z] {
            for m in squeezing_grid() {
                inputs.push((axis, m, teleport::squeezed_input(s, m, axis)?));
            }
            inputs.push((axis, f64::INFINITY, spin::highest_weight_state(s, Axis::X)));
        }
        for strategy in cfg.strategies() {
            let ch = chans[slot(strategy)].as_ref().expect("channel built for each strategy");
            let rows = inputs
                .par_iter()
                .map(|(axis, m, input)| {
                    let op = spin::spin_matrix(s, *axis);
                    let vin = input.variance(0, &op)?;
                    let outcomes = ch.outcomes(input)?;
                    let vout = teleport::output_variance(&outcomes, s, *axis)?;
                    let f = teleport::fidelity_unconditional(input, &outcomes)?;
                    Ok(vec![
                        j_cell(s),
                        axis.to_string().into(),
                        strategy_name(strategy).into(),
                        (*m).into(),
                        vin.into(),
                        vout.into(),
                        vin.into(),
                        f.into(),
                        mu.into(),
                    ])
                })
                .collect::<Res<Vec<_>>>()?;
            t.rows.extend(rows);
        }
    }
    Ok(t)
}

fn superposition(cfg: &RunConfig) -> Res<Table> {
    let mut t = Table::new(vec!["sweep", "j", "theta_deg", "F_simple", "F_orient", "mu"]);
    let grid = cfg.theta_grid_deg();
    let mut j_rows = Vec::new();
    for &s in &cfg.spins {
        let mu = resource_mu(cfg, s)?;
        let r = squeezed::solve_resource(s, mu)?;
        let chans = channels(cfg, &r.state)?;
        let rows = grid
            .par_iter()
            .map(|&deg| {
                let v = teleport::superposition_input(s, deg.to_radians())?.amplitudes;
                let f = |c: &Option<TeleportChannel>| Cell::from(c.as_ref().map(|c| c.fidelity(&v)));
                Ok(vec!["theta".into(), j_cell(s), deg.into(), f(&chans[0]), f(&chans[1]), mu.into()])
            })
            .collect::<Res<Vec<Vec<Cell>>>>()?;
        let mut first = rows[0].clone();
        first[0] = "j".into();
        j_rows.push(first);
        t.rows.extend(rows);
    }
    t.rows.extend(j_rows);
    Ok(t)
}

fn entanglement(cfg: &RunConfig) -> Res<Table> {
    let mut t = Table::new(vec![
        "j",
        "E_kp_mu0",
        "E_kp_mustar",
        "mu_star",
        "alpha_star",
        "E_alpha_star",
        "alpha_reference",
        "alpha_global",
        "E_alpha_global",
        "E_general16",
    ]);
    let nm = spinport::optimize::NelderMeadOptions { max_evaluations: cfg.max_evals, ..Default::default() };
    for &s in &cfg.spins {
        let kp0 = swap::entanglement_swap(s, 0.0, &InteractionSpec::Kp)?.average_e;
        let mu = resource_mu(cfg, s)?;
        let kp_star = swap::entanglement_swap(s, mu, &InteractionSpec::Kp)?.average_e;
        let mut row = vec![j_cell(s), kp0.into(), kp_star.into(), mu.into()];
        let reference = std::f64::consts::PI / (s.j() + 0.5);
        if cfg.interaction == InteractionKind::Kp {
            row.extend([Cell::Empty, Cell::Empty, reference.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
        } else {
            let a = swap::optimize_alpha(s, 0.0)?;
            let general = if cfg.interaction == InteractionKind::General16
                && s.twice() <= teleport::GENERAL16_MAX_TWICE_J
            {
                Some(swap::optimize_general_interaction(s, 0.0, a.global_alpha, cfg.seed, &nm)?.entanglement)
            } else {
                None
            };
            row.extend([
                a.alpha.into(),
                a.entanglement.into(),
                reference.into(),
                a.global_alpha.into(),
                a.global_entanglement.into(),
                general.into(),
            ]);
        }
        for c in &row[1..] {
            if let Cell::Num(e) = c {
                if !e.is_finite() {
                    return Err(CliError::Check(format!("non-finite value at j={s}")));
                }
            }
        }
        t.push(row);
    }
    Ok(t)
}

const PERFECT_TOL: f64 = 1e-10;

fn perfect_checks(cfg: &RunConfig) -> Res<Output> {
    let mut t = Table::new(vec![
        "j",
        "N",
        "inputs",
        "min_fidelity",
        "max_probability_deviation",
        "factorization_plus",
        "factorization_minus",
        "appendix_c",
        "status",
    ]);
    let mut rng = seeded_rng(cfg.seed);
    let mut failures = Vec::new();
    for &s in &cfg.spins {
        let n = s.dim();
        let table = perfect::derive_correction(s)?;
        let mut min_f = f64::INFINITY;
        let mut max_dp: f64 = 0.0;
        for _ in 0..cfg.inputs {
            let input = haar_state(&[n], &mut rng);
            for o in perfect::perfect_teleport_with(&input, &table)? {
                min_f = min_f.min(input.fidelity(&o.output_state)?);
                max_dp = max_dp.max((o.probability - 1.0 / (n * n) as f64).abs());
            }
        }
        let plus = perfect::bell_factorization_check(s, Sign::Plus)?;
        let minus = perfect::bell_factorization_check(s, Sign::Minus)?;
        let c = perfect::appendix_c_equivalence(s)?;
        let ok = (1.0 - min_f).abs() < PERFECT_TOL && max_dp < PERFECT_TOL && plus.passed && minus.passed && c.passed;
        if !ok {
            failures.push(s.to_string());
        }
        let verdict = |b: bool| if b { "pass" } else { "fail" };
        t.push(vec![
            j_cell(s),
            (n as f64).into(),
            (cfg.inputs as f64).into(),
            min_f.into(),
            max_dp.into(),
            verdict(plus.passed).into(),
            verdict(minus.passed).into(),
            verdict(c.passed).into(),
            verdict(ok).into(),
        ]);
    }
    eprintln!("perfect: {}/{} spins pass", cfg.spins.len() - failures.len(), cfg.spins.len());
    let failures = failures.into_iter().map(|j| format!("perfect teleportation checks failed at j={j}")).collect();
    Ok(Output { tables: vec![t], failures })
}
