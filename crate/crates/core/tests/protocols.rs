//! End-to-end runs of the public API.

use std::f64::consts::PI;

use spinport::perfect;
use spinport::random::{haar_state, seeded_rng};
use spinport::squeezed;
use spinport::swap;
use spinport::teleport::{self, CorrectionStrategy, EnsembleSpec, InteractionSpec, MuObjective};
use spinport::{spin, Axis, Spin};

#[test]
fn entangled_resource_beats_product_resource() {
    let s = Spin::from_twice(4);
    let opt = teleport::optimize_mu(s, &MuObjective::CoherentX(CorrectionStrategy::Simple)).unwrap();
    let good = squeezed::solve_resource(s, opt.mu).unwrap();
    let hw = spin::highest_weight_state(s, Axis::X);
    let product = hw.tensor(&hw);
    let ens = EnsembleSpec { theta_nodes: 32, phi_nodes: 16, ..Default::default() };
    let f_good = teleport::average_fidelity_ensemble(&ens, &good.state, &InteractionSpec::Kp, CorrectionStrategy::Simple).unwrap();
    let f_prod = teleport::average_fidelity_ensemble(&ens, &product, &InteractionSpec::Kp, CorrectionStrategy::Simple).unwrap();
    assert!(f_good > f_prod, "{f_good} vs {f_prod}");
    assert!(f_good > teleport::classical_bound(ens.sigma, s));
}

#[test]
fn outcome_lists_are_complete_for_both_strategies() {
    let s = Spin::from_twice(3);
    let r = squeezed::solve_resource(s, 0.5).unwrap();
    let input = haar_state(&[s.dim()], &mut seeded_rng(1));
    for strategy in [CorrectionStrategy::Simple, CorrectionStrategy::OrientationPreserving] {
        let out = teleport::teleport(&input, &r.state, &InteractionSpec::Kp, strategy).unwrap();
        let p: f64 = out.iter().map(|o| o.probability).sum();
        assert!((p - 1.0).abs() < 1e-10);
        assert!(out.iter().all(|o| (o.output_state.norm() - 1.0).abs() < 1e-12));
    }
}

#[test]
fn swap_prefers_the_maximally_entangled_resource() {
    for twice in [2, 4] {
        let s = Spin::from_twice(twice);
        let mu_star = teleport::optimize_mu(s, &MuObjective::CoherentX(CorrectionStrategy::Simple)).unwrap().mu;
        let e0 = swap::entanglement_swap(s, 0.0, &InteractionSpec::Kp).unwrap().average_e;
        let e1 = swap::entanglement_swap(s, mu_star, &InteractionSpec::Kp).unwrap().average_e;
        assert!(e0 >= e1, "j={s}: {e0} < {e1}");
    }
}

#[test]
fn alpha_optimum_improves_on_kp() {
    for twice in [2, 3] {
        let s = Spin::from_twice(twice);
        let o = swap::optimize_alpha(s, 0.0).unwrap();
        let kp = swap::entanglement_swap(s, 0.0, &InteractionSpec::Kp).unwrap().average_e;
        assert!(o.entanglement > kp);
        assert!((o.alpha - PI / (s.j() + 0.5)).abs() / (PI / (s.j() + 0.5)) < 0.02);
    }
}

#[test]
fn exact_protocol_on_coherent_inputs() {
    let s = Spin::from_twice(5);
    let table = perfect::derive_correction(s).unwrap();
    for (theta, phi) in [(0.0, 0.0), (0.7, 1.1), (2.5, -0.4)] {
        let input = spin::coherent_state(s, theta, phi);
        let out = perfect::perfect_teleport_with(&input, &table).unwrap();
        let f = teleport::fidelity_unconditional(&input, &out).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}
