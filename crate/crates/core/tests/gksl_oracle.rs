use nalgebra::DMatrix;
use num_complex::Complex64;
use opdyn::gksl::{
    build_initial_density, build_lindblads, find_asymptote, integrate, jump_drift_probabilities, mean_values,
    ChannelKind, ChannelSpec, DensityState, InitialStateKind, LindbladSet, Observable, DEFAULT_EPS, DEFAULT_T_CAP,
};
use opdyn::oracle::{absorbing_means, brute_force_gksl_grid, OracleReport};
use opdyn::{presets, Family, MeanState, NetworkSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_agent_configs() -> Vec<(&'static str, LindbladSet)> {
    use ChannelKind::*;
    let chain = vec![
        ChannelSpec::new(TransferGood { src: 1, dst: 2 }, 0.5),
        ChannelSpec::new(TransferFake { src: 1, dst: 2 }, 0.8),
    ];
    let mut switch = chain.clone();
    switch.push(ChannelSpec::new(SwitchFakeToGood { agent: 2 }, 0.6));
    let mut pump = switch.clone();
    pump.push(ChannelSpec::new(PumpGood { agent: 1 }, 0.3));
    vec![
        ("transfers", build_lindblads(2, chain).unwrap()),
        ("switch", build_lindblads(2, switch).unwrap()),
        ("pump", build_lindblads(2, pump).unwrap()),
    ]
}

fn spec() -> NetworkSpec {
    let mut s = NetworkSpec::uniform(2, 1.0);
    s.omega_f = vec![0.7, 1.3];
    s.omega_g = vec![1.1, 0.9];
    s
}

fn inits() -> Vec<MeanState> {
    vec![
        MeanState::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap(),
        MeanState::new(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap(),
        MeanState::new(vec![0.5, 0.0], vec![0.5, 0.2]).unwrap(),
    ]
}

fn diff(a: &MeanState, b: &MeanState) -> f64 {
    a.flat().iter().zip(b.flat()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn integrator_matches_superoperator_exponential() {
    let spec = spec();
    let mut report = OracleReport::default();
    for (_, set) in two_agent_configs() {
        for init in inits() {
            for kind in [InitialStateKind::Product, InitialStateKind::SingleExcitation] {
                let Ok(rho0) = build_initial_density(&init, kind) else { continue };
                let traj = integrate(&rho0, &spec, &set, 6.0, 0.01, 1.0).unwrap();
                let exact = brute_force_gksl_grid(&rho0.to_dense(), &spec, &set, 1.0, 6).unwrap();
                assert_eq!(exact.len(), traj.len());
                for (rho, got) in exact.iter().zip(&traj.states) {
                    let m = rho.to_dense();
                    assert!((rho.trace() - 1.0).abs() < 1e-9);
                    assert!((&m - m.adjoint()).iter().all(|z| z.norm() < 1e-9));
                    assert!(min_eigenvalue(&m) >= -1e-8);
                    report.compare(&mean_values(rho), got);
                }
            }
        }
    }
    assert!(report.max_abs_error <= 1e-6, "max error {}", report.max_abs_error);
}

#[test]
fn step_halving_agrees() {
    let spec = spec();
    for (name, set) in two_agent_configs() {
        for init in inits() {
            let rho0 = build_initial_density(&init, InitialStateKind::Product).unwrap();
            let a = integrate(&rho0, &spec, &set, 10.0, 0.02, 0.5).unwrap();
            let b = integrate(&rho0, &spec, &set, 10.0, 0.01, 0.5).unwrap();
            for (x, y) in a.states.iter().zip(&b.states) {
                assert!(diff(x, y) <= 1e-7, "{name}: {}", diff(x, y));
            }
        }
    }
}

#[test]
fn dense_and_population_engines_agree() {
    let spec = spec();
    for (_, set) in two_agent_configs() {
        for init in inits() {
            let rho0 = build_initial_density(&init, InitialStateKind::Product).unwrap();
            let dense = DensityState::Dense(rho0.to_dense());
            let a = integrate(&rho0, &spec, &set, 5.0, 0.01, 0.5).unwrap();
            let b = integrate(&dense, &spec, &set, 5.0, 0.01, 0.5).unwrap();
            for (x, y) in a.states.iter().zip(&b.states) {
                assert!(diff(x, y) <= 1e-8);
            }
        }
    }
}

#[test]
fn coherent_pure_state_stays_positive() {
    // a superposition carries coherences the population engine never sees
    let spec = spec();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut psi: Vec<Complex64> = (0..16)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    let rho0 = DensityState::from_pure(&psi);
    for (_, set) in two_agent_configs() {
        let traj = integrate(&rho0, &spec, &set, 4.0, 0.01, 1.0).unwrap();
        let exact = brute_force_gksl_grid(&rho0.to_dense(), &spec, &set, 1.0, 4).unwrap();
        for (rho, got) in exact.iter().zip(&traj.states) {
            assert!(min_eigenvalue(&rho.to_dense()) >= -1e-8);
            assert!(diff(&mean_values(rho), got) <= 1e-6);
        }
    }
}

#[test]
fn jump_drift_remainder_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, set) in two_agent_configs() {
        let mut psi: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        let coarse = jump_drift_probabilities(&psi, &set, 1e-2).unwrap();
        let fine = jump_drift_probabilities(&psi, &set, 1e-3).unwrap();
        let c_coarse = (coarse.total() - 1.0).abs() / 1e-4;
        let c_fine = (fine.total() - 1.0).abs() / 1e-6;
        assert!(c_coarse > 0.0);
        assert!((c_coarse - c_fine).abs() <= 1e-6 * c_coarse.max(1.0), "{c_coarse} vs {c_fine}");
        for p in std::iter::once(coarse.p_drift).chain(coarse.p_jumps.iter().copied()) {
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn experiment_one_asymptote_matches_absorbing_solve() {
    let problem = presets::experiment_one();
    let p0 = build_initial_density(&problem.init, problem.init_kind).unwrap().populations();
    let exact = absorbing_means(&problem.channels, &p0).unwrap();
    let found = find_asymptote(&problem, Observable::Local(Family::Good, 6), DEFAULT_EPS, DEFAULT_T_CAP).unwrap();
    assert!(found.converged);
    assert!(diff(&exact, &found.means) < 1e-6);
    assert!((exact.g[5] - 0.616).abs() < 5e-4, "{}", exact.g[5]);
    assert!(exact.g[5] > exact.f[5]);
}

#[test]
fn no_good_switch_leaves_good_below_half() {
    let mut problem = presets::experiment_one();
    problem
        .channels
        .set_strength(presets::SWITCH_GOOD_CHANNEL - 1, 0.0)
        .unwrap();
    let p0 = build_initial_density(&problem.init, problem.init_kind).unwrap().populations();
    let exact = absorbing_means(&problem.channels, &p0).unwrap();
    let found = find_asymptote(&problem, Observable::Local(Family::Good, 6), DEFAULT_EPS, DEFAULT_T_CAP).unwrap();
    assert!(exact.g[5] < 0.5);
    assert!((found.value - exact.g[5]).abs() < 1e-6);
}

#[test]
fn experiment_one_structural_invariants() {
    let problem = presets::experiment_one();
    let traj = problem.trajectory(presets::GKSL_T_MAX, presets::GKSL_DT_OUT).unwrap();
    let total0 = traj.states[0].total();
    let mut prev_source = f64::INFINITY;
    let mut prev_sink = f64::NEG_INFINITY;
    for s in &traj.states {
        assert!((s.total() - total0).abs() <= 1e-8);
        assert!(s.flat().iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
        let source = s.agent_total(1);
        let sink = s.agent_total(6);
        assert!(source <= prev_source + 1e-12);
        assert!(sink >= prev_sink - 1e-12);
        prev_source = source;
        prev_sink = sink;
    }
    let last = traj.last().unwrap();
    assert!((last.g[5] + last.f[5] - 1.0).abs() <= 1e-6);
}
