//! One line per acceptance criterion; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use opdyn::fock::check_car;
use opdyn::gksl::{
    build_initial_density, build_lindblads, find_asymptote, integrate, mean_values, sweep, ChannelKind, ChannelSpec,
    GkslIntegrator, InitialStateKind, LindbladSet, Observable, SweepParam, DEFAULT_EPS, DEFAULT_T_CAP,
};
use opdyn::heisenberg::{evolve_means, propagator};
use opdyn::hrho::{run_hrho, HrhoSchedule, Rule, RuleSpec, OMEGA_MIN};
use opdyn::oracle::{brute_force_gksl_grid, brute_force_heisenberg, OracleReport};
use opdyn::{build_v_matrix, presets, run_heisenberg, Family, MeanState, NetworkSpec, Trajectory};
use opdyn_cli::PresetName;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn max_diff(a: &MeanState, b: &MeanState) -> f64 {
    a.flat().iter().zip(b.flat()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn car_suite() -> Outcome {
    let start = Instant::now();
    for modes in 1..=4 {
        let r = check_car(modes).map_err(|e| e.to_string())?;
        check(r.max_deviation() == 0.0, || format!("M={modes}: deviation {}", r.max_deviation()))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("M=1..4 exact, {:?}", start.elapsed()))
}

fn random_spec(rng: &mut ChaCha8Rng, agents: usize) -> NetworkSpec {
    let mut s = NetworkSpec::uniform(agents, 1.0);
    for w in s.omega_f.iter_mut().chain(s.omega_g.iter_mut()) {
        *w = rng.random_range(0.2..2.0);
    }
    for l in s.lambda.iter_mut() {
        *l = rng.random_range(0.0..1.0);
    }
    for family in [Family::Fake, Family::Good] {
        for a in 1..=agents {
            for b in a + 1..=agents {
                s.set_link(family, a, b, rng.random_range(0.0..1.0));
            }
        }
    }
    s
}

fn heisenberg_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut report = OracleReport::default();
    for case in 0..20 {
        let agents = 2 + case % 2;
        let spec = random_spec(&mut rng, agents);
        let n: Vec<u8> = (0..agents).map(|_| rng.random_range(0..2)).collect();
        let m: Vec<u8> = (0..agents).map(|_| rng.random_range(0..2)).collect();
        let init = MeanState::new(n.iter().map(|&b| b as f64).collect(), m.iter().map(|&b| b as f64).collect())
            .map_err(|e| e.to_string())?;
        let v = build_v_matrix(&spec);
        for t in [0.5, 1.0, 5.0] {
            let closed = evolve_means(&propagator(&v, t).map_err(|e| e.to_string())?, &init).map_err(|e| e.to_string())?;
            let brute = brute_force_heisenberg(&spec, &n, &m, t).map_err(|e| e.to_string())?;
            report.compare(&brute, &closed);
        }
    }
    check(report.max_abs_error <= 1e-8, || format!("max error {:e}", report.max_abs_error))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("max error {:.2e} over {} values", report.max_abs_error, report.compared_observables))
}

fn three_layer(rule: Rule) -> Result<Trajectory, String> {
    let spec = presets::three_layer_network();
    let init = presets::three_layer_init();
    let rs = RuleSpec {
        rule,
        kappa: presets::rule_weights(),
        tau: presets::THREE_LAYER_TAU,
    };
    let sched = HrhoSchedule {
        t_max: presets::THREE_LAYER_T_MAX,
        dt_out: presets::THREE_LAYER_DT_OUT,
    };
    Ok(run_hrho(&spec, &rs, &sched, &init).map_err(|e| e.to_string())?.trajectory)
}

fn conservation_and_bounds() -> Outcome {
    let traj = run_heisenberg(
        &presets::three_layer_network(),
        &presets::three_layer_init(),
        presets::THREE_LAYER_T_MAX,
        presets::THREE_LAYER_DT_OUT,
    )
    .map_err(|e| e.to_string())?;
    let drift = traj.states.iter().map(|s| (s.total() - 1.0).abs()).fold(0.0, f64::max);
    check(drift <= 1e-9, || format!("total drifts by {drift:e}"))?;
    let (lo, hi) = traj
        .states
        .iter()
        .flat_map(|s| s.flat())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    check(lo >= -1e-9 && hi <= 1.0 + 1e-9, || format!("means span [{lo}, {hi}]"))?;
    let late: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= 50.0 - 1e-9)
        .map(|(_, s)| s.f[5])
        .collect();
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    let std = (late.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / late.len() as f64).sqrt();
    check(std > 0.01, || format!("std(F6) on [50,100] = {std}"))?;
    Ok(format!("drift {drift:.1e}, range [{lo:.3}, {hi:.3}], std(F6) {std:.4}"))
}

fn hrho_reduction() -> Outcome {
    let spec = presets::three_layer_network();
    let init = presets::three_layer_init();
    let sched = HrhoSchedule {
        t_max: presets::THREE_LAYER_T_MAX,
        dt_out: presets::THREE_LAYER_DT_OUT,
    };
    let plain = run_heisenberg(&spec, &init, sched.t_max, sched.dt_out).map_err(|e| e.to_string())?;
    let reductions = [
        RuleSpec {
            rule: Rule::None,
            kappa: presets::rule_weights(),
            tau: 1.0,
        },
        RuleSpec {
            rule: Rule::One,
            kappa: vec![0.0; 6],
            tau: 1.0,
        },
    ];
    let mut worst: f64 = 0.0;
    for rs in &reductions {
        let run = run_hrho(&spec, rs, &sched, &init).map_err(|e| e.to_string())?;
        check(run.trajectory.times == plain.times, || "time grids differ".into())?;
        for (a, b) in run.trajectory.states.iter().zip(&plain.states) {
            worst = worst.max(max_diff(a, b));
        }
    }
    check(worst <= 1e-10, || format!("reduction differs by {worst:e}"))?;
    let mut min_omega = f64::INFINITY;
    for rule in Rule::all().into_iter().skip(1) {
        let rs = RuleSpec {
            rule,
            kappa: presets::rule_weights(),
            tau: 1.0,
        };
        let run = run_hrho(&spec, &rs, &sched, &init).map_err(|e| e.to_string())?;
        for pair in run.windows.windows(2) {
            check(pair[0].end_state == pair[1].start_state, || format!("rule {}: gluing jump", rule.id()))?;
        }
        for w in &run.windows {
            let idx = (w.end_time / sched.dt_out).round() as usize;
            check(run.trajectory.states[idx] == w.end_state, || {
                format!("rule {}: boundary sample differs from window end", rule.id())
            })?;
            min_omega = w.omega_f.iter().chain(&w.omega_g).copied().fold(min_omega, f64::min);
        }
    }
    check(min_omega >= OMEGA_MIN, || format!("omega fell to {min_omega}"))?;
    Ok(format!("reduction error {worst:.1e}, gluing exact, min omega {min_omega:.3e}"))
}

fn hrho_signs() -> Outcome {
    let sign = |rule: Rule| -> Result<f64, String> {
        let last = three_layer(rule)?.last().cloned().ok_or("empty trajectory")?;
        Ok((last.g[5] - last.f[5]).signum())
    };
    let reference = sign(Rule::None)?;
    let mut notes = vec![format!("no rule {reference:+}")];
    let mut failures = vec![];
    for (rule, same) in [(Rule::One, false), (Rule::Three, true), (Rule::Four, true), (Rule::Six, true)] {
        let s = sign(rule)?;
        notes.push(format!("rule {} {s:+}", rule.id()));
        if (s == reference) != same {
            failures.push(format!("rule {} expected {}", rule.id(), if same { "same sign" } else { "flip" }));
        }
    }
    let detail = notes.join(", ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join(", ")))
    }
}

fn two_agent_sets() -> Vec<LindbladSet> {
    use ChannelKind::*;
    let transfers = vec![
        ChannelSpec::new(TransferGood { src: 1, dst: 2 }, 0.5),
        ChannelSpec::new(TransferFake { src: 1, dst: 2 }, 0.8),
    ];
    let mut switch = transfers.clone();
    switch.push(ChannelSpec::new(SwitchFakeToGood { agent: 2 }, 0.6));
    let mut pump = switch.clone();
    pump.push(ChannelSpec::new(PumpGood { agent: 1 }, 0.3));
    [transfers, switch, pump]
        .into_iter()
        .map(|c| build_lindblads(2, c).expect("valid channels"))
        .collect()
}

fn gksl_oracle() -> Outcome {
    let start = Instant::now();
    let mut spec = NetworkSpec::uniform(2, 1.0);
    spec.omega_f = vec![0.7, 1.3];
    let inits = [
        MeanState::new(vec![1.0, 0.0], vec![0.0, 0.0]),
        MeanState::new(vec![1.0, 0.0], vec![1.0, 0.0]),
        MeanState::new(vec![0.5, 0.0], vec![0.5, 0.2]),
    ];
    let mut report = OracleReport::default();
    let mut halving: f64 = 0.0;
    for set in two_agent_sets() {
        for init in &inits {
            let init = init.as_ref().map_err(|e| e.to_string())?;
            let rho0 = build_initial_density(init, InitialStateKind::Product).map_err(|e| e.to_string())?;
            let traj = integrate(&rho0, &spec, &set, 6.0, 0.01, 1.0).map_err(|e| e.to_string())?;
            let exact = brute_force_gksl_grid(&rho0.to_dense(), &spec, &set, 1.0, 6).map_err(|e| e.to_string())?;
            for (rho, got) in exact.iter().zip(&traj.states) {
                report.compare(&mean_values(rho), got);
            }
            let half = integrate(&rho0, &spec, &set, 6.0, 0.005, 1.0).map_err(|e| e.to_string())?;
            for (a, b) in traj.states.iter().zip(&half.states) {
                halving = halving.max(max_diff(a, b));
            }
        }
    }
    check(report.max_abs_error <= 1e-6, || format!("oracle error {:e}", report.max_abs_error))?;
    check(halving <= 1e-7, || format!("dt vs dt/2 differ by {halving:e}"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("oracle error {:.1e}, dt/2 agreement {halving:.1e}", report.max_abs_error))
}

fn gksl_invariants() -> Outcome {
    let problem = presets::experiment_one();
    let rho0 = build_initial_density(&problem.init, problem.init_kind).map_err(|e| e.to_string())?;
    let mut integ = GkslIntegrator::new(&rho0, &problem.spec, &problem.channels, problem.dt).map_err(|e| e.to_string())?;
    let per_out = (presets::GKSL_DT_OUT / problem.dt).round() as usize;
    let samples = (presets::GKSL_T_MAX / presets::GKSL_DT_OUT).round() as usize;
    let first = integ.means();
    let (mut trace_err, mut total_err): (f64, f64) = (0.0, 0.0);
    let (mut source, mut sink) = (first.agent_total(1), first.agent_total(6));
    for _ in 0..samples {
        integ.advance(per_out);
        let m = integ.means();
        trace_err = trace_err.max((integ.trace() - 1.0).abs());
        total_err = total_err.max((m.total() - first.total()).abs());
        check(m.agent_total(1) <= source, || format!("F1+G1 rose at t = {}", integ.time()))?;
        check(m.agent_total(6) >= sink, || format!("F6+G6 fell at t = {}", integ.time()))?;
        check(integ.min_population() >= -1e-10, || format!("negative population at t = {}", integ.time()))?;
        source = m.agent_total(1);
        sink = m.agent_total(6);
    }
    check(trace_err <= 1e-8, || format!("trace error {trace_err:e}"))?;
    check(total_err <= 1e-8, || format!("number drift {total_err:e}"))?;
    Ok(format!("trace error {trace_err:.1e}, number drift {total_err:.1e}, monotone source and sink"))
}

fn experiment_one() -> Outcome {
    let start = Instant::now();
    let problem = presets::experiment_one();
    let g6 = Observable::Local(Family::Good, 6);
    let a = find_asymptote(&problem, g6, DEFAULT_EPS, DEFAULT_T_CAP).map_err(|e| e.to_string())?;
    let (g, f) = (a.means.g[5], a.means.f[5]);
    check(a.converged, || "asymptote search did not converge".into())?;
    check(g > f, || format!("G6 = {g} is not above F6 = {f}"))?;
    check((g + f - 1.0).abs() <= 1e-6, || format!("G6 + F6 = {}", g + f))?;
    let curve = sweep(
        &problem,
        SweepParam::ChannelStrength(presets::SWITCH_GOOD_CHANNEL),
        &presets::EXP1_SWEEP_VALUES,
        g6,
        DEFAULT_EPS,
        DEFAULT_T_CAP,
    )
    .map_err(|e| e.to_string())?;
    for pair in curve.windows(2) {
        check(pair[1].asymptote.value >= pair[0].asymptote.value - 1e-9, || {
            format!("curve decreases between p = {} and p = {}", pair[0].value, pair[1].value)
        })?;
    }
    let last = curve.last().ok_or("empty sweep")?;
    check(last.value == 50.0, || "sweep does not end at 50".into())?;
    let sat = last.asymptote.value;
    check((sat - 0.624).abs() <= 0.005, || format!("value at p = 50 is {sat}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("G6 {g:.4}, F6 {f:.4}, sum-1 {:.1e}, saturation {sat:.4}", g + f - 1.0))
}

fn experiment_two() -> Outcome {
    let problem = presets::experiment_two();
    check(problem.init.f[0] == 0.8 && problem.init.g[0] == 0.2, || "wrong source".into())?;
    let a = find_asymptote(&problem, Observable::Local(Family::Good, 6), DEFAULT_EPS, DEFAULT_T_CAP)
        .map_err(|e| e.to_string())?;
    let (g, f) = (a.means.g[5], a.means.f[5]);
    check(g > f, || format!("G6 = {g}, F6 = {f}"))?;
    Ok(format!("G6 {g:.4} > F6 {f:.4}"))
}

fn experiment_three() -> Outcome {
    let run = |pump: f64| {
        presets::experiment_three(pump)
            .trajectory(presets::PUMP_T_MAX, presets::PUMP_DT_OUT)
            .map_err(|e| e.to_string())
    };
    let crossing = |traj: &Trajectory| {
        traj.times
            .iter()
            .zip(&traj.states)
            .find(|(_, s)| s.g[5] >= 0.95)
            .map(|(t, _)| *t)
    };
    let slow = run(0.1)?;
    let fast = run(0.5)?;
    let end = slow.last().ok_or("empty trajectory")?;
    check(end.g[0] >= 0.99 && end.g[5] >= 0.99, || {
        format!("at the horizon G1 = {}, G6 = {}", end.g[0], end.g[5])
    })?;
    let (ts, tf) = (crossing(&slow).ok_or("pump 0.1 never reaches 0.95")?, crossing(&fast).ok_or("pump 0.5 never reaches 0.95")?);
    check(tf < ts, || format!("crossing at {tf} (0.5) vs {ts} (0.1)"))?;
    Ok(format!("G1 {:.4}, G6 {:.4} at t = {}; 0.95 reached at t = {tf} vs {ts}", end.g[0], end.g[5], presets::PUMP_T_MAX))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_opdyn");
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let names: Vec<String> = PresetName::ALL.iter().map(|p| p.name()).collect();
    for dir in &dirs {
        for name in &names {
            let status = Command::new(bin)
                .args(["preset", "--name", name, "--out-dir"])
                .arg(dir.path())
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), || {
                format!("preset {name} failed: {}", String::from_utf8_lossy(&status.stderr))
            })?;
        }
    }
    let read = |dir: &Path, name: &str| std::fs::read(dir.join(format!("{name}.csv"))).map_err(|e| e.to_string());
    for name in &names {
        check(read(dirs[0].path(), name)? == read(dirs[1].path(), name)?, || format!("{name}.csv differs"))?;
    }
    Ok(format!("{} presets byte-identical", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("CAR suite", car_suite),
        ("Heisenberg oracle equivalence", heisenberg_oracle),
        ("Conservation and bounds, three-layer preset", conservation_and_bounds),
        ("hrho reduction, gluing and inertia floor", hrho_reduction),
        ("hrho late-time sign of G6 - F6", hrho_signs),
        ("GKSL integrator vs oracle", gksl_oracle),
        ("GKSL structural invariants, Experiment I", gksl_invariants),
        ("Experiment I quantitative", experiment_one),
        ("Experiment II", experiment_two),
        ("Experiment III", experiment_three),
        ("Determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
