use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use opdyn::fock::check_car;
use opdyn::gksl::{sweep, Observable, SweepParam};
use opdyn::hrho::run_hrho;
use opdyn::run_heisenberg;

use crate::config::{parse_config, ConfigDocument};
use crate::emit::{sweep_csv, trajectory_csv, write_atomic};
use crate::presets::{CommandKind, PresetName};

/// Command-line values that take precedence over the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub t_max: Option<f64>,
    pub dt_out: Option<f64>,
    pub dt: Option<f64>,
    pub param: Option<String>,
    pub values: Option<Vec<f64>>,
    pub observable: Option<String>,
}

impl Overrides {
    fn apply(&self, doc: &ConfigDocument) -> Result<ConfigDocument> {
        let mut doc = doc.clone();
        if let Some(t) = self.t_max {
            doc.output.t_max = t;
        }
        if let Some(dt) = self.dt_out {
            doc.output.dt_out = dt;
        }
        if let Some(dt) = self.dt {
            match doc.gksl.as_mut() {
                Some(g) => g.dt = dt,
                None => bail!("--dt needs a [gksl] section"),
            }
        }
        doc.validate()?;
        Ok(doc)
    }
}

pub fn load_config(path: &Path) -> Result<ConfigDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// `START:STOP:STEP`, both ends included.
pub fn parse_values(range: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = range
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("`{range}` is not START:STOP:STEP"))?;
    let [start, stop, step] = parts[..] else {
        bail!("`{range}` is not START:STOP:STEP");
    };
    if !(step.is_finite() && step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        bail!("`{range}` needs STEP > 0 and STOP >= START");
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

pub fn heisenberg_csv(doc: &ConfigDocument, ov: &Overrides) -> Result<String> {
    let doc = ov.apply(doc)?;
    let spec = doc.network_spec()?;
    let sched = doc.schedule()?;
    let traj = run_heisenberg(&spec, &doc.initial_means()?, sched.t_max, sched.dt_out)?;
    Ok(trajectory_csv(&traj, spec.agents()))
}

pub fn hrho_csv(doc: &ConfigDocument, ov: &Overrides) -> Result<String> {
    let doc = ov.apply(doc)?;
    let spec = doc.network_spec()?;
    let run = run_hrho(&spec, &doc.rule_spec()?, &doc.schedule()?, &doc.initial_means()?)?;
    Ok(trajectory_csv(&run.trajectory, spec.agents()))
}

pub fn gksl_csv(doc: &ConfigDocument, ov: &Overrides) -> Result<String> {
    let doc = ov.apply(doc)?;
    let problem = doc.gksl_problem()?;
    let sched = doc.schedule()?;
    let traj = problem.trajectory(sched.t_max, sched.dt_out)?;
    Ok(trajectory_csv(&traj, problem.spec.agents()))
}

pub fn sweep_csv_for(doc: &ConfigDocument, ov: &Overrides) -> Result<String> {
    let doc = ov.apply(doc)?;
    let problem = doc.gksl_problem()?;
    let planned = doc.sweep_plan()?;
    let param = match (&ov.param, &planned) {
        (Some(path), _) => SweepParam::parse(path, &problem)?,
        (None, Some((p, _, _))) => *p,
        (None, None) => bail!("no sweep parameter: pass --param or add a [sweep] section"),
    };
    let values = match (&ov.values, &planned) {
        (Some(v), _) => v.clone(),
        (None, Some((_, v, _))) => v.clone(),
        (None, None) => bail!("no sweep values: pass --values or add a [sweep] section"),
    };
    let observable = match (&ov.observable, &planned) {
        (Some(name), _) => Observable::parse(name)?.check(problem.spec.agents())?,
        (None, Some((_, _, o))) => *o,
        (None, None) => Observable::parse("G_6")?.check(problem.spec.agents())?,
    };
    let (eps, t_cap) = doc.asymptote_limits()?;
    let points = sweep(&problem, param, &values, observable, eps, t_cap)?;
    for pt in points.iter().filter(|p| !p.asymptote.converged) {
        log::warn!("sweep point {} did not converge by t = {}", pt.value, pt.asymptote.time);
    }
    Ok(sweep_csv(&points, observable))
}

pub fn run_kind(kind: CommandKind, doc: &ConfigDocument, ov: &Overrides) -> Result<String> {
    match kind {
        CommandKind::Heisenberg => heisenberg_csv(doc, ov),
        CommandKind::Hrho => hrho_csv(doc, ov),
        CommandKind::Gksl => gksl_csv(doc, ov),
        CommandKind::Sweep => sweep_csv_for(doc, ov),
    }
}

pub fn run_to_file(kind: CommandKind, config: &Path, out: &Path, ov: &Overrides) -> Result<()> {
    let doc = load_config(config)?;
    let csv = run_kind(kind, &doc, ov)?;
    write_atomic(out, &csv).with_context(|| format!("writing {}", out.display()))
}

/// Writes `<name>.toml` and `<name>.csv` into `out_dir` and returns their
/// paths.
pub fn run_preset(name: &str, out_dir: &Path, ov: &Overrides) -> Result<(PathBuf, PathBuf)> {
    let Some(preset) = PresetName::parse(name) else {
        let known: Vec<_> = PresetName::ALL.iter().map(|p| p.name()).collect();
        bail!("unknown preset `{name}`, expected one of {}", known.join(", "));
    };
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let doc = preset.document();
    let toml_path = out_dir.join(format!("{name}.toml"));
    let csv_path = out_dir.join(format!("{name}.csv"));
    write_atomic(&toml_path, &doc.to_toml()).with_context(|| format!("writing {}", toml_path.display()))?;
    let csv = run_kind(preset.command(), &doc, ov)?;
    write_atomic(&csv_path, &csv).with_context(|| format!("writing {}", csv_path.display()))?;
    Ok((toml_path, csv_path))
}

/// CAR report for `modes` modes and, when given, the configuration check.
pub fn validate_report(modes: usize, config: Option<&Path>) -> Result<String> {
    let car = check_car(modes)?;
    let mut report = format!(
        "CAR modes={} mixed_deviation={:e} pure_deviation={:e}\n",
        car.modes, car.mixed_deviation, car.pure_deviation
    );
    if car.max_deviation() != 0.0 {
        bail!("{report}anticommutation relations violated");
    }
    if let Some(path) = config {
        load_config(path)?;
        report.push_str(&format!("config {} is valid\n", path.display()));
    }
    Ok(report)
}
