//! CSV output, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use opdyn::gksl::{Observable, SweepPoint};
use opdyn::{global_means, Trajectory};

fn num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String");
}

/// `t,F_1..F_N,G_1..G_N,F_mean,G_mean`, one row per sample.
pub fn trajectory_csv(traj: &Trajectory, agents: usize) -> String {
    let mut out = String::from("t");
    for family in ["F", "G"] {
        for a in 1..=agents {
            write!(out, ",{family}_{a}").unwrap();
        }
    }
    out.push_str(",F_mean,G_mean\n");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        num(&mut out, *t);
        let (fm, gm) = global_means(s);
        for x in s.f.iter().chain(&s.g).chain([&fm, &gm]) {
            out.push(',');
            num(&mut out, *x);
        }
        out.push('\n');
    }
    out
}

/// Two columns: the swept value and the observable's asymptote.
pub fn sweep_csv(points: &[SweepPoint], observable: Observable) -> String {
    let mut out = format!("p,{}_asymptotic\n", observable.label());
    for pt in points {
        num(&mut out, pt.value);
        out.push(',');
        num(&mut out, pt.asymptote.value);
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
