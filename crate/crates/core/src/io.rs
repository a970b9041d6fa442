//! CSV and JSON output. Numbers use 17 significant digits so doubles
//! round-trip exactly; files are written to a temporary sibling and renamed.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::SweepResult;
use crate::detectors::DetectorTrace;
use crate::dynamics::{RiseEdge, Trajectory};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Lossless decimal form of a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_row(out: &mut String, fields: &[f64]) {
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

/// Columns `t,re_c,im_c,p`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,re_c,im_c,p\n");
    for (i, (c, p)) in traj.c.iter().zip(&traj.p).enumerate() {
        push_row(&mut out, &[traj.time(i), c.re, c.im, *p]);
    }
    out
}

/// Columns `t,y`.
pub fn trace_csv(trace: &DetectorTrace) -> String {
    let mut out = String::from("t,y\n");
    for (i, y) in trace.y.iter().enumerate() {
        push_row(&mut out, &[trace.time(i), *y]);
    }
    out
}

/// Columns `t,c_r,dc_r`.
pub fn rise_csv(edge: &RiseEdge) -> String {
    let mut out = String::from("t,c_r,dc_r\n");
    for (i, (c, d)) in edge.c_r.iter().zip(&edge.dc_r).enumerate() {
        push_row(&mut out, &[edge.t0 + i as f64 * edge.dt, *c, *d]);
    }
    out
}

/// Long format `tau_f,kappa,p_max,t_peak`; failed cells leave the last two empty.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("tau_f,kappa,p_max,t_peak\n");
    for (tau, kappa, p, t) in sweep.long_rows() {
        let _ = write!(out, "{},{}", fmt_f64(tau), fmt_f64(kappa));
        for v in [p, t] {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&fmt_f64(v));
            }
        }
        out.push('\n');
    }
    out
}

/// Shared columns on a common time axis, e.g. several trajectories side by side.
pub fn columns_csv(t0: f64, dt: f64, names: &[&str], columns: &[&[f64]]) -> String {
    assert_eq!(names.len(), columns.len());
    let len = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    let mut out = String::from("t");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let mut row = Vec::with_capacity(columns.len() + 1);
    for i in 0..len {
        row.clear();
        row.push(t0 + i as f64 * dt);
        row.extend(columns.iter().map(|c| c[i]));
        push_row(&mut out, &row);
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// JSON sidecar: `{"version": ..., "generated_unix": ..., "meta": <meta>}`.
pub fn sidecar_json(meta: &impl Serialize) -> String {
    let generated = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let value = serde_json::json!({
        "version": VERSION,
        "generated_unix": generated,
        "meta": meta,
    });
    serde_json::to_string_pretty(&value).expect("metadata serializes") + "\n"
}
