//! Plain-text CSV writers. Floats use `{:.16e}` (17 significant digits), so
//! every value parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::engine::SimulationTrace;
use crate::error::{Error, Result};
use crate::ghz::GhzOutcome;

use super::ncrit::NCritResult;
use super::sweep::SweepResult;

pub const TRACE_HEADER: &str = "t,p1,p2,p3,W";
pub const SWEEP_HEADER: &str = "axis_value,w_zeno,w_no_zeno,w_tunnel";
pub const GHZ_HEADER: &str = "index,re,im,p";
pub const NCRIT_HEADER: &str = "n,w_zeno";

fn float(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String");
}

fn optional(out: &mut String, x: Option<f64>) {
    if let Some(x) = x {
        float(out, x);
    }
}

/// Joins a header and rows with LF; no trailing blank line.
fn document(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    text
}

pub fn trace_csv(trace: &SimulationTrace) -> String {
    let rows = (0..trace.len()).map(|i| {
        let mut row = String::new();
        float(&mut row, trace.times[i]);
        for level in 0..3 {
            row.push(',');
            float(&mut row, trace.populations[i].get(level).copied().unwrap_or(0.0));
        }
        row.push(',');
        float(&mut row, trace.survival[i]);
        row
    });
    document(TRACE_HEADER, rows)
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let rows = result.points.iter().map(|p| {
        let mut row = String::new();
        float(&mut row, p.axis_value);
        for value in [p.record.w_zeno, p.record.w_no_zeno, p.record.w_tunnel] {
            row.push(',');
            optional(&mut row, value);
        }
        row
    });
    document(SWEEP_HEADER, rows)
}

pub fn ghz_csv(outcome: &GhzOutcome) -> String {
    let rows = outcome.state.amplitudes().iter().enumerate().map(|(i, a)| {
        let mut row = format!("{i}");
        for x in [a.re, a.im, a.norm_sqr()] {
            row.push(',');
            float(&mut row, x);
        }
        row
    });
    document(GHZ_HEADER, rows)
}

pub fn ncrit_csv(result: &NCritResult) -> String {
    let rows = result.survival.iter().enumerate().map(|(i, w)| {
        let mut row = format!("{}", i + 1);
        row.push(',');
        float(&mut row, *w);
        row
    });
    document(NCRIT_HEADER, rows)
}

/// Writes `text` to a sibling temp file, then renames it over `path`, so a
/// failed write never leaves a partial file behind.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = temp_sibling(path);
    let written = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(text.as_bytes())?;
        f.sync_all()
    });
    let result = written.and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

pub fn emit_trace_csv(trace: &SimulationTrace, path: &Path) -> Result<()> {
    write_atomic(path, &trace_csv(trace))
}

/// One parsed trace row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub p: [f64; 3],
    pub w: f64,
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(TRACE_HEADER) => {}
        other => {
            return Err(Error::invalid(format!(
                "expected header `{TRACE_HEADER}`, found {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::invalid(format!("row {}: {e}", i + 1)))?;
            match fields[..] {
                [t, p1, p2, p3, w] => Ok(TraceRow { t, p: [p1, p2, p3], w }),
                _ => Err(Error::invalid(format!(
                    "row {}: expected 5 fields, found {}",
                    i + 1,
                    fields.len()
                ))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_tunneling, run_zeno, ZenoSchedule};
    use crate::linalg::QuantumState;
    use crate::models::{build_three_level, build_tunneling, Y_DRIVE_PHASE};

    fn zeno_trace(n: usize) -> SimulationTrace {
        let h = build_three_level(0.05, Y_DRIVE_PHASE, -0.2);
        let psi0 = QuantumState::basis(3, 0).unwrap();
        run_zeno(&h, &psi0, ZenoSchedule::new(n, 0.1).unwrap()).unwrap().0
    }

    #[test]
    fn empty_trace_is_header_only() {
        let text = trace_csv(&SimulationTrace::default());
        assert_eq!(text, "t,p1,p2,p3,W\n");
        assert!(parse_trace_csv(&text).unwrap().is_empty());
    }

    #[test]
    fn three_sample_trace_has_four_lines() {
        let mut trace = zeno_trace(3);
        // drop the t = 0 row to get exactly three samples
        trace.times.remove(0);
        trace.populations.remove(0);
        trace.survival.remove(0);
        trace.leak.remove(0);
        trace.amplitudes.remove(0);
        let text = trace_csv(&trace);
        assert_eq!(text.lines().count(), 4);
        assert!(text.ends_with('\n') && !text.ends_with("\n\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn seventeen_significant_digits() {
        let text = trace_csv(&zeno_trace(2));
        let row = text.lines().nth(2).unwrap();
        for field in row.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let h = build_tunneling(0.05, -0.2, 40.0).unwrap();
        let (trace, _) = run_tunneling(&h, &QuantumState::basis(3, 0).unwrap(), 1.0, 1000).unwrap();
        let rows = parse_trace_csv(&trace_csv(&trace)).unwrap();
        assert_eq!(rows.len(), trace.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.t.to_bits(), trace.times[i].to_bits());
            assert_eq!(row.w.to_bits(), trace.survival[i].to_bits());
            for k in 0..3 {
                assert_eq!(row.p[k].to_bits(), trace.populations[i][k].to_bits());
            }
        }
    }

    #[test]
    fn two_level_pads_p3() {
        let h = crate::models::build_two_level(0.1);
        let psi0 = QuantumState::basis(2, 0).unwrap();
        let (trace, _) = run_zeno(&h, &psi0, ZenoSchedule::new(4, 0.5).unwrap()).unwrap();
        for row in parse_trace_csv(&trace_csv(&trace)).unwrap() {
            assert_eq!(row.p[2], 0.0);
        }
    }

    #[test]
    fn emit_writes_file_and_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let trace = zeno_trace(5);
        emit_trace_csv(&trace, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), trace_csv(&trace));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1, "temp file left behind");

        let bad = dir.path().join("missing").join("trace.csv");
        let err = emit_trace_csv(&trace, &bad).unwrap_err();
        assert!(err.to_string().contains("missing"));
        assert_eq!(err.exit_code(), 3);
    }
}
