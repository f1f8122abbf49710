//! CSV and JSON writers for snapshots and the total-variation log, plus a
//! snapshot reader for round-trip checks. Floats are written with 17
//! significant digits so read-back is exact.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use wbeuler::glimm::{Snapshot, TvLog};

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Snapshot CSV: comment lines carrying the time and discontinuity
/// positions, then the fixed header and rows.
pub fn snapshot_csv(snap: &Snapshot) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# t = {}", fmt_f(snap.t));
    let discs: Vec<String> = snap.discontinuities.iter().map(|d| fmt_f(*d)).collect();
    let _ = writeln!(s, "# discontinuities = {}", discs.join(" "));
    let _ = writeln!(s, "r,rho,v,w,z");
    for row in &snap.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_f(row[0]),
            fmt_f(row[1]),
            fmt_f(row[2]),
            fmt_f(row[3]),
            fmt_f(row[4])
        );
    }
    s
}

/// Snapshot JSON with the same content as the CSV form.
pub fn snapshot_json(snap: &Snapshot) -> String {
    let mut s = String::new();
    let _ = write!(s, "{{\n  \"t\": {},\n  \"discontinuities\": [", fmt_f(snap.t));
    for (i, d) in snap.discontinuities.iter().enumerate() {
        if i > 0 {
            let _ = write!(s, ", ");
        }
        let _ = write!(s, "{}", fmt_f(*d));
    }
    let _ = write!(s, "],\n  \"columns\": [\"r\", \"rho\", \"v\", \"w\", \"z\"],\n  \"rows\": [");
    for (i, row) in snap.rows.iter().enumerate() {
        let _ = write!(s, "{}", if i > 0 { ",\n    " } else { "\n    " });
        let _ = write!(
            s,
            "[{}, {}, {}, {}, {}]",
            fmt_f(row[0]),
            fmt_f(row[1]),
            fmt_f(row[2]),
            fmt_f(row[3]),
            fmt_f(row[4])
        );
    }
    let _ = writeln!(s, "\n  ]\n}}");
    s
}

/// Parses a snapshot back from its CSV form.
pub fn read_snapshot_csv(text: &str) -> io::Result<Snapshot> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut t = None;
    let mut discontinuities = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# t =") {
            t = Some(rest.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("# discontinuities =") {
            for x in rest.split_whitespace() {
                discontinuities.push(x.parse::<f64>().map_err(|e| bad(e.to_string()))?);
            }
            continue;
        }
        if line.starts_with('#') || line.starts_with('r') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<io::Result<_>>()?;
        if nums.len() != 5 {
            return Err(bad(format!("expected 5 columns, got {}", nums.len())));
        }
        rows.push([nums[0], nums[1], nums[2], nums[3], nums[4]]);
    }
    Ok(Snapshot {
        t: t.ok_or_else(|| bad("missing `# t =` line".into()))?,
        rows,
        discontinuities,
    })
}

/// TV-log CSV with the fixed column order n, t, dt, tv_lnrho, tv_v.
pub fn tv_log_csv(log: &TvLog) -> String {
    let mut s = String::from("n,t,dt,tv_lnrho,tv_v\n");
    for e in &log.entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            e.n,
            fmt_f(e.t),
            fmt_f(e.dt),
            fmt_f(e.tv_ln_rho),
            fmt_f(e.tv_v)
        );
    }
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)
}
