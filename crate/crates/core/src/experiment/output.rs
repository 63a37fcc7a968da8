//! File layout, CSV writers and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::NetworkReport;
use crate::error::{Error, Result};
use crate::evolution::{RunResult, Variant};
use crate::objectives::ObjectiveVector;

pub(super) fn slug(v: Variant) -> &'static str {
    match v {
        Variant::Evea => "evea",
        Variant::Nsga2 => "nsga2",
        Variant::Nsga2Vc => "nsga2-vc",
        Variant::Nsga2Vm => "nsga2-vm",
    }
}

/// `<kind>/<network>/<algo>/rep-<r>.<ext>`, always with `/` separators.
pub(super) fn cell_path(kind: &str, network: &str, v: Variant, rep: usize, ext: &str) -> String {
    format!("{kind}/{network}/{}/rep-{rep}.{ext}", slug(v))
}

pub(super) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub(super) fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

/// Writes to a sibling temporary file, then renames over `path`, so readers
/// see either the old contents or the complete new ones.
pub(super) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub(super) fn check_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Front-0 of every generation, one row per point, with the generation's
/// hypervolume taken from `trace`. `origin` becomes the leading `#` line.
pub fn front_csv(origin: &str, run: &RunResult, trace: &[(usize, f64)]) -> String {
    let mut s = format!("# {origin}\n");
    s.push_str("generation,influence,cost,time,hv\n");
    for (record, (_, hv)) in run.generations.iter().zip(trace) {
        for p in &record.front {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                record.generation, p.spread, p.cost, p.time, hv
            );
        }
    }
    s
}

pub(super) fn summary_csv(hash: &str, seed: u64, reports: &[NetworkReport]) -> String {
    let mut s = format!("# config_hash={hash} master_seed={seed}\n");
    s.push_str("network,algorithm,runs,hv_mean,hv_std,g90_median\n");
    for r in reports {
        for a in &r.algorithms {
            let g90 = a.median_g90.map(|g| g.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.name,
                a.variant,
                a.hv.len(),
                a.mean,
                a.std,
                g90
            );
        }
    }
    s
}

pub(super) fn wilcoxon_csv(hash: &str, seed: u64, reports: &[NetworkReport]) -> String {
    let mut s = format!("# config_hash={hash} master_seed={seed}\n");
    s.push_str("network,baseline,n,statistic,p_value,method,evea_mean,baseline_mean,significant\n");
    for r in reports {
        for c in &r.comparisons {
            let method = match c.test.method {
                crate::metrics::WilcoxonMethod::Normal => "normal",
                _ => "exact",
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{method},{},{},{}",
                r.name,
                c.baseline,
                c.test.n,
                c.test.statistic,
                c.test.p_value,
                c.evea_mean,
                c.baseline_mean,
                c.test.p_value < super::SIGNIFICANCE
            );
        }
    }
    s
}

pub(super) fn traces_csv(
    hash: &str,
    seed: u64,
    rows: &[(String, Variant, usize, usize, f64)],
) -> String {
    let mut s = format!("# config_hash={hash} master_seed={seed}\n");
    s.push_str("network,algorithm,repetition,generation,hv\n");
    for (net, v, rep, generation, hv) in rows {
        let _ = writeln!(s, "{net},{v},{rep},{generation},{hv}");
    }
    s
}

/// One data row of a front file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontRow {
    pub generation: usize,
    pub objectives: ObjectiveVector,
    pub hv: Option<f64>,
}

/// Reads a front CSV. Besides the files written here, accepts any file with
/// an `influence,cost,time` header (other columns optional, `generation`
/// defaulting to 0). `#` lines are comments.
pub fn read_front_csv(path: impl AsRef<Path>) -> Result<Vec<FrontRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| bad(1, "missing header".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let (Some(ci), Some(cc), Some(ct)) = (find("influence"), find("cost"), find("time")) else {
        return Err(bad(
            hline,
            format!("header must name influence, cost and time: {header:?}"),
        ));
    };
    let (cg, ch) = (find("generation"), find("hv"));

    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(bad(
                lineno,
                format!("expected {} fields, got {}", cols.len(), fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            let v: f64 = fields[i]
                .parse()
                .map_err(|_| bad(lineno, format!("invalid number {:?}", fields[i])))?;
            if !v.is_finite() {
                return Err(bad(lineno, format!("non-finite value {:?}", fields[i])));
            }
            Ok(v)
        };
        let generation = match cg {
            Some(i) => fields[i]
                .parse()
                .map_err(|_| bad(lineno, format!("invalid generation {:?}", fields[i])))?,
            None => 0,
        };
        rows.push(FrontRow {
            generation,
            objectives: ObjectiveVector::new(num(ci)?, num(cc)?, num(ct)?),
            hv: ch.map(num).transpose()?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reader_accepts_minimal_files_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        fs::write(&p, "# note\ninfluence,cost,time\n3,2,1\n5,4,2.5\n").unwrap();
        let rows = read_front_csv(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].objectives, ObjectiveVector::new(5.0, 4.0, 2.5));
        assert_eq!((rows[1].generation, rows[1].hv), (0, None));

        fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(read_front_csv(&p).is_err());
        fs::write(&p, "influence,cost,time\n1,2\n").unwrap();
        assert!(matches!(
            read_front_csv(&p),
            Err(Error::Parse { line: 2, .. })
        ));
        fs::write(&p, "influence,cost,time\n1,x,2\n").unwrap();
        assert!(read_front_csv(&p).is_err());
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b/c.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
