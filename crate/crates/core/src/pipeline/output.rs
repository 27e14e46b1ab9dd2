use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::run::{RunResult, StageTime};
use crate::curve::CountingCurve;
use crate::error::Result;
use crate::graph::{write_graph, Graph};

pub const CURVES_FILE: &str = "curves.csv";
pub const ENSEMBLE_FILE: &str = "ensemble.csv";
pub const OVERLAY_FILE: &str = "overlay.csv";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const GRAPH_FILE: &str = "graph.txt";
pub const PLOT_FILE: &str = "figure.gp";

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write_graph_file(g: &Graph, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(GRAPH_FILE);
    let mut w = BufWriter::new(File::create(&path)?);
    write_graph(g, &mut w)?;
    w.flush()?;
    Ok(path)
}

/// Rows `E,value,kind,realization`.
pub fn write_curves_csv<'a>(path: &Path, curves: impl IntoIterator<Item = (&'a CountingCurve, String)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["E", "value", "kind", "realization"])?;
    for (c, tag) in curves {
        for (e, v) in c.points() {
            w.write_record([e.to_string(), v.to_string(), c.kind.label().to_string(), tag.clone()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn plot_script(name: &str, overlays: usize) -> String {
    let mut s = format!(
        "# {name}: ensemble IDS against the landscape counting function\n\
         set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'E'\n\
         set ylabel 'counting function'\n\
         set key left top\n\
         plot '{ENSEMBLE_FILE}' using ($2 eq 'ids' ? $1 : 1/0):3 with linespoints title 'N(E)', \\\n\
         \x20    '{ENSEMBLE_FILE}' using ($2 eq 'landscape' ? $1 : 1/0):3 with linespoints title 'N_u(E)'"
    );
    for i in 0..overlays {
        s.push_str(&format!(
            ", \\\n     '{OVERLAY_FILE}' using ($4 == {i} ? $1 : 1/0):2 with lines title 'c1 N_u(c2 E) #{i}'"
        ));
    }
    s.push('\n');
    s
}

#[derive(Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

/// Writes curves, ensemble means, overlays, the JSON report, a gnuplot
/// script and the manifest into `dir`. The graph file is written first so it
/// survives a failure further down.
pub fn write_bundle(res: &RunResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![write_graph_file(res.region.graph(), dir)?];

    let mut tagged = Vec::new();
    for r in &res.realizations {
        for c in [&r.ids, &r.nu].into_iter().flatten() {
            tagged.push((c, r.index.to_string()));
        }
    }
    let path = dir.join(CURVES_FILE);
    write_curves_csv(&path, tagged)?;
    written.push(path);

    let path = dir.join(ENSEMBLE_FILE);
    {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["E", "kind", "mean", "std_err"])?;
        for (label, c) in [("ids", &res.ids_mean), ("landscape", &res.nu_mean)] {
            let Some(c) = c else { continue };
            let errs = c.std_err.clone().unwrap_or_else(|| vec![0.0; c.len()]);
            for ((e, v), s) in c.points().zip(errs) {
                w.write_record([e.to_string(), label.to_string(), v.to_string(), s.to_string()])?;
            }
        }
        w.flush()?;
    }
    written.push(path);

    if !res.overlays.is_empty() {
        let path = dir.join(OVERLAY_FILE);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["E", "value", "c1", "c2", "panel"])?;
        for (i, o) in res.overlays.iter().enumerate() {
            for (e, v) in o.curve.points() {
                w.write_record([e.to_string(), v.to_string(), o.c1.to_string(), o.c2.to_string(), i.to_string()])?;
            }
        }
        w.flush()?;
        written.push(path);
    }

    let report = json!({
        "model": res.config.name,
        "config": res.config,
        "region_size": res.region.len(),
        "graph_vertices": res.region.graph().vertex_count(),
        "energies": res.energies,
        "ensemble_law": res.ensemble_law,
        "realization_laws": res.realizations.iter().map(|r| json!({
            "realization": r.index,
            "c_up": r.law.as_ref().and_then(|l| l.c_up),
            "status": r.law.as_ref().map(|l| l.status.clone()),
            "lower": r.law.as_ref().and_then(|l| l.lower.as_ref().map(|w| json!({"c1": w.c1, "c2": w.c2}))),
            "identity_residual": r.identity_residual,
            "landscape_method": r.landscape.as_ref().map(|u| u.method),
        })).collect::<Vec<_>>(),
        "tail_fits": res.tail_fits.iter().map(|(k, f)| json!({"curve": k, "fit": f})).collect::<Vec<_>>(),
        "tail_errors": res.tail_errors.iter().map(|(k, e)| json!({"curve": k, "error": e})).collect::<Vec<_>>(),
        "overlays": res.overlays.iter().map(|o| json!({"c1": o.c1, "c2": o.c2})).collect::<Vec<_>>(),
        "checks": res.checks,
    });
    let path = dir.join(REPORT_FILE);
    fs::write(&path, serde_json::to_string_pretty(&report)?)?;
    written.push(path);

    let path = dir.join(PLOT_FILE);
    fs::write(&path, plot_script(&res.config.name, res.overlays.len()))?;
    written.push(path);

    write_manifest(dir, &res.config.name, &res.config.hash(), &res.times, &written, res.all_checks_pass())?;
    written.push(dir.join(MANIFEST_FILE));
    Ok(written)
}

pub fn write_manifest(
    dir: &Path,
    name: &str,
    config_hash: &str,
    times: &[StageTime],
    files: &[PathBuf],
    checks_passed: bool,
) -> Result<()> {
    let entries = files
        .iter()
        .map(|p| {
            Ok(FileEntry {
                path: p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = json!({
        "name": name,
        "config_hash": config_hash,
        "version": env!("CARGO_PKG_VERSION"),
        "stage_seconds": times,
        "files": entries,
        "checks_passed": checks_passed,
    });
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}
