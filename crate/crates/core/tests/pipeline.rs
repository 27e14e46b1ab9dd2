use std::fs;

use graphscape::graph::read_graph;
use graphscape::pipeline::{
    execute, run, ExperimentConfig, Stages, CURVES_FILE, ENSEMBLE_FILE, GRAPH_FILE, MANIFEST_FILE, OVERLAY_FILE,
    PLOT_FILE, REPORT_FILE,
};
use graphscape::Error;
use sha2::{Digest, Sha256};

const SMALL: &str = r#"
name = "small"
seed = 11
realizations = 3
boundary = "Dirichlet"
graph = { kind = "band", d = 1, w = 2, extent = 90, norm = "L1" }
region = { kind = "box", lo = -80, hi = 79 }
disorder = { mu = { kind = "Uniform01" }, v = { kind = "Uniform", c = 2.0 } }
energy = { min = 0.01, max = 10.0, points = 25 }
radius = { kind = "InvSqrt" }
overlay = [{ c1 = 1.0, c2 = 0.5 }, { c1 = 2.0, c2 = 0.25 }]
"#;

fn small() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(SMALL).unwrap()
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn bundle_is_complete_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&small(), dir.path(), Stages::ALL).unwrap();
    assert!(res.all_checks_pass(), "{:?}", res.checks);
    for f in [CURVES_FILE, ENSEMBLE_FILE, OVERLAY_FILE, REPORT_FILE, MANIFEST_FILE, GRAPH_FILE, PLOT_FILE] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }

    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], small().hash());
    assert_eq!(manifest["checks_passed"], true);
    for entry in manifest["files"].as_array().unwrap() {
        let name = entry["path"].as_str().unwrap();
        let bytes = fs::read(dir.path().join(name)).unwrap();
        assert_eq!(entry["sha256"], hex(&bytes), "{name}");
    }

    // 3 realizations × 2 kinds × 25 energies, plus the header
    let curves = fs::read_to_string(dir.path().join(CURVES_FILE)).unwrap();
    assert_eq!(curves.lines().count(), 1 + 3 * 2 * 25);
    let overlay = fs::read_to_string(dir.path().join(OVERLAY_FILE)).unwrap();
    assert_eq!(overlay.lines().count(), 1 + 2 * 25);

    let g = read_graph(std::io::BufReader::new(fs::File::open(dir.path().join(GRAPH_FILE)).unwrap())).unwrap();
    assert_eq!(g.vertex_count(), res.region.graph().vertex_count());
    assert_eq!(g.edge_count(), res.region.graph().edge_count());
}

#[test]
fn seed_changes_curves_and_repeats_do_not() {
    let a = execute(&small(), None, Stages::ALL).unwrap();
    let b = execute(&small(), None, Stages::ALL).unwrap();
    let mut other = small();
    other.seed += 1;
    let c = execute(&other, None, Stages::ALL).unwrap();
    assert_eq!(a.ids_mean.as_ref().unwrap().values, b.ids_mean.as_ref().unwrap().values);
    assert_eq!(a.nu_mean.as_ref().unwrap().values, b.nu_mean.as_ref().unwrap().values);
    assert_ne!(a.ids_mean.unwrap().values, c.ids_mean.unwrap().values);
}

#[test]
fn single_stage_runs() {
    let ids_only = execute(&small(), None, Stages { ids: true, landscape: false }).unwrap();
    assert!(ids_only.ids_mean.is_some() && ids_only.nu_mean.is_none());
    assert!(ids_only.ensemble_law.is_none() && ids_only.overlays.is_empty());
    let land_only = execute(&small(), None, Stages { ids: false, landscape: true }).unwrap();
    assert!(land_only.ids_mean.is_none() && land_only.nu_mean.is_some());
    assert_eq!(land_only.overlays.len(), 2);
    assert!(land_only.all_checks_pass());
}

#[test]
fn singular_model_reports_its_stage() {
    // Neumann, constant bonds, no potential: H·1 = 0
    let text = SMALL
        .replace("\"Dirichlet\"", "\"Neumann\"")
        .replace("{ kind = \"Uniform01\" }", "{ kind = \"ConstantOne\" }")
        .replace("{ kind = \"Uniform\", c = 2.0 }", "{ kind = \"Zero\" }");
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
    match execute(&cfg, None, Stages::ALL) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, "solve"),
        other => panic!("expected a solve-stage error, got {other:?}"),
    }
}

#[test]
fn bundled_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        cfg.at_paper_scale().unwrap().validate().unwrap();
        n += 1;
    }
    assert_eq!(n, 4);
}
