#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(rel: &str) -> PathBuf {
    fixtures().join(rel)
}

pub fn ndr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndr"))
        .args(args)
        .output()
        .expect("the ndr binary runs")
}

/// Runs `ndr --config CONFIG --out OUT <rest...>`.
pub fn run_config(config: &Path, out: &Path, rest: &[&str]) -> Output {
    let mut args = vec![
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(rest);
    ndr(&args)
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// CSV rows keyed by header.
pub fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

/// `metric,value` tables as a map.
pub fn read_metrics(path: &Path) -> BTreeMap<String, String> {
    read_csv(path)
        .into_iter()
        .map(|r| (r["metric"].clone(), r["value"].clone()))
        .collect()
}

/// Every file under `dir` with its bytes, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    if dir.exists() {
        walk(dir, dir, &mut out);
    }
    out
}

/// Wilson score interval, written out independently of the library.
pub fn wilson(count: f64, total: f64, z: f64) -> (f64, f64) {
    let p = count / total;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * total)) / (1.0 + z2 / total);
    let half = z / (1.0 + z2 / total) * (p * (1.0 - p) / total + z2 / (4.0 * total * total)).sqrt();
    (center - half, center + half)
}

pub const Z999: f64 = 3.2905267314919255;

/// The subcommands each config fixture is meant for.
pub fn fixture_commands(config: &Path) -> Vec<&'static str> {
    let text = std::fs::read_to_string(config).unwrap();
    let table: toml::Table = toml::from_str(&text).unwrap();
    let mut cmds = Vec::new();
    if table.contains_key("machine") {
        cmds.push("simulate");
    }
    if table.contains_key("estimate") {
        cmds.push("estimate");
    }
    if table.contains_key("check") {
        cmds.push("check");
    }
    if table.contains_key("mmh") {
        cmds.push("mmh");
    }
    cmds
}
