mod common;

use std::collections::BTreeMap;

use common::*;
use ndr_core::ptm::{machines, toy_universal, MachineFile};
use tempfile::tempdir;

fn write_config(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn zero_noise_summary_is_mistake_free() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/a-zero-noise.toml"), tmp.path(), &["simulate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_metrics(&tmp.path().join("summary.csv"));
    assert_eq!(m["mistake_free"], "true");
    assert_eq!(m["wrong_claims"], "0");
    assert_eq!(m["non_repeating"], "true");
    for r in read_csv(&tmp.path().join("claims.csv")) {
        assert_eq!(r["mistake_free"], "true");
    }
}

#[test]
fn same_seed_gives_identical_traces() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_config(&fixture("configs/a-zero-noise.toml"), d.path(), &["simulate"]).status.success());
    }
    let ta = std::fs::read(a.path().join("trace.ndjson")).unwrap();
    assert!(!ta.is_empty());
    assert_eq!(ta, std::fs::read(b.path().join("trace.ndjson")).unwrap());
    let other = tempdir().unwrap();
    let cfg = fixture("configs/a-zero-noise.toml");
    let o = ndr(&["--config", cfg.to_str().unwrap(), "--seed", "99", "--out", other.path().to_str().unwrap(), "simulate"]);
    assert!(o.status.success());
    assert_ne!(ta, std::fs::read(other.path().join("trace.ndjson")).unwrap());
}

#[test]
fn noisy_mistake_rate_matches_the_kernel() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/b-noise.toml"), tmp.path(), &["simulate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_metrics(&tmp.path().join("summary.csv"));
    let total: f64 = m["claims_total"].parse().unwrap();
    let wrong: f64 = m["wrong_claims"].parse().unwrap();
    assert_eq!(total, 40_000.0);
    // recount from the per-replica table
    let recount: f64 = read_csv(&tmp.path().join("claims.csv"))
        .iter()
        .map(|r| r["wrong"].parse::<f64>().unwrap())
        .sum();
    assert_eq!(recount, wrong);
    let (lo, hi) = wilson(wrong, total, 1.959963984540054);
    assert!((m["mistake_rate_lo"].parse::<f64>().unwrap() - lo).abs() < 1e-12);
    assert!((m["mistake_rate_hi"].parse::<f64>().unwrap() - hi).abs() < 1e-12);
    // 99.9% binomial band around the kernel's noise rate
    let eta = 0.3;
    let band = Z999 * (eta * (1.0 - eta) / total).sqrt();
    assert!((wrong / total - eta).abs() <= band, "{} vs {eta}", wrong / total);
    assert_eq!(m["prediction_covered"], (lo <= eta && eta <= hi).to_string());
}

#[test]
fn estimates_agree_with_the_exact_chain() {
    for name in ["exact-two-question", "exact-coupled", "exact-removal"] {
        let tmp = tempdir().unwrap();
        let o = run_config(&fixture(&format!("configs/{name}.toml")), tmp.path(), &["estimate"]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let mut files: Vec<_> = std::fs::read_dir(tmp.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "csv") && !p.ends_with("maximal.csv"))
            .collect();
        files.sort();
        assert!(!files.is_empty());
        for f in files {
            for r in read_csv(&f) {
                let (count, total) = (r["count"].parse::<f64>().unwrap(), r["total"].parse::<f64>().unwrap());
                let exact: f64 = r["exact"].parse().unwrap();
                let (lo, hi) = wilson(count, total, Z999);
                assert!(lo - 1e-12 <= exact && exact <= hi + 1e-12, "{name} {}: {r:?}", f.display());
            }
        }
    }
}

#[test]
fn empty_conditioning_matches_the_plain_answer_distribution() {
    let tmp = tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        r#"
seed = 3
horizon = 3
replicas = 500

[machine]
systems = ["SYNTHU"]
pool = { kind = "explicit", questions = ["SYNTHU:t0", "SYNTHU:u1"] }
question_policy = { kind = "uniform", emit_prob = 0.7 }
answer_kernel = { kind = "noisy-oracle", solve_rate = 0.8, noise_rate = 0.3 }

[estimate]
answers = ["SYNTHU:u1"]
exact = true

[[estimate.generalized]]
question = "SYNTHU:u1"
given = []
"#,
    );
    let out = tmp.path().join("out");
    assert!(run_config(&cfg, &out, &["estimate"]).status.success());
    let rows = read_csv(&out.join("answers.csv"));
    assert_eq!(rows.len(), 8);
    for (plain, general) in rows[..4].iter().zip(&rows[4..]) {
        assert_eq!(plain["kind"], "answer");
        assert_eq!(general["kind"], "generalized");
        let strip = |r: &BTreeMap<String, String>| {
            let mut r = r.clone();
            r.remove("kind");
            r
        };
        assert_eq!(strip(plain), strip(general));
    }
}

#[test]
fn unanswerable_question_fails() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/unanswerable.toml"), tmp.path(), &["estimate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no outcome answers SYNTHU:u0"), "{}", stderr(&o));
}

#[test]
fn default_check_suites_pass() {
    let tmp = tempdir().unwrap();
    let o = ndr(&["--out", tmp.path().to_str().unwrap(), "check"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report = std::fs::read_to_string(tmp.path().join("check_report.txt")).unwrap();
    assert!(report.contains("joints checked: 10000"));
    assert!(report.contains("joints checked: 1000\n"));
    let err_line = report.lines().find(|l| l.contains("max product error")).unwrap();
    let err: f64 = err_line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(err < 1e-10);
    assert!(report.ends_with("overall: pass\n"));
}

#[test]
fn joint_checks_pass_and_corrupted_joint_fails() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/check-joints.toml"), tmp.path(), &["check"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let report = std::fs::read_to_string(tmp.path().join("check_report.txt")).unwrap();
    assert_eq!(report.matches("result: pass").count(), 3);
    // posterior of q after both paths: 0.3 / (0.3 + 0.05)
    assert!(report.contains("direct posterior: 0.857142857142857"));

    let o = run_config(&fixture("configs/check-corrupted.toml"), &tmp.path().join("bad"), &["check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid weights"), "{}", stderr(&o));
}

#[test]
fn deterministic_trajectory_gives_a_path_graph() {
    let tmp = tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        r#"
horizon = 4
replicas = 5

[machine]
systems = ["SYNTHU"]
pool = { kind = "explicit", questions = ["SYNTHU:t0", "SYNTHU:a1", "SYNTHU:u0"] }
question_policy = { kind = "breakthrough-greedy" }
answer_kernel = { kind = "noisy-oracle", solve_rate = 1.0, noise_rate = 0.0 }
"#,
    );
    let out = tmp.path().join("out");
    assert!(run_config(&cfg, &out, &["simulate"]).status.success());
    let o = ndr(&["--out", out.to_str().unwrap(), "graph"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let edges = read_csv(&out.join("graph_edges.csv"));
    assert_eq!(edges.len(), 3);
    for (i, e) in edges.iter().enumerate() {
        assert_eq!(e["probability"], "1");
        assert_eq!(e["count"], "5");
        assert_eq!(e["kind"], "append");
        if i > 0 {
            assert!(edges.iter().any(|prev| prev["to"] == e["from"]));
        }
    }
}

#[test]
fn two_branch_graph_frequencies_sum_to_one() {
    let tmp = tempdir().unwrap();
    assert!(run_config(&fixture("configs/graph-two-branch.toml"), tmp.path(), &["simulate"]).status.success());
    let trace = tmp.path().join("trace.ndjson");
    let out = tmp.path().join("graph");
    let o = ndr(&["--out", out.to_str().unwrap(), "graph", trace.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let edges = read_csv(&out.join("graph_edges.csv"));
    let first: Vec<_> = edges.iter().filter(|e| e["from"] == "[]").collect();
    assert_eq!(first.len(), 2);
    let total: f64 = first.iter().map(|e| e["probability"].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let counts: u64 = first.iter().map(|e| e["count"].parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 500);
    // replayed counts agree with the final claims of each replica
    let claims = read_csv(&tmp.path().join("claims.csv"));
    let starts_t0 = claims.iter().filter(|r| r["claims"].starts_with("[SYNTHU:t0/t")).count() as u64;
    let edge_t0 = first.iter().find(|e| e["to"] == "[SYNTHU:t0/t]").unwrap();
    assert_eq!(edge_t0["count"].parse::<u64>().unwrap(), starts_t0);
}

#[test]
fn removals_produce_deletion_edges() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/custom-system-removal.toml"), tmp.path(), &["simulate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(tmp.path().join("trace.ndjson")).unwrap();
    assert!(trace.contains("ClaimRemoved"));
    assert!(trace.contains("TOY:"));
    assert!(ndr(&["--out", tmp.path().to_str().unwrap(), "graph"]).status.success());
    let edges = read_csv(&tmp.path().join("graph_edges.csv"));
    assert!(edges.iter().any(|e| e["kind"] == "deletion"));
    assert!(edges.iter().any(|e| e["kind"] == "append"));
}

#[test]
fn malformed_trace_is_rejected() {
    let tmp = tempdir().unwrap();
    let bad = write_config(tmp.path(), "t.ndjson", "{\"replica\":0}\n");
    let o = ndr(&["--out", tmp.path().to_str().unwrap(), "graph", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}

#[test]
fn ptm_actions() {
    let tmp = tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let m = fixture("machines/halt-0-10-11.toml");
    let o = ndr(&["--out", out, "ptm", "--machine", m.to_str().unwrap(), "coinflip", "--max-len", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&tmp.path().join("ptm_coinflip.csv"));
    let got: Vec<(String, String)> = rows.iter().map(|r| (r["input"].clone(), r["probability"].clone())).collect();
    assert_eq!(
        got,
        [("0", "0.5"), ("10", "0.25"), ("11", "0.25")].map(|(a, b)| (a.to_string(), b.to_string()))
    );
    assert!(stdout(&o).contains("omega = 1\n"));

    let l = fixture("machines/loop.toml");
    let o = ndr(&["--out", out, "ptm", "--machine", l.to_str().unwrap(), "halting-set", "--budget", "50"]);
    assert!(o.status.success());
    assert!(read_csv(&tmp.path().join("ptm_halting_set.csv")).is_empty());

    let np = fixture("machines/non-prefix-free.toml");
    let o = ndr(&["--out", out, "ptm", "--machine", np.to_str().unwrap(), "coinflip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not prefix-free"));
    let o = ndr(&["--out", out, "ptm", "--machine", np.to_str().unwrap(), "prefix-free"]);
    assert_eq!(o.status.code(), Some(1));

    let o = ndr(&["--out", out, "ptm", "--builtin", "bit-flipper", "run", "--input", "0110"]);
    assert!(o.status.success());
    let run = read_csv(&tmp.path().join("ptm_run.csv"));
    assert_eq!(run[0]["output"], "1001");
}

#[test]
fn machine_fixtures_match_the_builtins() {
    for (file, m) in [
        ("identity", machines::identity()),
        ("loop", machines::looping()),
        ("bit-flipper", machines::bit_flipper()),
        ("halt-0-10-11", machines::halts_on_0_10_11()),
        ("coin-writer", machines::coin_writer()),
        ("toy-universal", toy_universal()),
    ] {
        let text = std::fs::read_to_string(fixture(&format!("machines/{file}.toml"))).unwrap();
        assert_eq!(text, MachineFile::from_machine(&m).to_toml(), "{file}");
        let loaded = MachineFile::parse(&text).unwrap().to_machine().unwrap();
        assert_eq!(MachineFile::from_machine(&loaded), MachineFile::from_machine(&m));
    }
}

#[test]
fn mmh_measures() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/mmh-coinflip.toml"), tmp.path(), &["mmh"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stats = read_metrics(&tmp.path().join("measure_stats.csv"));
    assert_eq!(stats["mistake_free_mass"], "0.75");
    assert_eq!(stats["entropy_bits"], "1.5");
    let restricted = read_metrics(&tmp.path().join("restricted_stats.csv"));
    assert_eq!(restricted["mistake_free_mass"], "1");
    assert_eq!(restricted["support_size"], "2");

    let o = run_config(&fixture("configs/mmh-sampled.toml"), &tmp.path().join("s"), &["mmh"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let world = ndr_core::mmh::WorldFile::load(&tmp.path().join("s/world.toml")).unwrap();
    assert!(!world.answers.is_empty());
}

#[test]
fn effective_config_reproduces_outputs() {
    for (config, cmd) in [
        ("configs/exact-two-question.toml", "estimate"),
        ("configs/a-zero-noise.toml", "simulate"),
        ("configs/check-joints.toml", "check"),
        ("configs/mmh-coinflip.toml", "mmh"),
    ] {
        let tmp = tempdir().unwrap();
        let first = tmp.path().join("first");
        let o = run_config(&fixture(config), &first, &[cmd]);
        assert!(o.status.success(), "{config}: {}", stderr(&o));
        let second = tmp.path().join("second");
        let o = run_config(&first.join("effective_config.toml"), &second, &[cmd]);
        assert!(o.status.success(), "{config}: {}", stderr(&o));
        assert_eq!(snapshot(&first), snapshot(&second), "{config}");
    }
}

#[test]
fn config_errors_name_the_line() {
    let tmp = tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "seed = 1\n\n[machine]\nsystems = [\"SYNTHU\"]\nquestion_policy = 3\n");
    let o = run_config(&cfg, &tmp.path().join("o"), &["simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));

    let cfg = write_config(
        tmp.path(),
        "rate.toml",
        r#"
[machine]
systems = ["SYNTHU"]
question_policy = { kind = "uniform" }
answer_kernel = { kind = "noisy-oracle", solve_rate = 1.5, noise_rate = 0.0 }
"#,
    );
    let o = run_config(&cfg, &tmp.path().join("o"), &["simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("solve_rate"), "{}", stderr(&o));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let cfg = fixture("configs/exact-coupled.toml");
    let run = |dir: &std::path::Path, threads: &str| {
        std::process::Command::new(env!("CARGO_BIN_EXE_ndr"))
            .env("NDR_THREADS", threads)
            .args(["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "estimate"])
            .output()
            .unwrap()
    };
    assert!(run(a.path(), "1").status.success());
    assert!(run(b.path(), "3").status.success());
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn text_format_writes_aligned_tables() {
    let tmp = tempdir().unwrap();
    let o = run_config(&fixture("configs/a-zero-noise.toml"), tmp.path(), &["--format", "text", "simulate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["mistake_free", "true"]));
    assert!(!tmp.path().join("summary.csv").exists());
}

#[test]
fn help_documents_every_subcommand_with_an_example() {
    for cmd in ["simulate", "estimate", "check", "graph", "ptm", "mmh"] {
        let o = ndr(&[cmd, "--help"]);
        assert!(o.status.success());
        let help = stdout(&o);
        assert!(help.contains("Example:") && help.contains("fixtures/"), "{cmd}: {help}");
    }
    let top = stdout(&ndr(&["--help"]));
    for flag in ["--config", "--seed", "--out", "--format", "NDR_THREADS"] {
        assert!(top.contains(flag), "{flag}");
    }
}
