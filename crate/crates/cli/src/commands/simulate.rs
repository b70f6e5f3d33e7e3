use std::io::Write;

use ndr_core::estimation::Estimate;
use ndr_core::formal_system::ClaimsList;
use ndr_core::ndr_machine::{is_mistake_free, is_non_repeating, KernelSpec, NdrMachine, TraceEvent};
use ndr_core::rng::replica_rng;
use rayon::prelude::*;

use super::{num, TraceRecord};
use crate::args::{Global, RunArgs};
use crate::config::Context;
use crate::error::CliError;
use crate::output::{row, write_file, Table};

pub const TRACE_FILE: &str = "trace.ndjson";

/// The per-claim wrong-valence probability implied by the kernel, when it
/// does not depend on earlier claims.
pub fn predicted_mistake_rate(machine: &NdrMachine) -> Option<f64> {
    let KernelSpec::NoisyOracle {
        noise_rate,
        propagated_noise_rate,
        ..
    } = &machine.config().answer_kernel;
    let coupled = propagated_noise_rate.is_some_and(|p| p != *noise_rate) && !machine.config().dependencies.is_empty();
    (!coupled).then_some(*noise_rate)
}

pub fn run(global: &Global, args: &RunArgs) -> Result<bool, CliError> {
    let mut ctx = Context::load(global)?;
    ctx.override_run(args.horizon, args.replicas);
    let machine = ctx.machine()?;
    let (k, n, seed, traced) = (ctx.config.horizon, ctx.config.replicas, ctx.config.seed, ctx.config.trace);
    if n == 0 {
        return Err(CliError::Usage("replicas must be at least 1".into()));
    }
    ctx.prepare_output()?;

    let runs: Vec<(ClaimsList, Vec<TraceEvent>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i);
            if traced {
                let (state, events) = machine.run_traced(k, &mut rng);
                (state.into_claims(), events)
            } else {
                (machine.run(k, &mut rng).into_claims(), Vec::new())
            }
        })
        .collect();

    if traced {
        let mut buf = Vec::new();
        for (i, (_, events)) in runs.iter().enumerate() {
            for event in events {
                let record = TraceRecord {
                    replica: i as u64,
                    event: event.clone(),
                };
                serde_json::to_writer(&mut buf, &record).expect("records serialize");
                buf.write_all(b"\n").expect("writing to memory");
            }
        }
        write_file(&ctx.out.join(TRACE_FILE), &buf)?;
    }

    let mut claims = Table::new(&["replica", "length", "wrong", "mistake_free", "non_repeating", "claims"]);
    let (mut total, mut wrong, mut free, mut non_repeating) = (0u64, 0u64, 0u64, 0u64);
    for (i, (list, _)) in runs.iter().enumerate() {
        let mut w = 0;
        for c in list {
            if ctx.registry.oracle(&c.question)? != c.valence {
                w += 1;
            }
        }
        let mf = is_mistake_free(list, &ctx.registry)?;
        let nr = is_non_repeating(list);
        total += list.len() as u64;
        wrong += w;
        free += mf as u64;
        non_repeating += nr as u64;
        claims.push(row![i, list.len(), w, mf, nr, list]);
    }
    claims.write(&ctx.out, "claims", ctx.format)?;

    let predicted = predicted_mistake_rate(&machine);
    let rate = (total > 0).then(|| Estimate::wilson95(wrong, total));
    let na = || "NA".to_string();
    let mut summary = Table::new(&["metric", "value"]);
    summary.push(row!["horizon", k]);
    summary.push(row!["replicas", n]);
    summary.push(row!["seed", seed]);
    summary.push(row!["claims_total", total]);
    summary.push(row!["wrong_claims", wrong]);
    summary.push(row!["mistake_rate", rate.map_or_else(na, |e| num(e.p))]);
    summary.push(row!["mistake_rate_lo", rate.map_or_else(na, |e| num(e.lo))]);
    summary.push(row!["mistake_rate_hi", rate.map_or_else(na, |e| num(e.hi))]);
    summary.push(row!["predicted_mistake_rate", predicted.map_or_else(na, num)]);
    let covered = rate.zip(predicted).map(|(e, p)| e.covers(p));
    summary.push(row!["prediction_covered", covered.map_or_else(na, |c| c.to_string())]);
    summary.push(row!["mistake_free_replicas", free]);
    summary.push(row!["non_repeating_replicas", non_repeating]);
    summary.push(row!["mistake_free", free == n]);
    summary.push(row!["non_repeating", non_repeating == n]);
    summary.write(&ctx.out, "summary", ctx.format)?;
    print!("{}", summary.to_text());

    let expect_free = predicted == Some(0.0);
    let expect_non_repeating = machine.config().enforce_non_repeating;
    let mut ok = true;
    if expect_free && free < n {
        eprintln!("invariant violated: {} replicas made mistakes at zero noise", n - free);
        ok = false;
    }
    if expect_non_repeating && non_repeating < n {
        eprintln!("invariant violated: {} replicas repeated a question", n - non_repeating);
        ok = false;
    }
    Ok(ok)
}
