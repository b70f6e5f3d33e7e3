use std::collections::{BTreeMap, BTreeSet};

use ndr_core::estimation::{AnswerDistribution, Ensemble, Estimate, ExactChain, PrefixOutcome};
use ndr_core::formal_system::{ClaimsList, Valence};

use super::num;
use crate::args::{Global, RunArgs};
use crate::config::{parse_list, parse_set, Context};
use crate::error::CliError;
use crate::output::{row, Table};

fn headers<'a>(base: &[&'a str], exact: bool) -> Vec<&'a str> {
    let mut h = base.to_vec();
    if exact {
        h.push("exact");
    }
    h
}

fn answer_rows(t: &mut Table, kind: &str, mc: &AnswerDistribution, exact: Option<&AnswerDistribution>) {
    let estimates = mc.estimates.expect("Monte Carlo answers carry estimates");
    for v in Valence::ALL {
        let e = estimates[v.index()];
        let mut r = row![kind, mc.question, mc.conditioning, v, e.count, e.total, num(e.p), num(e.lo), num(e.hi)];
        if let Some(x) = exact {
            r.push(num(x.prob(v)));
        }
        t.push(r);
    }
}

fn estimate_row(e: &Estimate) -> Vec<String> {
    row![e.count, e.total, num(e.p), num(e.lo), num(e.hi)]
}

pub fn run(global: &Global, args: &RunArgs) -> Result<bool, CliError> {
    let mut ctx = Context::load(global)?;
    ctx.override_run(args.horizon, args.replicas);
    let machine = ctx.machine()?;
    let section = ctx.config.estimate.clone().unwrap_or_default();
    ctx.config.estimate = Some(section.clone());
    let (k, n, seed) = (ctx.config.horizon, ctx.config.replicas, ctx.config.seed);

    let mut watched: Vec<ClaimsList> = Vec::new();
    for r in &section.list_conditioned {
        let list = parse_list("list_conditioned.list", &r.list)?;
        if !watched.contains(&list) {
            watched.push(list);
        }
    }
    ctx.prepare_output()?;
    let ensemble = Ensemble::simulate(&machine, k, n, seed, &watched)?;
    let chain = if section.exact {
        let mut chain = ExactChain::new(&machine, section.state_bound, &watched);
        chain.advance_to(k)?;
        Some(chain)
    } else {
        None
    };
    let exact = chain.is_some();

    for &len in &section.prefix_lengths {
        let mc = ensemble.prefix_distribution(len);
        let ex = chain.as_ref().map(|c| c.prefix_distribution(len));
        let mut outcomes: BTreeSet<&PrefixOutcome> = mc.support.keys().collect();
        if let Some(ex) = &ex {
            outcomes.extend(ex.keys());
        }
        let mut t = Table::new(&headers(&["outcome", "count", "total", "p", "lo", "hi"], exact));
        for o in outcomes {
            let e = mc.support.get(o).copied().unwrap_or_else(|| Estimate::wilson95(0, n));
            let mut r = row![o];
            r.extend(estimate_row(&e));
            if let Some(ex) = &ex {
                r.push(num(ex.get(o).copied().unwrap_or(0.0)));
            }
            t.push(r);
        }
        t.write(&ctx.out, &format!("prefix_n{len}"), ctx.format)?;
    }

    let answer_headers = ["kind", "question", "conditioning", "valence", "count", "total", "p", "lo", "hi"];
    let mut answers = Table::new(&headers(&answer_headers, exact));
    for q in &section.answers {
        let mc = ensemble.answer_distribution(q)?;
        let ex = chain.as_ref().map(|c| c.answer_distribution(q)).transpose()?;
        answer_rows(&mut answers, "answer", &mc, ex.as_ref());
    }
    for r in &section.generalized {
        let given = parse_set("generalized.given", &r.given)?;
        let mc = ensemble.generalized_answer_distribution(&r.question, &given)?;
        let ex = chain
            .as_ref()
            .map(|c| c.generalized_answer_distribution(&r.question, &given))
            .transpose()?;
        answer_rows(&mut answers, "generalized", &mc, ex.as_ref());
    }
    for r in &section.list_conditioned {
        let list = parse_list("list_conditioned.list", &r.list)?;
        let given = parse_set("list_conditioned.given", &r.given)?;
        let mc = ensemble.list_conditioned_answer_distribution(&list, &r.question, &given)?;
        let ex = chain
            .as_ref()
            .map(|c| c.list_conditioned_answer_distribution(&list, &r.question, &given))
            .transpose()?;
        answer_rows(&mut answers, "list-conditioned", &mc, ex.as_ref());
    }
    if !answers.rows.is_empty() {
        answers.write(&ctx.out, "answers", ctx.format)?;
    }

    if !section.claims.is_empty() {
        let mut t = Table::new(&headers(&["claims", "count", "total", "p", "lo", "hi"], exact));
        for items in &section.claims {
            let set = parse_set("claims", items)?;
            let mut r = row![set];
            r.extend(estimate_row(&ensemble.claims_probability(&set)));
            if let Some(c) = &chain {
                r.push(num(c.claims_probability(&set)));
            }
            t.push(r);
        }
        t.write(&ctx.out, "claims_probability", ctx.format)?;
    }

    if section.maximal {
        let mut t = Table::new(&["source", "horizon", "list"]);
        let mut sources: BTreeMap<&str, BTreeSet<ClaimsList>> = BTreeMap::new();
        sources.insert("monte-carlo", ensemble.maximal_lists().lists);
        if let Some(c) = &chain {
            sources.insert("exact", c.maximal_lists());
        }
        for (source, lists) in sources {
            for l in lists {
                t.push(row![source, k, l]);
            }
        }
        t.write(&ctx.out, "maximal", ctx.format)?;
    }
    println!("estimated {} replicas at horizon {k}", n);
    Ok(true)
}
