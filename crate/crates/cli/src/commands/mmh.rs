use std::path::Path;

use ndr_core::mmh::{make_world, measure_statistics, GeneratorSpec, MeasureFile, MmhMeasure, NdrWorldInstance};

use super::num;
use crate::args::{Global, MmhArgs};
use crate::config::{Context, MmhSection};
use crate::error::{io_error, CliError};
use crate::output::{row, write_file, Table};

fn statistics(ctx: &Context, m: &MmhMeasure<NdrWorldInstance>) -> Result<Table, CliError> {
    let s = measure_statistics(m, &ctx.registry)?;
    let mut t = Table::new(&["metric", "value"]);
    t.push(row!["support_size", s.support_size]);
    t.push(row!["mistake_free_mass", num(s.mistake_free_mass)]);
    t.push(row!["entropy_bits", num(s.entropy)]);
    for (system, mass) in &s.mass_per_system {
        t.push(row![format!("mass[{system}]"), num(*mass)]);
    }
    Ok(t)
}

pub fn run(global: &Global, args: &MmhArgs) -> Result<bool, CliError> {
    let mut ctx = Context::load(global)?;
    if let Some(path) = &args.generator {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let mut generator = GeneratorSpec::parse(&text)?;
        if let GeneratorSpec::Coinflip { machine, .. } = &mut generator {
            let base = path.parent().unwrap_or(Path::new("."));
            *machine = std::fs::canonicalize(base.join(&machine)).map_err(io_error(base.join(&machine)))?;
        }
        let section = ctx.config.mmh.get_or_insert(MmhSection {
            generator: generator.clone(),
            restrict: true,
            world_bound: None,
        });
        section.generator = generator;
    }
    let section = ctx
        .config
        .mmh
        .clone()
        .ok_or_else(|| CliError::Usage("no [mmh] section in the config and no --generator".into()))?;
    ctx.prepare_output()?;

    let measure = section.generator.build(Path::new("."), ctx.config.seed, &ctx.registry)?;
    write_file(&ctx.out.join("measure.toml"), MeasureFile::from_measure(&measure).to_toml().as_bytes())?;
    let stats = statistics(&ctx, &measure)?;
    stats.write(&ctx.out, "measure_stats", ctx.format)?;
    print!("{}", stats.to_text());

    if section.restrict {
        let restricted = measure.restrict_to_mistake_free(&ctx.registry)?;
        write_file(
            &ctx.out.join("restricted_measure.toml"),
            MeasureFile::from_measure(&restricted).to_toml().as_bytes(),
        )?;
        statistics(&ctx, &restricted)?.write(&ctx.out, "restricted_stats", ctx.format)?;
    }
    if let Some(bound) = section.world_bound {
        let machine = ctx.machine()?;
        let world = make_world(&machine, bound, ctx.config.horizon, ctx.config.replicas, ctx.config.seed)?;
        write_file(&ctx.out.join("world.toml"), ndr_core::mmh::WorldFile::to_toml(&world).as_bytes())?;
    }
    Ok(true)
}
