use ndr_core::ptm::{machines, toy_universal, MachineFile, RunOutcome, TapeMachine};
use ndr_core::rng::replica_rng;

use super::num;
use crate::args::{Format, Global, PtmAction, PtmArgs};
use crate::error::{io_error, CliError};
use crate::output::{row, write_file, Table};

pub const BUILTINS: [&str; 7] = [
    "identity",
    "loop",
    "bit-flipper",
    "halt-0-10-11",
    "coin-writer",
    "writer",
    "toy-universal",
];

pub fn builtin(name: &str) -> Result<TapeMachine, CliError> {
    Ok(match name {
        "identity" => machines::identity(),
        "loop" => machines::looping(),
        "bit-flipper" => machines::bit_flipper(),
        "halt-0-10-11" => machines::halts_on_0_10_11(),
        "coin-writer" => machines::coin_writer(),
        "writer" => machines::writer(),
        "toy-universal" => toy_universal(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown built-in machine {other:?}; expected one of {}",
                BUILTINS.join(", ")
            )))
        }
    })
}

fn load(args: &PtmArgs) -> Result<TapeMachine, CliError> {
    match (&args.machine, &args.builtin) {
        (Some(path), _) => Ok(MachineFile::load(path)?.to_machine()?),
        (None, Some(name)) => builtin(name),
        (None, None) => Err(CliError::Usage("give --machine or --builtin".into())),
    }
}

pub fn run(global: &Global, args: &PtmArgs) -> Result<bool, CliError> {
    let machine = load(args)?;
    let format = global.format.unwrap_or(Format::Csv);
    let out = &global.out;
    std::fs::create_dir_all(out).map_err(io_error(out))?;
    match &args.action {
        PtmAction::Run { input, budget } => {
            let mut rng = replica_rng(global.seed.unwrap_or(0), 0);
            let mut t = Table::new(&["input", "outcome", "steps", "output"]);
            match machine.run(input, *budget, &mut rng)? {
                RunOutcome::Halted { output, steps } => t.push(row![input, "halted", steps, output]),
                RunOutcome::BudgetExhausted => t.push(row![input, "budget-exhausted", budget, ""]),
            }
            t.write(out, "ptm_run", format)?;
            print!("{}", t.to_text());
            Ok(true)
        }
        PtmAction::HaltingSet { max_len, budget } => {
            let set = machine.halting_set(*max_len, *budget)?;
            let mut t = Table::new(&["input", "length"]);
            for s in &set.members {
                t.push(row![s, s.chars().count()]);
            }
            t.write(out, "ptm_halting_set", format)?;
            println!(
                "{} halting inputs of length <= {max_len} within {budget} steps",
                set.members.len()
            );
            Ok(true)
        }
        PtmAction::Coinflip { max_len, budget } => {
            let d = machine.coin_flip_distribution(*max_len, *budget)?;
            let mut t = Table::new(&["input", "length", "probability"]);
            for (s, p) in &d.probabilities {
                t.push(row![s, s.chars().count(), num(*p)]);
            }
            t.write(out, "ptm_coinflip", format)?;
            print!("{}", t.to_text());
            println!("omega = {}", num(d.omega));
            Ok(true)
        }
        PtmAction::PrefixFree { max_len, budget } => {
            let set = machine.halting_set(*max_len, *budget)?;
            let free = set.is_prefix_free();
            let mut t = Table::new(&["machine", "members", "prefix_free"]);
            t.push(row![machine.name(), set.members.len(), free]);
            t.write(out, "ptm_prefix_free", format)?;
            print!("{}", t.to_text());
            Ok(free)
        }
        PtmAction::Export => {
            let path = out.join("machine.toml");
            write_file(&path, MachineFile::from_machine(&machine).to_toml().as_bytes())?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}
