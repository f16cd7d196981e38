//! `wqed`: runs one scenario and writes its CSV output.
//!
//! Exit status is 0 on success, 1 for invalid input or configuration and
//! 2 for a numerical failure. Nothing is written unless every output was
//! computed.

mod error;
mod scenarios;
mod settings;
mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use error::{CliError, CliResult};
use scenarios::{OptSpec, ScenarioRegistry, ScenarioRunner, COMMON};
use settings::{read_config, suffixed, Settings};

const THREADS_VAR: &str = "WQED_THREADS";

fn option_arg(o: OptSpec) -> Arg {
    let arg = Arg::new(o.name).long(o.name);
    if o.flag {
        return arg.action(ArgAction::SetTrue).help(o.help);
    }
    let help = if o.default.is_empty() {
        o.help.to_string()
    } else {
        format!("{} [default: {}]", o.help, o.default)
    };
    arg.num_args(1)
        .value_name("VALUE")
        .allow_negative_numbers(true)
        .help(help)
}

fn all_options(runner: &dyn ScenarioRunner) -> Vec<OptSpec> {
    COMMON.iter().copied().chain(runner.options()).collect()
}

fn build_cli(registry: &ScenarioRegistry) -> Command {
    let mut cmd = Command::new("wqed")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Pulse scattering off a two-level atom in a waveguide")
        .after_help(format!("Set {THREADS_VAR} to cap the number of worker threads."))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for runner in registry.iter() {
        let mut sub = Command::new(runner.name())
            .about(runner.about())
            .after_help(format!("CSV schema: {}", runner.schema()))
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("Flat key = value file; command-line flags take precedence"),
            )
            .arg(
                Arg::new("output")
                    .long("output")
                    .short('o')
                    .value_name("PATH")
                    .help(format!("Output CSV [default: {}.csv]", runner.name())),
            );
        for o in all_options(runner) {
            sub = sub.arg(option_arg(o));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Flags override config values, which override the declared defaults.
fn resolve(runner: &dyn ScenarioRunner, m: &ArgMatches) -> CliResult<(Settings, PathBuf)> {
    let mut config = match m.get_one::<String>("config") {
        Some(path) => read_config(Path::new(path))?,
        None => BTreeMap::new(),
    };
    // a `kind` key is allowed so that metadata lines can be replayed
    if let Some(kind) = config.remove("kind") {
        if kind != runner.name() {
            return Err(CliError::input(format!(
                "config is for {kind:?}, not {}",
                runner.name()
            )));
        }
    }
    let options = all_options(runner);
    if let Some(key) = config
        .keys()
        .find(|k| k.as_str() != "output" && !options.iter().any(|o| o.name == k.as_str()))
    {
        return Err(CliError::input(format!(
            "unknown config key {key:?} for {}",
            runner.name()
        )));
    }
    let output = m
        .get_one::<String>("output")
        .cloned()
        .or_else(|| config.remove("output"))
        .unwrap_or_else(|| format!("{}.csv", runner.name()));
    let mut values = BTreeMap::new();
    for o in options {
        let from_flag = if o.flag {
            m.get_flag(o.name).then(|| "true".to_string())
        } else {
            m.get_one::<String>(o.name).cloned()
        };
        let value = from_flag
            .or_else(|| config.remove(o.name))
            .unwrap_or_else(|| o.default.to_string());
        values.insert(o.name.to_string(), value);
    }
    Ok((Settings::new(values), PathBuf::from(output)))
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return Err(CliError::input(format!(
                    "{THREADS_VAR} must be a positive integer, got {v:?}"
                )))
            }
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::input(format!("cannot start worker pool: {e}")))
}

fn run(registry: &ScenarioRegistry, matches: &ArgMatches) -> CliResult<()> {
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let runner = registry.get(name).expect("subcommands come from the registry");
    let (settings, output) = resolve(runner, sub)?;
    let pool = thread_pool()?;
    let artifacts = pool.install(|| runner.run(&settings))?;
    for a in &artifacts {
        if let Some((row, column)) = a.table.first_non_finite() {
            return Err(CliError::NonFinite {
                column: column.to_string(),
                row,
            });
        }
    }

    let files: Vec<(PathBuf, String)> = artifacts
        .iter()
        .map(|a| {
            let path = match a.suffix {
                Some(s) => suffixed(&output, s),
                None => output.clone(),
            };
            (path, a.table.render(runner.name(), &settings))
        })
        .collect();
    for (path, _) in &files {
        match path.parent() {
            Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
                return Err(CliError::input(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
            _ => {}
        }
    }
    for (path, body) in &files {
        std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let registry = ScenarioRegistry::standard();
    let matches = match build_cli(&registry).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&registry, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
