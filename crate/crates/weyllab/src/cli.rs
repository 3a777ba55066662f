//! Argument parsing and output routing for the `weyllab` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches};

use crate::commands::{run, Report};
use crate::config::{Command, ExperimentConfig};
use crate::error::{CliError, CliResult, EXIT_VALIDATION};
use crate::format::render_json;
use crate::parallel::{resolve_threads, with_pool};
use crate::suite::{run_suite, Suite};

/// Output form of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl Format {
    pub fn parse(value: &str) -> CliResult<Self> {
        match value {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::invalid("format", format!("expected text, csv or json, got `{other}`"))),
        }
    }

    /// Form printed on stdout when no format is requested.
    pub fn stdout_default(command: Command) -> Self {
        match command {
            Command::Weyl | Command::Kernel | Command::LimitKernel | Command::Disintegration => Format::Text,
            Command::RescaleScan | Command::OscDecay => Format::Csv,
            Command::LogFit | Command::GreenFit | Command::Admissible | Command::LinkCheck => Format::Json,
        }
    }

    /// Form written to `path`: by extension, else the command's machine form.
    pub fn file_default(command: Command, path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            _ => match Format::stdout_default(command) {
                Format::Text => Format::Json,
                f => f,
            },
        }
    }

    pub fn render(self, report: &Report) -> String {
        match self {
            Format::Text => format!("{}\n", report.summary),
            Format::Csv => report.table.to_csv(),
            Format::Json => render_json(&report.json),
        }
    }
}

fn param_arg(key: &'static str, help: &'static str) -> Arg {
    Arg::new(key).long(key).value_name("VALUE").help(help).allow_hyphen_values(true)
}

/// The clap command tree.
pub fn build() -> clap::Command {
    let mut root = clap::Command::new("weyllab")
        .about("Spectral kernel experiments for homogeneous elliptic symbols on the torus")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads (default: WEYLLAB_THREADS, then all cores)"),
        );
    for command in Command::ALL {
        let mut sub = clap::Command::new(command.name()).about(command.about());
        for spec in command.params() {
            let help = match spec.default {
                Some(d) => format!("{} [default: {d}]", spec.help),
                None => spec.help.to_owned(),
            };
            sub = sub.arg(param_arg(spec.key, spec.help).help(help));
        }
        for spec in crate::config::OUTPUT_PARAMS {
            sub = sub.arg(param_arg(spec.key, spec.help));
        }
        sub = sub
            .arg(Arg::new("config").long("config").value_name("FILE").help("read parameters from a config file"))
            .arg(
                Arg::new("save-config")
                    .long("save-config")
                    .value_name("FILE")
                    .help("write the effective config before running"),
            );
        root = root.subcommand(sub);
    }
    root.subcommand(
        clap::Command::new("suite")
            .about("Run the acceptance criteria")
            .arg(Arg::new("name").value_name("NAME").required(true).help("quick or full"))
            .arg(Arg::new("format").long("format").value_name("FORMAT").help("text or json").default_value("text"))
            .arg(Arg::new("quiet").long("quiet").action(ArgAction::SetTrue).help("print only the final report")),
    )
}

/// Config from `--config` with the flags applied on top.
pub fn config_from(command: Command, matches: &ArgMatches) -> CliResult<ExperimentConfig> {
    let mut config = match matches.get_one::<String>("config") {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let config = ExperimentConfig::parse(&text)?;
            if config.command() != command {
                return Err(CliError::invalid("config", format!("file is for {}, not {command}", config.command())));
            }
            config
        }
        None => ExperimentConfig::new(command),
    };
    let keys = command.params().iter().chain(crate::config::OUTPUT_PARAMS.iter()).map(|s| s.key);
    for key in keys {
        if let Some(value) = matches.get_one::<String>(key) {
            config.set(key, value)?;
        }
    }
    Ok(config)
}

fn write_file(path: &str, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn run_experiment(
    command: Command,
    matches: &ArgMatches,
    threads: Option<usize>,
    out: &mut dyn Write,
) -> CliResult<()> {
    let config = config_from(command, matches)?;
    let format = config.get("format").map(Format::parse).transpose()?;
    if let Some(path) = matches.get_one::<String>("save-config") {
        write_file(path, &config.serialize())?;
    }
    let report = with_pool(threads, || run(&config))??;
    let emit = |out: &mut dyn Write, text: &str| out.write_all(text.as_bytes()).map_err(|e| CliError::io("stdout", e));
    match config.get("output") {
        Some(path) => {
            let format = format.unwrap_or_else(|| Format::file_default(command, Path::new(path)));
            write_file(path, &format.render(&report))?;
            emit(out, &format!("{}\n", report.summary))
        }
        None => emit(out, &format.unwrap_or(Format::stdout_default(command)).render(&report)),
    }
}

fn run_suite_command(matches: &ArgMatches, threads: Option<usize>, out: &mut dyn Write) -> CliResult<()> {
    let suite: Suite = matches.get_one::<String>("name").map(String::as_str).unwrap_or_default().parse()?;
    let format = Format::parse(matches.get_one::<String>("format").map(String::as_str).unwrap_or("text"))?;
    if format == Format::Csv {
        return Err(CliError::invalid("format", "suite reports are text or json"));
    }
    let quiet = matches.get_flag("quiet") || format == Format::Json;
    let report = with_pool(threads, || {
        run_suite(suite, |r| {
            if !quiet {
                eprintln!("{}", r.line());
            }
        })
    })?;
    let text = match format {
        Format::Json => render_json(&report.to_json()),
        _ => report.to_text(),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("stdout", e))?;
    if report.pass() {
        Ok(())
    } else {
        Err(CliError::SuiteFailed {
            name: suite.name().to_owned(),
            failed: report.failed(),
            total: report.results.len(),
        })
    }
}

/// Runs the program on `args` and returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match build().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = resolve_threads(matches.get_one::<usize>("threads").copied()).and_then(|threads| {
        let (name, sub) = matches.subcommand().expect("a subcommand is required");
        if name == "suite" {
            run_suite_command(sub, threads, out)
        } else {
            run_experiment(name.parse()?, sub, threads, out)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
