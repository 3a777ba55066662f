//! Experiment configuration: line-oriented `key = value` text.
//!
//! A file names the command on a `command = ...` line followed by that
//! command's parameters. Blank lines and `#` comments are kept, and lines
//! that are not modified are written back verbatim, so parsing and
//! serializing reproduces the input byte for byte.

use std::fmt;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// A parameter accepted by a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub help: &'static str,
    pub default: Option<&'static str>,
}

const fn p(key: &'static str, help: &'static str, default: Option<&'static str>) -> ParamSpec {
    ParamSpec { key, help, default }
}

const SYMBOL: ParamSpec = p("symbol", "symbol literal, e.g. `poly: x1^2+x2^2`", None);
const MODEL: ParamSpec = p("model", "torus or dirichlet", Some("torus"));
const CUTOFF: ParamSpec = p("L", "spectral cutoff", None);
const L_LIST: ParamSpec = p("L-list", "cutoffs: `lo:hi:count` (geometric), `dyadic:lo:hi` or a comma list", None);
const ALPHA: ParamSpec = p("alpha", "x-derivative multi-index, comma separated", None);
const BETA: ParamSpec = p("beta", "y-derivative multi-index, comma separated", None);
const RESOLUTION: ParamSpec = p("resolution", "sphere-grid resolution", None);

/// Parameters written by every command.
pub const OUTPUT_PARAMS: [ParamSpec; 2] =
    [p("output", "artifact path; stdout when absent", None), p("format", "text, csv or json", None)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Weyl,
    Kernel,
    RescaleScan,
    LogFit,
    GreenFit,
    LimitKernel,
    OscDecay,
    Admissible,
    Disintegration,
    LinkCheck,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Weyl,
        Command::Kernel,
        Command::RescaleScan,
        Command::LogFit,
        Command::GreenFit,
        Command::LimitKernel,
        Command::OscDecay,
        Command::Admissible,
        Command::Disintegration,
        Command::LinkCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Weyl => "weyl",
            Command::Kernel => "kernel",
            Command::RescaleScan => "rescale-scan",
            Command::LogFit => "log-fit",
            Command::GreenFit => "green-fit",
            Command::LimitKernel => "limit-kernel",
            Command::OscDecay => "osc-decay",
            Command::Admissible => "admissible",
            Command::Disintegration => "disintegration",
            Command::LinkCheck => "link-check",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Weyl => "Count torus eigenvalues up to L against the Weyl prediction",
            Command::Kernel => "Evaluate a weighted (derivative) kernel at one pair of points",
            Command::RescaleScan => "Sup error between rescaled kernels and the limit kernel over a list of cutoffs",
            Command::LogFit => "Fit the critical diagonal kernel against ln L",
            Command::GreenFit => "Fit the critical off-diagonal kernel against -ln|x-y|",
            Command::LimitKernel => "Evaluate the rescaled limit kernel at an offset h",
            Command::OscDecay => "Sample the level-set oscillatory integral and fit its decay",
            Command::Admissible => "Check the admissibility condition over a sphere grid",
            Command::Disintegration => "Check the level-set density against a radial test integral",
            Command::LinkCheck => "Compare direct and projector-integrated weighted kernels",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Command::Weyl => {
                const P: &[ParamSpec] = &[SYMBOL, CUTOFF];
                P
            }
            Command::Kernel => {
                const P: &[ParamSpec] = &[
                    MODEL,
                    p("symbol", "symbol literal (torus model)", None),
                    p("s", "weight exponent: the kernel sums lambda^(-s)", Some("0")),
                    p("s-im", "imaginary part of -z for complex weights lambda^(-s - i s_im)", Some("0")),
                    p("x", "first point, comma separated", None),
                    p("y", "second point, comma separated", None),
                    CUTOFF,
                    ALPHA,
                    BETA,
                ];
                P
            }
            Command::RescaleScan => {
                const P: &[ParamSpec] = &[
                    SYMBOL,
                    p("s", "weight exponent", Some("0")),
                    ALPHA,
                    BETA,
                    p("w", "base point", None),
                    p("h-max", "radius of the offset grid", Some("2")),
                    p("h-step", "spacing of the square offset grid", Some("0.5")),
                    L_LIST,
                    p("resolution", "level-set resolution of the limit kernel", Some("512")),
                ];
                P
            }
            Command::LogFit => {
                const P: &[ParamSpec] = &[
                    MODEL,
                    p("symbol", "symbol literal (torus model)", None),
                    p("s", "critical exponent n/m", None),
                    p("x", "diagonal point", None),
                    L_LIST,
                ];
                P
            }
            Command::GreenFit => {
                const P: &[ParamSpec] = &[
                    SYMBOL,
                    p("s", "critical exponent n/m", None),
                    CUTOFF,
                    p("kappa", "minimum of |x-y| L^(1/m)", Some("32")),
                    p("pairs", "explicit pairs `x1,x2;y1,y2|...`", None),
                    p("base", "start of the ray of pairs", None),
                    p("direction", "direction of the ray", None),
                    p("d-min", "smallest distance; kappa L^(-1/m) when absent", None),
                    p("d-max", "largest distance", Some("0.5")),
                    p("count", "number of pairs on the ray", Some("12")),
                    p("spread-coarse", "two cutoffs for the coarse Q-hat spread", None),
                    p("spread-fine", "two cutoffs for the fine Q-hat spread", None),
                ];
                P
            }
            Command::LimitKernel => {
                const P: &[ParamSpec] = &[
                    SYMBOL,
                    p("s", "weight exponent", Some("0")),
                    ALPHA,
                    BETA,
                    p("h", "offset", None),
                    p("resolution", "level-set resolution", Some("1024")),
                ];
                P
            }
            Command::OscDecay => {
                const P: &[ParamSpec] = &[
                    SYMBOL,
                    p("h", "direction", None),
                    p("t-min", "smallest t", Some("10")),
                    p("t-max", "largest t", Some("1000")),
                    p("per-decade", "grid points per decade", Some("40")),
                ];
                P
            }
            Command::Admissible => {
                const P: &[ParamSpec] = &[
                    SYMBOL,
                    p("k0", "highest order allowed as witness", None),
                    p("resolution", "sphere-grid resolution", Some("256")),
                    p("threshold", "residual above which an order is a witness", Some("1e-8")),
                ];
                P
            }
            Command::Disintegration => {
                const P: &[ParamSpec] = &[SYMBOL, RESOLUTION, p("test", "gaussian or bump", Some("gaussian"))];
                P
            }
            Command::LinkCheck => {
                const P: &[ParamSpec] = &[
                    MODEL,
                    p("symbol", "symbol literal (torus model)", None),
                    CUTOFF,
                    p("x", "first point", None),
                    p("y", "second point", None),
                    p("weights", "comma list of power:<z>, exp:<scale>, log1p", Some("power:-1,exp:50,log1p")),
                ];
                P
            }
        }
    }

    /// Declaration of `key`, including the output parameters.
    pub fn param(self, key: &str) -> Option<&'static ParamSpec> {
        self.params().iter().chain(OUTPUT_PARAMS.iter()).find(|s| s.key == key)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::invalid("command", format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Line {
    /// Blank or comment line, kept verbatim.
    Other(String),
    Entry {
        key: String,
        value: String,
        raw: Option<String>,
    },
}

/// A command with its parameters, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    command: Command,
    lines: Vec<Line>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            lines: vec![
                Line::Entry { key: "command".into(), value: command.name().into(), raw: None },
                Line::Other(String::new()),
            ],
        }
    }

    pub fn command(&self) -> Command {
        self.command
    }

    /// Parses config text; unknown or repeated keys are rejected.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut lines = Vec::new();
        let mut command = None;
        for (number, raw) in text.split('\n').enumerate() {
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                lines.push(Line::Other(raw.to_owned()));
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| CliError::invalid("config", format!("line {}: expected `key = value`", number + 1)))?;
            let (key, value) = (key.trim().to_owned(), value.trim().to_owned());
            if key == "command" {
                if command.is_some() {
                    return Err(CliError::invalid("config", format!("line {}: repeated command", number + 1)));
                }
                command = Some(value.parse::<Command>()?);
            }
            lines.push(Line::Entry { key, value, raw: Some(raw.to_owned()) });
        }
        let command = command.ok_or_else(|| CliError::invalid("config", "missing `command = ...` line"))?;
        let config = ExperimentConfig { command, lines };
        let mut seen = Vec::new();
        for (key, _) in config.entries() {
            if command.param(key).is_none() {
                return Err(CliError::invalid("config", format!("unknown key `{key}` for {command}")));
            }
            if seen.contains(&key) {
                return Err(CliError::invalid("config", format!("repeated key `{key}`")));
            }
            seen.push(key);
        }
        Ok(config)
    }

    /// Parameter entries (without the command line) in file order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.lines.iter().filter_map(|l| match l {
            Line::Entry { key, value, .. } if key != "command" => Some((key.as_str(), value.as_str())),
            _ => None,
        })
    }

    /// Explicitly set value of `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    /// Sets `key`, replacing an existing entry in place or appending.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if self.command.param(key).is_none() {
            return Err(CliError::invalid(key, format!("not a parameter of {}", self.command)));
        }
        let value = value.trim().to_owned();
        for line in &mut self.lines {
            if let Line::Entry { key: k, value: v, raw } = line {
                if k == key {
                    if *v != value {
                        *v = value;
                        *raw = None;
                    }
                    return Ok(());
                }
            }
        }
        // keep a trailing newline at the end of the file
        let at = match self.lines.last() {
            Some(Line::Other(s)) if s.is_empty() => self.lines.len() - 1,
            _ => self.lines.len(),
        };
        self.lines.insert(at, Line::Entry { key: key.to_owned(), value, raw: None });
        Ok(())
    }

    /// Text form; unmodified lines are reproduced exactly.
    pub fn serialize(&self) -> String {
        let lines: Vec<String> = self
            .lines
            .iter()
            .map(|l| match l {
                Line::Other(s) => s.clone(),
                Line::Entry { raw: Some(raw), .. } => raw.clone(),
                Line::Entry { key, value, raw: None } => format!("{key} = {value}"),
            })
            .collect();
        lines.join("\n")
    }
}
