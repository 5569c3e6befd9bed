//! Flag parsing shared by the sequence-driven commands.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};
use geomean_core::stieltjes::MAX_DERIVATIVE_ORDER;
use geomean_core::{Complex64, PositiveSequence, QuadratureOptions};

use crate::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ORDER: usize = 10;
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// Common flags as clap sees them, before validation.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Comma-separated positive decimals, e.g. `1,4`.
    #[arg(long, value_parser = parse_sequence)]
    pub seq: PositiveSequence,

    /// Real or complex shift: `re`, `re+imi` or `re-imi`.
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_shift)]
    pub shift: Complex64,

    /// Relative quadrature tolerance.
    #[arg(long, env = "MEANS_TOL", default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,

    /// Highest derivative order to check (at most 20).
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    pub max_order: usize,

    /// Grid size for sampled output.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,

    /// Shorthand for `--format json`.
    #[arg(long, conflicts_with = "format")]
    pub json: bool,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A validated invocation of `eval`, `verify` or `density`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sequence: PositiveSequence,
    pub shift: Complex64,
    pub tolerance: f64,
    pub max_order: usize,
    pub samples: usize,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Validates parsed flags. `default_format` applies when neither
    /// `--json` nor `--format` is given.
    pub fn from_args(args: CommonArgs, default_format: OutputFormat) -> Result<Self, CliError> {
        let opts = QuadratureOptions::with_tolerance(args.tol);
        opts.validate().map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
        if args.max_order == 0 || args.max_order > MAX_DERIVATIVE_ORDER {
            return Err(CliError::Usage(format!(
                "--max-order must be in 1..={MAX_DERIVATIVE_ORDER}, got {}",
                args.max_order
            )));
        }
        if args.samples < 2 {
            return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
        }
        let output_format = match (args.json, args.format) {
            (true, _) => OutputFormat::Json,
            (false, Some(f)) => f,
            (false, None) => default_format,
        };
        Ok(Self {
            sequence: args.seq,
            shift: args.shift,
            tolerance: args.tol,
            max_order: args.max_order,
            samples: args.samples,
            output_format,
            output_path: args.out,
        })
    }

    /// Parses flags alone, without a subcommand or program name.
    pub fn parse_flags<I, S>(flags: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        #[derive(Parser)]
        #[command(no_binary_name = true)]
        struct Flags {
            #[command(flatten)]
            common: CommonArgs,
        }
        let parsed = Flags::try_parse_from(flags).map_err(|e| CliError::Usage(e.to_string()))?;
        Self::from_args(parsed.common, OutputFormat::Text)
    }

    /// The flags that reproduce this configuration.
    pub fn to_flags(&self) -> Vec<String> {
        let mut flags = vec![
            "--seq".to_owned(),
            format_sequence(&self.sequence),
            "--shift".to_owned(),
            format_shift(self.shift),
            "--tol".to_owned(),
            format!("{:e}", self.tolerance),
            "--max-order".to_owned(),
            self.max_order.to_string(),
            "--samples".to_owned(),
            self.samples.to_string(),
            "--format".to_owned(),
            self.output_format.as_str().to_owned(),
        ];
        if let Some(path) = &self.output_path {
            flags.push("--out".to_owned());
            flags.push(path.display().to_string());
        }
        flags
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions::with_tolerance(self.tolerance)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_flags().join(" "))
    }
}

pub fn parse_sequence(s: &str) -> Result<PositiveSequence, String> {
    if s.is_empty() {
        return Err("sequence is empty".to_owned());
    }
    let values = s
        .split(',')
        .map(|part| {
            if part.is_empty() || part.trim() != part {
                return Err(format!("malformed entry {part:?}"));
            }
            part.parse::<f64>().map_err(|_| format!("not a decimal: {part:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PositiveSequence::new(values).map_err(|e| e.to_string())
}

pub fn format_sequence(a: &PositiveSequence) -> String {
    a.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("not a finite decimal: {s:?}")),
    }
}

/// `re`, `re+imi` or `re-imi`.
pub fn parse_shift(s: &str) -> Result<Complex64, String> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_finite(s)?, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| format!("complex shift must look like a+bi or a-bi, got {s:?}"))?;
    let re = parse_finite(&body[..split])?;
    let im_text = &body[split..];
    if im_text.len() < 2 {
        return Err(format!("missing imaginary magnitude in {s:?}"));
    }
    let im = parse_finite(im_text)?;
    Ok(Complex64::new(re, im))
}

pub fn format_shift(z: Complex64) -> String {
    // normalise -0.0 so that formatting is stable
    let re = z.re + 0.0;
    if z.im == 0.0 {
        re.to_string()
    } else if z.im < 0.0 {
        format!("{re}-{}i", -z.im)
    } else {
        format!("{re}+{}i", z.im)
    }
}
