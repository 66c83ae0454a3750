//! Command-line arguments and their validation.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use heiscone_core::gallery::{ExampleKind, ExampleSpec};
use heiscone_core::ConeKind;

use crate::error::CliError;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "HEISCONE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Pairwise flat cone check.
    CheckFlat,
    /// Pairwise full cone check, optionally around one base point.
    CheckFull,
    /// Largest flat aperture, optionally over rotations.
    Aperture,
    /// The flat-to-full argument, stage by stage.
    Pipeline,
    /// Sampled checks of the three cone inclusions.
    Lemmas,
    /// Compare a gallery fixture with its expected statuses.
    Gallery,
    /// Write a cloud or a cone surface as `x,y,z` CSV.
    Export,
}

/// Aperture given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaArg {
    Value(f64),
    /// The measured flat aperture, capped.
    Auto,
}

impl FromStr for AlphaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(AlphaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(AlphaArg::Value(v)),
            _ => Err(format!("`{s}` is neither a positive number nor `auto`")),
        }
    }
}

/// Parses `cubic`, `punctured`, `vertical`, `constant:<c>`, `linear:<slope>`.
pub fn parse_gallery(s: &str) -> Result<ExampleKind, String> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let number = |a: Option<&str>| -> Result<f64, String> {
        let a = a.ok_or_else(|| format!("`{name}` needs a parameter, e.g. `{name}:0.5`"))?;
        a.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{a}` is not a finite number"))
    };
    let plain = |kind| match arg {
        None => Ok(kind),
        Some(_) => Err(format!("`{name}` takes no parameter")),
    };
    match name {
        "cubic" => plain(ExampleKind::CubicCurve),
        "punctured" => plain(ExampleKind::PuncturedPlane),
        "vertical" => plain(ExampleKind::VerticalPlane),
        "constant" => Ok(ExampleKind::ConstantGraph(number(arg)?)),
        "linear" => Ok(ExampleKind::LinearGraph(number(arg)?)),
        _ => Err(format!("unknown gallery fixture `{name}`")),
    }
}

/// A cone surface for `export`: `kind:aperture[:radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeArg {
    pub kind: ConeKind,
    pub aperture: f64,
    pub radius: f64,
}

fn parse_cone(s: &str) -> Result<ConeArg, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let kind = match parts[0] {
        "full" => ConeKind::Full,
        "flat" => ConeKind::Flat,
        "truncated" => ConeKind::TruncatedFull,
        "vertical" => ConeKind::Vertical,
        k => {
            return Err(format!(
                "unknown cone `{k}`; use full, flat, truncated or vertical"
            ))
        }
    };
    let num = |i: usize, default: Option<f64>| -> Result<f64, String> {
        match parts.get(i) {
            Some(t) => t
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a positive number")),
            None => default.ok_or_else(|| format!("cone `{s}` needs an aperture")),
        }
    };
    if parts.len() > 3 {
        return Err(format!("cone `{s}` has too many fields"));
    }
    Ok(ConeArg {
        kind,
        aperture: num(1, None)?,
        radius: num(2, Some(1.0))?,
    })
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| format!("`{s}` is not a point `x,y,z`"))?;
    <[f64; 3]>::try_from(v).map_err(|_| format!("`{s}` is not a point `x,y,z`"))
}

#[derive(Debug, Parser)]
#[command(
    name = "heiscone",
    version,
    about = "Cone-property checks for sampled surfaces in the Heisenberg group"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Surface file: CSV or JSON with fields `eta,tau,phi` or `x,y,z`.
    #[arg(long, conflicts_with = "gallery")]
    input: Option<PathBuf>,
    /// Gallery fixture: cubic, punctured, vertical, constant:<c>, linear:<slope>.
    #[arg(long, value_parser = parse_gallery)]
    gallery: Option<ExampleKind>,
    /// Nodes per axis of the gallery fixture.
    #[arg(long)]
    nodes: Option<usize>,
    /// Aperture, or `auto` to use the measured flat aperture.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<AlphaArg>,
    /// Cap applied to `--alpha auto`.
    #[arg(long, default_value_t = 1.0)]
    alpha_cap: f64,
    /// Margin applied to every strict inequality.
    #[arg(long, default_value_t = 1e-9, allow_hyphen_values = true)]
    tol: f64,
    /// Seed for sampled checks (overridden by HEISCONE_SEED).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report or CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Samples per sampled check.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Rotation angles searched by `aperture`; 0 skips the search.
    #[arg(long, default_value_t = 0)]
    angles: usize,
    /// Base point `x,y,z` restricting `check-full`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    base: Option<[f64; 3]>,
    /// Slab half-width around `--base`; without it only `--base` is tested.
    #[arg(long)]
    radius: Option<f64>,
    /// Cone surface for `export`: full|flat|truncated|vertical:<aperture>[:<radius>].
    #[arg(long, value_parser = parse_cone)]
    cone: Option<ConeArg>,
    /// Shears sampled by the pipeline.
    #[arg(long, default_value_t = 21)]
    n_t: usize,
    /// Base points per axis used by the pipeline.
    #[arg(long, default_value_t = 3)]
    n_p: usize,
    /// Values of eta swept by the pipeline.
    #[arg(long, default_value_t = 101)]
    n_eta: usize,
    /// Cap on samples entering pairwise checks.
    #[arg(long, default_value_t = 2500)]
    n_pairs: usize,
}

/// Where the surface comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Gallery(ExampleSpec),
}

/// Grid densities of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grids {
    pub n_t: usize,
    pub n_p: usize,
    pub n_eta: usize,
    pub n_pairs: usize,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Option<Source>,
    pub alpha: Option<AlphaArg>,
    pub alpha_cap: f64,
    pub tol: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub samples: usize,
    pub angles: usize,
    pub base: Option<[f64; 3]>,
    pub radius: Option<f64>,
    pub cone: Option<ConeArg>,
    pub grids: Grids,
}

/// Parses `argv` (program name first), reading [`SEED_ENV`].
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    parse_args_with_seed(argv, std::env::var(SEED_ENV).ok())
}

/// As [`parse_args`] with the environment seed passed explicitly.
pub fn parse_args_with_seed<I, T>(argv: I, env_seed: Option<String>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            CliError::Help(e.render().to_string())
        }
        _ => CliError::Usage(e.render().to_string()),
    })?;
    let usage = |m: &str| {
        Err(CliError::Usage(format!(
            "{m}\n\nRun `heiscone --help` for usage."
        )))
    };
    let seed = match env_seed {
        Some(s) => match s.trim().parse() {
            Ok(v) => v,
            Err(_) => {
                return usage(&format!(
                    "{SEED_ENV}=`{s}` is not an unsigned 64-bit integer"
                ))
            }
        },
        None => args.seed,
    };
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return usage("--tol must be finite and non-negative");
    }
    if !(args.alpha_cap > 0.0 && args.alpha_cap.is_finite()) {
        return usage("--alpha-cap must be positive");
    }
    if args.radius.is_some_and(|r| !(r > 0.0 && r.is_finite())) {
        return usage("--radius must be positive");
    }
    if args.radius.is_some() && args.base.is_none() {
        return usage("--radius needs --base");
    }
    if args.samples == 0 || args.n_t == 0 || args.n_p == 0 || args.n_eta < 2 || args.n_pairs < 2 {
        return usage("sample and grid counts must be positive (--n-eta and --n-pairs at least 2)");
    }
    if args.nodes.is_some_and(|n| n < 2) {
        return usage("--nodes must be at least 2");
    }
    let source = match (args.input, args.gallery) {
        (Some(p), None) => Some(Source::File(p)),
        (None, Some(kind)) => {
            let mut spec = ExampleSpec::new(kind);
            if let Some(n) = args.nodes {
                spec.nodes = n;
            }
            spec.seed = seed;
            Some(Source::Gallery(spec))
        }
        _ => None,
    };
    let cmd = args.command;
    let needs_source =
        !matches!(cmd, Command::Lemmas) && !(cmd == Command::Export && args.cone.is_some());
    if needs_source && source.is_none() {
        return usage("this command needs --input or --gallery");
    }
    if cmd == Command::Gallery && !matches!(source, Some(Source::Gallery(_))) {
        return usage("`gallery` needs --gallery");
    }
    if cmd == Command::Export && args.cone.is_some() && source.is_some() {
        return usage("`export` takes either --cone or a surface, not both");
    }
    if matches!(
        cmd,
        Command::CheckFlat | Command::CheckFull | Command::Pipeline
    ) && args.alpha.is_none()
    {
        return usage("this command needs --alpha (a positive number or `auto`)");
    }
    Ok(RunConfig {
        command: cmd,
        source,
        alpha: args.alpha,
        alpha_cap: args.alpha_cap,
        tol: args.tol,
        seed,
        output: args.output,
        samples: args.samples,
        angles: args.angles,
        base: args.base,
        radius: args.radius,
        cone: args.cone,
        grids: Grids {
            n_t: args.n_t,
            n_p: args.n_p,
            n_eta: args.n_eta,
            n_pairs: args.n_pairs,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_args_with_seed(
            std::iter::once("heiscone").chain(args.split_whitespace()),
            None,
        )
    }

    #[test]
    fn check_flat_defaults() {
        let c = parse("check-flat --input s.csv --alpha 1.0").unwrap();
        assert_eq!(c.command, Command::CheckFlat);
        assert_eq!(c.alpha, Some(AlphaArg::Value(1.0)));
        assert_eq!(c.tol, 1e-9);
        assert_eq!(c.source, Some(Source::File("s.csv".into())));
    }

    #[test]
    fn pipeline_auto_alpha() {
        let c = parse("pipeline --gallery constant:0.5 --alpha auto").unwrap();
        assert_eq!(c.alpha, Some(AlphaArg::Auto));
        assert!(
            matches!(c.source, Some(Source::Gallery(ref s)) if s.kind == ExampleKind::ConstantGraph(0.5))
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        for bad in [
            "check-full --alpha -1 --gallery cubic",
            "check-full --alpha -1",
            "check-flat --gallery cubic",
            "check-flat --alpha 1",
            "pipeline --gallery nope --alpha 1",
            "check-flat --gallery cubic --alpha 1 --bogus",
            "frobnicate",
            "check-flat --gallery cubic --alpha 1 --tol -1",
            "export --cone full:0",
            "gallery --input s.csv",
        ] {
            let e = parse(bad).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn env_seed_overrides_flag() {
        let argv = ["heiscone", "lemmas", "--seed", "3"];
        assert_eq!(parse_args_with_seed(argv, None).unwrap().seed, 3);
        assert_eq!(
            parse_args_with_seed(argv, Some("9".into())).unwrap().seed,
            9
        );
        assert_eq!(
            parse_args_with_seed(argv, Some("x".into()))
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn gallery_and_cone_specs() {
        assert_eq!(
            parse_gallery("linear:-2").unwrap(),
            ExampleKind::LinearGraph(-2.0)
        );
        assert!(parse_gallery("cubic:3").is_err());
        assert!(parse_gallery("constant").is_err());
        let c = parse_cone("truncated:0.5:2").unwrap();
        assert_eq!(
            (c.kind, c.aperture, c.radius),
            (ConeKind::TruncatedFull, 0.5, 2.0)
        );
        assert_eq!(parse_point("1, -2,3").unwrap(), [1.0, -2.0, 3.0]);
        assert!(parse_point("1,2").is_err());
    }
}
