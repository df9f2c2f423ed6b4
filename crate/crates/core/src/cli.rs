//! The `squeeze` command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 point or parameter outside
//! the domain, 4 verification failure, 1 anything else.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::domains::{Factor, FactorKind, ProductDomain, ProductPoint};
use crate::error::{Error, Result};
use crate::report::{
    bound_row, fmt_num, fmt_opt, limit_rows, search_row, write_csv, BOUND_HEADER, LIMIT_HEADER, PROFILE_HEADER,
    SEARCH_HEADER,
};
use crate::search::{search_lower_bound, FamilySpec, OptimizeOptions, SearchOptions};
use crate::spec_file::{load_domain_spec, parse_point};
use crate::squeezing::{
    annulus_clearance_lower_bound, boundary_limit_profile, bounds, exact_t, log_spaced_path, BoundsOptions, Side,
};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "squeeze", version, about = "Polydisk squeezing function on planar product domains")]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Boundary samples per circle when a witness is re-scored by sampling.
    #[arg(long, global = true, env = "SQUEEZE_SAMPLES", default_value_t = 4096)]
    samples: usize,
    /// Seed for the randomized verification checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds and closed form at one point.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Coordinates as "re,im;re,im;...".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Bounds along a radial sweep of one coordinate.
    Profile {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Index of the planar factor whose modulus is swept.
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Run self-check suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Lower bound on A_r x D as z1 approaches a boundary circle.
    Limit {
        #[arg(long)]
        r: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Outer)]
        side: SideArg,
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
    /// Best member of an explicit embedding family.
    Search {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
        family: FamilyArg,
        /// Number of optimizer seeds.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Inclusion,
    Reflection,
    Both,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::FamilyMismatch(_) | Error::EmptyInterval { .. } | Error::InvalidIndex { .. } => EXIT_USAGE,
        Error::Domain(_) | Error::BasePoint { .. } => EXIT_DOMAIN,
        _ => EXIT_OTHER,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut sink: Box<dyn Write + '_> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Parse(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(&mut *stdout),
    };
    let code = match &cli.command {
        Command::Eval { spec, point } => cmd_eval(cli, spec, point, &mut sink),
        Command::Profile { spec, point, axis, from, to, steps } => {
            cmd_profile(cli, spec, point, *axis, (*from, *to), *steps, &mut sink)
        }
        Command::Verify { suite } => cmd_verify(suite, cli.seed, &mut sink),
        Command::Limit { r, side, steps } => cmd_limit(*r, *side, *steps, &mut sink),
        Command::Search { spec, point, family, budget } => cmd_search(cli, spec, point, *family, *budget, &mut sink),
    }?;
    sink.flush().map_err(|e| Error::Parse(format!("write failed: {e}")))?;
    Ok(code)
}

fn search_options(cli: &Cli) -> SearchOptions {
    SearchOptions { search_samples: cli.samples, final_samples: cli.samples, ..SearchOptions::default() }
}

fn bounds_options(cli: &Cli) -> BoundsOptions {
    BoundsOptions { search: true, search_options: search_options(cli) }
}

fn load(spec: &Path, point: &str) -> Result<(ProductDomain, ProductPoint)> {
    let d = load_domain_spec(spec)?;
    let coords = parse_point(point)?;
    let z = ProductPoint::from_flat(&d, &coords)?;
    Ok((d, z))
}

fn cmd_eval(cli: &Cli, spec: &Path, point: &str, out: &mut dyn Write) -> Result<i32> {
    let (d, z) = load(spec, point)?;
    let rep = bounds(&d, &z, &bounds_options(cli))?;
    write_csv(out, &BOUND_HEADER, &[bound_row(&rep)])?;
    Ok(EXIT_OK)
}

fn cmd_profile(
    cli: &Cli,
    spec: &Path,
    point: &str,
    axis: usize,
    (from, to): (f64, f64),
    steps: usize,
    out: &mut dyn Write,
) -> Result<i32> {
    if steps == 0 {
        return Err(Error::Parse("--steps must be at least 1".into()));
    }
    if !(from.is_finite() && to.is_finite()) || (steps > 1 && from == to) {
        return Err(Error::EmptyInterval { lo: from, hi: to });
    }
    let d = load_domain_spec(spec)?;
    let base = parse_point(point)?;
    let len = d.len();
    let Some(Factor::Planar(f)) = d.factors().get(axis) else {
        return Err(match d.factors().get(axis) {
            None => Error::InvalidIndex { index: axis, len },
            Some(_) => Error::Parse(format!("axis {axis} is a ball factor; profiles sweep a planar coordinate")),
        });
    };
    let annulus_r = match (f.kind(), len) {
        (FactorKind::Annulus { r }, 2)
            if matches!(d.factors()[1 - axis].as_planar().map(|g| g.kind()), Some(FactorKind::UnitDisk)) =>
        {
            Some(*r)
        }
        _ => None,
    };
    let offset: usize = d.factors()[..axis].iter().map(Factor::dim).sum();
    let dir = base
        .get(offset)
        .filter(|c| c.norm() > 0.0)
        .map(|c| c / c.norm())
        .unwrap_or(num_complex::Complex64::new(1.0, 0.0));
    let opts = bounds_options(cli);
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let s = if steps == 1 { 0.0 } else { k as f64 / (steps - 1) as f64 };
        let param = from + (to - from) * s;
        let mut coords = base.clone();
        let slot = coords
            .get_mut(offset)
            .ok_or_else(|| Error::Parse(format!("point has no coordinate for axis {axis}")))?;
        *slot = dir * param;
        let z = ProductPoint::from_flat(&d, &coords)?;
        let rep = bounds(&d, &z, &opts)?;
        let clearance = annulus_r.map(|r| annulus_clearance_lower_bound(r, coords[offset])).transpose()?;
        rows.push(vec![fmt_num(param), fmt_num(rep.lower), fmt_num(rep.upper), fmt_opt(rep.exact), fmt_opt(clearance)]);
    }
    write_csv(out, &PROFILE_HEADER, &rows)?;
    Ok(EXIT_OK)
}

fn cmd_verify(suite: &str, seed: u64, out: &mut dyn Write) -> Result<i32> {
    let checks = run_suite(suite, seed)?;
    let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
    for c in &checks {
        writeln!(out, "{c}").map_err(io)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "summary\t{suite}\t{} passed\t{failed} failed", checks.len() - failed).map_err(io)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_limit(r: f64, side: SideArg, steps: usize, out: &mut dyn Write) -> Result<i32> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parse(format!("--r must lie in (0, 1), got {r}")));
    }
    if steps == 0 {
        return Err(Error::Parse("--steps must be at least 1".into()));
    }
    let side = match side {
        SideArg::Outer => Side::Outer,
        SideArg::Inner => Side::Inner,
    };
    let path = log_spaced_path(r, side, steps)?;
    let prof = boundary_limit_profile(r, &path)?;
    write_csv(out, &LIMIT_HEADER, &limit_rows(&prof))?;
    Ok(EXIT_OK)
}

fn cmd_search(cli: &Cli, spec: &Path, point: &str, family: FamilyArg, budget: usize, out: &mut dyn Write) -> Result<i32> {
    if budget == 0 {
        return Err(Error::Parse("--budget must be positive".into()));
    }
    let (d, z) = load(spec, point)?;
    let fam = match family {
        FamilyArg::Inclusion => FamilySpec::inclusion_only(&d),
        FamilyArg::Reflection => FamilySpec::reflection_only(&d),
        FamilyArg::Both => FamilySpec::standard(&d),
    };
    let opts = SearchOptions { optimize: OptimizeOptions { seeds: budget, ..OptimizeOptions::default() }, ..search_options(cli) };
    let res = search_lower_bound(&d, &z, &fam, &opts)?;
    let exact = match exact_t(&d, &z) {
        Ok(rep) => rep.exact,
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    write_csv(out, &SEARCH_HEADER, &[search_row(&res, exact)])?;
    Ok(EXIT_OK)
}
