mod table;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mp2_core::characters::{AdditiveCharacter, CharacterJson, UnitCharacter};
use mp2_core::checks::{descriptor_grid, run_suite, CheckConfig, Grid, SUITES};
use mp2_core::cosets::coset_oracle;
use mp2_core::gauss::{gauss_g_oracle, gauss_h_oracle};
use mp2_core::newform::{conductor, conductor_closed, conductor_min, dim_fixed, newform_profile, LevelQuery, ReprDescriptor};
use mp2_core::padic::{FieldConfig, ScaledPAdic, SquareClass};
use mp2_core::par::Exec;
use mp2_core::report::{Report, SCHEMA_VERSION};
use mp2_core::schroedinger::{even_weil_fixed_dim_oracle, WeilRepConfig};
use mp2_core::Error;

use table::{render_report, Format, Table};

const PRECISION: u32 = 8;

/// Conductors, fixed-space dimensions and verification suites for genuine
/// representations of the metaplectic cover of SL2(Q_p).
#[derive(Parser)]
#[command(name = "mp2", version)]
struct Cli {
    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Record elapsed time in reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gauss sums.
    Gauss {
        #[command(subcommand)]
        cmd: GaussCmd,
    },
    /// Brute-force oracles.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Verification suites: gauss, hilbert, weil-index, cocycle, splitting, cosets, ps, weil, steinberg, rs-sum, theta, all.
    Check(CheckArgs),
    /// Dimension, newform and conductor tables.
    Table {
        #[command(subcommand)]
        cmd: TableCmd,
    },
    /// Conductor c^eps_eta of one representation.
    Conductor(ReprArgs),
}

#[derive(Subcommand)]
enum GaussCmd {
    /// Evaluates g(chi, psi) or h(chi, psi) by summation.
    Eval {
        #[arg(long, value_parser = ["g", "h"], default_value = "g")]
        variant: String,
        #[arg(long)]
        p: Option<u64>,
        /// Unit character: `LEVEL:EXP` or a character JSON object.
        #[arg(long)]
        chi: String,
        /// Additive character: conductor `C` or `C:UNIT` (shift UNIT * p^-C), or a character JSON object.
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Double cosets B \ SL2(Z/p^m) / K_m.
    Cosets {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
    },
    /// Even Weil fixed-space dimension from the Schrödinger model.
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        eps: u8,
        /// Square class: 1, xi, pi, xipi.
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 0)]
        eta_conductor: u32,
        #[arg(long, default_value_t = 0)]
        eta_exp: i64,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Args)]
struct CheckArgs {
    suite: String,
    /// Primes to run; repeatable. Defaults to 3 and 5.
    #[arg(long)]
    p: Vec<u64>,
    #[arg(long, default_value = "default")]
    grid: String,
    /// Level bound; `--m` is accepted as an alias.
    #[arg(long, visible_alias = "m")]
    m_max: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run cases one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ReprArgs {
    #[arg(long)]
    p: u64,
    /// `ps:L:E[:ROOT[:QEXP]]`, `even-weil:A`, `odd-weil:A`, `steinberg:A`, `sc:DELTA:C:DEFECT:SIGN[:oddweil]`.
    #[arg(long)]
    repr: String,
    #[arg(long, default_value_t = 0)]
    eps: u8,
    /// `LEVEL:EXP` or a character JSON object; trivial by default.
    #[arg(long)]
    eta: Option<String>,
}

#[derive(Subcommand)]
enum TableCmd {
    /// dim pi^{K_m}_eta for m = 0..=m_max.
    Dims {
        #[command(flatten)]
        repr: ReprArgs,
        #[arg(long, default_value_t = 6)]
        m_max: u32,
    },
    /// Newform dimensions.
    Newforms {
        #[command(flatten)]
        repr: ReprArgs,
    },
    /// Conductors over a descriptor grid.
    Conductors {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "default")]
        grid: String,
        /// Restrict to one family: ps, even-weil, odd-weil, steinberg, sc.
        #[arg(long)]
        family: Option<String>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::ResourceLimit(_)) { 3 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn unit_char(s: &str, p: Option<u64>) -> Result<UnitCharacter, Failure> {
    if s.trim_start().starts_with('{') {
        let j: CharacterJson = serde_json::from_str(s).map_err(|e| invalid(format!("bad character JSON: {e}")))?;
        if let Some(p) = p {
            if p != j.p {
                return Err(invalid("character prime differs from --p"));
            }
        }
        return Ok(j.to_unit()?);
    }
    let p = p.ok_or_else(|| invalid("--p is required for LEVEL:EXP characters"))?;
    FieldConfig::new(p, 3)?;
    let (l, e) = s.split_once(':').ok_or_else(|| invalid(format!("bad character '{s}'")))?;
    let l: u32 = l.parse().map_err(|_| invalid(format!("bad level '{l}'")))?;
    let e: i64 = e.parse().map_err(|_| invalid(format!("bad exponent '{e}'")))?;
    if l > 6 {
        return Err(invalid("level too large"));
    }
    Ok(UnitCharacter::new(p, l, e))
}

fn additive_char(s: &str, p: Option<u64>) -> Result<AdditiveCharacter, Failure> {
    if s.trim_start().starts_with('{') {
        let j: CharacterJson = serde_json::from_str(s).map_err(|e| invalid(format!("bad character JSON: {e}")))?;
        return Ok(j.to_additive(PRECISION)?);
    }
    let p = p.ok_or_else(|| invalid("--p is required for conductor-form additive characters"))?;
    FieldConfig::new(p, 3)?;
    let (c, u) = s.split_once(':').unwrap_or((s, "1"));
    let c: i64 = c.parse().map_err(|_| invalid(format!("bad conductor '{c}'")))?;
    let u: u64 = u.parse().map_err(|_| invalid(format!("bad unit '{u}'")))?;
    if u.is_multiple_of(p) {
        return Err(Error::NotAUnit.into());
    }
    if c.abs() > PRECISION as i64 {
        return Err(invalid("conductor out of range"));
    }
    Ok(AdditiveCharacter::with_shift(ScaledPAdic::from_parts(p, -c, u, PRECISION)))
}

fn repr_query(a: &ReprArgs) -> Result<(ReprDescriptor, UnitCharacter), Failure> {
    FieldConfig::new(a.p, 3)?;
    if a.eps > 1 {
        return Err(invalid("eps must be 0 or 1"));
    }
    let pi = ReprDescriptor::parse(&a.repr, a.p)?;
    let eta = match &a.eta {
        Some(s) => unit_char(s, Some(a.p))?,
        None => UnitCharacter::trivial(a.p),
    };
    Ok((pi, eta))
}

enum Output {
    Json(Value),
    Table(Table),
    Report(Report),
}

fn run(cli: &Cli, exec: Exec) -> Result<(Output, bool), Failure> {
    Ok(match &cli.cmd {
        Cmd::Gauss { cmd: GaussCmd::Eval { variant, p, chi, psi } } => {
            let chi = unit_char(chi, *p)?;
            let psi = additive_char(psi, p.or(Some(chi.p)))?;
            if psi.p() != chi.p {
                return Err(invalid("chi and psi have different primes"));
            }
            let v = if variant == "g" { gauss_g_oracle(&chi, &psi)? } else { gauss_h_oracle(&chi, &psi)? };
            let mag = v.mag_sq_rational().map_or_else(|| v.mag_sq().to_string(), |r| r.to_string());
            let out = json!({
                "schema": SCHEMA_VERSION,
                "command": "gauss eval",
                "inputs": { "variant": variant, "chi": CharacterJson::from_unit(&chi), "psi": CharacterJson::from_additive(&psi) },
                "value": v.to_string(),
                "mag_sq": mag,
                "zero": v.is_zero(),
            });
            (Output::Json(out), true)
        }
        Cmd::Oracle { cmd: OracleCmd::Cosets { p, m } } => {
            FieldConfig::new(*p, 3)?;
            let r = coset_oracle(*p, *m, exec)?;
            let verified = r.pass();
            let out = json!({
                "schema": SCHEMA_VERSION,
                "command": "oracle cosets",
                "inputs": { "p": p, "m": m },
                "count": r.count,
                "reps": r.reps,
                "verified": verified,
            });
            (Output::Json(out), verified)
        }
        Cmd::Oracle { cmd: OracleCmd::Weil { p, eps, chi, eta_conductor, eta_exp, m } } => {
            FieldConfig::new(*p, 3)?;
            if *eps > 1 {
                return Err(invalid("eps must be 0 or 1"));
            }
            let chi = SquareClass::parse(chi)?;
            let eta = UnitCharacter::new(*p, *eta_conductor, *eta_exp);
            let oracle = even_weil_fixed_dim_oracle(&WeilRepConfig { p: *p, eps: *eps, chi, eta }, *m)?;
            let formula = dim_fixed(&ReprDescriptor::EvenWeil { p: *p, chi }, &LevelQuery { eps: *eps, eta, m: *m })?;
            let matched = formula.known() == Some(oracle as u64);
            let out = json!({
                "schema": SCHEMA_VERSION,
                "command": "oracle weil",
                "inputs": { "p": p, "eps": eps, "chi": chi.name(), "eta": CharacterJson::from_unit(&eta), "m": m },
                "dim_oracle": oracle,
                "dim_formula": formula.to_string(),
                "match": matched,
            });
            (Output::Json(out), matched)
        }
        Cmd::Check(a) => {
            let primes = if a.p.is_empty() { vec![3, 5] } else { a.p.clone() };
            for &p in &primes {
                FieldConfig::new(p, 3)?;
            }
            let cfg = CheckConfig {
                primes,
                grid: Grid::named(&a.grid)?,
                m_max: a.m_max,
                samples: a.samples,
                seed: a.seed,
                exec: if a.sequential { Exec::Sequential } else { exec },
            };
            let t = Instant::now();
            let mut r = if a.suite == "all" {
                let mut cases = Vec::new();
                let mut skipped = Vec::new();
                let mut truncated = None;
                for s in SUITES.iter().filter(|s| **s != "all") {
                    let sub = run_suite(s, &cfg)?;
                    cases.extend(sub.cases.into_iter().map(|mut c| {
                        c.key = format!("{s}/{}", c.key);
                        c
                    }));
                    skipped.extend(sub.skipped.into_iter().map(|mut k| {
                        k.key = format!("{s}/{}", k.key);
                        k
                    }));
                    truncated = truncated.or(sub.truncated);
                }
                let mut r = Report::new("all", serde_json::to_value(&cfg).expect("config"), cases, skipped);
                r.truncated = truncated;
                r
            } else {
                run_suite(&a.suite, &cfg)?
            };
            if cli.timings {
                r.elapsed_ms = Some(t.elapsed().as_millis() as u64);
            }
            if let Some(msg) = r.truncated.clone() {
                emit(cli, &Output::Report(r))?;
                return Err(Failure { code: 3, msg: format!("resource limit: {msg}") });
            }
            let pass = r.pass();
            (Output::Report(r), pass)
        }
        Cmd::Table { cmd: TableCmd::Dims { repr, m_max } } => {
            let (pi, eta) = repr_query(repr)?;
            let config = json!({ "p": repr.p, "repr": pi.to_string(), "eps": repr.eps, "eta": eta.to_string(), "m_max": m_max });
            let mut t = Table::new("dims", config, &["m", "dim"]);
            for m in 0..=*m_max {
                let d = dim_fixed(&pi, &LevelQuery { eps: repr.eps, eta, m })?;
                t.push(vec![m.to_string(), d.to_string()]);
            }
            (Output::Table(t), true)
        }
        Cmd::Table { cmd: TableCmd::Newforms { repr } } => {
            let (pi, eta) = repr_query(repr)?;
            let config = json!({ "p": repr.p, "repr": pi.to_string(), "eps": repr.eps, "eta": eta.to_string() });
            let prof = newform_profile(&pi, repr.eps, &eta)?;
            let mut t = Table::new("newforms", config, &["m", "dim_new"]);
            for (m, d) in &prof.dims_new {
                t.push(vec![m.to_string(), d.to_string()]);
            }
            (Output::Table(t), true)
        }
        Cmd::Table { cmd: TableCmd::Conductors { p, grid, family } } => {
            FieldConfig::new(*p, 3)?;
            let g = Grid::named(grid)?;
            let fam = family.as_deref();
            if let Some(f) = fam {
                if !["ps", "even-weil", "odd-weil", "steinberg", "sc"].contains(&f) {
                    return Err(invalid(format!("unknown family '{f}'")));
                }
            }
            let config = json!({ "p": p, "grid": g, "family": fam });
            let mut t = Table::new("conductors", config, &["repr", "eps", "eta", "conductor", "closed", "c_min"]);
            for pi in descriptor_grid(*p, &g) {
                let s = pi.to_string();
                let tag = s.split(':').next().unwrap_or("");
                if fam.is_some_and(|f| f != tag) {
                    continue;
                }
                for eps in 0..2u8 {
                    for eta in UnitCharacter::all_up_to(*p, g.max_char) {
                        let c = conductor(&pi, eps, &eta)?;
                        let closed = conductor_closed(&pi, eps, &eta).map_or("-".to_string(), |l| l.to_string());
                        t.push(vec![
                            s.clone(),
                            eps.to_string(),
                            eta.to_string(),
                            c.to_string(),
                            closed,
                            conductor_min(&pi, eps).to_string(),
                        ]);
                    }
                }
            }
            (Output::Table(t), true)
        }
        Cmd::Conductor(a) => {
            let (pi, eta) = repr_query(a)?;
            let c = conductor(&pi, a.eps, &eta)?;
            let out = json!({
                "schema": SCHEMA_VERSION,
                "command": "conductor",
                "inputs": { "p": a.p, "repr": pi.to_string(), "eps": a.eps, "eta": eta.to_string() },
                "conductor": c.to_string(),
                "closed": conductor_closed(&pi, a.eps, &eta).map(|l| l.to_string()),
                "c_min": conductor_min(&pi, a.eps),
            });
            (Output::Json(out), true)
        }
    })
}

fn emit(cli: &Cli, out: &Output) -> Result<(), Failure> {
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(v).expect("json") + "\n",
        Output::Table(t) => t.render(cli.format),
        Output::Report(r) => render_report(r, cli.format),
    };
    let io = |e: std::io::Error| Failure { code: 2, msg: e.to_string() };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn exec_from_env() -> Result<Exec, Failure> {
    let Ok(v) = std::env::var("MP2_THREADS") else {
        return Ok(Exec::Parallel);
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| invalid(format!("bad MP2_THREADS '{v}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| invalid(e.to_string()))?;
    Ok(if n == 1 { Exec::Sequential } else { Exec::Parallel })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = exec_from_env().and_then(|exec| run(&cli, exec)).and_then(|(out, pass)| {
        emit(&cli, &out)?;
        Ok(pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("mp2: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
