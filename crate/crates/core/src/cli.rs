//! Command-line front end.
//!
//! Exit codes: 0 when the headline answer is decided, 3 when it is
//! Unknown (bounds are still printed), 1 for usage errors, 2 when a
//! mathematical precondition fails.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::freeness::{
    group_invariant, min_power, pair_verdict, salwa_check, FreePointKB, InvariantMode,
    InvariantResult, MinPower, SweepOptions, Verdict, VerdictKind,
};
use crate::group_ring::{bigint_json, GroupRingElement};
use crate::perm_group::{FiniteGroup, Subgroup};
use crate::pingpong::{a5_case_study, bass_at_root, metabelian_stau, StauReport};
use crate::spectral::SpectralConfig;
use crate::units::{
    enumerate_with_census, manyfp_pair, parse_unit, split_top_level, ManyFpVariant, UnitKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

const DEFAULT_ORDER_CAP: usize = 1024;

#[derive(Parser, Debug)]
#[command(
    name = "freepairs",
    version,
    about = "Free pairs of bicyclic and Bass cyclic units in integral group rings",
    after_help = "Exit codes: 0 decided, 3 Unknown, 1 usage error, 2 precondition failed.\n\
                  Groups: S<n>, A<n>, C<n>, D<n> (dihedral of order 2n), perm:<deg>:<cycles>;<cycles>...\n\
                  Units: beta:<x>:<h>[:H=g1,g2], gamma:<x>:<h>[:H=..], bass:<x>:<k>:<m>"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for pair sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Starting precision in bits for root isolation.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Precision cap in bits.
    #[arg(long = "max-precision", global = true, default_value_t = 2048)]
    max_precision: u32,
    /// Free-point table file; falls back to $FREEPAIRS_KB.
    #[arg(long, global = true)]
    kb: Option<PathBuf>,
    /// Largest group order accepted.
    #[arg(long = "order-cap", global = true, default_value_t = DEFAULT_ORDER_CAP)]
    order_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bicyclic unit listings.
    #[command(subcommand)]
    Units(UnitsCmd),
    /// Verdicts and freeing powers for one pair.
    #[command(subcommand)]
    Pair(PairCmd),
    /// The invariants M(G) (all pairs) and m(G) (same-type pairs).
    Invariant {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = ["M", "m"])]
        mode: String,
    },
    /// Builds and checks a pair that is free by construction.
    Manyfp(ManyFpArgs),
    /// Ping-pong hypothesis checks in exact cyclotomic arithmetic.
    #[command(subcommand)]
    Stau(StauCmd),
    /// Bass cyclic unit evaluations.
    #[command(subcommand)]
    Bass(BassCmd),
}

#[derive(Subcommand, Debug)]
enum UnitsCmd {
    /// Lists the distinct non-trivial bicyclic units of one type.
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long = "type", value_parser = ["beta", "gamma"])]
        kind: String,
        /// Print only the number of distinct units, the unit 1 included.
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    u: String,
    #[arg(long)]
    v: String,
    #[arg(long = "power-u", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    power_u: u64,
    #[arg(long = "power-v", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    power_v: u64,
}

#[derive(Subcommand, Debug)]
enum PairCmd {
    /// FreePair, NilpotentGenerated, NotFreeCertified or Unknown.
    Verdict(PairArgs),
    /// Smallest t with (u, v^t) certified free, and where freeness becomes possible.
    MinPower(PairArgs),
}

#[derive(Args, Debug)]
struct ManyFpArgs {
    #[arg(long)]
    group: String,
    #[arg(long, value_parser = ["beta-gamma", "beta-beta"], default_value = "beta-gamma")]
    variant: String,
    #[arg(long)]
    x: String,
    #[arg(long)]
    h: String,
    /// Generators of H, comma separated; defaults to <h>.
    #[arg(long = "H")]
    big_h: Option<String>,
    #[arg(long)]
    k: String,
    /// Generators of K, comma separated; defaults to <k>.
    #[arg(long = "K")]
    big_k: Option<String>,
}

#[derive(Subcommand, Debug)]
enum StauCmd {
    /// Full verification for u_{2,4}(c) and beta_{b,a} in ZA5.
    A5,
    /// diag(u_{k,m}(z^e_i)) against the rank-one tau built from z^e_i.
    Metabelian {
        /// Order q of the character values.
        #[arg(long)]
        q: u64,
        /// Exponents e_i, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u64>,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Subcommand, Debug)]
enum BassCmd {
    /// u_{k,m,d} evaluated at z_d^j.
    Eval {
        /// Order of the cyclic group
        #[arg(long)]
        d: u64,
        /// Exponent base, coprime to d
        #[arg(long)]
        k: u64,
        /// Power, a multiple of phi(d)
        #[arg(long)]
        m: u64,
        /// Root index, 0 <= j < d
        #[arg(long)]
        j: u64,
    },
}

/// Output of a command: the JSON value, its text rendering and whether
/// the headline answer is Unknown.
struct Report {
    json: Value,
    text: String,
    unknown: bool,
}

struct Ctx {
    format: Format,
    cfg: SpectralConfig,
    jobs: Option<usize>,
    kb_path: Option<PathBuf>,
    order_cap: usize,
}

impl Ctx {
    fn group(&self, spec: &str) -> Result<Arc<FiniteGroup>> {
        FiniteGroup::from_spec_with_cap(spec, self.order_cap)
    }

    fn kb(&self) -> Result<FreePointKB> {
        match &self.kb_path {
            Some(p) => FreePointKB::load(p),
            None => Ok(FreePointKB::default()),
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{rendered}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    if cli.precision < 32 || cli.max_precision < cli.precision {
        let _ = writeln!(
            err,
            "error: need 32 <= --precision <= --max-precision (got {} and {})",
            cli.precision, cli.max_precision
        );
        return EXIT_USAGE;
    }
    let ctx = Ctx {
        format: cli.format,
        cfg: SpectralConfig {
            start_bits: cli.precision,
            max_bits: cli.max_precision,
        },
        jobs: cli.jobs,
        kb_path: cli
            .kb
            .or_else(|| std::env::var_os("FREEPAIRS_KB").map(PathBuf::from)),
        order_cap: cli.order_cap,
    };
    match dispatch(&ctx, &cli.command, err) {
        Ok(report) => {
            let res = match ctx.format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
                ),
                Format::Text => write!(out, "{}", report.text),
            };
            if res.is_err() {
                return EXIT_PRECONDITION;
            }
            if report.unknown {
                EXIT_UNKNOWN
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_PRECONDITION
            }
        }
    }
}

fn dispatch(ctx: &Ctx, cmd: &Command, err: &mut dyn Write) -> Result<Report> {
    match cmd {
        Command::Units(UnitsCmd::Enumerate {
            group,
            kind,
            count_only,
        }) => units_enumerate(ctx, group, kind, *count_only),
        Command::Pair(PairCmd::Verdict(a)) => pair_verdict_cmd(ctx, a),
        Command::Pair(PairCmd::MinPower(a)) => pair_min_power_cmd(ctx, a),
        Command::Invariant { group, mode } => invariant_cmd(ctx, group, mode, err),
        Command::Manyfp(a) => manyfp_cmd(ctx, a),
        Command::Stau(StauCmd::A5) => stau_a5(),
        Command::Stau(StauCmd::Metabelian { q, exponents, k, m }) => {
            let r = metabelian_stau(*q, exponents, *k, *m)?;
            Ok(stau_report("metabelian", r))
        }
        Command::Bass(BassCmd::Eval { d, k, m, j }) => {
            let v = bass_at_root(*k, *m, *d, *j)?;
            Ok(Report {
                json: json!({
                    "command": "bass-eval",
                    "d": d, "k": k, "m": m, "j": j,
                    "value": v.to_json(),
                    "display": v.to_string(),
                }),
                text: format!("u_{{{k},{m},{d}}}(z^{j}) = {v}   (z = exp(2 pi i/{d}))\n"),
                unknown: false,
            })
        }
    }
}

fn units_enumerate(ctx: &Ctx, group: &str, kind: &str, count_only: bool) -> Result<Report> {
    let g = ctx.group(group)?;
    let kind = if kind == "beta" {
        UnitKind::Beta
    } else {
        UnitKind::Gamma
    };
    let (units, census) = enumerate_with_census(&g, kind);
    let mut json = json!({
        "command": "units-enumerate",
        "group": g.name(),
        "type": kind.name(),
        "count": census.distinct_including_trivial,
        "nontrivial": census.nontrivial,
        "parameter_pairs": census.nontrivial_parameter_pairs,
    });
    let text = if count_only {
        format!("{}\n", census.distinct_including_trivial)
    } else {
        json["units"] = Value::Array(
            units
                .iter()
                .map(|u| json!({"descriptor": u.describe(), "element": u.element.to_json()}))
                .collect(),
        );
        let mut s = format!(
            "{} {} units in Z{} ({} non-trivial, plus 1)\n",
            census.distinct_including_trivial,
            kind.name(),
            g.name(),
            census.nontrivial
        );
        for u in &units {
            s.push_str(&format!("{u}\n"));
        }
        s
    };
    Ok(Report {
        json,
        text,
        unknown: false,
    })
}

fn powered_pair(
    ctx: &Ctx,
    a: &PairArgs,
) -> Result<(GroupRingElement, GroupRingElement, String, String)> {
    let g = ctx.group(&a.group)?;
    let u = parse_unit(&g, &a.u)?;
    let v = parse_unit(&g, &a.v)?;
    let label = |d: String, p: u64| if p == 1 { d } else { format!("({d})^{p}") };
    Ok((
        u.element.pow(a.power_u),
        v.element.pow(a.power_v),
        label(u.describe(), a.power_u),
        label(v.describe(), a.power_v),
    ))
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = format!("verdict: {}\n", v.kind);
    if let Some(w) = &v.witness {
        s.push_str(&format!("witness: {w}\n"));
    }
    s.push_str(&format!("min poly of ab: {}\n", v.spectrum.min_poly));
    for p in &v.points {
        s.push_str(&format!(
            "  {:<8} {}  [{}]\n",
            p.status.label(),
            p.label,
            p.status.reason()
        ));
    }
    s
}

fn pair_verdict_cmd(ctx: &Ctx, a: &PairArgs) -> Result<Report> {
    let (u, v, ud, vd) = powered_pair(ctx, a)?;
    let kb = ctx.kb()?;
    let verdict = pair_verdict(&u, &v, &kb, &ctx.cfg)?;
    let salwa = salwa_check(&u, &v)?;
    let (x, y) = crate::freeness::nilpotent_parts(&u, &v)?;
    let trace = (&x * &y).trace();
    let mut json = verdict.to_json();
    json["command"] = json!("pair-verdict");
    json["u"] = json!(ud);
    json["v"] = json!(vd);
    json["trace"] = bigint_json(&trace);
    json["salwa"] = json!(salwa);
    let text = format!(
        "u = {ud}\nv = {vd}\ntrace(ab) = {trace}{}\n{}",
        if salwa { " (|trace| >= 2)" } else { "" },
        verdict_text(&verdict)
    );
    Ok(Report {
        json,
        text,
        unknown: verdict.kind == VerdictKind::Unknown,
    })
}

fn min_power_text(mp: &MinPower) -> String {
    let mut s = match mp.certified {
        Some(c) if mp.is_exact() => format!("min power: {c} (exact)\n"),
        Some(c) => format!(
            "min power: between {} and {c} (Unknown)\n",
            mp.possible_from
        ),
        None => format!(
            "min power: at least {} (no certificate)\n",
            mp.possible_from
        ),
    };
    for u in &mp.undecided {
        s.push_str(&format!("  undecided: {} at t = {:?}\n", u.label, u.powers));
    }
    s
}

fn pair_min_power_cmd(ctx: &Ctx, a: &PairArgs) -> Result<Report> {
    let (u, v, ud, vd) = powered_pair(ctx, a)?;
    let kb = ctx.kb()?;
    let (mp, spectrum) = min_power(&u, &v, &kb, &ctx.cfg)?;
    let mut json = mp.to_json();
    json["command"] = json!("pair-min-power");
    json["u"] = json!(ud);
    json["v"] = json!(vd);
    json["spectrum"] = spectrum.to_json();
    let text = format!(
        "u = {ud}\nv = {vd}\nspectrum of ab: {}\n{}",
        spectrum.describe(),
        min_power_text(&mp)
    );
    Ok(Report {
        json,
        text,
        unknown: !mp.is_exact(),
    })
}

fn invariant_text(r: &InvariantResult) -> String {
    let mut s = format!("{}({}) ", r.mode.symbol(), r.group);
    match r.exact_value {
        Some(v) => s.push_str(&format!("= {v} (exact)\n")),
        None => s.push_str(&format!(
            "in [{}, {}] (Unknown)\n",
            r.lower_bound, r.upper_bound
        )),
    }
    s.push_str(&format!(
        "lower bound: {}\nupper bound: {}\nunits: {}, ordered pairs: {}, nilpotent pairs skipped: {}, distinct products: {}\n",
        r.lower_bound,
        r.upper_bound,
        r.units.len(),
        r.pairs.len(),
        r.nilpotent_pairs,
        r.classes.len()
    ));
    if let Some((u, v)) = &r.witness {
        s.push_str(&format!("witness: ({u}, {v})\n"));
    }
    if !r.unresolved.is_empty() {
        s.push_str(&format!("unresolved pairs: {}\n", r.unresolved.len()));
        for p in r.unresolved.iter().take(10) {
            let pts: Vec<String> = p.points.iter().map(|x| x.label.clone()).collect();
            s.push_str(&format!("  ({}, {}): {}\n", p.u, p.v, pts.join("; ")));
        }
        if r.unresolved.len() > 10 {
            s.push_str(&format!("  ... and {} more\n", r.unresolved.len() - 10));
        }
    }
    s
}

fn invariant_cmd(ctx: &Ctx, group: &str, mode: &str, err: &mut dyn Write) -> Result<Report> {
    let g = ctx.group(group)?;
    let mode: InvariantMode = mode.parse()?;
    let kb = ctx.kb()?;
    let _ = writeln!(err, "sweeping {} pairs of Z{}...", mode.symbol(), g.name());
    let r = group_invariant(
        &g,
        mode,
        &kb,
        &ctx.cfg,
        SweepOptions {
            jobs: ctx.jobs,
            progress: false,
        },
    )?;
    let _ = writeln!(
        err,
        "done: {} ordered pairs, {} distinct products",
        r.pairs.len(),
        r.classes.len()
    );
    let mut json = r.to_json();
    json["command"] = json!("invariant");
    Ok(Report {
        text: invariant_text(&r),
        unknown: r.exact_value.is_none(),
        json,
    })
}

fn subgroup_arg(g: &Arc<FiniteGroup>, gens: Option<&str>, default: usize) -> Result<Subgroup> {
    match gens {
        None => Subgroup::cyclic(g, default),
        Some(s) => {
            let gens = split_top_level(s)
                .into_iter()
                .map(|x| g.parse_element(x))
                .collect::<Result<Vec<_>>>()?;
            Subgroup::generated(g, &gens)
        }
    }
}

fn manyfp_cmd(ctx: &Ctx, a: &ManyFpArgs) -> Result<Report> {
    let g = ctx.group(&a.group)?;
    let variant: ManyFpVariant = a.variant.parse()?;
    let x = g.parse_element(&a.x)?;
    let h = g.parse_element(&a.h)?;
    let k = g.parse_element(&a.k)?;
    let big_h = subgroup_arg(&g, a.big_h.as_deref(), h)?;
    let big_k = subgroup_arg(&g, a.big_k.as_deref(), k)?;
    let (u, v) = manyfp_pair(&g, variant, x, h, &big_h, k, &big_k)?;
    let kb = ctx.kb()?;
    let verdict = pair_verdict(&u.element, &v.element, &kb, &ctx.cfg)?;
    let salwa = salwa_check(&u.element, &v.element)?;
    let trace = (&u.nilpotent_part() * &v.nilpotent_part()).trace();
    if verdict.kind != VerdictKind::FreePair {
        return Err(Error::Verification(format!(
            "constructed pair received verdict {}",
            verdict.kind
        )));
    }
    let mut json = verdict.to_json();
    json["command"] = json!("manyfp");
    json["u"] = json!(u.describe());
    json["v"] = json!(v.describe());
    json["trace"] = bigint_json(&trace);
    json["salwa"] = json!(salwa);
    let text = format!(
        "u = {}\nv = {}\ntrace(ab) = {trace}\n{}",
        u.describe(),
        v.describe(),
        verdict_text(&verdict)
    );
    Ok(Report {
        json,
        text,
        unknown: false,
    })
}

fn stau_a5() -> Result<Report> {
    let r = a5_case_study()?;
    let mut json = r.to_json();
    json["command"] = json!("stau-a5");
    Ok(Report {
        text: r.render(),
        json,
        unknown: false,
    })
}

fn stau_report(name: &str, r: StauReport) -> Report {
    let mut json = r.to_json();
    json["command"] = json!(format!("stau-{name}"));
    Report {
        text: r.render(),
        unknown: false,
        json,
    }
}
