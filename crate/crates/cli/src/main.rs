//! Command line front end for the Y relay channel toolkit.
//!
//! Subcommands cover both sides of the library: exact region export,
//! membership checks, level-plan synthesis, and bit-exact simulation for
//! the deterministic channel; achievability certificates and constant-gap
//! sweeps for the Gaussian one. Results go to stdout as text, JSON, or
//! CSV. Exit code 0 means success (inside, feasible, verified, all pass),
//! 1 means a negative verdict, 2 means bad usage or an internal limit.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use ychl::dyc::{
    build_plan, cutset_region, expand_rational, outer_region, simulate_exhaustive,
    simulate_random, DycParams, LevelPlan, PlanError, SimError, StreamKind, SweepReport,
};
use ychl::gyc;
use ychl::gyc::sample::{derive_rng, sample_config, sample_in_region};
use ychl::gyc::{AllocError, ChannelConfig, SubRateError};
use ychl::rate::{format_rat, parse_rat, parse_rate_tuple, rat_to_f64, Rat, RateTuple, RATE_NAMES};
use ychl::region::{LinearRegion, RegionScalar};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status of a process killed by SIGPIPE; used when the consumer of
/// our stdout goes away, so pipelines into `head` end quietly.
const EPIPE_EXIT: u8 = 141;

macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(EPIPE_EXIT as i32);
        }
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(EPIPE_EXIT as i32);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "ychl",
    version,
    about = "Capacity bounds, transmission schemes, and gap certificates \
             for the three-user Y relay channel"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the inequality system of a capacity-region bound.
    #[command(subcommand)]
    Region(RegionCmd),
    /// Test an exact rate tuple against the deterministic outer bound.
    Check(CheckArgs),
    /// Synthesize a relay level plan for an exact rate tuple.
    Plan(PlanArgs),
    /// Build a plan and run it over payloads, counting decode failures.
    Simulate(SimulateArgs),
    /// Certify a Gaussian rate tuple with the closed-form power allocation.
    Verify(VerifyArgs),
    /// Sample random Gaussian channels and check the 7/6-bit gap shift.
    SweepGap(SweepGapArgs),
}

#[derive(Subcommand)]
enum RegionCmd {
    /// Deterministic channel; right-hand sides are exact integers.
    Dyc {
        /// Level counts n1,n2,n3 in descending order.
        #[arg(long, value_parser = parse_levels)]
        levels: [u32; 3],
        #[arg(long, value_enum, default_value_t = DycBound::Outer)]
        bound: DycBound,
    },
    /// Gaussian channel; rows are stated for users relabeled so that
    /// role 1 has the largest gain magnitude.
    Gyc {
        /// Channel gains h1,h2,h3 in any order.
        #[arg(long, value_parser = parse_f64_triple)]
        gains: [f64; 3],
        /// Per-node transmit power.
        #[arg(long, default_value_t = 1.0)]
        power: f64,
        #[arg(long, value_enum, default_value_t = GycBound::Outer)]
        bound: GycBound,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DycBound {
    Outer,
    Cutset,
}

#[derive(Clone, Copy, ValueEnum)]
enum GycBound {
    Outer,
    InnerTarget,
}

#[derive(Args)]
struct CheckArgs {
    /// Level counts n1,n2,n3 in descending order.
    #[arg(long, value_parser = parse_levels)]
    levels: [u32; 3],
    /// Six rates R12,R13,R21,R23,R31,R32 as integers, decimals, or p/q.
    #[arg(long)]
    rates: String,
}

#[derive(Args)]
struct PlanArgs {
    /// Level counts n1,n2,n3 in descending order.
    #[arg(long, value_parser = parse_levels)]
    levels: [u32; 3],
    /// Six rates R12,R13,R21,R23,R31,R32 as integers, decimals, or p/q.
    /// Fractional tuples are carried by expanding the channel.
    #[arg(long)]
    rates: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Level counts n1,n2,n3 in descending order.
    #[arg(long, value_parser = parse_levels)]
    levels: [u32; 3],
    /// Six rates R12,R13,R21,R23,R31,R32 as integers, decimals, or p/q.
    #[arg(long)]
    rates: String,
    /// Sweep every payload. Default when the payload space fits 2^24.
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    /// Simulate this many random payloads instead of all of them.
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed for --trials.
    #[arg(long, default_value_t = 0, requires = "trials")]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Channel gains h1,h2,h3 in any order.
    #[arg(long, value_parser = parse_f64_triple)]
    gains: [f64; 3],
    /// Per-node transmit power.
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Six rates R12,R13,R21,R23,R31,R32, indexed by the users as given.
    #[arg(long)]
    rates: String,
    /// Slack tolerance on decoding constraints and power budgets.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct SweepGapArgs {
    /// Number of random channel configurations.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Base RNG seed; sample i uses the stream derived from (seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Received-SNR range lo,hi sampled log-uniformly.
    #[arg(long, value_parser = parse_range, default_value = "0.01,1e8")]
    hp_range: [f64; 2],
    /// Slack tolerance for the membership tests.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the CSV rows here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Region(cmd) => run_region(cmd, cli.format),
        Command::Check(args) => run_check(args, cli.format),
        Command::Plan(args) => run_plan(args, cli.format),
        Command::Simulate(args) => run_simulate(args, cli.format),
        Command::Verify(args) => run_verify(args, cli.format),
        Command::SweepGap(args) => run_sweep_gap(args, cli.format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_levels(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected n1,n2,n3, got {s:?}"));
    }
    let mut out = [0u32; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad level count {part:?}"))?;
    }
    Ok(out)
}

fn parse_f64_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0f64; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = parse_number(part)?;
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo,hi, got {s:?}"));
    }
    let lo = parse_number(parts[0])?;
    let hi = parse_number(parts[1])?;
    if !(lo > 0.0 && hi >= lo) {
        return Err(format!("range must satisfy 0 < lo <= hi, got {lo},{hi}"));
    }
    Ok([lo, hi])
}

/// Accepts integers, decimals, p/q fractions, and scientific notation.
fn parse_number(s: &str) -> Result<f64, String> {
    if let Ok(r) = parse_rat(s) {
        return Ok(rat_to_f64(r));
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

fn parse_gaussian_rates(s: &str) -> Result<RateTuple<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err(format!("expected 6 comma-separated rates, got {}", parts.len()));
    }
    let mut out = [0.0f64; 6];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = parse_number(part)?;
    }
    Ok(RateTuple::new(out))
}

fn dyc_params(levels: [u32; 3]) -> Result<DycParams, String> {
    DycParams::new(levels[0], levels[1], levels[2]).map_err(|e| e.to_string())
}

fn exact_rates(s: &str) -> Result<RateTuple<Rat>, String> {
    let rates = parse_rate_tuple(s).map_err(|e| e.to_string())?;
    if rates.0.iter().any(|r| *r < Rat::from_integer(0)) {
        return Err("rates must be non-negative".into());
    }
    Ok(rates)
}

fn emit_json(mut v: Value) {
    v["version"] = json!(VERSION);
    outln!("{}", serde_json::to_string_pretty(&v).expect("serializable value"));
}

fn no_csv() -> Result<u8, String> {
    Err("csv output is not available for this command; use --format json or text".into())
}

fn run_region(cmd: RegionCmd, format: Format) -> Result<u8, String> {
    match cmd {
        RegionCmd::Dyc { levels, bound } => {
            let p = dyc_params(levels)?;
            let region = match bound {
                DycBound::Outer => outer_region(&p),
                DycBound::Cutset => cutset_region(&p),
            };
            print_region(&region, json!({ "levels": levels }), format);
        }
        RegionCmd::Gyc { gains, power, bound } => {
            let cfg = ChannelConfig::new(gains, power).map_err(|e| e.to_string())?;
            let region = match bound {
                GycBound::Outer => gyc::outer_region(&cfg),
                GycBound::InnerTarget => gyc::inner_target_region(&cfg),
            };
            let roles: Vec<usize> = (1..=3).map(|r| cfg.user_of_role(r) + 1).collect();
            if format == Format::Text && !cfg.is_identity_order() {
                outln!("# roles 1,2,3 are held by input users {},{},{}", roles[0], roles[1], roles[2]);
            }
            print_region(&region, json!({ "gains": cfg.gains(), "power": cfg.power(), "role_users": roles }), format);
        }
    }
    Ok(0)
}

fn print_region<S: RegionScalar>(region: &LinearRegion<S>, extra: Value, format: Format) {
    match format {
        Format::Json => {
            let mut v = region.to_json();
            for (k, val) in extra.as_object().expect("extra is an object") {
                v[k.as_str()] = val.clone();
            }
            emit_json(v);
        }
        Format::Csv => {
            outln!("tag,{},rhs", RATE_NAMES.join(","));
            for q in &region.ineqs {
                let coeffs: Vec<String> = q.coeffs.iter().map(|c| c.to_string()).collect();
                outln!("{},{},{}", q.tag, coeffs.join(","), q.rhs.render());
            }
        }
        Format::Text => {
            for q in &region.ineqs {
                outln!("{:<44} [{}]", q.render(), q.tag);
            }
        }
    }
}

fn run_check(args: CheckArgs, format: Format) -> Result<u8, String> {
    let p = dyc_params(args.levels)?;
    let rates = exact_rates(&args.rates)?;
    let m = outer_region(&p).membership(&rates, Rat::from_integer(0));
    let region = outer_region(&p);
    match format {
        Format::Json => {
            let rows: Vec<Value> = region
                .ineqs
                .iter()
                .zip(&m.slacks)
                .map(|(q, s)| json!({ "tag": q.tag, "slack": s.to_json() }))
                .collect();
            emit_json(json!({
                "levels": args.levels,
                "rates": rates.0.iter().map(|r| format_rat(*r)).collect::<Vec<_>>(),
                "inside": m.inside,
                "rows": rows,
                "first_violation": m.first_violation.map(|i| region.ineqs[i].tag.clone()),
            }));
        }
        Format::Csv => return no_csv(),
        Format::Text => match m.first_violation {
            None => outln!("inside: yes"),
            Some(i) => {
                outln!("inside: no");
                outln!(
                    "violates: {} (slack {})",
                    region.ineqs[i].render(),
                    m.slacks[i].render()
                );
            }
        },
    }
    Ok(if m.inside { 0 } else { 1 })
}

/// Result of carrying a rational tuple to an integer plan, possibly on an
/// expanded channel.
enum Prepared {
    Infeasible(String),
    Ready { scaled: DycParams, plan: LevelPlan, factor: u32 },
}

fn prepare_plan(levels: [u32; 3], rates: &str) -> Result<Prepared, String> {
    let p = dyc_params(levels)?;
    let rates = exact_rates(rates)?;
    match expand_rational(&p, &rates) {
        Ok((scaled, int_rates, factor)) => {
            let plan = build_plan(&scaled, int_rates)
                .map_err(|e| format!("planner rejected a tuple inside the bound: {e}"))?;
            Ok(Prepared::Ready { scaled, plan, factor })
        }
        Err(PlanError::Infeasible(reason)) => Ok(Prepared::Infeasible(reason.to_string())),
        Err(e) => Err(e.to_string()),
    }
}

fn kind_label(kind: &StreamKind) -> String {
    match kind {
        StreamKind::Bidir { a, b } => format!("two-way {a}<->{b}"),
        StreamKind::Cyclic { order123: true, top } => {
            format!("cycle 1->2->3->1 ({} chunk)", if *top { "top" } else { "bottom" })
        }
        StreamKind::Cyclic { order123: false, top } => {
            format!("cycle 1->3->2->1 ({} chunk)", if *top { "top" } else { "bottom" })
        }
        StreamKind::Uni { src, dst } => format!("one-way {src}->{dst}"),
    }
}

fn run_plan(args: PlanArgs, format: Format) -> Result<u8, String> {
    if format == Format::Csv {
        return no_csv();
    }
    match prepare_plan(args.levels, &args.rates)? {
        Prepared::Infeasible(reason) => {
            match format {
                Format::Json => emit_json(json!({ "feasible": false, "reason": reason })),
                _ => outln!("infeasible: {reason}"),
            }
            Ok(1)
        }
        Prepared::Ready { scaled, plan, factor } => {
            match format {
                Format::Json => {
                    let mut v = plan.to_json();
                    v["feasible"] = json!(true);
                    v["expansion_factor"] = json!(factor);
                    emit_json(v);
                }
                _ => {
                    let n = scaled.levels();
                    if factor > 1 {
                        outln!(
                            "levels ({}, {}, {}), expanded {factor}x from ({}, {}, {})",
                            n[0], n[1], n[2], args.levels[0], args.levels[1], args.levels[2]
                        );
                    } else {
                        outln!("levels ({}, {}, {})", n[0], n[1], n[2]);
                    }
                    for s in &plan.streams {
                        outln!(
                            "{:<12} {:<28} {} bit{}, uplink {:?}, downlink {:?}",
                            s.id,
                            kind_label(&s.kind),
                            s.rate,
                            if s.rate == 1 { "" } else { "s" },
                            s.up,
                            s.down
                        );
                    }
                    let pairs: Vec<String> = plan
                        .relay_map
                        .level_pairs()
                        .iter()
                        .map(|(a, b)| format!("{a}->{b}"))
                        .collect();
                    outln!("relay map: {}", pairs.join(" "));
                }
            }
            Ok(0)
        }
    }
}

fn run_simulate(args: SimulateArgs, format: Format) -> Result<u8, String> {
    if format == Format::Csv {
        return no_csv();
    }
    let (scaled, plan) = match prepare_plan(args.levels, &args.rates)? {
        Prepared::Infeasible(reason) => {
            match format {
                Format::Json => emit_json(json!({ "feasible": false, "reason": reason })),
                _ => outln!("infeasible: {reason}"),
            }
            return Ok(1);
        }
        Prepared::Ready { scaled, plan, .. } => (scaled, plan),
    };
    let (mode, report): (&str, SweepReport) = match args.trials {
        Some(trials) => {
            let mut rng = derive_rng(args.seed, 0);
            let report = simulate_random(&scaled, &plan, trials, &mut rng)
                .map_err(|e| e.to_string())?;
            ("random", report)
        }
        None => match simulate_exhaustive(&scaled, &plan) {
            Ok(report) => ("exhaustive", report),
            Err(SimError::TooManyPayloads { total_bits, limit }) => {
                return Err(format!(
                    "{total_bits} message bits exceed the exhaustive limit of {limit}; \
                     rerun with --trials N"
                ));
            }
            Err(e) => return Err(e.to_string()),
        },
    };
    match format {
        Format::Json => emit_json(json!({
            "feasible": true,
            "mode": mode,
            "message_bits": plan.total_bits(),
            "cases": report.cases,
            "failures": report.failures,
            "first_failure": report.first_failure,
            "ok": report.ok(),
        })),
        _ => {
            outln!(
                "{} sweep: {} payloads of {} bits, {} decode failure{}",
                mode,
                report.cases,
                plan.total_bits(),
                report.failures,
                if report.failures == 1 { "" } else { "s" }
            );
        }
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn run_verify(args: VerifyArgs, format: Format) -> Result<u8, String> {
    if format == Format::Csv {
        return no_csv();
    }
    let cfg = ChannelConfig::new(args.gains, args.power).map_err(|e| e.to_string())?;
    let user_rates = parse_gaussian_rates(&args.rates)?;
    let role_rates = cfg.permute_tuple(&user_rates);
    let roles: Vec<usize> = (1..=3).map(|r| cfg.user_of_role(r) + 1).collect();
    let report = match gyc::verify_achievability(&cfg, &role_rates, args.tol) {
        Ok(report) => report,
        Err(AllocError::Rate(e @ (SubRateError::Negative { .. } | SubRateError::NonFinite { .. }))) => {
            return Err(e.to_string());
        }
        Err(e) => {
            match format {
                Format::Json => emit_json(json!({ "ok": false, "reason": e.to_string() })),
                _ => outln!("not achievable: {e}"),
            }
            return Ok(1);
        }
    };
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["role_users"] = json!(roles);
            v["rates_as_given"] = json!(user_rates.0);
            v["rates_role_order"] = json!(role_rates.0);
            v["tol"] = json!(args.tol);
            emit_json(v);
        }
        _ => {
            if !cfg.is_identity_order() {
                outln!(
                    "# roles 1,2,3 are held by input users {},{},{}",
                    roles[0], roles[1], roles[2]
                );
            }
            outln!("sector {}", report.allocation.sector);
            outln!("min constraint slack {:.6e}", report.min_slack);
            outln!(
                "power use: sources [{:.6}, {:.6}, {:.6}], relay {:.6}",
                report.source_power[0],
                report.source_power[1],
                report.source_power[2],
                report.relay_power
            );
            if report.ok {
                outln!("verified: yes");
            } else {
                outln!("verified: no");
                for c in report.constraints.iter().filter(|c| c.active && c.slack < -args.tol) {
                    outln!("  violated {}: rate {:.6} > supported {:.6}", c.id, c.rate, c.supported);
                }
            }
        }
    }
    Ok(if report.ok { 0 } else { 1 })
}

struct SweepRow {
    index: u64,
    gains: [f64; 3],
    power: f64,
    rates: RateTuple<f64>,
    min_slack: f64,
    pass: bool,
}

fn gap_sample(seed: u64, index: u64, lo: f64, hi: f64, tol: f64) -> SweepRow {
    let mut rng = derive_rng(seed, index);
    let cfg = sample_config(&mut rng, lo, hi);
    let outer = gyc::outer_region(&cfg);
    let rates = sample_in_region(&mut rng, &outer).expect("outer bound rows are non-negative");
    let report = gyc::check_gap(&cfg, &rates, tol);
    SweepRow {
        index,
        gains: cfg.gains(),
        power: cfg.power(),
        rates,
        min_slack: report.min_inner_slack,
        pass: report.pass,
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("seed,h1,h2,h3,P,R12,R13,R21,R23,R31,R32,min_slack,verdict\n");
    for r in rows {
        let rates: Vec<String> = r.rates.0.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            r.gains[0],
            r.gains[1],
            r.gains[2],
            r.power,
            rates.join(","),
            r.min_slack,
            if r.pass { "pass" } else { "fail" }
        ));
    }
    out
}

fn run_sweep_gap(args: SweepGapArgs, format: Format) -> Result<u8, String> {
    let pool = thread_pool()?;
    let [lo, hi] = args.hp_range;
    let rows: Vec<SweepRow> = pool.install(|| {
        (0..args.samples)
            .into_par_iter()
            .map(|i| gap_sample(args.seed, i, lo, hi, args.tol))
            .collect()
    });
    let failures = rows.iter().filter(|r| !r.pass).count();
    let passes = rows.len() - failures;

    match &args.out {
        Some(path) => {
            std::fs::write(path, sweep_csv(&rows))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            match format {
                Format::Json => emit_json(json!({
                    "samples": rows.len(),
                    "passes": passes,
                    "failures": failures,
                    "ok": failures == 0,
                    "out": path.display().to_string(),
                })),
                _ => outln!("{} samples, {passes} pass, {failures} fail", rows.len()),
            }
        }
        None => match format {
            Format::Json => {
                let records: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "seed": r.index,
                            "gains": r.gains,
                            "power": r.power,
                            "rates": r.rates.0,
                            "min_slack": r.min_slack,
                            "verdict": if r.pass { "pass" } else { "fail" },
                        })
                    })
                    .collect();
                emit_json(json!({
                    "samples": rows.len(),
                    "passes": passes,
                    "failures": failures,
                    "ok": failures == 0,
                    "records": records,
                }));
            }
            _ => {
                out!("{}", sweep_csv(&rows));
                eprintln!("{} samples, {passes} pass, {failures} fail", rows.len());
            }
        },
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Builds the worker pool, capped by the `YCHL_THREADS` variable when set.
/// Results are collected in sample order either way, so the worker count
/// never changes the output.
fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("YCHL_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("YCHL_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("YCHL_THREADS must be at least 1".into());
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}
