//! Command-line front end. The binary only forwards its arguments to [`run`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::approx::{best_extra_invariant, best_invariant};
use crate::config::{seeded_rng, Problem, ScenarioConfig};
use crate::error::{Error, Result};
use crate::extra::{
    build_partition, canonical_extra_invariant, canonical_generator, check_extra_invariance, decomposable_mi_check,
    HxiBlocks,
};
use crate::io::write_frame_csv;
use crate::scenarios::{self, random_vector};
use crate::setting::ChainMember;
use crate::subspace::{length, span_invariant};
use crate::zak::{phi_inv, phi_map, phi_norm, zak_gamma, zak_gamma_inv, zak_relation_check, zak_t, zak_t_inv, zak_vector, zak_vector_inv};
use crate::{Setting, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_THEOREM: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "extrainv", version, about = "Invariant spaces under free finite abelian group actions and their extra invariance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Decision tolerance; overrides the config.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the frame of the resulting subspace as CSV (check, approx).
    #[arg(long, global = true)]
    pub frame: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate chain and action and self-test the transforms.
    Validate,
    /// Print the partition B_xi of the dual group.
    Partition,
    /// Check extra invariance of the configured subspace.
    Check,
    /// Best approximation of the configured data.
    Approx,
    /// Built-in examples with self-checked headline values.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Shear,
    Dilation,
    Canonical,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::Io(_)
        | Error::InvalidModulus(_)
        | Error::NotAnElement { .. }
        | Error::NotPermutation { .. }
        | Error::GeneratorCount { .. }
        | Error::InvalidWeight { .. }
        | Error::Dimension { .. }
        | Error::EmptyGenerators
        | Error::InvalidLength
        | Error::UnknownBlock(_) => EXIT_CONFIG,
        Error::TheoremViolation(_) => EXIT_THEOREM,
        _ => EXIT_VALIDATION,
    }
}

struct Outcome {
    report: Value,
    code: i32,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

struct Context {
    cfg: ScenarioConfig,
    setting: Setting,
    rng: ChaCha8Rng,
    seed: u64,
}

fn load(cli: &Cli) -> Result<Context> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        path: String::new(),
        message: "--config is required for this command".to_string(),
    })?;
    let cfg = ScenarioConfig::load(path)?;
    let tol = cli.tol.unwrap_or_else(|| cfg.tol());
    let seed = cli.seed.unwrap_or_else(|| cfg.seed());
    let setting = cfg.build_setting(tol)?;
    Ok(Context {
        cfg,
        setting,
        rng: seeded_rng(seed),
        seed,
    })
}

fn write_frame(cli: &Cli, frame: &crate::zak::CMatrix) -> Result<()> {
    if let Some(path) = &cli.frame {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_frame_csv(file, frame)?;
    }
    Ok(())
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn cmd_validate(ctx: &mut Context) -> Result<Outcome> {
    let s = &ctx.setting;
    let mut round_trip: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    let mut relation: f64 = 0.0;
    let samples = 8;
    for _ in 0..samples {
        let f = random_vector(&mut ctx.rng, s.points());
        let n = s.action().norm(&f);
        let zg = zak_gamma(s, &f)?;
        let zt = zak_t(s, &f)?;
        let zv = zak_vector(s, &f)?;
        let ph = phi_map(s, &f)?;
        for back in [zak_gamma_inv(s, &zg)?, zak_t_inv(s, &zt)?, zak_vector_inv(s, &zv)?, phi_inv(s, &ph)?] {
            round_trip = round_trip.max(rel(s.action().norm(&(back - &f)), n));
        }
        for m in [zg.norm(s), zt.norm(s), zv.norm(s), phi_norm(s, &ph)] {
            isometry = isometry.max(rel((m - n).abs(), n));
        }
        relation = relation.max(zak_relation_check(s, &f)?);
    }
    let ok = round_trip < 1e-10 && isometry < 1e-10 && relation < 1e-10;
    let report = json!({
        "command": "validate",
        "chain": to_json(s.chain()),
        "action": to_json(s.action_report()),
        "coset_section": s.coset_section().representatives(),
        "omega": s.omega().representatives(),
        "nu": s.nu().representatives(),
        "c_t": s.tiling().c_t(),
        "c_gamma": s.tiling().c_gamma(),
        "self_test": {
            "samples": samples,
            "seed": ctx.seed,
            "max_round_trip_error": round_trip,
            "max_isometry_defect": isometry,
            "max_block_relation_deviation": relation,
            "ok": ok,
        },
    });
    Ok(Outcome {
        report,
        code: if ok { EXIT_OK } else { EXIT_VALIDATION },
    })
}

fn partition_json(s: &Setting) -> Value {
    let p = build_partition(s);
    let elements: Vec<Vec<String>> = p
        .blocks
        .iter()
        .map(|b| b.iter().map(|&i| s.group().element(i).to_string()).collect())
        .collect();
    json!({
        "xi": p.xi,
        "blocks": p.blocks,
        "block_elements": elements,
        "h_blocks": HxiBlocks::new(s).blocks,
    })
}

fn cmd_partition(ctx: &Context) -> Outcome {
    let mut report = partition_json(&ctx.setting);
    report["command"] = json!("partition");
    Outcome { report, code: EXIT_OK }
}

fn cmd_check(cli: &Cli, ctx: &mut Context) -> Result<Outcome> {
    let s = &ctx.setting;
    let (v, gens) = ctx.cfg.build_subspace(s, &mut ctx.rng)?;
    let extra = check_extra_invariance(s, &v)?;
    let decomposable = decomposable_mi_check(s, &v)?;
    write_frame(cli, v.frame())?;
    let report = json!({
        "command": "check",
        "seed": ctx.seed,
        "generators": gens.len(),
        "dim": v.dim(),
        "length": length(s, &v)?,
        "extra_invariance": to_json(&extra),
        "decomposable": to_json(&decomposable),
    });
    Ok(Outcome { report, code: EXIT_OK })
}

fn cmd_approx(cli: &Cli, ctx: &mut Context) -> Result<Outcome> {
    let s = &ctx.setting;
    let psi = ctx.cfg.data_vectors(s, &mut ctx.rng)?;
    let ell = ctx.cfg.options.ell.unwrap_or(1);
    let problem = ctx.cfg.options.problem;
    let res = match problem {
        Problem::Invariant => best_invariant(s, &psi, ell)?,
        Problem::Extra => best_extra_invariant(s, &psi, ell)?,
    };
    let mut report = json!({
        "command": "approx",
        "problem": match problem { Problem::Invariant => "invariant", Problem::Extra => "extra" },
        "seed": ctx.seed,
        "ell": ell,
        "data": psi.len(),
        "result": to_json(&res.summary()),
    });
    if problem == Problem::Extra {
        let check = check_extra_invariance(s, &res.space)?;
        report["extra_invariance"] = to_json(&check);
    }
    write_frame(cli, res.space.frame())?;
    Ok(Outcome { report, code: EXIT_OK })
}

fn expect(checks: &mut Vec<Value>, name: &str, expected: Value, observed: Value) -> bool {
    let pass = expected == observed;
    checks.push(json!({ "name": name, "expected": expected, "observed": observed, "pass": pass }));
    pass
}

fn demo_surrogate(name: &str, s: &Setting, blocks: Value, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut ok = expect(&mut checks, "B_xi", blocks, json!(build_partition(s).blocks));
    let v = canonical_extra_invariant(s)?;
    let report = check_extra_invariance(s, &v)?;
    ok &= expect(&mut checks, "canonical space dim", json!(s.omega_len()), json!(v.dim()));
    ok &= expect(&mut checks, "canonical space is Delta-invariant", json!(true), json!(report.delta_invariant));
    let dims: Vec<usize> = report.blocks.iter().map(|b| b.dim).collect();
    let mut expected_dims = vec![0; dims.len()];
    expected_dims[0] = v.dim();
    ok &= expect(&mut checks, "dim U_xi", json!(expected_dims), json!(dims));
    let psi = random_vector(&mut seeded_rng(seed), s.points());
    let principal = span_invariant(s, &[psi], ChainMember::Gamma)?;
    let generic = check_extra_invariance(s, &principal)?;
    ok &= expect(&mut checks, "random principal space is Delta-invariant", json!(false), json!(generic.delta_invariant));
    let report = json!({
        "command": "demo",
        "demo": name,
        "partition": partition_json(s),
        "checks": checks,
        "canonical": to_json(&report),
        "pass": ok,
    });
    Ok(Outcome {
        report,
        code: if ok { EXIT_OK } else { EXIT_THEOREM },
    })
}

fn demo_canonical(tol: f64) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut ok = true;
    for name in scenarios::NAMES {
        let s = scenarios::by_name(name).expect("known scenario").with_tolerance(tol)?;
        let phi = canonical_generator(&s)?;
        let v = span_invariant(&s, &[phi], ChainMember::Gamma)?;
        let report = check_extra_invariance(&s, &v)?;
        let u_e_is_v = report.blocks[0].dim == v.dim() && report.blocks[0].included;
        let others_zero = report.blocks.iter().skip(1).all(|b| b.dim == 0);
        let pass = report.delta_invariant && u_e_is_v && others_zero;
        ok &= pass;
        rows.push(json!({
            "scenario": name,
            "dim": v.dim(),
            "delta_invariant": report.delta_invariant,
            "u_e_equals_v": u_e_is_v,
            "other_u_xi_zero": others_zero,
            "decomposition_deviation": report.decomposition_deviation,
            "pass": pass,
        }));
    }
    Ok(Outcome {
        report: json!({ "command": "demo", "demo": "canonical", "scenarios": rows, "pass": ok }),
        code: if ok { EXIT_OK } else { EXIT_THEOREM },
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Validate => cmd_validate(&mut load(cli)?),
        Command::Partition => Ok(cmd_partition(&load(cli)?)),
        Command::Check => cmd_check(cli, &mut load(cli)?),
        Command::Approx => cmd_approx(cli, &mut load(cli)?),
        Command::Demo { name } => match name {
            Demo::Shear => demo_surrogate(
                "shear",
                &scenarios::shear().with_tolerance(tol)?,
                json!([[0, 2, 4], [1, 3, 5]]),
                seed,
            ),
            Demo::Dilation => demo_surrogate(
                "dilation",
                &scenarios::dilation().with_tolerance(tol)?,
                json!([[0, 2], [1, 3]]),
                seed,
            ),
            Demo::Canonical => demo_canonical(tol),
        },
    }
}

/// Runs one command and returns the process exit code. Reports go to `--out`
/// or `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("json") + "\n";
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_CONFIG;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
