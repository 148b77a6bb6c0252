//! Command-line frontend: model ingestion, command dispatch and report
//! rendering. Exit codes: 0 verified/equal, 1 usage or input error,
//! 2 exactness or comparison failure, 3 hypotheses inapplicable,
//! 4 internal contradiction (the engine disagrees with a theorem or the
//! two condition checkers disagree).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use abexact::abseq::{cm_profile, cs_compare, verify, AbseqError, SequenceKind, Verdict};
use abexact::io;
use abexact::lattice::{
    check_conditions, check_conditions_algebraic, decompose_subgroup, dim_classifying,
    ClosedSubgroup, IntMatrix,
};
use abexact::ring::make_ring;
use abexact::spaces::SpaceModel;
use abexact::{catalog, CoefficientRing};

#[derive(Parser)]
#[command(
    name = "abexact",
    about = "Exact verification of skeleton sequences for torus spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Coefficient ring: Q, Z, Fp:<p>, or Z[1/p1,1/p2,...]
    #[arg(long, default_value = "Z")]
    ring: String,
    /// Degree bound for all degreewise verification
    #[arg(long, default_value_t = 20)]
    max_degree: i64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for degreewise verification
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a closed subgroup given by a character matrix
    Decompose {
        /// Ambient torus rank
        #[arg(long)]
        n: usize,
        /// Character matrix as JSON rows, e.g. "[[2,0],[0,2]]"
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the skeleton conditions of a strata file with both checkers
    CheckConditions {
        /// Strata file (JSON)
        strata: PathBuf,
        /// Largest skeleton level to check
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Assemble a sequence and verify exactness degreewise
    Verify {
        /// Catalog name or space file
        space: String,
        /// Sequence kind: cs, full, truncated:<k>, gt
        #[arg(long, default_value = "full")]
        kind: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare the space image with the one-skeleton image degreewise
    CsCompare {
        space: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Depth/dimension/Cohen-Macaulay profile of the tail modules
    Profile {
        space: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Hilbert function of a module file or of a space's cohomology
    Hilbert {
        /// Module file, catalog name, or space file
        input: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the built-in model catalog
    Catalog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_jobs(jobs: usize) {
    abexact::set_parallelism(jobs.max(1));
}

fn parse_kind(s: &str) -> Result<SequenceKind> {
    match s {
        "cs" => Ok(SequenceKind::ChangSkjelbred),
        "full" => Ok(SequenceKind::AtiyahBredonFull),
        "gt" => Ok(SequenceKind::GoertschesToeben),
        other => {
            if let Some(k) = other.strip_prefix("truncated:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| anyhow!("bad truncation level in `{other}`"))?;
                Ok(SequenceKind::AtiyahBredonTruncated(k))
            } else {
                Err(anyhow!("unknown kind `{other}` (use cs|full|truncated:<k>|gt)"))
            }
        }
    }
}

fn load_space(name_or_path: &str) -> Result<SpaceModel> {
    if let Some(model) = catalog::model(name_or_path) {
        return Ok(model);
    }
    let path = PathBuf::from(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        return Ok(io::parse_space(&text)?);
    }
    Err(anyhow!(
        "`{name_or_path}` is neither a catalog model nor a readable file"
    ))
}

fn ring_of(common: &CommonArgs) -> Result<CoefficientRing> {
    Ok(make_ring(&common.ring)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Decompose { n, matrix, common } => {
            configure_jobs(common.jobs);
            let ring = ring_of(&common)?;
            let rows: Vec<Vec<i64>> =
                serde_json::from_str(&matrix).context("parsing character matrix")?;
            let subgroup = ClosedSubgroup::new(n, IntMatrix::from_i64_rows(&rows))?;
            let dec = decompose_subgroup(&subgroup);
            let s = dec
                .finite_orders
                .iter()
                .filter(|m| !ring.is_invertible_int(m))
                .count();
            let dim = dim_classifying(&subgroup, &ring);
            match common.format {
                Format::Json => {
                    let value = serde_json::json!({
                        "ring": ring.to_string(),
                        "finite_orders": dec.finite_orders.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                        "torus_rank": dec.torus_rank,
                        "non_invertible_orders": s,
                        "classifying_dimension": dim,
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Text => {
                    let orders: Vec<String> =
                        dec.finite_orders.iter().map(|m| m.to_string()).collect();
                    println!("ring:        {ring}");
                    println!("m-list:      ({})", orders.join(","));
                    println!("r:           {}", dec.torus_rank);
                    println!("s:           {s}");
                    println!("dim H*(BT'): {dim}");
                }
            }
            Ok(ExitCode::from(0))
        }
        Command::CheckConditions { strata, k, common } => {
            configure_jobs(common.jobs);
            let ring = ring_of(&common)?;
            let text = std::fs::read_to_string(&strata)
                .with_context(|| format!("reading {}", strata.display()))?;
            let strata = io::parse_strata(&text)?;
            let direct = check_conditions(&strata, &ring, k)?;
            let algebraic = check_conditions_algebraic(&strata, &ring, k)?;
            let agree = direct == algebraic;
            match common.format {
                Format::Json => {
                    let value = serde_json::json!({
                        "direct": direct,
                        "algebraic": algebraic,
                        "checkers_agree": agree,
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Text => {
                    println!("ring: {ring}  k: {k}");
                    println!("skeleton checker:  {}", verdict_word(direct.holds));
                    println!("algebraic checker: {}", verdict_word(algebraic.holds));
                    for v in &direct.violations {
                        println!(
                            "  violation: stratum `{}` level {} prime {} ({:?})",
                            v.stratum, v.skeleton_level, v.prime, v.condition
                        );
                    }
                    println!("checkers agree: {agree}");
                }
            }
            if !agree {
                return Ok(ExitCode::from(4));
            }
            Ok(ExitCode::from(if direct.holds { 0 } else { 2 }))
        }
        Command::Verify {
            space,
            kind,
            common,
        } => {
            configure_jobs(common.jobs);
            let ring = ring_of(&common)?;
            let model = load_space(&space)?;
            let kind = parse_kind(&kind)?;
            let report = match verify(&model, &ring, kind, common.max_degree) {
                Ok(r) => r,
                Err(AbseqError::EngineContradiction(msg)) => {
                    eprintln!("ENGINE CONTRADICTION: {msg}");
                    return Ok(ExitCode::from(4));
                }
                Err(AbseqError::CheckerMismatch) => {
                    eprintln!("ENGINE CONTRADICTION: condition checkers disagree");
                    return Ok(ExitCode::from(4));
                }
                Err(e) => return Err(e.into()),
            };
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => render_exactness_text(&report),
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::CsCompare { space, common } => {
            configure_jobs(common.jobs);
            let ring = ring_of(&common)?;
            let model = load_space(&space)?;
            let report = cs_compare(&model, &ring, common.max_degree)?;
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => {
                    println!("ring: {}  max degree: {}", report.ring, report.max_degree);
                    match &report.verdict {
                        abexact::abseq::CsVerdict::Equal => {
                            println!("verdict: Equal");
                            println!("common image ranks: {:?}", report.image_ranks);
                        }
                        abexact::abseq::CsVerdict::Differs {
                            degree,
                            space_image_rank,
                            one_skeleton_image_rank,
                        } => {
                            println!("verdict: Differs at degree {degree}");
                            println!(
                                "  image of H_T(X): rank {space_image_rank}; image of H_T(X_1): rank {one_skeleton_image_rank}"
                            );
                        }
                    }
                }
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::Profile { space, common } => {
            configure_jobs(common.jobs);
            let ring = ring_of(&common)?;
            let model = load_space(&space)?;
            let profile = cm_profile(&model, &ring, common.max_degree)?;
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&profile)?),
                Format::Text => {
                    println!(
                        "ring: {}  max degree: {}  minimal orbit dimension: {}",
                        profile.ring, profile.max_degree, profile.min_orbit_dim
                    );
                    println!(
                        "dim H_T(X) = {} (closed form {})",
                        profile.total_dim, profile.expected_total_dim
                    );
                    println!("splitting holds: {}", profile.splitting_holds);
                    for row in &profile.rows {
                        if row.is_zero {
                            println!("  H_T(X, X_{}) = 0", row.level);
                        } else {
                            println!(
                                "  H_T(X, X_{}): dim {}  depth {}  CM {}",
                                row.level,
                                row.report.dim,
                                row.report.depth,
                                row.report
                                    .is_cm
                                    .map(|b| b.to_string())
                                    .unwrap_or_else(|| "unknown".into())
                            );
                        }
                    }
                }
            }
            Ok(ExitCode::from(0))
        }
        Command::Hilbert { input, common } => {
            configure_jobs(common.jobs);
            let module = if let Some(model) = maybe_space(&input)? {
                let ring = ring_of(&common)?;
                let data =
                    abexact::spaces::equivariant_cohomology(&model, &ring, common.max_degree)?;
                (*data.module).clone()
            } else {
                let text = std::fs::read_to_string(&input)
                    .with_context(|| format!("reading {input}"))?;
                io::parse_module(&text)?
            };
            let pieces = module.hilbert_function(common.max_degree)?;
            match common.format {
                Format::Json => {
                    let value: Vec<_> = pieces
                        .iter()
                        .enumerate()
                        .map(|(d, p)| {
                            serde_json::json!({
                                "degree": d,
                                "free_rank": p.free_rank,
                                "torsion": p.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Text => {
                    for (d, p) in pieces.iter().enumerate() {
                        println!("degree {d}: {p}");
                    }
                }
            }
            Ok(ExitCode::from(0))
        }
        Command::Catalog => {
            for name in catalog::names() {
                println!("{name}");
            }
            Ok(ExitCode::from(0))
        }
    }
}

fn maybe_space(input: &str) -> Result<Option<SpaceModel>> {
    if let Some(model) = catalog::model(input) {
        return Ok(Some(model));
    }
    let path = PathBuf::from(input);
    if path.exists() {
        let text = std::fs::read_to_string(&path)?;
        if let Ok(model) = io::parse_space(&text) {
            return Ok(Some(model));
        }
    }
    Ok(None)
}

fn verdict_word(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "violated"
    }
}

fn render_exactness_text(report: &abexact::abseq::ExactnessReport) {
    println!(
        "kind: {:?}  ring: {}  max degree: {}",
        report.kind, report.ring, report.max_degree
    );
    println!(
        "conditions: {} ({} violations); checkers agree: {}",
        verdict_word(report.hypotheses.conditions.holds),
        report.hypotheses.conditions.violations.len(),
        report.hypotheses.checkers_agree
    );
    for v in &report.hypotheses.conditions.violations {
        println!(
            "  condition violation: stratum `{}` level {} prime {} ({:?})",
            v.stratum, v.skeleton_level, v.prime, v.condition
        );
    }
    if let Some(f) = &report.hypotheses.freeness {
        if f.free {
            println!(
                "freeness: holds with generator degrees {:?} (stable: {})",
                f.generator_degrees, f.stable
            );
        } else {
            println!("freeness: fails ({:?})", f.failure);
        }
    }
    if let Some(cm) = report.hypotheses.cohen_macaulay {
        println!(
            "Cohen-Macaulay: {} ({})",
            cm, report.hypotheses.cm_certificate
        );
    }
    println!("presentation stable: {}", report.presentation_stable);
    for p in &report.positions {
        if p.nonzero.is_empty() {
            println!("position {}: exact in all degrees", p.position);
        } else {
            println!("position {}: homology present", p.position);
            for (d, h) in &p.nonzero {
                println!("  degree {d}: {h}");
            }
        }
    }
    match &report.verdict {
        Verdict::ExactUpToD => println!("verdict: ExactUpToD"),
        Verdict::FailsAt {
            position,
            degree,
            witness,
        } => {
            println!(
                "verdict: FailsAt(position {position}, degree {degree}): homology {}",
                witness.homology
            );
            println!("  cycle generators (columns): {:?}", witness.cycle_generators);
            println!(
                "  boundary generators (columns): {:?}",
                witness.boundary_generators
            );
        }
        Verdict::Inapplicable { reason } => println!("verdict: Inapplicable ({reason})"),
    }
}
