mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use surftrace_core::exactnum::rat_to_string;
use surftrace_core::matchenum::{expected_trace_terms, j_n_with, MatchOptions};
use surftrace_core::mixedrep::z_theta_map;
use surftrace_core::montecarlo::{mc_j, mc_word_trace};
use surftrace_core::oracle::j_via_traces;
use surftrace_core::repdata::{dim_mixed_poly, witten_zeta_truncated, MixedLabel};
use surftrace_core::surfacegeom::{scan_matchstar, SurfaceRecord};
use surftrace_core::weingarten::wg_table;
use surftrace_core::wordintegral::haar_word_integral;
use surftrace_core::words::{dehn_report, parse_word, Word};
use surftrace_core::{Error, Partition};

use config::RunConfig;
use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(
    name = "surftrace",
    version,
    about = "Exact Haar word integrals and surface-group trace checks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to SURFTRACE_THREADS or the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit the timestamp field so reruns are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,
    /// Permit overriding cost guards.
    #[arg(long = "unsafe", global = true)]
    allow_unsafe: bool,
    /// Enumeration cost limit (requires --unsafe).
    #[arg(long, global = true)]
    cost_limit: Option<u128>,
    /// Allow genus other than two, wired by the cyclic junction rule.
    #[arg(long, global = true)]
    general_genus: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct LabelArgs {
    /// Positive partition, comma separated (empty for none).
    #[arg(long)]
    mu: Option<String>,
    /// Negative partition, comma separated (empty for none).
    #[arg(long)]
    nu: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weingarten coefficients for S_k.
    Wg {
        #[arg(long)]
        k: usize,
        /// Cycle type, comma separated; all classes when omitted.
        #[arg(long)]
        cycle_type: Option<String>,
    },
    /// Dimension polynomial of a mixed label.
    Dims {
        #[command(flatten)]
        label: LabelArgs,
        /// Dimensions to evaluate at, comma separated.
        #[arg(long)]
        n: Option<String>,
    },
    /// Projection coefficients z_theta over S_{k+l}.
    Ztheta {
        #[command(flatten)]
        label: LabelArgs,
    },
    /// Integral of the trace of a word over U(n)^r.
    WordIntegral {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        word: Option<String>,
        /// Emit JSON (the default format).
        #[arg(long)]
        json: bool,
    },
    /// Matching-sum value of the single-label surface integral.
    SurfaceTrace {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        label: LabelArgs,
        /// Restrict to the starred matchings.
        #[arg(long)]
        star: bool,
        /// Compare with the power-sum route at these dimensions.
        #[arg(long)]
        oracle_check: Option<String>,
    },
    /// Euler characteristics over the starred matchings, one record per datum.
    ChiCheck {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Directory for counterexample dumps.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Skip the piece decomposition.
        #[arg(long)]
        no_pieces: bool,
    },
    /// Shortest conjugacy representative by Dehn's algorithm.
    Dehn {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Truncated Witten zeta function of SU(n).
    Zeta {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_boxes: Option<usize>,
    },
    /// Monte Carlo estimate of the trace, or of the labelled integral.
    Mc {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        label: LabelArgs,
    },
    /// Finite-label assembly of the expected trace under the surface measure.
    ExpectedTrace {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        max_boxes: Option<usize>,
        /// Dimension at which the sum is evaluated.
        #[arg(long)]
        n0: usize,
    },
}

const HEURISTIC_BANNER: &str =
    "heuristic: the exceptional label set and the error term are approximated by a box-bounded label sum";

fn parse_parts(s: &str) -> anyhow::Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<u32>().with_context(|| format!("bad part '{p}'")))
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().with_context(|| format!("bad value '{p}'")))
        .collect()
}

struct Ctx {
    cfg: RunConfig,
    opts: MatchOptions,
}

impl Ctx {
    fn word_text(&self, word: &Option<String>) -> anyhow::Result<String> {
        word.clone()
            .or_else(|| self.cfg.word.clone())
            .ok_or_else(|| anyhow!("--word is required"))
    }

    fn genus(&self, g: Option<usize>) -> anyhow::Result<usize> {
        let g = g.or(self.cfg.g).unwrap_or(2);
        if g < 2 {
            bail!("genus must be at least 2, got {g}");
        }
        Ok(g)
    }

    fn surface_word(
        &self,
        g: Option<usize>,
        word: &Option<String>,
    ) -> anyhow::Result<(usize, Word)> {
        let g = self.genus(g)?;
        Ok((g, parse_word(&self.word_text(word)?, g)?))
    }

    fn label(&self, a: &LabelArgs) -> anyhow::Result<MixedLabel> {
        let mu =
            a.mu.clone()
                .or_else(|| self.cfg.mu.clone())
                .unwrap_or_default();
        let nu =
            a.nu.clone()
                .or_else(|| self.cfg.nu.clone())
                .unwrap_or_default();
        Ok(MixedLabel::from_parts(
            &parse_parts(&mu)?,
            &parse_parts(&nu)?,
        )?)
    }

    fn has_label(&self, a: &LabelArgs) -> bool {
        a.mu.is_some() || a.nu.is_some() || self.cfg.mu.is_some() || self.cfg.nu.is_some()
    }
}

fn run(cli: Cli, out: &mut Emitter) -> anyhow::Result<()> {
    let cfg = match &cli.global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cost_limit = cli.global.cost_limit.or(cfg.cost_limit);
    if cost_limit.is_some() && !cli.global.allow_unsafe {
        bail!("overriding the cost limit requires --unsafe");
    }
    let mut opts = MatchOptions {
        general_genus: cli.global.general_genus || cfg.general_genus.unwrap_or(false),
        ..MatchOptions::default()
    };
    if let Some(c) = cost_limit {
        opts.cost_limit = c;
    }
    let ctx = Ctx { cfg, opts };
    match cli.command {
        Command::Wg { k, cycle_type } => {
            let table = wg_table(k)?;
            let classes: Vec<Partition> = match cycle_type {
                Some(ct) => {
                    let p = Partition::new(parse_parts(&ct)?)?;
                    if p.size() != k {
                        bail!("cycle type {p} is not a partition of {k}");
                    }
                    vec![p]
                }
                None => table.classes().to_vec(),
            };
            let rows: Vec<Value> = classes
                .iter()
                .map(|p| json!({"cycle_type": p.to_string(), "coeff": table.coeff_by_class(table.class_index(p))}))
                .collect();
            out.document(&json!({"k": k, "coefficients": rows}))
        }
        Command::Dims { label, n } => {
            let lab = ctx.label(&label)?;
            let poly = dim_mixed_poly(&lab)?;
            let ns: Vec<i64> = match n {
                Some(s) => parse_list(&s)?,
                None => ctx.cfg.n.clone().unwrap_or_default(),
            };
            let values: Vec<Value> = ns
                .iter()
                .map(|&n| json!({"n": n, "dim": rat_to_string(&poly.eval_int(n))}))
                .collect();
            out.document(&json!({"label": lab.to_string(), "dim": poly, "values": values}))
        }
        Command::Ztheta { label } => {
            let lab = ctx.label(&label)?;
            out.document(&json!({"label": lab.to_string(), "z": z_theta_map(&lab)?}))
        }
        Command::WordIntegral { r, word, json: _ } => {
            let r = r.or(ctx.cfg.r).ok_or_else(|| anyhow!("--r is required"))?;
            let w = Word::parse_free(&ctx.word_text(&word)?, r)?;
            let res = haar_word_integral(r, &w)?;
            out.document(&json!({"word": w.to_compact(), "r": r, "value": res.value, "degree": res.degree, "normalized": res.normalized}))
        }
        Command::SurfaceTrace {
            g,
            word,
            label,
            star,
            oracle_check,
        } => {
            let (_, w) = ctx.surface_word(g, &word)?;
            let lab = ctx.label(&label)?;
            let opts = MatchOptions { star, ..ctx.opts };
            let res = j_n_with(&w, &lab, &opts)?;
            let mut doc = json!({"word": w.to_compact(), "label": lab.to_string(), "result": res});
            if let Some(list) = oracle_check {
                if star {
                    bail!("--oracle-check compares the full sum; drop --star");
                }
                let traces = j_via_traces(&w, &lab)?;
                let mut agree = res.j == traces;
                let mut points = Vec::new();
                for n in parse_list::<i64>(&list)? {
                    let (a, b) = (res.j.eval_int(n)?, traces.eval_int(n)?);
                    agree &= a == b;
                    points.push(json!({"n": n, "matching": rat_to_string(&a), "power_sums": rat_to_string(&b)}));
                }
                doc["oracle"] = json!({"agree": agree, "points": points});
                if !agree {
                    out.document(&doc)?;
                    bail!("matching sum disagrees with the power-sum route");
                }
            }
            out.document(&doc)
        }
        Command::ChiCheck {
            g,
            word,
            k,
            l,
            dump_dir,
            no_pieces,
        } => {
            let (_, w) = ctx.surface_word(g, &word)?;
            chi_check(&w, k, l, &ctx.opts, dump_dir.as_deref(), !no_pieces, out)
        }
        Command::Dehn { g, word } => {
            let (g, w) = ctx.surface_word(g, &word)?;
            out.document(&serde_json::to_value(dehn_report(&w, g))?)
        }
        Command::Zeta { s, n, max_boxes } => {
            let n = n.or_else(|| {
                ctx.cfg
                    .n
                    .as_ref()
                    .and_then(|v| v.first().map(|&x| x as usize))
            });
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let b = max_boxes
                .or(ctx.cfg.max_boxes)
                .ok_or_else(|| anyhow!("--max-boxes is required"))?;
            let z = witten_zeta_truncated(s, n, b)?;
            let approx = num_traits::ToPrimitive::to_f64(&z);
            out.document(&json!({"s": s, "n": n, "max_boxes": b, "value": rat_to_string(&z), "approx": approx}))
        }
        Command::Mc {
            g,
            word,
            n,
            samples,
            seed,
            label,
        } => {
            let (_, w) = ctx.surface_word(g, &word)?;
            let n = n.or_else(|| {
                ctx.cfg
                    .n
                    .as_ref()
                    .and_then(|v| v.first().map(|&x| x as usize))
            });
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let samples = samples.or(ctx.cfg.samples).unwrap_or(10_000);
            let seed = seed.or(ctx.cfg.seed).unwrap_or(0);
            let est = if ctx.has_label(&label) {
                mc_j(&w, &ctx.label(&label)?, n, samples, seed)?
            } else {
                mc_word_trace(w.rank(), &w, n, samples, seed)?
            };
            out.document(&serde_json::to_value(est)?)
        }
        Command::ExpectedTrace {
            g,
            word,
            max_boxes,
            n0,
        } => {
            let (_, w) = ctx.surface_word(g, &word)?;
            let b = max_boxes.or(ctx.cfg.max_boxes).unwrap_or(2);
            let terms = expected_trace_terms(&w, b, n0, &ctx.opts)?;
            let mut doc = serde_json::to_value(terms)?;
            doc["heuristic"] = json!(HEURISTIC_BANNER);
            doc["word"] = json!(w.to_compact());
            doc["max_boxes"] = json!(b);
            doc["n0"] = json!(n0);
            out.document(&doc)
        }
    }
}

fn chi_check(
    w: &Word,
    k: usize,
    l: usize,
    opts: &MatchOptions,
    dump_dir: Option<&Path>,
    pieces: bool,
    out: &mut Emitter,
) -> anyhow::Result<()> {
    if let Some(dir) = dump_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut io_err = None;
    let mut seen = 0u64;
    let scan = scan_matchstar(w, k, l, opts, pieces, |_, c| {
        seen += 1;
        if seen.is_multiple_of(100_000) {
            eprintln!("chi-check: {seen} data");
        }
        if io_err.is_none() {
            io_err = out
                .record(&serde_json::to_value(SurfaceRecord::of(c)).unwrap())
                .err();
        }
    });
    if let Some(e) = io_err {
        return Err(e);
    }
    let scan = match scan {
        Ok(s) => s,
        Err(Error::Violation(dump)) => {
            if let Some(dir) = dump_dir {
                fs::write(dir.join("axiom-failure.json"), &dump)?;
            }
            bail!("axiom check failed: {dump}");
        }
        Err(e) => return Err(e.into()),
    };
    if let (Some(dir), Some(first)) = (dump_dir, &scan.first_violation) {
        fs::write(dir.join("first-violation.json"), first)?;
    }
    out.summary(&json!({
        "word": w.to_compact(),
        "k": k,
        "l": l,
        "count": scan.count,
        "max_chi": scan.max_chi,
        "bound": -((k + l) as i64),
        "bound_violations": scan.bound_violations,
        "pieces": scan.pieces,
        "piece_violations": scan.piece_violations,
    }))
}

fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    let from_env = std::env::var("SURFTRACE_THREADS")
        .ok()
        .and_then(|v| v.parse().ok());
    if let Some(t) = threads.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format.unwrap_or_else(|| {
        cli.global
            .config
            .as_deref()
            .and_then(|p| RunConfig::load(p).ok())
            .and_then(|c| c.format)
            .unwrap_or(Format::Json)
    });
    let mut out = Emitter::new(format, !cli.global.reproducible);
    let result = init_threads(cli.global.threads).and_then(|_| run(cli, &mut out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(core) = e.downcast_ref::<Error>() {
                if core.is_guard() {
                    eprintln!("refused (too large by design): {core}");
                    return ExitCode::from(2);
                }
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
