//! Command-line front end: analyze a plane-curve germ into its identity
//! card, render canyon polygons as SVG, and compare two germs.

use canyonlab::arith::{parse_rat, Rat};
use canyonlab::invariants::{analyze, compare_cards, AnalyzeConfig, Verdict};
use canyonlab::render::render_polygon;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "canyonlab", version, about = "Gradient-canyon invariants of plane curve germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Emit {
    Json,
    Svg,
    Text,
}

#[derive(Args, Clone)]
struct AnalyzeArgs {
    /// Germ in x and y, e.g. "x^4 + x^3*y^3 + y^12 + t*x^2*y^7"
    germ: String,
    /// Parameter binding NAME=p/q (repeatable)
    #[arg(long = "param", value_name = "NAME=p/q")]
    params: Vec<String>,
    /// Truncation override p/q (skips the automatic choice's seed)
    #[arg(long, value_name = "p/q")]
    trunc: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    emit: Emit,
    /// Output file (json/text) or stem for per-canyon SVGs
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Truncation doubling rounds before giving up (env: CANYONLAB_CAP)
    #[arg(long, value_name = "N")]
    cap: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the identity card of one germ
    Analyze(AnalyzeArgs),
    /// Compare the identity cards of two germs
    Compare {
        germ_a: String,
        germ_b: String,
        /// Parameter binding applied to both germs (repeatable)
        #[arg(long = "param", value_name = "NAME=p/q")]
        params: Vec<String>,
        /// Parameter binding for the first germ only
        #[arg(long = "param-a", value_name = "NAME=p/q")]
        params_a: Vec<String>,
        /// Parameter binding for the second germ only
        #[arg(long = "param-b", value_name = "NAME=p/q")]
        params_b: Vec<String>,
        #[arg(long, value_name = "p/q")]
        trunc: Option<String>,
        #[arg(long, value_name = "N")]
        cap: Option<u32>,
    },
    /// Render one SVG per canyon
    Plot(AnalyzeArgs),
}

fn diag(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
}

fn parse_params(specs: &[String]) -> Result<BTreeMap<String, Rat>, String> {
    let mut out = BTreeMap::new();
    for s in specs {
        let (name, val) = s
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=p/q, got {s:?}"))?;
        let r = parse_rat(val).map_err(|_| format!("bad rational {val:?} in {s:?}"))?;
        out.insert(name.trim().to_string(), r);
    }
    Ok(out)
}

fn config(trunc: &Option<String>, cap: Option<u32>) -> Result<AnalyzeConfig, String> {
    let trunc_override = match trunc {
        None => None,
        Some(t) => Some(parse_rat(t).map_err(|_| format!("bad truncation {t:?}"))?),
    };
    let cap = cap
        .or_else(|| {
            std::env::var("CANYONLAB_CAP")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(8);
    Ok(AnalyzeConfig { trunc_override, cap })
}

/// Identity card serialized with sorted keys.
fn card_json(card: &canyonlab::invariants::IdentityCard) -> String {
    let v = serde_json::to_value(card).unwrap();
    serde_json::to_string_pretty(&v).unwrap()
}

fn card_text(card: &canyonlab::invariants::IdentityCard) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    writeln!(s, "germ: {}", card.input).unwrap();
    for (k, v) in &card.params {
        writeln!(s, "  {k} = {v}").unwrap();
    }
    if card.shear != 0 {
        writeln!(s, "shear: y -> y + {}x", card.shear).unwrap();
    }
    writeln!(s, "multiplicity: {}", card.multiplicity).unwrap();
    writeln!(s, "truncation: {}", card.trunc).unwrap();
    for (i, c) in card.canyons.iter().enumerate() {
        writeln!(
            s,
            "canyon {i}: degree {}  h {}  a {}  tangent {}  mu {}",
            c.degree, c.h, c.a.repr, c.tangent.repr, c.mu
        )
        .unwrap();
        let verts: Vec<String> =
            c.polygon.iter().map(|(m, q)| format!("({m},{q})")).collect();
        writeln!(s, "  polygon: {}", verts.join(" ")).unwrap();
        for m in &c.members {
            writeln!(
                s,
                "  arc ({} conjugates, mult {}): {}",
                m.size, m.mult, m.series
            )
            .unwrap();
        }
    }
    for p in &card.pairs {
        if p.applicable {
            writeln!(
                s,
                "pair {:?}: delta {}  H {}  Delta {}",
                p.canyons,
                p.delta.as_deref().unwrap(),
                p.h_invariant.as_deref().unwrap(),
                p.delta_coeff.as_ref().unwrap().repr
            )
            .unwrap();
        } else {
            writeln!(s, "pair {:?}: second-level not applicable", p.canyons).unwrap();
        }
    }
    for o in &card.omega_checks {
        writeln!(
            s,
            "omega check canyon {} at co-slope {}: omega {}  H_min {}  {}",
            o.canyon,
            o.edge_delta,
            o.omega,
            o.h_min,
            if o.pass { "ok" } else { "FAILED" }
        )
        .unwrap();
    }
    for c in &card.tower_caveats {
        writeln!(s, "caveat: {c}").unwrap();
    }
    s
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, content).map_err(|e| e.to_string()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_analysis(
    a: &AnalyzeArgs,
) -> Result<canyonlab::invariants::AnalysisOutput, ExitCode> {
    let params = parse_params(&a.params).map_err(|e| {
        diag("input", &e);
        ExitCode::from(2)
    })?;
    let cfg = config(&a.trunc, a.cap).map_err(|e| {
        diag("input", &e);
        ExitCode::from(2)
    })?;
    analyze(&a.germ, &params, &cfg).map_err(|e| match e {
        canyonlab::Error::TruncationTooLow(m) => {
            diag("truncation", &m);
            ExitCode::from(3)
        }
        other => {
            diag("input", &other.to_string());
            ExitCode::from(2)
        }
    })
}

fn write_svgs(
    out: &Option<PathBuf>,
    res: &canyonlab::invariants::AnalysisOutput,
) -> Result<(), String> {
    let stem = out
        .clone()
        .unwrap_or_else(|| PathBuf::from("canyon"));
    let stem = stem.to_string_lossy().trim_end_matches(".svg").to_string();
    for (i, c) in res.card.canyons.iter().enumerate() {
        // card canyons are sorted; find the matching analysis canyon by
        // re-deriving the order used in the card
        let an = &res.full.analysis;
        let title = format!(
            "canyon {i}: degree {}, h = {}, mu = {}",
            c.degree, c.h, c.mu
        );
        // match by invariant triple; ties share the same polygon anyway
        let poly = an
            .canyons
            .iter()
            .find(|k| {
                k.d.to_string() == c.degree
                    && k.h.to_string() == c.h
                    && k.mu == c.mu
                    && k.polygon
                        .hull
                        .vertices
                        .iter()
                        .map(|d| (d.m, d.q.to_string()))
                        .collect::<Vec<_>>()
                        == c.polygon
            })
            .map(|k| &k.polygon)
            .expect("card canyon matches an analysis canyon");
        let svg = render_polygon(poly, &title);
        let path = format!("{stem}-{i}.svg");
        std::fs::write(&path, svg).map_err(|e| format!("{path}: {e}"))?;
        eprintln!("wrote {path}");
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs, plot_only: bool) -> ExitCode {
    let res = match run_analysis(a) {
        Ok(r) => r,
        Err(c) => return c,
    };
    let io = if plot_only || a.emit == Emit::Svg {
        write_svgs(&a.out, &res)
    } else {
        Ok(())
    };
    if let Err(e) = io {
        diag("io", &e);
        return ExitCode::from(2);
    }
    if !plot_only {
        let body = match a.emit {
            Emit::Text => card_text(&res.card),
            _ => card_json(&res.card) + "\n",
        };
        let target = if a.emit == Emit::Svg { &None } else { &a.out };
        if let Err(e) = write_or_print(target, &body) {
            diag("io", &e);
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, false),
        Command::Plot(a) => cmd_analyze(a, true),
        Command::Compare {
            germ_a,
            germ_b,
            params,
            params_a,
            params_b,
            trunc,
            cap,
        } => {
            let mk = |extra: &[String]| -> Result<BTreeMap<String, Rat>, String> {
                let mut p = parse_params(params)?;
                p.extend(parse_params(extra)?);
                Ok(p)
            };
            let (pa, pb) = match (mk(params_a), mk(params_b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    diag("input", &e);
                    return ExitCode::from(2);
                }
            };
            let cfg = match config(trunc, *cap) {
                Ok(c) => c,
                Err(e) => {
                    diag("input", &e);
                    return ExitCode::from(2);
                }
            };
            let run = |g: &str, p: &BTreeMap<String, Rat>| {
                analyze(g, p, &cfg).map_err(|e| match e {
                    canyonlab::Error::TruncationTooLow(m) => {
                        diag("truncation", &m);
                        ExitCode::from(3)
                    }
                    other => {
                        diag("input", &other.to_string());
                        ExitCode::from(2)
                    }
                })
            };
            let (ra, rb) = match (run(germ_a, &pa), run(germ_b, &pb)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(c), _) | (_, Err(c)) => return c,
            };
            match compare_cards(&ra.card, &rb.card) {
                Verdict::Distinguished(witnesses) => {
                    println!("Distinguished");
                    for w in &witnesses {
                        println!("  - {w}");
                    }
                    ExitCode::from(1)
                }
                Verdict::Inconclusive(note) => {
                    println!("Inconclusive");
                    if let Some(n) = note {
                        println!("  note: {n}");
                    }
                    ExitCode::SUCCESS
                }
            }
        }
    }
}
