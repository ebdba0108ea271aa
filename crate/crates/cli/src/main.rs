//! Command-line surface: construct the marked pair, evaluate and plot maps,
//! compute normal forms, and run the verification suites.
//!
//! Machine-readable JSON goes to stdout, human summaries to stderr.
//! Exit codes: 0 success/verified, 1 verification failed (witness printed),
//! 2 usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use flimit_core::construct::{build_generators, capital_words, std_x, GeneratorSet, Params};
use flimit_core::normalform::to_normal_form;
use flimit_core::plmap::PLMap;
use flimit_core::verify::{
    ball_check, capital_tower, coverage_check, distance_bound, generation_check, lower_tower,
    ping_pong_certify, relator_check, twin_equalities, BallReport, CoverVerdict, ShortestRelation,
    Verdict,
};
use flimit_core::words::{enumerate_reduced, Word};
use flimit_core::Dyadic;

#[derive(Parser)]
#[command(
    name = "flimit",
    version,
    about = "Exact computations in Thompson's group F: a marked generating pair with no short relations, and the verification suite around it"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Marking {
    /// The modified pair (X0, X1)
    Modified,
    /// The standard pair (x0, x1)
    Standard,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CertifyMode {
    /// Evaluate every word as an exact map
    Brute,
    /// Trace ping-pong certificates first, evaluate only the leftovers
    Pingpong,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the pair X0, X1 and the word tower as JSON
    Gens {
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the image of a point under a map
    Eval {
        /// Map source: a JSON file, `x<N>`, X0, X1, a tower name (C, S,
        /// T, Sigma, Theta, Z, W, P, Q, H, K), or its lower-case twin
        #[arg(long)]
        map: String,
        /// Point to evaluate, e.g. 3/2^4
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
    },
    /// Print the normal form of a word over the x-alphabet
    Nf { word: String },
    /// Run verification parts: i = word-pair equalities, ii = relator
    /// identities, iv = generation (coverage and compact corrections)
    Verify {
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
        /// Comma-separated subset of i,ii,iv
        #[arg(long, default_value = "i,ii,iv")]
        parts: String,
    },
    /// Scan all reduced words up to a length for relations
    Ball {
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
        #[arg(long)]
        len: u32,
        #[arg(long, value_enum, default_value_t = CertifyMode::Brute)]
        certify: CertifyMode,
        /// Worker threads for the word-tree scan
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Marking::Modified)]
        marking: Marking,
    },
    /// Support extent of a named map
    Support {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
    },
    /// Grow images of (1,3) until they cover (delta, upto]
    Cover {
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
        #[arg(long, default_value = "1/2^20")]
        delta: String,
        #[arg(long, default_value = "60")]
        upto: String,
        /// Iteration budget
        #[arg(long, default_value_t = 256)]
        iters: u32,
    },
    /// Distance bound e^-R to the free 2-marking
    Distance {
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
        #[arg(long = "max-len")]
        max_len: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Marking::Modified)]
        marking: Marking,
    },
    /// Write an SVG graph of a map
    Plot {
        #[arg(long)]
        map: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        m: u32,
        #[arg(long, default_value_t = 20)]
        b: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn params(m: u32, b: u32) -> Result<Params, String> {
    Params::new(m, b).map_err(|e| e.to_string())
}

fn parse_dyadic(s: &str) -> Result<Dyadic, String> {
    s.parse().map_err(|e| format!("bad dyadic '{s}': {e}"))
}

fn params_json(p: &Params) -> serde_json::Value {
    json!({
        "m": p.m(),
        "b": p.b(),
        "n": p.ball_radius(),
        "i": p.conj_depth(),
        "u": p.top(),
        "xi": p.xi(),
    })
}

fn resolve_map(src: &str, m: u32, b: u32) -> Result<PLMap, String> {
    if Path::new(src).is_file() {
        let text = fs::read_to_string(src).map_err(|e| format!("{src}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("{src}: {e}"));
    }
    if let Some(rest) = src.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) {
            let i: u32 = rest
                .parse()
                .map_err(|_| format!("bad generator index in '{src}'"))?;
            return Ok(std_x(i));
        }
    }
    let p = params(m, b)?;
    let gens = build_generators(&p);
    match src {
        "X0" => return Ok(gens.x0.clone()),
        "X1" => return Ok(gens.x1.clone()),
        _ => {}
    }
    let lower_case = src.chars().all(|c| c.is_ascii_lowercase());
    let tower = if lower_case {
        lower_tower(&gens)
    } else {
        capital_tower(&gens)
    };
    tower
        .get(src)
        .cloned()
        .ok_or_else(|| format!("'{src}' is not a file, x<N>, X0, X1, or a tower word name"))
}

fn marked_pair(marking: Marking, m: u32, b: u32) -> Result<(GeneratorSet, [PLMap; 2]), String> {
    let p = params(m, b)?;
    let gens = build_generators(&p);
    let pair = match marking {
        Marking::Modified => gens.pair(),
        Marking::Standard => [std_x(0), std_x(1)],
    };
    Ok((gens, pair))
}

fn run(cmd: Cmd) -> Result<u8, String> {
    match cmd {
        Cmd::Gens { m, b, out } => {
            let p = params(m, b)?;
            let gens = build_generators(&p);
            let words = capital_words(&p);
            let word_map: serde_json::Map<String, serde_json::Value> = words
                .named()
                .iter()
                .map(|(n, w)| (n.to_string(), json!(w.to_string())))
                .collect();
            let doc = json!({
                "params": params_json(&p),
                "X0": gens.x0,
                "X1": gens.x1,
                "words": word_map,
            });
            let text = serde_json::to_string_pretty(&doc).unwrap();
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
                    eprintln!("wrote generator set ({p}) to {}", path.display());
                }
                None => println!("{text}"),
            }
            Ok(0)
        }
        Cmd::Eval { map, at, m, b } => {
            let f = resolve_map(&map, m, b)?;
            let t = parse_dyadic(&at)?;
            let image = f.evaluate(&t).map_err(|e| e.to_string())?;
            println!("{image}");
            Ok(0)
        }
        Cmd::Nf { word } => {
            let w = Word::parse(&word).map_err(|e| e.to_string())?;
            let nf = to_normal_form(&w).map_err(|e| e.to_string())?;
            println!("{nf}");
            Ok(0)
        }
        Cmd::Verify { m, b, parts } => {
            let p = params(m, b)?;
            let gens = build_generators(&p);
            let mut results = serde_json::Map::new();
            let mut all_pass = true;
            for part in parts.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (pass, value) = match part {
                    "i" => {
                        let rep = twin_equalities(&gens).map_err(|e| e.to_string())?;
                        (rep.pass, serde_json::to_value(&rep).unwrap())
                    }
                    "ii" => {
                        let rep = relator_check(&gens).map_err(|e| e.to_string())?;
                        (rep.pass, serde_json::to_value(&rep).unwrap())
                    }
                    "iv" => {
                        let delta = Dyadic::one().mul_pow2(-20);
                        let upto = Dyadic::from(60i64);
                        let rep = generation_check(&gens, &delta, &upto, 256)
                            .map_err(|e| e.to_string())?;
                        (rep.pass, serde_json::to_value(&rep).unwrap())
                    }
                    other => return Err(format!("unknown part '{other}' (use i, ii, iv)")),
                };
                eprintln!("part {part}: {}", if pass { "ok" } else { "FAILED" });
                all_pass &= pass;
                results.insert(part.to_string(), value);
            }
            if results.is_empty() {
                return Err("no parts requested".into());
            }
            let doc = json!({ "params": params_json(&p), "results": results, "pass": all_pass });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(if all_pass { 0 } else { 1 })
        }
        Cmd::Ball {
            m,
            b,
            len,
            certify,
            jobs,
            marking,
        } => {
            if len < 1 {
                return Err("--len must be at least 1".into());
            }
            let (gens, pair) = marked_pair(marking, m, b)?;
            let report = match certify {
                CertifyMode::Brute => ball_check(&pair, len, jobs.max(1)),
                CertifyMode::Pingpong => certified_scan(&gens, len, marking)?,
            };
            let found = report.shortest_relation.is_some();
            match &report.shortest_relation {
                Some(rel) => eprintln!(
                    "relation of length {} found among {} words: {}",
                    rel.length, report.words_checked, rel.word
                ),
                None => eprintln!(
                    "no relation among {} reduced words of length <= {len}",
                    report.words_checked
                ),
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if found { 1 } else { 0 })
        }
        Cmd::Support { word, m, b } => {
            let f = resolve_map(&word, m, b)?;
            // None when an isolated fixed point sits at a non-dyadic spot
            let components = f.support().ok();
            let hull = f
                .support_hull_beyond(&Dyadic::zero())
                .map_err(|e| e.to_string())?;
            match &hull {
                Some(h) => eprintln!("{word}: moving set spans {h}"),
                None => eprintln!("{word}: identity map"),
            }
            let doc = json!({ "word": word, "components": components, "hull": hull });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
        Cmd::Cover {
            m,
            b,
            delta,
            upto,
            iters,
        } => {
            let p = params(m, b)?;
            let gens = build_generators(&p);
            let delta = parse_dyadic(&delta)?;
            let upto = parse_dyadic(&upto)?;
            let rep = coverage_check(&gens, &delta, &upto, iters).map_err(|e| e.to_string())?;
            let covered = rep.verdict == CoverVerdict::Covered;
            eprintln!(
                "target ({delta}, {upto}]: {} after {} rounds",
                if covered {
                    "covered"
                } else {
                    "not covered (inconclusive)"
                },
                rep.iterations
            );
            println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            Ok(if covered { 0 } else { 1 })
        }
        Cmd::Distance {
            m,
            b,
            max_len,
            jobs,
            marking,
        } => {
            if max_len < 1 {
                return Err("--max-len must be at least 1".into());
            }
            let (_, pair) = marked_pair(marking, m, b)?;
            let bound = distance_bound(&pair, max_len, jobs.max(1));
            eprintln!(
                "distance bound {} (no relation of length <= {})",
                bound.bound, bound.r
            );
            println!("{}", serde_json::to_string_pretty(&bound).unwrap());
            Ok(0)
        }
        Cmd::Plot { map, out, m, b } => {
            let f = resolve_map(&map, m, b)?;
            let svg = render_svg(&f);
            fs::write(&out, svg).map_err(|e| format!("{}: {e}", out.display()))?;
            eprintln!("wrote {}", out.display());
            Ok(0)
        }
    }
}

// ping-pong first, exact evaluation for whatever stays inconclusive
fn certified_scan(gens: &GeneratorSet, len: u32, marking: Marking) -> Result<BallReport, String> {
    if marking == Marking::Standard {
        return Err("--certify pingpong applies to the modified marking".into());
    }
    let mut certified = 0u64;
    let mut brute = 0u64;
    let mut best: Option<(u32, String)> = None;
    for w in enumerate_reduced(2, len) {
        if w.is_empty() {
            continue;
        }
        let state = ping_pong_certify(gens, &w).map_err(|e| e.to_string())?;
        match state.verdict {
            Verdict::Certified => certified += 1,
            Verdict::Inconclusive => {
                brute += 1;
                let map = w.to_map(|i| gens.assign(i)).map_err(|e| e.to_string())?;
                if map.is_identity() {
                    let cand = (w.len() as u32, w.to_string());
                    if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    eprintln!("{certified} words certified by ping-pong, {brute} evaluated directly");
    Ok(BallReport {
        checked_len: len,
        words_checked: certified + brute,
        shortest_relation: best.map(|(length, word)| ShortestRelation { length, word }),
    })
}

fn render_svg(f: &PLMap) -> String {
    let last_x = f.breaks().last().map(|(x, _)| x.to_f64()).unwrap_or(0.0);
    let hi = last_x + 2.0;
    let mut verts: Vec<(f64, f64)> = f
        .breaks()
        .iter()
        .map(|(x, y)| (x.to_f64(), y.to_f64()))
        .collect();
    verts.push((hi, hi + f.tail_offset() as f64));
    let y_max = verts.iter().map(|&(_, y)| y).fold(hi, f64::max);

    let size = 640.0;
    let margin = 40.0;
    let sx = (size - 2.0 * margin) / hi.max(1.0);
    let sy = (size - 2.0 * margin) / y_max.max(1.0);
    let px = |x: f64| margin + x * sx;
    let py = |y: f64| size - margin - y * sy;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    // axes with integer ticks
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        px(0.0),
        py(0.0),
        px(hi),
        py(0.0)
    ));
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        px(0.0),
        py(0.0),
        px(0.0),
        py(y_max)
    ));
    let mut i = 0.0;
    while i <= hi {
        out.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            px(i),
            py(0.0) - 3.0,
            py(0.0) + 3.0
        ));
        i += 1.0;
    }
    let mut j = 0.0;
    while j <= y_max {
        out.push_str(&format!(
            "  <line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>\n",
            py(j),
            px(0.0) - 3.0,
            px(0.0) + 3.0
        ));
        j += 1.0;
    }
    // dashed diagonal for reference
    let diag_end = hi.min(y_max);
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\" stroke-dasharray=\"4\"/>\n",
        px(0.0),
        py(0.0),
        px(diag_end),
        py(diag_end)
    ));
    // the graph, breakpoints marked
    let pts: Vec<String> = verts
        .iter()
        .map(|&(x, y)| format!("{},{}", px(x), py(y)))
        .collect();
    out.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\"/>\n",
        pts.join(" ")
    ));
    for (x, y) in f.breaks() {
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f5fbf\"/>\n",
            px(x.to_f64()),
            py(y.to_f64())
        ));
    }
    out.push_str("</svg>\n");
    out
}
