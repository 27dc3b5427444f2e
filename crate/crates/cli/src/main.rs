//! `gring`: command-line front end for the group-ring derivation toolkit.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gring_core::analysis::{
    self, classify, exp_norm_boundedness_probe, unboundedness_witness, ClassifyOptions,
    ProbeVerdict,
};
use gring_core::character::{self, format_complex as fmt_complex};
use gring_core::derivation::{leibniz_scan, CommutatorConvention, SCHEMA_VERSION};
use gring_core::ring::{is_subordinate, norm, SubordinationVerdict, SUBORDINATION_NOTE};
use gring_core::{parse_character, DerivationSpec, Group, NormSpec, RingElement};

/// Exit status when an obstruction or witness was found.
const EXIT_FOUND: u8 = 2;
const EXIT_FAILED: u8 = 1;

#[derive(Parser)]
#[command(
    name = "gring",
    version,
    about = "Derivations of group rings and groupoid characters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a word-length ball.
    Ball(BallArgs),
    /// Classify a derivation through its character.
    Classify(ClassifyArgs),
    /// Search for an unboundedness witness of a character.
    Witness(WitnessArgs),
    /// Exponential-norm boundedness probe.
    Probe(ProbeArgs),
    /// Scan Leibniz defects over a ball.
    Leibniz(LeibnizArgs),
    /// Evaluate a norm and check its subordination to the sup norm.
    Norms(NormsArgs),
}

#[derive(Args)]
struct Common {
    /// Group spec: free:2, abelian:1, heisenberg, cyclic:6, dihedral:4, symmetric:3, ...
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = analysis::DEFAULT_RADIUS)]
    radius: usize,
    #[arg(long, default_value_t = character::DEFAULT_TOL)]
    tol: f64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the tabular part of the report here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct DerivationArgs {
    /// inner:<a>, central:<z>;<hom>, potential:@f.json, stinner:<a>;<sigma>;<tau>,
    /// character:<character spec>, table:@f.json
    #[arg(long)]
    derivation: String,
    /// Domain radius of the basis table [default: the command radius].
    #[arg(long)]
    dom_radius: Option<usize>,
    /// Truncation radius for character-based tables [default: twice the domain radius].
    #[arg(long)]
    trunc_radius: Option<usize>,
    /// Commutator convention for inner derivations: xa-ax or ax-xa.
    #[arg(long, default_value = "xa-ax")]
    convention: String,
}

#[derive(Args)]
struct BallArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    derivation: DerivationArgs,
    /// Ambient norm: sup, lp:<p>, expw:<alpha>.
    #[arg(long, default_value = "sup")]
    norm: String,
    #[arg(long, default_value_t = analysis::DEFAULT_WITNESS_LENGTH)]
    length: usize,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    common: Common,
    /// inner:<a>, potential:@f.json, central:<z>;<hom>, tabulated:@f.json
    #[arg(long)]
    character: String,
    #[arg(long, default_value_t = analysis::DEFAULT_WITNESS_LENGTH)]
    length: usize,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    derivation: DerivationArgs,
    /// Exponential weight norm, expw:<alpha>.
    #[arg(long)]
    norm: String,
    #[arg(long, default_value_t = analysis::DEFAULT_THETA)]
    theta: f64,
}

#[derive(Args)]
struct LeibnizArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    derivation: DerivationArgs,
}

#[derive(Args)]
struct NormsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "sup")]
    norm: String,
    /// Ring element to evaluate, e.g. "2*x - 3*y^2".
    #[arg(long)]
    element: Option<String>,
}

struct Outcome {
    report: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    let (common, outcome) = match command {
        Command::Ball(a) => {
            let o = ball(&a)?;
            (a.common, o)
        }
        Command::Classify(a) => {
            let o = classify_cmd(&a)?;
            (a.common, o)
        }
        Command::Witness(a) => {
            let o = witness(&a)?;
            (a.common, o)
        }
        Command::Probe(a) => {
            let o = probe(&a)?;
            (a.common, o)
        }
        Command::Leibniz(a) => {
            let o = leibniz(&a)?;
            (a.common, o)
        }
        Command::Norms(a) => {
            let o = norms(&a)?;
            (a.common, o)
        }
    };
    if let Some(path) = &common.json {
        write_json(path, &outcome.report)?;
    }
    if let Some(path) = &common.csv {
        let Some((header, rows)) = &outcome.table else {
            bail!("this command has no tabular output for --csv");
        };
        write_csv(path, header, rows)?;
    }
    Ok(outcome.code)
}

fn write_json(path: &Path, report: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn group_of(common: &Common) -> Result<Group> {
    Group::from_spec_str(&common.group).with_context(|| format!("group spec {:?}", common.group))
}

fn build_derivation(
    group: &Group,
    args: &DerivationArgs,
    radius: usize,
) -> Result<(DerivationSpec, gring_core::Derivation, CommutatorConvention)> {
    let convention: CommutatorConvention = args.convention.parse()?;
    let mut spec = DerivationSpec::parse(&args.derivation, group)?;
    if let DerivationSpec::Inner(a) = &spec {
        spec = DerivationSpec::Inner(convention.normalize(a));
    }
    let dom = args.dom_radius.unwrap_or(radius);
    let trunc = args.trunc_radius.unwrap_or(2 * dom);
    let d = spec.build(group, dom, trunc)?;
    Ok((spec, d, convention))
}

fn ball(a: &BallArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let ball = group.ball(a.common.radius)?;
    let sizes = ball.sphere_sizes();
    println!(
        "group {}  radius {}  elements {}",
        group.spec(),
        a.common.radius,
        ball.len()
    );
    println!(
        "sphere sizes {sizes:?}{}",
        if ball.is_saturated() {
            "  (whole group)"
        } else {
            ""
        }
    );
    let rows: Vec<Vec<String>> = ball
        .elements()
        .iter()
        .map(|g| vec![group.format(g), ball.length(g).unwrap_or(0).to_string()])
        .collect();
    let report = json!({
        "schema": SCHEMA_VERSION,
        "group": group.spec().to_string(),
        "radius": a.common.radius,
        "size": ball.len(),
        "saturated": ball.is_saturated(),
        "sphere_sizes": sizes,
        "elements": rows.iter().map(|r| json!({"element": r[0], "length": r[1].parse::<usize>().unwrap_or(0)})).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        report,
        table: Some((vec!["element", "length"], rows)),
        code: 0,
    })
}

fn classify_cmd(a: &ClassifyArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let ambient: NormSpec = a.norm.parse()?;
    let (_, d, convention) = build_derivation(&group, &a.derivation, a.common.radius)?;
    let options = ClassifyOptions {
        tol: a.common.tol,
        witness_length: a.length,
        convention,
        ..ClassifyOptions::default()
    };
    let rep = classify(&group, &d, ambient, a.common.radius, &options)?;

    println!(
        "derivation {} on {} (domain radius {}, {})",
        d.provenance(),
        group.spec(),
        d.dom_radius(),
        if d.is_exact() { "exact" } else { "truncated" }
    );
    println!("sign convention: {}", convention.describe());
    println!(
        "additivity: {} ({} pairs checked, {} skipped)",
        if rep.additivity.is_ok() {
            "ok"
        } else {
            "VIOLATED"
        },
        rep.additivity.checked,
        rep.additivity.skipped
    );
    match rep.obstruction() {
        None => println!("loops: trivial at radius {} -> quasi-inner", rep.radius),
        Some(o) => println!(
            "loops: obstruction at object {} with conjugator {} (value {})",
            group.format(&o.loop_info.object),
            group.format(&o.loop_info.conjugator),
            fmt_complex(o.value)
        ),
    }
    println!(
        "ambient {}: {} (best constant {:.6}; {})",
        ambient,
        if rep.subordination.is_subordinate() {
            "subordinate"
        } else {
            "not subordinate"
        },
        rep.subordination.best_constant,
        SUBORDINATION_NOTE
    );
    println!(
        "operator norm lower bound: {:.6}{}",
        rep.norm_bound.value,
        if rep.norm_plateau {
            " (plateau)"
        } else {
            " (growing)"
        }
    );
    let mut rows = Vec::new();
    if let Some(w) = &rep.witness {
        if w.found() {
            println!("witness: ratios {:?}", w.ratios());
            rows = witness_rows(w);
        } else {
            println!("witness: none found");
        }
    }
    if let Some(p) = &rep.probe {
        println!("exp-norm probe: {:?}, ratios {:?}", p.verdict, p.ratios());
    }
    println!(
        "cross-check: {}",
        if rep.cross_check.fired || !rep.cross_check.implication_holds {
            "FIRED"
        } else {
            "consistent"
        }
    );

    let code =
        if !rep.additivity.is_ok() || rep.cross_check.fired || !rep.cross_check.implication_holds {
            EXIT_FAILED
        } else if rep.obstruction().is_some() || rep.witness_found() {
            EXIT_FOUND
        } else {
            0
        };
    Ok(Outcome {
        report: rep.to_json(&group),
        table: Some((WITNESS_HEADER.to_vec(), rows)),
        code,
    })
}

const WITNESS_HEADER: [&str; 5] = ["n", "value", "image_norm", "basis_norm", "ratio"];

fn witness_rows(w: &analysis::WitnessReport) -> Vec<Vec<String>> {
    w.rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_complex(r.value),
                r.image_norm.to_string(),
                r.basis_norm.to_string(),
                r.ratio.to_string(),
            ]
        })
        .collect()
}

fn witness(a: &WitnessArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let chi = parse_character(&a.character, &group)?;
    let w = unboundedness_witness(&group, &chi, a.common.radius, a.length, a.common.tol)?;
    match &w.loop_info {
        Some(info) => {
            println!(
                "witness loop ({}, {}) at object {}",
                group.format(&info.morphism.u),
                group.format(&info.morphism.v),
                group.format(&info.object)
            );
            println!("ratios {:?}", w.ratios());
            if let Some(c) = &w.caveat {
                println!("note: {c}");
            }
        }
        None => println!("none found at radius {}", a.common.radius),
    }
    let mut report = w.to_json(&group);
    report["schema"] = json!(SCHEMA_VERSION);
    report["group"] = json!(group.spec().to_string());
    Ok(Outcome {
        report,
        table: Some((WITNESS_HEADER.to_vec(), witness_rows(&w))),
        code: if w.found() { EXIT_FOUND } else { 0 },
    })
}

fn probe(a: &ProbeArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let NormSpec::ExpWeight(alpha) = a.norm.parse::<NormSpec>()? else {
        bail!("probe needs an exponential weight norm, expw:<alpha>");
    };
    let (_, d, _) = build_derivation(&group, &a.derivation, a.common.radius)?;
    let radii: Vec<usize> = (1..=a.common.radius).collect();
    let table = exp_norm_boundedness_probe(&group, &d, alpha, &radii, a.theta)?;
    println!(
        "{:>4} {:>16} {:>16} {:>10}",
        "n", "norm", "increment", "ratio"
    );
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let ratio = r.ratio.map(|q| format!("{q:.6}")).unwrap_or_default();
            println!(
                "{:>4} {:>16.9} {:>16.9} {:>10}",
                r.n, r.norm, r.increment, ratio
            );
            vec![
                r.n.to_string(),
                r.norm.to_string(),
                r.increment.to_string(),
                ratio,
            ]
        })
        .collect();
    let verdict = match table.verdict {
        ProbeVerdict::Stabilizing => "stabilizing at the probed radii",
        ProbeVerdict::NotStabilizing => "not stabilizing",
        ProbeVerdict::Inconclusive => "inconclusive (fewer than three ratios)",
    };
    println!(
        "verdict: {verdict}{}",
        if table.partial {
            " (partial table)"
        } else {
            ""
        }
    );
    let mut report = table.to_json();
    report["schema"] = json!(SCHEMA_VERSION);
    report["group"] = json!(group.spec().to_string());
    Ok(Outcome {
        report,
        table: Some((vec!["n", "norm", "increment", "ratio"], rows)),
        code: 0,
    })
}

fn leibniz(a: &LeibnizArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let dom = a.derivation.dom_radius.unwrap_or(2 * a.common.radius);
    let args = DerivationArgs {
        dom_radius: Some(dom),
        derivation: a.derivation.derivation.clone(),
        trunc_radius: a.derivation.trunc_radius,
        convention: a.derivation.convention.clone(),
    };
    let (spec, d, _) = build_derivation(&group, &args, a.common.radius)?;
    let scan = leibniz_scan(&group, &d, spec.twist(), a.common.radius)?;
    let ok = scan.max_defect <= a.common.tol;
    println!(
        "{} Leibniz scan over Ball({}): {} pairs checked, {} skipped, max defect {:e}",
        if spec.twist().is_some() {
            "twisted"
        } else {
            "plain"
        },
        scan.radius,
        scan.checked,
        scan.skipped,
        scan.max_defect
    );
    if let (false, Some((u, v))) = (ok, &scan.worst) {
        println!(
            "worst pair u = {}, v = {}",
            group.format(u),
            group.format(v)
        );
    }
    let report = json!({
        "schema": SCHEMA_VERSION,
        "group": group.spec().to_string(),
        "derivation": d.provenance().as_str(),
        "twisted": spec.twist().is_some(),
        "radius": scan.radius,
        "dom_radius": d.dom_radius(),
        "trunc_radius": d.trunc_radius(),
        "checked": scan.checked,
        "skipped": scan.skipped,
        "max_defect": scan.max_defect,
        "tol": a.common.tol,
        "worst": scan.worst.as_ref().map(|(u, v)| json!({"u": group.format(u), "v": group.format(v)})),
        "ok": ok,
    });
    Ok(Outcome {
        report,
        table: None,
        code: if ok { 0 } else { EXIT_FAILED },
    })
}

fn norms(a: &NormsArgs) -> Result<Outcome> {
    let group = group_of(&a.common)?;
    let spec: NormSpec = a.norm.parse()?;
    let value = match &a.element {
        Some(s) => {
            let omega = RingElement::parse(s, &group)?;
            let v = norm(&group, &omega, spec)?;
            println!("{spec} norm of {} = {v}", omega.format(&group));
            Some(v)
        }
        None => None,
    };
    let rep = is_subordinate(&group, spec, a.common.radius)?;
    println!(
        "{spec}: {} to the sup norm (best constant {:.6} over {} probes); {}",
        if rep.is_subordinate() {
            "subordinate"
        } else {
            "not subordinate"
        },
        rep.best_constant,
        rep.probed,
        SUBORDINATION_NOTE
    );
    let rows: Vec<Vec<String>> = match &rep.verdict {
        SubordinationVerdict::Subordinate => Vec::new(),
        SubordinationVerdict::NotSubordinate { witness } => witness
            .iter()
            .map(|w| {
                println!("  n = {}: ratio {:.6}", w.n, w.ratio);
                vec![
                    w.n.to_string(),
                    group.format(&w.element),
                    w.scale.to_string(),
                    w.norm.to_string(),
                    w.sup.to_string(),
                    w.ratio.to_string(),
                ]
            })
            .collect(),
    };
    let report = json!({
        "schema": SCHEMA_VERSION,
        "group": group.spec().to_string(),
        "norm": spec.to_string(),
        "value": value,
        "subordinate": rep.is_subordinate(),
        "best_constant": rep.best_constant,
        "probe_radius": rep.probe_radius,
        "note": SUBORDINATION_NOTE,
        "witness": match &rep.verdict {
            SubordinationVerdict::Subordinate => Value::Null,
            SubordinationVerdict::NotSubordinate { witness } => witness
                .iter()
                .map(|w| json!({"n": w.n, "element": group.format(&w.element), "scale": w.scale, "ratio": w.ratio}))
                .collect(),
        },
    });
    Ok(Outcome {
        report,
        table: Some((vec!["n", "element", "scale", "norm", "sup", "ratio"], rows)),
        code: 0,
    })
}
