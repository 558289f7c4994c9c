//! The `quasiconf` command line.
//!
//! Exit codes: 0 for success or a true verdict, 1 for a false verdict or a
//! failed construction, 2 for usage, parse and validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::{build_catalog, catalog_entry, CatalogEntry};
use crate::constructions::{
    check_split, delete, glue_deficient_pair, recipe_34_to_4, recipe_delete2_patch4, recipe_delete2_sameline_patch3,
    recipe_two_copies_two_lines, superpose, ElementRef, GlueSpec, Realized, SplitSpec,
};
use crate::embed::{find_embeddings, EmbedMode};
use crate::enumerate::enumerate;
use crate::error::{Error, Result};
use crate::format::StructureFile;
use crate::kernel::parse_rational;
use crate::obstruction::{b_min, euler_obstruction, infeasible_small_n34, max_incidences};
use crate::projmap::ProjMap;
use crate::realization::{check_faithful, Realization};
use crate::render::{parse_viewport, render_svg, InfinityMarker, RenderOptions};
use crate::signature::Signature;
use crate::structure::IncidenceStructure;

#[derive(Parser, Debug)]
#[command(name = "quasiconf", version, about = "Exact workbench for point-line incidence structures")]
struct Cli {
    /// Print results and diagnostics as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the coordinates realize exactly the listed incidences.
    Verify { input: String },
    /// Print the signature and the configuration predicates.
    Signature { input: String },
    /// Evaluate the Euler-formula obstruction.
    Obstruct(ObstructArgs),
    /// Print the b_min and I_max tables.
    Tables,
    /// List combinatorial structures with a given signature up to isomorphism.
    Enumerate(EnumerateArgs),
    /// Run a construction and report the result.
    Construct {
        #[command(subcommand)]
        recipe: Recipe,
    },
    /// Polar dual of a structure and its coordinates.
    Dual {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a split leaves two quasi-configurations.
    SplitCheck {
        input: String,
        /// Point ids of part A, comma separated.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        /// Line ids of part A, comma separated.
        #[arg(long, value_delimiter = ',')]
        lines: Vec<String>,
    },
    /// Search for copies of PATTERN inside HOST.
    Embed {
        host: String,
        pattern: String,
        /// Allow extra incidences among the images.
        #[arg(long)]
        weak: bool,
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
    /// Draw a realized structure as SVG.
    Render(RenderArgs),
    /// List catalog entries, or write one out.
    Catalog {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ObstructArgs {
    /// Signature such as "15*x^4|15*y^4".
    #[arg(long, conflicts_with_all = ["input", "n34"])]
    signature: Option<String>,
    /// Decide the small-n infeasibility of (n_{3|4}) configurations.
    #[arg(long, conflicts_with = "input")]
    n34: Option<u64>,
    input: Option<String>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    signature: String,
    #[arg(long)]
    connected: bool,
    /// Only print the number of classes.
    #[arg(long)]
    count: bool,
    /// Write each structure as a JSON file into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    input: String,
    /// Homogeneous coordinate set to one.
    #[arg(long, default_value_t = 2)]
    chart: usize,
    /// Map applied before charting, rows separated by `;`.
    #[arg(long)]
    premap: Option<String>,
    /// `x_min,y_min,x_max,y_max`.
    #[arg(long, allow_hyphen_values = true)]
    viewport: Option<String>,
    #[arg(long)]
    hide_infinite: bool,
    /// Fail instead of drawing the line at infinity as a frame.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 600)]
    width: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the resulting structure file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Recipe {
    /// Remove points and lines.
    Delete {
        input: String,
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        lines: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Overlay B onto A, merging identified elements.
    Superpose {
        a: String,
        b: String,
        /// `p:ID_A=p:ID_B` or `l:ID_A=l:ID_B`, repeatable.
        #[arg(long)]
        identify: Vec<String>,
        /// Map applied to B first, rows separated by `;`.
        #[arg(long)]
        transform: Option<String>,
        #[arg(long, default_value = "B.")]
        prefix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Delete two points and patch the eight deficient lines with four new points.
    Patch4 {
        input: String,
        p1: String,
        p2: String,
        #[command(flatten)]
        output: Output,
    },
    /// Delete two points on a common line and patch with three new points.
    Patch3 {
        input: String,
        p1: String,
        p2: String,
        #[command(flatten)]
        output: Output,
    },
    /// Patch two inputs and glue them along their marked elements.
    Glue {
        a: String,
        /// Two point ids, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        a_points: Vec<String>,
        b: String,
        #[arg(long, value_delimiter = ',', required = true)]
        b_points: Vec<String>,
        /// Use the same-line patch (three new points) on both inputs.
        #[arg(long)]
        same_line: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Two copies joined by two new lines through their 3-valent points.
    TwoCopies {
        input: String,
        #[arg(long)]
        transform: String,
        #[command(flatten)]
        output: Output,
    },
    /// A 4-configuration from a geometric 3|4-configuration.
    ThreeFourToFour {
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

struct Loaded {
    name: String,
    structure: IncidenceStructure,
    realization: Option<Realization>,
    entry: Option<CatalogEntry>,
}

impl Loaded {
    fn realized(&self) -> Result<Realized> {
        match &self.realization {
            Some(r) => Ok(Realized::new(self.structure.clone(), r.clone())),
            None => Err(Error::Precondition(format!("`{}` has no coordinates", self.name))),
        }
    }
}

fn load(input: &str) -> Result<Loaded> {
    if let Some(name) = input.strip_prefix("catalog:") {
        let entry = catalog_entry(name).ok_or_else(|| Error::Validation(format!("no catalog entry `{name}`")))?;
        return Ok(Loaded {
            name: entry.name.clone(),
            structure: entry.structure.clone(),
            realization: entry.realization.clone(),
            entry: Some(entry),
        });
    }
    let file = StructureFile::load(input)?;
    let (structure, realization) = file.load_parts()?;
    Ok(Loaded {
        name: file.name,
        structure,
        realization,
        entry: None,
    })
}

fn parse_map(s: &str) -> Result<ProjMap> {
    let bad = || Error::Validation(format!("map `{s}` needs three rows of three rationals separated by `;` and `,`"));
    let rows: Vec<Vec<_>> = s
        .split(';')
        .map(|row| row.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(bad());
    }
    let m = |i: usize| [rows[i][0].clone(), rows[i][1].clone(), rows[i][2].clone()];
    ProjMap::new([m(0), m(1), m(2)])
}

fn parse_ref(s: &str) -> Result<ElementRef> {
    match s.split_once(':') {
        Some(("p", id)) => Ok(ElementRef::point(id)),
        Some(("l", id)) => Ok(ElementRef::line(id)),
        _ => Err(Error::Validation(format!("`{s}` is not `p:ID` or `l:ID`"))),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::SignatureParse(_)
        | Error::Validation(_)
        | Error::UnknownId { .. }
        | Error::DuplicateId { .. }
        | Error::DuplicateIncidence { .. }
        | Error::UnmappedId { .. }
        | Error::InconsistentSignature { .. }
        | Error::GirthViolation { .. }
        | Error::ZeroVector
        | Error::SingularMap
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

/// Text for humans and a JSON value; which one is printed depends on `--json`.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn new(text: impl Into<String>, json: Value, code: i32) -> Self {
        Self {
            text: text.into(),
            json,
            code,
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn summarize(label: &str, x: &Realized) -> Result<(String, Value, bool)> {
    let rep = check_faithful(&x.structure, &x.realization)?;
    let sig = x.structure.signature();
    let text = format!(
        "{label}: {} points, {} lines, {} incidences, signature {sig}, {}",
        x.structure.num_points(),
        x.structure.num_lines(),
        x.structure.incidence_count(),
        rep.summary()
    );
    let json = json!({
        "name": label,
        "points": x.structure.num_points(),
        "lines": x.structure.num_lines(),
        "incidences": x.structure.incidence_count(),
        "signature": sig.to_string(),
        "faithfulness": rep,
    });
    Ok((text, json, rep.is_faithful()))
}

fn write_result(name: &str, x: &Realized, out: &Option<PathBuf>) -> Result<()> {
    if let Some(path) = out {
        StructureFile::from_structure(name, &x.structure, Some(&x.realization))?.save(path)?;
    }
    Ok(())
}

fn finish_construction(name: String, x: &Realized, out: &Option<PathBuf>, extra: Value, notes: Vec<String>) -> Result<Report> {
    write_result(&name, x, out)?;
    let (mut text, mut json, ok) = summarize(&name, x)?;
    for n in notes {
        text.push('\n');
        text.push_str(&n);
    }
    if let (Value::Object(m), Value::Object(e)) = (&mut json, extra) {
        m.extend(e);
    }
    Ok(Report::new(text, json, if ok { 0 } else { 1 }))
}

fn verify(input: &str) -> Result<Report> {
    let l = load(input)?;
    let n = l.structure.incidence_count();
    let mut json = json!({"name": l.name, "incidences": n});
    let (mut text, mut code) = match &l.realization {
        Some(r) => {
            let rep = check_faithful(&l.structure, r)?;
            json["faithfulness"] = json!(rep);
            json["faithful"] = json!(rep.is_faithful());
            let mut t = format!("{}, {n} incidences", rep.summary());
            for (p, ln) in &rep.missing {
                t.push_str(&format!("\n  missing: {p} on {ln}"));
            }
            for (p, ln) in &rep.extra {
                t.push_str(&format!("\n  extra: {p} on {ln}"));
            }
            for (k, a, b) in &rep.collisions {
                t.push_str(&format!("\n  collision: {k}s {a} and {b}"));
            }
            (t, if rep.is_faithful() { 0 } else { 1 })
        }
        None => {
            json["faithful"] = Value::Null;
            (format!("no coordinates, {n} incidences"), 1)
        }
    };
    if let Some(e) = &l.entry {
        let rep = e.verify()?;
        let matches = rep.signature_matches && rep.incidences_match;
        json["catalog_expectations_met"] = json!(matches);
        text.push_str(&format!(
            "\ncatalog expectations ({}, {} incidences): {}",
            e.expected_signature,
            e.expected_incidences,
            if matches { "met" } else { "NOT met" }
        ));
        if !matches {
            code = 1;
        }
    }
    Ok(Report::new(text, json, code))
}

fn signature_cmd(input: &str) -> Result<Report> {
    let l = load(input)?;
    let s = &l.structure;
    let sig = s.signature();
    let k = (1..=s.num_points().max(1)).find(|&k| s.is_k_configuration(k));
    let text = format!(
        "signature {sig}\npoints {}, lines {}, incidences {}\nquasi-configuration: {}\nk-configuration: {}\n3|4-configuration: {}\n(n_{{3|4}}) configuration: {}\nconnected: {}",
        s.num_points(),
        s.num_lines(),
        s.incidence_count(),
        yes(s.is_quasi_configuration()),
        k.map_or("no".to_string(), |k| format!("({}_{k})", s.num_points())),
        yes(s.is_34_configuration()),
        yes(s.is_n34_configuration()),
        yes(s.is_connected()),
    );
    let json = json!({
        "name": l.name,
        "signature": sig.to_string(),
        "points": s.num_points(),
        "lines": s.num_lines(),
        "incidences": s.incidence_count(),
        "quasi_configuration": s.is_quasi_configuration(),
        "k_configuration": k,
        "three_four_configuration": s.is_34_configuration(),
        "n34_configuration": s.is_n34_configuration(),
        "connected": s.is_connected(),
    });
    Ok(Report::new(text, json, 0))
}

fn obstruct(a: &ObstructArgs) -> Result<Report> {
    if let Some(n) = a.n34 {
        let v = infeasible_small_n34(n);
        let text = format!(
            "({n}_{{3|4}}): {}\n{}",
            if v.infeasible { "infeasible" } else { "not excluded" },
            v.reason
        );
        return Ok(Report::new(text, json!(v), if v.infeasible { 1 } else { 0 }));
    }
    let sig: Signature = match (&a.signature, &a.input) {
        (Some(s), _) => s.parse()?,
        (None, Some(i)) => load(i)?.structure.signature(),
        (None, None) => return Err(Error::Validation("give --signature, --n34 or an input".into())),
    };
    let v = euler_obstruction(&sig);
    let text = format!(
        "signature {sig}\nlhs {}\n{}",
        v.lhs_value,
        if v.satisfiable {
            "passes (a necessary condition only)"
        } else {
            "fails: no topological realization exists"
        }
    );
    let json = json!({"signature": sig.to_string(), "lhs": v.lhs_value, "satisfiable": v.satisfiable});
    Ok(Report::new(text, json, if v.satisfiable { 0 } else { 1 }))
}

fn row<T: std::fmt::Display>(label: &str, v: impl Iterator<Item = T>) -> String {
    let mut s = format!("{label:<6}|");
    for x in v {
        s.push_str(&format!(" {x:>3}"));
    }
    s
}

fn tables() -> Report {
    let a: Vec<u64> = (0..=7).collect();
    let n: Vec<u64> = (7..=16).collect();
    let b: Vec<u64> = a.iter().map(|&a| b_min(a)).collect();
    let i: Vec<u64> = n.iter().map(|&n| max_incidences(n)).collect();
    let text = [
        "minimum b for (a x^3 + b x^4, a y^3 + b y^4)".to_string(),
        row("a", a.iter()),
        row("b_min", b.iter()),
        String::new(),
        "maximum incidences of an (n_{3|4}) configuration".to_string(),
        row("n", n.iter()),
        row("I_max", i.iter()),
    ]
    .join("\n");
    let json = json!({
        "b_min": a.iter().zip(&b).map(|(a, b)| json!({"a": a, "b_min": b})).collect::<Vec<_>>(),
        "i_max": n.iter().zip(&i).map(|(n, i)| json!({"n": n, "i_max": i})).collect::<Vec<_>>(),
    });
    Report::new(text, json, 0)
}

fn enumerate_cmd(a: &EnumerateArgs) -> Result<Report> {
    let sig: Signature = a.signature.parse()?;
    if a.count {
        let c = crate::enumerate::count(&sig, a.connected)?;
        return Ok(Report::new(
            format!("{c} classes"),
            json!({"signature": sig.to_string(), "connected_only": a.connected, "count": c}),
            0,
        ));
    }
    let found = enumerate(&sig, a.connected)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        for (k, s) in found.iter().enumerate() {
            let name = format!("enum_{:04}", k + 1);
            StructureFile::from_structure(&name, s, None)?.save(dir.join(format!("{name}.json")))?;
        }
    }
    let mut text = format!("{} classes", found.len());
    for (k, s) in found.iter().enumerate() {
        let lines: Vec<String> = s
            .index_lines()
            .iter()
            .map(|l| l.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        text.push_str(&format!("\n{:>4}: {}", k + 1, lines.join(" | ")));
    }
    let json = json!({
        "signature": sig.to_string(),
        "connected_only": a.connected,
        "count": found.len(),
        "structures": found.iter().map(|s| s.index_lines().to_vec()).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json, 0))
}

fn construct(r: &Recipe) -> Result<Report> {
    match r {
        Recipe::Delete {
            input,
            points,
            lines,
            output,
        } => {
            let l = load(input)?;
            let d = delete(&l.realized()?, points, lines)?;
            let notes = d
                .below_three()
                .iter()
                .map(|c| format!("  {} {} drops to valence {}", c.kind, c.id, c.after))
                .collect();
            let extra = json!({"changes": d.changes});
            finish_construction(format!("{}-deleted", l.name), &d.result, &output.out, extra, notes)
        }
        Recipe::Superpose {
            a,
            b,
            identify,
            transform,
            prefix,
            output,
        } => {
            let (la, lb) = (load(a)?, load(b)?);
            let mut spec = GlueSpec {
                transform: transform.as_deref().map(parse_map).transpose()?,
                ..GlueSpec::default()
            };
            for pair in identify {
                let (x, y) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::Validation(format!("`{pair}` is not `REF_A=REF_B`")))?;
                spec.identify.push((parse_ref(x)?, parse_ref(y)?));
            }
            let s = superpose(&la.realized()?, &lb.realized()?, &spec, prefix)?;
            finish_construction(format!("{}+{}", la.name, lb.name), &s.result, &output.out, json!({}), Vec::new())
        }
        Recipe::Patch4 { input, p1, p2, output } | Recipe::Patch3 { input, p1, p2, output } => {
            let l = load(input)?;
            let x = l.realized()?;
            let same_line = matches!(r, Recipe::Patch3 { .. });
            let p = if same_line {
                recipe_delete2_sameline_patch3(&x, p1, p2)?
            } else {
                recipe_delete2_patch4(&x, p1, p2)?
            };
            let accepted = p.matchings.iter().filter(|m| m.accepted).count();
            let notes = vec![
                format!("  matchings tried {}, accepted {accepted}", p.matchings.len()),
                format!(
                    "  marked: {}",
                    p.marked.iter().map(|m| format!("{} {}", m.kind, m.id)).collect::<Vec<_>>().join(", ")
                ),
            ];
            let extra = json!({"marked": p.marked, "matchings": p.matchings});
            let tag = if same_line { "patch3" } else { "patch4" };
            finish_construction(format!("{}-{tag}", l.name), &p.result, &output.out, extra, notes)
        }
        Recipe::Glue {
            a,
            a_points,
            b,
            b_points,
            same_line,
            output,
        } => {
            if a_points.len() != 2 || b_points.len() != 2 {
                return Err(Error::Validation("--a-points and --b-points take two ids each".into()));
            }
            let (la, lb) = (load(a)?, load(b)?);
            let patch = |x: &Realized, p: &[String]| {
                if *same_line {
                    recipe_delete2_sameline_patch3(x, &p[0], &p[1])
                } else {
                    recipe_delete2_patch4(x, &p[0], &p[1])
                }
            };
            let pa = patch(&la.realized()?, a_points)?;
            let pb = patch(&lb.realized()?, b_points)?;
            let g = glue_deficient_pair(&pa, &pb, "B.")?;
            let notes = g
                .candidates
                .iter()
                .map(|c| format!("  candidate #{} {:?}: {}", c.index, c.order, c.outcome))
                .collect();
            let extra = json!({"map": g.map.to_strings(), "candidates": g.candidates});
            finish_construction(format!("{}+{}-glued", la.name, lb.name), &g.result, &output.out, extra, notes)
        }
        Recipe::TwoCopies { input, transform, output } => {
            let l = load(input)?;
            let t = recipe_two_copies_two_lines(&l.realized()?, &parse_map(transform)?)?;
            let notes = vec![format!(
                "  new lines {}; 4-configuration: {}",
                t.new_lines.join(", "),
                yes(t.is_four_configuration)
            )];
            let extra = json!({"new_lines": t.new_lines, "is_four_configuration": t.is_four_configuration});
            finish_construction(format!("{}-two-copies", l.name), &t.result, &output.out, extra, notes)
        }
        Recipe::ThreeFourToFour { input, seed, output } => {
            let l = load(input)?;
            let f = recipe_34_to_4(&l.realized()?, *seed)?;
            let n = f.result.structure.num_points();
            let notes = vec![format!(
                "  seed {}; expected {} points; ({n}_4) configuration: {}",
                f.seed,
                f.expected_size,
                yes(f.result.structure.is_k_configuration(4) && n == f.expected_size)
            )];
            let extra = json!({"seed": f.seed, "expected_size": f.expected_size, "steps": f.steps});
            finish_construction(format!("{}-to-4 (seed {})", l.name, f.seed), &f.result, &output.out, extra, notes)
        }
    }
}

fn dual(input: &str, out: &Option<PathBuf>) -> Result<Report> {
    let l = load(input)?;
    let s = l.structure.dual();
    let r = l.realization.as_ref().map(|r| r.polar_dual());
    let name = format!("{}-dual", l.name);
    let file = StructureFile::from_structure(&name, &s, r.as_ref())?;
    match out {
        Some(p) => {
            file.save(p)?;
            let text = format!("{name}: signature {}", s.signature());
            Ok(Report::new(text, json!({"name": name, "signature": s.signature().to_string()}), 0))
        }
        None => {
            let text = file.to_json().trim_end().to_string();
            Ok(Report::new(text, serde_json::to_value(&file).expect("plain data"), 0))
        }
    }
}

fn split_check(input: &str, points: &[String], lines: &[String]) -> Result<Report> {
    let l = load(input)?;
    let c = check_split(
        &l.structure,
        &SplitSpec {
            part_a_points: points.to_vec(),
            part_a_lines: lines.to_vec(),
        },
    )?;
    let text = format!(
        "part A {}\npart B {}\nboth quasi-configurations: {}\nboth k-configurations: {}\ncut incidences: {}",
        c.signature_a,
        c.signature_b,
        yes(c.both_quasi),
        c.both_k.map_or("no".to_string(), |k| format!("k = {k}")),
        c.cut_incidences
    );
    let json = json!({
        "signature_a": c.signature_a.to_string(),
        "signature_b": c.signature_b.to_string(),
        "both_quasi": c.both_quasi,
        "both_k": c.both_k,
        "cut_incidences": c.cut_incidences,
    });
    Ok(Report::new(text, json, if c.both_quasi { 0 } else { 1 }))
}

fn embed_cmd(host: &str, pattern: &str, weak: bool, limit: usize) -> Result<Report> {
    let (h, p) = (load(host)?, load(pattern)?);
    let mode = if weak { EmbedMode::Weak } else { EmbedMode::Induced };
    let found = find_embeddings(&h.structure, &p.structure, mode, limit);
    let mode_name = if weak { "weak" } else { "induced" };
    let mut text = format!("{} {mode_name} embedding(s) of {} in {}", found.len(), p.name, h.name);
    if found.len() == limit {
        text.push_str(&format!(" (limit {limit} reached)"));
    }
    for e in &found {
        let pts: Vec<String> = e.points.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        text.push_str(&format!("\n  {}", pts.join(" ")));
    }
    let json = json!({"host": h.name, "pattern": p.name, "mode": mode, "embeddings": found});
    Ok(Report::new(text, json, if found.is_empty() { 1 } else { 0 }))
}

fn render_cmd(a: &RenderArgs) -> Result<Report> {
    let l = load(&a.input)?;
    let r = l
        .realization
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("`{}` has no coordinates", l.name)))?;
    let rep = check_faithful(&l.structure, r)?;
    if !rep.is_faithful() {
        return Err(Error::Precondition(format!("`{}` is {}", l.name, rep.summary())));
    }
    let opts = RenderOptions {
        chart: a.chart,
        premap: a.premap.as_deref().map(parse_map).transpose()?,
        viewport: a.viewport.as_deref().map(parse_viewport).transpose()?,
        infinity: if a.hide_infinite {
            InfinityMarker::Hidden
        } else {
            InfinityMarker::Arrow
        },
        width: a.width,
        reject_line_at_infinity: a.strict,
    };
    let svg = render_svg(&l.structure, r, &opts)?;
    match &a.out {
        Some(p) => {
            std::fs::write(p, &svg)?;
            let text = format!("wrote {}", p.display());
            Ok(Report::new(text, json!({"name": l.name, "out": p, "bytes": svg.len()}), 0))
        }
        None => Ok(Report::new(svg.trim_end(), json!({"name": l.name, "svg": svg}), 0)),
    }
}

fn catalog_cmd(name: &Option<String>, out: &Option<PathBuf>) -> Result<Report> {
    if let Some(name) = name {
        let e = catalog_entry(name).ok_or_else(|| Error::Validation(format!("no catalog entry `{name}`")))?;
        let file = e.file();
        return match out {
            Some(p) => {
                file.save(p)?;
                Ok(Report::new(format!("wrote {}", p.display()), json!({"name": e.name, "out": p}), 0))
            }
            None => Ok(Report::new(
                file.to_json().trim_end(),
                serde_json::to_value(&file).expect("plain data"),
                0,
            )),
        };
    }
    let mut text = Vec::new();
    let mut rows = Vec::new();
    let mut code = 0;
    for e in build_catalog() {
        let rep = e.verify()?;
        if !rep.ok() {
            code = 1;
        }
        text.push(format!(
            "{:<14} {:<14} {:<3} {:>3} incidences  {}",
            e.name,
            serde_json::to_value(e.origin).expect("unit enum").as_str().unwrap_or(""),
            if rep.ok() { "ok" } else { "BAD" },
            rep.incidences,
            e.note
        ));
        rows.push(json!({
            "name": e.name,
            "origin": e.origin,
            "note": e.note,
            "signature": rep.signature.to_string(),
            "incidences": rep.incidences,
            "ok": rep.ok(),
            "deleted": e.deleted,
        }));
    }
    Ok(Report::new(text.join("\n"), Value::Array(rows), code))
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Verify { input } => verify(input),
        Command::Signature { input } => signature_cmd(input),
        Command::Obstruct(a) => obstruct(a),
        Command::Tables => Ok(tables()),
        Command::Enumerate(a) => enumerate_cmd(a),
        Command::Construct { recipe } => construct(recipe),
        Command::Dual { input, out } => dual(input, out),
        Command::SplitCheck { input, points, lines } => split_check(input, points, lines),
        Command::Embed {
            host,
            pattern,
            weak,
            limit,
        } => embed_cmd(host, pattern, *weak, *limit),
        Command::Render(a) => render_cmd(a),
        Command::Catalog { name, out } => catalog_cmd(name, out),
    }
}

/// Runs the command line with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_requested = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if json_requested && !informational {
                let v = json!({"error": {"kind": "Usage", "message": e.to_string()}, "exit": 2});
                let _ = writeln!(err, "{v}");
            } else if informational {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return if informational { 0 } else { 2 };
        }
    };
    match dispatch(&cli) {
        Ok(r) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("json values serialize"))
            } else {
                writeln!(out, "{}", r.text)
            };
            r.code
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let v = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}, "exit": code});
                let _ = writeln!(err, "{v}");
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("quasiconf").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_thirteen() {
        let (code, out, _) = call(&["verify", "catalog:13_34"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("faithful, 48 incidences\n"), "{out}");
    }

    #[test]
    fn fifteen_four_is_obstructed() {
        let (code, out, _) = call(&["obstruct", "--signature", "15*x^4|15*y^4"]);
        assert_eq!(code, 1);
        assert!(out.contains("lhs 6"), "{out}");
        let (code, out, _) = call(&["--json", "obstruct", "--signature", "15*x^4|15*y^4"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lhs"], 6);
    }

    #[test]
    fn tables_match_the_published_rows() {
        let (code, out, _) = call(&["tables"]);
        assert_eq!(code, 0);
        assert!(out.contains("b_min |  16  14  13  11   9   8   6   3"), "{out}");
        assert!(out.contains("I_max |  20  24  28  33  37  42  48  53  59  64"), "{out}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["verify", "catalog:nope"]).0, 2);
        let (code, _, err) = call(&["--json", "obstruct", "--signature", "x^3|"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "SignatureParse");
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn embed_and_catalog() {
        assert_eq!(call(&["embed", "catalog:12_34_pappus", "catalog:pappus"]).0, 0);
        assert_eq!(call(&["embed", "catalog:8_3", "catalog:fano"]).0, 1);
        let (code, out, _) = call(&["catalog"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().count() >= 13);
        assert_eq!(call(&["verify", "catalog:9_34"]).0, 1);
    }
}
