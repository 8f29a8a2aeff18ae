//! Command-line front end. Every command maps onto one library operation;
//! batch manifests run the same commands and compare their summaries.
//!
//! Exit codes: 0 ok, 1 expectation mismatch, 2 input error, 3 budget exceeded.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::amalgam::Amalgam;
use crate::bassserre::{maximal_subgroup_presentation, quotient_graph};
use crate::corpus;
use crate::document::{AmalgamDocument, Manifest};
use crate::error::{Error, Result};
use crate::host::{classify_finiteness, hosts};
use crate::opuntoid::{core, expand_to_depth, word_equal, Budget, DEFAULT_MAX_LOBES};
use crate::stephen::{schutz_graph, DEFAULT_MAX_EDGES};
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "opuntia", version, about = "Schützenberger automata and maximal subgroups of amalgamated free products of finite inverse semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Amalgam document (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Built-in amalgam instead of a document.
    #[arg(long, global = true, conflicts_with = "input")]
    pub corpus: Option<String>,
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    #[arg(long, global = true)]
    pub text: bool,
    /// Directory for Graphviz output.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_EDGES)]
    pub max_edges: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LOBES)]
    pub max_lobes: usize,
    /// Expansion depth for `expand` when no depth argument is given.
    #[arg(long, global = true, default_value_t = 2)]
    pub depth: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Validate the document and summarize both factors and `U`.
    Validate,
    /// Schützenberger graph of a word in one factor.
    Sgraph { factor: u8, word: String },
    /// Core of the Schützenberger automaton of a word.
    Core { word: String },
    /// Core expanded to the given lobe depth.
    Expand { word: String, k: Option<usize> },
    /// Decide equality of two words in the amalgamated free product.
    Wordeq { w1: String, w2: String },
    /// Host residue of the core.
    Hosts { word: String },
    /// Finiteness of the host union.
    Classify { word: String },
    /// Presentation of the maximal subgroup at `ww⁻¹`.
    Maxgroup { word: String },
    /// Graphviz rendering of one object.
    ExportDot { object: DotObject, word: String },
    /// Run the queries of a manifest and write a JSON report.
    Batch {
        manifest: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List built-in amalgams, or print one as a document.
    Corpus { name: Option<String> },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotObject {
    Core,
    Expand,
    Sgraph1,
    Sgraph2,
    Y,
}

impl Options {
    fn budget(&self) -> Budget {
        Budget { max_edges: self.max_edges, max_lobes: self.max_lobes }
    }
}

/// Outcome of one command.
#[derive(Clone, Debug, Serialize)]
pub struct QueryResult {
    pub command: String,
    pub args: Vec<String>,
    pub status: String,
    /// Compact value compared against manifest expectations.
    pub summary: Value,
    pub payload: Value,
    pub diagnostics: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub dots: Vec<(String, String)>,
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    }
}

fn error_value(e: &Error) -> Value {
    json!({ "kind": error_kind(e), "message": e.to_string(), "budget": e.is_budget() })
}

fn parse(a: &Amalgam, text: &str) -> Result<Word> {
    let w = a.parse_word(text)?;
    a.check_word(&w)?;
    Ok(w)
}

fn arg<'a>(args: &'a [String], k: usize, command: &str) -> Result<&'a str> {
    args.get(k).map(String::as_str).ok_or_else(|| Error::Document(format!("`{command}` needs argument {}", k + 1)))
}

fn validate_payload(a: &Amalgam) -> Value {
    let describe = |s: &crate::fis::FiniteInverseSemigroup| {
        let green = s.green();
        let subgroups: BTreeMap<String, usize> = s
            .idempotents()
            .into_iter()
            .map(|e| (s.element_name(e).to_string(), s.maximal_subgroup(e).map(|h| h.order()).unwrap_or(0)))
            .collect();
        json!({
            "name": s.name(),
            "size": s.size(),
            "generators": s.generators().iter().map(|&g| s.element_name(g)).collect::<Vec<_>>(),
            "idempotents": s.idempotents().len(),
            "d_classes": crate::fis::GreenData::class_sizes(&green.d_class),
            "maximal_subgroup_orders": subgroups,
            "combinatorial": s.is_combinatorial(),
        })
    };
    json!({ "s1": describe(a.factor(1)), "s2": describe(a.factor(2)), "u": describe(a.u()) })
}

/// Runs one command against an amalgam.
pub fn execute(a: &Amalgam, command: &str, args: &[String], budget: &Budget, depth: usize, want_dot: bool) -> Result<QueryResult> {
    let mut r = QueryResult {
        command: command.to_string(),
        args: args.to_vec(),
        status: "ok".into(),
        summary: Value::Null,
        payload: Value::Null,
        diagnostics: json!({ "max_edges": budget.max_edges, "max_lobes": budget.max_lobes, "depth": depth }),
        error: None,
        text: String::new(),
        dots: Vec::new(),
    };
    match command {
        "validate" => {
            r.payload = validate_payload(a);
            r.summary = json!("ok");
            let p = &r.payload;
            r.text = format!(
                "ok: {} ({} elements, combinatorial: {}), {} ({} elements, combinatorial: {}), U {} elements\n",
                a.factor(1).name(),
                p["s1"]["size"],
                p["s1"]["combinatorial"],
                a.factor(2).name(),
                p["s2"]["size"],
                p["s2"]["combinatorial"],
                p["u"]["size"]
            );
        }
        "sgraph" => {
            let factor: u8 = arg(args, 0, command)?.parse().map_err(|_| Error::WrongColor(0))?;
            if factor != 1 && factor != 2 {
                return Err(Error::WrongColor(factor));
            }
            let w = parse(a, arg(args, 1, command)?)?;
            if let Some(l) = w.iter().find(|l| l.color != factor) {
                return Err(Error::WrongColor(l.color));
            }
            let s = a.factor(factor);
            let sg = schutz_graph(s, &w, factor)?;
            let g = &sg.automaton.graph;
            r.summary = json!(g.num_vertices());
            r.payload = json!({
                "elements": sg.elements.iter().map(|&x| s.element_name(x)).collect::<Vec<_>>(),
                "initial": sg.automaton.initial,
                "terminal": sg.automaton.terminal,
                "graph": crate::graph::GraphDump::new(g, |l| a.letter_name(l)),
            });
            r.text = format!("{} vertices, {} edges\n", g.num_vertices(), g.positive_edges().count());
            if want_dot {
                let marks = [(sg.automaton.initial, "in"), (sg.automaton.terminal, "out")];
                r.dots.push((format!("sgraph{factor}"), g.to_dot("sgraph", |l| a.letter_name(l), &marks)));
            }
        }
        "core" | "expand" => {
            let w = parse(a, arg(args, 0, command)?)?;
            let mut d = core(a, &w, budget)?;
            if command == "expand" {
                let k = match args.get(1) {
                    Some(t) => t.parse().map_err(|_| Error::Document(format!("bad depth `{t}`")))?,
                    None => depth,
                };
                d = expand_to_depth(a, &d, k, budget)?;
            }
            r.summary = json!([d.graph().num_vertices(), d.num_lobes()]);
            r.payload = serde_json::to_value(d.dump(a)).expect("dump serializes");
            r.text = format!("{} vertices, {} lobes, {} buds\n", d.graph().num_vertices(), d.num_lobes(), d.buds.len());
            if want_dot {
                r.dots.push((command.to_string(), d.to_dot(a, command)));
            }
        }
        "wordeq" => {
            let w1 = parse(a, arg(args, 0, command)?)?;
            let w2 = parse(a, arg(args, 1, command)?)?;
            let eq = word_equal(a, &w1, &w2, budget)?;
            r.summary = json!(eq);
            r.payload = json!({ "equal": eq });
            r.text = format!("{eq}\n");
        }
        "hosts" => {
            let w = parse(a, arg(args, 0, command)?)?;
            let d = core(a, &w, budget)?;
            let analysis = hosts(a, &d, budget)?;
            let fin = classify_finiteness(a, &w, budget)?;
            r.summary = json!(analysis.multi_host);
            r.diagnostics["discrepancy"] = json!(fin.discrepancy);
            r.diagnostics["respects_j_order"] = json!(fin.respects_j_order);
            r.payload = json!({ "hosts": analysis, "finiteness": fin });
            r.text = format!(
                "host lobes {:?}, multi-host: {}, finiteness: {:?}, discrepancy: {}\n",
                analysis.host_lobes, analysis.multi_host, fin.verdict, fin.discrepancy
            );
        }
        "classify" => {
            let w = parse(a, arg(args, 0, command)?)?;
            let fin = classify_finiteness(a, &w, budget)?;
            r.summary = json!(format!("{:?}", fin.verdict));
            r.diagnostics["discrepancy"] = json!(fin.discrepancy);
            r.diagnostics["respects_j_order"] = json!(fin.respects_j_order);
            r.text = format!("{:?} (discrepancy: {})\n", fin.verdict, fin.discrepancy);
            r.payload = serde_json::to_value(&fin).expect("report serializes");
        }
        "maxgroup" => {
            let w = parse(a, arg(args, 0, command)?)?;
            let result = maximal_subgroup_presentation(a, &w, budget)?;
            let text = result.presentation.to_string();
            let mut payload = serde_json::to_value(&result).expect("result serializes");
            payload["text"] = json!(text);
            payload["relators_text"] = json!(result.presentation.relator_strings());
            if let Some(fin) = &result.finiteness {
                r.diagnostics["discrepancy"] = json!(fin.discrepancy);
            r.diagnostics["respects_j_order"] = json!(fin.respects_j_order);
            }
            r.summary = json!(text);
            let mut lines = format!("case: {}\npresentation: {text}\n", result.tag);
            lines.push_str(&format!("order: {}\n", result.order.map_or("unknown".to_string(), |o| o.to_string())));
            lines.push_str(&format!(
                "abelianization: {:?} free rank {}\n",
                result.abelianization.elementary_divisors, result.abelianization.free_rank
            ));
            if let Some(fin) = &result.finiteness {
                lines.push_str(&format!("finiteness: {:?} (discrepancy: {})\n", fin.verdict, fin.discrepancy));
            }
            r.text = lines;
            r.payload = payload;
            if want_dot {
                if let Some(root) = hosts(a, &core(a, &w, budget)?, budget)?.root {
                    r.dots.push(("y".into(), quotient_graph(a, root, budget)?.to_dot(a)));
                }
            }
        }
        "export-dot" => {
            let object = arg(args, 0, command)?;
            let word = arg(args, 1, command)?.to_string();
            let inner = match object {
                "core" => execute(a, "core", &[word], budget, depth, true)?,
                "expand" => execute(a, "expand", &[word], budget, depth, true)?,
                "sgraph1" => execute(a, "sgraph", &["1".into(), word], budget, depth, true)?,
                "sgraph2" => execute(a, "sgraph", &["2".into(), word], budget, depth, true)?,
                "y" => execute(a, "maxgroup", &[word], budget, depth, true)?,
                other => return Err(Error::Document(format!("unknown DOT object `{other}`"))),
            };
            let dot = inner.dots.into_iter().next().map(|(_, d)| d).ok_or(Error::NotMultiHost)?;
            r.summary = json!(object);
            r.payload = json!({ "dot": dot });
            r.text = dot.clone();
            r.dots.push((object.to_string(), dot));
        }
        other => return Err(Error::Document(format!("unknown command `{other}`"))),
    }
    Ok(r)
}

fn load_document(path: &Path) -> Result<Amalgam> {
    let text = fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    AmalgamDocument::parse(&text)?.to_amalgam()
}

fn load_amalgam(options: &Options) -> Result<Amalgam> {
    match (&options.input, &options.corpus) {
        (Some(path), _) => load_document(path),
        (None, Some(name)) => {
            corpus::amalgam_by_name(name).ok_or_else(|| Error::Document(format!("no built-in amalgam `{name}`")))
        }
        (None, None) => Err(Error::Document("no input: pass --input FILE or --corpus NAME".into())),
    }
}

fn command_line(cmd: &Command) -> (String, Vec<String>) {
    let s = |x: &str| x.to_string();
    match cmd {
        Command::Validate => (s("validate"), vec![]),
        Command::Sgraph { factor, word } => (s("sgraph"), vec![factor.to_string(), word.clone()]),
        Command::Core { word } => (s("core"), vec![word.clone()]),
        Command::Expand { word, k } => {
            (s("expand"), std::iter::once(word.clone()).chain(k.map(|k| k.to_string())).collect())
        }
        Command::Wordeq { w1, w2 } => (s("wordeq"), vec![w1.clone(), w2.clone()]),
        Command::Hosts { word } => (s("hosts"), vec![word.clone()]),
        Command::Classify { word } => (s("classify"), vec![word.clone()]),
        Command::Maxgroup { word } => (s("maxgroup"), vec![word.clone()]),
        Command::ExportDot { object, word } => {
            let name = object.to_possible_value().expect("named").get_name().to_string();
            (s("export-dot"), vec![name, word.clone()])
        }
        Command::Batch { .. } | Command::Corpus { .. } => unreachable!("handled before dispatch"),
    }
}

fn write_dots(dir: &Path, dots: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Document(format!("{}: {e}", dir.display())))?;
    for (name, dot) in dots {
        let path = dir.join(format!("{name}.dot"));
        fs::write(&path, dot).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn report_error(e: &Error, command: &str, json_mode: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if json_mode {
        let v = json!({ "command": command, "status": "error", "error": error_value(e) });
        let _ = out.write_all(to_json(&v).as_bytes());
    }
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

/// Batch report over all manifest queries, in manifest order.
#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub items: Vec<QueryResult>,
    pub ok: usize,
    pub mismatches: usize,
    pub errors: usize,
}

pub fn run_batch(manifest: &Manifest, base: &Path, options: &Options) -> (BatchReport, i32) {
    let budget = options.budget();
    let mut cache: BTreeMap<String, std::result::Result<Amalgam, Error>> = BTreeMap::new();
    let mut items = Vec::new();
    let (mut ok, mut mismatches, mut errors, mut budget_errors) = (0, 0, 0, 0);
    for q in &manifest.queries {
        let amalgam = cache
            .entry(q.document.clone())
            .or_insert_with(|| match q.document.strip_prefix("corpus:") {
                Some(name) => corpus::amalgam_by_name(name)
                    .ok_or_else(|| Error::Document(format!("no built-in amalgam `{name}`"))),
                None => load_document(&base.join(&q.document)),
            })
            .clone();
        let outcome = amalgam.and_then(|a| execute(&a, &q.command, &q.args, &budget, options.depth, false));
        let item = match outcome {
            Ok(mut r) => {
                if let Some(expect) = &q.expect {
                    if *expect != r.summary {
                        r.status = "mismatch".into();
                        r.diagnostics["expected"] = expect.clone();
                    }
                }
                if r.status == "ok" {
                    ok += 1;
                } else {
                    mismatches += 1;
                }
                r
            }
            Err(e) => {
                errors += 1;
                if e.is_budget() {
                    budget_errors += 1;
                }
                QueryResult {
                    command: q.command.clone(),
                    args: q.args.clone(),
                    status: "error".into(),
                    summary: Value::Null,
                    payload: Value::Null,
                    diagnostics: json!({ "document": q.document }),
                    error: Some(error_value(&e)),
                    text: String::new(),
                    dots: Vec::new(),
                }
            }
        };
        items.push(item);
    }
    let code = if errors > 0 {
        if budget_errors == errors {
            EXIT_BUDGET
        } else {
            EXIT_INPUT
        }
    } else if mismatches > 0 {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    (BatchReport { items, ok, mismatches, errors }, code)
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let options = &cli.options;
    match &cli.command {
        Command::Corpus { name: None } => {
            for (name, _) in corpus::amalgam_corpus() {
                let _ = writeln!(out, "{name}");
            }
            EXIT_OK
        }
        Command::Corpus { name: Some(name) } => match corpus::amalgam_by_name(name) {
            Some(a) => {
                let _ = out.write_all((AmalgamDocument::from_amalgam(&a).to_json() + "\n").as_bytes());
                EXIT_OK
            }
            None => report_error(&Error::Document(format!("no built-in amalgam `{name}`")), "corpus", options.json, out, err),
        },
        Command::Batch { manifest, report } => {
            let parsed = fs::read_to_string(manifest)
                .map_err(|e| Error::Document(format!("{}: {e}", manifest.display())))
                .and_then(|t| Manifest::parse(&t));
            let m = match parsed {
                Ok(m) => m,
                Err(e) => return report_error(&e, "batch", options.json, out, err),
            };
            let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
            let (rep, code) = run_batch(&m, &base, options);
            let body = to_json(&rep);
            match report {
                Some(path) => {
                    if let Err(e) = fs::write(path, &body) {
                        let _ = writeln!(err, "error: {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None if options.json => {
                    let _ = out.write_all(body.as_bytes());
                }
                None => {}
            }
            if !options.json || report.is_some() {
                for (k, item) in rep.items.iter().enumerate() {
                    let detail = match &item.error {
                        Some(e) => e["message"].as_str().unwrap_or_default().to_string(),
                        None => item.summary.to_string(),
                    };
                    let _ = writeln!(out, "[{k}] {} {}: {} {detail}", item.command, item.args.join(" "), item.status);
                }
                let _ = writeln!(out, "ok {}, mismatches {}, errors {}", rep.ok, rep.mismatches, rep.errors);
            }
            code
        }
        cmd => {
            let (command, args) = command_line(cmd);
            let result = load_amalgam(options).and_then(|a| {
                let want_dot = options.dot.is_some();
                let r = execute(&a, &command, &args, &options.budget(), options.depth, want_dot)?;
                if let Some(dir) = &options.dot {
                    write_dots(dir, &r.dots)?;
                }
                Ok(r)
            });
            match result {
                Ok(r) => {
                    let _ = if options.json { out.write_all(to_json(&r).as_bytes()) } else { out.write_all(r.text.as_bytes()) };
                    EXIT_OK
                }
                Err(e) => report_error(&e, &command, options.json, out, err),
            }
        }
    }
}
