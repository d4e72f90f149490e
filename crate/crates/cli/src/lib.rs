//! Command-line front end. [`run`] does all the work and returns what would
//! be printed, so the binary is a thin wrapper and tests can call it directly.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use npc_coref::npc::{evaluate_document, filter_with_diagnostic, FilterDiagnostic, Honorifics, NpcEntity, NpcReport};
use npc_coref::resolver::{run_ner_de, Gazetteer, ResolverConfig};
use npc_coref::stats::stats_table;
use npc_coref::{
    corpus_stats, emit_conll, emit_json, parse_conll, parse_json_docs, pronoun_stats, Chain, Document, EntityType,
    Scorer,
};
use thiserror::Error;

pub const CONFIG_ENV: &str = "NPC_COREF_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unreadable or malformed files, unpaired documents, bad config.
    #[error("{0}")]
    Input(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: npc_coref::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Core { .. } => 2,
            CliError::Internal(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn core(context: impl std::fmt::Display) -> impl FnOnce(npc_coref::Error) -> CliError {
    let context = context.to_string();
    move |source| CliError::Core { context, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Conll,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "npc-coref", version, about = "Named person coreference scoring, filtering and resolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score system chains against gold chains.
    Score(ScoreArgs),
    /// Run the NER-driven resolver over JSON documents.
    Resolve(ResolveArgs),
    /// Keep only chains with a named mention of the entity type.
    Filter(FilterArgs),
    /// Corpus statistics for entity types and third-person pronouns.
    Stats(StatsArgs),
    /// List over-split, over-merged and not-found gold entities as TSV.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, value_name = "TYPE", global = true)]
    pub entity_type: Option<String>,
    /// Honorific list, one per line.
    #[arg(long, value_name = "FILE", global = true)]
    pub honorifics: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(short, long, value_name = "FILE", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub gold: PathBuf,
    pub sys: PathBuf,
    /// Also compute the named-person metrics (needs an NER layer).
    #[arg(long)]
    pub npc: bool,
    /// Documents supplying the NER/POS/dependency layers for both sides.
    #[arg(long, value_name = "FILE")]
    pub layers: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    pub input: PathBuf,
    /// Gender gazetteer (TSV `token<TAB>M|F`); the bundled sample by default.
    #[arg(long, value_name = "FILE")]
    pub gazetteer: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Output format (default conll).
    #[arg(long, value_enum)]
    pub to: Option<Format>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    pub sys: PathBuf,
    /// Documents supplying the NER/dependency layers; the input itself by default.
    #[arg(long, value_name = "FILE")]
    pub layers: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub gold: PathBuf,
    pub sys: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub layers: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Values read from the `key=value` config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub threshold: Option<f64>,
    pub window: Option<usize>,
    pub entity_type: Option<String>,
    pub honorifics: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| CliError::Input(format!("{source}, line {}: {msg}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "threshold" | "similarity_threshold" => {
                    cfg.threshold = Some(value.parse().map_err(|_| bad(format!("bad threshold {value:?}")))?)
                }
                "window" => cfg.window = Some(value.parse().map_err(|_| bad(format!("bad window {value:?}")))?),
                "entity_type" => cfg.entity_type = Some(value.to_owned()),
                "honorifics" => cfg.honorifics = Some(PathBuf::from(value)),
                "gazetteer" => cfg.gazetteer = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&path.display().to_string(), &text)
    }
}

/// Everything a command produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
/// `config` is the path from [`CONFIG_ENV`], if set.
pub fn run<I, T>(args: I, config: Option<&Path>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, ..Default::default() }
            } else {
                Outcome { stderr: text, code, ..Default::default() }
            };
        }
    };
    let mut out = Outcome::default();
    let result = config
        .map(FileConfig::load)
        .transpose()
        .and_then(|file| execute(&cli.command, &file.unwrap_or_default(), &mut out));
    if let Err(e) = result {
        out.stderr.push_str(&format!("error: {e}\n"));
        out.code = e.exit_code();
    }
    out
}

fn execute(command: &Command, file: &FileConfig, out: &mut Outcome) -> Result<()> {
    let (text, common) = match command {
        Command::Score(a) => (cmd_score(a, file, &mut out.stderr)?, &a.common),
        Command::Resolve(a) => (cmd_resolve(a, file)?, &a.common),
        Command::Filter(a) => (cmd_filter(a, file, &mut out.stderr)?, &a.common),
        Command::Stats(a) => (cmd_stats(a, file)?, &a.common),
        Command::Diagnose(a) => (cmd_diagnose(a, file)?, &a.common),
    };
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?,
        None => out.stdout = text,
    }
    Ok(())
}

// ---- shared helpers ----

fn detect_format(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Conll,
    })
}

pub fn read_documents(path: &Path, format: Option<Format>) -> Result<Vec<Document>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let docs = match detect_format(path, format) {
        Format::Conll => parse_conll(&text),
        Format::Json => parse_json_docs(&text),
    }
    .map_err(core(path.display()))?;
    for doc in &docs {
        doc.validate().map_err(core(path.display()))?;
    }
    Ok(docs)
}

fn entity_type(common: &Common, file: &FileConfig) -> Result<EntityType> {
    let raw = common.entity_type.as_deref().or(file.entity_type.as_deref()).unwrap_or("PER");
    if raw.trim().is_empty() {
        return Err(CliError::Input("empty entity type".into()));
    }
    Ok(raw.trim().parse().unwrap_or_else(|e| match e {}))
}

fn honorifics(common: &Common, file: &FileConfig) -> Result<Honorifics> {
    match common.honorifics.as_ref().or(file.honorifics.as_ref()) {
        Some(path) => Honorifics::load(path).map_err(core(path.display())),
        None => Ok(Honorifics::default()),
    }
}

type DocKey = (String, u32);

fn key(doc: &Document) -> DocKey {
    (doc.doc_id.clone(), doc.part)
}

fn show_key((id, part): &DocKey) -> String {
    if *part == 0 {
        id.clone()
    } else {
        format!("{id} (part {part})")
    }
}

/// Pairs documents by id in `left` order; any document without a partner
/// is an input error listing all orphans.
fn pair<'a>(left: &'a [Document], right: &'a [Document], what: (&str, &str)) -> Result<Vec<(&'a Document, &'a Document)>> {
    let by_key: HashMap<DocKey, &Document> = right.iter().map(|d| (key(d), d)).collect();
    let left_keys: HashMap<DocKey, ()> = left.iter().map(|d| (key(d), ())).collect();
    let mut orphans = Vec::new();
    for d in left {
        if !by_key.contains_key(&key(d)) {
            orphans.push(format!("{} only in {}", show_key(&key(d)), what.0));
        }
    }
    for d in right {
        if !left_keys.contains_key(&key(d)) {
            orphans.push(format!("{} only in {}", show_key(&key(d)), what.1));
        }
    }
    if !orphans.is_empty() {
        return Err(CliError::Input(format!("unpaired documents:\n  {}", orphans.join("\n  "))));
    }
    let mut pairs = Vec::with_capacity(left.len());
    for d in left {
        let other = by_key[&key(d)];
        if other.len() != d.len() {
            return Err(CliError::Input(format!(
                "document {}: {} has {} tokens, {} has {}",
                show_key(&key(d)),
                what.0,
                d.len(),
                what.1,
                other.len()
            )));
        }
        pairs.push((d, other));
    }
    Ok(pairs)
}

/// `layers` with its chains replaced by `chains`.
fn with_chains(layers: &Document, chains: &[Chain]) -> Document {
    let mut doc = layers.clone();
    doc.chains = chains.to_vec();
    doc
}

fn layer_docs(path: Option<&PathBuf>, format: Option<Format>) -> Result<Option<HashMap<DocKey, Document>>> {
    path.map(|p| {
        read_documents(p, format).map(|docs| docs.into_iter().map(|d| (key(&d), d)).collect())
    })
    .transpose()
}

fn layers_for<'a>(layers: &'a Option<HashMap<DocKey, Document>>, doc: &'a Document) -> Result<&'a Document> {
    match layers {
        None => Ok(doc),
        Some(map) => {
            let l = map
                .get(&key(doc))
                .ok_or_else(|| CliError::Input(format!("no layers for document {}", show_key(&key(doc)))))?;
            if l.len() != doc.len() {
                return Err(CliError::Input(format!(
                    "document {}: layers have {} tokens, expected {}",
                    show_key(&key(doc)),
                    l.len(),
                    doc.len()
                )));
            }
            Ok(l)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn npc_entities(
    layers: &Document,
    chains: &[Chain],
    t: &EntityType,
    h: &Honorifics,
) -> Result<(Vec<NpcEntity>, FilterDiagnostic)> {
    filter_with_diagnostic(&with_chains(layers, chains), chains, t, h).map_err(core(format!("document {}", layers.doc_id)))
}

fn require_ner(docs: &[&Document], side: &str) -> Result<()> {
    if docs.iter().all(|d| d.ner.is_empty()) {
        return Err(CliError::Input(format!(
            "--npc needs a named-entity layer, but no {side} document has one (supply --layers)"
        )));
    }
    Ok(())
}

// ---- commands ----

fn cmd_score(a: &ScoreArgs, file: &FileConfig, stderr: &mut String) -> Result<String> {
    let gold = read_documents(&a.gold, a.common.format)?;
    let sys = read_documents(&a.sys, a.common.format)?;
    let pairs = pair(&gold, &sys, ("gold", "system"))?;
    let mut scorer = Scorer::new();
    for (g, s) in &pairs {
        scorer.add_document(&g.chains, &s.chains);
    }
    let standard = scorer.report();

    let npc = if a.npc {
        let t = entity_type(&a.common, file)?;
        let h = honorifics(&a.common, file)?;
        let layers = layer_docs(a.layers.as_ref(), a.common.format)?;
        let mut gold_layers = Vec::new();
        let mut sys_layers = Vec::new();
        for (g, s) in &pairs {
            gold_layers.push(layers_for(&layers, g)?);
            sys_layers.push(layers_for(&layers, s)?);
        }
        require_ner(&gold_layers, "gold")?;
        require_ner(&sys_layers, "system")?;
        let mut evaluations = Vec::new();
        for (i, (g, s)) in pairs.iter().enumerate() {
            let (ge, _) = npc_entities(gold_layers[i], &g.chains, &t, &h)?;
            let (se, _) = npc_entities(sys_layers[i], &s.chains, &t, &h)?;
            evaluations.push(evaluate_document(&g.doc_id, &ge, &se));
        }
        let report = NpcReport::from_documents(&evaluations);
        if report.gold_entities == 0 {
            stderr.push_str("warning: no gold entity of the requested type survived filtering\n");
        }
        Some(report)
    } else {
        None
    };

    if a.common.json {
        let mut value = serde_json::json!({ "documents": pairs.len(), "standard": standard });
        if let Some(npc) = &npc {
            value["npc"] = serde_json::to_value(npc).map_err(|e| CliError::Internal(e.to_string()))?;
        }
        return to_json(&value);
    }
    let mut out = format!("documents: {}\n\n", pairs.len());
    out.push_str(&standard.to_table());
    if let Some(npc) = &npc {
        out.push('\n');
        out.push_str(&npc.to_table());
    }
    Ok(out)
}

fn resolver_config(a: &ResolveArgs, file: &FileConfig) -> Result<ResolverConfig> {
    let t = entity_type(&a.common, file)?;
    let mut cfg = ResolverConfig::for_entity_type(t);
    if let Some(th) = a.threshold.or(file.threshold) {
        cfg.similarity_threshold = th;
    }
    if let Some(w) = a.window.or(file.window) {
        cfg.window = w;
    }
    cfg.validate().map_err(core("resolver"))?;
    Ok(cfg)
}

fn cmd_resolve(a: &ResolveArgs, file: &FileConfig) -> Result<String> {
    let cfg = resolver_config(a, file)?;
    let h = honorifics(&a.common, file)?;
    let gazetteer = match a.gazetteer.as_ref().or(file.gazetteer.as_ref()) {
        Some(path) => Gazetteer::load(path).map_err(core(path.display()))?,
        None => Gazetteer::bundled(),
    };
    let format = a.common.format.or(Some(Format::Json));
    let mut docs = read_documents(&a.input, format)?;
    for doc in &mut docs {
        let resolution = run_ner_de(doc, &cfg, &gazetteer, &h).map_err(core(a.input.display()))?;
        doc.chains = resolution.into_chains();
    }
    let json_out = a.common.json || a.to == Some(Format::Json);
    Ok(if json_out { emit_json(&docs) } else { emit_conll(&docs) })
}

fn cmd_filter(a: &FilterArgs, file: &FileConfig, stderr: &mut String) -> Result<String> {
    let t = entity_type(&a.common, file)?;
    let h = honorifics(&a.common, file)?;
    let mut docs = read_documents(&a.sys, a.common.format)?;
    let layers = layer_docs(a.layers.as_ref(), a.common.format)?;
    let mut total = FilterDiagnostic::default();
    for doc in &mut docs {
        let l = layers_for(&layers, doc)?;
        let (kept, diag) = npc_entities(l, &doc.chains, &t, &h)?;
        total.add(&diag);
        doc.chains = kept.into_iter().map(|e| e.chain).collect();
    }
    let pct = |v: Option<f64>| v.map_or("n/a".to_owned(), |v| format!("{v:.1}%"));
    let _ = writeln!(
        stderr,
        "kept {} of {} chains; dropped chains with a third-person animate pronoun: {} of {} ({}); pronoun chains without a name: {}",
        total.kept,
        total.chains,
        total.dropped_with_pronoun,
        total.dropped,
        pct(total.dropped_pronoun_percent()),
        pct(total.pronoun_chains_without_name_percent()),
    );
    let out_format = detect_format(&a.sys, a.common.format);
    Ok(if a.common.json || out_format == Format::Json {
        emit_json(&docs)
    } else {
        emit_conll(&docs)
    })
}

fn cmd_stats(a: &StatsArgs, file: &FileConfig) -> Result<String> {
    let mut docs = Vec::new();
    for path in &a.corpus {
        docs.extend(read_documents(path, a.common.format)?);
    }
    let types = match a.common.entity_type.as_deref().or(file.entity_type.as_deref()) {
        Some(_) => vec![entity_type(&a.common, file)?],
        None => vec![EntityType::Per, EntityType::Org, EntityType::Gpe, EntityType::Date],
    };
    let mut reports = Vec::new();
    for t in &types {
        reports.push(corpus_stats(&docs, t).map_err(core("corpus"))?);
    }
    let pronouns = pronoun_stats(&docs).map_err(core("corpus"))?;
    if a.common.json {
        return to_json(&serde_json::json!({ "documents": docs.len(), "entities": reports, "pronouns": pronouns }));
    }
    Ok(format!(
        "documents: {}\n\n{}\n{}",
        docs.len(),
        stats_table(&reports),
        pronouns.to_table()
    ))
}

fn cmd_diagnose(a: &DiagnoseArgs, file: &FileConfig) -> Result<String> {
    let t = entity_type(&a.common, file)?;
    let h = honorifics(&a.common, file)?;
    let gold = read_documents(&a.gold, a.common.format)?;
    let sys = read_documents(&a.sys, a.common.format)?;
    let pairs = pair(&gold, &sys, ("gold", "system"))?;
    let layers = layer_docs(a.layers.as_ref(), a.common.format)?;
    let mut findings = Vec::new();
    for (g, s) in &pairs {
        let (ge, _) = npc_entities(layers_for(&layers, g)?, &g.chains, &t, &h)?;
        let (se, _) = npc_entities(layers_for(&layers, s)?, &s.chains, &t, &h)?;
        findings.extend(evaluate_document(&g.doc_id, &ge, &se).findings);
    }
    if a.common.json {
        return to_json(&findings);
    }
    let mut out = String::new();
    for f in &findings {
        out.push_str(&f.tsv());
        out.push('\n');
    }
    Ok(out)
}

/// Finding counts by kind, for summaries.
pub fn count_kinds(tsv: &str) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for line in tsv.lines() {
        if let Some(kind) = line.split('\t').next() {
            *counts.entry(kind).or_insert(0) += 1;
        }
    }
    counts
}
