//! The `tagnet` command line: composes the modules into the end-to-end
//! pipeline (`ingest` → `graph` → `analyze` → `plot`) plus the agreement
//! tools (`kappa`, `sample-curve`).
//!
//! Exit codes: 0 success, 2 usage/input error, 3 analysis infeasible.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::agreement::{
    cohens_kappa, confusion_matrix, cumulative_class_curve, load_labels, stabilization_point,
    LabelSequence, Taxonomy,
};
use crate::centrality::{
    centrality_report, closeness, degree, eigenvector, hits, pagerank, DistanceMode, Measure,
    DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::community::{best_partition, community_summary, fast_greedy};
use crate::config::{load_config, PipelineConfig};
use crate::corpus::{
    filter_by_query, filter_posts, load_blocklist, merge_collections, parse_posts,
    write_posts_jsonl, FilterConfig, InputFormat, ParseMode, PostCollection,
};
use crate::error::{Result, TagnetError};
use crate::export::{
    community_json, curves_csv, export_dot, export_graphml, kappa_json, kappa_text, layout_force,
    render_svg, report_csv, report_json, summary_text, ExportAttributes, RenderOptions,
    DEFAULT_ITERATIONS,
};
use crate::graph::{
    build_graph, exclude_tags, from_canonical_json, largest_component, project_top_n,
    to_canonical_json, CooccurrenceGraph,
};
use crate::normalize::{load_translation_map, normalize_corpus, NormalizationRules};

/// Significant digits for all emitted numbers.
const REPORT_SIG: usize = 6;

#[derive(Parser)]
#[command(name = "tagnet", version, about = "Hashtag co-occurrence network analysis pipeline")]
struct Cli {
    /// TOML config file; command-line flags override config values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory artifacts are written to (default ".").
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Fail on malformed input records instead of skipping them.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, query-filter, rule-filter and normalize post exports.
    Ingest(IngestArgs),
    /// Build the co-occurrence graph from a canonical post file.
    Graph(GraphArgs),
    /// Compute centrality measures and community structure.
    Analyze(AnalyzeArgs),
    /// Render the network as a deterministic SVG.
    Plot(PlotArgs),
    /// Inter-rater agreement: confusion matrix, kappa, percent agreement.
    Kappa(KappaArgs),
    /// Cumulative class curves and the sampling stabilization point.
    SampleCurve(SampleCurveArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Input export file(s); repeatable. JSONL or CSV.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Input format (jsonl|csv); inferred from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Keep only posts carrying at least one of these tags; repeatable.
    #[arg(long)]
    query: Vec<String>,
    /// Blocklist file (one hashtag per line, `//` comments).
    #[arg(long)]
    blocklist: Option<PathBuf>,
    /// Translation map TSV (variant<TAB>canonical).
    #[arg(long)]
    translation_map: Option<PathBuf>,
    #[arg(long)]
    min_hashtags: Option<usize>,
    #[arg(long)]
    max_hashtags: Option<usize>,
    /// Keep posts whose exact hashtag multiset already appeared.
    #[arg(long)]
    keep_duplicate_sets: bool,
    /// Disable plural/edit-distance variant folding.
    #[arg(long)]
    no_variant_merge: bool,
    #[arg(long)]
    edit_distance: Option<u32>,
    #[arg(long)]
    no_plural_folding: bool,
    /// Minimum frequency a tag needs to absorb edit-distance variants.
    #[arg(long)]
    min_frequency: Option<u64>,
}

#[derive(Args)]
struct GraphArgs {
    /// Canonical post file (default <output-dir>/posts.jsonl).
    #[arg(long)]
    posts: Option<PathBuf>,
    /// Tags to flag as query vertices; repeatable.
    #[arg(long)]
    query: Vec<String>,
    /// Keep only the N most frequent tags.
    #[arg(long)]
    top_n: Option<usize>,
    /// Drop edges lighter than this.
    #[arg(long)]
    min_edge_weight: Option<u64>,
    /// Tags to remove before projection; repeatable.
    #[arg(long)]
    exclude: Vec<String>,
    /// Keep only the largest connected component.
    #[arg(long)]
    largest_component: bool,
    /// Also write graph.graphml.
    #[arg(long)]
    graphml: bool,
    /// Also write graph.dot.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Graph JSON file (default <output-dir>/graph.json).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Comma-separated measure names (default: all).
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    /// Top tags listed per community in the summary.
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Graph JSON file (default <output-dir>/graph.json).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Community JSON from `analyze` (default <output-dir>/communities.json).
    #[arg(long)]
    communities: Option<PathBuf>,
    /// Layout seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Layout iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Measure used for vertex sizing (default eigenvector).
    #[arg(long)]
    size_by: Option<String>,
    /// Number of vertices to label.
    #[arg(long)]
    label_top_k: Option<usize>,
}

#[derive(Args)]
struct KappaArgs {
    /// Label CSV (`item_id,class_id`) for rater A.
    rater_a: PathBuf,
    /// Label CSV for rater B.
    rater_b: PathBuf,
    /// Taxonomy CSV (`id,name,description`); default: built-in CES classes.
    #[arg(long)]
    taxonomy: Option<PathBuf>,
}

#[derive(Args)]
struct SampleCurveArgs {
    /// Label CSV in classification order.
    labels: PathBuf,
    /// Items per sub-sampled batch (default 10).
    #[arg(long)]
    batch_size: Option<usize>,
    /// Consecutive stable deltas required.
    #[arg(long)]
    window: Option<usize>,
    /// Stability threshold in percentage points.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Taxonomy CSV; default: built-in CES classes.
    #[arg(long)]
    taxonomy: Option<PathBuf>,
}

/// Run the CLI on the given arguments; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &TagnetError) -> i32 {
    match e {
        TagnetError::EdgelessGraph | TagnetError::EmptyGraph | TagnetError::NotConverged { .. } => {
            3
        }
        _ => 2,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => PipelineConfig::default(),
    };
    let output_dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&output_dir).map_err(|source| TagnetError::Io {
        path: output_dir.clone(),
        source,
    })?;
    let mode = if cli.strict {
        ParseMode::Strict
    } else {
        ParseMode::Lenient
    };
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args, &cfg, &output_dir, mode),
        Command::Graph(args) => cmd_graph(args, &cfg, &output_dir),
        Command::Analyze(args) => cmd_analyze(args, &cfg, &output_dir),
        Command::Plot(args) => cmd_plot(args, &cfg, &output_dir),
        Command::Kappa(args) => cmd_kappa(args, &output_dir),
        Command::SampleCurve(args) => cmd_sample_curve(args, &cfg, &output_dir),
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| TagnetError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn cmd_ingest(
    args: IngestArgs,
    cfg: &PipelineConfig,
    output_dir: &Path,
    mode: ParseMode,
) -> Result<()> {
    let inputs: Vec<PathBuf> = if args.input.is_empty() {
        cfg.ingest.input.clone()
    } else {
        args.input.clone()
    };
    if inputs.is_empty() {
        return Err(TagnetError::InvalidInput(
            "no input files given (use --input or the config file)".into(),
        ));
    }
    let format_name = args.format.clone().or_else(|| cfg.ingest.format.clone());

    let mut collections = Vec::new();
    let mut parse_reports = Vec::new();
    for path in &inputs {
        let format = match format_name.as_deref() {
            Some("jsonl") => InputFormat::Jsonl,
            Some("csv") => InputFormat::Csv,
            Some(other) => {
                return Err(TagnetError::InvalidInput(format!(
                    "unknown format {other:?} (expected jsonl or csv)"
                )))
            }
            None => InputFormat::from_path(path).ok_or_else(|| {
                TagnetError::InvalidInput(format!(
                    "cannot infer format of {} (use --format)",
                    path.display()
                ))
            })?,
        };
        let (coll, report) = parse_posts(path, format, mode)?;
        collections.push(coll);
        parse_reports.push(json!({
            "file": path.display().to_string(),
            "duplicates_dropped": report.duplicates_dropped,
            "malformed_skipped": report.malformed_skipped,
        }));
    }
    let mut collection = merge_collections(&collections)?;

    let query: BTreeSet<String> = if args.query.is_empty() {
        cfg.ingest.query.iter().cloned().collect()
    } else {
        args.query.iter().cloned().collect()
    };
    if !query.is_empty() {
        collection = filter_by_query(&collection, &query);
    }

    let mut filter_cfg = FilterConfig::default();
    if let Some(path) = args.blocklist.as_ref().or(cfg.ingest.blocklist.as_ref()) {
        filter_cfg.blocklist = load_blocklist(path)?;
    }
    if let Some(min) = args.min_hashtags.or(cfg.ingest.min_hashtags_per_post) {
        filter_cfg.min_hashtags_per_post = min;
    }
    if let Some(max) = args.max_hashtags.or(cfg.ingest.max_hashtags_per_post) {
        filter_cfg.max_hashtags_per_post = max;
    }
    if args.keep_duplicate_sets {
        filter_cfg.drop_duplicate_hashtag_sets = false;
    } else if let Some(drop) = cfg.ingest.drop_duplicate_hashtag_sets {
        filter_cfg.drop_duplicate_hashtag_sets = drop;
    }
    let (collection, filter_report) = filter_posts(&collection, &filter_cfg)?;

    let mut rules = NormalizationRules::default();
    if let Some(path) = args
        .translation_map
        .as_ref()
        .or(cfg.ingest.translation_map.as_ref())
    {
        rules.translation_map = load_translation_map(path)?;
    }
    if args.no_variant_merge {
        rules.variant_merge_enabled = false;
    } else if let Some(on) = cfg.ingest.variant_merge_enabled {
        rules.variant_merge_enabled = on;
    }
    if args.no_plural_folding {
        rules.plural_folding_enabled = false;
    } else if let Some(on) = cfg.ingest.plural_folding_enabled {
        rules.plural_folding_enabled = on;
    }
    if let Some(d) = args.edit_distance.or(cfg.ingest.edit_distance_threshold) {
        rules.edit_distance_threshold = d;
    }
    if let Some(f) = args.min_frequency.or(cfg.ingest.min_frequency_for_canonical) {
        rules.min_frequency_for_canonical = f;
    }
    let (collection, norm_report, _variants) = normalize_corpus(&collection, &rules)?;

    write_posts_jsonl(&collection, &output_dir.join("posts.jsonl"))?;
    let report = json!({
        "parse": parse_reports,
        "filter": {
            "removed_blocklist": filter_report.removed_blocklist,
            "removed_too_few_hashtags": filter_report.removed_too_few_hashtags,
            "removed_too_many_hashtags": filter_report.removed_too_many_hashtags,
            "removed_duplicate_hashtag_set": filter_report.removed_duplicate_hashtag_set,
            "retained": filter_report.retained,
        },
        "normalization": norm_report,
    });
    let report_str = serde_json::to_string_pretty(&report).expect("report serialization") + "\n";
    write_artifact(output_dir, "ingest_report.json", &report_str)?;
    println!(
        "ingested {} posts ({} removed by filters) -> {}",
        collection.len(),
        filter_report.removed_total(),
        output_dir.join("posts.jsonl").display()
    );
    print!("{report_str}");
    Ok(())
}

fn load_post_file(path: &Path, query: &[String]) -> Result<PostCollection> {
    let (mut collection, _) = parse_posts(path, InputFormat::Jsonl, ParseMode::Strict)?;
    collection.query = query.iter().cloned().collect();
    Ok(collection)
}

fn cmd_graph(args: GraphArgs, cfg: &PipelineConfig, output_dir: &Path) -> Result<()> {
    let posts_path = args
        .posts
        .clone()
        .unwrap_or_else(|| output_dir.join("posts.jsonl"));
    let collection = load_post_file(&posts_path, &args.query)?;
    let mut g = build_graph(&collection);

    let exclude: BTreeSet<String> = if args.exclude.is_empty() {
        cfg.graph.exclude.iter().cloned().collect()
    } else {
        args.exclude.iter().cloned().collect()
    };
    if !exclude.is_empty() {
        g = exclude_tags(&g, &exclude);
    }
    let top_n = args.top_n.or(cfg.graph.top_n);
    let min_edge_weight = args.min_edge_weight.or(cfg.graph.min_edge_weight);
    if top_n.is_some() || min_edge_weight.is_some() {
        let n = top_n.unwrap_or(g.vertex_count().max(1));
        g = project_top_n(&g, n, min_edge_weight.unwrap_or(1))?;
    }
    if args.largest_component || cfg.graph.largest_component == Some(true) {
        g = largest_component(&g);
    }

    write_artifact(output_dir, "graph.json", &to_canonical_json(&g))?;
    if args.graphml || cfg.graph.graphml == Some(true) {
        let xml = export_graphml(&g, &ExportAttributes::default())?;
        write_artifact(output_dir, "graph.graphml", &xml)?;
    }
    if args.dot || cfg.graph.dot == Some(true) {
        let dot = export_dot(&g, None)?;
        write_artifact(output_dir, "graph.dot", &dot)?;
    }
    println!(
        "graph: {} vertices, {} edges, total weight {} -> {}",
        g.vertex_count(),
        g.edge_count(),
        g.total_weight(),
        output_dir.join("graph.json").display()
    );
    Ok(())
}

fn load_graph_file(path: &Path) -> Result<CooccurrenceGraph> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_canonical_json(&content)
}

fn parse_measures(names: &[String]) -> Result<BTreeSet<Measure>> {
    if names.is_empty() {
        return Ok(Measure::ALL.into_iter().collect());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn size_table(g: &CooccurrenceGraph, measure: Measure) -> Result<crate::centrality::CentralityTable> {
    Ok(match measure {
        Measure::Degree => degree(g, false),
        Measure::WeightedDegree => degree(g, true),
        Measure::Betweenness => crate::centrality::betweenness(g, DistanceMode::Hop),
        Measure::Closeness => closeness(g, DistanceMode::Hop),
        Measure::Eigenvector => eigenvector(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
        Measure::Pagerank => pagerank(g, DEFAULT_DAMPING, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
        Measure::Hub => hits(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.0,
        Measure::Authority => hits(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.1,
    })
}

fn cmd_analyze(args: AnalyzeArgs, cfg: &PipelineConfig, output_dir: &Path) -> Result<()> {
    let graph_path = args
        .graph
        .clone()
        .unwrap_or_else(|| output_dir.join("graph.json"));
    let g = load_graph_file(&graph_path)?;

    let measure_names = if args.measures.is_empty() {
        cfg.analyze.measures.clone()
    } else {
        args.measures.clone()
    };
    let measures = parse_measures(&measure_names)?;
    let report = centrality_report(&g, &measures)?;
    write_artifact(output_dir, "centrality.csv", &report_csv(&report, REPORT_SIG))?;
    write_artifact(output_dir, "centrality.json", &report_json(&report, REPORT_SIG))?;

    let partition = best_partition(&fast_greedy(&g)?);
    write_artifact(
        output_dir,
        "communities.json",
        &community_json(&partition, REPORT_SIG),
    )?;

    // rank community members by eigenvector when requested, else degree
    let ranking = if measures.contains(&Measure::Eigenvector) {
        size_table(&g, Measure::Eigenvector)?
    } else {
        degree(&g, false)
    };
    let top_k = args.top_k.or(cfg.analyze.top_k).unwrap_or(10);
    let summaries = community_summary(&partition, &ranking, top_k)?;
    let summary = summary_text(&partition, &summaries, REPORT_SIG);
    write_artifact(output_dir, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_plot(args: PlotArgs, cfg: &PipelineConfig, output_dir: &Path) -> Result<()> {
    let graph_path = args
        .graph
        .clone()
        .unwrap_or_else(|| output_dir.join("graph.json"));
    let g = load_graph_file(&graph_path)?;

    let communities_path = args
        .communities
        .clone()
        .unwrap_or_else(|| output_dir.join("communities.json"));
    let content = std::fs::read_to_string(&communities_path).map_err(|source| TagnetError::Io {
        path: communities_path.clone(),
        source,
    })?;
    let parsed: serde_json::Value = serde_json::from_str(&content)
        .map_err(|e| TagnetError::InvalidInput(format!("bad community JSON: {e}")))?;
    let assignment = parsed["assignment"]
        .as_object()
        .ok_or_else(|| TagnetError::InvalidInput("community JSON lacks assignment".into()))?;
    let mut partition = crate::community::CommunityPartition {
        assignment: Default::default(),
        q: parsed["q"].as_str().and_then(|s| s.parse().ok()).unwrap_or(0.0),
    };
    for (tag, id) in assignment {
        let id = id
            .as_u64()
            .ok_or_else(|| TagnetError::InvalidInput("bad community id".into()))?;
        partition.assignment.insert(tag.clone(), id as usize);
    }

    let size_by: Measure = args
        .size_by
        .clone()
        .or_else(|| cfg.plot.size_by.clone())
        .unwrap_or_else(|| "eigenvector".into())
        .parse()?;
    let table = size_table(&g, size_by)?;

    let seed = args.seed.or(cfg.plot.seed).unwrap_or(42);
    let iterations = args
        .iterations
        .or(cfg.plot.iterations)
        .unwrap_or(DEFAULT_ITERATIONS);
    let layout = layout_force(&g, iterations, seed)?;
    let opts = RenderOptions {
        label_top_k: args.label_top_k.or(cfg.plot.label_top_k).unwrap_or(30),
        ..RenderOptions::default()
    };
    let svg = render_svg(&g, &layout, Some(&partition), Some(&table), &opts)?;
    let path = write_artifact(output_dir, "plot.svg", &svg)?;
    println!(
        "plot: {} vertices, seed {seed}, sized by {size_by} -> {}",
        g.vertex_count(),
        path.display()
    );
    Ok(())
}

fn load_taxonomy(path: Option<&PathBuf>) -> Result<Taxonomy> {
    match path {
        Some(p) => Taxonomy::from_csv_file(p),
        None => Ok(Taxonomy::default_ces()),
    }
}

fn cmd_kappa(args: KappaArgs, output_dir: &Path) -> Result<()> {
    let taxonomy = load_taxonomy(args.taxonomy.as_ref())?;
    let a = load_labels(&args.rater_a)?;
    let b = load_labels(&args.rater_b)?;
    let matrix = confusion_matrix(&a, &b, &taxonomy)?;
    let result = cohens_kappa(&matrix)?;
    write_artifact(output_dir, "kappa.json", &kappa_json(&result, &matrix, REPORT_SIG))?;
    let text = kappa_text(&result, REPORT_SIG);
    write_artifact(output_dir, "kappa.txt", &text)?;
    print!("{text}");
    Ok(())
}

/// Label CSV in file order (the classification sequence), for batching.
fn load_labels_ordered(path: &Path) -> Result<Vec<(String, u32)>> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(content.as_bytes());
    let mut rows = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| TagnetError::MalformedRecord {
            line: idx + 2,
            message: e.to_string(),
        })?;
        let item = row.get(0).unwrap_or("").to_owned();
        let class: u32 = row
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| TagnetError::MalformedRecord {
                line: idx + 2,
                message: "class id must be an integer".into(),
            })?;
        rows.push((item, class));
    }
    Ok(rows)
}

fn cmd_sample_curve(args: SampleCurveArgs, cfg: &PipelineConfig, output_dir: &Path) -> Result<()> {
    let batch_size = args
        .batch_size
        .or(cfg.sample_curve.batch_size)
        .unwrap_or(10);
    if batch_size == 0 {
        return Err(TagnetError::InvalidConfig("batch size must be >= 1".into()));
    }
    let taxonomy = load_taxonomy(args.taxonomy.as_ref())?;
    let rows = load_labels_ordered(&args.labels)?;
    if rows.is_empty() {
        return Err(TagnetError::InvalidInput("label file has no rows".into()));
    }
    let batches: Vec<LabelSequence> = rows
        .chunks(batch_size)
        .map(|chunk| chunk.iter().cloned().collect())
        .collect();
    let curves = cumulative_class_curve(&batches, &taxonomy)?;
    write_artifact(output_dir, "curves.csv", &curves_csv(&curves, REPORT_SIG))?;

    let window = args.window.or(cfg.sample_curve.window).unwrap_or(3);
    let epsilon = args.epsilon.or(cfg.sample_curve.epsilon_pct).unwrap_or(2.0);
    match stabilization_point(&curves, window, epsilon)? {
        Some(t) => println!("stabilization index: {t}"),
        None => println!("stabilization index: none"),
    }
    Ok(())
}
