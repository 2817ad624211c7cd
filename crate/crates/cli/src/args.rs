use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "linkforge", version, about = "Entity linking over a title dictionary")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link one text and print the result as JSON.
    Annotate(AnnotateArgs),
    /// Run the pipeline over gold corpora and report InKB micro-F1.
    Evaluate(EvaluateArgs),
    /// Turn a gold corpus into ner/ed/e2e training samples.
    BuildTrainset(TrainsetArgs),
    /// Dictionary tools.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Serve the annotation endpoint over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Pipeline configuration file.
    #[arg(long, env = "LINKFORGE_CONFIG")]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Text to link; read from --file or standard input when absent.
    #[arg(long, conflicts_with = "file")]
    pub text: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Override the configured mode.
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Gold corpus in JSONL; may be repeated.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Write the report and run manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print a per-dataset table.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct TrainsetArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output JSONL, or `-` for standard output.
    #[arg(long)]
    pub out: PathBuf,
    /// Dictionary used to turn gold URIs into titles.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum KbCommand {
    /// Validate and deduplicate a raw dump into a dictionary TSV.
    Build(KbBuildArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    /// `title<TAB>uri` lines.
    Tsv,
    /// KILT knowledge-source JSONL (`wikipedia_title` field).
    Kilt,
    /// One title per line.
    Titles,
}

#[derive(Debug, Args)]
pub struct KbBuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = DumpFormat::Tsv)]
    pub format: DumpFormat,
    /// Prefix for URIs minted from titles (kilt and titles formats).
    #[arg(long, default_value = "http://dbpedia.org/resource/")]
    pub uri_base: String,
    /// Skip malformed lines instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: String,
}
