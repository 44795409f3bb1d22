//! The `aksara` command line. Exit status is 0 on success, 1 for usage
//! errors and 2 for data errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use aksara_core::scanner::{tokenize_aksaras, tokenize_characters};
use aksara_core::similarity::Combine;
use aksara_core::{
    normalize, shingle_text, MetricKind, Mode, NormalizationProfile, ShingleParams, Unit,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::CorpusIndex;
use crate::error::Error;
use crate::export::{self, GraphFormat};
use crate::query::{self, Query};
use crate::server::{self, ServerConfig, DEFAULT_CACHE_CAPACITY};

#[derive(Debug, Parser)]
#[command(name = "aksara", version, about = "Akṣara-based text-reuse analysis")]
pub struct Cli {
    /// Corpus manifest (JSON)
    #[arg(long, global = true, env = "AKSARA_CORPUS", value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Normalization rules, comma-separated, or `none`
    #[arg(long, global = true, value_name = "RULES")]
    pub normalize: Option<String>,

    /// Same as `--normalize none`
    #[arg(long, global = true, conflicts_with = "normalize")]
    pub no_normalize: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Gram size
    #[arg(long, default_value_t = 4)]
    pub n: usize,

    /// contiguous, fuzzy or skip
    #[arg(long, default_value = "contiguous")]
    pub mode: String,

    /// Maximum gap between selected units (skip mode; default 1)
    #[arg(long)]
    pub k: Option<usize>,

    /// aksara or character
    #[arg(long, default_value = "aksara")]
    pub unit: String,
}

impl ParamArgs {
    fn resolve(&self, n: usize) -> Result<ShingleParams, Error> {
        let mode: Mode = self.mode.parse()?;
        let unit: Unit = self.unit.parse()?;
        Ok(ShingleParams::new(n, mode, self.k.unwrap_or(1), unit)?)
    }

    pub fn params(&self) -> Result<ShingleParams, Error> {
        self.resolve(self.n)
    }
}

#[derive(Debug, Args)]
pub struct Input {
    /// Text to read
    pub text: Option<String>,

    /// Read the text from a file
    #[arg(long, conflicts_with_all = ["text", "doc"])]
    pub file: Option<PathBuf>,

    /// Read the text of a corpus document
    #[arg(long, conflicts_with = "text")]
    pub doc: Option<String>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// jaccard or dice
    #[arg(long, default_value = "dice")]
    pub metric: String,

    /// Average the metric over every valid n in 2..=5
    #[arg(long, value_enum, default_value_t = CombineArg::Single)]
    pub combine: CombineArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombineArg {
    Single,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Html,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print akṣaras (or characters) with byte spans
    Tokenize {
        #[command(flatten)]
        input: Input,
        /// Print phonemic characters instead of akṣaras
        #[arg(long)]
        characters: bool,
    },
    /// Print the sorted shingle keys of a text
    Shingle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare two corpus documents
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise similarity matrix as TSV
    Matrix {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum spanning tree over 1 - similarity
    Mst {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        metric: MetricArgs,
        /// Output file; `.dot`/`.gv` select DOT
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the format implied by `--out`
        #[arg(long, value_enum)]
        format: Option<TreeFormat>,
    },
    /// Load a corpus, report problems and optionally write the shingle cache
    Ingest {
        /// Gram sizes to cache, e.g. `n=2,3,4,5`
        #[arg(long, value_name = "SIZES")]
        precompute: Option<String>,
        /// Cache directory (default: `cache` next to the manifest)
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value = "contiguous")]
        mode: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "aksara")]
        unit: String,
    },
    /// Serve the read-only HTTP API
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Built explorer UI, served under `/` and `/assets/`
        #[arg(long)]
        assets: Option<PathBuf>,
        /// Cached responses kept in memory
        #[arg(long, default_value_t = DEFAULT_CACHE_CAPACITY)]
        cache_capacity: usize,
        /// Load a precomputed shingle cache first
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            1
        }
        Err(Failure::Data(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

struct Session<'a> {
    manifest: Option<PathBuf>,
    normalize: Option<String>,
    no_normalize: bool,
    index: Option<Arc<CorpusIndex>>,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn index(&mut self) -> Result<Arc<CorpusIndex>, Failure> {
        if let Some(index) = &self.index {
            return Ok(Arc::clone(index));
        }
        let path = self.manifest.clone().ok_or_else(|| {
            Failure::Usage("a corpus is required: pass --manifest or set AKSARA_CORPUS".into())
        })?;
        let index = CorpusIndex::ingest(&path)?;
        for w in index.warnings() {
            let id = w.id.as_deref().unwrap_or("?");
            let _ = writeln!(self.err, "warning: {id}: {}", w.message);
        }
        let index = Arc::new(index);
        self.index = Some(Arc::clone(&index));
        Ok(index)
    }

    fn profile(&mut self) -> Result<NormalizationProfile, Failure> {
        if self.no_normalize {
            return Ok(NormalizationProfile::none());
        }
        if let Some(rules) = &self.normalize {
            return Ok(rules.parse().map_err(Error::from)?);
        }
        if self.manifest.is_some() {
            return Ok(self.index()?.profile.clone());
        }
        Ok(NormalizationProfile::default())
    }

    /// `(id, text)` for a tokenize/shingle input.
    fn text(&mut self, input: &Input) -> Result<(String, String), Failure> {
        match (&input.text, &input.file, &input.doc) {
            (Some(text), None, None) => Ok(("input".into(), text.clone())),
            (None, Some(path), None) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "input".into());
                Ok((id, text))
            }
            (None, None, Some(id)) => {
                let index = self.index()?;
                let text = index.document(id)?.text.clone();
                Ok((id.clone(), text))
            }
            _ => Err(Failure::Usage(
                "give exactly one of TEXT, --file or --doc".into(),
            )),
        }
    }
}

fn query(session: &mut Session, params: &ParamArgs, metric: &MetricArgs) -> Result<Query, Failure> {
    let kind: MetricKind = metric.metric.parse().map_err(Error::from)?;
    let combine = match metric.combine {
        CombineArg::Single => Combine::Single,
        CombineArg::Mean => Combine::Mean,
    };
    Ok(Query::new(params.params()?, session.profile()?)
        .metric(kind)
        .combine(combine))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, body).map_err(|e| Error::io(path, e).into()),
        None => Ok(out.write_all(body.as_bytes())?),
    }
}

/// Sizes for `--precompute`: `n=2,3,4,5` or `2,3,4,5`.
fn parse_sizes(raw: &str) -> Result<Vec<usize>, Failure> {
    let list = raw.trim().strip_prefix("n=").unwrap_or(raw.trim());
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("invalid size `{s}` in `{raw}`")))
        })
        .collect()
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut session = Session {
        manifest: cli.manifest,
        normalize: cli.normalize,
        no_normalize: cli.no_normalize,
        index: None,
        err,
    };
    match cli.command {
        Command::Tokenize { input, characters } => {
            let (id, text) = session.text(&input)?;
            if characters {
                for g in tokenize_characters(&text) {
                    writeln!(out, "{}\t{}\t{}", g.surface, g.span.start, g.span.end)?;
                }
            } else {
                let profile = session.profile()?;
                let stream = normalize(&tokenize_aksaras(&id, &text), &profile);
                for a in &stream.aksaras {
                    writeln!(out, "{}\t{}\t{}", a.surface(), a.span.start, a.span.end)?;
                }
            }
        }
        Command::Shingle { input, params } => {
            let params = params.params()?;
            let (id, text) = session.text(&input)?;
            let profile = session.profile()?;
            for key in shingle_text(&id, &text, &params, &profile).keys() {
                writeln!(out, "{key}")?;
            }
        }
        Command::Compare {
            a,
            b,
            params,
            format,
            out: path,
        } => {
            let params = params.params()?;
            let profile = session.profile()?;
            let index = session.index()?;
            let report = query::comparison(&index, &a, &b, &params, &profile)?;
            let body = match format {
                ReportFormat::Json => export::report_json(&report),
                ReportFormat::Html => export::report_html(
                    &report,
                    &index.document(&a)?.text,
                    &index.document(&b)?.text,
                ),
            };
            emit(out, path.as_deref(), &body)?;
        }
        Command::Matrix {
            params,
            metric,
            out: path,
        } => {
            let q = query(&mut session, &params, &metric)?;
            let index = session.index()?;
            let matrix = query::matrix(&index, &q)?;
            for id in &matrix.empty {
                writeln!(session.err, "warning: {id}: no shingles at {}", q.params)?;
            }
            emit(out, path.as_deref(), &export::matrix_tsv(&matrix))?;
        }
        Command::Mst {
            params,
            metric,
            out: path,
            format,
        } => {
            let q = query(&mut session, &params, &metric)?;
            let format = match (format, path.as_deref()) {
                (Some(TreeFormat::Json), _) => GraphFormat::Json,
                (Some(TreeFormat::Dot), _) => GraphFormat::Dot,
                (None, Some(p)) => GraphFormat::from_path(p).ok_or_else(|| {
                    Error::UnknownFormat(
                        p.extension()
                            .map(|e| e.to_string_lossy().into_owned())
                            .unwrap_or_default(),
                    )
                })?,
                (None, None) => GraphFormat::Json,
            };
            let index = session.index()?;
            let tree = query::tree(&index, &q)?;
            emit(out, path.as_deref(), &format.render(&tree))?;
        }
        Command::Ingest {
            precompute,
            cache,
            mode,
            k,
            unit,
        } => {
            let template = ParamArgs {
                n: 4,
                mode,
                k,
                unit,
            };
            let sizes = precompute.as_deref().map(parse_sizes).transpose()?;
            let bundles = sizes
                .unwrap_or_default()
                .into_iter()
                .map(|n| template.resolve(n))
                .collect::<Result<Vec<_>, _>>()?;
            let profile = session.profile()?;
            let index = session.index()?;
            writeln!(
                out,
                "{}: {} documents, {} warnings",
                if index.name.is_empty() {
                    "corpus"
                } else {
                    &index.name
                },
                index.len(),
                index.warnings().len()
            )?;
            if !bundles.is_empty() {
                let dir = cache.unwrap_or_else(|| default_cache_dir(session.manifest.as_deref()));
                let pairs: Vec<_> = bundles.into_iter().map(|p| (p, profile.clone())).collect();
                let written = index.precompute(&dir, &pairs)?;
                writeln!(
                    out,
                    "wrote {} cache files under {}",
                    written.len(),
                    dir.display()
                )?;
            }
        }
        Command::Serve {
            port,
            host,
            assets,
            cache_capacity,
            cache,
        } => {
            let index = session.index()?;
            if let Some(dir) = cache {
                let load = index.load_cache(&dir)?;
                writeln!(
                    session.err,
                    "loaded {} cached shingle sets ({} stale)",
                    load.loaded, load.stale
                )?;
            }
            let addr = SocketAddr::new(host, port);
            writeln!(session.err, "listening on http://{addr}")?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(
                index,
                ServerConfig {
                    addr,
                    assets,
                    cache_capacity,
                },
            ))?;
        }
    }
    Ok(())
}

fn default_cache_dir(manifest: Option<&Path>) -> PathBuf {
    manifest
        .and_then(Path::parent)
        .unwrap_or(Path::new("."))
        .join("cache")
}
