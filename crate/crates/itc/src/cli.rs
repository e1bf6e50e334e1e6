use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use itc_core::cutting::{cut_k_longest, k_dcc_cut, supervised_cut};
use itc_core::dataset::Dataset;
use itc_core::document::{assignment_csv, parse_assignment_csv, TreeDocument};
use itc_core::metrics::{CategoricalRule, DistanceMatrix};
use itc_core::pipeline::{
    distances_for, evaluate, merge_by_label, permutation_experiment, run_prepared, CutStrategy, Prepared, RunConfig,
    Sigma, Supervision,
};
use itc_core::rootfind::{compute_tree_height, find_roots_doubling, merge_singletons, ClusterAssignment};
use itc_core::supervision::SupervisionSet;

use crate::server::{router, Session};

#[derive(Debug, Parser)]
#[command(name = "itc", version, about = "In-tree clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute potentials and the initial in-tree, write tree JSON.
    Build {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut undesired edges of a tree JSON.
    Cut {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Number of clusters for `k` and `kdcc`.
        #[arg(long)]
        k: Option<usize>,
        /// Supervised points as `index,label` rows.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find roots and write the assignment CSV.
    Cluster {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        merge_singletons: bool,
        #[arg(long)]
        merge_by_label: bool,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build, cut, cluster and (given truth labels) evaluate in one go.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, conflicts_with = "sample_labels")]
        labels: Option<PathBuf>,
        /// Draw this many supervised points from the truth labels.
        #[arg(long)]
        sample_labels: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        merge_singletons: bool,
        #[arg(long)]
        merge_by_label: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        out_tree: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score an assignment CSV against the dataset's label column.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun K-Cut on random row orders and report partition disagreement.
    Permute {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the interactive HTTP API for one dataset.
    Serve {
        #[command(flatten)]
        data: DataArgs,
        /// Listening port; the `ITC_PORT` environment variable takes precedence.
        #[arg(long, default_value_t = 8642)]
        port: u16,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Positive bandwidth, or `auto` for the mean pairwise distance.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub sigma: String,
    /// Binary cache for the distance matrix; read when present, written otherwise.
    #[arg(long)]
    pub cache_dist: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RuleArg::Mismatch)]
    pub categorical_rule: RuleArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    K,
    Supervised,
    Kdcc,
    Interactive,
    IntDcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Mismatch,
    Match,
}

impl From<RuleArg> for CategoricalRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Mismatch => CategoricalRule::Mismatch,
            RuleArg::Match => CategoricalRule::Match,
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = read_text(path)?;
    Dataset::from_csv_str(&text).with_context(|| format!("invalid dataset {}", path.display()))
}

fn load_tree(path: &Path) -> Result<TreeDocument> {
    TreeDocument::from_json(&read_text(path)?).with_context(|| format!("invalid tree {}", path.display()))
}

fn load_labels(path: &Path, n: usize) -> Result<SupervisionSet> {
    SupervisionSet::from_csv_str(&read_text(path)?, n).with_context(|| format!("invalid labels {}", path.display()))
}

fn distances(ds: &Dataset, data: &DataArgs) -> Result<DistanceMatrix> {
    if let Some(cache) = &data.cache_dist {
        if cache.exists() {
            let file = fs::File::open(cache).with_context(|| format!("cannot read {}", cache.display()))?;
            let d = DistanceMatrix::read_cache(std::io::BufReader::new(file))
                .with_context(|| format!("invalid distance cache {}", cache.display()))?;
            if d.len() != ds.len() {
                bail!(
                    "distance cache {} holds {} points, dataset {}",
                    cache.display(),
                    d.len(),
                    ds.len()
                );
            }
            return Ok(d);
        }
        let d = distances_for(ds, data.categorical_rule.into())?;
        let file = fs::File::create(cache).with_context(|| format!("cannot write {}", cache.display()))?;
        d.write_cache(std::io::BufWriter::new(file))
            .with_context(|| format!("cannot write {}", cache.display()))?;
        return Ok(d);
    }
    Ok(distances_for(ds, data.categorical_rule.into())?)
}

fn prepare(data: &DataArgs) -> Result<(Dataset, Prepared)> {
    let sigma: Sigma = data.sigma.parse()?;
    let ds = load_dataset(&data.input)?;
    let d = distances(&ds, data)?;
    Ok((ds, Prepared::new(d, sigma)?))
}

fn strategy(method: MethodArg, k: Option<usize>) -> Result<CutStrategy> {
    let need_k = || k.with_context(|| "this method needs --k");
    Ok(match method {
        MethodArg::K => CutStrategy::K { k_clusters: need_k()? },
        MethodArg::Kdcc => CutStrategy::KDcc { k_clusters: need_k()? },
        MethodArg::Supervised => {
            if k.is_some() {
                bail!("--k does not apply to supervised cutting");
            }
            CutStrategy::Supervised
        }
        MethodArg::Interactive | MethodArg::IntDcc => {
            bail!("interactive cutting runs in the browser session: start it with `itc serve --input <data.csv>`")
        }
    })
}

fn print_summary(height: usize, a: &ClusterAssignment) {
    println!("H = {height}");
    println!("S = {}", a.rounds_used());
    println!("clusters = {}", a.cluster_count());
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { data, out } => {
            let (ds, prepared) = prepare(&data)?;
            let doc = TreeDocument::new(&prepared.tree, &prepared.potentials, ds.coords_2d());
            write_text(&out, &doc.to_json())
        }
        Command::Cut {
            tree,
            method,
            k,
            labels,
            out,
        } => {
            let strategy = strategy(method, k)?;
            let doc = load_tree(&tree)?;
            let (mut t, pf) = doc
                .to_parts()
                .with_context(|| format!("invalid tree {}", tree.display()))?;
            if labels.is_some() && !matches!(strategy, CutStrategy::Supervised) {
                bail!("--labels only applies to supervised cutting");
            }
            match strategy {
                CutStrategy::K { k_clusters } => {
                    cut_k_longest(&mut t, k_clusters)?;
                }
                CutStrategy::KDcc { k_clusters } => {
                    k_dcc_cut(&mut t, &pf, k_clusters)?;
                }
                CutStrategy::Supervised => {
                    let path = labels.context("supervised cutting needs --labels")?;
                    let sup = load_labels(&path, t.len())?;
                    supervised_cut(&mut t, &sup)?;
                }
                _ => unreachable!("rejected by strategy()"),
            }
            write_text(&out, &TreeDocument::new(&t, &pf, doc.coords).to_json())
        }
        Command::Cluster {
            tree,
            merge_singletons: merge,
            merge_by_label: by_label,
            labels,
            out,
        } => {
            let (mut t, _) = load_tree(&tree)?
                .to_parts()
                .with_context(|| format!("invalid tree {}", tree.display()))?;
            let sup = labels.map(|p| load_labels(&p, t.len())).transpose()?;
            if by_label && sup.is_none() {
                bail!("--merge-by-label needs --labels");
            }
            let mut a = find_roots_doubling(&t)?;
            if merge {
                (t, a) = merge_singletons(&t, &a)?;
            }
            let height = compute_tree_height(&t)?;
            if let (true, Some(sup)) = (by_label, &sup) {
                a = merge_by_label(&a, sup)?;
            }
            print_summary(height, &a);
            write_text(&out, &assignment_csv(&a))
        }
        Command::Run {
            data,
            method,
            k,
            labels,
            sample_labels,
            seed,
            merge_singletons,
            merge_by_label,
            out,
            out_tree,
            report,
        } => {
            let cut = strategy(method, k)?;
            let (ds, prepared) = prepare(&data)?;
            let mut cfg = RunConfig::new(Sigma::Value(prepared.sigma()), cut)
                .with_seed(seed)
                .merging_singletons(merge_singletons)
                .merging_by_label(merge_by_label);
            cfg.categorical_rule = data.categorical_rule.into();
            if let Some(path) = labels {
                cfg = cfg.with_supervision(Supervision::Given(load_labels(&path, ds.len())?));
            } else if let Some(count) = sample_labels {
                cfg = cfg.with_supervision(Supervision::Sample(count));
            }
            let output = run_prepared(&ds, &prepared, &cfg)?;
            print_summary(output.height, &output.assignment);
            if let Some(r) = &output.report {
                println!("error_rate = {}", r.error_rate);
            }
            if let Some(path) = out_tree {
                write_text(
                    &path,
                    &TreeDocument::new(&output.tree, &output.potentials, ds.coords_2d()).to_json(),
                )?;
            }
            if let Some(path) = report {
                let r = output
                    .report
                    .as_ref()
                    .context("--report needs a label column in the input")?;
                write_text(&path, &serde_json::to_string_pretty(r)?)?;
            }
            write_text(&out, &assignment_csv(&output.assignment))
        }
        Command::Eval {
            input,
            assignment,
            labels,
            out,
        } => {
            let ds = load_dataset(&input)?;
            let truth = ds
                .truth_labels()
                .with_context(|| format!("{} has no label column", input.display()))?;
            let roots = parse_assignment_csv(&read_text(&assignment)?)
                .with_context(|| format!("invalid assignment {}", assignment.display()))?;
            if roots.len() != ds.len() {
                bail!("assignment covers {} points, dataset {}", roots.len(), ds.len());
            }
            let sup = labels.map(|p| load_labels(&p, ds.len())).transpose()?;
            let report = evaluate(&ClusterAssignment::from_root_map(roots, 0), truth, sup.as_ref());
            let json = serde_json::to_string_pretty(&report)?;
            match out {
                Some(path) => write_text(&path, &json),
                None => {
                    println!("{json}");
                    Ok(())
                }
            }
        }
        Command::Permute {
            data,
            k,
            trials,
            seed,
            out,
        } => {
            let sigma: Sigma = data.sigma.parse()?;
            let ds = load_dataset(&data.input)?;
            let mut cfg = RunConfig::new(sigma, CutStrategy::K { k_clusters: k }).with_seed(seed);
            cfg.categorical_rule = data.categorical_rule.into();
            let stats = permutation_experiment(&ds, &cfg, trials)?;
            println!("disagreement = {} +/- {}", stats.mean, stats.sd);
            match out {
                Some(path) => write_text(&path, &stats.to_csv()),
                None => {
                    print!("{}", stats.to_csv());
                    Ok(())
                }
            }
        }
        Command::Serve { data, port } => {
            let sigma: Sigma = data.sigma.parse()?;
            let ds = load_dataset(&data.input)?;
            let d = distances(&ds, &data)?;
            let port = match std::env::var("ITC_PORT") {
                Ok(v) => v
                    .parse()
                    .with_context(|| format!("ITC_PORT `{v}` is not a port number"))?,
                Err(_) => port,
            };
            let session = Session::new(d, sigma, ds.coords_2d())?;
            serve(session, port)
        }
    }
}

fn serve(session: Session, port: u16) -> Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
            .await
            .with_context(|| format!("cannot listen on port {port}"))?;
        println!("serving on http://127.0.0.1:{port}");
        axum::serve(listener, router(session)).await?;
        Ok(())
    })
}
