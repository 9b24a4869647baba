use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hyperflip::connectivity::{connect_level2, flip_graph, overlap_search, DEFAULT_NODE_BUDGET};
use hyperflip::{
    apply_flip, build_level2, coherent_subdivision, collapse_level2, enumerate_flips, gkz, is_coherent, k_fold_sums,
    CoherentOutcome, FlipType, HeightFunction,
};

use crate::error::{CliError, EXIT_INVALID};
use crate::format::{
    gkz_json, read_json, read_points, read_tri, to_json, triangle_json, FlipJson, FlipsFile, GraphFile, HeightsFile,
    NonTriangularFile, OverlapFile, PointsFile, SumsFile, TriFile,
};

#[derive(Parser, Debug)]
#[command(name = "hyperflip", version, about = "Level-k hypertriangulations of planar point sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct PointsArg {
    /// Points file: {"points": [["x", "y"], ...]}
    #[arg(long)]
    pub points: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the k-fold sums A^(k) with their labels.
    Sums {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a hypertriangulation file; exit 0 iff valid.
    Validate {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        tri: PathBuf,
    },
    /// Project the lower hull of lifted k-fold sums.
    Coherent {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
        /// Heights file: {"heights": ["h1", ...]}
        #[arg(long, conflicts_with = "squared_norms", required_unless_present = "squared_norms")]
        heights: Option<PathBuf>,
        /// Lift by |a_i|^2, giving the order-k Delaunay hypertriangulation.
        #[arg(long)]
        squared_norms: bool,
        /// Include the GKZ vector in the output.
        #[arg(long)]
        gkz: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List applicable flips, or apply one.
    Flips {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        tri: PathBuf,
        /// Index into the listed flips.
        #[arg(long)]
        apply: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Move between levels 1 and 2 through the aging map.
    Age {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        tri: PathBuf,
        #[arg(long, conflicts_with = "down", required_unless_present = "down")]
        up: bool,
        #[arg(long)]
        down: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate all hypertriangulations at level k.
    Enumerate {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
        /// Write the flip graph as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Keep only edges of these types, e.g. `I,III`.
        #[arg(long, value_delimiter = ',')]
        only_types: Option<Vec<FlipType>>,
        /// Keep only coherent hypertriangulations as nodes.
        #[arg(long)]
        coherent_only: bool,
    },
    /// Flip path between two level-2 hypertriangulations.
    Connect {
        #[command(flatten)]
        points: PointsArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search random configurations for overlapping aged white triangles.
    OverlapSearch {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Idle session lifetime in seconds.
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
    },
}

/// Node budget for enumeration, overridable through `HYPERFLIP_BUDGET`.
pub fn budget() -> Result<usize, CliError> {
    match std::env::var("HYPERFLIP_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::invalid(format!("HYPERFLIP_BUDGET={v} is not a count"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

/// Text sinks for one invocation, so the command set can run in-process.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, text: &str, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::invalid(format!("cannot write {}: {e}", p.display()))),
            None => self.out.write_all(text.as_bytes()).map_err(|e| CliError::invalid(e.to_string())),
        }
    }

    fn line(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }
}

fn require_level(base: &hyperflip::PointConfig, k: usize) -> Result<(), CliError> {
    k_fold_sums(base, k)?.require_strongly_generic()?;
    Ok(())
}

pub fn execute(cmd: Command, io: &mut Io<'_>) -> Result<u8, CliError> {
    match cmd {
        Command::Sums { points, k, out } => {
            let base = read_points(&points.points)?;
            let cfg = k_fold_sums(&base, k)?;
            io.emit(&to_json(&SumsFile::from_config(&cfg)), out.as_deref())?;
        }
        Command::Validate { points, k, tri } => {
            let base = read_points(&points.points)?;
            require_level(&base, k)?;
            let file: TriFile = read_json(&tri)?;
            if file.k != k {
                return Err(CliError::invalid(format!("file is at level {}, expected {k}", file.k)));
            }
            match file.to_tri(&base) {
                Ok(_) => io.line("OK"),
                Err(e) => {
                    io.line(&e.message);
                    return Ok(EXIT_INVALID);
                }
            }
        }
        Command::Coherent { points, k, heights, squared_norms: _, gkz: with_gkz, out } => {
            let base = read_points(&points.points)?;
            let h = match heights {
                Some(p) => read_json::<HeightsFile>(&p)?.to_heights()?,
                None => HeightFunction::squared_norms(&base),
            };
            let text = match coherent_subdivision(&base, k, &h)? {
                CoherentOutcome::Triangulated(t) => {
                    let mut file = TriFile::from_tri(&t);
                    if with_gkz {
                        file.gkz = Some(gkz_json(&gkz(&t)?));
                    }
                    to_json(&file)
                }
                CoherentOutcome::NonTriangular(r) => to_json(&NonTriangularFile::from_report(&r)),
            };
            io.emit(&text, out.as_deref())?;
        }
        Command::Flips { points, k, tri, apply, out } => {
            let base = read_points(&points.points)?;
            let t = read_tri(&tri, &base)?;
            if t.k() != k {
                return Err(CliError::invalid(format!("file is at level {}, expected {k}", t.k())));
            }
            let flips = enumerate_flips(&t)?;
            match apply {
                None => {
                    let file = FlipsFile { flips: flips.iter().map(FlipJson::from_flip).collect() };
                    io.emit(&to_json(&file), out.as_deref())?;
                }
                Some(i) => {
                    let f = flips.get(i).ok_or_else(|| {
                        CliError::invalid(format!("flip index {i} out of range ({} flips)", flips.len()))
                    })?;
                    let next = apply_flip(&t, f)?;
                    io.emit(&to_json(&TriFile::from_tri(&next)), out.as_deref())?;
                }
            }
        }
        Command::Age { points, tri, up, down: _, out } => {
            let base = read_points(&points.points)?;
            let t = read_tri(&tri, &base)?;
            let next = match (up, t.k()) {
                (true, 1) => build_level2(&t)?,
                (false, 2) => collapse_level2(&t)?,
                (true, k) => return Err(CliError::invalid(format!("--up needs level 1, file is at level {k}"))),
                (false, k) => return Err(CliError::invalid(format!("--down needs level 2, file is at level {k}"))),
            };
            io.emit(&to_json(&TriFile::from_tri(&next)), out.as_deref())?;
        }
        Command::Enumerate { points, k, graph, only_types, coherent_only } => {
            let base = read_points(&points.points)?;
            let g = flip_graph(&base, k, budget()?)?;
            let types = only_types.unwrap_or_else(|| FlipType::ALL.to_vec());
            let keep: Vec<bool> = if coherent_only {
                g.nodes.iter().map(|t| is_coherent(t).map(|c| c.is_coherent())).collect::<Result<_, _>>()?
            } else {
                vec![true; g.len()]
            };
            let mut index = vec![usize::MAX; g.len()];
            let mut nodes = Vec::new();
            for (i, t) in g.nodes.iter().enumerate().filter(|(i, _)| keep[*i]) {
                index[i] = nodes.len();
                nodes.push(t.canonical_key());
            }
            let edges: Vec<(usize, usize, String)> = g
                .edges
                .iter()
                .filter(|e| keep[e.0] && keep[e.1] && types.contains(&e.2))
                .map(|e| (index[e.0], index[e.1], e.2.to_string()))
                .collect();
            let components = g.components_filtered(&types, &keep).len();
            io.line(&summary(nodes.len(), &edges));
            io.line(&format!("{components} connected component{}", if components == 1 { "" } else { "s" }));
            if let Some(path) = graph {
                io.emit(&to_json(&GraphFile { nodes, edges }), Some(&path))?;
            }
        }
        Command::Connect { points, k, from, to, out } => {
            if k != 2 {
                return Err(CliError::invalid("connect works at level 2"));
            }
            let base = read_points(&points.points)?;
            let (a, b) = (read_tri(&from, &base)?, read_tri(&to, &base)?);
            let path = connect_level2(&a, &b)?;
            let file = FlipsFile { flips: path.iter().map(FlipJson::from_flip).collect() };
            io.emit(&to_json(&file), out.as_deref())?;
            let _ = writeln!(io.err, "{} flips", path.len());
        }
        Command::OverlapSearch { n, trials, seed, out } => match overlap_search(n, trials, seed, budget()?)? {
            Some(w) => {
                let file = OverlapFile {
                    trial: w.trial,
                    points: PointsFile::from_config(&w.config).points,
                    hypertriangulation: TriFile::from_tri(&w.hypertriangulation),
                    overlaps: w.pairs.iter().map(|(a, b)| [triangle_json(a), triangle_json(b)]).collect(),
                };
                io.emit(&to_json(&file), out.as_deref())?;
            }
            None => io.line(&format!("no overlap in {trials} trials")),
        },
        Command::Serve { port, ttl } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::invalid(e.to_string()))?;
            rt.block_on(crate::server::serve(port, std::time::Duration::from_secs(ttl)))
                .map_err(|e| CliError::invalid(e.to_string()))?;
        }
    }
    Ok(0)
}

fn summary(nodes: usize, edges: &[(usize, usize, String)]) -> String {
    let plural = |n: usize, word: &str| if n == 1 { format!("{n} {word}") } else { format!("{n} {word}s") };
    let mut kinds: Vec<FlipType> = edges.iter().map(|e| e.2.parse().expect("flip type")).collect();
    kinds.sort();
    kinds.dedup();
    let mut s = format!("{}, {}", plural(nodes, "hypertriangulation"), plural(edges.len(), "edge"));
    if !kinds.is_empty() {
        let names: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
        s.push_str(&format!(" ({})", names.join(",")));
    }
    s
}

/// Parses arguments and runs one command, returning the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = write!(io.err, "{e}");
            return code;
        }
    };
    match execute(cli.command, io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            e.code
        }
    }
}
