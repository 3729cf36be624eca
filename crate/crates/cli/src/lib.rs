//! Command-line front end: argument parsing, command execution and report
//! rendering. Every command builds one serializable report; the text and
//! JSON outputs are both rendered from it.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;
use wtdist_core::gen::{random_cycle, random_ytree};
use wtdist_core::{
    decompose_cycle_with_ops, decompose_merged, exact_distance, verify_transform, DistanceReport,
    Method, OracleError, Permutation, SearchBudget, Shape, Transposition, TreeMetric,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wtdist",
    version,
    about = "Weighted transposition distances on path and Y-tree costs"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a tree file and report its shape.
    ValidateTree { tree: PathBuf },
    /// Distance of a permutation from the identity, or between two.
    Dist {
        #[arg(short, long)]
        tree: PathBuf,
        /// One-line form such as "2 3 1 4" or cycle notation such as "(1 2 3)".
        #[arg(required_unless_present = "perm_file", conflicts_with = "perm_file")]
        perm: Option<String>,
        /// Second permutation; the distance between the two is reported.
        perm2: Option<String>,
        /// File with one permutation per line.
        #[arg(long)]
        perm_file: Option<PathBuf>,
    },
    /// List a low-cost decomposition with running products.
    Decompose {
        #[arg(short, long)]
        tree: PathBuf,
        perm: String,
    },
    /// Check a proposed decomposition, one "a b" pair per line.
    Verify {
        #[arg(short, long)]
        tree: PathBuf,
        perm: String,
        #[arg(long)]
        transform: PathBuf,
    },
    /// Exact distance by exhaustive search (small n only).
    Oracle {
        #[arg(short, long)]
        tree: PathBuf,
        perm: String,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 10_000_000)]
        max_states: usize,
    },
    /// Time single-cycle decompositions on a random Y-tree.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        tree_size: usize,
        /// Comma-separated cycle lengths.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10_000, 100_000, 1_000_000])]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Runs per length; the fastest is reported.
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u64,
        /// Emit CSV instead of a table.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(input(&path.display().to_string()))
}

fn load_tree(path: &Path) -> Result<TreeMetric, CliError> {
    TreeMetric::parse(&read(path)?).map_err(input(&path.display().to_string()))
}

fn parse_perm(text: &str, n: usize) -> Result<Permutation, CliError> {
    Permutation::parse(text, n).map_err(input(&format!("permutation {text:?}")))
}

/// A rendered command result plus the exit code it implies.
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub code: i32,
}

trait Report: Serialize {
    fn text(&self) -> String;
    fn code(&self) -> i32 {
        EXIT_OK
    }

    fn into_output(self) -> Output
    where
        Self: Sized,
    {
        Output {
            text: self.text(),
            json: serde_json::to_value(&self).expect("reports serialize"),
            code: self.code(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TreeReport {
    pub command: &'static str,
    pub shape: &'static str,
    pub center: Option<usize>,
    pub n: usize,
    pub total_weight: u64,
}

impl Report for TreeReport {
    fn text(&self) -> String {
        let shape = match self.center {
            Some(c) => format!("YTree center={c}"),
            None => "Path".to_string(),
        };
        format!(
            "{shape}\nn = {}\ntotal weight = {}\n",
            self.n, self.total_weight
        )
    }
}

fn shape_report(tree: &TreeMetric) -> TreeReport {
    let (shape, center) = match tree.shape() {
        Shape::Path => ("path", None),
        Shape::YTree { center } => ("ytree", Some(center)),
    };
    TreeReport {
        command: "validate-tree",
        shape,
        center,
        n: tree.n(),
        total_weight: tree.total_weight().get(),
    }
}

#[derive(Debug, Serialize)]
pub struct CycleRow {
    pub cycle: String,
    pub class: String,
    pub weight: u64,
}

#[derive(Debug, Serialize)]
pub struct DistEntry {
    pub permutation: String,
    /// Set when two permutations were given: the `r` with `reference * r = permutation`.
    pub reference: Option<String>,
    pub relative: String,
    pub distance: u64,
    pub lower_bound: u64,
    pub displacement: u64,
    pub exact: bool,
    pub guarantee: &'static str,
    pub method: &'static str,
    pub cycles: Vec<CycleRow>,
}

#[derive(Debug, Serialize)]
pub struct DistReport {
    pub command: &'static str,
    pub results: Vec<DistEntry>,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::PerCycle => "per_cycle",
        Method::Merged => "merged",
    }
}

fn dist_entry(tree: &TreeMetric, p: &Permutation, reference: Option<&Permutation>) -> DistEntry {
    let relative = match reference {
        Some(q) => q.inverse().compose(p).expect("sizes checked"),
        None => p.clone(),
    };
    let r: DistanceReport = decompose_merged(tree, &relative).expect("sizes checked");
    let exact = r.is_exact();
    DistEntry {
        permutation: p.cycle_notation(),
        reference: reference.map(Permutation::cycle_notation),
        relative: relative.cycle_notation(),
        distance: r.distance_upper.get(),
        lower_bound: r.lower_bound.get(),
        displacement: r.displacement.get(),
        exact,
        guarantee: if exact { "exact" } else { "<= 4/3 * optimal" },
        method: method_name(r.method),
        cycles: r
            .per_cycle
            .iter()
            .map(|c| CycleRow {
                cycle: c.cycle.to_string(),
                class: c.class.kind.to_string(),
                weight: c.weight.get(),
            })
            .collect(),
    }
}

impl Report for DistReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for (i, e) in self.results.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            match &e.reference {
                Some(q) => {
                    let _ = writeln!(s, "permutation {} vs {}", e.permutation, q);
                    let _ = writeln!(s, "relative {}", e.relative);
                }
                None => {
                    let _ = writeln!(s, "permutation {}", e.permutation);
                }
            }
            let _ = writeln!(s, "distance {} ({})", e.distance, e.guarantee);
            let _ = writeln!(s, "lower bound {}", e.lower_bound);
            let _ = writeln!(s, "displacement {}", e.displacement);
            let _ = writeln!(s, "method {}", e.method);
            for c in &e.cycles {
                let _ = writeln!(s, "  {:<24} {:<16} {}", c.cycle, c.class, c.weight);
            }
        }
        s
    }
}

#[derive(Debug, Serialize)]
pub struct Step {
    pub a: usize,
    pub b: usize,
    pub cost: u64,
    /// Product of this and all earlier transpositions.
    pub running_product: String,
}

fn steps(tree: &TreeMetric, taus: &[Transposition]) -> Vec<Step> {
    let mut running = Permutation::identity(tree.n());
    taus.iter()
        .map(|t| {
            running.swap_positions(t.a(), t.b());
            Step {
                a: t.a(),
                b: t.b(),
                cost: tree.dist(t.a(), t.b()),
                running_product: running.cycle_notation(),
            }
        })
        .collect()
}

fn steps_text(s: &mut String, rows: &[Step]) {
    for (i, st) in rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>4}  ({} {})  cost {:<6} product {}",
            i + 1,
            st.a,
            st.b,
            st.cost,
            st.running_product
        );
    }
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub command: &'static str,
    pub permutation: String,
    pub distance: u64,
    pub exact: bool,
    pub method: &'static str,
    pub transform: Vec<Step>,
}

impl Report for DecomposeReport {
    fn text(&self) -> String {
        let mut s = format!(
            "permutation {}\ntotal {} ({})\n",
            self.permutation,
            self.distance,
            if self.exact {
                "exact"
            } else {
                "<= 4/3 * optimal"
            }
        );
        steps_text(&mut s, &self.transform);
        s
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub permutation: String,
    pub product_matches: bool,
    pub total_weight: u64,
    pub displacement: u64,
    pub gap: i64,
    pub inefficiency_sum: u64,
    pub identity_holds: bool,
    pub inefficiencies: Vec<u64>,
}

impl Report for VerifyReport {
    fn text(&self) -> String {
        format!(
            "permutation {}\nproduct matches: {}\ntotal weight {}\ndisplacement {}\n\
             gap {} (weight - displacement/2)\ninefficiency sum {}\ngap = inefficiency sum / 2: {}\n",
            self.permutation,
            if self.product_matches { "yes" } else { "no" },
            self.total_weight,
            self.displacement,
            self.gap,
            self.inefficiency_sum,
            if self.identity_holds { "yes" } else { "no" },
        )
    }

    fn code(&self) -> i32 {
        if self.product_matches {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub command: &'static str,
    pub permutation: String,
    pub distance: u64,
    pub transform: Vec<Step>,
}

impl Report for OracleReport {
    fn text(&self) -> String {
        let mut s = format!(
            "permutation {}\nexact distance {}\n",
            self.permutation, self.distance
        );
        steps_text(&mut s, &self.transform);
        s
    }
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub length: usize,
    pub nanos: u64,
    pub ops: u64,
    pub ops_per_element: f64,
    /// Time relative to the previous row.
    pub ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub command: &'static str,
    pub tree_size: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    #[serde(skip)]
    pub csv: bool,
}

impl Report for BenchReport {
    fn text(&self) -> String {
        let mut s = String::new();
        if self.csv {
            s.push_str("length,nanos,ops,ops_per_element,ratio\n");
            for r in &self.rows {
                let ratio = r.ratio.map(|x| format!("{x:.3}")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{:.3},{}",
                    r.length, r.nanos, r.ops, r.ops_per_element, ratio
                );
            }
            return s;
        }
        let _ = writeln!(s, "tree size {} seed {}", self.tree_size, self.seed);
        let _ = writeln!(
            s,
            "{:>10} {:>12} {:>12} {:>8} {:>7}",
            "length", "seconds", "ops", "ops/len", "ratio"
        );
        for r in &self.rows {
            let ratio = r
                .ratio
                .map(|x| format!("{x:.2}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:>10} {:>12.6} {:>12} {:>8.2} {:>7}",
                r.length,
                r.nanos as f64 / 1e9,
                r.ops,
                r.ops_per_element,
                ratio
            );
        }
        s
    }
}

fn check_size(tree: &TreeMetric, p: &Permutation) -> Result<(), CliError> {
    if p.n() != tree.n() {
        return Err(CliError::Input(format!(
            "permutation has {} elements but the tree has {}",
            p.n(),
            tree.n()
        )));
    }
    Ok(())
}

fn read_transform(path: &Path, n: usize) -> Result<Vec<Transposition>, CliError> {
    let text = read(path)?;
    let mut taus = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Input(format!("{}:{}: {msg}", path.display(), idx + 1));
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected \"a b\", found {line:?}")));
        }
        let num = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| bad(format!("not an integer: {f:?}")))
        };
        let (a, b) = (num(fields[0])?, num(fields[1])?);
        if a == 0 || b == 0 || a > n || b > n {
            return Err(bad(format!("element outside [1, {n}]")));
        }
        taus.push(Transposition::new(a, b).map_err(|e| bad(e.to_string()))?);
    }
    Ok(taus)
}

pub fn execute(command: Command) -> Result<Output, CliError> {
    match command {
        Command::ValidateTree { tree } => Ok(shape_report(&load_tree(&tree)?).into_output()),
        Command::Dist {
            tree,
            perm,
            perm2,
            perm_file,
        } => {
            let tree = load_tree(&tree)?;
            let n = tree.n();
            let mut results = Vec::new();
            if let Some(file) = perm_file {
                for (idx, raw) in read(&file)?.lines().enumerate() {
                    let line = raw.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let p = parse_perm(line, n).map_err(|e| {
                        CliError::Input(format!("{}:{}: {e}", file.display(), idx + 1))
                    })?;
                    results.push(dist_entry(&tree, &p, None));
                }
            } else {
                let p = parse_perm(perm.as_deref().expect("required by clap"), n)?;
                let q = perm2.as_deref().map(|t| parse_perm(t, n)).transpose()?;
                results.push(dist_entry(&tree, &p, q.as_ref()));
            }
            Ok(DistReport {
                command: "dist",
                results,
            }
            .into_output())
        }
        Command::Decompose { tree, perm } => {
            let tree = load_tree(&tree)?;
            let p = parse_perm(&perm, tree.n())?;
            check_size(&tree, &p)?;
            let r = decompose_merged(&tree, &p).expect("sizes checked");
            Ok(DecomposeReport {
                command: "decompose",
                permutation: p.cycle_notation(),
                distance: r.distance_upper.get(),
                exact: r.is_exact(),
                method: method_name(r.method),
                transform: steps(&tree, r.transform.taus()),
            }
            .into_output())
        }
        Command::Verify {
            tree,
            perm,
            transform,
        } => {
            let tree = load_tree(&tree)?;
            let p = parse_perm(&perm, tree.n())?;
            let taus = read_transform(&transform, tree.n())?;
            let v = verify_transform(&tree, &p, &taus).map_err(input("verify"))?;
            Ok(VerifyReport {
                command: "verify",
                permutation: p.cycle_notation(),
                product_matches: v.product_matches,
                total_weight: v.total_weight.get(),
                displacement: v.displacement.get(),
                gap: v.gap,
                inefficiency_sum: v.inefficiency_sum.get(),
                identity_holds: v.identity_holds,
                inefficiencies: v.inefficiencies.iter().map(|w| w.get()).collect(),
            }
            .into_output())
        }
        Command::Oracle {
            tree,
            perm,
            max_n,
            max_states,
        } => {
            let tree = load_tree(&tree)?;
            let p = parse_perm(&perm, tree.n())?;
            let budget = SearchBudget {
                max_n,
                max_states,
                max_weight: None,
            };
            let (d, tf) = exact_distance(&tree, &p, &budget).map_err(|e| match e {
                OracleError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
                OracleError::SizeMismatch { .. } => CliError::Input(e.to_string()),
            })?;
            Ok(OracleReport {
                command: "oracle",
                permutation: p.cycle_notation(),
                distance: d.get(),
                transform: steps(&tree, tf.taus()),
            }
            .into_output())
        }
        Command::Bench {
            tree_size,
            lengths,
            seed,
            reps,
            max_weight,
            csv,
        } => {
            if tree_size < 4 {
                return Err(CliError::Input("tree size must be at least 4".into()));
            }
            if max_weight == 0 {
                return Err(CliError::Input("max weight must be positive".into()));
            }
            if let Some(&bad) = lengths.iter().find(|&&l| l < 2 || l > tree_size) {
                return Err(CliError::Input(format!(
                    "cycle length {bad} outside [2, {tree_size}]"
                )));
            }
            let mut rng = StdRng::seed_from_u64(seed);
            let tree = random_ytree(&mut rng, tree_size, max_weight);
            let mut rows: Vec<BenchRow> = Vec::new();
            for &len in &lengths {
                let cycle = random_cycle(&mut rng, tree_size, len);
                let mut best = u64::MAX;
                let mut ops = 0;
                for _ in 0..reps.max(1) {
                    let start = Instant::now();
                    let (tf, count) = decompose_cycle_with_ops(&tree, &cycle).expect("in range");
                    best = best.min(start.elapsed().as_nanos() as u64);
                    ops = count;
                    drop(tf);
                }
                let ratio = rows
                    .last()
                    .map(|prev| best as f64 / prev.nanos.max(1) as f64);
                rows.push(BenchRow {
                    length: len,
                    nanos: best,
                    ops,
                    ops_per_element: ops as f64 / len as f64,
                    ratio,
                });
            }
            Ok(BenchReport {
                command: "bench",
                tree_size,
                seed,
                rows,
                csv,
            }
            .into_output())
        }
    }
}

/// Parses `args`, runs the command and writes the result to `out`/`err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let format = cli.format;
    match execute(cli.command) {
        Ok(output) => {
            let _ = match format {
                Format::Text => write!(out, "{}", output.text),
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&output.json).expect("json")
                ),
            };
            output.code
        }
        Err(e) => {
            match format {
                Format::Text => {
                    let _ = writeln!(err, "error: {e}");
                }
                Format::Json => {
                    let body =
                        serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&body).expect("json")
                    );
                }
            }
            e.exit_code()
        }
    }
}
