//! `wreath-stats`: exact distributions and moments of statistics on
//! conjugacy classes of colored permutation groups, from the command line.
//!
//! Output is an envelope (command, parameters, format version, payload) in
//! JSON, or the payload rows as CSV; identical inputs produce byte-identical
//! output. Exit codes: 0 success, 2 precondition violation, 3 budget
//! exceeded, 4 parse error.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use wreath_stats::arith::{group_order, rational_to_string};
use wreath_stats::classes::{enumerate_group, enumerate_r_partitions, RPartition};
use wreath_stats::genfunc::{
    class_descent_poly, clt_report, descent_count, group_descent_poly, poly_moments, CltSource,
};
use wreath_stats::moments::{
    brute_distribution, brute_moment, closed_form_mean, kth_moment_no_short_cycles, oie_polynomial,
    Method,
};
use wreath_stats::statistics::{in_degree_span, Builtin, DegreeOutcome, Pcp, Statistic};
use wreath_stats::{Error, ExactPolynomial};

const FORMAT_VERSION: u32 = 1;
const ENV_BUDGET: &str = "WREATH_STATS_BUDGET";

#[derive(Parser)]
#[command(
    name = "wreath-stats",
    about = "Exact statistics on conjugacy classes of colored permutation groups",
    version
)]
struct Cli {
    /// Output format for the payload.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for any sampled quantities (reserved; current commands are exact).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Enumeration budget in element visits (env: WREATH_STATS_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u128>,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Formula,
    Closed,
    Genfunc,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// List conjugacy-class labels with centralizer orders and class sizes.
    Classes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: u32,
        /// Keep only classes whose cycles all exceed this length.
        #[arg(long = "min-cycle")]
        min_cycle: Option<usize>,
    },
    /// Exact distribution of a statistic over a class or the whole group.
    Dist {
        #[command(flatten)]
        stat: StatArgs,
        /// Class label, e.g. "3;5" for ((3),(5)).
        #[arg(long, conflicts_with = "group")]
        class: Option<String>,
        /// Use the whole group S_{n,r} instead of a class.
        #[arg(long, requires = "n")]
        group: bool,
        /// Degree n (with --group).
        #[arg(long)]
        n: Option<usize>,
        /// Number of colors (with --group; default 2).
        #[arg(long)]
        r: Option<u32>,
    },
    /// Exact k-th moment of a statistic on a class.
    Moment {
        #[command(flatten)]
        stat: StatArgs,
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Descent generating polynomial B_n(t) or B_{λ,μ}(t).
    Genfunc {
        #[arg(long, conflicts_with = "class")]
        n: Option<usize>,
        #[arg(long)]
        class: Option<String>,
    },
    /// Number of class elements with d−1 descents.
    DescentCount {
        #[arg(long)]
        class: String,
        #[arg(long)]
        d: usize,
    },
    /// Exact mean/variance and standardized moments of des_B.
    Clt {
        /// Comma-separated group degrees, e.g. 10,20,40.
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<usize>,
        /// Space-separated class labels, e.g. "9; 3;5".
        #[arg(long = "class-list")]
        class_list: Option<String>,
    },
    /// Exact span test: does the statistic have degree at most m?
    Degree {
        #[command(flatten)]
        stat: StatArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Moment polynomial in n of an order-invariant extension.
    Oie {
        /// JSON file: {"n": n0, "r": r, "pcps": [[[i,j,c], ...], ...]}.
        #[arg(long)]
        file: std::path::PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
}

#[derive(Args)]
struct StatArgs {
    /// Built-in statistic: des_b, inv, neg, inv_b.
    #[arg(long, conflicts_with = "stat_file")]
    stat: Option<String>,
    /// JSON file with a custom decomposed statistic.
    #[arg(long = "stat-file")]
    stat_file: Option<std::path::PathBuf>,
}

impl StatArgs {
    /// Resolve to a (display name, statistic) for the group `S_{n,r}`.
    fn resolve(&self, n: usize, r: u32) -> Result<(String, Statistic), Error> {
        if let Some(path) = &self.stat_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let stat = Statistic::from_json(&text)?;
            if stat.n() != n || stat.r() != r {
                return Err(Error::ParamMismatch {
                    expected_n: n,
                    expected_r: r,
                    got_n: stat.n(),
                    got_r: stat.r(),
                });
            }
            return Ok((path.display().to_string(), stat));
        }
        let name = self
            .stat
            .as_deref()
            .ok_or_else(|| Error::Parse("one of --stat or --stat-file is required".into()))?;
        let builtin = Builtin::from_name(name).map_err(|e| Error::Parse(e.to_string()))?;
        if r != 2 {
            return Err(Error::Invalid(format!(
                "built-in statistic {name} lives on B_n (r = 2), got r = {r}"
            )));
        }
        Ok((builtin.name().to_string(), Statistic::builtin(builtin, n)))
    }

    fn builtin(&self) -> Option<Builtin> {
        self.stat.as_deref().and_then(|s| Builtin::from_name(s).ok())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) => 4,
                Error::BudgetExceeded { .. } | Error::TermBudget { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

// WREATH_STATS_BUDGET overrides --budget, which overrides the default.
fn budget(cli: &Cli) -> u128 {
    std::env::var(ENV_BUDGET)
        .ok()
        .and_then(|v| v.parse().ok())
        .or(cli.budget)
        .unwrap_or(wreath_stats::DEFAULT_BUDGET)
}

/// One table of output: column names plus rows of JSON scalars.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn emit(cli: &Cli, command: &str, parameters: BTreeMap<String, String>, table: Table) {
    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Envelope<'a> {
                command: &'a str,
                parameters: &'a BTreeMap<String, String>,
                format_version: u32,
                payload: Vec<serde_json::Map<String, Value>>,
            }
            let payload = table
                .rows
                .iter()
                .map(|row| {
                    table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect()
                })
                .collect();
            let envelope = Envelope {
                command,
                parameters: &parameters,
                format_version: FORMAT_VERSION,
                payload,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&envelope).expect("serializable")
            );
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(&table.columns).expect("write header");
            for row in &table.rows {
                let record: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    })
                    .collect();
                writer.write_record(&record).expect("write row");
            }
            let bytes = writer.into_inner().expect("flush");
            print!("{}", String::from_utf8(bytes).expect("utf8"));
        }
    }
}

fn rational_value(x: &BigRational) -> Value {
    Value::String(rational_to_string(x))
}

fn poly_values(p: &ExactPolynomial) -> Value {
    Value::Array(p.coeff_strings().into_iter().map(Value::String).collect())
}

fn poly_table(p: &ExactPolynomial) -> Table {
    let mut table = Table::new(vec!["exponent", "coefficient"]);
    for (e, c) in p.coeff_strings().into_iter().enumerate() {
        table.push(vec![json!(e), Value::String(c)]);
    }
    table
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Classes { n, r, min_cycle } => {
            if *r < 1 {
                return Err(Error::Parse("r must be positive".into()));
            }
            let mut table = Table::new(vec![
                "label",
                "centralizer_order",
                "class_size",
                "min_cycle_length",
            ]);
            for label in enumerate_r_partitions(*n, *r) {
                if let Some(m) = min_cycle {
                    if !label.has_no_cycles_up_to(*m) {
                        continue;
                    }
                }
                table.push(vec![
                    json!(label.to_string()),
                    json!(label.centralizer_order().to_string()),
                    json!(label.class_size().to_string()),
                    label.min_cycle_length().map_or(Value::Null, |l| json!(l)),
                ]);
            }
            let mut params = BTreeMap::from([
                ("n".to_string(), n.to_string()),
                ("r".to_string(), r.to_string()),
            ]);
            if let Some(m) = min_cycle {
                params.insert("min_cycle".into(), m.to_string());
            }
            emit(cli, "classes", params, table);
            Ok(())
        }

        Command::Dist {
            stat,
            class,
            group,
            n,
            r,
        } => {
            let mut params = BTreeMap::new();
            let dist = if *group {
                let n = n.ok_or_else(|| Error::Parse("--group requires --n".into()))?;
                let r = r.unwrap_or(2);
                if r < 1 {
                    return Err(Error::Parse("r must be positive".into()));
                }
                let group_name = if r == 2 {
                    format!("B_{n}")
                } else {
                    format!("S_({n},{r})")
                };
                params.insert("group".into(), group_name);
                let (name, x) = stat.resolve(n, r)?;
                params.insert("stat".into(), name);
                let b = budget(cli);
                if group_order(n, r) > num_bigint::BigInt::from(b) {
                    return Err(Error::BudgetExceeded {
                        work: u128::MAX,
                        budget: b,
                    });
                }
                let mut dist: BTreeMap<BigRational, num_bigint::BigInt> = BTreeMap::new();
                for p in enumerate_group(n, r) {
                    *dist
                        .entry(x.evaluate(&p)?)
                        .or_insert_with(|| num_bigint::BigInt::from(0)) += 1;
                }
                dist
            } else {
                let label_text = class
                    .as_deref()
                    .ok_or_else(|| Error::Parse("need --class or --group".into()))?;
                let label = RPartition::parse(label_text)?;
                params.insert("class".into(), label.to_string());
                let (name, x) = stat.resolve(label.n(), label.r())?;
                params.insert("stat".into(), name);
                brute_distribution(&x, &label, budget(cli))?
            };
            let mut table = Table::new(vec!["value", "count"]);
            for (value, count) in &dist {
                table.push(vec![rational_value(value), json!(count.to_string())]);
            }
            emit(cli, "dist", params, table);
            Ok(())
        }

        Command::Moment {
            stat,
            class,
            k,
            method,
        } => {
            let label = RPartition::parse(class)?;
            let result = compute_moment(cli, stat, &label, *k, *method)?;
            let (name, _) = stat.resolve(label.n(), label.r())?;
            let mut table = Table::new(vec!["stat", "class", "k", "method", "value"]);
            table.push(vec![
                json!(name),
                json!(label.to_string()),
                json!(k),
                json!(result.method.as_str()),
                rational_value(&result.value),
            ]);
            let params = BTreeMap::from([
                ("stat".to_string(), name),
                ("class".to_string(), label.to_string()),
                ("k".to_string(), k.to_string()),
            ]);
            emit(cli, "moment", params, table);
            Ok(())
        }

        Command::Genfunc { n, class } => {
            let (params, poly, source) = match (n, class) {
                (Some(n), None) => (
                    BTreeMap::from([("n".to_string(), n.to_string())]),
                    group_descent_poly(*n),
                    format!("B_{n}"),
                ),
                (None, Some(text)) => {
                    let label = RPartition::parse(text)?;
                    (
                        BTreeMap::from([("class".to_string(), label.to_string())]),
                        class_descent_poly(&label)?,
                        format!("class {label}"),
                    )
                }
                _ => return Err(Error::Parse("need exactly one of --n or --class".into())),
            };
            match cli.format {
                Format::Json => {
                    let mut table = Table::new(vec!["source", "coefficients"]);
                    table.push(vec![json!(source), poly_values(&poly)]);
                    emit(cli, "genfunc", params, table);
                }
                Format::Csv => emit(cli, "genfunc", params, poly_table(&poly)),
            }
            Ok(())
        }

        Command::DescentCount { class, d } => {
            let label = RPartition::parse(class)?;
            let count = descent_count(&label, *d)?;
            let mut table = Table::new(vec!["class", "d", "count"]);
            table.push(vec![
                json!(label.to_string()),
                json!(d),
                json!(count.to_string()),
            ]);
            let params = BTreeMap::from([
                ("class".to_string(), label.to_string()),
                ("d".to_string(), d.to_string()),
            ]);
            emit(cli, "descent-count", params, table);
            Ok(())
        }

        Command::Clt { n_list, class_list } => {
            let mut sources: Vec<CltSource> = n_list
                .iter()
                .map(|&n| CltSource::WholeGroup { n })
                .collect();
            if let Some(text) = class_list {
                for token in text.split_whitespace() {
                    sources.push(CltSource::Class {
                        label: RPartition::parse(token)?,
                    });
                }
            }
            if sources.is_empty() {
                return Err(Error::Parse("need --n-list and/or --class-list".into()));
            }
            let mut table = Table::new(vec![
                "source",
                "n",
                "mean",
                "variance",
                "skewness",
                "excess_kurtosis",
            ]);
            for source in &sources {
                let rep = clt_report(source)?;
                table.push(vec![
                    json!(rep.source.to_string()),
                    json!(rep.n),
                    rational_value(&rep.mean),
                    rational_value(&rep.variance),
                    json!(rep.skewness),
                    json!(rep.excess_kurtosis),
                ]);
            }
            let params = BTreeMap::from([(
                "sources".to_string(),
                sources
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" | "),
            )]);
            emit(cli, "clt", params, table);
            Ok(())
        }

        Command::Degree { stat, n, m } => {
            let (name, x) = stat.resolve(*n, 2)?;
            let outcome = in_degree_span(&x, *m, budget(cli))?;
            let certificate = match &outcome {
                DegreeOutcome::InSpan { coefficients } => json!({
                    "coefficients": coefficients
                        .iter()
                        .map(|(pcp, c)| json!({
                            "constraints": pcp.constraints(),
                            "coeff": rational_to_string(c),
                        }))
                        .collect::<Vec<_>>()
                }),
                DegreeOutcome::NotInSpan { witness } => json!({
                    "witness": witness
                        .iter()
                        .map(rational_to_string)
                        .collect::<Vec<_>>()
                }),
            };
            let mut table = Table::new(vec!["stat", "n", "m", "in_span", "certificate"]);
            table.push(vec![
                json!(name),
                json!(n),
                json!(m),
                json!(outcome.is_in_span()),
                certificate,
            ]);
            let params = BTreeMap::from([
                ("stat".to_string(), name),
                ("n".to_string(), n.to_string()),
                ("m".to_string(), m.to_string()),
            ]);
            emit(cli, "degree", params, table);
            Ok(())
        }

        Command::Oie { file, k } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", file.display())))?;
            let set = parse_pcp_set(&text)?;
            let poly = oie_polynomial(&set, *k)?;
            let params = BTreeMap::from([
                ("file".to_string(), file.display().to_string()),
                ("k".to_string(), k.to_string()),
            ]);
            match cli.format {
                Format::Json => {
                    let mut table = Table::new(vec!["k", "coefficients"]);
                    table.push(vec![json!(k), poly_values(&poly)]);
                    emit(cli, "oie", params, table);
                }
                Format::Csv => emit(cli, "oie", params, poly_table(&poly)),
            }
            Ok(())
        }
    }
}

fn compute_moment(
    cli: &Cli,
    stat: &StatArgs,
    label: &RPartition,
    k: u32,
    method: MethodArg,
) -> Result<wreath_stats::MomentResult, Error> {
    let (_, x) = stat.resolve(label.n(), label.r())?;
    let formula_ready = label.has_no_cycles_up_to(x.degree_bound() * k as usize)
        && x.degree_bound() * (k as usize) < label.n().max(1);
    match method {
        MethodArg::Brute => brute_moment(&x, label, k, budget(cli)),
        MethodArg::Formula => {
            if !label.has_no_cycles_up_to(x.degree_bound() * k as usize) {
                return Err(Error::ShortCycles {
                    label: label.to_string(),
                    bound: x.degree_bound() * k as usize,
                });
            }
            Ok(wreath_stats::MomentResult {
                value: kth_moment_no_short_cycles(&x, k)?,
                method: Method::Formula,
                label: label.clone(),
                k,
            })
        }
        MethodArg::Closed => {
            if k != 1 {
                return Err(Error::Invalid("closed forms cover k = 1 only".into()));
            }
            let builtin = stat
                .builtin()
                .ok_or_else(|| Error::Invalid("closed forms need a built-in statistic".into()))?;
            closed_form_mean(builtin, label)
        }
        MethodArg::Genfunc => {
            if stat.builtin() != Some(Builtin::DesB) {
                return Err(Error::Invalid(
                    "the generating-function route computes des_b moments".into(),
                ));
            }
            Ok(wreath_stats::MomentResult {
                value: poly_moments(&class_descent_poly(label)?, k)?,
                method: Method::GenFunc,
                label: label.clone(),
                k,
            })
        }
        MethodArg::Auto => {
            if k == 1 && stat.builtin().is_some() && label.r() == 2 && label.n() >= 1 {
                closed_form_mean(stat.builtin().expect("checked"), label)
            } else if formula_ready {
                Ok(wreath_stats::MomentResult {
                    value: kth_moment_no_short_cycles(&x, k)?,
                    method: Method::Formula,
                    label: label.clone(),
                    k,
                })
            } else {
                brute_moment(&x, label, k, budget(cli))
            }
        }
    }
}

/// Parse the OIE input file: `{"n": n0, "r": r, "pcps": [[[i,j,c]...], ...]}`
/// with `[i, ±j]` shorthand allowed when r = 2.
fn parse_pcp_set(text: &str) -> Result<std::collections::BTreeSet<Pcp>, Error> {
    #[derive(serde::Deserialize)]
    struct FileDto {
        n: usize,
        r: u32,
        pcps: Vec<Vec<ConstraintDto>>,
    }
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum ConstraintDto {
        Triple(usize, usize, u32),
        Signed(usize, i64),
    }
    let dto: FileDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut set = std::collections::BTreeSet::new();
    for raw in dto.pcps {
        let mut triples = Vec::with_capacity(raw.len());
        for c in raw {
            triples.push(match c {
                ConstraintDto::Triple(i, j, col) => (i, j, col),
                ConstraintDto::Signed(i, sj) => {
                    if dto.r != 2 {
                        return Err(Error::Parse("signed shorthand needs r = 2".into()));
                    }
                    if sj == 0 {
                        return Err(Error::Parse("signed target 0".into()));
                    }
                    (i, sj.unsigned_abs() as usize, u32::from(sj < 0))
                }
            });
        }
        set.insert(Pcp::new(dto.n, dto.r, triples).map_err(|e| Error::Parse(e.to_string()))?);
    }
    Ok(set)
}
