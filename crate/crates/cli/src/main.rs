use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use moonchain::chains::longest_chain;
use moonchain::distribution::joint_symmetry_check;
use moonchain::io::{emit, emit_filling, from_json, parse_collection, to_json, Document};
use moonchain::scenarios::{reproduce, SCENARIOS};
use moonchain::verify::FillingClass;
use moonchain::{
    distribution, f_map, make_swap_context, phi, psi, sweep, verify, Direction, DistributionKind, FillConstraint,
    Filling, Polyomino, Property, Report, SweepConfig, VerifyParams,
};

/// Chains, row-swap bijections and exhaustive checks for fillings of polyominoes.
#[derive(Debug, Parser)]
#[command(name = "moonchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the class, row lengths and exceptional rows of each shape in FILE.
    Classify { file: PathBuf },
    /// Print ne, se, row and column sums and witness chains of each filling in FILE.
    Stat { file: PathBuf },
    /// Apply a row-swap map to the filling in FILE.
    Apply {
        #[arg(value_enum)]
        map: MapKind,
        file: PathBuf,
        /// Swap rows i and i+1.
        #[arg(long)]
        swap: usize,
        /// Write the result here; `.json` selects the structured format.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Which document of a multi-document FILE to use, counting from 1.
        #[arg(long)]
        doc: Option<usize>,
    },
    /// Print the ne (or joint ne, se) distribution over a class of fillings.
    Dist {
        file: PathBuf,
        #[command(flatten)]
        class: DistClass,
        /// Bivariate (ne, se) distribution plus a symmetry check.
        #[arg(long)]
        joint: bool,
        /// Which document of a multi-document FILE to use, counting from 1.
        #[arg(long)]
        doc: Option<usize>,
    },
    /// Check one property on the shape in FILE.
    Verify {
        property: Property,
        file: PathBuf,
        #[arg(long)]
        swap: Option<usize>,
        /// Check every filling with these column sums.
        #[arg(long, value_delimiter = ',', conflicts_with = "all")]
        col_sums: Option<Vec<usize>>,
        /// Check every filling of the shape, ignoring any filling in FILE.
        #[arg(long)]
        all: bool,
        /// Coupling lemma only: exchange segments without the row-sum restriction.
        #[arg(long)]
        relaxed: bool,
        /// Which document of a multi-document FILE to use, counting from 1.
        #[arg(long)]
        doc: Option<usize>,
    },
    /// Check properties on every row-comparable shape in a bounding box.
    Sweep {
        #[arg(long)]
        max_rows: usize,
        #[arg(long)]
        max_cols: usize,
        #[arg(long)]
        max_ones: Option<usize>,
        /// Comma-separated property names, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        props: Vec<String>,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Run a named reproduction scenario.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SCENARIOS))]
        scenario: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapKind {
    F,
    Phi,
    Psi,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
struct DistClass {
    /// Fillings with exactly n ones.
    #[arg(long, conflicts_with_all = ["col_sums", "restricted"])]
    ones: Option<usize>,
    #[arg(long, value_delimiter = ',', conflicts_with = "restricted")]
    col_sums: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', requires = "col_sums")]
    row_sums: Option<Vec<usize>>,
    /// Every row and column sum equal to one.
    #[arg(long)]
    restricted: bool,
}

impl DistClass {
    fn constraint(&self) -> FillConstraint {
        if let Some(n) = self.ones {
            return FillConstraint::TotalOnes(n);
        }
        match (&self.col_sums, &self.row_sums) {
            (Some(cols), Some(rows)) => FillConstraint::RowColSums {
                rows: rows.clone(),
                cols: cols.clone(),
            },
            (Some(cols), None) => FillConstraint::ColSums(cols.clone()),
            _ => FillConstraint::Restricted,
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let docs = if text.trim_start().starts_with('{') {
        vec![from_json(&text)?]
    } else {
        parse_collection(&text)?
    };
    if docs.is_empty() {
        bail!("{} holds no shape", path.display());
    }
    Ok(docs)
}

fn read_document(path: &Path, doc: Option<usize>) -> Result<Document> {
    let mut docs = read_documents(path)?;
    let n = docs.len();
    match doc {
        None if n > 1 => bail!("{} holds {n} documents; pick one with --doc", path.display()),
        None => Ok(docs.remove(0)),
        Some(k) if (1..=n).contains(&k) => Ok(docs.swap_remove(k - 1)),
        Some(k) => bail!("--doc {k} out of range: {} holds {n} documents", path.display()),
    }
}

fn read_filling(path: &Path, doc: Option<usize>) -> Result<Filling> {
    read_document(path, doc)?
        .filling
        .ok_or_else(|| anyhow!("{} holds a shape without a filling", path.display()))
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn print_witnesses(witnesses: &[Filling]) {
    for w in witnesses {
        println!();
        print!("{}", emit_filling(w));
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Classify { file } => {
            for (n, doc) in read_documents(&file)?.iter().enumerate() {
                if n > 0 {
                    println!();
                }
                classify(&doc.shape);
            }
        }
        Command::Stat { file } => {
            for (n, doc) in read_documents(&file)?.iter().enumerate() {
                if n > 0 {
                    println!();
                }
                let f = doc
                    .filling
                    .as_ref()
                    .ok_or_else(|| anyhow!("document {} holds no filling", n + 1))?;
                stat(f);
            }
        }
        Command::Apply {
            map,
            file,
            swap,
            out,
            doc,
        } => {
            let m = read_filling(&file, doc)?;
            let ctx = make_swap_context(m.shape_arc().clone(), swap)?;
            let image = match map {
                MapKind::F => f_map(&ctx, &m)?,
                MapKind::Phi => phi(&ctx, &m)?,
                MapKind::Psi => psi(&ctx, &m)?,
            };
            match out {
                Some(path) => {
                    let text = if path.extension().is_some_and(|e| e == "json") {
                        to_json(image.shape(), Some(&image), None)
                    } else {
                        emit(&Document::from_filling(image))
                    };
                    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                }
                None => print!("{}", emit_filling(&image)),
            }
        }
        Command::Dist {
            file,
            class,
            joint,
            doc,
        } => {
            let shape = read_document(&file, doc)?.shape;
            let constraint = class.constraint();
            if joint {
                let report = joint_symmetry_check(shape, &constraint)?;
                println!("{}", report.polynomial);
                if report.is_symmetric() {
                    println!("symmetric");
                } else {
                    for ((a, b), c, d) in &report.asymmetries {
                        println!("asymmetric: x^{a}*y^{b} has {c}, x^{b}*y^{a} has {d}");
                    }
                }
            } else {
                println!("{}", distribution(shape, &constraint, DistributionKind::Univariate)?);
            }
        }
        Command::Verify {
            property,
            file,
            swap,
            col_sums,
            all,
            relaxed,
            doc,
        } => {
            let doc = read_document(&file, doc)?;
            let class = match (col_sums, doc.filling) {
                (Some(cols), _) => FillingClass::Constraint(FillConstraint::ColSums(cols)),
                (None, Some(f)) if !all => FillingClass::Single(f),
                _ => FillingClass::All,
            };
            let params = VerifyParams { swap, class, relaxed };
            match verify(property, &doc.shape, &params)? {
                Report::Pass { checked } => println!("PASS {property}: {checked} fillings"),
                Report::Fail { message, witnesses } => {
                    println!("FAIL {property}: {message}");
                    print_witnesses(&witnesses);
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Sweep {
            max_rows,
            max_cols,
            max_ones,
            props,
            workers,
        } => {
            let props = if props.iter().any(|p| p == "all") {
                Property::ALL.to_vec()
            } else {
                props.iter().map(|p| p.parse()).collect::<Result<Vec<Property>, _>>()?
            };
            if workers == 0 {
                bail!("--workers must be positive");
            }
            let report = sweep(&SweepConfig {
                max_rows,
                max_cols,
                max_ones,
                props,
                workers,
            });
            print!("{report}");
            if !report.passed() {
                for v in report.summaries.iter().filter_map(|s| s.first_violation.as_ref()) {
                    println!();
                    println!("witness for {}: {}", v.unit, v.message);
                    print_witnesses(&v.witnesses);
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Reproduce { scenario } => {
            let report = reproduce(&scenario).ok_or_else(|| anyhow!("unknown scenario {scenario}"))?;
            println!("{report}");
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn classify(shape: &Arc<Polyomino>) {
    println!("class: {}", shape.classify());
    println!("rows: {}", join(&shape.row_lengths()));
    println!("columns: {}", join(&shape.column_lengths()));
    println!("cells: {}", shape.cell_count());
    println!("exceptional rows: {}", join(&shape.exceptional_rows()));
}

fn stat(f: &Filling) {
    let ne = longest_chain(f, Direction::Ne);
    let se = longest_chain(f, Direction::Se);
    println!("ne={} se={}", ne.size, se.size);
    println!("row sums: {}", join(&f.row_sums()));
    println!("column sums: {}", join(&f.col_sums()));
    for (label, chain) in [("ne", ne), ("se", se)] {
        if let Some(w) = chain.witness {
            println!("{label} witness: {w}");
        }
    }
}
