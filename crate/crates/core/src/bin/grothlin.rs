use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grothlin::arith::{fmt_rational, parse_rational, Rational};
use grothlin::cell::{decompose_with, DecomposeOptions};
use grothlin::corpus::{bundled, load_dir};
use grothlin::euler::bd_check;
use grothlin::formula::{free_names, parse, DefSet, ParseError};
use grothlin::plmap::{MapError, PLMap};
use grothlin::qe::{qe_with, QeConfig};
use grothlin::report::Report;
use grothlin::selftest::{self, SUITES};

#[derive(Parser)]
#[command(name = "grothlin", version, about = "Euler characteristics and classes of semilinear sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristics and class of a set.
    Eval(SetArgs),
    /// Quantifier-free equivalent of a formula.
    Qe {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Cell decomposition listing.
    Cells(SetArgs),
    /// Apply, image, injectivity or bijectivity of a piecewise-affine map.
    Map {
        #[arg(value_enum)]
        action: MapAction,
        #[arg(long = "map")]
        map: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        target: Option<PathBuf>,
        /// Comma-separated rationals, for `apply`.
        #[arg(long, value_delimiter = ',')]
        point: Option<Vec<String>>,
    },
    /// Stabilization of sublevel sets of a distance function.
    Bd {
        #[arg(long)]
        set: PathBuf,
        /// Graph formula over the value variable followed by the set's variables.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[arg(long, default_value = "t")]
        value_var: String,
    },
    /// Runs the invariant suites.
    Selftest {
        #[arg(long)]
        filter: Option<String>,
        /// Directory of `.fo` files replacing the bundled corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        no_verify: bool,
    },
}

#[derive(clap::Args)]
struct SetArgs {
    file: PathBuf,
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long)]
    json: bool,
    /// Skip certification of the decomposition.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapAction {
    Apply,
    Image,
    Injective,
    Bijection,
}

/// Exit statuses: 1 property violation, 2 input error, 3 semantic error.
enum Failure {
    Property(String),
    Input(String),
    Semantic(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Property(_) => 1,
            Failure::Input(_) => 2,
            Failure::Semantic(_) => 3,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::UnknownIdent { .. } => Failure::Semantic(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Parse(p) => p.into(),
            MapError::Json(_) => Failure::Input(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    };
    text.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn resolve_vars(text: &str, vars: Option<Vec<String>>) -> Result<Vec<String>, Failure> {
    match vars {
        Some(v) => Ok(v),
        None => Ok(free_names(text)?),
    }
}

fn load_set(path: &Path, vars: Option<Vec<String>>) -> Result<(String, Vec<String>, DefSet), Failure> {
    let text = read(path)?;
    let text = text.trim().to_string();
    let vars = resolve_vars(&text, vars)?;
    let f = parse(&text, &vars)?;
    let s = qe_with(&f, vars.len(), &QeConfig::from_env()).map_err(|e| Failure::Semantic(e.to_string()))?;
    Ok((text, vars, s))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn cmd_eval(a: SetArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let (text, vars, s) = load_set(&a.file, a.vars)?;
    let d = decompose_with(&s, DecomposeOptions { verify: !a.no_verify })
        .map_err(|e| Failure::Property(e.to_string()))?;
    let r = Report::new(&text, &vars, &d, start.elapsed());
    if a.json {
        println!("{}", pretty(&r.to_json()));
    } else {
        print!("{}", r.render_text());
    }
    Ok(())
}

fn cmd_cells(a: SetArgs) -> Result<(), Failure> {
    let (_, vars, s) = load_set(&a.file, a.vars)?;
    let d = decompose_with(&s, DecomposeOptions { verify: !a.no_verify })
        .map_err(|e| Failure::Property(e.to_string()))?;
    if a.json {
        let cells: Vec<Value> = d.cells().iter().map(|c| c.to_json(&vars)).collect();
        println!("{}", pretty(&json!({"vars": vars, "cells": cells})));
    } else {
        for c in d.cells() {
            println!("{:<5} dim {}  {}", c.kind().as_str(), c.dim(), c.display_with(&vars));
        }
        println!("{} cells", d.cells().len());
    }
    Ok(())
}

fn cmd_qe(file: &Path, vars: Option<Vec<String>>) -> Result<(), Failure> {
    let (_, vars, s) = load_set(file, vars)?;
    println!("{}", s.display_with(&vars));
    Ok(())
}

fn names_from(v: &Value, key: &str) -> Option<Vec<String>> {
    v.get(key)?
        .as_array()?
        .iter()
        .map(|n| n.as_str().map(str::to_string))
        .collect()
}

fn cmd_map(
    action: MapAction,
    map: &Path,
    set: Option<&Path>,
    target: Option<&Path>,
    point: Option<Vec<String>>,
) -> Result<(), Failure> {
    let raw: Value = serde_json::from_str(&read(map)?).map_err(|e| Failure::Input(format!("{}: {e}", map.display())))?;
    let f = PLMap::from_json(&raw)?;
    let src_names = names_from(&raw, "vars").unwrap_or_else(|| grothlin::arith::default_names(f.src_dim()));
    let dst_names = names_from(&raw, "dst_vars").unwrap_or_else(|| {
        if f.dst_dim() == f.src_dim() {
            src_names.clone()
        } else {
            grothlin::arith::default_names(f.dst_dim())
        }
    });
    let load = |p: &Path, names: &[String]| -> Result<DefSet, Failure> {
        let text = read(p)?;
        Ok(DefSet::parse(text.trim(), names)?)
    };
    let source = match set {
        Some(p) => load(p, &src_names)?,
        None => f.domain(),
    };
    match action {
        MapAction::Apply => {
            let p = point.ok_or_else(|| Failure::Input("`apply` needs --point".into()))?;
            let p: Vec<Rational> = p
                .iter()
                .map(|c| parse_rational(c.trim()).ok_or_else(|| Failure::Input(format!("bad rational `{c}`"))))
                .collect::<Result<_, _>>()?;
            let out = f.apply(&p)?;
            println!("{}", out.iter().map(fmt_rational).collect::<Vec<_>>().join(", "));
        }
        MapAction::Image => println!("{}", f.image(&source)?.display_with(&dst_names)),
        MapAction::Injective => println!("{}", f.is_injective_on(&source)?),
        MapAction::Bijection => {
            let t = target.ok_or_else(|| Failure::Input("`bijection` needs --target".into()))?;
            let t = load(t, &dst_names)?;
            println!("{}", f.certify_bijection(&source, &t)?);
        }
    }
    Ok(())
}

fn cmd_bd(set: &Path, dist: &Path, vars: Option<Vec<String>>, value_var: String) -> Result<(), Failure> {
    let (_, vars, s) = load_set(set, vars)?;
    let mut graph_vars = vec![value_var];
    graph_vars.extend(vars);
    let g = DefSet::parse(read(dist)?.trim(), &graph_vars)?;
    let r = bd_check(&s, &g, &QeConfig::from_env());
    print!("{}", r.render());
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Property("stabilization check failed".into()))
    }
}

fn cmd_selftest(filter: Option<String>, corpus: Option<PathBuf>, no_verify: bool) -> Result<(), Failure> {
    let entries = match corpus {
        Some(dir) => load_dir(&dir).map_err(|e| Failure::Input(e.to_string()))?,
        None => bundled(),
    };
    if let Some(f) = &filter {
        if !SUITES.iter().any(|s| s.contains(f.as_str())) {
            return Err(Failure::Input(format!("no suite matches `{f}`; suites: {}", SUITES.join(", "))));
        }
    }
    let outcomes = selftest::run(filter.as_deref(), &entries, &selftest::Options { verify: !no_verify });
    let mut failed = 0;
    for o in &outcomes {
        let mark = if o.passed() { "PASS" } else { "FAIL" };
        println!("{mark} {:<13} {:>5} checks {:>9.1} ms", o.name, o.checks, o.elapsed.as_secs_f64() * 1e3);
        for f in &o.failures {
            println!("     {f}");
        }
        failed += usize::from(!o.passed());
    }
    println!("{} of {} suites passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Property(format!("{failed} suites failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Cells(a) => cmd_cells(a),
        Cmd::Qe { file, vars } => cmd_qe(&file, vars),
        Cmd::Map {
            action,
            map,
            set,
            target,
            point,
        } => cmd_map(action, &map, set.as_deref(), target.as_deref(), point),
        Cmd::Bd {
            set,
            dist,
            vars,
            value_var,
        } => cmd_bd(&set, &dist, vars, value_var),
        Cmd::Selftest {
            filter,
            corpus,
            no_verify,
        } => cmd_selftest(filter, corpus, no_verify),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Property(m) | Failure::Input(m) | Failure::Semantic(m)) = &f;
            eprintln!("grothlin: {m}");
            ExitCode::from(f.code())
        }
    }
}
