//! Summary of one evaluated set, as text or JSON.

use std::time::Duration;

use serde_json::{json, Value};

use crate::cell::{CellKind, Decomposition};
use crate::euler::{class_of, GClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub input: String,
    pub vars: Vec<String>,
    pub cell_count: usize,
    pub good: usize,
    pub bad: usize,
    pub exceptional: usize,
    /// Largest cell dimension; `None` for the empty set.
    pub dim: Option<usize>,
    pub chi_g: i64,
    pub chi_b: i64,
    pub class: GClass,
    /// Every cell is good.
    pub bounded: bool,
    /// Not serialized, so JSON output stays deterministic.
    pub elapsed: Duration,
}

impl Report {
    pub fn new(input: &str, vars: &[String], d: &Decomposition, elapsed: Duration) -> Report {
        let good = d.count(CellKind::Good);
        Report {
            input: input.to_string(),
            vars: vars.to_vec(),
            cell_count: d.cells().len(),
            good,
            bad: d.count(CellKind::Bad),
            exceptional: d.count(CellKind::Exceptional),
            dim: d.max_dim(),
            chi_g: d.chi_g(),
            chi_b: d.chi_b(),
            class: class_of(d),
            bounded: good == d.cells().len(),
            elapsed,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "input": self.input,
            "vars": self.vars,
            "cell_count": self.cell_count,
            "kinds": {"good": self.good, "bad": self.bad, "exceptional": self.exceptional},
            "dim": self.dim,
            "chi_g": self.chi_g,
            "chi_b": self.chi_b,
            "class": self.class.to_string(),
            "bounded": self.bounded,
        })
    }

    pub fn from_json(v: &Value) -> Option<Report> {
        let int = |k: &str| v.get(k)?.as_i64();
        let count = |k: &str| Some(v.get("kinds")?.get(k)?.as_u64()? as usize);
        Some(Report {
            input: v.get("input")?.as_str()?.to_string(),
            vars: v
                .get("vars")?
                .as_array()?
                .iter()
                .map(|s| s.as_str().map(str::to_string))
                .collect::<Option<_>>()?,
            cell_count: v.get("cell_count")?.as_u64()? as usize,
            good: count("good")?,
            bad: count("bad")?,
            exceptional: count("exceptional")?,
            dim: match v.get("dim")? {
                Value::Null => None,
                d => Some(d.as_u64()? as usize),
            },
            chi_g: int("chi_g")?,
            chi_b: int("chi_b")?,
            class: v.get("class")?.as_str()?.parse().ok()?,
            bounded: v.get("bounded")?.as_bool()?,
            elapsed: Duration::ZERO,
        })
    }

    pub fn render_text(&self) -> String {
        let dim = self.dim.map_or("empty".to_string(), |d| d.to_string());
        format!(
            "input:   {}\nvars:    {}\ncells:   {} (good {}, bad {}, exceptional {})\ndim:     {}\nchi_g:   {}\nchi_b:   {}\nclass:   {}\nbounded: {}\ntime:    {:.3} ms\n",
            self.input,
            self.vars.join(", "),
            self.cell_count,
            self.good,
            self.bad,
            self.exceptional,
            dim,
            self.chi_g,
            self.chi_b,
            self.class,
            self.bounded,
            self.elapsed.as_secs_f64() * 1e3,
        )
    }
}
