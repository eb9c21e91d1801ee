//! Annotated formula files with their expected characteristics.
//!
//! A file is a header of `# key: value` lines followed by one formula:
//!
//! ```text
//! # name: open-ray
//! # vars: x
//! # expect: chi_g=-1 chi_b=0 class=T
//! # provenance: ...
//! 0 < x
//! ```

use std::path::Path;

use thiserror::Error;

use crate::euler::GClass;
use crate::formula::{parse, DefSet};
use crate::qe::qe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}: {msg}")]
pub struct CorpusError {
    pub file: String,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub chi_g: i64,
    pub chi_b: i64,
    pub class: GClass,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub file: String,
    pub name: String,
    pub vars: Vec<String>,
    pub formula: String,
    pub expect: Expected,
    pub provenance: String,
    pub set: DefSet,
}

macro_rules! bundled_files {
    ($($f:literal),* $(,)?) => {
        &[$(($f, include_str!(concat!("../corpus/", $f)))),*]
    };
}

const BUNDLED: &[(&str, &str)] = bundled_files![
    "01-open-interval.fo",
    "02-closed-interval.fo",
    "03-half-open-interval.fo",
    "04-open-ray.fo",
    "05-closed-ray.fo",
    "06-line.fo",
    "07-point.fo",
    "08-two-points.fo",
    "09-punctured-line.fo",
    "10-left-ray.fo",
    "11-empty.fo",
    "12-open-quadrant.fo",
    "13-open-triangle.fo",
    "14-closed-square.fo",
    "15-plane.fo",
    "16-diamond.fo",
    "17-half-plane.fo",
    "18-slanted-line.fo",
    "19-hollow-square.fo",
    "20-square-annulus.fo",
    "21-open-cube.fo",
    "22-open-octant.fo",
    "23-closed-simplex.fo",
    "24-space.fo",
    "25-slab.fo",
    "26-projected-band.fo",
    "27-universal-tautology.fo",
    "28-open-cone.fo",
    "29-closed-half-plane.fo",
    "30-projected-wedge.fo",
];

pub fn parse_entry(file: &str, text: &str) -> Result<CorpusEntry, CorpusError> {
    let err = |msg: String| CorpusError {
        file: file.to_string(),
        msg,
    };
    let (mut name, mut vars, mut expect, mut provenance) = (None, None, None, String::new());
    let mut body = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(header) = trimmed.strip_prefix('#') {
            let Some((key, value)) = header.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "name" => name = Some(value.to_string()),
                "vars" => {
                    vars = Some(
                        value
                            .split(',')
                            .map(|v| v.trim().to_string())
                            .filter(|v| !v.is_empty())
                            .collect::<Vec<_>>(),
                    )
                }
                "expect" => expect = Some(parse_expect(value).map_err(err)?),
                "provenance" => provenance = value.to_string(),
                _ => {}
            }
        } else if !trimmed.is_empty() {
            body.push(trimmed);
        }
    }
    let vars = vars.ok_or_else(|| err("missing `# vars:` header".into()))?;
    let expect = expect.ok_or_else(|| err("missing `# expect:` header".into()))?;
    if body.is_empty() {
        return Err(err("no formula".into()));
    }
    let formula = body.join(" ");
    let ast = parse(&formula, &vars).map_err(|e| err(e.to_string()))?;
    Ok(CorpusEntry {
        file: file.to_string(),
        name: name.unwrap_or_else(|| file.to_string()),
        set: qe(&ast, vars.len()),
        vars,
        formula,
        expect,
        provenance,
    })
}

fn parse_expect(value: &str) -> Result<Expected, String> {
    let bad = || format!("malformed expectation `{value}`");
    let rest = value.trim().strip_prefix("chi_g=").ok_or_else(bad)?;
    let (g, rest) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
    let rest = rest.trim_start().strip_prefix("chi_b=").ok_or_else(bad)?;
    let (b, rest) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
    let class = rest.trim_start().strip_prefix("class=").ok_or_else(bad)?;
    Ok(Expected {
        chi_g: g.parse().map_err(|_| bad())?,
        chi_b: b.parse().map_err(|_| bad())?,
        class: class.parse().map_err(|_| bad())?,
    })
}

/// The corpus compiled into the library.
pub fn bundled() -> Vec<CorpusEntry> {
    BUNDLED
        .iter()
        .map(|(f, text)| parse_entry(f, text).expect("bundled corpus is well formed"))
        .collect()
}

/// Every `*.fo` file of a directory, in file-name order.
pub fn load_dir(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let io = |e: std::io::Error| CorpusError {
        file: dir.display().to_string(),
        msg: e.to_string(),
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "fo"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CorpusError {
                file: p.display().to_string(),
                msg: e.to_string(),
            })?;
            parse_entry(&p.display().to_string(), &text)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_shape() {
        let all = bundled();
        assert!(all.len() >= 20);
        for d in 1..=3 {
            assert!(all.iter().any(|e| e.vars.len() == d), "no entry in dimension {d}");
        }
        let mut names: Vec<&str> = all.iter().map(|e| e.name.as_str()).collect();
        names.dedup();
        assert_eq!(names.len(), all.len());
        assert!(all.iter().all(|e| !e.provenance.is_empty()));
    }

    #[test]
    fn header_parsing() {
        let e = parse_entry("a.fo", "# name: a\n# vars: x, y\n# expect: chi_g=1 chi_b=0 class=-T\n0 < x & 0 < y\n").unwrap();
        assert_eq!(e.vars, ["x", "y"]);
        assert_eq!(e.expect.class, -GClass::T);
        assert_eq!(e.name, "a");
    }

    #[test]
    fn errors_name_the_file() {
        let e = parse_entry("broken.fo", "# vars: x\n# expect: chi_g=1 chi_b=1 class=1\n0 < < x\n").unwrap_err();
        assert_eq!(e.file, "broken.fo");
        assert!(parse_entry("b.fo", "# vars: x\n0 < x\n").is_err());
        assert!(parse_entry("c.fo", "# vars: x\n# expect: chi_g=one chi_b=1 class=1\n0 < x\n").is_err());
    }
}
