//! Suite configuration: one `[environment]` table and a list of `[[case]]`
//! tables. Every grid size and tolerance a case uses comes from here.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use holonomy_core::lie::GroupId;
use serde::Deserialize;

use crate::error::LabError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub environment: Environment,
    #[serde(default, rename = "case")]
    pub cases: Vec<VerificationCase>,
}

/// Defaults shared by all cases. `groups` also acts as a switch: cases
/// whose groups are all absent here are skipped.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub n: usize,
    pub kmax: usize,
    pub groups: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `measured <= tolerance`.
    #[default]
    AtMost,
    /// Pass whenever the case runs; `measured` is informational.
    Report,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationCase {
    pub id: String,
    pub module: String,
    pub operation: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub parameters: toml::Table,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default)]
    pub compare: Comparison,
}

impl Config {
    pub fn from_str_named(text: &str, name: &str) -> Result<Self, LabError> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            LabError::Parse { file: name.to_string(), line, column, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io { path: path.display().to_string(), source: e })?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    fn validate(&self) -> Result<(), LabError> {
        for g in &self.environment.groups {
            g.parse::<GroupId>().map_err(|_| LabError::UnknownGroup(g.clone()))?;
        }
        let mut seen = BTreeSet::new();
        for c in &self.cases {
            if !seen.insert(c.id.as_str()) {
                return Err(LabError::DuplicateCase(c.id.clone()));
            }
            if !c.tolerance.is_finite() || c.tolerance < 0.0 {
                return Err(LabError::Parameter { case: c.id.clone(), message: format!("tolerance {} must be finite and nonnegative", c.tolerance) });
            }
            if let Some(v) = c.parameters.get("groups") {
                let list = v.as_array().ok_or_else(|| LabError::Parameter { case: c.id.clone(), message: "groups must be an array".into() })?;
                for g in list {
                    let s = g.as_str().unwrap_or_default();
                    s.parse::<GroupId>().map_err(|_| LabError::UnknownGroup(s.to_string()))?;
                }
            }
        }
        Ok(())
    }

    pub fn environment_groups(&self) -> Vec<GroupId> {
        self.environment.groups.iter().filter_map(|g| g.parse().ok()).collect()
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Typed access to a case's parameter table with fallbacks to the
/// environment for `n`, `kmax` and `groups`.
pub struct Params<'a> {
    case: &'a VerificationCase,
    env: &'a Environment,
}

impl<'a> Params<'a> {
    pub fn new(case: &'a VerificationCase, env: &'a Environment) -> Self {
        Self { case, env }
    }

    fn err(&self, message: String) -> LabError {
        LabError::Parameter { case: self.case.id.clone(), message }
    }

    fn get(&self, key: &str) -> Result<&toml::Value, LabError> {
        self.case.parameters.get(key).ok_or_else(|| self.err(format!("missing parameter {key:?}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, LabError> {
        match self.get(key)? {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(i) => Ok(*i as f64),
            other => Err(self.err(format!("{key} should be a number, found {other}"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, LabError> {
        let v = match (key, self.case.parameters.get(key)) {
            (_, Some(v)) => v,
            ("n", None) => return Ok(self.env.n),
            ("kmax", None) => return Ok(self.env.kmax),
            _ => self.get(key)?,
        };
        v.as_integer().and_then(|i| usize::try_from(i).ok()).ok_or_else(|| self.err(format!("{key} should be a nonnegative integer")))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, LabError> {
        let arr = self.get(key)?.as_array().ok_or_else(|| self.err(format!("{key} should be an array")))?;
        arr.iter()
            .map(|v| match v {
                toml::Value::Float(x) => Ok(*x),
                toml::Value::Integer(i) => Ok(*i as f64),
                _ => Err(self.err(format!("{key} should hold numbers"))),
            })
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, LabError> {
        let arr = self.get(key)?.as_array().ok_or_else(|| self.err(format!("{key} should be an array")))?;
        arr.iter()
            .map(|v| v.as_integer().and_then(|i| usize::try_from(i).ok()).ok_or_else(|| self.err(format!("{key} should hold integers"))))
            .collect()
    }

    pub fn string(&self, key: &str) -> Result<String, LabError> {
        self.get(key)?.as_str().map(str::to_string).ok_or_else(|| self.err(format!("{key} should be a string")))
    }

    pub fn string_list(&self, key: &str) -> Result<Vec<String>, LabError> {
        let arr = self.get(key)?.as_array().ok_or_else(|| self.err(format!("{key} should be an array")))?;
        arr.iter().map(|v| v.as_str().map(str::to_string).ok_or_else(|| self.err(format!("{key} should hold strings")))).collect()
    }

    /// Groups named by the case, or the environment's list; either way
    /// restricted to groups enabled in the environment.
    pub fn groups(&self) -> Result<Vec<GroupId>, LabError> {
        let enabled: Vec<GroupId> = self.env.groups.iter().filter_map(|g| g.parse().ok()).collect();
        let wanted = match self.case.parameters.get("groups") {
            Some(_) => self.string_list("groups")?,
            None => self.env.groups.clone(),
        };
        let mut out = Vec::new();
        for g in wanted {
            let id: GroupId = g.parse().map_err(|_| LabError::UnknownGroup(g.clone()))?;
            if enabled.contains(&id) && !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }

    pub fn optional_f64(&self, key: &str) -> Result<Option<f64>, LabError> {
        if self.case.parameters.contains_key(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }
}

/// Case selection. Terms are separated by commas and combined with "or";
/// a term matches a case when it is a substring of the id or equals its
/// module, operation or one of its tags. `id=X` names a case exactly and
/// fails on unknown ids; a leading `!` excludes matches.
#[derive(Debug, Clone, Default)]
pub struct Filter {
    include: Vec<Term>,
    exclude: Vec<Term>,
}

#[derive(Debug, Clone)]
enum Term {
    Exact(String),
    Loose(String),
}

impl Term {
    fn matches(&self, c: &VerificationCase) -> bool {
        match self {
            Term::Exact(id) => &c.id == id,
            Term::Loose(t) => c.id.contains(t.as_str()) || &c.module == t || &c.operation == t || c.tags.iter().any(|x| x == t),
        }
    }
}

impl Filter {
    pub fn parse(expr: &str) -> Self {
        let mut f = Filter::default();
        for raw in expr.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (neg, body) = match raw.strip_prefix('!') {
                Some(rest) => (true, rest.trim()),
                None => (false, raw),
            };
            let term = match body.strip_prefix("id=") {
                Some(id) => Term::Exact(id.trim().to_string()),
                None => Term::Loose(body.to_string()),
            };
            if neg {
                f.exclude.push(term);
            } else {
                f.include.push(term);
            }
        }
        f
    }

    /// Cases selected by the filter, in configuration order.
    pub fn select<'a>(&self, cases: &'a [VerificationCase]) -> Result<Vec<&'a VerificationCase>, LabError> {
        let known: BTreeMap<&str, ()> = cases.iter().map(|c| (c.id.as_str(), ())).collect();
        for t in self.include.iter().chain(&self.exclude) {
            if let Term::Exact(id) = t {
                if !known.contains_key(id.as_str()) {
                    return Err(LabError::UnknownCase(id.clone()));
                }
            }
        }
        Ok(cases
            .iter()
            .filter(|c| (self.include.is_empty() || self.include.iter().any(|t| t.matches(c))) && !self.exclude.iter().any(|t| t.matches(c)))
            .collect())
    }
}
