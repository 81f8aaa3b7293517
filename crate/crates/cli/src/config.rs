//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys before the first header belong to the unnamed global section. `#`
//! starts a comment. Every key a command does not read is an error, reported
//! with its line number.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current = String::new();
        sections.insert(current.clone(), BTreeMap::new());
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    bail!("line {line}: unterminated section header `{body}`");
                };
                current = name.trim().to_string();
                if sections.contains_key(&current) && !current.is_empty() {
                    bail!("line {line}: section [{current}] appears twice");
                }
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                bail!("line {line}: expected `key = value`, got `{body}`");
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                bail!("line {line}: empty key");
            }
            let entry = Entry { value: value.trim().to_string(), line };
            if let Some(prev) = sections.get_mut(&current).unwrap().insert(key.clone(), entry) {
                bail!("line {line}: key `{key}` already set on line {}", prev.line);
            }
        }
        Ok(Self { sections })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// The section for `command`. Sections for other commands are allowed
    /// so one file can drive several runs.
    pub fn section(&self, command: &str) -> Section {
        Section {
            name: command.to_string(),
            entries: self.sections.get(command).cloned().unwrap_or_default(),
            used: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn global(&self) -> Section {
        self.section("")
    }

    pub fn section_names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str).filter(|s| !s.is_empty())
    }

    /// Every `key = value` pair in file order, for the manifest echo.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut all: Vec<(usize, String, String)> = self
            .sections
            .iter()
            .flat_map(|(s, kv)| {
                kv.iter().map(move |(k, e)| {
                    let key = if s.is_empty() { k.clone() } else { format!("{s}.{k}") };
                    (e.line, key, e.value.clone())
                })
            })
            .collect();
        all.sort();
        all.into_iter().map(|(_, k, v)| (k, v)).collect()
    }
}

pub struct Section {
    name: String,
    entries: BTreeMap<String, Entry>,
    used: RefCell<BTreeSet<String>>,
}

impl Section {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key)
    }

    fn label(&self, key: &str, line: usize) -> String {
        if self.name.is_empty() {
            format!("line {line}: key `{key}`")
        } else {
            format!("line {line}: key `{key}` in [{}]", self.name)
        }
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|err| anyhow!("{}: cannot parse `{}`: {err}", self.label(key, e.line), e.value)),
        }
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|err| anyhow!("{}: cannot parse `{}`: {err}", self.label(key, e.line), e.value)),
        }
    }

    /// Comma-separated list.
    pub fn list<T>(&self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: FromStr + Clone,
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.raw(key) else { return Ok(default.to_vec()) };
        e.value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|err| anyhow!("{}: cannot parse `{s}`: {err}", self.label(key, e.line)))
            })
            .collect()
    }

    /// Checks a value read from this section, citing its line on failure.
    pub fn ensure(&self, key: &str, ok: bool, what: &str) -> Result<()> {
        if ok {
            return Ok(());
        }
        match self.entries.get(key) {
            Some(e) => bail!("{}: {what}", self.label(key, e.line)),
            None => bail!("default for `{key}`: {what}"),
        }
    }

    /// Fails on keys that were never read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let mut unknown: Vec<_> = self.entries.iter().filter(|(k, _)| !used.contains(*k)).collect();
        unknown.sort_by_key(|(_, e)| e.line);
        if let Some((k, e)) = unknown.first() {
            let known: Vec<_> = used.iter().map(String::as_str).collect();
            bail!("{}: unknown key (expected one of: {})", self.label(k, e.line), known.join(", "));
        }
        Ok(())
    }
}
