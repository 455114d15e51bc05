//! Plain-text data files: `#`-prefixed `key=value` metadata lines followed
//! by comma-separated numeric rows.
//!
//! ```text
//! # mu_hat=0.178
//! # columns=x,density
//! -3.9800000000000000e0,1.2e-5
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered `key=value` metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends or replaces `key`.
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Parses `key`, failing with a validation error when it is missing or
    /// malformed.
    pub fn require<T: FromStr>(&self, key: &str, path: &Path) -> Result<T> {
        let raw = self.get(key).ok_or_else(|| {
            Error::Validation(format!("{}: missing header key '{key}'", path.display()))
        })?;
        raw.parse().map_err(|_| {
            Error::Validation(format!(
                "{}: header key '{key}' has unparsable value '{raw}'",
                path.display()
            ))
        })
    }

    /// Like [`Header::require`] but `None` when the key is absent.
    pub fn optional<T: FromStr>(&self, key: &str, path: &Path) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.require(key, path).map(Some),
        }
    }
}

/// A parsed data file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Header, columns: &[&str]) -> Self {
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn require_column(&self, name: &str, path: &Path) -> Result<Vec<f64>> {
        self.column(name).ok_or_else(|| {
            Error::Validation(format!("{}: no column named '{name}'", path.display()))
        })
    }

    /// Serializes with shortest round-trip float formatting.
    pub fn render(&self) -> String {
        self.render_with(|out, v| write!(out, "{v}"))
    }

    pub(crate) fn render_with(&self, fmt: impl Fn(&mut String, f64) -> std::fmt::Result) -> String {
        let mut out = String::new();
        for (k, v) in self.header.entries() {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# columns={}", self.columns.join(","));
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = fmt(&mut out, *v);
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut header = Header::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if !rows.is_empty() {
                    return Err(Error::parse(path, line_no, "metadata after data rows"));
                }
                let (k, v) = meta
                    .split_once('=')
                    .ok_or_else(|| Error::parse(path, line_no, "expected '# key=value'"))?;
                let (k, v) = (k.trim(), v.trim());
                if k == "columns" {
                    columns = Some(v.split(',').map(|c| c.trim().to_string()).collect());
                } else {
                    header.set(k, v);
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, line_no, format!("bad number: {e}")))?;
            let width = columns.as_ref().map(Vec::len).unwrap_or(1);
            if row.len() != width {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected {width} fields, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        let columns = columns.ok_or_else(|| {
            Error::parse(
                path,
                text.lines().count().max(1),
                "missing '# columns=' header",
            )
        })?;
        Ok(Self {
            header,
            columns,
            rows,
        })
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
