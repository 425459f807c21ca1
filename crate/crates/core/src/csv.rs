//! Deterministic CSV formatting and atomic file output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Rounds to 12 significant digits and prints the shortest representation
/// that reads back to the rounded value.
pub(crate) fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

/// Header plus rows, comma separated, LF terminated.
#[derive(Debug, Clone, Default)]
pub(crate) struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub(crate) fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub(crate) fn push_values(&mut self, values: impl IntoIterator<Item = f64>) {
        self.rows.push(values.into_iter().map(fmt_f64).collect());
    }

    pub(crate) fn push_row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub(crate) fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes through a sibling temp file and renames over the target.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let file_name =
        path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
