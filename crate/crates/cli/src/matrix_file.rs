//! Text matrix files.
//!
//! ```text
//! # manifold=<id> n=<rows> p=<cols>
//! <row 1: p reals>
//! ...
//! ```
//!
//! `<id>` is a manifold id (`gl`, `on`, `spd`, `st`, `gr`), `tangent` for a
//! tangent vector or `matrix` for a plain matrix. Numbers are written with 17
//! significant digits, which round-trips every `f64` exactly.

use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use manifoldkit::{DenseMatrix, ManifoldKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Point(ManifoldKind),
    Tangent,
    Matrix,
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileKind::Point(k) => write!(f, "{k}"),
            FileKind::Tangent => f.write_str("tangent"),
            FileKind::Matrix => f.write_str("matrix"),
        }
    }
}

impl FromStr for FileKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tangent" => Ok(FileKind::Tangent),
            "matrix" => Ok(FileKind::Matrix),
            other => other
                .parse::<ManifoldKind>()
                .map(FileKind::Point)
                .map_err(|_| format!("unknown manifold id '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub kind: FileKind,
    pub matrix: DenseMatrix,
}

impl MatrixFile {
    pub fn new(kind: FileKind, matrix: DenseMatrix) -> Self {
        MatrixFile { kind, matrix }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let err = |line: usize, msg: String| CliError::Parse {
            origin: origin.to_string(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| err(1, "empty file".into()))?;
        let fields = header
            .strip_prefix('#')
            .ok_or_else(|| err(hline, "expected header '# manifold=<id> n=<n> p=<p>'".into()))?;

        let (mut kind, mut n, mut p) = (None, None, None);
        for field in fields.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(hline, format!("malformed header field '{field}'")))?;
            match key {
                "manifold" => kind = Some(value.parse::<FileKind>().map_err(|m| err(hline, m))?),
                "n" => n = Some(value.parse::<usize>().map_err(|e| err(hline, format!("n: {e}")))?),
                "p" => p = Some(value.parse::<usize>().map_err(|e| err(hline, format!("p: {e}")))?),
                other => return Err(err(hline, format!("unknown header field '{other}'"))),
            }
        }
        let kind = kind.ok_or_else(|| err(hline, "header lacks manifold=".into()))?;
        let n = n.ok_or_else(|| err(hline, "header lacks n=".into()))?;
        let p = p.ok_or_else(|| err(hline, "header lacks p=".into()))?;
        if n == 0 || p == 0 {
            return Err(err(hline, "n and p must be positive".into()));
        }
        if let FileKind::Point(k) = kind {
            if k.is_square() && n != p {
                return Err(err(hline, format!("{k} needs n = p, got n={n} p={p}")));
            }
            if !k.is_square() && p > n {
                return Err(err(hline, format!("{k} needs p <= n, got n={n} p={p}")));
            }
        }

        let mut data = Vec::with_capacity(n * p);
        let mut rows = 0;
        for (lno, line) in lines {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if rows == n {
                return Err(err(lno, format!("more than n={n} rows")));
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| err(lno, format!("not a number: '{tok}'")))?;
                if !v.is_finite() {
                    return Err(err(lno, format!("non-finite entry '{tok}'")));
                }
                data.push(v);
            }
            if data.len() - before != p {
                return Err(err(lno, format!("expected {p} entries, found {}", data.len() - before)));
            }
            rows += 1;
        }
        if rows != n {
            return Err(err(hline, format!("header declares n={n} rows, body has {rows}")));
        }
        Ok(MatrixFile {
            kind,
            matrix: DenseMatrix::from_row_slice(n, p, &data),
        })
    }

    pub fn render(&self) -> String {
        let (n, p) = self.matrix.shape();
        let mut out = format!("# manifold={} n={n} p={p}\n", self.kind);
        for i in 0..n {
            for j in 0..p {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{}", format_real(self.matrix[(i, j)])).expect("write to String");
            }
            out.push('\n');
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
