#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use manifoldkit::DenseMatrix;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_manifoldkit"));
    cmd.env_remove("MANIFOLDKIT_CONFIG");
    cmd
}

pub fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn manifoldkit")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

pub fn write_matrix(path: &Path, id: &str, m: &DenseMatrix) -> PathBuf {
    let mut text = format!("# manifold={id} n={} p={}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).expect("write matrix file");
    path.to_path_buf()
}

pub fn read_matrix(path: &Path) -> (String, DenseMatrix) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> (String, DenseMatrix) {
    let mut lines = text.lines();
    let header = lines.next().expect("header");
    let field = |key: &str| {
        header
            .split_whitespace()
            .find_map(|f| f.strip_prefix(&format!("{key}=")).map(str::to_string))
            .expect("header field")
    };
    let (n, p): (usize, usize) = (field("n").parse().unwrap(), field("p").parse().unwrap());
    let data: Vec<f64> = lines
        .flat_map(|l| l.split_whitespace().map(|t| t.parse::<f64>().unwrap()))
        .collect();
    assert_eq!(data.len(), n * p);
    (field("manifold"), DenseMatrix::from_row_slice(n, p, &data))
}

pub fn write_manifest(path: &Path, rows: &[(Vec<f64>, &str)]) -> PathBuf {
    let text: String = rows
        .iter()
        .map(|(mu, file)| {
            let mus: Vec<String> = mu.iter().map(|x| format!("{x:.16e}")).collect();
            format!("{} {file}\n", mus.join(" "))
        })
        .collect();
    std::fs::write(path, text).expect("write manifest");
    path.to_path_buf()
}

pub fn report_value(path: &Path, key: &str) -> Option<String> {
    std::fs::read_to_string(path)
        .ok()?
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}
