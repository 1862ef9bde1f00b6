//! QAPLIB-style plain-text instance files.
//!
//! ```text
//! # class = uniform
//! # seed = 17
//! 2
//!
//! 0 1
//! 2 0
//!
//! 0 3
//! 4 0
//! ```
//!
//! Leading `#` lines carry generator metadata as `key = value`. Then comes the
//! dimension, the `n` rows of the distance matrix and the `n` rows of the flow
//! matrix, separated by blank lines. Every matrix row sits on its own line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qap::{InstanceMeta, QapInstance};

pub fn serialize_instance(inst: &QapInstance) -> String {
    let mut out = String::new();
    let meta = inst.meta();
    if let Some(class) = &meta.class {
        let _ = writeln!(out, "# class = {class}");
    }
    if let Some(seed) = meta.seed {
        let _ = writeln!(out, "# seed = {seed}");
    }
    for (k, v) in &meta.params {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let n = inst.n();
    let _ = writeln!(out, "{n}");
    for row_of in [QapInstance::dist_row, QapInstance::flow_row] {
        out.push('\n');
        for i in 0..n {
            let row = row_of(inst, i);
            let line = row.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<QapInstance> {
    let mut meta = InstanceMeta::default();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let mut in_header = true;
    let mut content = Vec::new();
    for (line_no, line) in lines.by_ref() {
        if let Some(comment) = line.strip_prefix('#') {
            if in_header {
                parse_meta_line(&mut meta, line_no, comment.trim())?;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        in_header = false;
        content.push((line_no, line));
    }

    let mut rows = content.into_iter();
    let (n_line, n_text) = rows
        .next()
        .ok_or_else(|| Error::parse(text.lines().count().max(1), "missing dimension line"))?;
    let n: usize = n_text
        .parse()
        .map_err(|_| Error::parse(n_line, format!("expected the dimension, found `{n_text}`")))?;
    if n == 0 {
        return Err(Error::parse(n_line, "dimension must be positive"));
    }

    let mut read_matrix = |name: &str| -> Result<Vec<Vec<i64>>> {
        let mut matrix = Vec::with_capacity(n);
        for i in 0..n {
            let (line_no, line) = rows.next().ok_or_else(|| {
                Error::parse(
                    text.lines().count(),
                    format!("{name} matrix ends after {i} of {n} rows"),
                )
            })?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>().map_err(|_| {
                        Error::parse(line_no, format!("`{tok}` is not an integer"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::parse(
                    line_no,
                    format!("{name} matrix row has {} entries, expected {n}", row.len()),
                ));
            }
            if let Some(j) = row.iter().position(|&x| x < 0) {
                return Err(Error::parse(
                    line_no,
                    format!("{name} matrix entry in column {} is negative", j + 1),
                ));
            }
            if row[i] != 0 {
                return Err(Error::parse(line_no, format!("{name} matrix diagonal entry must be 0")));
            }
            matrix.push(row);
        }
        Ok(matrix)
    };
    let dist = read_matrix("distance")?;
    let flow = read_matrix("flow")?;

    if let Some((line_no, _)) = rows.next() {
        return Err(Error::parse(line_no, "unexpected content after the flow matrix"));
    }
    QapInstance::with_meta(dist, flow, meta)
}

fn parse_meta_line(meta: &mut InstanceMeta, line_no: usize, comment: &str) -> Result<()> {
    let Some((key, value)) = comment.split_once('=') else {
        return Ok(());
    };
    let (key, value) = (key.trim(), value.trim());
    match key {
        "class" => meta.class = Some(value.to_string()),
        "seed" => {
            let seed = value
                .parse()
                .map_err(|_| Error::parse(line_no, format!("seed `{value}` is not an unsigned integer")))?;
            meta.seed = Some(seed);
        }
        _ => meta.params.push((key.to_string(), value.to_string())),
    }
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<QapInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_instance(&text)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &QapInstance) -> Result<()> {
    write_atomic(path.as_ref(), serialize_instance(inst).as_bytes())
}

/// Writes to a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| Error::file(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::file(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    const TWO: &str = "2\n\n0 1\n2 0\n\n0 3\n4 0\n";

    #[test]
    fn two_by_two_file() {
        let inst = QapInstance::new(vec![vec![0, 1], vec![2, 0]], vec![vec![0, 3], vec![4, 0]]).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(text, TWO);
        assert_eq!(text.lines().count(), 7);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.cost(&Permutation::identity(2)).unwrap(), 11);
    }

    #[test]
    fn metadata_roundtrips() {
        let text = "# class = uniform\n# seed = 9\n# d_max = 100\n2\n\n0 1\n1 0\n\n0 5\n6 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.meta().class.as_deref(), Some("uniform"));
        assert_eq!(inst.meta().seed, Some(9));
        assert_eq!(inst.meta().param("d_max"), Some("100"));
        assert_eq!(serialize_instance(&inst), text);
    }

    #[test]
    fn short_row_names_its_line() {
        let text = "4\n\n0 1 2 3\n1 0 2 3\n1 2 0\n1 2 3 0\n\n0 1 1 1\n1 0 1 1\n1 1 0 1\n1 1 1 0\n";
        match parse_instance(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("3 entries"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn other_malformed_inputs() {
        let cases = [
            ("", 1),
            ("x\n", 1),
            ("2\n\n0 -1\n1 0\n\n0 1\n1 0\n", 3),
            ("2\n\n0 1\n1 0\n\n0 1\n", 6),
            ("2\n\n0 1\n1 0\n\n0 1\n1 0\n7\n", 8),
            ("2\n\n1 1\n1 0\n\n0 1\n1 0\n", 3),
            ("# seed = abc\n2\n", 1),
        ];
        for (text, expected_line) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected_line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn atomic_write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/inst.dat");
        let inst = parse_instance(TWO).unwrap();
        write_instance(&path, &inst).unwrap();
        assert_eq!(read_instance(&path).unwrap(), inst);
        assert!(!dir.path().join("nested/inst.dat.tmp").exists());
    }
}
