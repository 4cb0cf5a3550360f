//! Comma-separated document × topic tables.
//!
//! First row is `doc_id,<topic1>,...,<topicM>`, then one row per document.
//! Lines starting with `#` are comments (used for provenance headers).

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub doc_ids: Vec<String>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < 2 || &header[0] != "doc_id" {
        return Err(Error::format(path, "header must be `doc_id,<topic>,...`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut seen = std::collections::HashSet::new();
    for n in &names {
        if !seen.insert(n) {
            return Err(Error::format(path, format!("duplicate column {n}")));
        }
    }
    let mut doc_ids = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != names.len() + 1 {
            return Err(Error::format(
                path,
                format!("row {line} has {} fields, expected {}", rec.len(), names.len() + 1),
            ));
        }
        doc_ids.push(rec[0].to_owned());
        let row = rec
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Data {
                        path: path.to_path_buf(),
                        row: line,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(path, "no data rows"));
    }
    Ok(Table {
        doc_ids,
        names,
        rows,
    })
}

/// Writes `table`, with each value rendered by `fmt` and an optional
/// `# ...` comment line first.
pub fn write_table(
    path: impl AsRef<Path>,
    table: &Table,
    comment: Option<&str>,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut f = File::create(path).map_err(io)?;
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(f, "# {line}").map_err(io)?;
        }
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new().from_writer(f);
    let mut header = vec!["doc_id".to_string()];
    header.extend(table.names.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (id, row) in table.doc_ids.iter().zip(&table.rows) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|&v| fmt(v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

/// Default document ids `d0, d1, ...`.
pub fn default_doc_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("d{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_with_comments_and_decimal_points() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        std::fs::write(&p, "# provenance: x\ndoc_id,food,service\na,0.25,1\nb,0,0.5\n").unwrap();
        let t = read_table(&p).unwrap();
        assert_eq!(t.names, vec!["food", "service"]);
        assert_eq!(t.doc_ids, vec!["a", "b"]);
        assert_eq!(t.rows, vec![vec![0.25, 1.0], vec![0.0, 0.5]]);
    }

    #[test]
    fn rejects_bad_header_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        std::fs::write(&p, "id,a\nx,1\n").unwrap();
        assert!(read_table(&p).is_err());
        std::fs::write(&p, "doc_id,a,a\nx,1,0\n").unwrap();
        assert!(read_table(&p).is_err());
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let t = Table {
            doc_ids: default_doc_ids(2),
            names: vec!["x".into(), "y".into()],
            rows: vec![vec![0.125, 1.0], vec![0.0, 0.75]],
        };
        write_table(&p, &t, Some("seed=1"), |v| v.to_string()).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# seed=1\ndoc_id,x,y\n"));
        assert_eq!(read_table(&p).unwrap(), t);
    }
}
