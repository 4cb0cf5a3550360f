//! Backend document-topic matrices scaled to [0, 1] and their convex mixture.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diffcore::Tensor;
use crate::error::{Error, Result};
use crate::ingest::table::{read_table, write_table, Table};
use crate::ingest::LabelMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuidanceSource {
    ZeroShot,
    SeededTopic,
    Mixed,
    GroundTruth,
}

impl fmt::Display for GuidanceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuidanceSource::ZeroShot => "zero-shot",
            GuidanceSource::SeededTopic => "seeded-topic",
            GuidanceSource::Mixed => "mixed",
            GuidanceSource::GroundTruth => "ground-truth",
        })
    }
}

/// `N × M` topic scores in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct GuidanceMatrix {
    doc_ids: Vec<String>,
    names: Vec<String>,
    values: Tensor,
    pub source: GuidanceSource,
}

impl GuidanceMatrix {
    pub fn new(
        doc_ids: Vec<String>,
        names: Vec<String>,
        values: Tensor,
        source: GuidanceSource,
    ) -> Result<Self> {
        let (n, m) = values.expect_rank2("guidance")?;
        if doc_ids.len() != n || names.len() != m {
            return Err(Error::Dimension(format!(
                "guidance is {n}×{m} but has {} ids and {} names",
                doc_ids.len(),
                names.len()
            )));
        }
        if let Some(pos) = values.data().iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Contract(format!(
                "guidance entry ({}, {}) = {} lies outside [0, 1]",
                pos / m,
                pos % m,
                values.data()[pos]
            )));
        }
        Ok(Self {
            doc_ids,
            names,
            values,
            source,
        })
    }

    pub fn from_labels(labels: &LabelMatrix) -> Self {
        let data = (0..labels.n())
            .flat_map(|i| labels.row(i).iter().map(|&v| f64::from(v)).collect::<Vec<_>>())
            .collect();
        let values = Tensor::new(vec![labels.n(), labels.m()], data).expect("label shape");
        Self {
            doc_ids: labels.doc_ids().to_vec(),
            names: labels.names().to_vec(),
            values,
            source: GuidanceSource::GroundTruth,
        }
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn m(&self) -> usize {
        self.values.cols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            doc_ids: idx.iter().map(|&i| self.doc_ids[i].clone()).collect(),
            names: self.names.clone(),
            values: self.values.select_rows(idx),
            source: self.source,
        }
    }

    /// Checks topic names (and document count) against a label matrix.
    pub fn check_labels(&self, labels: &LabelMatrix) -> Result<()> {
        if self.names != labels.names() {
            return Err(Error::Alignment(format!(
                "guidance topics {:?} differ from label topics {:?}",
                self.names,
                labels.names()
            )));
        }
        if self.n() != labels.n() {
            return Err(Error::Alignment(format!(
                "guidance has {} documents, labels have {}",
                self.n(),
                labels.n()
            )));
        }
        Ok(())
    }

    pub fn to_table(&self) -> Table {
        Table {
            doc_ids: self.doc_ids.clone(),
            names: self.names.clone(),
            rows: self.values.to_rows(),
        }
    }
}

/// Per-column min-max scaling to [0, 1]; constant columns become 0.5.
/// With `probability` set the input must already lie in [0, 1] and is
/// returned unchanged.
pub fn scale_unit_interval(raw: &Table, probability: bool, source: GuidanceSource) -> Result<GuidanceMatrix> {
    let (n, m) = (raw.n(), raw.m());
    let mut data = Vec::with_capacity(n * m);
    for r in &raw.rows {
        if r.len() != m {
            return Err(Error::Dimension(format!("guidance row has {} entries, expected {m}", r.len())));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("guidance scores are not finite".into()));
        }
        data.extend_from_slice(r);
    }
    let mut values = Tensor::new(vec![n, m], data)?;
    if !probability {
        for j in 0..m {
            let col = (0..n).map(|i| values.get(i, j));
            let lo = col.clone().fold(f64::INFINITY, f64::min);
            let hi = col.fold(f64::NEG_INFINITY, f64::max);
            for i in 0..n {
                let v = if hi > lo {
                    ((values.get(i, j) - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.5
                };
                values.set(i, j, v);
            }
        }
    }
    GuidanceMatrix::new(raw.doc_ids.clone(), raw.names.clone(), values, source)
}

/// `ω·t1 + (1 − ω)·t2`, elementwise.
pub fn combine(t1: &GuidanceMatrix, t2: &GuidanceMatrix, omega: f64) -> Result<GuidanceMatrix> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::Contract(format!("omega {omega} outside [0, 1]")));
    }
    if t1.names != t2.names {
        return Err(Error::Alignment(format!(
            "topic names differ: {:?} vs {:?}",
            t1.names, t2.names
        )));
    }
    if t1.doc_ids != t2.doc_ids {
        return Err(Error::Alignment("guidance matrices cover different documents".into()));
    }
    let values = t1.values.zip_map(&t2.values, |a, b| mix(a, b, omega))?;
    GuidanceMatrix::new(t1.doc_ids.clone(), t1.names.clone(), values, GuidanceSource::Mixed)
}

fn mix(a: f64, b: f64, omega: f64) -> f64 {
    if omega == 1.0 || a == b {
        a
    } else if omega == 0.0 {
        b
    } else {
        (omega * a + (1.0 - omega) * b).clamp(a.min(b), a.max(b))
    }
}

pub fn read_guidance(
    path: impl AsRef<Path>,
    probability: bool,
    source: GuidanceSource,
) -> Result<GuidanceMatrix> {
    scale_unit_interval(&read_table(path)?, probability, source)
}

pub fn write_guidance(path: impl AsRef<Path>, g: &GuidanceMatrix, comment: Option<&str>) -> Result<()> {
    write_table(path, &g.to_table(), comment, |v| format!("{v}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(rows: Vec<Vec<f64>>) -> Table {
        let m = rows[0].len();
        Table {
            doc_ids: crate::ingest::table::default_doc_ids(rows.len()),
            names: (0..m).map(|j| format!("t{j}")).collect(),
            rows,
        }
    }

    fn guidance(rows: Vec<Vec<f64>>) -> GuidanceMatrix {
        scale_unit_interval(&table(rows), true, GuidanceSource::ZeroShot).unwrap()
    }

    #[test]
    fn min_max_column() {
        let g = scale_unit_interval(&table(vec![vec![0.0], vec![5.0], vec![10.0]]), false, GuidanceSource::SeededTopic)
            .unwrap();
        assert_eq!(g.values().data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_column_is_half() {
        let g = scale_unit_interval(&table(vec![vec![3.0]; 3]), false, GuidanceSource::SeededTopic).unwrap();
        assert_eq!(g.values().data(), &[0.5; 3]);
    }

    #[test]
    fn probabilities_pass_through() {
        let rows = vec![vec![0.2, 0.9], vec![0.4, 0.1]];
        let g = guidance(rows.clone());
        assert_eq!(g.values().to_rows(), rows);
        assert!(scale_unit_interval(&table(vec![vec![1.5]]), true, GuidanceSource::ZeroShot).is_err());
    }

    #[test]
    fn combine_examples() {
        let a = guidance(vec![vec![0.8, 1.0]]);
        let b = guidance(vec![vec![0.2, 0.0]]);
        assert_eq!(combine(&a, &b, 0.5).unwrap().values().data()[0], 0.5);
        assert_eq!(combine(&a, &b, 0.25).unwrap().values().data()[1], 0.25);
        assert_eq!(combine(&a, &b, 1.0).unwrap().values(), a.values());
        assert_eq!(combine(&a, &b, 0.0).unwrap().values(), b.values());
        assert_eq!(combine(&a, &b, 0.5).unwrap().source, GuidanceSource::Mixed);
    }

    #[test]
    fn combine_errors() {
        let a = guidance(vec![vec![0.8, 1.0]]);
        let mut b = guidance(vec![vec![0.2, 0.0]]);
        assert!(matches!(combine(&a, &b, 1.5), Err(Error::Contract(_))));
        b.names[1] = "other".into();
        assert!(matches!(combine(&a, &b, 0.5), Err(Error::Alignment(_))));
    }

    #[test]
    fn file_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        let g = guidance(vec![vec![0.1, 1.0 / 3.0], vec![0.0, 0.7]]);
        write_guidance(&p, &g, Some("source: test")).unwrap();
        let back = read_guidance(&p, true, GuidanceSource::ZeroShot).unwrap();
        assert_eq!(back, g);
    }

    fn matrix(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, m), n)
    }

    proptest! {
        #[test]
        fn combine_stays_between_inputs(a in matrix(4, 3), b in matrix(4, 3), omega in 0.0f64..=1.0) {
            let (ga, gb) = (guidance(a), guidance(b));
            let c = combine(&ga, &gb, omega).unwrap();
            for ((&x, &y), &z) in ga.values().data().iter().zip(gb.values().data()).zip(c.values().data()) {
                prop_assert!(z >= x.min(y) && z <= x.max(y));
            }
        }

        #[test]
        fn combine_with_itself_is_identity(a in matrix(3, 2), omega in 0.0f64..=1.0) {
            let g = guidance(a);
            let c = combine(&g, &g, omega).unwrap();
            prop_assert_eq!(c.values(), g.values());
        }

        #[test]
        fn scaling_is_idempotent(raw in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 3), 5)) {
            let once = scale_unit_interval(&table(raw), false, GuidanceSource::SeededTopic).unwrap();
            let twice = scale_unit_interval(&once.to_table(), false, GuidanceSource::SeededTopic).unwrap();
            prop_assert_eq!(once.values().data(), twice.values().data());
        }
    }
}
