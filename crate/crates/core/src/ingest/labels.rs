use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use super::table::{read_table, write_table, Table};
use crate::error::{Error, Result};

/// Binary `N × M` ground-truth labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMatrix {
    doc_ids: Vec<String>,
    names: Vec<String>,
    data: Vec<u8>,
}

impl LabelMatrix {
    pub fn new(doc_ids: Vec<String>, names: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Contract("label matrix needs at least one column".into()));
        }
        let unique: HashSet<_> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::Contract("label column names must be unique".into()));
        }
        if rows.is_empty() || doc_ids.len() != rows.len() {
            return Err(Error::Dimension(format!(
                "{} doc ids for {} label rows",
                doc_ids.len(),
                rows.len()
            )));
        }
        let m = names.len();
        let mut data = Vec::with_capacity(rows.len() * m);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(Error::Dimension(format!("label row {i} has {} entries", r.len())));
            }
            if r.iter().any(|&v| v > 1) {
                return Err(Error::Contract(format!("label row {i} has a non-binary entry")));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            doc_ids,
            names,
            data,
        })
    }

    /// Labels with default ids `d0..`.
    pub fn from_rows(names: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        let ids = super::table::default_doc_ids(rows.len());
        Self::new(ids, names, rows)
    }

    pub fn n(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.m() + j] == 1
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let m = self.m();
        &self.data[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_count(&self, j: usize) -> usize {
        (0..self.n()).filter(|&i| self.get(i, j)).count()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        let ids = idx.iter().map(|&i| self.doc_ids[i].clone()).collect();
        Self::new(ids, self.names.clone(), rows).expect("row subset of a valid matrix")
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let names = cols.iter().map(|&j| self.names[j].clone()).collect();
        let rows = (0..self.n())
            .map(|i| cols.iter().map(|&j| self.row(i)[j]).collect())
            .collect();
        Self::new(self.doc_ids.clone(), names, rows)
    }

    pub fn to_table(&self) -> Table {
        Table {
            doc_ids: self.doc_ids.clone(),
            names: self.names.clone(),
            rows: (0..self.n())
                .map(|i| self.row(i).iter().map(|&v| f64::from(v)).collect())
                .collect(),
        }
    }

    pub fn from_table(t: Table) -> Result<Self> {
        let mut rows = Vec::with_capacity(t.rows.len());
        for (i, r) in t.rows.iter().enumerate() {
            let row = r
                .iter()
                .map(|&v| match v {
                    x if x == 0.0 => Ok(0u8),
                    x if x == 1.0 => Ok(1u8),
                    other => Err(Error::Contract(format!(
                        "label row {i} has value {other}, expected 0 or 1"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(t.doc_ids, t.names, rows)
    }
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelMatrix> {
    LabelMatrix::from_table(read_table(path)?)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelMatrix, comment: Option<&str>) -> Result<()> {
    write_table(path, &labels.to_table(), comment, |v| format!("{}", v as u8))
}

/// Keeps a category when it has at least `min_count` positives or covers at
/// least `min_fraction` of documents, and its name is not listed in
/// `drop_names` (case-insensitive).
pub fn filter_categories(
    labels: &LabelMatrix,
    min_count: usize,
    min_fraction: f64,
    drop_names: &[String],
) -> Result<LabelMatrix> {
    if !(min_fraction >= 0.0) {
        return Err(Error::Contract(format!("min_fraction {min_fraction} is negative")));
    }
    let drop: HashSet<String> = drop_names.iter().map(|s| s.to_lowercase()).collect();
    let n = labels.n() as f64;
    let keep: Vec<usize> = (0..labels.m())
        .filter(|&j| {
            let count = labels.column_count(j);
            let frequent = count >= min_count || count as f64 / n >= min_fraction;
            frequent && !drop.contains(&labels.names()[j].to_lowercase())
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::Contract("category filter removed every column".into()));
    }
    for j in (0..labels.m()).filter(|j| !keep.contains(j)) {
        log::info!("dropping category {:?}", labels.names()[j]);
    }
    labels.select_columns(&keep)
}

/// Topic surface name → seed words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedSpec {
    pub topics: BTreeMap<String, Vec<String>>,
    /// Topic names in file order.
    pub order: Vec<String>,
}

impl SeedSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SeedSpec::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, words) = line
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("seed line {} has no ':'", lineno + 1)))?;
            let name = name.trim().to_string();
            let words: Vec<String> = words
                .split(',')
                .map(|w| w.trim().to_string())
                .filter(|w| !w.is_empty())
                .collect();
            if words.is_empty() {
                return Err(Error::Config(format!("topic {name:?} has no seed words")));
            }
            if !(4..=6).contains(&words.len()) {
                log::warn!("topic {name:?} has {} seed words (4 to 6 expected)", words.len());
            }
            if spec.topics.insert(name.clone(), words).is_some() {
                return Err(Error::Config(format!("topic {name:?} listed twice")));
            }
            spec.order.push(name);
        }
        Ok(spec)
    }

    /// Checks that the topics match the label columns.
    pub fn check_against(&self, labels: &LabelMatrix) -> Result<()> {
        for name in labels.names() {
            if !self.topics.contains_key(name) {
                return Err(Error::Alignment(format!("no seed words for topic {name:?}")));
            }
        }
        Ok(())
    }
}

pub fn read_seeds(path: impl AsRef<Path>) -> Result<SeedSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SeedSpec::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_with_counts(n: usize, counts: &[usize]) -> LabelMatrix {
        let names = (0..counts.len()).map(|j| format!("t{j}")).collect();
        let rows = (0..n)
            .map(|i| counts.iter().map(|&c| u8::from(i < c)).collect())
            .collect();
        LabelMatrix::from_rows(names, rows).unwrap()
    }

    #[test]
    fn keeps_frequent_and_drops_empty() {
        let l = labels_with_counts(100, &[31, 0]);
        let f = filter_categories(&l, 30, 0.01, &[]).unwrap();
        assert_eq!(f.names(), &["t0".to_string()]);
    }

    #[test]
    fn count_rule_keeps_rare_fraction() {
        let l = labels_with_counts(10_000, &[50, 20]);
        let f = filter_categories(&l, 30, 0.01, &[]).unwrap();
        assert_eq!(f.names(), &["t0".to_string()]);
    }

    #[test]
    fn fraction_rule_keeps_small_corpora() {
        let l = labels_with_counts(200, &[3, 1]);
        let f = filter_categories(&l, 30, 0.01, &[]).unwrap();
        assert_eq!(f.names(), &["t0".to_string()]);
    }

    #[test]
    fn drop_names_and_idempotence() {
        let mut l = labels_with_counts(100, &[40, 40, 40]);
        l.names[2] = "Miscellaneous".into();
        let drop = vec!["miscellaneous".to_string()];
        let once = filter_categories(&l, 30, 0.01, &drop).unwrap();
        assert_eq!(once.m(), 2);
        let twice = filter_categories(&once, 30, 0.01, &drop).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn removing_everything_is_an_error() {
        let l = labels_with_counts(100, &[0, 0]);
        assert!(matches!(filter_categories(&l, 30, 0.01, &[]), Err(Error::Contract(_))));
    }

    #[test]
    fn non_binary_label_is_rejected() {
        let t = Table {
            doc_ids: vec!["a".into()],
            names: vec!["x".into()],
            rows: vec![vec![0.5]],
        };
        assert!(LabelMatrix::from_table(t).is_err());
    }

    #[test]
    fn seed_spec_parses_lines() {
        let s = SeedSpec::parse("food: pizza, pasta, menu, dish\nservice: waiter, staff, rude, friendly\n")
            .unwrap();
        assert_eq!(s.order, vec!["food", "service"]);
        assert_eq!(s.topics["service"].len(), 4);
        assert!(SeedSpec::parse("food pizza").is_err());
        assert!(SeedSpec::parse("food: ,").is_err());
    }
}
