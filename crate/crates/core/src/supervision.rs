//! Labeled points used to steer supervised cutting.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupervisionSet {
    entries: Vec<(usize, String)>,
}

impl SupervisionSet {
    /// `entries` are `(0-based point index, label)`; indices must be distinct and below `n`.
    pub fn new(entries: Vec<(usize, String)>, n: usize) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for (i, _) in &entries {
            if *i >= n {
                return Err(Error::IndexOutOfRange { index: i + 1, len: n });
            }
            if !seen.insert(*i) {
                return Err(Error::InvalidParameter(format!("point {} labeled twice", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    /// Parses `index,label` rows (1-based indices). A first line starting with
    /// `index` is taken as a header.
    pub fn from_csv_str(text: &str, n: usize) -> Result<Self> {
        let mut entries = Vec::new();
        let mut row = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            row += 1;
            if row == 1 && line.to_ascii_lowercase().starts_with("index") {
                continue;
            }
            let (idx, label) = line.split_once(',').ok_or_else(|| Error::Parse {
                row,
                message: "expected `index,label`".into(),
            })?;
            let idx: usize = idx.trim().parse().map_err(|_| Error::Parse {
                row,
                message: format!("`{}` is not an index", idx.trim()),
            })?;
            let label = label.trim();
            if idx == 0 || label.is_empty() {
                return Err(Error::Parse {
                    row,
                    message: "indices are 1-based and labels non-empty".into(),
                });
            }
            entries.push((idx - 1, label.to_string()));
        }
        Self::new(entries, n)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("index,label\n");
        for (i, l) in &self.entries {
            out.push_str(&format!("{},{}\n", i + 1, l));
        }
        out
    }

    /// Labels `count` points drawn uniformly without replacement from `truth`.
    pub fn sample(truth: &[String], count: usize, seed: u64) -> Result<Self> {
        if count > truth.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot label {count} of {} points",
                truth.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = sample(&mut rng, truth.len(), count).into_vec();
        picked.sort_unstable();
        Ok(Self {
            entries: picked.into_iter().map(|i| (i, truth[i].clone())).collect(),
        })
    }

    pub fn entries(&self) -> &[(usize, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_labels(&self) -> usize {
        self.entries.iter().map(|(_, l)| l).collect::<HashSet<_>>().len()
    }

    pub fn label_of(&self, i: usize) -> Option<&str> {
        self.entries.iter().find(|(j, _)| *j == i).map(|(_, l)| l.as_str())
    }
}
