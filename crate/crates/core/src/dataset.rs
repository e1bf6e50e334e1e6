//! Tabular datasets of numeric and categorical attributes.
//!
//! The text format is a plain comma-separated table whose header declares the
//! kind of every column: `num:<name>`, `cat:<name>`, or (at most once)
//! `label:<name>` for ground-truth labels. Row order defines point indices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

/// One attribute value. Categorical values are interned per column; the code
/// indexes into [`Dataset::levels`] for that column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<Attribute>,
    records: Vec<Vec<Value>>,
    levels: Vec<Vec<String>>,
    truth: Option<Vec<String>>,
    label_name: Option<String>,
    /// Position of the label column in the original header, for re-serialization.
    label_position: Option<usize>,
}

/// Tokens treated as a missing value. Missing values are rejected, never imputed.
fn is_missing(token: &str) -> bool {
    token.is_empty() || token == "?"
}

enum Column {
    Attr(usize),
    Label,
}

impl Dataset {
    /// Parses the header-declared CSV format. Data rows are numbered from 1 in errors.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();

        let header = loop {
            match lines.next() {
                None => return Err(Error::Empty),
                Some((_, line)) => {
                    let line = line.map_err(|e| Error::Header(e.to_string()))?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
            }
        };

        let mut schema = Vec::new();
        let mut columns = Vec::new();
        let mut label_name = None;
        let mut label_position = None;
        for (pos, token) in header.trim_end_matches('\r').split(',').enumerate() {
            let token = token.trim();
            let (kind, name) = token
                .split_once(':')
                .ok_or_else(|| Error::Header(format!("column `{token}` lacks a kind prefix")))?;
            if name.is_empty() {
                return Err(Error::Header(format!("column {} has an empty name", pos + 1)));
            }
            match kind {
                "num" => {
                    columns.push(Column::Attr(schema.len()));
                    schema.push(Attribute {
                        name: name.to_string(),
                        kind: AttributeKind::Numeric,
                    });
                }
                "cat" => {
                    columns.push(Column::Attr(schema.len()));
                    schema.push(Attribute {
                        name: name.to_string(),
                        kind: AttributeKind::Categorical,
                    });
                }
                "label" => {
                    if label_name.is_some() {
                        return Err(Error::Header("more than one label column".into()));
                    }
                    label_name = Some(name.to_string());
                    label_position = Some(pos);
                    columns.push(Column::Label);
                }
                other => {
                    return Err(Error::Header(format!("unknown column kind `{other}`")));
                }
            }
        }
        if schema.is_empty() {
            return Err(Error::Header("no attribute columns".into()));
        }

        let mut interners: Vec<HashMap<String, u32>> = vec![HashMap::new(); schema.len()];
        let mut levels: Vec<Vec<String>> = vec![Vec::new(); schema.len()];
        let mut records = Vec::new();
        let mut truth = label_name.as_ref().map(|_| Vec::new());
        let mut row = 0;

        for (_, line) in lines {
            let line = line.map_err(|e| Error::Parse {
                row: row + 1,
                message: e.to_string(),
            })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            row += 1;
            let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
            if tokens.len() != columns.len() {
                return Err(Error::Arity {
                    row,
                    expected: columns.len(),
                    found: tokens.len(),
                });
            }
            let mut record = Vec::with_capacity(schema.len());
            for (token, column) in tokens.iter().zip(&columns) {
                let column_name = match column {
                    Column::Attr(a) => &schema[*a].name,
                    Column::Label => label_name.as_ref().expect("label column has a name"),
                };
                if is_missing(token) {
                    return Err(Error::MissingValue {
                        row,
                        column: column_name.clone(),
                    });
                }
                match column {
                    Column::Label => truth
                        .as_mut()
                        .expect("label column implies truth vector")
                        .push(token.to_string()),
                    Column::Attr(a) => match schema[*a].kind {
                        AttributeKind::Numeric => {
                            let v: f64 = token.parse().map_err(|_| Error::Parse {
                                row,
                                message: format!("`{token}` is not a number ({column_name})"),
                            })?;
                            if !v.is_finite() {
                                return Err(Error::Parse {
                                    row,
                                    message: format!("non-finite value in `{column_name}`"),
                                });
                            }
                            record.push(Value::Num(v));
                        }
                        AttributeKind::Categorical => {
                            let next = levels[*a].len() as u32;
                            let code = *interners[*a].entry(token.to_string()).or_insert_with(|| {
                                levels[*a].push(token.to_string());
                                next
                            });
                            record.push(Value::Cat(code));
                        }
                    },
                }
            }
            records.push(record);
        }

        if records.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            schema,
            records,
            levels,
            truth,
            label_name,
            label_position,
        })
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_csv_reader(text.as_bytes())
    }

    /// Builds an all-numeric dataset with attributes named `x0, x1, ...`.
    pub fn from_numeric_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let arity = rows.first().ok_or(Error::Empty)?.len();
        if arity == 0 {
            return Err(Error::Schema("records have no attributes".into()));
        }
        let mut records = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != arity {
                return Err(Error::Arity {
                    row: i + 1,
                    expected: arity,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    row: i + 1,
                    message: "non-finite value".into(),
                });
            }
            records.push(row.into_iter().map(Value::Num).collect());
        }
        let schema = (0..arity)
            .map(|a| Attribute {
                name: format!("x{a}"),
                kind: AttributeKind::Numeric,
            })
            .collect();
        Ok(Self {
            schema,
            records,
            levels: vec![Vec::new(); arity],
            truth: None,
            label_name: None,
            label_position: None,
        })
    }

    /// Attaches (or replaces) ground-truth labels.
    pub fn with_truth_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} records",
                labels.len(),
                self.len()
            )));
        }
        if self.label_name.is_none() {
            self.label_name = Some("label".into());
            self.label_position = Some(self.schema.len());
        }
        self.truth = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn schema(&self) -> &[Attribute] {
        &self.schema
    }

    pub fn record(&self, i: usize) -> &[Value] {
        &self.records[i]
    }

    pub fn records(&self) -> &[Vec<Value>] {
        &self.records
    }

    /// Symbol table of a categorical column (empty for numeric columns).
    pub fn levels(&self, column: usize) -> &[String] {
        &self.levels[column]
    }

    pub fn truth_labels(&self) -> Option<&[String]> {
        self.truth.as_deref()
    }

    pub fn label_name(&self) -> Option<&str> {
        self.label_name.as_deref()
    }

    pub fn is_all_numeric(&self) -> bool {
        self.schema.iter().all(|a| a.kind == AttributeKind::Numeric)
    }

    pub fn is_all_categorical(&self) -> bool {
        self.schema.iter().all(|a| a.kind == AttributeKind::Categorical)
    }

    /// Point coordinates when the dataset has exactly two numeric attributes.
    pub fn coords_2d(&self) -> Option<Vec<[f64; 2]>> {
        if self.schema.len() != 2 || !self.is_all_numeric() {
            return None;
        }
        Some(
            self.records
                .iter()
                .map(|r| match (r[0], r[1]) {
                    (Value::Num(x), Value::Num(y)) => [x, y],
                    _ => unreachable!("schema is numeric"),
                })
                .collect(),
        )
    }

    /// Dataset whose record `i` is the original record `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {n} records",
                order.len()
            )));
        }
        for &o in order {
            if o >= n || std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(Self {
            schema: self.schema.clone(),
            records: order.iter().map(|&o| self.records[o].clone()).collect(),
            levels: self.levels.clone(),
            truth: self
                .truth
                .as_ref()
                .map(|t| order.iter().map(|&o| t[o].clone()).collect()),
            label_name: self.label_name.clone(),
            label_position: self.label_position,
        })
    }

    /// Serializes back to the header-declared CSV format.
    ///
    /// Numbers use Rust's shortest round-trip formatting, so parsing the output
    /// reproduces every value exactly.
    pub fn to_csv_string(&self) -> String {
        let label_at = self.truth.as_ref().and(self.label_position);
        let mut out = String::new();
        let mut header: Vec<String> = self
            .schema
            .iter()
            .map(|a| match a.kind {
                AttributeKind::Numeric => format!("num:{}", a.name),
                AttributeKind::Categorical => format!("cat:{}", a.name),
            })
            .collect();
        if let (Some(pos), Some(name)) = (label_at, &self.label_name) {
            header.insert(pos.min(header.len()), format!("label:{name}"));
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, record) in self.records.iter().enumerate() {
            let mut cells: Vec<String> = record
                .iter()
                .enumerate()
                .map(|(a, v)| match v {
                    Value::Num(x) => format!("{x:?}"),
                    Value::Cat(c) => self.levels[a][*c as usize].clone(),
                })
                .collect();
            if let (Some(pos), Some(truth)) = (label_at, &self.truth) {
                cells.insert(pos.min(cells.len()), truth[i].clone());
            }
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}
