use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let k = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn from_indices(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch {
                truth: y_true.len(),
                predicted: y_pred.len(),
            });
        }
        let mut m = ConfusionMatrix::new(classes.to_vec());
        for (&t, &p) in y_true.iter().zip(y_pred) {
            let k = classes.len();
            if t >= k || p >= k {
                return Err(Error::UnknownLabel(t.max(p).to_string()));
            }
            m.counts[t][p] += 1;
        }
        Ok(m)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|k| self.counts[k][k]).sum()
    }

    pub fn row_sum(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn col_sum(&self, k: usize) -> u64 {
        self.counts.iter().map(|r| r[k]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Metric whose denominator was zero and was set to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Precision,
    Recall,
    F1,
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricName::Precision => "precision",
            MetricName::Recall => "recall",
            MetricName::F1 => "f1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: IndexMap<String, ClassMetrics>,
    #[serde(rename = "macro")]
    pub macro_avg: ClassMetrics,
    pub weighted: ClassMetrics,
    pub accuracy: f64,
    pub zero_division_flags: BTreeSet<(String, MetricName)>,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Precision, recall, F1 per class plus macro and support-weighted means.
/// Zero denominators yield 0 and a flag.
pub fn report_from_confusion(confusion: ConfusionMatrix) -> Result<EvalReport> {
    let total = confusion.total();
    if total == 0 {
        return Err(Error::EmptyDataset);
    }
    let k = confusion.classes.len();
    let mut per_class = IndexMap::with_capacity(k);
    let mut flags = BTreeSet::new();
    for c in 0..k {
        let label = confusion.classes[c].clone();
        let tp = confusion.get(c, c);
        let support = confusion.row_sum(c);
        let precision = ratio(tp, confusion.col_sum(c)).unwrap_or_else(|| {
            flags.insert((label.clone(), MetricName::Precision));
            0.0
        });
        let recall = ratio(tp, support).unwrap_or_else(|| {
            flags.insert((label.clone(), MetricName::Recall));
            0.0
        });
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            flags.insert((label.clone(), MetricName::F1));
            0.0
        };
        per_class.insert(
            label,
            ClassMetrics {
                precision,
                recall,
                f1,
                support,
            },
        );
    }
    let kf = k as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.values().map(f).sum::<f64>() / kf;
    let wmean =
        |f: fn(&ClassMetrics) -> f64| per_class.values().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64;
    let macro_avg = ClassMetrics {
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f1: mean(|m| m.f1),
        support: total,
    };
    let weighted = ClassMetrics {
        precision: wmean(|m| m.precision),
        recall: wmean(|m| m.recall),
        f1: wmean(|m| m.f1),
        support: total,
    };
    Ok(EvalReport {
        per_class,
        macro_avg,
        weighted,
        accuracy: confusion.trace() as f64 / total as f64,
        zero_division_flags: flags,
        confusion,
    })
}

pub fn compute_report_indices(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<EvalReport> {
    if y_true.is_empty() && y_pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    report_from_confusion(ConfusionMatrix::from_indices(y_true, y_pred, classes)?)
}

/// Report over string labels, each of which must appear in `classes`.
pub fn compute_report<S: AsRef<str>>(y_true: &[S], y_pred: &[S], classes: &[String]) -> Result<EvalReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    let index: IndexMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let lookup = |s: &S| {
        index
            .get(s.as_ref())
            .copied()
            .ok_or_else(|| Error::UnknownLabel(s.as_ref().to_owned()))
    };
    let t = y_true.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    let p = y_pred.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    compute_report_indices(&t, &p, classes)
}

impl EvalReport {
    pub fn classes(&self) -> impl Iterator<Item = &str> + '_ {
        self.per_class.keys().map(String::as_str)
    }

    /// Plain-text table: one row per class, then weighted and macro rows, then accuracy.
    pub fn render_table(&self) -> String {
        let width = self
            .per_class
            .keys()
            .map(|k| k.chars().count())
            .chain(["Weighted average".len()])
            .max()
            .unwrap_or(0);
        let mut out = format!(
            "{:<width$}  {:>9}  {:>6}  {:>6}  {:>7}\n",
            "Class", "Precision", "Recall", "F1", "Support"
        );
        let row = |out: &mut String, name: &str, m: &ClassMetrics| {
            out.push_str(&format!(
                "{name:<width$}  {:>9.4}  {:>6.4}  {:>6.4}  {:>7}\n",
                m.precision, m.recall, m.f1, m.support
            ));
        };
        for (name, m) in &self.per_class {
            row(&mut out, name, m);
        }
        row(&mut out, "Weighted average", &self.weighted);
        row(&mut out, "Macro average", &self.macro_avg);
        out.push_str(&format!("{:<width$}  {:>9.4}\n", "Accuracy", self.accuracy));
        if !self.zero_division_flags.is_empty() {
            let flags: Vec<String> = self
                .zero_division_flags
                .iter()
                .map(|(l, m)| format!("{l}:{m}"))
                .collect();
            out.push_str(&format!("zero-division set to 0: {}\n", flags.join(", ")));
        }
        out
    }
}
