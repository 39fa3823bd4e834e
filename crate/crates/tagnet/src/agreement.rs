//! Inter-rater agreement statistics: label taxonomy, confusion matrices,
//! Cohen's kappa, percent agreement and the cumulative-frequency
//! stabilization rule for subsample sizing.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Result, TagnetError};

/// The default label taxonomy (twelve cultural-ecosystem-service classes).
pub const DEFAULT_TAXONOMY_CSV: &str = include_str!("../assets/ces_taxonomy.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CesClass {
    pub id: u32,
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Taxonomy {
    pub classes: Vec<CesClass>,
}

impl Taxonomy {
    pub fn default_ces() -> Taxonomy {
        Taxonomy::from_csv_str(DEFAULT_TAXONOMY_CSV).expect("bundled taxonomy is valid")
    }

    pub fn from_csv_str(content: &str) -> Result<Taxonomy> {
        let mut rdr = csv::Reader::from_reader(content.as_bytes());
        let mut classes = Vec::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| TagnetError::MalformedRecord {
                line: idx + 2,
                message: e.to_string(),
            })?;
            let id: u32 = row
                .get(0)
                .unwrap_or("")
                .parse()
                .map_err(|_| TagnetError::MalformedRecord {
                    line: idx + 2,
                    message: "class id must be an integer".into(),
                })?;
            classes.push(CesClass {
                id,
                name: row.get(1).unwrap_or("").to_owned(),
                description: row.get(2).unwrap_or("").to_owned(),
            });
        }
        let taxonomy = Taxonomy { classes };
        taxonomy.validate()?;
        Ok(taxonomy)
    }

    pub fn from_csv_file(path: &Path) -> Result<Taxonomy> {
        let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Taxonomy::from_csv_str(&content)
    }

    fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(TagnetError::InvalidConfig("taxonomy has no classes".into()));
        }
        let mut ids: Vec<u32> = self.classes.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.classes.len() {
            return Err(TagnetError::InvalidConfig(
                "taxonomy class ids are not unique".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, class_id: u32) -> Option<usize> {
        self.classes.iter().position(|c| c.id == class_id)
    }
}

/// Item id -> class id, from one rater or source.
pub type LabelSequence = BTreeMap<String, u32>;

/// Label file: CSV `item_id,class_id`.
pub fn load_labels(path: &Path) -> Result<LabelSequence> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(content.as_bytes());
    let mut labels = LabelSequence::new();
    for (idx, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| TagnetError::MalformedRecord {
            line: idx + 2,
            message: e.to_string(),
        })?;
        let item = row.get(0).unwrap_or("").to_owned();
        let class: u32 = row
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| TagnetError::MalformedRecord {
                line: idx + 2,
                message: "class id must be an integer".into(),
            })?;
        labels.insert(item, class);
    }
    Ok(labels)
}

/// k x k cross-tabulation; rows = rater A, columns = rater B, class order
/// fixed by the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub class_ids: Vec<u32>,
    pub counts: Vec<Vec<u64>>,
    pub n: u64,
}

impl ConfusionMatrix {
    pub fn from_counts(class_ids: Vec<u32>, counts: Vec<Vec<u64>>) -> ConfusionMatrix {
        let n = counts.iter().flatten().sum();
        ConfusionMatrix {
            class_ids,
            counts,
            n,
        }
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let k = self.counts.len();
        (0..k).map(|j| (0..k).map(|i| self.counts[i][j]).sum()).collect()
    }

    pub fn transposed(&self) -> ConfusionMatrix {
        let k = self.counts.len();
        let counts = (0..k)
            .map(|i| (0..k).map(|j| self.counts[j][i]).collect())
            .collect();
        ConfusionMatrix {
            class_ids: self.class_ids.clone(),
            counts,
            n: self.n,
        }
    }
}

/// Cross-tabulate two label sequences over an identical item set.
pub fn confusion_matrix(
    a: &LabelSequence,
    b: &LabelSequence,
    taxonomy: &Taxonomy,
) -> Result<ConfusionMatrix> {
    let only_in_a: Vec<String> = a.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
    let only_in_b: Vec<String> = b.keys().filter(|k| !a.contains_key(*k)).cloned().collect();
    if !only_in_a.is_empty() || !only_in_b.is_empty() {
        return Err(TagnetError::ItemSetMismatch { only_in_a, only_in_b });
    }
    if a.is_empty() {
        return Err(TagnetError::EmptyMatrix);
    }
    let k = taxonomy.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (item, &class_a) in a {
        let class_b = b[item];
        let i = taxonomy.index_of(class_a).ok_or(TagnetError::UnknownClass {
            id: class_a,
            item: item.clone(),
        })?;
        let j = taxonomy.index_of(class_b).ok_or(TagnetError::UnknownClass {
            id: class_b,
            item: item.clone(),
        })?;
        counts[i][j] += 1;
    }
    Ok(ConfusionMatrix::from_counts(
        taxonomy.classes.iter().map(|c| c.id).collect(),
        counts,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub n: u64,
    /// Both raters constant and identical: kappa is reported as 1 but the
    /// statistic is degenerate (p_e = 1).
    pub degenerate: bool,
}

/// Descriptive agreement band for a kappa value (reporting only, never used
/// in logic). Bands follow the common none/minimal/weak/moderate/strong/
/// almost-perfect convention.
pub fn kappa_band(kappa: f64) -> &'static str {
    if kappa <= 0.0 {
        "none"
    } else if kappa <= 0.20 {
        "minimal"
    } else if kappa < 0.40 {
        "fair"
    } else if kappa < 0.60 {
        "weak-to-moderate"
    } else if kappa < 0.80 {
        "moderate-to-strong"
    } else if kappa <= 0.90 {
        "strong"
    } else {
        "almost perfect"
    }
}

/// Cohen's kappa: (p_o - p_e) / (1 - p_e) with p_o = trace/N and
/// p_e = sum_i row_i * col_i / N^2.
pub fn cohens_kappa(m: &ConfusionMatrix) -> Result<KappaResult> {
    if m.n == 0 {
        return Err(TagnetError::EmptyMatrix);
    }
    let n = m.n as f64;
    let p_o = m.trace() as f64 / n;
    let rows = m.row_sums();
    let cols = m.col_sums();
    let p_e: f64 = rows
        .iter()
        .zip(cols.iter())
        .map(|(&r, &c)| (r as f64 / n) * (c as f64 / n))
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // Both raters constant and equal.
        return Ok(KappaResult {
            kappa: 1.0,
            observed_agreement: p_o,
            expected_agreement: p_e,
            n: m.n,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (p_o - p_e) / (1.0 - p_e),
        observed_agreement: p_o,
        expected_agreement: p_e,
        n: m.n,
        degenerate: false,
    })
}

/// Observed agreement: trace / N.
pub fn percent_agreement(m: &ConfusionMatrix) -> Result<f64> {
    if m.n == 0 {
        return Err(TagnetError::EmptyMatrix);
    }
    Ok(m.trace() as f64 / m.n as f64)
}

/// Per-class cumulative percentage series over successive label batches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeCurves {
    pub class_ids: Vec<u32>,
    /// One series per class, each of length = batch count.
    pub series: Vec<Vec<f64>>,
}

/// After each batch, the percentage of all items seen so far that fall in
/// each class.
pub fn cumulative_class_curve(
    batches: &[LabelSequence],
    taxonomy: &Taxonomy,
) -> Result<CumulativeCurves> {
    if batches.is_empty() {
        return Err(TagnetError::InvalidInput("no batches given".into()));
    }
    let k = taxonomy.len();
    let mut cumulative = vec![0u64; k];
    let mut total = 0u64;
    let mut series = vec![Vec::with_capacity(batches.len()); k];
    for (idx, batch) in batches.iter().enumerate() {
        if batch.is_empty() {
            return Err(TagnetError::EmptyBatch { index: idx });
        }
        for (item, &class) in batch {
            let i = taxonomy.index_of(class).ok_or(TagnetError::UnknownClass {
                id: class,
                item: item.clone(),
            })?;
            cumulative[i] += 1;
            total += 1;
        }
        for (i, s) in series.iter_mut().enumerate() {
            s.push(100.0 * cumulative[i] as f64 / total as f64);
        }
    }
    Ok(CumulativeCurves {
        class_ids: taxonomy.classes.iter().map(|c| c.id).collect(),
        series,
    })
}

/// Smallest batch index t such that, for every class, each of the last
/// `window` consecutive batch-to-batch changes ending at t is below
/// `epsilon_pct`. Returns None when the curves never stabilize.
pub fn stabilization_point(
    curves: &CumulativeCurves,
    window: usize,
    epsilon_pct: f64,
) -> Result<Option<usize>> {
    if window == 0 {
        return Err(TagnetError::InvalidConfig("window must be >= 1".into()));
    }
    if epsilon_pct <= 0.0 {
        return Err(TagnetError::InvalidConfig("epsilon must be > 0".into()));
    }
    let len = curves.series.first().map_or(0, |s| s.len());
    for t in window..len {
        let stable = curves.series.iter().all(|s| {
            (t - window + 1..=t).all(|i| (s[i] - s[i - 1]).abs() < epsilon_pct)
        });
        if stable {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
