use std::collections::HashMap;

use ndarray::{concatenate, Axis};

use super::{FeatureCatalog, FeatureEntry, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column-wise concatenation of feature tables recorded on the same subjects.
///
/// Rows are aligned by subject id to the order of the first table. A feature
/// name that occurs in more than one table is suffixed with its source set
/// (`name[ComParE]`), and additionally with the table index if that is still
/// ambiguous.
pub fn fuse<T: Scalar>(sets: &[LabeledDataset<T>]) -> Result<LabeledDataset<T>> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidDataset("nothing to fuse".into()))?;
    if sets.len() == 1 {
        return Ok(first.clone());
    }

    let mut aligned = Vec::with_capacity(sets.len());
    for (k, set) in sets.iter().enumerate() {
        let pos: HashMap<&str, usize> = set
            .subjects()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let missing: Vec<&str> = first
            .subjects()
            .iter()
            .filter(|s| !pos.contains_key(s.as_str()))
            .map(String::as_str)
            .collect();
        if !missing.is_empty() || set.n_subjects() != first.n_subjects() {
            return Err(Error::SubjectMismatch(format!(
                "table {k} has {} subjects vs {}; missing {:?}",
                set.n_subjects(),
                first.n_subjects(),
                missing
            )));
        }
        let order: Vec<usize> = first.subjects().iter().map(|s| pos[s.as_str()]).collect();
        let rows = set.select_rows(&order);
        if let Some(i) = (0..rows.n_subjects()).find(|&i| rows.labels()[i] != first.labels()[i]) {
            return Err(Error::LabelDisagreement {
                subject: first.subjects()[i].clone(),
            });
        }
        aligned.push(rows);
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for set in sets {
        for name in set.catalog().names() {
            *counts.entry(name).or_default() += 1;
        }
    }
    let mut entries = Vec::new();
    for (k, set) in sets.iter().enumerate() {
        for e in set.catalog().entries() {
            let name = if counts[e.name.as_str()] > 1 {
                format!("{}[{}]", e.name, e.source)
            } else {
                e.name.clone()
            };
            entries.push((k, FeatureEntry { name, source: e.source }));
        }
    }
    let mut suffixed: HashMap<String, usize> = HashMap::new();
    for (_, e) in &entries {
        *suffixed.entry(e.name.clone()).or_default() += 1;
    }
    let entries: Vec<FeatureEntry> = entries
        .into_iter()
        .map(|(k, mut e)| {
            if suffixed[&e.name] > 1 {
                e.name = format!("{}#{k}", e.name);
            }
            e
        })
        .collect();

    let views: Vec<_> = aligned.iter().map(|d| d.x()).collect();
    let x = concatenate(Axis(1), &views).expect("row counts agree");
    let split = if sets.iter().all(|s| s.split() == first.split()) {
        first.split()
    } else {
        None
    };
    Ok(LabeledDataset::new(
        first.subjects().to_vec(),
        x,
        first.labels().to_vec(),
        FeatureCatalog::new(entries)?,
    )?
    .with_split(split))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, SourceSet};
    use ndarray::Array2;

    fn table(ids: &[&str], width: usize, source: SourceSet, prefix: &str) -> LabeledDataset<f64> {
        let n = ids.len();
        LabeledDataset::new(
            ids.iter().map(|s| s.to_string()).collect(),
            Array2::from_shape_fn((n, width), |(i, j)| (i * 100 + j) as f64),
            ids.iter()
                .enumerate()
                .map(|(i, _)| if i % 2 == 0 { Label::Control } else { Label::Ad })
                .collect(),
            FeatureCatalog::from_names((0..width).map(|j| format!("{prefix}{j}")), source)
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn widths_add_up() {
        let ids = ["a", "b", "c", "d"];
        let fused = fuse(&[
            table(&ids, 88, SourceSet::EGeMaps, "g"),
            table(&ids, 988, SourceSet::EmoBase, "e"),
            table(&ids, 6373, SourceSet::ComParE, "c"),
        ])
        .unwrap();
        assert_eq!(fused.n_features(), 7449);
        assert_eq!(fused.n_subjects(), 4);
        assert_eq!(fused.catalog().entries()[88].source, SourceSet::EmoBase);
    }

    #[test]
    fn single_input_is_identity() {
        let t = table(&["a", "b"], 3, SourceSet::Other, "f");
        assert_eq!(fuse(&[t.clone()]).unwrap(), t);
    }

    #[test]
    fn aligns_by_subject_id() {
        let a = table(&["a", "b"], 1, SourceSet::EmoBase, "x");
        let b = table(&["a", "b"], 1, SourceSet::ComParE, "y");
        let b = b.select_rows(&[1, 0]);
        let fused = fuse(&[a, b]).unwrap();
        assert_eq!(fused.x()[[0, 1]], 0.0);
        assert_eq!(fused.x()[[1, 1]], 100.0);
    }

    #[test]
    fn missing_subject_is_rejected() {
        let a = table(&["a", "b", "c"], 1, SourceSet::EmoBase, "x");
        let b = table(&["a", "b", "z"], 1, SourceSet::ComParE, "y");
        assert!(matches!(fuse(&[a, b]), Err(Error::SubjectMismatch(_))));
    }

    #[test]
    fn label_disagreement_is_rejected() {
        let a = table(&["a", "b"], 1, SourceSet::EmoBase, "x");
        let b = LabeledDataset::new(
            vec!["a".into(), "b".into()],
            Array2::zeros((2, 1)),
            vec![Label::Ad, Label::Ad],
            FeatureCatalog::from_names(["y0"], SourceSet::ComParE).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            fuse(&[a, b]),
            Err(Error::LabelDisagreement { subject }) if subject == "a"
        ));
    }

    #[test]
    fn colliding_names_get_source_suffix() {
        let a = table(&["a", "b"], 2, SourceSet::EmoBase, "f");
        let b = table(&["a", "b"], 2, SourceSet::ComParE, "f");
        let fused = fuse(&[a, b]).unwrap();
        let names: Vec<_> = fused.catalog().names().collect();
        assert_eq!(names, ["f0[EmoBase]", "f1[EmoBase]", "f0[ComParE]", "f1[ComParE]"]);
    }

    #[test]
    fn same_source_collision_gets_table_index() {
        let a = table(&["a"], 1, SourceSet::Other, "f");
        let fused = fuse(&[a.clone(), a]).unwrap();
        let names: Vec<_> = fused.catalog().names().collect();
        assert_eq!(names, ["f0[other]#0", "f0[other]#1"]);
    }
}
