use serde::{Deserialize, Serialize};

use crate::dataset::Label;

/// Binary confusion counts with AD as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn from_predictions(predicted: &[Label], truth: &[Label]) -> Self {
        assert_eq!(predicted.len(), truth.len(), "prediction/truth length");
        let mut m = Self::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            m.record(p, t);
        }
        m
    }

    pub fn record(&mut self, predicted: Label, truth: Label) {
        match (predicted, truth) {
            (Label::Ad, Label::Ad) => self.tp += 1,
            (Label::Ad, Label::Control) => self.fp += 1,
            (Label::Control, Label::Control) => self.tn += 1,
            (Label::Control, Label::Ad) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// F1 of the AD class, 2tp / (2tp + fp + fn); 0 when undefined.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }

    /// F1 of the Control class.
    pub fn f1_control(&self) -> f64 {
        let denom = 2 * self.tn + self.fn_ + self.fp;
        if denom == 0 {
            0.0
        } else {
            (2 * self.tn) as f64 / denom as f64
        }
    }

    pub fn macro_f1(&self) -> f64 {
        (self.f1() + self.f1_control()) / 2.0
    }
}

/// Fraction of matching labels.
pub fn accuracy_of(predicted: &[Label], truth: &[Label]) -> f64 {
    ConfusionMatrix::from_predictions(predicted, truth).accuracy()
}
