use serde::{Deserialize, Serialize};

/// An ordered, real-valued series with optional provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub source: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, source: None }
    }

    pub fn with_source(values: Vec<f64>, source: impl Into<String>) -> Self {
        Self { values, source: Some(source.into()) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}
