use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ObservationScheme, SparseChoiceModel};
use crate::{Error, Result};

const VALUE_TOL: f64 = 1e-12;

/// Observed marginals y (and optionally interval bounds `[a_t, b_t]`) for the
/// rows of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DataVector {
    scheme: ObservationScheme,
    values: Vec<f64>,
    intervals: Option<Vec<(f64, f64)>>,
}

impl DataVector {
    /// Point-valued data; every value must lie in `[0, 1]`.
    pub fn new(scheme: ObservationScheme, values: Vec<f64>) -> Result<Self> {
        check_len(&scheme, values.len())?;
        if let Some((t, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= -VALUE_TOL && **v <= 1.0 + VALUE_TOL))
        {
            return Err(Error::InvalidData(alloc::format!(
                "value {v} of row {} outside [0,1]",
                scheme.rows()[t]
            )));
        }
        Ok(Self {
            scheme,
            values,
            intervals: None,
        })
    }

    /// Interval-valued data. `values` holds point estimates; bounds may leave
    /// `[0, 1]`, in which case they are one-sided or redundant.
    pub fn with_intervals(
        scheme: ObservationScheme,
        values: Vec<f64>,
        intervals: Vec<(f64, f64)>,
    ) -> Result<Self> {
        check_len(&scheme, values.len())?;
        check_len(&scheme, intervals.len())?;
        for (t, &(a, b)) in intervals.iter().enumerate() {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::InvalidData(alloc::format!(
                    "interval [{a}, {b}] of row {} is empty",
                    scheme.rows()[t]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite value".into()));
        }
        Ok(Self {
            scheme,
            values,
            intervals: Some(intervals),
        })
    }

    pub fn scheme(&self) -> &ObservationScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn intervals(&self) -> Option<&[(f64, f64)]> {
        self.intervals.as_deref()
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.scheme.n()
    }

    pub fn is_point(&self) -> bool {
        self.intervals.is_none()
    }

    /// Largest absolute difference between the values of two vectors.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_len(scheme: &ObservationScheme, got: usize) -> Result<()> {
    if got == scheme.m() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: scheme.m(),
            got,
        })
    }
}

/// y = Aλ.
pub fn exact_marginals(model: &SparseChoiceModel, scheme: &ObservationScheme) -> Result<DataVector> {
    if model.n() != scheme.n() {
        return Err(Error::DimensionMismatch {
            expected: scheme.n(),
            got: model.n(),
        });
    }
    let mut y = alloc::vec![0.0; scheme.m()];
    for atom in model.atoms() {
        for (t, &row) in scheme.rows().iter().enumerate() {
            if scheme.entry(&atom.ranks, row) {
                y[t] += atom.prob;
            }
        }
    }
    for v in &mut y {
        *v = v.clamp(0.0, 1.0);
    }
    DataVector::new(scheme.clone(), y)
}

#[derive(Serialize, Deserialize)]
struct DataRepr {
    scheme: ObservationScheme,
    labels: Vec<String>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intervals: Option<Vec<(f64, f64)>>,
}

impl Serialize for DataVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        DataRepr {
            scheme: self.scheme.clone(),
            labels: self.scheme.labels(),
            values: self.values.clone(),
            intervals: self.intervals.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DataVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = DataRepr::deserialize(d)?;
        if r.labels != r.scheme.labels() {
            return Err(D::Error::custom("labels do not match the scheme's row order"));
        }
        match r.intervals {
            Some(iv) => Self::with_intervals(r.scheme, r.values, iv),
            None => Self::new(r.scheme, r.values),
        }
        .map_err(D::Error::custom)
    }
}
