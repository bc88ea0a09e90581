//! Reference measures of genuine multipartite entanglement for pure states.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ergotropy::{enumerate_bipartitions, BipartitionMode};
use crate::error::{Error, Result};
use crate::hilbert::{schmidt_squared, Bipartition, PureState};

fn all_cuts(state: &PureState) -> Result<Vec<Bipartition>> {
    let n = state.dims().len();
    if n < 2 {
        return Err(Error::InvalidArgument("entanglement measures need at least two subsystems".into()));
    }
    Ok(enumerate_bipartitions(n, BipartitionMode::All)?.into_iter().map(|(cut, _)| cut).collect())
}

/// Generalized geometric measure: one minus the largest squared Schmidt
/// coefficient found over all bipartitions.
pub fn ggm(state: &PureState) -> Result<f64> {
    let largest = all_cuts(state)?
        .par_iter()
        .map(|cut| schmidt_squared(state, cut).map(|s| s[0]))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((1.0 - largest).max(0.0))
}

/// Purity of the marginal on side A of `cut`.
pub fn marginal_purity(state: &PureState, cut: &Bipartition) -> Result<f64> {
    let psi = state.cut_matrix(cut)?;
    // Tr ρ_A² = ||Ψ Ψ†||_F², formed on the smaller side
    let gram = if psi.nrows() <= psi.ncols() { &psi * psi.adjoint() } else { psi.adjoint() * &psi };
    Ok(gram.iter().map(|z| z.norm_sqr()).sum())
}

/// Smallest `√(2(1 − Tr ρ_A²))` over all bipartitions.
pub fn gme_concurrence(state: &PureState) -> Result<f64> {
    let smallest = all_cuts(state)?
        .par_iter()
        .map(|cut| marginal_purity(state, cut).map(|p| (2.0 * (1.0 - p)).max(0.0).sqrt()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(smallest)
}

/// Min-max rescaling onto `[0, 1]`.
pub fn rescale_series(values: &[f64]) -> Result<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 || !(max > min) {
        return Err(Error::ConstantSeries);
    }
    Ok(values.iter().map(|v| (v - min) / (max - min)).collect())
}

/// Several measures sampled on a common parameter grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasureSeries {
    inputs: Vec<f64>,
    values: BTreeMap<String, Vec<f64>>,
}

impl MeasureSeries {
    pub fn new(inputs: Vec<f64>) -> Self {
        Self { inputs, values: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.inputs.len() {
            return Err(Error::DimensionMismatch { expected: self.inputs.len(), got: values.len() });
        }
        self.values.insert(name.to_string(), values);
        Ok(())
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.values.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Every measure rescaled independently.
    pub fn rescaled(&self) -> Result<MeasureSeries> {
        let values = self
            .values
            .iter()
            .map(|(k, v)| Ok((k.clone(), rescale_series(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(MeasureSeries { inputs: self.inputs.clone(), values })
    }
}
