//! The JSON input document shared by all commands.

use serde::Deserialize;

use planar_cc::cc::System;
use planar_cc::solver::trilaterate;
use planar_cc::{Configuration, DistanceSextuple, Masses};

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    F1,
    F2,
    Both,
    Cocircular,
}

impl From<Constraint> for System {
    fn from(c: Constraint) -> System {
        match c {
            Constraint::F1 => System::F1,
            Constraint::F2 => System::F2,
            Constraint::Both => System::Both,
            Constraint::Cocircular => System::Cocircular,
        }
    }
}

/// Multipliers for residual evaluation; `lambda` is the Dziobek-normalized value.
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierInput {
    pub lambda: f64,
    pub eta: Option<f64>,
    pub eta2: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub masses: [f64; 4],
    /// Four points with two or three coordinates each.
    pub positions: Option<Vec<Vec<f64>>>,
    pub distances: Option<DistanceSextuple>,
    pub constraint: Option<Constraint>,
    pub i0: Option<f64>,
    #[serde(alias = "tolerance")]
    pub tol: Option<f64>,
    pub multipliers: Option<MultiplierInput>,
    pub mass_path: Option<Vec<[f64; 4]>>,
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if spec.positions.is_none() && spec.distances.is_none() {
            return Err(CliError::Parse("input needs positions or distances".into()));
        }
        if let Some(i0) = spec.i0 {
            if !(i0 > 0.0 && i0.is_finite()) {
                return Err(CliError::Parse(format!("i0 must be positive, got {i0}")));
            }
        }
        Ok(spec)
    }

    pub fn masses(&self) -> Result<Masses, CliError> {
        Masses::with_massless(self.masses).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn mass_path(&self) -> Result<Vec<Masses>, CliError> {
        let path = self
            .mass_path
            .as_ref()
            .ok_or_else(|| CliError::Parse("sweep needs mass_path".into()))?;
        path.iter()
            .map(|m| Masses::with_massless(*m).map_err(|e| CliError::Parse(e.to_string())))
            .collect()
    }

    fn position_arrays(&self) -> Result<Option<[[f64; 3]; 4]>, CliError> {
        let Some(rows) = &self.positions else {
            return Ok(None);
        };
        if rows.len() != 4 {
            return Err(CliError::Parse(format!("positions needs 4 points, got {}", rows.len())));
        }
        let mut out = [[0.0; 3]; 4];
        for (slot, row) in out.iter_mut().zip(rows) {
            match row.as_slice() {
                [x, y] => *slot = [*x, *y, 0.0],
                [x, y, z] => *slot = [*x, *y, *z],
                _ => return Err(CliError::Parse("each position needs 2 or 3 coordinates".into())),
            }
        }
        Ok(Some(out))
    }

    /// Positions as given, or a planar embedding of the distances.
    pub fn configuration(&self) -> Result<Configuration, CliError> {
        let masses = self.masses()?;
        match self.position_arrays()? {
            Some(p) => Ok(Configuration::new(p, masses)?),
            None => Ok(trilaterate(&self.distances()?, masses)?),
        }
    }

    /// Distances as given, or computed from the positions.
    pub fn distances(&self) -> Result<DistanceSextuple, CliError> {
        if let Some(d) = self.distances {
            return Ok(DistanceSextuple::from_array(d.as_array())?);
        }
        Ok(planar_cc::geometry::mutual_distances(&self.configuration()?)?)
    }
}
