//! Input documents describing a three-qubit state.
//!
//! Complex numbers are written as `[re, im]` pairs. The four forms are
//!
//! ```json
//! {"type": "matrix", "rho": [[[0.5, 0.0], ...], ...]}
//! {"type": "ghz", "lambda0_plus": 0.4, "lambda0_minus": 0.0, "lambda1": 0.1, "lambda2": 0.1, "lambda3": 0.1}
//! {"type": "pure", "amplitudes": [[0.7071067811865476, 0.0], ..., [0.7071067811865476, 0.0]]}
//! {"type": "mixture", "components": [{"weight": 0.6, "state": {...}}, ...]}
//! ```

use std::path::Path;

use anyhow::{bail, Context};
use serde::Deserialize;
use triqap::states::from_ghz_params;
use triqap::{ComplexMatrix, GhzDiagonalParams, ThreeQubitState, C64};

use crate::Failure;

/// Squared norm of a `pure` amplitude list must be 1 within this.
const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StateSpec {
    Matrix {
        rho: Vec<Vec<[f64; 2]>>,
    },
    Ghz {
        lambda0_plus: f64,
        lambda0_minus: f64,
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
    },
    Pure {
        amplitudes: Vec<[f64; 2]>,
    },
    Mixture {
        components: Vec<Component>,
    },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub weight: f64,
    pub state: StateSpec,
}

fn c(pair: &[f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text)
            .context("cannot parse state document")
            .map_err(Failure::Usage)
    }

    /// Reads a document from a file, or from standard input when `path` is `-`.
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin()).context("cannot read standard input")
        } else {
            std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
        };
        Self::parse(&text.map_err(Failure::Usage)?)
    }

    /// Checks the document's shape, then the physical constraints.
    pub fn build(&self) -> Result<ThreeQubitState, Failure> {
        self.check_shape().map_err(Failure::Usage)?;
        Ok(self.build_checked()?)
    }

    fn check_shape(&self) -> anyhow::Result<()> {
        match self {
            StateSpec::Matrix { rho } => {
                if rho.len() != 8 || rho.iter().any(|row| row.len() != 8) {
                    bail!("\"rho\" must be 8 rows of 8 [re, im] pairs");
                }
            }
            StateSpec::Pure { amplitudes } => {
                if amplitudes.len() != 8 {
                    bail!("\"amplitudes\" must hold 8 [re, im] pairs, found {}", amplitudes.len());
                }
            }
            StateSpec::Mixture { components } => {
                if components.is_empty() {
                    bail!("\"components\" is empty");
                }
                for part in components {
                    part.state.check_shape()?;
                }
            }
            StateSpec::Ghz { .. } => {}
        }
        Ok(())
    }

    fn build_checked(&self) -> triqap::Result<ThreeQubitState> {
        match self {
            StateSpec::Matrix { rho } => ThreeQubitState::new(ComplexMatrix::from_fn(8, 8, |r, k| c(&rho[r][k]))),
            StateSpec::Ghz {
                lambda0_plus,
                lambda0_minus,
                lambda1,
                lambda2,
                lambda3,
            } => from_ghz_params(&GhzDiagonalParams::new(
                *lambda0_plus,
                *lambda0_minus,
                [*lambda1, *lambda2, *lambda3],
            )?),
            StateSpec::Pure { amplitudes } => {
                let amps: Vec<C64> = amplitudes.iter().map(c).collect();
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(triqap::Error::InvalidInput(format!(
                        "amplitudes have squared norm {norm}, expected 1"
                    )));
                }
                ThreeQubitState::from_pure(&amps)
            }
            StateSpec::Mixture { components } => {
                let parts = components
                    .iter()
                    .map(|p| Ok((p.weight, p.state.build_checked()?)))
                    .collect::<triqap::Result<Vec<_>>>()?;
                ThreeQubitState::mixture(&parts)
            }
        }
    }
}
