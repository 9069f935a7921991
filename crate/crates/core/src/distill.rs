//! Negativity under the three 1-vs-2 cuts and the resulting sufficient
//! condition for GHZ distillation (every cut NPT).

use crate::error::Result;
use crate::matcore::{partial_transpose, Party};
use crate::states::{GhzDiagonalParams, ThreeQubitState};

/// Negativities below this are reported as exactly zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-12;

/// Negativity per cut plus the all-cuts-NPT flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityTriple {
    /// `N_1, N_2, N_3` after clamping.
    pub n: [f64; 3],
    /// Unclamped values, for diagnostics.
    pub raw: [f64; 3],
    pub distillable: bool,
}

impl NegativityTriple {
    pub fn from_raw(raw: [f64; 3]) -> Self {
        let n = raw.map(clamp);
        Self {
            n,
            raw,
            distillable: n.iter().all(|&x| x > 0.0),
        }
    }

    pub fn min(&self) -> f64 {
        self.n.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn clamp(x: f64) -> f64 {
    if x < NEGATIVITY_FLOOR {
        0.0
    } else {
        x
    }
}

/// `(||rho^{T_j}||_1 - 1) / 2` without clamping.
pub fn negativity_raw(state: &ThreeQubitState, party: Party) -> f64 {
    let pt = partial_transpose(state.rho(), party).expect("8x8 by construction");
    (pt.trace_norm() - 1.0) / 2.0
}

pub fn negativity(state: &ThreeQubitState, party: Party) -> f64 {
    clamp(negativity_raw(state, party))
}

/// `N_j = max{0, (l0+ - l0-)/2 - l_{4-j}}` for canonical weights.
pub fn negativity_ghz_params(p: &GhzDiagonalParams) -> Result<[f64; 3]> {
    p.ensure_canonical()?;
    let half = (p.lambda0_plus - p.lambda0_minus) / 2.0;
    let l = p.lambda;
    Ok([l[2], l[1], l[0]].map(|x| (half - x).max(0.0)))
}

/// NPT across every 1-vs-2 cut, a sufficient condition for GHZ distillation.
pub fn ghz_distillable(state: &ThreeQubitState) -> (bool, NegativityTriple) {
    let raw = Party::ALL.map(|p| negativity_raw(state, p));
    let triple = NegativityTriple::from_raw(raw);
    (triple.distillable, triple)
}
