//! Output documents and their JSON / CSV renderings.
//!
//! Every number is rounded to 12 significant digits before it is written.
//! Flags are threshold functions of the printed numbers:
//!
//! - `useful`: `min f > 1/2 + tol`
//! - `npt_all_cuts`: `min negativity > tol`
//! - `violates_*`: Mermin value `> 2 + tol`

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use triqap::distill::ghz_distillable;
use triqap::harness::CampaignReport;
use triqap::mermin::{
    general_sweep_count, mermin_max_general_from, mermin_max_symmetric_decomposed, GeneralBudget, SymmetricBudget,
    CLASSICAL_BOUND,
};
use triqap::protosim::FidelityEstimate;
use triqap::states::depolarize_to_ghz;
use triqap::telecap::{capability, USEFUL_THRESHOLD};
use triqap::{GhzDiagonalParams, ThreeQubitState};

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form used in CSV cells: plain decimals, exponent notation below 1e-4.
pub fn cell(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn sig12_all<const N: usize>(x: [f64; N]) -> [f64; N] {
    x.map(sig12)
}

fn min(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn useful(f: &[f64], tol: f64) -> bool {
    min(f) > USEFUL_THRESHOLD + tol
}

pub fn npt(n: &[f64], tol: f64) -> bool {
    min(n) > tol
}

pub fn violates(mermin: f64, tol: f64) -> bool {
    mermin > CLASSICAL_BOUND + tol
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct GhzParamsDoc {
    pub lambda0_plus: f64,
    pub lambda0_minus: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl From<&GhzDiagonalParams> for GhzParamsDoc {
    fn from(p: &GhzDiagonalParams) -> Self {
        let [a, b, c, d, e] = sig12_all(p.as_array());
        Self {
            lambda0_plus: a,
            lambda0_minus: b,
            lambda1: c,
            lambda2: d,
            lambda3: e,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Flags {
    pub useful: bool,
    pub npt_all_cuts: bool,
    pub violates_symmetric: bool,
    pub violates_general: bool,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Diagnostics {
    /// Sphere search minus closed form, per party.
    pub closed_vs_sphere_gap: [f64; 3],
    /// See-saw sweeps spent by the general Mermin search.
    pub optimizer_iterations: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TeleportReport {
    pub f: [f64; 3],
    #[serde(rename = "F")]
    pub fidelity: [f64; 3],
    pub negativity: [f64; 3],
    pub mermin_symmetric: f64,
    pub mermin_general: f64,
    pub ghz_params: GhzParamsDoc,
    pub flags: Flags,
    pub tolerance: f64,
    pub diagnostics: Diagnostics,
}

impl TeleportReport {
    pub fn analyze(state: &ThreeQubitState, tol: f64) -> Self {
        let cap = capability(state);
        let (_, n) = ghz_distillable(state);
        let d = state.decompose();
        let symmetric = mermin_max_symmetric_decomposed(&d, &SymmetricBudget::default(), false);
        let budget = GeneralBudget::default();
        // Seeding the see-saw with the best symmetric setting keeps general >= symmetric.
        let general = mermin_max_general_from(&d, &budget, &[symmetric.setting]);

        let f = sig12_all(cap.f);
        let negativity = sig12_all(n.n);
        let mermin_symmetric = sig12(symmetric.value);
        let mermin_general = sig12(general.value);
        Self {
            f,
            fidelity: sig12_all(cap.fidelity),
            negativity,
            mermin_symmetric,
            mermin_general,
            ghz_params: GhzParamsDoc::from(&depolarize_to_ghz(state)),
            flags: Flags {
                useful: useful(&f, tol),
                npt_all_cuts: npt(&negativity, tol),
                violates_symmetric: violates(mermin_symmetric, tol),
                violates_general: violates(mermin_general, tol),
            },
            tolerance: tol,
            diagnostics: Diagnostics {
                closed_vs_sphere_gap: sig12_all(cap.closed_vs_sphere_gap),
                optimizer_iterations: general_sweep_count(&d, &budget),
            },
        }
    }

    pub const CSV_HEADER: [&'static str; 24] = [
        "f1",
        "f2",
        "f3",
        "F1",
        "F2",
        "F3",
        "N1",
        "N2",
        "N3",
        "mermin_symmetric",
        "mermin_general",
        "lambda0_plus",
        "lambda0_minus",
        "lambda1",
        "lambda2",
        "lambda3",
        "useful",
        "npt_all_cuts",
        "violates_symmetric",
        "violates_general",
        "gap1",
        "gap2",
        "gap3",
        "optimizer_iterations",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let g = &self.ghz_params;
        let mut row: Vec<String> = self
            .f
            .iter()
            .chain(&self.fidelity)
            .chain(&self.negativity)
            .chain(&[self.mermin_symmetric, self.mermin_general])
            .chain(&[g.lambda0_plus, g.lambda0_minus, g.lambda1, g.lambda2, g.lambda3])
            .map(|&x| cell(x))
            .collect();
        let fl = &self.flags;
        row.extend([fl.useful, fl.npt_all_cuts, fl.violates_symmetric, fl.violates_general].map(|b| b.to_string()));
        row.extend(self.diagnostics.closed_vs_sphere_gap.map(cell));
        row.push(self.diagnostics.optimizer_iterations.to_string());
        row
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SimulationReport {
    pub system: usize,
    pub frame: String,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Optimal average fidelity `F_i` of the state.
    pub analytic_fidelity: f64,
    /// `analytic_fidelity - mean`.
    pub gap: f64,
}

impl SimulationReport {
    pub fn new(system: usize, frame: &str, seed: u64, est: &FidelityEstimate, analytic: f64) -> Self {
        Self {
            system,
            frame: frame.to_string(),
            samples: est.samples,
            seed,
            mean: sig12(est.mean),
            std_error: sig12(est.std_error),
            analytic_fidelity: sig12(analytic),
            gap: sig12(analytic - est.mean),
        }
    }

    pub const CSV_HEADER: [&'static str; 8] = [
        "system",
        "frame",
        "samples",
        "seed",
        "mean",
        "std_error",
        "analytic_fidelity",
        "gap",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.system.to_string(),
            self.frame.clone(),
            self.samples.to_string(),
            self.seed.to_string(),
            cell(self.mean),
            cell(self.std_error),
            cell(self.analytic_fidelity),
            cell(self.gap),
        ]
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OutlierDoc {
    pub seed: u64,
    pub check: String,
    pub quantities: BTreeMap<String, f64>,
}

/// Campaign summary. Wall time is left out so that reruns are byte-identical.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CampaignDoc {
    pub campaign: String,
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    pub passed: bool,
    /// `null` when no sample reached the campaign predicate.
    pub worst_margin: Option<f64>,
    pub antecedents: Option<usize>,
    pub metrics: BTreeMap<String, f64>,
    pub outliers: Vec<OutlierDoc>,
    pub diagnostics: Vec<OutlierDoc>,
}

fn quantities(q: &[(String, f64)]) -> BTreeMap<String, f64> {
    q.iter().map(|(k, v)| (k.clone(), sig12(*v))).collect()
}

impl CampaignDoc {
    pub fn new(r: &CampaignReport, seed: u64) -> Self {
        let outliers = |v: &[triqap::harness::Outlier]| {
            v.iter()
                .map(|o| OutlierDoc {
                    seed: o.seed,
                    check: o.check.clone(),
                    quantities: quantities(&o.quantities),
                })
                .collect()
        };
        Self {
            campaign: r.campaign_name.clone(),
            samples: r.samples,
            seed,
            violations: r.violations,
            passed: r.passed(),
            worst_margin: r.worst_margin.is_finite().then(|| sig12(r.worst_margin)),
            antecedents: r.antecedents,
            metrics: quantities(&r.metrics),
            outliers: outliers(&r.outliers),
            diagnostics: outliers(&r.diagnostics),
        }
    }

    pub const CSV_HEADER: [&'static str; 8] = [
        "campaign",
        "samples",
        "seed",
        "violations",
        "passed",
        "worst_margin",
        "antecedents",
        "diagnostics",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.campaign.clone(),
            self.samples.to_string(),
            self.seed.to_string(),
            self.violations.to_string(),
            self.passed.to_string(),
            self.worst_margin.map(cell).unwrap_or_default(),
            self.antecedents.map(|a| a.to_string()).unwrap_or_default(),
            self.diagnostics.len().to_string(),
        ]
    }
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, doc: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use triqap::states::from_ghz_params;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(2.0 * 2f64.sqrt()), 2.82842712475);
        assert_eq!(sig12(-1.234567890123456e-7), -1.23456789012e-7);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(cell(sig12(1.1102230246251565e-16)), "1.11022302463e-16");
        assert_eq!(cell(0.25), "0.25");
    }

    #[test]
    fn ghz_report() {
        let r = TeleportReport::analyze(&ThreeQubitState::ghz(), 1e-9);
        assert_eq!(r.f, [1.0; 3]);
        assert_eq!(r.negativity, [0.5; 3]);
        assert_eq!(r.mermin_general, 4.0);
        assert!(r.flags.useful && r.flags.npt_all_cuts && r.flags.violates_general);
        assert_eq!(r.csv_row().len(), TeleportReport::CSV_HEADER.len());
    }

    #[test]
    fn flags_follow_the_printed_numbers() {
        let st = from_ghz_params(&GhzDiagonalParams::new(0.4, 0.0, [0.1; 3]).unwrap()).unwrap();
        let r = TeleportReport::analyze(&st, 1e-9);
        assert_eq!(r.flags.useful, useful(&r.f, r.tolerance));
        assert_eq!(r.flags.npt_all_cuts, npt(&r.negativity, r.tolerance));
        assert!(!r.flags.useful && r.flags.npt_all_cuts);
        assert!(r.mermin_general >= r.mermin_symmetric);
    }
}
