//! Monte-Carlo simulation of teleportation over a three-qubit resource.
//!
//! One party measures its qubit in the basis `U† {|0>, |1>}` and announces
//! the outcome `t`. The sender of the remaining pair performs a Bell
//! measurement on the unknown qubit and its half, and the receiver applies a
//! Pauli correction composed with a per-branch frame `W_t`. Everything after
//! the choice of `(xi, t, m)` is evaluated exactly.
//!
//! Random draws per sample, in order: four standard normals for `xi`, one
//! uniform for `t`, one uniform for the Bell outcome `m`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{pauli, ComplexMatrix, Party, C64, INGEST_TOL, ONE, ZERO};
use crate::rng::{self, Rng};
use crate::states::ThreeQubitState;
use crate::telecap::{branches, fef2_unchecked};

/// Normalised single-qubit pure state `alpha|0> + beta|1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureQubit {
    pub alpha: C64,
    pub beta: C64,
}

impl PureQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("qubit norm squared {n}, expected 1")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.alpha, self.beta]
    }
}

/// Haar-random pure qubit from two normalised complex Gaussians.
pub fn haar_qubit(rng: &mut Rng) -> PureQubit {
    loop {
        let g: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return PureQubit {
                alpha: C64::new(g[0] / n, g[1] / n),
                beta: C64::new(g[2] / n, g[3] / n),
            };
        }
    }
}

/// Receiver frame `W_t`, entering the correction as `sigma_m^T W_t†`.
#[derive(Clone, Debug, PartialEq)]
pub enum BellFrame {
    /// `W_t = sigma_3^t`, the usual correction after an X-basis announcement.
    Identity,
    /// `W_t` read off the optimal maximally entangled state of branch `t`.
    Auto,
    /// The same unitary for both branches.
    Fixed(ComplexMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub system: Party,
    pub measurement: ComplexMatrix,
    pub frame: BellFrame,
    pub samples: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidInput("samples must be at least 1".into()));
        }
        if self.measurement.rows() != 2 || self.measurement.cols() != 2 {
            return Err(Error::Shape {
                expected: "2x2".into(),
                got: format!("{}x{}", self.measurement.rows(), self.measurement.cols()),
            });
        }
        self.measurement.ensure_unitary(INGEST_TOL)?;
        if let BellFrame::Fixed(w) = &self.frame {
            if w.rows() != 2 || w.cols() != 2 {
                return Err(Error::Shape {
                    expected: "2x2".into(),
                    got: format!("{}x{}", w.rows(), w.cols()),
                });
            }
            w.ensure_unitary(INGEST_TOL)?;
        }
        Ok(())
    }
}

/// Mean of the per-sample fidelities and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `W` with `(I (x) W)|Phi+> = |e>`, i.e. `W = sqrt(2) E^T` for `E_ab = e_ab`.
pub fn frame_from_entangled(e: &[C64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| e[c * 2 + r] * SQRT_2)
}

struct Branch {
    probability: f64,
    pair: ComplexMatrix,
    /// `sigma_m^T W†` for m = 0..3.
    corrections: [ComplexMatrix; 4],
}

struct Protocol {
    branches: Vec<(u8, Branch)>,
}

fn sigma(m: usize) -> ComplexMatrix {
    if m == 0 {
        ComplexMatrix::identity(2)
    } else {
        pauli(m - 1)
    }
}

impl Protocol {
    fn prepare(state: &ThreeQubitState, cfg: &ProtocolConfig) -> Result<Self> {
        cfg.validate()?;
        let out = branches(state.rho(), cfg.system, &cfg.measurement);
        let mut list = Vec::new();
        for b in out.iter().filter(|b| !b.degenerate) {
            let w = match &cfg.frame {
                BellFrame::Identity => {
                    if b.t == 0 {
                        ComplexMatrix::identity(2)
                    } else {
                        pauli(2)
                    }
                }
                BellFrame::Auto => frame_from_entangled(&fef2_unchecked(&b.conditional_state).optimal),
                BellFrame::Fixed(w) => w.clone(),
            };
            let wd = w.dagger();
            let corrections = [0, 1, 2, 3].map(|m| &sigma(m).transpose() * &wd);
            list.push((
                b.t,
                Branch {
                    probability: b.probability,
                    pair: b.conditional_state.clone(),
                    corrections,
                },
            ));
        }
        Ok(Self { branches: list })
    }

    fn sample(&self, xi: &PureQubit, rng: &mut Rng) -> f64 {
        let total: f64 = self.branches.iter().map(|(_, b)| b.probability).sum();
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = &self.branches[self.branches.len() - 1].1;
        for (_, b) in &self.branches {
            acc += b.probability;
            if u < acc {
                chosen = b;
                break;
            }
        }
        let outputs = [0, 1, 2, 3].map(|m| receiver_state(&chosen.pair, xi, m));
        let probs = outputs.clone().map(|o| o.trace().re.max(0.0));
        let total: f64 = probs.iter().sum();
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut m = 3;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                m = k;
                break;
            }
        }
        let c = &chosen.corrections[m];
        let corrected = &(c * &outputs[m]) * &c.dagger();
        let x = xi.amplitudes();
        (corrected.expectation(&x).re / probs[m]).clamp(0.0, 1.0)
    }
}

/// Unnormalised receiver state after Bell outcome `(I (x) sigma_m)|Phi+>` on
/// the unknown qubit and the first qubit of `pair`.
fn receiver_state(pair: &ComplexMatrix, xi: &PureQubit, m: usize) -> ComplexMatrix {
    let s = sigma(m);
    let x = xi.amplitudes();
    // c_a = sum_x conj(beta_m[x, a]) xi_x with beta_m[x, a] = (sigma_m)_{a x} / sqrt(2)
    let c = [0, 1].map(|a| (0..2).map(|k| s[(a, k)].conj() * x[k]).sum::<C64>() * FRAC_1_SQRT_2);
    ComplexMatrix::from_fn(2, 2, |b, bp| {
        let mut acc = ZERO;
        for a in 0..2 {
            for ap in 0..2 {
                acc += c[a] * pair[(a * 2 + b, ap * 2 + bp)] * c[ap].conj();
            }
        }
        acc
    })
}

/// One run of the protocol for input `xi`; returns `<xi|output|xi>`.
pub fn run_protocol_once(state: &ThreeQubitState, cfg: &ProtocolConfig, xi: &PureQubit, rng: &mut Rng) -> Result<f64> {
    Ok(Protocol::prepare(state, cfg)?.sample(xi, rng))
}

/// Average over `cfg.samples` Haar-random inputs, seeded by `cfg.seed`.
pub fn estimate_fidelity(state: &ThreeQubitState, cfg: &ProtocolConfig) -> Result<FidelityEstimate> {
    let protocol = Protocol::prepare(state, cfg)?;
    let mut r = rng::from_seed(cfg.seed);
    // Welford running mean and sum of squared deviations
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..cfg.samples {
        let xi = haar_qubit(&mut r);
        let f = protocol.sample(&xi, &mut r);
        let delta = f - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (f - mean);
    }
    let n = cfg.samples as f64;
    let var = if cfg.samples > 1 {
        (m2 / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(FidelityEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples: cfg.samples,
    })
}

/// `|0>` as a [`PureQubit`].
pub fn ket_zero() -> PureQubit {
    PureQubit { alpha: ONE, beta: ZERO }
}
