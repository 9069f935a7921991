//! Teleportation capability of the pair left behind after a one-qubit
//! measurement.
//!
//! For party `i` the quantity `f_i` is the best probability-weighted fully
//! entangled fraction of the two remaining qubits over all orthogonal
//! measurements of qubit `i`. Three routes are provided:
//!
//! - [`f_i_closed`]: trace-norm formula evaluated at the weighting
//!   `y_l = ||T_i^l|| / sqrt(sum_t ||T_i^t||^2)`.
//! - [`f_i_sphere_oracle`]: the same trace-norm bracket maximised over the
//!   unit sphere.
//! - [`f_i_definition_oracle`]: the measurement-level definition, maximised
//!   over 2x2 unitaries.
//!
//! The trace-norm bracket bounds the definition from above: for two qubits
//! `f <= (1 + ||T||_1) / 4`, with equality when `det T <= 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::matcore::{euler_unitary, symmetric_eigs, ComplexMatrix, Party, RealMatrix3, C64, INGEST_TOL, ZERO};
use crate::states::{CorrelationSlices, GhzDiagonalParams, PauliDecomposition, ThreeQubitState};

/// Branches with probability below this are treated as never occurring.
pub const DEGENERATE_PROB: f64 = 1e-12;

/// Sphere-search gains at or below this are round-off and do not replace the
/// closed-form value.
pub const SEARCH_NOISE: f64 = 1e-12;

/// Usefulness threshold on `f` (equivalently `F > 2/3`).
pub const USEFUL_THRESHOLD: f64 = 0.5;

/// Magic basis, as kets in the computational basis `|00>, |01>, |10>, |11>`.
pub fn magic_basis() -> [[C64; 4]; 4] {
    let h = FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    let i = |x: f64| C64::new(0.0, x);
    [
        [r(h), ZERO, ZERO, r(h)],
        [i(h), ZERO, ZERO, i(-h)],
        [ZERO, i(h), i(h), ZERO],
        [ZERO, r(h), r(-h), ZERO],
    ]
}

/// Fully entangled fraction of a two-qubit state and a maximally entangled
/// state attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fef {
    pub value: f64,
    pub optimal: [C64; 4],
}

fn validate_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::Shape {
            expected: "4x4".into(),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    let eig = crate::matcore::hermitian_eigs(rho)?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > INGEST_TOL || tr.im.abs() > INGEST_TOL {
        return Err(Error::BadTrace(tr.re));
    }
    if eig.values[0] < -INGEST_TOL {
        return Err(Error::NotPositive(eig.values[0]));
    }
    Ok(())
}

/// `max <e|rho|e>` over maximally entangled `|e>`.
///
/// In the magic basis the maximally entangled states are exactly the real
/// unit vectors (up to phase), so the maximum is the top eigenvalue of the
/// real part of `rho` written in that basis.
pub fn fef2(rho2: &ComplexMatrix) -> Result<Fef> {
    validate_two_qubit(rho2)?;
    Ok(fef2_unchecked(rho2))
}

pub(crate) fn fef2_unchecked(rho2: &ComplexMatrix) -> Fef {
    let mb = magic_basis();
    let mut re = [0.0f64; 16];
    for k in 0..4 {
        let rk = rho2.mul_vec(&mb[k]);
        for l in 0..4 {
            // <m_l| rho |m_k>
            let z: C64 = mb[l].iter().zip(&rk).map(|(a, b)| a.conj() * b).sum();
            re[l * 4 + k] = z.re;
        }
    }
    // symmetrise against round-off
    for k in 0..4 {
        for l in (k + 1)..4 {
            let avg = 0.5 * (re[k * 4 + l] + re[l * 4 + k]);
            re[k * 4 + l] = avg;
            re[l * 4 + k] = avg;
        }
    }
    let (vals, vecs) = symmetric_eigs(&re, 4);
    let mut optimal = [ZERO; 4];
    for (k, m) in mb.iter().enumerate() {
        let coef = vecs[k * 4 + 3];
        for (o, &x) in optimal.iter_mut().zip(m) {
            *o += x * coef;
        }
    }
    Fef {
        value: vals[3],
        optimal,
    }
}

/// One outcome of the orthogonal measurement on the chosen party.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub t: u8,
    pub probability: f64,
    /// State of the remaining pair (lower party first). Maximally mixed
    /// when the branch is degenerate.
    pub conditional_state: ComplexMatrix,
    pub degenerate: bool,
}

/// Unnormalised `<t|U rho U†|t>` on the measured party, as a 4x4 operator.
fn project_branch(rho: &ComplexMatrix, party: Party, row: [C64; 2]) -> ComplexMatrix {
    let shift = party.shift();
    let expand = |bit: usize, rest: usize| {
        let low = rest & ((1 << shift) - 1);
        let high = (rest >> shift) << (shift + 1);
        high | (bit << shift) | low
    };
    ComplexMatrix::from_fn(4, 4, |r, c| {
        let mut acc = ZERO;
        for a in 0..2 {
            for b in 0..2 {
                acc += row[a] * rho[(expand(a, r), expand(b, c))] * row[b].conj();
            }
        }
        acc
    })
}

/// Measures `U† sigma_3 U` on `party` and returns both outcomes.
pub fn post_measurement_pair(
    state: &ThreeQubitState,
    party: Party,
    u: &ComplexMatrix,
) -> Result<[MeasurementOutcome; 2]> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Shape {
            expected: "2x2".into(),
            got: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    u.ensure_unitary(INGEST_TOL)?;
    Ok(branches(state.rho(), party, u))
}

pub(crate) fn branches(rho: &ComplexMatrix, party: Party, u: &ComplexMatrix) -> [MeasurementOutcome; 2] {
    [0u8, 1].map(|t| {
        let row = [u[(t as usize, 0)], u[(t as usize, 1)]];
        let un = project_branch(rho, party, row);
        let p = un.trace().re;
        if p < DEGENERATE_PROB {
            MeasurementOutcome {
                t,
                probability: p.max(0.0),
                conditional_state: ComplexMatrix::identity(4).scale_re(0.25),
                degenerate: true,
            }
        } else {
            MeasurementOutcome {
                t,
                probability: p,
                conditional_state: un.scale_re(1.0 / p).hermitian_part(),
                degenerate: false,
            }
        }
    })
}

/// `sum_t p_t f(rho_t)` for the measurement `U`; degenerate branches add 0.
pub fn average_fef(state: &ThreeQubitState, party: Party, u: &ComplexMatrix) -> f64 {
    branches(state.rho(), party, u)
        .iter()
        .filter(|b| !b.degenerate)
        .map(|b| b.probability * fef2_unchecked(&b.conditional_state).value)
        .sum()
}

/// The bracket `1/4 + 1/8 (||b + sum x_l T^l|| + ||b - sum x_l T^l||)`.
pub fn sphere_objective(slices: &CorrelationSlices, x: &[f64; 3]) -> f64 {
    let mut m = RealMatrix3::ZERO;
    for (t, &xl) in slices.t.iter().zip(x) {
        m = m.add_scaled(t, xl);
    }
    let plus = slices.b.add_scaled(&m, 1.0).trace_norm();
    let minus = slices.b.add_scaled(&m, -1.0).trace_norm();
    0.25 + 0.125 * (plus + minus)
}

/// Closed-form `f_i` at `y_l = ||T_i^l|| / sqrt(sum_t ||T_i^t||^2)`.
///
/// When every `T_i^l` vanishes the bracket does not depend on `y`; `y`
/// defaults to `(0, 0, 1)` and the value is `1/4 + ||b_i||/4`.
pub fn f_i_closed(d: &PauliDecomposition, party: Party) -> (f64, [f64; 3]) {
    let slices = d.correlation_slices(party);
    let norms = slices.t.map(|t| t.trace_norm());
    let len = norms.iter().map(|n| n * n).sum::<f64>().sqrt();
    let y = if len > 0.0 {
        norms.map(|n| n / len)
    } else {
        [0.0, 0.0, 1.0]
    };
    (sphere_objective(&slices, &y), y)
}

/// Grid-and-refine configuration for [`f_i_sphere_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereBudget {
    pub theta_steps: usize,
    pub phi_steps: usize,
    /// Number of best grid points refined locally.
    pub refine_starts: usize,
    /// Angular step at which refinement stops.
    pub resolution: f64,
}

impl Default for SphereBudget {
    fn default() -> Self {
        Self {
            theta_steps: 64,
            phi_steps: 128,
            refine_starts: 3,
            resolution: 1e-5,
        }
    }
}

fn unit_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn angles_from_unit(x: &[f64; 3]) -> (f64, f64) {
    (x[2].clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]))
}

/// Maximises a function of two angles by compass search.
fn compass_search(
    f: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    value: f64,
    step: f64,
    resolution: f64,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = value;
    let mut step = step;
    let mut iters = 0usize;
    while step >= resolution && iters < 100_000 {
        iters += 1;
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[k] += dir * step;
                let v = f(&cand);
                if v > best {
                    best = v;
                    x = cand;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

/// Best point of `objective` over the sphere: grid, then compass refinement
/// from the best grid points and from the closed-form direction.
pub fn f_i_sphere_oracle(d: &PauliDecomposition, party: Party, budget: &SphereBudget) -> (f64, [f64; 3]) {
    let slices = d.correlation_slices(party);
    let (closed, y) = f_i_closed(d, party);
    let nt = budget.theta_steps.max(2);
    let np = budget.phi_steps.max(1);
    let dtheta = PI / (nt - 1) as f64;
    let dphi = 2.0 * PI / np as f64;

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(nt * np);
    for a in 0..nt {
        let theta = a as f64 * dtheta;
        // the poles need one azimuth only
        let count = if a == 0 || a == nt - 1 { 1 } else { np };
        for b in 0..count {
            let phi = b as f64 * dphi;
            grid.push((sphere_objective(&slices, &unit_from_angles(theta, phi)), theta, phi));
        }
    }
    grid.sort_by(|p, q| q.0.total_cmp(&p.0));

    let mut objective = |v: &[f64]| sphere_objective(&slices, &unit_from_angles(v[0], v[1]));
    let (yt, yp) = angles_from_unit(&y);
    let mut best = (closed, y);
    let starts = grid
        .iter()
        .take(budget.refine_starts.max(1))
        .map(|&(v, t, p)| (v, t, p, dtheta.max(dphi)))
        .chain(std::iter::once((closed, yt, yp, dtheta.min(dphi))));
    for (v, t, p, step) in starts {
        let (x, val) = compass_search(&mut objective, &[t, p], v, step, budget.resolution);
        if val > best.0 {
            best = (val, unit_from_angles(x[0], x[1]));
        }
    }
    best
}

/// Multi-start configuration for [`f_i_definition_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefinitionBudget {
    /// Grid divisions per Euler angle (`theta` includes both end points).
    pub grid: usize,
    pub refine_starts: usize,
    /// Step size at which coordinate descent stops.
    pub tolerance: f64,
}

impl Default for DefinitionBudget {
    fn default() -> Self {
        Self {
            grid: 8,
            refine_starts: 4,
            tolerance: 1e-7,
        }
    }
}

/// Maximises the probability-weighted fully entangled fraction over
/// measurements `U = Rz(phi) Ry(theta) Rz(psi)` of `party`.
pub fn f_i_definition_oracle(state: &ThreeQubitState, party: Party, budget: &DefinitionBudget) -> (f64, ComplexMatrix) {
    let mut objective = |v: &[f64]| average_fef(state, party, &euler_unitary(v[0], v[1], v[2]));
    let n = budget.grid.max(1);
    let dt = PI / n as f64;
    let da = 2.0 * PI / n as f64;
    let mut grid = Vec::with_capacity((n + 1) * n * n);
    for a in 0..=n {
        for b in 0..n {
            for c in 0..n {
                let v = [a as f64 * dt, b as f64 * da, c as f64 * da];
                grid.push((objective(&v), v));
            }
        }
    }
    grid.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut best = (f64::NEG_INFINITY, vec![0.0; 3]);
    for &(v, start) in grid.iter().take(budget.refine_starts.max(1)) {
        let (x, val) = compass_search(&mut objective, &start, v, dt, budget.tolerance);
        if val > best.0 {
            best = (val, x);
        }
    }
    (best.0, euler_unitary(best.1[0], best.1[1], best.1[2]))
}

/// `f_i` and `F_i = (2 f_i + 1)/3` for the three parties.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportCapability {
    pub f: [f64; 3],
    pub fidelity: [f64; 3],
    /// Maximising direction per party.
    pub direction: [[f64; 3]; 3],
    pub useful: bool,
    pub closed: [f64; 3],
    pub sphere: [f64; 3],
    /// `sphere - closed` per party (positive when the closed form is not the maximiser).
    pub closed_vs_sphere_gap: [f64; 3],
}

impl TeleportCapability {
    /// Parties where closed form and sphere search differ by more than `tol`.
    pub fn discrepancies(&self, tol: f64) -> Vec<Party> {
        Party::ALL
            .into_iter()
            .filter(|p| self.closed_vs_sphere_gap[p.index() - 1].abs() > tol)
            .collect()
    }
}

pub fn fidelity_from_fef(f: f64) -> f64 {
    (2.0 * f + 1.0) / 3.0
}

pub fn capability(state: &ThreeQubitState) -> TeleportCapability {
    capability_with(&state.decompose(), &SphereBudget::default())
}

/// Reports `max(closed, sphere)` per party.
pub fn capability_with(d: &PauliDecomposition, budget: &SphereBudget) -> TeleportCapability {
    let mut out = TeleportCapability {
        f: [0.0; 3],
        fidelity: [0.0; 3],
        direction: [[0.0; 3]; 3],
        useful: false,
        closed: [0.0; 3],
        sphere: [0.0; 3],
        closed_vs_sphere_gap: [0.0; 3],
    };
    for party in Party::ALL {
        let k = party.index() - 1;
        let (closed, y) = f_i_closed(d, party);
        let (sphere, x) = f_i_sphere_oracle(d, party, budget);
        out.closed[k] = closed;
        out.sphere[k] = sphere;
        out.closed_vs_sphere_gap[k] = sphere - closed;
        let (f, dir) = if sphere > closed + SEARCH_NOISE {
            (sphere, x)
        } else {
            (closed, y)
        };
        out.f[k] = f;
        out.direction[k] = dir;
        out.fidelity[k] = fidelity_from_fef(f);
    }
    out.useful = out.f.iter().cloned().fold(f64::INFINITY, f64::min) > USEFUL_THRESHOLD;
    out
}

/// `(l0+ + l3, l0+ + l2, l0+ + l1)` for canonical GHZ-diagonal weights.
pub fn f_i_ghz_params(p: &GhzDiagonalParams) -> Result<[f64; 3]> {
    p.ensure_canonical()?;
    let l = p.lambda;
    Ok([p.lambda0_plus + l[2], p.lambda0_plus + l[1], p.lambda0_plus + l[0]])
}
