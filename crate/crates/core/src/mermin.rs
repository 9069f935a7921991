//! Mermin operator, its expectation values and their maximisation.
//!
//! Optimisers work on the three-body correlation tensor, using
//! `tr(rho B) = t(a1,a2,a3) - t(a1,b2,b3) - t(b1,a2,b3) - t(b1,b2,a3)`.
//! Every reported maximum is the best value found and hence a lower bound.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{bloch_operator, kron, ComplexMatrix, INGEST_TOL};
use crate::rng;
use crate::states::{GhzBasis, GhzDiagonalParams, PauliDecomposition, ThreeQubitState};

/// Local-realistic bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

type Tensor = [[[f64; 3]; 3]; 3];

fn norm(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Measurement directions `a_j, b_j` for the three parties.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MerminSetting {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
}

impl MerminSetting {
    pub fn new(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> Result<Self> {
        for v in a.iter().chain(&b) {
            if (norm(v) - 1.0).abs() > INGEST_TOL {
                return Err(Error::NotUnitVector(*v));
            }
        }
        Ok(Self { a, b })
    }

    /// The same pair `(a, b)` for every party.
    pub fn symmetric(a: [f64; 3], b: [f64; 3]) -> Result<Self> {
        Self::new([a; 3], [b; 3])
    }

    /// `a_j = (0,-1,0)`, `b_j = (-1,0,0)`: equals `4(P(Psi0+) - P(Psi0-))`
    /// up to local phases.
    pub fn standard() -> Self {
        Self {
            a: [[0.0, -1.0, 0.0]; 3],
            b: [[-1.0, 0.0, 0.0]; 3],
        }
    }

    fn vector(&self, party: usize, choice: usize) -> &[f64; 3] {
        if choice == 0 {
            &self.a[party]
        } else {
            &self.b[party]
        }
    }

    fn vector_mut(&mut self, party: usize, choice: usize) -> &mut [f64; 3] {
        if choice == 0 {
            &mut self.a[party]
        } else {
            &mut self.b[party]
        }
    }
}

/// Expectation value together with the setting that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MerminResult {
    pub value: f64,
    pub setting: MerminSetting,
    pub violates: bool,
    /// Best value of `-tr(rho B)` found by the same search, when computed.
    pub negated_max: Option<f64>,
}

impl MerminResult {
    fn new(value: f64, setting: MerminSetting, negated_max: Option<f64>) -> Self {
        Self {
            value,
            setting,
            violates: value > CLASSICAL_BOUND,
            negated_max,
        }
    }
}

/// Signed terms of the Mermin combination; entries pick `a` (0) or `b` (1)
/// per party.
const TERMS: [(f64, [usize; 3]); 4] = [
    (1.0, [0, 0, 0]),
    (-1.0, [0, 1, 1]),
    (-1.0, [1, 0, 1]),
    (-1.0, [1, 1, 0]),
];

pub fn mermin_operator(s: &MerminSetting) -> Result<ComplexMatrix> {
    let s = MerminSetting::new(s.a, s.b)?;
    let mut out = ComplexMatrix::zeros(8, 8);
    for (sign, pick) in TERMS {
        let ops = [0, 1, 2].map(|p| bloch_operator(*s.vector(p, pick[p])));
        let word = kron(&kron(&ops[0], &ops[1]), &ops[2]);
        out = &out + &word.scale_re(sign);
    }
    Ok(out)
}

/// `4(P(Psi0+) - P(Psi0-))`.
pub fn canonical_mermin_operator() -> ComplexMatrix {
    let basis = GhzBasis::new();
    let plus = ComplexMatrix::projector(basis.vector(0, true));
    let minus = ComplexMatrix::projector(basis.vector(0, false));
    (&plus - &minus).scale_re(4.0)
}

/// `tr(rho B)` for the given setting.
pub fn mermin_value(state: &ThreeQubitState, s: &MerminSetting) -> Result<MerminResult> {
    let op = mermin_operator(s)?;
    let z = state.rho().trace_product(&op);
    if z.im.abs() > INGEST_TOL {
        return Err(Error::InvalidInput(format!(
            "Mermin expectation has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(MerminResult::new(z.re, *s, None))
}

fn contract(t: &Tensor, u: &[f64; 3], v: &[f64; 3], w: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            let mut inner = 0.0;
            for l in 0..3 {
                inner += t[j][k][l] * w[l];
            }
            acc += u[j] * v[k] * inner;
        }
    }
    acc
}

/// Mermin value from the correlation tensor.
pub fn tensor_value(t: &Tensor, s: &MerminSetting) -> f64 {
    TERMS
        .iter()
        .map(|&(sign, pick)| sign * contract(t, s.vector(0, pick[0]), s.vector(1, pick[1]), s.vector(2, pick[2])))
        .sum()
}

fn negate(t: &Tensor) -> Tensor {
    t.map(|m| m.map(|r| r.map(|x| -x)))
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Grid-and-refine configuration for the symmetric family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricBudget {
    /// Points per spherical angle (four angles in total).
    pub grid: usize,
    pub refine_starts: usize,
    pub resolution: f64,
}

impl Default for SymmetricBudget {
    fn default() -> Self {
        Self {
            grid: 32,
            refine_starts: 4,
            resolution: 1e-9,
        }
    }
}

/// `g(a, b) = t(a,a,a) - t(a,b,b) - t(b,a,b) - t(b,b,a)`.
fn symmetric_value(t: &Tensor, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    contract(t, a, a, a) - contract(t, a, b, b) - contract(t, b, a, b) - contract(t, b, b, a)
}

fn symmetric_search(t: &Tensor, budget: &SymmetricBudget) -> (f64, [f64; 3], [f64; 3]) {
    let n = budget.grid.max(2);
    let dt = PI / (n - 1) as f64;
    let dp = 2.0 * PI / n as f64;
    let mut dirs = Vec::with_capacity(n * n);
    for i in 0..n {
        let count = if i == 0 || i == n - 1 { 1 } else { n };
        for k in 0..count {
            let (th, ph) = (i as f64 * dt, k as f64 * dp);
            dirs.push((th, ph, unit(th, ph)));
        }
    }
    // M_u[k][l] = sum_j t^{jkl} u_j, so t(u, v, w) = v^T M_u w.
    let contracted: Vec<[[f64; 3]; 3]> = dirs
        .iter()
        .map(|(_, _, u)| {
            let mut m = [[0.0; 3]; 3];
            for (j, uj) in u.iter().enumerate() {
                for k in 0..3 {
                    for l in 0..3 {
                        m[k][l] += t[j][k][l] * uj;
                    }
                }
            }
            m
        })
        .collect();
    let quad = |m: &[[f64; 3]; 3], v: &[f64; 3], w: &[f64; 3]| {
        let mut acc = 0.0;
        for k in 0..3 {
            acc += v[k] * (m[k][0] * w[0] + m[k][1] * w[1] + m[k][2] * w[2]);
        }
        acc
    };
    let diag: Vec<f64> = contracted.iter().zip(&dirs).map(|(m, d)| quad(m, &d.2, &d.2)).collect();

    let keep = budget.refine_starts.max(1);
    let mut top: Vec<(f64, usize, usize)> = Vec::with_capacity(keep + 1);
    for (ia, da) in dirs.iter().enumerate() {
        let ma = &contracted[ia];
        for (ib, db) in dirs.iter().enumerate() {
            let mb = &contracted[ib];
            let a = &da.2;
            let b = &db.2;
            let v = diag[ia] - quad(ma, b, b) - quad(mb, a, b) - quad(mb, b, a);
            if top.len() < keep || v > top[top.len() - 1].0 {
                top.push((v, ia, ib));
                top.sort_by(|p, q| q.0.total_cmp(&p.0));
                top.truncate(keep);
            }
        }
    }

    let mut best = (f64::NEG_INFINITY, [0.0; 3], [0.0; 3]);
    let objective = |x: &[f64]| symmetric_value(t, &unit(x[0], x[1]), &unit(x[2], x[3]));
    for &(v, ia, ib) in &top {
        let start = [dirs[ia].0, dirs[ia].1, dirs[ib].0, dirs[ib].1];
        let (x, val) = compass(&objective, &start, v, dt.max(dp), budget.resolution);
        if val > best.0 {
            best = (val, unit(x[0], x[1]), unit(x[2], x[3]));
        }
    }
    best
}

fn compass(f: &impl Fn(&[f64]) -> f64, start: &[f64], value: f64, step: f64, resolution: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = value;
    let mut step = step;
    let mut iters = 0usize;
    while step >= resolution && iters < 200_000 {
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

/// Maximum over a single pair `(a, b)` shared by all parties.
pub fn mermin_max_symmetric(state: &ThreeQubitState, budget: &SymmetricBudget) -> MerminResult {
    mermin_max_symmetric_decomposed(&state.decompose(), budget, true)
}

/// Symmetric maximum from a decomposition; the search for `max -tr(rho B)`
/// runs only when `with_negated` is set.
pub fn mermin_max_symmetric_decomposed(
    d: &PauliDecomposition,
    budget: &SymmetricBudget,
    with_negated: bool,
) -> MerminResult {
    let (value, a, b) = symmetric_search(&d.t, budget);
    let neg = with_negated.then(|| symmetric_search(&negate(&d.t), budget).0);
    MerminResult::new(value, MerminSetting { a: [a; 3], b: [b; 3] }, neg)
}

/// See-saw configuration for the unrestricted maximisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralBudget {
    pub starts: usize,
    /// Sweep-to-sweep improvement at which a start stops.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Seed of the pseudo-random starts beyond the fixed ones.
    pub seed: u64,
}

impl Default for GeneralBudget {
    fn default() -> Self {
        Self {
            starts: 16,
            tolerance: 1e-9,
            max_sweeps: 10_000,
            seed: 0x4d45_524d,
        }
    }
}

/// Outcome of one see-saw run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeeSaw {
    pub value: f64,
    pub setting: MerminSetting,
    pub sweeps: usize,
}

/// Exact maximisation over each of the six vectors in turn. The value is
/// linear in every single vector, so each update is the normalised
/// coefficient vector; a vanishing coefficient leaves the vector unchanged.
pub fn see_saw(t: &Tensor, start: &MerminSetting, tolerance: f64, max_sweeps: usize) -> SeeSaw {
    let mut s = *start;
    let mut value = tensor_value(t, &s);
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for party in 0..3 {
            for choice in 0..2 {
                let mut coef = [0.0; 3];
                for &(sign, pick) in &TERMS {
                    if pick[party] != choice {
                        continue;
                    }
                    for (e, c) in coef.iter_mut().enumerate() {
                        let mut basis = [0.0; 3];
                        basis[e] = 1.0;
                        let vecs = [0, 1, 2].map(|p| if p == party { basis } else { *s.vector(p, pick[p]) });
                        *c += sign * contract(t, &vecs[0], &vecs[1], &vecs[2]);
                    }
                }
                let len = norm(&coef);
                if len > 1e-14 {
                    *s.vector_mut(party, choice) = coef.map(|c| c / len);
                }
            }
        }
        let next = tensor_value(t, &s);
        let change = next - value;
        value = next;
        if change.abs() < tolerance {
            break;
        }
    }
    SeeSaw {
        value,
        setting: s,
        sweeps,
    }
}

fn random_unit(r: &mut rng::Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            r.sample(StandardNormal),
            r.sample(StandardNormal),
            r.sample(StandardNormal),
        ];
        let n = norm(&v);
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// The deterministic start list: the standard setting, its `z`-axis variant,
/// then pseudo-random settings.
pub fn general_starts(budget: &GeneralBudget) -> Vec<MerminSetting> {
    let mut out = vec![
        MerminSetting::standard(),
        MerminSetting {
            a: [[0.0, 0.0, 1.0]; 3],
            b: [[1.0, 0.0, 0.0]; 3],
        },
    ];
    let mut r = rng::from_seed(budget.seed);
    while out.len() < budget.starts {
        let a = [0, 1, 2].map(|_| random_unit(&mut r));
        let b = [0, 1, 2].map(|_| random_unit(&mut r));
        out.push(MerminSetting { a, b });
    }
    out.truncate(budget.starts.max(1));
    out
}

fn general_search(t: &Tensor, budget: &GeneralBudget, extra: &[MerminSetting]) -> (SeeSaw, usize) {
    let mut best: Option<SeeSaw> = None;
    let mut sweeps = 0;
    for start in general_starts(budget).iter().chain(extra) {
        let run = see_saw(t, start, budget.tolerance, budget.max_sweeps);
        sweeps += run.sweeps;
        if best.is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    (best.expect("at least one start"), sweeps)
}

/// Maximum over all six vectors.
pub fn mermin_max_general(state: &ThreeQubitState, budget: &GeneralBudget) -> MerminResult {
    mermin_max_general_from(&state.decompose(), budget, &[])
}

/// As [`mermin_max_general`], with extra starting settings appended to the
/// deterministic ones.
pub fn mermin_max_general_from(
    d: &PauliDecomposition,
    budget: &GeneralBudget,
    extra: &[MerminSetting],
) -> MerminResult {
    let (best, _) = general_search(&d.t, budget, extra);
    let (neg, _) = general_search(&negate(&d.t), budget, &[]);
    MerminResult::new(best.value, best.setting, Some(neg.value))
}

/// Total see-saw sweeps spent by [`mermin_max_general`] (diagnostics).
pub fn general_sweep_count(d: &PauliDecomposition, budget: &GeneralBudget) -> usize {
    general_search(&d.t, budget, &[]).1
}

/// `4(l0+ - l0-)` for canonical weights.
pub fn mermin_max_ghz_params(p: &GhzDiagonalParams) -> Result<f64> {
    p.ensure_canonical()?;
    Ok(4.0 * (p.lambda0_plus - p.lambda0_minus))
}
