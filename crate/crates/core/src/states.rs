//! Three-qubit states: validation, Pauli decomposition, the GHZ basis and
//! the four-parameter GHZ-diagonal family.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigs, kron, pauli, ComplexMatrix, Party, RealMatrix3, C64, INGEST_TOL, ONE, ZERO};
use crate::rng;

/// Tolerance on the GHZ weight simplex.
pub const SIMPLEX_TOL: f64 = 1e-10;

/// A validated 8x8 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeQubitState {
    rho: ComplexMatrix,
}

impl ThreeQubitState {
    /// Validates Hermiticity, unit trace and positivity, each at 1e-10.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.rows() != 8 || rho.cols() != 8 {
            return Err(Error::Shape {
                expected: "8x8".into(),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let eig = hermitian_eigs(&rho)?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > INGEST_TOL || tr.im.abs() > INGEST_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        if eig.values[0] < -INGEST_TOL {
            return Err(Error::NotPositive(eig.values[0]));
        }
        Ok(Self {
            rho: rho.hermitian_part(),
        })
    }

    /// Pure state from (not necessarily normalized) amplitudes.
    pub fn from_pure(amps: &[C64]) -> Result<Self> {
        if amps.len() != 8 {
            return Err(Error::Shape {
                expected: "8 amplitudes".into(),
                got: format!("{}", amps.len()),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let v: Vec<C64> = amps.iter().map(|a| a / norm).collect();
        Ok(Self {
            rho: ComplexMatrix::projector(&v),
        })
    }

    /// Convex combination; weights must be non-negative and sum to 1 within 1e-9.
    pub fn mixture(parts: &[(f64, ThreeQubitState)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("empty mixture".into()));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "mixture weights must be non-negative and sum to 1 (sum {total})"
            )));
        }
        let mut rho = ComplexMatrix::zeros(8, 8);
        for (w, s) in parts {
            rho = &rho + &s.rho.scale_re(*w);
        }
        Self::new(rho)
    }

    /// Product state `rho1 (x) rho2 (x) rho3` of single-qubit density matrices.
    pub fn product(qubits: [&ComplexMatrix; 3]) -> Result<Self> {
        Self::new(kron(&kron(qubits[0], qubits[1]), qubits[2]))
    }

    /// `(|000> + |111>)/sqrt2`.
    pub fn ghz() -> Self {
        GhzBasis::new().projector(0, true)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(8).scale_re(0.125),
        }
    }

    /// Computational basis state `|m>`.
    pub fn basis(m: usize) -> Self {
        assert!(m < 8);
        let mut v = [ZERO; 8];
        v[m] = ONE;
        Self {
            rho: ComplexMatrix::projector(&v),
        }
    }

    /// `|0> (x) (|00> + |11>)/sqrt2`.
    pub fn zero_bell() -> Self {
        let mut v = [ZERO; 8];
        v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        v[3] = C64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            rho: ComplexMatrix::projector(&v),
        }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    /// `(V1 (x) V2 (x) V3) rho (...)†`.
    pub fn apply_local(&self, u: [&ComplexMatrix; 3]) -> Result<Self> {
        let big = kron(&kron(u[0], u[1]), u[2]);
        Self::new(&(&big * &self.rho) * &big.dagger())
    }

    /// Pauli-basis coefficients.
    pub fn decompose(&self) -> PauliDecomposition {
        let ex = |word: [usize; 3]| pauli_expectation(&self.rho, word);
        let mut s = [[0.0; 3]; 3];
        for a in 0..3 {
            s[0][a] = ex([a + 1, 0, 0]);
            s[1][a] = ex([0, a + 1, 0]);
            s[2][a] = ex([0, 0, a + 1]);
        }
        let mut b = [RealMatrix3::ZERO; 3];
        let mut t = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                b[0].0[k][l] = ex([0, k + 1, l + 1]);
                b[1].0[k][l] = ex([k + 1, 0, l + 1]);
                b[2].0[k][l] = ex([k + 1, l + 1, 0]);
                for j in 0..3 {
                    t[j][k][l] = ex([j + 1, k + 1, l + 1]);
                }
            }
        }
        PauliDecomposition { s, b, t }
    }
}

/// `tr(rho * (P1 (x) P2 (x) P3))` with `0 = I, 1..3 = sigma_1..3`.
pub fn pauli_expectation(rho: &ComplexMatrix, word: [usize; 3]) -> f64 {
    // For each factor: bit flip and the entry value for column bit `c`: P[c ^ flip][c].
    let mut acc = ZERO;
    for m in 0..8 {
        let mut n = m;
        let mut amp = ONE;
        for (q, &p) in word.iter().enumerate() {
            let shift = 2 - q;
            let bit = (m >> shift) & 1;
            let (flip, val) = match p {
                0 => (0, ONE),
                1 => (1, ONE),
                2 => (
                    1,
                    if bit == 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    },
                ),
                3 => (0, if bit == 0 { ONE } else { -ONE }),
                _ => unreachable!("pauli letter"),
            };
            n ^= flip << shift;
            amp *= val;
        }
        // P[n][m] = amp, so tr(rho P) gets rho[m][n] * P[n][m]
        acc += rho[(m, n)] * amp;
    }
    acc.re
}

/// Coefficients of `rho = 1/8 (I + s.sigma terms + b terms + t terms)`.
///
/// `s[i]` is the Bloch vector of party `i+1`; `b[i]` the correlation matrix
/// of the pair that excludes party `i+1` (rows index the lower party);
/// `t[j][k][l] = <sigma_j (x) sigma_k (x) sigma_l>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliDecomposition {
    pub s: [[f64; 3]; 3],
    pub b: [RealMatrix3; 3],
    pub t: [[[f64; 3]; 3]; 3],
}

/// `b_i` together with the three slices `T_i^l` of the three-body tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationSlices {
    pub b: RealMatrix3,
    pub t: [RealMatrix3; 3],
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let id = ComplexMatrix::identity(2);
        let sig = [pauli(0), pauli(1), pauli(2)];
        let word = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix| kron(&kron(a, b), c);
        let mut rho = ComplexMatrix::identity(8);
        for a in 0..3 {
            rho = &rho + &word(&sig[a], &id, &id).scale_re(self.s[0][a]);
            rho = &rho + &word(&id, &sig[a], &id).scale_re(self.s[1][a]);
            rho = &rho + &word(&id, &id, &sig[a]).scale_re(self.s[2][a]);
        }
        for k in 0..3 {
            for l in 0..3 {
                rho = &rho + &word(&id, &sig[k], &sig[l]).scale_re(self.b[0].0[k][l]);
                rho = &rho + &word(&sig[k], &id, &sig[l]).scale_re(self.b[1].0[k][l]);
                rho = &rho + &word(&sig[k], &sig[l], &id).scale_re(self.b[2].0[k][l]);
                for j in 0..3 {
                    rho = &rho + &word(&sig[j], &sig[k], &sig[l]).scale_re(self.t[j][k][l]);
                }
            }
        }
        rho.scale_re(0.125)
    }

    /// `b_i` and `T_i^1..3` for party `i`: `(T_1^j)_{kl} = t^{jkl}`,
    /// `(T_2^k)_{jl} = t^{jkl}`, `(T_3^l)_{jk} = t^{jkl}`.
    pub fn correlation_slices(&self, party: Party) -> CorrelationSlices {
        let t = &self.t;
        let mut slices = [RealMatrix3::ZERO; 3];
        for (s, slice) in slices.iter_mut().enumerate() {
            for r in 0..3 {
                for c in 0..3 {
                    slice.0[r][c] = match party {
                        Party::One => t[s][r][c],
                        Party::Two => t[r][s][c],
                        Party::Three => t[r][c][s],
                    };
                }
            }
        }
        CorrelationSlices {
            b: self.b[party.index() - 1],
            t: slices,
        }
    }

    /// `t(u, v, w) = sum t^{jkl} u_j v_k w_l`.
    pub fn three_body(&self, u: &[f64; 3], v: &[f64; 3], w: &[f64; 3]) -> f64 {
        let mut acc = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    acc += self.t[j][k][l] * u[j] * v[k] * w[l];
                }
            }
        }
        acc
    }
}

/// The eight states `Psi_j^+- = (|j> +- |7-j>)/sqrt2`, `j = 0..3`.
#[derive(Clone, Debug)]
pub struct GhzBasis {
    vectors: [[C64; 8]; 8],
}

impl Default for GhzBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl GhzBasis {
    pub fn new() -> Self {
        let mut vectors = [[ZERO; 8]; 8];
        for j in 0..4 {
            for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                let v = &mut vectors[2 * j + k];
                v[j] = C64::new(FRAC_1_SQRT_2, 0.0);
                v[7 - j] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
            }
        }
        Self { vectors }
    }

    /// `Psi_j^+` when `plus`, else `Psi_j^-`.
    pub fn vector(&self, j: usize, plus: bool) -> &[C64; 8] {
        &self.vectors[2 * j + usize::from(!plus)]
    }

    /// All eight vectors in the order `Psi_0^+, Psi_0^-, Psi_1^+, ...`.
    pub fn vectors(&self) -> &[[C64; 8]; 8] {
        &self.vectors
    }

    pub fn projector(&self, j: usize, plus: bool) -> ThreeQubitState {
        ThreeQubitState {
            rho: ComplexMatrix::projector(self.vector(j, plus)),
        }
    }

    /// `<Psi|rho|Psi>` for all eight basis states, same order as [`Self::vectors`].
    pub fn diagonal(&self, rho: &ComplexMatrix) -> [f64; 8] {
        self.vectors.map(|v| rho.expectation(&v).re)
    }
}

/// Weights of `l0+ P(Psi_0^+) + l0- P(Psi_0^-) + sum_j l_j (P(Psi_j^+) + P(Psi_j^-))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzDiagonalParams {
    pub lambda0_plus: f64,
    pub lambda0_minus: f64,
    /// `(lambda_1, lambda_2, lambda_3)`.
    pub lambda: [f64; 3],
}

impl GhzDiagonalParams {
    /// Checks `l0+ + l0- + 2 sum l_j = 1` and that each weight lies in `[0, 1]`.
    pub fn new(lambda0_plus: f64, lambda0_minus: f64, lambda: [f64; 3]) -> Result<Self> {
        let p = Self {
            lambda0_plus,
            lambda0_minus,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lambda0_plus,
            self.lambda0_minus,
            self.lambda[0],
            self.lambda[1],
            self.lambda[2],
        ];
        let sum = self.weight_sum();
        if all.iter().any(|&x| !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&x)) || (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::SimplexViolation(sum));
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.lambda0_plus + self.lambda0_minus + 2.0 * self.lambda.iter().sum::<f64>()
    }

    /// `l0+ >= l0-` and `l0+ >= l_j` for every j.
    pub fn is_canonical(&self) -> bool {
        self.lambda0_plus >= self.lambda0_minus && self.lambda.iter().all(|&l| self.lambda0_plus >= l)
    }

    pub fn ensure_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::NonCanonical)
        }
    }

    /// Swaps `l0+` and `l0-` when `l0-` is larger (a sigma_3 on one qubit).
    /// Returns the parameters and whether `l0+` now dominates every `l_j`.
    /// A dominant `l_j` is reported, not repaired.
    pub fn canonicalize(&self) -> (Self, bool) {
        let mut p = *self;
        if p.lambda0_minus > p.lambda0_plus {
            std::mem::swap(&mut p.lambda0_plus, &mut p.lambda0_minus);
        }
        (p, p.is_canonical())
    }

    /// `[l0+, l0-, l1, l2, l3]`.
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.lambda0_plus,
            self.lambda0_minus,
            self.lambda[0],
            self.lambda[1],
            self.lambda[2],
        ]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds the GHZ-diagonal state for the given weights.
pub fn from_ghz_params(p: &GhzDiagonalParams) -> Result<ThreeQubitState> {
    p.validate()?;
    let basis = GhzBasis::new();
    let weights = [
        p.lambda0_plus,
        p.lambda0_minus,
        p.lambda[0],
        p.lambda[0],
        p.lambda[1],
        p.lambda[1],
        p.lambda[2],
        p.lambda[2],
    ];
    let mut rho = ComplexMatrix::zeros(8, 8);
    for (v, w) in basis.vectors().iter().zip(weights) {
        // each projector only touches entries (j, j), (j, 7-j), (7-j, j), (7-j, 7-j)
        rho = &rho + &ComplexMatrix::projector(v).scale_re(w);
    }
    Ok(ThreeQubitState {
        rho: rho.hermitian_part(),
    })
}

/// GHZ-basis dephasing: keeps the GHZ-basis diagonal and averages each
/// `j != 0` pair.
pub fn depolarize_to_ghz(state: &ThreeQubitState) -> GhzDiagonalParams {
    let d = GhzBasis::new().diagonal(state.rho());
    GhzDiagonalParams {
        lambda0_plus: d[0],
        lambda0_minus: d[1],
        lambda: [(d[2] + d[3]) / 2.0, (d[4] + d[5]) / 2.0, (d[6] + d[7]) / 2.0],
    }
}

/// Ginibre-induced random state: `G G† / tr(G G†)` for an `8 x rank` matrix
/// of standard complex Gaussians.
pub fn random_mixed(seed: u64, rank: usize) -> Result<ThreeQubitState> {
    if !(1..=8).contains(&rank) {
        return Err(Error::InvalidRank(rank));
    }
    let mut rng = rng::from_seed(seed);
    let g = ComplexMatrix::from_fn(8, rank, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    Ok(ThreeQubitState {
        rho: gg.scale_re(1.0 / tr).hermitian_part(),
    })
}

/// Random mixed state whose rank is itself drawn uniformly from 1..=8.
pub fn random_mixed_any_rank(seed: u64) -> ThreeQubitState {
    let rank = rng::from_seed(rng::derive(seed, u64::MAX)).gen_range(1..=8);
    random_mixed(seed, rank).expect("rank in range")
}

/// Uniform Dirichlet over the weights `(l0+, l0-, 2l1, 2l2, 2l3)`, then
/// [`GhzDiagonalParams::canonicalize`].
pub fn random_ghz_params(seed: u64) -> GhzDiagonalParams {
    let mut rng = rng::from_seed(seed);
    let mut w = [0.0f64; 5];
    for x in w.iter_mut() {
        *x = Exp1.sample(&mut rng);
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let p = GhzDiagonalParams {
        lambda0_plus: w[0],
        lambda0_minus: w[1],
        lambda: [w[2] / 2.0, w[3] / 2.0, w[4] / 2.0],
    };
    p.canonicalize().0
}

/// First canonical draw from the sub-streams `derive(seed, 0), derive(seed, 1), ...`.
pub fn random_canonical_ghz_params(seed: u64) -> GhzDiagonalParams {
    (0u64..)
        .map(|k| random_ghz_params(rng::derive(seed, k)))
        .find(GhzDiagonalParams::is_canonical)
        .expect("canonical draws have positive probability")
}
