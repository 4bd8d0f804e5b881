//! Dense state-vector engine for `t` qudits of local dimension `d`.
//!
//! Qudits are numbered from 1. Basis index `I` encodes `(k_1, ..., k_t)` as
//! `I = k_1 d^{t-1} + k_2 d^{t-2} + ... + k_t`, so qudit 1 is the most
//! significant digit. Registers are immutable values; every operation returns
//! a new register.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of amplitudes (`d^t`) in a register.
pub const DEFAULT_SIZE_CAP: usize = 1 << 22;

/// Environment variable that overrides [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "QSS_SIZE_CAP";

/// Tolerance for comparing states and checking normalization.
pub const STATE_TOL: f64 = 1e-10;

/// Probabilities below this are treated as zero.
pub const PRUNE_TOL: f64 = 1e-12;

/// Size cap from [`SIZE_CAP_ENV`], falling back to the default when unset or unparsable.
pub fn size_cap_from_env() -> usize {
    std::env::var(SIZE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// `d^t`, or `SizeCapExceeded` when it overflows or exceeds `cap`.
pub fn checked_size(d: usize, t: usize, cap: usize) -> Result<usize> {
    let err = Error::SizeCapExceeded { dim: d, count: t, cap };
    let exp = u32::try_from(t).map_err(|_| err.clone())?;
    match d.checked_pow(exp) {
        Some(n) if n <= cap => Ok(n),
        _ => Err(err),
    }
}

/// `omega^n` with `omega = e^{2 pi i / d}`; the exponent is reduced mod `d` first.
pub fn root_of_unity(d: usize, n: i64) -> Complex64 {
    let k = n.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, TAU * k / d as f64)
}

/// `[omega^0, omega^1, ..., omega^{d-1}]`.
fn roots_table(d: usize) -> Vec<Complex64> {
    (0..d).map(|k| root_of_unity(d, k as i64)).collect()
}

fn check_dim(d: usize) -> Result<()> {
    if d >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("qudit dimension must be >= 2, got {d}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditRegister {
    d: usize,
    t: usize,
    amps: Vec<Complex64>,
}

impl QuditRegister {
    /// Wraps an amplitude vector, checking its length and normalization.
    pub fn from_amplitudes(d: usize, t: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_dim(d)?;
        if t == 0 {
            return Err(Error::InvalidParams("register needs at least one qudit".into()));
        }
        let expected = checked_size(d, t, usize::MAX)?;
        if amps.len() != expected {
            return Err(Error::InvalidParams(format!(
                "expected {expected} amplitudes for d={d}, t={t}, got {}",
                amps.len()
            )));
        }
        let reg = Self { d, t, amps };
        let norm_sqr = reg.norm_sqr();
        if (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidParams(format!(
                "amplitudes not normalized (squared norm {norm_sqr})"
            )));
        }
        Ok(reg)
    }

    /// Computational basis state `|k_1 k_2 ... k_t>`.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        check_dim(d)?;
        let n = checked_size(d, digits.len(), usize::MAX)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        let mut index = 0;
        for &k in digits {
            if k >= d {
                return Err(Error::InvalidParams(format!("basis digit {k} out of range for d={d}")));
            }
            index = index * d + k;
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(d, digits.len(), amps)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn qudits(&self) -> usize {
        self.t
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Base-`d` digits `(k_1, ..., k_t)` of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.t];
        for slot in out.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &k| acc * self.d + k)
    }

    /// Largest entrywise distance to `other`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.d != other.d || self.t != other.t {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    fn check_qudit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.t {
            Err(Error::IndexOutOfRange { index: q, len: self.t })
        } else {
            Ok(())
        }
    }

    /// Distance in the amplitude vector between consecutive values of qudit `q`.
    fn stride(&self, q: usize) -> usize {
        self.d.pow((self.t - q) as u32)
    }
}

/// Visits the amplitude vector as contiguous runs of length `stride` that share
/// one value `k` of the digit with that stride.
fn for_each_run(len: usize, stride: usize, d: usize, mut f: impl FnMut(std::ops::Range<usize>, usize)) {
    for base in (0..len).step_by(stride * d) {
        for k in 0..d {
            let start = base + k * stride;
            f(start..start + stride, k);
        }
    }
}

/// `(1/sqrt(d)) sum_k |k k ... k>` on `t` qudits.
pub fn make_ghz(d: usize, t: usize) -> Result<QuditRegister> {
    make_ghz_capped(d, t, DEFAULT_SIZE_CAP)
}

pub fn make_ghz_capped(d: usize, t: usize, cap: usize) -> Result<QuditRegister> {
    check_dim(d)?;
    if t == 0 {
        return Err(Error::InvalidParams("GHZ state needs at least one qudit".into()));
    }
    let n = checked_size(d, t, cap)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    // (k, k, ..., k) sits at k * (1 + d + ... + d^{t-1})
    let step = (0..t).fold(0, |acc, _| acc * d + 1);
    for k in 0..d {
        amps[k * step] = amp;
    }
    Ok(QuditRegister { d, t, amps })
}

/// Single-qudit Fourier state `(1/sqrt(d)) sum_k omega^{S k} |k>`.
pub fn fourier_state(d: usize, s: u64) -> Result<QuditRegister> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    let amps = (0..d)
        .map(|k| root_of_unity(d, (s as i64) * k as i64) * norm)
        .collect();
    Ok(QuditRegister { d, t: 1, amps })
}

/// A `d x d` unitary acting on one qudit, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    d: usize,
    m: Vec<Complex64>,
}

impl LocalUnitary {
    /// Builds from a row-major matrix, rejecting non-unitary input.
    pub fn from_matrix(d: usize, m: Vec<Complex64>) -> Result<Self> {
        check_dim(d)?;
        if m.len() != d * d {
            return Err(Error::InvalidParams(format!(
                "expected {} matrix entries, got {}",
                d * d,
                m.len()
            )));
        }
        let u = Self { d, m };
        if !u.is_unitary(STATE_TOL) {
            return Err(Error::InvalidParams("matrix is not unitary".into()));
        }
        Ok(u)
    }

    pub fn identity(d: usize) -> Self {
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            m[k * d + k] = Complex64::new(1.0, 0.0);
        }
        Self { d, m }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row * self.d + col]
    }

    pub fn dagger(&self) -> Self {
        let d = self.d;
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.m[i * d + j].conj();
            }
        }
        Self { d, m }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::DimensionMismatch { register: rhs.d, operator: self.d });
        }
        let d = self.d;
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                for j in 0..d {
                    m[i * d + j] += a * rhs.m[k * d + j];
                }
            }
        }
        Ok(Self { d, m })
    }

    /// Entrywise distance of `u u^dagger` from the identity is within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let product = self.compose(&self.dagger()).expect("same dimension");
        product.approx_eq(&Self::identity(self.d), tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.d == other.d && self.m.iter().zip(&other.m).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `u |v>` for a single-qudit vector.
    pub fn is_diagonal(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        (0..self.d).all(|i| (0..self.d).all(|j| i == j || self.m[i * self.d + j] == zero))
    }

    pub fn apply_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|k| self.m[i * self.d + k] * v[k]).sum())
            .collect()
    }
}

/// `U_{0,s} = sum_k omega^{s k} |k><k|`.
pub fn phase_gate(d: usize, s: u64) -> LocalUnitary {
    let roots = roots_table(d);
    let s = s as usize % d;
    let mut u = LocalUnitary::identity(d);
    for k in 0..d {
        u.m[k * d + k] = roots[s * k % d];
    }
    u
}

/// Inverse Fourier transform on `Z_d`: entry `(j, k)` is `omega^{-jk} / sqrt(d)`.
pub fn qft_inv(d: usize) -> LocalUnitary {
    let norm = 1.0 / (d as f64).sqrt();
    let roots = roots_table(d);
    let m = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j * k) % d))
        .map(|e| roots[(d - e) % d] * norm)
        .collect();
    LocalUnitary { d, m }
}

/// Forward Fourier transform, the conjugate transpose of [`qft_inv`].
pub fn qft(d: usize) -> LocalUnitary {
    qft_inv(d).dagger()
}

/// Applies `u` to qudit `q` and the identity to every other qudit.
pub fn apply_local(reg: &QuditRegister, q: usize, u: &LocalUnitary) -> Result<QuditRegister> {
    reg.check_qudit(q)?;
    if u.d != reg.d {
        return Err(Error::DimensionMismatch { register: reg.d, operator: u.d });
    }
    let d = reg.d;
    let stride = reg.stride(q);
    if u.is_diagonal() {
        let mut amps = reg.amps.clone();
        for_each_run(amps.len(), stride, d, |range, k| {
            let phase = u.m[k * d + k];
            for a in &mut amps[range] {
                *a *= phase;
            }
        });
        return Ok(QuditRegister { d, t: reg.t, amps });
    }
    let block = stride * d;
    let mut out = vec![Complex64::new(0.0, 0.0); reg.amps.len()];
    let mut column = vec![Complex64::new(0.0, 0.0); d];
    for base in (0..reg.amps.len()).step_by(block) {
        for inner in 0..stride {
            for (k, slot) in column.iter_mut().enumerate() {
                *slot = reg.amps[base + inner + k * stride];
            }
            for j in 0..d {
                let row = &u.m[j * d..(j + 1) * d];
                out[base + inner + j * stride] =
                    row.iter().zip(&column).map(|(a, b)| a * b).sum();
            }
        }
    }
    Ok(QuditRegister { d, t: reg.t, amps: out })
}

/// Born-rule distribution of one qudit's computational-basis outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalDistribution {
    pub probs: Vec<f64>,
}

impl MarginalDistribution {
    /// One draw by cumulative sum over outcomes with probability at least
    /// [`PRUNE_TOL`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let support = || self.probs.iter().copied().enumerate().filter(|&(_, p)| p >= PRUNE_TOL);
        let total: f64 = support().map(|(_, p)| p).sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (v, p) in support() {
            acc += p;
            if target < acc {
                return v;
            }
            last = v;
        }
        last
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    /// Largest distance of any entry from the uniform value `1/d`.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
    }
}

pub fn marginal(reg: &QuditRegister, q: usize) -> Result<MarginalDistribution> {
    reg.check_qudit(q)?;
    let mut probs = vec![0.0; reg.d];
    for_each_run(reg.amps.len(), reg.stride(q), reg.d, |range, k| {
        probs[k] += reg.amps[range].iter().map(|a| a.norm_sqr()).sum::<f64>();
    });
    Ok(MarginalDistribution { probs })
}

/// Projects qudit `q` onto `|v>` and renormalizes. Returns the branch probability
/// alongside the post-measurement state.
pub fn project(reg: &QuditRegister, q: usize, v: usize) -> Result<(f64, QuditRegister)> {
    reg.check_qudit(q)?;
    if v >= reg.d {
        return Err(Error::ZeroNormProjection { qudit: q, outcome: v });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); reg.amps.len()];
    let mut prob = 0.0;
    for_each_run(amps.len(), reg.stride(q), reg.d, |range, k| {
        if k == v {
            prob += reg.amps[range.clone()].iter().map(|a| a.norm_sqr()).sum::<f64>();
            amps[range.clone()].copy_from_slice(&reg.amps[range]);
        }
    });
    if prob < PRUNE_TOL {
        return Err(Error::ZeroNormProjection { qudit: q, outcome: v });
    }
    let scale = 1.0 / prob.sqrt();
    for a in &mut amps {
        *a *= scale;
    }
    Ok((prob, QuditRegister { d: reg.d, t: reg.t, amps }))
}

/// Computational-basis measurement of qudit `q`.
///
/// Outcomes with probability below [`PRUNE_TOL`] are never sampled. The same
/// RNG state always yields the same outcome.
pub fn measure<R: Rng + ?Sized>(
    reg: &QuditRegister,
    q: usize,
    rng: &mut R,
) -> Result<(usize, QuditRegister)> {
    let outcome = sample_outcome(reg, q, rng)?;
    let (_, post) = project(reg, q, outcome)?;
    Ok((outcome, post))
}

/// Draws a measurement outcome for qudit `q` exactly as [`measure`] does,
/// without building the post-measurement state.
pub fn sample_outcome<R: Rng + ?Sized>(reg: &QuditRegister, q: usize, rng: &mut R) -> Result<usize> {
    Ok(marginal(reg, q)?.sample(rng))
}

/// Distribution over full outcome tuples `(m_1, ..., m_t)`; entries below
/// [`PRUNE_TOL`] are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub d: usize,
    pub entries: BTreeMap<Vec<usize>, f64>,
}

impl JointDistribution {
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Marginalizes onto the listed 1-based qudits, in the given order.
    pub fn restricted(&self, qudits: &[usize]) -> JointDistribution {
        let mut entries = BTreeMap::new();
        for (tuple, p) in &self.entries {
            let key: Vec<usize> = qudits.iter().map(|&q| tuple[q - 1]).collect();
            *entries.entry(key).or_insert(0.0) += p;
        }
        JointDistribution { d: self.d, entries }
    }
}

pub fn joint_distribution(reg: &QuditRegister) -> JointDistribution {
    let entries = reg
        .amps
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let p = a.norm_sqr();
            (p > PRUNE_TOL).then(|| (reg.digits(i), p))
        })
        .collect();
    JointDistribution { d: reg.d, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz_examples() {
        let g = make_ghz(2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(g.approx_eq(
            &QuditRegister::from_amplitudes(2, 2, vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)])
                .unwrap(),
            1e-15
        ));

        let g = make_ghz(4, 3).unwrap();
        for (i, a) in g.amplitudes().iter().enumerate() {
            let k = g.digits(i);
            let expected = if k[0] == k[1] && k[1] == k[2] { 0.5 } else { 0.0 };
            assert!((a - c(expected, 0.0)).norm() < 1e-15);
        }

        let g = make_ghz(3, 1).unwrap();
        for a in g.amplitudes() {
            assert!((a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn ghz_size_cap() {
        assert!(matches!(
            make_ghz_capped(4, 3, 63),
            Err(Error::SizeCapExceeded { .. })
        ));
        assert!(make_ghz_capped(4, 3, 64).is_ok());
        assert!(matches!(make_ghz(2, 64), Err(Error::SizeCapExceeded { .. })));
        assert!(make_ghz(1, 2).is_err());
        assert!(make_ghz(2, 0).is_err());
    }

    #[test]
    fn phase_gate_examples() {
        assert!(phase_gate(5, 0).approx_eq(&LocalUnitary::identity(5), 0.0));
        let u = phase_gate(4, 3);
        let one = u.apply_vector(&[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!((one[1] - c(0., -1.)).norm() < 1e-15);
        let two = u.apply_vector(&[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert!((two[2] - c(-1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn qft_inv_columns_for_d4() {
        let u = qft_inv(4);
        let input = [c(0., 0.), root_of_unity(4, 3), c(0., 0.), c(0., 0.)];
        let out = u.apply_vector(&input);
        let expected = [c(0., -0.5), c(-0.5, 0.), c(0., 0.5), c(0.5, 0.)];
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
        let out = u.apply_vector(&[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        for a in out {
            assert!((a - c(0.5, 0.)).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_inverts_qft_inv() {
        for d in 2..=12 {
            let product = qft(d).compose(&qft_inv(d)).unwrap();
            assert!(product.approx_eq(&LocalUnitary::identity(d), 1e-10), "d={d}");
            assert!(qft(d).is_unitary(1e-10));
            assert!(qft_inv(d).is_unitary(1e-10));
        }
        let h = qft(2).apply_vector(&[c(1., 0.), c(0., 0.)]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h[0] - c(r, 0.)).norm() < 1e-15 && (h[1] - c(r, 0.)).norm() < 1e-15);
    }

    #[test]
    fn fourier_state_inverts_to_basis() {
        for d in 2..=16 {
            for s in 0..d as u64 {
                let out = apply_local(&fourier_state(d, s).unwrap(), 1, &qft_inv(d)).unwrap();
                for (j, a) in out.amplitudes().iter().enumerate() {
                    if j as u64 == s {
                        assert!((a.norm() - 1.0).abs() < 1e-10);
                    } else {
                        assert!(a.norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn apply_local_errors() {
        let g = make_ghz(3, 2).unwrap();
        assert_eq!(
            apply_local(&g, 0, &qft_inv(3)),
            Err(Error::IndexOutOfRange { index: 0, len: 2 })
        );
        assert_eq!(
            apply_local(&g, 3, &qft_inv(3)),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        );
        assert_eq!(
            apply_local(&g, 1, &qft_inv(4)),
            Err(Error::DimensionMismatch { register: 3, operator: 4 })
        );
        assert_eq!(apply_local(&g, 2, &LocalUnitary::identity(3)).unwrap(), g);
    }

    #[test]
    fn apply_local_acts_on_the_right_digit() {
        // |0 1 2> with X-like shift on qudit 2 via a permutation unitary
        let d = 3;
        let reg = QuditRegister::basis(d, &[0, 1, 2]).unwrap();
        let mut m = vec![c(0., 0.); 9];
        for k in 0..d {
            m[((k + 1) % d) * d + k] = c(1., 0.);
        }
        let shift = LocalUnitary::from_matrix(d, m).unwrap();
        let out = apply_local(&reg, 2, &shift).unwrap();
        assert_eq!(out, QuditRegister::basis(d, &[0, 2, 2]).unwrap());
        let out = apply_local(&reg, 3, &shift).unwrap();
        assert_eq!(out, QuditRegister::basis(d, &[0, 1, 0]).unwrap());
    }

    #[test]
    fn marginal_examples() {
        let b = QuditRegister::basis(4, &[3, 1, 0]).unwrap();
        assert_eq!(marginal(&b, 1).unwrap().probs, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(marginal(&b, 2).unwrap().probs, vec![0.0, 1.0, 0.0, 0.0]);
        for d in 2..=6 {
            let m = marginal(&make_ghz(d, 3).unwrap(), 2).unwrap();
            assert!(m.max_deviation_from_uniform() < 1e-12);
        }
        assert!(matches!(marginal(&b, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn measure_basis_state_is_deterministic() {
        let b = QuditRegister::basis(4, &[3, 3, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (v, post) = measure(&b, 1, &mut rng).unwrap();
            assert_eq!(v, 3);
            assert!(post.approx_eq(&b, 1e-15));
        }
    }

    #[test]
    fn measure_collapses_ghz() {
        let g = make_ghz(4, 3).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (v, post) = measure(&g, 2, &mut rng).unwrap();
            assert!(post.approx_eq(&QuditRegister::basis(4, &[v, v, v]).unwrap(), 1e-12));
        }
    }

    #[test]
    fn measure_reproducible_per_seed() {
        let g = make_ghz(5, 2).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| measure(&g, 1, &mut rng).unwrap().0).collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn project_zero_branch() {
        let b = QuditRegister::basis(3, &[1, 2]).unwrap();
        assert_eq!(
            project(&b, 1, 0),
            Err(Error::ZeroNormProjection { qudit: 1, outcome: 0 })
        );
    }

    #[test]
    fn joint_of_bell_pair() {
        let j = joint_distribution(&make_ghz(2, 2).unwrap());
        assert_eq!(j.entries.len(), 2);
        assert!((j.entries[&vec![0, 0]] - 0.5).abs() < 1e-15);
        assert!((j.entries[&vec![1, 1]] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(QuditRegister::from_amplitudes(2, 1, vec![c(1., 0.), c(1., 0.)]).is_err());
        assert!(QuditRegister::from_amplitudes(2, 2, vec![c(1., 0.), c(0., 0.)]).is_err());
        assert!(LocalUnitary::from_matrix(2, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]).is_err());
    }
}
