//! Arithmetic over `Z_d`, Shamir share generation and the Lagrange terms
//! `s_r = f(x_r) * prod_{j != r} x_j / (x_j - x_r) mod d`.
//!
//! `d` need not be prime. Every division is checked and a non-unit
//! denominator surfaces as [`Error::NotInvertible`].

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 16;

pub fn check_modulus(d: u64) -> Result<()> {
    if (2..=MAX_MODULUS).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidModulus(d))
    }
}

fn check_residue(value: u64, d: u64) -> Result<()> {
    if value < d {
        Ok(())
    } else {
        Err(Error::ResidueOutOfRange { value, modulus: d })
    }
}

/// Canonical representative of `value mod d` in `[0, d)`.
pub fn reduce(value: i64, d: u64) -> u64 {
    value.rem_euclid(d as i64) as u64
}

/// Dealer polynomial `f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1}` over `Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharePolynomial {
    d: u64,
    coeffs: Vec<u64>,
}

impl SharePolynomial {
    pub fn new(d: u64, coeffs: Vec<u64>) -> Result<Self> {
        check_modulus(d)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidThreshold(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        for &c in &coeffs {
            check_residue(c, d)?;
        }
        Ok(Self { d, coeffs })
    }

    /// Uniformly random polynomial with `t` coefficients.
    pub fn random<R: Rng + ?Sized>(d: u64, t: usize, rng: &mut R) -> Result<Self> {
        let coeffs = (0..t).map(|_| rng.gen_range(0..d)).collect();
        Self::new(d, coeffs)
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    /// Threshold `t`, the number of coefficients.
    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The secret `a_0`.
    pub fn secret(&self) -> u64 {
        self.coeffs[0]
    }
}

/// A point `(x, f(x))` handed to one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Share {
    pub x: u64,
    pub y: u64,
}

/// Lagrange summand `s_r` held by participant `r` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareTerm {
    pub r: usize,
    pub s: u64,
}

/// Inverse of `a` modulo `d` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, d: u64) -> Result<u64> {
    check_modulus(d)?;
    check_residue(a, d)?;
    let (mut old_r, mut r) = (a as i64, d as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { value: a, modulus: d });
    }
    Ok(reduce(old_s, d))
}

/// Horner evaluation of `p` at `x` (taken mod `d`).
pub fn eval_poly(p: &SharePolynomial, x: u64) -> u64 {
    let d = p.d;
    let x = x % d;
    p.coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % d)
}

/// One share per abscissa. Abscissae must be nonzero, below `d`, and distinct.
pub fn gen_shares(p: &SharePolynomial, xs: &[u64]) -> Result<Vec<Share>> {
    check_abscissae(xs.iter().copied(), p.d)?;
    Ok(xs.iter().map(|&x| Share { x, y: eval_poly(p, x) }).collect())
}

fn check_abscissae(xs: impl IntoIterator<Item = u64>, d: u64) -> Result<()> {
    let mut seen = HashSet::new();
    for x in xs {
        if x == 0 {
            return Err(Error::ZeroAbscissa);
        }
        check_residue(x, d)?;
        if !seen.insert(x) {
            return Err(Error::DuplicateAbscissa(x));
        }
    }
    Ok(())
}

fn check_shares(shares: &[Share], d: u64) -> Result<()> {
    check_modulus(d)?;
    if shares.is_empty() {
        return Err(Error::InvalidThreshold("need at least one share".into()));
    }
    check_abscissae(shares.iter().map(|s| s.x), d)?;
    for share in shares {
        check_residue(share.y, d)?;
    }
    Ok(())
}

/// Lagrange term `s_r` for the 1-based participant `r` among `shares`.
///
/// Each difference `x_j - x_r` is inverted separately, so a failure names the
/// exact denominator that has no inverse mod `d`.
pub fn lagrange_term(shares: &[Share], r: usize, d: u64) -> Result<ShareTerm> {
    check_shares(shares, d)?;
    if r == 0 || r > shares.len() {
        return Err(Error::IndexOutOfRange { index: r, len: shares.len() });
    }
    lagrange_term_unchecked(shares, r, d)
}

fn lagrange_term_unchecked(shares: &[Share], r: usize, d: u64) -> Result<ShareTerm> {
    let xr = shares[r - 1].x;
    let mut s = shares[r - 1].y;
    for (j, share) in shares.iter().enumerate() {
        if j + 1 == r {
            continue;
        }
        let denom = reduce(share.x as i64 - xr as i64, d);
        let inv = mod_inverse(denom, d)?;
        s = s * share.x % d * inv % d;
    }
    Ok(ShareTerm { r, s })
}

/// All `t` Lagrange terms, in participant order.
pub fn lagrange_terms(shares: &[Share], d: u64) -> Result<Vec<ShareTerm>> {
    check_shares(shares, d)?;
    (1..=shares.len())
        .map(|r| lagrange_term_unchecked(shares, r, d))
        .collect()
}

/// `sum_r s_r mod d`, which equals `a_0` for shares of a degree `< t` polynomial.
pub fn reconstruct_classical(shares: &[Share], d: u64) -> Result<u64> {
    Ok(lagrange_terms(shares, d)?
        .iter()
        .fold(0, |acc, term| (acc + term.s) % d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(d: u64, coeffs: &[u64]) -> SharePolynomial {
        SharePolynomial::new(d, coeffs.to_vec()).unwrap()
    }

    fn brute_inverse(a: u64, d: u64) -> Option<u64> {
        (1..d).find(|b| a * b % d == 1)
    }

    fn direct_sum(p: &SharePolynomial, x: u64) -> u64 {
        let d = p.modulus();
        let mut total = 0u64;
        let mut pow = 1u64;
        for &c in p.coeffs() {
            total += c * pow;
            pow *= x;
        }
        total % d
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 7), Ok(1));
        assert_eq!(brute_inverse(3, 4), Some(3));
        assert_eq!(mod_inverse(3, 4), Ok(3));
        assert_eq!(
            mod_inverse(2, 4),
            Err(Error::NotInvertible { value: 2, modulus: 4 })
        );
        assert!(matches!(mod_inverse(0, 5), Err(Error::NotInvertible { .. })));
        assert!(matches!(mod_inverse(5, 5), Err(Error::ResidueOutOfRange { .. })));
    }

    #[test]
    fn inverse_matches_brute_force() {
        for d in 2..=64u64 {
            for a in 1..d {
                assert_eq!(mod_inverse(a, d).ok(), brute_inverse(a, d), "a={a} d={d}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        let p = poly(5, &[3, 2]);
        assert_eq!(eval_poly(&p, 0), 3);
        assert_eq!(direct_sum(&p, 1), 0);
        assert_eq!(eval_poly(&p, 1), 0);
        let q = poly(7, &[5, 3, 2]);
        assert_eq!(direct_sum(&q, 3), 4);
        assert_eq!(eval_poly(&q, 3), 4);
        for x in 0..7 {
            assert_eq!(eval_poly(&q, x), direct_sum(&q, x));
        }
    }

    #[test]
    fn share_examples() {
        let p = poly(5, &[3, 2]);
        assert_eq!(
            gen_shares(&p, &[1, 2]).unwrap(),
            vec![Share { x: 1, y: 0 }, Share { x: 2, y: 2 }]
        );
        let q = poly(7, &[5, 3, 2]);
        assert_eq!(
            gen_shares(&q, &[1, 2, 3]).unwrap(),
            vec![Share { x: 1, y: 3 }, Share { x: 2, y: 5 }, Share { x: 3, y: 4 }]
        );
        assert_eq!(gen_shares(&p, &[1, 1]), Err(Error::DuplicateAbscissa(1)));
        assert_eq!(gen_shares(&p, &[0, 1]), Err(Error::ZeroAbscissa));
        assert!(matches!(
            gen_shares(&p, &[5]),
            Err(Error::ResidueOutOfRange { value: 5, modulus: 5 })
        ));
    }

    #[test]
    fn lagrange_examples() {
        let shares = [Share { x: 1, y: 0 }, Share { x: 2, y: 2 }];
        assert_eq!(lagrange_term(&shares, 2, 5), Ok(ShareTerm { r: 2, s: 3 }));
        assert_eq!(lagrange_term(&shares, 1, 5), Ok(ShareTerm { r: 1, s: 0 }));

        let single = [Share { x: 4, y: 6 }];
        assert_eq!(lagrange_term(&single, 1, 11), Ok(ShareTerm { r: 1, s: 6 }));

        let shares = [Share { x: 1, y: 3 }, Share { x: 2, y: 5 }, Share { x: 3, y: 4 }];
        let s: Vec<u64> = lagrange_terms(&shares, 7).unwrap().iter().map(|t| t.s).collect();
        assert_eq!(s, vec![2, 6, 4]);
    }

    #[test]
    fn lagrange_rejects_bad_input() {
        let shares = [Share { x: 1, y: 0 }, Share { x: 2, y: 2 }];
        assert!(matches!(
            lagrange_term(&shares, 0, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            lagrange_term(&shares, 3, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
        // x_2 - x_1 = 2 has no inverse mod 4
        let shares = [Share { x: 1, y: 0 }, Share { x: 3, y: 1 }];
        assert_eq!(
            lagrange_term(&shares, 1, 4),
            Err(Error::NotInvertible { value: 2, modulus: 4 })
        );
    }

    #[test]
    fn composite_modulus_with_unit_differences() {
        // d = 4, xs = {1, 2}: the only difference is 1, a unit.
        let p = poly(4, &[3, 1]);
        let shares = gen_shares(&p, &[1, 2]).unwrap();
        assert_eq!(reconstruct_classical(&shares, 4), Ok(3));
    }

    #[test]
    fn reconstruct_examples() {
        let p = poly(5, &[3, 2]);
        let shares = gen_shares(&p, &[1, 2]).unwrap();
        assert_eq!(reconstruct_classical(&shares, 5), Ok(3));
        let q = poly(7, &[5, 3, 2]);
        let shares = gen_shares(&q, &[1, 2, 3]).unwrap();
        assert_eq!(reconstruct_classical(&shares, 7), Ok(5));
        assert_eq!(reconstruct_classical(&[Share { x: 1, y: 4 }], 9), Ok(4));
    }

    #[test]
    fn modulus_bounds() {
        assert!(SharePolynomial::new(1, vec![0]).is_err());
        assert!(SharePolynomial::new(MAX_MODULUS + 1, vec![0]).is_err());
        assert!(SharePolynomial::new(5, vec![]).is_err());
        assert!(SharePolynomial::new(5, vec![5]).is_err());
    }
}
