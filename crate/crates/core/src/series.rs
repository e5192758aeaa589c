//! Truncated power series over the rationals and the generating functions of
//! irreducible marked permutations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::permutations::{all_arrangements, MarkedPermutation, Permutation};
use crate::mper::is_irreducible_mper;

pub const DEFAULT_ORDER: usize = 16;
pub const BRUTE_FORCE_CAP: usize = 7;

/// `c_0 + c_1 x + … + c_N x^N`, known up to `x^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series is known at least to order 0");
        RationalSeries { coeffs }
    }

    pub fn from_integers(order: usize, f: impl Fn(usize) -> BigInt) -> Self {
        RationalSeries { coeffs: (0..=order).map(|n| BigRational::from_integer(f(n))).collect() }
    }

    pub fn constant(c: i64, order: usize) -> Self {
        Self::from_integers(order, |n| if n == 0 { BigInt::from(c) } else { BigInt::zero() })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        RationalSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::domain("cannot invert a series with zero constant term"));
        }
        let mut inv: Vec<BigRational> = vec![c0.recip()];
        for n in 1..=self.order() {
            let mut s = BigRational::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &inv[n - k];
            }
            inv.push(-s / c0);
        }
        Ok(RationalSeries { coeffs: inv })
    }

    /// Termwise derivative; the result is known to one order less.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return RationalSeries { coeffs: vec![BigRational::zero()] };
        }
        RationalSeries {
            coeffs: (1..=self.order())
                .map(|n| &self.coeffs[n] * BigRational::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    /// Coefficients as integers, when they all are.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let order = self.order().min(other.order());
        RationalSeries { coeffs: (0..=order).map(|n| f(&self.coeffs[n], &other.coeffs[n])).collect() }
    }
}

// Binary operations truncate to the smaller of the two orders.

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: Self) -> RationalSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: Self) -> RationalSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        RationalSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: Self) -> RationalSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|n| (0..=n).fold(BigRational::zero(), |acc, k| acc + &self.coeffs[k] * &rhs.coeffs[n - k]))
            .collect();
        RationalSeries { coeffs }
    }
}

impl Mul<&RationalSeries> for i64 {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let k = BigRational::from_integer(BigInt::from(self));
        RationalSeries { coeffs: rhs.coeffs.iter().map(|c| c * &k).collect() }
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalSeries[{self}]")
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `P(x) = Σ n! xⁿ`.
pub fn factorial_series(order: usize) -> RationalSeries {
    RationalSeries::from_integers(order, factorial)
}

/// The generating functions of permutations and irreducible marked
/// permutations, all to the same order.
#[derive(Debug, Clone)]
pub struct IrreducibleSeries {
    pub p: RationalSeries,
    /// `P*(x) = P'(x)`, marked permutations by size.
    pub p_star: RationalSeries,
    /// `1 − 1/P`, `⊕`-indecomposable permutations.
    pub p_oplus: RationalSeries,
    /// Irreducible marked permutations.
    pub s_star: RationalSeries,
    /// Irreducible marked permutations that are `⊕`- and `⊖`-indecomposable.
    pub so_star: RationalSeries,
}

pub fn irreducible_series(order: usize) -> IrreducibleSeries {
    let p_long = factorial_series(order + 1);
    let p = p_long.truncate(order);
    let p_star = p_long.derivative();
    let inv_p = p.inverse().expect("P(0) = 1");
    let inv_p2 = (&p * &p).inverse().expect("P(0) = 1");
    let inv_dp = p_star.inverse().expect("P'(0) = 1");
    let one = RationalSeries::constant(1, order);
    let p_oplus = &one - &inv_p;
    let so_star = &(&RationalSeries::constant(-1, order) + &(2 * &inv_p2)) - &inv_dp;
    let s_star = &(&(&RationalSeries::constant(3, order) + &(2 * &inv_p2)) - &inv_dp) - &(4 * &inv_p);
    IrreducibleSeries { p, p_star, p_oplus, s_star, so_star }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrreducibleCounts {
    /// Irreducible marked permutations of size `0..=n_max`.
    pub s: Vec<u64>,
    /// Those that are moreover `⊕`- and `⊖`-indecomposable.
    pub so: Vec<u64>,
}

/// Exhaustive count over all `(n+1)·(n+1)!` marked permutations of each size.
pub fn brute_force_irreducible_counts(n_max: usize) -> Result<IrreducibleCounts> {
    brute_force_irreducible_counts_capped(n_max, BRUTE_FORCE_CAP)
}

pub fn brute_force_irreducible_counts_capped(n_max: usize, cap: usize) -> Result<IrreducibleCounts> {
    if n_max > cap {
        return Err(Error::resource("brute-force irreducible count", n_max, cap));
    }
    let mut s = Vec::with_capacity(n_max + 1);
    let mut so = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (a, b) = all_arrangements(n + 1)
            .into_par_iter()
            .map(|values| {
                let mut counts = (0u64, 0u64);
                for mark in 0..=n {
                    let alpha = MarkedPermutation::from_parts_unchecked(values.clone(), mark);
                    if is_irreducible_mper(&alpha) {
                        counts.0 += 1;
                        if alpha.is_indecomposable() {
                            counts.1 += 1;
                        }
                    }
                }
                counts
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        s.push(a);
        so.push(b);
    }
    Ok(IrreducibleCounts { s, so })
}

/// `⊕`-indecomposable permutations of each size `0..=n_max`.
pub fn brute_force_oplus_indecomposable_counts(n_max: usize) -> Result<Vec<u64>> {
    if n_max > BRUTE_FORCE_CAP + 1 {
        return Err(Error::resource("brute-force indecomposable count", n_max, BRUTE_FORCE_CAP + 1));
    }
    Ok((0..=n_max)
        .map(|n| {
            all_arrangements(n)
                .into_par_iter()
                .filter(|v| Permutation::new(v.clone()).expect("arrangement").is_oplus_indecomposable())
                .count() as u64
        })
        .collect())
}
