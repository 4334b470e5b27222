//! Pair counts `R` and the normalized pair correlation statistic
//! `F = R / (N^2 p^-k0)`.
//!
//! `|x_i - x_j|_p <= p^-k0` holds exactly when `x_i = x_j mod p^k0`, so `R`
//! is a sum over residue classes: `R = sum_c n_c (n_c - 1)`.

use std::collections::HashMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{ball_exponent, ball_exponent_from, haar_measure, vp_int, PadicInt, Prime};
use crate::padic::{RadiusExponent, ScaleParams, Valuation};
use crate::rational::{from_u64, to_f64};
use crate::sequences::{Exactness, SequenceSpec};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct PairCorrStat {
    pub n: usize,
    pub k0: RadiusExponent,
    /// Ordered pairs `i != j` in a common ball.
    pub r: u64,
    pub f_exact: Rational,
    pub f_float: f64,
}

impl PairCorrStat {
    fn new(n: usize, k0: RadiusExponent, r: u64, p: Prime) -> Self {
        let f_exact = normalized(r, n, k0, p);
        PairCorrStat {
            n,
            k0,
            r,
            f_float: to_f64(&f_exact),
            f_exact,
        }
    }

    /// Unordered pair count.
    pub fn unordered(&self) -> u64 {
        self.r / 2
    }
}

fn normalized(r: u64, n: usize, k0: RadiusExponent, p: Prime) -> Rational {
    let n2 = from_u64(n as u64) * from_u64(n as u64);
    from_u64(r) / (n2 * haar_measure(k0, p))
}

fn guard_precision(x: &[PadicInt], k0: RadiusExponent, exactness: Exactness) -> Result<()> {
    if let (Exactness::Approximate, Some(first)) = (exactness, x.first()) {
        if k0.0 >= first.precision() {
            return Err(Error::PrecisionExhausted {
                k0: k0.0,
                precision: first.precision(),
            });
        }
    }
    Ok(())
}

/// `R` by residue bucketing. Approximate sequences refuse `k0 >= K`, where
/// truncation collisions would be counted as genuine pairs.
pub fn pair_count(x: &[PadicInt], k0: RadiusExponent, exactness: Exactness) -> Result<u64> {
    guard_precision(x, k0, exactness)?;
    let mut residues: Vec<u64> = x.iter().map(|xi| xi.residue(k0.0)).collect();
    residues.sort_unstable();
    let r = residues
        .chunk_by(|a, b| a == b)
        .map(|run| {
            let c = run.len() as u64;
            c * (c - 1)
        })
        .sum();
    Ok(r)
}

/// `R` by checking `v_p(x_i - x_j) >= k0` for every ordered pair. Test oracle.
pub fn pair_count_bruteforce(x: &[PadicInt], k0: RadiusExponent) -> u64 {
    let mut r = 0;
    for (i, xi) in x.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = xi.value() as i128 - xj.value() as i128;
            if vp_int(&diff, xi.prime()) >= Valuation::Finite(k0.0) {
                r += 1;
            }
        }
    }
    r
}

/// `F_{N,alpha,p}(s)` over the whole slice (`N = x.len()`).
pub fn pair_correlation_f(
    x: &[PadicInt],
    params: &ScaleParams,
    exactness: Exactness,
) -> Result<PairCorrStat> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!("need N >= 2 elements, got {n}")));
    }
    let p = x[0].prime();
    let k0 = ball_exponent(params, n as u64, p);
    let r = pair_count(x, k0, exactness)?;
    Ok(PairCorrStat::new(n, k0, r, p))
}

/// `E[R] = N (N - 1) p^-k0` for i.i.d. uniform elements.
pub fn expected_r(n: u64, k0: RadiusExponent, p: Prime) -> Rational {
    from_u64(n) * from_u64(n.saturating_sub(1)) * haar_measure(k0, p)
}

/// `Var[R]` for i.i.d. uniform elements: `2 N (N - 1) mu (1 - mu)`.
///
/// Indicators of distinct unordered pairs are pairwise uncorrelated, and each
/// unordered pair is counted twice in `R`.
pub fn variance_r(n: u64, k0: RadiusExponent, p: Prime) -> Rational {
    let mu = haar_measure(k0, p);
    from_u64(2) * from_u64(n) * from_u64(n.saturating_sub(1)) * &mu * (Rational::one() - &mu)
}

/// `F` for every prefix `x_1..x_N`, `N = 2..=x.len()`.
///
/// Counts are updated incrementally and only rebuilt when `k0` grows, so the
/// whole scan costs about `O(len * (1 + number of distinct k0))`.
pub fn ppc_prefix_scan(
    x: &[PadicInt],
    params: &ScaleParams,
    exactness: Exactness,
) -> Result<Vec<PairCorrStat>> {
    let Some(first) = x.first() else {
        return Ok(Vec::new());
    };
    let p = first.prime();
    let mut rows = Vec::with_capacity(x.len().saturating_sub(1));
    let mut k0 = ball_exponent(params, 1, p);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut r = 0u64;
    counts.insert(first.residue(k0.0), 1);
    for n in 2..=x.len() {
        let next = ball_exponent_from(params, n as u64, p, k0);
        if next != k0 {
            k0 = next;
            counts.clear();
            r = 0;
            for xi in &x[..n - 1] {
                let c = counts.entry(xi.residue(k0.0)).or_insert(0);
                r += 2 * *c;
                *c += 1;
            }
        }
        guard_precision(x, k0, exactness)?;
        let c = counts.entry(x[n - 1].residue(k0.0)).or_insert(0);
        r += 2 * *c;
        *c += 1;
        rows.push(PairCorrStat::new(n, k0, r, p));
    }
    Ok(rows)
}

/// One row per `N` in `n_grid` (ascending), evaluated on prefixes of `spec`.
pub fn ppc_convergence_scan(
    spec: &SequenceSpec,
    n_grid: &[usize],
    params: &ScaleParams,
) -> Result<Vec<PairCorrStat>> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N grid must be strictly ascending"));
    }
    let Some(&max_n) = n_grid.last() else {
        return Ok(Vec::new());
    };
    let xs = spec.materialize(max_n)?;
    n_grid
        .iter()
        .map(|&n| pair_correlation_f(&xs[..n], params, spec.exactness))
        .collect()
}

/// `|R / N^2 - mu|` compared with the bound obtained from the discrepancy of
/// the difference sequence, after removing a prefix of trivial differences.
///
/// The ball `D_p(0, p^-k0)` holds `R + N` of the `N^2` differences. Dropping
/// a prefix of `m` zeros changes its count by `m`, so
/// `|R' / N^2 - mu| <= E_{N^2} + m / N^2` where `R'` counts the remaining
/// differences in the ball. With the diagonal prefix `m = N` and `R' = R`.
/// The wider `m = 2N` prefix gives the weaker `2/N` slack.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceBound {
    pub deviation: Rational,
    pub bound: Rational,
    pub holds: bool,
}

/// Length of the trivial prefix removed from the difference sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrivialPrefix {
    /// The `N` diagonal differences `x_i - x_i`.
    Diagonal,
    /// A prefix of `2N` elements.
    Doubled,
}

impl TrivialPrefix {
    pub fn len(self, n: usize) -> usize {
        match self {
            TrivialPrefix::Diagonal => n,
            TrivialPrefix::Doubled => 2 * n,
        }
    }
}

pub fn difference_bound(
    x: &[PadicInt],
    k0: RadiusExponent,
    difference_discrepancy: &Rational,
    prefix: TrivialPrefix,
) -> Result<DifferenceBound> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("empty sequence"));
    }
    let p = x[0].prime();
    let r = pair_count(x, k0, Exactness::Exact)?;
    let n2 = from_u64((n * n) as u64);
    let deviation = num_traits::Signed::abs(&(from_u64(r) / &n2 - haar_measure(k0, p)));
    let bound = difference_discrepancy + from_u64(prefix.len(n) as u64) / &n2;
    Ok(DifferenceBound {
        holds: deviation <= bound,
        deviation,
        bound,
    })
}
