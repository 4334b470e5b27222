//! Exact p-adic discrepancy
//! `D_N = sup_{z, k} | #(D_p(z, p^-k) ∩ {x_1..x_N}) / N - p^-k |`
//! and the difference-sequence sandwich `D_N^2 <= E_{N^2} <= D_N`.
//!
//! Balls of radius `p^-k` are residue classes mod `p^k`, so level `k`
//! contributes `max |n_c / N - p^-k|` over the classes, plus `p^-k` when some
//! class is empty. The levels are read off a digit trie built least
//! significant digit first.
//!
//! The supremum over infinitely many `k` has a closed form. Let `k_sep` be the
//! first level where the classes coincide with the distinct values. Beyond
//! `k_sep + 1` every level contributes `max(m_max / N - p^-k, p^-k)` with
//! `p^-k` below the empty-class term already seen at `k_sep + 1`, so
//! `D_N = max(levels 0..=k_sep+1, m_max / N)` and the last term is a limit
//! that no level attains.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{haar_measure, PadicInt, Prime, RadiusExponent};
use crate::rational::from_u64;
use crate::sequences::{difference_sequence, DifferenceOrder};
use crate::Rational;

/// Ball realizing the discrepancy, or the unattained tail limit `m_max / N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    Ball { residue: u64, level: u32 },
    TailLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelMax {
    pub level: u32,
    pub deviation: Rational,
    /// Smallest residue mod `p^level` whose ball attains `deviation`.
    pub residue: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub d_exact: Rational,
    pub attained: bool,
    pub witness: Witness,
    /// Levels `0..=k_sep + 1`.
    pub per_level: Vec<LevelMax>,
    pub separation_level: u32,
    /// `m_max / N`, the limit of the level maxima.
    pub tail_limit: Rational,
}

const NONE: u32 = u32::MAX;

/// Digit trie over residues; node `i` at depth `k` is a class mod `p^k`.
struct ResidueTrie {
    counts: Vec<u64>,
    residues: Vec<u64>,
    children: Vec<u32>,
    /// Node ids per depth.
    levels: Vec<Vec<u32>>,
}

impl ResidueTrie {
    fn build(x: &[PadicInt]) -> Self {
        let p = x[0].prime().get();
        let depth = x[0].precision();
        let mut trie = ResidueTrie {
            counts: vec![0],
            residues: vec![0],
            children: vec![NONE; p as usize],
            levels: vec![vec![0]],
        };
        for xi in x {
            let mut node = 0usize;
            trie.counts[0] += 1;
            let mut rest = xi.value();
            let mut place = 1u64;
            for k in 0..depth {
                let digit = rest % p;
                rest /= p;
                let slot = node * p as usize + digit as usize;
                let mut child = trie.children[slot];
                if child == NONE {
                    child = trie.counts.len() as u32;
                    trie.children[slot] = child;
                    trie.counts.push(0);
                    trie.residues.push(trie.residues[node] + digit * place);
                    trie.children.extend(std::iter::repeat_n(NONE, p as usize));
                    if trie.levels.len() <= (k + 1) as usize {
                        trie.levels.push(Vec::new());
                    }
                    trie.levels[(k + 1) as usize].push(child);
                }
                node = child as usize;
                trie.counts[node] += 1;
                place = place.wrapping_mul(p);
            }
        }
        trie
    }

    fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// Classes at level `k`; beyond the stored depth the classes are the values.
    fn classes(&self, k: u32) -> impl Iterator<Item = (u64, u64)> + '_ {
        let level = k.min(self.depth()) as usize;
        self.levels[level]
            .iter()
            .map(|&id| (self.residues[id as usize], self.counts[id as usize]))
    }
}

/// `p^k` if it fits in a `u128`.
fn modulus(p: Prime, k: u32) -> Option<u128> {
    (p.get() as u128).checked_pow(k)
}

/// Smallest residue mod `p^k` not in `present`, if any.
fn smallest_missing(present: &mut [u64], p: Prime, k: u32) -> Option<u64> {
    if let Some(m) = modulus(p, k) {
        if present.len() as u128 >= m {
            return None;
        }
    }
    present.sort_unstable();
    let mut expected = 0u64;
    for &r in present.iter() {
        if r != expected {
            return Some(expected);
        }
        expected += 1;
    }
    Some(expected)
}

fn deviation(count: u64, n: usize, mass: &Rational) -> Rational {
    (from_u64(count) / from_u64(n as u64) - mass).abs()
}

fn level_max(trie: &ResidueTrie, k: u32, n: usize, p: Prime) -> LevelMax {
    let mass = haar_measure(RadiusExponent(k), p);
    let mut max_count = (0u64, u64::MAX);
    let mut min_count = (u64::MAX, u64::MAX);
    let mut present = Vec::new();
    for (residue, count) in trie.classes(k) {
        present.push(residue);
        if count > max_count.0 || (count == max_count.0 && residue < max_count.1) {
            max_count = (count, residue);
        }
        if count < min_count.0 || (count == min_count.0 && residue < min_count.1) {
            min_count = (count, residue);
        }
    }
    let mut candidates = vec![
        (deviation(max_count.0, n, &mass), max_count.1),
        (deviation(min_count.0, n, &mass), min_count.1),
    ];
    if let Some(residue) = smallest_missing(&mut present, p, k) {
        candidates.push((mass.clone(), residue));
    }
    let (deviation, residue) = candidates
        .into_iter()
        .reduce(|best, c| {
            if c.0 > best.0 || (c.0 == best.0 && c.1 < best.1) {
                c
            } else {
                best
            }
        })
        .expect("at least two candidates");
    LevelMax {
        level: k,
        deviation,
        residue,
    }
}

/// Exact `D_N` of `x` (`N = x.len()`), including the supremum over all levels.
pub fn discrepancy_exact(x: &[PadicInt]) -> Result<DiscrepancyReport> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("discrepancy of an empty sequence"));
    }
    let p = x[0].prime();
    if x.iter().any(|xi| xi.prime() != p || xi.precision() != x[0].precision()) {
        return Err(Error::invalid("elements with mixed p or K"));
    }
    let trie = ResidueTrie::build(x);
    let distinct = trie.levels[trie.depth() as usize].len();
    let separation_level = (0..=trie.depth())
        .find(|&k| trie.levels[k as usize].len() == distinct)
        .expect("the deepest level separates");
    let max_multiplicity = trie.classes(trie.depth()).map(|(_, c)| c).max().unwrap_or(0);
    let tail_limit = from_u64(max_multiplicity) / from_u64(n as u64);

    let per_level: Vec<LevelMax> = (0..=separation_level + 1)
        .map(|k| level_max(&trie, k, n, p))
        .collect();
    let best = per_level
        .iter()
        .reduce(|best, l| if l.deviation > best.deviation { l } else { best })
        .expect("at least one level");
    let (d_exact, attained, witness) = if best.deviation >= tail_limit {
        (
            best.deviation.clone(),
            true,
            Witness::Ball {
                residue: best.residue,
                level: best.level,
            },
        )
    } else {
        (tail_limit.clone(), false, Witness::TailLimit)
    };
    Ok(DiscrepancyReport {
        n,
        d_exact,
        attained,
        witness,
        per_level,
        separation_level,
        tail_limit,
    })
}

/// Deviation of one ball `residue + p^level Z_p`, by direct recount.
pub fn ball_deviation(x: &[PadicInt], residue: u64, level: u32) -> Rational {
    let p = x[0].prime();
    let count = x
        .iter()
        .filter(|xi| match modulus(p, level) {
            Some(m) => xi.value() as u128 % m == residue as u128 % m,
            None => xi.value() == residue,
        })
        .count() as u64;
    deviation(count, x.len(), &haar_measure(RadiusExponent(level), p))
}

/// Maximum deviation over all balls of levels `0..=k_cut`, by pairwise
/// counting. Test oracle; a lower bound for [`discrepancy_exact`].
pub fn discrepancy_bruteforce(x: &[PadicInt], k_cut: u32) -> Rational {
    let n = x.len();
    if n == 0 {
        return Rational::zero();
    }
    let p = x[0].prime();
    let mut best = Rational::zero();
    for k in 0..=k_cut {
        let mass = haar_measure(RadiusExponent(k), p);
        let residue = |v: u64| match modulus(p, k) {
            Some(m) => (v as u128 % m) as u64,
            None => v,
        };
        let mut classes = 0u128;
        for (i, xi) in x.iter().enumerate() {
            let ri = residue(xi.value());
            // first member of its class
            if x[..i].iter().any(|xj| residue(xj.value()) == ri) {
                continue;
            }
            classes += 1;
            let count = x.iter().filter(|xj| residue(xj.value()) == ri).count() as u64;
            let d = deviation(count, n, &mass);
            if d > best {
                best = d;
            }
        }
        let empty_exists = match modulus(p, k) {
            Some(m) => classes < m,
            None => true,
        };
        if empty_exists && mass > best {
            best = mass;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeerSandwich {
    pub d_n: Rational,
    pub e_n2: Rational,
    pub holds: bool,
}

/// `D_N` of `x` and `E_{N^2}` of its differences, with `D_N^2 <= E <= D_N`
/// checked exactly.
pub fn beer_sandwich_check(x: &[PadicInt]) -> Result<BeerSandwich> {
    let d_n = discrepancy_exact(x)?.d_exact;
    let diffs = difference_sequence(x, DifferenceOrder::RowMajor)?;
    let e_n2 = discrepancy_exact(&diffs)?.d_exact;
    let holds = &d_n * &d_n <= e_n2 && e_n2 <= d_n;
    Ok(BeerSandwich { d_n, e_n2, holds })
}

/// `1 / N`
pub fn lower_bound(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n))
}
