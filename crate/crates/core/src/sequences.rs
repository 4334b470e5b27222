//! Sequence generators: Kronecker `(n a + b)`, i.i.d. uniform digits, the
//! integers, and sequences loaded from text files.
//!
//! Elements are indexed from `n = 1`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::padic::{add_mod, is_unit, mul_mod, PadicInt, Prime};

/// Whether the stored digits are the whole element or a truncation of a
/// longer expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    Exact,
    Approximate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    Kronecker { a: PadicInt, b: PadicInt },
    RandomUniform { master_seed: u64, stream: u64 },
    Integers,
    FromFile(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub p: Prime,
    pub precision: u32,
    pub exactness: Exactness,
}

impl SequenceSpec {
    pub fn kronecker(a: PadicInt, b: PadicInt, exactness: Exactness) -> Result<Self> {
        a.sub(&b)?;
        Ok(SequenceSpec {
            p: a.prime(),
            precision: a.precision(),
            kind: SequenceKind::Kronecker { a, b },
            exactness,
        })
    }

    pub fn integers(p: Prime, precision: u32) -> Result<Self> {
        PadicInt::zero(p, precision)?;
        Ok(SequenceSpec {
            kind: SequenceKind::Integers,
            p,
            precision,
            exactness: Exactness::Exact,
        })
    }

    pub fn random_uniform(p: Prime, precision: u32, master_seed: u64, stream: u64) -> Result<Self> {
        PadicInt::zero(p, precision)?;
        Ok(SequenceSpec {
            kind: SequenceKind::RandomUniform {
                master_seed,
                stream,
            },
            p,
            precision,
            exactness: Exactness::Exact,
        })
    }

    /// Reads only the header; elements are loaded on materialization.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (p, precision, _) = load_sequence(path)?;
        Ok(SequenceSpec {
            kind: SequenceKind::FromFile(path.to_path_buf()),
            p,
            precision,
            exactness: Exactness::Approximate,
        })
    }

    /// Element `x_n`, `n >= 1`. File-backed sequences are not indexable this
    /// way; use [`SequenceSpec::materialize`].
    pub fn element(&self, n: u64) -> Result<PadicInt> {
        match &self.kind {
            SequenceKind::Kronecker { a, b } => kronecker_element(a, b, n),
            SequenceKind::Integers => PadicInt::reduced(self.p, self.precision, n),
            SequenceKind::RandomUniform {
                master_seed,
                stream,
            } => Ok(random_uniform_element(
                *master_seed,
                *stream,
                n,
                self.p,
                self.precision,
            )),
            SequenceKind::FromFile(path) => {
                let (_, _, xs) = load_sequence(path)?;
                xs.get((n as usize).wrapping_sub(1))
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("{} has no element {n}", path.display())))
            }
        }
    }

    /// The first `count` elements `x_1..x_count`.
    pub fn materialize(&self, count: usize) -> Result<Vec<PadicInt>> {
        if let SequenceKind::FromFile(path) = &self.kind {
            let (_, _, mut xs) = load_sequence(path)?;
            if xs.len() < count {
                return Err(Error::invalid(format!(
                    "{} holds {} elements, {count} requested",
                    path.display(),
                    xs.len()
                )));
            }
            xs.truncate(count);
            return Ok(xs);
        }
        (1..=count as u64).map(|n| self.element(n)).collect()
    }
}

/// `(n a + b) mod p^K`.
pub fn kronecker_element(a: &PadicInt, b: &PadicInt, n: u64) -> Result<PadicInt> {
    let n = PadicInt::reduced(a.prime(), a.precision(), n)?;
    add_mod(&mul_mod(&n, a)?, b)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for element `index` of sub-stream `stream`.
///
/// The key is four SplitMix64 words derived from `(master_seed, stream)`;
/// the element index selects the ChaCha8 stream, so any element can be
/// produced without generating its predecessors.
fn element_rng(master_seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let base = mix64(master_seed ^ mix64(stream.wrapping_add(0xA076_1D64_78BD_642F)));
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(base.wrapping_add(i as u64)).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// K independent uniform digits in `[0, p)`, assembled into `sum a_k p^k`.
/// Deterministic in `(master_seed, stream, index)`.
pub fn random_uniform_element(
    master_seed: u64,
    stream: u64,
    index: u64,
    p: Prime,
    precision: u32,
) -> PadicInt {
    let mut rng = element_rng(master_seed, stream, index);
    let digits: Vec<u64> = (0..precision).map(|_| rng.gen_range(0..p.get())).collect();
    PadicInt::from_digits(p, precision, &digits).expect("digits are in range")
}

/// A uniformly random unit: the lowest digit is drawn from `[1, p)`.
pub fn random_unit(p: Prime, precision: u32, seed: u64) -> Result<PadicInt> {
    PadicInt::zero(p, precision)?;
    let mut rng = element_rng(seed, u64::MAX, 0);
    let mut digits = vec![rng.gen_range(1..p.get())];
    digits.extend((1..precision).map(|_| rng.gen_range(0..p.get())));
    let unit = PadicInt::from_digits(p, precision, &digits)?;
    debug_assert!(is_unit(&unit));
    Ok(unit)
}

/// Ordering of the `N^2` differences `x_i - x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DifferenceOrder {
    /// `i` outer, `j` inner.
    #[default]
    RowMajor,
    /// The `N` diagonal zeros first, then the off-diagonal differences row-major.
    DiagonalFirst,
}

/// All `N^2` differences `(x_i - x_j) mod p^K`.
pub fn difference_sequence(x: &[PadicInt], order: DifferenceOrder) -> Result<Vec<PadicInt>> {
    let mut out = Vec::with_capacity(x.len() * x.len());
    match order {
        DifferenceOrder::RowMajor => {
            for xi in x {
                for xj in x {
                    out.push(xi.sub(xj)?);
                }
            }
        }
        DifferenceOrder::DiagonalFirst => {
            for xi in x {
                out.push(xi.sub(xi)?);
            }
            for (i, xi) in x.iter().enumerate() {
                for (j, xj) in x.iter().enumerate() {
                    if i != j {
                        out.push(xi.sub(xj)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn parse_header(line: &str, line_no: usize) -> Result<(Prime, u32)> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let mut p = None;
    let mut k = None;
    for token in line.split_whitespace() {
        match token.split_once('=') {
            Some(("p", v)) if p.is_none() => {
                p = Some(v.parse::<u64>().map_err(|_| err(format!("bad prime `{v}`")))?)
            }
            Some(("K", v)) if k.is_none() => {
                k = Some(v.parse::<u32>().map_err(|_| err(format!("bad precision `{v}`")))?)
            }
            _ => return Err(err(format!("unexpected header token `{token}`"))),
        }
    }
    let (Some(p), Some(k)) = (p, k) else {
        return Err(err("header must be `p=<int> K=<int>`".into()));
    };
    let p = Prime::new(p).map_err(|e| err(e.to_string()))?;
    PadicInt::zero(p, k).map_err(|e| err(e.to_string()))?;
    Ok((p, k))
}

/// Parses the sequence text format: a `p=<int> K=<int>` header, then one
/// base-10 value in `[0, p^K)` per nonempty line. Lines starting with `#`
/// are comments. A file with no content at all is an empty sequence with
/// `p = 2, K = 1`.
pub fn parse_sequence(text: &str) -> Result<(Prime, u32, Vec<PadicInt>)> {
    let mut header = None;
    let mut elements = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match header {
            None => header = Some(parse_header(line, line_no)?),
            Some((p, k)) => {
                let value: u64 = line.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("`{line}` is not a nonnegative integer"),
                })?;
                let x = PadicInt::new(p, k, value).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
                elements.push(x);
            }
        }
    }
    let (p, k) = match header {
        Some(h) => h,
        None => (Prime::new(2)?, 1),
    };
    Ok((p, k, elements))
}

pub fn load_sequence(path: impl AsRef<Path>) -> Result<(Prime, u32, Vec<PadicInt>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sequence(&text)
}

/// Renders elements in the format read by [`parse_sequence`].
pub fn format_sequence(p: Prime, precision: u32, xs: &[PadicInt]) -> String {
    let mut out = format!("p={p} K={precision}\n");
    for x in xs {
        out.push_str(&x.value().to_string());
        out.push('\n');
    }
    out
}
