//! Counting, enumeration, and the rank/unrank bijection between single-peaked
//! votes and `(n-1)`-bit integers.
//!
//! Each single-peaked vote over `1..=n` is identified by the sequence of
//! left/right removals that builds it from the back: step `i` takes either the
//! leftmost (bit 0) or rightmost (bit 1) candidate still standing and ranks it
//! at position `n - i + 1`; the survivor is the peak. Reading the bits
//! most-significant first gives a bijection between `0..2^(n-1)` and the
//! single-peaked domain, and every table in this crate is indexed in that
//! order.

use crate::domain::Vote;
use crate::Error;

/// Default ceiling on how many votes `enumerate` will materialize.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// Number of single-peaked votes over `1..=n`: exactly `2^(n-1)`.
pub fn count(n: u32) -> Result<u64, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    if n > 64 {
        return Err(Error::Overflow { what: "2^(n-1)", n });
    }
    Ok(1u64 << (n - 1))
}

/// Decodes `index` into the single-peaked vote it identifies.
pub fn unrank(n: u32, index: u64) -> Result<Vote, Error> {
    let total = count(n)?;
    if index >= total {
        return Err(Error::IndexOutOfRange {
            index,
            n,
            count: total,
        });
    }
    let n = n as usize;
    let mut ranking = vec![0u32; n];
    let mut lo = 1u32;
    let mut hi = n as u32;
    for step in 1..n {
        let bit = (index >> (n - 1 - step)) & 1;
        let pos = n - step;
        if bit == 0 {
            ranking[pos] = lo;
            lo += 1;
        } else {
            ranking[pos] = hi;
            hi -= 1;
        }
    }
    debug_assert_eq!(lo, hi);
    ranking[0] = lo;
    Ok(Vote::from_ranking_unchecked(ranking))
}

/// Inverse of [`unrank`]: the index of a single-peaked vote.
///
/// Reads the ranking from the last position up to position 2, emitting bit 0
/// when the candidate is the current left frontier and bit 1 when it is the
/// right frontier.
pub fn rank(vote: &Vote) -> Result<u64, Error> {
    let n = vote.n();
    count(n)?; // enforces the packed 64-bit representation limit
    let ranking = vote.ranking();
    let mut lo = 1u32;
    let mut hi = n;
    let mut index = 0u64;
    for pos in (1..ranking.len()).rev() {
        let c = ranking[pos];
        index <<= 1;
        if c == lo {
            lo += 1;
        } else if c == hi {
            index |= 1;
            hi -= 1;
        } else {
            return Err(Error::NotSinglePeaked(vote.to_string()));
        }
    }
    Ok(index)
}

/// All single-peaked votes over `1..=n` in index order, subject to
/// [`DEFAULT_ENUM_CAP`].
pub fn enumerate(n: u32) -> Result<Vec<Vote>, Error> {
    enumerate_capped(n, DEFAULT_ENUM_CAP)
}

/// As [`enumerate`], with an explicit cap on the number of votes produced.
pub fn enumerate_capped(n: u32, cap: u64) -> Result<Vec<Vote>, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    // For n > 64 the count always exceeds any u64 cap.
    if n > 64 || (1u64 << (n - 1)) > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    (0..1u64 << (n - 1)).map(|k| unrank(n, k)).collect()
}

/// Number of single-peaked votes over `1..=n` whose peak is `peak`:
/// the binomial coefficient `C(n-1, peak-1)`.
pub fn count_with_peak(n: u32, peak: u32) -> Result<u64, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    if peak == 0 || peak > n {
        return Err(Error::PeakOutOfRange { peak, n });
    }
    binomial(n - 1, peak - 1).ok_or(Error::Overflow {
        what: "binomial coefficient",
        n,
    })
}

/// `C(n, k)` with checked arithmetic; `None` on 64-bit overflow.
fn binomial(n: u32, k: u32) -> Option<u64> {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) stays integral after dividing by i.
        acc = acc.checked_mul(n - k + i)?;
        acc /= i;
    }
    u64::try_from(acc).ok()
}

/// The `(n-1)`-bit left/right removal sequence identifying one single-peaked
/// vote; bit for the first step (last ranking position) most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ToggleCode {
    n: u32,
    bits: u64,
}

impl ToggleCode {
    pub fn new(n: u32, bits: u64) -> Result<Self, Error> {
        let total = count(n)?;
        if bits >= total {
            return Err(Error::IndexOutOfRange {
                index: bits,
                n,
                count: total,
            });
        }
        Ok(ToggleCode { n, bits })
    }

    /// Encodes a single-peaked vote.
    pub fn of(vote: &Vote) -> Result<Self, Error> {
        Ok(ToggleCode {
            n: vote.n(),
            bits: rank(vote)?,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Decodes back into the vote.
    pub fn vote(&self) -> Vote {
        unrank(self.n, self.bits).expect("code validated at construction")
    }
}
