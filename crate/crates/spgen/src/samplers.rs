//! Seeded random generation of single-peaked votes: the uniform
//! end-removal generator and Conitzer's peak-then-extend generator.
//!
//! Everything here is a pure function of an explicit random source, so a seed
//! pins every result bit for bit. Bulk sampling can be split across
//! independent streams: stream `i` of seed `s` is splitmix64 seeded with
//! `s + i` (wrapping), and shard results merge in stream order.

use std::fmt;
use std::str::FromStr;

use crate::domain::{Interval, Profile, Vote};
use crate::Error;

/// SplitMix64 (Sebastiano Vigna): fast, good bit diffusion, non-cryptographic.
///
/// Pinned as the crate's only entropy source so that identical seeds yield
/// identical output across platforms and implementations.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream `index` of a base seed.
    pub fn stream(seed: u64, index: u64) -> Self {
        SplitMix64::new(seed.wrapping_add(index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// What the samplers consume: fair coins and bounded uniform draws.
///
/// Tests substitute scripted or counting sources to drive the generators down
/// chosen branches and to audit how much randomness they use.
pub trait RandomSource {
    /// Fair coin; `true` is heads. For [`SplitMix64`] this is the top bit of
    /// the next 64-bit output.
    fn coin(&mut self) -> bool;

    /// Uniform draw from `0..bound`. `bound` must be nonzero.
    fn below(&mut self, bound: u64) -> u64;
}

impl RandomSource for SplitMix64 {
    #[inline]
    fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Unbiased bounded draw: rejects outputs past the largest multiple of
    /// `bound` and redraws, so no residue class is favored. A bound of 1
    /// consumes nothing.
    fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be nonzero");
        if bound == 1 {
            return 0;
        }
        let zone = (u64::MAX / bound) * bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// Which of the two vote distributions to sample from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Impartial Culture on the single-peaked domain: every one of the
    /// `2^(n-1)` votes equally likely.
    Uniform,
    /// Conitzer's generator: peak uniform on `1..=n`, then grow the ranked
    /// interval one candidate at a time, a fair coin picking the side while
    /// both are open.
    Conitzer,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Uniform => "uniform",
            Model::Conitzer => "conitzer",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "uniform" => Ok(Model::Uniform),
            "conitzer" => Ok(Model::Conitzer),
            other => Err(Error::InvalidArgument(format!(
                "unknown model {other:?} (expected \"uniform\" or \"conitzer\")"
            ))),
        }
    }
}

/// Uniformly sampled single-peaked ranking of the interval's candidates.
///
/// Builds the ranking from the back: each coin removes one end of the
/// remaining interval — heads the left end, tails the right — and ranks it at
/// the lowest open position; the survivor is the peak. Exactly `len - 1`
/// coins are consumed, and the map from toss sequences to rankings is a
/// bijection onto the single-peaked votes of the interval, which makes the
/// output uniform.
pub fn uniform_ranking<R: RandomSource + ?Sized>(interval: Interval, rng: &mut R) -> Vec<u32> {
    let len = interval.len() as usize;
    let mut ranking = vec![0u32; len];
    let mut lo = interval.a();
    let mut hi = interval.b();
    for pos in (1..len).rev() {
        if rng.coin() {
            ranking[pos] = lo;
            lo += 1;
        } else {
            ranking[pos] = hi;
            hi -= 1;
        }
    }
    debug_assert_eq!(lo, hi);
    ranking[0] = lo;
    ranking
}

/// Uniform single-peaked vote over `1..=n`.
pub fn uniform_vote<R: RandomSource + ?Sized>(n: u32, rng: &mut R) -> Result<Vote, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    let ranking = uniform_ranking(Interval::new(1, n)?, rng);
    Ok(Vote::from_ranking_unchecked(ranking))
}

/// Conitzer-style vote over `1..=n`.
///
/// Draws the peak uniformly, then repeatedly extends the ranked interval by
/// its next neighbor: a fair coin picks the side while both are open (heads
/// extends left), and a one-sided extension is forced without consuming
/// randomness. Once candidate 1 or `n` is ranked the rest of the vote is
/// fully determined.
pub fn conitzer_vote<R: RandomSource + ?Sized>(n: u32, rng: &mut R) -> Result<Vote, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    let peak = rng.below(n as u64) as u32 + 1;
    let mut ranking = Vec::with_capacity(n as usize);
    ranking.push(peak);
    let mut lo = peak;
    let mut hi = peak;
    while !(lo == 1 && hi == n) {
        let extend_left = if lo > 1 && hi < n { rng.coin() } else { lo > 1 };
        if extend_left {
            lo -= 1;
            ranking.push(lo);
        } else {
            hi += 1;
            ranking.push(hi);
        }
    }
    Ok(Vote::from_ranking_unchecked(ranking))
}

/// One vote from the chosen model.
pub fn sample_vote<R: RandomSource + ?Sized>(
    model: Model,
    n: u32,
    rng: &mut R,
) -> Result<Vote, Error> {
    match model {
        Model::Uniform => uniform_vote(n, rng),
        Model::Conitzer => conitzer_vote(n, rng),
    }
}

/// `voters` independent votes aggregated into a profile, drawn from a single
/// stream seeded with `seed`.
pub fn sample_profile(model: Model, n: u32, voters: u64, seed: u64) -> Result<Profile, Error> {
    let mut profile = Profile::new(n)?;
    let mut rng = SplitMix64::new(seed);
    for _ in 0..voters {
        profile.add(sample_vote(model, n, &mut rng)?, 1)?;
    }
    Ok(profile)
}

/// As [`sample_profile`], but sharded over `streams` independent generators.
///
/// Stream `i` is `SplitMix64::stream(seed, i)` and draws voters
/// `i*voters/streams .. (i+1)*voters/streams`; shards run on their own threads
/// and merge in stream order, so the result depends only on
/// `(model, n, voters, seed, streams)` — with one stream it equals
/// [`sample_profile`] exactly.
pub fn sample_profile_sharded(
    model: Model,
    n: u32,
    voters: u64,
    seed: u64,
    streams: u64,
) -> Result<Profile, Error> {
    if streams == 0 {
        return Err(Error::InvalidArgument(
            "at least one stream is required".into(),
        ));
    }
    let mut profile = Profile::new(n)?;
    let shards: Vec<Result<Profile, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..streams)
            .map(|i| {
                scope.spawn(move || {
                    let quota = (i + 1) * voters / streams - i * voters / streams;
                    let mut rng = SplitMix64::stream(seed, i);
                    let mut shard = Profile::new(n)?;
                    for _ in 0..quota {
                        shard.add(sample_vote(model, n, &mut rng)?, 1)?;
                    }
                    Ok(shard)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shard thread panicked"))
            .collect()
    });
    for shard in shards {
        profile.merge(shard?)?;
    }
    Ok(profile)
}
