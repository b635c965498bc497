//! Core value types: votes on the `1..=n` candidate axis, profiles, intervals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::Error;

/// A strict total order over the candidates `1..=n`, most-preferred first.
///
/// The ranking is always a full permutation of `1..=n`; construction and
/// parsing reject duplicates, gaps and out-of-range ids. The text form joins
/// candidate ids with `>` and no spaces, e.g. `2>1>3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vote {
    ranking: Vec<u32>,
}

impl Vote {
    pub fn new(ranking: Vec<u32>) -> Result<Self, Error> {
        if ranking.is_empty() {
            return Err(Error::InvalidVote(
                "a vote must rank at least one candidate".into(),
            ));
        }
        let n = ranking.len();
        if u32::try_from(n).is_err() {
            return Err(Error::InvalidVote(format!(
                "{n} candidates exceed the supported range"
            )));
        }
        let mut seen = vec![false; n];
        for &c in &ranking {
            if c == 0 || c as usize > n {
                return Err(Error::InvalidVote(format!("candidate {c} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[(c - 1) as usize], true) {
                return Err(Error::InvalidVote(format!("candidate {c} ranked twice")));
            }
        }
        Ok(Vote { ranking })
    }

    /// Skips permutation validation; callers guarantee it by construction.
    pub(crate) fn from_ranking_unchecked(ranking: Vec<u32>) -> Self {
        debug_assert!(Vote::new(ranking.clone()).is_ok());
        Vote { ranking }
    }

    pub fn n(&self) -> u32 {
        self.ranking.len() as u32
    }

    pub fn ranking(&self) -> &[u32] {
        &self.ranking
    }

    /// True iff every prefix of the ranking covers a contiguous stretch of the
    /// axis, i.e. preference falls off monotonically on both sides of the top
    /// choice.
    pub fn is_single_peaked(&self) -> bool {
        let mut lo = self.ranking[0];
        let mut hi = lo;
        for &c in &self.ranking[1..] {
            if c + 1 == lo {
                lo = c;
            } else if c == hi + 1 {
                hi = c;
            } else {
                return false;
            }
        }
        true
    }

    /// The most-preferred candidate. Defined for single-peaked votes only.
    pub fn peak(&self) -> Result<u32, Error> {
        if self.is_single_peaked() {
            Ok(self.ranking[0])
        } else {
            Err(Error::NotSinglePeaked(self.to_string()))
        }
    }

    /// The least-preferred candidate. For a single-peaked vote with `n >= 2`
    /// this is always 1 or `n`.
    pub fn last_ranked(&self) -> u32 {
        *self.ranking.last().expect("votes are never empty")
    }
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.ranking.iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Vote {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidVote("empty vote string".into()));
        }
        let mut ranking = Vec::new();
        for token in s.split('>') {
            let token = token.trim();
            let id: u32 = token
                .parse()
                .map_err(|_| Error::InvalidVote(format!("bad candidate id {token:?}")))?;
            ranking.push(id);
        }
        Vote::new(ranking)
    }
}

/// An inclusive stretch `[a, b]` of the candidate axis, `1 <= a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    a: u32,
    b: u32,
}

#[allow(clippy::len_without_is_empty)] // construction guarantees a <= b
impl Interval {
    pub fn new(a: u32, b: u32) -> Result<Self, Error> {
        if a == 0 || a > b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Number of candidates in the interval.
    pub fn len(&self) -> u32 {
        self.b - self.a + 1
    }
}

/// A multiset of votes over a common candidate set, stored with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    n: u32,
    entries: BTreeMap<Vote, u64>,
    voters: u64,
}

impl Profile {
    pub fn new(n: u32) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::ZeroCandidates);
        }
        Ok(Profile {
            n,
            entries: BTreeMap::new(),
            voters: 0,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Total number of voters (sum of multiplicities).
    pub fn voters(&self) -> u64 {
        self.voters
    }

    /// Number of distinct orders present.
    pub fn unique_orders(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `multiplicity` copies of `vote`, merging with an existing entry.
    pub fn add(&mut self, vote: Vote, multiplicity: u64) -> Result<(), Error> {
        if vote.n() != self.n {
            return Err(Error::MismatchedN {
                left: self.n,
                right: vote.n(),
            });
        }
        if multiplicity == 0 {
            return Err(Error::InvalidArgument(
                "multiplicity must be at least 1".into(),
            ));
        }
        *self.entries.entry(vote).or_insert(0) += multiplicity;
        self.voters += multiplicity;
        Ok(())
    }

    /// Absorbs every entry of `other` into `self`.
    pub fn merge(&mut self, other: Profile) -> Result<(), Error> {
        if other.n != self.n {
            return Err(Error::MismatchedN {
                left: self.n,
                right: other.n,
            });
        }
        for (vote, multiplicity) in other.entries {
            *self.entries.entry(vote).or_insert(0) += multiplicity;
            self.voters += multiplicity;
        }
        Ok(())
    }

    /// Entries in the map's own (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vote, u64)> {
        self.entries.iter().map(|(v, &m)| (v, m))
    }
}
