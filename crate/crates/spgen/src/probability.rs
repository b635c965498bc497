//! Exact probability masses for both generators, the decision-tree
//! cross-check, peak marginals, and model-distance computations.
//!
//! Everything here is exact rational arithmetic; floating point exists only as
//! a derived view for display and statistics. The closed-form Conitzer mass is
//! independently validated by [`conitzer_tree_pmf`], which expands the
//! generator's full decision tree instead of using any formula.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{self, count, rank, DEFAULT_ENUM_CAP};
use crate::domain::Vote;
use crate::samplers::Model;
use crate::Error;

/// An exact probability in `[0, 1]`, kept in lowest terms.
///
/// Displays as `p/q` with an explicit denominator (`1/1` for certainty) so
/// machine-readable output never loses precision to decimals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prob(BigRational);

impl Prob {
    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    /// Wraps an exact ratio; panics outside `[0, 1]`.
    pub fn from_ratio(value: BigRational) -> Self {
        assert!(
            !value.is_negative() && value <= BigRational::one(),
            "probability out of range: {value}"
        );
        Prob(value)
    }

    /// `numer / denom` as a probability.
    pub fn new(numer: u64, denom: u64) -> Self {
        Prob::from_ratio(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Derived double-precision view.
    pub fn as_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Exact mass table over all single-peaked votes for one model and `n`,
/// indexed in unrank order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pmf {
    n: u32,
    model: Model,
    masses: Vec<Prob>,
}

impl Pmf {
    fn new(n: u32, model: Model, masses: Vec<Prob>) -> Self {
        let total: BigRational = masses.iter().map(|p| p.ratio().clone()).sum();
        assert!(total.is_one(), "pmf masses must sum to 1, got {total}");
        Pmf { n, model, masses }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Mass of the vote at `index` in unrank order.
    pub fn mass(&self, index: u64) -> &Prob {
        &self.masses[index as usize]
    }

    pub fn masses(&self) -> &[Prob] {
        &self.masses
    }
}

/// Mass of `vote` under the uniform model: exactly `1 / 2^(n-1)`.
pub fn uniform_mass(vote: &Vote) -> Result<Prob, Error> {
    if !vote.is_single_peaked() {
        return Err(Error::NotSinglePeaked(vote.to_string()));
    }
    Ok(Prob::from_ratio(BigRational::new(
        BigInt::one(),
        pow2(vote.n() - 1),
    )))
}

/// Mass of `vote` under the Conitzer model: `1 / (n * 2^(k-1))`, where `k` is
/// the earlier of candidate 1's and candidate `n`'s ranking positions.
///
/// The peak costs `1/n`; each of the `k-1` extensions before an extreme is
/// ranked costs a fair coin; everything after is forced. The formula is
/// cross-checked against the exhaustive [`conitzer_tree_pmf`] in tests.
pub fn conitzer_mass(vote: &Vote) -> Result<Prob, Error> {
    if !vote.is_single_peaked() {
        return Err(Error::NotSinglePeaked(vote.to_string()));
    }
    let n = vote.n();
    let first_extreme = vote
        .ranking()
        .iter()
        .position(|&c| c == 1 || c == n)
        .expect("a permutation of 1..=n contains its extremes");
    let denom = BigInt::from(n) * pow2(first_extreme as u32);
    Ok(Prob::from_ratio(BigRational::new(BigInt::one(), denom)))
}

/// Full mass table in unrank order, from the closed forms.
pub fn pmf(model: Model, n: u32) -> Result<Pmf, Error> {
    pmf_capped(model, n, DEFAULT_ENUM_CAP)
}

/// As [`pmf`], with an explicit enumeration cap.
pub fn pmf_capped(model: Model, n: u32, cap: u64) -> Result<Pmf, Error> {
    let votes = combinatorics::enumerate_capped(n, cap)?;
    let masses = votes
        .iter()
        .map(|v| match model {
            Model::Uniform => uniform_mass(v),
            Model::Conitzer => conitzer_mass(v),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Pmf::new(n, model, masses))
}

/// Conitzer mass table computed by expanding the generator's decision tree:
/// `n` equiprobable peak choices, a probability-1/2 branch whenever both
/// sides can extend, and a forced probability-1 branch otherwise.
///
/// No closed form is involved, which makes this the independent reference for
/// [`conitzer_mass`]. Total mass is exactly 1 by construction of the tree.
pub fn conitzer_tree_pmf(n: u32) -> Result<Pmf, Error> {
    let total = count(n)?;
    if total > DEFAULT_ENUM_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: DEFAULT_ENUM_CAP,
        });
    }
    let mut masses = vec![BigRational::zero(); total as usize];
    let mut ranking = Vec::with_capacity(n as usize);
    for peak in 1..=n {
        ranking.push(peak);
        let share = BigRational::new(BigInt::one(), BigInt::from(n));
        expand_tree(n, peak, peak, &mut ranking, share, &mut masses);
        ranking.pop();
    }
    Ok(Pmf::new(
        n,
        Model::Conitzer,
        masses.into_iter().map(Prob::from_ratio).collect(),
    ))
}

fn expand_tree(
    n: u32,
    lo: u32,
    hi: u32,
    ranking: &mut Vec<u32>,
    mass: BigRational,
    masses: &mut [BigRational],
) {
    if lo == 1 && hi == n {
        let vote = Vote::from_ranking_unchecked(ranking.clone());
        let index = rank(&vote).expect("tree paths build single-peaked votes");
        masses[index as usize] += mass;
        return;
    }
    if lo > 1 && hi < n {
        let half = mass / BigRational::from(BigInt::from(2));
        ranking.push(lo - 1);
        expand_tree(n, lo - 1, hi, ranking, half.clone(), masses);
        ranking.pop();
        ranking.push(hi + 1);
        expand_tree(n, lo, hi + 1, ranking, half, masses);
        ranking.pop();
    } else if lo > 1 {
        ranking.push(lo - 1);
        expand_tree(n, lo - 1, hi, ranking, mass, masses);
        ranking.pop();
    } else {
        ranking.push(hi + 1);
        expand_tree(n, lo, hi + 1, ranking, mass, masses);
        ranking.pop();
    }
}

/// `P(peak = p)` for `p` in `1..=n`, index `p - 1`.
///
/// Uniform: `C(n-1, p-1) / 2^(n-1)` — the interleavings of the two flanks.
/// Conitzer: `1/n` — the peak is the first, uniform draw.
pub fn peak_distribution(model: Model, n: u32) -> Result<Vec<Prob>, Error> {
    if n == 0 {
        return Err(Error::ZeroCandidates);
    }
    let table: Vec<Prob> = match model {
        Model::Uniform => {
            let denom = pow2(n - 1);
            (1..=n)
                .map(|p| {
                    Prob::from_ratio(BigRational::new(big_binomial(n - 1, p - 1), denom.clone()))
                })
                .collect()
        }
        Model::Conitzer => {
            let each = Prob::from_ratio(BigRational::new(BigInt::one(), BigInt::from(n)));
            vec![each; n as usize]
        }
    };
    debug_assert!(table
        .iter()
        .map(|p| p.ratio().clone())
        .sum::<BigRational>()
        .is_one());
    Ok(table)
}

/// Total variation distance `(1/2) * sum |p_i - q_i|`, exact.
pub fn total_variation(p: &Pmf, q: &Pmf) -> Result<Prob, Error> {
    if p.n() != q.n() {
        return Err(Error::MismatchedN {
            left: p.n(),
            right: q.n(),
        });
    }
    let sum: BigRational = p
        .masses()
        .iter()
        .zip(q.masses())
        .map(|(a, b)| (a.ratio() - b.ratio()).abs())
        .sum();
    Ok(Prob::from_ratio(sum / BigRational::from(BigInt::from(2))))
}

/// For each `n` in `2..=n_max`, the uniform mass of the identity vote
/// `1>2>…>n` over its Conitzer mass — exactly `n / 2^(n-1)`, a ratio that
/// falls to zero as `n` grows.
pub fn probability_ratio_trend(n_max: u32) -> Result<Vec<(u32, Prob)>, Error> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(
            "the ratio table starts at n = 2".into(),
        ));
    }
    (2..=n_max)
        .map(|n| {
            let identity = Vote::new((1..=n).collect())?;
            let ratio = uniform_mass(&identity)?.ratio() / conitzer_mass(&identity)?.ratio();
            Ok((n, Prob::from_ratio(ratio)))
        })
        .collect()
}

fn pow2(exp: u32) -> BigInt {
    BigInt::one() << exp as usize
}

/// `C(n, k)` in arbitrary precision.
fn big_binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    acc
}
