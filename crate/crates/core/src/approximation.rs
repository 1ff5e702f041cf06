//! Periodic characteristic ray pairs approximating the addresses of a
//! Misiurewicz parameter.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::combinatorics::{
    count_words, defined_itinerary, is_characteristic_pair, itinerary, words, CharacteristicPair, CombinatoricsError,
    ExternalAddress, Sequence, DEFAULT_ENUMERATION_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproximationError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("invalid Misiurewicz combinatorics: {0}")]
    InvalidCombinatorics(String),
    #[error("epsilon must be 2^-N with N >= 1, got N = {0}")]
    InvalidEpsilon(u32),
    #[error("no characteristic pair within 2^-{n} found with periods up to {max_period} (sector {sector})")]
    SearchExhausted { n: u32, max_period: usize, sector: usize },
}

/// The addresses `s_1 < … < s_q` of the parameter rays landing at one
/// Misiurewicz parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisiurewiczCombinatorics {
    addresses: Vec<ExternalAddress>,
}

impl MisiurewiczCombinatorics {
    /// Checks that the addresses are strictly preperiodic with one preperiod
    /// and period and that they share one itinerary relative to the smallest.
    pub fn new(mut addresses: Vec<ExternalAddress>) -> Result<Self, ApproximationError> {
        let invalid = |why: String| Err(ApproximationError::InvalidCombinatorics(why));
        if addresses.is_empty() {
            return invalid("no addresses".into());
        }
        addresses.sort();
        addresses.dedup();
        let first = &addresses[0];
        if addresses.iter().any(|a| {
            !a.is_strictly_preperiodic()
                || a.preperiod_len() != first.preperiod_len()
                || a.period_len() != first.period_len()
                || a.alphabet() != first.alphabet()
        }) {
            return invalid("addresses must be strictly preperiodic with common preperiod and period".into());
        }
        let own = defined_itinerary(first, first)?;
        for a in &addresses[1..] {
            if defined_itinerary(a, first)? != own {
                return invalid(format!("{a} does not land together with {first}"));
            }
        }
        Ok(MisiurewiczCombinatorics { addresses })
    }

    pub fn addresses(&self) -> &[ExternalAddress] {
        &self.addresses
    }

    /// Number `q` of parameter rays landing at the parameter.
    pub fn q(&self) -> usize {
        self.addresses.len()
    }

    pub fn preperiod(&self) -> usize {
        self.addresses[0].preperiod_len()
    }

    pub fn period(&self) -> usize {
        self.addresses[0].period_len()
    }

    pub fn min_entry(&self) -> i64 {
        self.addresses
            .iter()
            .map(|a| a.sequence().min_entry())
            .min()
            .expect("nonempty")
    }

    pub fn max_entry(&self) -> i64 {
        self.addresses
            .iter()
            .map(|a| a.sequence().max_entry())
            .max()
            .expect("nonempty")
    }
}

/// All strictly preperiodic addresses with entries in `[-bound, bound]` and
/// the preperiod and period of `s` whose itinerary relative to `s` equals
/// that of `s`, sorted.
pub fn classify_misiurewicz(s: &ExternalAddress, bound: i64) -> Result<MisiurewiczCombinatorics, ApproximationError> {
    classify_misiurewicz_limited(s, bound, DEFAULT_ENUMERATION_LIMIT)
}

pub fn classify_misiurewicz_limited(
    s: &ExternalAddress,
    bound: i64,
    limit: usize,
) -> Result<MisiurewiczCombinatorics, ApproximationError> {
    if !s.is_strictly_preperiodic() {
        return Err(CombinatoricsError::InvalidBase(s.to_string()).into());
    }
    let (k, p) = (s.preperiod_len(), s.period_len());
    let symbols = s.alphabet().bounded_symbols(bound.max(0));
    let count = count_words(symbols.len(), k + p).unwrap_or(usize::MAX);
    if count > limit {
        return Err(CombinatoricsError::ResourceBound { count, limit }.into());
    }
    let own = defined_itinerary(s, s)?;
    let mut found = vec![s.clone()];
    for pre in words(&symbols, k) {
        for per in words(&symbols, p) {
            let Some(seq) = Sequence::new(pre.clone(), per) else {
                continue;
            };
            if seq.preperiod_len() != k || seq.period_len() != p {
                continue;
            }
            let r = ExternalAddress::from_sequence(s.alphabet(), seq)?;
            if r == *s {
                continue;
            }
            if itinerary(&r, s)?.entries() == Some(&own) {
                found.push(r);
            }
        }
    }
    MisiurewiczCombinatorics::new(found)
}

/// `ε = 2^{-n}`.
pub fn dyadic(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << n)
}

/// Search limits of [`approximate_misiurewicz_with`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest period of approximating addresses; `None` means `4N`.
    pub max_period: Option<usize>,
    /// Entry range; `None` means one beyond the entries of the combinatorics.
    pub entries: Option<(i64, i64)>,
}

/// Characteristic pairs within `2^{-N}` of the addresses of a Misiurewicz
/// parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationResult {
    /// `α_0 < s_1 ≤ s_q < α_0′`.
    pub external_pair: CharacteristicPair,
    /// `s_i < α_i < α_i′ < s_{i+1}` for `i = 1, …, q − 1`.
    pub internal_pairs: Vec<CharacteristicPair>,
    /// Exponent `N` of `ε = 2^{-N}`.
    pub n: u32,
    /// `(dist(α, target), dist(α′, target′))` for the external pair followed
    /// by the internal pairs.
    pub achieved: Vec<(BigRational, BigRational)>,
}

impl ApproximationResult {
    pub fn epsilon(&self) -> BigRational {
        dyadic(self.n)
    }

    /// External pair first, then internal pairs in order.
    pub fn pairs(&self) -> Vec<&CharacteristicPair> {
        std::iter::once(&self.external_pair)
            .chain(self.internal_pairs.iter())
            .collect()
    }

    /// One line per pair: `pair "<α>" "<α′>" dist_lo=<r> dist_hi=<r> period=<n>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, (lo, hi)) in self.pairs().into_iter().zip(&self.achieved) {
            let _ = writeln!(
                out,
                "pair \"{}\" \"{}\" dist_lo={} dist_hi={} period={}",
                p.lower(),
                p.upper(),
                lo,
                hi,
                p.period()
            );
        }
        out
    }
}

/// Periodic addresses of exact period `period` over `symbols` within
/// `2^{-n}` of `target` on the given side, in lexicographic order of their
/// closing words.
fn candidates(
    target: &ExternalAddress,
    n: u32,
    period: usize,
    symbols: &[i64],
    side: Ordering,
) -> Vec<ExternalAddress> {
    let eps = dyadic(n);
    let n = n as usize;
    let prefix = target.sequence().prefix(n.max(period));
    let words: Vec<Vec<i64>> = if period <= n {
        vec![prefix[..period].to_vec()]
    } else {
        words(symbols, period - n)
            .map(|w| {
                let mut word = prefix[..n].to_vec();
                word.extend(w);
                word
            })
            .collect()
    };
    words
        .into_iter()
        .filter_map(|w| Sequence::periodic(w).filter(|s| s.period_len() == period))
        .filter_map(|s| ExternalAddress::from_sequence(target.alphabet(), s).ok())
        .filter(|a| a.compare(target).ok() == Some(side))
        .filter(|a| a.dist(target).map(|d| d < eps).unwrap_or(false))
        .collect()
}

/// First characteristic pair `(α, α′)` with `α` near `lo` on side `lo_side`
/// and `α′` near `hi` on side `hi_side`, by increasing period and then
/// lexicographic closing words.
#[allow(clippy::too_many_arguments)]
fn search_pair(
    lo: &ExternalAddress,
    lo_side: Ordering,
    hi: &ExternalAddress,
    hi_side: Ordering,
    n: u32,
    max_period: usize,
    symbols: &[i64],
    colanding_base: Option<&ExternalAddress>,
) -> Result<Option<CharacteristicPair>, ApproximationError> {
    for period in 1..=max_period {
        let lower = candidates(lo, n, period, symbols, lo_side);
        if lower.is_empty() {
            continue;
        }
        let upper = candidates(hi, n, period, symbols, hi_side);
        if upper.is_empty() {
            continue;
        }
        let key = |a: &ExternalAddress| colanding_base.map(|b| defined_itinerary(a, b)).transpose();
        let upper_keys: Vec<Option<Sequence>> = upper.iter().map(key).collect::<Result<_, _>>()?;
        for a in &lower {
            let ka = key(a)?;
            let last = a.entry(period - 1);
            for (b, kb) in upper.iter().zip(&upper_keys) {
                if a.compare(b)? != Ordering::Less || last != b.entry(period - 1) + 1 || &ka != kb {
                    continue;
                }
                if is_characteristic_pair(a, b)? {
                    return Ok(Some(CharacteristicPair::new(a.clone(), b.clone())?));
                }
            }
        }
    }
    Ok(None)
}

/// [`approximate_misiurewicz_with`] under the default budget.
pub fn approximate_misiurewicz(
    m: &MisiurewiczCombinatorics,
    n: u32,
) -> Result<ApproximationResult, ApproximationError> {
    approximate_misiurewicz_with(m, n, &SearchBudget::default())
}

/// Finds an external characteristic pair `α_0 < s_1 ≤ s_q < α_0′` and, for
/// each gap, an internal pair `s_i < α_i < α_i′ < s_{i+1}`, each address
/// within `2^{-n}` of the neighbouring `s`.
pub fn approximate_misiurewicz_with(
    m: &MisiurewiczCombinatorics,
    n: u32,
    budget: &SearchBudget,
) -> Result<ApproximationResult, ApproximationError> {
    if n == 0 {
        return Err(ApproximationError::InvalidEpsilon(n));
    }
    let max_period = budget.max_period.unwrap_or(4 * n as usize);
    let (lo_entry, hi_entry) = budget.entries.unwrap_or((m.min_entry() - 1, m.max_entry() + 1));
    let symbols: Vec<i64> = (lo_entry..=hi_entry).collect();
    let s = m.addresses();
    let q = s.len();

    let external = search_pair(
        &s[0],
        Ordering::Less,
        &s[q - 1],
        Ordering::Greater,
        n,
        max_period,
        &symbols,
        Some(&s[0]),
    )?
    .ok_or(ApproximationError::SearchExhausted {
        n,
        max_period,
        sector: 0,
    })?;
    let mut internal = Vec::with_capacity(q - 1);
    for i in 0..q - 1 {
        let pair = search_pair(
            &s[i],
            Ordering::Greater,
            &s[i + 1],
            Ordering::Less,
            n,
            max_period,
            &symbols,
            None,
        )?
        .ok_or(ApproximationError::SearchExhausted {
            n,
            max_period,
            sector: i + 1,
        })?;
        internal.push(pair);
    }
    let mut achieved = vec![(external.lower().dist(&s[0])?, external.upper().dist(&s[q - 1])?)];
    for (i, p) in internal.iter().enumerate() {
        achieved.push((p.lower().dist(&s[i])?, p.upper().dist(&s[i + 1])?));
    }
    Ok(ApproximationResult {
        external_pair: external,
        internal_pairs: internal,
        n,
        achieved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> ExternalAddress {
        text.parse().unwrap()
    }

    #[test]
    fn classify_single_ray() {
        let m = classify_misiurewicz(&a("1 | 0"), 2).unwrap();
        assert_eq!(m.addresses(), &[a("1 | 0")]);
        assert_eq!(m.q(), 1);
    }

    #[test]
    fn classify_rejects_periodic() {
        assert!(classify_misiurewicz(&a("| 1 0"), 2).is_err());
    }

    #[test]
    fn combinatorics_validation() {
        assert!(MisiurewiczCombinatorics::new(vec![]).is_err());
        assert!(MisiurewiczCombinatorics::new(vec![a("1 | 0"), a("1 | 0 1")]).is_err());
        assert!(MisiurewiczCombinatorics::new(vec![a("1 | 0"), a("2 | 0")]).is_err());
    }

    #[test]
    fn single_ray_has_only_external_pair() {
        let m = classify_misiurewicz(&a("1 | 0"), 2).unwrap();
        let r = approximate_misiurewicz(&m, 3).unwrap();
        assert!(r.internal_pairs.is_empty());
        let p = &r.external_pair;
        assert_eq!(p.lower().compare(&a("1 | 0")).unwrap(), Ordering::Less);
        assert_eq!(p.upper().compare(&a("1 | 0")).unwrap(), Ordering::Greater);
        assert!(r.achieved[0].0 < dyadic(3) && r.achieved[0].1 < dyadic(3));
    }

    #[test]
    fn zero_epsilon_exponent_is_rejected() {
        let m = classify_misiurewicz(&a("1 | 0"), 1).unwrap();
        assert_eq!(
            approximate_misiurewicz(&m, 0),
            Err(ApproximationError::InvalidEpsilon(0))
        );
    }

    #[test]
    fn text_lines() {
        let m = classify_misiurewicz(&a("1 | 0"), 2).unwrap();
        let r = approximate_misiurewicz(&m, 2).unwrap();
        let text = r.to_text();
        assert!(text.starts_with("pair \""));
        assert!(text.contains("dist_lo=") && text.contains("period="));
    }
}
