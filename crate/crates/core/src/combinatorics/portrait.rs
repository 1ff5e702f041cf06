use std::collections::{BTreeMap, HashMap};

use super::address::{linked, Alphabet, ExternalAddress};
use super::partition::defined_itinerary;
use super::sequence::Sequence;
use super::CombinatoricsError;

/// Default cap on the number of candidate addresses enumerated by the
/// brute-force searches.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 2_000_000;

/// Landing classes `A_1, …, A_n` of one periodic orbit, with `σ(A_i) = A_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPortrait {
    classes: Vec<Vec<ExternalAddress>>,
    address_period: usize,
}

impl OrbitPortrait {
    /// Builds a portrait from classes listed in shift order, checking the
    /// portrait laws.
    pub fn new(classes: Vec<Vec<ExternalAddress>>) -> Result<Self, CombinatoricsError> {
        let invalid = |why: &str| Err(CombinatoricsError::InvalidPortrait(why.to_string()));
        if classes.is_empty() || classes.iter().any(|c| c.is_empty()) {
            return invalid("empty class");
        }
        let first = &classes[0][0];
        if !first.is_periodic() {
            return invalid("addresses must be periodic");
        }
        let period = first.period_len();
        if classes
            .iter()
            .flatten()
            .any(|a| !a.is_periodic() || a.period_len() != period)
        {
            return invalid("addresses must share one exact period");
        }
        let mut classes = classes;
        for c in classes.iter_mut() {
            c.sort();
        }
        let n = classes.len();
        for i in 0..n {
            let mut image: Vec<ExternalAddress> = classes[i].iter().map(|a| a.shift()).collect();
            image.sort();
            if image != classes[(i + 1) % n] {
                return invalid("shift does not map the classes bijectively in order");
            }
        }
        if !period.is_multiple_of(n) {
            return invalid("orbit period does not divide address period");
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if classes_linked(&classes[i], &classes[j])? {
                    return invalid("classes are linked");
                }
            }
        }
        Ok(OrbitPortrait {
            classes,
            address_period: period,
        })
    }

    pub fn classes(&self) -> &[Vec<ExternalAddress>] {
        &self.classes
    }

    /// Number `n` of points in the landing orbit.
    pub fn orbit_period(&self) -> usize {
        self.classes.len()
    }

    /// The factor `q` with address period `q·n`.
    pub fn rays_per_point(&self) -> usize {
        self.address_period / self.classes.len()
    }

    /// Common exact period `q·n` of all addresses.
    pub fn address_period(&self) -> usize {
        self.address_period
    }

    /// Number of rays landing at each point of the orbit.
    pub fn valence(&self) -> usize {
        self.classes[0].len()
    }

    pub fn contains(&self, a: &ExternalAddress) -> bool {
        self.classes.iter().any(|c| c.contains(a))
    }
}

/// Whether some pair of `a` interleaves with some pair of `b`.
pub fn classes_linked(a: &[ExternalAddress], b: &[ExternalAddress]) -> Result<bool, CombinatoricsError> {
    for (i, a1) in a.iter().enumerate() {
        for a2 in &a[i + 1..] {
            for (j, b1) in b.iter().enumerate() {
                for b2 in &b[j + 1..] {
                    if linked(a1, a2, b1, b2)? {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// All words of length `len` over `symbols`, in lexicographic order of the
/// symbol positions.
pub(crate) fn words(symbols: &[i64], len: usize) -> impl Iterator<Item = Vec<i64>> + '_ {
    let base = symbols.len();
    let total = if len == 0 {
        1
    } else {
        base.checked_pow(len as u32).unwrap_or(usize::MAX)
    };
    (0..total).map(move |mut code| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = symbols[code % base];
            code /= base;
        }
        w
    })
}

pub(crate) fn count_words(symbols: usize, len: usize) -> Option<usize> {
    symbols.checked_pow(len as u32)
}

/// All periodic addresses of exact period `period` over the symbols.
pub fn periodic_addresses(
    alphabet: Alphabet,
    symbols: &[i64],
    period: usize,
    limit: usize,
) -> Result<Vec<ExternalAddress>, CombinatoricsError> {
    let count = count_words(symbols.len(), period).unwrap_or(usize::MAX);
    if count > limit {
        return Err(CombinatoricsError::ResourceBound { count, limit });
    }
    let mut out = Vec::new();
    for w in words(symbols, period) {
        let seq = Sequence::periodic(w).expect("period >= 1");
        if seq.period_len() == period {
            out.push(ExternalAddress::from_sequence(alphabet, seq)?);
        }
    }
    Ok(out)
}

/// Groups all periodic addresses of exact period `period` with entries in
/// `[-bound, bound]` into landing classes by itinerary relative to `base`,
/// and assembles shift-closed groups into orbit portraits.
///
/// Addresses whose orbit hits a partition boundary cannot occur here since
/// `base` is strictly preperiodic.
pub fn portrait_classes(
    period: usize,
    bound: i64,
    base: &ExternalAddress,
) -> Result<Vec<OrbitPortrait>, CombinatoricsError> {
    portrait_classes_limited(period, bound, base, DEFAULT_ENUMERATION_LIMIT)
}

pub fn portrait_classes_limited(
    period: usize,
    bound: i64,
    base: &ExternalAddress,
    limit: usize,
) -> Result<Vec<OrbitPortrait>, CombinatoricsError> {
    if period == 0 {
        return Err(CombinatoricsError::InvalidPortrait("period must be positive".into()));
    }
    if base.is_periodic() {
        return Err(CombinatoricsError::InvalidBase(base.to_string()));
    }
    let alphabet = base.alphabet();
    let symbols = alphabet.bounded_symbols(bound.max(0));
    let addresses = periodic_addresses(alphabet, &symbols, period, limit)?;

    let mut by_itinerary: BTreeMap<Sequence, Vec<ExternalAddress>> = BTreeMap::new();
    for a in addresses {
        let it = defined_itinerary(&a, base)?;
        by_itinerary.entry(it).or_default().push(a);
    }
    let keys: Vec<Sequence> = by_itinerary.keys().cloned().collect();
    let index: HashMap<&Sequence, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();

    let mut seen = vec![false; keys.len()];
    let mut portraits = Vec::new();
    for start in 0..keys.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(by_itinerary[&keys[i]].clone());
            let next = keys[i].shift();
            i = *index
                .get(&next)
                .ok_or_else(|| CombinatoricsError::InvalidPortrait(format!("shifted itinerary {next} has no class")))?;
        }
        if i != start {
            return Err(CombinatoricsError::InvalidPortrait(
                "shift on landing classes is not a permutation".into(),
            ));
        }
        portraits.push(OrbitPortrait::new(cycle)?);
    }
    Ok(portraits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> ExternalAddress {
        text.parse().unwrap()
    }

    #[test]
    fn words_enumerates_in_order() {
        let w: Vec<_> = words(&[0, 1], 2).collect();
        assert_eq!(w, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn period_one_bound_zero() {
        let ps = portrait_classes(1, 0, &a("1 | 0")).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].classes(), &[vec![a("| 0")]]);
    }

    #[test]
    fn resource_bound_is_reported() {
        let err = portrait_classes_limited(6, 3, &a("1 | 0"), 1000);
        assert!(matches!(
            err,
            Err(CombinatoricsError::ResourceBound {
                count: 117649,
                limit: 1000
            })
        ));
    }

    #[test]
    fn portrait_constructor_rejects_broken_cycles() {
        assert!(OrbitPortrait::new(vec![vec![a("| 0 1")]]).is_err());
        assert!(OrbitPortrait::new(vec![vec![a("| 0 1")], vec![a("| 1 0")]]).is_ok());
        assert!(OrbitPortrait::new(vec![vec![a("| 0 3"), a("| 2 1")], vec![a("| 3 0"), a("| 1 2")]]).is_err());
    }
}
