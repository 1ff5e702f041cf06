use std::cmp::Ordering;
use std::fmt;

use super::address::{cyclic_between, Alphabet, ExternalAddress};
use super::partition::defined_itinerary;
use super::CombinatoricsError;

/// A periodic ray pair `α < α′` whose rays separate the singular value from
/// the rest of their orbit portrait.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicPair {
    lower: ExternalAddress,
    upper: ExternalAddress,
}

impl CharacteristicPair {
    /// Validates the pair with [`is_characteristic_pair`].
    pub fn new(lower: ExternalAddress, upper: ExternalAddress) -> Result<Self, CombinatoricsError> {
        if !is_characteristic_pair(&lower, &upper)? {
            return Err(CombinatoricsError::NotCharacteristic {
                lower: lower.to_string(),
                upper: upper.to_string(),
            });
        }
        Ok(CharacteristicPair { lower, upper })
    }

    pub fn lower(&self) -> &ExternalAddress {
        &self.lower
    }

    pub fn upper(&self) -> &ExternalAddress {
        &self.upper
    }

    /// Common exact period of both addresses.
    pub fn period(&self) -> usize {
        self.lower.period_len()
    }

    /// The strictly preperiodic address used to generate the partition in
    /// which the pair is tested.
    pub fn witness_base(&self) -> ExternalAddress {
        witness_base(&self.lower, &self.upper).expect("validated pair has a witness")
    }

    /// Period `n` of the orbit on which the two rays land: the least `k ≥ 1`
    /// with `σ^k(α)` in the landing class of `α`.
    pub fn orbit_period(&self) -> usize {
        let base = self.witness_base();
        let own = defined_itinerary(&self.lower, &base).expect("periodic addresses avoid boundaries");
        (1..=self.period())
            .find(|&k| defined_itinerary(&self.lower.shift_by(k), &base).expect("periodic") == own)
            .expect("k = period always qualifies")
    }

    pub fn to_embedded(&self, degree: u32) -> Result<(ExternalAddress, ExternalAddress), CombinatoricsError> {
        Ok((
            super::address::embed(&self.lower, degree)?,
            super::address::embed(&self.upper, degree)?,
        ))
    }
}

impl fmt::Display for CharacteristicPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ({})", self.lower, self.upper)
    }
}

fn check_candidate(lower: &ExternalAddress, upper: &ExternalAddress) -> Result<(), CombinatoricsError> {
    lower.check_same_alphabet(upper)?;
    if !lower.is_periodic() || !upper.is_periodic() || lower.period_len() != upper.period_len() {
        return Err(CombinatoricsError::PeriodMismatch {
            lower: lower.to_string(),
            upper: upper.to_string(),
        });
    }
    let order = lower.compare(upper)?;
    let degenerate = match lower.alphabet() {
        Alphabet::ExponentialIntegers => order != Ordering::Less,
        Alphabet::PolynomialCyclic(_) => order == Ordering::Equal,
    };
    if degenerate {
        return Err(CombinatoricsError::DegeneratePair {
            lower: lower.to_string(),
            upper: upper.to_string(),
        });
    }
    Ok(())
}

/// First strictly preperiodic address of the form
/// `α_1 … α_L (α_{L+1} + 1) τ^∞` lying strictly inside the arc `(α, α′)`,
/// scanning `L = 0, 1, …` and tails `τ ∈ {0, 1, −1}`.
pub fn witness_base(lower: &ExternalAddress, upper: &ExternalAddress) -> Option<ExternalAddress> {
    let alphabet = lower.alphabet();
    let horizon = lower.sequence().comparison_horizon(upper.sequence()) + 2;
    for len in 0..horizon {
        let bumped = lower.entry(len) + 1;
        if !alphabet.contains(bumped) {
            continue;
        }
        for tail in [0, 1, -1] {
            if tail == bumped || !alphabet.contains(tail) {
                continue;
            }
            let mut pre = lower.sequence().prefix(len);
            pre.push(bumped);
            let Ok(beta) = ExternalAddress::new(alphabet, pre, vec![tail]) else {
                continue;
            };
            if beta.is_strictly_preperiodic() && cyclic_between(lower, &beta, upper).unwrap_or(false) {
                return Some(beta);
            }
        }
    }
    None
}

/// Tests whether `(α, α′)` is a characteristic ray pair:
///
/// 1. no forward image `σ^k α`, `σ^k α′` (`k ≥ 1`) lies strictly inside `(α, α′)`;
/// 2. `α` and `α′` have equal defined itineraries relative to the
///    partition generated by [`witness_base`], a strictly preperiodic address
///    inside `(α, α′)`;
/// 3. for the exponential alphabet, the periodic preimages `σ^{P-1} α` and
///    `σ^{P-1} α′` have first entries differing by one, the lower one being larger.
pub fn is_characteristic_pair(lower: &ExternalAddress, upper: &ExternalAddress) -> Result<bool, CombinatoricsError> {
    check_candidate(lower, upper)?;
    let period = lower.period_len();
    if lower.alphabet() == Alphabet::ExponentialIntegers && lower.entry(period - 1) != upper.entry(period - 1) + 1 {
        return Ok(false);
    }
    let (mut x, mut y) = (lower.clone(), upper.clone());
    for _ in 1..period {
        x = x.shift();
        y = y.shift();
        if cyclic_between(lower, &x, upper)? || cyclic_between(lower, &y, upper)? {
            return Ok(false);
        }
    }
    let Some(base) = witness_base(lower, upper) else {
        return Ok(false);
    };
    Ok(defined_itinerary(lower, &base)? == defined_itinerary(upper, &base)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> ExternalAddress {
        text.parse().unwrap()
    }

    #[test]
    fn period_two_pair() {
        assert!(is_characteristic_pair(&a("| 0 1"), &a("| 1 0")).unwrap());
        assert!(!is_characteristic_pair(&a("| 0 1"), &a("| 2 1")).unwrap());
    }

    #[test]
    fn degenerate_and_mismatched_inputs() {
        assert!(matches!(
            is_characteristic_pair(&a("| 0"), &a("| 0")),
            Err(CombinatoricsError::DegeneratePair { .. })
        ));
        assert!(matches!(
            is_characteristic_pair(&a("| 0"), &a("| 0 1")),
            Err(CombinatoricsError::PeriodMismatch { .. })
        ));
        assert!(matches!(
            is_characteristic_pair(&a("2 | 0 1"), &a("| 1 0")),
            Err(CombinatoricsError::PeriodMismatch { .. })
        ));
        assert!(matches!(
            is_characteristic_pair(&a("| 1 0"), &a("| 0 1")),
            Err(CombinatoricsError::DegeneratePair { .. })
        ));
    }

    #[test]
    fn witness_lies_between() {
        let lo = a("| 0 1");
        let hi = a("| 1 0");
        let beta = witness_base(&lo, &hi).unwrap();
        assert!(beta.is_strictly_preperiodic());
        assert_eq!(lo.compare(&beta).unwrap(), Ordering::Less);
        assert_eq!(beta.compare(&hi).unwrap(), Ordering::Less);
    }

    #[test]
    fn orbit_period_of_satellite_pair() {
        let p = CharacteristicPair::new(a("| 0 1"), a("| 1 0")).unwrap();
        assert_eq!(p.period(), 2);
        assert_eq!(p.orbit_period(), 1);
    }
}
