use std::cmp::Ordering;

use super::address::ExternalAddress;
use super::sequence::Sequence;
use super::CombinatoricsError;

/// Sector labels of the shift orbit of an address relative to the partition
/// cut out by the one-step preimages `j · base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Itinerary {
    base: ExternalAddress,
    entries: Option<Sequence>,
}

impl Itinerary {
    pub fn base(&self) -> &ExternalAddress {
        &self.base
    }

    /// `None` when the orbit hits a partition boundary.
    pub fn entries(&self) -> Option<&Sequence> {
        self.entries.as_ref()
    }

    pub fn is_defined(&self) -> bool {
        self.entries.is_some()
    }
}

fn check_base(base: &ExternalAddress) -> Result<(), CombinatoricsError> {
    if base.is_periodic() {
        return Err(CombinatoricsError::InvalidBase(base.to_string()));
    }
    Ok(())
}

/// Index `j` of the interval `(j·base, (j+1)·base)` containing `r`, before
/// normalizing so that the base sits in sector 0.
fn raw_index(r: &ExternalAddress, base: &ExternalAddress) -> Result<i64, CombinatoricsError> {
    let j = match r.shift().sequence().lex_cmp(base.sequence()) {
        Ordering::Equal => return Err(CombinatoricsError::BoundaryHit(r.to_string())),
        Ordering::Greater => r.first(),
        Ordering::Less => r.first() - 1,
    };
    match base.alphabet().symbol_range() {
        Some((lo, hi)) if j < lo => Ok(hi),
        _ => Ok(j),
    }
}

/// Label of the partition sector containing `r`. The sector containing
/// `base` has label 0 and labels increase with the order.
pub fn sector_index(r: &ExternalAddress, base: &ExternalAddress) -> Result<i64, CombinatoricsError> {
    check_base(base)?;
    r.check_same_alphabet(base)?;
    Ok(raw_index(r, base)? - raw_index(base, base)?)
}

/// Itinerary of `r` with respect to the partition generated by `base`.
pub fn itinerary(r: &ExternalAddress, base: &ExternalAddress) -> Result<Itinerary, CombinatoricsError> {
    check_base(base)?;
    r.check_same_alphabet(base)?;
    let offset = raw_index(base, base)?;
    let mut labels = Vec::with_capacity(r.preperiod_len() + r.period_len());
    for x in r.shift_orbit() {
        match raw_index(&x, base) {
            Ok(j) => labels.push(j - offset),
            Err(CombinatoricsError::BoundaryHit(_)) => {
                return Ok(Itinerary {
                    base: base.clone(),
                    entries: None,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let period = labels.split_off(r.preperiod_len());
    Ok(Itinerary {
        base: base.clone(),
        entries: Sequence::new(labels, period),
    })
}

/// Defined itinerary entries, or `BoundaryOrbit` if `r` is a preimage of a
/// partition boundary.
pub fn defined_itinerary(r: &ExternalAddress, base: &ExternalAddress) -> Result<Sequence, CombinatoricsError> {
    itinerary(r, base)?
        .entries
        .ok_or_else(|| CombinatoricsError::BoundaryOrbit(r.to_string()))
}

/// Whether the rays of `r1` and `r2` land together in the dynamical plane
/// classified by `base`, i.e. whether their itineraries agree.
pub fn same_landing_class(
    r1: &ExternalAddress,
    r2: &ExternalAddress,
    base: &ExternalAddress,
) -> Result<bool, CombinatoricsError> {
    Ok(defined_itinerary(r1, base)? == defined_itinerary(r2, base)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> ExternalAddress {
        text.parse().unwrap()
    }

    #[test]
    fn sector_index_examples() {
        let base = a("1 | 0");
        assert_eq!(sector_index(&base, &base).unwrap(), 0);
        assert_eq!(sector_index(&a("| 0"), &base).unwrap(), -1);
        assert!(matches!(
            sector_index(&a("0 1 | 0"), &base),
            Err(CombinatoricsError::BoundaryHit(_))
        ));
        assert!(matches!(
            sector_index(&a("| 0"), &a("| 0 1")),
            Err(CombinatoricsError::InvalidBase(_))
        ));
    }

    #[test]
    fn itinerary_examples() {
        let base = a("1 | 0");
        let it = itinerary(&base, &base).unwrap();
        assert_eq!(it.entries().unwrap().first(), 0);
        assert_eq!(
            itinerary(&a("| 0"), &base).unwrap().entries().unwrap(),
            &Sequence::constant(-1)
        );
        let r = a("| 2 0");
        let lhs = itinerary(&r.shift(), &base).unwrap();
        let rhs = itinerary(&r, &base).unwrap();
        assert_eq!(lhs.entries().unwrap(), &rhs.entries().unwrap().shift());
    }

    #[test]
    fn boundary_orbit_is_undefined() {
        let base = a("1 | 0");
        let it = itinerary(&a("3 0 1 | 0"), &base).unwrap();
        assert!(!it.is_defined());
        assert!(matches!(
            same_landing_class(&a("3 0 1 | 0"), &base, &base),
            Err(CombinatoricsError::BoundaryOrbit(_))
        ));
    }

    #[test]
    fn zero_and_one_are_separated_by_base() {
        let base = a("1 | 0");
        assert!(!same_landing_class(&a("| 0"), &a("| 1"), &base).unwrap());
        assert!(same_landing_class(&a("| 1"), &a("| 1"), &base).unwrap());
    }
}
