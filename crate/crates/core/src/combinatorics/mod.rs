//! Exact symbolic dynamics on spaces of eventually periodic external addresses.

mod address;
mod characteristic;
mod partition;
mod portrait;
mod sequence;

use thiserror::Error;

pub use address::{cyclic_between, embed, linked, project, Alphabet, ExternalAddress};
pub use characteristic::{is_characteristic_pair, witness_base, CharacteristicPair};
pub use partition::{defined_itinerary, itinerary, same_landing_class, sector_index, Itinerary};
pub use portrait::{
    classes_linked, periodic_addresses, portrait_classes, portrait_classes_limited, OrbitPortrait,
    DEFAULT_ENUMERATION_LIMIT,
};
pub use sequence::Sequence;

pub(crate) use portrait::{count_words, words};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("address has an empty period word")]
    EmptyPeriod,
    #[error("cannot parse address: {0}")]
    Parse(String),
    #[error("symbol {symbol} is not in alphabet {alphabet}")]
    SymbolOutOfAlphabet { symbol: i64, alphabet: Alphabet },
    #[error("polynomial degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("alphabets differ: {0} vs {1}")]
    AlphabetMismatch(Alphabet, Alphabet),
    #[error("address {0} is a partition boundary")]
    BoundaryHit(String),
    #[error("address {0} is eventually mapped onto a partition boundary")]
    BoundaryOrbit(String),
    #[error("partition base {0} must be strictly preperiodic")]
    InvalidBase(String),
    #[error("enumeration of {count} candidates exceeds the limit {limit}")]
    ResourceBound { count: usize, limit: usize },
    #[error("addresses {lower} and {upper} are not periodic of one common period")]
    PeriodMismatch { lower: String, upper: String },
    #[error("pair ({lower}, {upper}) is not ordered lower < upper")]
    DegeneratePair { lower: String, upper: String },
    #[error("pair ({lower}, {upper}) is not characteristic")]
    NotCharacteristic { lower: String, upper: String },
    #[error("degree {degree} is too small for entries up to {max_abs_entry} (need D > 2N + 2)")]
    DegreeTooSmall { degree: u32, max_abs_entry: i64 },
    #[error("invalid orbit portrait: {0}")]
    InvalidPortrait(String),
}
