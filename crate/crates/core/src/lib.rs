//! Combinatorics and numerics of external rays for the exponential family
//! `f_c(z) = e^z + c`.
//!
//! * [`combinatorics`]: external addresses, itineraries, orbit portraits and
//!   characteristic ray pairs, all exact.
//! * [`approximation`]: periodic characteristic pairs approximating the
//!   addresses of a Misiurewicz parameter.
//! * [`numerics`]: dynamic and parameter ray tracing, periodic points,
//!   Misiurewicz and parabolic parameters.
//! * [`separation`]: curves built from parameter ray pairs and certificates
//!   that a parameter is separated from a Misiurewicz parameter.
//! * [`render`]: escape-time images of the dynamical and parameter planes.

pub mod approximation;
pub mod combinatorics;
pub mod numerics;
pub mod render;
pub mod separation;

pub use approximation::{ApproximationResult, MisiurewiczCombinatorics};
pub use combinatorics::{
    Alphabet, CharacteristicPair, CombinatoricsError, ExternalAddress, Itinerary, OrbitPortrait, Sequence,
};
pub use num_complex::Complex64;
