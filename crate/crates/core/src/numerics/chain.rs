//! Backward iteration along the shift orbit of an address.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::combinatorics::ExternalAddress;

/// Why a pullback could not be completed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum PullbackFailure {
    /// `w - c` lies on the negative real axis and no remembered branch exists.
    BranchCut,
    /// `w` came within the collision radius of the singular value `c`.
    Collision,
    /// A non-finite value appeared.
    NonFinite,
}

/// Successive potentials `t, F(t), F²(t), …` up to the first one at or above
/// `t_big` (or the last one before `F` overflows).
pub(crate) fn potential_ladder(t: f64, t_big: f64) -> Vec<f64> {
    let mut ladder = vec![t];
    let mut p = t;
    while p < t_big && p < 709.0 {
        p = p.exp_m1();
        ladder.push(p);
    }
    ladder
}

/// Remembered ray points, per shift-orbit state and log-potential bucket.
///
/// Inverse branches at small potential are chosen as the branch of the
/// logarithm closest to the remembered point of the same ray at the nearest
/// potential seen so far; at large potential the strip `S_j` of the address
/// entry decides.
#[derive(Clone, Debug)]
pub(crate) struct BranchAtlas {
    preperiod: usize,
    period: usize,
    symbols: Vec<i64>,
    memory: Vec<BTreeMap<i32, Complex64>>,
    bucket_width: f64,
    strip_potential: f64,
}

/// One level of a completed pullback: state index, potential and point.
pub(crate) type LevelRecord = (usize, f64, Complex64);

pub(crate) struct Pullback {
    pub z: Complex64,
    /// `∂z/∂c`, if requested.
    pub dz_dc: Option<Complex64>,
}

impl BranchAtlas {
    pub fn new(address: &ExternalAddress, strip_potential: f64, bucket_width: f64) -> Self {
        let preperiod = address.preperiod_len();
        let period = address.period_len();
        let states = preperiod + period;
        BranchAtlas {
            preperiod,
            period,
            symbols: (0..states).map(|k| address.entry(k)).collect(),
            memory: vec![BTreeMap::new(); states],
            bucket_width,
            strip_potential,
        }
    }

    fn state(&self, level: usize) -> usize {
        if level < self.preperiod {
            level
        } else {
            self.preperiod + (level - self.preperiod) % self.period
        }
    }

    fn bucket(&self, p: f64) -> i32 {
        (p.ln() / self.bucket_width).floor() as i32
    }

    fn recall(&self, state: usize, p: f64) -> Option<Complex64> {
        let map = &self.memory[state];
        let b = self.bucket(p);
        let below = map.range(..=b).next_back();
        let above = map.range(b..).next();
        match (below, above) {
            (Some((bl, zl)), Some((ba, za))) => Some(if b - bl <= ba - b { *zl } else { *za }),
            (Some((_, z)), None) | (None, Some((_, z))) => Some(*z),
            (None, None) => None,
        }
    }

    pub fn remember(&mut self, records: &[LevelRecord]) {
        for &(state, p, z) in records {
            if p < self.strip_potential {
                let b = self.bucket(p);
                self.memory[state].insert(b, z);
            }
        }
    }

    /// Computes `g^c_s(t)` by pulling back the asymptotic approximation at
    /// the top of the potential ladder.
    pub fn pullback(
        &self,
        c: Complex64,
        ladder: &[f64],
        collision_radius: f64,
        want_dc: bool,
        mut records: Option<&mut Vec<LevelRecord>>,
    ) -> Result<Pullback, PullbackFailure> {
        let top = ladder.len() - 1;
        let mut z = Complex64::new(ladder[top], TAU * self.symbols[self.state(top)] as f64);
        let mut dz = Complex64::new(0.0, 0.0);
        if let Some(r) = records.as_deref_mut() {
            r.clear();
        }
        for level in (0..top).rev() {
            let w = z - c;
            if w.norm() < collision_radius {
                return Err(PullbackFailure::Collision);
            }
            let log_w = w.ln();
            let p = ladder[level];
            let state = self.state(level);
            let remembered = if p < self.strip_potential {
                self.recall(state, p)
            } else {
                None
            };
            let turns = match remembered {
                Some(prev) => ((prev.im - log_w.im) / TAU).round(),
                None => {
                    if w.re < 0.0 && w.im.abs() <= 1e-12 * w.norm() {
                        return Err(PullbackFailure::BranchCut);
                    }
                    self.symbols[state] as f64
                }
            };
            if want_dc {
                dz = (dz - 1.0) / w;
            }
            z = log_w + Complex64::new(0.0, TAU * turns);
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(PullbackFailure::NonFinite);
            }
            if let Some(r) = records.as_deref_mut() {
                r.push((state, p, z));
            }
        }
        Ok(Pullback {
            z,
            dz_dc: want_dc.then_some(dz),
        })
    }
}

/// Strip `S_j = {(2j-1)π < Im z < (2j+1)π}` containing `z`.
pub fn strip_index(z: Complex64) -> i64 {
    ((z.im + PI) / TAU).floor() as i64
}
