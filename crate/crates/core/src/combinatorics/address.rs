use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::sequence::Sequence;
use super::CombinatoricsError;

/// Symbol space of an address: all integers (exponential maps) or the
/// symmetric residues of a polynomial degree `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    ExponentialIntegers,
    PolynomialCyclic(u32),
}

impl Alphabet {
    pub fn polynomial(degree: u32) -> Result<Self, CombinatoricsError> {
        if degree < 2 {
            return Err(CombinatoricsError::InvalidDegree(degree));
        }
        Ok(Alphabet::PolynomialCyclic(degree))
    }

    /// Inclusive symbol range, `None` for the unbounded exponential alphabet.
    ///
    /// Degree `D` uses `{-(D-1)/2, …, (D-1)/2}` when odd and
    /// `{-(D-2)/2, …, D/2}` when even.
    pub fn symbol_range(&self) -> Option<(i64, i64)> {
        match *self {
            Alphabet::ExponentialIntegers => None,
            Alphabet::PolynomialCyclic(d) => {
                let d = d as i64;
                if d % 2 == 1 {
                    Some((-(d - 1) / 2, (d - 1) / 2))
                } else {
                    Some((-(d - 2) / 2, d / 2))
                }
            }
        }
    }

    pub fn symbols(&self) -> Option<Vec<i64>> {
        self.symbol_range().map(|(lo, hi)| (lo..=hi).collect())
    }

    pub fn contains(&self, symbol: i64) -> bool {
        match self.symbol_range() {
            None => true,
            Some((lo, hi)) => lo <= symbol && symbol <= hi,
        }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Alphabet::PolynomialCyclic(_))
    }

    /// Symbols of this alphabet inside `[-bound, bound]`.
    pub fn bounded_symbols(&self, bound: i64) -> Vec<i64> {
        (-bound..=bound).filter(|&x| self.contains(x)).collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::ExponentialIntegers => f.write_str("exp"),
            Alphabet::PolynomialCyclic(d) => write!(f, "poly{d}"),
        }
    }
}

/// An eventually periodic external address over an [`Alphabet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExternalAddress {
    alphabet: Alphabet,
    seq: Sequence,
}

impl ExternalAddress {
    pub fn new(alphabet: Alphabet, preperiod: Vec<i64>, period: Vec<i64>) -> Result<Self, CombinatoricsError> {
        let seq = Sequence::new(preperiod, period).ok_or(CombinatoricsError::EmptyPeriod)?;
        Self::from_sequence(alphabet, seq)
    }

    pub fn from_sequence(alphabet: Alphabet, seq: Sequence) -> Result<Self, CombinatoricsError> {
        if let Some(bad) = seq.entries().find(|&x| !alphabet.contains(x)) {
            return Err(CombinatoricsError::SymbolOutOfAlphabet { symbol: bad, alphabet });
        }
        Ok(ExternalAddress { alphabet, seq })
    }

    /// Exponential-alphabet address `pre · period^∞`.
    pub fn exp(preperiod: &[i64], period: &[i64]) -> Result<Self, CombinatoricsError> {
        Self::new(Alphabet::ExponentialIntegers, preperiod.to_vec(), period.to_vec())
    }

    pub fn exp_periodic(period: &[i64]) -> Result<Self, CombinatoricsError> {
        Self::exp(&[], period)
    }

    /// Parses `"p1 p2 … | q1 q2 …"` over the given alphabet. Without a bar
    /// the whole word is taken as the period.
    pub fn parse_with(text: &str, alphabet: Alphabet) -> Result<Self, CombinatoricsError> {
        let (pre_text, per_text) = match text.split_once('|') {
            Some((a, b)) => (a, b),
            None => ("", text),
        };
        let parse_word = |s: &str| -> Result<Vec<i64>, CombinatoricsError> {
            s.split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| CombinatoricsError::Parse(format!("bad symbol `{tok}` in `{text}`")))
                })
                .collect()
        };
        let pre = parse_word(pre_text)?;
        let per = parse_word(per_text)?;
        if per.is_empty() {
            return Err(CombinatoricsError::Parse(format!("empty period word in `{text}`")));
        }
        Self::new(alphabet, pre, per)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }

    pub fn preperiod(&self) -> &[i64] {
        self.seq.preperiod()
    }

    pub fn period_word(&self) -> &[i64] {
        self.seq.period_word()
    }

    pub fn preperiod_len(&self) -> usize {
        self.seq.preperiod_len()
    }

    pub fn period_len(&self) -> usize {
        self.seq.period_len()
    }

    pub fn is_periodic(&self) -> bool {
        self.seq.is_periodic()
    }

    pub fn is_strictly_preperiodic(&self) -> bool {
        !self.seq.is_periodic()
    }

    /// Entry `s_{k+1}` (zero-based index `k`).
    pub fn entry(&self, k: usize) -> i64 {
        self.seq.entry(k)
    }

    pub fn first(&self) -> i64 {
        self.seq.first()
    }

    pub fn max_abs(&self) -> i64 {
        self.seq.max_abs()
    }

    pub fn shift(&self) -> Self {
        ExternalAddress {
            alphabet: self.alphabet,
            seq: self.seq.shift(),
        }
    }

    pub fn shift_by(&self, k: usize) -> Self {
        ExternalAddress {
            alphabet: self.alphabet,
            seq: self.seq.shift_by(k),
        }
    }

    /// The one-step preimage `symbol · self`.
    pub fn prepend(&self, symbol: i64) -> Result<Self, CombinatoricsError> {
        Self::from_sequence(self.alphabet, self.seq.prepend(symbol))
    }

    /// Distinct points of the shift orbit, starting at `self`.
    pub fn shift_orbit(&self) -> Vec<Self> {
        let n = self.preperiod_len() + self.period_len();
        let mut out = Vec::with_capacity(n);
        let mut x = self.clone();
        for _ in 0..n {
            let next = x.shift();
            out.push(x);
            x = next;
        }
        out
    }

    /// Lexicographic comparison. For cyclic alphabets this is the linear
    /// order of the symmetric representatives; use [`cyclic_between`] for
    /// the cyclic order.
    pub fn compare(&self, other: &Self) -> Result<Ordering, CombinatoricsError> {
        self.check_same_alphabet(other)?;
        Ok(self.seq.lex_cmp(&other.seq))
    }

    pub fn dist(&self, other: &Self) -> Result<BigRational, CombinatoricsError> {
        self.check_same_alphabet(other)?;
        Ok(self.seq.dist(&other.seq))
    }

    pub fn dist_f64(&self, other: &Self) -> Result<f64, CombinatoricsError> {
        Ok(self.dist(other)?.to_f64().unwrap_or(f64::NAN))
    }

    /// Minimal potential `t_s`. Bounded addresses have `t_s = 0`.
    pub fn minimal_potential(&self) -> f64 {
        0.0
    }

    pub(crate) fn check_same_alphabet(&self, other: &Self) -> Result<(), CombinatoricsError> {
        if self.alphabet != other.alphabet {
            return Err(CombinatoricsError::AlphabetMismatch(self.alphabet, other.alphabet));
        }
        Ok(())
    }
}

impl Ord for ExternalAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alphabet
            .cmp(&other.alphabet)
            .then_with(|| self.seq.lex_cmp(&other.seq))
    }
}

impl PartialOrd for ExternalAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExternalAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.seq.fmt(f)
    }
}

impl FromStr for ExternalAddress {
    type Err = CombinatoricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_with(s, Alphabet::ExponentialIntegers)
    }
}

/// `x` lies strictly inside the arc from `a` to `b`: the open interval
/// `(a, b)` for the exponential alphabet, the counterclockwise arc for
/// cyclic alphabets.
pub fn cyclic_between(
    a: &ExternalAddress,
    x: &ExternalAddress,
    b: &ExternalAddress,
) -> Result<bool, CombinatoricsError> {
    let ab = a.compare(b)?;
    let ax = a.compare(x)?;
    let xb = x.compare(b)?;
    let inside_linear = ax == Ordering::Less && xb == Ordering::Less;
    if !a.alphabet().is_cyclic() {
        return Ok(inside_linear);
    }
    Ok(match ab {
        Ordering::Less => inside_linear,
        Ordering::Greater => ax == Ordering::Less || xb == Ordering::Less,
        Ordering::Equal => false,
    })
}

/// Whether the pairs `{a1, a2}` and `{b1, b2}` interleave in the cyclic
/// order (the linear order closed up at infinity).
pub fn linked(
    a1: &ExternalAddress,
    a2: &ExternalAddress,
    b1: &ExternalAddress,
    b2: &ExternalAddress,
) -> Result<bool, CombinatoricsError> {
    let mut pts = [(a1, 0u8), (a2, 0u8), (b1, 1u8), (b2, 1u8)];
    for (p, _) in &pts[1..] {
        a1.check_same_alphabet(p)?;
    }
    pts.sort_by(|x, y| x.0.sequence().lex_cmp(y.0.sequence()));
    let tags: Vec<u8> = pts.iter().map(|p| p.1).collect();
    let changes = (0..4).filter(|&i| tags[i] != tags[(i + 1) % 4]).count();
    Ok(changes == 4)
}

/// Maps an exponential address into the polynomial space of degree `D`.
/// Requires `D > 2N + 2` where `N` is the largest absolute entry.
pub fn embed(a: &ExternalAddress, degree: u32) -> Result<ExternalAddress, CombinatoricsError> {
    if a.alphabet() != Alphabet::ExponentialIntegers {
        return Err(CombinatoricsError::AlphabetMismatch(
            a.alphabet(),
            Alphabet::ExponentialIntegers,
        ));
    }
    let n = a.max_abs();
    if (degree as i64) <= 2 * n + 2 {
        return Err(CombinatoricsError::DegreeTooSmall {
            degree,
            max_abs_entry: n,
        });
    }
    ExternalAddress::from_sequence(Alphabet::polynomial(degree)?, a.sequence().clone())
}

/// Inverse of [`embed`]: reads the symmetric residues as integers.
pub fn project(a: &ExternalAddress) -> ExternalAddress {
    ExternalAddress {
        alphabet: Alphabet::ExponentialIntegers,
        seq: a.sequence().clone(),
    }
}
