use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An eventually periodic integer sequence `pre · period^∞` in canonical form.
///
/// The period word is primitive and the preperiod is as short as possible, so
/// two values are equal exactly when they represent the same infinite sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    pre: Vec<i64>,
    period: Vec<i64>,
}

impl Sequence {
    /// Builds the canonical representative of `pre · period^∞`.
    ///
    /// Returns `None` if `period` is empty.
    pub fn new(pre: Vec<i64>, period: Vec<i64>) -> Option<Self> {
        if period.is_empty() {
            return None;
        }
        let mut pre = pre;
        let mut period = primitive_root(period);
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Some(Sequence { pre, period })
    }

    pub fn periodic(word: Vec<i64>) -> Option<Self> {
        Self::new(Vec::new(), word)
    }

    pub fn constant(symbol: i64) -> Self {
        Sequence {
            pre: Vec::new(),
            period: vec![symbol],
        }
    }

    pub fn preperiod(&self) -> &[i64] {
        &self.pre
    }

    pub fn period_word(&self) -> &[i64] {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    /// Entry at zero-based position `k`.
    pub fn entry(&self, k: usize) -> i64 {
        if k < self.pre.len() {
            self.pre[k]
        } else {
            self.period[(k - self.pre.len()) % self.period.len()]
        }
    }

    pub fn first(&self) -> i64 {
        self.entry(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (0..).map(move |k| self.entry(k))
    }

    /// The first `n` entries.
    pub fn prefix(&self, n: usize) -> Vec<i64> {
        (0..n).map(|k| self.entry(k)).collect()
    }

    pub fn shift(&self) -> Self {
        if self.pre.is_empty() {
            let mut period = self.period.clone();
            period.rotate_left(1);
            Sequence {
                pre: Vec::new(),
                period,
            }
        } else {
            Sequence {
                pre: self.pre[1..].to_vec(),
                period: self.period.clone(),
            }
        }
    }

    pub fn shift_by(&self, k: usize) -> Self {
        let mut s = self.clone();
        if k <= s.pre.len() {
            s.pre.drain(..k);
            return s;
        }
        let rest = (k - s.pre.len()) % s.period.len();
        s.pre.clear();
        s.period.rotate_left(rest);
        s
    }

    /// `symbol · self`.
    pub fn prepend(&self, symbol: i64) -> Self {
        let mut pre = Vec::with_capacity(self.pre.len() + 1);
        pre.push(symbol);
        pre.extend_from_slice(&self.pre);
        Self::new(pre, self.period.clone()).expect("period is nonempty")
    }

    /// Number of positions after which two sequences have both entered a
    /// common cycle; agreement on this many symbols implies equality.
    pub fn comparison_horizon(&self, other: &Self) -> usize {
        self.pre.len().max(other.pre.len()) + self.period.len().lcm(&other.period.len())
    }

    /// Zero-based index of the first position where the sequences differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        if self == other {
            return None;
        }
        (0..self.comparison_horizon(other)).find(|&k| self.entry(k) != other.entry(k))
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            None => Ordering::Equal,
            Some(k) => self.entry(k).cmp(&other.entry(k)),
        }
    }

    /// Exact value of `Σ_{k : a_k ≠ b_k} 2^{-k}` with positions counted from 1.
    pub fn dist(&self, other: &Self) -> BigRational {
        if self == other {
            return BigRational::zero();
        }
        let head = self.pre.len().max(other.pre.len());
        let cycle = self.period.len().lcm(&other.period.len());
        let mut head_sum = BigInt::zero();
        for k in 0..head {
            head_sum <<= 1;
            if self.entry(k) != other.entry(k) {
                head_sum += 1;
            }
        }
        let mut cycle_sum = BigInt::zero();
        for j in 0..cycle {
            cycle_sum <<= 1;
            if self.entry(head + j) != other.entry(head + j) {
                cycle_sum += 1;
            }
        }
        // head_sum / 2^head + cycle_sum / (2^head (2^cycle - 1))
        let one = BigInt::one();
        let cycle_den = (&one << cycle) - &one;
        let num = head_sum * &cycle_den + cycle_sum;
        let den = (&one << head) * cycle_den;
        BigRational::new(num, den)
    }

    pub fn max_abs(&self) -> i64 {
        self.pre
            .iter()
            .chain(self.period.iter())
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn min_entry(&self) -> i64 {
        *self.pre.iter().chain(self.period.iter()).min().expect("nonempty")
    }

    pub fn max_entry(&self) -> i64 {
        *self.pre.iter().chain(self.period.iter()).max().expect("nonempty")
    }

    pub fn entries(&self) -> impl Iterator<Item = i64> + '_ {
        self.pre.iter().chain(self.period.iter()).copied()
    }
}

fn primitive_root(word: Vec<i64>) -> Vec<i64> {
    let n = word.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| word[i] == word[i - d]) {
            return word[..d].to_vec();
        }
    }
    word
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.pre.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        if self.pre.is_empty() {
            f.write_str("|")?;
        } else {
            f.write_str(" |")?;
        }
        for x in &self.period {
            write!(f, " {x}")?;
        }
        Ok(())
    }
}
