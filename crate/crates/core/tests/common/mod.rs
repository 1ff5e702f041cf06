//! Naive reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use exprays::ExternalAddress;

pub const HORIZON: usize = 160;

pub fn addr(text: &str) -> ExternalAddress {
    text.parse().unwrap()
}

/// Preperiod and period words read back from the textual form.
pub fn words_of(a: &ExternalAddress) -> (Vec<i64>, Vec<i64>) {
    let text = a.to_string();
    let (pre, per) = text.split_once('|').unwrap();
    let read = |s: &str| s.split_whitespace().map(|x| x.parse().unwrap()).collect::<Vec<i64>>();
    (read(pre), read(per))
}

/// First `n` entries, expanded symbol by symbol.
pub fn expand(a: &ExternalAddress, n: usize) -> Vec<i64> {
    let (pre, per) = words_of(a);
    let mut out = pre;
    while out.len() < n {
        out.extend_from_slice(&per);
    }
    out.truncate(n);
    out
}

pub fn naive_cmp(a: &ExternalAddress, b: &ExternalAddress) -> Ordering {
    expand(a, HORIZON).cmp(&expand(b, HORIZON))
}

pub fn naive_dist(a: &ExternalAddress, b: &ExternalAddress) -> f64 {
    let (x, y) = (expand(a, HORIZON), expand(b, HORIZON));
    (0..HORIZON)
        .filter(|&k| x[k] != y[k])
        .map(|k| 0.5f64.powi(k as i32 + 1))
        .sum()
}

/// Number of one-step preimages `j·base` below `x`, `j` over a window wide
/// enough to contain every symbol in use.
fn boundaries_below(x: &[i64], base: &[i64], window: i64) -> i64 {
    (-window..=window)
        .filter(|&j| {
            let mut b = vec![j];
            b.extend_from_slice(&base[..x.len() - 1]);
            b.as_slice() < x
        })
        .count() as i64
}

/// Sector label of the expanded sequence `x` relative to `base`, by direct
/// comparison against all boundaries.
pub fn naive_sector_of(x: &[i64], base: &[i64], window: i64) -> i64 {
    boundaries_below(x, base, window) - boundaries_below(&base[..x.len()], base, window)
}

/// First `len` itinerary entries of `r` relative to `base`.
pub fn naive_itinerary(r: &ExternalAddress, base: &ExternalAddress, len: usize) -> Vec<i64> {
    let window = r.max_abs().max(base.max_abs()) + 2;
    let x = expand(r, HORIZON + len);
    let b = expand(base, HORIZON + len);
    (0..len)
        .map(|k| naive_sector_of(&x[k..k + HORIZON], &b, window))
        .collect()
}

/// Groups addresses by their first `len` itinerary entries.
pub fn naive_classes(addresses: &[ExternalAddress], base: &ExternalAddress, len: usize) -> Vec<Vec<String>> {
    let mut groups: BTreeMap<Vec<i64>, Vec<String>> = BTreeMap::new();
    for a in addresses {
        groups
            .entry(naive_itinerary(a, base, len))
            .or_default()
            .push(a.to_string());
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    out.sort();
    out
}

/// All periodic words of exact period `n` over `symbols`, built independently
/// of the library enumeration.
pub fn naive_periodic(symbols: &[i64], n: usize) -> Vec<ExternalAddress> {
    let mut out = Vec::new();
    let total = symbols.len().pow(n as u32);
    for mut code in 0..total {
        let mut w = Vec::with_capacity(n);
        for _ in 0..n {
            w.push(symbols[code % symbols.len()]);
            code /= symbols.len();
        }
        let primitive = (1..n).all(|d| !n.is_multiple_of(d) || (0..n).any(|i| w[i] != w[(i + d) % n]));
        if primitive {
            out.push(ExternalAddress::exp(&[], &w).unwrap());
        }
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    let (mut m, mut k, mut sign) = (n, 2, 1);
    while k * k <= m {
        if m % k == 0 {
            m /= k;
            if m % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// `Σ_{d|n} μ(n/d) D^{d−1}`: the number of period-`n` wakes of degree `D`
/// unicritical polynomials.
pub fn wake_count(degree: u64, n: u64) -> i64 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| mobius(n / d) * degree.pow(d as u32 - 1) as i64)
        .sum()
}
