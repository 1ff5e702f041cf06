//! Parsers for flag values.

use num_complex::Complex64;

/// Accepts `a+bi`, `a-bi`, `bi`, `a`, or the pairs `a b` and `a,b`.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    let parts: Vec<&str> = t
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() == 2 {
        let re = parts[0].parse::<f64>().map_err(|e| format!("{text:?}: {e}"))?;
        let im = parts[1].parse::<f64>().map_err(|e| format!("{text:?}: {e}"))?;
        return Ok(Complex64::new(re, im));
    }
    t.parse::<Complex64>().map_err(|e| format!("{text:?}: {e}"))
}

/// Exponent `N` of `ε = 2^{-N}`, from `2^-N`, `1/2^N`, `1/M` or a decimal.
pub fn epsilon_exponent(text: &str) -> Result<u32, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("{text:?} is not of the form 2^-N with N >= 1");
    let n = if let Some(rest) = t.strip_prefix("2^-").or_else(|| t.strip_prefix("1/2^")) {
        rest.parse::<u32>().map_err(|_| bad())?
    } else if let Some(rest) = t.strip_prefix("1/") {
        let m: u64 = rest.parse().map_err(|_| bad())?;
        if !m.is_power_of_two() {
            return Err(bad());
        }
        m.trailing_zeros()
    } else {
        let v: f64 = t.parse().map_err(|_| bad())?;
        if !(v > 0.0 && v < 1.0) {
            return Err(bad());
        }
        let n = -v.log2();
        if n.fract() != 0.0 || v != 2f64.powi(-(n as i32)) {
            return Err(bad());
        }
        n as u32
    };
    if n == 0 {
        return Err(bad());
    }
    Ok(n)
}

/// `800x600`.
pub fn pixels(text: &str) -> Result<(u32, u32), String> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("{text:?}: expected WIDTHxHEIGHT"))?;
    let w = a.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    let h = b.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    Ok((w, h))
}

/// `key=value`.
pub fn key_value(text: &str) -> Result<(String, String), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("{text:?}: expected key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
