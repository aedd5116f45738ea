use std::f64::consts::PI;
use std::ops::RangeInclusive;

/// Parses `0.78pi`, `0.78π`, `pi`, or plain radians.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (coef, scale) = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        Some(c) => (c.trim_end_matches('*').trim(), PI),
        None => (t.as_str(), 1.0),
    };
    let c: f64 = if coef.is_empty() && scale == PI {
        1.0
    } else {
        coef.parse().map_err(|_| format!("cannot read {s:?} as an angle (try 0.78pi or radians)"))?
    };
    let v = c * scale;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("angle {s:?} is not finite"))
    }
}

/// A value that may be left to the library (`auto`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Auto(pub Option<f64>);

/// `auto` or an angle.
pub fn auto_angle(s: &str) -> Result<Auto, String> {
    if s.trim().eq_ignore_ascii_case("auto") {
        Ok(Auto(None))
    } else {
        angle(s).map(|a| Auto(Some(a)))
    }
}

/// `auto` or a positive length.
pub fn auto_length(s: &str) -> Result<Auto, String> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(Auto(None));
    }
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Auto(Some(v))),
        _ => Err(format!("{s:?} is neither auto nor a positive length")),
    }
}

/// `a..b` and `a..=b` (both inclusive), or a single `a`.
pub fn range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad bound {x:?} in range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

/// `U,V` with vertex names or indices.
pub fn pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok((a.trim().to_string(), b.trim().to_string()))
        }
        _ => Err(format!("expected two vertices as U,V, got {s:?}")),
    }
}
