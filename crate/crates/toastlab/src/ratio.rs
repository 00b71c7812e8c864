use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Exact non-negative rational, kept in lowest terms. Used for shell ratios,
/// isoperimetric quotients, and coverage fractions where floating point would
/// spoil reproducibility.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    /// `den` must be nonzero.
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Ratio {
        Ratio { num: 0, den: 1 }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parses "3/4", "0.75", or "2".
    pub fn parse(s: &str) -> Option<Ratio> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().ok()?;
            let den: u64 = b.trim().parse().ok()?;
            if den == 0 {
                return None;
            }
            return Some(Ratio::new(num, den));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
            if frac.is_empty() {
                return Some(Ratio::new(int, 1));
            }
            let scale = 10u64.checked_pow(frac.len() as u32)?;
            let frac: u64 = frac.parse().ok()?;
            return Some(Ratio::new(int.checked_mul(scale)?.checked_add(frac)?, scale));
        }
        s.parse().ok().map(|n| Ratio::new(n, 1))
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Ratio) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_compares() {
        assert_eq!(Ratio::new(316, 2965), Ratio::new(316, 2965));
        assert_eq!(Ratio::new(4, 8), Ratio::new(1, 2));
        assert!(Ratio::new(1, 3) < Ratio::new(1, 2));
        assert!(Ratio::new(12, 1) > Ratio::new(1, 4));
    }

    #[test]
    fn parses_common_forms() {
        assert_eq!(Ratio::parse("1/4"), Some(Ratio::new(1, 4)));
        assert_eq!(Ratio::parse("0.25"), Some(Ratio::new(1, 4)));
        assert_eq!(Ratio::parse("2"), Some(Ratio::new(2, 1)));
        assert_eq!(Ratio::parse("1/0"), None);
    }
}
