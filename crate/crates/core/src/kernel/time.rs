use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

/// Simulation clock value in minutes.
///
/// Finite values are non-negative. [`VirtualTime::INFINITY`] marks a passive
/// component and compares greater than every finite time. Equality is exact:
/// two event times coincide only when their bit patterns agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualTime(f64);

impl VirtualTime {
    pub const ZERO: VirtualTime = VirtualTime(0.0);
    pub const INFINITY: VirtualTime = VirtualTime(f64::INFINITY);

    /// Returns `None` for negative or NaN values.
    pub fn new(minutes: f64) -> Option<Self> {
        if minutes.is_nan() || minutes < 0.0 {
            None
        } else {
            Some(VirtualTime(minutes))
        }
    }

    pub fn minutes(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Eq for VirtualTime {}

impl PartialOrd for VirtualTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VirtualTime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Advances a time by a non-negative duration.
impl Add<f64> for VirtualTime {
    type Output = VirtualTime;

    fn add(self, duration: f64) -> VirtualTime {
        debug_assert!(duration >= 0.0);
        VirtualTime(self.0 + duration)
    }
}

/// Elapsed minutes between two instants.
impl Sub for VirtualTime {
    type Output = f64;

    fn sub(self, earlier: VirtualTime) -> f64 {
        self.0 - earlier.0
    }
}

impl fmt::Display for VirtualTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates_finite_times() {
        let t = VirtualTime::new(1e300).unwrap();
        assert!(VirtualTime::INFINITY > t);
        assert!(VirtualTime::ZERO < t);
        assert_eq!(VirtualTime::INFINITY.max(t), VirtualTime::INFINITY);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(VirtualTime::new(-1.0).is_none());
        assert!(VirtualTime::new(f64::NAN).is_none());
        assert_eq!(VirtualTime::new(0.0), Some(VirtualTime::ZERO));
    }

    #[test]
    fn arithmetic() {
        let t = VirtualTime::new(10.0).unwrap() + 2.5;
        assert_eq!(t.minutes(), 12.5);
        assert_eq!(t - VirtualTime::new(2.5).unwrap(), 10.0);
        assert!((VirtualTime::ZERO + f64::INFINITY).is_infinite());
    }
}
