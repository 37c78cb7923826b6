//! Binomial estimates with Wilson score intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// `events / trials` with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinomialEstimate {
    pub events: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BinomialEstimate {
    pub fn new(events: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(events, trials, Z95);
        let estimate = if trials == 0 { 0.0 } else { events as f64 / trials as f64 };
        Self {
            events,
            trials,
            estimate,
            ci_low,
            ci_high,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    /// True when the two intervals intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Wilson score interval for `events` successes in `trials`; `(0, 1)` when
/// there are no trials.
pub fn wilson_interval(events: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // the bounds are exact at the edges; rounding would leave them a hair off
    let low = if events == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if events >= trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}
