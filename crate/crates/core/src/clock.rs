//! Simulated time and the fixed-window request budget.
//!
//! Nothing here sleeps: "waiting for the next window" means jumping the
//! simulated clock forward. Callers that share a limiter across threads wrap
//! the pair in a lock.

use crate::error::{Error, Result};

/// Monotone simulated clock, millisecond resolution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimClock {
    now_ms: u64,
}

impl SimClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(now_ms: u64) -> Self {
        Self { now_ms }
    }

    pub fn now_ms(&self) -> u64 {
        self.now_ms
    }

    pub fn now_secs(&self) -> f64 {
        self.now_ms as f64 / 1000.0
    }

    pub fn advance(&mut self, ms: u64) {
        self.now_ms = self.now_ms.saturating_add(ms);
    }

    /// Moves to `t` unless that would go backwards.
    pub fn advance_to(&mut self, t: u64) {
        self.now_ms = self.now_ms.max(t);
    }
}

/// At most `max_requests` per `window_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateLimitPolicy {
    pub max_requests: u32,
    pub window_ms: u64,
}

impl RateLimitPolicy {
    pub fn new(max_requests: u32, window_ms: u64) -> Result<Self> {
        if max_requests == 0 {
            return Err(Error::Config("rate limit must allow at least one request".into()));
        }
        if window_ms == 0 {
            return Err(Error::Config("rate-limit window must be positive".into()));
        }
        Ok(Self {
            max_requests,
            window_ms,
        })
    }

    /// No effective limit; useful for oracles that only count requests.
    pub fn unlimited() -> Self {
        Self {
            max_requests: u32::MAX,
            window_ms: u64::MAX / 4,
        }
    }
}

impl Default for RateLimitPolicy {
    /// 350 requests per hour.
    fn default() -> Self {
        Self {
            max_requests: 350,
            window_ms: 3_600_000,
        }
    }
}

/// Fixed-window token bucket: the budget refills all at once at each window
/// boundary, and a request over budget waits for the next boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateLimiter {
    policy: RateLimitPolicy,
    window_start_ms: u64,
    used: u32,
    sleeps: u64,
    slept_ms: u64,
}

impl RateLimiter {
    pub fn new(policy: RateLimitPolicy, clock: &SimClock) -> Self {
        Self {
            policy,
            window_start_ms: clock.now_ms(),
            used: 0,
            sleeps: 0,
            slept_ms: 0,
        }
    }

    pub fn policy(&self) -> RateLimitPolicy {
        self.policy
    }

    /// Number of times a request had to wait for a new window.
    pub fn sleeps(&self) -> u64 {
        self.sleeps
    }

    pub fn slept_ms(&self) -> u64 {
        self.slept_ms
    }

    pub fn used_in_window(&self) -> u32 {
        self.used
    }

    fn window_end(&self) -> u64 {
        self.window_start_ms.saturating_add(self.policy.window_ms)
    }

    fn roll(&mut self, now: u64) {
        if now >= self.window_end() {
            let elapsed = now - self.window_start_ms;
            let windows = elapsed / self.policy.window_ms;
            self.window_start_ms += windows * self.policy.window_ms;
            self.used = 0;
        }
    }

    /// Takes one request token, jumping `clock` to the next window boundary
    /// when the current window is spent. Returns the simulated wait.
    pub fn acquire(&mut self, clock: &mut SimClock) -> u64 {
        self.roll(clock.now_ms());
        let mut waited = 0;
        if self.used >= self.policy.max_requests {
            let before = clock.now_ms();
            clock.advance_to(self.window_end());
            waited = clock.now_ms() - before;
            self.sleeps += 1;
            self.slept_ms += waited;
            self.roll(clock.now_ms());
        }
        self.used += 1;
        waited
    }

    /// [`acquire`](Self::acquire) `n` times.
    pub fn acquire_n(&mut self, n: u64, clock: &mut SimClock) -> u64 {
        (0..n).map(|_| self.acquire(clock)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_is_monotone() {
        let mut c = SimClock::starting_at(500);
        c.advance_to(100);
        assert_eq!(c.now_ms(), 500);
        c.advance(250);
        assert_eq!(c.now_ms(), 750);
    }

    #[test]
    fn budget_then_wait() {
        let mut clock = SimClock::new();
        let mut rl = RateLimiter::new(RateLimitPolicy::default(), &clock);
        for _ in 0..350 {
            assert_eq!(rl.acquire(&mut clock), 0);
            clock.advance(200);
        }
        assert_eq!(clock.now_ms(), 70_000);
        let waited = rl.acquire(&mut clock);
        assert_eq!(clock.now_ms(), 3_600_000);
        assert_eq!(waited, 3_530_000);
        assert_eq!(rl.sleeps(), 1);
        assert_eq!(rl.used_in_window(), 1);
    }

    #[test]
    fn idle_time_refills() {
        let mut clock = SimClock::new();
        let policy = RateLimitPolicy::new(2, 1000).unwrap();
        let mut rl = RateLimiter::new(policy, &clock);
        rl.acquire_n(2, &mut clock);
        clock.advance(2500);
        assert_eq!(rl.acquire(&mut clock), 0);
        assert_eq!(rl.acquire(&mut clock), 0);
        // window [2000, 3000) is now spent
        assert_eq!(rl.acquire(&mut clock), 500);
        assert_eq!(clock.now_ms(), 3000);
    }

    #[test]
    fn invalid_policies() {
        assert!(RateLimitPolicy::new(0, 10).is_err());
        assert!(RateLimitPolicy::new(1, 0).is_err());
    }
}
