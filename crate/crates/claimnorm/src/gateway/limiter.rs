//! In-flight cap plus request pacing, shared by all callers of one gateway.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

pub(crate) struct Limiter {
    max_in_flight: usize,
    min_interval: Duration,
    state: Mutex<State>,
    available: Condvar,
}

struct State {
    in_flight: usize,
    next_allowed: Option<Instant>,
}

pub(crate) struct Slot<'a> {
    limiter: &'a Limiter,
}

impl Limiter {
    pub fn new(max_in_flight: usize, requests_per_minute: u32) -> Self {
        let max_in_flight = max_in_flight.max(1);
        let rpm = requests_per_minute.max(1);
        Self {
            max_in_flight,
            min_interval: Duration::from_secs_f64(60.0 / rpm as f64),
            state: Mutex::new(State {
                in_flight: 0,
                next_allowed: None,
            }),
            available: Condvar::new(),
        }
    }

    /// Blocks until a slot is free and the pacing interval has elapsed.
    pub fn acquire(&self) -> Slot<'_> {
        let mut state = self.state.lock().expect("limiter lock");
        while state.in_flight >= self.max_in_flight {
            state = self.available.wait(state).expect("limiter wait");
        }
        state.in_flight += 1;
        let now = Instant::now();
        let start_at = match state.next_allowed {
            Some(at) if at > now => at,
            _ => now,
        };
        state.next_allowed = Some(start_at + self.min_interval);
        drop(state);
        let now = Instant::now();
        if start_at > now {
            std::thread::sleep(start_at - now);
        }
        Slot { limiter: self }
    }
}

impl Drop for Slot<'_> {
    fn drop(&mut self) {
        let mut state = self.limiter.state.lock().expect("limiter lock");
        state.in_flight -= 1;
        drop(state);
        self.limiter.available.notify_one();
    }
}
