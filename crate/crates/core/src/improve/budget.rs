use std::time::{Duration, Instant};

/// Stopping rule for open-ended improvers: wall time, an iteration cap, or
/// both (whichever trips first). An empty budget never stops the loop, so
/// only use it with improvers that terminate on their own.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub time: Option<Duration>,
    pub iterations: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn seconds(secs: f64) -> Self {
        Self {
            time: Some(Duration::from_secs_f64(secs.max(0.0))),
            iterations: None,
        }
    }

    pub fn iterations(n: u64) -> Self {
        Self {
            time: None,
            iterations: Some(n),
        }
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.iterations = Some(n);
        self
    }

    /// Drops the wall-clock limit, keeping runs reproducible.
    pub fn without_time(mut self) -> Self {
        self.time = None;
        self
    }

    pub fn start(&self) -> BudgetClock {
        BudgetClock {
            budget: *self,
            started: Instant::now(),
            done: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BudgetClock {
    budget: Budget,
    started: Instant,
    done: u64,
}

impl BudgetClock {
    pub fn exhausted(&self) -> bool {
        self.budget.iterations.is_some_and(|cap| self.done >= cap)
            || self.budget.time.is_some_and(|t| self.started.elapsed() >= t)
    }

    /// Records one iteration.
    pub fn tick(&mut self) {
        self.done += 1;
    }

    pub fn iterations(&self) -> u64 {
        self.done
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }
}
