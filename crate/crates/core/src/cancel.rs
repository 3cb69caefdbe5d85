use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Cooperative cancellation: a shared flag plus an optional deadline.
#[derive(Clone, Debug, Default)]
pub struct CancelToken {
    flag: Arc<AtomicBool>,
    deadline: Option<Instant>,
}

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        CancelToken {
            flag: Arc::default(),
            deadline: Instant::now().checked_add(timeout),
        }
    }

    /// Same flag, new deadline.
    pub fn deadline(&self, deadline: Option<Instant>) -> Self {
        CancelToken {
            flag: self.flag.clone(),
            deadline,
        }
    }

    pub fn cancel(&self) {
        self.flag.store(true, Ordering::Relaxed);
    }

    /// The shared flag, for signal handlers.
    pub fn flag(&self) -> Arc<AtomicBool> {
        self.flag.clone()
    }

    pub fn is_flagged(&self) -> bool {
        self.flag.load(Ordering::Relaxed)
    }

    pub fn is_cancelled(&self) -> bool {
        self.is_flagged() || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}
