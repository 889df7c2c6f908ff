use serde::Serialize;

/// Outcome of an exhaustive identity check: how many cases ran, which failed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}
