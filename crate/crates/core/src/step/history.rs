use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{transfer, FeSpace, Field};

/// One accepted time level.
#[derive(Debug, Clone)]
pub struct Record {
    pub t: f64,
    /// Step that led to this level (zero for the initial record).
    pub tau: f64,
    pub m: Field,
    pub v: Field,
}

/// Recent time levels, oldest first, all on one space.
#[derive(Debug, Clone)]
pub struct TimeHistory {
    records: VecDeque<Record>,
    capacity: usize,
}

impl TimeHistory {
    pub fn new(capacity: usize, initial: Record) -> Self {
        assert!(capacity >= 1);
        let mut records = VecDeque::with_capacity(capacity);
        records.push_back(initial);
        TimeHistory { records, capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        self.newest().m.space()
    }

    /// `back(0)` is the newest record.
    pub fn back(&self, j: usize) -> &Record {
        &self.records[self.records.len() - 1 - j]
    }

    pub fn newest(&self) -> &Record {
        self.back(0)
    }

    pub fn records(&self) -> impl Iterator<Item = &Record> {
        self.records.iter()
    }

    pub fn push(&mut self, rec: Record) -> Result<()> {
        let last = self.newest();
        if !(rec.t > last.t) {
            return Err(Error::StepFailure(format!("time {} does not advance past {}", rec.t, last.t)));
        }
        if !rec.m.same_space(&last.m) || !rec.v.same_space(&last.m) {
            return Err(Error::StepFailure("history record lives on a different space".into()));
        }
        if self.records.len() == self.capacity {
            self.records.pop_front();
        }
        self.records.push_back(rec);
        Ok(())
    }

    /// The last `k` step sizes, oldest first.
    pub fn steps(&self, k: usize) -> Vec<f64> {
        let n = self.records.len();
        let k = k.min(n - 1);
        (0..k).rev().map(|j| self.records[n - 1 - j].tau).collect()
    }

    /// Moves every record onto `space`.
    pub fn transfer_to(&mut self, space: &Arc<FeSpace>) -> Result<()> {
        if Arc::ptr_eq(self.space(), space) {
            return Ok(());
        }
        for r in self.records.iter_mut() {
            r.m = transfer(&r.m, space)?;
            r.v = transfer(&r.v, space)?;
        }
        Ok(())
    }
}
