//! Measured-versus-bound records shared by every checking operation.

use serde::Serialize;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub check: String,
    pub measured: f64,
    pub bound: f64,
    /// bound - measured for upper bounds, measured - bound for lower bounds.
    pub margin: f64,
    pub status: Status,
    pub note: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BoundReport {
    pub scope: String,
    pub records: Vec<BoundRecord>,
}

impl BoundReport {
    pub fn new(scope: impl Into<String>) -> Self {
        BoundReport {
            scope: scope.into(),
            records: Vec::new(),
        }
    }

    /// Records `measured <= bound + slack`.
    pub fn le(&mut self, check: impl Into<String>, measured: f64, bound: f64, slack: f64) -> bool {
        let ok = measured <= bound + slack;
        self.records.push(BoundRecord {
            check: check.into(),
            measured,
            bound,
            margin: bound - measured,
            status: if ok { Status::Pass } else { Status::Fail },
            note: String::new(),
        });
        ok
    }

    /// Records `measured >= bound - slack`.
    pub fn ge(&mut self, check: impl Into<String>, measured: f64, bound: f64, slack: f64) -> bool {
        let ok = measured >= bound - slack;
        self.records.push(BoundRecord {
            check: check.into(),
            measured,
            bound,
            margin: measured - bound,
            status: if ok { Status::Pass } else { Status::Fail },
            note: String::new(),
        });
        ok
    }

    pub fn skip(&mut self, check: impl Into<String>, why: impl Into<String>) {
        self.records.push(BoundRecord {
            check: check.into(),
            measured: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
            status: Status::Skipped,
            note: why.into(),
        });
    }

    /// Attaches a note to the most recent record.
    pub fn note(&mut self, note: impl Into<String>) {
        if let Some(r) = self.records.last_mut() {
            r.note = note.into();
        }
    }

    pub fn extend(&mut self, other: BoundReport) {
        self.records.extend(other.records);
    }

    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&BoundRecord> {
        self.records
            .iter()
            .filter(|r| r.status == Status::Fail)
            .collect()
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    /// Worst (smallest) margin among checked records.
    pub fn min_margin(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.status != Status::Skipped)
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "[{}] {} pass, {} fail, {} skipped",
            self.scope,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        for r in self.records.iter().filter(|r| r.status == Status::Fail) {
            let _ = writeln!(
                s,
                "  FAIL {}: measured {:.6e} bound {:.6e} {}",
                r.check, r.measured, r.bound, r.note
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_and_status() {
        let mut r = BoundReport::new("t");
        assert!(r.le("a", 1.0, 2.0, 0.0));
        assert!(!r.ge("b", 1.0, 2.0, 0.0));
        r.skip("c", "assumption");
        assert!(!r.all_ok());
        assert_eq!(r.count(Status::Skipped), 1);
        assert_eq!(r.min_margin(), -1.0);
        assert!(r.summary_table().contains("FAIL b"));
    }
}
