//! Verification ledgers: one row per checked identity with a pass/fail
//! status and, on failure, a concrete witness.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    /// What identity was checked, e.g. `"sigma-alpha"`.
    pub tag: String,
    /// Space-separated `key=value` pairs; keys `x`, `y`, `z` name index
    /// nodes, `n`, `m`, `i` name levels.
    pub location: String,
    pub status: Status,
    /// Counterexample or reason, empty on success.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub witness: String,
}

impl LedgerRow {
    /// Whether one of the node keys of the location equals `node`.
    pub fn mentions_node(&self, node: usize) -> bool {
        self.location.split_whitespace().any(|pair| match pair.split_once('=') {
            Some(("x" | "y" | "z", v)) => v.parse() == Ok(node),
            _ => false,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationLedger {
    pub rows: Vec<LedgerRow>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCounts {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl VerificationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, tag: impl Into<String>, location: impl Into<String>, result: Result<(), String>) {
        let (status, witness) = match result {
            Ok(()) => (Status::Pass, String::new()),
            Err(w) => (Status::Fail, w),
        };
        self.rows.push(LedgerRow {
            tag: tag.into(),
            location: location.into(),
            status,
            witness,
        });
    }

    pub fn skip(&mut self, tag: impl Into<String>, location: impl Into<String>, reason: impl Into<String>) {
        self.rows.push(LedgerRow {
            tag: tag.into(),
            location: location.into(),
            status: Status::Skipped,
            witness: reason.into(),
        });
    }

    /// A passing row carrying a remark.
    pub fn note(&mut self, tag: impl Into<String>, location: impl Into<String>, remark: impl Into<String>) {
        self.rows.push(LedgerRow {
            tag: tag.into(),
            location: location.into(),
            status: Status::Pass,
            witness: remark.into(),
        });
    }

    /// Records equality of two tables, naming the first differing element.
    pub fn check_equal(&mut self, tag: impl Into<String>, location: impl Into<String>, left: &[usize], right: &[usize]) {
        self.record(tag, location, crate::diagram::tables_agree(left, right));
    }

    pub fn extend(&mut self, other: VerificationLedger) {
        self.rows.extend(other.rows);
    }

    pub fn counts(&self) -> LedgerCounts {
        let mut c = LedgerCounts::default();
        for row in &self.rows {
            match row.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Skipped => c.skipped += 1,
            }
        }
        c
    }

    pub fn is_clean(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn rows_tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a LedgerRow> + 'a {
        self.rows.iter().filter(move |r| r.tag == tag)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }
}

impl fmt::Display for VerificationLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            write!(f, "{} {} [{}]", row.status, row.tag, row.location)?;
            if !row.witness.is_empty() {
                write!(f, ": {}", row.witness)?;
            }
            writeln!(f)?;
        }
        let c = self.counts();
        write!(f, "{} passed, {} failed, {} skipped", c.pass, c.fail, c.skipped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_text() {
        let mut l = VerificationLedger::new();
        l.check_equal("t", "x=1", &[0, 1], &[0, 1]);
        l.check_equal("t", "x=2", &[0, 1], &[0, 0]);
        l.skip("u", "x=3", "not applicable");
        assert_eq!(l.counts(), LedgerCounts { pass: 1, fail: 1, skipped: 1 });
        assert!(!l.is_clean());
        let text = l.to_string();
        assert!(text.contains("FAIL t [x=2]: differ at element 1: 1 vs 0"));
        let back: VerificationLedger = serde_json::from_str(&l.to_json()).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn node_mentions_are_tokens() {
        let row = LedgerRow {
            tag: "t".into(),
            location: "x=12 y=3 n=1".into(),
            status: Status::Pass,
            witness: String::new(),
        };
        assert!(row.mentions_node(12));
        assert!(row.mentions_node(3));
        assert!(!row.mentions_node(1));
        assert!(!row.mentions_node(2));
    }
}
