//! Pass/fail reports shared by the verification routines.

use serde::Serialize;

/// Outcome of one exact identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub label: String,
    pub holds: bool,
    /// First offending (row, col) entry when the identity fails.
    pub witness: Option<(usize, usize)>,
}

impl RelationCheck {
    pub fn new(label: impl Into<String>, witness: Option<(usize, usize)>) -> Self {
        RelationCheck {
            label: label.into(),
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub k: u32,
    pub checks: Vec<RelationCheck>,
}

impl Report {
    pub fn new(k: u32) -> Self {
        Report { k, checks: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, witness: Option<(usize, usize)>) {
        self.checks.push(RelationCheck::new(label, witness));
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, label: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.label == label)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}
