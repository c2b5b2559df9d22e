//! Machine-readable verification reports.
//!
//! Every top-level check produces a [`VerificationReport`]: an ordered list
//! of named pass/fail items, each optionally carrying a [`Witness`] that
//! pins down the failure (offending index tuple, prime, graded degree,
//! kernel vector). Reports aggregate deterministically: items appear in the
//! order the checks ran, never in worker-completion order.

use serde::Serialize;

/// Evidence attached to a verdict. Only the relevant fields are set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graded_degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homological_index: Option<usize>,
    /// A polynomial, cycle or kernel vector rendered in the text grammar.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    /// A scalar value (for example the section denominator).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn note(s: impl Into<String>) -> Self {
        Witness {
            note: Some(s.into()),
            ..Default::default()
        }
    }
}

/// One named check with its verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// An ordered collection of check items; passes iff every item passes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub items: Vec<CheckItem>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            items: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, item: CheckItem) {
        self.passed &= item.pass;
        self.items.push(item);
    }

    pub fn pass(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.push(CheckItem {
            name: name.into(),
            pass: true,
            detail: non_empty(detail.into()),
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>, witness: Witness) {
        self.push(CheckItem {
            name: name.into(),
            pass: false,
            detail: non_empty(detail.into()),
            witness: Some(witness),
        });
    }

    pub fn record(
        &mut self,
        name: impl Into<String>,
        ok: bool,
        detail: impl Into<String>,
        witness: impl FnOnce() -> Witness,
    ) {
        if ok {
            self.pass(name, detail);
        } else {
            self.fail(name, detail, witness());
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for item in other.items {
            self.push(item);
        }
    }

    /// First failing item, if any.
    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.pass)
    }
}

fn non_empty(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_aggregates_verdicts() {
        let mut r = VerificationReport::new();
        r.pass("a", "fine");
        assert!(r.passed);
        r.fail("b", "broke", Witness::note("boom"));
        assert!(!r.passed);
        assert_eq!(r.first_failure().unwrap().name, "b");
        let mut outer = VerificationReport::new();
        outer.merge(r);
        assert!(!outer.passed);
        assert_eq!(outer.items.len(), 2);
    }
}
