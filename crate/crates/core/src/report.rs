//! Pass/fail records shared by the verification routines.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub title: String,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn new(title: impl Into<String>) -> Self {
        CheckReport {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Appends every item of `other`, prefixing names with its title.
    pub fn absorb(&mut self, other: CheckReport) {
        for item in other.items {
            self.items.push(CheckItem {
                name: format!("{}: {}", other.title, item.name),
                ..item
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for item in &self.items {
            let mark = if item.passed { "PASS" } else { "FAIL" };
            if item.detail.is_empty() {
                writeln!(f, "  {mark} {}", item.name)?;
            } else {
                writeln!(f, "  {mark} {} ({})", item.name, item.detail)?;
            }
        }
        Ok(())
    }
}
