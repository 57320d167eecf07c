//! Named pass/fail records shared by the verification routines and the CLI.

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// The relation being tested, in plain notation.
    pub relation: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, relation: &str, passed: bool, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            relation: relation.to_owned(),
            passed,
            measured,
            tolerance,
            detail: String::new(),
        }
    }

    /// Passes iff `measured <= tolerance`.
    pub fn at_most(name: &str, relation: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(name, relation, measured <= tolerance, measured, tolerance)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Failed check carrying an error message.
    pub fn error(name: &str, relation: &str, err: &dyn std::fmt::Display) -> Self {
        Self::new(name, relation, false, f64::NAN, f64::NAN).with_detail(err.to_string())
    }
}
