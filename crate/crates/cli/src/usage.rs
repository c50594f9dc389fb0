use std::fmt;

/// A user-facing command-line mistake, reported with exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// True when the failure is an expected, structured one (bad input, bad
/// parameters, infeasible model) rather than an internal fault.
pub fn is_structured(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<drccp::Error>().is_some() || c.downcast_ref::<UsageError>().is_some()
    })
}
