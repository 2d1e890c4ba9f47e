use std::fmt;

/// Size limits for the exponential procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Longest document an oracle accepts.
    pub max_doc_len: usize,
    /// Largest variable count.
    pub max_vars: usize,
    /// Cap on explored configurations, product states or produced items.
    pub max_items: usize,
}

impl Budget {
    /// Limits for the brute-force oracles: `|d| <= 12`, `|var| <= 4`.
    pub const fn oracle() -> Self {
        Budget { max_doc_len: 12, max_vars: 4, max_items: 2_000_000 }
    }

    /// Limits for the parameterised evaluation: `|var| <= 8`.
    pub const fn fpt() -> Self {
        Budget { max_doc_len: usize::MAX, max_vars: 8, max_items: 20_000_000 }
    }

    /// Limits for explicit state-space searches.
    pub const fn search() -> Self {
        Budget { max_doc_len: usize::MAX, max_vars: 128, max_items: 2_000_000 }
    }

    pub const fn unlimited() -> Self {
        Budget { max_doc_len: usize::MAX, max_vars: usize::MAX, max_items: usize::MAX }
    }

    pub fn with_vars(mut self, max_vars: usize) -> Self {
        self.max_vars = max_vars;
        self
    }

    pub fn with_doc_len(mut self, max_doc_len: usize) -> Self {
        self.max_doc_len = max_doc_len;
        self
    }

    pub fn with_items(mut self, max_items: usize) -> Self {
        self.max_items = max_items;
        self
    }

    pub fn check_doc(&self, len: usize) -> Result<(), BudgetExceeded> {
        check("document length", self.max_doc_len, len)
    }

    pub fn check_vars(&self, n: usize) -> Result<(), BudgetExceeded> {
        check("variable count", self.max_vars, n)
    }

    pub fn check_items(&self, n: usize) -> Result<(), BudgetExceeded> {
        check("explored items", self.max_items, n)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::oracle()
    }
}

fn check(what: &'static str, limit: usize, actual: usize) -> Result<(), BudgetExceeded> {
    if actual > limit {
        Err(BudgetExceeded { what, limit, actual })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub limit: usize,
    pub actual: usize,
}

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "budget exceeded: {} {} > {}", self.what, self.actual, self.limit)
    }
}

impl std::error::Error for BudgetExceeded {}
