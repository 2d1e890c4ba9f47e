use std::fmt;

use spanex_analysis::AnalysisError;
use spanex_core::BudgetExceeded;
use spanex_eval::EvalError;
use spanex_rgx::ParseError;
use spanex_rules::RuleError;
use spanex_va::VaError;

pub const OTHER: u8 = 1;
pub const SYNTAX: u8 = 2;
pub const FRAGMENT: u8 = 3;
pub const EMPTY: u8 = 4;
pub const BUDGET: u8 = 5;

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(OTHER, e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(SYNTAX, e.to_string())
    }
}

impl From<BudgetExceeded> for Failure {
    fn from(e: BudgetExceeded) -> Self {
        Failure::new(BUDGET, e.to_string())
    }
}

impl From<VaError> for Failure {
    fn from(e: VaError) -> Self {
        let code = match e {
            VaError::Malformed(_) => SYNTAX,
            VaError::NonHierarchical(_) => FRAGMENT,
            VaError::Budget(_) => BUDGET,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::NotSequential => FRAGMENT,
            EvalError::Constraint(_) => OTHER,
            EvalError::Budget(_) => BUDGET,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RuleError> for Failure {
    fn from(e: RuleError) -> Self {
        let code = match &e {
            RuleError::Syntax { .. } | RuleError::NotSpanRgx(_) | RuleError::SecondRoot(_) => SYNTAX,
            RuleError::Budget(_) => BUDGET,
            RuleError::Va(v) => return v.clone().into(),
            RuleError::Constraint(_) => OTHER,
            _ => FRAGMENT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::NotSequential | AnalysisError::Precondition(_) => Failure::new(FRAGMENT, e.to_string()),
            AnalysisError::MalformedClause(_) => Failure::new(SYNTAX, e.to_string()),
            AnalysisError::Budget(b) => b.into(),
            AnalysisError::Va(v) => v.into(),
            AnalysisError::Rule(r) => r.into(),
        }
    }
}
