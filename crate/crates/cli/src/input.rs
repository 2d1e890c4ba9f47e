use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, ValueEnum};
use spanex_core::{Alphabet, Document};
use spanex_rgx::{parse_rgx, parse_rgx_over, Rgx};
use spanex_rules::{parse_rule, ExtractionRule};
use spanex_va::Va;

use crate::error::{Failure, FRAGMENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Rule files end in `.rule` or start with `doc:`, automata are JSON,
    /// anything else is an expression.
    Auto,
    Rgx,
    Rule,
    Automaton,
}

/// Where the spanner comes from, and how to read it.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["expr", "file"])))]
pub struct SourceArgs {
    /// Inline expression, rule or automaton.
    #[arg(short, long)]
    pub expr: Option<String>,
    /// File holding the expression, rule or automaton.
    #[arg(short, long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Auto)]
    pub kind: Kind,
    /// Declared alphabet, as the list of its symbols. Defaults to the
    /// document's symbols where there is a document. Rules need it to tell
    /// words from variable mentions.
    #[arg(long)]
    pub alphabet: Option<String>,
}

pub enum Source {
    Rgx(String),
    Rule(String),
    Automaton(Va),
}

impl SourceArgs {
    pub fn declared(&self) -> Option<Alphabet> {
        self.alphabet.as_ref().map(|s| unescape(s).chars().collect())
    }

    pub fn load(&self) -> Result<Source, Failure> {
        let (text, path) = match (&self.expr, &self.file) {
            (Some(e), _) => (e.clone(), None),
            (None, Some(p)) => (std::fs::read_to_string(p)?, Some(p.as_path())),
            (None, None) => unreachable!("clap requires a source"),
        };
        classify(text, path, self.kind)
    }
}

/// `\n`, `\t` and `\\` in alphabet declarations.
fn unescape(s: &str) -> String {
    s.replace("\\n", "\n").replace("\\t", "\t").replace("\\\\", "\\")
}

pub fn classify(text: String, path: Option<&Path>, kind: Kind) -> Result<Source, Failure> {
    let kind = match kind {
        Kind::Auto => {
            let ext = path.and_then(|p| p.extension()).and_then(|e| e.to_str());
            let trimmed = text.trim_start();
            if ext == Some("json") || trimmed.starts_with('{') {
                Kind::Automaton
            } else if ext == Some("rule") || trimmed.starts_with("doc:") {
                Kind::Rule
            } else {
                Kind::Rgx
            }
        }
        k => k,
    };
    Ok(match kind {
        Kind::Automaton => {
            let (a, warnings) = Va::from_json(&text)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Source::Automaton(a)
        }
        Kind::Rule => Source::Rule(text),
        _ => Source::Rgx(text),
    })
}

pub fn rgx(text: &str, alphabet: Option<&Alphabet>) -> Result<Rgx, Failure> {
    Ok(match alphabet {
        Some(sigma) => parse_rgx_over(text, sigma)?,
        None => parse_rgx(text)?,
    })
}

pub fn rule(text: &str, alphabet: Option<&Alphabet>) -> Result<ExtractionRule, Failure> {
    Ok(parse_rule(text, alphabet.unwrap_or(&Alphabet::new()))?)
}

/// Documents are read whole; `-` is standard input.
pub fn document(path: &Path) -> Result<Document, Failure> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::new(crate::error::OTHER, format!("{}: {e}", path.display())))?
    };
    Ok(Document::new(&text))
}

pub fn not_supported(what: &str) -> Failure {
    Failure::new(FRAGMENT, format!("{what} is not supported for this input kind"))
}
