//! Random expressions for differential tests.

use rand::seq::SliceRandom;
use rand::Rng;

use spanex_core::Var;

use crate::Rgx;

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub vars: Vec<Var>,
    pub letters: Vec<char>,
    pub max_depth: usize,
    /// Whether `@` may appear.
    pub wildcard: bool,
}

impl GenConfig {
    pub fn new(vars: &[&str], letters: &str, max_depth: usize) -> Self {
        GenConfig {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            letters: letters.chars().collect(),
            max_depth,
            wildcard: false,
        }
    }
}

fn leaf<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Rgx {
    let k = rng.gen_range(0..10);
    if k == 0 {
        Rgx::Eps
    } else if k == 1 && cfg.wildcard {
        Rgx::Any
    } else {
        Rgx::Letter(*cfg.letters.choose(rng).expect("non-empty letters"))
    }
}

/// Unrestricted expression over `cfg.vars`.
pub fn random_rgx<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Rgx {
    any(rng, cfg, cfg.max_depth)
}

fn any<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Rgx {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, cfg);
    }
    match rng.gen_range(0..10) {
        0..=2 => Rgx::concat(any(rng, cfg, depth - 1), any(rng, cfg, depth - 1)),
        3..=4 => Rgx::disj(any(rng, cfg, depth - 1), any(rng, cfg, depth - 1)),
        5..=6 => Rgx::star(any(rng, cfg, depth - 1)),
        _ if cfg.vars.is_empty() => leaf(rng, cfg),
        _ => Rgx::capture(cfg.vars.choose(rng).unwrap().clone(), any(rng, cfg, depth - 1)),
    }
}

/// Sequential expression using a subset of `cfg.vars`.
pub fn random_sequential<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Rgx {
    seq(rng, cfg, &cfg.vars, cfg.max_depth)
}

fn seq<R: Rng>(rng: &mut R, cfg: &GenConfig, vars: &[Var], depth: usize) -> Rgx {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, cfg);
    }
    match rng.gen_range(0..10) {
        0..=2 => {
            let (l, r) = split(rng, vars);
            Rgx::concat(seq(rng, cfg, &l, depth - 1), seq(rng, cfg, &r, depth - 1))
        }
        3..=4 => Rgx::disj(seq(rng, cfg, vars, depth - 1), seq(rng, cfg, vars, depth - 1)),
        5 => Rgx::star(seq(rng, cfg, &[], depth - 1)),
        _ if vars.is_empty() => leaf(rng, cfg),
        _ => {
            let i = rng.gen_range(0..vars.len());
            let mut rest = vars.to_vec();
            let x = rest.remove(i);
            Rgx::capture(x, seq(rng, cfg, &rest, depth - 1))
        }
    }
}

/// Functional expression over exactly `cfg.vars`. Depth may exceed
/// `max_depth` when needed to place every variable.
pub fn random_functional<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Rgx {
    func(rng, cfg, &cfg.vars, cfg.max_depth)
}

fn func<R: Rng>(rng: &mut R, cfg: &GenConfig, vars: &[Var], depth: usize) -> Rgx {
    if vars.is_empty() {
        return var_free(rng, cfg, depth);
    }
    let budget = depth.max(1);
    match rng.gen_range(0..10) {
        0..=3 if vars.len() >= 2 || budget > 1 => {
            let (l, r) = split(rng, vars);
            Rgx::concat(func(rng, cfg, &l, budget - 1), func(rng, cfg, &r, budget - 1))
        }
        4..=5 if budget > 1 => Rgx::disj(func(rng, cfg, vars, budget - 1), func(rng, cfg, vars, budget - 1)),
        _ => {
            let i = rng.gen_range(0..vars.len());
            let mut rest = vars.to_vec();
            let x = rest.remove(i);
            Rgx::capture(x, func(rng, cfg, &rest, budget - 1))
        }
    }
}

fn var_free<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Rgx {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, cfg);
    }
    match rng.gen_range(0..3) {
        0 => Rgx::concat(var_free(rng, cfg, depth - 1), var_free(rng, cfg, depth - 1)),
        1 => Rgx::disj(var_free(rng, cfg, depth - 1), var_free(rng, cfg, depth - 1)),
        _ => Rgx::star(var_free(rng, cfg, depth - 1)),
    }
}

fn split<R: Rng>(rng: &mut R, vars: &[Var]) -> (Vec<Var>, Vec<Var>) {
    let mut l = Vec::new();
    let mut r = Vec::new();
    for v in vars {
        if rng.gen_bool(0.5) {
            l.push(v.clone());
        } else {
            r.push(v.clone());
        }
    }
    (l, r)
}
