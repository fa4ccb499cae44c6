//! One entry point over every solver.

use std::time::Instant;

use crate::cycle_cover::cycle_cover_solve;
use crate::error::Result;
use crate::greedy::{greedy, GreedyOptions, Start};
use crate::local_search::{local_search_solve, LocalSearchOptions};
use crate::model::{Algorithm, Discount, Graph, SolveReport};
use crate::oracle::{brute_force_opt_with, OracleConfig};
use crate::tree_exact::{tree_opt_with, RootedTree, TreeExactConfig, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub start: Start,
    /// Local-search subset size; `None` means `min(2k, n)`.
    pub ell: Option<usize>,
    pub delta: f64,
    pub brute_force_limit: usize,
    /// Tree-exact work budget.
    pub budget: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            start: Start::Auto,
            ell: None,
            delta: 0.0,
            brute_force_limit: OracleConfig::default().max_vertices,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Runs `algo`; tree-exact roots the tree at vertex 1.
pub fn solve(algo: Algorithm, g: &Graph, f: &Discount, opts: &SolveOptions) -> Result<SolveReport> {
    match algo {
        Algorithm::Greedy => greedy(
            g,
            f,
            &GreedyOptions {
                start: opts.start.clone(),
                ..GreedyOptions::default()
            },
        ),
        Algorithm::CycleCover => cycle_cover_solve(g, f),
        Algorithm::LocalSearch => {
            let ell = opts.ell.unwrap_or_else(|| (2 * f.k()).min(g.n()));
            local_search_solve(g, f, &LocalSearchOptions::new(ell, opts.delta))
        }
        Algorithm::TreeExact => {
            let t = RootedTree::new(g, 1)?;
            tree_opt_with(&t, f, &TreeExactConfig { budget: opts.budget })
        }
        Algorithm::BruteForce => {
            let started = Instant::now();
            let cfg = OracleConfig {
                max_vertices: opts.brute_force_limit,
                ..OracleConfig::default()
            };
            let (layout, _) = brute_force_opt_with(g, f, &cfg)?;
            Ok(SolveReport::new(Algorithm::BruteForce, g, f, layout)?
                .with_stat("millis", started.elapsed().as_millis() as u64))
        }
    }
}
