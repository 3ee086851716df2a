//! Random search for ensembles whose midrange cost exceeds the pairwise
//! lower bound `l`.

use super::{
    bounds, contact_lower_bound, feasibility_at, oracle_min_cost_2x2, solve, MidrangeProblem,
    SolverOptions,
};
use super::{check_ensemble, Verdict, Whitened};
use crate::random::{random_spd, seeded};
use crate::{Error, Result, SpdMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSearchOptions {
    pub dim: usize,
    pub count: usize,
    pub trials: usize,
    pub seed: u64,
    /// Required distance between the best cost found and `l`.
    pub gap_margin: f64,
    /// Grid resolution and refinement rounds for the 2×2 brute-force search.
    pub oracle_resolution: f64,
    pub oracle_rounds: usize,
    pub solver: SolverOptions,
}

impl Default for GapSearchOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            count: 3,
            trials: 200,
            seed: 0,
            gap_margin: 1e-3,
            oracle_resolution: 0.05,
            oracle_rounds: 30,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GapInstance {
    pub ys: Vec<SpdMatrix>,
    /// Half-diameter lower bound.
    pub lower: f64,
    /// Lowest cost found for the ensemble (brute force for 2×2, the solver
    /// otherwise); an upper bound on the optimum.
    pub best_cost: f64,
    /// `best_cost − lower`.
    pub gap: f64,
    /// Radius at which the feasibility check was run, `l + 10·eps_feas`.
    pub tested_t: f64,
    /// Best proven lower bound on the optimum: from the check's multipliers
    /// or from the contacts of the best point. Above `tested_t`, it proves
    /// the ensemble is a gap instance.
    pub dual_bound: Option<f64>,
    /// Search seed and trial index; for an examined ensemble, the options'
    /// seed and trial 0.
    pub seed: u64,
    pub trial: usize,
}

/// Seed from which trial `trial` of a search started at `seed` is drawn.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// The ensemble examined by trial `trial` of a search started at `seed`.
pub fn gap_trial_ensemble(
    dim: usize,
    count: usize,
    seed: u64,
    trial: usize,
) -> Result<Vec<SpdMatrix>> {
    let mut rng = seeded(trial_seed(seed, trial));
    (0..count).map(|_| random_spd(&mut rng, dim)).collect()
}

fn check_options(options: &GapSearchOptions) -> Result<()> {
    if options.dim == 0 || options.count == 0 {
        return Err(Error::Domain(
            "dimension and ensemble size must be positive".into(),
        ));
    }
    if options.count < 3 {
        return Err(Error::Domain(format!(
            "ensembles of {} matrices always attain the lower bound",
            options.count
        )));
    }
    if !(options.gap_margin > 0.0) {
        return Err(Error::Domain(format!(
            "gap margin {} must be positive",
            options.gap_margin
        )));
    }
    Ok(())
}

/// Returns the first trial ensemble that the feasibility check rejects at
/// `t = l + 10·eps_feas` and whose best cost found is at least
/// `l + gap_margin`.
pub fn find_gap_instance(options: &GapSearchOptions) -> Result<GapInstance> {
    check_options(options)?;
    for trial in 0..options.trials {
        let ys = gap_trial_ensemble(options.dim, options.count, options.seed, trial)?;
        if let Some(mut found) = examine(ys, options)? {
            found.seed = options.seed;
            found.trial = trial;
            return Ok(found);
        }
    }
    Err(Error::SearchExhausted {
        trials: options.trials,
    })
}

/// Applies the search predicate to a given ensemble; `dim`, `count`,
/// `trials` and `seed` of `options` are ignored. The ensemble needs at
/// least three matrices.
pub fn examine_gap_candidate(
    ys: Vec<SpdMatrix>,
    options: &GapSearchOptions,
) -> Result<Option<GapInstance>> {
    check_ensemble(&ys)?;
    check_options(&GapSearchOptions {
        dim: ys[0].dim(),
        count: ys.len(),
        ..*options
    })?;
    examine(ys, options)
}

fn examine(ys: Vec<SpdMatrix>, options: &GapSearchOptions) -> Result<Option<GapInstance>> {
    let solver = options.solver;
    let lower = bounds(&ys)?.lower;
    let tested_t = lower + solver.eps_slack();
    let report = feasibility_at(&Whitened::new(&ys)?, lower, tested_t, &solver)?;
    if report.verdict != Verdict::Infeasible {
        return Ok(None);
    }
    let (best_cost, best_x) = if ys[0].dim() == 2 {
        let o = oracle_min_cost_2x2(&ys, options.oracle_resolution, options.oracle_rounds)?;
        (o.cost, o.x)
    } else {
        let s = solve(&MidrangeProblem::new(ys.clone(), solver)?)?;
        (s.t_star, s.x_star)
    };
    let gap = best_cost - lower;
    if gap < options.gap_margin {
        return Ok(None);
    }
    let contact = contact_lower_bound(&best_x, &ys)?;
    let dual_bound = match (report.dual_bound, contact) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    Ok(Some(GapInstance {
        ys,
        lower,
        best_cost,
        gap,
        tested_t,
        dual_bound,
        seed: options.seed,
        trial: 0,
    }))
}
