//! Monte Carlo simulation of the COBRA and BIPS set processes.
//!
//! Both processes evolve a vertex subset one synchronous round at a time.
//! COBRA: every active vertex pushes to sampled neighbours and the new
//! active set is the union of the samples. BIPS: every non-source vertex
//! re-samples neighbours and is infected exactly when it sampled an
//! infected one, while the source stays infected forever.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graphs::{Graph, VertexSet};
use crate::{Error, Result};

/// Branching of the neighbour sampling done by each vertex per round.
///
/// Integer branching draws `k` neighbours with replacement. Fractional
/// branching draws one neighbour always and a second independent one with
/// probability `rho`, for an expected factor of `1 + rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BranchingSpec {
    Integer { k: u32 },
    Fractional { rho: f64 },
}

impl BranchingSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BranchingSpec::Integer { k } if k >= 1 => Ok(()),
            BranchingSpec::Integer { k } => Err(Error::InvalidParameter(format!(
                "integer branching needs k >= 1, got {k}"
            ))),
            BranchingSpec::Fractional { rho } if (0.0..=1.0).contains(&rho) => Ok(()),
            BranchingSpec::Fractional { rho } => Err(Error::InvalidParameter(format!(
                "fractional branching needs 0 <= rho <= 1, got {rho}"
            ))),
        }
    }

    /// Probability that one vertex with contact probability `p` per draw
    /// samples at least one contact.
    pub fn join_probability(&self, p: f64) -> f64 {
        match *self {
            BranchingSpec::Integer { k } => 1.0 - (1.0 - p).powi(k as i32),
            BranchingSpec::Fractional { rho } => (1.0 + rho) * p - rho * p * p,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            BranchingSpec::Integer { k } => format!("k={k}"),
            BranchingSpec::Fractional { rho } => format!("rho={rho}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Cobra,
    Bips,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Cobra => "cobra",
            ProcessKind::Bips => "bips",
        }
    }
}

/// Which optional arrays a run records, and how the cover-time union is
/// counted.
#[derive(Clone, Copy, Debug, Default)]
pub struct RecordOptions {
    pub hitting_times: bool,
    pub trajectory: bool,
    /// Include round 0 in the cover union. The default follows the
    /// definition where the union starts at round 1, so the start vertex
    /// itself must be re-selected before the graph counts as covered.
    pub count_start: bool,
}

/// Per-run outcome. Serializes to one JSON object per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub graph: String,
    pub process: ProcessKind,
    pub start: usize,
    pub branching: BranchingSpec,
    pub steps_run: u64,
    /// Cover time (COBRA) or infection time (BIPS); `None` when the run
    /// was censored at `max_steps`.
    pub cover_or_infection_time: Option<u64>,
    pub censored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_vertex_hitting_time: Option<Vec<Option<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_trajectory: Option<Vec<u64>>,
}

impl TrialRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}

/// Default censoring budget `ceil(200 ln n / (1 - lambda)^3)`.
///
/// Saturates when the spectral gap vanishes (bipartite graphs), leaving
/// the run effectively unbudgeted.
pub fn default_max_steps(n: usize, lambda: f64) -> u64 {
    let gap = 1.0 - lambda;
    if gap <= 0.0 {
        return u64::MAX;
    }
    let steps = (200.0 * (n as f64).ln() / gap.powi(3)).ceil();
    if steps >= u64::MAX as f64 {
        u64::MAX
    } else {
        steps.max(1.0) as u64
    }
}

fn sample_neighbor<R: Rng>(g: &Graph, x: usize, rng: &mut R) -> usize {
    let nb = g.neighbors(x);
    nb[rng.random_range(0..nb.len())] as usize
}

/// One COBRA round: every vertex of `c` pushes to sampled neighbours and
/// the samples coalesce into the next active set.
pub fn cobra_step<R: Rng>(
    g: &Graph,
    c: &VertexSet,
    b: &BranchingSpec,
    rng: &mut R,
) -> Result<VertexSet> {
    if c.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    b.validate()?;
    let mut next = VertexSet::empty(g.vertex_count());
    for x in c.iter() {
        match *b {
            BranchingSpec::Integer { k } => {
                for _ in 0..k {
                    next.insert(sample_neighbor(g, x, rng));
                }
            }
            BranchingSpec::Fractional { rho } => {
                next.insert(sample_neighbor(g, x, rng));
                if rng.random::<f64>() < rho {
                    next.insert(sample_neighbor(g, x, rng));
                }
            }
        }
    }
    Ok(next)
}

/// Runs COBRA from `C_0 = {u}` until the union of active sets over rounds
/// `1..=T` covers the graph, or `max_steps` rounds have elapsed
/// (censored).
pub fn cobra_run(
    g: &Graph,
    u: usize,
    b: &BranchingSpec,
    max_steps: u64,
    seed: u64,
    opts: &RecordOptions,
) -> Result<TrialRecord> {
    let n = g.vertex_count();
    if u >= n {
        return Err(Error::VertexOutOfRange { vertex: u, n });
    }
    b.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut hitting: Vec<Option<u64>> = vec![None; n];
    hitting[u] = Some(0);

    let mut c = VertexSet::singleton(n, u);
    let mut union = VertexSet::empty(n);
    if opts.count_start {
        union.insert(u);
    }
    let mut trajectory = opts.trajectory.then(|| vec![1u64]);

    let mut cover = if union.is_full() { Some(0) } else { None };
    let mut steps_run = 0u64;
    while cover.is_none() && steps_run < max_steps {
        c = cobra_step(g, &c, b, &mut rng)?;
        steps_run += 1;
        for x in c.iter() {
            if hitting[x].is_none() {
                hitting[x] = Some(steps_run);
            }
        }
        union.union_with(&c);
        if let Some(t) = &mut trajectory {
            t.push(c.len() as u64);
        }
        if union.is_full() {
            cover = Some(steps_run);
        }
    }

    Ok(TrialRecord {
        seed,
        graph: format!("n{}r{}", n, g.degree()),
        process: ProcessKind::Cobra,
        start: u,
        branching: *b,
        steps_run,
        cover_or_infection_time: cover,
        censored: cover.is_none(),
        per_vertex_hitting_time: opts.hitting_times.then_some(hitting),
        size_trajectory: trajectory,
    })
}

/// One BIPS round: the source `v` stays infected; every other vertex
/// re-samples neighbours and is infected exactly when a sample lies in
/// the previous infected set.
pub fn bips_step<R: Rng>(
    g: &Graph,
    a: &VertexSet,
    v: usize,
    b: &BranchingSpec,
    rng: &mut R,
) -> Result<VertexSet> {
    if !a.contains(v) {
        return Err(Error::SourceNotInfected(v));
    }
    b.validate()?;
    let n = g.vertex_count();
    let mut next = VertexSet::empty(n);
    next.insert(v);
    for u in 0..n {
        if u == v {
            continue;
        }
        let hit = match *b {
            BranchingSpec::Integer { k } => {
                let mut hit = false;
                for _ in 0..k {
                    hit |= a.contains(sample_neighbor(g, u, rng));
                }
                hit
            }
            BranchingSpec::Fractional { rho } => {
                let mut hit = a.contains(sample_neighbor(g, u, rng));
                if rng.random::<f64>() < rho {
                    hit |= a.contains(sample_neighbor(g, u, rng));
                }
                hit
            }
        };
        if hit {
            next.insert(u);
        }
    }
    Ok(next)
}

/// Runs BIPS from `A_0 = {v}` until the whole graph is infected or
/// `max_steps` rounds have elapsed (censored). The full set is absorbing.
pub fn bips_run(
    g: &Graph,
    v: usize,
    b: &BranchingSpec,
    max_steps: u64,
    seed: u64,
    opts: &RecordOptions,
) -> Result<TrialRecord> {
    let n = g.vertex_count();
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    b.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut a = VertexSet::singleton(n, v);
    let mut trajectory = opts.trajectory.then(|| vec![1u64]);
    let mut infec = if a.is_full() { Some(0) } else { None };
    let mut steps_run = 0u64;
    while infec.is_none() && steps_run < max_steps {
        a = bips_step(g, &a, v, b, &mut rng)?;
        steps_run += 1;
        if let Some(t) = &mut trajectory {
            t.push(a.len() as u64);
        }
        if a.is_full() {
            infec = Some(steps_run);
        }
    }

    Ok(TrialRecord {
        seed,
        graph: format!("n{}r{}", n, g.degree()),
        process: ProcessKind::Bips,
        start: v,
        branching: *b,
        steps_run,
        cover_or_infection_time: infec,
        censored: infec.is_none(),
        per_vertex_hitting_time: None,
        size_trajectory: trajectory,
    })
}
