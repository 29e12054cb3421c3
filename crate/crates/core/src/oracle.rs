//! Brute-force verifiers for desk-scale instances.
//!
//! Nothing here reuses the planner's search code: distances come from a
//! local BFS, matchings from permutation enumeration and makespans from a
//! breadth-first search over joint agent positions.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{Instance, VertexId};
use crate::pathset::{order_paths_lemma6, Path, PathSet, PathSetError};
use crate::scheduler::{check_feasible, collision_check, compress, metrics, Collision, FeasibilityError, Schedule, ScheduleError};

/// Agent limit for exhaustive matching enumeration.
pub const MATCHING_LIMIT: usize = 8;
/// Agent limit for joint-state search.
pub const JOINT_AGENT_LIMIT: usize = 3;
/// Vertex limit for joint-state search.
pub const JOINT_VERTEX_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} is {got}, oracle limit is {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error(transparent)]
    PathSet(#[from] PathSetError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn ensure(what: &'static str, got: usize, limit: usize) -> Result<(), OracleError> {
    if got > limit {
        return Err(OracleError::TooLarge { what, got, limit });
    }
    Ok(())
}

fn bfs(instance: &Instance, source: VertexId) -> Vec<usize> {
    let g = instance.graph();
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn start_goal_distances(instance: &Instance) -> Vec<Vec<usize>> {
    instance
        .starts()
        .iter()
        .map(|&s| {
            let d = bfs(instance, s);
            instance.goals().iter().map(|&g| d[g]).collect()
        })
        .collect()
}

/// Minimum over all `n!` start-to-goal matchings of summed shortest distances.
pub fn oracle_min_total_distance(instance: &Instance) -> Result<usize, OracleError> {
    let n = instance.agent_count();
    ensure("agent count", n, MATCHING_LIMIT)?;
    let d = start_goal_distances(instance);
    Ok((0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(i, &j)| d[i][j]).sum())
        .min()
        .expect("at least one agent"))
}

/// Largest distance from a start to its nearest goal. No schedule can finish
/// sooner.
pub fn nearest_goal_lower_bound(instance: &Instance) -> usize {
    start_goal_distances(instance)
        .iter()
        .map(|row| row.iter().copied().min().expect("at least one goal"))
        .max()
        .expect("at least one agent")
}

fn check_joint_limits(instance: &Instance) -> Result<(), OracleError> {
    ensure("agent count", instance.agent_count(), JOINT_AGENT_LIMIT)?;
    ensure("vertex count", instance.graph().vertex_count(), JOINT_VERTEX_LIMIT)
}

/// Sorted agent positions; agents are indistinguishable, so only the set of
/// occupied vertices matters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointState(Vec<VertexId>);

impl JointState {
    fn new(mut positions: Vec<VertexId>) -> Self {
        positions.sort_unstable();
        Self(positions)
    }

    pub fn positions(&self) -> &[VertexId] {
        &self.0
    }

    /// Every collision-free synchronous step, with the number of agents
    /// that moved. Holds are allowed, follow moves are allowed, meets and
    /// swaps are not.
    fn successors(&self, instance: &Instance) -> Vec<(JointState, usize)> {
        let g = instance.graph();
        let cur = &self.0;
        let options: Vec<Vec<VertexId>> =
            cur.iter().map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect()).collect();
        let mut out = Vec::new();
        for next in options.iter().map(|o| o.iter().copied()).multi_cartesian_product() {
            let meet = (0..next.len()).tuple_combinations().any(|(a, b)| next[a] == next[b]);
            let swap = (0..next.len())
                .tuple_combinations()
                .any(|(a, b)| next[a] != cur[a] && next[a] == cur[b] && next[b] == cur[a]);
            if meet || swap {
                continue;
            }
            let moved = next.iter().zip(cur).filter(|(a, b)| a != b).count();
            out.push((JointState::new(next), moved));
        }
        out
    }
}

/// Fewest steps for any collision-free synchronous evolution to cover the
/// goal set, ignoring distance.
pub fn oracle_min_makespan(instance: &Instance) -> Result<usize, OracleError> {
    check_joint_limits(instance)?;
    let start = JointState::new(instance.starts().to_vec());
    let goal = JointState::new(instance.goals().to_vec());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, t)) = queue.pop_front() {
        if state == goal {
            return Ok(t);
        }
        for (next, _) in state.successors(instance) {
            if seen.insert(next.clone()) {
                queue.push_back((next, t + 1));
            }
        }
    }
    unreachable!("a connected graph always admits a sequential schedule")
}

/// Both ends of the makespan/distance trade-off for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeoffProfile {
    /// Fewest steps of any collision-free schedule.
    pub min_makespan: usize,
    /// Fewest moves among schedules that finish in `min_makespan` steps.
    pub distance_at_min_makespan: usize,
    /// Fewest moves of any schedule.
    pub min_distance: usize,
    /// Fewest steps among schedules that use only `min_distance` moves.
    pub makespan_at_min_distance: usize,
}

impl TradeoffProfile {
    /// True when no distance-optimal schedule is also time-optimal.
    pub fn conflicts(&self) -> bool {
        self.min_makespan < self.makespan_at_min_distance
    }
}

/// Layered joint-state search keeping, per step, the fewest moves that reach
/// each joint state.
pub fn tradeoff_profile(instance: &Instance) -> Result<TradeoffProfile, OracleError> {
    check_joint_limits(instance)?;
    let min_distance = oracle_min_total_distance(instance)?;
    let start = JointState::new(instance.starts().to_vec());
    let goal = JointState::new(instance.goals().to_vec());
    let mut layer: HashMap<JointState, usize> = HashMap::from([(start, 0)]);
    let mut fastest = None;
    for t in 0.. {
        if let Some(&moves) = layer.get(&goal) {
            let (min_makespan, distance_at_min_makespan) = *fastest.get_or_insert((t, moves));
            if moves == min_distance {
                return Ok(TradeoffProfile {
                    min_makespan,
                    distance_at_min_makespan,
                    min_distance,
                    makespan_at_min_distance: t,
                });
            }
        }
        let mut next_layer: HashMap<JointState, usize> = HashMap::with_capacity(layer.len());
        for (state, &moves) in &layer {
            for (next, moved) in state.successors(instance) {
                let total = moves + moved;
                next_layer.entry(next).and_modify(|m| *m = (*m).min(total)).or_insert(total);
            }
        }
        layer = next_layer;
    }
    unreachable!()
}

/// All shortest paths between two vertices, in lexicographic order.
pub fn all_shortest_paths(instance: &Instance, from: VertexId, to: VertexId) -> Vec<Vec<VertexId>> {
    let g = instance.graph();
    let to_target = bfs(instance, to);
    let mut out = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("non-empty");
        if last == to {
            out.push(path);
            continue;
        }
        for &v in g.neighbors(last).iter().rev() {
            if to_target[v] + 1 == to_target[last] {
                let mut p = path.clone();
                p.push(v);
                stack.push(p);
            }
        }
    }
    out
}

/// Every path set built from an optimal matching and a choice of shortest
/// path per agent, up to `limit` sets.
pub fn enumerate_minimal_path_sets(instance: &Instance, limit: usize) -> Result<Vec<PathSet>, OracleError> {
    let n = instance.agent_count();
    let best = oracle_min_total_distance(instance)?;
    let d = start_goal_distances(instance);
    let mut sets = Vec::new();
    for perm in (0..n).permutations(n) {
        if perm.iter().enumerate().map(|(i, &j)| d[i][j]).sum::<usize>() != best {
            continue;
        }
        let choices: Vec<Vec<Vec<VertexId>>> = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| all_shortest_paths(instance, instance.starts()[i], instance.goals()[j]))
            .collect();
        for combo in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
            sets.push(PathSet::new(combo.into_iter().map(|p| Path::new(p.clone())).collect()));
            if sets.len() >= limit {
                return Ok(sets);
            }
        }
    }
    Ok(sets)
}

/// Smallest compressed makespan over every enumerated minimal path set.
pub fn best_compressed_makespan(instance: &Instance, limit: usize) -> Result<usize, OracleError> {
    let mut best = usize::MAX;
    for set in enumerate_minimal_path_sets(instance, limit)? {
        let ordered = order_paths_lemma6(&set)?;
        best = best.min(compress(&ordered)?.makespan());
    }
    Ok(best)
}

/// Findings of [`verify`]. `distance_optimal` is `None` when the instance is
/// too large for the exhaustive check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub feasibility: Result<(), FeasibilityError>,
    pub collision: Result<(), Collision>,
    pub distance_optimal: Option<bool>,
    pub within_bound: bool,
    pub makespan: usize,
    pub total_distance: usize,
    pub bound: usize,
}

impl VerifyReport {
    pub fn feasible(&self) -> bool {
        self.feasibility.is_ok()
    }

    pub fn collision_free(&self) -> bool {
        self.collision.is_ok()
    }

    pub fn passed(&self) -> bool {
        self.feasible() && self.collision_free() && self.distance_optimal != Some(false) && self.within_bound
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.feasibility {
            Ok(()) => writeln!(f, "feasible: true")?,
            Err(e) => writeln!(f, "feasible: false ({e})")?,
        }
        match &self.collision {
            Ok(()) => writeln!(f, "collision_free: true")?,
            Err(c) => writeln!(f, "collision_free: false ({c})")?,
        }
        match self.distance_optimal {
            Some(b) => writeln!(f, "distance_optimal: {b}")?,
            None => writeln!(f, "distance_optimal: skipped")?,
        }
        writeln!(f, "within_bound: {} (makespan {} <= bound {})", self.within_bound, self.makespan, self.bound)?;
        write!(f, "total_distance: {}", self.total_distance)
    }
}

pub fn verify(instance: &Instance, schedule: &Schedule) -> VerifyReport {
    let feasibility = check_feasible(instance, schedule);
    let collision = collision_check(schedule);
    let distance_optimal =
        oracle_min_total_distance(instance).ok().map(|best| schedule.total_distance() == best);
    let m = metrics(instance, schedule);
    VerifyReport {
        feasibility,
        collision,
        distance_optimal,
        within_bound: m.within_bound(),
        makespan: m.makespan,
        total_distance: m.total_distance,
        bound: m.bound,
    }
}
