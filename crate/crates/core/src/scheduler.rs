//! Time-parameterized schedules: the one-departure-per-step sequential
//! schedule, the compression heuristic, feasibility and collision checks.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{distance_matrix, Instance, VertexId};
use crate::pathset::{Path, PathSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("path set is not in sequential-transfer order")]
    NotOrdered,
    #[error("path {path} passes through vertex {vertex}, the start of later path {later}")]
    StartOnEarlierPath { path: usize, vertex: VertexId, later: usize },
    #[error("no conflict-free departure found for agent {0}")]
    NoFeasibleDeparture(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("schedule has {got} agents, instance has {expected}")]
    AgentCount { got: usize, expected: usize },
    #[error("agent {0} has an empty trajectory")]
    EmptyTrajectory(usize),
    #[error("agent {agent} begins at {found}, expected start {expected}")]
    WrongStart { agent: usize, expected: VertexId, found: VertexId },
    #[error("agent {agent} ends at {vertex}, which is not a goal")]
    NotAGoal { agent: usize, vertex: VertexId },
    #[error("agents {0} and {1} end at the same goal")]
    SharedGoal(usize, usize),
    #[error("agent {agent} jumps from {from} to {to} at step {time}")]
    NotAdjacent { agent: usize, time: usize, from: VertexId, to: VertexId },
    #[error("agent {agent} visits vertex {vertex}, outside the graph")]
    OutOfRange { agent: usize, vertex: VertexId },
}

/// Per-agent vertex sequences over steps `0..=makespan`. Agents hold their
/// last listed vertex forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    trajectories: Vec<Vec<VertexId>>,
    departures: Vec<usize>,
    makespan: usize,
    total_distance: usize,
}

impl Schedule {
    /// Normalizes raw trajectories: trailing holds are dropped, then every row
    /// is padded to the common makespan.
    pub fn from_trajectories(mut trajectories: Vec<Vec<VertexId>>) -> Self {
        for t in &mut trajectories {
            while t.len() > 1 && t[t.len() - 1] == t[t.len() - 2] {
                t.pop();
            }
        }
        let makespan = trajectories.iter().map(|t| t.len().saturating_sub(1)).max().unwrap_or(0);
        let departures = trajectories
            .iter()
            .map(|t| t.windows(2).position(|w| w[0] != w[1]).unwrap_or(0))
            .collect();
        let total_distance = trajectories.iter().map(|t| t.windows(2).filter(|w| w[0] != w[1]).count()).sum();
        for t in &mut trajectories {
            if let Some(&last) = t.last() {
                t.resize(makespan + 1, last);
            }
        }
        Self { trajectories, departures, makespan, total_distance }
    }

    fn from_timed_paths(paths: &[Path], departures: &[usize]) -> Self {
        let trajectories = paths
            .iter()
            .zip(departures)
            .map(|(p, &d)| {
                let mut t = vec![p.head(); d];
                t.extend_from_slice(p.vertices());
                t
            })
            .collect();
        Self::from_trajectories(trajectories)
    }

    pub fn agent_count(&self) -> usize {
        self.trajectories.len()
    }

    pub fn trajectories(&self) -> &[Vec<VertexId>] {
        &self.trajectories
    }

    pub fn trajectory(&self, agent: usize) -> &[VertexId] {
        &self.trajectories[agent]
    }

    /// Position at any step, including steps past the makespan.
    pub fn position(&self, agent: usize, time: usize) -> VertexId {
        let t = &self.trajectories[agent];
        t[time.min(t.len() - 1)]
    }

    pub fn departures(&self) -> &[usize] {
        &self.departures
    }

    pub fn makespan(&self) -> usize {
        self.makespan
    }

    pub fn total_distance(&self) -> usize {
        self.total_distance
    }

    /// First step from which the agent stays at its goal.
    pub fn arrival(&self, agent: usize) -> usize {
        let t = &self.trajectories[agent];
        let last = t[t.len() - 1];
        t.iter().rposition(|&v| v != last).map_or(0, |k| k + 1)
    }

    pub fn goal_of(&self, agent: usize) -> VertexId {
        *self.trajectories[agent].last().expect("non-empty trajectory")
    }

    /// Reorders agents: agent `k` of the result is agent `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            trajectories: order.iter().map(|&k| self.trajectories[k].clone()).collect(),
            departures: order.iter().map(|&k| self.departures[k]).collect(),
            makespan: self.makespan,
            total_distance: self.total_distance,
        }
    }

    /// Inserts a hold at `time` for `agent`, delaying the rest of its
    /// trajectory by one step.
    pub fn with_wait(&self, agent: usize, time: usize) -> Self {
        let mut trajectories = self.trajectories.clone();
        let t = &mut trajectories[agent];
        let at = time.min(t.len() - 1);
        t.insert(at, t[at]);
        Self::from_trajectories(trajectories)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollisionKind {
    Meet,
    HeadOn,
}

impl fmt::Display for CollisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollisionKind::Meet => "meet",
            CollisionKind::HeadOn => "head-on",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} collision between agents {} and {} at step {time}", agents.0, agents.1)]
pub struct Collision {
    pub kind: CollisionKind,
    pub time: usize,
    pub agents: (usize, usize),
}

/// Earliest meet or head-on collision, if any. A head-on at step `t` is a
/// swap across one edge between steps `t` and `t + 1`; meets are reported
/// before head-ons at the same step.
pub fn collision_check(schedule: &Schedule) -> Result<(), Collision> {
    let n = schedule.agent_count();
    let mut at: HashMap<VertexId, usize> = HashMap::with_capacity(n);
    for time in 0..=schedule.makespan() {
        at.clear();
        for a in 0..n {
            if let Some(b) = at.insert(schedule.position(a, time), a) {
                return Err(Collision { kind: CollisionKind::Meet, time, agents: (b.min(a), b.max(a)) });
            }
        }
        if time == schedule.makespan() {
            break;
        }
        for a in 0..n {
            let (u, w) = (schedule.position(a, time), schedule.position(a, time + 1));
            if u == w {
                continue;
            }
            if let Some(&b) = at.get(&w) {
                if schedule.position(b, time + 1) == u {
                    return Err(Collision { kind: CollisionKind::HeadOn, time, agents: (a.min(b), a.max(b)) });
                }
            }
        }
    }
    Ok(())
}

/// Re-derives the per-agent feasibility conditions from raw trajectories:
/// start anchoring, ending on distinct goals, and unit steps or holds.
pub fn check_feasible(instance: &Instance, schedule: &Schedule) -> Result<(), FeasibilityError> {
    let n = instance.agent_count();
    if schedule.agent_count() != n {
        return Err(FeasibilityError::AgentCount { got: schedule.agent_count(), expected: n });
    }
    let graph = instance.graph();
    let goal_index: HashMap<VertexId, usize> = instance.goals().iter().enumerate().map(|(j, &g)| (g, j)).collect();
    let mut goal_owner = vec![None; n];
    for (agent, t) in schedule.trajectories().iter().enumerate() {
        if t.is_empty() {
            return Err(FeasibilityError::EmptyTrajectory(agent));
        }
        if let Some(&vertex) = t.iter().find(|&&v| v >= graph.vertex_count()) {
            return Err(FeasibilityError::OutOfRange { agent, vertex });
        }
        if t[0] != instance.starts()[agent] {
            return Err(FeasibilityError::WrongStart { agent, expected: instance.starts()[agent], found: t[0] });
        }
        for (time, w) in t.windows(2).enumerate() {
            if w[0] != w[1] && !graph.is_adjacent(w[0], w[1]) {
                return Err(FeasibilityError::NotAdjacent { agent, time, from: w[0], to: w[1] });
            }
        }
        let end = t[t.len() - 1];
        let j = *goal_index.get(&end).ok_or(FeasibilityError::NotAGoal { agent, vertex: end })?;
        if let Some(other) = goal_owner[j].replace(agent) {
            return Err(FeasibilityError::SharedGoal(other, agent));
        }
    }
    Ok(())
}

/// Agent `i` (in path order) departs at step `i`.
pub fn sequential_schedule(ordered: &PathSet) -> Result<Schedule, ScheduleError> {
    if !ordered.is_ordered() {
        return Err(ScheduleError::NotOrdered);
    }
    check_starts_clear(ordered.paths())?;
    let departures: Vec<usize> = (0..ordered.len()).collect();
    Ok(Schedule::from_timed_paths(ordered.paths(), &departures))
}

// Earlier paths never cross the start of a later one.
fn check_starts_clear(paths: &[Path]) -> Result<(), ScheduleError> {
    let start_of: HashMap<VertexId, usize> = paths.iter().enumerate().map(|(i, p)| (p.head(), i)).collect();
    for (i, p) in paths.iter().enumerate() {
        for &v in &p.vertices()[1..] {
            if let Some(&later) = start_of.get(&v) {
                if later > i {
                    return Err(ScheduleError::StartOnEarlierPath { path: i, vertex: v, later });
                }
            }
        }
    }
    Ok(())
}

/// Vertex occupancy of already-timed agents.
#[derive(Default)]
struct Reservations {
    // vertex -> (first step, last step inclusive, agent)
    intervals: HashMap<VertexId, Vec<(usize, usize, usize)>>,
    timed: Vec<(usize, usize)>, // (path index, departure)
}

impl Reservations {
    fn occupant(&self, v: VertexId, time: usize) -> Option<usize> {
        self.intervals.get(&v)?.iter().find(|&&(a, b, _)| a <= time && time <= b).map(|&(_, _, agent)| agent)
    }

    fn overlaps(&self, v: VertexId, from: usize, to: usize) -> bool {
        self.intervals.get(&v).is_some_and(|list| list.iter().any(|&(a, b, _)| a <= to && from <= b))
    }

    fn position(&self, paths: &[Path], agent: usize, time: usize) -> VertexId {
        let (p, d) = self.timed[agent];
        let verts = paths[p].vertices();
        verts[time.saturating_sub(d).min(verts.len() - 1)]
    }

    fn fits(&self, paths: &[Path], path: &Path, d: usize) -> bool {
        let verts = path.vertices();
        let len = path.len();
        if self.overlaps(verts[0], 0, d) || self.overlaps(verts[len], d + len, usize::MAX) {
            return false;
        }
        if (1..len).any(|k| self.occupant(verts[k], d + k).is_some()) {
            return false;
        }
        (0..len).all(|k| match self.occupant(verts[k + 1], d + k) {
            Some(other) => self.position(paths, other, d + k + 1) != verts[k],
            None => true,
        })
    }

    fn reserve(&mut self, path_index: usize, path: &Path, d: usize) {
        let agent = self.timed.len();
        self.timed.push((path_index, d));
        let verts = path.vertices();
        let len = path.len();
        self.intervals.entry(verts[0]).or_default().push((0, d, agent));
        for k in 1..len {
            self.intervals.entry(verts[k]).or_default().push((d + k, d + k, agent));
        }
        self.intervals.entry(verts[len]).or_default().push((d + len, usize::MAX, agent));
    }
}

/// Keeps the sequential order and routes but gives each agent the earliest
/// departure that conflicts with no agent timed before it.
pub fn compress(ordered: &PathSet) -> Result<Schedule, ScheduleError> {
    if !ordered.is_ordered() {
        return Err(ScheduleError::NotOrdered);
    }
    let paths = ordered.paths();
    check_starts_clear(paths)?;
    let mut reservations = Reservations::default();
    let mut departures = Vec::with_capacity(paths.len());
    let mut latest_arrival = 0;
    for (i, path) in paths.iter().enumerate() {
        // departing after every earlier arrival always fits
        let d = (0..=latest_arrival)
            .find(|&d| reservations.fits(paths, path, d))
            .ok_or(ScheduleError::NoFeasibleDeparture(i))?;
        reservations.reserve(i, path, d);
        departures.push(d);
        latest_arrival = latest_arrival.max(d + path.len());
    }
    Ok(Schedule::from_timed_paths(paths, &departures))
}

/// Makespan and distance with the worst-case bound `n + ell - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub makespan: usize,
    pub total_distance: usize,
    pub ell: usize,
    pub bound: usize,
}

impl Metrics {
    pub fn within_bound(&self) -> bool {
        self.makespan <= self.bound
    }
}

pub fn metrics(instance: &Instance, schedule: &Schedule) -> Metrics {
    let ell = distance_matrix(instance).max() as usize;
    Metrics {
        makespan: schedule.makespan(),
        total_distance: schedule.total_distance(),
        ell,
        bound: instance.agent_count() + ell - 1,
    }
}
