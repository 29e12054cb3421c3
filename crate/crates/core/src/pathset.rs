//! Minimal path sets, the DAG they induce, and the sequential reordering
//! that makes them schedulable one departure per step.
//!
//! The reordering treats the induced DAG as an integral flow. Each round
//! runs a BFS on the reversed residual from a virtual source tied to every
//! standalone goal, takes the nearest remaining start, and subtracts the
//! extracted path from the residual. After `n` rounds the residual is empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::assignment::Assignment;
use crate::graph::{Instance, ShortestPathTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathSetError {
    #[error("edge ({0}, {1}) is traversed in both directions, by paths {2} and {3}")]
    OpposedEdge(VertexId, VertexId, usize, usize),
    #[error("induced graph has a directed cycle through vertex {0}")]
    CycleDetected(VertexId),
    #[error("no standalone goal among {0} remaining goals")]
    NoStandaloneGoal(usize),
    #[error("no remaining start reaches a standalone goal in round {0}")]
    NoReachableStart(usize),
    #[error("extracted path uses edge ({0}, {1}) with no remaining multiplicity")]
    ResidualUnderflow(VertexId, VertexId),
    #[error("{0} edge traversals left in the residual after all rounds")]
    ResidualNotEmpty(u64),
    #[error("assignment covers {got} agents, instance has {expected}")]
    AssignmentSize { got: usize, expected: usize },
    #[error("path {path} steps from {from} to non-adjacent {to}")]
    NotAdjacent { path: usize, from: VertexId, to: VertexId },
    #[error("path {path} revisits vertex {vertex}")]
    RepeatedVertex { path: usize, vertex: VertexId },
    #[error("path heads do not match the instance starts")]
    HeadMismatch,
    #[error("path tails do not match the instance goals")]
    TailMismatch,
}

/// Vertex sequence from a start (head) to a goal (tail).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path(Vec<VertexId>);

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        Self(vertices)
    }

    pub fn head(&self) -> VertexId {
        self.0[0]
    }

    pub fn tail(&self) -> VertexId {
        self.0[self.0.len() - 1]
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn steps(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

impl From<Vec<VertexId>> for Path {
    fn from(v: Vec<VertexId>) -> Self {
        Self::new(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<Path>,
    release_ordered: bool,
}

impl PathSet {
    /// Unordered path set.
    pub fn new(paths: Vec<Path>) -> Self {
        Self { paths, release_ordered: false }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// True when the order came out of [`order_paths_lemma6`].
    pub fn is_ordered(&self) -> bool {
        self.release_ordered
    }

    pub fn total_length(&self) -> usize {
        self.paths.iter().map(Path::len).sum()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks that every path is a simple walk in `instance`'s graph and that
    /// heads and tails cover the starts and goals exactly once.
    pub fn validate(&self, instance: &Instance) -> Result<(), PathSetError> {
        let graph = instance.graph();
        for (i, p) in self.paths.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &v in p.vertices() {
                if !seen.insert(v) {
                    return Err(PathSetError::RepeatedVertex { path: i, vertex: v });
                }
            }
            if let Some((from, to)) = p.steps().find(|&(a, b)| !graph.is_adjacent(a, b)) {
                return Err(PathSetError::NotAdjacent { path: i, from, to });
            }
        }
        let heads: BTreeSet<_> = self.paths.iter().map(Path::head).collect();
        let tails: BTreeSet<_> = self.paths.iter().map(Path::tail).collect();
        let starts: BTreeSet<_> = instance.starts().iter().copied().collect();
        let goals: BTreeSet<_> = instance.goals().iter().copied().collect();
        if heads != starts || self.paths.len() != starts.len() {
            return Err(PathSetError::HeadMismatch);
        }
        if tails != goals || self.paths.len() != goals.len() {
            return Err(PathSetError::TailMismatch);
        }
        Ok(())
    }
}

/// Path `i` follows the smallest-parent BFS shortest path from `starts[i]`
/// to `goals[sigma[i]]`.
pub fn extract_paths(instance: &Instance, assignment: &Assignment) -> Result<PathSet, PathSetError> {
    let n = instance.agent_count();
    if assignment.sigma.len() != n {
        return Err(PathSetError::AssignmentSize { got: assignment.sigma.len(), expected: n });
    }
    let graph = instance.graph();
    let paths = instance
        .starts()
        .iter()
        .zip(&assignment.sigma)
        .map(|(&s, &j)| {
            let tree = ShortestPathTree::new(graph, s);
            Path::new(tree.path_to(graph, instance.goals()[j]))
        })
        .collect();
    Ok(PathSet::new(paths))
}

/// Orientation of a path set's edges from heads to tails, with the number of
/// paths using each directed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedDag {
    multiplicity: BTreeMap<(VertexId, VertexId), u32>,
}

impl InducedDag {
    pub fn multiplicity(&self) -> &BTreeMap<(VertexId, VertexId), u32> {
        &self.multiplicity
    }

    pub fn count(&self, u: VertexId, v: VertexId) -> u32 {
        self.multiplicity.get(&(u, v)).copied().unwrap_or(0)
    }

    pub fn out_degree(&self, v: VertexId) -> u32 {
        self.multiplicity.range((v, 0)..=(v, VertexId::MAX)).map(|(_, &c)| c).sum()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicity.values().map(|&c| u64::from(c)).sum()
    }

    /// Goals in `remaining_goals` with no outgoing multiplicity.
    pub fn standalone_goals(&self, remaining_goals: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>, PathSetError> {
        let found: BTreeSet<_> = remaining_goals.iter().copied().filter(|&g| self.out_degree(g) == 0).collect();
        if found.is_empty() {
            return Err(PathSetError::NoStandaloneGoal(remaining_goals.len()));
        }
        Ok(found)
    }
}

pub fn induce_dag(pathset: &PathSet) -> Result<InducedDag, PathSetError> {
    let mut first_user: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut multiplicity = BTreeMap::new();
    for (i, path) in pathset.paths().iter().enumerate() {
        for (u, v) in path.steps() {
            if let Some(&j) = first_user.get(&(v, u)) {
                return Err(PathSetError::OpposedEdge(u, v, j, i));
            }
            first_user.entry((u, v)).or_insert(i);
            *multiplicity.entry((u, v)).or_insert(0u32) += 1;
        }
    }
    check_acyclic(multiplicity.keys().copied())?;
    Ok(InducedDag { multiplicity })
}

// Kahn's algorithm over the vertices touched by `edges`.
fn check_acyclic(edges: impl Iterator<Item = (VertexId, VertexId)>) -> Result<(), PathSetError> {
    let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut indeg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (u, v) in edges {
        out.entry(u).or_default().push(v);
        indeg.entry(u).or_insert(0);
        *indeg.entry(v).or_insert(0) += 1;
    }
    let mut ready: Vec<_> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut removed = 0;
    while let Some(u) = ready.pop() {
        removed += 1;
        for &v in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(&v).expect("every head is indexed");
            *d -= 1;
            if *d == 0 {
                ready.push(v);
            }
        }
    }
    if removed < indeg.len() {
        let stuck = indeg.iter().find(|(_, &d)| d > 0).map(|(&v, _)| v).expect("some vertex is left");
        return Err(PathSetError::CycleDetected(stuck));
    }
    Ok(())
}

/// What one reordering round saw and picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrace {
    pub standalone_goals: usize,
    pub start: VertexId,
    pub goal: VertexId,
    pub length: usize,
}

/// Residual flow over the induced DAG, indexed by edge.
struct Residual {
    from: Vec<VertexId>,
    to: Vec<VertexId>,
    count: Vec<u32>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    outflow: Vec<u32>,
}

impl Residual {
    fn new(dag: &InducedDag, vertex_bound: usize) -> Self {
        let mut r = Residual {
            from: Vec::new(),
            to: Vec::new(),
            count: Vec::new(),
            out_edges: vec![Vec::new(); vertex_bound],
            in_edges: vec![Vec::new(); vertex_bound],
            outflow: vec![0; vertex_bound],
        };
        for (&(u, v), &c) in dag.multiplicity() {
            let e = r.from.len();
            r.from.push(u);
            r.to.push(v);
            r.count.push(c);
            r.out_edges[u].push(e);
            r.in_edges[v].push(e);
            r.outflow[u] += c;
        }
        // out-lists sorted by head id so parent scans meet small ids first
        for list in &mut r.out_edges {
            list.sort_by_key(|&e| r.to[e]);
        }
        r
    }

    fn remaining(&self) -> u64 {
        self.count.iter().map(|&c| u64::from(c)).sum()
    }
}

pub fn order_paths_lemma6(pathset: &PathSet) -> Result<PathSet, PathSetError> {
    order_paths_traced(pathset).map(|(ordered, _)| ordered)
}

/// Same as [`order_paths_lemma6`], also returning one trace entry per round.
pub fn order_paths_traced(pathset: &PathSet) -> Result<(PathSet, Vec<RoundTrace>), PathSetError> {
    let dag = induce_dag(pathset)?;
    let n = pathset.len();
    let vertex_bound = pathset.paths().iter().flat_map(|p| p.vertices()).max().map_or(0, |&m| m + 1);
    let mut residual = Residual::new(&dag, vertex_bound);

    let mut is_start = vec![false; vertex_bound];
    let mut remaining_goals = BTreeSet::new();
    for p in pathset.paths() {
        is_start[p.head()] = true;
        remaining_goals.insert(p.tail());
    }

    // dist is valid only where stamp == current round
    let mut dist = vec![0u32; vertex_bound];
    let mut stamp = vec![usize::MAX; vertex_bound];
    let mut ordered = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);

    for round in 0..n {
        let standalone: Vec<VertexId> =
            remaining_goals.iter().copied().filter(|&g| residual.outflow[g] == 0).collect();
        if standalone.is_empty() {
            return Err(PathSetError::NoStandaloneGoal(remaining_goals.len()));
        }

        // level-synchronous BFS on the reversed residual; the virtual source
        // sits at distance 0 and every standalone goal at distance 1
        let mut frontier = standalone.clone();
        for &g in &frontier {
            stamp[g] = round;
            dist[g] = 1;
        }
        let start = loop {
            if frontier.is_empty() {
                return Err(PathSetError::NoReachableStart(round));
            }
            if let Some(&s) = frontier.iter().filter(|&&v| is_start[v]).min() {
                break s;
            }
            let mut next = Vec::new();
            for &x in &frontier {
                for &e in &residual.in_edges[x] {
                    let y = residual.from[e];
                    if residual.count[e] > 0 && stamp[y] != round {
                        stamp[y] = round;
                        dist[y] = dist[x] + 1;
                        next.push(y);
                    }
                }
            }
            frontier = next;
        };

        // walk forward along smallest-id BFS parents
        let mut vertices = vec![start];
        let mut cur = start;
        while dist[cur] > 1 {
            let want = dist[cur] - 1;
            let e = residual.out_edges[cur]
                .iter()
                .copied()
                .find(|&e| {
                    let y = residual.to[e];
                    residual.count[e] > 0 && stamp[y] == round && dist[y] == want
                })
                .expect("every BFS-labelled vertex has a parent one level down");
            if residual.count[e] == 0 {
                return Err(PathSetError::ResidualUnderflow(cur, residual.to[e]));
            }
            residual.count[e] -= 1;
            residual.outflow[cur] -= 1;
            cur = residual.to[e];
            vertices.push(cur);
        }
        debug_assert!({
            let mut seen = vertices.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        });

        is_start[start] = false;
        remaining_goals.remove(&cur);
        trace.push(RoundTrace { standalone_goals: standalone.len(), start, goal: cur, length: vertices.len() - 1 });
        ordered.push(Path::new(vertices));
    }

    let left = residual.remaining();
    if left != 0 {
        return Err(PathSetError::ResidualNotEmpty(left));
    }
    Ok((PathSet { paths: ordered, release_ordered: true }, trace))
}
