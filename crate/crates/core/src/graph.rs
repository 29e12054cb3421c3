//! Undirected unit-edge graphs, grid constructors and breadth-first search.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

/// Dense vertex id in `0..vertex_count`.
pub type VertexId = usize;

/// Marker for vertices a BFS never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// A grid cell, `(0, 0)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.col, self.row)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(VertexId),
    #[error("graph has no vertices")]
    Empty,
    #[error("grid dimensions must be at least 1x1, got {cols}x{rows}")]
    EmptyGrid { cols: usize, rows: usize },
    #[error("hole {0} lies outside the {1}x{2} grid")]
    HoleOutOfBounds(Cell, usize, usize),
    #[error("cell {0} is not a vertex of the grid")]
    NotAVertex(Cell),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("{starts} starts but {goals} goals")]
    CountMismatch { starts: usize, goals: usize },
    #[error("{agents} agents do not fit on {vertices} vertices")]
    TooManyAgents { agents: usize, vertices: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("start vertex {0} is listed twice")]
    DuplicateStart(VertexId),
    #[error("goal vertex {0} is listed twice")]
    DuplicateGoal(VertexId),
    #[error("vertex {0} is both a start and a goal")]
    StartGoalOverlap(VertexId),
}

/// Geometry of a grid-derived graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub cols: usize,
    pub rows: usize,
    coords: Vec<Cell>,
    // row-major cell index -> vertex id
    index: Vec<Option<VertexId>>,
}

impl GridLayout {
    pub fn cell(&self, v: VertexId) -> Cell {
        self.coords[v]
    }

    pub fn vertex(&self, cell: Cell) -> Option<VertexId> {
        if cell.col >= self.cols || cell.row >= self.rows {
            return None;
        }
        self.index[cell.row * self.cols + cell.col]
    }

    pub fn holes(&self) -> BTreeSet<Cell> {
        (0..self.rows)
            .flat_map(|row| (0..self.cols).map(move |col| Cell::new(col, row)))
            .filter(|c| self.vertex(*c).is_none())
            .collect()
    }
}

/// Connected, undirected, simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    edge_count: usize,
    grid: Option<GridLayout>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and disconnected inputs.
    pub fn new(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: x, vertex_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0];
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        let graph = Self { adjacency, edge_count: edges.len(), grid: None };
        graph.check_connected()?;
        Ok(graph)
    }

    /// 4-connected grid graph. Vertex ids are assigned row-major, skipping holes.
    pub fn grid(cols: usize, rows: usize, holes: &BTreeSet<Cell>) -> Result<Self, GraphError> {
        if cols == 0 || rows == 0 {
            return Err(GraphError::EmptyGrid { cols, rows });
        }
        if let Some(h) = holes.iter().find(|h| h.col >= cols || h.row >= rows) {
            return Err(GraphError::HoleOutOfBounds(*h, cols, rows));
        }
        let mut index = vec![None; cols * rows];
        let mut coords = Vec::with_capacity(cols * rows - holes.len());
        for row in 0..rows {
            for col in 0..cols {
                let cell = Cell::new(col, row);
                if !holes.contains(&cell) {
                    index[row * cols + col] = Some(coords.len());
                    coords.push(cell);
                }
            }
        }
        if coords.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut edges = Vec::new();
        for (v, c) in coords.iter().enumerate() {
            if c.col + 1 < cols {
                if let Some(w) = index[c.row * cols + c.col + 1] {
                    edges.push((v, w));
                }
            }
            if c.row + 1 < rows {
                if let Some(w) = index[(c.row + 1) * cols + c.col] {
                    edges.push((v, w));
                }
            }
        }
        let mut graph = Self::new(coords.len(), &edges)?;
        graph.grid = Some(GridLayout { cols, rows, coords, index });
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn grid_layout(&self) -> Option<&GridLayout> {
        self.grid.as_ref()
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let dist = bfs_distances(self, 0);
        match dist.iter().position(|&d| d == UNREACHABLE) {
            Some(v) => Err(GraphError::Disconnected(v)),
            None => Ok(()),
        }
    }
}

/// Unit-edge shortest-path distances from `source`.
pub fn bfs_distances(graph: &Graph, source: VertexId) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in graph.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// BFS tree from a single source. Parents are the smallest-id neighbor one
/// level closer to the source.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    source: VertexId,
    dist: Vec<u32>,
}

impl ShortestPathTree {
    pub fn new(graph: &Graph, source: VertexId) -> Self {
        Self { source, dist: bfs_distances(graph, source) }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn distances(&self) -> &[u32] {
        &self.dist
    }

    pub fn distance(&self, v: VertexId) -> u32 {
        self.dist[v]
    }

    pub fn parent(&self, graph: &Graph, v: VertexId) -> Option<VertexId> {
        if v == self.source {
            return None;
        }
        let want = self.dist[v].checked_sub(1)?;
        // adjacency is sorted, so the first hit is the smallest id
        graph.neighbors(v).iter().copied().find(|&u| self.dist[u] == want)
    }

    /// Vertex sequence from the source to `target`.
    pub fn path_to(&self, graph: &Graph, target: VertexId) -> Vec<VertexId> {
        let mut path = Vec::with_capacity(self.dist[target] as usize + 1);
        let mut cur = target;
        path.push(cur);
        while let Some(p) = self.parent(graph, cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Graph together with disjoint start and goal vertex lists of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    starts: Vec<VertexId>,
    goals: Vec<VertexId>,
}

impl Instance {
    pub fn new(graph: Graph, starts: Vec<VertexId>, goals: Vec<VertexId>) -> Result<Self, InstanceError> {
        if starts.len() != goals.len() {
            return Err(InstanceError::CountMismatch { starts: starts.len(), goals: goals.len() });
        }
        if starts.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        let vertices = graph.vertex_count();
        if starts.len() > vertices {
            return Err(InstanceError::TooManyAgents { agents: starts.len(), vertices });
        }
        let mut role = vec![0u8; vertices];
        for &s in &starts {
            if s >= vertices {
                return Err(InstanceError::VertexOutOfRange(s));
            }
            if role[s] != 0 {
                return Err(InstanceError::DuplicateStart(s));
            }
            role[s] = 1;
        }
        for &g in &goals {
            if g >= vertices {
                return Err(InstanceError::VertexOutOfRange(g));
            }
            match role[g] {
                1 => return Err(InstanceError::StartGoalOverlap(g)),
                2 => return Err(InstanceError::DuplicateGoal(g)),
                _ => role[g] = 2,
            }
        }
        Ok(Self { graph, starts, goals })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn starts(&self) -> &[VertexId] {
        &self.starts
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }

    pub fn agent_count(&self) -> usize {
        self.starts.len()
    }
}

/// Row-major `n x n` matrix of start-to-goal distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "distance matrix must be square");
        Self { n, data: rows.into_iter().flatten().collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, start: usize, goal: usize) -> u32 {
        self.data[start * self.n + goal]
    }

    pub fn row(&self, start: usize) -> &[u32] {
        &self.data[start * self.n..(start + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.data.chunks(self.n.max(1)).map(<[u32]>::to_vec).collect()
    }

    pub fn max(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// One BFS per start vertex; entry `(i, j)` is `dist(starts[i], goals[j])`.
pub fn distance_matrix(instance: &Instance) -> DistanceMatrix {
    let n = instance.agent_count();
    let mut data = Vec::with_capacity(n * n);
    for &s in instance.starts() {
        let dist = bfs_distances(instance.graph(), s);
        data.extend(instance.goals().iter().map(|&g| dist[g]));
    }
    DistanceMatrix { n, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn smallest_connected_graph() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn disconnected_names_vertex() {
        assert_eq!(Graph::new(3, &[(0, 1)]), Err(GraphError::Disconnected(2)));
    }

    #[test]
    fn four_cycle_degrees() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!((0..4).all(|v| g.neighbors(v).len() == 2));
        assert_eq!(g.neighbors(0), &[1, 3]);
    }

    #[test]
    fn rejects_self_loop_and_duplicate() {
        assert_eq!(Graph::new(2, &[(0, 1), (1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Graph::new(2, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::new(2, &[(0, 2)]), Err(GraphError::VertexOutOfRange { vertex: 2, .. })));
    }

    #[test]
    fn grid_counts() {
        let g = Graph::grid(2, 2, &BTreeSet::new()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = Graph::grid(7, 6, &BTreeSet::new()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (42, 71));
        let layout = g.grid_layout().unwrap();
        assert_eq!(layout.cell(0), Cell::new(0, 0));
        assert_eq!(layout.cell(41), Cell::new(6, 5));
        assert_eq!(layout.vertex(Cell::new(1, 1)), Some(8));
    }

    #[test]
    fn grid_hole_severs_path() {
        let holes: BTreeSet<_> = [Cell::new(1, 0)].into();
        assert!(matches!(Graph::grid(3, 1, &holes), Err(GraphError::Disconnected(_))));
        let holes: BTreeSet<_> = [Cell::new(3, 0)].into();
        assert!(matches!(Graph::grid(3, 1, &holes), Err(GraphError::HoleOutOfBounds(..))));
    }

    #[test]
    fn grid_ids_skip_holes() {
        let holes: BTreeSet<_> = [Cell::new(1, 1)].into();
        let g = Graph::grid(3, 3, &holes).unwrap();
        assert_eq!(g.vertex_count(), 8);
        let layout = g.grid_layout().unwrap();
        assert_eq!(layout.vertex(Cell::new(1, 1)), None);
        assert_eq!(layout.vertex(Cell::new(2, 1)), Some(4));
        assert_eq!(layout.holes(), holes);
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(bfs_distances(&path_graph(3), 0), vec![0, 1, 2]);

        let g = Graph::grid(7, 6, &BTreeSet::new()).unwrap();
        let l = g.grid_layout().unwrap();
        let d = bfs_distances(&g, l.vertex(Cell::new(0, 0)).unwrap());
        assert_eq!(d[l.vertex(Cell::new(6, 5)).unwrap()], 11);

        // detour around the centre: (0,1)->(0,0)->(1,0)->(2,0)->(2,1)
        let holes: BTreeSet<_> = [Cell::new(1, 1)].into();
        let g = Graph::grid(3, 3, &holes).unwrap();
        let l = g.grid_layout().unwrap();
        let d = bfs_distances(&g, l.vertex(Cell::new(0, 1)).unwrap());
        assert_eq!(d[l.vertex(Cell::new(2, 1)).unwrap()], 4);
    }

    #[test]
    fn parent_prefers_smallest_id() {
        // 4-cycle from 0: vertex 2 has parents 1 and 3
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let t = ShortestPathTree::new(&g, 0);
        assert_eq!(t.parent(&g, 2), Some(1));
        assert_eq!(t.path_to(&g, 2), vec![0, 1, 2]);
        assert_eq!(t.path_to(&g, 0), vec![0]);
    }

    #[test]
    fn instance_validation() {
        let g = path_graph(4);
        assert!(Instance::new(g.clone(), vec![0, 1], vec![2, 3]).is_ok());
        assert_eq!(Instance::new(g.clone(), vec![0, 1], vec![1, 3]), Err(InstanceError::StartGoalOverlap(1)));
        assert_eq!(Instance::new(g.clone(), vec![0, 0], vec![2, 3]), Err(InstanceError::DuplicateStart(0)));
        assert_eq!(Instance::new(g.clone(), vec![0, 1], vec![3, 3]), Err(InstanceError::DuplicateGoal(3)));
        assert_eq!(Instance::new(g.clone(), vec![], vec![]), Err(InstanceError::NoAgents));
        assert_eq!(Instance::new(g.clone(), vec![0], vec![9]), Err(InstanceError::VertexOutOfRange(9)));
        assert!(matches!(Instance::new(g, vec![0], vec![2, 3]), Err(InstanceError::CountMismatch { .. })));
    }

    #[test]
    fn distance_matrix_examples() {
        let inst = Instance::new(path_graph(4), vec![0, 1], vec![2, 3]).unwrap();
        assert_eq!(distance_matrix(&inst).rows(), vec![vec![2, 3], vec![1, 2]]);

        let inst = Instance::new(path_graph(2), vec![0], vec![1]).unwrap();
        assert_eq!(distance_matrix(&inst).rows(), vec![vec![1]]);

        let g = Graph::grid(7, 6, &BTreeSet::new()).unwrap();
        let l = g.grid_layout().unwrap().clone();
        let starts = (0..6).map(|r| l.vertex(Cell::new(0, r)).unwrap()).collect();
        let goals = (0..6).map(|r| l.vertex(Cell::new(6, r)).unwrap()).collect();
        let m = distance_matrix(&Instance::new(g, starts, goals).unwrap());
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(m.get(i, j) as usize, 6 + i.abs_diff(j));
            }
        }
    }
}
