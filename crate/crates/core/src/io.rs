//! JSON instance and schedule files, and the per-agent trace export.
//!
//! Instance files come in two shapes:
//!
//! ```json
//! {"grid": {"cols": 7, "rows": 6, "holes": [[3, 2]]},
//!  "starts": [[0, 0], [0, 1]], "goals": [[6, 0], [6, 1]]}
//!
//! {"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3]],
//!  "starts": [0, 1], "goals": [2, 3]}
//! ```
//!
//! Grid cells are `[col, row]` with `(0, 0)` in the top-left corner.
//! Schedule files list, per agent, its start, goal, departure step and the
//! full vertex trajectory over steps `0..=makespan`; grid schedules also
//! carry the `[col, row]` of every vertex so traces can print cells.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cell, Graph, GraphError, Instance, InstanceError, VertexId};
use crate::scheduler::Schedule;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cols: usize,
    pub rows: usize,
    #[serde(default)]
    pub holes: Vec<[usize; 2]>,
}

/// A start or goal: a vertex id, or a `[col, row]` cell in grid files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Cell([usize; 2]),
    Vertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[VertexId; 2]>>,
    pub starts: Vec<Location>,
    pub goals: Vec<Location>,
}

impl InstanceFile {
    pub fn grid(cols: usize, rows: usize, holes: &BTreeSet<Cell>, starts: &[Cell], goals: &[Cell]) -> Self {
        let cell = |c: &Cell| Location::Cell([c.col, c.row]);
        Self {
            grid: Some(GridSpec { cols, rows, holes: holes.iter().map(|h| [h.col, h.row]).collect() }),
            vertices: None,
            edges: None,
            starts: starts.iter().map(cell).collect(),
            goals: goals.iter().map(cell).collect(),
        }
    }

    pub fn explicit(vertices: usize, edges: &[(VertexId, VertexId)], starts: &[VertexId], goals: &[VertexId]) -> Self {
        Self {
            grid: None,
            vertices: Some(vertices),
            edges: Some(edges.iter().map(|&(u, v)| [u, v]).collect()),
            starts: starts.iter().map(|&v| Location::Vertex(v)).collect(),
            goals: goals.iter().map(|&v| Location::Vertex(v)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        match (&self.grid, self.vertices, &self.edges) {
            (Some(grid), None, None) => {
                let holes = grid.holes.iter().map(|&[c, r]| Cell::new(c, r)).collect();
                let graph = Graph::grid(grid.cols, grid.rows, &holes)?;
                let layout = graph.grid_layout().expect("grid graphs carry a layout");
                let resolve = |name: &str, list: &[Location]| -> Result<Vec<VertexId>, FormatError> {
                    list.iter()
                        .enumerate()
                        .map(|(i, loc)| match *loc {
                            Location::Cell([c, r]) => layout
                                .vertex(Cell::new(c, r))
                                .ok_or_else(|| field_error(format!("{name}[{i}]"), format!("cell {c},{r} is a hole or off the grid"))),
                            Location::Vertex(_) => Err(field_error(format!("{name}[{i}]"), "grid instances take [col, row] cells")),
                        })
                        .collect()
                };
                let starts = resolve("starts", &self.starts)?;
                let goals = resolve("goals", &self.goals)?;
                Ok(Instance::new(graph, starts, goals)?)
            }
            (None, Some(vertices), Some(edges)) => {
                let edges: Vec<_> = edges.iter().map(|&[u, v]| (u, v)).collect();
                let graph = Graph::new(vertices, &edges)?;
                let resolve = |name: &str, list: &[Location]| -> Result<Vec<VertexId>, FormatError> {
                    list.iter()
                        .enumerate()
                        .map(|(i, loc)| match *loc {
                            Location::Vertex(v) => Ok(v),
                            Location::Cell(_) => Err(field_error(format!("{name}[{i}]"), "explicit graphs take vertex ids")),
                        })
                        .collect()
                };
                let starts = resolve("starts", &self.starts)?;
                let goals = resolve("goals", &self.goals)?;
                Ok(Instance::new(graph, starts, goals)?)
            }
            (Some(_), _, _) => Err(field_error("grid", "cannot be combined with `vertices` or `edges`")),
            (None, None, _) => Err(field_error("vertices", "missing; give either `grid` or `vertices` and `edges`")),
            (None, Some(_), None) => Err(field_error("edges", "missing")),
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let graph = instance.graph();
        match graph.grid_layout() {
            Some(layout) => {
                let cells = |vs: &[VertexId]| vs.iter().map(|&v| layout.cell(v)).collect::<Vec<_>>();
                Self::grid(layout.cols, layout.rows, &layout.holes(), &cells(instance.starts()), &cells(instance.goals()))
            }
            None => {
                let edges: Vec<_> = graph.edges().collect();
                Self::explicit(graph.vertex_count(), &edges, instance.starts(), instance.goals())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub start: VertexId,
    pub goal: VertexId,
    pub departure: usize,
    pub trajectory: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub makespan: usize,
    pub total_distance: usize,
    pub agents: Vec<AgentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[usize; 2]>>,
}

impl ScheduleFile {
    pub fn new(instance: &Instance, schedule: &Schedule) -> Self {
        let agents = (0..schedule.agent_count())
            .map(|a| AgentRecord {
                start: schedule.position(a, 0),
                goal: schedule.goal_of(a),
                departure: schedule.departures()[a],
                trajectory: schedule.trajectory(a).to_vec(),
            })
            .collect();
        let coords = instance.graph().grid_layout().map(|layout| {
            (0..instance.graph().vertex_count())
                .map(|v| {
                    let c = layout.cell(v);
                    [c.col, c.row]
                })
                .collect()
        });
        Self { makespan: schedule.makespan(), total_distance: schedule.total_distance(), agents, coords }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule files always serialize")
    }

    pub fn to_schedule(&self) -> Result<Schedule, FormatError> {
        if let Some(i) = self.agents.iter().position(|a| a.trajectory.is_empty()) {
            return Err(field_error(format!("agents[{i}].trajectory"), "empty"));
        }
        Ok(Schedule::from_trajectories(self.agents.iter().map(|a| a.trajectory.clone()).collect()))
    }

    /// Differences between the declared summary fields and what the
    /// trajectories actually do.
    pub fn inconsistencies(&self) -> Vec<String> {
        let Ok(schedule) = self.to_schedule() else {
            return vec!["unreadable trajectories".into()];
        };
        let mut out = Vec::new();
        if schedule.makespan() != self.makespan {
            out.push(format!("declared makespan {} but trajectories finish at {}", self.makespan, schedule.makespan()));
        }
        if schedule.total_distance() != self.total_distance {
            out.push(format!(
                "declared total_distance {} but trajectories move {}",
                self.total_distance,
                schedule.total_distance()
            ));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.trajectory[0] != a.start {
                out.push(format!("agents[{i}]: trajectory begins at {}, declared start {}", a.trajectory[0], a.start));
            }
            if schedule.goal_of(i) != a.goal {
                out.push(format!("agents[{i}]: trajectory ends at {}, declared goal {}", schedule.goal_of(i), a.goal));
            }
            if schedule.departures()[i] != a.departure {
                out.push(format!(
                    "agents[{i}]: trajectory departs at {}, declared {}",
                    schedule.departures()[i],
                    a.departure
                ));
            }
        }
        out
    }

    fn label(&self, v: VertexId) -> String {
        match self.coords.as_ref().and_then(|c| c.get(v)) {
            Some([col, row]) => format!("{col},{row}"),
            None => v.to_string(),
        }
    }

    /// One line per agent, one column per step `0..=makespan`:
    /// `1: 0,0 1,0 2,0 ...`. Grid schedules print `col,row` cells, other
    /// graphs print vertex ids.
    pub fn trace(&self) -> String {
        let horizon = self.agents.iter().map(|a| a.trajectory.len()).max().unwrap_or(0).max(self.makespan + 1);
        let mut out = String::new();
        for (i, a) in self.agents.iter().enumerate() {
            let cells: Vec<String> = (0..horizon)
                .map(|t| self.label(a.trajectory[t.min(a.trajectory.len() - 1)]))
                .collect();
            writeln!(out, "{}: {}", i + 1, cells.join(" ")).expect("writing to a String");
        }
        out
    }
}
