//! Distance-optimal, collision-free formation planning for indistinguishable
//! agents on graphs.
//!
//! The planner matches starts to goals with minimum total shortest-path
//! distance, orders the resulting paths so that each one is a shortest route
//! from a remaining start to a goal no other remaining path touches, and
//! releases one agent per step. The schedule finishes within `n + ell - 1`
//! steps, where `ell` is the largest start–goal distance. [`scheduler::compress`]
//! retimes the same paths to shorten that in practice.
//!
//! ```
//! use formation::{plan, io::InstanceFile};
//!
//! let file = InstanceFile::parse(
//!     r#"{"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3]], "starts": [0, 1], "goals": [2, 3]}"#,
//! ).unwrap();
//! let instance = file.to_instance().unwrap();
//! let plan = plan(&instance, false).unwrap();
//! assert_eq!(plan.schedule.makespan(), 3);
//! assert_eq!(plan.schedule.total_distance(), 4);
//! ```

pub mod assignment;
pub mod bench;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pathset;
pub mod scheduler;

use std::collections::HashMap;

use thiserror::Error;

pub use assignment::{hungarian, Assignment, AssignmentError};
pub use graph::{Cell, DistanceMatrix, Graph, GraphError, Instance, InstanceError, VertexId};
pub use pathset::{induce_dag, order_paths_lemma6, InducedDag, Path, PathSet, PathSetError};
pub use scheduler::{collision_check, compress, sequential_schedule, Metrics, Schedule, ScheduleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    PathSet(#[from] PathSetError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Everything the planner produced for one instance.
#[derive(Debug, Clone)]
pub struct Plan {
    pub assignment: Assignment,
    pub ordered: PathSet,
    /// Agent `i` starts at `instance.starts()[i]`.
    pub schedule: Schedule,
}

/// Integer cost matrix for the assignment step.
pub fn cost_rows(matrix: &DistanceMatrix) -> Vec<Vec<i64>> {
    (0..matrix.size()).map(|i| matrix.row(i).iter().map(|&d| i64::from(d)).collect()).collect()
}

/// Plans and schedules an instance. With `compress` the sequential order is
/// kept but departures are pulled as early as collisions allow.
pub fn plan(instance: &Instance, compress: bool) -> Result<Plan, PlanError> {
    let matrix = graph::distance_matrix(instance);
    let assignment = hungarian(&cost_rows(&matrix))?;
    let paths = pathset::extract_paths(instance, &assignment)?;
    let ordered = order_paths_lemma6(&paths)?;
    let timed = if compress { scheduler::compress(&ordered)? } else { sequential_schedule(&ordered)? };
    // back from release order to instance agent order
    let release_index: HashMap<VertexId, usize> =
        ordered.paths().iter().enumerate().map(|(k, p)| (p.head(), k)).collect();
    let by_agent: Vec<usize> = instance.starts().iter().map(|s| release_index[s]).collect();
    let schedule = timed.permuted(&by_agent);
    Ok(Plan { assignment, ordered, schedule })
}
