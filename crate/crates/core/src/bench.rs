//! Benchmark harness: random grid instances, timed planning, scaling summary.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::generate::{gen_random, GenError};
use crate::io::FormatError;
use crate::{plan, scheduler, PlanError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// One planner run. `plan_time_seconds` covers distance matrix, matching,
/// path extraction, reordering and the sequential schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub vertex_count: usize,
    pub agent_count: usize,
    pub seed: u64,
    pub plan_time_seconds: f64,
    pub makespan_sequential: usize,
    pub makespan_compressed: usize,
    pub total_distance: usize,
}

pub fn run_once(cols: usize, rows: usize, agents: usize, seed: u64) -> Result<BenchRecord, BenchError> {
    let instance = gen_random(cols, rows, agents, seed)?.to_instance()?;
    let clock = Instant::now();
    let planned = plan(&instance, false)?;
    let plan_time_seconds = clock.elapsed().as_secs_f64();
    let compressed = scheduler::compress(&planned.ordered).map_err(PlanError::from)?;
    Ok(BenchRecord {
        vertex_count: instance.graph().vertex_count(),
        agent_count: agents,
        seed,
        plan_time_seconds,
        makespan_sequential: planned.schedule.makespan(),
        makespan_compressed: compressed.makespan(),
        total_distance: planned.schedule.total_distance(),
    })
}

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub cols: usize,
    pub rows: usize,
    pub agents: usize,
    /// `None` when the agents do not fit on the grid.
    pub records: Option<Vec<BenchRecord>>,
}

impl BenchCell {
    pub fn vertex_count(&self) -> usize {
        self.cols * self.rows
    }

    fn mean(&self, f: impl Fn(&BenchRecord) -> f64) -> Option<f64> {
        let r = self.records.as_ref()?;
        Some(r.iter().map(f).sum::<f64>() / r.len() as f64)
    }

    pub fn mean_time(&self) -> Option<f64> {
        self.mean(|r| r.plan_time_seconds)
    }

    pub fn mean_compressed_makespan(&self) -> Option<f64> {
        self.mean(|r| r.makespan_compressed as f64)
    }

    pub fn mean_sequential_makespan(&self) -> Option<f64> {
        self.mean(|r| r.makespan_sequential as f64)
    }
}

/// Measured time growth between two grid sizes at a fixed agent count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub agents: usize,
    pub from_vertices: usize,
    pub to_vertices: usize,
    pub measured_ratio: f64,
    /// `(V2 / V1)^2`, the worst-case growth of the planner.
    pub predicted_ratio: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchTable {
    pub cells: Vec<BenchCell>,
}

impl BenchTable {
    pub fn cell(&self, vertex_count: usize, agents: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.vertex_count() == vertex_count && c.agents == agents)
    }

    pub fn records(&self) -> impl Iterator<Item = &BenchRecord> {
        self.cells.iter().filter_map(|c| c.records.as_ref()).flatten()
    }

    /// Ratios between consecutive grid sizes for every agent count that
    /// fits on both.
    pub fn scaling(&self) -> Vec<ScalingRow> {
        let mut sizes: Vec<usize> = self.cells.iter().map(BenchCell::vertex_count).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let mut agents: Vec<usize> = self.cells.iter().map(|c| c.agents).collect();
        agents.sort_unstable();
        agents.dedup();
        let mut rows = Vec::new();
        for &n in &agents {
            for w in sizes.windows(2) {
                let t = |v| self.cell(v, n).and_then(BenchCell::mean_time);
                if let (Some(a), Some(b)) = (t(w[0]), t(w[1])) {
                    let growth = w[1] as f64 / w[0] as f64;
                    rows.push(ScalingRow {
                        agents: n,
                        from_vertices: w[0],
                        to_vertices: w[1],
                        measured_ratio: b / a,
                        predicted_ratio: growth * growth,
                    });
                }
            }
        }
        rows
    }

    /// Mean plan time per (vertices, agents), `N/A` where agents do not fit.
    pub fn render(&self) -> String {
        let mut sizes: Vec<usize> = self.cells.iter().map(BenchCell::vertex_count).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let mut agents: Vec<usize> = self.cells.iter().map(|c| c.agents).collect();
        agents.sort_unstable();
        agents.dedup();
        let mut out = String::from("vertices");
        for n in &agents {
            write!(out, "\t{n}").unwrap();
        }
        out.push('\n');
        for v in sizes {
            write!(out, "{v}").unwrap();
            for &n in &agents {
                match self.cell(v, n).and_then(BenchCell::mean_time) {
                    Some(t) => write!(out, "\t{t:.4}").unwrap(),
                    None => out.push_str("\tN/A"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in self.records() {
            w.serialize(r).expect("records serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }
}

/// Runs every (grid, agents) cell `runs` times with seeds `seed..seed + runs`.
/// Cells whose agents do not fit are kept as `N/A`.
pub fn bench_suite(grids: &[(usize, usize)], agents: &[usize], runs: usize, seed: u64) -> Result<BenchTable, BenchError> {
    let mut table = BenchTable::default();
    for &(cols, rows) in grids {
        for &n in agents {
            let records = if 2 * n > cols * rows {
                None
            } else {
                let recs = (0..runs as u64)
                    .map(|k| run_once(cols, rows, n, seed + k))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(recs)
            };
            table.cells.push(BenchCell { cols, rows, agents: n, records });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crowded_cells_are_not_applicable() {
        let table = bench_suite(&[(4, 4), (6, 6)], &[2, 10], 2, 1).unwrap();
        assert!(table.cell(16, 10).unwrap().records.is_none());
        assert_eq!(table.cell(36, 10).unwrap().records.as_ref().unwrap().len(), 2);
        assert!(table.render().contains("N/A"));
        let scaling = table.scaling();
        assert_eq!(scaling.len(), 1);
        assert_eq!(scaling[0].agents, 2);
        assert!((scaling[0].predicted_ratio - (36.0f64 / 16.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn records_are_deterministic_except_time() {
        let a = run_once(8, 8, 6, 11).unwrap();
        let b = run_once(8, 8, 6, 11).unwrap();
        assert_eq!(BenchRecord { plan_time_seconds: 0.0, ..a }, BenchRecord { plan_time_seconds: 0.0, ..b });
        let csv = bench_suite(&[(8, 8)], &[6], 1, 11).unwrap().to_csv();
        assert!(csv.starts_with("vertex_count,agent_count,seed,plan_time_seconds"));
    }
}
