//! Seeded instance generators.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Cell, Graph, VertexId};
use crate::io::InstanceFile;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{agents} agents need {} free cells, only {free} available", 2 * agents)]
    TooCrowded { agents: usize, free: usize },
    #[error("need at least one agent")]
    NoAgents,
    #[error("tight family needs n >= 1 and ell >= 2, got n={n} ell={ell}")]
    BadTightParams { n: usize, ell: usize },
    #[error("could not place {holes} holes in a {cols}x{rows} grid without disconnecting it")]
    HolesDisconnect { cols: usize, rows: usize, holes: usize },
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random disjoint starts and goals on a hole-free grid, drawn uniformly
/// without replacement.
pub fn gen_random(cols: usize, rows: usize, agents: usize, seed: u64) -> Result<InstanceFile, GenError> {
    gen_random_with_holes(cols, rows, agents, 0, seed)
}

/// Like [`gen_random`] but first removes `holes` random cells while keeping
/// the grid connected.
pub fn gen_random_with_holes(
    cols: usize,
    rows: usize,
    agents: usize,
    holes: usize,
    seed: u64,
) -> Result<InstanceFile, GenError> {
    if agents == 0 {
        return Err(GenError::NoAgents);
    }
    let cells = cols * rows;
    let free = cells.saturating_sub(holes);
    if 2 * agents > free {
        return Err(GenError::TooCrowded { agents, free });
    }
    let mut rng = rng(seed);
    let hole_set = place_holes(cols, rows, holes, &mut rng)?;
    let open: Vec<Cell> = (0..rows)
        .flat_map(|row| (0..cols).map(move |col| Cell::new(col, row)))
        .filter(|c| !hole_set.contains(c))
        .collect();
    let picked = sample(&mut rng, open.len(), 2 * agents);
    let picked: Vec<Cell> = picked.iter().map(|i| open[i]).collect();
    Ok(InstanceFile::grid(cols, rows, &hole_set, &picked[..agents], &picked[agents..]))
}

fn place_holes(cols: usize, rows: usize, holes: usize, rng: &mut ChaCha8Rng) -> Result<BTreeSet<Cell>, GenError> {
    if holes == 0 {
        return Ok(BTreeSet::new());
    }
    for _ in 0..100 {
        let set: BTreeSet<Cell> =
            sample(rng, cols * rows, holes).iter().map(|i| Cell::new(i % cols, i / cols)).collect();
        if Graph::grid(cols, rows, &set).is_ok() {
            return Ok(set);
        }
    }
    Err(GenError::HolesDisconnect { cols, rows, holes })
}

/// Two stars whose centres are joined by a path: `n` start leaves on one
/// centre, `n` goal leaves on the other, every start–goal distance `ell`.
///
/// Ids: starts `0..n`, then the `ell - 1` path vertices from the start
/// centre to the goal centre, then the goals.
pub fn gen_tight(n: usize, ell: usize) -> Result<InstanceFile, GenError> {
    if n == 0 || ell < 2 {
        return Err(GenError::BadTightParams { n, ell });
    }
    let spine: Vec<VertexId> = (n..n + ell - 1).collect();
    let first_goal = n + ell - 1;
    let (near, far) = (spine[0], spine[spine.len() - 1]);
    let mut edges: Vec<(VertexId, VertexId)> = (0..n).map(|s| (s, near)).collect();
    edges.extend(spine.windows(2).map(|w| (w[0], w[1])));
    edges.extend((0..n).map(|j| (far, first_goal + j)));
    let starts: Vec<_> = (0..n).collect();
    let goals: Vec<_> = (first_goal..first_goal + n).collect();
    Ok(InstanceFile::explicit(first_goal + n, &edges, &starts, &goals))
}

/// Small random connected graph (random spanning tree plus `extra` chords)
/// with random disjoint starts and goals. Feeds the exhaustive oracles.
pub fn gen_small_graph(vertices: usize, agents: usize, extra: usize, seed: u64) -> Result<InstanceFile, GenError> {
    if agents == 0 {
        return Err(GenError::NoAgents);
    }
    if 2 * agents > vertices {
        return Err(GenError::TooCrowded { agents, free: vertices });
    }
    let mut rng = rng(seed);
    let mut edges = BTreeSet::new();
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..vertices);
        let v = rng.gen_range(0..vertices);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    let picked: Vec<_> = sample(&mut rng, vertices, 2 * agents).into_vec();
    Ok(InstanceFile::explicit(vertices, &edges, &picked[..agents], &picked[agents..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::distance_matrix;

    #[test]
    fn random_grid_is_valid_and_deterministic() {
        let f = gen_random(21, 21, 75, 7).unwrap();
        let inst = f.to_instance().unwrap();
        let mut cells: Vec<_> = inst.starts().iter().chain(inst.goals()).collect();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 150);
        assert_eq!(f, gen_random(21, 21, 75, 7).unwrap());
        assert_ne!(f, gen_random(21, 21, 75, 8).unwrap());
    }

    #[test]
    fn only_possible_instance() {
        let inst = gen_random(2, 1, 1, 3).unwrap().to_instance().unwrap();
        let mut both = vec![inst.starts()[0], inst.goals()[0]];
        both.sort();
        assert_eq!(both, vec![0, 1]);
        assert_eq!(gen_random(2, 1, 2, 3), Err(GenError::TooCrowded { agents: 2, free: 2 }));
    }

    #[test]
    fn holes_keep_grid_connected() {
        for seed in 0..20 {
            let inst = gen_random_with_holes(6, 6, 4, 8, seed).unwrap().to_instance().unwrap();
            assert_eq!(inst.graph().vertex_count(), 28);
        }
    }

    #[test]
    fn tight_family_shape() {
        let inst = gen_tight(4, 5).unwrap().to_instance().unwrap();
        assert_eq!(inst.graph().vertex_count(), 12);
        let m = distance_matrix(&inst);
        assert!(m.rows().iter().flatten().all(|&d| d == 5));

        let inst = gen_tight(1, 2).unwrap().to_instance().unwrap();
        assert_eq!(inst.graph().vertex_count(), 3);
        assert_eq!(inst.graph().edge_count(), 2);
        assert_eq!(distance_matrix(&inst).rows(), vec![vec![2]]);

        assert_eq!(gen_tight(0, 3), Err(GenError::BadTightParams { n: 0, ell: 3 }));
        assert_eq!(gen_tight(2, 1), Err(GenError::BadTightParams { n: 2, ell: 1 }));
    }

    #[test]
    fn small_graphs_are_connected() {
        for seed in 0..50 {
            let inst = gen_small_graph(8, 3, 2, seed).unwrap().to_instance().unwrap();
            assert_eq!(inst.agent_count(), 3);
        }
    }
}
