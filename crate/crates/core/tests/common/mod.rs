#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use formation::generate::gen_random_with_holes;
use formation::{Instance, PathSet, VertexId};

/// Seeded random grid instance, with holes on every other seed.
pub fn random_grid_instance(seed: u64, max_side: usize, max_agents: usize) -> Instance {
    let mut s = seed;
    let mut next = |m: usize| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 33) as usize) % m
    };
    loop {
        let cols = 2 + next(max_side - 1);
        let rows = 1 + next(max_side);
        let cells = cols * rows;
        let holes = if seed % 2 == 1 { next(cells / 5 + 1) } else { 0 };
        let free = cells - holes;
        if free < 2 {
            continue;
        }
        let agents = 1 + next((free / 2).min(max_agents));
        if let Ok(file) = gen_random_with_holes(cols, rows, agents, holes, seed) {
            return file.to_instance().expect("generated instances are valid");
        }
    }
}

/// Plain BFS kept apart from the library's implementation.
pub fn reference_bfs(instance: &Instance, source: VertexId) -> Vec<usize> {
    let g = instance.graph();
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[source] = 0;
    let mut q = VecDeque::from([source]);
    while let Some(u) = q.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Largest start–goal distance.
pub fn reference_ell(instance: &Instance) -> usize {
    instance
        .starts()
        .iter()
        .map(|&s| {
            let d = reference_bfs(instance, s);
            instance.goals().iter().map(|&g| d[g]).max().unwrap()
        })
        .max()
        .unwrap()
}

/// Checks the sequential-transfer ordering directly: for every suffix
/// `q_i..q_n`, `q_i` is a shortest path over the suffix's directed edges from
/// one of its starts to one of its standalone goals.
pub fn check_release_order(ordered: &PathSet) -> Result<(), String> {
    let paths = ordered.paths();
    for i in 0..paths.len() {
        let mut count: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
        for p in &paths[i..] {
            for (u, v) in p.steps() {
                *count.entry((u, v)).or_default() += 1;
            }
        }
        let starts: BTreeSet<_> = paths[i..].iter().map(|p| p.head()).collect();
        let standalone: BTreeSet<_> = paths[i..]
            .iter()
            .map(|p| p.tail())
            .filter(|&g| !count.keys().any(|&(u, _)| u == g))
            .collect();
        if standalone.is_empty() {
            return Err(format!("suffix {i} has no standalone goal"));
        }
        let q = &paths[i];
        if !standalone.contains(&q.tail()) {
            return Err(format!("path {i} ends at non-standalone goal {}", q.tail()));
        }
        // multi-source BFS over the suffix edges
        let mut dist: BTreeMap<VertexId, usize> = starts.iter().map(|&s| (s, 0)).collect();
        let mut queue: VecDeque<_> = starts.iter().copied().collect();
        let mut best = usize::MAX;
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if standalone.contains(&u) {
                best = best.min(d);
            }
            for (&(a, b), _) in count.range((u, 0)..=(u, VertexId::MAX)) {
                debug_assert_eq!(a, u);
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(b) {
                    slot.insert(d + 1);
                    queue.push_back(b);
                }
            }
        }
        if q.len() != best {
            return Err(format!("path {i} has length {} but the shortest start-to-standalone route is {best}", q.len()));
        }
    }
    Ok(())
}
