//! Minimum-cost perfect matching of starts to goals.
//!
//! [`hungarian`] solves the assignment with the shortest-augmenting-path
//! form of the Hungarian method (`O(n^3)`), then walks the equality subgraph
//! of the optimal dual to pick the lexicographically smallest optimal
//! permutation. Every optimal matching lives on tight edges of any optimal
//! dual, so the tie-break never costs optimality.

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("cost matrix row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("negative cost {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: i64 },
    #[error("exhaustive search limited to n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
}

/// `sigma[i]` is the goal index assigned to start `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub sigma: Vec<usize>,
    pub total_cost: i64,
}

/// Largest `n` accepted by [`oracle_min_assignment`].
pub const ORACLE_LIMIT: usize = 8;

fn validate<R: AsRef<[i64]>>(cost: &[R]) -> Result<(), AssignmentError> {
    let n = cost.len();
    for (row, r) in cost.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != n {
            return Err(AssignmentError::NonSquare { row, len: r.len(), expected: n });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &c)| c < 0) {
            return Err(AssignmentError::NegativeEntry { row, col, value });
        }
    }
    Ok(())
}

pub fn hungarian<R: AsRef<[i64]>>(cost: &[R]) -> Result<Assignment, AssignmentError> {
    validate(cost)?;
    let n = cost.len();
    if n == 0 {
        return Ok(Assignment { sigma: Vec::new(), total_cost: 0 });
    }
    let at = |i: usize, j: usize| cost[i].as_ref()[j];

    // 1-based potentials; column 0 is the virtual root of each augmentation
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![INF; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = INF);
        used.iter_mut().for_each(|f| *f = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut sigma = vec![0usize; n];
    for j in 1..=n {
        sigma[owner[j] - 1] = j - 1;
    }
    let tight = |i: usize, j: usize| at(i, j) - u[i + 1] - v[j + 1] == 0;
    lexicographic_min_matching(n, &tight, &mut sigma);

    let total_cost = sigma.iter().enumerate().map(|(i, &j)| at(i, j)).sum();
    Ok(Assignment { sigma, total_cost })
}

/// Rewrites a perfect matching on the tight graph into the lexicographically
/// smallest perfect matching on the same graph.
///
/// Rows are fixed in ascending order. Row `i` can move to a smaller column `j`
/// exactly when an alternating cycle through `(i, j)` exists among the
/// unfixed rows; one backward search from `i`'s current column finds every
/// row that can hand its column along such a cycle.
fn lexicographic_min_matching(n: usize, tight: &dyn Fn(usize, usize) -> bool, sigma: &mut [usize]) {
    // column -> rows with a tight edge into it
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if tight(i, j) {
                into[j].push(i);
                row_cols[i].push(j);
            }
        }
    }
    let mut mate = vec![0usize; n];
    for (i, &j) in sigma.iter().enumerate() {
        mate[j] = i;
    }
    let mut col_fixed = vec![false; n];
    let mut row_seen = vec![usize::MAX; n];
    let mut next_col = vec![0usize; n];
    let mut queue = Vec::new();

    for i in 0..n {
        let target = sigma[i];
        let smallest_free = row_cols[i].iter().copied().find(|&j| !col_fixed[j]);
        if smallest_free == Some(target) {
            col_fixed[target] = true;
            continue;
        }
        // rows r > i that can reach `target` by alternating tight edges
        queue.clear();
        queue.push(target);
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for &r in &into[c] {
                if r > i && row_seen[r] != i {
                    row_seen[r] = i;
                    next_col[r] = c;
                    queue.push(sigma[r]);
                }
            }
        }
        let chosen = row_cols[i]
            .iter()
            .copied()
            .find(|&j| !col_fixed[j] && (j == target || row_seen[mate[j]] == i))
            .expect("current column is always a candidate");
        if chosen != target {
            // rotate columns along the cycle i -> chosen -> ... -> target
            let mut r = mate[chosen];
            sigma[i] = chosen;
            mate[chosen] = i;
            loop {
                let c = next_col[r];
                let prev_owner = mate[c];
                sigma[r] = c;
                mate[c] = r;
                if c == target {
                    break;
                }
                r = prev_owner;
            }
        }
        col_fixed[sigma[i]] = true;
    }
}

/// Exact minimum by enumerating all permutations. Verification only.
pub fn oracle_min_assignment<R: AsRef<[i64]>>(cost: &[R]) -> Result<i64, AssignmentError> {
    validate(cost)?;
    let n = cost.len();
    if n > ORACLE_LIMIT {
        return Err(AssignmentError::TooLarge { n, limit: ORACLE_LIMIT });
    }
    Ok((0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i].as_ref()[j]).sum::<i64>())
        .min()
        .unwrap_or(0))
}
