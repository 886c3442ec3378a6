//! Transportation simplex on a dense bipartite cost matrix.
//!
//! Supplies and demands are integers, so basic flows stay integral and the
//! row/column balance is exact. Costs are real; optimality is declared when
//! every reduced cost clears a small negative tolerance, and the final basis
//! is re-verified by a full scan before returning.

use crate::{Error, Result};

pub(crate) struct TransportSolution {
    /// Basic cells with positive flow, in units of the integer grid.
    pub flows: Vec<(usize, usize, u64)>,
    /// Total cost in flow units (sum of units * cost).
    pub unit_cost: f64,
}

#[derive(Clone, Copy)]
struct BasicCell {
    i: usize,
    j: usize,
    flow: u64,
    alive: bool,
}

/// Solves min sum c[i*nt+j] x[i][j] s.t. row sums = supplies, col sums =
/// demands. Requires sum(supplies) == sum(demands) and all entries positive.
pub(crate) fn solve_transport(
    costs: &[f64],
    ns: usize,
    nt: usize,
    supplies: &[u64],
    demands: &[u64],
) -> Result<TransportSolution> {
    assert_eq!(costs.len(), ns * nt);
    assert_eq!(supplies.len(), ns);
    assert_eq!(demands.len(), nt);
    let total_supply: u64 = supplies.iter().sum();
    let total_demand: u64 = demands.iter().sum();
    assert_eq!(total_supply, total_demand, "unbalanced transport problem");

    let n_nodes = ns + nt;
    let n_basic = ns + nt - 1;
    let cost_scale = costs.iter().cloned().fold(0.0f64, f64::max).max(1.0);
    let tol = 1e-12 * cost_scale;

    // --- initial basis: row-greedy allocation to the cheapest open column ---
    let mut cells: Vec<BasicCell> = Vec::with_capacity(n_basic + 4);
    {
        let mut sup = supplies.to_vec();
        let mut dem = demands.to_vec();
        let mut col_open = vec![true; nt];
        let mut row = 0usize;
        while cells.len() < n_basic {
            let mut best_j = usize::MAX;
            let mut best_c = f64::INFINITY;
            for j in 0..nt {
                if col_open[j] && costs[row * nt + j] < best_c {
                    best_c = costs[row * nt + j];
                    best_j = j;
                }
            }
            let j = best_j;
            let alloc = sup[row].min(dem[j]);
            cells.push(BasicCell {
                i: row,
                j,
                flow: alloc,
                alive: true,
            });
            sup[row] -= alloc;
            dem[j] -= alloc;
            if cells.len() == n_basic {
                break;
            }
            if dem[j] == 0 {
                // on simultaneous exhaustion close only the column; the row
                // then emits a degenerate zero cell next round
                col_open[j] = false;
            } else {
                row += 1;
            }
        }
    }

    // node -> incident basic cell ids
    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(4); n_nodes];
    for (id, c) in cells.iter().enumerate() {
        adj[c.i].push(id as u32);
        adj[ns + c.j].push(id as u32);
    }

    let mut pot = vec![0.0f64; n_nodes];
    let mut order: Vec<u32> = Vec::with_capacity(n_nodes); // BFS traversal scratch
    let mut visited = vec![false; n_nodes];

    let recompute_potentials = |cells: &[BasicCell],
                                adj: &[Vec<u32>],
                                pot: &mut [f64],
                                order: &mut Vec<u32>,
                                visited: &mut [bool]| {
        visited.iter_mut().for_each(|v| *v = false);
        order.clear();
        pot[0] = 0.0;
        visited[0] = true;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let node = order[head] as usize;
            head += 1;
            for &cid in &adj[node] {
                let c = &cells[cid as usize];
                let (a, b) = (c.i, ns + c.j);
                let other = if a == node { b } else { a };
                if !visited[other] {
                    visited[other] = true;
                    pot[other] = costs[c.i * nt + c.j] - pot[node];
                    order.push(other as u32);
                }
            }
        }
    };

    recompute_potentials(&cells, &adj, &mut pot, &mut order, &mut visited);

    let block = (((ns * nt) as f64).sqrt().ceil() as usize)
        .max(64)
        .min(ns * nt);
    let mut cursor = 0usize;
    let max_pivots = 2000 * n_nodes + 10_000;
    let mut pivots = 0usize;

    // scratch for cycle search
    let mut parent_cell: Vec<u32> = vec![u32::MAX; n_nodes];

    loop {
        // --- entering arc: best of successive blocks, wrap-around scan ---
        let mut entering: Option<(usize, usize)> = None;
        let mut scanned = 0usize;
        let total_cells = ns * nt;
        'scan: while scanned < total_cells {
            let mut best = -tol;
            let mut best_cell = None;
            let upto = block.min(total_cells - scanned);
            for _ in 0..upto {
                let idx = cursor;
                cursor += 1;
                if cursor == total_cells {
                    cursor = 0;
                }
                let i = idx / nt;
                let j = idx % nt;
                let reduced = costs[idx] - pot[i] - pot[ns + j];
                if reduced < best {
                    best = reduced;
                    best_cell = Some((i, j));
                }
            }
            scanned += upto;
            if let Some(cell) = best_cell {
                entering = Some(cell);
                break 'scan;
            }
        }

        let Some((ei, ej)) = entering else {
            break; // optimal
        };

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Estimation(
                "transport solver exceeded pivot cap; possible degeneracy cycling".into(),
            ));
        }

        // --- unique tree path from sink ej back to source ei ---
        visited.iter_mut().for_each(|v| *v = false);
        parent_cell.iter_mut().for_each(|p| *p = u32::MAX);
        order.clear();
        let start = ns + ej;
        let goal = ei;
        visited[start] = true;
        order.push(start as u32);
        let mut head = 0;
        while head < order.len() && !visited[goal] {
            let node = order[head] as usize;
            head += 1;
            for &cid in &adj[node] {
                let c = &cells[cid as usize];
                let (a, b) = (c.i, ns + c.j);
                let other = if a == node { b } else { a };
                if !visited[other] {
                    visited[other] = true;
                    parent_cell[other] = cid;
                    order.push(other as u32);
                    if goal == other {
                        break;
                    }
                }
            }
        }
        debug_assert!(visited[goal], "basis must be a spanning tree");

        // path cells from ei back to ej alternate -theta, +theta, ...
        let mut theta = u64::MAX;
        let mut leaving: u32 = u32::MAX;
        {
            let mut node = goal;
            let mut minus = true;
            while node != start {
                let cid = parent_cell[node];
                let c = &cells[cid as usize];
                if minus && c.flow < theta {
                    theta = c.flow;
                    leaving = cid;
                }
                let (a, b) = (c.i, ns + c.j);
                node = if a == node { b } else { a };
                minus = !minus;
            }
        }
        debug_assert!(leaving != u32::MAX);

        // apply the flow change around the cycle
        {
            let mut node = goal;
            let mut minus = true;
            while node != start {
                let cid = parent_cell[node] as usize;
                let (a, b) = (cells[cid].i, ns + cells[cid].j);
                if minus {
                    cells[cid].flow -= theta;
                } else {
                    cells[cid].flow += theta;
                }
                node = if a == node { b } else { a };
                minus = !minus;
            }
        }

        // swap leaving for entering
        let leave = cells[leaving as usize];
        cells[leaving as usize].alive = false;
        adj[leave.i].retain(|&c| c != leaving);
        adj[ns + leave.j].retain(|&c| c != leaving);
        let new_id = cells.len() as u32;
        cells.push(BasicCell {
            i: ei,
            j: ej,
            flow: theta,
            alive: true,
        });
        adj[ei].push(new_id);
        adj[ns + ej].push(new_id);

        recompute_potentials(&cells, &adj, &mut pot, &mut order, &mut visited);
    }

    // --- certify: reduced costs over the whole matrix, exact balance ---
    let verify_tol = 1e-7 * cost_scale;
    for i in 0..ns {
        for j in 0..nt {
            let reduced = costs[i * nt + j] - pot[i] - pot[ns + j];
            if reduced < -verify_tol {
                return Err(Error::Estimation(format!(
                    "transport optimality check failed: reduced cost {reduced:.3e} at ({i},{j})"
                )));
            }
        }
    }
    let mut row_sum = vec![0u64; ns];
    let mut col_sum = vec![0u64; nt];
    let mut unit_cost = 0.0f64;
    let mut flows = Vec::new();
    for c in cells.iter().filter(|c| c.alive) {
        row_sum[c.i] += c.flow;
        col_sum[c.j] += c.flow;
        if c.flow > 0 {
            unit_cost += c.flow as f64 * costs[c.i * nt + c.j];
            flows.push((c.i, c.j, c.flow));
        }
    }
    if row_sum != supplies || col_sum != demands {
        return Err(Error::Estimation(
            "transport balance check failed; solver produced an infeasible plan".into(),
        ));
    }

    Ok(TransportSolution { flows, unit_cost })
}

#[cfg(test)]
pub(crate) mod testutil {
    /// Exhaustive minimum over all integer matrices with the given margins.
    /// Every vertex of the transportation polytope is integral, so this is
    /// the exact optimum.
    pub(crate) fn brute_force_min(
        costs: &[f64],
        ns: usize,
        nt: usize,
        supplies: &[u64],
        demands: &[u64],
    ) -> f64 {
        fn rec(
            costs: &[f64],
            nt: usize,
            row: usize,
            ns: usize,
            sup: &mut [u64],
            dem: &mut [u64],
            acc: f64,
            best: &mut f64,
        ) {
            if row == ns {
                if *best > acc {
                    *best = acc;
                }
                return;
            }
            // enumerate splits of sup[row] over columns
            fn split(
                costs: &[f64],
                nt: usize,
                row: usize,
                ns: usize,
                col: usize,
                left: u64,
                sup: &mut [u64],
                dem: &mut [u64],
                acc: f64,
                best: &mut f64,
            ) {
                if acc >= *best {
                    return;
                }
                if col == nt {
                    if left == 0 {
                        rec(costs, nt, row + 1, ns, sup, dem, acc, best);
                    }
                    return;
                }
                let max_here = left.min(dem[col]);
                for put in 0..=max_here {
                    dem[col] -= put;
                    split(
                        costs,
                        nt,
                        row,
                        ns,
                        col + 1,
                        left - put,
                        sup,
                        dem,
                        acc + put as f64 * costs[row * nt + col],
                        best,
                    );
                    dem[col] += put;
                }
            }
            let left = sup[row];
            split(costs, nt, row, ns, 0, left, sup, dem, acc, best);
        }
        let mut best = f64::INFINITY;
        let mut sup = supplies.to_vec();
        let mut dem = demands.to_vec();
        rec(costs, nt, 0, ns, &mut sup, &mut dem, 0.0, &mut best);
        best
    }
}
