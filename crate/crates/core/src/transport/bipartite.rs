//! Exact transportation between the positive and negative parts of a measure
//! by the primal network simplex method.
//!
//! The basis is a spanning tree on sources, sinks and an artificial root.
//! Entering arcs come from block search over the dense cost matrix; the
//! leaving arc follows the strongly feasible rule, which rules out cycling on
//! the heavily degenerate bases these problems produce. Node potentials give
//! the dual pair: `c_ij − u_i − v_j ≥ 0` everywhere, with equality on flow.

use rayon::prelude::*;

use super::{EngineTag, Flow, KrResult, TransportPlan};
use crate::domains::DiscreteSignedMeasure;
use crate::error::{Error, Result};

/// Largest number of atoms on either side of the transportation problem.
pub const MAX_SIDE: usize = 4096;

/// Atoms lighter than this fraction of the total variation are dropped.
const DROP_FRACTION: f64 = 1e-15;

/// Reduced costs above `−OPTIMALITY_SLACK · ART` count as nonnegative.
const OPTIMALITY_SLACK: f64 = 1e-13;

const NONE: usize = usize::MAX;

/// Optimal flows with the dual pair certifying them.
#[derive(Clone, Debug)]
pub struct TransportSolution {
    /// `(source, sink, mass)` sorted by source then sink.
    pub flows: Vec<(usize, usize, f64)>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub cost: f64,
}

/// Minimizes `Σ c_ij x_ij` over `x ≥ 0` with row sums `supply` and column sums
/// `demand`. `cost` is row-major `supply.len() × demand.len()`. Deterministic:
/// pricing scans arcs in a fixed cyclic order.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> TransportSolution {
    let n = supply.len();
    let m = demand.len();
    assert_eq!(cost.len(), n * m, "cost matrix shape");
    if n == 0 || m == 0 {
        return TransportSolution {
            flows: Vec::new(),
            u: vec![0.0; n],
            v: vec![0.0; m],
            cost: 0.0,
        };
    }
    let mut sx = Simplex::new(supply, demand, cost);
    sx.run();
    sx.finish()
}

/// Spanning-tree basis. Nodes `0..n` are sources, `n..n+m` sinks, `n+m` the
/// root. Arc `i·m + j` joins source `i` to sink `j`; arc `n·m + u` is the
/// artificial arc between node `u` and the root.
struct Simplex<'a> {
    n: usize,
    m: usize,
    cost: &'a [f64],
    art_cost: f64,
    parent: Vec<usize>,
    /// Tree arc joining the node to its parent.
    pred: Vec<usize>,
    /// The tree arc points from the node to its parent.
    up: Vec<bool>,
    /// Flow on the tree arc.
    flow: Vec<f64>,
    pi: Vec<f64>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    next_arc: usize,
    block: usize,
    path: Vec<usize>,
    stack: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(supply: &[f64], demand: &[f64], cost: &'a [f64]) -> Self {
        let (n, m) = (supply.len(), demand.len());
        let nodes = n + m;
        let root = nodes;
        let cmax = cost.iter().copied().fold(0.0, f64::max);
        // Any unit routed through the root costs more than a direct arc.
        let art_cost = 1.0 + 2.0 * cmax;
        let mut parent = vec![root; nodes + 1];
        parent[root] = NONE;
        let pred: Vec<usize> = (0..=nodes).map(|u| n * m + u).collect();
        let mut up = vec![true; nodes + 1];
        let mut flow = vec![0.0; nodes + 1];
        let mut pi = vec![0.0; nodes + 1];
        flow[..n].copy_from_slice(&supply[..n]);
        for j in 0..m {
            up[n + j] = false;
            flow[n + j] = demand[j];
            pi[n + j] = art_cost;
        }
        let mut depth = vec![1; nodes + 1];
        depth[root] = 0;
        let mut children = vec![Vec::new(); nodes + 1];
        children[root] = (0..nodes).collect();
        let arcs = n * m;
        Simplex {
            n,
            m,
            cost,
            art_cost,
            parent,
            pred,
            up,
            flow,
            pi,
            depth,
            children,
            next_arc: 0,
            block: ((arcs as f64).sqrt() as usize).max(10).min(arcs),
            path: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.n * self.m {
            self.cost[e]
        } else if e - self.n * self.m < self.n {
            0.0
        } else {
            self.art_cost
        }
    }

    /// Block search: the most negative reduced cost within the first block
    /// that has one, scanning cyclically from where the last search stopped.
    fn find_entering(&mut self) -> Option<usize> {
        let (n, m) = (self.n, self.m);
        let arcs = n * m;
        let tol = -OPTIMALITY_SLACK * self.art_cost;
        let mut best = tol;
        let mut found = NONE;
        let mut scanned = 0;
        let mut e = self.next_arc;
        let mut in_block = 0;
        while scanned < arcs {
            let (i, j) = (e / m, e % m);
            let r = self.cost[e] + self.pi[i] - self.pi[n + j];
            if r < best {
                best = r;
                found = e;
            }
            scanned += 1;
            in_block += 1;
            e += 1;
            if e == arcs {
                e = 0;
            }
            if in_block == self.block {
                if found != NONE {
                    self.next_arc = e;
                    return Some(found);
                }
                in_block = 0;
            }
        }
        if found != NONE {
            self.next_arc = e;
            Some(found)
        } else {
            None
        }
    }

    fn run(&mut self) {
        while let Some(e) = self.find_entering() {
            self.pivot(e);
        }
    }

    fn pivot(&mut self, in_arc: usize) {
        let (n, m) = (self.n, self.m);
        let first = in_arc / m;
        let second = n + in_arc % m;

        let (mut a, mut b) = (first, second);
        while a != b {
            if self.depth[a] > self.depth[b] {
                a = self.parent[a];
            } else if self.depth[b] > self.depth[a] {
                b = self.parent[b];
            } else {
                a = self.parent[a];
                b = self.parent[b];
            }
        }
        let join = a;

        // Flow runs first → second on the entering arc, up from `second` to
        // the join and down from the join to `first`. Ties on the second
        // side win, which keeps the tree strongly feasible.
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut first_side = true;
        let mut u = first;
        while u != join {
            if self.up[u] && self.flow[u] < delta {
                delta = self.flow[u];
                u_out = u;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != join {
            if !self.up[u] && self.flow[u] <= delta {
                delta = self.flow[u];
                u_out = u;
                first_side = false;
            }
            u = self.parent[u];
        }
        debug_assert!(u_out != NONE, "uncapacitated cycle with no blocking arc");

        if delta > 0.0 {
            let mut u = first;
            while u != join {
                if self.up[u] {
                    self.flow[u] -= delta;
                } else {
                    self.flow[u] += delta;
                }
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                if self.up[u] {
                    self.flow[u] += delta;
                } else {
                    self.flow[u] -= delta;
                }
                u = self.parent[u];
            }
        }

        let (u_in, v_in) = if first_side {
            (first, second)
        } else {
            (second, first)
        };
        // Reverse the tree path u_in → u_out and hang it below v_in.
        self.path.clear();
        let mut x = u_in;
        loop {
            self.path.push(x);
            if x == u_out {
                break;
            }
            x = self.parent[x];
        }
        let mut carried = (in_arc, u_in == first, delta);
        let mut new_parent = v_in;
        for k in 0..self.path.len() {
            let x = self.path[k];
            let old = (self.pred[x], self.up[x], self.flow[x]);
            let old_parent = self.parent[x];
            let list = &mut self.children[old_parent];
            let pos = list.iter().position(|&c| c == x).expect("child link");
            list.swap_remove(pos);
            self.parent[x] = new_parent;
            self.pred[x] = carried.0;
            self.up[x] = carried.1;
            self.flow[x] = carried.2;
            self.children[new_parent].push(x);
            carried = (old.0, !old.1, old.2);
            new_parent = x;
        }
        self.refresh_subtree(u_in);
    }

    /// Depths and potentials below `top`, from its parent downwards.
    fn refresh_subtree(&mut self, top: usize) {
        self.stack.clear();
        self.stack.push(top);
        while let Some(x) = self.stack.pop() {
            let p = self.parent[x];
            let c = self.arc_cost(self.pred[x]);
            self.depth[x] = self.depth[p] + 1;
            self.pi[x] = if self.up[x] {
                self.pi[p] - c
            } else {
                self.pi[p] + c
            };
            self.stack.extend_from_slice(&self.children[x]);
        }
    }

    fn finish(self) -> TransportSolution {
        let (n, m) = (self.n, self.m);
        let mut flows: Vec<(usize, usize, f64)> = (0..n + m)
            .filter(|&x| self.pred[x] < n * m && self.flow[x] > 0.0)
            .map(|x| {
                let e = self.pred[x];
                (e / m, e % m, self.flow[x])
            })
            .collect();
        flows.sort_by_key(|a| (a.0, a.1));
        let total_cost = flows
            .iter()
            .map(|&(i, j, f)| f * self.cost[i * m + j])
            .sum();
        TransportSolution {
            flows,
            u: self.pi[..n].iter().map(|p| -p).collect(),
            v: self.pi[n..n + m].to_vec(),
            cost: total_cost,
        }
    }
}

/// Exact norm of `μ` under the space metric, with plan and dual potential.
///
/// The potential is extended from the sinks to every atom by the
/// inf-convolution `f(x) = min_j (ρ(x, y_j) + f(y_j))`, which is 1-Lipschitz
/// and agrees with the transport duals on the support.
pub fn kr_bipartite(mu: &DiscreteSignedMeasure) -> Result<KrResult> {
    let space = mu.space();
    let variation = mu.total_variation();
    if variation == 0.0 {
        let plan = TransportPlan::default();
        return Ok(KrResult::new(
            0.0,
            EngineTag::Bipartite,
            Some(plan),
            Some(vec![0.0; space.len()]),
            mu,
        ));
    }
    let floor = DROP_FRACTION * variation;
    let sources: Vec<(usize, f64)> = mu
        .entries()
        .iter()
        .copied()
        .filter(|&(_, x)| x >= floor)
        .collect();
    let sinks: Vec<(usize, f64)> = mu
        .entries()
        .iter()
        .filter(|&&(_, x)| -x >= floor)
        .map(|&(i, x)| (i, -x))
        .collect();
    for (what, side) in [("positive part", &sources), ("negative part", &sinks)] {
        if side.len() > MAX_SIDE {
            return Err(Error::SizeLimit {
                what,
                got: side.len(),
                limit: MAX_SIDE,
            });
        }
    }

    let m = sinks.len();
    let mut cost = vec![0.0; sources.len() * m];
    cost.par_chunks_mut(m.max(1))
        .zip(sources.par_iter())
        .for_each(|(row, &(a, _))| {
            for (c, &(b, _)) in row.iter_mut().zip(&sinks) {
                *c = space.distance(a, b);
            }
        });
    let supply: Vec<f64> = sources.iter().map(|s| s.1).collect();
    let demand: Vec<f64> = sinks.iter().map(|s| s.1).collect();
    let sol = solve_transport(&supply, &demand, &cost);

    let flows: Vec<Flow> = sol
        .flows
        .iter()
        .map(|&(i, j, f)| Flow {
            src: sources[i].0,
            dst: sinks[j].0,
            mass: f,
        })
        .collect();
    let plan_cost: f64 = flows
        .iter()
        .map(|f| f.mass * space.distance(f.src, f.dst))
        .sum();

    let g: Vec<f64> = sol.v.iter().map(|v| -v).collect();
    let mut potential: Vec<f64> = (0..space.len())
        .into_par_iter()
        .map(|x| {
            sinks
                .iter()
                .zip(&g)
                .map(|(&(y, _), gy)| space.distance(x, y) + gy)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let shift = potential[space.base_point()];
    potential.iter_mut().for_each(|f| *f -= shift);

    let plan = TransportPlan {
        flows,
        cost: plan_cost,
    };
    Ok(KrResult::new(
        plan_cost,
        EngineTag::Bipartite,
        Some(plan),
        Some(potential),
        mu,
    ))
}
