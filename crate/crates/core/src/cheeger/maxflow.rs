//! Highest-label push-relabel maximum flow with the gap heuristic and
//! periodic global relabeling. Only the first phase runs: the preflow it
//! leaves behind already determines a minimum cut.

use std::collections::VecDeque;

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    n: usize,
    edges: Vec<(usize, usize, f64, f64)>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Arc u→v with capacity `forward` and v→u with capacity `backward`.
    pub fn add_edge(&mut self, u: usize, v: usize, forward: f64, backward: f64) {
        debug_assert!(u < self.n && v < self.n && u != v);
        self.edges.push((u, v, forward, backward));
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone)]
pub struct MinCut {
    /// Flow value reaching the sink.
    pub value: f64,
    /// `true` for nodes on the source side of the cut.
    pub source_side: Vec<bool>,
}

struct Residual {
    start: Vec<usize>,
    to: Vec<usize>,
    rev: Vec<usize>,
    cap: Vec<f64>,
}

impl Residual {
    fn build(net: &FlowNetwork) -> Self {
        let n = net.n;
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _, _) in &net.edges {
            degree[u + 1] += 1;
            degree[v + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let start = degree;
        let m = start[n];
        let mut fill = start[..n].to_vec();
        let (mut to, mut rev, mut cap) = (vec![0; m], vec![0; m], vec![0.0; m]);
        for &(u, v, f, b) in &net.edges {
            let (a, r) = (fill[u], fill[v]);
            fill[u] += 1;
            fill[v] += 1;
            to[a] = v;
            cap[a] = f;
            rev[a] = r;
            to[r] = u;
            cap[r] = b;
            rev[r] = a;
        }
        Self { start, to, rev, cap }
    }
}

/// Computes a minimum s–t cut. Residual capacities and excesses at or below
/// `eps` are treated as zero.
pub fn min_cut(net: &FlowNetwork, s: usize, t: usize, eps: f64) -> MinCut {
    let n = net.n;
    let mut g = Residual::build(net);
    let mut height = vec![0usize; n];
    let mut excess = vec![0.0f64; n];
    let mut current = g.start[..n].to_vec();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut count = vec![0usize; n + 1];

    for a in g.start[s]..g.start[s + 1] {
        let c = g.cap[a];
        if c > 0.0 {
            let v = g.to[a];
            g.cap[a] = 0.0;
            g.cap[g.rev[a]] += c;
            excess[v] += c;
            excess[s] -= c;
        }
    }

    let global_relabel = |g: &Residual,
                          height: &mut Vec<usize>,
                          buckets: &mut Vec<Vec<usize>>,
                          count: &mut Vec<usize>,
                          excess: &[f64]|
     -> usize {
        height.iter_mut().for_each(|h| *h = n);
        height[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(u) = queue.pop_front() {
            for a in g.start[u]..g.start[u + 1] {
                let v = g.to[a];
                if v != s && height[v] == n && g.cap[g.rev[a]] > eps {
                    height[v] = height[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        buckets.iter_mut().for_each(Vec::clear);
        count.iter_mut().for_each(|c| *c = 0);
        let mut highest = 0;
        for v in 0..n {
            if height[v] < n {
                count[height[v]] += 1;
                if v != t && excess[v] > eps {
                    buckets[height[v]].push(v);
                    highest = highest.max(height[v]);
                }
            }
        }
        highest
    };

    let mut highest = global_relabel(&g, &mut height, &mut buckets, &mut count, &excess);
    let mut relabels = 0usize;

    loop {
        while highest > 0 && buckets[highest].is_empty() {
            highest -= 1;
        }
        let Some(u) = buckets[highest].pop() else {
            break;
        };
        if height[u] != highest || excess[u] <= eps || u == t {
            continue;
        }
        // discharge u
        while excess[u] > eps {
            if current[u] == g.start[u + 1] {
                let old = height[u];
                let mut lowest = n;
                for a in g.start[u]..g.start[u + 1] {
                    if g.cap[a] > eps {
                        lowest = lowest.min(height[g.to[a]] + 1);
                    }
                }
                count[old] -= 1;
                relabels += 1;
                if count[old] == 0 {
                    for v in 0..n {
                        if height[v] > old && height[v] < n {
                            count[height[v]] -= 1;
                            height[v] = n;
                        }
                    }
                    height[u] = n;
                    break;
                }
                height[u] = lowest.min(n);
                if height[u] >= n {
                    break;
                }
                count[height[u]] += 1;
                current[u] = g.start[u];
                continue;
            }
            let a = current[u];
            let v = g.to[a];
            if g.cap[a] > eps && height[u] == height[v] + 1 {
                let delta = excess[u].min(g.cap[a]);
                g.cap[a] -= delta;
                g.cap[g.rev[a]] += delta;
                excess[u] -= delta;
                let was_active = excess[v] > eps;
                excess[v] += delta;
                if v != t && v != s && !was_active && excess[v] > eps {
                    buckets[height[v]].push(v);
                }
            } else {
                current[u] += 1;
            }
        }
        if height[u] < n && excess[u] > eps {
            buckets[height[u]].push(u);
        }
        highest = highest.max(height[u].min(n - 1));
        if relabels >= n {
            relabels = 0;
            current.copy_from_slice(&g.start[..n]);
            highest = global_relabel(&g, &mut height, &mut buckets, &mut count, &excess);
        }
    }

    // nodes that can still reach t in the residual graph form the sink side
    let mut sink_side = vec![false; n];
    sink_side[t] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(u) = queue.pop_front() {
        for a in g.start[u]..g.start[u + 1] {
            let v = g.to[a];
            if !sink_side[v] && g.cap[g.rev[a]] > eps {
                sink_side[v] = true;
                queue.push_back(v);
            }
        }
    }
    MinCut {
        value: excess[t],
        source_side: sink_side.into_iter().map(|b| !b).collect(),
    }
}
