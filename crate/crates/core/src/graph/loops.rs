//! Simple-cycle enumeration (Johnson's algorithm) over a causal map.
//!
//! Every simple directed cycle is reported exactly once: rotations of the
//! same node sequence are one loop. Self-loops count as 1-node cycles so
//! that malformed candidate maps still get a total loop count.

use std::collections::HashSet;

use super::{loop_polarity, CausalMap, FeedbackLoop, GraphError, Polarity};

/// Simple-cycle counts grow exponentially in dense graphs; enumeration
/// aborts with an error once a map proves to have more loops than this.
pub const DEFAULT_LOOP_CAP: usize = 100_000;

pub fn enumerate_loops(map: &CausalMap) -> Result<Vec<FeedbackLoop>, GraphError> {
    enumerate_loops_with_cap(map, DEFAULT_LOOP_CAP)
}

pub fn enumerate_loops_with_cap(
    map: &CausalMap,
    cap: usize,
) -> Result<Vec<FeedbackLoop>, GraphError> {
    // Index nodes in sorted name order so index order == lexicographic order
    // and Johnson's root (the least vertex of each circuit) is already the
    // canonical rotation start.
    let mut names: Vec<&str> = map.variables().collect();
    names.sort_unstable();
    let index_of = |name: &str| names.binary_search(&name).expect("known variable");

    let n = names.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut polarity_of = std::collections::HashMap::new();
    let mut loops: Vec<FeedbackLoop> = Vec::new();

    for rel in map.relationships() {
        let from = index_of(&rel.from);
        let to = index_of(&rel.to);
        if from == to {
            // 1-node cycle.
            loops.push(FeedbackLoop::new(
                vec![rel.from.clone()],
                loop_polarity(&[rel.polarity])?,
            ));
            continue;
        }
        adjacency[from].push(to);
        polarity_of.insert((from, to), rel.polarity);
    }
    for targets in &mut adjacency {
        targets.sort_unstable();
    }

    let mut johnson = Johnson::new(&adjacency);
    johnson.run(cap, &mut |cycle: &[usize]| {
        let edges: Vec<Polarity> = cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(a, b)| polarity_of[&(*a, *b)])
            .collect();
        let nodes = cycle.iter().map(|&i| names[i].to_string()).collect();
        loops.push(FeedbackLoop::new(nodes, loop_polarity(&edges)?));
        Ok(())
    })?;

    if loops.len() > cap {
        return Err(GraphError::LoopExplosion { cap });
    }
    loops.sort_by(|a, b| a.nodes().cmp(b.nodes()));
    Ok(loops)
}

struct Johnson<'a> {
    adjacency: &'a [Vec<usize>],
    blocked: Vec<bool>,
    block_list: Vec<HashSet<usize>>,
    path: Vec<usize>,
    found: usize,
}

impl<'a> Johnson<'a> {
    fn new(adjacency: &'a [Vec<usize>]) -> Self {
        let n = adjacency.len();
        Johnson {
            adjacency,
            blocked: vec![false; n],
            block_list: vec![HashSet::new(); n],
            path: Vec::new(),
            found: 0,
        }
    }

    fn run(
        &mut self,
        cap: usize,
        emit: &mut dyn FnMut(&[usize]) -> Result<(), GraphError>,
    ) -> Result<(), GraphError> {
        let n = self.adjacency.len();
        let mut start = 0;
        while start < n {
            // Least vertex over all non-trivial SCCs of the subgraph induced
            // by {start..n}; circuits rooted there cannot be missed later.
            let Some((root, component)) = least_nontrivial_scc(self.adjacency, start) else {
                break;
            };
            for v in 0..n {
                self.blocked[v] = false;
                self.block_list[v].clear();
            }
            self.circuit(root, root, &component, cap, emit)?;
            start = root + 1;
        }
        Ok(())
    }

    fn circuit(
        &mut self,
        v: usize,
        root: usize,
        component: &HashSet<usize>,
        cap: usize,
        emit: &mut dyn FnMut(&[usize]) -> Result<(), GraphError>,
    ) -> Result<bool, GraphError> {
        let mut found_here = false;
        self.path.push(v);
        self.blocked[v] = true;
        for i in 0..self.adjacency[v].len() {
            let w = self.adjacency[v][i];
            if !component.contains(&w) {
                continue;
            }
            if w == root {
                emit(&self.path)?;
                self.found += 1;
                if self.found > cap {
                    return Err(GraphError::LoopExplosion { cap });
                }
                found_here = true;
            } else if !self.blocked[w] && self.circuit(w, root, component, cap, emit)? {
                found_here = true;
            }
        }
        if found_here {
            self.unblock(v);
        } else {
            for i in 0..self.adjacency[v].len() {
                let w = self.adjacency[v][i];
                if component.contains(&w) {
                    self.block_list[w].insert(v);
                }
            }
        }
        self.path.pop();
        Ok(found_here)
    }

    fn unblock(&mut self, v: usize) {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            self.blocked[u] = false;
            for w in self.block_list[u].drain() {
                if self.blocked[w] {
                    stack.push(w);
                }
            }
        }
    }
}

/// Find, in the subgraph induced by vertices >= `start`, the strongly
/// connected component with at least 2 vertices containing the smallest
/// vertex; returns (that vertex, the component's vertex set).
fn least_nontrivial_scc(
    adjacency: &[Vec<usize>],
    start: usize,
) -> Option<(usize, HashSet<usize>)> {
    let components = tarjan_scc(adjacency, start);
    components
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| (*c.iter().min().expect("non-empty scc"), c))
        .min_by_key(|(least, _)| *least)
        .map(|(least, c)| (least, c.into_iter().collect()))
}

/// Iterative Tarjan over the subgraph induced by vertices >= `start`.
fn tarjan_scc(adjacency: &[Vec<usize>], start: usize) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut components = Vec::new();

    // (vertex, next-neighbor position)
    let mut work: Vec<(usize, usize)> = Vec::new();
    for v0 in start..n {
        if index[v0] != usize::MAX {
            continue;
        }
        work.push((v0, 0));
        while let Some(&mut (v, ref mut pos)) = work.last_mut() {
            if *pos == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let mut advanced = false;
            while *pos < adjacency[v].len() {
                let w = adjacency[v][*pos];
                *pos += 1;
                if w < start {
                    continue;
                }
                if index[w] == usize::MAX {
                    work.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LoopPolarity;

    fn map_of(edges: &[(&str, &str, Polarity)]) -> CausalMap {
        let mut map = CausalMap::new();
        for (from, to, polarity) in edges {
            map.add_relationship(from, to, *polarity, None).unwrap();
        }
        map
    }

    #[test]
    fn predprey_is_one_balancing_loop() {
        let map = map_of(&[
            ("predators", "prey", Polarity::Negative),
            ("prey", "predators", Polarity::Positive),
        ]);
        let loops = enumerate_loops(&map).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].polarity(), LoopPolarity::Balancing);
        assert_eq!(loops[0].nodes(), ["predators", "prey"]);
    }

    #[test]
    fn disjoint_two_cycles() {
        let map = map_of(&[
            ("a", "b", Polarity::Positive),
            ("b", "a", Polarity::Positive),
            ("c", "d", Polarity::Positive),
            ("d", "c", Polarity::Positive),
        ]);
        assert_eq!(enumerate_loops(&map).unwrap().len(), 2);
    }

    #[test]
    fn complete_digraph_on_three_nodes() {
        // Expected count verified by the brute-force oracle in
        // tests/cycle_oracle.rs: three 2-cycles plus two 3-cycles.
        let map = map_of(&[
            ("a", "b", Polarity::Positive),
            ("b", "a", Polarity::Positive),
            ("a", "c", Polarity::Positive),
            ("c", "a", Polarity::Positive),
            ("b", "c", Polarity::Positive),
            ("c", "b", Polarity::Positive),
        ]);
        let loops = enumerate_loops(&map).unwrap();
        assert_eq!(loops.len(), 5);
        assert!(loops.iter().all(|l| l.polarity() == LoopPolarity::Reinforcing));
        let lengths: Vec<usize> = loops.iter().map(|l| l.len()).collect();
        assert_eq!(lengths.iter().filter(|&&n| n == 2).count(), 3);
        assert_eq!(lengths.iter().filter(|&&n| n == 3).count(), 2);
    }

    #[test]
    fn empty_map_has_no_loops() {
        assert!(enumerate_loops(&CausalMap::new()).unwrap().is_empty());
    }

    #[test]
    fn self_loop_counts_as_one_node_cycle() {
        let map = map_of(&[("a", "a", Polarity::Negative)]);
        let loops = enumerate_loops(&map).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].nodes(), ["a"]);
        assert_eq!(loops[0].polarity(), LoopPolarity::Balancing);
    }

    #[test]
    fn cap_trips_with_named_limit() {
        // Complete digraph on 6 nodes has 409 simple cycles.
        let names = ["a", "b", "c", "d", "e", "f"];
        let mut map = CausalMap::new();
        for from in names {
            for to in names {
                if from != to {
                    map.add_relationship(from, to, Polarity::Positive, None)
                        .unwrap();
                }
            }
        }
        assert_eq!(enumerate_loops(&map).unwrap().len(), 409);
        assert_eq!(
            enumerate_loops_with_cap(&map, 100),
            Err(GraphError::LoopExplosion { cap: 100 })
        );
    }

    #[test]
    fn output_is_sorted_by_canonical_rotation() {
        let map = map_of(&[
            ("c", "d", Polarity::Positive),
            ("d", "c", Polarity::Positive),
            ("a", "b", Polarity::Positive),
            ("b", "a", Polarity::Positive),
        ]);
        let loops = enumerate_loops(&map).unwrap();
        assert_eq!(loops[0].nodes(), ["a", "b"]);
        assert_eq!(loops[1].nodes(), ["c", "d"]);
    }
}
