//! MWIS by dynamic programming over a nice tree decomposition.
//!
//! Tables are indexed by bitmask over the (sorted) bag; entry `S` holds the
//! best weight of an independent set in the processed subgraph whose
//! intersection with the bag is `S`. A vertex's weight is collected when it
//! is forgotten, so join nodes add tables without correction terms.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hardness::TreeDecomposition;
use crate::scalar::Weight;

pub const MAX_DP_WIDTH: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NiceNode {
    Leaf,
    Introduce { vertex: usize, child: usize },
    Forget { vertex: usize, child: usize },
    Join { left: usize, right: usize },
}

/// Nice tree decomposition; nodes are stored children-first and the last
/// node is the root, whose bag is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
    pub bags: Vec<Vec<usize>>,
}

impl NiceDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    fn push(&mut self, node: NiceNode, bag: Vec<usize>) -> usize {
        self.nodes.push(node);
        self.bags.push(bag);
        self.nodes.len() - 1
    }

    /// Introduces / forgets one vertex at a time to move from `from`'s bag to `target`.
    fn morph(&mut self, mut id: usize, target: &[usize]) -> usize {
        let forget: Vec<usize> = self.bags[id]
            .iter()
            .copied()
            .filter(|v| target.binary_search(v).is_err())
            .collect();
        for v in forget {
            let bag: Vec<usize> = self.bags[id].iter().copied().filter(|&u| u != v).collect();
            id = self.push(
                NiceNode::Forget {
                    vertex: v,
                    child: id,
                },
                bag,
            );
        }
        let intro: Vec<usize> = target
            .iter()
            .copied()
            .filter(|v| self.bags[id].binary_search(v).is_err())
            .collect();
        for v in intro {
            let mut bag = self.bags[id].clone();
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            id = self.push(
                NiceNode::Introduce {
                    vertex: v,
                    child: id,
                },
                bag,
            );
        }
        id
    }

    /// Converts a (validated) tree decomposition, rooted at bag 0.
    pub fn from_tree(td: &TreeDecomposition) -> Self {
        let mut nice = Self {
            nodes: Vec::new(),
            bags: Vec::new(),
        };
        let nb = td.bags.len();
        if nb == 0 {
            nice.push(NiceNode::Leaf, Vec::new());
            return nice;
        }
        let mut adj = vec![Vec::new(); nb];
        for &(a, b) in &td.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        // iterative post-order from bag 0
        let mut parent = vec![usize::MAX; nb];
        let mut order = Vec::with_capacity(nb);
        let mut stack = vec![0];
        parent[0] = 0;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &w in &adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    stack.push(w);
                }
            }
        }
        let mut built: Vec<Option<usize>> = vec![None; nb];
        let mut children = vec![Vec::new(); nb];
        for &u in order.iter().skip(1) {
            children[parent[u]].push(u);
        }
        for &u in order.iter().rev() {
            let target = &td.bags[u];
            let mut acc: Option<usize> = None;
            for &c in &children[u] {
                let sub = built[c].take().expect("child built first");
                let sub = nice.morph(sub, target);
                acc = Some(match acc {
                    None => sub,
                    Some(prev) => nice.push(
                        NiceNode::Join {
                            left: prev,
                            right: sub,
                        },
                        target.clone(),
                    ),
                });
            }
            let id = match acc {
                Some(id) => id,
                None => {
                    let leaf = nice.push(NiceNode::Leaf, Vec::new());
                    nice.morph(leaf, target)
                }
            };
            built[u] = Some(id);
        }
        let top = built[0].take().expect("root built");
        nice.morph(top, &[]);
        nice
    }
}

fn remove_bit(mask: usize, pos: usize) -> usize {
    let low = mask & ((1 << pos) - 1);
    let high = (mask >> (pos + 1)) << pos;
    low | high
}

fn insert_zero_bit(mask: usize, pos: usize) -> usize {
    let low = mask & ((1 << pos) - 1);
    let high = (mask >> pos) << (pos + 1);
    low | high
}

/// Exact MWIS weight using the given decomposition of `g`.
pub fn solve_treewidth_dp<W: Weight>(g: &Graph<W>, td: &TreeDecomposition) -> Result<W> {
    td.validate(g)?;
    if td.width > MAX_DP_WIDTH {
        return Err(Error::WidthTooLarge {
            width: td.width,
            max: MAX_DP_WIDTH,
        });
    }
    let nice = NiceDecomposition::from_tree(td);
    let mut tables: Vec<Option<Vec<Option<W>>>> = vec![None; nice.nodes.len()];
    for id in 0..nice.nodes.len() {
        let bag = &nice.bags[id];
        let table = match nice.nodes[id] {
            NiceNode::Leaf => vec![Some(W::zero())],
            NiceNode::Introduce { vertex, child } => {
                let ct = tables[child].take().expect("child table");
                let pos = bag
                    .binary_search(&vertex)
                    .expect("introduced vertex in bag");
                let nbr_mask = bag
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| g.has_edge(u, vertex))
                    .fold(0usize, |m, (i, _)| m | 1 << i);
                (0..1usize << bag.len())
                    .map(|s| {
                        if s >> pos & 1 == 0 {
                            ct[remove_bit(s, pos)]
                        } else if s & nbr_mask != 0 {
                            None
                        } else {
                            ct[remove_bit(s, pos)]
                        }
                    })
                    .collect()
            }
            NiceNode::Forget { vertex, child } => {
                let ct = tables[child].take().expect("child table");
                let pos = nice.bags[child]
                    .binary_search(&vertex)
                    .expect("forgotten vertex in child bag");
                let w = g.weight(vertex);
                (0..1usize << bag.len())
                    .map(|s| {
                        let without = ct[insert_zero_bit(s, pos)];
                        let with = ct[insert_zero_bit(s, pos) | 1 << pos].map(|x| x + w);
                        match (without, with) {
                            (Some(a), Some(b)) => Some(a.max_of(b)),
                            (a, b) => a.or(b),
                        }
                    })
                    .collect()
            }
            NiceNode::Join { left, right } => {
                let lt = tables[left].take().expect("left table");
                let rt = tables[right].take().expect("right table");
                lt.into_iter().zip(rt).map(|(a, b)| Some(a? + b?)).collect()
            }
        };
        tables[id] = Some(table);
    }
    let root = tables[nice.root()].take().expect("root table");
    Ok(root[0].unwrap_or(W::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::minfill_treewidth;

    #[test]
    fn path_and_cycle() {
        let p5 = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], None).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]],
            vec![(0, 1), (1, 2), (2, 3)],
        );
        assert_eq!(solve_treewidth_dp(&p5, &td).unwrap(), 3.0);
        let c6 = Graph::<f64>::build(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None)
            .unwrap();
        assert_eq!(
            solve_treewidth_dp(&c6, &minfill_treewidth(&c6)).unwrap(),
            3.0
        );
    }

    #[test]
    fn nice_shape() {
        let c6 = Graph::<f64>::build(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None)
            .unwrap();
        let nice = NiceDecomposition::from_tree(&minfill_treewidth(&c6));
        assert!(nice.bags[nice.root()].is_empty());
        let forgets = nice
            .nodes
            .iter()
            .filter(|n| matches!(n, NiceNode::Forget { .. }))
            .count();
        assert_eq!(forgets, 6);
        for (i, node) in nice.nodes.iter().enumerate() {
            match *node {
                NiceNode::Leaf => assert!(nice.bags[i].is_empty()),
                NiceNode::Join { left, right } => {
                    assert_eq!(nice.bags[left], nice.bags[i]);
                    assert_eq!(nice.bags[right], nice.bags[i]);
                }
                NiceNode::Introduce { child, .. } => {
                    assert_eq!(nice.bags[child].len() + 1, nice.bags[i].len())
                }
                NiceNode::Forget { child, .. } => {
                    assert_eq!(nice.bags[child].len(), nice.bags[i].len() + 1)
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_decomposition() {
        let c4 = Graph::<f64>::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        let bad = TreeDecomposition::new(vec![vec![0, 1, 2], vec![2, 3]], vec![(0, 1)]);
        let err = solve_treewidth_dp(&c4, &bad).unwrap_err();
        assert!(matches!(err, Error::InvalidDecomposition(_)));
    }

    #[test]
    fn rejects_wide_decomposition() {
        let n = 27;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let k = Graph::<f64>::build(n, &edges, None).unwrap();
        assert!(matches!(
            solve_treewidth_dp(&k, &minfill_treewidth(&k)),
            Err(Error::WidthTooLarge { width: 26, .. })
        ));
    }

    #[test]
    fn empty_graph() {
        let g = Graph::<f64>::empty(0);
        assert_eq!(solve_treewidth_dp(&g, &minfill_treewidth(&g)).unwrap(), 0.0);
    }
}
