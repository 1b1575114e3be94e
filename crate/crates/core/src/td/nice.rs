use std::collections::VecDeque;

use super::{TdError, TreeDecomposition, ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    /// No children, empty bag.
    Leaf,
    /// Bag is the child's bag plus `vertex`, which sits at bit `pos` of this bag.
    Introduce { vertex: usize, pos: usize },
    /// Bag is the child's bag minus `vertex`, which sat at bit `pos` of the child's bag.
    Forget { vertex: usize, pos: usize },
    /// Two children with the same bag as this node.
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted; bit `k` of a bag subset mask refers to `bag[k]`.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A rooted nice tree decomposition with empty leaf and root bags.
///
/// Nodes are stored children-first: every child has a smaller index than its
/// parent and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    width: usize,
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NiceNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The same bags as a plain tree decomposition.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (i, p)))
            .collect();
        TreeDecomposition::new(bags, edges)
    }

    /// Checks every node against its tag rule, plus the root and ordering
    /// conventions. Returns the first offending node.
    pub fn check_structure(&self) -> Result<(), String> {
        let root = self.root();
        if !self.nodes[root].bag.is_empty() || self.nodes[root].parent.is_some() {
            return Err("root must have an empty bag and no parent".into());
        }
        let mut max_bag = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            max_bag = max_bag.max(node.bag.len());
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("node {i}: bag not strictly sorted"));
            }
            for &c in &node.children {
                if c >= i || self.nodes[c].parent != Some(i) {
                    return Err(format!("node {i}: bad child link to {c}"));
                }
            }
            if i != root && node.parent.is_none() {
                return Err(format!("node {i}: only the root may lack a parent"));
            }
            let child_bag = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce { vertex, pos } => {
                    node.children.len() == 1 && node.bag.get(pos) == Some(&vertex) && {
                        let mut expected = node.bag.clone();
                        expected.remove(pos);
                        &expected == child_bag(0)
                    }
                }
                NiceKind::Forget { vertex, pos } => {
                    node.children.len() == 1 && child_bag(0).get(pos) == Some(&vertex) && {
                        let mut expected = child_bag(0).clone();
                        expected.remove(pos);
                        expected == node.bag
                    }
                }
                NiceKind::Join => {
                    node.children.len() == 2
                        && child_bag(0) == &node.bag
                        && child_bag(1) == &node.bag
                }
            };
            if !ok {
                return Err(format!("node {i}: violates the {:?} rule", node.kind));
            }
        }
        if max_bag.saturating_sub(1) != self.width {
            return Err(format!(
                "recorded width {} but largest bag has {} vertices",
                self.width, max_bag
            ));
        }
        Ok(())
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        let id = self.nodes.len();
        for &c in &children {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
            parent: None,
        });
        id
    }

    /// Extends the chain topped by `top` until its bag equals `target`:
    /// forgets first, then introduces.
    fn morph(&mut self, mut top: usize, target: &[usize]) -> usize {
        let current = self.nodes[top].bag.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            let child_bag = &self.nodes[top].bag;
            let pos = child_bag.binary_search(&v).unwrap();
            let mut bag = child_bag.clone();
            bag.remove(pos);
            top = self.push(NiceKind::Forget { vertex: v, pos }, bag, vec![top]);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let mut bag = self.nodes[top].bag.clone();
            let pos = bag.binary_search(&v).unwrap_err();
            bag.insert(pos, v);
            top = self.push(NiceKind::Introduce { vertex: v, pos }, bag, vec![top]);
        }
        top
    }
}

/// Converts a decomposition whose bags form a tree into nice form of the
/// same width, rooted at bag 0. Bag contents are not checked against any
/// graph; run [`super::validate_td`] for that.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceDecomposition, TdError> {
    if let Err(why) = td.is_tree() {
        return Err(TdError::Invalid(ValidationReport {
            violations: vec![Violation::NotATree(why)],
        }));
    }
    let mut b = Builder { nodes: Vec::new() };
    if td.bags.is_empty() {
        b.push(NiceKind::Leaf, Vec::new(), Vec::new());
        return Ok(NiceDecomposition {
            nodes: b.nodes,
            width: 0,
        });
    }

    let adj = td.tree_adjacency().expect("checked by is_tree");
    let k = td.bags.len();
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut queue = VecDeque::from([0]);
    parent[0] = 0;
    while let Some(a) = queue.pop_front() {
        order.push(a);
        for &c in &adj[a] {
            if parent[c] == usize::MAX {
                parent[c] = a;
                queue.push_back(c);
            }
        }
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &a in order.iter().skip(1) {
        children[parent[a]].push(a);
    }

    let mut top = vec![usize::MAX; k];
    for &a in order.iter().rev() {
        let bag = &td.bags[a];
        let node = if children[a].is_empty() {
            let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
            b.morph(leaf, bag)
        } else {
            let mut acc: Option<usize> = None;
            for &c in &children[a] {
                let branch = b.morph(top[c], bag);
                acc = Some(match acc {
                    None => branch,
                    Some(left) => b.push(NiceKind::Join, bag.clone(), vec![left, branch]),
                });
            }
            acc.unwrap()
        };
        top[a] = node;
    }
    let root = b.morph(top[0], &[]);
    debug_assert_eq!(root, b.nodes.len() - 1);

    Ok(NiceDecomposition {
        nodes: b.nodes,
        width: td.width(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gnm, Graph};
    use crate::td::{greedy_td, validate_td, EliminationStrategy};

    #[test]
    fn single_bag_chain() {
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![]);
        let nd = make_nice(&td).unwrap();
        let kinds: Vec<NiceKind> = nd.nodes().iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf,
                NiceKind::Introduce { vertex: 0, pos: 0 },
                NiceKind::Introduce { vertex: 1, pos: 1 },
                NiceKind::Introduce { vertex: 2, pos: 2 },
                NiceKind::Forget { vertex: 0, pos: 0 },
                NiceKind::Forget { vertex: 1, pos: 0 },
                NiceKind::Forget { vertex: 2, pos: 0 },
            ]
        );
        nd.check_structure().unwrap();
        assert_eq!(nd.width(), 2);
    }

    #[test]
    fn equal_bags_collapse_without_join() {
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![0, 1]], vec![(0, 1)]);
        let nd = make_nice(&td).unwrap();
        assert!(nd.nodes().iter().all(|n| n.kind != NiceKind::Join));
        assert_eq!(nd.len(), 5);
        nd.check_structure().unwrap();
    }

    #[test]
    fn star_of_bags_uses_joins() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![(0, 1), (0, 2), (0, 3)],
        );
        let nd = make_nice(&td).unwrap();
        nd.check_structure().unwrap();
        assert_eq!(
            nd.nodes()
                .iter()
                .filter(|n| n.kind == NiceKind::Join)
                .count(),
            2
        );
        assert!(validate_td(&g, &nd.to_tree_decomposition()).is_ok());
    }

    #[test]
    fn every_vertex_forgotten_once() {
        for seed in 0..30 {
            let g = gnm(25, 45, seed).unwrap();
            let td = greedy_td(&g, EliminationStrategy::MinFill);
            let nd = make_nice(&td).unwrap();
            nd.check_structure().unwrap();
            assert_eq!(nd.width(), td.width());
            assert!(validate_td(&g, &nd.to_tree_decomposition()).is_ok());
            let mut forgotten = vec![0; g.n()];
            for node in nd.nodes() {
                if let NiceKind::Forget { vertex, .. } = node.kind {
                    forgotten[vertex] += 1;
                }
            }
            assert!(forgotten.iter().all(|&c| c == 1), "seed {seed}");
            assert!(nd.len() <= (2 * td.width() + 4) * (td.bags.len() + 1));
        }
    }

    #[test]
    fn empty_decomposition() {
        let nd = make_nice(&TreeDecomposition::new(vec![], vec![])).unwrap();
        assert_eq!(nd.len(), 1);
        nd.check_structure().unwrap();
    }

    #[test]
    fn rejects_non_tree() {
        let td = TreeDecomposition::new(vec![vec![0], vec![1]], vec![]);
        assert!(matches!(make_nice(&td), Err(TdError::Invalid(_))));
    }
}
