//! Strongly connected components (iterative Tarjan).

/// Decomposes a directed graph given as adjacency lists into strongly
/// connected components. Components are returned in reverse topological
/// order (a component only has edges into components listed before it),
/// with node lists sorted ascending.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS stack of (node, next child position).
    let mut work: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        work.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut child)) = work.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
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
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Component index per node for a decomposition produced by [`sccs`].
pub fn component_ids(n: usize, components: &[Vec<usize>]) -> Vec<usize> {
    let mut ids = vec![usize::MAX; n];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            ids[v] = c;
        }
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn two_cycles_and_a_bridge() {
        // 0 <-> 1 -> 2 <-> 3, 4 isolated
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let comps: BTreeSet<Vec<usize>> = sccs(&adj).into_iter().collect();
        let expected: BTreeSet<Vec<usize>> =
            [vec![0, 1], vec![2, 3], vec![4]].into_iter().collect();
        assert_eq!(comps, expected);
    }

    #[test]
    fn reverse_topological_order() {
        // 0 -> 1 -> 2 (three singleton components)
        let adj = vec![vec![1], vec![2], vec![]];
        let comps = sccs(&adj);
        assert_eq!(comps, vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn self_loop_is_its_own_component() {
        let adj = vec![vec![0], vec![]];
        let comps: BTreeSet<Vec<usize>> = sccs(&adj).into_iter().collect();
        assert!(comps.contains(&vec![0]));
        assert!(comps.contains(&vec![1]));
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 50_000;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| if i + 1 < n { vec![i + 1] } else { vec![] })
            .collect();
        assert_eq!(sccs(&adj).len(), n);
    }
}
