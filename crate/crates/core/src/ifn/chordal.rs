use std::collections::BTreeSet;

/// Maximum cardinality search followed by a perfect-elimination check.
/// Returns the elimination ordering when the graph is chordal.
pub fn perfect_elimination_ordering(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        if a == b || a >= n || b >= n {
            return None;
        }
        adj[a].insert(b);
        adj[b].insert(a);
    }

    // MCS visits vertices in reverse elimination order.
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut order = vec![0usize; n];
    for slot in (0..n).rev() {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))?;
        numbered[v] = true;
        order[slot] = v;
        for &u in &adj[v] {
            if !numbered[u] {
                weight[u] += 1;
            }
        }
    }

    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    for &v in &order {
        let later: Vec<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&u| position[u] > position[v])
            .collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                if !adj[a].contains(&b) {
                    return None;
                }
            }
        }
    }
    Some(order)
}

pub fn is_chordal(n: usize, edges: &[(usize, usize)]) -> bool {
    perfect_elimination_ordering(n, edges).is_some()
}
