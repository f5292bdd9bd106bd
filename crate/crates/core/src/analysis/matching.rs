/// Maximum-weight assignment on a rectangular matrix (rows to distinct
/// columns, or columns to distinct rows when there are fewer columns).
/// Returns, for each row, the assigned column if any.
pub fn hungarian_max(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let size = rows.max(cols);
    if size == 0 {
        return Vec::new();
    }
    let max = weights
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    // Square cost matrix, 1-based for the potential-based algorithm.
    let cost = |i: usize, j: usize| -> f64 {
        if i <= rows && j <= cols {
            max - weights[i - 1][j - 1]
        } else {
            max
        }
    };
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![None; rows];
    for j in 1..=size {
        let i = p[j];
        if (1..=rows).contains(&i) && j <= cols {
            assignment[i - 1] = Some(j - 1);
        }
    }
    assignment
}

/// `counts[i][j]` = number of positions with `a == i` and `b == j`.
pub fn confusion_matrix(a: &[usize], b: &[usize]) -> Vec<Vec<f64>> {
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![vec![0.0; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        counts[x][y] += 1.0;
    }
    counts
}

/// Fraction of positions that agree after relabelling `a` onto `b` with the
/// maximum-overlap one-to-one matching. Label counts may differ.
pub fn label_agreement(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "label sequences differ in length");
    if a.is_empty() {
        return 1.0;
    }
    let counts = confusion_matrix(a, b);
    let matched: f64 = hungarian_max(&counts)
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| counts[i][j]))
        .sum();
    matched / a.len() as f64
}

/// `a` relabelled onto `b`'s label space with the maximum-overlap matching.
/// Labels of `a` left unmatched map to `usize::MAX`.
pub fn matched_labels(a: &[usize], b: &[usize]) -> Vec<usize> {
    let counts = confusion_matrix(a, b);
    let assignment = hungarian_max(&counts);
    a.iter()
        .map(|&x| assignment[x].unwrap_or(usize::MAX))
        .collect()
}
