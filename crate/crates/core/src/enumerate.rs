//! Exhaustive enumeration of `M_{n,d}` for tiny `n`.
//!
//! Two independent strategies are provided so each can serve as an oracle for
//! the other: row-by-row backtracking over column capacities, and assembly of
//! `d` pairwise-disjoint permutation matrices (every d-regular bipartite graph
//! decomposes into `d` perfect matchings).

use std::collections::BTreeSet;

use crate::{Error, RegularMatrix, Result};

/// Hard cap on `n` for enumeration.
pub const MAX_ENUM_N: usize = 7;

/// All d-regular `n × n` 0/1 matrices in canonical (lexicographic) order.
pub fn enumerate_all(n: usize, d: usize) -> Result<Vec<RegularMatrix>> {
    check_size(n, d)?;
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut capacity = vec![d; n];
    backtrack_rows(n, d, &mut rows, &mut capacity, &mut out);
    Ok(out)
}

fn backtrack_rows(
    n: usize,
    d: usize,
    rows: &mut Vec<Vec<usize>>,
    capacity: &mut [usize],
    out: &mut Vec<RegularMatrix>,
) {
    let i = rows.len();
    if i == n {
        out.push(RegularMatrix::from_row_supports(n, d, rows.clone()).expect("backtracking keeps sums"));
        return;
    }
    let remaining_after = n - i - 1;
    // subsets of size d, visited in lexicographic order
    let mut subset = Vec::with_capacity(d);
    choose_row(n, d, 0, &mut subset, capacity, remaining_after, &mut |row, cap| {
        rows.push(row.to_vec());
        backtrack_rows(n, d, rows, cap, out);
        rows.pop();
    });
}

fn choose_row(
    n: usize,
    d: usize,
    start: usize,
    subset: &mut Vec<usize>,
    capacity: &mut [usize],
    remaining_after: usize,
    visit: &mut dyn FnMut(&[usize], &mut [usize]),
) {
    if subset.len() == d {
        for &j in subset.iter() {
            capacity[j] -= 1;
        }
        // every column must still be fillable by the rows that remain
        if capacity.iter().all(|&c| c <= remaining_after) {
            let row = subset.clone();
            visit(&row, capacity);
        }
        for &j in subset.iter() {
            capacity[j] += 1;
        }
        return;
    }
    let need = d - subset.len();
    for j in start..n {
        if n - j < need {
            break;
        }
        if capacity[j] == 0 {
            continue;
        }
        subset.push(j);
        choose_row(n, d, j + 1, subset, capacity, remaining_after, visit);
        subset.pop();
    }
}

/// Same set as [`enumerate_all`], built as unions of `d` disjoint permutation
/// matrices and deduplicated. Independent of the backtracking enumerator.
pub fn enumerate_by_matchings(n: usize, d: usize) -> Result<Vec<RegularMatrix>> {
    check_size(n, d)?;
    let perms = permutations(n);
    let mut seen: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    let mut used = vec![vec![false; n]; n];
    collect_matchings(&perms, d, 0, &mut used, &mut seen);
    Ok(seen
        .into_iter()
        .map(|rows| RegularMatrix::from_row_supports(n, d, rows).expect("union of disjoint permutations"))
        .collect())
}

fn collect_matchings(
    perms: &[Vec<usize>],
    remaining: usize,
    start: usize,
    used: &mut Vec<Vec<bool>>,
    seen: &mut BTreeSet<Vec<Vec<usize>>>,
) {
    if remaining == 0 {
        let rows = used
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect())
            .collect();
        seen.insert(rows);
        return;
    }
    for (k, p) in perms.iter().enumerate().skip(start) {
        if p.iter().enumerate().any(|(i, &j)| used[i][j]) {
            continue;
        }
        for (i, &j) in p.iter().enumerate() {
            used[i][j] = true;
        }
        collect_matchings(perms, remaining - 1, k + 1, used, seen);
        for (i, &j) in p.iter().enumerate() {
            used[i][j] = false;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, free: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == free.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..free.len() {
            if free[j] {
                free[j] = false;
                cur.push(j);
                go(cur, free, out);
                cur.pop();
                free[j] = true;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![true; n], &mut out);
    out
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge { what: "n", value: n as u128, cap: MAX_ENUM_N as u128 });
    }
    if n == 0 || d == 0 || d > n {
        return Err(Error::InvalidParameter(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_all(3, 1).unwrap().len(), 6);
        assert_eq!(enumerate_all(2, 2).unwrap(), vec![RegularMatrix::all_ones(2)]);
        for n in 1..=6 {
            let fact: usize = (1..=n).product();
            let all = enumerate_all(n, 1).unwrap();
            assert_eq!(all.len(), fact);
            assert!(all.iter().all(|m| m.rows().iter().all(|r| r.len() == 1)));
        }
    }

    #[test]
    fn sorted_and_unique() {
        let all = enumerate_all(4, 2).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumerators_agree_up_to_five() {
        for n in 1..=5 {
            for d in 1..=n {
                let a = enumerate_all(n, d).unwrap();
                let b = enumerate_by_matchings(n, d).unwrap();
                assert_eq!(a, b, "n = {n}, d = {d}");
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        // M ↦ J − M is a bijection M_{n,d} → M_{n,n−d}
        for n in 2..=5 {
            for d in 1..n {
                assert_eq!(enumerate_all(n, d).unwrap().len(), enumerate_all(n, n - d).unwrap().len());
            }
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(enumerate_all(8, 2), Err(Error::TooLarge { .. })));
        assert!(matches!(enumerate_all(3, 4), Err(Error::InvalidParameter(_))));
    }
}
