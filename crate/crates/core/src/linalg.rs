//! Small dense exact linear algebra over Z and Q.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{int, Q};

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank over Q of a list of integer rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let q: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    rank_q(q)
}

pub fn rank_q(rows: Vec<Vec<Q>>) -> usize {
    row_echelon(rows).len()
}

/// Reduced row echelon form; returns the nonzero rows as `(pivot column, row)`.
pub fn row_echelon(mut rows: Vec<Vec<Q>>) -> Vec<(usize, Vec<Q>)> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    for row in rows.into_iter().take(r) {
        let pivot = row.iter().position(|x| !x.is_zero()).expect("pivot row is nonzero");
        out.push((pivot, row));
    }
    out
}

/// Indices of a maximal linearly independent subset of the rows, chosen greedily
/// in order.
pub fn independent_rows(rows: &[Vec<Q>]) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut basis: Vec<Vec<Q>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(row.clone());
        if rank_q(trial.clone()) > basis.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    chosen
}

/// Solves `a x = b` for a matrix of full column rank; `None` when inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.push(b[i].clone());
            r
        })
        .collect();
    let ech = row_echelon(aug);
    let mut x = vec![Q::zero(); cols];
    for (p, row) in &ech {
        if *p == cols {
            return None;
        }
        x[*p] = row[cols].clone();
    }
    if ech.len() < cols {
        return None;
    }
    Some(x)
}

/// Integer normal vector to the span of `n - 1` vectors in Zⁿ (generalized cross
/// product), divided by its content. Zero when the vectors are dependent.
pub fn normal_vector(vectors: &[Vec<i64>], n: usize) -> Vec<i64> {
    debug_assert_eq!(vectors.len() + 1, n);
    let mut out = vec![0i64; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let minor: Vec<Vec<i64>> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let d = det(&minor);
        let s = if k % 2 == 0 { d } else { -d };
        *slot = i64::try_from(s).expect("cofactor fits in i64");
    }
    primitive(&out)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Dimension of the affine span of a point set.
pub fn affine_rank(points: &[Vec<i64>]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            let diffs: Vec<Vec<i64>> = rest
                .iter()
                .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            rank(&diffs)
        }
    }
}

/// Rows `I` of an `n x k` matrix (given by its `k` columns) whose `k x k` minor
/// is nonzero.
pub fn nonsingular_rows(columns: &[Vec<i64>]) -> Option<Vec<usize>> {
    use itertools::Itertools;
    let k = columns.len();
    let n = columns.first().map_or(0, |c| c.len());
    (0..n).combinations(k).find(|rows| {
        let m: Vec<Vec<i64>> = rows
            .iter()
            .map(|&r| columns.iter().map(|c| c[r]).collect())
            .collect();
        det(&m) != 0
    })
}

/// Inverse of a square rational matrix.
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let aug: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r = m[i].clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let ech = row_echelon(aug);
    if ech.len() < n || ech.iter().enumerate().any(|(i, (p, _))| *p != i) {
        return None;
    }
    Some(ech.into_iter().map(|(_, r)| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        assert_eq!(det(&[vec![2, 3], vec![1, 4]]), 5);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(
            det(&[vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]),
            1
        );
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(det(&[]), 1);
    }

    #[test]
    fn rank_of_proportional_rows() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 1, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]), 3);
    }

    #[test]
    fn normal_is_orthogonal() {
        let vs = vec![vec![1, 0, 1], vec![0, 2, 2]];
        let nv = normal_vector(&vs, 3);
        for v in &vs {
            assert_eq!(v.iter().zip(&nv).map(|(a, b)| a * b).sum::<i64>(), 0);
        }
        assert_eq!(normal_vector(&[], 1), vec![1]);
    }

    #[test]
    fn solve_and_inverse() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve(&a, &[int(3), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][0], crate::rational::ratio(3, 5));
        assert!(solve(&[vec![int(1)], vec![int(1)]], &[int(1), int(2)]).is_none());
    }
}
