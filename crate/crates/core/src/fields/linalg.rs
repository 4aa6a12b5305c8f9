//! Dense linear algebra over F_p.

use crate::modp::inv_mod_p;

/// Row-major transpose of a list of columns.
pub fn transpose(cols: &[Vec<u64>], rows: usize) -> Vec<Vec<u64>> {
    (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// Reduced row echelon form of a matrix, kept with the row operations so that
/// right-hand sides can be solved later.
pub struct FpSolver {
    p: u64,
    rows: usize,
    cols: usize,
    rref: Vec<Vec<u64>>,
    /// Accumulated row transform: rref = t * original.
    t: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSolver {
    pub fn new(a: &[Vec<u64>], p: u64) -> Self {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
        let mut t: Vec<Vec<u64>> = (0..rows)
            .map(|i| (0..rows).map(|j| u64::from(i == j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, piv);
            t.swap(r, piv);
            let inv = inv_mod_p(m[r][c], p);
            for x in m[r].iter_mut() {
                *x = *x * inv % p;
            }
            for x in t[r].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in 0..cols {
                        m[i][j] = (m[i][j] + (p - f) * m[r][j]) % p;
                    }
                    for j in 0..rows {
                        t[i][j] = (t[i][j] + (p - f) * t[r][j]) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        FpSolver { p, rows, cols, rref: m, t, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A particular solution of A x = b, if consistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let tb: Vec<u64> = (0..self.rows)
            .map(|i| self.t[i].iter().zip(b).fold(0, |acc, (x, y)| (acc + x * (y % p)) % p))
            .collect();
        if tb[self.rank()..].iter().any(|&x| x != 0) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (i, &c) in self.pivots.iter().enumerate() {
            x[c] = tb[i];
        }
        Some(x)
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (i, &c) in self.pivots.iter().enumerate() {
                    v[c] = (p - self.rref[i][f]) % p;
                }
                v
            })
            .collect()
    }
}

/// Rank of a matrix over F_p.
pub fn rank(a: &[Vec<u64>], p: u64) -> usize {
    FpSolver::new(a, p).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_kernel() {
        let a = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let s = FpSolver::new(&a, 7);
        assert_eq!(s.rank(), 2);
        let x = s.solve(&[6, 5, 2]).unwrap();
        for (row, b) in a.iter().zip([6u64, 5, 2]) {
            assert_eq!(row.iter().zip(&x).map(|(a, b)| a * b).sum::<u64>() % 7, b);
        }
        assert!(s.solve(&[1, 1, 0]).is_none());
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        for row in &a {
            assert_eq!(row.iter().zip(&k[0]).map(|(a, b)| a * b).sum::<u64>() % 7, 0);
        }
    }
}
