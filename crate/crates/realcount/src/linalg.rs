//! Exact and floating-point matrix rank.
//!
//! The exact routine is fraction-free Gaussian elimination (single-step
//! Bareiss) over arbitrary-precision integers; it is the authoritative rank
//! used by the rigidity tests. The float routine is a quick pre-filter.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of an integer matrix by fraction-free elimination. The input is a
/// row-major list of equal-length rows; entries grow only as large as the
/// minors of the matrix.
pub fn rank_int(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    debug_assert!(a.iter().all(|r| r.len() == cols));
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                // Exact by the Bareiss identity.
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix. Each row is scaled by the LCM of its
/// denominators (row scaling preserves rank), then eliminated exactly.
pub fn rank_rational(a: &[Vec<BigRational>]) -> usize {
    let scaled: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for x in row {
                lcm = num_integer::lcm(lcm, x.denom().clone());
            }
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();
    rank_int(scaled)
}

/// Floating-point rank estimate by Gaussian elimination with partial
/// pivoting. A pivot counts while its magnitude exceeds `tol` times the
/// largest entry of the original matrix.
pub fn rank_f64(mut a: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cutoff = tol * scale;
    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if best <= cutoff {
            continue;
        }
        a.swap(r, p);
        for i in (r + 1)..rows {
            let f = a[i][c] / a[r][c];
            for j in c..cols {
                a[i][j] -= f * a[r][j];
            }
        }
        r += 1;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn rank_int_basics() {
        assert_eq!(rank_int(int_matrix(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_int(int_matrix(&[&[1, 2], &[3, 4]])), 2);
        assert_eq!(rank_int(int_matrix(&[&[0, 0], &[0, 0]])), 0);
        // Rectangular, rank limited by row count.
        assert_eq!(
            rank_int(int_matrix(&[&[1, 0, 5, 7], &[0, 1, 2, 3]])),
            2
        );
        // A zero column in the middle.
        assert_eq!(
            rank_int(int_matrix(&[&[1, 0, 2], &[2, 0, 4], &[0, 0, 1]])),
            2
        );
    }

    #[test]
    fn rank_matches_float() {
        let m = [
            &[3i64, 1, 4, 1][..],
            &[5, 9, 2, 6][..],
            &[8, 10, 6, 7][..],
            &[-2, -8, 2, -5][..],
        ];
        // Row 3 = row 1 + row 2; row 4 = row 1 - row 2.
        let exact = rank_int(int_matrix(&m));
        let float = rank_f64(
            m.iter()
                .map(|r| r.iter().map(|&x| x as f64).collect())
                .collect(),
            1e-9,
        );
        assert_eq!(exact, 2);
        assert_eq!(float, 2);
    }

    #[test]
    fn rank_rational_row_scaling() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let a = vec![
            vec![half.clone(), third.clone()],
            vec![half * BigRational::from(BigInt::from(6)), third * BigRational::from(BigInt::from(6))],
        ];
        assert_eq!(rank_rational(&a), 1);
    }
}
