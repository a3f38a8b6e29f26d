use nalgebra::DMatrix;
use num_complex::Complex64;

pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Number of singular values above `rel_tol` times the largest one.
pub fn rank_numeric(rows: &[Vec<Complex64>], rel_tol: f64) -> usize {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::rank_exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank_numeric(&vec![vec![c(0.0); 3]; 3], DEFAULT_REL_TOL), 0);
        assert_eq!(rank_numeric(&[], DEFAULT_REL_TOL), 0);
    }

    #[test]
    fn tiny_noise_does_not_raise_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = [1.0, 2.0, -1.0, 0.5];
        let v = [0.0, 1.0, 3.0, -2.0];
        let m: Vec<Vec<Complex64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let noise = Complex64::new(rng.random_range(-1e-12..1e-12), rng.random_range(-1e-12..1e-12));
                        c(u[i] * u[j] + v[i] * v[j]) + noise
                    })
                    .collect()
            })
            .collect();
        assert_eq!(rank_numeric(&m, DEFAULT_REL_TOL), 2);
    }

    #[test]
    fn agrees_with_exact_rank_on_integer_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let rows = rng.random_range(1..7);
            let cols = rng.random_range(1..7);
            let mut m: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(-3..=3)).collect())
                .collect();
            if trial % 3 == 0 && rows > 2 {
                m[rows - 1] = (0..cols).map(|j| m[0][j] - 2 * m[1][j]).collect();
            }
            let f: Vec<Vec<Complex64>> = m.iter().map(|r| r.iter().map(|&x| c(x as f64)).collect()).collect();
            assert_eq!(rank_numeric(&f, DEFAULT_REL_TOL), rank_exact(&m), "{m:?}");
        }
    }

    #[test]
    fn full_rank_five_by_five() {
        let m: Vec<Vec<i64>> = vec![
            vec![2, -1, 0, 3, 1],
            vec![1, 3, -2, 0, 2],
            vec![0, 1, 1, -3, 1],
            vec![3, 0, 2, 1, -1],
            vec![-1, 2, 3, 2, 0],
        ];
        assert_eq!(rank_exact(&m), 5);
        let f: Vec<Vec<Complex64>> = m.iter().map(|r| r.iter().map(|&x| c(x as f64)).collect()).collect();
        assert_eq!(rank_numeric(&f, DEFAULT_REL_TOL), 5);
    }
}
