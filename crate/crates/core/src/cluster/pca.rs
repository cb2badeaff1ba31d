use serde::Serialize;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection<T> {
    /// One row per input point, `dims` columns.
    pub coordinates: Dataset<T>,
    /// Orthonormal principal axes, one row each, by descending variance.
    pub components: Dataset<T>,
    pub explained_variance: Vec<T>,
    pub mean: Vec<T>,
    /// Set when the data has no variance; coordinates and fractions are zero.
    pub degenerate: bool,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order and matching eigenvectors as rows.
pub fn symmetric_eigen<T: Scalar>(matrix: &[T], n: usize) -> (Vec<T>, Vec<Vec<T>>) {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let two = T::of(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[i * n + j]).sum();
        let scale: T = a.iter().map(|&x| x * x).sum();
        if off <= scale * T::epsilon() * T::epsilon() || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
    (values, vectors)
}

/// Projects mean-centred points onto the top `dims` principal axes. Each
/// axis is oriented so its largest-magnitude coordinate is positive.
pub fn pca_project<T: Scalar>(data: &Dataset<T>, dims: usize) -> Result<Projection<T>> {
    let n = data.len();
    let d = data.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("PCA needs at least two points".into()));
    }
    if dims == 0 || dims > d {
        return Err(Error::InvalidParameter(format!("cannot project {d}-dimensional data onto {dims} axes")));
    }
    let count = T::from_count(n);
    let mean: Vec<T> = (0..d).map(|j| data.rows().map(|r| r[j]).sum::<T>() / count).collect();
    let mut cov = vec![T::zero(); d * d];
    for r in data.rows() {
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] = cov[i * d + j] + (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    let denom = T::from_count(n - 1);
    for i in 0..d {
        for j in i..d {
            cov[i * d + j] = cov[i * d + j] / denom;
            cov[j * d + i] = cov[i * d + j];
        }
    }
    let total: T = (0..d).map(|i| cov[i * d + i]).sum();
    if total <= T::zero() {
        let mut components = Dataset::zeros(dims, d);
        for i in 0..dims {
            components.row_mut(i)[i] = T::one();
        }
        return Ok(Projection {
            coordinates: Dataset::zeros(n, dims),
            components,
            explained_variance: vec![T::zero(); dims],
            mean,
            degenerate: true,
        });
    }

    let (values, vectors) = symmetric_eigen(&cov, d);
    let mut components = Dataset::zeros(dims, d);
    for (i, vector) in vectors.iter().take(dims).enumerate() {
        let lead = vector
            .iter()
            .copied()
            .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best });
        let sign = if lead < T::zero() { -T::one() } else { T::one() };
        for (c, &x) in components.row_mut(i).iter_mut().zip(vector) {
            *c = x * sign;
        }
    }
    let explained_variance = values.iter().take(dims).map(|&v| v.max(T::zero()) / total).collect();
    let mut coordinates = Dataset::zeros(n, dims);
    for (i, r) in data.rows().enumerate() {
        for c in 0..dims {
            let axis = components.row(c);
            coordinates.row_mut(i)[c] = (0..d).map(|j| (r[j] - mean[j]) * axis[j]).sum();
        }
    }
    Ok(Projection { coordinates, components, explained_variance, mean, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_data() {
        let d = Dataset::<f64>::from_rows(&[[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.5, 2.5, 2.5], [-1.0, -1.0, -1.0]]).unwrap();
        let p = pca_project(&d, 2).unwrap();
        assert!((p.explained_variance[0] - 1.0).abs() < 1e-12);
        assert!(p.explained_variance[1].abs() < 1e-12);
        let axis = p.components.row(0);
        for &x in axis {
            assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicates_project_identically() {
        let d = Dataset::from_rows(&[[0.2, 0.1, 0.0], [0.2, 0.1, 0.0], [1.0, 0.0, 0.5], [0.0, 1.0, 0.25]]).unwrap();
        let p = pca_project(&d, 2).unwrap();
        assert_eq!(p.coordinates.row(0), p.coordinates.row(1));
    }

    #[test]
    fn zero_variance_is_degenerate() {
        let d = Dataset::from_rows(&[[0.5, 0.5, 0.5]; 4]).unwrap();
        let p = pca_project(&d, 2).unwrap();
        assert!(p.degenerate);
        assert!(p.coordinates.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(p.explained_variance, vec![0.0, 0.0]);
    }

    #[test]
    fn argument_checks() {
        let one = Dataset::from_rows(&[[0.0, 1.0]]).unwrap();
        assert!(pca_project(&one, 1).is_err());
        let two = Dataset::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(pca_project(&two, 3).is_err());
    }

    #[test]
    fn eigen_of_diagonal() {
        let (vals, vecs) = symmetric_eigen(&[1.0f64, 0.0, 0.0, 3.0], 2);
        assert_eq!(vals, vec![3.0, 1.0]);
        assert_eq!(vecs[0][1].abs(), 1.0);
    }
}
