//! Small dense helpers over `f64` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Scales `a` to unit length; returns false (leaving `a` untouched) for a zero vector.
pub fn normalize_in_place(a: &mut [f64]) -> bool {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    a.iter_mut().for_each(|v| *v /= n);
    true
}

/// `m · x` for a row-major square matrix.
pub fn matvec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|i| dot(&m[i * d..(i + 1) * d], x)).collect()
}

/// `mᵀ · x` for a row-major square matrix.
pub fn matvec_t(m: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut out = vec![0.0; d];
    for (i, &xi) in x.iter().enumerate() {
        for (o, &mij) in out.iter_mut().zip(&m[i * d..(i + 1) * d]) {
            *o += mij * xi;
        }
    }
    out
}

/// Row-major outer product `a bᵀ`.
pub fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|v| v * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_transpose() {
        let m = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(matvec(&m, &[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(matvec_t(&m, &[1.0, 1.0]), vec![4.0, 6.0]);
        assert_eq!(outer(&[1.0, 2.0], &[3.0, 4.0]), vec![3.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn zero_vector_is_left_alone() {
        let mut z = [0.0, 0.0];
        assert!(!normalize_in_place(&mut z));
        let mut v = [3.0, 4.0];
        assert!(normalize_in_place(&mut v));
        assert_eq!(v, [0.6, 0.8]);
    }
}
