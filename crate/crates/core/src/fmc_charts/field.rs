//! Maps from the point set to `ℝ³`, stored densely over all of `V`.

use nalgebra::Vector3;

pub type V3 = Vector3<f64>;
pub type Field = Vec<V3>;

pub fn zeros(n: usize) -> Field {
    vec![V3::zeros(); n]
}

pub fn norm(f: &[V3]) -> f64 {
    f.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

pub fn dot(a: &[V3], b: &[V3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// `y += a x`.
pub fn axpy(y: &mut [V3], a: f64, x: &[V3]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scaled(f: &[V3], a: f64) -> Field {
    f.iter().map(|x| a * x).collect()
}

pub fn distance(a: &[V3], b: &[V3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Restriction to `set`, as a list in the order of `set`.
pub fn restrict(f: &[V3], set: &[usize]) -> Field {
    set.iter().map(|&p| f[p]).collect()
}

pub fn min_pairwise_distance(points: &[V3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min((points[i] - points[j]).norm());
        }
    }
    m
}

/// Colinearity of `x` with the unit vector `dir`: `(‖x − t dir‖, t)` with
/// `t = ⟨x, dir⟩`.
pub fn colinearity(x: &[V3], dir: &[V3]) -> (f64, f64) {
    let t = dot(x, dir);
    let r = x
        .iter()
        .zip(dir)
        .map(|(a, d)| (a - t * d).norm_squared())
        .sum::<f64>()
        .sqrt();
    (r, t)
}
