//! Small dense-vector helpers and unit-direction sets.
//!
//! Points are plain `&[f64]` slices; hot loops write `x + eta*d` into a
//! caller-provided scratch buffer to avoid allocation.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// out = x + t*d
pub fn axpy(out: &mut [f64], x: &[f64], t: f64, d: &[f64]) {
    for i in 0..x.len() {
        out[i] = x[i] + t * d[i];
    }
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

/// Standard basis vector e_i in dimension n.
pub fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// A deterministic quasi-uniform set of unit directions on S^{N-1}.
///
/// N=1: the two signs. N=2: `k` equispaced angles. N=3: a Fibonacci
/// sphere. N>3: normalized low-discrepancy (Halton) points, good enough
/// for the sup/inf scans which are refined locally afterwards.
pub fn sphere_directions(dim: usize, k: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => panic!("dimension 0 has no directions"),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..k.max(8))
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * (j as f64) / (k.max(8) as f64);
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        3 => {
            let n = k.max(16);
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            (0..n)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / (n as f64);
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (j as f64) / golden;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let n = k.max(2 * dim * dim);
            let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            (0..n)
                .map(|j| {
                    let mut v: Vec<f64> = (0..dim)
                        .map(|i| 2.0 * halton(j as u64 + 1, primes[i % primes.len()]) - 1.0)
                        .collect();
                    let nn = norm(&v);
                    if nn < 1e-12 {
                        v = basis(dim, j % dim);
                    } else {
                        for c in v.iter_mut() {
                            *c /= nn;
                        }
                    }
                    v
                })
                .collect()
        }
    }
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// One golden-section refinement pass for a function of an angle (2-D
/// directions only): maximizes `f` over `[lo, hi]`.
pub fn golden_max(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Rotation in the (i,j) coordinate plane by angle `phi` — enough rigid
/// motions for invariance testing in any dimension.
#[derive(Debug, Clone)]
pub struct Rotation {
    pub dim: usize,
    /// Sequence of Givens rotations (i, j, angle), applied left to right.
    pub planes: Vec<(usize, usize, f64)>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        Rotation { dim, planes: Vec::new() }
    }

    pub fn plane(dim: usize, i: usize, j: usize, phi: f64) -> Self {
        assert!(i < dim && j < dim && i != j);
        Rotation { dim, planes: vec![(i, j, phi)] }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        for &(i, j, phi) in &self.planes {
            let (c, s) = (phi.cos(), phi.sin());
            let (xi, xj) = (v[i], v[j]);
            v[i] = c * xi - s * xj;
            v[j] = s * xi + c * xj;
        }
        v
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            dim: self.dim,
            planes: self
                .planes
                .iter()
                .rev()
                .map(|&(i, j, phi)| (i, j, -phi))
                .collect(),
        }
    }

    /// Composition: `self` after `other` (i.e. x ↦ self(other(x))).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        assert_eq!(self.dim, other.dim);
        let mut planes = other.planes.clone();
        planes.extend(self.planes.iter().cloned());
        Rotation { dim: self.dim, planes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for dim in 1..=4 {
            for d in sphere_directions(dim, 16) {
                assert!((norm(&d) - 1.0).abs() < 1e-12, "dim {dim}: {d:?}");
            }
        }
    }

    #[test]
    fn rotation_roundtrip() {
        let r = Rotation::plane(3, 0, 2, 0.7);
        let x = vec![0.3, -1.2, 2.5];
        let y = r.inverse().apply(&r.apply(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_finds_max() {
        let (x, fx) = golden_max(&mut |t: f64| -(t - 0.3).powi(2), 0.0, 1.0, 40);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(fx > -1e-10);
    }
}
