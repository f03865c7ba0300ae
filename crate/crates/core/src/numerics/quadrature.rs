//! Composite Gauss–Legendre × uniform-azimuth quadrature on the unit sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::BACK_LOBE_TAPER_DEG;
use crate::scalar::Real;

pub const MIN_THETA_NODES: usize = 8;
pub const MIN_PHI_NODES: usize = 16;
pub const DEFAULT_THETA_NODES: usize = 64;
pub const DEFAULT_PHI_NODES: usize = 128;

/// One quadrature node: colatitude, azimuth (radians) and solid-angle weight (sr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereNode<T> {
    pub theta: T,
    pub phi: T,
    pub weight: T,
}

/// Product quadrature over the sphere. Weights sum to 4π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid<T> {
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<SphereNode<T>>,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// ordered by increasing abscissa.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf = T::from_count(n);
    let tol = T::epsilon() * T::lit(4.0);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut z = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z = z - dz;
            if dz.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != T::zero() {
            dp = d;
        }
        let weight = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = z;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * z * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n);
    let d = nf * (z * p1 - p0) / (z * z - T::one());
    (p1, d)
}

/// Builds the product grid: composite Gauss–Legendre in cos θ, uniform in φ.
///
/// The θ rule is split into panels at the horizon and at the end of the
/// back-lobe taper, where modal patterns have slope discontinuities; each
/// panel is then integrated at spectral accuracy.
pub fn make_sphere_grid<T: Real>(n_theta: usize, n_phi: usize) -> Result<SphereGrid<T>> {
    if n_theta < MIN_THETA_NODES || n_phi < MIN_PHI_NODES {
        return Err(Error::Config(format!(
            "sphere grid {n_theta}x{n_phi} below minimum {MIN_THETA_NODES}x{MIN_PHI_NODES}"
        )));
    }
    let taper_end = -T::lit(BACK_LOBE_TAPER_DEG).to_radians().sin();
    let breaks = [T::one(), T::zero(), taper_end, -T::one()];
    let counts = panel_counts(n_theta, &breaks);
    let dphi = T::TAU() / T::from_count(n_phi);
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    // Panels run from cos θ = 1 downwards so θ increases through the list.
    for (k, &m) in counts.iter().enumerate() {
        let (hi, lo) = (breaks[k], breaks[k + 1]);
        let half = (hi - lo) / T::lit(2.0);
        let mid = (hi + lo) / T::lit(2.0);
        let (x, w) = gauss_legendre::<T>(m);
        for (xi, wi) in x.iter().rev().zip(w.iter().rev()) {
            let theta = (mid + half * *xi).acos();
            for j in 0..n_phi {
                nodes.push(SphereNode { theta, phi: T::from_count(j) * dphi, weight: *wi * half * dphi });
            }
        }
    }
    Ok(SphereGrid { n_theta, n_phi, nodes })
}

/// Splits `n` nodes over panels in proportion to their length, at least two each.
fn panel_counts<T: Real>(n: usize, breaks: &[T]) -> Vec<usize> {
    let panels = breaks.len() - 1;
    let total = breaks[0] - breaks[panels];
    let spare = n - 2 * panels;
    let shares: Vec<f64> = (0..panels)
        .map(|k| ((breaks[k] - breaks[k + 1]) / total).to_f64_lossy() * spare as f64)
        .collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| 2 + s.floor() as usize).collect();
    let mut order: Vec<usize> = (0..panels).collect();
    order.sort_by(|&a, &b| (shares[b] - shares[b].floor()).total_cmp(&(shares[a] - shares[a].floor())));
    let assigned: usize = counts.iter().sum();
    for &k in order.iter().take(n - assigned) {
        counts[k] += 1;
    }
    counts
}

impl<T: Real> SphereGrid<T> {
    pub fn default_grid() -> Self {
        make_sphere_grid(DEFAULT_THETA_NODES, DEFAULT_PHI_NODES).expect("default grid is valid")
    }

    /// ∮ f dΩ, summed in node order.
    pub fn integrate(&self, f: impl Fn(T, T) -> T) -> T {
        self.nodes.iter().fold(T::zero(), |acc, n| acc + n.weight * f(n.theta, n.phi))
    }

    /// ∮ f dΩ over pre-evaluated node values (same order as `nodes`).
    pub fn integrate_values(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.nodes.len());
        self.nodes.iter().zip(values).fold(T::zero(), |acc, (n, v)| acc + n.weight * *v)
    }

    pub fn total_weight(&self) -> T {
        self.nodes.iter().fold(T::zero(), |acc, n| acc + n.weight)
    }
}
