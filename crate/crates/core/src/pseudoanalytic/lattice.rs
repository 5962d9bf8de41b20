use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub const DEFAULT_RAYS: usize = 1000;
pub const DEFAULT_RAY_NODES: usize = 1001;

/// `R` radial paths from the origin to `e^{iθ_r}`, `θ_r = 2πr/R`, each with
/// `P` uniformly spaced nodes. Node `k` of ray `r` is `(k/(P−1))·e^{iθ_r}`.
///
/// Flat arrays over the lattice are ray-major: index `r·P + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayLattice {
    rays: usize,
    nodes_per_ray: usize,
}

impl RayLattice {
    pub fn new(rays: usize, nodes_per_ray: usize) -> Result<Self> {
        if rays < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 rays, got {rays}"
            )));
        }
        if nodes_per_ray < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: nodes_per_ray,
            });
        }
        Ok(Self {
            rays,
            nodes_per_ray,
        })
    }

    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn nodes_per_ray(&self) -> usize {
        self.nodes_per_ray
    }

    pub fn len(&self) -> usize {
        self.rays * self.nodes_per_ray
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radial spacing `1/(P−1)`.
    pub fn step(&self) -> f64 {
        1.0 / (self.nodes_per_ray - 1) as f64
    }

    pub fn theta(&self, ray: usize) -> f64 {
        TAU * ray as f64 / self.rays as f64
    }

    pub fn direction(&self, ray: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(ray))
    }

    pub fn radius(&self, node: usize) -> f64 {
        if node + 1 == self.nodes_per_ray {
            1.0
        } else {
            node as f64 * self.step()
        }
    }

    pub fn node(&self, ray: usize, node: usize) -> Complex64 {
        if node == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.direction(ray) * self.radius(node)
    }

    /// Complex increment `dz` between consecutive nodes of a ray.
    pub fn dz(&self, ray: usize) -> Complex64 {
        self.direction(ray) * self.step()
    }

    pub fn index(&self, ray: usize, node: usize) -> usize {
        ray * self.nodes_per_ray + node
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoints_and_spacing() {
        let l = RayLattice::new(16, 11).unwrap();
        for r in 0..16 {
            assert_eq!(l.node(r, 0), Complex64::new(0.0, 0.0));
            assert_abs_diff_eq!(l.node(r, 10).norm(), 1.0, epsilon = 1e-15);
            for k in 1..11 {
                let d = (l.node(r, k) - l.node(r, k - 1)).norm();
                assert_abs_diff_eq!(d, 0.1, epsilon = 1e-15);
            }
        }
        assert_eq!(l.len(), 176);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(RayLattice::new(2, 10).is_err());
        assert!(RayLattice::new(10, 1).is_err());
    }
}
