//! Closed-form point-nucleus levels of the κ = −1 channel.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;

pub const DEFAULT_LEVELS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSpectrum {
    /// (n, E_n), n = 1, 2, ...
    pub levels: Vec<(u32, f64)>,
    pub alpha_z: f64,
}

impl ExactSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.1).collect()
    }

    /// Distance from `x` to the nearest level.
    pub fn distance(&self, x: f64) -> f64 {
        nearest_distance(&self.energies(), x)
    }
}

pub fn nearest_distance(levels: &[f64], x: f64) -> f64 {
    levels.iter().map(|e| (e - x).abs()).fold(f64::INFINITY, f64::min)
}

/// E_n = [1 + (αZ / (n − 1 + √(1 − (αZ)²)))²]^{-1/2}.
pub fn exact_levels(params: &PhysicalParams, n_max: u32) -> Result<ExactSpectrum> {
    let az = params.alpha_z();
    if !(az < 1.0) {
        return Err(Error::Domain(format!("αZ = {az} has no bound κ = −1 states")));
    }
    if n_max == 0 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    let gamma = (1.0 - az * az).sqrt();
    let levels = (1..=n_max)
        .map(|n| {
            let q = az / (n as f64 - 1.0 + gamma);
            (n, 1.0 / (1.0 + q * q).sqrt())
        })
        .collect();
    Ok(ExactSpectrum { levels, alpha_z: az })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zinc_levels() {
        let e = exact_levels(&PhysicalParams::with_z(30.0).unwrap(), DEFAULT_LEVELS).unwrap();
        let az = 30.0 / 137.0;
        assert!((e.levels[0].1 - (1.0f64 - az * az).sqrt()).abs() < 1e-15);
        assert!((e.levels[0].1 - 0.975_729_77).abs() < 1e-8);
        assert!(e.levels.windows(2).all(|w| w[0].1 < w[1].1 && w[1].1 < 1.0));
    }

    #[test]
    fn hydrogen_like_limit() {
        // E_n ≈ 1 − (αZ)²/(2n²) for small coupling
        let p = PhysicalParams::new(1e-4, 1.0).unwrap();
        let e = exact_levels(&p, 3).unwrap();
        for (n, en) in e.levels {
            let nr = 1.0 - 1e-8 / (2.0 * (n * n) as f64);
            assert!((en - nr).abs() < 1e-14);
        }
    }

    #[test]
    fn coupling_domain() {
        let p = PhysicalParams::new(1.0 / 137.0, 137.0).unwrap();
        assert!(exact_levels(&p, 3).is_err());
        assert!(exact_levels(&PhysicalParams::with_z(1.0).unwrap(), 0).is_err());
    }
}
