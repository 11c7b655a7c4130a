//! Physical parameters, the κ = −1 radial channel and external potentials.
//!
//! Units are m = c = ħ = 1, so energies are in units of mc² and lengths in
//! reduced Compton wavelengths. The spectral gap is (−1, 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fine-structure coupling used when none is given.
pub const DEFAULT_ALPHA: f64 = 1.0 / 137.0;

/// Largest point-nucleus coupling αZ for which the Dirac–Coulomb operator
/// keeps the free domain.
pub const COULOMB_COUPLING_LIMIT: f64 = 0.866_025_403_784_438_6; // √3/2

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub z: f64,
    pub kappa: i32,
}

impl PhysicalParams {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
        }
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::param("Z", format!("must be non-negative, got {z}")));
        }
        Ok(Self { alpha, z, kappa: -1 })
    }

    /// α = 1/137 with the given nuclear charge.
    pub fn with_z(z: f64) -> Result<Self> {
        Self::new(DEFAULT_ALPHA, z)
    }

    pub fn alpha_z(&self) -> f64 {
        self.alpha * self.z
    }

    /// Reduced exponents (tabulated in units of α²) to physical exponents.
    pub fn scale_exponent(&self, reduced: f64) -> f64 {
        reduced * self.alpha * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// V(r) = −αZ/r.
    PointCoulomb { alpha_z: f64 },
    /// V(r) = depth · exp(−r²/width²).
    GaussianWell { depth: f64, width: f64 },
    Zero,
}

impl PotentialSpec {
    pub fn point_coulomb(params: &PhysicalParams) -> Result<Self> {
        Self::coulomb_with_coupling(params.alpha_z())
    }

    pub fn coulomb_with_coupling(alpha_z: f64) -> Result<Self> {
        if !(alpha_z >= 0.0) {
            return Err(Error::param("alpha*Z", "must be non-negative"));
        }
        if alpha_z > COULOMB_COUPLING_LIMIT {
            return Err(Error::param(
                "alpha*Z",
                format!("{alpha_z} exceeds the point-nucleus bound √3/2"),
            ));
        }
        Ok(PotentialSpec::PointCoulomb { alpha_z })
    }

    pub fn gaussian_well(depth: f64, width: f64) -> Result<Self> {
        if !depth.is_finite() {
            return Err(Error::param("potential.depth", "must be finite"));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::param("potential.width", format!("must be positive, got {width}")));
        }
        Ok(PotentialSpec::GaussianWell { depth, width })
    }

    /// Infimum of V; `-inf` for the point nucleus.
    pub fn inf_v(&self) -> f64 {
        match *self {
            PotentialSpec::PointCoulomb { alpha_z } if alpha_z > 0.0 => f64::NEG_INFINITY,
            PotentialSpec::PointCoulomb { .. } => 0.0,
            PotentialSpec::GaussianWell { depth, .. } => depth.min(0.0),
            PotentialSpec::Zero => 0.0,
        }
    }

    pub fn sup_v(&self) -> f64 {
        match *self {
            PotentialSpec::PointCoulomb { .. } => 0.0,
            PotentialSpec::GaussianWell { depth, .. } => depth.max(0.0),
            PotentialSpec::Zero => 0.0,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, PotentialSpec::PointCoulomb { alpha_z } if *alpha_z > 0.0)
    }

    pub fn singular_at_origin(&self) -> bool {
        !self.is_bounded()
    }

    pub fn evaluate(&self, r: f64) -> Result<f64> {
        evaluate_potential(self, r)
    }
}

/// V(r) for r > 0.
pub fn evaluate_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("potential evaluated at r = {r}, need r > 0")));
    }
    Ok(match *spec {
        PotentialSpec::PointCoulomb { alpha_z } => -alpha_z / r,
        PotentialSpec::GaussianWell { depth, width } => depth * (-(r * r) / (width * width)).exp(),
        PotentialSpec::Zero => 0.0,
    })
}

/// A closed sub-interval of [−1, 1]. Intervals that do not meet the open gap
/// (−1, 1) are stored in the canonical empty form `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapInterval {
    pub lo: f64,
    pub hi: f64,
}

impl GapInterval {
    pub const EMPTY: GapInterval = GapInterval { lo: 1.0, hi: -1.0 };
    pub const WHOLE: GapInterval = GapInterval { lo: -1.0, hi: 1.0 };

    /// Clamp `[lo, hi]` to the closed gap and canonicalize.
    pub fn new(lo: f64, hi: f64) -> Self {
        let lo = lo.max(-1.0);
        let hi = hi.min(1.0);
        // degenerate endpoint sets {-1} and {1} carry no gap points
        if lo > hi || lo >= 1.0 || hi <= -1.0 {
            Self::EMPTY
        } else {
            GapInterval { lo, hi }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        !self.is_empty() && x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn is_subset_of(&self, other: &GapInterval) -> bool {
        self.is_empty() || (!other.is_empty() && self.lo >= other.lo && self.hi <= other.hi)
    }
}

/// How the lower components of a basis are tied to the upper ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum BalanceScheme {
    UpperLower,
    KineticBalance,
    AtomicBalance,
    DualKineticBalance { eps: f64 },
    FreeBasis,
}

impl BalanceScheme {
    pub fn name(&self) -> &'static str {
        match self {
            BalanceScheme::UpperLower => "upper-lower",
            BalanceScheme::KineticBalance => "kinetic-balance",
            BalanceScheme::AtomicBalance => "atomic-balance",
            BalanceScheme::DualKineticBalance { .. } => "dual-kinetic-balance",
            BalanceScheme::FreeBasis => "free-basis",
        }
    }
}

pub(crate) fn check_dkb_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("eps", format!("must lie in (0, 1], got {eps}")))
    }
}

/// Upper and lower parts of the gap in which a basis of the given scheme may
/// produce spurious eigenvalues.
pub fn theorem_intervals(
    scheme: &BalanceScheme,
    spec: &PotentialSpec,
) -> Result<(GapInterval, GapInterval)> {
    let inf_v = spec.inf_v();
    let sup_v = spec.sup_v();
    let upper_lower = |shift: f64| {
        (
            GapInterval::new((1.0 + shift + inf_v).max(-1.0), 1.0),
            GapInterval::new(-1.0, (sup_v - 1.0 - shift).min(1.0)),
        )
    };
    Ok(match *scheme {
        BalanceScheme::UpperLower => upper_lower(0.0),
        BalanceScheme::KineticBalance => {
            if spec.is_bounded() && sup_v <= 2.0 {
                (GapInterval::EMPTY, upper_lower(0.0).1)
            } else if spec.is_bounded() {
                upper_lower(0.0)
            } else {
                (GapInterval::WHOLE, GapInterval::WHOLE)
            }
        }
        BalanceScheme::AtomicBalance => {
            if sup_v <= 0.0 {
                (GapInterval::EMPTY, GapInterval::EMPTY)
            } else {
                (GapInterval::EMPTY, upper_lower(0.0).1)
            }
        }
        BalanceScheme::DualKineticBalance { eps } => {
            check_dkb_eps(eps)?;
            upper_lower(2.0 * (1.0 / eps - 1.0))
        }
        BalanceScheme::FreeBasis => (GapInterval::EMPTY, GapInterval::EMPTY),
    })
}
