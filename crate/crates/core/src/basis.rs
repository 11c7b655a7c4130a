//! Two-component radial basis sets for each balance scheme, and the trap
//! vectors used to provoke spurious eigenvalues.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_dkb_eps, BalanceScheme, PhysicalParams, PotentialSpec};
use crate::radial::{
    apply_d_minus, apply_d_plus, check_exponent, inner, BalanceWeight, InnerWeight, RadialFunction,
    RadialTerm,
};

/// Uncontracted 6-31G exponents for zinc, in units of α².
const ZN_631G: [f64; 22] = [
    82400.940, 12372.550, 2818.3510, 1732.5690, 794.57170, 412.71490, 254.72320, 133.67800,
    87.138800, 69.364920, 50.385850, 23.620820, 20.583580, 10.184710, 8.5059400, 4.3340820,
    2.8238420, 1.8109180, 1.0395430, 0.7148410, 0.1432640, 0.0492960,
];

/// A named list of reduced exponents ã (physical exponent a = ã·α²),
/// strictly ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub name: String,
    values: Vec<f64>,
}

impl ExponentSet {
    pub fn new(name: impl Into<String>, mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Construction("empty exponent set".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::param("exponents", format!("non-positive exponent {v}")));
        }
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("exponents", "duplicate exponent"));
        }
        Ok(Self { name: name.into(), values })
    }

    /// `first · ratio^k`, k = 0..n.
    pub fn even_tempered(first: f64, ratio: f64, n: usize) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(Error::param("ratio", "must exceed 1"));
        }
        let values = (0..n).map(|k| first * ratio.powi(k as i32)).collect();
        Self::new(format!("even-tempered({first},{ratio},{n})"), values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Physical exponents for the given coupling, each checked against the guard.
    pub fn physical(&self, params: &PhysicalParams) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&v| {
                let a = params.scale_exponent(v);
                check_exponent(a).map(|_| a)
            })
            .collect()
    }

    /// Every exponent scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.name.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    /// Keep the entries at the given indices.
    pub fn select(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let values = self.values.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, v)| *v).collect();
        Self::new(self.name.clone(), values)
    }

    /// Insert the geometric midpoints between neighbours (2n − 1 exponents).
    pub fn refined(&self) -> Result<Self> {
        let mut values = self.values.clone();
        values.extend(self.values.windows(2).map(|w| (w[0] * w[1]).sqrt()));
        Self::new(format!("{}-refined", self.name), values)
    }
}

pub fn builtin_exponents(name: &str) -> Result<ExponentSet> {
    match name {
        "zn-6-31g" => ExponentSet::new(name, ZN_631G.to_vec()),
        _ => Err(Error::UnknownBasis(name.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorRole {
    Upper,
    Lower,
    KineticPartner,
    AtomicPartner,
    DkbElectronic,
    DkbPositronic,
    Mixed,
    FreeElectronic,
    FreePositronic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorLabel {
    pub role: VectorRole,
    /// Generating exponent (physical units), when there is a single one.
    pub exponent: Option<f64>,
    /// Trap family that produced the vector, if any.
    pub trap: Option<String>,
}

impl VectorLabel {
    fn new(role: VectorRole, exponent: Option<f64>) -> Self {
        Self { role, exponent, trap: None }
    }

    pub fn with_trap(mut self, trap: impl Into<String>) -> Self {
        self.trap = Some(trap.into());
        self
    }
}

/// A radial two-spinor (u, v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisVector {
    pub upper: RadialFunction,
    pub lower: RadialFunction,
    pub label: VectorLabel,
}

impl BasisVector {
    /// Build and scale to ‖u‖² + ‖v‖² = 1.
    pub fn normalized(upper: RadialFunction, lower: RadialFunction, label: VectorLabel) -> Result<Self> {
        if upper.is_zero() && lower.is_zero() {
            return Err(Error::Construction("basis vector with two zero components".into()));
        }
        let n2 = upper.norm_sq()? + lower.norm_sq()?;
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::Construction(format!("basis vector norm² = {n2}")));
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self { upper: upper.scaled(s), lower: lower.scaled(s), label })
    }

    pub fn norm_sq(&self) -> Result<f64> {
        Ok(self.upper.norm_sq()? + self.lower.norm_sq()?)
    }

    pub fn is_coulomb_compatible(&self) -> bool {
        self.upper.is_coulomb_compatible() && self.lower.is_coulomb_compatible()
    }

    /// L² inner product of two spinors.
    pub fn overlap(&self, other: &BasisVector) -> Result<f64> {
        Ok(inner(&self.upper, &other.upper, &InnerWeight::One)?
            + inner(&self.lower, &other.lower, &InnerWeight::One)?)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { upper: self.upper.scaled(s), lower: self.lower.scaled(s), label: self.label.clone() }
    }

    pub fn tagged(mut self, trap: impl Into<String>) -> Self {
        self.label.trap = Some(trap.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    pub vectors: Vec<BasisVector>,
    pub scheme: BalanceScheme,
    pub params: PhysicalParams,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn with_vectors(&self, extra: impl IntoIterator<Item = BasisVector>) -> Self {
        let mut out = self.clone();
        out.vectors.extend(extra);
        out
    }
}

fn s_gaussian(a: f64) -> Result<RadialFunction> {
    RadialFunction::gaussian(1.0, 1, a)
}

fn p_gaussian(a: f64) -> Result<RadialFunction> {
    RadialFunction::gaussian(1.0, 2, a)
}

/// Independent upper and lower spinors, `r·e^{−a r²}` in either slot.
pub fn upper_lower_basis(exps: &ExponentSet, params: &PhysicalParams) -> Result<BasisSet> {
    let mut vectors = Vec::with_capacity(2 * exps.len());
    for a in exps.physical(params)? {
        let f = s_gaussian(a)?;
        vectors.push(BasisVector::normalized(
            f.clone(),
            RadialFunction::zero(),
            VectorLabel::new(VectorRole::Upper, Some(a)),
        )?);
        vectors.push(BasisVector::normalized(
            RadialFunction::zero(),
            f,
            VectorLabel::new(VectorRole::Lower, Some(a)),
        )?);
    }
    Ok(BasisSet { vectors, scheme: BalanceScheme::UpperLower, params: *params })
}

/// `cos θ · r e^{−b r²}` in the upper slot mixed with `sin θ` of the same
/// profile in the lower slot.
pub fn mixed_trap_vector(theta: f64, b: f64) -> Result<BasisVector> {
    let f = s_gaussian(b)?;
    let (s, c) = theta.sin_cos();
    BasisVector::normalized(
        f.scaled(c),
        f.scaled(s),
        VectorLabel::new(VectorRole::Mixed, Some(b)).with_trap(format!("mixed(theta={theta})")),
    )
}

/// The pair (u, 0), (0, D⁻u).
pub fn kinetic_pair(upper: &RadialFunction, exponent: Option<f64>) -> Result<[BasisVector; 2]> {
    let lower = apply_d_minus(upper)?;
    Ok([
        BasisVector::normalized(
            upper.clone(),
            RadialFunction::zero(),
            VectorLabel::new(VectorRole::Upper, exponent),
        )?,
        BasisVector::normalized(
            RadialFunction::zero(),
            lower,
            VectorLabel::new(VectorRole::KineticPartner, exponent),
        )?,
    ])
}

pub fn kinetic_balance_basis(
    exps: &ExponentSet,
    params: &PhysicalParams,
    extra_uppers: &[RadialFunction],
) -> Result<BasisSet> {
    let mut vectors = Vec::with_capacity(2 * (exps.len() + extra_uppers.len()));
    for a in exps.physical(params)? {
        vectors.extend(kinetic_pair(&s_gaussian(a)?, Some(a))?);
    }
    for u in extra_uppers {
        vectors.extend(kinetic_pair(u, None)?);
    }
    Ok(BasisSet { vectors, scheme: BalanceScheme::KineticBalance, params: *params })
}

/// `r·(e^{−b r²} + δ^{1/4} e^{−bδ r²})`.
pub fn contracted_trap(b: f64, delta: f64) -> Result<RadialFunction> {
    if !(delta > 1.0) {
        return Err(Error::param("delta", format!("must exceed 1, got {delta}")));
    }
    check_exponent(b)?;
    check_exponent(b * delta)?;
    Ok(RadialFunction::from_terms(vec![
        RadialTerm::new(1.0, 1, b)?,
        RadialTerm::new(delta.powf(0.25), 1, b * delta)?,
    ]))
}

/// `(2 − V)⁻¹ D⁻u`.
pub fn atomic_lower(upper: &RadialFunction, potential: &PotentialSpec) -> Result<RadialFunction> {
    let d = apply_d_minus(upper)?;
    match *potential {
        PotentialSpec::Zero => Ok(d.scaled(0.5)),
        PotentialSpec::PointCoulomb { alpha_z: 0.0 } => Ok(d.scaled(0.5)),
        PotentialSpec::PointCoulomb { alpha_z } => {
            // (2 + αZ/r)⁻¹ = r / (2r + αZ)
            d.with_weight(BalanceWeight::Coulomb { alpha_z }, 1)
        }
        PotentialSpec::GaussianWell { depth, width } => {
            if depth >= 2.0 {
                return Err(Error::Construction(format!(
                    "atomic balance is singular: V reaches 2 for well depth {depth}"
                )));
            }
            d.with_weight(BalanceWeight::Well { depth, width }, 0)
        }
    }
}

pub fn atomic_pair(
    upper: &RadialFunction,
    potential: &PotentialSpec,
    exponent: Option<f64>,
) -> Result<[BasisVector; 2]> {
    Ok([
        BasisVector::normalized(
            upper.clone(),
            RadialFunction::zero(),
            VectorLabel::new(VectorRole::Upper, exponent),
        )?,
        BasisVector::normalized(
            RadialFunction::zero(),
            atomic_lower(upper, potential)?,
            VectorLabel::new(VectorRole::AtomicPartner, exponent),
        )?,
    ])
}

pub fn atomic_balance_basis(
    exps: &ExponentSet,
    params: &PhysicalParams,
    potential: &PotentialSpec,
    extra_uppers: &[RadialFunction],
) -> Result<BasisSet> {
    let mut vectors = Vec::with_capacity(2 * (exps.len() + extra_uppers.len()));
    for a in exps.physical(params)? {
        vectors.extend(atomic_pair(&s_gaussian(a)?, potential, Some(a))?);
    }
    for u in extra_uppers {
        vectors.extend(atomic_pair(u, potential, None)?);
    }
    Ok(BasisSet { vectors, scheme: BalanceScheme::AtomicBalance, params: *params })
}

/// Electronic `(u, ε D⁻u)` and positronic `(ε D⁺w, −w)` elements.
pub fn dkb_pair(
    u: &RadialFunction,
    w: &RadialFunction,
    eps: f64,
    exponent: Option<f64>,
) -> Result<[BasisVector; 2]> {
    check_dkb_eps(eps)?;
    Ok([
        BasisVector::normalized(
            u.clone(),
            apply_d_minus(u)?.scaled(eps),
            VectorLabel::new(VectorRole::DkbElectronic, exponent),
        )?,
        BasisVector::normalized(
            apply_d_plus(w)?.scaled(eps),
            w.scaled(-1.0),
            VectorLabel::new(VectorRole::DkbPositronic, exponent),
        )?,
    ])
}

/// Dual kinetic balance: type-1 from `r e^{−a r²}`, type-2 from `r² e^{−a r²}`.
pub fn dual_kinetic_balance_basis(
    exps: &ExponentSet,
    params: &PhysicalParams,
    eps: f64,
    extra_seeds: &[(RadialFunction, RadialFunction)],
) -> Result<BasisSet> {
    check_dkb_eps(eps)?;
    let mut vectors = Vec::with_capacity(2 * (exps.len() + extra_seeds.len()));
    for a in exps.physical(params)? {
        vectors.extend(dkb_pair(&s_gaussian(a)?, &p_gaussian(a)?, eps, Some(a))?);
    }
    for (u, w) in extra_seeds {
        vectors.extend(dkb_pair(u, w, eps, None)?);
    }
    Ok(BasisSet { vectors, scheme: BalanceScheme::DualKineticBalance { eps }, params: *params })
}

/// Seeds `(u, r·u)` for injecting a contracted trap into a DKB set.
pub fn dkb_trap_seeds(b: f64, delta: f64) -> Result<(RadialFunction, RadialFunction)> {
    let u = contracted_trap(b, delta)?;
    let w = RadialFunction::from_terms(
        u.terms().iter().map(|t| RadialTerm { power: t.power + 1, ..*t }).collect(),
    );
    Ok((u, w))
}

/// Largest number of fit powers tried by [`concentrated_trap`].
pub const CONCENTRATED_MAX_POWER: u32 = 12;
const CONCENTRATED_GRID: usize = 200;
const CONCENTRATED_FIT_TOL: f64 = 1e-3;

/// Pure upper spinor approximating the bump `r·e^{−a (r − r0)²}` by
/// `Σ_{k=1..K} c_k r^k e^{−a r²/2}` (least squares on a grid), with the
/// smallest K ≤ 12 whose relative residual is below 1e-3. The halved fit
/// exponent is what makes K ≤ 12 sufficient; with `e^{−a r²}` the tail of
/// `e^{2a r0 r}` needs far more powers.
pub fn concentrated_trap(r0: f64, a: f64) -> Result<BasisVector> {
    if !(r0 > 0.0) {
        return Err(Error::param("r0", format!("must be positive, got {r0}")));
    }
    check_exponent(a)?;
    let x0 = a.sqrt() * r0;
    if !(3.0 / (2.0f64).sqrt() < x0) {
        return Err(Error::param(
            "width_exponent",
            format!("bump not separated from the origin: sqrt(a)·r0 = {x0:.3} ≤ 3/√2"),
        ));
    }
    // Work in x = √a·r: target x·e^{-(x−x0)²}, basis x^k e^{-x²/2}.
    let lo = (x0 - 4.0).max(1e-3);
    let hi = x0 + 4.0;
    let xs: Vec<f64> = (0..CONCENTRATED_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (CONCENTRATED_GRID - 1) as f64)
        .collect();
    let target = DVector::from_iterator(xs.len(), xs.iter().map(|&x| x * (-(x - x0).powi(2)).exp()));
    let target_norm = target.norm();

    let mut best = None;
    for k_max in 1..=CONCENTRATED_MAX_POWER {
        let cols = k_max as usize;
        let mut m = DMatrix::zeros(xs.len(), cols);
        for (i, &x) in xs.iter().enumerate() {
            for k in 0..cols {
                m[(i, k)] = x.powi(k as i32 + 1) * (-0.5 * x * x).exp();
            }
        }
        let scale: Vec<f64> = (0..cols).map(|k| m.column(k).norm()).collect();
        for (k, s) in scale.iter().enumerate() {
            m.column_mut(k).unscale_mut(*s);
        }
        let svd = m.clone().svd(true, true);
        let y = svd
            .solve(&target, 1e-14)
            .map_err(|e| Error::Construction(format!("bump fit failed: {e}")))?;
        let rel = (&m * &y - &target).norm() / target_norm;
        let coeffs: Vec<f64> = y.iter().zip(&scale).map(|(c, s)| c / s).collect();
        if rel < CONCENTRATED_FIT_TOL {
            best = Some(coeffs);
            break;
        }
    }
    let coeffs = best.ok_or_else(|| {
        Error::Construction(format!(
            "bump at sqrt(a)·r0 = {x0:.3} not representable with {CONCENTRATED_MAX_POWER} powers"
        ))
    })?;
    // x^k = a^{k/2} r^k
    let terms = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| RadialTerm::new(c * a.powf((k as f64 + 1.0) / 2.0), k as u32 + 1, 0.5 * a))
        .collect::<Result<Vec<_>>>()?;
    BasisVector::normalized(
        RadialFunction::from_terms(terms),
        RadialFunction::zero(),
        VectorLabel::new(VectorRole::Upper, Some(a)).with_trap(format!("concentrated(r0={r0})")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysicalParams {
        PhysicalParams::with_z(30.0).unwrap()
    }

    #[test]
    fn table_exponents() {
        let e = builtin_exponents("zn-6-31g").unwrap();
        assert_eq!(e.len(), 22);
        assert_eq!(e.values()[0], 0.0492960);
        assert_eq!(e.values()[21], 82400.940);
        assert!(e.values().windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(builtin_exponents("sto-3g"), Err(Error::UnknownBasis(_))));
    }

    #[test]
    fn exponent_set_validation() {
        assert!(ExponentSet::new("x", vec![]).is_err());
        assert!(ExponentSet::new("x", vec![1.0, -2.0]).is_err());
        assert!(ExponentSet::new("x", vec![1.0, 1.0]).is_err());
        let e = ExponentSet::new("x", vec![3.0, 1.0]).unwrap();
        assert_eq!(e.values(), &[1.0, 3.0]);
        assert_eq!(e.refined().unwrap().len(), 3);
    }

    #[test]
    fn upper_lower_layout() {
        let b = upper_lower_basis(&builtin_exponents("zn-6-31g").unwrap(), &params()).unwrap();
        assert_eq!(b.len(), 44);
        assert!(b.vectors[0].lower.is_zero());
        assert!(b.vectors[1].upper.is_zero());
        assert!(b.vectors.iter().all(BasisVector::is_coulomb_compatible));
        for v in &b.vectors {
            assert!((v.norm_sq().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_trap_limits() {
        let v = mixed_trap_vector(0.0, 10.0).unwrap();
        assert!(v.lower.is_zero());
        let v = mixed_trap_vector(std::f64::consts::FRAC_PI_2, 10.0).unwrap();
        // cos(π/2) is 6e-17, not exactly zero
        assert!(v.upper.terms()[0].coeff.abs() < 1e-15);
        let v = mixed_trap_vector(0.5, 1e6 / 137.0_f64.powi(2)).unwrap();
        let ratio = v.lower.terms()[0].coeff / v.upper.terms()[0].coeff;
        assert!((ratio - 0.5f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn kinetic_partner_is_d_minus() {
        let a = 2.5;
        let pair = kinetic_pair(&s_gaussian(a).unwrap(), Some(a)).unwrap();
        let t = pair[1].lower.terms();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].power, 2);
        assert!(t[0].coeff < 0.0);
        let kb = kinetic_balance_basis(&builtin_exponents("zn-6-31g").unwrap(), &params(), &[]).unwrap();
        assert_eq!(kb.len(), 44);
    }

    #[test]
    fn contracted_trap_shape() {
        let u = contracted_trap(2.0, 1e4).unwrap();
        assert_eq!(u.terms().len(), 2);
        assert!((u.terms()[1].coeff - 10.0).abs() < 1e-12);
        let pair = kinetic_pair(&u, None).unwrap();
        assert_eq!(pair[1].lower.terms().len(), 2);
        assert!(pair[1].lower.terms().iter().all(|t| t.power == 2));
        assert!(contracted_trap(2.0, 1.0).is_err());
        assert!(contracted_trap(1e9, 1e4).is_err());
        let near_one = contracted_trap(3.0, 1.0 + 1e-12).unwrap();
        for r in [0.1_f64, 0.5, 1.0, 2.0] {
            let two = 2.0 * r * (-3.0 * r * r).exp();
            assert!((near_one.eval(r) - two).abs() < 1e-11);
        }
    }

    #[test]
    fn atomic_lowers() {
        let a = 1.5;
        let u = s_gaussian(a).unwrap();
        let c = PotentialSpec::coulomb_with_coupling(0.2).unwrap();
        let v = atomic_lower(&u, &c).unwrap();
        assert_eq!(v.terms().len(), 1);
        let t = v.terms()[0];
        assert_eq!(t.power, 3);
        assert_eq!(t.coeff, -2.0 * a);
        assert_eq!(t.weight, BalanceWeight::Coulomb { alpha_z: 0.2 });
        let r: f64 = 0.37;
        let expect = -2.0 * a * r.powi(3) * (-a * r * r).exp() / (2.0 * r + 0.2);
        assert!((v.eval(r) - expect).abs() < 1e-15);

        let z = atomic_lower(&u, &PotentialSpec::Zero).unwrap();
        assert_eq!(z, apply_d_minus(&u).unwrap().scaled(0.5));
        let well = PotentialSpec::gaussian_well(2.5, 1.0).unwrap();
        assert!(atomic_lower(&u, &well).is_err());
    }

    #[test]
    fn dkb_components() {
        let a = 0.8;
        let eps = 0.5;
        let pair = dkb_pair(&s_gaussian(a).unwrap(), &p_gaussian(a).unwrap(), eps, Some(a)).unwrap();
        // type 1 lower ∝ -2aε r² e^{-ar²}, type 2 upper ∝ ε(-3r + 2a r³) e^{-ar²}
        let l = pair[0].lower.terms();
        let u0 = pair[0].upper.terms()[0].coeff;
        assert!((l[0].coeff / u0 - (-2.0 * a * eps)).abs() < 1e-14);
        let up = pair[1].upper.terms();
        let w0 = -pair[1].lower.terms()[0].coeff;
        assert_eq!(up.len(), 2);
        assert!((up[0].coeff / w0 - (-3.0 * eps)).abs() < 1e-14);
        assert!((up[1].coeff / w0 - (2.0 * a * eps)).abs() < 1e-14);
        assert!(pair.iter().all(BasisVector::is_coulomb_compatible));
        assert!(dkb_pair(&s_gaussian(a).unwrap(), &p_gaussian(a).unwrap(), 0.0, None).is_err());
    }

    #[test]
    fn concentrated_trap_is_pure_upper() {
        let a: f64 = 100.0;
        let r0 = 2.3 / a.sqrt();
        let v = concentrated_trap(r0, a).unwrap();
        assert!(v.lower.is_zero());
        assert!((v.norm_sq().unwrap() - 1.0).abs() < 1e-10);
        // peak sits near r0
        let near = v.upper.eval(r0).abs();
        let far = v.upper.eval(r0 + 4.0 / a.sqrt()).abs();
        assert!(near > 100.0 * far);
        assert!(concentrated_trap(0.1, a).is_err());
    }
}
