//! Radial functions built from terms `c · r^k · exp(−a r²)`, optionally
//! carrying an atomic-balance weight, together with the reduced operators
//! `D⁻ = d/dr − 1/r` and `D⁺ = −d/dr − 1/r` of the κ = −1 channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::quadrature::{self, QuadOptions};

/// Admissible Gaussian exponents. Keeps `moment` away from overflow.
pub const MIN_EXPONENT: f64 = 1e-8;
pub const MAX_EXPONENT: f64 = 1e12;

pub(crate) fn check_exponent(a: f64) -> Result<()> {
    if (MIN_EXPONENT..=MAX_EXPONENT).contains(&a) {
        Ok(())
    } else {
        Err(Error::param("exponent", format!("{a:e} outside [{MIN_EXPONENT:e}, {MAX_EXPONENT:e}]")))
    }
}

/// Multiplicative factor `(2 − V(r))⁻¹` attached to a term by atomic balance.
///
/// For the point nucleus the factor `r/(2r + αZ)` is stored with its `r`
/// folded into the term power, so the weight itself is `1/(2r + αZ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BalanceWeight {
    None,
    Coulomb { alpha_z: f64 },
    Well { depth: f64, width: f64 },
}

impl BalanceWeight {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            BalanceWeight::None => 1.0,
            BalanceWeight::Coulomb { alpha_z } => 1.0 / (2.0 * r + alpha_z),
            BalanceWeight::Well { depth, width } => {
                1.0 / (2.0 - depth * (-(r * r) / (width * width)).exp())
            }
        }
    }

    /// Upper bound of the factor on (0, ∞).
    fn sup(&self) -> f64 {
        match *self {
            BalanceWeight::None => 1.0,
            BalanceWeight::Coulomb { alpha_z } => 1.0 / alpha_z,
            BalanceWeight::Well { depth, .. } => 1.0 / (2.0 - depth.max(0.0)),
        }
    }

    fn is_none(&self) -> bool {
        matches!(self, BalanceWeight::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coeff: f64,
    pub power: u32,
    pub exponent: f64,
    pub weight: BalanceWeight,
}

impl RadialTerm {
    pub fn new(coeff: f64, power: u32, exponent: f64) -> Result<Self> {
        check_exponent(exponent)?;
        Ok(Self { coeff, power, exponent, weight: BalanceWeight::None })
    }

    pub fn is_weighted(&self) -> bool {
        !self.weight.is_none()
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        self.coeff * r.powi(self.power as i32) * (-self.exponent * r * r).exp() * self.weight.eval(r)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialFunction {
    terms: Vec<RadialTerm>,
}

impl RadialFunction {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `coeff · r^power · exp(−exponent r²)`.
    pub fn gaussian(coeff: f64, power: u32, exponent: f64) -> Result<Self> {
        Ok(Self::from_terms(vec![RadialTerm::new(coeff, power, exponent)?]))
    }

    pub fn from_terms(terms: Vec<RadialTerm>) -> Self {
        let mut f = Self { terms };
        f.simplify();
        f
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_weighted(&self) -> bool {
        self.terms.iter().any(RadialTerm::is_weighted)
    }

    /// Lowest power of r among the terms; `None` for the zero function.
    pub fn min_power(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.power).min()
    }

    /// Whether `∫|f|²/r` is finite, as required next to a point nucleus.
    pub fn is_coulomb_compatible(&self) -> bool {
        self.min_power().is_none_or(|k| k >= 1)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| RadialTerm { coeff: t.coeff * s, ..*t }).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).copied().collect())
    }

    /// Linear combination `Σ cᵢ fᵢ`.
    pub fn combination<'a>(parts: impl IntoIterator<Item = (f64, &'a RadialFunction)>) -> Self {
        let mut terms = Vec::new();
        for (c, f) in parts {
            terms.extend(f.terms.iter().map(|t| RadialTerm { coeff: t.coeff * c, ..*t }));
        }
        Self::from_terms(terms)
    }

    /// Multiply every term by a balance weight. Fails if a term already has one.
    pub fn with_weight(&self, weight: BalanceWeight, extra_power: u32) -> Result<Self> {
        if self.is_weighted() {
            return Err(Error::Unsupported("cannot stack balance weights".into()));
        }
        Ok(Self::from_terms(
            self.terms
                .iter()
                .map(|t| RadialTerm { power: t.power + extra_power, weight, ..*t })
                .collect(),
        ))
    }

    pub fn norm_sq(&self) -> Result<f64> {
        inner(self, self, &InnerWeight::One)
    }

    /// Merge terms with identical (power, exponent, weight) and drop zeros.
    fn simplify(&mut self) {
        let mut out: Vec<RadialTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(o) = out
                .iter_mut()
                .find(|o| o.power == t.power && o.exponent == t.exponent && o.weight == t.weight)
            {
                o.coeff += t.coeff;
            } else {
                out.push(t);
            }
        }
        out.retain(|t| t.coeff != 0.0);
        self.terms = out;
    }

    fn plain_terms(&self, op: &str) -> Result<&[RadialTerm]> {
        if self.is_weighted() {
            return Err(Error::Unsupported(format!("{op} is not defined on balance-weighted terms")));
        }
        if self.terms.iter().any(|t| t.power == 0) {
            return Err(Error::Unsupported(format!("{op} maps an r^0 term outside the term grammar")));
        }
        Ok(&self.terms)
    }
}

/// `∫₀^∞ r^n exp(−c r²) dr = Γ((n+1)/2) / (2 c^{(n+1)/2})`.
pub fn moment(n: i32, c: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Domain(format!("moment order {n} < 0")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("moment exponent {c} must be positive")));
    }
    Ok(moment_unchecked(n as u32, c))
}

#[inline]
fn moment_unchecked(n: u32, c: f64) -> f64 {
    let m = n + 1;
    let root = if m % 2 == 1 { c.sqrt() } else { 1.0 };
    gamma_half(m) / (2.0 * c.powi((m / 2) as i32) * root)
}

/// Γ(m/2) for m ≥ 1.
fn gamma_half(m: u32) -> f64 {
    const SQRT_PI: f64 = 1.772_453_850_905_516;
    let (mut g, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (SQRT_PI, 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// `D⁻ f = f′ − f/r`.
pub fn apply_d_minus(f: &RadialFunction) -> Result<RadialFunction> {
    let mut terms = Vec::with_capacity(2 * f.terms.len());
    for t in f.plain_terms("D-")? {
        let k = t.power;
        if k != 1 {
            terms.push(RadialTerm { coeff: (k as f64 - 1.0) * t.coeff, power: k - 1, ..*t });
        }
        terms.push(RadialTerm { coeff: -2.0 * t.exponent * t.coeff, power: k + 1, ..*t });
    }
    Ok(RadialFunction::from_terms(terms))
}

/// `D⁺ f = −f′ − f/r`.
pub fn apply_d_plus(f: &RadialFunction) -> Result<RadialFunction> {
    let mut terms = Vec::with_capacity(2 * f.terms.len());
    for t in f.plain_terms("D+")? {
        let k = t.power;
        terms.push(RadialTerm { coeff: -(k as f64 + 1.0) * t.coeff, power: k - 1, ..*t });
        terms.push(RadialTerm { coeff: 2.0 * t.exponent * t.coeff, power: k + 1, ..*t });
    }
    Ok(RadialFunction::from_terms(terms))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerWeight {
    One,
    InvR,
    Potential(PotentialSpec),
}

impl InnerWeight {
    /// Whether the weight is ~1/r at the origin.
    fn singular(&self) -> bool {
        match self {
            InnerWeight::InvR => true,
            InnerWeight::Potential(p) => p.singular_at_origin(),
            _ => false,
        }
    }
}

/// `∫₀^∞ f(r) g(r) w(r) dr`, in closed form for plain terms, by adaptive
/// quadrature when a balance weight is present.
pub fn inner(f: &RadialFunction, g: &RadialFunction, weight: &InnerWeight) -> Result<f64> {
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    if weight.singular() {
        for a in &f.terms {
            for b in &g.terms {
                if a.power + b.power == 0 {
                    return Err(Error::Integrability(
                        "r^0 · r^0 against a 1/r weight diverges at the origin".into(),
                    ));
                }
            }
        }
    }
    if matches!(weight, InnerWeight::Potential(PotentialSpec::Zero))
        || matches!(weight, InnerWeight::Potential(PotentialSpec::PointCoulomb { alpha_z }) if *alpha_z == 0.0)
    {
        return Ok(0.0);
    }
    if f.is_weighted() || g.is_weighted() {
        return inner_quadrature(f, g, weight);
    }
    Ok(inner_closed(f, g, weight))
}

fn inner_closed(f: &RadialFunction, g: &RadialFunction, weight: &InnerWeight) -> f64 {
    let pairs = |shift: i32, extra: f64| -> f64 {
        let mut sum = 0.0;
        for a in &f.terms {
            for b in &g.terms {
                let n = (a.power + b.power) as i32 + shift;
                sum += a.coeff * b.coeff * moment_unchecked(n as u32, a.exponent + b.exponent + extra);
            }
        }
        sum
    };
    match *weight {
        InnerWeight::One => pairs(0, 0.0),
        InnerWeight::InvR => pairs(-1, 0.0),
        InnerWeight::Potential(PotentialSpec::PointCoulomb { alpha_z }) => -alpha_z * pairs(-1, 0.0),
        InnerWeight::Potential(PotentialSpec::GaussianWell { depth, width }) => {
            depth * pairs(0, 1.0 / (width * width))
        }
        InnerWeight::Potential(PotentialSpec::Zero) => 0.0,
    }
}

fn inner_quadrature(f: &RadialFunction, g: &RadialFunction, weight: &InnerWeight) -> Result<f64> {
    let w = *weight;
    let weight_at = move |r: f64| -> f64 {
        match w {
            InnerWeight::One => 1.0,
            InnerWeight::InvR => 1.0 / r,
            InnerWeight::Potential(p) => match p {
                PotentialSpec::PointCoulomb { alpha_z } => -alpha_z / r,
                PotentialSpec::GaussianWell { depth, width } => {
                    depth * (-(r * r) / (width * width)).exp()
                }
                PotentialSpec::Zero => 0.0,
            },
        }
    };

    // Length scales present in the integrand seed the subdivision.
    let mut min_exp = f64::INFINITY;
    let mut max_pow = 0u32;
    let mut scales = Vec::new();
    let mut mass = 0.0;
    let mut pair_bounds = Vec::new();
    for a in &f.terms {
        for b in &g.terms {
            let c = a.exponent + b.exponent;
            let n = a.power + b.power;
            let amp = (a.coeff * b.coeff).abs() * a.weight.sup() * b.weight.sup();
            min_exp = min_exp.min(c);
            max_pow = max_pow.max(n);
            scales.push(1.0 / c.sqrt());
            mass += amp * moment_unchecked(n, c);
            pair_bounds.push((amp, n, c));
        }
    }
    match w {
        InnerWeight::Potential(PotentialSpec::GaussianWell { width, .. }) => scales.push(width),
        InnerWeight::Potential(PotentialSpec::PointCoulomb { alpha_z }) if alpha_z > 0.0 => {
            scales.push(alpha_z)
        }
        _ => {}
    }
    for t in f.terms.iter().chain(g.terms.iter()) {
        if let BalanceWeight::Coulomb { alpha_z } = t.weight {
            scales.push(0.5 * alpha_z);
        }
        if let BalanceWeight::Well { width, .. } = t.weight {
            scales.push(width);
        }
    }

    // Cut-off where the Gaussian tails fall below 1e-16 of the absolute mass.
    let tail = |r: f64| -> f64 {
        pair_bounds
            .iter()
            .map(|&(amp, n, c)| {
                // ∫_R^∞ r^n e^{-c r²} ≤ R^{n-1} e^{-cR²} / (2c) · 2 once 2cR² ≥ 2n
                amp * r.powi(n as i32 - 1) * (-c * r * r).exp() / c
            })
            .sum::<f64>()
    };
    let mut r_cut = (max_pow.max(1) as f64 / min_exp).sqrt().max(1.0 / min_exp.sqrt());
    while tail(r_cut) > 1e-16 * mass {
        r_cut *= 1.1;
    }

    let mut points = vec![0.0];
    let mut seeds: Vec<f64> = scales
        .iter()
        .flat_map(|&s| [0.25 * s, s, 3.0 * s])
        .filter(|&s| s > 0.0 && s < r_cut)
        .collect();
    seeds.sort_by(f64::total_cmp);
    seeds.dedup_by(|a, b| (*a / *b - 1.0).abs() < 0.05);
    points.extend(seeds);
    points.push(r_cut);

    let q = quadrature::integrate(
        |r| if r == 0.0 { 0.0 } else { f.eval(r) * g.eval(r) * weight_at(r) },
        &points,
        QuadOptions::default(),
    )?;
    Ok(q.value)
}
