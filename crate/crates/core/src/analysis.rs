//! Parameter sweeps, eigenvalue trajectories, spuriousness scoring and
//! interval compliance.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::assembly::{append_vectors, assemble};
use crate::basis::{
    atomic_pair, concentrated_trap, contracted_trap, dkb_pair, dkb_trap_seeds, kinetic_pair,
    mixed_trap_vector, BasisSet, BasisVector, VectorLabel, VectorRole,
};
use crate::eigen::{gap_eigenvalues, solve_pencil, SolveOptions, SpectrumResult};
use crate::error::{Error, Result};
use crate::exact::nearest_distance;
use crate::free::FreeProjector;
use crate::model::{theorem_intervals, BalanceScheme, GapInterval, PotentialSpec};

/// Matches farther apart than this (a quarter of the gap) are reported.
pub const TRACKING_WARN_DISTANCE: f64 = 0.5;

/// One-parameter families of extra vectors appended to a base basis.
#[derive(Debug, Clone)]
pub enum TrapFamily {
    /// Parameter θ: `mixed_trap_vector(θ, b)`.
    Mixed { b: f64 },
    /// Parameter δ: contracted trap as a bare upper spinor.
    ContractedUpper { b: f64 },
    /// Parameter δ: contracted trap and its kinetic partner.
    ContractedKinetic { b: f64 },
    /// Parameter δ: contracted trap and its atomic-balance partner.
    ContractedAtomic { b: f64, potential: PotentialSpec },
    /// Parameter δ: contracted-trap seeds through the DKB map.
    ContractedDkb { b: f64, eps: f64 },
    /// Parameter r0: concentrated pure-upper bump of exponent `a`.
    Concentrated { a: f64 },
    /// Any family above, projected on the free electronic and positronic
    /// subspaces.
    FreeProjected { inner: Box<TrapFamily>, projector: Box<FreeProjector> },
}

impl TrapFamily {
    pub fn parameter_name(&self) -> &'static str {
        match self {
            TrapFamily::Mixed { .. } => "theta",
            TrapFamily::Concentrated { .. } => "r0",
            TrapFamily::FreeProjected { inner, .. } => inner.parameter_name(),
            _ => "delta",
        }
    }

    pub fn vectors(&self, p: f64) -> Result<Vec<BasisVector>> {
        let tag = |v: BasisVector| {
            let name = format!("{}={p}", self.parameter_name());
            if v.label.trap.is_some() {
                v
            } else {
                v.tagged(name)
            }
        };
        let out: Vec<BasisVector> = match self {
            TrapFamily::Mixed { b } => vec![mixed_trap_vector(p, *b)?],
            TrapFamily::ContractedUpper { b } => vec![BasisVector::normalized(
                contracted_trap(*b, p)?,
                crate::radial::RadialFunction::zero(),
                VectorLabel { role: VectorRole::Upper, exponent: None, trap: None },
            )?],
            TrapFamily::ContractedKinetic { b } => kinetic_pair(&contracted_trap(*b, p)?, None)?.to_vec(),
            TrapFamily::ContractedAtomic { b, potential } => {
                atomic_pair(&contracted_trap(*b, p)?, potential, None)?.to_vec()
            }
            TrapFamily::ContractedDkb { b, eps } => {
                let (u, w) = dkb_trap_seeds(*b, p)?;
                dkb_pair(&u, &w, *eps, None)?.to_vec()
            }
            TrapFamily::Concentrated { a } => vec![concentrated_trap(p, *a)?],
            TrapFamily::FreeProjected { inner, projector } => {
                let mut out = Vec::new();
                for v in inner.vectors(p)? {
                    let (plus, minus) = projector.project(&v)?;
                    out.extend(plus);
                    out.extend(minus);
                }
                out
            }
        };
        Ok(out.into_iter().map(tag).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub drift_factor: f64,
    /// Drifts below this never count as large, however small the median.
    pub drift_floor: f64,
    pub oracle_tol: f64,
    pub overlap_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { drift_factor: 10.0, drift_floor: 1e-6, oracle_tol: 1e-3, overlap_tol: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Drift,
    OracleDistance,
    OverlapDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub spurious: bool,
    pub triggered: Vec<Criterion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// One entry per grid point; NaN where the trajectory is absent.
    pub values: Vec<f64>,
    /// max |Δλ| over adjacent grid points where both values exist.
    pub drift: f64,
    /// Smallest distance to a reference level over the trajectory; NaN
    /// until classified.
    pub oracle_distance: f64,
    /// max over references of |⟨Φ_ref, Ψ⟩| per grid point.
    pub overlap_decay: Vec<f64>,
    pub verdict: Option<Verdict>,
}

impl Trajectory {
    pub fn defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate().filter(|(_, v)| !v.is_nan())
    }

    pub fn is_spurious(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.spurious)
    }

    fn final_overlap(&self) -> Option<f64> {
        self.overlap_decay.iter().rev().copied().find(|x| !x.is_nan())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub warnings: Vec<String>,
}

/// Gap eigenvalues at one grid point and their largest reference overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpectrum {
    pub values: Vec<f64>,
    pub overlaps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub solve: SolveOptions,
    pub margin: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { solve: SolveOptions::default(), margin: 0.0 }
    }
}

/// Gap eigenvalues of `result` with their largest overlap against `refs`,
/// given the overlap matrix `o` (refs × basis).
pub fn grid_spectrum(result: &SpectrumResult, o: &DMatrix<f64>, margin: f64) -> GridSpectrum {
    let gap = gap_eigenvalues(result, margin);
    let overlaps = gap
        .iter()
        .map(|(k, _)| {
            if o.nrows() == 0 {
                return f64::NAN;
            }
            (o * result.eigenvectors.column(*k)).amax()
        })
        .collect();
    GridSpectrum { values: gap.into_iter().map(|p| p.1).collect(), overlaps }
}

fn overlap_matrix(refs: &[BasisVector], basis: &[BasisVector]) -> Result<DMatrix<f64>> {
    let mut o = DMatrix::zeros(refs.len(), basis.len());
    for (i, r) in refs.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            o[(i, j)] = r.overlap(b)?;
        }
    }
    Ok(o)
}

/// Solve `vectors` under `potential` and collect its gap spectrum.
pub fn solve_point(
    vectors: &[BasisVector],
    potential: &PotentialSpec,
    refs: &[BasisVector],
    opts: &SweepOptions,
) -> Result<GridSpectrum> {
    let pencil = assemble(vectors, potential)?;
    let result = solve_pencil(&pencil, &opts.solve)?;
    Ok(grid_spectrum(&result, &overlap_matrix(refs, vectors)?, opts.margin))
}

/// Sweep a trap family over `grid`, appending its vectors to `base`.
/// The base pencil and reference overlaps are computed once.
pub fn sweep(
    base: &BasisSet,
    potential: &PotentialSpec,
    trap: &TrapFamily,
    grid: &[f64],
    refs: &[BasisVector],
    opts: &SweepOptions,
) -> Result<SweepTrace> {
    sweep_with(base, potential, trap.parameter_name(), |p| trap.vectors(p), grid, refs, opts)
}

/// [`sweep`] with an arbitrary family of extra vectors.
pub fn sweep_with(
    base: &BasisSet,
    potential: &PotentialSpec,
    parameter: &str,
    family: impl Fn(f64) -> Result<Vec<BasisVector>>,
    grid: &[f64],
    refs: &[BasisVector],
    opts: &SweepOptions,
) -> Result<SweepTrace> {
    check_grid(grid)?;
    let base_pencil = assemble(&base.vectors, potential)?;
    let base_o = overlap_matrix(refs, &base.vectors)?;
    let mut points = Vec::with_capacity(grid.len());
    for &p in grid {
        let extra = family(p)?;
        let pencil = append_vectors(&base_pencil, &base.vectors, potential, &extra)?;
        let result = solve_pencil(&pencil, &opts.solve)?;
        let mut o = base_o.clone().resize_horizontally(base.len() + extra.len(), 0.0);
        let extra_o = overlap_matrix(refs, &extra)?;
        o.view_mut((0, base.len()), (refs.len(), extra.len())).copy_from(&extra_o);
        points.push(grid_spectrum(&result, &o, opts.margin));
    }
    Ok(track(parameter, grid, &points))
}

/// Sweep where the whole basis is rebuilt at every grid point (e.g. the
/// DKB ε). References are fixed vectors.
pub fn sweep_rebuild(
    parameter: &str,
    build: impl Fn(f64) -> Result<Vec<BasisVector>>,
    potential: &PotentialSpec,
    grid: &[f64],
    refs: &[BasisVector],
    opts: &SweepOptions,
) -> Result<SweepTrace> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&p| solve_point(&build(p)?, potential, refs, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(track(parameter, grid, &points))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input("empty sweep grid".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::Input("non-finite sweep grid value".into()));
    }
    Ok(())
}

/// `steps` equally spaced values from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::param("steps", "a sweep needs at least 2 steps"));
    }
    Ok((0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect())
}

/// Link per-point gap values into trajectories by greedy nearest-value
/// matching against each trajectory's last value; ties go to the smaller
/// trajectory index, then the smaller value index.
pub fn track(parameter: &str, grid: &[f64], points: &[GridSpectrum]) -> SweepTrace {
    let n = grid.len();
    let mut trajectories: Vec<Trajectory> = Vec::new();
    let mut last: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (t, l) in last.iter().enumerate() {
            for (k, v) in pt.values.iter().enumerate() {
                pairs.push(((l - v).abs(), t, k));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut t_used = vec![false; last.len()];
        let mut v_used = vec![false; pt.values.len()];
        for (d, t, k) in pairs {
            if t_used[t] || v_used[k] {
                continue;
            }
            t_used[t] = true;
            v_used[k] = true;
            if d > TRACKING_WARN_DISTANCE {
                warnings.push(format!(
                    "grid point {i} ({parameter}={}): trajectory {t} jumps by {d:.3}",
                    grid[i]
                ));
            }
            trajectories[t].values[i] = pt.values[k];
            trajectories[t].overlap_decay[i] = pt.overlaps[k];
            last[t] = pt.values[k];
        }
        for k in (0..pt.values.len()).filter(|k| !v_used[*k]) {
            let mut tr = Trajectory {
                values: vec![f64::NAN; n],
                drift: 0.0,
                oracle_distance: f64::NAN,
                overlap_decay: vec![f64::NAN; n],
                verdict: None,
            };
            tr.values[i] = pt.values[k];
            tr.overlap_decay[i] = pt.overlaps[k];
            trajectories.push(tr);
            last.push(pt.values[k]);
        }
    }
    for tr in &mut trajectories {
        tr.drift = tr
            .values
            .windows(2)
            .filter(|w| !w[0].is_nan() && !w[1].is_nan())
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
    }
    SweepTrace { parameter: parameter.to_string(), grid: grid.to_vec(), trajectories, warnings }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Score every trajectory; spurious when at least two criteria hold.
/// `reference_levels` are the true gap eigenvalues (exact or from a
/// converged reference computation).
pub fn classify(trace: &SweepTrace, reference_levels: &[f64], th: &Thresholds) -> Result<SweepTrace> {
    if trace.grid.is_empty() {
        return Err(Error::Input("trace has no grid points".into()));
    }
    if trace.trajectories.is_empty() {
        return Ok(trace.clone());
    }
    let med = median(trace.trajectories.iter().map(|t| t.drift).collect());
    let drift_cut = (th.drift_factor * med).max(th.drift_floor);
    let mut out = trace.clone();
    for tr in &mut out.trajectories {
        tr.oracle_distance = tr
            .defined()
            .map(|(_, v)| nearest_distance(reference_levels, v))
            .fold(f64::INFINITY, f64::min);
        let mut triggered = Vec::new();
        if tr.drift > drift_cut {
            triggered.push(Criterion::Drift);
        }
        if tr.oracle_distance > th.oracle_tol {
            triggered.push(Criterion::OracleDistance);
        }
        if tr.final_overlap().is_some_and(|o| o < th.overlap_tol) {
            triggered.push(Criterion::OverlapDecay);
        }
        tr.verdict = Some(Verdict { spurious: triggered.len() >= 2, triggered });
    }
    Ok(out)
}

impl SweepTrace {
    pub fn spurious(&self) -> impl Iterator<Item = (usize, &Trajectory)> {
        self.trajectories.iter().enumerate().filter(|(_, t)| t.is_spurious())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// One row per grid point: parameter, one column per trajectory, then
    /// one spurious flag column per trajectory (1/0, empty if unclassified).
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.parameter);
        for j in 0..self.trajectories.len() {
            let _ = write!(s, ",traj_{j}");
        }
        for j in 0..self.trajectories.len() {
            let _ = write!(s, ",spurious_{j}");
        }
        s.push('\n');
        for (i, p) in self.grid.iter().enumerate() {
            s.push_str(&format_sig(*p));
            for t in &self.trajectories {
                s.push(',');
                if !t.values[i].is_nan() {
                    s.push_str(&format_sig(t.values[i]));
                }
            }
            for t in &self.trajectories {
                s.push(',');
                if let Some(v) = &t.verdict {
                    s.push(if v.spurious { '1' } else { '0' });
                }
            }
            s.push('\n');
        }
        s
    }
}

/// 12 significant digits, `%g` style.
pub fn format_sig(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG).contains(&exp) {
        let fixed = format!("{:.*}", (SIG - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub scheme: String,
    pub upper_interval: GapInterval,
    pub lower_interval: GapInterval,
    /// Intervals cover the whole gap (unbounded potential): nothing to check.
    pub whole_gap: bool,
    /// Gap eigenvalues with no reference level within the tolerance.
    pub unmatched: Vec<f64>,
    /// Unmatched eigenvalues outside both intervals.
    pub violations: Vec<f64>,
}

impl ComplianceReport {
    pub fn compliant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every gap eigenvalue farther than `oracle_tol` from all reference levels
/// must lie in one of the scheme's pollution intervals.
pub fn check_theorem_intervals(
    result: &SpectrumResult,
    scheme: &BalanceScheme,
    potential: &PotentialSpec,
    reference_levels: &[f64],
    oracle_tol: f64,
) -> Result<ComplianceReport> {
    let (up, lo) = theorem_intervals(scheme, potential)?;
    let unmatched: Vec<f64> = gap_eigenvalues(result, 0.0)
        .into_iter()
        .map(|p| p.1)
        .filter(|&l| nearest_distance(reference_levels, l) > oracle_tol)
        .collect();
    let violations = unmatched
        .iter()
        .copied()
        .filter(|&l| !up.contains(l, 1e-9) && !lo.contains(l, 1e-9))
        .collect();
    Ok(ComplianceReport {
        scheme: scheme.name().to_string(),
        upper_interval: up,
        lower_interval: lo,
        whole_gap: up == GapInterval::WHOLE || lo == GapInterval::WHOLE,
        unmatched,
        violations,
    })
}
