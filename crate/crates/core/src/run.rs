//! Configuration-driven runs behind the command-line tool.

use serde::Serialize;

use crate::analysis::{
    check_theorem_intervals, classify, linear_grid, sweep, sweep_rebuild, ComplianceReport, SweepOptions,
    SweepTrace, TrapFamily,
};
use crate::assembly::assemble;
use crate::basis::{
    atomic_balance_basis, builtin_exponents, dual_kinetic_balance_basis, kinetic_balance_basis,
    upper_lower_basis, BasisSet, BasisVector, ExponentSet,
};
use crate::config::{ExponentSource, PotentialKind, RunConfig, SchemeKind, SweepParameter, TrapKind};
use crate::eigen::{gap_eigenvalues, solve_pencil, SpectrumResult};
use crate::error::{Error, Result};
use crate::exact::{exact_levels, nearest_distance, DEFAULT_LEVELS};
use crate::free::FreeProjector;
use crate::model::{BalanceScheme, PhysicalParams, PotentialSpec};
use crate::scenario::{reference_vectors, refined_reference_levels, REFERENCE_EXPONENTS};

/// Everything a run needs, resolved from a configuration.
pub struct Setup {
    pub params: PhysicalParams,
    pub potential: PotentialSpec,
    pub exponents: ExponentSet,
    /// Base basis without traps.
    pub base: BasisSet,
    pub projector: Option<FreeProjector>,
    /// True gap levels: exact for Coulomb, refined-basis otherwise.
    pub reference_levels: Vec<f64>,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let params = PhysicalParams::new(cfg.alpha, cfg.z)?;
        let potential = match cfg.potential {
            PotentialKind::Coulomb => PotentialSpec::point_coulomb(&params)?,
            PotentialKind::GaussianWell => PotentialSpec::gaussian_well(cfg.depth, cfg.width)?,
            PotentialKind::Zero => PotentialSpec::Zero,
        };
        let exponents = match &cfg.exponents {
            ExponentSource::Named(n) => builtin_exponents(n)?,
            ExponentSource::List(l) => ExponentSet::new("custom", l.clone())?,
        };
        let (base, projector) = base_basis(cfg, &params, &potential, &exponents, cfg.eps)?;
        let reference_levels = match potential {
            PotentialSpec::PointCoulomb { .. } => exact_levels(&params, DEFAULT_LEVELS)?.energies(),
            _ => refined_reference_levels(&exponents, &params, &potential, &cfg.solver)?,
        };
        Ok(Self { params, potential, exponents, base, projector, reference_levels })
    }

    pub fn scheme(&self) -> BalanceScheme {
        self.base.scheme
    }

    /// Trap family matching the scheme and trap kind.
    pub fn trap_family(&self, cfg: &RunConfig, eps: f64) -> Option<TrapFamily> {
        let b = self.params.scale_exponent(cfg.b_reduced);
        let family = match cfg.trap {
            TrapKind::None => return None,
            TrapKind::Mixed => TrapFamily::Mixed { b },
            TrapKind::Concentrated => TrapFamily::Concentrated { a: cfg.width_exponent },
            TrapKind::Contracted => match cfg.scheme {
                SchemeKind::UpperLower => TrapFamily::ContractedUpper { b },
                SchemeKind::KineticBalance | SchemeKind::FreeBasis => TrapFamily::ContractedKinetic { b },
                SchemeKind::AtomicBalance => TrapFamily::ContractedAtomic { b, potential: self.potential },
                SchemeKind::DualKineticBalance => TrapFamily::ContractedDkb { b, eps },
            },
        };
        Some(match &self.projector {
            Some(p) => TrapFamily::FreeProjected { inner: Box::new(family), projector: Box::new(p.clone()) },
            None => family,
        })
    }

    pub fn references(&self) -> Vec<BasisVector> {
        reference_vectors(&self.base, REFERENCE_EXPONENTS)
    }
}

fn base_basis(
    cfg: &RunConfig,
    params: &PhysicalParams,
    potential: &PotentialSpec,
    exps: &ExponentSet,
    eps: f64,
) -> Result<(BasisSet, Option<FreeProjector>)> {
    Ok(match cfg.scheme {
        SchemeKind::UpperLower => (upper_lower_basis(exps, params)?, None),
        SchemeKind::KineticBalance => (kinetic_balance_basis(exps, params, &[])?, None),
        SchemeKind::AtomicBalance => (atomic_balance_basis(exps, params, potential, &[])?, None),
        SchemeKind::DualKineticBalance => (dual_kinetic_balance_basis(exps, params, eps, &[])?, None),
        SchemeKind::FreeBasis => {
            let size = cfg.aux_size.unwrap_or(2 * exps.len());
            let aux_exps = ExponentSet::even_tempered(exps.values()[0], cfg.aux_ratio, size)?;
            let aux = kinetic_balance_basis(&aux_exps, params, &[])?;
            let proj = FreeProjector::new(aux, &cfg.solver)?;
            let n_keep = cfg.n_keep.unwrap_or(exps.len());
            if n_keep > size {
                return Err(Error::config("basis.n_keep", format!("exceeds auxiliary size {size}")));
            }
            let mut b = proj.basis(n_keep)?;
            b.params = *params;
            (b, Some(proj))
        }
    })
}

fn trap_value(cfg: &RunConfig) -> f64 {
    match cfg.trap {
        TrapKind::Mixed => cfg.theta,
        TrapKind::Concentrated => cfg.r0,
        _ => cfg.delta,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapLevel {
    pub value: f64,
    /// Distance to the nearest reference level.
    pub oracle_distance: f64,
}

pub struct SpectrumRun {
    pub scheme: BalanceScheme,
    pub basis_size: usize,
    pub hermiticity_defect: f64,
    pub result: SpectrumResult,
    pub gap: Vec<GapLevel>,
}

/// Build the basis (with the configured trap at its fixed parameter),
/// assemble and solve.
pub fn run_spectrum(cfg: &RunConfig) -> Result<SpectrumRun> {
    let setup = Setup::new(cfg)?;
    let mut vectors = setup.base.vectors.clone();
    if let Some(f) = setup.trap_family(cfg, cfg.eps) {
        vectors.extend(f.vectors(trap_value(cfg))?);
    }
    let pencil = assemble(&vectors, &setup.potential)?;
    let result = solve_pencil(&pencil, &cfg.solver)?;
    let gap = gap_eigenvalues(&result, 1e-6)
        .into_iter()
        .map(|(_, v)| GapLevel { value: v, oracle_distance: nearest_distance(&setup.reference_levels, v) })
        .collect();
    Ok(SpectrumRun {
        scheme: setup.scheme(),
        basis_size: vectors.len(),
        hermiticity_defect: pencil.meta.hermiticity_defect,
        result,
        gap,
    })
}

/// Sweep the configured parameter and classify the trajectories.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTrace> {
    let setup = Setup::new(cfg)?;
    let grid = linear_grid(cfg.from, cfg.to, cfg.steps)?;
    let opts = SweepOptions { solve: cfg.solver, margin: 0.0 };
    let refs = setup.references();
    let trace = match cfg.sweep {
        SweepParameter::None => return Err(Error::config("sweep.parameter", "no sweep parameter configured")),
        SweepParameter::Eps => sweep_rebuild(
            "eps",
            |eps| {
                let (mut b, _) = base_basis(cfg, &setup.params, &setup.potential, &setup.exponents, eps)?;
                if let Some(f) = setup.trap_family(cfg, eps) {
                    b.vectors.extend(f.vectors(trap_value(cfg))?);
                }
                Ok(b.vectors)
            },
            &setup.potential,
            &grid,
            &refs,
            &opts,
        )?,
        _ => {
            let family = setup.trap_family(cfg, cfg.eps).expect("validated: sweeps need a trap");
            sweep(&setup.base, &setup.potential, &family, &grid, &refs, &opts)?
        }
    };
    classify(&trace, &setup.reference_levels, &cfg.thresholds)
}

/// Solve with the configured trap and compare unmatched gap eigenvalues
/// against the scheme's pollution intervals.
pub fn run_check_intervals(cfg: &RunConfig) -> Result<ComplianceReport> {
    let setup = Setup::new(cfg)?;
    let mut vectors = setup.base.vectors.clone();
    if let Some(f) = setup.trap_family(cfg, cfg.eps) {
        vectors.extend(f.vectors(trap_value(cfg))?);
    }
    let result = solve_pencil(&assemble(&vectors, &setup.potential)?, &cfg.solver)?;
    check_theorem_intervals(
        &result,
        &setup.scheme(),
        &setup.potential,
        &setup.reference_levels,
        cfg.thresholds.oracle_tol,
    )
}
