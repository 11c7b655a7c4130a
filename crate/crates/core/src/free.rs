//! Approximate electronic/positronic subspaces from the free operator
//! diagonalised in an auxiliary basis.

use nalgebra::DVector;

use crate::assembly::{assemble, Pencil};
use crate::basis::{BasisSet, BasisVector, VectorLabel, VectorRole};
use crate::eigen::{solve_pencil, SolveOptions, SpectrumResult};
use crate::error::{Error, Result};
use crate::model::{BalanceScheme, PhysicalParams, PotentialSpec};
use crate::radial::RadialFunction;

/// Projected pieces with squared norm below this are dropped.
pub const PROJECTION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FreeProjector {
    aux: BasisSet,
    pencil: Pencil,
    spectrum: SpectrumResult,
}

impl FreeProjector {
    pub fn new(aux: BasisSet, opts: &SolveOptions) -> Result<Self> {
        let pencil = assemble(&aux.vectors, &PotentialSpec::Zero)?;
        let spectrum = solve_pencil(&pencil, opts)?;
        Ok(Self { aux, pencil, spectrum })
    }

    pub fn aux(&self) -> &BasisSet {
        &self.aux
    }

    pub fn spectrum(&self) -> &SpectrumResult {
        &self.spectrum
    }

    pub fn aux_residual_max(&self) -> f64 {
        self.spectrum.residual_max()
    }

    fn positive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.spectrum.eigenvalues.len()).filter(|&k| self.spectrum.eigenvalues[k] > 0.0)
    }

    fn negative(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.spectrum.eigenvalues.len()).filter(|&k| self.spectrum.eigenvalues[k] < 0.0)
    }

    fn vector_from(&self, coeffs: &DVector<f64>, label: VectorLabel) -> Result<BasisVector> {
        let v = &self.aux.vectors;
        let upper = RadialFunction::combination(coeffs.iter().copied().zip(v.iter().map(|b| &b.upper)));
        let lower = RadialFunction::combination(coeffs.iter().copied().zip(v.iter().map(|b| &b.lower)));
        BasisVector::normalized(upper, lower, label)
    }

    /// The `n_keep` electronic states of lowest energy and the `n_keep`
    /// positronic states of highest energy.
    pub fn basis(&self, n_keep: usize) -> Result<BasisSet> {
        let plus: Vec<usize> = self.positive().take(n_keep).collect();
        let mut minus: Vec<usize> = self.negative().collect();
        minus.reverse();
        minus.truncate(n_keep);
        if plus.len() < n_keep || minus.len() < n_keep {
            return Err(Error::Construction(format!(
                "free pencil has {} electronic and {} positronic states, {n_keep} requested",
                self.positive().count(),
                self.negative().count()
            )));
        }
        let mut vectors = Vec::with_capacity(2 * n_keep);
        for (k, role) in plus
            .iter()
            .map(|k| (*k, VectorRole::FreeElectronic))
            .chain(minus.iter().map(|k| (*k, VectorRole::FreePositronic)))
        {
            let label = VectorLabel { role, exponent: None, trap: None };
            vectors.push(self.vector_from(&self.spectrum.eigenvector(k), label)?);
        }
        Ok(BasisSet { vectors, scheme: BalanceScheme::FreeBasis, params: self.aux.params })
    }

    /// Split `t` into its components along the electronic and positronic
    /// free eigenvectors of the auxiliary basis. Parts lying (numerically)
    /// outside the auxiliary span are lost.
    pub fn project(&self, t: &BasisVector) -> Result<(Option<BasisVector>, Option<BasisVector>)> {
        let n = self.aux.len();
        let s = DVector::from_iterator(
            n,
            self.aux.vectors.iter().map(|b| b.overlap(t)).collect::<Result<Vec<_>>>()?,
        );
        let part = |ks: Vec<usize>, role: VectorRole| -> Result<Option<BasisVector>> {
            let mut coeffs = DVector::zeros(n);
            let mut weight = 0.0;
            for k in ks {
                let c = self.spectrum.eigenvector(k);
                let a = c.dot(&s);
                weight += a * a;
                coeffs += c * a;
            }
            if weight < PROJECTION_FLOOR {
                return Ok(None);
            }
            let mut label = t.label.clone();
            label.role = role;
            self.vector_from(&coeffs, label).map(Some)
        };
        Ok((
            part(self.positive().collect(), VectorRole::FreeElectronic)?,
            part(self.negative().collect(), VectorRole::FreePositronic)?,
        ))
    }

    /// Free pencil of the auxiliary basis.
    pub fn aux_pencil(&self) -> &Pencil {
        &self.pencil
    }
}

pub fn free_basis(
    params: &PhysicalParams,
    n_keep: usize,
    aux: &BasisSet,
    opts: &SolveOptions,
) -> Result<BasisSet> {
    if 2 * n_keep > aux.len() {
        return Err(Error::param("n_keep", format!("2·{n_keep} exceeds auxiliary size {}", aux.len())));
    }
    let mut out = FreeProjector::new(aux.clone(), opts)?.basis(n_keep)?;
    out.params = *params;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::basis::{kinetic_balance_basis, ExponentSet};

    fn aux() -> BasisSet {
        let p = PhysicalParams::with_z(30.0).unwrap();
        let e = ExponentSet::even_tempered(1e-3, 3.0, 10).unwrap();
        kinetic_balance_basis(&e, &p, &[]).unwrap()
    }

    #[test]
    fn free_states_stay_outside_gap() {
        let p = PhysicalParams::with_z(30.0).unwrap();
        let b = free_basis(&p, 4, &aux(), &SolveOptions::default()).unwrap();
        assert_eq!(b.len(), 8);
        let pencil = assemble(&b.vectors, &PotentialSpec::Zero).unwrap();
        for i in 0..8 {
            let rq = pencil.h[(i, i)] / pencil.s[(i, i)];
            assert!(rq.abs() >= 1.0 - 1e-9, "{rq}");
            assert_eq!(rq > 0.0, i < 4);
        }
        for i in 0..4 {
            for j in 4..8 {
                assert!(pencil.s[(i, j)].abs() < 1e-8);
            }
        }
    }

    #[test]
    fn projections_are_complementary() {
        let proj = FreeProjector::new(aux(), &SolveOptions::default()).unwrap();
        // a vector inside the auxiliary span: first auxiliary upper
        let t = proj.aux().vectors[4].clone();
        let (plus, minus) = proj.project(&t).unwrap();
        let (plus, minus) = (plus.unwrap(), minus.unwrap());
        let a = plus.overlap(&t).unwrap();
        let b = minus.overlap(&t).unwrap();
        assert!((a * a + b * b - 1.0).abs() < 1e-8, "{}", a * a + b * b);
        assert!(plus.overlap(&minus).unwrap().abs() < 1e-8);
    }

    #[test]
    fn too_many_states_requested() {
        let p = PhysicalParams::with_z(30.0).unwrap();
        assert!(free_basis(&p, 11, &aux(), &SolveOptions::default()).is_err());
        let proj = FreeProjector::new(aux(), &SolveOptions::default()).unwrap();
        assert!(proj.basis(15).is_err());
    }
}
