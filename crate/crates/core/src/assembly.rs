//! Hamiltonian and overlap matrices of the radial Dirac operator in a basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisVector, VectorLabel};
use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::radial::{apply_d_minus, apply_d_plus, inner, InnerWeight, RadialFunction};

/// Asymmetry (relative to max |H|) above which assembly is rejected.
pub const HERMITICITY_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilMeta {
    pub labels: Vec<VectorLabel>,
    pub potential: PotentialSpec,
    /// max |H_ij − H_ji| before symmetrisation.
    pub hermiticity_defect: f64,
}

/// The generalized eigenproblem H x = λ S x.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub h: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub meta: PencilMeta,
}

#[derive(Serialize)]
struct PencilJson<'a> {
    dim: usize,
    h: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    meta: &'a PencilMeta,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn h_max(&self) -> f64 {
        self.h.amax()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&PencilJson {
            dim: self.dim(),
            h: rows(&self.h),
            s: rows(&self.s),
            meta: &self.meta,
        })
        .map_err(|e| Error::Io(e.to_string()))
    }
}

/// ⟨f, D⁺g⟩, moving the derivative onto `f` when `g` is outside the
/// differentiable class. The boundary term vanishes since every upper
/// component is zero at the origin.
fn d_plus_matrix_element(f: &RadialFunction, g: &RadialFunction) -> Result<f64> {
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    match apply_d_plus(g) {
        Ok(dg) => inner(f, &dg, &InnerWeight::One),
        Err(Error::Unsupported(_)) => inner(&apply_d_minus(f)?, g, &InnerWeight::One),
        Err(e) => Err(e),
    }
}

/// ⟨g, D⁻f⟩ (see [`d_plus_matrix_element`]).
fn d_minus_matrix_element(g: &RadialFunction, f: &RadialFunction) -> Result<f64> {
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    match apply_d_minus(f) {
        Ok(df) => inner(g, &df, &InnerWeight::One),
        Err(Error::Unsupported(_)) => inner(&apply_d_plus(g)?, f, &InnerWeight::One),
        Err(e) => Err(e),
    }
}

fn entry_s(bi: &BasisVector, bj: &BasisVector) -> Result<f64> {
    bi.overlap(bj)
}

fn entry_h(bi: &BasisVector, bj: &BasisVector, potential: &PotentialSpec) -> Result<f64> {
    let w = InnerWeight::Potential(*potential);
    let uu = inner(&bi.upper, &bj.upper, &InnerWeight::One)?;
    let vv = inner(&bi.lower, &bj.lower, &InnerWeight::One)?;
    let uvu = inner(&bi.upper, &bj.upper, &w)?;
    let vvv = inner(&bi.lower, &bj.lower, &w)?;
    let kin = d_plus_matrix_element(&bi.upper, &bj.lower)? + d_minus_matrix_element(&bi.lower, &bj.upper)?;
    Ok(uu - vv + uvu + vvv + kin)
}

fn check_compatible(vectors: &[BasisVector], potential: &PotentialSpec) -> Result<()> {
    if potential.singular_at_origin() {
        if let Some((i, _)) = vectors.iter().enumerate().find(|(_, v)| !v.is_coulomb_compatible()) {
            return Err(Error::Assembly(format!(
                "basis vector {i} has an r^0 component; potential matrix element diverges"
            )));
        }
    }
    Ok(())
}

fn check_defect(defect: f64, h_max: f64) -> Result<()> {
    if defect > HERMITICITY_LIMIT * h_max.max(1.0) {
        return Err(Error::Assembly(format!(
            "Hamiltonian asymmetry {defect:e} exceeds {HERMITICITY_LIMIT:e}·max|H|"
        )));
    }
    Ok(())
}

/// Assemble H and S. Both triangles of H are computed so the asymmetry
/// can be recorded; the stored matrix is the symmetric part.
pub fn assemble(basis: &[BasisVector], potential: &PotentialSpec) -> Result<Pencil> {
    check_compatible(basis, potential)?;
    let n = basis.len();
    let mut h = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = entry_h(&basis[i], &basis[j], potential)?;
            if j >= i {
                let sij = entry_s(&basis[i], &basis[j])?;
                s[(i, j)] = sij;
                s[(j, i)] = sij;
            }
        }
    }
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            defect = defect.max((h[(i, j)] - h[(j, i)]).abs());
            let m = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = m;
            h[(j, i)] = m;
        }
    }
    check_defect(defect, h.amax())?;
    Ok(Pencil {
        h,
        s,
        meta: PencilMeta {
            labels: basis.iter().map(|b| b.label.clone()).collect(),
            potential: *potential,
            hermiticity_defect: defect,
        },
    })
}

/// Grow a pencil by one vector. `basis` must be the vectors the pencil was
/// assembled from; existing entries are copied unchanged.
pub fn append_vector(
    pencil: &Pencil,
    basis: &[BasisVector],
    potential: &PotentialSpec,
    extra: &BasisVector,
) -> Result<Pencil> {
    let n = pencil.dim();
    if basis.len() != n {
        return Err(Error::Assembly(format!(
            "pencil has dimension {n} but {} basis vectors were supplied",
            basis.len()
        )));
    }
    if potential != &pencil.meta.potential {
        return Err(Error::Assembly("potential differs from the one the pencil was built with".into()));
    }
    check_compatible(std::slice::from_ref(extra), potential)?;
    let mut h = pencil.h.clone().resize(n + 1, n + 1, 0.0);
    let mut s = pencil.s.clone().resize(n + 1, n + 1, 0.0);
    let mut defect = pencil.meta.hermiticity_defect;
    for (i, bi) in basis.iter().enumerate() {
        let col = entry_h(bi, extra, potential)?;
        let row = entry_h(extra, bi, potential)?;
        defect = defect.max((col - row).abs());
        let m = 0.5 * (col + row);
        h[(i, n)] = m;
        h[(n, i)] = m;
        let sij = entry_s(bi, extra)?;
        s[(i, n)] = sij;
        s[(n, i)] = sij;
    }
    h[(n, n)] = entry_h(extra, extra, potential)?;
    s[(n, n)] = entry_s(extra, extra)?;
    check_defect(defect, h.amax())?;
    let mut meta = pencil.meta.clone();
    meta.labels.push(extra.label.clone());
    meta.hermiticity_defect = defect;
    Ok(Pencil { h, s, meta })
}

/// Append several vectors in order.
pub fn append_vectors(
    pencil: &Pencil,
    basis: &[BasisVector],
    potential: &PotentialSpec,
    extra: &[BasisVector],
) -> Result<Pencil> {
    let mut all = basis.to_vec();
    let mut p = pencil.clone();
    for v in extra {
        p = append_vector(&p, &all, potential, v)?;
        all.push(v.clone());
    }
    Ok(p)
}
