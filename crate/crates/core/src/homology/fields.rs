//! Homology over a field with explicit representatives, so that chain maps
//! can be pushed down to homology.

use crate::chains::{Cell, ChainComplexPresentation, Ring};
use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};

#[derive(Clone, Debug)]
pub struct FieldHomologyDegree<F: Field> {
    pub ambient: Vec<Cell>,
    /// Chain module basis, one column per generator, in ambient coordinates.
    pub chains: Mat<F>,
    /// Independent boundaries spanning `B_k`.
    pub boundaries: Mat<F>,
    /// Cycles whose classes form a basis of `H_k`.
    pub reps: Mat<F>,
    /// `D_k` on the chain basis, in the previous degree's ambient coordinates.
    pub images: Mat<F>,
    /// Ambient differential, for chains outside the presented basis.
    pub differential: Mat<F>,
}

#[derive(Clone, Debug)]
pub struct FieldHomology<F: Field> {
    pub field: F,
    pub degrees: Vec<FieldHomologyDegree<F>>,
}

impl<F: Field> FieldHomology<F> {
    pub fn dim(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.reps.cols())
    }

    pub fn ambient_dim(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.ambient.len())
    }

    /// Coordinates of the classes of the given cycles (columns, in ambient
    /// coordinates) in the chosen homology basis.
    pub fn classify(&self, k: usize, cycles: &Mat<F>) -> Result<Mat<F>> {
        let Some(d) = self.degrees.get(k) else {
            return Ok(Mat::zeros(&self.field, 0, cycles.cols()));
        };
        if cycles.rows() != d.ambient.len() {
            return Err(Error::ShapeMismatch(format!(
                "cycle of length {} in degree {k} with {} cells",
                cycles.rows(),
                d.ambient.len()
            )));
        }
        let system = d.boundaries.hstack(&d.reps);
        let x = system
            .solve(cycles)
            .ok_or_else(|| Error::Internal(format!("not a cycle in degree {k}")))?;
        let skip = d.boundaries.cols();
        Ok(x.select_rows(&(skip..skip + d.reps.cols()).collect::<Vec<_>>()))
    }
}

/// Checks that the presentation's ring can be read in the field.
fn compatible<F: Field>(field: &F, ring: Ring) -> Result<()> {
    let ok = match ring {
        Ring::Z | Ring::Q => true,
        Ring::Fp(p) => field.characteristic() == p,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::RingMismatch(format!(
            "presentation over {ring} read in characteristic {}",
            field.characteristic()
        )))
    }
}

pub fn field_homology<F: Field>(p: &ChainComplexPresentation, field: &F) -> Result<FieldHomology<F>> {
    compatible(field, p.ring)?;
    let n = p.degrees.len();
    let mut chains = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n);
    for d in &p.degrees {
        chains.push(Mat::from_sparse(field, d.ambient.len(), &d.basis));
        images.push(Mat::from_sparse(field, d.images.rows, &d.images.cols));
    }
    let mut degrees = Vec::with_capacity(n);
    for k in 0..n {
        let amb = p.degrees[k].ambient.len();
        let cycles = chains[k].mul(&images[k].kernel())?;
        let boundaries = match images.get(k + 1) {
            Some(next) => {
                let (_, piv) = next.rref();
                next.select_cols(&piv)
            }
            None => Mat::zeros(field, amb, 0),
        };
        let joint = boundaries.hstack(&cycles);
        let (_, piv) = joint.rref();
        let skip = boundaries.cols();
        let pick: Vec<usize> = piv.into_iter().filter(|&c| c >= skip).map(|c| c - skip).collect();
        let reps = cycles.select_cols(&pick);
        degrees.push(FieldHomologyDegree {
            ambient: p.degrees[k].ambient.clone(),
            chains: chains[k].clone(),
            boundaries,
            reps,
            images: images[k].clone(),
            differential: Mat::from_sparse(
                field,
                p.degrees[k].differential.rows,
                &p.degrees[k].differential.cols,
            ),
        });
    }
    Ok(FieldHomology {
        field: field.clone(),
        degrees,
    })
}
