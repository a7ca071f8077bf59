//! Face-by-face nondegeneracy of a fiber f = Σ a_j t^{w_j}.
//!
//! For a face Γ avoiding the origin, R_Γ is Cohen–Macaulay of dimension
//! k = dim Γ + 1, and f_Γ is nondegenerate exactly when k of the classes
//! t_i ∂f_Γ/∂t_i form a system of parameters. That happens iff the quotient
//! has Hilbert series P_{R_Γ}(t)(1 − t^M)^k. The quotient is checked against
//! that polynomial up to its degree D and for vanishing on (D, D + L], where
//! L bounds the degrees of semigroup generators; vanishing on such a window
//! forces vanishing in every higher degree.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GkzError, Result};
use crate::geometry::PolytopeAtInfinity;
use crate::homology::{quotient_dims, truncation_cap};
use crate::lattice::LatticeVector;
use crate::linalg;
use crate::rational::Q;
use crate::semigroup::{log_derivative_classes, GradedRingHandle, RingElement};
use crate::series::Poly;

/// Σ a_j t^{w_j} over the columns on `face`.
pub fn face_polynomial(fiber: &[Q], face: usize, p: &PolytopeAtInfinity) -> Result<RingElement> {
    if p.face(face).contains_origin {
        return Err(GkzError::FaceContainsOrigin(face));
    }
    Ok(RingElement::from_terms(
        p.columns()
            .iter()
            .zip(fiber)
            .filter(|(w, _)| p.face_contains_point(face, w))
            .map(|(w, a)| (w.clone(), a.clone())),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanningChoice {
    /// 0-based row indices whose log-derivatives span all of them.
    Indices(Vec<usize>),
    Deficient { rank: usize, target: usize },
}

/// Picks dim Γ + 1 of the classes g_i = t_i ∂f_Γ/∂t_i spanning the same
/// space as all n, or reports the rank shortfall.
pub fn choose_spanning_subset(fiber: &[Q], face: usize, p: &PolytopeAtInfinity) -> SpanningChoice {
    let target = p.face(face).dimension + 1;
    let g = log_derivative_classes(fiber, Some(face), p);
    let monomials: Vec<&LatticeVector> = {
        let mut all: Vec<&LatticeVector> = g.iter().flat_map(|x| x.terms().keys()).collect();
        all.sort();
        all.dedup();
        all
    };
    let rows: Vec<Vec<Q>> = g
        .iter()
        .map(|x| monomials.iter().map(|w| x.coeff(w)).collect())
        .collect();
    let chosen = linalg::independent_rows(&rows);
    if chosen.len() < target {
        return SpanningChoice::Deficient {
            rank: chosen.len(),
            target,
        };
    }
    SpanningChoice::Indices(chosen)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Infinite,
    Deficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceCertificate {
    pub face_id: usize,
    pub dimension: usize,
    pub vertices: Vec<LatticeVector>,
    pub spanning_indices: Vec<usize>,
    pub quotient_dims: Vec<usize>,
    /// Coefficients of P_{R_Γ}(t)(1 − t^M)^{dim Γ + 1}.
    pub expected: Poly,
    pub verdict: Verdict,
    pub bound_used: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyReport {
    pub overall: bool,
    pub per_face: Vec<FaceCertificate>,
}

impl NondegeneracyReport {
    pub fn failing_faces(&self) -> Vec<usize> {
        self.per_face
            .iter()
            .filter(|c| c.verdict != Verdict::Finite)
            .map(|c| c.face_id)
            .collect()
    }
}

pub fn certify_face(fiber: &[Q], face: usize, p: &PolytopeAtInfinity) -> Result<FaceCertificate> {
    let ring = GradedRingHandle::facial(p, face)?;
    let f = p.face(face);
    let k = f.dimension + 1;
    let m = p.gauge_denominator();
    let expected = ring
        .poincare_series()
        .mul_poly(&Poly::one_minus_t_pow(m as usize, k))
        .as_polynomial()
        .expect("facial ring has a pole of order dim Γ + 1");
    let top = expected.degree().unwrap_or(0) as i64;
    let bound = top + ring.generator_degree_bound();
    let mut cert = FaceCertificate {
        face_id: face,
        dimension: f.dimension,
        vertices: f.vertices.clone(),
        spanning_indices: Vec::new(),
        quotient_dims: Vec::new(),
        expected,
        verdict: Verdict::Deficient,
        bound_used: bound,
    };
    let indices = match choose_spanning_subset(fiber, face, p) {
        SpanningChoice::Indices(ix) => ix,
        SpanningChoice::Deficient { .. } => return Ok(cert),
    };
    if bound > truncation_cap() {
        return Err(GkzError::TruncationTooSmall {
            required: bound,
            available: truncation_cap(),
        });
    }
    let g = log_derivative_classes(fiber, Some(face), p);
    let gens: Vec<RingElement> = indices.iter().map(|&i| g[i].clone()).collect();
    let dims = quotient_dims(&ring, &gens, &vec![m; gens.len()], bound);
    let finite = dims
        .iter()
        .enumerate()
        .all(|(d, &x)| cert.expected.coeff(d).to_i64() == Some(x as i64));
    cert.spanning_indices = indices;
    cert.quotient_dims = dims;
    cert.verdict = if finite { Verdict::Finite } else { Verdict::Infinite };
    Ok(cert)
}

/// Certifies every proper face of Δ∞ avoiding the origin.
pub fn is_nondegenerate(p: &PolytopeAtInfinity, fiber: &[Q]) -> Result<NondegeneracyReport> {
    if fiber.len() != p.columns().len() {
        return Err(GkzError::ShapeMismatch(format!(
            "fiber has {} entries, matrix has {} columns",
            fiber.len(),
            p.columns().len()
        )));
    }
    let per_face = p
        .faces_avoiding_origin()
        .into_par_iter()
        .map(|f| certify_face(fiber, f, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(NondegeneracyReport {
        overall: per_face.iter().all(|c| c.verdict == Verdict::Finite),
        per_face,
    })
}
