//! Cochain complexes over Q: Koszul complexes over graded monomial algebras,
//! the facial complex A· and the Kouchnirenko and Poincaré checks.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GkzError, Result};
use crate::geometry::PolytopeAtInfinity;
use crate::lattice::LatticeVector;
use crate::nondegeneracy;
use crate::rational::Q;
use crate::semigroup::{log_derivative_classes, GradedAlgebra, GradedRingHandle, RingElement};
use crate::series::{Poly, RationalFunctionQ};
use crate::sparse::{complement_basis, Echelon, SparseRationalMatrix, SparseVec};

pub const DEFAULT_TRUNCATION_CAP: i64 = 256;

/// Largest internal degree any truncated complex may be built to, from
/// `GKZ_TRUNCATION_CAP` when set.
pub fn truncation_cap() -> i64 {
    std::env::var("GKZ_TRUNCATION_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_TRUNCATION_CAP)
}

fn check_cap(required: i64) -> Result<()> {
    let available = truncation_cap();
    if required > available {
        return Err(GkzError::TruncationTooSmall { required, available });
    }
    Ok(())
}

/// A bounded cochain complex of finite-dimensional Q-vector spaces.
#[derive(Clone, Debug, Serialize)]
pub struct CochainComplexQ {
    q_min: i64,
    bases: Vec<Vec<String>>,
    /// `differentials[k]` maps degree `q_min + k` to `q_min + k + 1`.
    differentials: Vec<SparseRationalMatrix>,
}

impl CochainComplexQ {
    pub fn new(
        q_min: i64,
        bases: Vec<Vec<String>>,
        differentials: Vec<SparseRationalMatrix>,
    ) -> Result<Self> {
        if differentials.len() + 1 != bases.len().max(1) {
            return Err(GkzError::ShapeMismatch(format!(
                "{} terms need {} differentials, got {}",
                bases.len(),
                bases.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.cols() != bases[k].len() || d.rows() != bases[k + 1].len() {
                return Err(GkzError::ShapeMismatch(format!(
                    "differential in degree {} is {}x{}, expected {}x{}",
                    q_min + k as i64,
                    d.rows(),
                    d.cols(),
                    bases[k + 1].len(),
                    bases[k].len()
                )));
            }
        }
        Ok(CochainComplexQ {
            q_min,
            bases,
            differentials,
        })
    }

    pub fn q_min(&self) -> i64 {
        self.q_min
    }

    pub fn q_max(&self) -> i64 {
        self.q_min + self.bases.len() as i64 - 1
    }

    fn slot(&self, q: i64) -> Option<usize> {
        let k = q - self.q_min;
        (k >= 0 && (k as usize) < self.bases.len()).then_some(k as usize)
    }

    pub fn dim(&self, q: i64) -> usize {
        self.slot(q).map_or(0, |k| self.bases[k].len())
    }

    pub fn basis(&self, q: i64) -> &[String] {
        self.slot(q).map_or(&[], |k| &self.bases[k])
    }

    pub fn differential(&self, q: i64) -> Option<&SparseRationalMatrix> {
        self.slot(q).and_then(|k| self.differentials.get(k))
    }

    /// Whether every composite d_{q+1}∘d_q vanishes exactly.
    pub fn is_complex(&self) -> bool {
        self.differentials
            .windows(2)
            .all(|w| w[1].mul(&w[0]).map(|m| m.is_zero()).unwrap_or(false))
    }

    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(|d| d.rank()).collect();
        (0..self.bases.len())
            .map(|k| {
                let out = ranks.get(k).copied().unwrap_or(0);
                let inc = if k > 0 { ranks[k - 1] } else { 0 };
                (self.q_min + k as i64, self.bases[k].len() - out - inc)
            })
            .collect()
    }

    /// Σ (−1)^q dim C^q.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.bases.len())
            .map(|k| sign(self.q_min + k as i64) * self.bases[k].len() as i64)
            .sum()
    }
}

fn sign(q: i64) -> i64 {
    if q.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A sequence of homogeneous elements in a graded algebra, with the
/// internal degree up to which its Koszul complex is built.
pub struct KoszulDatum<'a, A: GradedAlgebra + ?Sized> {
    pub ring: &'a A,
    pub sequence: Vec<RingElement>,
    pub degrees: Vec<i64>,
    pub truncation: i64,
}

impl<'a, A: GradedAlgebra + ?Sized> KoszulDatum<'a, A> {
    pub fn new(
        ring: &'a A,
        sequence: Vec<RingElement>,
        degrees: Vec<i64>,
        truncation: i64,
    ) -> Result<Self> {
        if sequence.len() != degrees.len() {
            return Err(GkzError::ShapeMismatch(format!(
                "{} elements but {} degrees",
                sequence.len(),
                degrees.len()
            )));
        }
        for (i, (g, &e)) in sequence.iter().zip(&degrees).enumerate() {
            if e < 0 || !g.is_homogeneous_of(ring, e) {
                return Err(GkzError::InvalidInput(format!(
                    "sequence element {} is not homogeneous of degree {e}",
                    i + 1
                )));
            }
        }
        Ok(KoszulDatum {
            ring,
            sequence,
            degrees,
            truncation,
        })
    }

    /// All elements of the same degree.
    pub fn uniform(ring: &'a A, sequence: Vec<RingElement>, degree: i64, truncation: i64) -> Result<Self> {
        let degrees = vec![degree; sequence.len()];
        Self::new(ring, sequence, degrees, truncation)
    }
}

/// The Koszul complex split by internal degree. A basis element s·e_I has
/// internal degree deg(s) + Σ_{i∉I} e_i, which the differential preserves,
/// so each piece is a finite complex and its cohomology is exact.
#[derive(Clone, Debug, Serialize)]
pub struct KoszulComplex {
    pub length: usize,
    pub pieces: BTreeMap<i64, CochainComplexQ>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulCohomology {
    pub length: usize,
    /// Internal degree → dim H^q for q = 0..=length.
    pub per_degree: BTreeMap<i64, Vec<usize>>,
    pub totals: Vec<usize>,
}

impl KoszulCohomology {
    pub fn top_dims(&self) -> BTreeMap<i64, usize> {
        self.per_degree
            .iter()
            .map(|(&d, v)| (d, v[self.length]))
            .collect()
    }

    /// First (q, internal degree, dim) with q below `below` and H^q ≠ 0.
    pub fn first_nonvanishing_below(&self, below: usize) -> Option<(usize, i64, usize)> {
        self.per_degree.iter().find_map(|(&d, v)| {
            v.iter()
                .take(below)
                .enumerate()
                .find(|(_, &x)| x > 0)
                .map(|(q, &x)| (q, d, x))
        })
    }

    pub fn lower_vanishing(&self) -> bool {
        self.first_nonvanishing_below(self.length).is_none()
    }
}

impl KoszulComplex {
    pub fn cohomology(&self) -> KoszulCohomology {
        let per_degree: BTreeMap<i64, Vec<usize>> = self
            .pieces
            .par_iter()
            .map(|(&d, c)| {
                let dims = c.cohomology_dims();
                (d, (0..=self.length as i64).map(|q| dims[&q]).collect())
            })
            .collect();
        let mut totals = vec![0; self.length + 1];
        for v in per_degree.values() {
            for (t, x) in totals.iter_mut().zip(v) {
                *t += x;
            }
        }
        KoszulCohomology {
            length: self.length,
            per_degree,
            totals,
        }
    }

    pub fn is_complex(&self) -> bool {
        self.pieces.values().all(CochainComplexQ::is_complex)
    }

    /// Per internal degree, Σ(−1)^q dim K^q = Σ(−1)^q dim H^q.
    pub fn euler_audit(&self, cohomology: &KoszulCohomology) -> bool {
        self.pieces.iter().all(|(d, c)| {
            let h: i64 = cohomology.per_degree[d]
                .iter()
                .enumerate()
                .map(|(q, &x)| sign(q as i64) * x as i64)
                .sum();
            h == c.euler_characteristic()
        })
    }
}

pub fn koszul_complex<A: GradedAlgebra + ?Sized>(datum: &KoszulDatum<'_, A>) -> Result<KoszulComplex> {
    check_cap(datum.truncation)?;
    let pieces = (0..=datum.truncation)
        .into_par_iter()
        .map(|d| (d, koszul_piece(datum, d)))
        .collect();
    Ok(KoszulComplex {
        length: datum.sequence.len(),
        pieces,
    })
}

fn wedge_label(w: &LatticeVector, set: &[usize]) -> String {
    if set.is_empty() {
        format!("t^{w}")
    } else {
        format!("t^{w} e{{{}}}", set.iter().map(|i| i + 1).join(","))
    }
}

fn koszul_piece<A: GradedAlgebra + ?Sized>(datum: &KoszulDatum<'_, A>, d: i64) -> CochainComplexQ {
    let k = datum.sequence.len();
    let total: i64 = datum.degrees.iter().sum();
    let mut terms: Vec<Vec<(Vec<usize>, LatticeVector)>> = Vec::with_capacity(k + 1);
    for q in 0..=k {
        let mut basis = Vec::new();
        for set in (0..k).combinations(q) {
            let inside: i64 = set.iter().map(|&i| datum.degrees[i]).sum();
            for w in datum.ring.piece(d - (total - inside)).iter() {
                basis.push((set.clone(), w.clone()));
            }
        }
        terms.push(basis);
    }
    let index: Vec<HashMap<(Vec<usize>, LatticeVector), usize>> = terms
        .iter()
        .map(|b| b.iter().cloned().enumerate().map(|(i, key)| (key, i)).collect())
        .collect();
    let mut differentials = Vec::with_capacity(k);
    for q in 0..k {
        let mut m = SparseRationalMatrix::zeros(terms[q + 1].len(), terms[q].len());
        for (col, (set, s)) in terms[q].iter().enumerate() {
            for i in (0..k).filter(|i| !set.contains(i)) {
                let before = set.iter().filter(|&&j| j < i).count();
                let sgn = if before % 2 == 0 { Q::one() } else { -Q::one() };
                let mut target = set.clone();
                target.push(i);
                target.sort_unstable();
                for (u, c) in datum.sequence[i].terms() {
                    if let Some(w) = datum.ring.multiply(s, u) {
                        let row = index[q + 1][&(target.clone(), w)];
                        m.add_to(row, col, &(&sgn * c));
                    }
                }
            }
        }
        differentials.push(m);
    }
    let bases = terms
        .iter()
        .map(|b| b.iter().map(|(set, w)| wedge_label(w, set)).collect())
        .collect();
    CochainComplexQ::new(0, bases, differentials).expect("shapes are consistent by construction")
}

/// dim (N / (g₁,…,g_k)N)_d for d = 0..=max_degree.
pub fn quotient_dims<A: GradedAlgebra + ?Sized>(
    ring: &A,
    generators: &[RingElement],
    degrees: &[i64],
    max_degree: i64,
) -> Vec<usize> {
    (0..=max_degree)
        .into_par_iter()
        .map(|d| {
            let (images, dim) = ideal_slice(ring, generators, degrees, d);
            let mut ech = Echelon::new();
            for v in images {
                ech.insert(v, None);
            }
            dim - ech.rank()
        })
        .collect()
}

/// Columns spanning the degree-d slice of the ideal, in coordinates of
/// `ring.piece(d)`, and the dimension of that slice.
fn ideal_slice<A: GradedAlgebra + ?Sized>(
    ring: &A,
    generators: &[RingElement],
    degrees: &[i64],
    d: i64,
) -> (Vec<SparseVec>, usize) {
    let piece = ring.piece(d);
    let index: HashMap<&LatticeVector, usize> = piece.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut images = Vec::new();
    for (g, &e) in generators.iter().zip(degrees) {
        for s in ring.piece(d - e).iter() {
            let mut v = SparseVec::new();
            for (u, c) in g.terms() {
                if let Some(w) = ring.multiply(s, u) {
                    crate::sparse::axpy(&mut v, c, &SparseVec::from([(index[&w], Q::one())]));
                }
            }
            if !v.is_empty() {
                images.push(v);
            }
        }
    }
    (images, piece.len())
}

/// Monomials of degree `d` completing the ideal slice to all of R_d, chosen
/// greedily from the largest exponent down.
pub fn quotient_basis<A: GradedAlgebra + ?Sized>(
    ring: &A,
    generators: &[RingElement],
    degrees: &[i64],
    d: i64,
) -> Vec<LatticeVector> {
    let piece = ring.piece(d);
    let (images, dim) = ideal_slice(ring, generators, degrees, d);
    let mut chosen = complement_basis(images, dim, (0..dim).rev());
    chosen.sort_unstable();
    chosen.into_iter().map(|i| piece[i].clone()).collect()
}

/// P_R(t)·(1 − t^M)^n for the full ring of `p`.
pub fn expected_top_polynomial(p: &PolytopeAtInfinity) -> Poly {
    let series = GradedRingHandle::full(p).poincare_series();
    let m = p.gauge_denominator() as usize;
    series
        .mul_poly(&Poly::one_minus_t_pow(m, p.n()))
        .as_polynomial()
        .expect("the full ring has a pole of order n at t = 1")
}

/// Internal degree to which Koszul complexes of the full ring are built:
/// the support bound of H^n plus one M-window.
pub fn kouchnirenko_truncation(p: &PolytopeAtInfinity) -> i64 {
    let deg = expected_top_polynomial(p).degree().unwrap_or(0) as i64;
    deg + p.gauge_denominator()
}

#[derive(Clone, Debug, Serialize)]
pub struct KouchnirenkoResult {
    pub vanishing: bool,
    pub top_dim: usize,
    pub normalized_volume: u64,
    pub equals_volume: bool,
    pub truncation: i64,
    pub expected_polynomial: Poly,
    pub cohomology: KoszulCohomology,
    pub monomial_basis: Vec<LatticeVector>,
}

impl KouchnirenkoResult {
    pub fn top_dims(&self) -> BTreeMap<i64, usize> {
        self.cohomology.top_dims()
    }
}

fn check_fiber(p: &PolytopeAtInfinity, fiber: &[Q]) -> Result<()> {
    if fiber.len() != p.columns().len() {
        return Err(GkzError::ShapeMismatch(format!(
            "fiber has {} entries, matrix has {} columns",
            fiber.len(),
            p.columns().len()
        )));
    }
    Ok(())
}

/// The Koszul complex of R = Gr K[δ ∩ Zⁿ] with respect to the classes of
/// t_i ∂f/∂t_i, after certifying that the fiber is nondegenerate.
pub fn verify_kouchnirenko(p: &PolytopeAtInfinity, fiber: &[Q]) -> Result<KouchnirenkoResult> {
    let report = nondegeneracy::is_nondegenerate(p, fiber)?;
    if !report.overall {
        return Err(GkzError::DegenerateFiber {
            faces: report.failing_faces(),
        });
    }
    kouchnirenko_unchecked(p, fiber, None)
}

/// As [`verify_kouchnirenko`] without the nondegeneracy precondition; on a
/// degenerate fiber the result shows lower cohomology or excess top dims.
pub fn kouchnirenko_unchecked(
    p: &PolytopeAtInfinity,
    fiber: &[Q],
    truncation: Option<i64>,
) -> Result<KouchnirenkoResult> {
    check_fiber(p, fiber)?;
    let expected_polynomial = expected_top_polynomial(p);
    let truncation = truncation.unwrap_or_else(|| kouchnirenko_truncation(p));
    let ring = GradedRingHandle::full(p);
    let m = p.gauge_denominator();
    let sequence = log_derivative_classes(fiber, None, p);
    let datum = KoszulDatum::uniform(&ring, sequence, m, truncation)?;
    let complex = koszul_complex(&datum)?;
    let cohomology = complex.cohomology();
    let top_dim = cohomology.totals[p.n()];
    let monomial_basis = (0..=truncation)
        .flat_map(|d| quotient_basis(&ring, &datum.sequence, &datum.degrees, d))
        .collect();
    Ok(KouchnirenkoResult {
        vanishing: cohomology.lower_vanishing(),
        top_dim,
        normalized_volume: p.normalized_volume(),
        equals_volume: top_dim as u64 == p.normalized_volume(),
        truncation,
        expected_polynomial,
        cohomology,
        monomial_basis,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareCheck {
    pub series: RationalFunctionQ,
    pub polynomial: Poly,
    pub observed: Vec<usize>,
    pub nonnegative: bool,
    pub coefficient_sum: i64,
    pub normalized_volume: u64,
    pub holds: bool,
}

/// Compares the per-degree H^n dims with P_R(t)(1 − t^M)^n.
pub fn poincare_identity_check(p: &PolytopeAtInfinity, fiber: &[Q]) -> Result<PoincareCheck> {
    let k = verify_kouchnirenko(p, fiber)?;
    poincare_identity_from(p, &k)
}

pub fn poincare_identity_from(p: &PolytopeAtInfinity, k: &KouchnirenkoResult) -> Result<PoincareCheck> {
    let series = GradedRingHandle::full(p).poincare_series();
    let polynomial = k.expected_polynomial.clone();
    let tops = k.top_dims();
    let observed: Vec<usize> = (0..=k.truncation).map(|d| tops.get(&d).copied().unwrap_or(0)).collect();
    for (d, &actual) in observed.iter().enumerate() {
        let expected = polynomial.coeff(d).to_i64().expect("small coefficient");
        if expected != actual as i64 {
            return Err(GkzError::MismatchAtDegree {
                degree: d as i64,
                expected,
                actual: actual as i64,
            });
        }
    }
    let nonnegative = polynomial.coeffs().iter().all(|c| !c.is_negative());
    let coefficient_sum = polynomial.eval_at_one().to_i64().expect("small sum");
    Ok(PoincareCheck {
        series,
        nonnegative,
        coefficient_sum,
        normalized_volume: p.normalized_volume(),
        holds: nonnegative && coefficient_sum as u64 == p.normalized_volume(),
        polynomial,
        observed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularSequenceVerdict {
    pub regular_prefix: usize,
    pub lower_vanishing: bool,
    pub embeds: bool,
    /// Internal degree → dim H^d.
    pub h_dims: BTreeMap<i64, usize>,
    /// Degree → dim (N/(f₁,…,f_d)N).
    pub quotient_dims: Vec<usize>,
}

/// Checks the Koszul vanishing pattern of a sequence whose first `d`
/// elements are claimed regular: H^q = 0 for q < d, and H^d in internal
/// degree D is at most (N/(f₁..f_d))_{D − Σ_{i>d} e_i}.
pub fn koszul_regular_sequence_check<A: GradedAlgebra + ?Sized>(
    datum: &KoszulDatum<'_, A>,
    d: usize,
) -> Result<RegularSequenceVerdict> {
    if d > datum.sequence.len() {
        return Err(GkzError::InvalidInput(format!(
            "regular prefix {d} longer than the sequence"
        )));
    }
    let cohomology = koszul_complex(datum)?.cohomology();
    let shift: i64 = datum.degrees[d..].iter().sum();
    let quotient = quotient_dims(datum.ring, &datum.sequence[..d], &datum.degrees[..d], datum.truncation);
    let h_dims: BTreeMap<i64, usize> = cohomology
        .per_degree
        .iter()
        .map(|(&deg, v)| (deg, v[d]))
        .collect();
    let embeds = h_dims.iter().all(|(&deg, &h)| {
        let at = deg - shift;
        h <= if at >= 0 { quotient[at as usize] } else { 0 }
    });
    Ok(RegularSequenceVerdict {
        regular_prefix: d,
        lower_vanishing: cohomology.first_nonvanishing_below(d).is_none(),
        embeds,
        h_dims,
        quotient_dims: quotient,
    })
}

/// The facial complex A^q = ⊕_{Γ ∈ I_{n−1−q}} R_Γ with differentials given
/// by signed projections, augmented by K when the origin is interior.
#[derive(Clone, Debug)]
pub struct FaceComplex<'p> {
    polytope: &'p PolytopeAtInfinity,
    summands: Vec<Vec<usize>>,
    augmented: bool,
}

#[derive(Serialize)]
struct FaceTerm {
    degree: usize,
    faces: Vec<usize>,
}

impl Serialize for FaceComplex<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            augmented: bool,
            terms: Vec<FaceTerm>,
        }
        Out {
            augmented: self.augmented,
            terms: self
                .summands
                .iter()
                .enumerate()
                .map(|(q, f)| FaceTerm {
                    degree: q,
                    faces: f.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'p> FaceComplex<'p> {
    pub fn augmented(&self) -> bool {
        self.augmented
    }

    /// Face ids of the summands of A^q.
    pub fn summands(&self, q: usize) -> &[usize] {
        self.summands.get(q).map_or(&[], Vec::as_slice)
    }

    /// The finite-dimensional weight-w part A·(w).
    pub fn at_weight(&self, w: &[i64]) -> CochainComplexQ {
        let p = self.polytope;
        let n = p.n();
        let mut terms: Vec<Vec<usize>> = self
            .summands
            .iter()
            .map(|faces| faces.iter().copied().filter(|&f| p.in_face_cone(f, w)).collect())
            .collect();
        let augment = self.augmented && w.iter().all(|&x| x == 0);
        if self.augmented {
            // usize::MAX marks the augmentation summand K.
            terms.push(if augment { vec![usize::MAX] } else { Vec::new() });
        }
        let mut differentials = Vec::new();
        for q in 0..terms.len().saturating_sub(1) {
            let rows: HashMap<usize, usize> = terms[q + 1].iter().enumerate().map(|(i, &f)| (f, i)).collect();
            let mut m = SparseRationalMatrix::zeros(terms[q + 1].len(), terms[q].len());
            for (col, &f) in terms[q].iter().enumerate() {
                if q + 1 == n {
                    if let Some(&row) = rows.get(&usize::MAX) {
                        m.set(row, col, Q::one());
                    }
                    continue;
                }
                for &(sub, sgn) in &p.face(f).boundary {
                    if let Some(&row) = rows.get(&sub) {
                        m.set(row, col, Q::from_integer(sgn.into()));
                    }
                }
            }
            differentials.push(m);
        }
        let bases = terms
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&f| if f == usize::MAX { "K".to_string() } else { format!("R_{f}") })
                    .collect()
            })
            .collect();
        CochainComplexQ::new(0, bases, differentials).expect("consistent shapes")
    }
}

pub fn build_face_complex(p: &PolytopeAtInfinity) -> FaceComplex<'_> {
    let n = p.n();
    let summands = (0..n).map(|q| p.resolution_faces(n - 1 - q)).collect();
    FaceComplex {
        polytope: p,
        summands,
        augmented: p.origin_is_interior(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceComplexFailure {
    pub weight: LatticeVector,
    pub degree: i64,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceComplexReport {
    pub weight_bound: i64,
    pub weights_checked: usize,
    pub passed: bool,
    pub first_failure: Option<FaceComplexFailure>,
}

/// Checks H^q(A·(w)) = 0 for q ≠ 0 and dim H^0(A·(w)) = 1 for every
/// w ∈ δ ∩ Zⁿ of degree at most `weight_bound`.
pub fn check_face_complex_exactness(p: &PolytopeAtInfinity, weight_bound: i64) -> FaceComplexReport {
    let complex = build_face_complex(p);
    let ring = GradedRingHandle::full(p);
    let weights: Vec<LatticeVector> = (0..=weight_bound)
        .flat_map(|d| ring.graded_piece(d).as_ref().clone())
        .collect();
    let failures: Vec<Option<FaceComplexFailure>> = weights
        .par_iter()
        .map(|w| {
            let c = complex.at_weight(w);
            if !c.is_complex() {
                return Some(FaceComplexFailure {
                    weight: w.clone(),
                    degree: -1,
                    dimension: 0,
                });
            }
            c.cohomology_dims()
                .into_iter()
                .find(|&(q, dim)| dim != usize::from(q == 0))
                .map(|(q, dim)| FaceComplexFailure {
                    weight: w.clone(),
                    degree: q,
                    dimension: dim,
                })
        })
        .collect();
    let first_failure = failures.into_iter().flatten().next();
    FaceComplexReport {
        weight_bound,
        weights_checked: weights.len(),
        passed: first_failure.is_none(),
        first_failure,
    }
}
