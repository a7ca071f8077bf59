//! The semigroup ring K[δ ∩ Zⁿ] graded by M·ρ, its associated graded
//! multiplication, the facial rings R_Γ and their Poincaré series.
//!
//! In the associated graded ring a product of monomials t^{w₁}·t^{w₂}
//! survives only when w₁ and w₂ lie in the cone over a common face of Δ∞
//! avoiding the origin; otherwise ρ(w₁ + w₂) < ρ(w₁) + ρ(w₂) and the product
//! drops to a lower filtration level.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, RwLock};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{GkzError, Result};
use crate::geometry::{PolytopeAtInfinity, VertexOrder};
use crate::lattice::{box_points, LatticeVector};
use crate::linalg;
use crate::rational::{self, Q};
use crate::series::{Poly, RationalFunctionQ};

/// A commutative K-algebra with a monomial basis graded in nonnegative
/// degrees, where the product of two monomials is a monomial or zero.
pub trait GradedAlgebra: Sync {
    /// Monomials of degree exactly `d`, sorted.
    fn piece(&self, d: i64) -> Arc<Vec<LatticeVector>>;
    fn degree_of(&self, w: &LatticeVector) -> i64;
    fn multiply(&self, a: &LatticeVector, b: &LatticeVector) -> Option<LatticeVector>;
}

/// A finite K-linear combination of monomials t^w.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RingElement {
    terms: BTreeMap<LatticeVector, Q>,
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement::default()
    }

    pub fn monomial(w: LatticeVector, c: Q) -> Self {
        let mut x = RingElement::zero();
        x.add_term(w, c);
        x
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (LatticeVector, Q)>) -> Self {
        let mut x = RingElement::zero();
        for (w, c) in terms {
            x.add_term(w, c);
        }
        x
    }

    pub fn add_term(&mut self, w: LatticeVector, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<LatticeVector, Q> {
        &self.terms
    }

    pub fn coeff(&self, w: &LatticeVector) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x * c)))
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.scale(&-Q::one()))
    }

    /// Product in the given algebra.
    pub fn mul_in<A: GradedAlgebra + ?Sized>(&self, alg: &A, other: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if let Some(w) = alg.multiply(w1, w2) {
                    out.add_term(w, c1 * c2);
                }
            }
        }
        out
    }

    /// The set of degrees of the terms.
    pub fn degrees<A: GradedAlgebra + ?Sized>(&self, alg: &A) -> BTreeSet<i64> {
        self.terms.keys().map(|w| alg.degree_of(w)).collect()
    }

    pub fn is_homogeneous_of<A: GradedAlgebra + ?Sized>(&self, alg: &A, d: i64) -> bool {
        self.terms.keys().all(|w| alg.degree_of(w) == d)
    }
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (w, c) in &self.terms {
            map.serialize_entry(&w.key(), &rational::format(c))?;
        }
        map.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RingKind {
    /// R = K[δ ∩ Zⁿ] with associated graded multiplication.
    Full,
    /// R_Γ = K[R≥0Γ ∩ Zⁿ] for a face Γ avoiding the origin.
    Facial(usize),
}

/// A graded semigroup ring over a polytope, with lazily cached degree slices.
pub struct GradedRingHandle<'p> {
    polytope: &'p PolytopeAtInfinity,
    kind: RingKind,
    cache: RwLock<BTreeMap<i64, Arc<Vec<LatticeVector>>>>,
}

impl<'p> GradedRingHandle<'p> {
    pub fn full(polytope: &'p PolytopeAtInfinity) -> Self {
        GradedRingHandle {
            polytope,
            kind: RingKind::Full,
            cache: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn facial(polytope: &'p PolytopeAtInfinity, face: usize) -> Result<Self> {
        if polytope.face(face).contains_origin {
            return Err(GkzError::FaceContainsOrigin(face));
        }
        Ok(GradedRingHandle {
            polytope,
            kind: RingKind::Facial(face),
            cache: RwLock::new(BTreeMap::new()),
        })
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn polytope(&self) -> &'p PolytopeAtInfinity {
        self.polytope
    }

    pub fn contains(&self, w: &[i64]) -> bool {
        match self.kind {
            RingKind::Full => self.polytope.in_cone(w),
            RingKind::Facial(f) => self.polytope.in_face_cone(f, w),
        }
    }

    /// Monomials of degree exactly `d`.
    pub fn graded_piece(&self, d: i64) -> Arc<Vec<LatticeVector>> {
        if let Some(v) = self.cache.read().unwrap().get(&d) {
            return v.clone();
        }
        let computed = Arc::new(self.enumerate(d));
        let mut cache = self.cache.write().unwrap();
        cache.entry(d).or_insert(computed).clone()
    }

    fn enumerate(&self, d: i64) -> Vec<LatticeVector> {
        if d < 0 {
            return Vec::new();
        }
        let m = self.polytope.gauge_denominator();
        let (lo, hi) = self.polytope.bounding_box();
        let lo: Vec<i64> = lo.iter().map(|&x| Integer::div_floor(&(x * d), &m)).collect();
        let hi: Vec<i64> = hi.iter().map(|&x| Integer::div_ceil(&(x * d), &m)).collect();
        box_points(&lo, &hi)
            .filter(|w| self.contains(w) && self.polytope.degree(w).ok() == Some(d))
            .collect()
    }

    /// Dimension of the cone (Krull dimension of the ring).
    pub fn cone_dimension(&self) -> usize {
        match self.kind {
            RingKind::Full => self.polytope.n(),
            RingKind::Facial(f) => self.polytope.cone_dimension(f),
        }
    }

    /// Simplices (vertex lists) whose cones triangulate the ring's cone.
    fn simplices(&self, order: VertexOrder) -> Vec<Vec<LatticeVector>> {
        let p = self.polytope;
        match self.kind {
            RingKind::Full => p
                .faces()
                .iter()
                .filter(|f| f.dimension + 1 == p.n() && !f.contains_origin)
                .flat_map(|f| p.triangulate(f.id, order))
                .collect(),
            RingKind::Facial(f) => p.triangulate(f, order),
        }
    }

    /// Exact Poincaré series via the pulling triangulation in lexicographic order.
    pub fn poincare_series(&self) -> RationalFunctionQ {
        self.poincare_series_with(VertexOrder::Lex)
    }

    pub fn poincare_series_with(&self, order: VertexOrder) -> RationalFunctionQ {
        let decomposition = self.half_open_decomposition(order);
        let k = self.cone_dimension();
        let m = self.polytope.gauge_denominator() as usize;
        let mut num = Poly::zero();
        for cone in &decomposition {
            for &d in &cone.half_open_degrees {
                num = &num + &Poly::monomial(1, d as usize);
            }
        }
        RationalFunctionQ::new(num, Poly::one_minus_t_pow(m, k))
    }

    /// An upper bound on the degrees of semigroup generators of the ring's cone:
    /// every lattice point is a fundamental-parallelepiped point plus a
    /// nonnegative combination of simplex vertices (each of degree M).
    pub fn generator_degree_bound(&self) -> i64 {
        let m = self.polytope.gauge_denominator();
        self.half_open_decomposition(VertexOrder::Lex)
            .iter()
            .flat_map(|c| c.closed_degrees.iter().copied())
            .fold(m, i64::max)
    }

    fn half_open_decomposition(&self, order: VertexOrder) -> Vec<SimplicialCone> {
        let simplices = self.simplices(order);
        let verts: BTreeSet<LatticeVector> = simplices.iter().flatten().cloned().collect();
        let n = self.polytope.n();
        let reference: Vec<i64> = (0..n).map(|i| verts.iter().map(|v| v[i]).sum()).collect();
        let mut perturb: Vec<Vec<i64>> = vec![reference];
        perturb.extend(verts.iter().map(|v| v.0.clone()));
        simplices
            .iter()
            .map(|s| SimplicialCone::new(s, &perturb, self.polytope.gauge_denominator()))
            .collect()
    }
}

/// Lattice-point data of one simplicial cone of the triangulation.
struct SimplicialCone {
    /// Degrees of lattice points of the half-open fundamental parallelepiped.
    half_open_degrees: Vec<i64>,
    /// Degrees of lattice points of the closed-below parallelepiped [0,1)^k.
    closed_degrees: Vec<i64>,
}

impl SimplicialCone {
    fn new(simplex: &[LatticeVector], perturb: &[Vec<i64>], m: i64) -> Self {
        let k = simplex.len();
        let n = simplex[0].dim();
        let cols: Vec<Vec<i64>> = simplex.iter().map(|v| v.0.clone()).collect();
        let rows = linalg::nonsingular_rows(&cols).expect("simplex vertices are independent");
        let square: Vec<Vec<Q>> = rows
            .iter()
            .map(|&r| cols.iter().map(|c| rational::int(c[r])).collect())
            .collect();
        let inv = linalg::inverse(&square).expect("nonsingular minor");
        let coords = |x: &[i64]| -> Vec<Q> {
            (0..k)
                .map(|i| {
                    rows.iter()
                        .enumerate()
                        .map(|(j, &r)| &inv[i][j] * rational::int(x[r]))
                        .fold(Q::zero(), |a, b| a + b)
                })
                .collect()
        };
        // Facet i of the cone is {μ_i = 0}; it is kept iff the perturbed
        // reference point lies strictly on the cone's side of it.
        let closed: Vec<bool> = (0..k)
            .map(|i| {
                perturb
                    .iter()
                    .map(|y| coords(y)[i].clone())
                    .find(|c| !c.is_zero())
                    .expect("perturbation vectors span the cone")
                    .is_positive()
            })
            .collect();

        let lo: Vec<i64> = (0..n).map(|r| cols.iter().map(|c| c[r].min(0)).sum()).collect();
        let hi: Vec<i64> = (0..n).map(|r| cols.iter().map(|c| c[r].max(0)).sum()).collect();
        let mut half_open_degrees = Vec::new();
        let mut closed_degrees = Vec::new();
        let one = Q::one();
        for x in box_points(&lo, &hi) {
            let mu = coords(&x);
            let in_span = (0..n).all(|r| {
                let v = cols
                    .iter()
                    .zip(&mu)
                    .map(|(c, m)| rational::int(c[r]) * m)
                    .fold(Q::zero(), |a, b| a + b);
                v == rational::int(x[r])
            });
            if !in_span {
                continue;
            }
            let total = mu.iter().fold(Q::zero(), |a, b| a + b) * rational::int(m);
            let degree = rational::to_i64(&total);
            if mu.iter().all(|c| !c.is_negative() && c < &one) {
                closed_degrees.push(degree);
            }
            let half_open = mu.iter().zip(&closed).all(|(c, &keep)| {
                if keep {
                    !c.is_negative() && c < &one
                } else {
                    c.is_positive() && c <= &one
                }
            });
            if half_open {
                half_open_degrees.push(degree);
            }
        }
        SimplicialCone {
            half_open_degrees,
            closed_degrees,
        }
    }
}

impl GradedAlgebra for GradedRingHandle<'_> {
    fn piece(&self, d: i64) -> Arc<Vec<LatticeVector>> {
        self.graded_piece(d)
    }

    fn degree_of(&self, w: &LatticeVector) -> i64 {
        self.polytope.degree(w).expect("monomial lies in δ")
    }

    fn multiply(&self, a: &LatticeVector, b: &LatticeVector) -> Option<LatticeVector> {
        match self.kind {
            RingKind::Full => gr_multiply(a, b, self.polytope).expect("monomials lie in δ"),
            RingKind::Facial(_) => Some(a + b),
        }
    }
}

/// The polynomial ring K[u₁, …, u_k] graded by total degree.
#[derive(Debug)]
pub struct PolynomialRing {
    vars: usize,
    cache: RwLock<BTreeMap<i64, Arc<Vec<LatticeVector>>>>,
}

impl PolynomialRing {
    pub fn new(vars: usize) -> Self {
        PolynomialRing {
            vars,
            cache: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn variable(&self, i: usize) -> RingElement {
        RingElement::monomial(LatticeVector::unit(self.vars, i), Q::one())
    }
}

impl GradedAlgebra for PolynomialRing {
    fn piece(&self, d: i64) -> Arc<Vec<LatticeVector>> {
        if let Some(v) = self.cache.read().unwrap().get(&d) {
            return v.clone();
        }
        let hi = vec![d.max(0); self.vars];
        let pts: Vec<LatticeVector> = if d < 0 {
            Vec::new()
        } else {
            box_points(&vec![0; self.vars], &hi)
                .filter(|w| w.iter().sum::<i64>() == d)
                .collect()
        };
        self.cache
            .write()
            .unwrap()
            .entry(d)
            .or_insert(Arc::new(pts))
            .clone()
    }

    fn degree_of(&self, w: &LatticeVector) -> i64 {
        w.iter().sum()
    }

    fn multiply(&self, a: &LatticeVector, b: &LatticeVector) -> Option<LatticeVector> {
        Some(a + b)
    }
}

/// Product in Gr(R): `w₁ + w₂` when both lie in the cone over a common face
/// avoiding the origin, `None` (zero) otherwise.
pub fn gr_multiply(
    w1: &LatticeVector,
    w2: &LatticeVector,
    p: &PolytopeAtInfinity,
) -> Result<Option<LatticeVector>> {
    for w in [w1, w2] {
        if !p.in_cone(w) {
            return Err(GkzError::NotInCone(w.clone()));
        }
    }
    // Every face avoiding the origin lies in a facet avoiding it, so the
    // facets are enough.
    let shared = p
        .faces()
        .iter()
        .filter(|f| f.dimension + 1 == p.n() && !f.contains_origin)
        .any(|f| p.in_face_cone(f.id, w1) && p.in_face_cone(f.id, w2));
    Ok(shared.then(|| w1 + w2))
}

pub fn facial_ring(face: usize, p: &PolytopeAtInfinity) -> Result<GradedRingHandle<'_>> {
    GradedRingHandle::facial(p, face)
}

/// The projection R_Γ → R_Γ' keeping the monomials in the cone over `sub`.
pub fn face_projection(
    x: &RingElement,
    face: usize,
    sub: usize,
    p: &PolytopeAtInfinity,
) -> Result<RingElement> {
    if !p.is_subface(face, sub) {
        return Err(GkzError::NotAFacePair { face, sub });
    }
    Ok(RingElement::from_terms(
        x.terms()
            .iter()
            .filter(|(w, _)| p.in_face_cone(sub, w))
            .map(|(w, c)| (w.clone(), c.clone())),
    ))
}

pub fn poincare_series(ring: &GradedRingHandle<'_>) -> RationalFunctionQ {
    ring.poincare_series()
}

pub fn graded_piece(ring: &GradedRingHandle<'_>, d: i64) -> Arc<Vec<LatticeVector>> {
    ring.graded_piece(d)
}

/// The classes of t_i ∂f/∂t_i in degree M: `g_i = Σ a_j w_ij t^{w_j}` over the
/// columns on the given face, or over the columns of gauge one (those on a
/// face avoiding the origin) when `face` is `None`.
pub fn log_derivative_classes(
    fiber: &[Q],
    face: Option<usize>,
    p: &PolytopeAtInfinity,
) -> Vec<RingElement> {
    let m = p.gauge_denominator();
    let cols: Vec<(usize, &LatticeVector)> = p
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, w)| match face {
            Some(f) => p.face_contains_point(f, w),
            None => p.degree(w).ok() == Some(m),
        })
        .collect();
    (0..p.n())
        .map(|i| {
            RingElement::from_terms(
                cols.iter()
                    .map(|&(j, w)| (w.clone(), &fiber[j] * rational::int(w[i]))),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{newton_polytope, validate_matrix};
    use crate::rational::int;

    fn poly(rows: &[Vec<i64>]) -> PolytopeAtInfinity {
        newton_polytope(&validate_matrix(rows).unwrap())
    }

    fn gauss() -> PolytopeAtInfinity {
        poly(&[vec![1, 1, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]])
    }

    fn lv<const K: usize>(v: [i64; K]) -> LatticeVector {
        LatticeVector::from(v)
    }

    #[test]
    fn graded_pieces() {
        let p = poly(&[vec![2]]);
        let r = GradedRingHandle::full(&p);
        assert_eq!(*r.graded_piece(3), vec![lv([3])]);
        assert_eq!(*r.graded_piece(0), vec![lv([0])]);
        let g = gauss();
        let r = GradedRingHandle::full(&g);
        assert_eq!(
            *r.graded_piece(1),
            vec![lv([1, 0, 0]), lv([1, 0, 1]), lv([1, 1, 0]), lv([1, 1, 1])]
        );
        let p = poly(&[vec![-1, 1]]);
        assert_eq!(*GradedRingHandle::full(&p).graded_piece(0), vec![lv([0])]);
    }

    #[test]
    fn gr_multiplication_examples() {
        let p = poly(&[vec![-1, 1]]);
        assert_eq!(gr_multiply(&lv([0]), &lv([1]), &p).unwrap(), Some(lv([1])));
        assert_eq!(gr_multiply(&lv([1]), &lv([-1]), &p).unwrap(), None);
        let g = gauss();
        assert_eq!(
            gr_multiply(&lv([1, 0, 0]), &lv([1, 1, 0]), &g).unwrap(),
            Some(lv([2, 1, 0]))
        );
        assert!(gr_multiply(&lv([0, 1, 0]), &lv([1, 0, 0]), &g).is_err());
    }

    #[test]
    fn facial_rings() {
        let p = poly(&[vec![1, 2]]);
        let v2 = p.faces().iter().find(|f| f.vertices == vec![lv([2])]).unwrap().id;
        let r = facial_ring(v2, &p).unwrap();
        assert_eq!(*r.graded_piece(2), vec![lv([2])]);
        assert_eq!(*r.graded_piece(3), vec![lv([3])]);
        let v0 = p.faces().iter().find(|f| f.vertices == vec![lv([0])]).unwrap().id;
        assert_eq!(facial_ring(v0, &p).err(), Some(GkzError::FaceContainsOrigin(v0)));

        let g = gauss();
        let apex_free = g
            .faces()
            .iter()
            .find(|f| f.vertices == vec![lv([1, 0, 0])])
            .unwrap()
            .id;
        let r = facial_ring(apex_free, &g).unwrap();
        assert_eq!(*r.graded_piece(3), vec![lv([3, 0, 0])]);
    }

    #[test]
    fn projection_onto_edge() {
        let g = gauss();
        let square = g.resolution_faces(2)[0];
        let edge = g
            .faces()
            .iter()
            .find(|f| f.vertices == vec![lv([1, 0, 0]), lv([1, 1, 0])])
            .unwrap()
            .id;
        let x = RingElement::from_terms([(lv([1, 0, 1]), int(1)), (lv([2, 1, 0]), int(3))]);
        let y = face_projection(&x, square, edge, &g).unwrap();
        assert_eq!(y, RingElement::monomial(lv([2, 1, 0]), int(3)));
        assert!(face_projection(&x, edge, square, &g).is_err());
    }

    #[test]
    fn poincare_examples() {
        let p = poly(&[vec![1]]);
        let s = GradedRingHandle::full(&p).poincare_series();
        assert_eq!(s, RationalFunctionQ::new(Poly::one(), Poly::from_i64s(&[1, -1])));

        let p = poly(&[vec![-1, 1]]);
        let s = GradedRingHandle::full(&p).poincare_series();
        assert_eq!(
            s,
            RationalFunctionQ::new(Poly::from_i64s(&[1, 1]), Poly::from_i64s(&[1, -1]))
        );

        let g = gauss();
        let s = GradedRingHandle::full(&g).poincare_series();
        assert_eq!(
            s,
            RationalFunctionQ::new(Poly::from_i64s(&[1, 1]), Poly::one_minus_t_pow(1, 3))
        );
        assert_eq!(s.pole_order_at_one(), 3);
    }

    #[test]
    fn log_derivatives() {
        let p = poly(&[vec![2]]);
        let g = log_derivative_classes(&[int(1)], None, &p);
        assert_eq!(g, vec![RingElement::monomial(lv([2]), int(2))]);

        let p = poly(&[vec![-1, 1]]);
        let g = log_derivative_classes(&[int(1), int(1)], None, &p);
        assert_eq!(
            g[0],
            RingElement::from_terms([(lv([-1]), int(-1)), (lv([1]), int(1))])
        );

        let gp = gauss();
        let square = gp.resolution_faces(2)[0];
        let ones = vec![int(1); 4];
        let g = log_derivative_classes(&ones, Some(square), &gp);
        assert_eq!(
            g[1],
            RingElement::from_terms([(lv([1, 1, 0]), int(1)), (lv([1, 1, 1]), int(1))])
        );
        assert_eq!(
            g[2],
            RingElement::from_terms([(lv([1, 0, 1]), int(1)), (lv([1, 1, 1]), int(1))])
        );
    }
}
