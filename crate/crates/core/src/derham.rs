//! The twisted de Rham complex at a fiber:
//!
//! d(h·e_I) = Σ_{i∉I} (t_i ∂h/∂t_i + γ_i h + Σ_j a_j w_ij t^{w_j} h) e_i ∧ e_I
//!
//! where e_i = dt_i/t_i and h ranges over K[δ ∩ Zⁿ]. The filtration by M·ρ
//! is preserved by d, and the top-level part of d is the Koszul
//! differential of Gr(R) with respect to the log-derivatives of f.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{GkzError, Result};
use crate::geometry::{cone_delta, GammaParameter, PolytopeAtInfinity};
use crate::homology::{kouchnirenko_truncation, verify_kouchnirenko};
use crate::lattice::LatticeVector;
use crate::rational::{self, Q};
use crate::semigroup::{gr_multiply, log_derivative_classes, GradedRingHandle};
use crate::sparse::{Echelon, SparseVec};

/// A logarithmic q-form Σ c · t^w e_I, with I a sorted 0-based index set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogForm {
    degree: usize,
    terms: BTreeMap<(Vec<usize>, LatticeVector), Q>,
}

impl LogForm {
    pub fn zero(degree: usize) -> Self {
        LogForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(set: Vec<usize>, w: LatticeVector, c: Q) -> Self {
        let mut f = LogForm::zero(set.len());
        f.add_term(set, w, c);
        f
    }

    /// t^w · e_1 ∧ … ∧ e_n.
    pub fn top(n: usize, w: LatticeVector, c: Q) -> Self {
        LogForm::monomial((0..n).collect(), w, c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<usize>, LatticeVector), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, set: Vec<usize>, w: LatticeVector, c: Q) {
        assert_eq!(set.len(), self.degree, "wedge length must match the form degree");
        assert!(set.windows(2).all(|p| p[0] < p[1]), "index set must be increasing");
        if c.is_zero() {
            return;
        }
        let key = (set, w);
        let v = self.terms.remove(&key).unwrap_or_else(Q::zero) + c;
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn add(&self, other: &LogForm) -> LogForm {
        let mut out = self.clone();
        for ((s, w), c) in &other.terms {
            out.add_term(s.clone(), w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> LogForm {
        let mut out = LogForm::zero(self.degree);
        for ((s, w), x) in &self.terms {
            out.add_term(s.clone(), w.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &LogForm) -> LogForm {
        self.add(&other.scale(&-Q::one()))
    }

    /// Terms of filtration level exactly `level`.
    pub fn level_part(&self, p: &PolytopeAtInfinity, level: i64) -> LogForm {
        let mut out = LogForm::zero(self.degree);
        for ((s, w), c) in &self.terms {
            if term_level(p, w, self.degree) == level {
                out.add_term(s.clone(), w.clone(), c.clone());
            }
        }
        out
    }
}

impl Serialize for LogForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            wedge: Vec<usize>,
            exponent: LatticeVector,
            coeff: String,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|((set, w), c)| Term {
                wedge: set.iter().map(|i| i + 1).collect(),
                exponent: w.clone(),
                coeff: rational::format(c),
            })
            .collect();
        let mut st = s.serialize_struct("LogForm", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

fn term_level(p: &PolytopeAtInfinity, w: &[i64], q: usize) -> i64 {
    p.degree(w).expect("exponent lies in δ") - p.gauge_denominator() * q as i64
}

/// The sign of e_i ∧ e_I against e_{I ∪ {i}}.
fn wedge_sign(set: &[usize], i: usize) -> Q {
    if set.iter().filter(|&&j| j < i).count() % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

fn insert_sorted(set: &[usize], i: usize) -> Vec<usize> {
    let mut out = set.to_vec();
    let pos = out.partition_point(|&j| j < i);
    out.insert(pos, i);
    out
}

/// Least p with ω ∈ F_p, i.e. the largest M·ρ(w) − M·q over the terms;
/// `None` for the zero form.
pub fn filtration_level(omega: &LogForm, p: &PolytopeAtInfinity) -> Option<i64> {
    omega
        .terms
        .keys()
        .map(|(_, w)| term_level(p, w, omega.degree))
        .max()
}

pub fn twisted_differential(gamma: &[Q], fiber: &[Q], omega: &LogForm, p: &PolytopeAtInfinity) -> LogForm {
    let n = p.n();
    let mut out = LogForm::zero(omega.degree + 1);
    for ((set, w), c) in &omega.terms {
        for i in (0..n).filter(|i| !set.contains(i)) {
            let target = insert_sorted(set, i);
            let sc = wedge_sign(set, i) * c;
            out.add_term(target.clone(), w.clone(), &sc * (rational::int(w[i]) + &gamma[i]));
            for (wj, a) in p.columns().iter().zip(fiber) {
                out.add_term(target.clone(), w + wj, &sc * a * rational::int(wj[i]));
            }
        }
    }
    out
}

/// The Koszul differential of Gr(R) applied to ω: Σ ± (g_i ⋆ h) e_i ∧ e_I.
pub fn koszul_gr_differential(fiber: &[Q], omega: &LogForm, p: &PolytopeAtInfinity) -> LogForm {
    let g = log_derivative_classes(fiber, None, p);
    let mut out = LogForm::zero(omega.degree + 1);
    for ((set, w), c) in &omega.terms {
        for i in (0..p.n()).filter(|i| !set.contains(i)) {
            let target = insert_sorted(set, i);
            let sc = wedge_sign(set, i) * c;
            for (u, x) in g[i].terms() {
                if let Some(v) = gr_multiply(w, u, p).expect("exponents lie in δ") {
                    out.add_term(target.clone(), v, &sc * x);
                }
            }
        }
    }
    out
}

/// The twisted complex at a fiber, with γ as given. A γ outside −δ is
/// accepted with a recorded warning.
pub struct TwistedComplex<'p> {
    polytope: &'p PolytopeAtInfinity,
    gamma: Vec<Q>,
    fiber: Vec<Q>,
    warnings: Vec<String>,
}

impl<'p> TwistedComplex<'p> {
    pub fn new(p: &'p PolytopeAtInfinity, gamma: &[Q], fiber: &[Q]) -> Result<Self> {
        if gamma.len() != p.n() {
            return Err(GkzError::ShapeMismatch(format!(
                "gamma has {} entries, expected {}",
                gamma.len(),
                p.n()
            )));
        }
        if fiber.len() != p.columns().len() {
            return Err(GkzError::ShapeMismatch(format!(
                "fiber has {} entries, matrix has {} columns",
                fiber.len(),
                p.columns().len()
            )));
        }
        let mut warnings = Vec::new();
        let delta = cone_delta(&p.matrix());
        if !GammaParameter::new(gamma.to_vec()).is_normalized(&delta) {
            let msg = "GammaNotNormalized: gamma is not in -delta; rank guarantees do not apply".to_string();
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(TwistedComplex {
            polytope: p,
            gamma: gamma.to_vec(),
            fiber: fiber.to_vec(),
            warnings,
        })
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn polytope(&self) -> &'p PolytopeAtInfinity {
        self.polytope
    }

    pub fn gamma(&self) -> &[Q] {
        &self.gamma
    }

    pub fn fiber(&self) -> &[Q] {
        &self.fiber
    }

    pub fn d(&self, omega: &LogForm) -> LogForm {
        twisted_differential(&self.gamma, &self.fiber, omega, self.polytope)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrCheck {
    pub checked: usize,
    pub first_failure: Option<usize>,
}

/// For each sample (homogeneous in filtration level), compares the
/// top-level part of dω with the Koszul differential in Gr.
pub fn check_gr_equals_koszul(
    gamma: &[Q],
    fiber: &[Q],
    p: &PolytopeAtInfinity,
    samples: &[LogForm],
) -> GrCheck {
    let first_failure = samples.iter().position(|omega| {
        let Some(level) = filtration_level(omega, p) else {
            return !twisted_differential(gamma, fiber, omega, p).is_zero();
        };
        let top = twisted_differential(gamma, fiber, omega, p).level_part(p, level);
        top != koszul_gr_differential(fiber, omega, p)
    });
    GrCheck {
        checked: samples.len(),
        first_failure,
    }
}

/// All monomial q-forms t^w e_I with M·ρ(w) ≤ `max_degree`.
pub fn monomial_forms(p: &PolytopeAtInfinity, q: usize, max_degree: i64) -> Vec<LogForm> {
    use itertools::Itertools;
    let ring = GradedRingHandle::full(p);
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for w in ring.graded_piece(d).iter() {
            for set in (0..p.n()).combinations(q) {
                out.push(LogForm::monomial(set, w.clone(), Q::one()));
            }
        }
    }
    out
}

/// Gr-level solver for one degree: image vectors g_i ⋆ m followed by the
/// basis monomials of that degree.
struct DegreeSolver {
    index: HashMap<LatticeVector, usize>,
    echelon: Echelon,
    /// Label → (i, m) for image vectors, or a basis position.
    labels: Vec<Label>,
}

#[derive(Clone, Debug)]
enum Label {
    Image(usize, LatticeVector),
    Basis(usize),
}

/// A monomial basis of H^n of the twisted complex, with memoized reduction
/// of monomial n-forms to coordinates in it.
pub struct ReductionBasis {
    gamma: Vec<Q>,
    fiber: Vec<Q>,
    basis: Vec<LatticeVector>,
    solvers: Mutex<BTreeMap<i64, Arc<DegreeSolver>>>,
    cache: Mutex<BTreeMap<LatticeVector, Arc<Vec<Q>>>>,
}

impl Serialize for ReductionBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(s)
    }
}

impl std::fmt::Debug for ReductionBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReductionBasis").field("basis", &self.basis).finish()
    }
}

impl ReductionBasis {
    pub fn new(gamma: &[Q], fiber: &[Q], basis: Vec<LatticeVector>) -> Self {
        ReductionBasis {
            gamma: gamma.to_vec(),
            fiber: fiber.to_vec(),
            basis,
            solvers: Mutex::new(BTreeMap::new()),
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn basis(&self) -> &[LatticeVector] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn gamma(&self) -> &[Q] {
        &self.gamma
    }

    pub fn fiber(&self) -> &[Q] {
        &self.fiber
    }

    fn solver(&self, p: &PolytopeAtInfinity, d: i64) -> Arc<DegreeSolver> {
        if let Some(s) = self.solvers.lock().unwrap().get(&d) {
            return s.clone();
        }
        let ring = GradedRingHandle::full(p);
        let m = p.gauge_denominator();
        let g = log_derivative_classes(&self.fiber, None, p);
        let piece = ring.graded_piece(d);
        let index: HashMap<LatticeVector, usize> =
            piece.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut echelon = Echelon::new();
        let mut labels = Vec::new();
        for (i, gi) in g.iter().enumerate() {
            for s in ring.graded_piece(d - m).iter() {
                let mut v = SparseVec::new();
                for (u, c) in gi.terms() {
                    if let Some(w) = gr_multiply(s, u, p).expect("in δ") {
                        let e = v.entry(index[&w]).or_insert_with(Q::zero);
                        *e += c;
                    }
                }
                v.retain(|_, c| !c.is_zero());
                echelon.insert(v, Some(labels.len()));
                labels.push(Label::Image(i, s.clone()));
            }
        }
        for (k, b) in self.basis.iter().enumerate() {
            if let Some(&i) = index.get(b) {
                echelon.insert(SparseVec::from([(i, Q::one())]), Some(labels.len()));
                labels.push(Label::Basis(k));
            }
        }
        let solver = Arc::new(DegreeSolver {
            index,
            echelon,
            labels,
        });
        self.solvers.lock().unwrap().entry(d).or_insert(solver).clone()
    }

    /// Coordinates of t^w e_1∧…∧e_n.
    pub fn reduce_monomial(&self, p: &PolytopeAtInfinity, w: &LatticeVector) -> Result<Arc<Vec<Q>>> {
        if let Some(v) = self.cache.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        if !p.in_cone(w) {
            return Err(GkzError::NotInCone(w.clone()));
        }
        let n = p.n();
        let d = p.degree(w)?;
        let solver = self.solver(p, d);
        let (residual, coords) = solver
            .echelon
            .reduce(&SparseVec::from([(solver.index[w], Q::one())]));
        if !residual.is_empty() {
            return Err(GkzError::DegenerateFiber { faces: Vec::new() });
        }
        let mut result = vec![Q::zero(); self.basis.len()];
        // ω' = t^w − Σ c_k b_k − Σ_i (−1)^i d(η_i e_{î}) has level below d.
        let mut rest = LogForm::top(n, w.clone(), Q::one());
        for (label, c) in &coords {
            match &solver.labels[*label] {
                Label::Basis(k) => {
                    result[*k] += c;
                    rest.add_term((0..n).collect(), self.basis[*k].clone(), -c.clone());
                }
                Label::Image(i, s) => {
                    let hat: Vec<usize> = (0..n).filter(|j| j != i).collect();
                    let eta = LogForm::monomial(hat, s.clone(), c.clone());
                    let de = twisted_differential(&self.gamma, &self.fiber, &eta, p);
                    let sgn = if i % 2 == 0 { Q::one() } else { -Q::one() };
                    rest = rest.sub(&de.scale(&sgn));
                }
            }
        }
        debug_assert!(filtration_level(&rest, p).map_or(true, |l| l < d - p.gauge_denominator() * n as i64));
        for ((_, v), c) in rest.terms() {
            let sub = self.reduce_monomial(p, v)?;
            for (r, x) in result.iter_mut().zip(sub.iter()) {
                *r += c * x;
            }
        }
        let result = Arc::new(result);
        let mut cache = self.cache.lock().unwrap();
        Ok(cache.entry(w.clone()).or_insert(result).clone())
    }
}

/// Coordinates of an n-form in the basis, modulo exact forms.
pub fn reduce_to_basis(omega: &LogForm, basis: &ReductionBasis, p: &PolytopeAtInfinity) -> Result<Vec<Q>> {
    if omega.degree() != p.n() {
        return Err(GkzError::InvalidInput(format!(
            "expected an {}-form, got a {}-form",
            p.n(),
            omega.degree()
        )));
    }
    let mut out = vec![Q::zero(); basis.len()];
    for ((_, w), c) in omega.terms() {
        let v = basis.reduce_monomial(p, w)?;
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct TopCohomology {
    pub dimension: usize,
    pub truncation: i64,
    /// Whether the lifted monomial basis is independent modulo exact forms.
    pub basis_independent: bool,
    pub basis: ReductionBasis,
    pub warnings: Vec<String>,
}

/// dim H^n of the twisted complex from the truncated map C^{n−1} → C^n,
/// with the monomial basis lifted from the Koszul top quotient.
pub fn h_top_dimension(gamma: &[Q], fiber: &[Q], p: &PolytopeAtInfinity) -> Result<TopCohomology> {
    let complex = TwistedComplex::new(p, gamma, fiber)?;
    let kouchnirenko = verify_kouchnirenko(p, fiber)?;
    let n = p.n();
    let m = p.gauge_denominator();
    let truncation = kouchnirenko_truncation(p);
    let ring = GradedRingHandle::full(p);

    let rows: Vec<LatticeVector> = (0..=truncation)
        .flat_map(|d| ring.graded_piece(d).as_ref().clone())
        .collect();
    let index: HashMap<&LatticeVector, usize> = rows.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let columns: Vec<SparseVec> = (0..=truncation - m)
        .flat_map(|d| ring.graded_piece(d).as_ref().clone())
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|s| {
            (0..n).map(|i| {
                let hat: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                let de = complex.d(&LogForm::monomial(hat, s.clone(), Q::one()));
                de.terms()
                    .iter()
                    .map(|((_, w), c)| (index[w], c.clone()))
                    .collect::<SparseVec>()
            })
        })
        .collect();
    let mut echelon = Echelon::new();
    for c in columns {
        echelon.insert(c, None);
    }
    let dimension = rows.len() - echelon.rank();
    let rank_before = echelon.rank();
    for b in &kouchnirenko.monomial_basis {
        echelon.insert(SparseVec::from([(index[b], Q::one())]), None);
    }
    let basis_independent = echelon.rank() - rank_before == kouchnirenko.monomial_basis.len();
    Ok(TopCohomology {
        dimension,
        truncation,
        basis_independent,
        basis: ReductionBasis::new(gamma, fiber, kouchnirenko.monomial_basis),
        warnings: complex.warnings().to_vec(),
    })
}

/// B_j for each column w_j: column k is the reduction of t^{w_j}·b_k.
pub fn connection_matrices(basis: &ReductionBasis, p: &PolytopeAtInfinity) -> Result<Vec<Vec<Vec<Q>>>> {
    p.columns()
        .par_iter()
        .map(|wj| {
            let cols = basis
                .basis()
                .iter()
                .map(|b| basis.reduce_monomial(p, &(wj + b)).map(|v| v.as_ref().clone()))
                .collect::<Result<Vec<_>>>()?;
            let r = basis.len();
            Ok((0..r).map(|i| (0..r).map(|k| cols[k][i].clone()).collect()).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{newton_polytope, validate_matrix};
    use crate::rational::{int, ratio};

    fn poly(rows: &[Vec<i64>]) -> PolytopeAtInfinity {
        newton_polytope(&validate_matrix(rows).unwrap())
    }

    fn lv<const K: usize>(v: [i64; K]) -> LatticeVector {
        LatticeVector::from(v)
    }

    #[test]
    fn differential_examples() {
        let p = poly(&[vec![1]]);
        let one = LogForm::monomial(vec![], lv([0]), int(1));
        assert_eq!(
            twisted_differential(&[int(0)], &[int(1)], &one, &p),
            LogForm::top(1, lv([1]), int(1))
        );
        let p = poly(&[vec![2]]);
        let t = LogForm::monomial(vec![], lv([1]), int(1));
        let expected = LogForm::top(1, lv([1]), int(1)).add(&LogForm::top(1, lv([3]), int(2)));
        assert_eq!(twisted_differential(&[int(0)], &[int(1)], &t, &p), expected);
        assert!(twisted_differential(&[int(0)], &[int(1)], &LogForm::zero(0), &p).is_zero());
    }

    #[test]
    fn filtration_examples() {
        let p = poly(&[vec![2]]);
        assert_eq!(filtration_level(&LogForm::monomial(vec![], lv([0]), int(1)), &p), Some(0));
        assert_eq!(filtration_level(&LogForm::top(1, lv([2]), int(1)), &p), Some(0));
        assert_eq!(filtration_level(&LogForm::monomial(vec![], lv([3]), int(1)), &p), Some(3));
        assert_eq!(filtration_level(&LogForm::zero(0), &p), None);
    }

    #[test]
    fn gr_matches_koszul() {
        let p = poly(&[vec![1, 2]]);
        let one = LogForm::monomial(vec![], lv([0]), int(1));
        let d = twisted_differential(&[int(0)], &[int(1), int(1)], &one, &p);
        assert_eq!(d.level_part(&p, 0), LogForm::top(1, lv([2]), int(2)));
        let samples = monomial_forms(&p, 0, 4);
        let r = check_gr_equals_koszul(&[int(0)], &[int(1), int(1)], &p, &samples);
        assert_eq!(r.first_failure, None);
    }

    #[test]
    fn top_dimensions() {
        let p = poly(&[vec![1]]);
        let h = h_top_dimension(&[int(0)], &[int(1)], &p).unwrap();
        assert_eq!(h.dimension, 1);
        assert_eq!(h.basis.basis(), &[lv([0])]);
        let p = poly(&[vec![2]]);
        let h = h_top_dimension(&[int(0)], &[int(1)], &p).unwrap();
        assert_eq!(h.dimension, 2);
        assert!(h.basis_independent);
        let p = poly(&[vec![-1, 1]]);
        let h = h_top_dimension(&[ratio(1, 2)], &[int(1), int(1)], &p).unwrap();
        assert_eq!(h.dimension, 2);
    }

    #[test]
    fn reductions() {
        let p = poly(&[vec![1]]);
        let h = h_top_dimension(&[int(0)], &[int(1)], &p).unwrap();
        let t = LogForm::top(1, lv([1]), int(1));
        assert_eq!(reduce_to_basis(&t, &h.basis, &p).unwrap(), vec![int(0)]);

        let p = poly(&[vec![2]]);
        let h = h_top_dimension(&[int(0)], &[int(1)], &p).unwrap();
        let t3 = LogForm::top(1, lv([3]), int(1));
        assert_eq!(reduce_to_basis(&t3, &h.basis, &p).unwrap(), vec![int(0), ratio(-1, 2)]);
        let t1 = LogForm::top(1, lv([1]), int(1));
        assert_eq!(reduce_to_basis(&t1, &h.basis, &p).unwrap(), vec![int(0), int(1)]);
    }

    #[test]
    fn connection_closed_forms() {
        let p = poly(&[vec![1]]);
        let basis = ReductionBasis::new(&[ratio(1, 3)], &[int(2)], vec![lv([0])]);
        let b = connection_matrices(&basis, &p).unwrap();
        assert_eq!(b, vec![vec![vec![ratio(-1, 6)]]]);
        let tc = TwistedComplex::new(&p, &[ratio(1, 3)], &[int(2)]).unwrap();
        assert_eq!(tc.warnings().len(), 1);

        let p = poly(&[vec![2]]);
        let h = h_top_dimension(&[int(0)], &[int(1)], &p).unwrap();
        let b = connection_matrices(&h.basis, &p).unwrap();
        assert_eq!(b, vec![vec![vec![int(0), int(0)], vec![int(0), ratio(-1, 2)]]]);
    }
}
