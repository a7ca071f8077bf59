//! Integer-exact polytope and cone geometry.
//!
//! The Newton polytope at infinity Δ∞ is the convex hull of the origin and the
//! columns of the exponent matrix. Its facets are found by brute force over
//! all n-subsets of candidate points, which is exact and fast enough for the
//! desk-scale instances this crate targets (n ≤ 4, N ≤ 12). From the facet
//! list we derive the face lattice, the gauge function ρ, its common
//! denominator M and the normalized volume n!·vol(Δ∞).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GkzError, Result};
use crate::lattice::{box_points, LatticeVector};
use crate::linalg;
use crate::rational::{self, Q};

/// The n×N integer matrix A, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMatrix {
    n: usize,
    columns: Vec<LatticeVector>,
}

impl ExponentMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &LatticeVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[LatticeVector] {
        &self.columns
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.columns[j][i]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect()
    }

    /// The matrix `U·A` for an n×n integer matrix `U`.
    pub fn transform(&self, u: &[Vec<i64>]) -> Result<ExponentMatrix> {
        let rows: Vec<Vec<i64>> = (0..self.n)
            .map(|i| {
                self.columns
                    .iter()
                    .map(|c| (0..self.n).map(|k| u[i][k] * c[k]).sum())
                    .collect()
            })
            .collect();
        validate_matrix(&rows)
    }
}

/// Checks shape and full row rank.
pub fn validate_matrix(rows: &[Vec<i64>]) -> Result<ExponentMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(GkzError::ShapeMismatch("matrix has no rows".into()));
    }
    let cols = rows[0].len();
    if cols == 0 {
        return Err(GkzError::ShapeMismatch("matrix has no columns".into()));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(GkzError::ShapeMismatch(format!(
            "row {i} has {} entries, expected {cols}",
            rows[i].len()
        )));
    }
    let r = linalg::rank(rows);
    if r < n {
        return Err(GkzError::RankDeficient {
            actual: r,
            expected: n,
        });
    }
    let columns = (0..cols)
        .map(|j| LatticeVector(rows.iter().map(|row| row[j]).collect()))
        .collect();
    Ok(ExponentMatrix { n, columns })
}

/// A facet `{w : ℓ(w) = c}` of Δ∞ with Δ∞ ⊂ `{ℓ ≤ c}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetDescription {
    pub normal: LatticeVector,
    pub level: i64,
}

impl FacetDescription {
    pub fn eval(&self, w: &[i64]) -> i64 {
        self.normal.dot(w)
    }

    pub fn contains_origin(&self) -> bool {
        self.level == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub id: usize,
    pub dimension: usize,
    /// Vertices of Δ∞ on the face, sorted lexicographically.
    pub vertices: Vec<LatticeVector>,
    /// Indices of the facets containing the face.
    pub facets: Vec<usize>,
    pub contains_origin: bool,
    /// Whether the face avoids every facet through the origin (member of some `I_p`).
    pub in_resolution: bool,
    /// Codimension-one subfaces with their incidence signs.
    pub boundary: Vec<(usize, i32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexOrder {
    Lex,
    ReverseLex,
}

#[derive(Clone, Debug)]
pub struct PolytopeAtInfinity {
    n: usize,
    columns: Vec<LatticeVector>,
    points: Vec<LatticeVector>,
    vertices: Vec<LatticeVector>,
    facets: Vec<FacetDescription>,
    faces: Vec<Face>,
    gauge_denominator: i64,
    normalized_volume: u64,
    bbox: (Vec<i64>, Vec<i64>),
}

/// Facets, vertices and face lattice of conv{0, w_1, …, w_N}.
pub fn newton_polytope(a: &ExponentMatrix) -> PolytopeAtInfinity {
    let n = a.n();
    let mut pts: BTreeSet<LatticeVector> = a.columns().iter().cloned().collect();
    pts.insert(LatticeVector::zero(n));
    let points: Vec<LatticeVector> = pts.into_iter().collect();

    let facets = hull_facets(&points, n);
    let vertices: Vec<LatticeVector> = points
        .iter()
        .filter(|p| {
            let normals: Vec<Vec<i64>> = facets
                .iter()
                .filter(|f| f.eval(p) == f.level)
                .map(|f| f.normal.0.clone())
                .collect();
            linalg::rank(&normals) == n
        })
        .cloned()
        .collect();

    let faces = build_faces(n, &vertices, &facets);
    let lo: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();

    let mut poly = PolytopeAtInfinity {
        n,
        columns: a.columns().to_vec(),
        points,
        vertices,
        facets,
        faces,
        gauge_denominator: 1,
        normalized_volume: 0,
        bbox: (lo, hi),
    };
    poly.gauge_denominator = reduced_denominator(&poly);
    let full = poly.full_face();
    poly.normalized_volume = poly
        .triangulate(full, VertexOrder::Lex)
        .iter()
        .map(|s| simplex_volume(s))
        .sum();
    poly
}

fn hull_facets(points: &[LatticeVector], n: usize) -> Vec<FacetDescription> {
    let mut found = BTreeSet::new();
    for subset in points.iter().combinations(n) {
        let base = subset[0];
        let diffs: Vec<Vec<i64>> = subset[1..].iter().map(|p| (*p - base).0).collect();
        let normal = linalg::normal_vector(&diffs, n);
        if normal.iter().all(|&x| x == 0) {
            continue;
        }
        let normal = LatticeVector(normal);
        let c = normal.dot(base);
        let vals: Vec<i64> = points.iter().map(|p| normal.dot(p)).collect();
        if vals.iter().all(|&v| v <= c) {
            found.insert(FacetDescription { normal, level: c });
        } else if vals.iter().all(|&v| v >= c) {
            found.insert(FacetDescription {
                normal: -&normal,
                level: -c,
            });
        }
    }
    found.into_iter().collect()
}

fn build_faces(n: usize, vertices: &[LatticeVector], facets: &[FacetDescription]) -> Vec<Face> {
    let facet_sets: Vec<BTreeSet<usize>> = facets
        .iter()
        .map(|f| {
            (0..vertices.len())
                .filter(|&i| f.eval(&vertices[i]) == f.level)
                .collect()
        })
        .collect();

    let mut seen: BTreeSet<BTreeSet<usize>> = facet_sets.iter().cloned().collect();
    let mut frontier: Vec<BTreeSet<usize>> = seen.iter().cloned().collect();
    while let Some(face) = frontier.pop() {
        for fs in &facet_sets {
            let meet: BTreeSet<usize> = face.intersection(fs).copied().collect();
            if !meet.is_empty() && meet != face && seen.insert(meet.clone()) {
                frontier.push(meet);
            }
        }
    }
    seen.insert((0..vertices.len()).collect());

    let mut raw: Vec<(usize, Vec<LatticeVector>, Vec<usize>)> = seen
        .into_iter()
        .map(|set| {
            let verts: Vec<LatticeVector> = set.iter().map(|&i| vertices[i].clone()).collect();
            let containing: Vec<usize> = (0..facets.len())
                .filter(|&f| set.is_subset(&facet_sets[f]))
                .collect();
            let coords: Vec<Vec<i64>> = verts.iter().map(|v| v.0.clone()).collect();
            (linalg::affine_rank(&coords), verts, containing)
        })
        .collect();
    raw.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut faces: Vec<Face> = raw
        .into_iter()
        .enumerate()
        .map(|(id, (dimension, vertices, containing))| {
            let contains_origin = containing.iter().all(|&f| facets[f].contains_origin());
            let in_resolution =
                dimension < n && containing.iter().all(|&f| !facets[f].contains_origin());
            Face {
                id,
                dimension,
                vertices,
                facets: containing,
                contains_origin,
                in_resolution,
                boundary: Vec::new(),
            }
        })
        .collect();

    let frames: Vec<(LatticeVector, Vec<Vec<i64>>)> = faces.iter().map(orientation_frame).collect();
    for g in 0..faces.len() {
        if faces[g].dimension == 0 {
            continue;
        }
        let mut boundary = Vec::new();
        for h in 0..faces.len() {
            if faces[h].dimension + 1 == faces[g].dimension
                && faces[h].vertices.iter().all(|v| faces[g].vertices.contains(v))
            {
                let sign = incidence_sign(&faces[g], &frames[g], &faces[h], &frames[h]);
                boundary.push((h, sign));
            }
        }
        faces[g].boundary = boundary;
    }
    faces
}

/// An ordered affine frame spanning the face: the lexicographically first
/// vertex and the greedily chosen affinely independent vertices after it.
fn orientation_frame(face: &Face) -> (LatticeVector, Vec<Vec<i64>>) {
    let base = face.vertices[0].clone();
    let mut frame: Vec<Vec<i64>> = Vec::new();
    for v in &face.vertices[1..] {
        if frame.len() == face.dimension {
            break;
        }
        let mut trial = frame.clone();
        trial.push((v - &base).0);
        if linalg::rank(&trial) > frame.len() {
            frame = trial;
        }
    }
    (base, frame)
}

/// Sign comparing the boundary orientation induced on `sub` (outward direction
/// first) with the chosen orientation of `sub`.
fn incidence_sign(
    face: &Face,
    frame: &(LatticeVector, Vec<Vec<i64>>),
    sub: &Face,
    sub_frame: &(LatticeVector, Vec<Vec<i64>>),
) -> i32 {
    let x = face
        .vertices
        .iter()
        .find(|v| !sub.vertices.contains(v))
        .expect("a proper subface misses some vertex");
    let mut induced = vec![(&sub_frame.0 - x).0];
    induced.extend(sub_frame.1.iter().cloned());
    let rows = linalg::nonsingular_rows(&frame.1).expect("frame has full rank");
    let minor = |cols: &[Vec<i64>]| -> i128 {
        let m: Vec<Vec<i64>> = rows
            .iter()
            .map(|&r| cols.iter().map(|c| c[r]).collect())
            .collect();
        linalg::det(&m)
    };
    let s = minor(&induced).signum() * minor(&frame.1).signum();
    debug_assert!(s != 0);
    s as i32
}

fn simplex_volume(simplex: &[LatticeVector]) -> u64 {
    let base = &simplex[0];
    let rows: Vec<Vec<i64>> = simplex[1..].iter().map(|v| (v - base).0).collect();
    linalg::det(&rows).unsigned_abs() as u64
}

fn lcm_of_levels(p: &PolytopeAtInfinity) -> i64 {
    p.facets
        .iter()
        .filter(|f| f.level > 0)
        .fold(1i64, |acc, f| acc.lcm(&f.level))
}

/// lcm of the positive facet levels, divided by whatever common factor the
/// attained numerators share on a sample of δ ∩ Zⁿ (points of 2Δ∞).
fn reduced_denominator(p: &PolytopeAtInfinity) -> i64 {
    let l = lcm_of_levels(p);
    let lo: Vec<i64> = p.bbox.0.iter().map(|x| 2 * x).collect();
    let hi: Vec<i64> = p.bbox.1.iter().map(|x| 2 * x).collect();
    let mut g = 0i64;
    for w in box_points(&lo, &hi) {
        if let Ok(r) = p.gauge(&w) {
            if r <= rational::int(2) {
                let scaled = r * rational::int(l);
                g = g.gcd(&rational::to_i64(&scaled));
            }
        }
    }
    if g == 0 {
        l
    } else {
        l / l.gcd(&g)
    }
}

impl PolytopeAtInfinity {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[LatticeVector] {
        &self.columns
    }

    /// The distinct candidate points {0, w_1, …, w_N}.
    pub fn points(&self) -> &[LatticeVector] {
        &self.points
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetDescription] {
        &self.facets
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn gauge_denominator(&self) -> i64 {
        self.gauge_denominator
    }

    pub fn normalized_volume(&self) -> u64 {
        self.normalized_volume
    }

    /// Coordinate-wise bounding box of Δ∞.
    pub fn bounding_box(&self) -> (&[i64], &[i64]) {
        (&self.bbox.0, &self.bbox.1)
    }

    /// The exponent matrix the polytope was built from.
    pub fn matrix(&self) -> ExponentMatrix {
        ExponentMatrix {
            n: self.n,
            columns: self.columns.clone(),
        }
    }

    /// Id of the face that is Δ∞ itself.
    pub fn full_face(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn origin_is_interior(&self) -> bool {
        self.facets.iter().all(|f| f.level > 0)
    }

    /// Counts of proper faces by dimension, `(f_0, …, f_{n-1})`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.n)
            .map(|d| self.faces.iter().filter(|f| f.dimension == d).count())
            .collect()
    }

    /// The index set I_p: p-dimensional faces lying on no facet through the origin.
    pub fn resolution_faces(&self, p: usize) -> Vec<usize> {
        self.faces
            .iter()
            .filter(|f| f.in_resolution && f.dimension == p)
            .map(|f| f.id)
            .collect()
    }

    /// All proper faces that do not contain the origin.
    pub fn faces_avoiding_origin(&self) -> Vec<usize> {
        self.faces
            .iter()
            .filter(|f| !f.contains_origin)
            .map(|f| f.id)
            .collect()
    }

    pub fn in_cone(&self, w: &[i64]) -> bool {
        self.facets
            .iter()
            .filter(|f| f.level == 0)
            .all(|f| f.eval(w) <= 0)
    }

    /// ρ(w) = inf{r ≥ 0 : w ∈ rΔ∞}.
    pub fn gauge(&self, w: &[i64]) -> Result<Q> {
        if !self.in_cone(w) {
            return Err(GkzError::NotInCone(LatticeVector::from(w)));
        }
        let mut best = Q::zero();
        for f in self.facets.iter().filter(|f| f.level > 0) {
            let r = rational::ratio(f.eval(w), f.level);
            if r > best {
                best = r;
            }
        }
        Ok(best)
    }

    /// The grading M·ρ(w) ∈ Z≥0.
    pub fn degree(&self, w: &[i64]) -> Result<i64> {
        let r = self.gauge(w)? * rational::int(self.gauge_denominator);
        Ok(rational::to_i64(&r))
    }

    /// Whether `w` is one of the points of the face.
    pub fn face_contains_point(&self, face: usize, w: &[i64]) -> bool {
        let f = &self.faces[face];
        if f.facets.is_empty() {
            return self.facets.iter().all(|h| h.eval(w) <= h.level);
        }
        f.facets.iter().all(|&h| self.facets[h].eval(w) == self.facets[h].level)
    }

    /// Whether `w` lies in the cone R≥0Γ over the face.
    pub fn in_face_cone(&self, face: usize, w: &[i64]) -> bool {
        let Ok(d) = self.degree(w) else {
            return false;
        };
        let m = self.gauge_denominator;
        self.faces[face]
            .facets
            .iter()
            .all(|&h| m * self.facets[h].eval(w) == self.facets[h].level * d)
    }

    /// Dimension of the linear span of R≥0Γ.
    pub fn cone_dimension(&self, face: usize) -> usize {
        let f = &self.faces[face];
        if f.contains_origin {
            f.dimension
        } else {
            f.dimension + 1
        }
    }

    pub fn is_subface(&self, face: usize, sub: usize) -> bool {
        self.faces[face].boundary.iter().any(|&(h, _)| h == sub)
    }

    pub fn incidence(&self, face: usize, sub: usize) -> Option<i32> {
        self.faces[face]
            .boundary
            .iter()
            .find(|&&(h, _)| h == sub)
            .map(|&(_, s)| s)
    }

    /// Pulling triangulation of a face: pull the first vertex under `order`
    /// and cone it over the triangulations of the subfaces avoiding it. Using
    /// one global order makes the triangulations of adjacent faces agree.
    pub fn triangulate(&self, face: usize, order: VertexOrder) -> Vec<Vec<LatticeVector>> {
        let mut memo = HashMap::new();
        self.triangulate_memo(face, order, &mut memo)
    }

    fn triangulate_memo(
        &self,
        face: usize,
        order: VertexOrder,
        memo: &mut HashMap<usize, Vec<Vec<LatticeVector>>>,
    ) -> Vec<Vec<LatticeVector>> {
        if let Some(t) = memo.get(&face) {
            return t.clone();
        }
        let f = &self.faces[face];
        let out = if f.dimension == 0 {
            vec![vec![f.vertices[0].clone()]]
        } else {
            let apex = match order {
                VertexOrder::Lex => f.vertices.first(),
                VertexOrder::ReverseLex => f.vertices.last(),
            }
            .expect("faces are nonempty")
            .clone();
            let mut out = Vec::new();
            for &(sub, _) in &f.boundary {
                if self.faces[sub].vertices.contains(&apex) {
                    continue;
                }
                for s in self.triangulate_memo(sub, order, memo) {
                    let mut simplex = vec![apex.clone()];
                    simplex.extend(s);
                    out.push(simplex);
                }
            }
            out
        };
        memo.insert(face, out.clone());
        out
    }

    /// n!·vol of the pyramid ⋃_{t∈[0,1]} tΓ over a facet avoiding the origin.
    pub fn pyramid_volume(&self, face: usize) -> u64 {
        let origin = LatticeVector::zero(self.n);
        self.triangulate(face, VertexOrder::Lex)
            .into_iter()
            .map(|s| {
                let mut simplex = vec![origin.clone()];
                simplex.extend(s);
                simplex_volume(&simplex)
            })
            .sum()
    }

    pub fn summary(&self) -> PolytopeSummary {
        PolytopeSummary {
            n: self.n,
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            f_vector: self.f_vector(),
            gauge_denominator: self.gauge_denominator,
            normalized_volume: self.normalized_volume,
            origin_interior: self.origin_is_interior(),
            resolution_faces: (0..self.n)
                .map(|p| {
                    self.resolution_faces(p)
                        .into_iter()
                        .map(|id| self.faces[id].vertices.clone())
                        .collect()
                })
                .collect(),
        }
    }
}

/// JSON view of the polytope data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSummary {
    pub n: usize,
    pub vertices: Vec<LatticeVector>,
    pub facets: Vec<FacetDescription>,
    pub f_vector: Vec<usize>,
    pub gauge_denominator: i64,
    pub normalized_volume: u64,
    pub origin_interior: bool,
    /// `resolution_faces[p]` lists the vertex sets of the faces in I_p.
    pub resolution_faces: Vec<Vec<Vec<LatticeVector>>>,
}

pub fn gauge(p: &PolytopeAtInfinity, w: &[i64]) -> Result<Q> {
    p.gauge(w)
}

pub fn gauge_denominator(p: &PolytopeAtInfinity) -> i64 {
    p.gauge_denominator()
}

pub fn normalized_volume(p: &PolytopeAtInfinity) -> u64 {
    p.normalized_volume()
}

/// The face lattice together with the index sets `I_0, …, I_{n-1}`.
pub fn face_lattice(p: &PolytopeAtInfinity) -> (&[Face], Vec<Vec<usize>>) {
    (p.faces(), (0..p.n()).map(|d| p.resolution_faces(d)).collect())
}

/// The cone δ generated by the columns, `{w : m(w) ≥ 0 for every facet normal m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDelta {
    pub generators: Vec<LatticeVector>,
    pub facet_normals: Vec<LatticeVector>,
}

impl ConeDelta {
    pub fn contains(&self, w: &[i64]) -> bool {
        self.facet_normals.iter().all(|m| m.dot(w) >= 0)
    }

    pub fn contains_rational(&self, w: &[Q]) -> bool {
        self.facet_normals.iter().all(|m| !dot_q(m, w).is_negative())
    }
}

fn dot_q(m: &[i64], w: &[Q]) -> Q {
    m.iter()
        .zip(w)
        .map(|(&a, b)| rational::int(a) * b)
        .fold(Q::zero(), |acc, x| acc + x)
}

/// Dualizes the cone generated by the columns: every facet of δ is spanned by
/// n−1 independent generators, so the candidates are normals of (n−1)-subsets.
pub fn cone_delta(a: &ExponentMatrix) -> ConeDelta {
    let n = a.n();
    let gens: Vec<LatticeVector> = a
        .columns()
        .iter()
        .filter(|c| !c.is_zero())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut normals = BTreeSet::new();
    for subset in gens.iter().combinations(n - 1) {
        let vs: Vec<Vec<i64>> = subset.iter().map(|v| v.0.clone()).collect();
        let m = linalg::normal_vector(&vs, n);
        if m.iter().all(|&x| x == 0) {
            continue;
        }
        let m = LatticeVector(m);
        let vals: Vec<i64> = gens.iter().map(|g| m.dot(g)).collect();
        if vals.iter().all(|&v| v >= 0) {
            normals.insert(m);
        } else if vals.iter().all(|&v| v <= 0) {
            normals.insert(-&m);
        }
    }
    ConeDelta {
        generators: a.columns().to_vec(),
        facet_normals: normals.into_iter().collect(),
    }
}

/// A parameter vector γ ∈ Qⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaParameter {
    #[serde(with = "crate::rational::serde_q_vec")]
    pub gamma: Vec<Q>,
}

impl GammaParameter {
    pub fn new(gamma: Vec<Q>) -> Self {
        GammaParameter { gamma }
    }

    pub fn zero(n: usize) -> Self {
        GammaParameter {
            gamma: vec![Q::zero(); n],
        }
    }

    /// Whether every facet normal of δ is ≤ 0 on γ, i.e. γ ∈ −δ.
    pub fn is_normalized(&self, delta: &ConeDelta) -> bool {
        delta
            .facet_normals
            .iter()
            .all(|m| !dot_q(m, &self.gamma).is_positive())
    }
}

/// Shifts γ by an integer vector into −δ. Among all admissible shifts `k`
/// (those with `k − γ ∈ δ`) the one of least L1 norm, then lexicographically
/// least, is used, so an already normalized γ is returned unchanged.
pub fn normalize_gamma(gamma: &GammaParameter, delta: &ConeDelta) -> GammaParameter {
    let n = gamma.gamma.len();
    let admissible = |k: &[i64]| {
        let diff: Vec<Q> = k
            .iter()
            .zip(&gamma.gamma)
            .map(|(&ki, g)| rational::int(ki) - g)
            .collect();
        delta.contains_rational(&diff)
    };

    // Σ generators is interior to δ, so ⌈γ⌉ + s·u is admissible for large s.
    let interior: Vec<i64> = (0..n)
        .map(|i| delta.generators.iter().map(|g| g[i]).sum())
        .collect();
    let ceil: Vec<i64> = gamma.gamma.iter().map(|g| rational::to_i64(&g.ceil())).collect();
    let mut fallback = None;
    for s in 0i64.. {
        let k: Vec<i64> = ceil.iter().zip(&interior).map(|(c, u)| c + s * u).collect();
        if admissible(&k) {
            fallback = Some(k);
            break;
        }
    }
    let fallback = fallback.expect("interior ray reaches γ + δ");
    let radius: i64 = fallback.iter().map(|x| x.abs()).sum();

    let mut best = fallback;
    'search: for r in 0..=radius {
        for k in l1_sphere(n, r) {
            if admissible(&k) {
                best = k;
                break 'search;
            }
        }
    }
    GammaParameter {
        gamma: gamma
            .gamma
            .iter()
            .zip(&best)
            .map(|(g, &k)| g - rational::int(k))
            .collect(),
    }
}

/// Integer vectors of L1 norm exactly `r`, in lexicographic order.
fn l1_sphere(n: usize, r: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, r: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 0 {
            if r == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if n == 1 {
            let mut vals = vec![-r, r];
            vals.dedup();
            for v in vals {
                prefix.push(v);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for v in -r..=r {
            prefix.push(v);
            rec(n - 1, r - v.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, &mut Vec::new(), &mut out);
    out
}

/// Lattice points w of δ with M·ρ(w) ≤ `max_degree`, bucketed by degree.
pub fn lattice_points_by_degree(
    p: &PolytopeAtInfinity,
    max_degree: i64,
) -> BTreeMap<i64, Vec<LatticeVector>> {
    let mut out: BTreeMap<i64, Vec<LatticeVector>> = BTreeMap::new();
    let m = p.gauge_denominator;
    let (lo, hi) = p.bounding_box();
    let lo: Vec<i64> = lo.iter().map(|&x| Integer::div_floor(&(x * max_degree), &m)).collect();
    let hi: Vec<i64> = hi.iter().map(|&x| Integer::div_ceil(&(x * max_degree), &m)).collect();
    for w in box_points(&lo, &hi) {
        if let Ok(d) = p.degree(&w) {
            if d <= max_degree {
                out.entry(d).or_default().push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn gauss() -> ExponentMatrix {
        validate_matrix(&[vec![1, 1, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let a = validate_matrix(&[vec![1]]).unwrap();
        assert_eq!((a.n(), a.num_columns()), (1, 1));
        assert_eq!(gauss().n(), 3);
        assert_eq!(
            validate_matrix(&[vec![1, 2], vec![2, 4]]),
            Err(GkzError::RankDeficient {
                actual: 1,
                expected: 2
            })
        );
        assert!(matches!(
            validate_matrix(&[vec![1, 2], vec![2]]),
            Err(GkzError::ShapeMismatch(_))
        ));
        assert!(matches!(validate_matrix(&[]), Err(GkzError::ShapeMismatch(_))));
    }

    #[test]
    fn interval_hull() {
        let p = newton_polytope(&validate_matrix(&[vec![1, 2]]).unwrap());
        let facets: Vec<(Vec<i64>, i64)> =
            p.facets().iter().map(|f| (f.normal.0.clone(), f.level)).collect();
        assert_eq!(facets, vec![(vec![-1], 0), (vec![1], 2)]);
        assert_eq!(p.vertices(), &[LatticeVector::from([0]), LatticeVector::from([2])]);
        assert_eq!(p.gauge_denominator(), 2);
        assert_eq!(p.normalized_volume(), 2);
        assert_eq!(p.gauge(&[1]).unwrap(), ratio(1, 2));
        assert_eq!(p.f_vector(), vec![2]);
    }

    #[test]
    fn symmetric_interval() {
        let p = newton_polytope(&validate_matrix(&[vec![-1, 1]]).unwrap());
        assert!(p.origin_is_interior());
        assert_eq!(p.normalized_volume(), 2);
        let i0: Vec<_> = p
            .resolution_faces(0)
            .into_iter()
            .map(|f| p.face(f).vertices[0].clone())
            .collect();
        assert_eq!(i0, vec![LatticeVector::from([-1]), LatticeVector::from([1])]);
    }

    #[test]
    fn gauss_pyramid() {
        let p = newton_polytope(&gauss());
        assert_eq!(p.f_vector(), vec![5, 8, 5]);
        assert_eq!(p.normalized_volume(), 2);
        assert_eq!(p.gauge_denominator(), 1);
        assert_eq!(p.gauge(&[2, 1, 0]).unwrap(), int(2));
        assert_eq!(p.resolution_faces(2).len(), 1);
        assert!(p.resolution_faces(1).is_empty());
        assert!(p.resolution_faces(0).is_empty());
        assert!(matches!(p.gauge(&[0, 1, 0]), Err(GkzError::NotInCone(_))));
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        for rows in [
            vec![vec![1, 1, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]],
            vec![vec![1, 0, -1, 2], vec![0, 1, -1, 1]],
            vec![vec![1, 0, 0, -1], vec![0, 1, 0, -1], vec![0, 0, 1, -1]],
        ] {
            let p = newton_polytope(&validate_matrix(&rows).unwrap());
            for f in p.faces() {
                let mut acc: BTreeMap<usize, i32> = BTreeMap::new();
                for &(g, s) in &f.boundary {
                    for &(h, t) in &p.face(g).boundary {
                        *acc.entry(h).or_default() += s * t;
                    }
                }
                assert!(acc.values().all(|&v| v == 0), "∂∂ ≠ 0 on face {}", f.id);
            }
        }
    }

    #[test]
    fn cone_examples() {
        let d = cone_delta(&validate_matrix(&[vec![2]]).unwrap());
        assert_eq!(d.facet_normals, vec![LatticeVector::from([1])]);
        let d = cone_delta(&validate_matrix(&[vec![-1, 1]]).unwrap());
        assert!(d.facet_normals.is_empty());
        let d = cone_delta(&gauss());
        let expect: BTreeSet<LatticeVector> = [[0, 1, 0], [1, -1, 0], [0, 0, 1], [1, 0, -1]]
            .into_iter()
            .map(LatticeVector::from)
            .collect();
        assert_eq!(d.facet_normals.iter().cloned().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn gamma_normalization_examples() {
        let gauss_delta = cone_delta(&gauss());
        let g = normalize_gamma(&GammaParameter::zero(3), &gauss_delta);
        assert_eq!(g, GammaParameter::zero(3));

        let ray = cone_delta(&validate_matrix(&[vec![1]]).unwrap());
        let g = normalize_gamma(&GammaParameter::new(vec![int(3)]), &ray);
        assert_eq!(g.gamma, vec![int(0)]);

        let line = cone_delta(&validate_matrix(&[vec![-1, 1]]).unwrap());
        let g = normalize_gamma(&GammaParameter::new(vec![ratio(5, 2)]), &line);
        assert_eq!(g.gamma, vec![ratio(5, 2)]);
    }

    #[test]
    fn l1_sphere_counts() {
        assert_eq!(l1_sphere(2, 0), vec![vec![0, 0]]);
        assert_eq!(l1_sphere(2, 1).len(), 4);
        assert_eq!(l1_sphere(3, 2).len(), 18);
        assert_eq!(l1_sphere(1, 3), vec![vec![-3], vec![3]]);
    }
}
