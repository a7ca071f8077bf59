//! Problem files, the full analysis pipeline and the focused subcommands.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::derham::{connection_matrices, h_top_dimension};
use crate::error::{GkzError, Result};
use crate::geometry::{
    cone_delta, newton_polytope, normalize_gamma, validate_matrix, ExponentMatrix, GammaParameter,
    PolytopeAtInfinity, PolytopeSummary,
};
use crate::gkz::{euler_operators, lattice_kernel};
use crate::homology::{
    build_face_complex, check_face_complex_exactness, kouchnirenko_unchecked, poincare_identity_from,
    FaceComplexReport, KouchnirenkoResult, PoincareCheck,
};
use crate::lattice::LatticeVector;
use crate::nondegeneracy::{is_nondegenerate, NondegeneracyReport};
use crate::rational::{self, Q};

pub const DEFAULT_WEIGHT_BOUND: i64 = 6;

pub const SUBCOMMANDS: [&str; 8] = [
    "volume",
    "faces",
    "nondegenerate",
    "koszul",
    "derham",
    "gkz-ops",
    "poincare",
    "face-complex",
];

/// A rational written as `"p/q"`, `"p"` or a bare JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Integer(i64),
    Text(String),
}

impl RationalText {
    pub fn parse(&self) -> Result<Q> {
        match self {
            RationalText::Integer(n) => Ok(rational::int(*n)),
            RationalText::Text(s) => rational::parse(s),
        }
    }
}

impl From<&Q> for RationalText {
    fn from(q: &Q) -> Self {
        RationalText::Text(rational::format(q))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    /// Overrides the certified Koszul truncation degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i64>,
    /// Largest M·ρ(w) checked by the face-complex exactness test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_bound: Option<i64>,
    /// Use γ exactly as given instead of its normalized representative.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub keep_gamma: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skip_face_complex: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Vec<RationalText>>,
    #[serde(default)]
    pub options: SpecOptions,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GkzError::InvalidInput(e.to_string()))
    }
}

/// A failure tagged with the pipeline stage it happened in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineError {
    pub stage: &'static str,
    pub error: GkzError,
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self.error {
            GkzError::DegenerateFiber { .. } => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.error.kind(),
                "stage": self.stage,
                "message": self.error.to_string(),
            }
        })
    }
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (stage {})", self.error, self.stage)
    }
}

impl std::error::Error for PipelineError {}

trait AtStage<T> {
    fn at(self, stage: &'static str) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: &'static str) -> std::result::Result<T, PipelineError> {
        self.map_err(|error| PipelineError { stage, error })
    }
}

/// Validated inputs shared by every stage.
pub struct Problem {
    pub spec: ProblemSpec,
    pub matrix: ExponentMatrix,
    pub polytope: PolytopeAtInfinity,
    pub gamma: Vec<Q>,
    pub fiber: Vec<Q>,
}

fn parse_all(v: &[RationalText]) -> Result<Vec<Q>> {
    v.iter().map(RationalText::parse).collect()
}

impl Problem {
    pub fn new(spec: ProblemSpec) -> std::result::Result<Self, PipelineError> {
        let matrix = validate_matrix(&spec.matrix).at("validate")?;
        let n = matrix.n();
        let big_n = matrix.num_columns();
        let gamma = match &spec.gamma {
            Some(g) => parse_all(g).at("validate")?,
            None => vec![Q::from_integer(0.into()); n],
        };
        // Without a fiber the point (1, 2, …, N) is used; it is certified below
        // like any other.
        let fiber = match &spec.fiber {
            Some(a) => parse_all(a).at("validate")?,
            None => (1..=big_n as i64).map(rational::int).collect(),
        };
        if gamma.len() != n {
            return Err(GkzError::ShapeMismatch(format!("gamma has {} entries, expected {n}", gamma.len())))
                .at("validate");
        }
        if fiber.len() != big_n {
            return Err(GkzError::ShapeMismatch(format!(
                "fiber has {} entries, expected {big_n}",
                fiber.len()
            )))
            .at("validate");
        }
        let polytope = newton_polytope(&matrix);
        Ok(Problem {
            spec,
            matrix,
            polytope,
            gamma,
            fiber,
        })
    }

    /// The spec with defaults filled in, as echoed by reports.
    pub fn resolved_spec(&self) -> ProblemSpec {
        ProblemSpec {
            matrix: self.spec.matrix.clone(),
            gamma: Some(self.gamma.iter().map(RationalText::from).collect()),
            fiber: Some(self.fiber.iter().map(RationalText::from).collect()),
            options: self.spec.options.clone(),
        }
    }

    pub fn normalized_gamma(&self) -> Vec<Q> {
        let delta = cone_delta(&self.matrix);
        normalize_gamma(&GammaParameter::new(self.gamma.clone()), &delta).gamma
    }

    /// γ used by the de Rham stage.
    pub fn working_gamma(&self) -> Vec<Q> {
        if self.spec.options.keep_gamma {
            self.gamma.clone()
        } else {
            self.normalized_gamma()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulSection {
    pub vanishing: bool,
    pub top_dim: usize,
    pub equals_volume: bool,
    pub truncation: i64,
    /// dim H^n per internal degree 0..=truncation.
    pub top_dims: Vec<usize>,
    /// Σ over degrees of dim H^q, q = 0..=n.
    pub totals: Vec<usize>,
    pub monomial_basis: Vec<LatticeVector>,
}

impl KoszulSection {
    fn from(k: &KouchnirenkoResult) -> Self {
        let tops = k.top_dims();
        KoszulSection {
            vanishing: k.vanishing,
            top_dim: k.top_dim,
            equals_volume: k.equals_volume,
            truncation: k.truncation,
            top_dims: (0..=k.truncation).map(|d| tops.get(&d).copied().unwrap_or(0)).collect(),
            totals: k.cohomology.totals.clone(),
            monomial_basis: k.monomial_basis.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeRhamSection {
    pub dimension: usize,
    pub truncation: i64,
    pub basis_independent: bool,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub gamma: Vec<Q>,
    pub basis: Vec<LatticeVector>,
    /// One matrix per column of A.
    pub connection_matrices: Vec<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorEntry {
    pub text: String,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GkzSection {
    pub euler: Vec<OperatorEntry>,
    pub box_operators: Vec<OperatorEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub spec: ProblemSpec,
    pub status: &'static str,
    pub polytope: PolytopeSummary,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub gamma_normalized: Vec<Q>,
    pub gamma_was_normalized: bool,
    pub nondegeneracy: NondegeneracyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub koszul: Option<KoszulSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poincare: Option<PoincareCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face_complex: Option<FaceComplexReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub de_rham: Option<DeRhamSection>,
    /// Whether volume, Koszul top dimension and de Rham dimension agree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks_agree: Option<bool>,
    pub gkz: GkzSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RankReport {
    pub fn exit_code(&self) -> i32 {
        if self.status == "degenerate" {
            2
        } else {
            0
        }
    }
}

struct Clock {
    enabled: bool,
    laps: BTreeMap<String, f64>,
    last: Instant,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock {
            enabled,
            laps: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.laps
            .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.laps)
    }
}

fn gkz_section(problem: &Problem) -> Result<GkzSection> {
    let euler = euler_operators(&problem.matrix, &problem.gamma)?
        .into_iter()
        .map(|e| OperatorEntry {
            text: e.render(),
            coefficients: e
                .row_weights
                .iter()
                .map(|w| w.to_string())
                .chain([rational::format(&e.gamma_shift)])
                .collect(),
        })
        .collect();
    let box_operators = lattice_kernel(&problem.matrix)
        .into_iter()
        .map(|b| OperatorEntry {
            text: b.render(),
            coefficients: b.lambda.iter().map(|x| x.to_string()).collect(),
        })
        .collect();
    Ok(GkzSection { euler, box_operators })
}

fn koszul_stage(problem: &Problem) -> Result<KouchnirenkoResult> {
    kouchnirenko_unchecked(&problem.polytope, &problem.fiber, problem.spec.options.truncation)
}

fn derham_stage(problem: &Problem) -> Result<DeRhamSection> {
    let gamma = problem.working_gamma();
    let top = h_top_dimension(&gamma, &problem.fiber, &problem.polytope)?;
    let matrices = connection_matrices(&top.basis, &problem.polytope)?;
    Ok(DeRhamSection {
        dimension: top.dimension,
        truncation: top.truncation,
        basis_independent: top.basis_independent,
        gamma,
        basis: top.basis.basis().to_vec(),
        connection_matrices: matrices
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(rational::format).collect()).collect())
            .collect(),
        warnings: top.warnings,
    })
}

/// validate → polytope → normalize γ → nondegeneracy → Koszul → Poincaré →
/// face complex → de Rham → operators. A degenerate fiber skips the
/// cohomology stages and yields exit code 2.
pub fn run_analyze(spec: ProblemSpec, timings: bool) -> std::result::Result<RankReport, PipelineError> {
    let mut clock = Clock::new(timings);
    let problem = Problem::new(spec)?;
    let p = &problem.polytope;
    clock.lap("polytope");
    let gamma_normalized = problem.normalized_gamma();
    clock.lap("normalize_gamma");
    let nondegeneracy = is_nondegenerate(p, &problem.fiber).at("nondegeneracy")?;
    clock.lap("nondegeneracy");

    let (mut koszul, mut poincare, mut face_complex, mut de_rham, mut ranks_agree) = (None, None, None, None, None);
    if nondegeneracy.overall {
        let k = koszul_stage(&problem).at("koszul")?;
        clock.lap("koszul");
        poincare = Some(poincare_identity_from(p, &k).at("poincare")?);
        clock.lap("poincare");
        if !problem.spec.options.skip_face_complex {
            let bound = problem.spec.options.weight_bound.unwrap_or(DEFAULT_WEIGHT_BOUND);
            face_complex = Some(check_face_complex_exactness(p, bound));
            clock.lap("face_complex");
        }
        let d = derham_stage(&problem).at("derham")?;
        clock.lap("derham");
        ranks_agree = Some(k.top_dim == d.dimension && d.dimension as u64 == p.normalized_volume());
        koszul = Some(KoszulSection::from(&k));
        de_rham = Some(d);
    }
    let gkz = gkz_section(&problem).at("gkz")?;
    clock.lap("gkz");
    Ok(RankReport {
        spec: problem.resolved_spec(),
        status: if nondegeneracy.overall { "nondegenerate" } else { "degenerate" },
        polytope: p.summary(),
        gamma_was_normalized: gamma_normalized == problem.gamma,
        gamma_normalized,
        nondegeneracy,
        koszul,
        poincare,
        face_complex,
        de_rham,
        ranks_agree,
        gkz,
        timings_ms: clock.finish(),
    })
}

/// Result of a focused subcommand: a JSON document and the exit code.
pub struct SubcommandOutput {
    pub value: Value,
    pub exit_code: i32,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Runs only the prefix of the pipeline that `name` needs.
pub fn run_subcommand(name: &str, spec: ProblemSpec) -> std::result::Result<SubcommandOutput, PipelineError> {
    if !SUBCOMMANDS.contains(&name) {
        return Err(GkzError::UnknownSubcommand(name.to_string())).at("dispatch");
    }
    let problem = Problem::new(spec)?;
    let p = &problem.polytope;
    let ok = |value| Ok(SubcommandOutput { value, exit_code: 0 });
    match name {
        "volume" => ok(json!({
            "normalized_volume": p.normalized_volume(),
            "gauge_denominator": p.gauge_denominator(),
        })),
        "faces" => {
            let resolution: BTreeMap<String, Vec<usize>> = (0..p.n())
                .map(|k| (format!("I_{k}"), p.resolution_faces(k)))
                .collect();
            ok(json!({
                "f_vector": p.f_vector(),
                "full_face": p.full_face(),
                "origin_interior": p.origin_is_interior(),
                "faces": to_value(&p.faces()),
                "resolution_faces": resolution,
            }))
        }
        "nondegenerate" => {
            let r = is_nondegenerate(p, &problem.fiber).at("nondegeneracy")?;
            Ok(SubcommandOutput {
                exit_code: if r.overall { 0 } else { 2 },
                value: to_value(&r),
            })
        }
        "koszul" | "poincare" => {
            let r = is_nondegenerate(p, &problem.fiber).at("nondegeneracy")?;
            if !r.overall {
                return Err(GkzError::DegenerateFiber {
                    faces: r.failing_faces(),
                })
                .at("nondegeneracy");
            }
            let k = koszul_stage(&problem).at("koszul")?;
            if name == "koszul" {
                ok(to_value(&KoszulSection::from(&k)))
            } else {
                ok(to_value(&poincare_identity_from(p, &k).at("poincare")?))
            }
        }
        "derham" => ok(to_value(&derham_stage(&problem).at("derham")?)),
        "gkz-ops" => ok(to_value(&gkz_section(&problem).at("gkz")?)),
        "face-complex" => {
            let bound = problem.spec.options.weight_bound.unwrap_or(DEFAULT_WEIGHT_BOUND);
            let complex = build_face_complex(p);
            let report = check_face_complex_exactness(p, bound);
            Ok(SubcommandOutput {
                exit_code: if report.passed { 0 } else { 1 },
                value: json!({ "complex": to_value(&complex), "exactness": to_value(&report) }),
            })
        }
        _ => unreachable!("checked against SUBCOMMANDS"),
    }
}
