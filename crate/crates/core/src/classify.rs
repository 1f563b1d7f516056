//! The decision procedure: closure, class, hypotheses, geometry, then the branch
//! recognizer. The resulting report carries the evidence needed to re-check it.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::cotriangular::{classify_cotriangular, recover_symplectic, CotriangularKind, SymplecticRecovery, TriangularModel};
use crate::f4::F4Matrix;
use crate::families::{gl4_order, gu2_order, omega2_order, sl2_order, sp2_order, CaseTag};
use crate::forms::{QuadraticForm, Sign, SymplecticForm};
use crate::geometry::{build_geometry, GeometryCensus};
use crate::gf2::{BitMatrix, BitVector, Subspace};
use crate::group::{
    build_class, check_hypotheses, closure, is_class_candidate, is_transvection, ClassD, ClassOptions,
    GroupClosure, GroupError, HypothesisReport, MatrixGroup, DEFAULT_CLOSURE_CAP,
};
use crate::spread::{absolute_points, find_spreads, recover_f4, recover_hermitian, F4Structure, SpreadCensus};

/// Version of the report layout.
pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("class orbit exceeded cap of {cap} elements")]
    ClassCap { cap: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl ClassifyError {
    /// Process exit code: 2 for exceeded caps, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ClassifyError::ClassCap { .. } => 2,
            _ => 3,
        }
    }
}

fn invariant(msg: impl Into<String>) -> ClassifyError {
    ClassifyError::Invariant(msg.into())
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// Largest group closure to enumerate; beyond it the class is certified by its size.
    pub max_closure: usize,
    /// Largest class orbit to build.
    pub max_class: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            max_closure: DEFAULT_CLOSURE_CAP,
            max_class: DEFAULT_CLOSURE_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// `D` and `D^-1` are all order-3 elements of `G` with 2-dimensional commutator.
    Class,
    /// `G` has further such elements outside `D` and `D^-1`.
    ExtendedScope,
    /// `G` was not enumerated.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticEvidence {
    pub recovery: SymplecticRecovery,
    /// `P` with `P G P^T` the standard hyperbolic Gram matrix.
    pub congruence: Option<BitMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularEvidence {
    pub model: TriangularModel,
    /// How the quotient flag was inferred.
    pub inference: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransvectionEvidence {
    pub transvection: BitMatrix,
    /// Two class elements whose product (or product with the second inverted) is the
    /// transvection, when such a pair was found.
    pub factors: Option<(BitMatrix, BitMatrix, bool)>,
    /// Dimension of the span of the axes of the conjugates, as functionals.
    pub axis_span_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermitianEvidence {
    pub gram: F4Matrix,
    pub absolute_points: usize,
    pub normalization: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub symplectic: Option<SymplecticEvidence>,
    pub quadratic: Option<QuadraticForm>,
    pub triangular: Option<TriangularEvidence>,
    pub transvection: Option<TransvectionEvidence>,
    pub f4: Option<F4Structure>,
    pub hermitian: Option<HermitianEvidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub format: u32,
    pub dimension: usize,
    pub generator_count: usize,
    pub seed: BitMatrix,
    /// `|G|` when the closure was enumerated.
    pub group_order: Option<u128>,
    pub class_size: usize,
    pub scope: Scope,
    pub hypotheses: HypothesisReport,
    pub geometry: Option<GeometryCensus>,
    pub spreads: Option<SpreadCensus>,
    pub branch: Option<CaseTag>,
    pub all_verified_branches: Vec<CaseTag>,
    pub group_name: Option<String>,
    pub expected_order: Option<u128>,
    pub evidence: Evidence,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    /// 0 when a branch was claimed, 1 when the hypotheses failed.
    pub fn exit_code(&self) -> i32 {
        if self.branch.is_some() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dimension      {}", self.dimension);
        let order = self.group_order.map_or("not enumerated".to_string(), |o| o.to_string());
        let _ = writeln!(out, "group order    {order}");
        let _ = writeln!(out, "class size     {}", self.class_size);
        let h = &self.hypotheses;
        let _ = writeln!(
            out,
            "hypotheses     [V,G]=V {}  C_V(G)=0 {}  transitive {}  generated {}",
            h.commutator_is_whole_space,
            h.fixed_space_trivial,
            h.transitive_on_lines,
            h.generated_by_class.map_or("?".to_string(), |b| b.to_string())
        );
        if let Some(g) = &self.geometry {
            let _ = writeln!(
                out,
                "geometry       {} points, {} lines, {} projective / {} dual affine planes, diameter {}",
                g.points, g.lines, g.projective_planes, g.dual_affine_planes, g.diameter
            );
        }
        if let Some(s) = &self.spreads {
            let _ = writeln!(
                out,
                "spreads        {} full, {} tangent, {} hyperbolic, {} singular; {} singular lines",
                s.full, s.tangent, s.hyperbolic, s.singular, s.singular_lines
            );
        }
        match self.branch {
            Some(tag) => {
                let _ = writeln!(out, "branch         {tag}");
                let all: Vec<String> = self.all_verified_branches.iter().map(|t| t.letter().to_string()).collect();
                let _ = writeln!(out, "verified       {}", all.join(", "));
                let name = self.group_name.as_deref().unwrap_or("?");
                let expected = self.expected_order.map_or("?".to_string(), |o| o.to_string());
                let _ = writeln!(out, "group          {name} (order {expected})");
            }
            None => {
                let _ = writeln!(out, "branch         none: hypotheses fail");
            }
        }
        if self.scope == Scope::ExtendedScope {
            let _ = writeln!(out, "scope          extended-scope");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning        {w}");
        }
        out
    }
}

/// The branch-specific outcome of recognition.
struct Recognized {
    branch: CaseTag,
    verified: Vec<CaseTag>,
    name: String,
    order: u128,
    /// Size of `D` the identified group must have.
    class_size: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Name and order of the group for a cotriangular outcome.
pub fn identify_cotriangular(kind: CotriangularKind, dim: usize) -> (CaseTag, String, u128) {
    match kind {
        CotriangularKind::Symplectic => (CaseTag::Symplectic, format!("Sp({dim},2)"), sp2_order(dim)),
        CotriangularKind::Orthogonal(sign) => {
            let s = if sign == Sign::Plus { "⁺" } else { "⁻" };
            (CaseTag::Orthogonal, format!("Ω{s}({dim},2)"), omega2_order(dim, sign))
        }
        CotriangularKind::Triangular { omega_size, .. } => {
            (CaseTag::Alternating, format!("Alt({omega_size})"), (3..=omega_size as u128).product())
        }
    }
}

/// `|D|` for the class of the identified group.
fn class_size_of(kind: CotriangularKind, dim: usize) -> u128 {
    let n = dim as u32;
    match kind {
        CotriangularKind::Symplectic => 2 * ((1u128 << n) - 1) * (1u128 << (n - 1)) / 6,
        CotriangularKind::Orthogonal(sign) => {
            let m = n / 2;
            let (ns, rest) = match sign {
                Sign::Plus => ((1u128 << (n - 1)) - (1 << (m - 1)), (1u128 << (n - 2)) - (1 << (m - 1))),
                Sign::Minus => ((1u128 << (n - 1)) + (1 << (m - 1)), (1u128 << (n - 2)) + (1 << (m - 1))),
            };
            2 * ns * rest / 6
        }
        CotriangularKind::Triangular { omega_size, .. } => 2 * binomial(omega_size as u128, 3),
    }
}

fn sl_class_size(n: usize) -> u128 {
    let n = n as u32;
    let two_spaces = ((1u128 << n) - 1) * ((1u128 << n) - 2) / 6;
    two_spaces * 4u128.pow(n - 2) * 2
}

/// Number of isotropic points of a nondegenerate Hermitian form on `F4^m`.
pub fn isotropic_point_count(m: usize) -> u128 {
    let sign = |k: usize| if k % 2 == 0 { 1i128 } else { -1 };
    (((1i128 << m) - sign(m)) * ((1i128 << (m - 1)) - sign(m - 1)) / 3) as u128
}

/// Transvections in `G`, found by scanning an enumerated closure.
fn scan_transvection(all: &GroupClosure) -> Option<BitMatrix> {
    all.iter().find(is_transvection)
}

/// Two class elements with the same fixed space whose lines meet in a point; one of
/// `d1 d2`, `d1 d2^-1` is then a transvection. Returns `(d1, d2, inverted, t)`.
pub fn construct_transvection(class: &ClassD) -> Option<(BitMatrix, BitMatrix, bool, BitMatrix)> {
    let mut by_fixed: FxHashMap<&Subspace, Vec<usize>> = FxHashMap::default();
    for i in 0..class.len() {
        by_fixed.entry(class.fixed_space_of(i)).or_default().push(i);
    }
    let lines = class.lines();
    for i in 0..class.len() {
        let li = &lines[class.line_of(i)];
        for &j in &by_fixed[class.fixed_space_of(i)] {
            if j <= i || li.meet(&lines[class.line_of(j)]).unwrap().dim() != 1 {
                continue;
            }
            let (d1, d2) = (&class.elements()[i], &class.elements()[j]);
            for inverted in [false, true] {
                let second = if inverted { d2 * d2 } else { d2.clone() };
                let t = d1 * &second;
                if is_transvection(&t) {
                    return Some((d1.clone(), d2.clone(), inverted, t));
                }
            }
        }
    }
    None
}

/// `phi` with `t = I + phi^T v`.
fn transvection_axis(t: &BitMatrix) -> BitVector {
    let n = t.rows();
    let m = t + &BitMatrix::identity(n);
    BitVector::from_bools(&(0..n).map(|i| !m.row(i).is_zero()).collect::<Vec<_>>())
}

/// Span of the orbit of the axis functional under `phi -> phi (g^-1)^T`.
fn axis_span(t: &BitMatrix, generators: &[BitMatrix]) -> Subspace {
    let n = t.rows();
    let maps: Vec<BitMatrix> = generators.iter().map(|g| g.inverse().expect("invertible").transpose()).collect();
    let start = transvection_axis(t);
    let mut seen = FxHashSet::from_iter([start.clone()]);
    let mut queue = vec![start];
    while let Some(phi) = queue.pop() {
        for m in &maps {
            let next = m.apply(&phi);
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    let mut all: Vec<BitVector> = seen.into_iter().collect();
    all.sort();
    Subspace::span(n, &all)
}

pub fn validate_generators(generators: &[BitMatrix], seed: &BitMatrix) -> Result<MatrixGroup, ClassifyError> {
    let group = MatrixGroup::new(generators.to_vec()).map_err(|e| ClassifyError::Input(e.to_string()))?;
    if seed.rows() != group.dim() || seed.cols() != group.dim() {
        return Err(ClassifyError::Input("seed dimension differs from the generators".into()));
    }
    if !is_class_candidate(seed) {
        return Err(ClassifyError::Input("seed is not an order-3 element with 2-dimensional commutator".into()));
    }
    Ok(group)
}

/// Closure, class and hypotheses; shared by `classify` and `census`.
struct Stages {
    group: MatrixGroup,
    all: Option<GroupClosure>,
    class: ClassD,
    hypotheses: HypothesisReport,
    scope: Scope,
    warnings: Vec<String>,
}

fn run_stages(generators: &[BitMatrix], seed: &BitMatrix, config: ClassifyConfig) -> Result<Stages, ClassifyError> {
    let group = validate_generators(generators, seed)?;
    let mut warnings = Vec::new();
    let all = match closure(generators, config.max_closure) {
        Ok(all) => Some(all),
        Err(GroupError::CapExceeded { cap, .. }) => {
            warnings.push(format!("closure exceeds {cap} elements; group order certified by class size"));
            None
        }
        Err(e) => return Err(ClassifyError::Input(e.to_string())),
    };
    let class = build_class(&group, seed, all.as_ref(), ClassOptions { cap: config.max_class }).map_err(|e| match e {
        GroupError::CapExceeded { cap, .. } => ClassifyError::ClassCap { cap },
        other => ClassifyError::Input(other.to_string()),
    })?;
    if all.as_ref().is_some_and(|a| !a.contains(seed)) {
        return Err(ClassifyError::Input("seed is not in the group".into()));
    }
    let scope = match &all {
        Some(a) => {
            let with_inverses = if class.inverse_closed() { class.len() } else { 2 * class.len() };
            if a.class_candidate_count() == with_inverses {
                Scope::Class
            } else {
                Scope::ExtendedScope
            }
        }
        None => Scope::Undecided,
    };
    let hypotheses = check_hypotheses(&group, &class);
    Ok(Stages {
        group,
        all,
        class,
        hypotheses,
        scope,
        warnings,
    })
}

/// Runs the full decision procedure on `G = <generators>` with `D` the class of `seed`.
pub fn classify(generators: &[BitMatrix], seed: &BitMatrix, config: ClassifyConfig) -> Result<ClassificationReport, ClassifyError> {
    let Stages {
        group,
        all,
        class,
        hypotheses,
        scope,
        mut warnings,
    } = run_stages(generators, seed, config)?;
    let n = group.dim();
    let mut report = ClassificationReport {
        format: REPORT_FORMAT,
        dimension: n,
        generator_count: generators.len(),
        seed: seed.clone(),
        group_order: all.as_ref().map(|a| a.order() as u128),
        class_size: class.len(),
        scope,
        hypotheses,
        geometry: None,
        spreads: None,
        branch: None,
        all_verified_branches: Vec::new(),
        group_name: None,
        expected_order: None,
        evidence: Evidence::default(),
        warnings: Vec::new(),
    };
    if !report.hypotheses.all_hold() {
        report.warnings = warnings;
        return Ok(report);
    }

    let geometry = build_geometry(&class);
    let recognized = if geometry.points().is_empty() {
        recognize_pointless(&group, &class, &mut report)?
    } else {
        let census = geometry.census().map_err(|e| invariant(e.to_string()))?;
        let bad = geometry.lines_with_bad_point_count();
        if !bad.is_empty() {
            return Err(invariant(format!("{} lines carry a number of points other than 0 or 3", bad.len())));
        }
        if census.components != 1 || census.diameter > 2 {
            return Err(invariant(format!(
                "collinearity graph has {} components and diameter {}",
                census.components, census.diameter
            )));
        }
        let (projective, dual_affine) = (census.projective_planes, census.dual_affine_planes);
        report.geometry = Some(census);
        match (projective > 0, dual_affine > 0) {
            (true, true) => return Err(invariant("projective and dual affine planes both occur")),
            (false, false) => return Err(invariant("no planes although points exist")),
            (true, false) => recognize_linear(&group, all.as_ref(), &class, &mut report)?,
            (false, true) => {
                if !geometry.cotriangular_violations().is_empty() {
                    return Err(invariant("geometry is not cotriangular"));
                }
                if !geometry.perp_radical().map_err(|e| invariant(e.to_string()))?.is_zero() {
                    return Err(invariant("cotriangular space is degenerate"));
                }
                let recovery = recover_symplectic(&geometry).map_err(|e| invariant(e.to_string()))?;
                let outcome = classify_cotriangular(&geometry, &recovery).map_err(|e| invariant(e.to_string()))?;
                let kind = outcome.chosen(n).ok_or_else(|| invariant("no cotriangular branch verifies"))?;
                let (branch, name, order) = identify_cotriangular(kind, n);
                let mut verified: Vec<CaseTag> = outcome.verified().into_iter().map(|k| identify_cotriangular(k, n).0).collect();
                verified.dedup();
                report.evidence.symplectic = Some(SymplecticEvidence {
                    congruence: recovery.form.hyperbolic_basis(),
                    recovery,
                });
                report.evidence.quadratic = outcome.quadratic.clone();
                if let Some(model) = outcome.triangular.clone() {
                    let inference = if model.quotiented {
                        format!("dim V = {} = |Ω| - 2: even-weight vectors modulo the all-one vector", n)
                    } else {
                        format!("dim V = {} = |Ω| - 1: even-weight vectors", n)
                    };
                    report.evidence.triangular = Some(TriangularEvidence { model, inference });
                }
                Recognized {
                    branch,
                    verified,
                    name,
                    order,
                    class_size: class_size_of(kind, n) as usize,
                }
            }
        }
    };

    match report.group_order {
        Some(order) if order != recognized.order => {
            return Err(invariant(format!(
                "group order {order} differs from |{}| = {}",
                recognized.name, recognized.order
            )))
        }
        _ => {}
    }
    if class.len() != recognized.class_size {
        return Err(invariant(format!(
            "class has {} elements, {} expects {}",
            class.len(),
            recognized.name,
            recognized.class_size
        )));
    }
    if report.scope == Scope::ExtendedScope {
        warnings.push("G has order-3 elements with 2-dimensional commutator outside D and its inverses".into());
    }
    report.branch = Some(recognized.branch);
    report.all_verified_branches = recognized.verified;
    report.group_name = Some(recognized.name);
    report.expected_order = Some(recognized.order);
    report.warnings = warnings;
    Ok(report)
}

/// All planes projective: transvection groups, `7:3` and `Alt(7)`.
fn recognize_linear(
    group: &MatrixGroup,
    all: Option<&GroupClosure>,
    class: &ClassD,
    report: &mut ClassificationReport,
) -> Result<Recognized, ClassifyError> {
    let n = group.dim();
    let constructed = construct_transvection(class);
    let transvection = match all {
        Some(a) => scan_transvection(a),
        None => constructed.as_ref().map(|c| c.3.clone()),
    };
    if let Some(t) = transvection {
        let span = axis_span(&t, group.generators());
        if span.dim() != n {
            return Err(invariant("transvection axes do not span the dual space"));
        }
        report.evidence.transvection = Some(TransvectionEvidence {
            transvection: t,
            factors: constructed.map(|(d1, d2, inv, _)| (d1, d2, inv)),
            axis_span_dim: span.dim(),
        });
        return Ok(Recognized {
            branch: CaseTag::TransvectionTV,
            verified: vec![CaseTag::TransvectionTV],
            name: format!("SL({n},2)"),
            order: sl2_order(n),
            class_size: sl_class_size(n) as usize,
        });
    }
    let order = report.group_order.ok_or_else(|| invariant("no transvection found and the group was not enumerated"))?;
    match n {
        3 => {
            // no involutions, and G is transitive on 7 lines while d fixes one
            if order % 2 == 0 || order % 7 != 0 {
                return Err(invariant(format!("order {order} is not odd and divisible by 7")));
            }
            Ok(Recognized {
                branch: CaseTag::Frobenius7_3,
                verified: vec![CaseTag::Frobenius7_3],
                name: "7:3".into(),
                order: 21,
                class_size: 7,
            })
        }
        4 => {
            // flag stabilizers have order at least 3 and there are 15 * 7 flags
            if order % 315 != 0 {
                return Err(invariant(format!("order {order} is not divisible by 315")));
            }
            Ok(Recognized {
                branch: CaseTag::Alt7InGl4,
                verified: vec![CaseTag::Alt7InGl4],
                name: "Alt(7)".into(),
                order: 2520,
                class_size: 280,
            })
        }
        _ => Err(invariant("projective geometry of dimension at least 5 without a transvection")),
    }
}

/// No points: reflection groups over `F4` and unitary groups.
fn recognize_pointless(group: &MatrixGroup, class: &ClassD, report: &mut ClassificationReport) -> Result<Recognized, ClassifyError> {
    let n = group.dim();
    let complex = find_spreads(class).map_err(|e| invariant(e.to_string()))?;
    let census = complex.census();
    report.spreads = Some(census);
    let lemmas = complex.lemma_report(class);
    if lemmas.total() != 0 {
        return Err(invariant(format!("spread lemmas fail: {lemmas:?}")));
    }
    if n % 2 != 0 {
        return Err(invariant("pointless geometry in odd dimension"));
    }
    let m = n / 2;
    let points = (4u128.pow(m as u32) - 1) / 3;
    if census.full > 0 {
        complex.check_projective(false).map_err(|e| invariant(e.to_string()))?;
        let f4 = recover_f4(group.generators(), complex.lines()).map_err(|e| invariant(e.to_string()))?;
        report.evidence.f4 = Some(f4);
        Ok(Recognized {
            branch: CaseTag::F4Reflection,
            verified: vec![CaseTag::F4Reflection],
            name: format!("GL({m},4)"),
            order: gl4_order(m),
            class_size: (points * 4u128.pow(m as u32 - 1)) as usize,
        })
    } else if census.singular_lines > 0 {
        complex.check_projective(true).map_err(|e| invariant(e.to_string()))?;
        let lines: Vec<Subspace> = complex.lines().iter().chain(complex.singular_lines()).cloned().collect();
        let f4 = recover_f4(group.generators(), &lines).map_err(|e| invariant(e.to_string()))?;
        let model = recover_hermitian(&f4, class, &complex).map_err(|e| invariant(e.to_string()))?;
        if !group.generators().iter().all(|g| model.is_invariant_under(g)) {
            return Err(invariant("recovered Hermitian form is not invariant"));
        }
        if model.absolute_points != complex.singular_lines() {
            return Err(invariant("absolute points differ from the singular lines"));
        }
        report.evidence.f4 = Some(f4);
        report.evidence.hermitian = Some(HermitianEvidence {
            absolute_points: model.absolute_points.len(),
            gram: model.gram,
            normalization: "the polarity equations have a single nonzero solution; no scaling is chosen".into(),
        });
        Ok(Recognized {
            branch: CaseTag::F4Unitary,
            verified: vec![CaseTag::F4Unitary],
            name: format!("GU({m},2)"),
            order: gu2_order(m),
            class_size: (points - isotropic_point_count(m)) as usize,
        })
    } else {
        Err(invariant("pointless geometry with neither full spreads nor singular lines"))
    }
}

/// Geometry and spread statistics without recognition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub dimension: usize,
    pub group_order: Option<u128>,
    pub class_size: usize,
    pub hypotheses: HypothesisReport,
    pub geometry: Option<GeometryCensus>,
    pub spreads: Option<SpreadCensus>,
    pub warnings: Vec<String>,
}

pub fn census(generators: &[BitMatrix], seed: &BitMatrix, config: ClassifyConfig) -> Result<CensusReport, ClassifyError> {
    let stages = run_stages(generators, seed, config)?;
    let geometry = build_geometry(&stages.class);
    let (geometry_census, spreads) = if geometry.points().is_empty() {
        let complex = find_spreads(&stages.class).map_err(|e| invariant(e.to_string()))?;
        (None, Some(complex.census()))
    } else {
        (Some(geometry.census().map_err(|e| invariant(e.to_string()))?), None)
    };
    Ok(CensusReport {
        dimension: stages.group.dim(),
        group_order: stages.all.as_ref().map(|a| a.order() as u128),
        class_size: stages.class.len(),
        hypotheses: stages.hypotheses,
        geometry: geometry_census,
        spreads,
        warnings: stages.warnings,
    })
}

/// One re-check performed by [`verify_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(findings: &[Finding]) -> bool {
    findings.iter().all(|f| f.passed)
}

/// Re-checks every claim and evidence item of a report against the generators.
/// Evidence is tied to the basis of the generators the report was made from.
pub fn verify_report(report: &ClassificationReport, generators: &[BitMatrix]) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        out.push(Finding {
            check: name.to_string(),
            passed,
            detail,
        })
    };
    let group = match validate_generators(generators, &report.seed) {
        Ok(g) if g.dim() == report.dimension => {
            check("input", true, format!("{} generators of dimension {}", generators.len(), g.dim()));
            g
        }
        Ok(g) => {
            check("input", false, format!("generators have dimension {}, report says {}", g.dim(), report.dimension));
            return out;
        }
        Err(e) => {
            check("input", false, e.to_string());
            return out;
        }
    };
    if generators.len() != report.generator_count {
        check("input", false, format!("{} generators, report says {}", generators.len(), report.generator_count));
    }

    let all = match report.group_order {
        Some(order) => match closure(generators, (order as usize).saturating_add(1)) {
            Ok(a) => {
                check("group-order", a.order() as u128 == order, format!("closure has {} elements, report says {order}", a.order()));
                Some(a)
            }
            Err(e) => {
                check("group-order", false, e.to_string());
                None
            }
        },
        None => None,
    };
    let class = match build_class(&group, &report.seed, all.as_ref(), ClassOptions { cap: report.class_size.saturating_add(1) }) {
        Ok(c) => {
            check("class-size", c.len() == report.class_size, format!("orbit has {} elements, report says {}", c.len(), report.class_size));
            c
        }
        Err(e) => {
            check("class-size", false, e.to_string());
            return out;
        }
    };
    let hypotheses = check_hypotheses(&group, &class);
    check("hypotheses", hypotheses == report.hypotheses, "recomputed hypothesis flags".into());
    if let (Some(order), Some(expected)) = (report.group_order, report.expected_order) {
        check("expected-order", order == expected, format!("|G| = {order}, identified group has order {expected}"));
    }

    let ev = &report.evidence;
    match report.branch {
        None => check(
            "no-branch",
            !report.hypotheses.all_hold() && report.all_verified_branches.is_empty(),
            "a report without a branch must record failed hypotheses".into(),
        ),
        Some(tag) => {
            check("branch-listed", report.all_verified_branches.contains(&tag), format!("{tag} among verified branches"));
            check("hypotheses-hold", report.hypotheses.all_hold(), "a branch needs the hypotheses".into());
            let present = match tag {
                CaseTag::TransvectionTV => ev.transvection.is_some(),
                CaseTag::Frobenius7_3 | CaseTag::Alt7InGl4 => report.group_order.is_some(),
                CaseTag::Symplectic => ev.symplectic.is_some(),
                CaseTag::Orthogonal => ev.quadratic.is_some(),
                CaseTag::Alternating => ev.triangular.is_some(),
                CaseTag::F4Reflection => ev.f4.is_some(),
                CaseTag::F4Unitary => ev.f4.is_some() && ev.hermitian.is_some(),
            };
            check("branch-evidence", present, format!("evidence for {tag}"));
        }
    }

    let gens = group.generators();
    if let Some(s) = &ev.symplectic {
        let form = &s.recovery.form;
        check("symplectic-invariance", gens.iter().all(|g| form.is_invariant_under(g)), "f(ug, vg) = f(u, v)".into());
        check("symplectic-witness", s.recovery.witness_holds(), "form on the point basis equals the collinearity Gram matrix".into());
        let collinear = collinearity_matches(&class, &s.recovery);
        check("symplectic-collinearity", collinear, "basis points are collinear exactly where the Gram matrix is 1".into());
        if let Some(p) = &s.congruence {
            let standard = SymplecticForm::standard(report.dimension);
            check(
                "symplectic-congruence",
                p.is_invertible() && form.in_basis(p) == *standard.gram(),
                "P G P^T is the standard hyperbolic form".into(),
            );
        }
    }
    if let Some(q) = &ev.quadratic {
        check("quadratic-invariance", gens.iter().all(|g| q.is_invariant_under(g)), "Q(vg) = Q(v)".into());
        check("quadratic-radical", q.radical().is_zero(), "Rad(Q) = 0".into());
        if let Some(s) = &ev.symplectic {
            check("quadratic-polar", q.bilinear() == &s.recovery.form, "polar form of Q is the recovered f".into());
        }
    }
    if let Some(t) = &ev.triangular {
        check("triangular-model", triangular_holds(&t.model, gens, report.dimension), "pair vectors are distinct, span V and are permuted by G".into());
    }
    if let Some(t) = &ev.transvection {
        let m = &t.transvection;
        let shape = m.rows() == report.dimension && is_transvection(m);
        check("transvection", shape, "order 2 with 1-dimensional commutator".into());
        let member = match (&all, &t.factors) {
            (Some(a), _) => a.contains(m),
            (None, Some((d1, d2, inv))) => {
                let second = if *inv { d2 * d2 } else { d2.clone() };
                class.contains(d1) && class.contains(d2) && &(d1 * &second) == m
            }
            (None, None) => false,
        };
        check("transvection-in-group", member, "the transvection lies in G".into());
        if shape {
            let span = axis_span(m, gens);
            check("transvection-axes", span.dim() == t.axis_span_dim && span.dim() == report.dimension, "axes span V*".into());
        }
    }
    if let Some(f4) = &ev.f4 {
        check("f4-field", f4.j_operator.rows() == report.dimension && f4.is_field_action(), "J^2 + J + I = 0".into());
        check("f4-commutes", gens.iter().all(|g| f4.commutes_with(g)), "J commutes with every generator".into());
        check("f4-lines", class.lines().iter().all(|l| f4.preserves(l)), "J maps every class line to itself".into());
    }
    if let (Some(h), Some(f4)) = (&ev.hermitian, &ev.f4) {
        let gram = &h.gram;
        let sized = 2 * gram.dim() == report.dimension;
        check("hermitian-symmetry", sized && gram.is_hermitian(), "h(y, x) = h(x, y)^2".into());
        let invariant = sized && gens.iter().all(|g| f4.to_f4(g).is_some_and(|m| m.mul(gram).mul(&m.conj_transpose()) == *gram));
        check("hermitian-invariance", invariant, "M H M* = H for every generator".into());
        if sized && f4.is_field_action() {
            let absolute = absolute_points(f4, gram);
            check(
                "hermitian-absolute",
                absolute.len() == h.absolute_points && class.lines().iter().all(|l| absolute.binary_search(l).is_err()),
                format!("{} absolute points, none on a class line", absolute.len()),
            );
        }
    }
    out
}

fn collinearity_matches(class: &ClassD, recovery: &SymplecticRecovery) -> bool {
    let basis = recovery.point_basis.row_vectors();
    let on_line = |p: &BitVector, q: &BitVector| {
        let span = Subspace::span(p.len(), &[p.clone(), q.clone()]);
        span.dim() == 2 && class.lines().binary_search(&span).is_ok()
    };
    let is_point = |p: &BitVector| class.lines().iter().filter(|l| l.contains(p)).count() >= 2;
    basis.iter().all(is_point)
        && basis.iter().enumerate().all(|(i, p)| {
            basis
                .iter()
                .enumerate()
                .all(|(j, q)| i == j || on_line(p, q) == recovery.basis_gram.get(i, j))
        })
}

fn triangular_holds(model: &TriangularModel, generators: &[BitMatrix], dim: usize) -> bool {
    let omega = model.omega_size;
    if model.index_vectors.len() + 1 != omega || model.index_vectors.iter().any(|v| v.len() != dim) {
        return false;
    }
    let mut points = Vec::new();
    for a in 0..omega {
        for b in a + 1..omega {
            points.push(model.vector_of(a, b));
        }
    }
    let set: FxHashSet<&BitVector> = points.iter().collect();
    set.len() == omega * (omega - 1) / 2
        && !points.iter().any(BitVector::is_zero)
        && Subspace::span(dim, &points).dim() == dim
        && generators.iter().all(|g| points.iter().all(|p| set.contains(&g.apply(p))))
}
