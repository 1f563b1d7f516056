//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, details indented below.
//! Run with `cargo test -p gf2class-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use gf2class_core::classify::{all_passed, classify, verify_report, ClassificationReport, ClassifyConfig};
use gf2class_core::f4::all_vectors;
use gf2class_core::forms::SymplecticForm;
use gf2class_core::geometry::build_geometry;
use gf2class_core::spread::find_spreads;
use gf2class_core::{BitMatrix, BitVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TIME_LIMIT: Duration = Duration::from_secs(300);

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn run(spec: &str) -> (ClassificationReport, Vec<BitMatrix>, Duration) {
    let f = family(spec);
    let start = Instant::now();
    let r = classify(&f.generators, &f.seed, ClassifyConfig::default()).expect(spec);
    (r, f.generators, start.elapsed())
}

fn classification_matrix() -> Outcome {
    let mut out = Outcome::new();
    for spec in MATRIX {
        let expected = family(spec).spec.case_tag().unwrap();
        let (r, gens, elapsed) = run(spec);
        let verified = all_passed(&verify_report(&r, &gens));
        let listed = r.all_verified_branches.contains(&expected);
        let note = match r.branch {
            Some(b) if b != expected => format!(", precedence chose {b} {}", r.group_name.clone().unwrap_or_default()),
            _ => String::new(),
        };
        out.check(
            elapsed < TIME_LIMIT && listed && r.branch.is_some() && verified,
            format!("{spec:<24} {expected} in {:?} ({:.2?}, verify {}){note}", r.all_verified_branches, elapsed, if verified { "ok" } else { "failed" }),
        );
    }
    out
}

fn orders() -> Outcome {
    let mut out = Outcome::new();
    for (spec, order) in [
        ("frobenius73", 21u128),
        ("transvection:3", 168),
        ("alt7", 2520),
        ("symplectic:4", 360),
        ("symplectic:6", 1_451_520),
        ("orthogonal:6:minus", 25_920),
    ] {
        let f = family(spec);
        let brute = oracle::group_order(&f.generators) as u128;
        let (r, _, _) = run(spec);
        out.check(
            brute == order && r.group_order == Some(order) && r.expected_order == Some(order),
            format!("{spec:<20} expected {order}, brute force {brute}, reported {:?}", r.group_order),
        );
    }
    out
}

fn lemmas() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for spec in POINTED.iter().chain(POINTLESS) {
        let b = built(spec, false);
        let d = decomposition_violations(&b.class);
        let inv = invariance_violations(&b.class, &mut rng, 1000);
        out.check(d == 0 && inv == 0, format!("{spec:<24} decomposition {d} bad, trichotomy {inv}/1000 bad"));
        if POINTED.contains(spec) {
            let g = plain_geometry(&b.class);
            let (planes, bad) = plane_violations(&g);
            let diameter = collinearity_diameter(&g);
            out.check(
                planes > 0 && bad == 0 && diameter.is_some_and(|x| x <= 2),
                format!("{spec:<24} {planes} planes ({bad} neither 7/7 nor 6/4), diameter {diameter:?}"),
            );
        } else {
            let dichotomy = line_fixed_dichotomy_violations(&b.class);
            let (pairs, counts) = spread_count_violations(&b.class);
            let complex = find_spreads(&b.class).unwrap();
            let exclusive = full_spreads_exclude_singular(&complex);
            out.check(
                dichotomy == 0 && pairs > 0 && counts == 0 && exclusive,
                format!(
                    "{spec:<24} line/fixed dichotomy {dichotomy} bad, {pairs} line pairs ({counts} outside 4..5), full spreads {} with {} singular lines",
                    complex.census().full,
                    complex.census().singular_lines
                ),
            );
        }
    }
    out
}

fn form_recovery() -> Outcome {
    let mut out = Outcome::new();
    for spec in ["symplectic:6", "orthogonal:6:plus", "orthogonal:6:minus", "alternating:7"] {
        let f = family(spec);
        let (r, _, _) = run(spec);
        let s = r.evidence.symplectic.as_ref().unwrap();
        let p = s.congruence.as_ref().unwrap();
        let standard = SymplecticForm::standard(r.dimension);
        let witness = &(p * s.recovery.form.gram()) * &p.transpose() == *standard.gram();
        let invariant = f.generators.iter().all(|g| s.recovery.form.is_invariant_under(g));
        // base change onto the construction's own form through the standard one
        let to_truth = f.truth.symplectic.as_ref().is_none_or(|truth| {
            let q = truth.hyperbolic_basis().unwrap();
            let m = &q.inverse().unwrap() * p;
            &(&m * s.recovery.form.gram()) * &m.transpose() == *truth.gram()
        });
        out.check(
            witness && invariant && to_truth,
            format!("{spec:<20} symplectic form invariant, base change to the construction's form checked"),
        );
        if let (Some(q), Some(truth)) = (&r.evidence.quadratic, &f.truth.quadratic) {
            let n = r.dimension;
            let agree = (0..1u64 << n).all(|x| q.eval(&BitVector::from_u64(n, x)) == truth.eval(&BitVector::from_u64(n, x)));
            out.check(agree, format!("{spec:<20} Q agrees with the construction on all {} vectors", 1u64 << n));
        }
    }
    for spec in ["f4-reflection:2", "f4-reflection:3", "f4-unitary:3"] {
        let f = family(spec);
        let (r, _, _) = run(spec);
        let j = &r.evidence.f4.as_ref().unwrap().j_operator;
        let id = BitMatrix::identity(r.dimension);
        let field = (&(j * j) + &(j + &id)).is_zero();
        let commutes = f.generators.iter().all(|g| j * g == g * j);
        out.check(field && commutes, format!("{spec:<20} J^2 + J + I = 0, J commutes with generators"));
        if let Some(h) = &r.evidence.hermitian {
            let f4 = r.evidence.f4.as_ref().unwrap();
            let invariant = f.generators.iter().all(|g| {
                let a = f4.to_f4(g).unwrap();
                a.mul(&h.gram).mul(&a.conj_transpose()) == h.gram
            });
            let absolute = all_vectors(h.gram.dim())
                .iter()
                .filter(|y| y.iter().any(|c| !c.is_zero()) && h.gram.form(y, y).is_zero())
                .count()
                / 3;
            let singular = r.spreads.as_ref().unwrap().singular_lines;
            out.check(
                invariant && absolute == singular && singular == oracle::isotropic_points(3),
                format!("{spec:<20} Hermitian form invariant, {absolute} absolute points, {singular} singular lines"),
            );
        }
    }
    out
}

fn geometry_counts() -> Outcome {
    let mut out = Outcome::new();
    for (spec, points, lines) in [
        ("symplectic:4", 15, Some(20)),
        ("symplectic:6", 63, None),
        ("orthogonal:6:minus", 36, None),
        ("alternating:7", 21, Some(35)),
    ] {
        let f = family(spec);
        let (p, l) = oracle::geometry_counts(&f.generators, &f.seed);
        let g = build_geometry(&built(spec, false).class);
        let ok = p == points && lines.is_none_or(|x| x == l) && g.points().len() == p && g.lines().len() == l;
        out.check(ok, format!("{spec:<20} {p} points, {l} lines (library {}, {})", g.points().len(), g.lines().len()));
    }
    out
}

fn negative_controls() -> Outcome {
    let mut out = Outcome::new();
    for spec in CONTROLS {
        let (r, gens, _) = run(spec);
        out.check(
            r.branch.is_none() && r.all_verified_branches.is_empty() && !r.hypotheses.all_hold() && r.exit_code() == 1 && all_passed(&verify_report(&r, &gens)),
            format!("{spec:<24} hypotheses fail, no branch claimed"),
        );
    }
    let (good, gens, _) = run("symplectic:6");
    let corruptions: Vec<(&str, Box<dyn Fn(&mut ClassificationReport)>)> = vec![
        ("order doubled", Box::new(|r| r.group_order = r.group_order.map(|o| o * 2))),
        ("class size", Box::new(|r| r.class_size -= 1)),
        ("branch claimed on a different tag", Box::new(|r| r.branch = r.all_verified_branches.iter().copied().find(|&b| Some(b) != r.branch).or(Some(gf2class_core::families::CaseTag::F4Unitary)))),
        ("gram bit", Box::new(|r| {
            let s = r.evidence.symplectic.as_mut().unwrap();
            let mut gram = s.recovery.form.gram().clone();
            gram.set(0, 3, !gram.get(0, 3));
            gram.set(3, 0, !gram.get(3, 0));
            s.recovery.form = SymplecticForm::new(gram).unwrap();
        })),
        ("hypotheses", Box::new(|r| r.hypotheses.fixed_dim = 1)),
    ];
    for (name, corrupt) in corruptions {
        let mut bad = good.clone();
        corrupt(&mut bad);
        let back = ClassificationReport::from_json(&bad.to_json()).unwrap();
        out.check(!all_passed(&verify_report(&back, &gens)), format!("corrupted report ({name}) fails verify"));
    }
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("classification matrix", classification_matrix),
        ("group orders", orders),
        ("lemma suite", lemmas),
        ("form recovery", form_recovery),
        ("geometry counts", geometry_counts),
        ("negative controls", negative_controls),
    ];
    let mut all = true;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        all &= outcome.passed;
        println!("[{}] {} {name} ({:.1?})", if outcome.passed { "PASS" } else { "FAIL" }, i + 1, start.elapsed());
        for d in &outcome.details {
            println!("       {d}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
