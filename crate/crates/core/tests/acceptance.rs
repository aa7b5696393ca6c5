//! Acceptance criteria, one pass/fail line each. Runs as a plain binary so the
//! lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use supcalc::generate::{generate, GeneratorFlags};
use supcalc::harness::{fuzz, instance_params, legendre_concordance, membership_concordance, FuzzOutcome, FuzzParams};
use supcalc::rational::{q, qi, Rational};
use supcalc::report::CheckStatus;
use supcalc::sup::{check_identity, closure_gap_vertices, scaled_abs_chain, CheckInstance, CheckParams, Identity};
use supcalc::{Polyhedron, QVector};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn example_chain() -> Outcome {
    let zero = QVector::from_ints(&[0]);
    for n in 2..=10i64 {
        let single = scaled_abs_chain(n, n);
        let f = single.member(0);
        let r = Rational::one() - q(1, n);
        let expected = Polyhedron::boxed(&QVector::new(vec![-r.clone()]), &QVector::new(vec![r])).unwrap();
        for eps in [qi(0), q(1, 2), qi(1)] {
            let s = f.eps_subdifferential(&zero, &eps).unwrap();
            if !s.equals(&expected).unwrap() {
                return outcome(false, format!("∂_{eps} f_{n}(0) differs from the expected interval"));
            }
        }
    }
    let family = scaled_abs_chain(1, 10);
    let top = q(9, 10);
    let expected = Polyhedron::boxed(&QVector::new(vec![-top.clone()]), &QVector::new(vec![top.clone()])).unwrap();
    let s = family.sup_function().eps_subdifferential(&zero, &qi(0)).unwrap();
    if !s.equals(&expected).unwrap() {
        return outcome(false, "∂ f_N(0) is not [-(1-1/N), 1-1/N]");
    }
    let inst = CheckInstance::new(family.clone());
    let r = check_identity(Identity::T44, &inst, &CheckParams { x: Some(zero.clone()), ..CheckParams::default() }).unwrap();
    if r.status != CheckStatus::Pass {
        return outcome(false, format!("T44 on the truncated chain: {:?}", r.status));
    }
    let mut gap = closure_gap_vertices(&family, &zero, &qi(0)).unwrap();
    gap.sort();
    let want = vec![QVector::new(vec![-top.clone()]), QVector::new(vec![top])];
    outcome(gap == want, format!("closure-only vertices {gap:?}"))
}

const FUZZ_IDS: [Identity; 10] = [
    Identity::L2A,
    Identity::L2B,
    Identity::L2C,
    Identity::L2D,
    Identity::L2E,
    Identity::L2F,
    Identity::P34,
    Identity::C46,
    Identity::T54A,
    Identity::L57,
];

fn fuzz_params() -> FuzzParams {
    FuzzParams::new(2024, 200, FUZZ_IDS.to_vec())
}

fn identity_fuzz(corpus: &FuzzOutcome) -> Outcome {
    print!("{}", corpus.summary_table());
    let hnm: usize = corpus.summary.values().map(|c| c.hypotheses_not_met).sum();
    let detail = format!("{} reports, {} failures, hypotheses-not-met rate {:.3}", corpus.records.len(), corpus.failures(), hnm as f64 / corpus.records.len() as f64);
    for r in corpus.records.iter().filter(|r| r.report.is_fail()).take(5) {
        println!("  fail: instance {} {} eps {}: {:?}", r.index, r.report.identity, r.eps, r.report.counterexample);
    }
    outcome(corpus.failures() == 0, detail)
}

fn qc_suite() -> (Outcome, String) {
    let mut p = FuzzParams::new(77, 100, vec![Identity::T53]);
    p.flags = Some(GeneratorFlags { force_qc2: true, ..Default::default() });
    let t53 = fuzz(&p).unwrap();
    let mut p30 = p.clone();
    p30.count = 30;
    p30.identities = vec![Identity::R54];
    let r54 = fuzz(&p30).unwrap();
    let all: Vec<_> = t53.records.iter().chain(&r54.records).collect();
    let failing = all.iter().filter(|r| r.report.status != CheckStatus::Pass).count();
    for r in all.iter().filter(|r| r.report.status != CheckStatus::Pass).take(5) {
        println!("  {} instance {} eps {}: {:?} {:?} {:?}", r.report.identity, r.index, r.eps, r.report.status, r.report.counterexample, r.report.notes);
    }
    let witnesses: usize = all
        .iter()
        .map(|r| match &r.report.witness {
            Some(supcalc::report::Witness::Decompositions { witnesses }) => witnesses.len(),
            _ => 0,
        })
        .sum();
    let jsonl = t53.to_jsonl() + &r54.to_jsonl();
    (outcome(failing == 0, format!("{} T53 and {} R54 reports, {witnesses} verified witnesses, {failing} not passing", t53.records.len(), r54.records.len())), jsonl)
}

fn min_formula_suite() -> (Outcome, String) {
    let mut p = FuzzParams::new(91, 50, vec![Identity::T41]);
    p.flags = Some(GeneratorFlags { force_increasing: true, force_epi_pointed: true, ..Default::default() });
    p.eps_values = vec![Rational::zero()];
    p.check.dual_samples = 5;
    let t41 = fuzz(&p).unwrap();
    let mut c = FuzzParams::new(92, 20, vec![Identity::C42]);
    c.flags = Some(GeneratorFlags { force_epi_pointed: true, ..Default::default() });
    c.max_members = 3;
    c.eps_values = vec![Rational::zero()];
    c.check.dual_samples = 5;
    let c42 = fuzz(&c).unwrap();
    let all: Vec<_> = t41.records.iter().chain(&c42.records).collect();
    let bad = all.iter().filter(|r| r.report.status != CheckStatus::Pass).count();
    for r in all.iter().filter(|r| r.report.status != CheckStatus::Pass).take(5) {
        println!("  {} instance {}: {:?} {:?} {:?}", r.report.identity, r.index, r.report.status, r.report.counterexample, r.report.notes);
    }
    let jsonl = t41.to_jsonl() + &c42.to_jsonl();
    (outcome(bad == 0, format!("{} T41 and {} C42 reports, {bad} not passing", t41.records.len(), c42.records.len())), jsonl)
}

fn oracle_concordance() -> Outcome {
    let p = fuzz_params();
    let levels = [q(1, 2), q(1, 4), q(1, 8)];
    let mut fails = Vec::new();
    let (mut audits, mut faults, mut caught, mut grids) = (0, 0, 0, 0);
    for i in 0..p.count {
        let g = generate(&instance_params(&p, i)).unwrap();
        let r = legendre_concordance(&g, &levels).unwrap();
        if r.status == CheckStatus::Pass {
            grids += 1;
        }
        if r.is_fail() {
            fails.push(format!("instance {i} grid: {:?}", r.counterexample));
        }
        for eps in &p.eps_values {
            for r in membership_concordance(&g, eps, 100, i as u64).unwrap() {
                match (r.identity.as_str(), r.status) {
                    ("fault-injection", CheckStatus::Pass) => {
                        faults += 1;
                        caught += 1;
                    }
                    ("fault-injection", CheckStatus::Fail) => {
                        faults += 1;
                        fails.push(format!("instance {i} eps {eps}: corrupted set not detected"));
                    }
                    ("membership-audit", CheckStatus::Pass) => audits += 1,
                    (_, CheckStatus::Fail) => fails.push(format!("instance {i} eps {eps} audit: {:?}", r.counterexample)),
                    _ => {}
                }
            }
        }
    }
    for f in fails.iter().take(5) {
        println!("  {f}");
    }
    outcome(
        fails.is_empty(),
        format!("{grids} grid refinements, {audits} audits, {caught}/{faults} faults detected, {} disagreements", fails.len()),
    )
}

fn robust_suite() -> Outcome {
    let mut records = Vec::new();
    for (seed, equal) in [(31, false), (32, true)] {
        let mut p = FuzzParams::new(seed, 15, vec![Identity::RINF]);
        p.flags = Some(GeneratorFlags { force_increasing: true, equal_at_point: equal, ..Default::default() });
        records.extend(fuzz(&p).unwrap().records);
    }
    let asserted = records.iter().filter(|r| r.report.notes.iter().any(|n| n.contains("equality asserted"))).count();
    let converse = records.iter().filter(|r| r.report.notes.iter().any(|n| n.contains("converse checked"))).count();
    let bad = records.iter().filter(|r| r.report.status != CheckStatus::Pass).count();
    for r in records.iter().filter(|r| r.report.status != CheckStatus::Pass).take(5) {
        println!("  instance {}: {:?} {:?} {:?}", r.index, r.report.status, r.report.counterexample, r.report.notes);
    }
    outcome(
        bad == 0 && asserted == records.len(),
        format!("{} reports, equality asserted on {asserted}, converse on {converse}, {bad} not passing", records.len()),
    )
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut line = |k: usize, name: &str, limit: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let t = start.elapsed();
        let ok = o.ok && within(t, limit);
        all_ok &= ok;
        println!("criterion {k} [{}] {name}: {} ({:.1}s, limit {}s)", if ok { "PASS" } else { "FAIL" }, o.detail, t.as_secs_f64(), limit.as_secs());
    };
    let min = Duration::from_secs(60);
    line(1, "example chain", Duration::from_secs(1), &mut example_chain);
    let mut first = None;
    line(2, "identity fuzz", 10 * min, &mut || {
        let corpus = fuzz(&fuzz_params()).unwrap();
        let o = identity_fuzz(&corpus);
        first = Some(corpus.to_jsonl());
        o
    });
    let mut qc_jsonl = String::new();
    line(3, "qc decomposition", 10 * min, &mut || {
        let (o, j) = qc_suite();
        qc_jsonl = j;
        o
    });
    let mut mf_jsonl = String::new();
    line(4, "min formula and inf-convolution", 5 * min, &mut || {
        let (o, j) = min_formula_suite();
        mf_jsonl = j;
        o
    });
    line(5, "oracle concordance", 10 * min, &mut oracle_concordance);
    line(6, "robust infimum", 2 * min, &mut robust_suite);
    line(7, "determinism", 30 * min, &mut || {
        let again = fuzz(&fuzz_params()).unwrap().to_jsonl();
        let (_, qc) = qc_suite();
        let (_, mf) = min_formula_suite();
        let same = first.as_deref() == Some(again.as_str()) && qc == qc_jsonl && mf == mf_jsonl;
        let bytes = again.len() + qc.len() + mf.len();
        outcome(same, format!("second run of the fuzz, qc and min-formula corpora ({bytes} bytes) {}", if same { "identical" } else { "differs" }))
    });
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
