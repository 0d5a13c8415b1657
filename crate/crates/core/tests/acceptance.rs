//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use eja_core::harness::{run_example, ExampleId};
use eja_core::{
    operator_commute, run_suite, strongly_operator_commute, trace_inequality_gap, Element, Parallelism, SuiteConfig,
    SuiteId, VerificationReport,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn checks_pass(report: &VerificationReport, names: &[&str]) -> Result<(), String> {
    for n in names {
        match report.check(n) {
            Some(c) if c.pass => {}
            Some(_) => return Err(format!("check {n} failed")),
            None => return Err(format!("check {n} missing")),
        }
    }
    if report.pass {
        Ok(())
    } else {
        Err(format!("report failed: {:?}", report.failures.first().map(|f| &f.message)))
    }
}

fn timed(limit: Duration, outcome: Outcome, elapsed: Duration) -> Outcome {
    let within = elapsed < limit;
    let detail = format!("{}; {:.2} s (limit {} s)", outcome.detail, elapsed.as_secs_f64(), limit.as_secs());
    Outcome::new(outcome.pass && within, detail)
}

fn local_maximizer_example() -> Outcome {
    let started = Instant::now();
    let r = run_example(ExampleId::LocalMaximizer);
    let elapsed = started.elapsed();
    let out = match checks_pass(
        &r,
        &[
            "F(3,0)",
            "F(0,3)",
            "halfspace_at_(0,3)",
            "halfspace_at_(3,0)",
            "(2,0)_is_subgradient_at_(0,3)",
            "operator_commute((0,3),(2,0))",
            "not_strongly_commute((0,3),(2,0))",
        ],
    ) {
        Ok(()) => Outcome::new(true, format!("{} checks", r.checks.len())),
        Err(e) => Outcome::new(false, e),
    };
    timed(Duration::from_secs(1), out, elapsed)
}

fn product_orbit_example() -> Outcome {
    let started = Instant::now();
    let r = run_example(ExampleId::ProductOrbit);
    let elapsed = started.elapsed();
    let out = match checks_pass(
        &r,
        &[
            "eigenvalues(A)",
            "eigenvalues(C)",
            "<A,C>",
            "gap(A,C)",
            "not_strongly_commute(A,C)",
            "orbit_maximum",
            "commutator_norm(optimizer,C)",
            "rotation_grid_maximum",
        ],
    ) {
        Ok(()) => Outcome::new(true, format!("{} checks", r.checks.len())),
        Err(e) => Outcome::new(false, e),
    };
    timed(Duration::from_secs(10), out, elapsed)
}

fn commuting_but_not_strongly() -> Outcome {
    let a = Element::from_sym_rows(&[&[3.0, 1.0], &[1.0, 3.0]]).unwrap();
    let b = Element::from_sym_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]).unwrap();
    let op = operator_commute(&a, &b, 1e-8);
    let strong = strongly_operator_commute(&a, &b, 1e-8);
    let gap = trace_inequality_gap(&a, &b).unwrap();
    Outcome::new(op && !strong && (gap - 4.0).abs() <= 1e-9, format!("operator {op}, strong {strong}, gap {gap}"))
}

fn suite_over(
    suites: &[SuiteId],
    trials: usize,
    extra: impl Fn(&VerificationReport) -> Result<(), String>,
) -> (Outcome, Duration) {
    let started = Instant::now();
    let mut worst_comm = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut runs = 0;
    for id in suites {
        for name in ACCEPTANCE_ALGEBRAS {
            let cfg = SuiteConfig::new(alg(name), trials, 42);
            let report = match run_suite(*id, &cfg) {
                Ok(r) => r,
                Err(e) => return (Outcome::new(false, format!("{id} on {name}: {e}")), started.elapsed()),
            };
            runs += 1;
            if !report.pass {
                let first = report.failures.first().map(|f| f.message.clone()).unwrap_or_default();
                return (Outcome::new(false, format!("{id} on {name}: {first}")), started.elapsed());
            }
            if let Err(e) = extra(&report) {
                return (Outcome::new(false, format!("{id} on {name}: {e}")), started.elapsed());
            }
            worst_comm = worst_comm.max(report.max_commutator_norm);
            worst_gap = worst_gap.max(report.max_strong_gap);
        }
    }
    let detail = format!("{runs} runs x {trials} trials; max commutator {worst_comm:e}, max strong gap {worst_gap:e}");
    (Outcome::new(true, detail), started.elapsed())
}

fn commutation_suite() -> Outcome {
    let (out, elapsed) = suite_over(&[SuiteId::Thm31a, SuiteId::Thm31b], 1000, |r| {
        if r.max_commutator_norm > 1e-6 {
            return Err(format!("commutator norm {:e}", r.max_commutator_norm));
        }
        if r.max_strong_gap > 1e-6 {
            return Err(format!("strong gap {:e}", r.max_strong_gap));
        }
        // Strong commutation must have been asserted on every conclusive
        // trial whenever it is implied.
        let implied = r.theorem == "thm31a" || r.algebra.parse::<eja_core::Algebra>().unwrap().is_essentially_simple();
        if implied && r.strong_asserted != r.conclusive {
            return Err(format!("strong asserted on {} of {} trials", r.strong_asserted, r.conclusive));
        }
        Ok(())
    });
    timed(Duration::from_secs(300), out, elapsed)
}

fn moreau_suite() -> Outcome {
    suite_over(&[SuiteId::Cor32], 1000, |r| {
        let orth = r.check("moreau_orthogonality").and_then(|c| c.observed).unwrap_or(f64::INFINITY);
        if orth > 1e-7 {
            return Err(format!("orthogonality {orth:e}"));
        }
        match r.check("idempotent_disagreements") {
            Some(c) if c.pass && c.detail.starts_with("100 idempotents") => Ok(()),
            Some(c) => Err(format!("idempotents: {}", c.detail)),
            None => Err("idempotent check missing".into()),
        }
    })
    .0
}

fn subgradient_suite() -> Outcome {
    suite_over(&[SuiteId::Cor33], 1000, |r| {
        if r.max_strong_gap > 1e-6 {
            return Err(format!("strong gap {:e}", r.max_strong_gap));
        }
        match r.check("finite_difference_error") {
            Some(c) if c.pass => Ok(()),
            _ => Err("finite-difference check failed".into()),
        }
    })
    .0
}

fn structural_and_oracles() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for s in structural_suites(10_000, 7) {
        pass &= s.pass();
        notes.push(format!("{} {:.1e}", s.name, s.worst));
    }
    let rn = strong_commutation_rn_agreement(1000, 7);
    let (eig, _, _) = sym_eigenvalue_agreement(1000, 7, 1e-8, 1e-5);
    let comm = sym_commutator_agreement(1000, 7);
    let (expm, _) = expm_agreement(1000, 7, 1e-10);
    let (fd, _) = finite_difference_agreement(1000, 7, 1e-6);
    let disagreements =
        rn.disagreements + eig.disagreements + comm.disagreements + expm.disagreements + fd.disagreements;
    pass &= disagreements == 0;
    notes.push(format!("oracle disagreements {disagreements} over 5 x 1000"));
    Outcome::new(pass, notes.join("; "))
}

fn determinism() -> Outcome {
    let run = |id: SuiteId, name: &str, mode: Parallelism| {
        let mut cfg = SuiteConfig::new(alg(name), 200, 9);
        cfg.parallelism = mode;
        let mut r = run_suite(id, &cfg).unwrap();
        r.elapsed_ms = None;
        r.to_json()
    };
    let cases = [
        (SuiteId::Thm31a, "sym:3"),
        (SuiteId::Thm31b, "prod(spin:3,sym:2)"),
        (SuiteId::Cor32, "spin:4"),
        (SuiteId::Cor33, "sym:4"),
        (SuiteId::Thm34, "prod(sym:1,sym:2)"),
    ];
    for (id, name) in cases {
        let first = run(id, name, Parallelism::default());
        let again = run(id, name, Parallelism::default());
        let sequential = run(id, name, Parallelism::Sequential);
        if first != again || first != sequential {
            return Outcome::new(false, format!("{id} on {name} differs between runs"));
        }
    }
    let ex = |id| run_example(id).to_json();
    if ex(ExampleId::LocalMaximizer) != ex(ExampleId::LocalMaximizer)
        || ex(ExampleId::ProductOrbit) != ex(ExampleId::ProductOrbit)
    {
        return Outcome::new(false, "example reports differ between runs");
    }
    Outcome::new(true, "5 suites byte-identical across repeats and sequential/parallel; examples identical")
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("example 4.1 reproduction", local_maximizer_example),
        ("example 4.2 reproduction", product_orbit_example),
        ("operator but not strong commutation in sym:2", commuting_but_not_strongly),
        ("normal directions commute (thm31a, thm31b)", commutation_suite),
        ("Moreau split and idempotent normal cones (cor32)", moreau_suite),
        ("spectral subgradients strongly commute (cor33)", subgradient_suite),
        ("structural suites and oracles", structural_and_oracles),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
