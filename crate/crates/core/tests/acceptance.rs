//! Acceptance run: one PASS/FAIL line per criterion, all checks exact.
//!
//! `cargo test -p hodge-fischer --test acceptance`

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hodge_fischer::spaces;
use hodge_fischer::verify::{self, SuiteReport, VerifyConfig};

fn cfg(dims: &[usize], k_max: usize, trials: usize) -> VerifyConfig {
    VerifyConfig {
        dims: dims.to_vec(),
        k_max,
        trials,
        ..VerifyConfig::default()
    }
}

const ALL_M: [usize; 4] = [1, 2, 3, 4];

struct Outcome {
    reports: Vec<SuiteReport>,
    extra: Vec<(String, bool)>,
    budget: Option<Duration>,
}

fn spot_checks() -> Vec<(String, bool)> {
    let mut out = vec![
        ("dim H^1_1 = 5 at m=3".to_string(), spaces::basis_h(3, 1, 1).map(|b| b.len()).ok() == Some(5)),
        ("dim H^1_2 = 7 at m=3".to_string(), spaces::basis_h(3, 1, 2).map(|b| b.len()).ok() == Some(7)),
    ];
    let mut agree = true;
    for m in ALL_M {
        for k in 0..=5 {
            for s in 0..=m {
                let lib = spaces::basis_h(m, s, k).map(|b| b.len()).ok();
                agree &= lib == Some(common::dim_h(m, s, k));
            }
        }
    }
    out.push(("dim H^s_k equals the brute-force joint kernel".to_string(), agree));
    out
}

fn run(n: usize) -> Outcome {
    let none = Vec::new;
    match n {
        1 => Outcome {
            reports: vec![verify::relations(&cfg(&ALL_M, 4, 100))],
            extra: none(),
            budget: Some(Duration::from_secs(5)),
        },
        2 => Outcome {
            reports: vec![verify::euler(&cfg(&ALL_M, 4, 0))],
            extra: none(),
            budget: None,
        },
        3 => Outcome {
            reports: vec![verify::dimensions(&cfg(&ALL_M, 5, 0))],
            extra: spot_checks(),
            budget: Some(Duration::from_secs(60)),
        },
        4 => Outcome {
            reports: vec![verify::projections(&cfg(&ALL_M, 4, 50))],
            extra: none(),
            budget: None,
        },
        5 => Outcome {
            // 50 random forms for each of 4 dimensions
            reports: vec![
                verify::fischer(&cfg(&ALL_M, 4, 50)),
                verify::isotypic(&cfg(&ALL_M, 5, 0)),
            ],
            extra: none(),
            budget: None,
        },
        6 => Outcome {
            reports: vec![verify::monogenic(&cfg(&ALL_M, 4, 25))],
            extra: none(),
            budget: None,
        },
        7 => Outcome {
            reports: vec![verify::equivariance(&cfg(&ALL_M, 4, 25))],
            extra: none(),
            budget: None,
        },
        8 => Outcome {
            reports: vec![verify::adjointness(&cfg(&ALL_M, 4, 100))],
            extra: none(),
            budget: None,
        },
        _ => unreachable!(),
    }
}

const NAMES: [&str; 8] = [
    "operator relations",
    "Euler eigenvalues",
    "dimension and directness audit",
    "projection algebra",
    "Fischer round trip and isotypic audit",
    "monogenic structure",
    "orthogonal equivariance",
    "Fischer adjointness",
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, name) in NAMES.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(i + 1);
        let elapsed = start.elapsed();
        let checks: usize = outcome.reports.iter().map(|r| r.checks).sum::<usize>() + outcome.extra.len();
        let suites_ok = outcome.reports.iter().all(SuiteReport::passed);
        let extra_ok = outcome.extra.iter().all(|(_, ok)| *ok);
        let in_time = outcome.budget.is_none_or(|b| elapsed <= b);
        let ok = suites_ok && extra_ok && in_time;
        let budget = outcome
            .budget
            .map(|b| format!(", budget {}s", b.as_secs()))
            .unwrap_or_default();
        println!(
            "criterion {}: {} {name} ({checks} checks, {:.2}s{budget})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !ok {
            failed += 1;
            for r in outcome.reports.iter().filter(|r| !r.passed()) {
                println!("  {r}");
            }
            for (what, _) in outcome.extra.iter().filter(|(_, ok)| !ok) {
                println!("  failed: {what}");
            }
            if !in_time {
                println!("  over time budget");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", NAMES.len() - failed, NAMES.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
