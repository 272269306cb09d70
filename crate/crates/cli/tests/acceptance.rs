//! Acceptance run: every criterion in-process, exact comparisons only.
//! Prints one PASS/FAIL line per criterion, then fails if any did.

use std::time::{Duration, Instant};

use bethe_cli::report::CheckEntry;
use bethe_cli::{parse_problem, run, Command, Overrides, Report};

const RANDOM: &str = r#"{ "version": 1 }"#;
const TWISTED: &str = r#"{ "version": 1, "variant": "twisted" }"#;

struct Outcome {
    lines: Vec<String>,
    failed: Vec<usize>,
}

impl Outcome {
    fn record(&mut self, n: usize, what: &str, problems: Vec<String>) {
        let ok = problems.is_empty();
        let mut line = format!("{} criterion {n}: {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            line.push_str(&format!(" [{}]", problems.join("; ")));
        }
        println!("{line}");
        self.lines.push(line);
        if !ok {
            self.failed.push(n);
        }
    }
}

fn timed(cmd: Command, text: &str) -> (Report, Duration) {
    let p = parse_problem(text).expect("problem parses");
    let t = Instant::now();
    let r = run(cmd, &p, &Overrides::default());
    (r, t.elapsed())
}

fn entry<'a>(r: &'a Report, name: &str, size: (usize, usize)) -> Option<&'a CheckEntry> {
    r.checks.iter().find(|c| c.name == name && c.a == Some(size.0) && c.b == Some(size.1))
}

/// Problems with the named check at each size: missing, too few trials, failing.
fn per_size(r: &Report, name: &str, sizes: &[(usize, usize)], min_trials: usize) -> Vec<String> {
    let mut out = Vec::new();
    for &s in sizes {
        match entry(r, name, s) {
            None => out.push(format!("{name} {s:?}: missing")),
            Some(c) => {
                if c.trials < min_trials {
                    out.push(format!("{name} {s:?}: {} trials", c.trials));
                }
                if !c.passed {
                    out.push(format!("{name} {s:?}: {}/{} comparisons failed", c.failures, c.comparisons));
                }
            }
        }
    }
    out
}

fn errors(r: &Report) -> Vec<String> {
    r.errors.iter().map(|e| format!("{}: {}", e.kind, e.message)).collect()
}

fn sizes_of(r: &Report, name: &str) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = r.checks_named(name).filter_map(|c| Some((c.a?, c.b?))).collect();
    v.dedup();
    v
}

fn grid(m: usize, n: usize) -> Vec<(usize, usize)> {
    (0..=m).flat_map(|a| (0..=n).map(move |b| (a, b))).collect()
}

#[test]
fn acceptance() {
    let mut o = Outcome { lines: Vec::new(), failed: Vec::new() };

    let (r, t) = timed(Command::Crosscheck, RANDOM);
    let mut p = errors(&r);
    p.extend(per_size(&r, "sum formula = determinant", &grid(3, 3), 50));
    for c in r.checks_named("sum formula = determinant") {
        match &c.term_counts {
            Some(tc) if tc.outer == tc.expected_outer && tc.inner == tc.expected_inner => {}
            _ => p.push(format!("term counts at ({:?}, {:?})", c.a, c.b)),
        }
    }
    if t > Duration::from_secs(300) {
        p.push(format!("took {:.0}s", t.as_secs_f64()));
    }
    o.record(1, &format!("sum formula equals determinant, 50 trials per size up to (3, 3), {:.0}s", t.as_secs_f64()), p);

    let (r, _) = timed(Command::Crosscheck, TWISTED);
    let mut p = errors(&r);
    p.extend(per_size(&r, "twisted sum formula = determinant", &grid(2, 2), 25));
    o.record(2, "twisted sum formula equals twisted determinant, 25 trials per size up to (2, 2)", p);

    let (r, _) = timed(Command::Identities, RANDOM);
    let mut p = errors(&r);
    p.extend(per_size(&r, "Z omega = Z eta", &grid(3, 3), 50));
    o.record(3, "both highest coefficient representations agree, 50 trials per size", p);

    let mut p = Vec::new();
    for name in [
        "gg partition lemma",
        "KK partition lemma",
        "long determinant lemma",
        "laplace expansion",
        "cauchy determinants",
        "row stacking",
        "delta factorization",
        "derivation steps",
    ] {
        let sizes = sizes_of(&r, name);
        if sizes.is_empty() {
            p.push(format!("{name}: missing"));
        }
        p.extend(per_size(&r, name, &sizes, 50));
    }
    o.record(4, "auxiliary identities, at least 50 trials per size each", p);

    let mut p = Vec::new();
    for name in ["orthogonality", "single sums"] {
        let sizes = sizes_of(&r, name);
        if sizes.is_empty() {
            p.push(format!("{name}: missing"));
        }
        p.extend(per_size(&r, name, &sizes, 50));
    }
    o.record(5, "orthogonality and row sums", p);

    let norm_sizes = [(1, 0), (0, 1), (1, 1), (2, 1), (2, 2)];
    let (r, t) = timed(Command::Norm, RANDOM);
    let mut p = errors(&r);
    p.extend(per_size(&r, "norm limit = Gaudin", &norm_sizes, 10));
    for &s in &norm_sizes {
        // two directions against Gaudin, one against each other
        if let Some(c) = entry(&r, "norm limit = Gaudin", s) {
            if c.comparisons < 3 * c.trials {
                p.push(format!("{s:?}: only {} comparisons", c.comparisons));
            }
        }
    }
    if t > Duration::from_secs(600) {
        p.push(format!("took {:.0}s", t.as_secs_f64()));
    }
    o.record(6, &format!("norm limit equals Gaudin determinant along two directions, {:.0}s", t.as_secs_f64()), p);

    let p = per_size(&r, "Gaudin matrix = c * Jacobian", &norm_sizes, 10);
    o.record(7, "Gaudin matrix equals c times the Jacobian", p);

    let (r, _) = timed(Command::Formfactor, RANDOM);
    let mut p = errors(&r);
    let ff_sizes: Vec<_> = grid(2, 1).into_iter().filter(|&s| s != (0, 0)).collect();
    p.extend(per_size(&r, "form factor = twist derivative", &ff_sizes, 30));
    p.extend(per_size(&r, "supertrace", &ff_sizes, 10));
    o.record(8, "form factors for i = 1, 2, 3, every admissible pivot, supertrace", p);

    let (r, _) = timed(Command::Bench, RANDOM);
    let mut p = errors(&r);
    for &s in &[(1, 1), (2, 2), (3, 3)] {
        p.extend(per_size(&r, "bench term counts", &[s], 1));
        p.extend(per_size(&r, "bench values", &[s], 1));
    }
    if r.checks_named("bench crossover").next().is_none() {
        p.push("no crossover verdict".into());
    }
    p.extend(r.checks_named("bench crossover").filter(|c| !c.passed).map(|c| {
        c.witness.as_ref().map(|w| w.context.clone()).unwrap_or_else(|| "crossover failed".into())
    }));
    o.record(9, "bench term counts and values, determinant faster", p);

    println!();
    for l in &o.lines {
        println!("{l}");
    }
    assert!(o.failed.is_empty(), "failing criteria: {:?}", o.failed);
}
