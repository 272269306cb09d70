//! The five commands. Random trials run on a rayon pool; each trial draws
//! from its own generator seeded from (seed, check, size, index), so reports
//! do not depend on the thread count.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use bethe_core::dwpf::{lemma_gg_check, lemma_kk_check, lemma_longdet_check, row_stack_check, single_sum_checks};
use bethe_core::highest::{z_eta, z_omega, ZArgs};
use bethe_core::kernels::{BetheConfig, Kernels};
use bethe_core::partitions::{delta_split_check, laplace_check};
use bethe_core::random::{random_config_counted, random_nonzero, random_norm_data, random_points_counted, random_values, NormData};
use bethe_core::scalar::{
    apply_constraints, derivation_checks, det_rep, det_rep_twisted, inner_term_count, outer_term_count,
    sum_formula_budgeted, sum_formula_counted, Variant, ZRep,
};
use bethe_core::spectral::{
    default_pivot, formfactor_derivative_check, formfactor_matrix, formfactor_value, jacobian_check,
    norm_limit_check, on_shell_values, orthogonality_check, supertrace_check,
};
use bethe_core::verdict::Verdict;
use bethe_core::{Error, Result, ScalarMatrix, Q};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::problem::{emit, Command, NormInput, Problem};
use crate::report::{BenchEntry, ErrorEntry, Report, Tally, TermCounts};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_HEIGHT: i64 = 20;
pub const DEFAULT_BUDGET_SECS: f64 = 60.0;

/// Command-line values; each one overrides the problem file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub max_a: Option<usize>,
    pub max_b: Option<usize>,
    pub threads: Option<usize>,
    pub budget_secs: Option<f64>,
    pub large: bool,
}

#[derive(Debug, Clone)]
struct Settings {
    seed: u64,
    trials: usize,
    max_a: usize,
    max_b: usize,
    pinned: Option<(usize, usize)>,
    height: i64,
    budget: Duration,
    large: bool,
}

fn settings(cmd: Command, p: &Problem, o: &Overrides) -> Settings {
    let (trials, ma, mb) = match (cmd, p.variant) {
        (Command::Crosscheck, Variant::TwistedOnShell) => (25, 2, 2),
        (Command::Crosscheck | Command::Identities, _) => (50, 3, 3),
        (Command::Norm, _) => (10, 2, 2),
        (Command::Formfactor, _) => (10, 2, 1),
        (Command::Bench, _) => (1, 3, 3),
    };
    let pinned = match (p.a, p.b) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0), b.unwrap_or(0))),
    };
    Settings {
        seed: o.seed.or(p.seed).unwrap_or(DEFAULT_SEED),
        trials: o.trials.or(p.trials).unwrap_or(trials),
        max_a: o.max_a.or(p.max_a).unwrap_or(ma),
        max_b: o.max_b.or(p.max_b).unwrap_or(mb),
        pinned,
        height: p.height.unwrap_or(DEFAULT_HEIGHT),
        budget: Duration::from_secs_f64(o.budget_secs.or(p.budget_secs).unwrap_or(DEFAULT_BUDGET_SECS).max(0.0)),
        large: o.large || p.large,
    }
}

/// Runs `cmd` on a pool with `threads` workers (0 or `None`: one per core).
pub fn run(cmd: Command, problem: &Problem, o: &Overrides) -> Report {
    let s = settings(cmd, problem, o);
    let mut report = Report::new(cmd.name(), s.seed);
    if let Some(fc) = problem.command {
        if fc != cmd {
            report.errors.push(ErrorEntry::other(
                "ParseError",
                format!("problem file is for {:?} but {:?} was requested", fc.name(), cmd.name()),
            ));
            return report.finish();
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(o.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            report.errors.push(ErrorEntry::other("ThreadPool", e.to_string()));
            return report.finish();
        }
    };
    pool.install(|| match cmd {
        Command::Crosscheck => crosscheck(problem, &s, &mut report),
        Command::Identities => identities(problem, &s, &mut report),
        Command::Norm => norm(problem, &s, &mut report),
        Command::Formfactor => formfactor(problem, &s, &mut report),
        Command::Bench => bench(problem, &s, &mut report),
    });
    report.finish()
}

// ---------------------------------------------------------------- trials

type Values = BTreeMap<String, String>;

/// What one trial produced.
#[derive(Default)]
struct TrialOut {
    checks: Vec<(&'static str, Verdict, Values, Option<TermCounts>)>,
    errors: Vec<ErrorEntry>,
    log: Vec<String>,
}

impl TrialOut {
    fn record(&mut self, name: &'static str, ctx: &str, res: Result<(Verdict, Values)>) {
        match res {
            Ok((v, vals)) => self.checks.push((name, v, vals, None)),
            Err(e) => self.errors.push(ErrorEntry::from_error(&e, format!("{name}, {ctx}"))),
        }
    }

    fn note_redraws(&mut self, ctx: &str, n: usize) {
        if n > 0 {
            self.log.push(format!("{ctx}: {n} collision re-draw(s)"));
        }
    }
}

#[derive(Clone, Copy)]
struct Job {
    tag: &'static str,
    size: (usize, usize),
    index: usize,
    seed: u64,
}

impl Job {
    fn ctx(&self) -> String {
        format!("(a, b) = ({}, {}), trial {}", self.size.0, self.size.1, self.index)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_seed(seed: u64, tag: &str, size: (usize, usize), index: usize) -> u64 {
    let mut h = splitmix(seed);
    for byte in tag.bytes() {
        h = splitmix(h ^ u64::from(byte));
    }
    h = splitmix(h ^ size.0 as u64);
    h = splitmix(h ^ size.1 as u64);
    splitmix(h ^ index as u64)
}

/// `trials` jobs for `tag` at every size.
fn grid_jobs(tag: &'static str, sizes: &[(usize, usize)], trials: usize, seed: u64) -> Vec<Job> {
    sizes
        .iter()
        .flat_map(|&size| (0..trials).map(move |i| Job { tag, size, index: i, seed: trial_seed(seed, tag, size, i) }))
        .collect()
}

fn grid(max_a: usize, max_b: usize) -> Vec<(usize, usize)> {
    (0..=max_a).flat_map(|a| (0..=max_b).map(move |b| (a, b))).collect()
}

fn sizes_for(s: &Settings, default: &[(usize, usize)]) -> Vec<(usize, usize)> {
    match s.pinned {
        Some(p) => vec![p],
        None => default.iter().copied().filter(|&(a, b)| a <= s.max_a && b <= s.max_b).collect(),
    }
}

/// Runs jobs in parallel, then folds results in job order.
fn run_jobs<F>(jobs: &[Job], report: &mut Report, f: F)
where
    F: Fn(&Job) -> TrialOut + Sync,
{
    let outs: Vec<TrialOut> = jobs.par_iter().map(&f).collect();
    let mut tallies: Vec<((&'static str, (usize, usize)), Tally)> = Vec::new();
    for (job, out) in jobs.iter().zip(outs) {
        report.log.extend(out.log);
        report.errors.extend(out.errors);
        for (name, verdict, values, counts) in out.checks {
            let key = (name, job.size);
            let pos = match tallies.iter().position(|(k, _)| *k == key) {
                Some(p) => p,
                None => {
                    tallies.push((key, Tally::new(name, Some(job.size))));
                    tallies.len() - 1
                }
            };
            let t = &mut tallies[pos].1;
            t.add(&verdict, Some(job.index), &values, false);
            if let Some(c) = counts {
                t.set_counts(c);
            }
        }
    }
    report.checks.extend(tallies.into_iter().map(|(_, t)| t.finish()));
}

/// Folds the checks of a single explicit input, keeping values.
fn fold_single(out: TrialOut, size: Option<(usize, usize)>, report: &mut Report) {
    report.log.extend(out.log);
    report.errors.extend(out.errors);
    for (name, verdict, values, counts) in out.checks {
        let mut t = Tally::new(name, size);
        t.add(&verdict, None, &values, true);
        if let Some(c) = counts {
            t.set_counts(c);
        }
        report.checks.push(t.finish());
    }
}

fn problem_text(cfg: &BetheConfig<Q>, cmd: Command, variant: Variant) -> String {
    let p = Problem {
        command: Some(cmd),
        variant,
        config: Some(cfg.clone()),
        norm: None,
        seed: None,
        trials: None,
        max_a: None,
        max_b: None,
        a: None,
        b: None,
        height: None,
        indices: None,
        pivot: None,
        sizes: None,
        budget_secs: None,
        large: false,
    };
    serde_json::to_string(&emit(&p)).expect("serializable")
}

fn val(pairs: &[(&str, String)]) -> Values {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

// ----------------------------------------------------------- crosscheck

fn crosscheck_one(cfg: &BetheConfig<Q>, variant: Variant) -> Result<(Verdict, Values, TermCounts)> {
    let r = apply_constraints(cfg, variant)?;
    let (sum, counts) = sum_formula_counted(cfg, &r, ZRep::Omega)?;
    let det = match variant {
        Variant::SemiOnShell => det_rep(cfg, &r, variant)?,
        Variant::TwistedOnShell => det_rep_twisted(cfg, &cfg.kappa)?,
    };
    let (a, b) = (cfg.a(), cfg.b());
    let tc = TermCounts {
        outer: counts.outer,
        inner: counts.inner,
        expected_outer: outer_term_count(a, b),
        expected_inner: inner_term_count(a, b),
    };
    let mut v = Verdict::new("sum formula = determinant");
    v.check(|| "sum formula against determinant".into(), &sum, &det);
    v.check(|| "outer term count".into(), &tc.outer, &tc.expected_outer);
    v.check(|| "inner term count".into(), &tc.inner, &tc.expected_inner);
    Ok((v, val(&[("sum_formula", sum.to_string()), ("determinant", det.to_string())]), tc))
}

fn crosscheck(p: &Problem, s: &Settings, report: &mut Report) {
    let name = match p.variant {
        Variant::SemiOnShell => "sum formula = determinant",
        Variant::TwistedOnShell => "twisted sum formula = determinant",
    };
    let one = |cfg: &BetheConfig<Q>, ctx: &str, out: &mut TrialOut, keep_problem: bool| {
        match crosscheck_one(cfg, p.variant) {
            Ok((v, mut vals, tc)) => {
                if keep_problem && !v.passed() {
                    vals.insert("problem".into(), problem_text(cfg, Command::Crosscheck, p.variant));
                }
                if !keep_problem {
                    out.log.push(format!(
                        "{ctx}: {} outer terms, {} inner Z terms",
                        tc.outer, tc.inner
                    ));
                }
                out.checks.push((name, v, vals, Some(tc)));
            }
            Err(e) => out.errors.push(ErrorEntry::from_error(&e, format!("{name}, {ctx}"))),
        }
    };
    if let Some(cfg) = &p.config {
        let mut out = TrialOut::default();
        one(cfg, "explicit configuration", &mut out, false);
        fold_single(out, Some((cfg.a(), cfg.b())), report);
        return;
    }
    let sizes = sizes_for(s, &grid(s.max_a, s.max_b));
    let jobs = grid_jobs(name, &sizes, s.trials, s.seed);
    run_jobs(&jobs, report, |job| {
        let mut out = TrialOut::default();
        let (cfg, redraws) = random_config_counted(&mut job.rng(), job.size.0, job.size.1, s.height);
        out.note_redraws(&job.ctx(), redraws);
        one(&cfg, &job.ctx(), &mut out, true);
        out
    });
}

// ----------------------------------------------------------- identities

const Z_REPS: &str = "Z omega = Z eta";
const SINGLE_SUMS: &str = "single sums";
const GG_LEMMA: &str = "gg partition lemma";
const KK_LEMMA: &str = "KK partition lemma";
const LONGDET_LEMMA: &str = "long determinant lemma";
const LAPLACE: &str = "laplace expansion";
const CAUCHY: &str = "cauchy determinants";
const ROW_STACK: &str = "row stacking";
const DELTA_SPLIT: &str = "delta factorization";
const ORTHOGONALITY: &str = "orthogonality";
const DERIVATION: &str = "derivation steps";

pub const IDENTITY_CHECKS: [&str; 11] = [
    Z_REPS,
    SINGLE_SUMS,
    GG_LEMMA,
    KK_LEMMA,
    LONGDET_LEMMA,
    LAPLACE,
    CAUCHY,
    ROW_STACK,
    DELTA_SPLIT,
    ORTHOGONALITY,
    DERIVATION,
];

fn nv(v: Verdict) -> (Verdict, Values) {
    (v, Values::new())
}

fn identities_explicit(cfg: &BetheConfig<Q>, report: &mut Report) {
    let mut out = TrialOut::default();
    let ctx = "explicit configuration";
    let k = cfg.kernels();
    out.record(SINGLE_SUMS, ctx, single_sum_checks(cfg, &[]).map(nv));
    out.record(CAUCHY, ctx, k.cauchy_identities(&cfg.u_c, &cfg.u_b).map(nv));
    out.record(CAUCHY, ctx, k.cauchy_identities(&cfg.v_c, &cfg.v_b).map(nv));
    out.record(ORTHOGONALITY, ctx, orthogonality_check(cfg, &[]).map(nv));
    out.record(DERIVATION, ctx, apply_constraints(cfg, Variant::SemiOnShell).and_then(|r| derivation_checks(cfg, &r)).map(nv));
    fold_single(out, Some((cfg.a(), cfg.b())), report);
}

fn identity_trial(job: &Job, height: i64) -> TrialOut {
    let mut out = TrialOut::default();
    let mut rng = job.rng();
    let ctx = job.ctx();
    let (a, b) = job.size;
    let c = random_nonzero(&mut rng, height);
    let k = Kernels::new(c.clone()).expect("nonzero c");
    let points = |rng: &mut ChaCha8Rng, n: usize, out: &mut TrialOut| {
        let (p, redraws) = random_points_counted(rng, n, &c, height, &[]);
        out.note_redraws(&ctx, redraws);
        p
    };
    match job.tag {
        Z_REPS => {
            let p = points(&mut rng, 2 * a + 2 * b, &mut out);
            let res = ZArgs::new(p[..a].to_vec(), p[a..2 * a].to_vec(), p[2 * a..2 * a + b].to_vec(), p[2 * a + b..].to_vec())
                .and_then(|args| {
                    let (zo, ze) = (z_omega(&args, &k)?, z_eta(&args, &k)?);
                    let mut v = Verdict::new(Z_REPS);
                    v.check(|| "Z_omega against Z_eta".into(), &zo, &ze);
                    Ok((v, val(&[("z_omega", zo.to_string()), ("z_eta", ze.to_string())])))
                });
            out.record(Z_REPS, &ctx, res);
        }
        GG_LEMMA | KK_LEMMA => {
            let p = points(&mut rng, 2 * (a + b), &mut out);
            let (ws, rest) = p.split_at(a + b);
            let (us, vs) = rest.split_at(a);
            let res = if job.tag == GG_LEMMA { lemma_gg_check(ws, us, vs, &k) } else { lemma_kk_check(ws, us, vs, &k) };
            out.record(job.tag, &ctx, res.map(nv));
        }
        LONGDET_LEMMA => {
            let p = points(&mut rng, 2 * a, &mut out);
            let (ws, xis) = p.split_at(a);
            let (c1, c2) = (random_values(&mut rng, a, height), random_values(&mut rng, a, height));
            out.record(LONGDET_LEMMA, &ctx, lemma_longdet_check(ws, xis, &c1, &c2, &k).map(nv));
        }
        LAPLACE => {
            let p = points(&mut rng, 2 * a, &mut out);
            let (us, vs) = p.split_at(a);
            let (alpha, beta) = (random_values(&mut rng, 1, height), random_values(&mut rng, 1, height));
            let res = laplace_check(
                |x: &Q, y: &Q| Ok(alpha[0].clone() * &k.g(x, y)?),
                |x: &Q, y: &Q| Ok(beta[0].clone() * &k.t(x, y)?),
                us,
                vs,
                &k,
            );
            out.record(LAPLACE, &ctx, res.map(nv));
        }
        CAUCHY => {
            let p = points(&mut rng, 2 * a, &mut out);
            let (us, vs) = p.split_at(a);
            out.record(CAUCHY, &ctx, k.cauchy_identities(us, vs).map(nv));
        }
        ROW_STACK => {
            let n = a + b;
            let xs = points(&mut rng, n, &mut out);
            let ta = ScalarMatrix::from_fn(a, n, |_, _| random_nonzero(&mut rng, height));
            let tb = ScalarMatrix::from_fn(b, n, |_, _| random_nonzero(&mut rng, height));
            out.record(ROW_STACK, &ctx, row_stack_check(&ta, &tb, &xs, &k).map(nv));
        }
        DELTA_SPLIT => {
            let xs = points(&mut rng, a + b, &mut out);
            out.record(DELTA_SPLIT, &ctx, delta_split_check(&xs, &k).map(nv));
        }
        SINGLE_SUMS | ORTHOGONALITY | DERIVATION => {
            let (cfg, redraws) = random_config_counted(&mut rng, a, b, height);
            out.note_redraws(&ctx, redraws);
            let (probes, redraws) = random_points_counted(&mut rng, 2, &cfg.c, height, &cfg.all_points());
            out.note_redraws(&ctx, redraws);
            let res = match job.tag {
                SINGLE_SUMS => single_sum_checks(&cfg, &probes),
                ORTHOGONALITY => orthogonality_check(&cfg, &probes),
                _ => apply_constraints(&cfg, Variant::SemiOnShell).and_then(|r| derivation_checks(&cfg, &r)),
            };
            out.record(job.tag, &ctx, res.map(|v| {
                let mut vals = Values::new();
                if !v.passed() {
                    vals.insert("problem".into(), problem_text(&cfg, Command::Identities, Variant::SemiOnShell));
                }
                (v, vals)
            }));
        }
        _ => unreachable!("unknown identity {}", job.tag),
    }
    out
}

fn identities(p: &Problem, s: &Settings, report: &mut Report) {
    if let Some(cfg) = &p.config {
        identities_explicit(cfg, report);
        return;
    }
    let (ma, mb) = (s.max_a, s.max_b);
    let full = sizes_for(s, &grid(ma, mb));
    let small: Vec<_> = sizes_for(s, &grid(ma.min(2), mb.min(2)));
    let nonempty = |v: &[(usize, usize)]| v.iter().copied().filter(|&x| x != (0, 0)).collect::<Vec<_>>();
    let m = ma.max(mb);
    let square: Vec<_> = (1..=m).map(|n| (n, n)).collect();
    let mut jobs = Vec::new();
    jobs.extend(grid_jobs(Z_REPS, &full, s.trials, s.seed));
    jobs.extend(grid_jobs(SINGLE_SUMS, &nonempty(&full), s.trials, s.seed));
    jobs.extend(grid_jobs(GG_LEMMA, &full, s.trials, s.seed));
    jobs.extend(grid_jobs(KK_LEMMA, &full, s.trials, s.seed));
    jobs.extend(grid_jobs(LONGDET_LEMMA, &square, s.trials, s.seed));
    jobs.extend(grid_jobs(LAPLACE, &square, s.trials, s.seed));
    jobs.extend(grid_jobs(CAUCHY, &square, s.trials, s.seed));
    jobs.extend(grid_jobs(ROW_STACK, &nonempty(&full), s.trials, s.seed));
    jobs.extend(grid_jobs(DELTA_SPLIT, &full, s.trials, s.seed));
    jobs.extend(grid_jobs(ORTHOGONALITY, &nonempty(&small), s.trials, s.seed));
    jobs.extend(grid_jobs(DERIVATION, &small, s.trials, s.seed));
    // identities that take a single size ignore b
    for j in jobs.iter_mut().filter(|j| matches!(j.tag, LONGDET_LEMMA | LAPLACE | CAUCHY)) {
        j.size.1 = 0;
    }
    run_jobs(&jobs, report, |job| identity_trial(job, s.height));
}

// ----------------------------------------------------------------- norm

const NORM_LIMIT: &str = "norm limit = Gaudin";
const NORM_EFFECTIVE: &str = "norm limit = Gaudin with realised derivatives";
const JACOBIAN: &str = "Gaudin matrix = c * Jacobian";

fn norm_one(n: &NormInput, out: &mut TrialOut, ctx: &str) {
    let r = on_shell_values(&n.u, &n.v, &n.c).and_then(|(r1, r3)| {
        let ratio = |x: &Q, y: &Q| Ok::<Q, Error>(x.clone() * &y.inv()?);
        let ld1 = n.d.iter().zip(&r1).map(|(x, y)| ratio(x, y)).collect::<Result<Vec<_>>>()?;
        let ld3 = n.e.iter().zip(&r3).map(|(x, y)| ratio(x, y)).collect::<Result<Vec<_>>>()?;
        Ok((ld1, ld3))
    });
    let (ld1, ld3) = match r {
        Ok(x) => x,
        Err(e) => {
            out.errors.push(ErrorEntry::from_error(&e, format!("norm, {ctx}")));
            return;
        }
    };
    out.record(JACOBIAN, ctx, jacobian_check(&n.u, &n.v, &ld1, &ld3, &n.c).map(nv));
    match norm_limit_check(&n.u, &n.v, &n.c, &n.directions, &n.d, &n.e) {
        Ok(res) => {
            let mut vals = val(&[("gaudin", res.gaudin.to_string())]);
            for (i, (l, e)) in res.limits.iter().zip(&res.effective).enumerate() {
                vals.insert(format!("limit[{i}]"), l.to_string());
                vals.insert(format!("gaudin_realised[{i}]"), e.to_string());
            }
            out.checks.push((NORM_LIMIT, res.verdict, vals.clone(), None));
            out.checks.push((NORM_EFFECTIVE, res.effective_verdict, vals, None));
        }
        Err(e) => out.errors.push(ErrorEntry::from_error(&e, format!("{NORM_LIMIT}, {ctx}"))),
    }
}

fn norm(p: &Problem, s: &Settings, report: &mut Report) {
    if let Some(n) = &p.norm {
        let mut out = TrialOut::default();
        norm_one(n, &mut out, "explicit input");
        fold_single(out, Some((n.u.len(), n.v.len())), report);
        return;
    }
    let sizes = sizes_for(s, &[(1, 0), (0, 1), (1, 1), (2, 1), (2, 2)]);
    let jobs = grid_jobs("norm", &sizes, s.trials, s.seed);
    run_jobs(&jobs, report, |job| {
        let mut out = TrialOut::default();
        let (data, redraws) = random_norm_data(&mut job.rng(), job.size.0, job.size.1, s.height);
        out.note_redraws(&job.ctx(), redraws);
        let NormData { u, v, c, directions, d, e } = data;
        norm_one(&NormInput { u, v, c, d, e, directions }, &mut out, &job.ctx());
        out
    });
}

// ------------------------------------------------------------ formfactor

const FF_DERIVATIVE: &str = "form factor = twist derivative";
const SUPERTRACE: &str = "supertrace";

fn formfactor_one(cfg: &BetheConfig<Q>, indices: &[usize], pivot: Option<usize>, out: &mut TrialOut, ctx: &str, explicit: bool) {
    let p = match pivot {
        Some(p) => p,
        None => match default_pivot(cfg) {
            Ok(p) => p,
            Err(e) => {
                out.errors.push(ErrorEntry::from_error(&e, format!("pivot choice, {ctx}")));
                return;
            }
        },
    };
    let mut values = val(&[("pivot", p.to_string())]);
    for &i in indices {
        match formfactor_value(cfg, i, p) {
            Ok(f) => {
                values.insert(format!("F{i}{i}"), f.to_string());
            }
            Err(e) => {
                out.errors.push(ErrorEntry::from_error(&e, format!("form factor F{i}{i} at pivot {p}, {ctx}")));
                return;
            }
        }
    }
    if explicit && indices.contains(&2) {
        if let Ok(spec) = formfactor_matrix(cfg, 2, p) {
            let row: Vec<String> = spec.matrix.row(p - 1).iter().map(ToString::to_string).collect();
            out.log.push(format!("pivot row {p} of N(2): [{}]", row.join(", ")));
        }
    }
    for &i in indices {
        out.record(FF_DERIVATIVE, ctx, formfactor_derivative_check(cfg, i).map(|v| (v, values.clone())));
    }
    out.record(SUPERTRACE, ctx, supertrace_check(cfg).map(|v| (v, values.clone())));
}

fn formfactor(p: &Problem, s: &Settings, report: &mut Report) {
    let indices = p.indices.clone().unwrap_or_else(|| vec![1, 2, 3]);
    if let Some(cfg) = &p.config {
        let mut out = TrialOut::default();
        formfactor_one(cfg, &indices, p.pivot, &mut out, "explicit configuration", true);
        fold_single(out, Some((cfg.a(), cfg.b())), report);
        return;
    }
    let sizes: Vec<_> = sizes_for(s, &grid(s.max_a, s.max_b)).into_iter().filter(|&x| x != (0, 0)).collect();
    let jobs = grid_jobs("formfactor", &sizes, s.trials, s.seed);
    run_jobs(&jobs, report, |job| {
        let mut out = TrialOut::default();
        let (cfg, redraws) = random_config_counted(&mut job.rng(), job.size.0, job.size.1, s.height);
        out.note_redraws(&job.ctx(), redraws);
        formfactor_one(&cfg, &indices, None, &mut out, &job.ctx(), false);
        out
    });
}

// ----------------------------------------------------------------- bench

const BENCH_COUNTS: &str = "bench term counts";
const BENCH_VALUES: &str = "bench values";
const BENCH_CROSSOVER: &str = "bench crossover";

fn bench(p: &Problem, s: &Settings, report: &mut Report) {
    let mut sizes = p.sizes.clone().unwrap_or_else(|| {
        let mut v = vec![(1, 1), (2, 2), (3, 3)];
        if s.large {
            v.push((4, 4));
        }
        v
    });
    sizes.retain(|&(a, b)| {
        let keep = s.large || (a < 4 && b < 4);
        if !keep {
            report.log.push(format!("skipping (a, b) = ({a}, {b}): sizes with a or b >= 4 need --large"));
        }
        keep
    });
    for (n, &(a, b)) in sizes.iter().enumerate() {
        let ctx = format!("(a, b) = ({a}, {b})");
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(s.seed, "bench", (a, b), n));
        let (cfg, redraws) = random_config_counted(&mut rng, a, b, s.height);
        if redraws > 0 {
            report.log.push(format!("{ctx}: {redraws} collision re-draw(s)"));
        }
        let res = (|| -> Result<()> {
            let r = apply_constraints(&cfg, Variant::SemiOnShell)?;
            let t0 = Instant::now();
            let det = det_rep(&cfg, &r, Variant::SemiOnShell)?;
            let det_secs = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let budget = s.budget;
            let sum = sum_formula_budgeted(&cfg, &r, ZRep::Omega, &mut || t1.elapsed() > budget)?;
            let sum_secs = t1.elapsed().as_secs_f64();
            let (expected_outer, expected_inner) = (outer_term_count(a, b), inner_term_count(a, b));
            let mut counts = Verdict::new(BENCH_COUNTS);
            let mut values = Verdict::new(BENCH_VALUES);
            let entry = match sum {
                Some((sum, c)) => {
                    counts.check(|| format!("outer, {ctx}"), &c.outer, &expected_outer);
                    counts.check(|| format!("inner, {ctx}"), &c.inner, &expected_inner);
                    values.check(|| format!("sum against determinant, {ctx}"), &sum, &det);
                    BenchEntry {
                        a,
                        b,
                        sum_status: "complete".into(),
                        sum_secs,
                        det_secs,
                        det_dimension: a + b,
                        term_counts: TermCounts { outer: c.outer, inner: c.inner, expected_outer, expected_inner },
                        sum_value: Some(sum.to_string()),
                        det_value: det.to_string(),
                    }
                }
                None => {
                    report.log.push(format!("{ctx}: sum path stopped at the {:.1}s budget", budget.as_secs_f64()));
                    BenchEntry {
                        a,
                        b,
                        sum_status: "timeout".into(),
                        sum_secs,
                        det_secs,
                        det_dimension: a + b,
                        term_counts: TermCounts { outer: 0, inner: 0, expected_outer, expected_inner },
                        sum_value: None,
                        det_value: det.to_string(),
                    }
                }
            };
            let mut t = Tally::new(BENCH_COUNTS, Some((a, b)));
            t.add(&counts, None, &Values::new(), false);
            t.set_counts(entry.term_counts);
            if entry.sum_status == "complete" {
                report.checks.push(t.finish());
                let mut t = Tally::new(BENCH_VALUES, Some((a, b)));
                t.add(&values, None, &Values::new(), false);
                report.checks.push(t.finish());
            }
            report.bench.push(entry);
            Ok(())
        })();
        if let Err(e) = res {
            report.errors.push(ErrorEntry::from_error(&e, format!("bench, {ctx}")));
        }
    }
    // the largest completed size with at least four roots decides the crossover
    if let Some(e) = report.bench.iter().filter(|e| e.sum_status == "complete" && e.a + e.b >= 4).last() {
        let mut v = Verdict::new(BENCH_CROSSOVER);
        v.check_that(
            || format!("determinant {:.6}s vs sum {:.6}s at ({}, {})", e.det_secs, e.sum_secs, e.a, e.b),
            e.det_secs < e.sum_secs,
        );
        let mut t = Tally::new(BENCH_CROSSOVER, Some((e.a, e.b)));
        t.add(&v, None, &Values::new(), false);
        report.checks.push(t.finish());
    }
    if report.bench.iter().any(|e| e.sum_status == "timeout") {
        report.log.push("timeouts are reported, not failures".into());
    }
}
