//! Verification suites and their text and structured reports.
//!
//! A suite is a list of tasks. Each task has an anchor naming the identity
//! family it checks, a largest supported `g`, and draws its random inputs from
//! a generator seeded by the suite seed and its anchor, so tasks can run on
//! any number of worker threads and still produce the same report.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use sl2chow::abvar::{
    fourier, poincare_class, pullback, pushforward, theta, CohClass, HomMorphism, PolarizedContext,
    ProductVariety,
};
use sl2chow::action::{
    build_action, fourier_demazure_check, lie_algebra_check, lift_consistency_check, phi_upper,
    phi_w, sigma_identity_check, sl2z_relations_check, torus_check, LIFT_MAX_G, OPERATOR_MAX_G,
    RELATIONS_MAX_G,
};
use sl2chow::corr::{
    compose, diagonal_class, diagonal_push, graph, isogeny_transfer, kunneth_idempotents,
    transpose_graph, Correspondence, COMPOSE_MAX_G,
};
use sl2chow::exactla::{pow_i, rat, ratio, Rational};
use sl2chow::lefschetz::{
    filtration_lefschetz_check, fourier_primitive_check, fourier_transform_primitive_check,
    hard_lefschetz_check, lefschetz_survey, negative_s_annihilation_check, LefschetzModel,
};
use sl2chow::random::{random_class, random_free_module, random_homogeneous, seeded, TestRng};
use sl2chow::report::CheckReport;
use sl2chow::sl2rep::{
    act_operator, check_bracket, demazure_check_triple, DemazureReport, FreeBeauvilleModule,
    GroupElement,
};
use sl2chow::{format, Error, Result};

use crate::expr::render;

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "SL2CHOW_WORKERS";

/// Number of random classes in the Fourier inversion check.
pub const INVERSION_SAMPLES: usize = 50;
/// Number of random correspondences per multiplication map in the graph formulas.
pub const GRAPH_FORMULA_SAMPLES: usize = 20;
/// Number of random free modules in the Fourier-on-blocks check.
pub const FREE_MODULE_SAMPLES: usize = 10;
/// Largest lowest weight of a random free module.
pub const FREE_MODULE_MAX_LAMBDA: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    Brackets,
    Sl2z,
    Formulas12,
    Kunneth,
    Fourier,
    Lefschetz,
    Demazure,
    Isogeny,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 9] = [
        SuiteName::Brackets,
        SuiteName::Sl2z,
        SuiteName::Formulas12,
        SuiteName::Kunneth,
        SuiteName::Fourier,
        SuiteName::Lefschetz,
        SuiteName::Demazure,
        SuiteName::Isogeny,
        SuiteName::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Brackets => "brackets",
            SuiteName::Sl2z => "sl2z",
            SuiteName::Formulas12 => "formulas12",
            SuiteName::Kunneth => "kunneth",
            SuiteName::Fourier => "fourier",
            SuiteName::Lefschetz => "lefschetz",
            SuiteName::Demazure => "demazure",
            SuiteName::Isogeny => "isogeny",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SuiteName::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown suite '{s}', expected one of {}", names.join(", "))
            })
    }
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub anchor: String,
    pub identity: String,
    pub inputs_digest: String,
    pub passed: bool,
    pub detail: String,
}

/// A task left out because `g` exceeds its limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub anchor: String,
    pub max_g: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub g: usize,
    pub polarization: Vec<u64>,
    pub seed: u64,
    pub records: Vec<Record>,
    pub skipped: Vec<Skipped>,
}

#[derive(Serialize)]
struct Structured<'a> {
    suite: &'static str,
    g: usize,
    polarization_type: &'a [u64],
    seed: u64,
    passed: bool,
    checks: usize,
    failures: usize,
    records: &'a [Record],
    skipped: &'a [Skipped],
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed).count()
    }

    pub fn to_text(&self) -> String {
        let t: Vec<String> = self.polarization.iter().map(u64::to_string).collect();
        let mut out = format!(
            "suite {}, g={}, type ({}), seed {}\n",
            self.suite.as_str(),
            self.g,
            t.join(","),
            self.seed
        );
        for r in &self.records {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            let _ = write!(out, "{mark} {}  {}", r.anchor, r.identity);
            if !r.detail.is_empty() {
                let _ = write!(out, "  ({})", r.detail);
            }
            out.push('\n');
        }
        for s in &self.skipped {
            let _ = writeln!(out, "SKIP {}  (needs g <= {})", s.anchor, s.max_g);
        }
        let _ = writeln!(
            out,
            "{} checks, {} failed",
            self.records.len(),
            self.failures()
        );
        out
    }

    /// Pretty-printed JSON with records sorted by anchor, then identity.
    pub fn to_structured(&self) -> String {
        let doc = Structured {
            suite: self.suite.as_str(),
            g: self.g,
            polarization_type: &self.polarization,
            seed: self.seed,
            passed: self.passed(),
            checks: self.records.len(),
            failures: self.failures(),
            records: &self.records,
            skipped: &self.skipped,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Per-task state: the random source and a transcript of the inputs drawn.
struct TaskEnv {
    ctx: Arc<PolarizedContext>,
    rng: TestRng,
    inputs: Vec<String>,
}

impl TaskEnv {
    fn note(&mut self, input: String) {
        self.inputs.push(input);
    }

    fn random_classes(&mut self, v: &ProductVariety, count: usize, terms: usize) -> Vec<CohClass> {
        let zs: Vec<CohClass> = (0..count)
            .map(|_| random_class(v, &mut self.rng, terms))
            .collect();
        for z in &zs {
            self.note(render(z));
        }
        zs
    }

    fn random_corrs(&mut self, count: usize, terms: usize) -> Result<Vec<Correspondence>> {
        let pair = ProductVariety::new(&self.ctx, 2)?;
        self.random_classes(&pair, count, terms)
            .into_iter()
            .map(Correspondence::new)
            .collect()
    }

    fn random_module(
        &mut self,
        max_lambda: u32,
    ) -> Result<(FreeBeauvilleModule, sl2chow::sl2rep::Sl2Triple)> {
        let (m, t) = random_free_module(self.ctx.g() as u32, max_lambda, &mut self.rng)?;
        self.note(describe_module(&m));
        Ok((m, t))
    }
}

fn describe_module(m: &FreeBeauvilleModule) -> String {
    let gens: Vec<String> = m
        .generators
        .iter()
        .map(|z| match &z.bidegree {
            Some((p, s)) => format!(
                "{}:lambda={},p={},s={}",
                z.label,
                z.lambda,
                format::rational(p),
                s
            ),
            None => format!("{}:lambda={}", z.label, z.lambda),
        })
        .collect();
    format!("free module g={} [{}]", m.g, gens.join(" "))
}

type TaskFn = fn(&mut TaskEnv) -> Result<CheckReport>;

struct Task {
    anchor: &'static str,
    max_g: usize,
    run: TaskFn,
}

const UNLIMITED: usize = usize::MAX;

fn tasks(name: SuiteName) -> Vec<Task> {
    let t = |anchor, max_g, run: TaskFn| Task { anchor, max_g, run };
    match name {
        SuiteName::Brackets => vec![
            t("brackets.triple", OPERATOR_MAX_G, brackets_triple),
            t(
                "brackets.correspondence-forms",
                LIFT_MAX_G,
                brackets_correspondences,
            ),
        ],
        SuiteName::Sl2z => vec![
            t("sl2z.relations", RELATIONS_MAX_G, sl2z_relations),
            t("sl2z.torus-lift", COMPOSE_MAX_G, sl2z_torus),
            t("sl2z.lifts", LIFT_MAX_G, sl2z_lifts),
            t("sl2z.lower-unipotent-kernel", LIFT_MAX_G, sl2z_sigma),
        ],
        SuiteName::Formulas12 => vec![
            t("formulas12.multiplication-by--1", COMPOSE_MAX_G, |e| {
                graph_formulas(e, -1)
            }),
            t("formulas12.multiplication-by-2", COMPOSE_MAX_G, |e| {
                graph_formulas(e, 2)
            }),
            t("formulas12.multiplication-by-3", COMPOSE_MAX_G, |e| {
                graph_formulas(e, 3)
            }),
        ],
        SuiteName::Kunneth => vec![t("kunneth.idempotents", COMPOSE_MAX_G, kunneth)],
        SuiteName::Fourier => vec![
            t("fourier.inversion", LIFT_MAX_G, fourier_inversion),
            t("fourier.degree-swap", LIFT_MAX_G, fourier_degree_swap),
            t("fourier.primitive-blocks", LIFT_MAX_G, fourier_blocks),
            t("fourier.free-modules", UNLIMITED, fourier_free_modules),
        ],
        SuiteName::Lefschetz => vec![
            t("lefschetz.survey", OPERATOR_MAX_G, lefschetz_cohomology),
            t("lefschetz.hard-lefschetz", OPERATOR_MAX_G, hard_lefschetz),
            t("lefschetz.free-survey", UNLIMITED, lefschetz_free),
            t("lefschetz.negative-s", UNLIMITED, negative_s),
            t("lefschetz.filtration", UNLIMITED, filtration),
        ],
        SuiteName::Demazure => vec![
            t("demazure.cohomology", LIFT_MAX_G, demazure_cohomology),
            t("demazure.free-modules", UNLIMITED, demazure_free),
        ],
        SuiteName::Isogeny => vec![t("isogeny.transfer", LIFT_MAX_G, isogeny)],
        SuiteName::All => SuiteName::ALL
            .into_iter()
            .filter(|n| *n != SuiteName::All)
            .flat_map(tasks)
            .collect(),
    }
}

fn task_seed(seed: u64, anchor: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(anchor.as_bytes());
    let bytes: [u8; 8] = h.finalize()[..8].try_into().expect("eight bytes");
    u64::from_le_bytes(bytes)
}

fn digest(parts: &[String]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Sets the global worker count from [`WORKERS_ENV`] when it holds a positive integer.
pub fn configure_workers_from_env() {
    if let Some(n) = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs a suite. Tasks whose limit is below `g` are reported as skipped; when every
/// task is skipped the result is a dimension guard error.
pub fn run_suite(name: SuiteName, ctx: &Arc<PolarizedContext>, seed: u64) -> Result<SuiteReport> {
    let g = ctx.g();
    let (runnable, skipped): (Vec<Task>, Vec<Task>) =
        tasks(name).into_iter().partition(|t| g <= t.max_g);
    if runnable.is_empty() {
        let limit = skipped.iter().map(|t| t.max_g).max().unwrap_or(0);
        return Err(Error::DimensionGuard {
            what: "suite",
            limit,
            g,
        });
    }
    let outputs: Vec<Result<Vec<Record>>> = runnable
        .par_iter()
        .map(|task| {
            let mut env = TaskEnv {
                ctx: ctx.clone(),
                rng: seeded(task_seed(seed, task.anchor)),
                inputs: Vec::new(),
            };
            let report = (task.run)(&mut env)?;
            let mut parts = vec![
                task.anchor.to_string(),
                ctx.to_string(),
                format!("seed={seed}"),
            ];
            parts.extend(env.inputs);
            let inputs_digest = digest(&parts);
            Ok(report
                .items
                .into_iter()
                .map(|item| Record {
                    anchor: task.anchor.to_string(),
                    identity: item.name,
                    inputs_digest: inputs_digest.clone(),
                    passed: item.passed,
                    detail: item.detail,
                })
                .collect())
        })
        .collect();
    let mut records = Vec::new();
    for out in outputs {
        records.extend(out?);
    }
    records.sort_by(|a, b| (&a.anchor, &a.identity).cmp(&(&b.anchor, &b.identity)));
    let mut skipped: Vec<Skipped> = skipped
        .into_iter()
        .map(|t| Skipped {
            anchor: t.anchor.to_string(),
            max_g: t.max_g,
        })
        .collect();
    skipped.sort_by(|a, b| a.anchor.cmp(&b.anchor));
    Ok(SuiteReport {
        suite: name,
        g,
        polarization: ctx.polarization_type().to_vec(),
        seed,
        records,
        skipped,
    })
}

fn brackets_triple(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    let b = check_bracket(action.triple());
    let mut r = CheckReport::new("brackets");
    r.push(
        "[H,X] = 2X, [H,Y] = -2Y, [X,Y] = H",
        b.passed(),
        format!(
            "dimension {}, {} failures",
            action.triple().dim(),
            b.failures.len()
        ),
    );
    Ok(r)
}

fn brackets_correspondences(e: &mut TaskEnv) -> Result<CheckReport> {
    let mut report = lie_algebra_check(&build_action(&e.ctx)?)?;
    report.items.retain(|i| i.name != "brackets");
    Ok(report)
}

fn sl2z_relations(e: &mut TaskEnv) -> Result<CheckReport> {
    sl2z_relations_check(&e.ctx)
}

fn sl2z_torus(e: &mut TaskEnv) -> Result<CheckReport> {
    let mut r = CheckReport::new("torus lifts");
    for t in [2, 3, -1] {
        let c = torus_check(&e.ctx, t)?;
        for item in c.items {
            r.push(format!("{} (t={t})", item.name), item.passed, item.detail);
        }
    }
    Ok(r)
}

fn sl2z_lifts(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    let zs = e.random_classes(action.variety(), 4, 6);
    lift_consistency_check(&action, &zs)
}

fn sl2z_sigma(e: &mut TaskEnv) -> Result<CheckReport> {
    let v = ProductVariety::single(&e.ctx);
    let zs = e.random_classes(&v, 4, 6);
    let mut r = CheckReport::new("lower unipotent kernel");
    for a in [rat(1), rat(2), ratio(-1, 2)] {
        let c = sigma_identity_check(&e.ctx, &a, &zs)?;
        for item in c.items {
            r.push(
                format!("{} (a={})", item.name, format::rational(&a)),
                item.passed,
                item.detail,
            );
        }
    }
    Ok(r)
}

fn graph_formulas(e: &mut TaskEnv, n: i64) -> Result<CheckReport> {
    let ctx = e.ctx.clone();
    let alphas = e.random_corrs(GRAPH_FORMULA_SAMPLES, 6)?;
    let one_n = HomMorphism::scaling_pair(&ctx, 1, n);
    let n_one = HomMorphism::scaling_pair(&ctx, n, 1);
    let (gr, tr) = (graph(&ctx, n), transpose_graph(&ctx, n));
    let mut bad = [0usize; 4];
    for a in &alphas {
        let v = a.value();
        let checks = [
            compose(&gr, a)?.value() == &pushforward(&one_n, v)?,
            compose(&tr, a)?.value() == &pullback(&one_n, v)?,
            compose(a, &gr)?.value() == &pullback(&n_one, v)?,
            compose(a, &tr)?.value() == &pushforward(&n_one, v)?,
        ];
        for (b, ok) in bad.iter_mut().zip(checks) {
            *b += usize::from(!ok);
        }
    }
    let names = [
        format!("graph of {n} o a = (1,{n})_* a"),
        format!("transposed graph of {n} o a = (1,{n})^* a"),
        format!("a o graph of {n} = ({n},1)^* a"),
        format!("a o transposed graph of {n} = ({n},1)_* a"),
    ];
    let mut r = CheckReport::new("graph formulas");
    for (name, b) in names.into_iter().zip(bad) {
        r.push(
            name,
            b == 0,
            format!("{} correspondences, {b} mismatches", alphas.len()),
        );
    }
    Ok(r)
}

fn kunneth(e: &mut TaskEnv) -> Result<CheckReport> {
    let ctx = &e.ctx;
    let pis = kunneth_idempotents(ctx);
    let mut r = CheckReport::new("Kunneth idempotents");
    let sum = pis
        .iter()
        .fold(Correspondence::zero(ctx)?, |acc, p| &acc + p);
    r.push("sum pi_i = [Delta]", sum == diagonal_class(ctx), "");
    let mut bad = 0;
    for (i, a) in pis.iter().enumerate() {
        for (j, b) in pis.iter().enumerate() {
            let prod = compose(a, b)?;
            let ok = if i == j { &prod == a } else { prod.is_zero() };
            bad += usize::from(!ok);
        }
    }
    r.push(
        "pi_i pi_j = delta_ij pi_i",
        bad == 0,
        format!("{} pairs, {bad} failures", pis.len() * pis.len()),
    );
    for k in [2i64, 3] {
        let f = HomMorphism::scaling_pair(ctx, 1, k);
        let mut bad = 0;
        for (i, p) in pis.iter().enumerate() {
            let pulled = pullback(&f, p.value())?;
            bad += usize::from(pulled != p.value().scale(&pow_i(&rat(k), i as i64)));
        }
        r.push(
            format!("(1,{k})^* pi_i = {k}^i pi_i"),
            bad == 0,
            format!("{bad} failures"),
        );
    }
    Ok(r)
}

fn fourier_inversion(e: &mut TaskEnv) -> Result<CheckReport> {
    let ctx = e.ctx.clone();
    let v = ProductVariety::single(&ctx);
    let zs = e.random_classes(&v, INVERSION_SAMPLES, 6);
    let minus = HomMorphism::multiplication(&ctx, -1);
    let sign = if ctx.g().is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    };
    let mut bad = 0;
    for z in &zs {
        let ff = fourier(&fourier(z)?)?;
        bad += usize::from(ff != pullback(&minus, z)?.scale(&sign));
    }
    let mut r = CheckReport::new("Fourier inversion");
    r.push(
        "F(F(z)) = (-1)^g (-1)^* z",
        bad == 0,
        format!("{} classes, {bad} mismatches", zs.len()),
    );
    Ok(r)
}

fn fourier_degree_swap(e: &mut TaskEnv) -> Result<CheckReport> {
    let v = ProductVariety::single(&e.ctx);
    let top = v.top_degree();
    let mut bad = 0;
    let mut count = 0;
    for i in 0..=top {
        for _ in 0..3 {
            let z = random_homogeneous(&v, i, &mut e.rng, 3);
            e.note(render(&z));
            let f = fourier(&z)?;
            count += 1;
            bad += usize::from(f != f.homogeneous(top - i));
        }
    }
    let mut r = CheckReport::new("Fourier degrees");
    r.push(
        "F maps degree i to degree 2g-i",
        bad == 0,
        format!("{count} classes, {bad} failures"),
    );
    Ok(r)
}

fn fourier_blocks(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    let mut r = CheckReport::new("Fourier on primitive blocks");
    for q in 0..=e.ctx.g() as u32 {
        let c = fourier_transform_primitive_check(&action, q)?;
        for item in c.items {
            r.push(format!("{} (q={q})", item.name), item.passed, item.detail);
        }
    }
    Ok(r)
}

fn fourier_free_modules(e: &mut TaskEnv) -> Result<CheckReport> {
    let mut r = CheckReport::new("Fourier on free modules");
    for k in 0..FREE_MODULE_SAMPLES {
        let (_, t) = e.random_module(FREE_MODULE_MAX_LAMBDA)?;
        let mut bad = 0;
        for q in 0..=FREE_MODULE_MAX_LAMBDA {
            bad += fourier_primitive_check(&t, q)?.failures().count();
        }
        r.push(
            format!("w (X^q z/q!) = (-1)^r X^r z/r! on module {}", k + 1),
            bad == 0,
            format!("dimension {}, {bad} failures", t.dim()),
        );
    }
    Ok(r)
}

fn lefschetz_cohomology(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    Ok(lefschetz_survey(&LefschetzModel::Cohomology(&action))?.checks)
}

fn hard_lefschetz(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    let model = LefschetzModel::Cohomology(&action);
    let g = e.ctx.g() as i64;
    let mut r = CheckReport::new("hard Lefschetz");
    for i in 0..=g {
        let s = i % 2;
        let p = ratio(i + s, 2);
        let q = &p + rat(g - i);
        let h = hard_lefschetz_check(&model, &p, &q, s)?;
        r.push(
            format!("x theta^{}: H^{i} -> H^{} bijective", g - i, 2 * g - i),
            h.injective && h.surjective,
            format!(
                "dimensions {} -> {}, rank {}",
                h.source_dim, h.target_dim, h.rank
            ),
        );
    }
    Ok(r)
}

fn lefschetz_free(e: &mut TaskEnv) -> Result<CheckReport> {
    let mut r = CheckReport::new("free module survey");
    for k in 0..3 {
        let max = 2 * e.ctx.g() as u32 + 2;
        let (m, t) = e.random_module(max)?;
        let c = lefschetz_survey(&LefschetzModel::Free(&m, &t))?.checks;
        for item in c.items {
            r.push(
                format!("{} (module {})", item.name, k + 1),
                item.passed,
                item.detail,
            );
        }
    }
    Ok(r)
}

fn negative_s(e: &mut TaskEnv) -> Result<CheckReport> {
    let g = e.ctx.g() as i64;
    let mut r = CheckReport::new("negative weights");
    for p in 0..=g / 2 {
        for s in -2..=1 {
            if g + s - 2 * p < 0 {
                continue;
            }
            r.absorb(negative_s_annihilation_check(g as u32, p, s)?);
        }
    }
    Ok(r)
}

fn filtration(e: &mut TaskEnv) -> Result<CheckReport> {
    let (m, t) = e.random_module(2 * e.ctx.g() as u32 + 2)?;
    let mut ps: Vec<Rational> = Vec::new();
    for z in &m.generators {
        let (p, _) = z.bidegree.clone().expect("random modules carry bidegrees");
        for k in 0..=z.lambda {
            let pk = &p + rat(k as i64);
            if !ps.contains(&pk) {
                ps.push(pk);
            }
        }
    }
    ps.sort();
    let mut r = CheckReport::new("filtered Lefschetz");
    for p in &ps {
        for k in 0..=3 {
            r.absorb(filtration_lefschetz_check(&m, &t, p, &(p + rat(k)))?);
        }
    }
    Ok(r)
}

fn push_demazure(r: &mut CheckReport, d: &DemazureReport, suffix: &str) {
    for (t, ok) in &d.torus_conjugation {
        let t = format::rational(t);
        r.push(format!("h t({t}) = t(1/{t}) h{suffix}"), *ok, "");
    }
    r.push(format!("h^2 = action of -I{suffix}"), d.h_squared, "");
    r.push(
        format!("(u(1) h)^3 = action of -I{suffix}"),
        d.braid_cube,
        "",
    );
}

fn demazure_cohomology(e: &mut TaskEnv) -> Result<CheckReport> {
    let action = build_action(&e.ctx)?;
    let d = fourier_demazure_check(&action)?;
    let mut r = CheckReport::new("Demazure conditions, h = F");
    push_demazure(&mut r, &d, "");
    Ok(r)
}

fn demazure_free(e: &mut TaskEnv) -> Result<CheckReport> {
    let mut r = CheckReport::new("Demazure conditions on free modules, h = w");
    for k in 0..3 {
        let (_, t) = e.random_module(FREE_MODULE_MAX_LAMBDA)?;
        let h = act_operator(&GroupElement::w(), &t)?;
        let d = demazure_check_triple(&t, &h)?;
        push_demazure(&mut r, &d, &format!(" (module {})", k + 1));
    }
    Ok(r)
}

/// Transfers along `π: A → A₀` with `A₀` principal and `π` scaling the
/// `y`-directions by the polarization type.
fn isogeny(e: &mut TaskEnv) -> Result<CheckReport> {
    let ctx = e.ctx.clone();
    let g = ctx.g();
    let principal = PolarizedContext::principal(g);
    let types = ctx.polarization_type();
    let d_matrix: Vec<Vec<i64>> = (0..g)
        .map(|j| {
            (0..g)
                .map(|i| if i == j { types[i] as i64 } else { 0 })
                .collect()
        })
        .collect();
    let pi = HomMorphism::isogeny(&ctx, &principal, &d_matrix)?;
    let pair = pi.product(&pi)?;
    let d = ctx.degree();
    let mut r = CheckReport::new("isogeny transfer");
    r.push(
        "deg pi = d",
        pi.degree() == d,
        format!("deg {}", format::rational(&pi.degree())),
    );

    let v0 = ProductVariety::single(&principal);
    let v = ProductVariety::single(&ctx);
    let lhs = pullback(&pair, diagonal_class(&principal).value())?;
    r.push(
        "(pi,pi)^*[Delta_0] = d [Delta]",
        lhs == diagonal_class(&ctx).value().scale(&d),
        "",
    );
    let lhs = pullback(&pair, diagonal_push(&theta(&v0)?.exp()?)?.value())?;
    let rhs = diagonal_push(&theta(&v)?.exp()?)?.value().scale(&d);
    r.push(
        "(pi,pi)^* Delta_* e^theta_0 = d Delta_* e^theta",
        lhs == rhs,
        "",
    );
    let pair0 = ProductVariety::new(&principal, 2)?;
    let pair1 = ProductVariety::new(&ctx, 2)?;
    let lhs = pullback(&pair, &poincare_class(&pair0)?.exp()?)?;
    r.push(
        "(pi,pi)^* e^wp_0 = e^wp",
        lhs == poincare_class(&pair1)?.exp()?,
        "",
    );
    let one = Rational::one();
    r.push(
        "transfer of phi_0(u(1)) = phi(u(1))",
        isogeny_transfer(&pi, &phi_upper(&principal, &one)?)? == phi_upper(&ctx, &one)?,
        "",
    );
    r.push(
        "transfer of phi_0(w) = phi(w)",
        isogeny_transfer(&pi, &phi_w(&principal)?)? == phi_w(&ctx)?,
        "",
    );
    Ok(r)
}
