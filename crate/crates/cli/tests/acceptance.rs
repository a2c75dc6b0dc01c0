//! The eleven acceptance criteria, each checked exactly and reported on one line.

use std::process::{Command, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use sl2chow::abvar::{
    fourier, poincare_class, pullback, pushforward, theta, HomMorphism, PolarizedContext,
    ProductVariety,
};
use sl2chow::action::{
    act_closed_form, build_action, fourier_demazure_check, sl2z_relations_check,
};
use sl2chow::corr::{
    compose, diagonal_class, diagonal_push, graph, kunneth_idempotents, transpose_graph,
    Correspondence,
};
use sl2chow::exactla::{pow_i, rat, ratio};
use sl2chow::lefschetz::{
    fourier_primitive_check, fourier_transform_primitive_check, hard_lefschetz_check,
    lefschetz_survey, LefschetzModel,
};
use sl2chow::random::{
    random_class, random_free_module, random_group_element, seeded, small_rational,
};
use sl2chow::sl2rep::{act_operator, check_bracket, demazure_check_triple, GroupElement};
use sl2chow::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn ctx(t: &[u64]) -> Arc<PolarizedContext> {
    PolarizedContext::new(t.len(), t.to_vec()).unwrap()
}

fn pair(c: &Arc<PolarizedContext>) -> ProductVariety {
    ProductVariety::new(c, 2).unwrap()
}

fn bracket_suite() -> Outcome {
    let types: [&[u64]; 9] = [
        &[1],
        &[2],
        &[1, 1],
        &[1, 2],
        &[2, 2],
        &[1, 1, 1],
        &[1, 1, 2],
        &[1, 2, 2],
        &[2, 2, 2],
    ];
    let start = Instant::now();
    let mut bad = Vec::new();
    for t in types {
        let a = build_action(&ctx(t))?;
        let report = check_bracket(a.triple());
        if !report.passed() {
            bad.push(format!("{t:?}: {report}"));
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(10);
    Ok((
        bad.is_empty() && fast,
        format!(
            "{} models, {} failures, {elapsed:.2?} (limit 10s)",
            types.len(),
            bad.len()
        ),
    ))
}

fn sl2z_relations() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for t in [&[1u64][..], &[1, 1], &[1, 2]] {
        let report = sl2z_relations_check(&ctx(t))?;
        bad += report.failures().count();
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    Ok((
        bad == 0 && fast,
        format!("(g,d) in (1,1), (2,1), (2,2); {bad} failures, {elapsed:.2?} (limit 60s)"),
    ))
}

fn demazure_conditions() -> Outcome {
    let mut bad = 0;
    let mut count = 0;
    for t in [&[1u64][..], &[2], &[1, 1], &[1, 2], &[1, 1, 1]] {
        let a = build_action(&ctx(t))?;
        count += 1;
        bad += usize::from(!fourier_demazure_check(&a)?.passed());
    }
    let mut rng = seeded(3);
    for g in 1..=5 {
        let (_, t) = random_free_module(g, 10, &mut rng)?;
        let h = act_operator(&GroupElement::w(), &t)?;
        count += 1;
        bad += usize::from(!demazure_check_triple(&t, &h)?.passed());
    }
    Ok((
        bad == 0,
        format!("t in {{2,3,-1}}, {count} carriers, {bad} failures"),
    ))
}

fn two_path_agreement() -> Outcome {
    let mut rng = seeded(4);
    let types: [&[u64]; 4] = [&[1], &[2], &[1, 2], &[2, 2]];
    let mut bad = 0;
    for k in 0..20 {
        let a = build_action(&ctx(types[k % types.len()]))?;
        let m = random_group_element(&mut rng);
        let z = random_class(a.variety(), &mut rng, 6);
        if a.act_bruhat(&m, &z)? != a.act_general(&m, &z)? {
            bad += 1;
        }
        let shapes = [
            GroupElement::upper(small_rational(&mut rng)),
            GroupElement::lower(small_rational(&mut rng)),
            GroupElement::torus(small_rational(&mut rng))?,
            GroupElement::w(),
            GroupElement::w().inverse(),
        ];
        for s in shapes {
            if act_closed_form(&s, &z)? != a.act_general(&s, &z)? {
                bad += 1;
            }
        }
    }
    Ok((
        bad == 0,
        format!("20 random matrices and classes, g <= 2, {bad} mismatches"),
    ))
}

fn fourier_on_primitives() -> Outcome {
    let mut bad = 0;
    let mut blocks = 0;
    for t in [&[1u64][..], &[2], &[1, 1], &[1, 2], &[1, 1, 1], &[1, 1, 2]] {
        let a = build_action(&ctx(t))?;
        for q in 0..=t.len() as u32 {
            let r = fourier_transform_primitive_check(&a, q)?;
            blocks += 1;
            bad += r.failures().count();
        }
    }
    let mut rng = seeded(5);
    for k in 0..10 {
        let (_, t) = random_free_module(1 + k % 4, 10, &mut rng)?;
        for q in 0..=10 {
            blocks += 1;
            bad += fourier_primitive_check(&t, q)?.failures().count();
        }
    }
    Ok((
        bad == 0,
        format!("cohomology g <= 3 and 10 free modules, {blocks} (model, q) pairs, {bad} failures"),
    ))
}

fn lefschetz_predicates() -> Outcome {
    let mut bad = Vec::new();
    for t in [
        &[1u64][..],
        &[1, 1],
        &[1, 2],
        &[1, 1, 1],
        &[1, 1, 2],
        &[1, 1, 1, 1],
    ] {
        let a = build_action(&ctx(t))?;
        let model = LefschetzModel::Cohomology(&a);
        let survey = lefschetz_survey(&model)?;
        if !survey.checks.passed() {
            bad.push(format!("{t:?} survey"));
        }
        let g = t.len() as i64;
        for i in 0..=g {
            let s = i % 2;
            let p = ratio(i + s, 2);
            let q = &p + rat(g - i);
            let r = hard_lefschetz_check(&model, &p, &q, s)?;
            if !(r.injective && r.surjective && r.source_dim > 0) {
                bad.push(format!("{t:?} i={i}"));
            }
        }
    }
    let mut rng = seeded(6);
    for g in 1..=4 {
        let (m, t) = random_free_module(g, 2 * g + 2, &mut rng)?;
        if !lefschetz_survey(&LefschetzModel::Free(&m, &t))?
            .checks
            .passed()
        {
            bad.push(format!("free module g={g}"));
        }
    }
    Ok((
        bad.is_empty(),
        format!("cohomology g <= 4 with theta^(g-i) bijective, 4 free modules; failures: {bad:?}"),
    ))
}

fn graph_formulas() -> Outcome {
    let mut rng = seeded(7);
    let mut bad = 0;
    let mut count = 0;
    for t in [&[1u64][..], &[1, 2]] {
        let c = ctx(t);
        let pv = pair(&c);
        for n in [-1i64, 2, 3] {
            let one_n = HomMorphism::scaling_pair(&c, 1, n);
            let n_one = HomMorphism::scaling_pair(&c, n, 1);
            let (gr, tr) = (graph(&c, n), transpose_graph(&c, n));
            for _ in 0..20 {
                let a = Correspondence::new(random_class(&pv, &mut rng, 6))?;
                let v = a.value();
                let ok = compose(&gr, &a)?.value() == &pushforward(&one_n, v)?
                    && compose(&tr, &a)?.value() == &pullback(&one_n, v)?
                    && compose(&a, &gr)?.value() == &pullback(&n_one, v)?
                    && compose(&a, &tr)?.value() == &pushforward(&n_one, v)?;
                count += 1;
                bad += usize::from(!ok);
            }
        }
    }
    Ok((
        bad == 0,
        format!("n in {{-1,2,3}}, {count} correspondences, {bad} failures"),
    ))
}

fn kunneth() -> Outcome {
    let mut bad = 0;
    for t in [&[1u64][..], &[2], &[1, 1], &[1, 2], &[1, 1, 1], &[1, 1, 2]] {
        let c = ctx(t);
        let pis = kunneth_idempotents(&c);
        let sum = pis
            .iter()
            .fold(Correspondence::zero(&c)?, |acc, p| &acc + p);
        bad += usize::from(sum != diagonal_class(&c));
        for (i, a) in pis.iter().enumerate() {
            for (j, b) in pis.iter().enumerate() {
                let prod = compose(a, b)?;
                let ok = if i == j { &prod == a } else { prod.is_zero() };
                bad += usize::from(!ok);
            }
            for k in [2i64, 3] {
                let pulled = pullback(&HomMorphism::scaling_pair(&c, 1, k), a.value())?;
                bad += usize::from(pulled != a.value().scale(&pow_i(&rat(k), i as i64)));
            }
        }
    }
    Ok((bad == 0, format!("g <= 3, k in {{2,3}}, {bad} failures")))
}

fn isogeny() -> Outcome {
    let a = ctx(&[1, 2]);
    let a0 = ctx(&[1, 1]);
    let pi = HomMorphism::isogeny(&a, &a0, &[vec![1, 0], vec![0, 2]])?;
    let pp = pi.product(&pi)?;
    let t0 = theta(&ProductVariety::single(&a0))?;
    let t = theta(&ProductVariety::single(&a))?;
    let lhs = pullback(&pp, diagonal_push(&t0.exp()?)?.value())?;
    let first = lhs == diagonal_push(&t.exp()?)?.value().scale(&rat(2));
    let lhs = pullback(&pp, &poincare_class(&pair(&a0))?.exp()?)?;
    let second = lhs == poincare_class(&pair(&a))?.exp()?;
    Ok((
        first && second,
        format!("E^2, pi = diag(1,2): Delta_* e^theta {first}, e^wp {second}"),
    ))
}

fn fourier_inversion() -> Outcome {
    let mut rng = seeded(10);
    let mut bad = 0;
    for t in [&[1u64][..], &[1, 2], &[1, 1, 2]] {
        let c = ctx(t);
        let v = ProductVariety::single(&c);
        let minus = HomMorphism::multiplication(&c, -1);
        let sign = if t.len() % 2 == 0 { rat(1) } else { rat(-1) };
        for _ in 0..50 {
            let z = random_class(&v, &mut rng, 8);
            let ff = fourier(&fourier(&z)?)?;
            bad += usize::from(ff != pullback(&minus, &z)?.scale(&sign));
        }
    }
    Ok((
        bad == 0,
        format!("50 classes for each g in 1..=3, {bad} failures"),
    ))
}

fn cli(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sl2chow"));
    cmd.args(args);
    if let Some(w) = workers {
        cmd.env("SL2CHOW_WORKERS", w);
    }
    cmd.output().expect("binary runs")
}

fn cli_golden() -> Outcome {
    let mut notes = Vec::new();
    let out = cli(&["fourier", "--g", "1", "--type", "1", "--expr", "1"], None);
    let fourier_ok = out.status.success() && out.stdout == b"-theta\n";
    notes.push(format!("fourier golden {fourier_ok}"));

    let out = cli(
        &["suite", "all", "--g", "1", "--type", "1", "--seed", "7"],
        None,
    );
    let suite_ok = out.status.code() == Some(0);
    notes.push(format!("suite all exit {:?}", out.status.code()));

    let args = [
        "suite",
        "all",
        "--g",
        "1",
        "--type",
        "1",
        "--seed",
        "7",
        "--format",
        "structured",
    ];
    let first = cli(&args, Some("1"));
    let second = cli(&args, Some("4"));
    let same = first.status.success() && !first.stdout.is_empty() && first.stdout == second.stdout;
    notes.push(format!("structured reports identical {same}"));

    Ok((fourier_ok && suite_ok && same, notes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("sl2 brackets on cohomology models", bracket_suite),
        ("SL2(Z) relations in Corr(A)", sl2z_relations),
        ("Demazure conditions", demazure_conditions),
        ("closed form and factored action agree", two_path_agreement),
        (
            "Fourier transform on primitive blocks",
            fourier_on_primitives,
        ),
        ("Lefschetz predicates", lefschetz_predicates),
        ("graph formulas for multiplication maps", graph_formulas),
        ("Kunneth idempotents", kunneth),
        ("isogeny transfer", isogeny),
        ("Fourier inversion", fourier_inversion),
        ("CLI golden output and determinism", cli_golden),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        let mark = if passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark}: {name} ({detail})", k + 1);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
