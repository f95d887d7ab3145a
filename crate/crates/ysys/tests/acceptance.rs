//! Acceptance criteria 1 to 10; prints one PASS/FAIL line per criterion.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ysys::contfrac::{build_table, verify_cf_identities, ContinuedFractionTable, InputSequence, SystemKind};
use ysys::geometry::{build, ArcLabel, Axis, MIndex};
use ysys::report::Report;
use ysys::schedule::prepare;
use ysys::seeds::{initial_tropical, log2_ratio_rounded, ExactPositiveRational, ExchangeMatrix, TropicalLaurent, YSeed};
use ysys::solutions::{quad_vertices, rogers_l};
use ysys::verify::{self, Mode, RunConfig};

type Outcome = Result<(), String>;

fn table(n: &[u64]) -> ContinuedFractionTable {
    build_table(&InputSequence::new(n.to_vec()).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(rep: &Report, ctx: &str) -> Outcome {
    match rep.first_failure() {
        None if !rep.checks.is_empty() => Ok(()),
        None => Err(format!("{ctx}: no checks ran")),
        Some(c) => Err(format!("{ctx}: {} ({})", c.name, c.detail)),
    }
}

fn exact(kind: SystemKind) -> RunConfig {
    RunConfig { kind, mode: Mode::Exact, seed: 0, seeds: 3, window: None }
}

fn random_sequence(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let f = rng.gen_range(1..=6);
    let mut n: Vec<u64> = (0..f).map(|_| rng.gen_range(1..=9)).collect();
    n[0] = rng.gen_range(2..=9);
    if n == [2] {
        n[0] = 3;
    }
    n
}

fn criterion_1() -> Outcome {
    let t = table(&[6, 4, 3]);
    let p: Vec<i64> = (1..=3).map(|a| t.pi(a)).collect();
    let q: Vec<String> = (1..=3).map(|a| t.q(1, a).to_string()).collect();
    ensure(p == [1, 6, 25], || format!("p = {p:?}"))?;
    ensure(q == ["6", "25", "81"], || format!("q = {q:?}"))?;
    ensure((t.ri(1), t.ri(2), t.ri(3)) == (106, 17, 4), || "r values".into())?;
    ensure(t.p(2, 3).to_string() == "4" && t.q(2, 3).to_string() == "13", || "second row".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = random_sequence(&mut rng);
        passed(&verify_cf_identities(&table(&n)), &format!("{n:?}"))?;
    }
    Ok(())
}

fn quiver(labels: &[ArcLabel], arrows: &[(ArcLabel, ArcLabel)], order: &[ArcLabel]) -> ExchangeMatrix {
    let mut b = ExchangeMatrix::zeros(labels.len());
    let idx = |l: &ArcLabel| order.iter().position(|x| x == l).unwrap();
    for (s, t) in arrows {
        b.add_skew(idx(s), idx(t), 1);
    }
    b
}

fn criterion_2() -> Outcome {
    for n in [&[6u64][..], &[6, 4], &[6, 4, 3], &[2, 3], &[7, 3, 4, 3]] {
        let t = table(n);
        let r = t.ri(1) as usize;
        let rsg = build(&t, SystemKind::Rsg).map_err(|e| e.to_string())?;
        let sg = build(&t, SystemKind::Sg).map_err(|e| e.to_string())?;
        ensure(rsg.len() == r - 3 && sg.len() == r, || format!("{n:?}: {} / {} arcs", rsg.len(), sg.len()))?;
    }
    let t = table(&[6]);
    let l = |m: u32| ArcLabel::num(1, m, 0);
    let rsg = build(&t, SystemKind::Rsg).unwrap();
    let want = quiver(&rsg.labels(), &[(l(1), l(2)), (l(3), l(2)), (l(3), l(4))], &rsg.labels());
    ensure(rsg.exchange_matrix() == want, || format!("A4: {:?}", rsg.exchange_matrix()))?;
    let sg = build(&t, SystemKind::Sg).unwrap();
    let b1 = ArcLabel::new(1, MIndex::Bar1, 0);
    let b2 = ArcLabel::new(1, MIndex::Bar2, 0);
    let arrows = [(l(1), l(2)), (l(3), l(2)), (l(3), l(4)), (b1, l(0)), (b2, l(0)), (l(1), l(0))];
    let want = quiver(&sg.labels(), &arrows, &sg.labels());
    ensure(sg.exchange_matrix() == want, || format!("D7: {:?}", sg.exchange_matrix()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let starts = [(vec![6u64], SystemKind::Sg), (vec![6, 4], SystemKind::Rsg), (vec![6, 4], SystemKind::Sg), (vec![3, 2, 2], SystemKind::Sg)];
    let mut flips = 0;
    for (n, kind) in starts.iter().cycle() {
        if flips >= 1000 {
            break;
        }
        let mut g = build(&table(n), *kind).unwrap();
        for _ in 0..50 {
            let k = rng.gen_range(0..g.len());
            let next = g.flip_index(k).map_err(|e| e.to_string())?;
            ensure(next.exchange_matrix() == g.exchange_matrix().mutate(k).unwrap(), || format!("{n:?} {kind}: flip {k}"))?;
            g = next;
            flips += 1;
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    for n in [&[6u64, 4, 3][..], &[6, 4, 3, 3], &[6, 3, 4, 3], &[7, 4, 3, 3], &[7, 3, 4, 3]] {
        let t = table(n);
        let r = t.ri(1) as usize;
        let r2 = t.ri(2) as usize;
        for kind in [SystemKind::Rsg, SystemKind::Sg] {
            let g = build(&t, kind).map_err(|e| e.to_string())?;
            for u in [0, -1] {
                ensure(g.quasi_symmetric(&Axis::z(u, r, r2)), || format!("{n:?} {kind}: Z({u})"))?;
            }
            let tree = g.interval_tree().ok_or("no interval tree")?;
            tree.trinity(r2).map_err(|e| format!("{n:?}: {e}"))?;
            passed(&tree.verify(&t), &format!("{n:?} intervals"))?;
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    for n in [&[3u64][..], &[6], &[2, 3], &[6, 4], &[6, 4, 3], &[3, 1, 2]] {
        let t = table(n);
        for kind in [SystemKind::Rsg, SystemKind::Sg] {
            passed(&verify::schedule(&t, &exact(kind)).map_err(|e| e.to_string())?, &format!("{n:?} {kind}"))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let rsg: [&[u64]; 6] = [&[3], &[6], &[7], &[2, 3], &[6, 4], &[6, 4, 3]];
    let sg: [&[u64]; 4] = [&[6], &[7], &[6, 4], &[6, 4, 3]];
    for (kind, list) in [(SystemKind::Rsg, &rsg[..]), (SystemKind::Sg, &sg[..])] {
        for n in list {
            let rep = verify::ysystem(&table(n), &exact(kind)).map_err(|e| e.to_string())?;
            ensure(rep.checks.len() == 3, || "three seeds".into())?;
            passed(&rep, &format!("{n:?} {kind}"))?;
        }
    }
    Ok(())
}

fn period_named(rep: &Report, needle: &str) -> Outcome {
    ensure(rep.checks.iter().any(|c| c.name.contains(needle) && c.passed), || format!("no passing check named {needle}"))
}

fn criterion_6() -> Outcome {
    for n in [&[3u64][..], &[6], &[7], &[2, 3], &[6, 4], &[6, 4, 3]] {
        let t = table(n);
        let rep = verify::periodicity(&t, &exact(SystemKind::Rsg)).map_err(|e| e.to_string())?;
        passed(&rep, &format!("{n:?} rsg"))?;
        let want = if *n == [3] { 4 } else { 2 * t.ri(1) };
        period_named(&rep, &format!("period {want} is minimal"))?;
    }
    let rep = verify::periodicity(&table(&[6]), &exact(SystemKind::Rsg)).map_err(|e| e.to_string())?;
    period_named(&rep, "Y_m(u+7) = Y_(n1-1-m)(u)")?;
    let rep = verify::periodicity(&table(&[6, 4]), &exact(SystemKind::Sg)).map_err(|e| e.to_string())?;
    passed(&rep, "(6,4) sg")?;
    period_named(&rep, "puncture labels swap at 62")?;
    period_named(&rep, "period 124 is minimal")?;
    let rep = verify::periodicity(&table(&[6, 4, 3]), &exact(SystemKind::Sg)).map_err(|e| e.to_string())?;
    passed(&rep, "(6,4,3) sg")?;
    period_named(&rep, "period 212 is minimal")
}

fn criterion_7() -> Outcome {
    for n in [&[6u64][..], &[6, 4], &[6, 4, 3]] {
        let rep = verify::crossratio(&table(n), &exact(SystemKind::Rsg)).map_err(|e| e.to_string())?;
        ensure(rep.checks.len() == 9, || format!("{n:?}: {} checks", rep.checks.len()))?;
        passed(&rep, &format!("{n:?}"))?;
    }
    let t = table(&[6, 4, 3]);
    let q = quad_vertices(&t, 2, MIndex::Num(1), 1).map_err(|e| e.to_string())?;
    ensure(q.alpha - q.beta == 6 && q.gamma - q.delta == 6, || format!("{q:?}"))
}

fn criterion_8() -> Outcome {
    let cases: [(&[u64], SystemKind, (i64, i64)); 5] = [
        (&[6], SystemKind::Rsg, (8, 20)),
        (&[6, 4], SystemKind::Rsg, (156, 92)),
        (&[6, 4, 3], SystemKind::Rsg, (534, 632)),
        (&[6], SystemKind::Sg, (7, 42)),
        (&[6, 4, 3], SystemKind::Sg, (530, 954)),
    ];
    for (n, kind, want) in cases {
        let cfg = RunConfig { mode: Mode::Float, ..exact(kind) };
        let (rep, reports) = verify::dilog(&table(n), &cfg).map_err(|e| e.to_string())?;
        passed(&rep, &format!("{n:?} {kind}"))?;
        for d in &reports {
            ensure((d.n_plus, d.n_minus) == want, || format!("{n:?} {kind}: N = ({}, {})", d.n_plus, d.n_minus))?;
            ensure((d.s_plus - want.0 as f64).abs() < 1e-6 && (d.s_minus - want.1 as f64).abs() < 1e-6, || {
                format!("{n:?} {kind}: S = ({}, {})", d.s_plus, d.s_minus)
            })?;
        }
    }
    for n in [&[3u64][..], &[6], &[2, 3], &[6, 4], &[6, 4, 3], &[6, 4, 3, 3], &[7, 3, 4, 3]] {
        let t = table(n);
        let want = BigRational::new(BigInt::from(t.ri(2)), BigInt::from(t.ri(1)));
        ensure(t.a_f() == want, || format!("{n:?}: A_F = {}", t.a_f()))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let cases: [(&[u64], SystemKind); 5] =
        [(&[6], SystemKind::Rsg), (&[6, 4], SystemKind::Rsg), (&[6, 4, 3], SystemKind::Rsg), (&[6], SystemKind::Sg), (&[6, 4], SystemKind::Sg)];
    for (n, kind) in cases {
        passed(&verify::tsystem(&table(n), &exact(kind)).map_err(|e| e.to_string())?, &format!("{n:?} {kind}"))?;
    }
    Ok(())
}

fn random_matrix(rng: &mut ChaCha8Rng) -> ExchangeMatrix {
    let n = rng.gen_range(2..=8);
    let mut b = ExchangeMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            b.add_skew(i, j, rng.gen_range(-1..=1));
        }
    }
    b
}

fn criterion_10() -> Outcome {
    const BITS: u32 = 512;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..200 {
        let b = random_matrix(&mut rng);
        let n = b.size();
        let ks: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let exact: Vec<ExactPositiveRational> = ks
            .iter()
            .map(|&k| {
                let p = BigInt::from(1) << (BITS as usize * k.unsigned_abs() as usize);
                let c = BigRational::from_integer(BigInt::from(rng.gen_range(1..=9)));
                ExactPositiveRational(if k >= 0 { c / p } else { c * p })
            })
            .collect();
        let mut e = YSeed::new(b.clone(), exact);
        let mut t = YSeed::new(b.clone(), ks.iter().map(|&k| TropicalLaurent(vec![k])).collect());
        let mut c = initial_tropical(b);
        let len = rng.gen_range(1..=10);
        for _ in 0..len {
            if e.b.max_abs() > 8 {
                break;
            }
            let k = rng.gen_range(0..n);
            e.mutate_in_place(k).map_err(|x| x.to_string())?;
            t.mutate_in_place(k).map_err(|x| x.to_string())?;
            c.mutate_in_place(k).map_err(|x| x.to_string())?;
            for i in 0..n {
                ensure(-log2_ratio_rounded(&e.y[i].0, BITS) == t.y[i].0[0], || format!("case {case}: tropicalization at {i}"))?;
                c.y[i].sign().map_err(|x| format!("case {case}: {x}"))?;
            }
        }
    }
    // sign coherence along the schedule itself
    for (n, kind) in [(vec![6u64, 4, 3], SystemKind::Rsg), (vec![6, 4, 3], SystemKind::Sg)] {
        let t = table(&n);
        let r = t.ri(1);
        let geo = prepare(&t, kind, 0, 2 * r, Default::default()).map_err(|e| e.to_string())?;
        let trop = ysys::schedule::run_y(&geo, initial_tropical(geo.b0.clone()).y).map_err(|e| e.to_string())?;
        for v in trop.values.values() {
            v.sign().map_err(|x| format!("{n:?} {kind}: {x}"))?;
        }
    }
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    for _ in 0..1000 {
        let x: f64 = rng.gen();
        let d = (rogers_l(x).unwrap() + rogers_l(1.0 - x).unwrap() - z2).abs();
        ensure(d <= 1e-12, || format!("Euler identity at {x}: {d:e}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("continued fractions", criterion_1),
        ("geometry", criterion_2),
        ("quasi-symmetry and trinity", criterion_3),
        ("schedule laws", criterion_4),
        ("Y-system relations", criterion_5),
        ("periodicity", criterion_6),
        ("cross-ratio solution", criterion_7),
        ("dilogarithm identities and counting", criterion_8),
        ("T-systems", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(()) => println!("PASS criterion {}: {name}", i + 1),
            Err(e) => {
                println!("FAIL criterion {}: {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
