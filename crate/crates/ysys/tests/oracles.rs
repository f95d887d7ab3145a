//! Frozen values checked against independent computations.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use ysys::contfrac::{build_table, verify_cf_identities, InputSequence, SystemKind};
use ysys::geometry::{build, MIndex};
use ysys::schedule::{prepare, run_y, StepChecks};
use ysys::seeds::{ExactPositiveRational, Semifield};
use ysys::solutions::{generation_counts, m_values, rogers_l};
use ysys::ysystems::claimed_period;

fn table(n: &[u64]) -> ysys::ContinuedFractionTable {
    build_table(&InputSequence::new(n.to_vec()).unwrap())
}

fn big(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

/// `[c_0; c_1, ..., c_k]` evaluated by nested fractions.
fn nested(cs: &[u64]) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(*cs.last().unwrap()));
    for &c in cs.iter().rev().skip(1) {
        acc = BigRational::from_integer(BigInt::from(c)) + acc.recip();
    }
    acc
}

#[test]
fn running_example_table() {
    let t = table(&[6, 4, 3]);
    let p: Vec<u64> = (1..=3).map(|a| t.pi(a) as u64).collect();
    let q: Vec<String> = (1..=3).map(|a| t.q(1, a).to_string()).collect();
    assert_eq!(p, [1, 6, 25]);
    assert_eq!(q, ["6", "25", "81"]);
    assert_eq!((t.ri(1), t.ri(2), t.ri(3)), (106, 17, 4));
    assert_eq!(t.p(2, 3).to_string(), "4");
    assert_eq!(t.q(2, 3).to_string(), "13");
    assert!(verify_cf_identities(&t).all_passed());
}

#[test]
fn convergents_match_nested_fractions() {
    for n in [&[6u64, 4, 3][..], &[2, 3, 1, 2], &[7, 3, 4, 3], &[3, 9, 1, 9, 2, 5]] {
        let t = table(n);
        for a in 1..=n.len() {
            let rev: Vec<u64> = n[..a].iter().rev().copied().collect();
            let ratio = BigRational::new(big(t.q(1, a)), big(t.p(1, a)));
            assert_eq!(ratio, nested(&rev), "{n:?} a={a}");
        }
        let mut tail = n.to_vec();
        *tail.last_mut().unwrap() += 1;
        assert_eq!(BigRational::new(big(t.r(1)), big(t.r(2))), nested(&tail), "{n:?}");
    }
}

#[test]
fn polygon_sizes() {
    let rsg = build(&table(&[6, 4, 3]), SystemKind::Rsg).unwrap();
    let sg = build(&table(&[6, 4, 3]), SystemKind::Sg).unwrap();
    assert_eq!((rsg.r, rsg.len()), (106, 103));
    assert_eq!((sg.r, sg.len()), (106, 106));
}

/// Direct iteration of `Y_m(u+1) Y_m(u-1) = (1 + Y_(m-1)(u))(1 + Y_(m+1)(u))`.
fn a_type_orbit(rank: usize, steps: usize) -> Vec<Vec<BigRational>> {
    let one = BigRational::one();
    let mut rows: Vec<Vec<BigRational>> = vec![
        (0..rank).map(|m| BigRational::new(BigInt::from(m as i64 + 2), BigInt::from(3))).collect(),
        (0..rank).map(|m| BigRational::new(BigInt::from(5), BigInt::from(m as i64 + 4))).collect(),
    ];
    for u in 1..steps {
        let prev = &rows[u - 1];
        let cur = &rows[u];
        let get = |m: isize| if m < 0 || m >= rank as isize { BigRational::zero() } else { cur[m as usize].clone() };
        let next = (0..rank as isize).map(|m| (&one + get(m - 1)) * (&one + get(m + 1)) / &prev[m as usize]).collect();
        rows.push(next);
    }
    rows
}

#[test]
fn a_type_periodicity_matches_claim() {
    for n1 in 3..=7u64 {
        let t = table(&[n1]);
        let (period, _) = claimed_period(&t, SystemKind::Rsg);
        let rank = n1 as usize - 2;
        let rows = a_type_orbit(rank, 3 * period as usize);
        let step = period as usize;
        let first = (1..=step).find(|&d| rows[d] == rows[0] && rows[d + 1] == rows[1]).unwrap();
        let minimal = if n1 == 3 { 4 } else { 2 * (n1 as usize + 1) };
        assert_eq!(first, minimal, "n1={n1}");
    }
}

#[test]
fn trajectory_agrees_with_direct_recursion() {
    // the trajectory for (6) restricted to one class is the A_4 recursion above
    let t = table(&[6]);
    let geo = prepare(&t, SystemKind::Rsg, -2, 30, StepChecks::default()).unwrap();
    let y0: Vec<ExactPositiveRational> = (0..4).map(|i| ExactPositiveRational::from_ratio(i + 2, 7)).collect();
    let vals = run_y(&geo, y0).unwrap();
    let y = |m: u32, u: i64| geo.occurs(1, MIndex::Num(m), u).and_then(|k| vals.at(k, u)).cloned();
    for u in 1..26i64 {
        for m in 1..=4u32 {
            let (Some(lo), Some(hi)) = (y(m, u - 1), y(m, u + 1)) else { continue };
            let side = |k: u32| if (1..=4).contains(&k) { y(k, u).unwrap().one_plus() } else { lo.one_like() };
            assert_eq!(lo.mul(&hi), side(m - 1).mul(&side(m + 1)), "m={m} u={u}");
        }
    }
}

#[test]
fn rogers_special_values() {
    let pi2 = std::f64::consts::PI.powi(2);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    assert!((rogers_l(phi).unwrap() - pi2 / 10.0).abs() < 1e-13);
    assert!((rogers_l(phi * phi).unwrap() - pi2 / 15.0).abs() < 1e-13);
    assert!((rogers_l(0.5).unwrap() - pi2 / 12.0).abs() < 1e-14);
    // L(1/3) from the integral -1/2 int_0^x (ln(1-t)/t + ln t/(1-t)) dt
    let x = 1.0 / 3.0;
    let n = 200_000;
    let h = x / n as f64;
    let f = |t: f64| (-t).ln_1p() / t + t.ln() / (1.0 - t);
    let mut s = 0.0;
    for i in 0..n {
        let t = (i as f64 + 0.5) * h;
        s += f(t);
    }
    let quad = -0.5 * s * h;
    assert!((rogers_l(x).unwrap() - quad).abs() < 1e-4);
}

#[test]
fn counting_closed_forms() {
    assert_eq!(m_values(&table(&[6]), SystemKind::Rsg), (8, 20));
    assert_eq!(m_values(&table(&[6, 4]), SystemKind::Rsg), (156, 92));
    assert_eq!(m_values(&table(&[6, 4, 3]), SystemKind::Rsg), (534, 632));
    assert_eq!(m_values(&table(&[6]), SystemKind::Sg), (7, 42));
    assert_eq!(m_values(&table(&[6, 4, 3]), SystemKind::Sg), (530, 954));
    for kind in [SystemKind::Rsg, SystemKind::Sg] {
        let t = table(&[6, 4, 3]);
        let (mp, mm) = m_values(&t, kind);
        let gens = generation_counts(&t, kind);
        assert_eq!(gens.iter().map(|g| g.1).sum::<i64>(), mp + mm);
        assert_eq!(gens.iter().map(|g| g.2).sum::<i64>(), mp);
    }
}
