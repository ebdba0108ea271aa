//! End-to-end verification suite. Each test checks one claim about the
//! construction at desk scale, with exact arithmetic and stated time
//! budgets, and prints a one-line summary (visible with `--nocapture`).

use std::collections::HashMap;
use std::time::{Duration, Instant};

use flimit_core::construct::{
    build_generators, capital_words, lower_words, std_w, std_x, std_y, GeneratorSet, Params,
};
use flimit_core::normalform::{closed_form_z_w_p, to_normal_form, NormalForm};
use flimit_core::plmap::{Interval, PLMap};
use flimit_core::verify::{
    ball_check, coverage_check, distance_bound, escape_check, generation_check, ping_pong_certify,
    relator_check, support_analysis, twin_equalities, CoverVerdict, Verdict,
};
use flimit_core::words::{enumerate_reduced, Alphabet, Letter, Word};
use flimit_core::Dyadic;

fn gens(m: u32, b: u32) -> GeneratorSet {
    build_generators(&Params::new(m, b).unwrap())
}

fn d(n: i64) -> Dyadic {
    Dyadic::from(n)
}

fn dq(n: i64, num: i64, exp: u32) -> Dyadic {
    &d(n) + &Dyadic::ratio(num, exp)
}

fn std_assign(g: u32) -> Option<PLMap> {
    Some(std_x(g))
}

#[test]
fn closed_form_rewrites() {
    let start = Instant::now();
    let q_expect = NormalForm::from_runs(vec![(1, 2), (2, 1)], vec![(1, 3)]).unwrap();
    let h_expect = NormalForm::from_runs(vec![(2, 1)], vec![(1, 1)]).unwrap();
    let k_expect = NormalForm::from_runs(vec![(1, 1), (2, 1)], vec![(1, 2)]).unwrap();
    for m in 2..=6u32 {
        let p = Params::new(m, 20).unwrap();
        let i = p.conj_depth();
        let low = lower_words(&p);
        let [z, w, pw] = closed_form_z_w_p(i).unwrap();
        assert_eq!(to_normal_form(&low.z).unwrap(), z, "z closed form at m={m}");
        assert_eq!(to_normal_form(&low.w).unwrap(), w, "w closed form at m={m}");
        assert_eq!(
            to_normal_form(&low.p).unwrap(),
            pw,
            "p closed form at m={m}"
        );
        assert_eq!(to_normal_form(&low.q).unwrap(), q_expect, "q at m={m}");
        assert_eq!(to_normal_form(&low.h).unwrap(), h_expect, "h at m={m}");
        assert_eq!(to_normal_form(&low.k).unwrap(), k_expect, "k at m={m}");

        // two intermediate stations of the same derivation chain:
        // c^i = x0^2 x1^2i x_{2i+1}^-2 x_{2i-1}^-2 ... x3^-2 x0^-2
        let mut ci_neg: Vec<(u32, u32)> = (1..=i).rev().map(|j| (2 * j + 1, 2)).collect();
        ci_neg.push((0, 2));
        let ci_expect = NormalForm::from_runs(vec![(0, 2), (1, 2 * i)], ci_neg).unwrap();
        assert_eq!(
            to_normal_form(&low.c.pow(i as i32)).unwrap(),
            ci_expect,
            "c^i at m={m}"
        );
        // x1^-1 p x1 = x0^3 x1^{2i+1} x_{2i+5}^2 x_{2i+6}^-1 x_{2i+4}^-1
        //              x2^-1 x1^-2i x0^-3
        let x1w = Word::parse("x1").unwrap();
        let conj = x1w.inverse().concat(&low.p).concat(&x1w);
        let conj_expect = NormalForm::from_runs(
            vec![(0, 3), (1, 2 * i + 1), (2 * i + 5, 2)],
            vec![(2 * i + 6, 1), (2 * i + 4, 1), (2, 1), (1, 2 * i), (0, 3)],
        )
        .unwrap();
        assert_eq!(
            to_normal_form(&conj).unwrap(),
            conj_expect,
            "x1^-1 p x1 at m={m}"
        );
    }
    // depths below the parameter grid still rewrite to the closed forms
    for i in 3..=5u32 {
        let tab = flimit_core::construct::WordTable::at_depth(i).unwrap();
        let [z, w, pw] = closed_form_z_w_p(i).unwrap();
        let re = |w: &Word| w.retag(Alphabet::X);
        assert_eq!(to_normal_form(&re(&tab.z)).unwrap(), z, "z at depth {i}");
        assert_eq!(to_normal_form(&re(&tab.w)).unwrap(), w, "w at depth {i}");
        assert_eq!(to_normal_form(&re(&tab.p)).unwrap(), pw, "p at depth {i}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "[PASS] rewriting engine reproduces the closed forms of z, w, p and q, h, k for m=2..6 and depths 3..5 ({elapsed:?})"
    );
}

#[test]
fn tail_separation_facts() {
    // every lower-case word acts only inside [0, 9], the capital words fix
    // 9 and agree with their twins there
    let p = Params::new(5, 20).unwrap();
    let g = gens(5, 20);
    let low = lower_words(&p);
    let nine = Interval::closed(d(0), d(9)).unwrap();
    for (name, w) in low.named() {
        let map = w.to_map(std_assign).unwrap();
        let hull = map.support_hull_beyond(&d(0)).unwrap();
        if let Some(h) = hull {
            assert!(
                h.hi.as_ref().is_some_and(|hi| *hi <= d(9)),
                "{name} acts beyond 9"
            );
        }
    }
    let cap = flimit_core::verify::capital_tower(&g);
    let lowt = flimit_core::verify::lower_tower(&g);
    for ((name, cm), (_, lm)) in cap.named().iter().zip(lowt.named().iter()) {
        if ["C", "S", "T"].contains(name) {
            assert_eq!(cm.evaluate(&d(9)).unwrap(), d(9), "{name} must fix 9");
            assert!(
                cm.agree_on(lm, &nine).unwrap(),
                "{name} differs from twin on [0,9]"
            );
        }
    }
    println!(
        "[PASS] lower-case words supported in [0,9]; capital C, S, T fix 9 and agree with their twins there"
    );
}

#[test]
fn word_pair_equalities_grid() {
    let start = Instant::now();
    for m in 2..=6u32 {
        for b in [20u32, 24] {
            let rep = twin_equalities(&gens(m, b)).unwrap();
            assert!(rep.pass, "m={m} b={b}: {rep:?}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "[PASS] Z, W, P, Q, H, K equal their lower-case twins as exact maps for m=2..6, b=20,24 ({elapsed:?})"
    );
}

#[test]
fn recovered_relators_grid() {
    for m in 2..=6u32 {
        for b in [20u32, 24] {
            let rep = relator_check(&gens(m, b)).unwrap();
            assert!(rep.pass, "m={m} b={b}: {rep:?}");
        }
    }
    println!("[PASS] H = w_1^-1 and K = y_1^-1 as exact maps for m=2..6, b=20,24");
}

#[test]
fn support_extent_grid() {
    for m in 2..=6u32 {
        for b in [20u32, 24] {
            let g = gens(m, b);
            let rep = support_analysis(&g).unwrap();
            let bi = i64::from(b);
            let xi = i64::from(g.params.xi());
            let c_expect = Interval::open(dq(bi, -9, 1), dq(xi, 3, 1)).unwrap();
            let st_expect = Interval::open(dq(bi, -5, 1), dq(xi, 9, 3)).unwrap();
            assert_eq!(rep.c, c_expect, "C support at m={m} b={b}");
            assert_eq!(rep.s, st_expect, "S support at m={m} b={b}");
            assert_eq!(rep.t, st_expect, "T support at m={m} b={b}");
            let window = Interval::open(dq(xi, 19, 4), dq(xi, 3, 1)).unwrap();
            for (name, part) in [("Sigma", &rep.sigma), ("Theta", &rep.theta)] {
                assert!(part.is_subset_of(&window), "{name} at m={m} b={b}: {part}");
                assert!(!part.overlaps(&rep.s), "{name} vs S at m={m} b={b}");
                assert!(!part.overlaps(&rep.t), "{name} vs T at m={m} b={b}");
            }
        }
    }
    println!(
        "[PASS] supports beyond b-5: C = (b-4.5, b+4m+3.5), S = T = (b-2.5, b+4m+3.125); Sigma, Theta confined past b+4m+3.1875 and disjoint from S, T"
    );
}

#[test]
fn escape_inequality() {
    let g = gens(5, 20);
    let step = Dyadic::ratio(1, 4); // 1/16
    let rep = escape_check(&g, &step).unwrap();
    assert!(rep.pass, "witness: {:?}", rep.witness);
    // [16.5, 43.5] on a 1/16 grid is 433 points
    assert_eq!(rep.grid_points, 433);
    assert!(rep.breakpoints_checked > 0);
    assert!(rep.min_image > dq(43, 3, 4));
    println!(
        "[PASS] every eta in [16.5, 43.5] (1/16 grid and all breakpoints of C^7) satisfies eta C^7 > 43 3/16; min image {}",
        rep.min_image
    );
}

#[test]
fn no_short_relations() {
    // guaranteed range: lengths up to 2m-4 (vacuous at m=2, where no
    // nonempty word qualifies)
    for m in 3..=5u32 {
        let g = gens(m, 20);
        let rep = ball_check(&g.pair(), 2 * m - 4, 1);
        assert!(rep.shortest_relation.is_none(), "m={m}: {rep:?}");
    }
    // the boundary length 2m-3 also carries no relation at m=5 and m=6
    let start = Instant::now();
    let rep5 = ball_check(&gens(5, 20).pair(), 7, 1);
    let t5 = start.elapsed();
    assert!(rep5.shortest_relation.is_none(), "{rep5:?}");
    assert_eq!(rep5.words_checked, 4372);
    assert!(t5 < Duration::from_secs(10), "m=5 scan took {t5:?}");

    let start = Instant::now();
    let rep6 = ball_check(&gens(6, 20).pair(), 9, 1);
    let t6 = start.elapsed();
    assert!(rep6.shortest_relation.is_none(), "{rep6:?}");
    assert_eq!(rep6.words_checked, 39364);
    assert!(t6 < Duration::from_secs(60), "m=6 scan took {t6:?}");
    println!(
        "[PASS] no relation among reduced words: length <= 2m-4 for m=2..5, length <= 7 at m=5 (4372 words, {t5:?}), length <= 9 at m=6 (39364 words, {t6:?})"
    );
}

#[test]
fn ping_pong_soundness() {
    let g = gens(4, 20);
    let radius = g.params.ball_radius() as usize; // 5
    let mut certified = 0u32;
    let mut inconclusive = 0u32;
    for w in enumerate_reduced(2, radius as u32) {
        if w.is_empty() {
            continue;
        }
        let state = ping_pong_certify(&g, &w).unwrap();
        let map = w.to_map(|i| g.assign(i)).unwrap();
        match state.verdict {
            Verdict::Certified => {
                certified += 1;
                assert!(!map.is_identity(), "certified relation?! {w}");
            }
            Verdict::Inconclusive => {
                inconclusive += 1;
                // everything of length <= 2m-4 must certify
                assert!(w.len() >= radius, "short word not certified: {w}");
            }
        }
    }
    assert_eq!(certified + inconclusive, 2 * 3u32.pow(5) - 2);
    println!(
        "[PASS] ping-pong certificates at m=4: {certified} certified (all non-identity by brute force), {inconclusive} inconclusive, full coverage through length 4"
    );
}

#[test]
fn standard_marking_contrast() {
    // the pair (x0, x1) satisfies the 10-letter commutator relator
    // [x0 x1^-1, x0^-1 x1 x0]
    let relator = Word::parse("x0 x1^-1 x0^-1 x1 x0 x1 x0^-1 x0^-1 x1^-1 x0").unwrap();
    assert!(relator.is_reduced());
    assert_eq!(relator.len(), 10);
    assert!(relator.to_map(std_assign).unwrap().is_identity());

    let pair = [std_x(0), std_x(1)];
    let rep = ball_check(&pair, 10, 1);
    let rel = rep
        .shortest_relation
        .as_ref()
        .expect("a relation exists at length <= 10");
    assert_eq!(
        rel.length, 10,
        "exhaustive scan: no relation shorter than the relator"
    );
    let found = Word::parse(&rel.word).unwrap();
    assert!(found.is_reduced());
    assert!(found.to_map(|i| Some(std_x(i))).unwrap().is_identity());

    let bound = distance_bound(&pair, 10, 1);
    assert_eq!(bound.r, 9);
    assert_eq!(bound.bound, "e^-9");
    println!(
        "[PASS] standard marking (x0, x1): shortest relation has length 10 ({}), distance bound e^-9",
        rel.word
    );
}

#[test]
fn cross_semantics_corpus() {
    // 1000 pseudo-random words, length <= 12, indices <= 4, fixed seed
    let mut seed: u64 = 0x0005_1f0a_2b3c_4d5e;
    let mut rng = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed
    };
    let words: Vec<Word> = (0..1000)
        .map(|_| {
            let len = (rng() % 13) as usize;
            let letters: Vec<Letter> = (0..len)
                .map(|_| Letter::new((rng() % 5) as u32, rng() % 2 == 0))
                .collect();
            Word::from_letters(letters, Alphabet::X)
        })
        .collect();

    let mut by_map: HashMap<PLMap, Vec<usize>> = HashMap::new();
    let mut by_nf: HashMap<NormalForm, Vec<usize>> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let map = w.to_map(std_assign).unwrap();
        let nf = to_normal_form(w).unwrap();
        assert!(nf.is_normal(), "occurrence condition violated on word {i}");
        assert_eq!(nf.to_map(), map, "semantics disagree on word {i}: {w}");
        by_map.entry(map).or_default().push(i);
        by_nf.entry(nf).or_default().push(i);
    }
    // the two equivalences induce the same partition, so normal-form
    // equality coincides with map equality across all pairs
    fn canon(parts: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let mut parts = parts;
        parts.iter_mut().for_each(|p| p.sort_unstable());
        parts.sort();
        parts
    }
    let map_classes = canon(by_map.into_values().collect());
    let nf_classes = canon(by_nf.into_values().collect());
    assert_eq!(map_classes, nf_classes);
    println!(
        "[PASS] 1000-word corpus: normal-form map equals direct evaluation on every word; the two equality notions induce the same {} classes",
        map_classes.len()
    );
}

#[test]
fn generation_hypotheses() {
    let g = gens(5, 20);
    let delta = Dyadic::one().mul_pow2(-20);
    let rep = generation_check(&g, &delta, &d(60), 256).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.corrections_compact);
    let h0 = rep.x0_correction_support.as_ref().unwrap();
    assert!(h0.lo > d(0) && h0.hi.is_some());
    let h1 = rep.x1_correction_support.as_ref().unwrap();
    assert!(h1.lo > d(0) && h1.hi.is_some());
    assert_eq!(rep.coverage.verdict, CoverVerdict::Covered);
    println!(
        "[PASS] generation at m=5, b=20: corrections supported in {} and {}, relators recovered, orbit of (1,3) covers (2^-20, 60] in {} rounds",
        h0, h1, rep.coverage.iterations
    );
}

#[test]
fn distance_convergence() {
    let mut bounds = Vec::new();
    for m in 2..=5u32 {
        let g = gens(m, 20);
        let n = g.params.ball_radius();
        let bnd = distance_bound(&g.pair(), n, 1);
        assert_eq!(bnd.r, n, "m={m}: expected no relation through length {n}");
        bounds.push(bnd.r);
    }
    assert_eq!(bounds, vec![1, 3, 5, 7]);
    // strictly decreasing upper bounds e^-1 > e^-3 > e^-5 > e^-7
    assert!(bounds.windows(2).all(|w| w[0] < w[1]));
    println!(
        "[PASS] distance bounds for m=2,3,4,5: e^-1, e^-3, e^-5, e^-7 — strictly decreasing toward the free 2-marking"
    );
}

// independent spot oracle: the coverage example with an immediate target
#[test]
fn coverage_example() {
    let g = gens(5, 20);
    let rep = coverage_check(&g, &Dyadic::ratio(1, 1), &d(3), 4).unwrap();
    assert_eq!(rep.verdict, CoverVerdict::Covered);
    assert_eq!(rep.iterations, 1);
    println!("[PASS] coverage of (1/2, 3] from (1,3) needs a single round of images");
}

// the H/K identities also hold letter-by-letter over the expanded words
#[test]
fn capital_words_evaluate_like_towers() {
    let g = gens(2, 20);
    let cap = capital_words(&g.params);
    let h = cap.h.to_map(|i| g.assign(i)).unwrap();
    assert_eq!(h, std_w(1).invert());
    let k = cap.k.to_map(|i| g.assign(i)).unwrap();
    assert_eq!(k, std_y(1).invert());
    println!("[PASS] expanded capital words H, K evaluate to w_1^-1, y_1^-1 directly");
}
