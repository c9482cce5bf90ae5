use dirtyperiod::shor::{
    build_period_finding, continued_fractions, dense_phase_distribution, factor, find_period, mod_pow, sample_once,
    ShorParams,
};

#[test]
fn semiclassical_matches_dense_reference() {
    let params = ShorParams::new(15, 2).unwrap();
    let pf = build_period_finding(params).unwrap();
    let trials = 4096;
    let mut hist = vec![0usize; 1 << params.p];
    for seed in 0..trials {
        let (s, _) = sample_once(&pf, 0, seed as u64).unwrap();
        hist[s as usize] += 1;
    }
    let dense = dense_phase_distribution(15, 2, params.p).unwrap();
    let tv: f64 = hist.iter().zip(&dense).map(|(&h, &d)| (h as f64 / trials as f64 - d).abs()).sum::<f64>() / 2.0;
    assert!(tv <= 0.05, "total variation {tv}");
    let quarter = (1usize << params.p) / 4;
    let near: usize = hist
        .iter()
        .enumerate()
        .filter(|(s, _)| {
            let off = s % quarter;
            off <= 2 || quarter - off <= 2
        })
        .map(|(_, &h)| h)
        .sum();
    assert!(near as f64 / trials as f64 >= 0.7);
}

#[test]
fn fixup_restores_every_dirty_value() {
    let params = ShorParams::new(15, 2).unwrap();
    let pf = build_period_finding(params).unwrap();
    for dirty in 0..8u64 {
        for seed in 0..64 {
            let (_, state) = sample_once(&pf, dirty, seed).unwrap();
            let want = pf.layout.y.place(0, dirty);
            assert!((state.probability(want) - 1.0).abs() < 1e-9, "dirty={dirty} seed={seed}");
        }
    }
}

#[test]
fn trivial_run_leaves_everything() {
    let params = ShorParams::new(15, 2).unwrap().with_p(0);
    let pf = build_period_finding(params).unwrap();
    let (s, state) = sample_once(&pf, 5, 0).unwrap();
    assert_eq!(s, 0);
    assert!((state.probability(pf.layout.y.place(0, 5)) - 1.0).abs() < 1e-9);
}

#[test]
fn period_of_two_mod_21() {
    let params = ShorParams::new(21, 2).unwrap();
    let result = find_period(params, 10, 4).unwrap();
    assert_eq!(result.period, Some(6));
    assert_eq!(mod_pow(2, 6, 21), 1);
    assert!(continued_fractions(171, 10, 21).contains(&6));
}

#[test]
fn factoring_succeeds_in_most_batches() {
    for (r, want) in [(15u64, (3u64, 5u64)), (21, (3, 7))] {
        let batches = 8;
        let ok = (0..batches).filter(|&seed| factor(r, 10, seed as u64).unwrap().factors == Some(want)).count();
        assert!(ok * 2 >= batches, "R={r}: {ok}/{batches} batches succeeded");
    }
}
