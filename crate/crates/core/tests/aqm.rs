use proptest::prelude::*;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use softaqm::aqm::{
    codel_step, convex_red_pprime, CodelDecision, CodelParams, CodelSoftState, ConvexRedConfig,
};
use softaqm::{
    decide, Decision, MarkingMode, PiControllerState, PiGains, Probability, SoftTargetCurve,
};

fn controller(alpha: f64, beta: f64, q0: f64, q1: f64) -> PiControllerState {
    PiControllerState::new(
        PiGains {
            alpha,
            beta,
            period: 0.016,
        },
        SoftTargetCurve::new(q0, q1).unwrap(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn probability_stays_in_unit_interval(
        alpha in 0.001..5.0_f64,
        beta in 0.001..50.0_f64,
        q1 in 0.0..0.5_f64,
        inputs in prop::collection::vec(0.0..2.0_f64, 1..200),
    ) {
        let mut pi = controller(alpha, beta, 0.01, q1);
        for q in inputs {
            let p = pi.update(q).unwrap();
            prop_assert!((0.0..=1.0).contains(&p.value()));
            prop_assert!((0.0..=1.0).contains(&pi.p_prime().value()));
            prop_assert_eq!(p.value(), pi.p_prime().value() * pi.p_prime().value());
        }
    }

    #[test]
    fn larger_delay_never_lowers_probability(
        p0 in 0.0..1.0_f64,
        q_prev in 0.0..0.2_f64,
        q in 0.0..0.2_f64,
        dq in 0.0..0.1_f64,
    ) {
        let base = controller(0.25, 2.5, 0.01, 0.095).with_history(Probability::new(p0).unwrap(), q_prev);
        let (mut lo, mut hi) = (base, base);
        let a = lo.update(q).unwrap();
        let b = hi.update(q + dq).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn target_between_bounds(q0 in 0.001..0.1_f64, q1 in 0.0..0.2_f64, pp in 0.0..=1.0_f64) {
        let curve = SoftTargetCurve::new(q0, q1).unwrap();
        let t = curve.target_from_pprime(Probability::new(pp).unwrap());
        prop_assert!(t >= q0 && t <= q0 + q1);
    }

    #[test]
    fn red_is_monotone(q_max in 0.001..1.0_f64, exp in 1.0..4.0_f64, a in 0.0..2.0_f64, b in 0.0..2.0_f64) {
        let cfg = ConvexRedConfig::new(q_max, exp).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(convex_red_pprime(&cfg, lo) <= convex_red_pprime(&cfg, hi));
    }

    #[test]
    fn codel_target_within_span(
        sojourns in prop::collection::vec(0.0..0.2_f64, 1..500),
        gap in 0.0001..0.01_f64,
    ) {
        let params = CodelParams::default();
        let mut state = CodelSoftState::new(params).unwrap();
        let mut now = 0.0;
        for s in sojourns {
            now += gap;
            state = codel_step(state, s, now).0;
            let t = state.target();
            prop_assert!(t >= params.base_target && t <= params.base_target + params.span);
        }
    }
}

#[test]
fn codel_never_drops_below_target() {
    let mut state = CodelSoftState::new(CodelParams::default()).unwrap();
    for i in 0..10_000 {
        assert_eq!(
            state.step(0.004, f64::from(i) * 0.001),
            CodelDecision::Forward
        );
    }
}

#[test]
fn soft_codel_drops_less_than_fixed() {
    let run = |span| {
        let mut state = CodelSoftState::new(CodelParams {
            span,
            ..CodelParams::default()
        })
        .unwrap();
        (0..20_000)
            .filter(|&i| state.step(0.012, f64::from(i) * 0.001) == CodelDecision::Drop)
            .count()
    };
    let fixed = run(0.0);
    let soft = run(0.095);
    assert!(fixed > 0);
    assert!(soft <= fixed, "soft {soft} fixed {fixed}");
}

#[test]
fn decide_signals_match_mode() {
    let mut rng = Pcg64::seed_from_u64(3);
    assert_eq!(
        decide(Probability::ONE, MarkingMode::Drop, true, &mut rng),
        Decision::Drop
    );
    assert_eq!(
        decide(
            Probability::ONE,
            MarkingMode::ClassicEcnMark,
            true,
            &mut rng
        ),
        Decision::Mark
    );
    assert_eq!(
        decide(
            Probability::ONE,
            MarkingMode::ClassicEcnMark,
            false,
            &mut rng
        ),
        Decision::Drop
    );
    assert_eq!(
        decide(
            Probability::ZERO,
            MarkingMode::ClassicEcnMark,
            true,
            &mut rng
        ),
        Decision::Forward
    );
}
