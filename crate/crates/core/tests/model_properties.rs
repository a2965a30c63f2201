use hetflow::model::{
    eidm_acceleration, idm_acceleration, idm_acceleration_with_floor, mobil_decision, ControllerParams,
    LaneChangeContext, LaneDirection, LongitudinalContext,
};
use proptest::prelude::*;

fn controller() -> impl Strategy<Value = ControllerParams> {
    (20.0..45.0f64, 1.0..3.0f64, 1.0..6.0f64, 2.0..8.0f64, 2.0..5.0f64, 1.0..6.0f64, 0.0..0.99f64).prop_map(
        |(v0, t, a, b, delta, s0, c)| ControllerParams { v0, t, a, b, delta, s0, c, ..ControllerParams::midrange() },
    )
}

fn lane_change() -> impl Strategy<Value = LaneChangeContext> {
    (
        prop::array::uniform6(-9.0..4.0f64),
        prop_oneof![Just(LaneDirection::TowardFaster), Just(LaneDirection::TowardSlower)],
        any::<bool>(),
    )
        .prop_map(|(a, direction, congested)| LaneChangeContext {
            acc_ego_now: a[0],
            acc_ego_after: a[1],
            acc_newfollower_now: a[2],
            acc_newfollower_after: a[3],
            acc_oldfollower_now: a[4],
            acc_oldfollower_after: a[5],
            direction,
            congested,
        })
}

proptest! {
    #[test]
    fn idm_non_decreasing_in_gap(p in controller(), v in 0.0..45.0f64, dv in -15.0..15.0f64, s in 0.5..200.0f64, ds in 0.0..50.0f64) {
        let near = idm_acceleration(&p, &LongitudinalContext::new(v, s, dv, 0.0)).unwrap();
        let far = idm_acceleration(&p, &LongitudinalContext::new(v, s + ds, dv, 0.0)).unwrap();
        prop_assert!(far >= near);
    }

    #[test]
    fn idm_non_increasing_in_approach_rate(p in controller(), v in 0.0..45.0f64, dv in -15.0..15.0f64, ddv in 0.0..10.0f64, s in 0.5..200.0f64) {
        let slow = idm_acceleration(&p, &LongitudinalContext::new(v, s, dv, 0.0)).unwrap();
        let fast = idm_acceleration(&p, &LongitudinalContext::new(v, s, dv + ddv, 0.0)).unwrap();
        prop_assert!(fast <= slow);
    }

    #[test]
    fn idm_never_exceeds_max_acceleration_or_floor(p in controller(), v in 0.0..45.0f64, dv in -15.0..15.0f64, s in 0.01..200.0f64) {
        let acc = idm_acceleration_with_floor(&p, &LongitudinalContext::new(v, s, dv, 0.0), 9.0).unwrap();
        prop_assert!(acc <= p.a && acc >= -9.0);
    }

    #[test]
    fn zero_coolness_is_plain_idm(p in controller(), v in 0.0..45.0f64, dv in -15.0..15.0f64, s in 0.5..200.0f64, la in -5.0..3.0f64) {
        let p = ControllerParams { c: 0.0, ..p };
        let ctx = LongitudinalContext::new(v, s, dv, la);
        prop_assert_eq!(eidm_acceleration(&p, &ctx).unwrap(), idm_acceleration(&p, &ctx).unwrap());
    }

    #[test]
    fn coolness_never_brakes_harder(p in controller(), v in 0.0..45.0f64, dv in -15.0..15.0f64, s in 0.5..200.0f64, la in -5.0..3.0f64) {
        let ctx = LongitudinalContext::new(v, s, dv, la);
        prop_assert!(eidm_acceleration(&p, &ctx).unwrap() >= idm_acceleration(&p, &ctx).unwrap());
    }

    #[test]
    fn free_road_equilibrium_for_any_coolness(p in controller()) {
        let ctx = LongitudinalContext::free(p.v0);
        prop_assert_eq!(eidm_acceleration(&p, &ctx).unwrap(), 0.0);
        prop_assert_eq!(idm_acceleration(&p, &LongitudinalContext::free(0.0)).unwrap(), p.a);
    }

    #[test]
    fn selfish_drivers_ignore_followers(ctx in lane_change(), other in lane_change(), a_delta in 0.0..1.0f64, a_bias in 0.0..1.0f64) {
        let params = ControllerParams { p: 0.0, a_delta, a_bias, b_safe: 100.0, ..ControllerParams::midrange() };
        let mixed = LaneChangeContext {
            acc_newfollower_now: other.acc_newfollower_now,
            acc_newfollower_after: other.acc_newfollower_after,
            acc_oldfollower_now: other.acc_oldfollower_now,
            acc_oldfollower_after: other.acc_oldfollower_after,
            ..ctx
        };
        prop_assert_eq!(mobil_decision(&ctx, &params), mobil_decision(&mixed, &params));
    }

    #[test]
    fn full_politeness_is_symmetric_in_followers(ctx in lane_change(), a_delta in 0.0..1.0f64, a_bias in 0.0..1.0f64) {
        let params = ControllerParams { p: 1.0, a_delta, a_bias, b_safe: 100.0, ..ControllerParams::midrange() };
        let swapped = LaneChangeContext {
            acc_newfollower_now: ctx.acc_oldfollower_now,
            acc_newfollower_after: ctx.acc_oldfollower_after,
            acc_oldfollower_now: ctx.acc_newfollower_now,
            acc_oldfollower_after: ctx.acc_newfollower_after,
            ..ctx
        };
        prop_assert_eq!(mobil_decision(&ctx, &params), mobil_decision(&swapped, &params));
    }

    #[test]
    fn unsafe_changes_are_always_refused(ctx in lane_change(), b_safe in 0.5..8.0f64) {
        let params = ControllerParams { b_safe, p: 0.0, a_delta: 0.0, a_bias: 0.0, ..ControllerParams::midrange() };
        if ctx.acc_newfollower_after < -b_safe {
            prop_assert!(!mobil_decision(&ctx, &params));
        }
    }
}
