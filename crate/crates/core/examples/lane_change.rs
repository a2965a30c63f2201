//! MOBIL decisions for an overtaking manoeuvre at different politeness levels.
//!
//! A car is stuck 70 m behind a slightly slower vehicle in the right lane and considers
//! moving left, where a faster follower approaches from behind.

use hetflow::model::{
    eidm_acceleration, mobil_decision, mobil_incentive, mobil_safety_ok, ControllerParams, LaneChangeContext,
    LaneDirection, LongitudinalContext,
};

fn main() -> hetflow::Result<()> {
    let base = ControllerParams::midrange();
    let ego_v = 22.0;
    let slow_v = 21.0;

    let acc_ego_now = eidm_acceleration(&base, &LongitudinalContext::new(ego_v, 70.0, ego_v - slow_v, 0.0))?;
    let acc_ego_after = eidm_acceleration(&base, &LongitudinalContext::free(ego_v))?;

    for follower_gap in [80.0, 40.0, 8.0] {
        let follower_v = 28.0;
        let follower_now = eidm_acceleration(&base, &LongitudinalContext::free(follower_v))?;
        let follower_after = eidm_acceleration(
            &base,
            &LongitudinalContext::new(follower_v, follower_gap, follower_v - ego_v, acc_ego_after),
        )?;
        let old_follower_now = eidm_acceleration(&base, &LongitudinalContext::new(20.0, 120.0, 20.0 - ego_v, acc_ego_now))?;
        let old_follower_after =
            eidm_acceleration(&base, &LongitudinalContext::new(20.0, 120.0 + 70.0 + base.length, 20.0 - slow_v, 0.0))?;

        println!("new follower {follower_gap:.0} m behind at {follower_v} m/s:");
        for p in [0.0, 0.5, 1.0] {
            let params = ControllerParams { p, ..base };
            let ctx = LaneChangeContext {
                acc_ego_now,
                acc_ego_after,
                acc_newfollower_now: follower_now,
                acc_newfollower_after: follower_after,
                acc_oldfollower_now: old_follower_now,
                acc_oldfollower_after: old_follower_after,
                direction: LaneDirection::TowardFaster,
                congested: false,
            };
            println!(
                "  p = {p:.1}: ego gain {:+.2}, follower change {:+.2}, safe = {}, incentive = {} -> {}",
                ctx.ego_advantage(),
                ctx.new_follower_delta(),
                mobil_safety_ok(&ctx, &params),
                mobil_incentive(&ctx, &params),
                if mobil_decision(&ctx, &params) { "change" } else { "stay" }
            );
        }
    }
    Ok(())
}
