//! IDM and E-IDM accelerations in a few textbook situations.
//!
//! Run with `cargo run --example car_following`.

use hetflow::model::{eidm_acceleration, idm_acceleration, idm_desired_gap, ControllerParams, LongitudinalContext};

fn main() -> hetflow::Result<()> {
    let params = ControllerParams::midrange();
    println!(
        "controller: v0 = {:.1} m/s, T = {} s, a = {:.2} m/s², b = {:.2} m/s², s0 = {:.2} m, c = {}",
        params.v0, params.t, params.a, params.b, params.s0, params.c
    );

    let cases = [
        ("start from rest, free road", LongitudinalContext::free(0.0)),
        ("cruising at v0, free road", LongitudinalContext::free(params.v0)),
        ("following at equilibrium-ish gap", LongitudinalContext::new(25.0, 60.0, 0.0, 0.0)),
        ("approaching a stopped car", LongitudinalContext::new(25.0, 80.0, 25.0, 0.0)),
        ("cut-in, leader speeding up", LongitudinalContext::new(25.0, 12.0, 0.0, 1.0)),
        ("cut-in, leader braking", LongitudinalContext::new(25.0, 12.0, 0.0, -2.0)),
    ];

    println!("{:<36} {:>10} {:>10} {:>10}", "situation", "s* (m)", "IDM", "E-IDM");
    for (label, ctx) in cases {
        let s_star = if ctx.has_leader() { idm_desired_gap(&params, ctx.v, ctx.dv) } else { f64::NAN };
        println!(
            "{label:<36} {s_star:>10.2} {:>10.3} {:>10.3}",
            idm_acceleration(&params, &ctx)?,
            eidm_acceleration(&params, &ctx)?
        );
    }
    Ok(())
}
