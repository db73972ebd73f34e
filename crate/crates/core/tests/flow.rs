use curvature_flow::curvature::ratio_from_g;
use curvature_flow::flow::{monitors, run, FlowConfig, FlowState, RescaleMode, Termination};
use curvature_flow::geometry::{make_ball, make_spheroid, sphere_deviation, SupportProfile};
use curvature_flow::speeds::SpeedFunction;

fn evolve(n: usize, speed: &SpeedFunction, t_end: f64) -> SupportProfile {
    let cfg = FlowConfig { n, t_end: Some(t_end), stop_inradius_fraction: 0.01, ..Default::default() };
    let out = run(&make_spheroid(2.0, 1.0, n).unwrap(), speed, &cfg).unwrap();
    assert_eq!(out.termination, Termination::TimeLimit);
    assert_eq!(out.final_state.t, t_end);
    out.final_state.profile
}

/// Largest difference on the nodes shared with a grid of half the size.
fn nested_gap(coarse: &SupportProfile, fine: &SupportProfile) -> f64 {
    let (c, f) = (coarse.values(), fine.values());
    c.iter().enumerate().map(|(j, v)| (v - f[2 * j]).abs()).fold(0.0, f64::max)
}

#[test]
fn spheroid_flow_converges_at_second_order() {
    for name in ["mean", "gauss"] {
        let speed: SpeedFunction = name.parse().unwrap();
        let s: Vec<SupportProfile> = [33, 65, 129, 257].iter().map(|&n| evolve(n, &speed, 0.05)).collect();
        let gaps: Vec<f64> = s.windows(2).map(|w| nested_gap(&w[0], &w[1])).collect();
        let orders: Vec<f64> = gaps.windows(2).map(|g| (g[0] / g[1]).log2()).collect();
        assert!(orders.iter().all(|&p| p > 1.8 && p < 2.3), "{name}: gaps {gaps:?}, orders {orders:?}");
    }
}

#[test]
fn degree_one_runs_keep_pinching_and_speed_monotone() {
    let n = 64;
    for speed in SpeedFunction::degree_one_catalog() {
        let cfg = FlowConfig { n, record_every: 5, stop_inradius_fraction: 0.2, ..Default::default() };
        let out = run(&make_spheroid(1.5, 1.0, n).unwrap(), &speed, &cfg).unwrap();
        assert_eq!(out.termination, Termination::InradiusThreshold, "{speed}");
        let r = &out.records;
        assert!(r.len() > 10);
        for w in r.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].g_max <= w[0].g_max + 1e-6, "{speed}: g_max rose at t = {}", w[1].t);
            assert!(w[1].f_min >= w[0].f_min - 1e-6, "{speed}: f_min fell at t = {}", w[1].t);
        }
        assert!(r.last().unwrap().g_max < r[0].g_max);
        assert!(r.iter().all(|m| m.r_plus / m.r_minus < 2.0));
    }
}

#[test]
fn spheroid_monitors() {
    let state = FlowState::new(make_spheroid(2.0, 1.0, 512).unwrap());
    let m = monitors(&state, &SpeedFunction::mean()).unwrap();
    assert!((m.pinch - 4.0).abs() < 1e-3, "{}", m.pinch);
    assert!((ratio_from_g(m.g_max).unwrap() - m.pinch).abs() < 1e-9);
    assert!((m.r_minus - 1.0).abs() < 1e-6 && (m.r_plus - 2.0).abs() < 1e-6);
    // κ_par − κ_mer = s − s³/4 on this spheroid, largest at s = 2/√3
    let kdiff = 4.0 / (3.0 * 3f64.sqrt());
    assert!((m.kdiff_max - kdiff).abs() < 1e-4, "{}", m.kdiff_max);

    let ball = monitors(&FlowState::new(make_ball(1.0, 64).unwrap()), &SpeedFunction::gauss()).unwrap();
    assert!(ball.g_max < 1e-24 && (ball.pinch - 1.0).abs() < 1e-12 && ball.sphere_dev < 1e-9);
    assert!((ball.f_min - 1.0).abs() < 1e-12);
}

#[test]
fn rescaled_states_approach_unit_sphere() {
    let n = 128;
    for mode in [RescaleMode::ByInradius, RescaleMode::ByExtinctionLaw] {
        let cfg = FlowConfig { n, rescale_mode: mode, stop_inradius_fraction: 0.1, ..Default::default() };
        let out = run(&make_spheroid(1.3, 1.0, n).unwrap(), &SpeedFunction::harmonic(), &cfg).unwrap();
        let p = out.rescaled.expect("rescaled state");
        assert!(sphere_deviation(&p) < 0.05);
        let s = p.values();
        let mid = s[n / 2];
        assert!((mid - 1.0).abs() < 0.1, "{mode}: equatorial radius {mid}");
    }
}

#[test]
fn ball_extinction_time_is_recovered() {
    for (name, alpha, t_exact) in [("mean", 1.0, 0.5), ("gauss", 2.0, 1.0 / 3.0)] {
        let speed: SpeedFunction = name.parse().unwrap();
        let cfg = FlowConfig { n: 64, stop_inradius_fraction: 0.1, ..Default::default() };
        let out = run(&make_ball(1.0, 64).unwrap(), &speed, &cfg).unwrap();
        let t = out.extinction_time.expect("enough records");
        assert!((t - t_exact).abs() < 1e-6, "{name} (alpha {alpha}): {t}");
    }
}
