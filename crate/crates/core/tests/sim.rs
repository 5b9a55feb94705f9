use softaqm::sim::Simulation;
use softaqm::{run, ControllerKind, ScenarioConfig};

fn config(controller: &str, n_flows: u32, duration: f64) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(&format!(
        "controller = \"{controller}\"\nlink_rate = 10e6\nrtt_base = 0.05\nn_flows = {n_flows}\nduration = {duration}\n"
    ))
    .unwrap()
}

#[test]
fn zero_flows_idle_link() {
    let out = run(&config("pi2_fixed", 0, 2.0), 1).unwrap();
    assert_eq!(out.totals.generated, 0);
    assert!(out.conserved());
    assert!(!out.trace.is_empty());
    for r in &out.trace.records {
        assert_eq!(r.queue_delay, 0.0);
        assert_eq!(r.p.value(), 0.0);
        assert_eq!(r.backlog, 0);
    }
}

#[test]
fn one_row_per_tick() {
    let cfg = config("curvy_pi2", 4, 3.0);
    let sim = Simulation::new(&cfg, 9).unwrap();
    let expected = sim.expected_ticks();
    let out = sim.run().unwrap();
    assert_eq!(expected, (3.0_f64 / 0.016).floor() as u64);
    assert_eq!(out.trace.len() as u64, expected);
    assert_eq!(out.controller_updates, expected);
    for (k, r) in out.trace.records.iter().enumerate() {
        let t = (k as f64 + 1.0) * 0.016;
        assert!((r.time - t).abs() < 1e-9, "row {k} at {}", r.time);
    }
}

#[test]
fn unmanaged_queue_fills_to_capacity() {
    let cfg = config("none", 8, 10.0);
    let capacity = cfg.effective_capacity();
    let out = run(&cfg, 2).unwrap();
    assert!(out.tail_drops > 0);
    assert_eq!(out.totals.dropped, out.tail_drops);
    let peak = out.trace.records.iter().map(|r| r.backlog).max().unwrap();
    assert!(peak <= capacity);
    assert!(
        peak + u64::from(cfg.mss) > capacity,
        "peak {peak} of {capacity}"
    );
    assert!(out.conserved());
}

#[test]
fn counters_never_decrease() {
    for kind in ControllerKind::ALL {
        let mut cfg = config(kind.name(), 6, 5.0);
        cfg.marking = softaqm::MarkingMode::ClassicEcnMark;
        let out = run(&cfg, 4).unwrap();
        assert!(out.conserved(), "{kind}");
        for w in out.trace.records.windows(2) {
            assert!(w[1].time > w[0].time);
            assert!(w[1].drops_cum >= w[0].drops_cum);
            assert!(w[1].marks_cum >= w[0].marks_cum);
            assert!(w[1].delivered_bytes_cum >= w[0].delivered_bytes_cum);
        }
        for w in out.trace.offered_cum.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }
}

#[test]
fn delivery_bounded_by_link() {
    let cfg = config("pi2_fixed", 10, 5.0);
    let out = run(&cfg, 3).unwrap();
    for r in &out.trace.records {
        let max = cfg.link_rate_bytes() * r.time + f64::from(cfg.mss);
        assert!((r.delivered_bytes_cum as f64) <= max);
    }
}

#[test]
fn seeds_change_trajectories() {
    let cfg = config("pi2_fixed", 10, 5.0);
    let a = run(&cfg, 1).unwrap().trace.digest();
    let b = run(&cfg, 2).unwrap().trace.digest();
    assert_ne!(a, b);
}

#[test]
fn marking_without_ecn_drops() {
    let mut cfg = config("pi2_fixed", 10, 10.0);
    cfg.marking = softaqm::MarkingMode::ClassicEcnMark;
    cfg.ecn_capable = false;
    let out = run(&cfg, 5).unwrap();
    assert_eq!(out.totals.marked, 0);
    assert!(out.totals.dropped > 0);

    cfg.ecn_capable = true;
    let out = run(&cfg, 5).unwrap();
    assert!(out.totals.marked > 0);
    assert_eq!(out.totals.dropped, out.tail_drops);
}
