//! Shared fixtures for the criterion benches.

use softaqm::{ControllerKind, ScenarioConfig};

/// A short closed-loop scenario: `n_flows` Reno flows over 100 Mb/s with a
/// 100 ms base RTT.
pub fn bench_scenario(controller: ControllerKind, n_flows: u32, duration: f64) -> ScenarioConfig {
    let text = format!(
        "name = \"bench\"\ncontroller = \"{controller}\"\nlink_rate = 100e6\nrtt_base = 0.1\n\
         n_flows = {n_flows}\nduration = {duration}\nwarmup = 0\n"
    );
    ScenarioConfig::from_toml_str(&text).expect("bench scenario is valid")
}
