//! Seeded simulation of GOAL under D = {t6} against the exact value 3/4.

use sdpn::fixtures;
use sdpn::rational::{show, to_f64};
use sdpn::semantics::{exact_value, simulate, RunBudget};

fn main() -> sdpn::Result<()> {
    let net = fixtures::goal();
    let d = net.deactivation(&["t6"])?;
    let exact = exact_value(&net, &d, RunBudget::default())?;
    for runs in [100, 10_000, 100_000] {
        let s = simulate(&net, &d, 1, runs, 1000)?;
        println!(
            "{runs:>7} runs: mean {:.5} (std error {:.5}), exact {}",
            to_f64(&s.mean),
            s.std_error,
            show(&exact)
        );
    }
    Ok(())
}
