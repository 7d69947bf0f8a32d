//! Support sizes of the rewritten reward on the three benchmark families.
//! N1 and N2 stay linear; the backward conflicts of N3 double it per cell.
//! Ends with a short timing run in the benchmark CSV format.

use sdpn::bench::{gen_family, run_bench, write_csv, BenchConfig, Family};
use sdpn::rewrite::rewrite_rewards;

fn main() -> sdpn::Result<()> {
    for fam in [Family::N1, Family::N2, Family::N3] {
        let sizes: Vec<String> = (1..=8)
            .map(|n| Ok(rewrite_rewards(&gen_family(fam, n, 0, 1_000_000)?.net)?.transition_reward.len().to_string()))
            .collect::<sdpn::Result<_>>()?;
        println!("{fam}: |supp [R]| for n=1..8: {}", sizes.join(" "));
    }
    let cfgs: Vec<BenchConfig> = (2..=6).map(|n| BenchConfig::new(Family::N3, n, 1)).collect();
    write_csv(&run_bench(&cfgs, None)?, std::io::stdout())?;
    Ok(())
}
