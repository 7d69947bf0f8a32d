//! Loads the reference nets from their JSON files and reports the net
//! classes they fall into.

use sdpn::bench::{gen_family, Family};
use sdpn::net::{classify, DEFAULT_STATE_CAP};
use sdpn::Sdpn;

fn main() -> sdpn::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let mut nets = vec![
        ("GOAL".to_string(), Sdpn::load(format!("{dir}/goal.json"))?),
        ("TWOGOAL".to_string(), Sdpn::load(format!("{dir}/twogoal.json"))?),
    ];
    for fam in [Family::N1, Family::N2, Family::N3] {
        nets.push((format!("{fam}(3)"), gen_family(fam, 3, 0, 1_000_000)?.net));
    }
    for (name, net) in &nets {
        let c = classify(net, DEFAULT_STATE_CAP)?;
        let len = c.max_run_length.map_or("unbounded".to_string(), |n| n.to_string());
        println!(
            "{name:8} safe={} acyclic={} free_choice={} occurrence={} safc={} markings={} longest run={len}",
            c.safe,
            c.acyclic,
            c.free_choice,
            c.occurrence,
            c.is_safc(),
            c.reachable_markings
        );
    }
    Ok(())
}
