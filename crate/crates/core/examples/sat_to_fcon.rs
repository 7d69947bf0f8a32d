//! 3-SAT to the policy problem on a free-choice occurrence net: the formula
//! is satisfiable iff some deactivation set beats |clauses| - 1.

use sdpn::rational::show;
use sdpn::reductions::{sat_to_fcon, CnfFormula};
use sdpn::solve::{brute_force, Valuer};

fn main() -> sdpn::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample.cnf"))?;
    let mut formulas = vec![CnfFormula::parse_dimacs(&text)?];
    formulas.extend((0..4).map(|seed| CnfFormula::random(3, 12, seed)));
    for phi in &formulas {
        let r = sat_to_fcon(phi)?;
        let s = brute_force(&r.net, Valuer::Rewrite, &r.threshold)?;
        let a = s.witness.as_ref().map(|d| r.assignment(d));
        println!(
            "{} clauses: satisfiable={} net says {} (best {} vs {}) assignment {:?}",
            phi.clauses.len(),
            phi.is_satisfiable(),
            s.decision,
            show(s.value.as_ref().unwrap()),
            show(&r.threshold),
            a
        );
    }
    Ok(())
}
