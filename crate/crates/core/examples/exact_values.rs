//! Values of every constant policy on GOAL by enumerating maximal runs, and
//! on an occurrence net also through the closed form for occurrence nets.

use sdpn::bench::{gen_family, Family};
use sdpn::fixtures;
use sdpn::idset::subsets;
use sdpn::rational::show;
use sdpn::semantics::{enumerate_runs, exact_value, fcon_value, RunBudget};

fn main() -> sdpn::Result<()> {
    let net = fixtures::goal();
    let none = net.empty_transitions();
    println!("maximal runs of GOAL with nothing deactivated:");
    for run in enumerate_runs(&net, &none, RunBudget::default())? {
        let word: Vec<&str> = run.transitions.iter().map(|&t| net.transition_name(t)).collect();
        println!("  {:12} p={:5} reached {}", word.join(" "), show(&run.probability), net.show_places(&run.places));
    }
    for d in subsets(net.controllable()) {
        println!("val^{} = {}", net.show_transitions(&d), show(&exact_value(&net, &d, RunBudget::default())?));
    }

    let n2 = gen_family(Family::N2, 3, 7, 1000)?.net;
    println!("N2(3):");
    for d in subsets(n2.controllable()) {
        let a = exact_value(&n2, &d, RunBudget::default())?;
        let b = fcon_value(&n2, &d)?;
        println!("  D={:12} runs: {:>12}  closed form: {:>12}", n2.show_transitions(&d), show(&a), show(&b));
    }
    Ok(())
}
