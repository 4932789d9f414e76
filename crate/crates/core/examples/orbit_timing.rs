use std::time::Instant;
use walkforge::orbit::reproduce::{reproduce_position_parity, reproduce_time_alternating};

fn main() {
    let t0 = Instant::now();
    let r1 = reproduce_position_parity(25);
    println!("position-parity N=25: {:?}  match={} relations={} boundary={}",
        t0.elapsed(), r1.formula_matches_enumeration, r1.displayed_relations_hold, r1.boundary_orbit_sums_vanish);
    let t1 = Instant::now();
    let r2 = reproduce_time_alternating(25);
    println!("time-alternating N=25: {:?}  match={} rel1={} rel2={} consistent={} transports={} boundary={}",
        t1.elapsed(), r2.formula_matches_enumeration, r2.first_relation_holds, r2.second_relation_holds,
        r2.substituted_relation_internally_consistent, r2.substitution_transports_to_first_group,
        r2.boundary_orbit_sums_vanish);
    println!("mismatch: {:?}", r2.first_mismatch);
    println!("total: {:?}", t0.elapsed());
}
