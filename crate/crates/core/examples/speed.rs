use std::time::Instant;
use walkforge::enumerate::{count_walks, Domain, EvalPoint};
use walkforge::model::parse::parse_model;

fn main() {
    let qp = parse_model(
        "label: qp-alt\n\
         dimension: 2\n\
         nonneg_axes: 2\n\
         moduli: 2\n\
         residue_poly: 0 ; 0 0 ; 1\n\
         start: 0 0\n\
         steps 0: 0 1, 1 0, 0 -1, -1 0\n\
         steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1\n",
    )
    .unwrap();
    let t0 = Instant::now();
    let s = count_walks(&qp, 2000, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
    let (_, c) = s.mod_coeffs().unwrap();
    println!("qp 2000 terms: {:?}, tail {:?}", t0.elapsed(), &c[1998..]);

    let hs = parse_model(
        "label: hs-alt\n\
         dimension: 2\n\
         nonneg_axes: 1\n\
         moduli: 2\n\
         residue_poly: 0 ; 1 1 ; 0\n\
         start: 0 0\n\
         steps 0: 0 1, 1 0, 0 -1, -1 0\n\
         steps 1: 0 1, 1 1, 1 0, 1 -1, 0 -1, -1 -1, -1 0, -1 1\n",
    )
    .unwrap();
    let t0 = Instant::now();
    let s = count_walks(&hs, 10000, Domain::Mod(45007), &EvalPoint::all_ones(2)).unwrap();
    let (_, c) = s.mod_coeffs().unwrap();
    println!("hs 10000 terms: {:?}, tail {:?}", t0.elapsed(), &c[9998..]);
}
