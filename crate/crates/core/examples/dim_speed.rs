use std::time::Instant;
use walkforge::dimension::dimension_up_to;
use walkforge::model::parse::parse_model;

fn main() {
    let compass = [(0i64,1i64),(1,1),(1,0),(1,-1),(0,-1),(-1,-1),(-1,0),(-1,1)];
    let subset = |mask: u32| compass.iter().enumerate()
        .filter(|(i,_)| mask & (1<<i) != 0)
        .map(|(_,&(dx,dy))| format!("{dx} {dy}"))
        .collect::<Vec<_>>().join(", ");
    let t0 = Instant::now();
    let mut n = 0u32;
    let mut excluded = 0u32;
    for m0 in (1u32..256).step_by(17) {
        for m1 in (1u32..256).step_by(13) {
            let text = format!(
                "label: b{m0}-{m1}\ndimension: 2\nnonneg_axes: 2\nmoduli: 2\nresidue_poly: 0 ; 1 1 ; 0\nstart: 0 0\nsteps 0: {}\nsteps 1: {}\n",
                subset(m0), subset(m1));
            let model = parse_model(&text).unwrap();
            if dimension_up_to(&model, 1).is_some() { excluded += 1; }
            n += 1;
        }
    }
    let dt = t0.elapsed();
    println!("{n} models in {:?} ({:.2} ms/model), {excluded} with delta <= 1", dt, dt.as_secs_f64()*1000.0/n as f64);
}
