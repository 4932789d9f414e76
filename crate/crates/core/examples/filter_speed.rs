use std::time::Instant;
use walkforge::model::space::Family;
use walkforge::pipeline::{run_classification, PipelineConfig};

fn main() {
    let dir = std::env::temp_dir().join("filter_speed");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sample.jsonl");
    let _ = std::fs::remove_file(&out);
    let config = PipelineConfig {
        sample: Some((1, 300)),
        filters_only: true,
        ..PipelineConfig::desk_scale(Family::Space, out)
    };
    let t0 = Instant::now();
    let summary = run_classification(&config).unwrap();
    let dt = t0.elapsed();
    println!(
        "{} models in {:?} ({:.2} ms/model); full 2x32993 ~ {:.0} s",
        summary.written,
        dt,
        dt.as_secs_f64() * 1e3 / summary.written as f64,
        dt.as_secs_f64() / summary.written as f64 * 2.0 * 32993.0
    );
}
