//! Drives the experiment runner from a config, then repeats it from the
//! manifest with a different thread count.

use gosp::cli::{parse_config, rerun, run};

fn main() {
    let dir = std::env::temp_dir().join("gosp-run-example");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("op.json"), r#"{"d": 2, "X": [[0, 1], [1, 1]]}"#).unwrap();
    std::fs::write(
        dir.join("survival.json"),
        r#"{"model": "op.json", "estimator": "survival", "p": 0.8, "T": 64, "reps": 500, "seed": 1}"#,
    )
    .unwrap();

    let plan = parse_config(dir.join("survival.json")).unwrap();
    let first = run(&plan, 1, dir.join("first")).unwrap();
    let second = rerun(&first.manifest, 4, dir.join("second")).unwrap();

    print!("{}", std::fs::read_to_string(&first.summary).unwrap());
    let same = std::fs::read(&first.results).unwrap() == std::fs::read(&second.results).unwrap();
    println!("results identical across thread counts: {same}");
}
