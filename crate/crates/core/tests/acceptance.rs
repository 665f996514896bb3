//! Desk-scale acceptance run: one PASS/FAIL line per criterion, exit code
//! 1 if any fails. Runs without the test harness so every line prints.

mod common;

use std::collections::HashSet;
use std::time::Instant;

use common::*;
use gosp::cli::{parse_config, rerun, run};
use gosp::dynamics::{evolve, DomainSpec};
use gosp::estimators::*;
use gosp::field::{derive_seed, FieldSpec, SiteField};
use gosp::geometry::Polytope;
use gosp::model::{NeighborhoodSpec, NormalizedModel, Rational};
use serde_json::json;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn sym() -> NormalizedModel {
    NormalizedModel::on_sublattice(&NeighborhoodSpec::planar(&[(-1, 1), (1, 1)])).unwrap()
}

/// Nearest fraction with denominator 100.
fn hundredths(x: f64) -> Rational {
    Rational::new((x * 100.0).round() as i64, 100)
}

fn oracle_equivalence() -> Verdict {
    let clock = Instant::now();
    let bad: Vec<String> =
        (0..1000).filter_map(|s| check_instance(&random_instance(s)).err().map(|e| format!("#{s}: {e}"))).collect();
    let secs = clock.elapsed().as_secs_f64();
    verdict(bad.is_empty() && secs < 30.0, format!("{} mismatches in 1000 instances, {secs:.1} s {}", bad.len(), bad.first().cloned().unwrap_or_default()))
}

fn duality() -> Verdict {
    let bad = (10_000..11_000).filter(|&s| check_duality(&random_instance(s)).is_err()).count();
    verdict(bad == 0, format!("{bad} mismatches in 1000 instances"))
}

fn structural_identities() -> Verdict {
    let mut failures = Vec::new();
    for seed in 20_000..20_500u64 {
        let inst = random_instance(seed);
        let run = |start: &[Site], field: &FieldSpec| {
            states(&evolve(&inst.model, start, field, &inst.dom.spec(), inst.horizon, &every_step()).unwrap(), inst.horizon)
        };
        let sub = |a: &[Site], b: &[Site]| a.iter().all(|s| b.contains(s));
        let whole = run(&inst.start, &inst.field);
        let first = run(&inst.start[..1], &inst.field);
        let rest = run(&inst.start[1..], &inst.field);
        let denser = run(&inst.start, &inst.field.at_p((inst.field.p() + 0.2).min(1.0)).unwrap());
        let (r, k) = (inst.r(), inst.spec.d - 1);
        for t in 0..whole.len() {
            let mut union: Vec<Site> = first[t].iter().chain(&rest[t]).cloned().collect();
            union.sort();
            union.dedup();
            if union != whole[t] {
                failures.push(format!("additivity #{seed} t={t}"));
            }
            if !sub(&first[t], &whole[t]) {
                failures.push(format!("attractiveness #{seed} t={t}"));
            }
            if !sub(&whole[t], &denser[t]) {
                failures.push(format!("monotonicity #{seed} t={t}"));
            }
            if t > 0 {
                for s in 0..r - 1 {
                    let row = |v: &[Site], s: i64| -> Vec<Vec<i64>> {
                        v.iter().filter(|z| z[k] == s).map(|z| z[..k].to_vec()).collect()
                    };
                    if row(&whole[t], s) != row(&whole[t - 1], s + 1) {
                        failures.push(format!("slab shift #{seed} t={t}"));
                    }
                }
            }
            let gamma = inst.model.gamma();
            for z in &whole[t] {
                let time = t as i64 + z[k];
                let inside = inst.start.iter().any(|a| {
                    let reach = gamma * (time - a[k]);
                    (0..k).all(|i| Rational::from_integer((z[i] - a[i]).abs()) <= reach)
                });
                if !inside {
                    failures.push(format!("cone bound #{seed} t={t}"));
                }
            }
        }
    }
    verdict(failures.is_empty(), format!("500 runs, {} violations {}", failures.len(), failures.first().cloned().unwrap_or_default()))
}

fn sumset_law() -> Verdict {
    let mut bad = Vec::new();
    for x in [&[(-1, 1), (0, 1), (2, 1)][..], &[(0, 1), (1, 1)][..]] {
        let m = planar(x);
        let full = FieldSpec::new(2, 0, 1.0).unwrap();
        let tr = evolve(&m, &[vec![0, 0]], &full, &DomainSpec::Full, 30, &every_step()).unwrap();
        for t in 0..=30 {
            let got: Vec<i64> = tr.snapshot(t).unwrap().sites().iter().map(|s| s[0]).collect();
            if got != sumset(x, t as usize) {
                bad.push(format!("{x:?} t={t}"));
            }
        }
    }
    verdict(bad.is_empty(), format!("t <= 30 on both models, {} mismatches", bad.len()))
}

fn order_parameter_duality() -> Verdict {
    let clock = Instant::now();
    let (p, t, reps) = (0.8, 100, 20_000);
    let primal = survival_curve(&op(), p, t, reps, 1).unwrap();
    let dual = dual_survival_curve(&op(), p, t, reps, 2).unwrap();
    let scaled = primal.estimate.scaled(p);
    let se = scaled.combined_stderr(&dual.estimate);
    let gap = (scaled.mean - dual.estimate.mean).abs();
    verdict(
        gap <= 3.0 * se,
        format!(
            "p theta {:.4}, dual theta {:.4}, |gap| {gap:.4} <= 3 se {:.4}; {:.1} s on {} thread(s)",
            scaled.mean,
            dual.estimate.mean,
            3.0 * se,
            clock.elapsed().as_secs_f64(),
            rayon::current_num_threads()
        ),
    )
}

fn shape_matches_edges(edges: &EdgeReport) -> Verdict {
    let t = 2000;
    let shape = shape_and_time_constants(&asym(), 0.8, t, 200, &ShapeOptions { grid: 16, condition_horizon: t }, 11).unwrap();
    let (lo, hi) = shape.interval().unwrap();
    let (dr, dl) = ((hi.mean - edges.alpha.mean).abs(), (lo.mean - edges.beta.mean).abs());
    verdict(
        dr <= 0.05 && dl <= 0.05,
        format!("U_hat = [{:.4}, {:.4}], edges [{:.4}, {:.4}]", lo.mean, hi.mean, edges.beta.mean, edges.alpha.mean),
    )
}

fn symmetry() -> Verdict {
    let e = edge_speeds(&sym(), 0.8, 2000, 200, 3).unwrap();
    let s = e.alpha.mean + e.beta.mean;
    verdict(s.abs() <= 0.02, format!("alpha {:.4} + beta {:.4} = {s:.4}", e.alpha.mean, e.beta.mean))
}

fn monotone_edge_speed() -> Verdict {
    let ps = [0.75, 0.8, 0.85, 0.9];
    let es: Vec<Estimate> = ps.iter().map(|&p| edge_speeds(&op(), p, 500, 100, 5).unwrap().alpha).collect();
    let ok = es.windows(2).all(|w| w[1].mean - w[0].mean > w[0].combined_stderr(&w[1]));
    let shown: Vec<String> = es.iter().map(|e| format!("{:.4}+-{:.4}", e.mean, e.stderr)).collect();
    verdict(ok, format!("alpha over p = {ps:?}: {}", shown.join(", ")))
}

fn death_bound() -> Verdict {
    let d = death_bound_fit(&op(), 0.8, 100, 100_000, (10, 50), 6).unwrap();
    verdict(d.fit.slope < 0.0 && d.fit.r_squared >= 0.9, format!("slope {:.4}, R^2 {:.4}", d.fit.slope, d.fit.r_squared))
}

fn subcritical() -> Verdict {
    let opts = DecayOptions { stride: 10, windows: [(40, 60), (60, 80)] };
    let r = subcritical_decay(&op(), 0.5, 80, 4000, 7, &opts).unwrap();
    verdict(r.relative_gap <= 0.10, format!("c(p) {:.4} and {:.4}, relative gap {:.3}", r.c_hat[0], r.c_hat[1], r.relative_gap))
}

fn torus_laws() -> Verdict {
    let sup = torus_stats(&op(), 0.8, &[12], 500, 100_000_000, 8).unwrap();
    let ks = sup.levels[0].ks;
    let sub = torus_stats(&op(), 0.55, &[8, 16, 32], 500, 1_000_000, 8).unwrap();
    let ratios: Vec<f64> = sub.levels.iter().map(|l| l.log_ratio).collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let spread = hi / lo - 1.0;
    verdict(
        ks < 0.1 && spread <= 0.25,
        format!("KS {ks:.4} at n=12; mean tau / log n {ratios:.3?}, spread {:.1}%", 100.0 * spread),
    )
}

fn density() -> Verdict {
    let big = density_spectrum(&op(), 0.8, &[32], 200, 20_000, 9, &[], 20_000).unwrap();
    let level32 = &big.levels[0];
    let agree = level32.mean.agrees_with(&big.p_theta, 3.0);
    // the lower tail at n = 16 is near 1e-4, so it needs the larger sample
    let small = density_spectrum(&op(), 0.8, &[16], 200, 60_000, 19, &[], 1).unwrap();
    let a = 0.5 * big.p_theta.mean;
    let freq = |l: &DensityLevel| l.samples.iter().filter(|&&y| y <= a).count() as f64 / l.samples.len() as f64;
    let (f16, f32) = (freq(&small.levels[0]), freq(level32));
    verdict(
        agree && f32 < f16,
        format!(
            "mean Y_32 {:.4} vs p theta {:.4}; P(Y_n <= {a:.3}) {f16:.2e} at n=16 (60000 reps), {f32:.2e} at n=32 (20000 reps)",
            level32.mean.mean, big.p_theta.mean
        ),
    )
}

fn crossing(alpha: Rational) -> Verdict {
    let fs: Vec<Estimate> =
        [50, 100, 200].iter().map(|&l| crossing_probability(&op(), 0.8, l, 0.2, alpha, 400, 10).unwrap().estimate).collect();
    let monotone = fs.windows(2).all(|w| w[1].mean >= w[0].mean - 2.0 * w[0].combined_stderr(&w[1]));
    verdict(
        fs[2].mean >= 0.9 && monotone,
        format!("slope {alpha}: {:.3} {:.3} {:.3} at L = 50, 100, 200", fs[0].mean, fs[1].mean, fs[2].mean),
    )
}

/// Asymmetric model, seed 1, L = 100: the first sample (attempt 0) is the witness.
const WITNESS_SEED: u64 = 1;
const WITNESS_ATTEMPT: u64 = 0;

fn witness_holds(sample: &TransferSample, probe: &(i64, Vec<i64>), n: i64) -> std::result::Result<(), String> {
    let m = asym();
    let field = FieldSpec::new(2, derive_seed(WITNESS_SEED, WITNESS_ATTEMPT), 0.8).unwrap();
    for path in [&sample.gamma, &sample.gamma_prime] {
        if path.last().unwrap()[1] != 100 {
            return Err("path does not reach time L".into());
        }
        for w in path.windows(2) {
            let step = vec![w[1][0] - w[0][0], w[1][1] - w[0][1]];
            if !m.spec().offsets.contains(&step) || !field.is_open(&w[1]) {
                return Err(format!("not an open path at {:?}", w[1]));
            }
        }
    }
    let own: HashSet<&Vec<i64>> = sample.gamma.iter().collect();
    if sample.gamma_prime.iter().any(|q| own.contains(q)) {
        return Err("the paths share a vertex".into());
    }
    // hat gamma: the probe box (x, t) + [-n, n) x {0} translated by (v, t0) along gamma
    let hat_hits = sample.gamma_prime.iter().any(|q| {
        sample.gamma.iter().any(|a| {
            let (dx, dt) = (q[0] - a[0] - probe.1[0], q[1] - a[1] - probe.0);
            (-n..n).contains(&dx) && dt == 0
        })
    });
    if !hat_hits {
        return Err("hat gamma misses gamma'".into());
    }
    Ok(())
}

fn non_planarity(op_edges: &EdgeReport) -> Verdict {
    let fig_opts = TransferOptions { box_eps: 0.05, alpha: Rational::new(3, 2), beta: Rational::new(-1, 2), n: 2, budget: 100 };
    let r = path_crossing_transfer(&asym(), 0.8, 0.0, 100, 1, WITNESS_SEED, &fig_opts).unwrap();
    let s = &r.samples[0];
    let witness = if s.attempt != WITNESS_ATTEMPT {
        Err(format!("first crossing at attempt {}", s.attempt))
    } else {
        witness_holds(s, &r.probe, fig_opts.n)
    };

    let (alpha, beta) = (hundredths(op_edges.alpha.mean), hundredths(op_edges.beta.mean));
    let opts = TransferOptions { box_eps: 0.05, alpha, beta, n: 2, budget: 50_000 };
    let planar = path_crossing_transfer(&op(), 0.8, 0.0, 200, 500, 12, &opts);
    let (ok, detail) = match &planar {
        Ok(p) => (p.transfer.mean == 1.0, format!("2dOP transfer {}/500 at eps = 0 (tilts {alpha}, {beta})", p.transfer.mean * 500.0)),
        Err(e) => (false, format!("2dOP: {e}")),
    };
    verdict(
        witness.is_ok() && ok,
        format!("asymmetric witness: {}; {detail}", witness.err().unwrap_or_else(|| "paths disjoint, hat path meets".into())),
    )
}

fn reproducibility() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let put = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
    put("op.json", r#"{"d": 2, "X": [[0, 1], [1, 1]]}"#);
    put("asym.json", r#"{"d": 2, "X": [[-1, 1], [0, 1], [2, 1]]}"#);
    put("diag.json", r#"{"d": 2, "X": [[-1, 1], [1, 1]]}"#);
    let cone = serde_json::to_value(Polytope::interval(Rational::new(0, 1), Rational::new(1, 2))).unwrap();
    let configs = [
        json!({"model": "op.json", "estimator": "simulate", "p": 0.8, "T": 64, "seed": 1, "reps": 4}),
        json!({"model": "op.json", "estimator": "survival", "p": 0.8, "T": 50, "reps": 200, "seed": 1}),
        json!({"model": "op.json", "estimator": "survival", "kind": "dual", "p": 0.8, "T": 50, "reps": 200, "seed": 1}),
        json!({"model": "op.json", "estimator": "survival", "kind": "death", "window": [10, 40], "p": 0.8, "T": 60, "reps": 5000, "seed": 1}),
        json!({"model": "op.json", "estimator": "survival", "kind": "decay", "windows": [[20, 30], [30, 40]], "p": 0.5, "T": 40, "reps": 200, "seed": 1}),
        json!({"model": "op.json", "estimator": "pc", "T": 60, "L_stop": 30, "reps": 60, "tol": 0.05, "seed": 1}),
        json!({"model": "asym.json", "estimator": "shape", "p": 0.8, "T": 80, "reps": 20, "seed": 1}),
        json!({"model": "asym.json", "estimator": "edges", "p": 0.8, "T": 100, "reps": 20, "seed": 1}),
        json!({"model": "op.json", "estimator": "torus", "p": 0.55, "sizes": [8, 16], "reps": 50, "T": 100000, "seed": 1}),
        json!({"model": "op.json", "estimator": "density", "p": 0.8, "sizes": [8], "T": 50, "reps": 50, "seed": 1, "a_grid": [0.5]}),
        json!({"model": "op.json", "estimator": "crossing", "p": 0.8, "L": 40, "eps": 0.2, "slope": "3/4", "reps": 20, "seed": 1}),
        json!({"model": "op.json", "estimator": "bgprobe", "p": 0.8, "block": {"w": [8], "h": 8, "v": ["1/2"]}, "n": 2, "reps": 20, "seed": 1}),
        json!({"model": "asym.json", "estimator": "goodblock", "p": 0.8, "L": 12, "C": 4, "reps": 4, "seed": 1}),
        json!({"model": "diag.json", "sublattice": true, "estimator": "meet", "p": 0.8, "times": [8, 16], "v_hat": ["0"], "reps": 50, "seed": 1}),
        json!({"model": "asym.json", "estimator": "cone", "p": 0.8, "T": 60, "t0": 10, "polytope": cone, "reps": 10, "seed": 1}),
        json!({"model": "op.json", "estimator": "crosspath", "p": 0.8, "eps": 0.0, "L": 40, "box_eps": 0.1, "alpha": "4/5", "beta": "1/5", "reps": 10, "seed": 1}),
    ];
    let mut bad = Vec::new();
    for (i, cfg) in configs.iter().enumerate() {
        let name = cfg["estimator"].as_str().unwrap().to_string();
        let path = dir.path().join(format!("cfg{i}.json"));
        std::fs::write(&path, cfg.to_string()).unwrap();
        let outcome = parse_config(&path).and_then(|plan| {
            let a = run(&plan, 1, dir.path().join(format!("a{i}")))?;
            let b = rerun(&a.manifest, 8, dir.path().join(format!("b{i}")))?;
            Ok((a, b))
        });
        match outcome {
            Ok((a, b)) => {
                let same = |x: &std::path::Path, y: &std::path::Path| std::fs::read(x).unwrap() == std::fs::read(y).unwrap();
                if !same(&a.results, &b.results) || !same(&a.summary, &b.summary) {
                    bad.push(format!("{name} differs"));
                }
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    verdict(bad.is_empty(), format!("{} experiments rerun at 1 and 8 threads; {}", configs.len(), if bad.is_empty() { "all byte-identical".into() } else { bad.join("; ") }))
}

fn main() {
    let total = Instant::now();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let clock = Instant::now();
        let v = f();
        println!(
            "[{}] {id:>2} {name}: {} ({:.1} s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            clock.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed += 1;
        }
    };

    report(1, "oracle equivalence", &mut oracle_equivalence);
    report(2, "duality", &mut duality);
    report(3, "structural identities", &mut structural_identities);
    report(4, "full-density sumset law", &mut sumset_law);
    report(5, "duality of order parameters", &mut order_parameter_duality);
    let asym_edges = edge_speeds(&asym(), 0.8, 2000, 200, 4).unwrap();
    report(6, "edge/shape identification", &mut || shape_matches_edges(&asym_edges));
    report(7, "symmetry", &mut symmetry);
    report(8, "monotone edge speed", &mut monotone_edge_speed);
    report(9, "exponential death bound", &mut death_bound);
    report(10, "subcritical decay", &mut subcritical);
    report(11, "torus laws", &mut torus_laws);
    report(12, "density", &mut density);
    let op_edges = edge_speeds(&op(), 0.8, 1000, 100, 13).unwrap();
    report(13, "crossing", &mut || crossing(hundredths(op_edges.alpha.mean)));
    report(14, "non-planarity witness", &mut || non_planarity(&op_edges));
    report(15, "reproducibility", &mut reproducibility);

    println!("acceptance: {} of 15 passed in {:.1} s", 15 - failed, total.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
