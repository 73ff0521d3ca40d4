//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use injnorm::bounds::{
    alpha0, alpha0_equation, asymptotic_bound, composition_sum_log, finite_bound, k_search_upper, log_phi, log_psi,
    optimal_k, AsymptoticQuery, BoundQuery, RootKind,
};
use injnorm::ensembles::{sample_model_a, DistKind, ModelFamily, ModelSpec, SeedSpec};
use injnorm::montecarlo::{expectation_sweep, Normalize};
use injnorm::optimize::{matrix_oracle, multi_restart, symmetric_estimate, EstimatorConfig};
use injnorm::specialfn::{lambert_w, LambertBranch};
use injnorm::tensor::{DenseTensor, Field};
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut buf = Vec::new();
    let code = injnorm_cli::run_args(&argv, &mut buf).unwrap_or_else(|e| panic!("{args:?}: {e:#}"));
    (code, String::from_utf8(buf).expect("utf8 output"))
}

/// Parses the comparison CSV into (row name, per-p cells).
fn csv_rows(text: &str) -> Vec<(String, Vec<String>)> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let values = cells.iter().zip(&header).filter(|(_, h)| h.starts_with("p=")).map(|(c, _)| c.to_string());
            (cells[0].to_string(), values.collect())
        })
        .collect()
}

fn row<'a>(rows: &'a [(String, Vec<String>)], name: &str) -> &'a [String] {
    &rows.iter().find(|r| r.0 == name).unwrap_or_else(|| panic!("missing row {name}")).1
}

fn within(cells: &[String], expected: &[f64], tol: f64) -> Result<(), String> {
    for (c, e) in cells.iter().zip(expected) {
        let v: f64 = c.parse().map_err(|_| format!("cell {c:?} is not numeric"))?;
        check((v - e).abs() <= tol, format!("{v} vs {e} (tol {tol})"))?;
    }
    check(cells.len() == expected.len(), "wrong number of columns")
}

fn c1_comparison_dinf() -> Outcome {
    let (_, csv) = run_cli(&["compare", "--regime", "dinf", "--p-range", "3:8"]);
    let rows = csv_rows(&csv);
    within(row(&rows, "moment"), &[3.04, 3.75, 4.37, 4.94, 5.47, 5.97], 0.01)?;
    let sf = row(&rows, "sudakov-fernique");
    check(sf == ["3", "4", "5", "6", "7", "8"], format!("sudakov-fernique row {sf:?}"))?;
    let kr = row(&rows, "kac-rice-ref");
    check(kr == ["2.87", "3.59", "4.22", "4.8", "5.33", "5.83"], format!("reference row {kr:?}"))?;
    Ok(format!("moment row {}", row(&rows, "moment").join(" ")))
}

fn c2_comparison_d100() -> Outcome {
    let (_, csv) = run_cli(&["compare", "--regime", "d=100", "--p-range", "3:8"]);
    let rows = csv_rows(&csv);
    within(row(&rows, "moment"), &[3.03, 3.72, 4.35, 4.91, 5.44, 5.94], 0.01)?;
    let (_, rigid) = run_cli(&["compare", "--regime", "d=100", "--p-range", "3:8", "--dist", "rigid"]);
    let rigid = csv_rows(&rigid);
    for name in ["kac-rice-ref", "sudakov-fernique"] {
        check(row(&rigid, name).iter().all(|c| c == "---"), format!("{name} should be dashed for rigid laws"))?;
    }
    Ok(format!("integer-k moment row {}", row(&rows, "moment").join(" ")))
}

fn c3_k_search() -> Outcome {
    let mut worst_budget = f64::INFINITY;
    for d in 2..=10usize {
        for p in 3..=8usize {
            let spec = ModelSpec::a_gaussian(Field::Complex, &vec![d; p]);
            let coarse = (2.0 * (p * d) as f64 * ((p * d) as f64).ln()).ceil() as u64 + 1;
            let mut best = (0u64, f64::INFINITY);
            for k in 1..=coarse {
                let v = finite_bound(&BoundQuery::with_k(spec.clone(), k)).map_err(|e| e.to_string())?.log_value;
                if v < best.1 {
                    best = (k, v);
                }
            }
            let r = optimal_k(&BoundQuery::optimize(spec.clone())).map_err(|e| e.to_string())?;
            check(r.k_used == Some(best.0), format!("d={d} p={p}: search k {:?}, exhaustive k {}", r.k_used, best.0))?;
            let budget = 2.0 * (k_search_upper(&spec) as f64).log2() + 8.0;
            check(r.evaluations as f64 <= budget, format!("d={d} p={p}: {} evaluations > {budget}", r.evaluations))?;
            worst_budget = worst_budget.min(budget - r.evaluations as f64);
        }
    }
    Ok(format!("54 cases agree; smallest evaluation headroom {worst_budget:.1}"))
}

fn c4_verification(dir: &Path) -> Outcome {
    let out = dir.join("verify.json");
    let (code, _) = run_cli(&["verify", "--out", out.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (passed, total) = (report["passed"].as_u64().unwrap(), report["total"].as_u64().unwrap());
    check(code == 0 && passed == 50 && total == 50, format!("{passed}/{total} passed, exit {code}"))?;
    let families: std::collections::BTreeSet<&str> =
        report["instances"].as_array().unwrap().iter().map(|i| i["model"].as_str().unwrap()).collect();
    check(families.len() == 4, format!("families covered: {families:?}"))?;

    let bad = dir.join("corrupt.json");
    let (code, _) = run_cli(&["verify", "--corrupt-prefactor", "--out", bad.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&bad).unwrap()).unwrap();
    let control = report["instances"].as_array().unwrap().iter().find(|i| i["model"] == "rank-one-control").unwrap();
    check(code == 1 && control["report"]["pass"] == false, "corrupted prefactor was not detected")?;
    Ok(format!("50/50 pass; corrupted control fails ({:.0} sigma)", control["report"]["gap_sigmas"].as_f64().unwrap()))
}

/// Brute-force `Σ_{a ∈ N^R, Σa = k} Π (a_s!)^{p-2}`.
fn composition_oracle(r: usize, k: usize, p: usize) -> f64 {
    let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
    fn rec(r: usize, k: usize, f: &dyn Fn(usize) -> f64) -> f64 {
        if r == 1 {
            return f(k);
        }
        (0..=k).map(|m| f(m) * rec(r - 1, k - m, f)).sum()
    }
    rec(r, k, &|m| fact(m).powi(p as i32 - 2))
}

fn c5_identities() -> Outcome {
    let mut rng = SeedSpec::new(5).rng();
    for _ in 0..100 {
        let p = rng.random_range(2..=20usize);
        let alpha = 10f64.powf(rng.random_range(-3.0..=3.0));
        let eta: Vec<f64> = (1..p).map(|_| rng.random_range(0.1..=10.0)).collect();
        let c = log_psi(Field::Complex, alpha, &eta).map_err(|e| e.to_string())?;
        let r = log_psi(Field::Real, 2.0 * alpha, &eta).map_err(|e| e.to_string())?;
        check((c.exp() - r.exp()).abs() <= 1e-10 * c.exp(), format!("psi identity p={p} alpha={alpha}: {c} vs {r}"))?;
    }
    for p in 3..=50u64 {
        let (ar, ac) = (alpha0(RootKind::Real, p).unwrap(), alpha0(RootKind::Complex, p).unwrap());
        check((ar - 2.0 * ac).abs() <= 1e-10 * ar, format!("alpha0 ratio at p={p}"))?;
        for kind in [RootKind::Real, RootKind::Complex, RootKind::Symmetric] {
            let a = alpha0(kind, p).unwrap();
            let res = alpha0_equation(kind, p as f64, a).abs();
            check(res <= 1e-12, format!("{kind:?} residual {res:e} at p={p}"))?;
        }
    }
    let e_inv = (-1.0f64).exp();
    let principal = (0..400).map(|i| -e_inv + 1e-9 + (i as f64 / 40.0).exp() - 1.0);
    let lower = (1..400).map(|i| -e_inv * (i as f64 / 400.0).powi(3));
    for (branch, x) in principal.map(|x| (LambertBranch::Principal, x)).chain(lower.map(|x| (LambertBranch::Lower, x)))
    {
        let w = lambert_w(branch, x).map_err(|e| e.to_string())?;
        check((w * w.exp() - x).abs() <= 1e-12 * x.abs(), format!("{branch:?} residual at x={x}"))?;
    }
    for r in 1..=4 {
        for k in 0..=8 {
            for p in 3..=5 {
                let got = composition_sum_log(r, k as u64, p).map_err(|e| e.to_string())?;
                let want = composition_oracle(r, k, p).ln();
                check((got - want).abs() <= 1e-10, format!("composition sum R={r} k={k} p={p}: {got} vs {want}"))?;
            }
        }
    }
    Ok("psi field identity, root ratio, residuals, Lambert, composition sums".into())
}

/// Largest |eigenvalue| of a real symmetric matrix by cyclic Jacobi rotations.
fn jacobi_spectral_radius(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max)
}

fn c6_matrix_oracles() -> Outcome {
    let mut worst: f64 = 0.0;
    let spec = ModelSpec::a_gaussian(Field::Complex, &[8, 8]);
    for i in 0..20 {
        let t = sample_model_a(&spec, SeedSpec::new(600).derive(i)).unwrap();
        let oracle = matrix_oracle(&t).unwrap();
        for cfg in [EstimatorConfig::als(SeedSpec::new(i)), EstimatorConfig::pga(SeedSpec::new(i))] {
            let est = multi_restart(&t, &cfg.clone().with_restarts(10)).unwrap().value;
            worst = worst.max((est - oracle).abs());
            check((est - oracle).abs() <= 1e-6, format!("{:?} on matrix {i}: {est} vs {oracle}", cfg.method))?;
        }
    }
    let mut worst_sym: f64 = 0.0;
    let mut rng = SeedSpec::new(601).rng();
    for i in 0..20 {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for r in 0..n {
            for c in r..n {
                let g: f64 = rng.sample(rand_distr::StandardNormal);
                a[r * n + c] = g;
                a[c * n + r] = g;
            }
        }
        let t = DenseTensor::from_real(&[n, n], &a).unwrap();
        let est = symmetric_estimate(&t, &EstimatorConfig::symmetric(SeedSpec::new(700 + i))).unwrap().value;
        let oracle = jacobi_spectral_radius(&a, n);
        worst_sym = worst_sym.max((est - oracle).abs());
        check((est - oracle).abs() <= 1e-8, format!("symmetric matrix {i}: {est} vs {oracle}"))?;
    }
    Ok(format!("max error {worst:.1e} (singular), {worst_sym:.1e} (symmetric)"))
}

fn c7_als_monotone() -> Outcome {
    let mut rng = SeedSpec::new(7).rng();
    let mut worst = f64::INFINITY;
    for i in 0..100u64 {
        let p = rng.random_range(2..=4usize);
        let dims: Vec<usize> = (0..p).map(|_| rng.random_range(2..=8)).collect();
        let field = if i % 2 == 0 { Field::Real } else { Field::Complex };
        let t = sample_model_a(&ModelSpec::a_gaussian(field, &dims), SeedSpec::new(70).derive(i)).unwrap();
        let cfg = EstimatorConfig { record_trace: true, ..EstimatorConfig::als(SeedSpec::new(71).derive(i)) };
        let est = multi_restart(&t, &cfg).unwrap();
        for tr in &est.traces {
            for w in tr.windows(2) {
                worst = worst.min(w[1] - w[0]);
            }
        }
    }
    check(worst >= -1e-12, format!("objective dropped by {:e}", -worst))?;
    Ok(format!("smallest per-slot change {worst:.1e}"))
}

fn c8_bounded_rank() -> Outcome {
    let ds = [8usize, 16, 32, 64];
    let mut bounds = Vec::new();
    let mut gaps = Vec::new();
    let cfg = EstimatorConfig::als(SeedSpec::new(0)).with_restarts(10);
    for &d in &ds {
        let spec = ModelSpec::b(d, 3, 3, DistKind::GaussianComplex);
        let b = optimal_k(&BoundQuery::optimize(spec.clone())).map_err(|e| e.to_string())?.value;
        let s = expectation_sweep(&spec, &cfg, 20, SeedSpec::new(80).derive(d as u64), Normalize::None)
            .map_err(|e| e.to_string())?;
        check(s.mean <= b + 3.0 * s.stderr, format!("d={d}: estimate {} above bound {b}", s.mean))?;
        bounds.push(b);
        gaps.push(b - s.mean);
    }
    check(bounds.windows(2).all(|w| w[1] < w[0]), format!("bounds not decreasing: {bounds:?}"))?;
    check(gaps[3] < gaps[0], format!("gap did not shrink: {gaps:?}"))?;
    let limit =
        asymptotic_bound(&AsymptoticQuery { family: ModelFamily::B, field: Field::Complex, p: 3, eta: None }).unwrap();
    check(limit.value == 1.0, format!("limit {}", limit.value))?;
    Ok(format!("bounds {:.4?}, gaps {:.4?}", bounds, gaps))
}

fn c9_rate_trends() -> Outcome {
    let ps = [100u64, 1_000, 10_000, 100_000];
    let mut asym = Vec::new();
    let mut sym = Vec::new();
    for &p in &ps {
        let pf = p as f64;
        let a = alpha0(RootKind::Real, p).unwrap();
        let lv = log_psi(Field::Real, a, &vec![1.0; p as usize - 1]).unwrap();
        asym.push(lv.exp() / (pf * pf.ln()).sqrt());
        let s = alpha0(RootKind::Symmetric, p).unwrap();
        sym.push(log_phi(s, pf).unwrap().exp() / pf.ln().sqrt());
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    check(decreasing(&asym), format!("asymmetric ratios {asym:?}"))?;
    check(decreasing(&sym), format!("symmetric ratios {sym:?}"))?;
    Ok(format!("ratios {:.4?} and {:.4?}", asym, sym))
}

fn binary(args: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_injnorm")).args(args).output().expect("spawn injnorm");
    status.status.code().unwrap_or(-1)
}

fn c10_determinism(dir: &Path) -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["compare", "--regime", "dinf", "--p-range", "3:8"],
        vec!["compare", "--regime", "d=100", "--p-range", "3:8"],
        vec!["bound", "--model", "a-complex", "--dims", "2,3,4,5,6", "--p", "3", "--optimize-k"],
        vec!["asymptotic", "--model", "a-real", "--p-range", "3:8", "--normalizers"],
        vec![
            "estimate",
            "--dims",
            "3,4",
            "--p",
            "3",
            "--method",
            "pga",
            "--realizations",
            "6",
            "--restarts",
            "3",
            "--seed",
            "7",
            "--with-bound",
        ],
        vec!["verify", "--instances", "8", "--samples", "20000", "--seed", "3"],
        vec![
            "figure",
            "bounded-rank-small",
            "--p",
            "3",
            "--normalize",
            "none",
            "--dims",
            "4,8",
            "--realizations",
            "4",
            "--restarts",
            "2",
        ],
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = dir.join(format!("det{i}_{threads}.out"));
            let mut args = cmd.clone();
            let out_s = out.to_str().unwrap().to_string();
            args.extend(["--threads", threads, "--out", &out_s]);
            let code = binary(&args);
            check(code == 0, format!("{cmd:?} exited {code}"))?;
            outputs.push(std::fs::read(&out).unwrap());
        }
        let replay = dir.join(format!("det{i}_replay.out"));
        let manifest = dir.join(format!("det{i}_1.out.manifest.json"));
        let code = binary(&["replay", manifest.to_str().unwrap(), "--threads", "2", "--out", replay.to_str().unwrap()]);
        check(code == 0, format!("replay of {cmd:?} exited {code}"))?;
        outputs.push(std::fs::read(&replay).unwrap());
        check(outputs.windows(2).all(|w| w[0] == w[1]), format!("{cmd:?} output differs across runs"))?;
    }
    Ok(format!("{} commands byte-identical across --threads 1/4 and manifest replay", commands.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("comparison table, d -> inf", Duration::from_secs(10), Box::new(c1_comparison_dinf)),
        ("comparison table, d = 100", Duration::from_secs(10), Box::new(c2_comparison_d100)),
        ("optimal-k search vs exhaustive scan", Duration::from_secs(30), Box::new(c3_k_search)),
        ("moment inequality verification", Duration::from_secs(300), Box::new(|| c4_verification(dir.path()))),
        ("identity suite", Duration::from_secs(10), Box::new(c5_identities)),
        ("order-2 oracle equivalence", Duration::from_secs(30), Box::new(c6_matrix_oracles)),
        ("ALS monotonicity", Duration::from_secs(30), Box::new(c7_als_monotone)),
        ("bounded-rank consistency", Duration::from_secs(600), Box::new(c8_bounded_rank)),
        ("asymptotic rate trends", Duration::from_secs(5), Box::new(c9_rate_trends)),
        ("determinism", Duration::from_secs(600), Box::new(|| c10_determinism(dir.path()))),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result =
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= *limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()))
            }
        });
        match result {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} ({:.1}s)", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({:.1}s)", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
