//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p satport-cli --test acceptance`.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::{to_bytes, Body};
use axum::http::Request;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use satport::interval::{quadruple, sd, IndexQuadruple};
use satport::io::{parse_config, parse_history, SolutionDocument};
use satport::lp::{solve_lp, verify_solution, LpStatus, StandardLP};
use satport::model::{
    build_plp2, risk_interval, solve_portfolio, transaction_cost, ModelError, PortfolioSolution,
};
use satport::oracle::{enumerate_vertices, grid_search, random_lp, random_problem};
use satport::sweep::{
    bracket_values, check_monotonicity, default_alphas, default_lambdas, sweep, CellStatus,
};
use satport::{Interval, PortfolioProblem};
use satport_service::{router, AppState};
use serde_json::json;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn problem(rng: &mut StdRng, n: usize, periods: usize, k_max: f64) -> PortfolioProblem {
    random_problem(n, periods, k_max, &mut || rng.gen::<f64>())
}

fn lp_vector(s: &PortfolioSolution) -> Vec<f64> {
    let aux = &s.auxiliary;
    let mut z = s.x.clone();
    z.push(aux.cost_bound);
    z.extend(&aux.d_plus);
    z.extend(&aux.d_minus);
    z.extend(&aux.y_lower);
    z.extend(&aux.y_upper);
    z
}

fn figure_quadruples() -> Outcome {
    let cases = [
        (iv(0.0, 1.0), iv(2.0, 3.0), (1.0, 1.0, 1.0, 1.5)),
        (iv(0.0, 2.0), iv(1.0, 3.0), (0.0, 0.5, 0.75, 0.75)),
        (iv(0.0, 2.0), iv(-1.0, 1.0), (0.0, 0.0, 0.25, 0.25)),
        (iv(0.0, 2.0), iv(0.0, 2.0), (0.0, 0.0, 0.5, 0.5)),
        (iv(0.0, 4.0), iv(1.0, 3.0), (0.0, 0.0, 0.5, 0.5)),
        (iv(2.0, 3.0), iv(0.0, 1.0), (0.0, 0.0, 0.0, 0.0)),
        (iv(0.0, 1.0), iv(1.0, 2.0), (0.0, 1.0, 1.0, 1.0)),
    ];
    let start = Instant::now();
    let results: Vec<IndexQuadruple> = cases
        .iter()
        .map(|(a, b, _)| quadruple(*a, *b).unwrap())
        .collect();
    let elapsed = start.elapsed();
    for (label, ((_, _, want), got)) in "abcdefg".chars().zip(cases.iter().zip(&results)) {
        let got_tuple = (got.osd, got.psd_clamped, got.pd, got.sd);
        if got_tuple != *want {
            return Err(format!("case ({label}): got {got_tuple:?}, want {want:?}"));
        }
    }
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("7 cases exact in {elapsed:?}"))
}

fn linearization_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let start = Instant::now();
    let mut boundary = 0;
    for i in 0..10_000 {
        let a_lo = rng.gen_range(-1.0..1.0);
        let a = iv(a_lo, a_lo + rng.gen_range(0.0..1.0));
        let b_lo = rng.gen_range(-1.0..1.0);
        let b = iv(b_lo, b_lo + rng.gen_range(0.0..1.0));
        let alpha: f64 = rng.gen_range(0.0..=2.0);
        let direct = sd(a, b) >= alpha;
        let margin = ((1.0 - alpha) * b.upper() + alpha * b.lower())
            - ((1.0 - alpha) * a.lower() + alpha * a.upper());
        if margin.abs() <= 1e-12 {
            boundary += 1;
            continue;
        }
        if direct != (margin >= 0.0) {
            return Err(format!(
                "counterexample #{i}: a={a}, b={b}, alpha={alpha}, sd={}",
                sd(a, b)
            ));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "10000 triples, 0 counterexamples ({boundary} within boundary slack) in {elapsed:?}"
    ))
}

fn plp2_vs_grid() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for case in 0..50 {
        let p = problem(&mut rng, 3, 4, 0.01);
        let alpha = rng.gen_range(0.0..=1.0);
        let lambda = rng.gen_range(0.0..=1.0);
        let s = solve_portfolio(&p, alpha, lambda).map_err(|e| format!("case {case}: {e}"))?;
        let (grid_best, _) =
            grid_search(&p, alpha, lambda, 0.05).ok_or(format!("case {case}: empty grid"))?;
        let gap = grid_best - s.objective_value;
        worst_gap = worst_gap.max(gap);
        if gap > 1e-6 {
            return Err(format!(
                "case {case}: lp {} below grid {grid_best}",
                s.objective_value
            ));
        }
        let lp = build_plp2(&p, alpha, lambda).map_err(|e| e.to_string())?;
        let report = verify_solution(&lp, &lp_vector(&s), 1e-9);
        if !report.is_feasible() {
            return Err(format!(
                "case {case}: max violation {:e}",
                report.max_violation
            ));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "50 instances, grid - lp <= {worst_gap:.3e}, all verified, in {elapsed:?}"
    ))
}

fn monotonicity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let alphas = default_alphas();
    // lambda = 1 is the upper bracket corner; the default grid stops at 0.96
    let mut lambdas = default_lambdas();
    lambdas.push(1.0);
    let start = Instant::now();
    let mut cells = 0;
    for case in 0..20 {
        let p = problem(&mut rng, 4, 6, 0.01);
        let table = sweep(&p, &alphas, &lambdas).map_err(|e| e.to_string())?;
        if let Some(row) = table.rows.iter().find(|r| r.status != CellStatus::Optimal) {
            return Err(format!(
                "case {case}: cell ({}, {}) not optimal: {:?}",
                row.alpha, row.lambda, row.detail
            ));
        }
        let report = check_monotonicity(&table, 1e-9);
        if !report.is_clean() {
            return Err(format!("case {case}: {:?}", report.violations));
        }
        let (low, high) = bracket_values(&table, alphas[0], alphas[alphas.len() - 1])
            .map_err(|e| e.to_string())?;
        for row in &table.rows {
            let v = row.objective.unwrap();
            if v < low - 1e-9 || v > high + 1e-9 {
                return Err(format!(
                    "case {case}: ({}, {}) = {v} outside [{low}, {high}]",
                    row.alpha, row.lambda
                ));
            }
        }
        cells += table.rows.len();
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "20 instances, {cells} cells, 0 violations, brackets hold, in {elapsed:?}"
    ))
}

fn auxiliary_integrity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut solves = 0;
    let mut infeasible = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=6);
        let periods = rng.gen_range(2..=8);
        let p = problem(&mut rng, n, periods, 0.01);
        if p.transaction_rates().iter().any(|&k| k <= 0.0) {
            continue;
        }
        let alpha = rng.gen_range(0.0..=1.0);
        let lambda = rng.gen_range(0.0..=1.0);
        let s = match solve_portfolio(&p, alpha, lambda) {
            Ok(s) => s,
            Err(ModelError::Infeasible(_)) => {
                infeasible += 1;
                continue;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        let aux = &s.auxiliary;
        let cost = transaction_cost(&s.x, &p);
        if (aux.cost_bound - cost).abs() > 1e-9 {
            return Err(format!(
                "case {case}: cost variable {} vs recomputed {cost}",
                aux.cost_bound
            ));
        }
        for i in 0..=p.n() {
            let m = aux.d_plus[i].min(aux.d_minus[i]);
            if m.abs() > 1e-9 {
                return Err(format!(
                    "case {case}: asset {i} has d+ = {}, d- = {}",
                    aux.d_plus[i], aux.d_minus[i]
                ));
            }
        }
        solves += 1;
    }
    Ok(format!(
        "{solves} optimal solves checked ({infeasible} infeasible skipped)"
    ))
}

fn fixture_pipeline() -> Outcome {
    let start = Instant::now();
    let history = parse_history(fixture("six_stock_history.csv")).map_err(|e| e.to_string())?;
    let config = parse_config(fixture("six_stock_config.json")).map_err(|e| e.to_string())?;
    let p = config.build_problem(history).map_err(|e| e.to_string())?;
    let s = solve_portfolio(&p, 0.5, 0.24).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let achieved = sd(risk_interval(&s.x, p.universe()), p.risk_tolerance());
    if achieved < 0.5 - 1e-9 {
        return Err(format!("recomputed sd {achieved} < 0.5"));
    }
    let budget: f64 = s.x.iter().sum();
    if (budget - 1.0).abs() > 1e-9 {
        return Err(format!("budget {budget}"));
    }
    within(elapsed, Duration::from_millis(50))?;
    Ok(format!(
        "sd = {achieved:.6}, budget error {:.1e}, in {elapsed:?}",
        (budget - 1.0).abs()
    ))
}

fn lp_vs_enumeration() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for case in 0..200 {
        let lp: StandardLP = random_lp(8, &mut || rng.gen::<f64>());
        let (best, _) =
            enumerate_vertices(&lp, 1e-7).ok_or(format!("case {case}: no feasible vertex"))?;
        let result = solve_lp(&lp, 1e-9, 1e-9).map_err(|e| format!("case {case}: {e}"))?;
        if result.status != LpStatus::Optimal {
            return Err(format!("case {case}: status {:?}", result.status));
        }
        let diff = (result.objective - best).abs();
        worst = worst.max(diff);
        if diff > 1e-7 {
            return Err(format!(
                "case {case}: simplex {} vs enumeration {best}",
                result.objective
            ));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("200 LPs, max |diff| {worst:.2e}, in {elapsed:?}"))
}

fn cli_api_equivalence() -> Outcome {
    let history = fixture("six_stock_history.csv");
    let config = fixture("six_stock_config.json");
    let output = Command::new(env!("CARGO_BIN_EXE_satport"))
        .args(["solve", "--history"])
        .arg(&history)
        .arg("--config")
        .arg(&config)
        .args(["--alpha", "0.5", "--lambda", "0.24"])
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "cli exited {}: {}",
            output.status,
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    let cli_doc: SolutionDocument =
        serde_json::from_slice(&output.stdout).map_err(|e| e.to_string())?;

    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let api_doc: SolutionDocument = runtime.block_on(async {
        let app = router(AppState::new());
        let config_value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&config).unwrap()).unwrap();
        let body = json!({ "history": std::fs::read_to_string(&history).unwrap(), "config": config_value });
        let created = send(&app, "/api/problems", body).await?;
        let id = created["id"].as_str().ok_or("no id")?.to_string();
        let solved = send(&app, &format!("/api/problems/{id}/solve"), json!({ "alpha": 0.5, "lambda": 0.24 })).await?;
        serde_json::from_value(solved).map_err(|e| e.to_string())
    })?;

    if cli_doc.solution.x != api_doc.solution.x {
        return Err(format!(
            "allocations differ: cli {:?} vs api {:?}",
            cli_doc.solution.x, api_doc.solution.x
        ));
    }
    if cli_doc.solution.net_return_interval != api_doc.solution.net_return_interval
        || cli_doc.solution.risk_interval != api_doc.solution.risk_interval
    {
        return Err("intervals differ".into());
    }
    Ok(format!(
        "allocations bit-identical ({} entries)",
        cli_doc.solution.x.len()
    ))
}

async fn send(
    app: &axum::Router,
    uri: &str,
    body: serde_json::Value,
) -> Result<serde_json::Value, String> {
    let request = Request::builder()
        .method("POST")
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .map_err(|e| e.to_string())?;
    let response = app
        .clone()
        .oneshot(request)
        .await
        .map_err(|e| e.to_string())?;
    let status = response.status();
    let bytes = to_bytes(response.into_body(), usize::MAX)
        .await
        .map_err(|e| e.to_string())?;
    if !status.is_success() {
        return Err(format!(
            "{uri}: {status} {}",
            String::from_utf8_lossy(&bytes)
        ));
    }
    serde_json::from_slice(&bytes).map_err(|e| e.to_string())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("figure-case quadruples", figure_quadruples),
        ("linearization identity", linearization_identity),
        ("portfolio LP vs grid-search oracle", plp2_vs_grid),
        ("monotonicity and brackets", monotonicity),
        ("auxiliary-variable integrity", auxiliary_integrity),
        ("six-stock fixture pipeline", fixture_pipeline),
        ("LP solver vs vertex enumeration", lp_vs_enumeration),
        ("CLI/API equivalence", cli_api_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
