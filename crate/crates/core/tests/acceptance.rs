//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits non-zero when any of them fails.

use std::time::{Duration, Instant};

use matroid_walks::entropy::{admissible_links, exact_mixing_time, mlsi_bound, spectral_gap, verify_link_mlsc, SearchConfig};
use matroid_walks::experiment::{self, hypercube, Cell, ExperimentConfig, Instance, Report, Suite};
use matroid_walks::matroid::{build_uniform, WeightedComplex};
use matroid_walks::walks::{adjoint_identity_holds, down_up_walk, walk, WalkKind};

const SEED: u64 = 20240611;

type Outcome = Result<(), String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn config(suite: Suite) -> ExperimentConfig {
    ExperimentConfig::new(suite).with_seed(SEED)
}

fn run(suite: Suite, instances: &[Instance]) -> Result<Report, String> {
    experiment::run(&config(suite), instances, &[]).map_err(|e| format!("{suite}: {e}"))
}

fn text(cell: &Cell) -> String {
    match cell {
        Cell::Text(s) => s.clone(),
        other => format!("{other:?}"),
    }
}

/// Every row whose `check` column is one of `checks` passed.
fn rows_pass(report: &Report, checks: &[&str]) -> Outcome {
    let col = report.column("check").expect("long-format report");
    let mut seen = 0;
    for row in &report.rows {
        let name = text(&row[col]);
        if checks.contains(&name.as_str()) {
            seen += 1;
            check(row.last() == Some(&Cell::Bool(true)), || format!("failing row {row:?}"))?;
        }
    }
    check(seen > 0, || format!("no rows for {checks:?}"))
}

fn all_rows_pass(report: &Report) -> Outcome {
    for row in &report.rows {
        check(row.last() == Some(&Cell::Bool(true)), || format!("{}: failing row {row:?}", report.suite))?;
    }
    check(report.passed, || format!("{}: {:?}", report.suite, report.notes))
}

fn structure(catalog: &[Instance]) -> Outcome {
    all_rows_pass(&run(Suite::Axioms, catalog)?)?;
    for inst in catalog {
        let wc = &inst.complex;
        check(wc.structure_report().passed(), || format!("{}: weight table", inst.id))?;
        for k in 0..wc.rank() {
            check(adjoint_identity_holds(wc, k).map_err(|e| e.to_string())?, || format!("{}: adjoint at {k}", inst.id))?;
        }
        for (kind, k) in (1..wc.rank()).map(|k| (WalkKind::UpDown, k)).chain((2..=wc.rank()).map(|k| (WalkKind::DownUp, k))) {
            let p = walk(wc, kind, k).map_err(|e| e.to_string())?;
            check(p.is_row_stochastic() && p.is_reversible() && p.is_stationary(), || {
                format!("{}: {kind} walk at level {k}", inst.id)
            })?;
        }
    }
    Ok(())
}

fn spectral(catalog: &[Instance]) -> Outcome {
    let u23 = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
    let gap = spectral_gap(&down_up_walk(&u23, 2).unwrap()).unwrap().gap;
    check((gap - 0.75).abs() <= 1e-12, || format!("U(2,3) down-up gap {gap}"))?;
    // the walks suite compares each up-down gap with its down-up partner at 1e-9
    all_rows_pass(&run(Suite::Walks, catalog)?)
}

fn mlsc_search(catalog: &[Instance], constants: &Report) -> Outcome {
    all_rows_pass(constants)?;
    let (rho, lower) = (constants.column("rho_hat").unwrap(), constants.column("bound_1_over_k").unwrap());
    for row in &constants.rows {
        if let (Cell::Float(r), Cell::Float(b)) = (&row[rho], &row[lower]) {
            check(*r >= b - 1e-6, || format!("ratio below bound: {row:?}"))?;
        }
    }
    let cfg = SearchConfig { restarts: 200, budget: 200, seed: SEED };
    for inst in catalog {
        for base in admissible_links(&inst.complex) {
            let link = verify_link_mlsc(&inst.complex, base, &cfg, 0).map_err(|e| e.to_string())?;
            check(link.search.value >= 0.5 - 1e-6, || format!("{}: link {base} ratio {}", inst.id, link.search.value))?;
        }
    }
    Ok(())
}

fn identities(contraction: &Report) -> Outcome {
    rows_pass(
        contraction,
        &[
            "entropy-contraction",
            "entropy-chain",
            "projection",
            "one-step-kl",
            "down-entropy",
            "chain-rule",
            "mixture-identity",
            "link-sum-entropy",
        ],
    )?;
    rows_pass(contraction, &["pinsker"])?;
    let trials = contraction.column("trials").unwrap();
    let check_col = contraction.column("check").unwrap();
    for row in &contraction.rows {
        if text(&row[check_col]) == "entropy-contraction" {
            check(row[trials] == Cell::Int(1000), || format!("trial count {row:?}"))?;
        }
    }
    Ok(())
}

fn quadratic(contraction: &Report) -> Outcome {
    rows_pass(contraction, &["quadratic-bound", "eigenvalue-count"])
}

fn hypercube_mixing() -> Outcome {
    let mut previous = 0;
    let mut line = Vec::new();
    for n in 2..=8usize {
        let inst = hypercube(n).map_err(|e| e.to_string())?;
        let p = matroid_walks::walks::bases_exchange(&inst.complex).map_err(|e| e.to_string())?;
        let t = exact_mixing_time(&p, 0.25, 100_000).map_err(|e| e.to_string())?.exact_t.ok_or("no mixing")?;
        let nf = n as f64;
        let ratio = t as f64 / (nf * nf.ln());
        line.push(format!("n={n} t={t}"));
        check(t >= previous, || format!("exact_t decreased at n = {n}"))?;
        check((0.1..=3.0).contains(&ratio), || format!("t/(n log n) = {ratio} at n = {n}"))?;
        if let Some(b) = mlsi_bound(nf, 0.5f64.powi(n as i32), 0.25) {
            let closed = nf * ((nf * 2f64.ln()).ln() + 8f64.ln());
            check((b - closed).abs() < 1e-9, || format!("bound {b} vs {closed}"))?;
            check(t as f64 <= b, || format!("exact_t {t} above bound {b} at n = {n}"))?;
        }
        previous = t;
    }
    println!("  hypercube mixing times: {}", line.join(", "));
    Ok(())
}

fn theta_checks(theta: &Report) -> Outcome {
    all_rows_pass(theta)?;
    let (check_col, value) = (theta.column("check").unwrap(), theta.column("value").unwrap());
    for row in &theta.rows {
        let name = text(&row[check_col]);
        if name.starts_with("threshold") {
            println!("  {name}: {:?}", row[value]);
        }
    }
    Ok(())
}

fn concentration(catalog: &[Instance]) -> Outcome {
    let report = run(Suite::Concentration, catalog)?;
    all_rows_pass(&report)?;
    let (c, observed) = (report.column("c").unwrap(), report.column("lipschitz_observed").unwrap());
    for row in &report.rows {
        if let (Cell::Float(c), Cell::Float(o)) = (&row[c], &row[observed]) {
            check(o <= c, || format!("Lipschitz constant exceeded: {row:?}"))?;
        }
    }
    Ok(())
}

fn determinism(catalog: &[Instance], first: &[&Report]) -> Outcome {
    for earlier in first {
        let again = run(earlier.suite, catalog)?;
        check(again.to_csv() == earlier.to_csv(), || format!("{} csv differs", earlier.suite))?;
        check(again.to_json() == earlier.to_json(), || format!("{} json differs", earlier.suite))?;
    }
    Ok(())
}

struct Ledger {
    failures: usize,
}

impl Ledger {
    fn record(&mut self, n: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let late = limit.is_some_and(|l| elapsed > l);
        let verdict = match (&outcome, late) {
            (Ok(()), false) => "PASS".to_string(),
            (Ok(()), true) => format!("FAIL (over the {:?} limit)", limit.unwrap()),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if outcome.is_err() || late {
            self.failures += 1;
        }
        println!("criterion {n}: {verdict} [{name}, {:.2}s]", elapsed.as_secs_f64());
    }
}

fn main() {
    let catalog = experiment::bundled();
    let mut ledger = Ledger { failures: 0 };
    let secs = Duration::from_secs;

    ledger.record(1, "structure exactness", Some(secs(10)), || structure(&catalog));
    ledger.record(2, "spectral gaps", None, || spectral(&catalog));

    let mut constants = None;
    ledger.record(3, "modified log-Sobolev search", Some(secs(180)), || {
        let report = run(Suite::Constants, &catalog)?;
        let out = mlsc_search(&catalog, &report);
        constants = Some(report);
        out
    });

    let mut contraction = None;
    ledger.record(4, "entropy identities and contraction", None, || {
        let report = run(Suite::Contraction, &catalog)?;
        let out = identities(&report);
        contraction = Some(report);
        out
    });
    ledger.record(5, "link quadratic form and eigenvalues", None, || {
        contraction.as_ref().ok_or_else(|| "contraction suite did not run".to_string()).and_then(quadratic)
    });

    ledger.record(6, "hypercube mixing", Some(secs(60)), hypercube_mixing);

    let mut theta = None;
    ledger.record(7, "theta family", Some(secs(60)), || {
        let report = run(Suite::ThetaScan, &catalog)?;
        let out = theta_checks(&report);
        theta = Some(report);
        out
    });

    ledger.record(8, "concentration tails", Some(secs(30)), || concentration(&catalog));

    ledger.record(9, "determinism", None, || {
        let first: Vec<&Report> = [&constants, &contraction, &theta].into_iter().flatten().collect();
        check(first.len() == 3, || "a randomized suite did not run".to_string())?;
        determinism(&catalog, &first)
    });

    if ledger.failures > 0 {
        println!("{} criteria failed", ledger.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
