use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qleak_core::io::{
    ensemble_from_json, ensemble_to_json, fmt_sig9, leakage_result_to_json, write_audit_csv,
    write_objective_trace_csv, write_runs_csv, write_summary_csv, write_sweep_csv,
};
use qleak_core::random::{random_pure_state, task_rng};
use qleak_core::{
    audit_bounds, audit_sweep, basis_encoding, compute_leakage, optimize_encoding, perfect_discrimination,
    sweep_qubits, AuditLimits, AuditRow, EncodingProblem, Ensemble, OptimizerConfig, SolverConfig,
};

use crate::config::{
    load_file, parse_qubits, LeakageArgs, LeakageFile, OptimizeArgs, OptimizeFile, SweepArgs, SweepFile, VerifyArgs,
    VerifyFile,
};
use crate::CliError;

fn solver_config(tol: Option<f64>, max_iter: Option<usize>, restarts: Option<usize>, seed: u64) -> SolverConfig {
    let d = SolverConfig::default();
    SolverConfig {
        tol: tol.unwrap_or(d.tol),
        max_iter: max_iter.unwrap_or(d.max_iter),
        restarts: restarts.unwrap_or(d.restarts),
        outcome_count: None,
        seed,
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{name} is required")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn build_ensemble(kind: &str, alphabet: Option<usize>, dim: Option<usize>, seed: u64) -> Result<Ensemble, CliError> {
    match kind {
        "basis" => {
            let n = required(alphabet, "alphabet")?;
            let d = dim.unwrap_or(n);
            basis_encoding(n, d, |x| x).map_err(|e| CliError::Config(e.to_string()))
        }
        "random" => {
            let n = required(alphabet, "alphabet")?;
            let d = required(dim, "dim")?;
            let p = EncodingProblem::new(n, d).map_err(|e| CliError::Config(e.to_string()))?;
            let mut rng = task_rng(seed, 0);
            let states = (0..p.alphabet_size)
                .map(|_| random_pure_state(p.dim, &mut rng))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Ensemble::from_pure_states(&states)?)
        }
        path => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read ensemble {path}: {e}")))?;
            ensemble_from_json(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
        }
    }
}

pub fn leakage(args: LeakageArgs) -> Result<(), CliError> {
    let file: LeakageFile = load_file(args.common.config.as_deref())?;
    let seed = args.common.seed.or(file.seed).unwrap_or(0);
    let kind = required(args.ensemble.or(file.ensemble), "ensemble")?;
    let ens = build_ensemble(&kind, args.alphabet.or(file.alphabet), args.dim.or(file.dim), seed)?;
    let mut cfg = solver_config(
        args.common.tol.or(file.tol),
        args.max_iter.or(file.max_iter),
        args.restarts.or(file.restarts),
        seed,
    );
    cfg.outcome_count = args.outcomes.or(file.outcomes);
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let res = compute_leakage(&ens, &cfg)?;
    let json = leakage_result_to_json(&res)?;
    println!("{json}");
    if let Some(path) = args.common.out.or(file.out) {
        let mut w = create(&path)?;
        writeln!(w, "{json}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    if let Some(path) = args.trace.or(file.trace) {
        write_objective_trace_csv(&res, create(&path)?)?;
    }
    if !res.converged {
        return Err(CliError::NonConvergence(format!(
            "solver stopped after {} iterations without reaching tol {:e}",
            res.iterations, cfg.tol
        )));
    }
    Ok(())
}

fn optimizer_config(
    mu: Option<f64>,
    iters: Option<usize>,
    restarts: Option<usize>,
    seed: u64,
    solver: SolverConfig,
) -> Result<OptimizerConfig, CliError> {
    let d = OptimizerConfig::default();
    let cfg = OptimizerConfig {
        step_size: mu.unwrap_or(d.step_size),
        iterations: iters.unwrap_or(d.iterations),
        restarts: restarts.unwrap_or(d.restarts),
        seed,
        solver,
    };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let file: OptimizeFile = load_file(args.common.config.as_deref())?;
    let seed = args.common.seed.or(file.seed).unwrap_or(0);
    let problem = EncodingProblem::new(
        required(args.alphabet.or(file.alphabet), "alphabet")?,
        required(args.dim.or(file.dim), "dim")?,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let solver = solver_config(args.common.tol.or(file.tol), args.max_iter.or(file.max_iter), None, seed);
    let cfg = optimizer_config(
        args.mu.or(file.mu),
        args.iters.or(file.iters),
        args.restarts.or(file.restarts),
        seed,
        solver,
    )?;

    let run = optimize_encoding(problem, &cfg)?;
    if let Some(dir) = args.common.out.or(file.out) {
        write_runs_csv(&run, create(&dir.join("runs.csv"))?)?;
        write_summary_csv(&run, create(&dir.join("summary.csv"))?)?;
        let mut w = create(&dir.join("best_ensemble.json"))?;
        writeln!(w, "{}", ensemble_to_json(&run.best_ensemble)?).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let last = run.summary.last().expect("at least one iteration");
    println!(
        "{}",
        serde_json::json!({
            "best_leakage_bits": run.best_leakage_bits,
            "best_run": run.best_run,
            "final_median_bits": last.median,
            "final_min_bits": last.min,
            "final_max_bits": last.max,
            "nonconverged_inner_solves": run.nonconverged.len(),
        })
    );
    let final_iter = cfg.iterations;
    if run.nonconverged.contains(&(run.best_run, final_iter)) {
        return Err(CliError::NonConvergence("inner solver did not converge on the best encoding".into()));
    }
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let file: SweepFile = load_file(args.common.config.as_deref())?;
    let seed = args.common.seed.or(file.seed).unwrap_or(0);
    let alphabet = required(args.alphabet.or(file.alphabet), "alphabet")?;
    let (lo, hi) = parse_qubits(&required(args.qubits.or(file.qubits), "qubits")?)?;
    let solver = solver_config(args.common.tol.or(file.tol), args.max_iter.or(file.max_iter), None, seed);
    let cfg = optimizer_config(
        args.mu.or(file.mu),
        args.iters.or(file.iters),
        args.restarts.or(file.restarts),
        seed,
        solver,
    )?;

    let points = sweep_qubits(alphabet, lo..=hi, &cfg).map_err(|e| match e {
        qleak_core::Error::InvalidArgument(msg) => CliError::Config(msg),
        other => other.into(),
    })?;
    match args.common.out.or(file.out) {
        Some(path) => write_sweep_csv(&points, create(&path)?)?,
        None => write_sweep_csv(&points, io::stdout().lock())?,
    }
    Ok(())
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let file: VerifyFile = load_file(args.common.config.as_deref())?;
    let seed = args.common.seed.or(file.seed).unwrap_or(0);
    let solver = solver_config(args.common.tol.or(file.tol), None, None, seed);
    solver.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let defaults = AuditLimits::default();
    let limits = AuditLimits {
        dim_max: args.dim_max.or(file.dim_max).unwrap_or(defaults.dim_max),
        alphabet_max: args.alphabet_max.or(file.alphabet_max).unwrap_or(defaults.alphabet_max),
        outcome_max: args.outcome_max.or(file.outcome_max).unwrap_or(defaults.outcome_max),
    };
    limits.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let rows = if args.counterexample || file.counterexample.unwrap_or(false) {
        let (p, j) = perfect_discrimination(8)?;
        let report = audit_bounds(&p, &j, &solver)?;
        eprintln!(
            "perfect discrimination, d=8: accuracy {} vs corrected bound {} and literal bound {}",
            fmt_sig9(report.accuracy),
            fmt_sig9(report.corrected_bound),
            fmt_sig9(report.literal_bound)
        );
        vec![AuditRow { case_id: 0, seed: 0, dim: 8, alphabet_in: 8, alphabet_out: 8, report }]
    } else {
        let trials = args.trials.or(file.trials).unwrap_or(200);
        audit_sweep(trials, limits, seed, &solver)?
    };

    match args.common.out.or(file.out) {
        Some(path) => write_audit_csv(&rows, create(&path)?)?,
        None => write_audit_csv(&rows, io::stdout().lock())?,
    }
    let violations = rows.iter().filter(|r| !r.report.corrected_holds).count();
    if violations > 0 {
        return Err(CliError::BoundViolation(violations));
    }
    Ok(())
}
