//! Command-line front end: dataset collection, prediction, benchmark
//! experiments, offline variational runs, and sample-size planning.
//!
//! Exit codes: 0 success, 2 usage/parse error, 3 data/format error,
//! 4 numeric guard.

use shadowpred::circuit::{expectation, Circuit, StateVector};
use shadowpred::error::Error;
use shadowpred::experiments::{
    build_biqc9, build_ghz_rotational, build_hea_3q, build_trotter_ising, fmt12,
    lowerbound_to_csv, rows_to_csv, run_ghz_experiment, run_ising_experiment,
    run_lowerbound_experiment, sweep_to_csv, ExperimentConfig, LowerBoundConfig,
};
use shadowpred::learner::{
    full_expansion_sample_size, estimate_gradient_constant, plan, EvalMode, Predictor,
};
use shadowpred::pauli::parse_observable;
use shadowpred::shadow::{collect_dataset, load_dataset, save_dataset};
use shadowpred::vqa::{
    classifier_accuracy, exact_energy, offline_classifier_train, offline_vqe,
    synth_classification_dataset, OptimizerConfig,
};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: &str = "\
shadowpred - kernel prediction of circuit observables from shadow data

USAGE:
  shadowpred collect    --builtin NAME | --circuit FILE  --examples N --shots T
                        --seed S --out FILE [--qubits N]
  shadowpred predict    --dataset FILE --lambda L --observable EXPR
                        (--x \"v1,v2,..\" | --x-file FILE)
                        [--exact-circuit FILE | --exact-builtin NAME] [--mode kernel|features]
  shadowpred experiment --name ghz|ising|lowerbound --out DIR [--config FILE]
                        [--qubits N] [--d D] [--ns LIST] [--shots LIST]
                        [--lambdas LIST] [--seed S] [--test-points N]
                        [--eps E] [--B B] [--pairs N] [--samples N]
  shadowpred vqe        --dataset FILE --lambda L --hamiltonian EXPR --eta E
                        --iters K --seed S [--out FILE]
                        [--exact-circuit FILE | --exact-builtin NAME]
  shadowpred classify   --dataset FILE --lambda L --eta E --iters K --seed S
                        [--data-seed S] [--pos N] [--neg N] [--train N] [--out FILE]
  shadowpred plan       --epsilon E --delta D --B B --K K --d D
                        (--C C | --estimate-C --builtin NAME|--circuit FILE
                         --observable EXPR --samples N --seed S)

Builtin circuits: ghz:N, ising:N:d, hea3q, biqc9.
Global flags: --threads N (or SHADOWPRED_THREADS) caps the worker pool;
--config FILE loads key=value defaults that explicit flags override.
All floating-point output carries 12 significant digits.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::Parse(_) => 2,
                Error::Dimension(_) | Error::Format(_) | Error::Io(_) => 3,
                Error::Guard(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}

/// Parsed flags: config-file values first, command-line values override.
struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, Error> {
        let mut cli = BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let key = arg
                .strip_prefix("--")
                .ok_or_else(|| Error::Parse(format!("expected a --flag, got `{arg}`")))?;
            if key == "estimate-C" {
                cli.insert(key.to_string(), "true".to_string());
                i += 1;
                continue;
            }
            let value = args
                .get(i + 1)
                .ok_or_else(|| Error::Parse(format!("flag --{key} needs a value")))?;
            cli.insert(key.to_string(), value.clone());
            i += 2;
        }
        let mut values = BTreeMap::new();
        if let Some(path) = cli.get("config") {
            let text = fs::read_to_string(path)?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad config line `{line}`")))?;
                values.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        values.extend(cli);
        Ok(Flags { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, Error> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing required flag --{key}")))
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<T, Error> {
        self.require(key)?
            .parse::<T>()
            .map_err(|_| Error::Parse(format!("bad value for --{key}")))
    }

    fn parse_num_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Error> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("bad value for --{key}"))),
        }
    }

    fn parse_list(&self, key: &str) -> Result<Vec<usize>, Error> {
        self.require(key)?
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad list entry in --{key}")))
            })
            .collect()
    }

    /// Echo of the effective configuration, one line per key.
    fn log_effective(&self) {
        for (k, v) in &self.values {
            println!("config {k}={v}");
        }
    }
}

fn init_threads(flags: &Flags) -> Result<(), Error> {
    let from_env = std::env::var("SHADOWPRED_THREADS").ok();
    let requested = flags
        .get("threads")
        .map(str::to_string)
        .or(from_env)
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse("bad thread count".into()))
        })
        .transpose()?;
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::Parse("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Guard(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn builtin_circuit(name: &str) -> Result<(Circuit, StateVector), Error> {
    if let Some(n) = name.strip_prefix("ghz:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit count in `{name}`")))?;
        return build_ghz_rotational(n);
    }
    if let Some(rest) = name.strip_prefix("ising:") {
        let (n, d) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected ising:N:d, got `{name}`")))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit count in `{name}`")))?;
        let d: usize = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad step count in `{name}`")))?;
        return build_trotter_ising(n, d);
    }
    match name {
        "hea3q" => build_hea_3q(),
        "biqc9" => build_biqc9(),
        other => Err(Error::Parse(format!("unknown builtin circuit `{other}`"))),
    }
}

fn load_circuit_arg(flags: &Flags) -> Result<(Circuit, StateVector), Error> {
    match (flags.get("circuit"), flags.get("builtin")) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            let c = Circuit::from_text(&text)?;
            let n = c.n_qubits();
            Ok((c, StateVector::zero_state(n)))
        }
        (None, Some(name)) => builtin_circuit(name),
        _ => Err(Error::Parse(
            "provide exactly one of --circuit or --builtin".into(),
        )),
    }
}

fn load_exact_circuit(flags: &Flags) -> Result<Option<(Circuit, StateVector)>, Error> {
    match (flags.get("exact-circuit"), flags.get("exact-builtin")) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            let c = Circuit::from_text(&text)?;
            let n = c.n_qubits();
            Ok(Some((c, StateVector::zero_state(n))))
        }
        (None, Some(name)) => Ok(Some(builtin_circuit(name)?)),
        (None, None) => Ok(None),
        _ => Err(Error::Parse(
            "provide at most one of --exact-circuit or --exact-builtin".into(),
        )),
    }
}

fn run(args: &[String]) -> Result<(), Error> {
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return Err(Error::Parse("missing command".into()));
    };
    if command == "--help" || command == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let flags = Flags::parse(&args[1..])?;
    init_threads(&flags)?;
    match command.as_str() {
        "collect" => cmd_collect(&flags),
        "predict" => cmd_predict(&flags),
        "experiment" => cmd_experiment(&flags),
        "vqe" => cmd_vqe(&flags),
        "classify" => cmd_classify(&flags),
        "plan" => cmd_plan(&flags),
        other => {
            eprint!("{USAGE}");
            Err(Error::Parse(format!("unknown command `{other}`")))
        }
    }
}

fn cmd_collect(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let (circuit, initial) = load_circuit_arg(flags)?;
    if let Some(declared) = flags.get("qubits") {
        let declared: usize = declared
            .parse()
            .map_err(|_| Error::Parse("bad value for --qubits".into()))?;
        if declared != circuit.n_qubits() {
            return Err(Error::Dimension(format!(
                "--qubits {declared} does not match the circuit ({})",
                circuit.n_qubits()
            )));
        }
    }
    for (slot, count) in circuit.slot_reference_counts().iter().enumerate() {
        if *count == 0 {
            println!("warning: slot {slot} is not referenced by any gate");
        }
    }
    let n: usize = flags.parse_num("examples")?;
    let shots: usize = flags.parse_num("shots")?;
    if n == 0 || shots == 0 {
        return Err(Error::Parse(
            "--examples and --shots must be positive".into(),
        ));
    }
    let seed: u64 = flags.parse_num("seed")?;
    let out = PathBuf::from(flags.require("out")?);
    let dataset = collect_dataset(&circuit, &initial, n, shots, seed)?;
    save_dataset(&dataset, &out)?;
    println!(
        "collected qubits={} slots={} examples={} shots={} digest={}",
        dataset.n_qubits,
        dataset.n_slots,
        dataset.size(),
        dataset.shots,
        dataset.circuit_digest
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_x_vector(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad input component `{v}`")))
        })
        .collect()
}

fn cmd_predict(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let dataset = load_dataset(Path::new(flags.require("dataset")?))?;
    let lambda: usize = flags.parse_num("lambda")?;
    let obs = parse_observable(flags.require("observable")?, dataset.n_qubits)?;
    let mode = match flags.get("mode").unwrap_or("kernel") {
        "kernel" => EvalMode::KernelSum,
        "features" => EvalMode::Features,
        other => return Err(Error::Parse(format!("unknown mode `{other}`"))),
    };
    let queries: Vec<Vec<f64>> = match (flags.get("x"), flags.get("x-file")) {
        (Some(text), None) => vec![parse_x_vector(text)?],
        (None, Some(path)) => fs::read_to_string(path)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(parse_x_vector)
            .collect::<Result<_, _>>()?,
        _ => {
            return Err(Error::Parse(
                "provide exactly one of --x or --x-file".into(),
            ))
        }
    };
    let exact = load_exact_circuit(flags)?;
    if let Some((circuit, _)) = &exact {
        if circuit.digest() != dataset.circuit_digest {
            println!(
                "warning: circuit digest {} does not match dataset digest {}",
                circuit.digest(),
                dataset.circuit_digest
            );
        }
    }
    let d = dataset.n_slots;
    let pred = Predictor::from_shadow(dataset, lambda, mode)?;
    for x in &queries {
        if x.len() != d {
            return Err(Error::Dimension(format!(
                "input has {} components, dataset has {d} slots",
                x.len()
            )));
        }
        let value = pred.predict(x, &obs)?;
        let xs: Vec<String> = x.iter().map(|v| fmt12(*v)).collect();
        match &exact {
            None => println!("x={} prediction={}", xs.join(","), fmt12(value)),
            Some((circuit, initial)) => {
                let truth = expectation(circuit, x, initial, &obs)?;
                println!(
                    "x={} prediction={} exact={} error={}",
                    xs.join(","),
                    fmt12(value),
                    fmt12(truth),
                    fmt12(value - truth)
                );
            }
        }
    }
    Ok(())
}

fn cmd_experiment(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let name = flags.require("name")?;
    let out_dir = PathBuf::from(flags.require("out")?);
    fs::create_dir_all(&out_dir)?;
    match name {
        "ghz" | "ising" => {
            let cfg = ExperimentConfig {
                n_qubits: flags.parse_num("qubits")?,
                d: flags.parse_num_or("d", 1)?,
                ns: flags.parse_list("ns")?,
                shots: flags.parse_list("shots")?,
                lambdas: flags.parse_list("lambdas")?,
                seed: flags.parse_num("seed")?,
                test_points: flags.parse_num_or("test-points", 10)?,
            };
            if name == "ghz" {
                let rows = run_ghz_experiment(&cfg)?;
                let path = out_dir.join("ghz.csv");
                fs::write(&path, rows_to_csv(&rows))?;
                println!("wrote {}", path.display());
            } else {
                let result = run_ising_experiment(&cfg)?;
                let path = out_dir.join("ising.csv");
                fs::write(&path, rows_to_csv(&result.rows))?;
                println!("wrote {}", path.display());
                if let Some(sweep) = result.sweep {
                    let path = out_dir.join("ising_sweep.csv");
                    fs::write(&path, sweep_to_csv(&sweep))?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        "lowerbound" => {
            let cfg = LowerBoundConfig {
                d: flags.parse_num("d")?,
                eps: flags.parse_num_or("eps", 0.04)?,
                b: flags.parse_num_or("B", 1.0)?,
                pairs: flags.parse_num_or("pairs", 10)?,
                samples: flags.parse_num_or("samples", 1_000_000)?,
                seed: flags.parse_num("seed")?,
            };
            let rows = run_lowerbound_experiment(&cfg)?;
            let path = out_dir.join("lowerbound.csv");
            fs::write(&path, lowerbound_to_csv(&rows))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        other => Err(Error::Parse(format!("unknown experiment `{other}`"))),
    }
}

fn cmd_vqe(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let dataset = load_dataset(Path::new(flags.require("dataset")?))?;
    let lambda: usize = flags.parse_num("lambda")?;
    let hamiltonian = parse_observable(flags.require("hamiltonian")?, dataset.n_qubits)?;
    let eta: f64 = flags.parse_num("eta")?;
    let iters: usize = flags.parse_num("iters")?;
    let seed: u64 = flags.parse_num("seed")?;
    let exact = load_exact_circuit(flags)?;
    let pred = Predictor::from_shadow(dataset, lambda, EvalMode::Features)?;
    let cfg = OptimizerConfig::new(eta, iters, seed);
    let trace = offline_vqe(&pred, &hamiltonian, &cfg)?;
    if let Some(out) = flags.get("out") {
        fs::write(out, trace.to_csv())?;
        println!("wrote {out}");
    }
    let params: Vec<String> = trace.final_params().iter().map(|v| fmt12(*v)).collect();
    println!("final_params={}", params.join(","));
    println!("surrogate_value={}", fmt12(trace.final_objective()));
    if let Some((circuit, initial)) = exact {
        let energy = exact_energy(&circuit, &initial, &hamiltonian, trace.final_params())?;
        println!("exact_value={}", fmt12(energy));
    }
    Ok(())
}

fn cmd_classify(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let dataset = load_dataset(Path::new(flags.require("dataset")?))?;
    let lambda: usize = flags.parse_num("lambda")?;
    let eta: f64 = flags.parse_num("eta")?;
    let iters: usize = flags.parse_num("iters")?;
    let seed: u64 = flags.parse_num("seed")?;
    let data_seed: u64 = flags.parse_num_or("data-seed", seed)?;
    let n_pos: usize = flags.parse_num_or("pos", 500)?;
    let n_neg: usize = flags.parse_num_or("neg", 500)?;
    let default_train = (n_pos + n_neg) * 4 / 5;
    let train_count: usize = flags.parse_num_or("train", default_train)?;
    if train_count == 0 || train_count >= n_pos + n_neg {
        return Err(Error::Parse(
            "--train must split the dataset into non-empty parts".into(),
        ));
    }
    let obs = parse_observable("1.0*X0", dataset.n_qubits)?;
    let pred = Predictor::from_shadow(dataset, lambda, EvalMode::Features)?;
    let (data, _theta_star) = synth_classification_dataset(data_seed, n_pos, n_neg)?;
    let (train, test) = data.split_at(train_count);
    let cfg = OptimizerConfig::new(eta, iters, seed);
    let trace = offline_classifier_train(&pred, &obs, train, &cfg)?;
    if let Some(out) = flags.get("out") {
        fs::write(out, trace.to_csv())?;
        println!("wrote {out}");
    }
    let train_acc = classifier_accuracy(&pred, &obs, trace.final_params(), train)?;
    let test_acc = classifier_accuracy(&pred, &obs, trace.final_params(), test)?;
    println!("final_loss={}", fmt12(trace.final_objective()));
    println!("train_accuracy={}", fmt12(train_acc));
    println!("test_accuracy={}", fmt12(test_acc));
    Ok(())
}

fn cmd_plan(flags: &Flags) -> Result<(), Error> {
    flags.log_effective();
    let epsilon: f64 = flags.parse_num("epsilon")?;
    let delta: f64 = flags.parse_num("delta")?;
    let b: f64 = flags.parse_num("B")?;
    let k: usize = flags.parse_num("K")?;
    let d: usize = flags.parse_num("d")?;
    let c = match (flags.get("C"), flags.get("estimate-C")) {
        (Some(v), None) => v
            .parse::<f64>()
            .map_err(|_| Error::Parse("bad value for --C".into()))?,
        (None, Some(_)) => {
            let (circuit, initial) = load_circuit_arg(flags)?;
            if circuit.n_slots() != d {
                return Err(Error::Dimension(format!(
                    "circuit has {} slots, --d says {d}",
                    circuit.n_slots()
                )));
            }
            let obs = parse_observable(flags.require("observable")?, circuit.n_qubits())?;
            let samples: usize = flags.parse_num_or("samples", 2000)?;
            let seed: u64 = flags.parse_num("seed")?;
            let est = estimate_gradient_constant(&circuit, &initial, &obs, samples, seed)?;
            println!(
                "estimated_C={} std_error={} samples={}",
                fmt12(est.mean),
                fmt12(est.std_error),
                est.samples
            );
            est.mean
        }
        _ => {
            return Err(Error::Parse(
                "provide exactly one of --C or --estimate-C".into(),
            ))
        }
    };
    let p = plan(epsilon, delta, b, k, c, d)?;
    println!("lambda={}", p.lambda);
    println!("cardinality={}", p.cardinality);
    println!("n={}", p.n);
    println!(
        "full_expansion_n={}",
        full_expansion_sample_size(d, b, epsilon, delta)?
    );
    // optional information-theoretic lower bound; the constant is unpinned
    // and must come from the caller
    if let Some(c1) = flags.get("C1") {
        let c1: f64 = c1
            .parse()
            .map_err(|_| Error::Parse("bad value for --C1".into()))?;
        let shots: usize = flags.parse_num_or("shots", 1)?;
        let bound = shadowpred::learner::sample_size_lower_bound(d, epsilon, shots, c1)?;
        println!("lower_bound_n={}", fmt12(bound));
    }
    Ok(())
}
