use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qaoa_core::analysis::{
    brute_force_timings, emit_report, group_by_label, read_timing_csv, Series, BRUTE_FORCE_LABEL,
};
use qaoa_core::circuit::{build_qaoa_circuit, QaoaParams};
use qaoa_core::costmodel::{instance_wall_time, read_cost_csv, write_cost_csv};
use qaoa_core::graphs::{brute_force_maxcut, gen_random_3regular, read_graph, reference_instance, write_graph, Graph};
use qaoa_core::maxsat::{emit_wcnf, reduce_to_max2sat};
use qaoa_core::optimizer::{solve_instance, NmConfig, Pipeline, SolveOptions};
use qaoa_core::pipeline::{bench, convergence_study, PipelineConfig};
use qaoa_core::scheduler::{
    choose_grid, emit_pdpt, parse_pdpt, schedule, scheduled_depth, validate_schedule, GridTopology,
};
use qaoa_core::seed::derive_seed;
use qaoa_core::simulator::{run_noisy_ensemble, NoiseParams};

#[derive(Parser)]
#[command(name = "qaoa-bench", version, about = "QAOA Max-Cut cost pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random 3-regular graphs (or the 8-vertex reference instance).
    Gen(GenArgs),
    /// Reduce a graph to weighted Max-2-SAT in WCNF.
    Reduce(ReduceArgs),
    /// Place and route a QAOA circuit on a grid; writes a PDPT table.
    Schedule(ScheduleArgs),
    /// Check a PDPT table against a graph's QAOA circuit.
    Validate(ValidateArgs),
    /// Noisy ensemble simulation of a schedule at fixed angles.
    Simulate(SimulateArgs),
    /// Multi-start QAOA optimization of one instance.
    Solve(SolveArgs),
    /// Sweep sizes and write the projected cost table.
    Bench(BenchArgs),
    /// Fit exponential scaling and locate the crossover.
    Fit(FitArgs),
    /// Running mean of the approximation ratio against noise realizations.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of vertices (even, at least 4).
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the fixed 8-vertex reference instance instead.
    #[arg(long)]
    reference: bool,
    /// Directory for `graph_<n>_<i>.txt`; stdout when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for uniformity; the reduction is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GridArgs {
    /// Grid rows; defaults to the smallest square holding the graph.
    #[arg(long, requires = "cols")]
    rows: Option<usize>,
    #[arg(long, requires = "rows")]
    cols: Option<usize>,
}

impl GridArgs {
    fn topology(&self, n: usize) -> GridTopology {
        match (self.rows, self.cols) {
            (Some(r), Some(c)) => GridTopology::new(r, c),
            _ => choose_grid(n),
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// PDPT output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the schedule as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[arg(long)]
    pdpt: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct NoiseArgs {
    /// Relaxation time in seconds.
    #[arg(long, default_value_t = 200e-6)]
    t1: f64,
    /// Dephasing time in seconds.
    #[arg(long, default_value_t = 100e-6)]
    t2: f64,
    /// Gate (clock cycle) duration in seconds.
    #[arg(long, default_value_t = 10e-9)]
    gate_time: f64,
    /// Simulate an ideal device.
    #[arg(long)]
    noiseless: bool,
}

impl NoiseArgs {
    fn params(&self) -> Result<Option<NoiseParams>> {
        if self.noiseless {
            return Ok(None);
        }
        Ok(Some(NoiseParams::new(self.t1, self.t2, self.gate_time)?))
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Angles `γ_1,…,γ_p,β_1,…,β_p`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    /// Schedule to replay; scheduled on the fly when omitted.
    #[arg(long)]
    pdpt: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 384)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set restarts=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    max_updates: Option<usize>,
    #[arg(long)]
    noiseless: bool,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&read(path)?)
                .with_context(|| format!("in {}", path.display()))?;
        }
        for o in &self.overrides {
            let (k, v) = o.split_once('=').with_context(|| format!("--set {o}: expected KEY=VALUE"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(s) = &self.sizes {
            cfg.sizes = s.clone();
        }
        let set = |v: Option<usize>, f: &mut usize| {
            if let Some(v) = v {
                *f = v;
            }
        };
        set(self.p, &mut cfg.p);
        set(self.instances, &mut cfg.n_instances);
        set(self.restarts, &mut cfg.nm.n_restarts);
        set(self.samples, &mut cfg.nm.n_samples);
        set(self.realizations, &mut cfg.realizations);
        set(self.max_updates, &mut cfg.nm.max_updates);
        if self.noiseless {
            cfg.noise = None;
        }
        if self.exact {
            cfg.pipeline = Pipeline::Exact;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Cost table CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-instance records as JSON.
    #[arg(long)]
    instances_json: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Cost table from `bench`, used as the quantum series.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Timing CSV with columns `N,seconds,label`.
    #[arg(long)]
    timings: Option<PathBuf>,
    /// Label of the quantum series in `--timings` (when `--costs` is absent).
    #[arg(long)]
    quantum: Option<String>,
    /// Label of the classical series in `--timings`.
    #[arg(long)]
    classical: Option<String>,
    /// Time the enumeration Max-2-SAT solver at these sizes as the
    /// classical series (not comparable to a real Max-SAT solver).
    #[arg(long, value_delimiter = ',')]
    brute_force_sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Largest N of the fitted curves in the report.
    #[arg(long, default_value_t = 500.0)]
    n_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Instance; the 8-vertex reference instance when omitted.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Angles `γ_1,…,γ_p,β_1,…,β_p`; found by a noiseless exact optimization
    /// when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    /// T2 / T_G values (T1 = 2·T2).
    #[arg(long, value_delimiter = ',', default_value = "500,10000")]
    ratios: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 400)]
    realizations: usize,
    #[arg(long, default_value_t = 10e-9)]
    gate_time: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long)]
    out_prefix: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let graphs: Vec<Graph> = if a.reference {
        vec![reference_instance()]
    } else {
        (0..a.count)
            .map(|i| gen_random_3regular(a.n, derive_seed(a.seed, &[i as u64])))
            .collect::<Result<_, _>>()?
    };
    match &a.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (i, g) in graphs.iter().enumerate() {
                let path = dir.join(format!("graph_{}_{i}.txt", g.n()));
                fs::write(&path, write_graph(g))?;
            }
        }
        None => graphs.iter().for_each(|g| print!("{}", write_graph(g))),
    }
    Ok(())
}

fn cmd_reduce(a: &ReduceArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    write_or_print(a.out.as_deref(), &emit_wcnf(&reduce_to_max2sat(&g)))
}

fn cmd_schedule(a: &ScheduleArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let c = build_qaoa_circuit(&g, &QaoaParams::zeros(a.p));
    let t = a.grid.topology(g.n());
    let s = schedule(&c, t, a.seed)?;
    let v = validate_schedule(&s, &c, t);
    if !v.is_empty() {
        bail!("internal error: generated schedule is invalid: {}", v[0]);
    }
    eprintln!("{}x{} grid, depth {}, {} swaps", t.rows, t.cols, scheduled_depth(&s), s.swap_count());
    if let Some(j) = &a.json {
        fs::write(j, s.to_json())?;
    }
    write_or_print(a.out.as_deref(), &emit_pdpt(&s))
}

fn cmd_validate(a: &ValidateArgs) -> Result<bool> {
    let g = load_graph(&a.graph)?;
    let c = build_qaoa_circuit(&g, &QaoaParams::zeros(a.p));
    let s = parse_pdpt(&read(&a.pdpt)?).with_context(|| format!("in {}", a.pdpt.display()))?;
    let t = a.grid.topology(g.n());
    let v = validate_schedule(&s, &c, t);
    for x in &v {
        println!("{x}");
    }
    println!("{} violations, depth {}", v.len(), scheduled_depth(&s));
    Ok(v.is_empty())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let params = QaoaParams::from_flat(&a.params)?;
    let c = build_qaoa_circuit(&g, &params);
    let s = match &a.pdpt {
        Some(path) => parse_pdpt(&read(path)?)?,
        None => schedule(&c, a.grid.topology(g.n()), a.seed)?,
    };
    let noise = a.noise.params()?;
    let cut = g.cut_table();
    let sol = brute_force_maxcut(&g)?;
    let e = run_noisy_ensemble(&s, &c, noise.as_ref(), a.realizations, a.seed, Some(&cut))?;
    let mean_cut = e.expectation(&cut);
    let out = serde_json::json!({
        "n": g.n(),
        "p": params.p(),
        "depth": scheduled_depth(&s),
        "realizations": e.realizations,
        "master_seed": e.master_seed,
        "noise": noise,
        "mean_cut": mean_cut,
        "k_max": sol.k_max,
        "approximation_ratio": mean_cut / sol.k_max.max(1) as f64,
        "overlap": e.overlap(&sol.optimal_indices()),
        "per_realization_cut": e.per_realization,
    });
    write_or_print(a.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let g = load_graph(&a.graph)?;
    let r = solve_instance(&g, cfg.p, &cfg.nm, &cfg.solve_options(), cfg.master_seed)?;
    let cost = instance_wall_time(&r, r.depth, &cfg.hardware);
    let out = serde_json::json!({ "result": r, "cost": cost });
    write_or_print(a.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let r = bench(&cfg)?;
    if let Some(path) = &a.instances_json {
        fs::write(path, serde_json::to_string_pretty(&r.instances)? + "\n")?;
    }
    write_or_print(a.out.as_deref(), &write_cost_csv(&r.rows)?)
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let timings = match &a.timings {
        Some(path) => group_by_label(&read_timing_csv(&read(path)?)?),
        None => Default::default(),
    };
    let quantum = match (&a.costs, &a.quantum) {
        (Some(path), _) => {
            let rows = read_cost_csv(&read(path)?)?;
            let pts = rows.iter().map(|r| (r.n as f64, r.mean_seconds)).collect();
            Series::fit("qaoa", pts)?
        }
        (None, Some(label)) => {
            let pts = timings.get(label).with_context(|| format!("no series {label:?}"))?;
            Series::fit(label, pts.clone())?
        }
        (None, None) => bail!("need --costs or --quantum"),
    };
    let classical = match (&a.classical, &a.brute_force_sizes) {
        (Some(label), _) => {
            let pts = timings.get(label).with_context(|| format!("no series {label:?}"))?;
            Some(Series::fit(label, pts.clone())?)
        }
        (None, Some(sizes)) => {
            let pts = brute_force_timings(sizes, 3, a.seed)
                .into_iter()
                .map(|t| (t.n, t.seconds))
                .collect();
            Some(Series::fit(BRUTE_FORCE_LABEL, pts)?)
        }
        (None, None) => None,
    };
    let report = emit_report(&quantum, classical.as_ref(), a.level, a.n_max)?;
    fs::write(a.out_prefix.with_extension("csv"), &report.csv)?;
    fs::write(a.out_prefix.with_extension("json"), report.json + "\n")?;
    Ok(())
}

fn cmd_convergence(a: &ConvergenceArgs) -> Result<()> {
    let g = match &a.graph {
        Some(path) => load_graph(path)?,
        None => reference_instance(),
    };
    let params = match &a.params {
        Some(x) => QaoaParams::from_flat(x)?,
        None => {
            let nm = NmConfig {
                n_restarts: 5,
                ..NmConfig::default()
            };
            let opts = SolveOptions {
                pipeline: Pipeline::Exact,
                noise: None,
                realizations: 1,
                grid: None,
            };
            solve_instance(&g, a.p, &nm, &opts, a.seed)?.best_params
        }
    };
    let report = convergence_study(&g, &params, &a.ratios, &a.seeds, a.realizations, a.gate_time)?;
    for pl in &report.plateaus {
        eprintln!("T2/T_G = {}: finals {:?}, spread {:.4}", pl.coherence_ratio, pl.finals, pl.spread);
    }
    fs::write(a.out_prefix.with_extension("csv"), report.to_csv())?;
    fs::write(a.out_prefix.with_extension("json"), report.to_json() + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Reduce(a) => cmd_reduce(a).map(|_| true),
        Command::Schedule(a) => cmd_schedule(a).map(|_| true),
        Command::Validate(a) => cmd_validate(a),
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Solve(a) => cmd_solve(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Fit(a) => cmd_fit(a).map(|_| true),
        Command::Convergence(a) => cmd_convergence(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
