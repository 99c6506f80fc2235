use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use nctorus::config::ExperimentConfig;
use nctorus::dirac::{
    commutator_profile, matrix_element_sweep, resolvent_profile, write_matrix_elements_csv, write_resolvent_csv,
    DiracCoefficients, ShiftGenerator,
};
use nctorus::fourier::{hat_functional, paren_functional, riemann_lebesgue_profile, TransformKind};
use nctorus::gns::{basis_vector, build_u_kl, cyclic_vector, represent, GnsVector};
use nctorus::summation::{abel_convergence, fejer_convergence, kernel_l1_profile, SummationSource};
use nctorus::verify::run_verify;
use nctorus::weyl::{involution, star_product, trace, weyl_relation_check, WeylElement};
use nctorus::{Error, Result};

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Fourier analysis and modular Dirac operators on the noncommutative 2-torus")]
struct Cli {
    /// Experiment configuration (JSON); the benchmark setup when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; falls back to the config's `output`, then `nctorus-out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = one per core. Falls back to NCTORUS_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Multiplies every tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weyl relations, associativity and traciality of the star product.
    Star,
    /// Matrix of π(a) and the check u_kl ξ = e^{kl}.
    Represent,
    /// Hat and paren tables and the Riemann-Lebesgue profile.
    Fourier,
    /// Fejér convergence curve.
    Fejer {
        #[arg(long, value_enum, default_value_t = Kind::Hat)]
        kind: Kind,
    },
    /// Abel convergence curve.
    Abel {
        #[arg(long, value_enum, default_value_t = Kind::Hat)]
        kind: Kind,
    },
    /// Matrix-element sweeps, resolvent and commutator profiles.
    Dirac {
        /// Overrides `params.eta`; repeatable.
        #[arg(long)]
        eta: Vec<f64>,
    },
    /// Growth sequence and Dirac coefficients.
    Growth,
    /// Full invariant suite; exit code 2 when any suite fails.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hat,
    Paren,
}

impl Kind {
    fn transform(self) -> TransformKind {
        match self {
            Kind::Hat => TransformKind::Hat,
            Kind::Paren => TransformKind::Paren,
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    tol_scale: f64,
    config: &'a ExperimentConfig,
    files: Vec<String>,
}

struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    files: Vec<String>,
}

impl Run {
    fn create(&mut self, name: &str) -> Result<File> {
        self.files.push(name.to_string());
        Ok(File::create(self.out.join(name))?)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("NCTORUS_THREADS") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::Config(format!("NCTORUS_THREADS must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let threads = thread_count(cli.threads)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    if !(cli.tol_scale.is_finite() && cli.tol_scale > 0.0) {
        return Err(Error::Config(format!("--tol-scale must be positive, got {}", cli.tol_scale)));
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.tolerances = cfg.tolerances.scaled(cli.tol_scale);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("nctorus-out"));
    std::fs::create_dir_all(&out)?;
    let mut run = Run {
        cfg,
        out,
        files: Vec::new(),
    };
    let (name, code) = match &cli.command {
        Command::Star => ("star", star(&mut run)?),
        Command::Represent => ("represent", represent_cmd(&mut run)?),
        Command::Fourier => ("fourier", fourier(&mut run)?),
        Command::Fejer { kind } => ("fejer", fejer(&mut run, *kind)?),
        Command::Abel { kind } => ("abel", abel(&mut run, *kind)?),
        Command::Dirac { eta } => ("dirac", dirac(&mut run, eta)?),
        Command::Growth => ("growth", growth(&mut run)?),
        Command::Verify => ("verify", verify(&mut run)?),
    };
    write_metadata(&run, name, cli.tol_scale)?;
    Ok(code)
}

fn write_metadata(run: &Run, command: &str, tol_scale: f64) -> Result<()> {
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        tol_scale,
        config: &run.cfg,
        files: run.files.clone(),
    };
    let path = run.out.join(format!("{command}.meta.json"));
    std::fs::write(path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn csv_writer(run: &mut Run, name: &str) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_writer(run.create(name)?))
}

fn star(run: &mut Run) -> Result<ExitCode> {
    let alpha = run.cfg.diffeo.alpha();
    let mut rng = run.cfg.rng();
    let mut w = csv_writer(run, "star.csv")?;
    w.write_record(["check", "case", "deviation"])?;
    for a in -3..=3 {
        for b in -3..=3 {
            for c in -3..=3 {
                for d in -3..=3 {
                    let dev = weyl_relation_check((a, b), (c, d), alpha);
                    w.serialize(("weyl_relation", format!("({a} {b}) ({c} {d})"), dev))?;
                }
            }
        }
    }
    for i in 0..20 {
        let f = WeylElement::random(alpha, (1, 1), &mut rng);
        let g = WeylElement::random(alpha, (1, 1), &mut rng);
        let h = WeylElement::random(alpha, (1, 1), &mut rng);
        let assoc = star_product(&star_product(&f, &g)?, &h)?.max_deviation(&star_product(&f, &star_product(&g, &h)?)?);
        w.serialize(("associativity", i.to_string(), assoc))?;
        let tr = (trace(&star_product(&f, &g)?) - trace(&star_product(&g, &f)?)).norm();
        w.serialize(("traciality", i.to_string(), tr))?;
        let inv = involution(&star_product(&f, &g)?).max_deviation(&star_product(&involution(&g), &involution(&f))?);
        w.serialize(("involution", i.to_string(), inv))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn represent_cmd(run: &mut Run) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let tbox = space.tbox();
    let mut rng = run.cfg.rng();
    let a = run.cfg.element(&mut rng);
    let dense = represent(&a, &space)?.to_dense();
    let mut w = csv_writer(run, "represent.csv")?;
    w.write_record(["row_k", "row_l", "col_k", "col_l", "re", "im"])?;
    for i in 0..tbox.dim() {
        for j in 0..tbox.dim() {
            let c = dense[(i, j)];
            if c.norm() > 1e-15 {
                let (rk, rl) = tbox.site(i);
                let (ck, cl) = tbox.site(j);
                w.serialize((rk, rl, ck, cl, c.re, c.im))?;
            }
        }
    }
    w.flush()?;
    let r = 8.min(tbox.k_bound()).min(tbox.m_bound()) as i64;
    let xi = cyclic_vector(tbox);
    let mut w = csv_writer(run, "u_kl.csv")?;
    w.write_record(["k", "l", "deviation"])?;
    for k in -r..=r {
        for l in -r..=r {
            let v = build_u_kl(k, l, &space)?.apply(&xi);
            w.serialize((k, l, v.distance(&basis_vector(k, l, tbox)?)))?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn fourier(run: &mut Run) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let mut rng = run.cfg.rng();
    let a = run.cfg.element(&mut rng);
    hat_functional(&a, &space)?.write_csv(run.create("hat.csv")?)?;
    paren_functional(&a, &space)?.write_csv(run.create("paren.csv")?)?;
    let profile = riemann_lebesgue_profile(&a, &space)?;
    let mut w = csv_writer(run, "rl_profile.csv")?;
    w.write_record(["radius", "max_abs", "vector_norm"])?;
    for (r, v) in profile.radii.iter().enumerate() {
        w.serialize((r, v, profile.vector_norm))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Hat curves sum a random interior vector; paren curves sum `π(a)ξ_ω` for the configured element.
fn summation_source(run: &Run, kind: Kind) -> SummationSource {
    let mut rng = run.cfg.rng();
    match kind {
        Kind::Hat => {
            let (rk, rl) = run.cfg.params.support_radius;
            SummationSource::Vector(GnsVector::random(run.cfg.truncation, rk, rl, &mut rng))
        }
        Kind::Paren => SummationSource::Element(run.cfg.element(&mut rng)),
    }
}

fn fejer(run: &mut Run, kind: Kind) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let src = summation_source(run, kind);
    let rep = fejer_convergence(&src, &run.cfg.fejer_orders(), kind.transform(), &space)?;
    rep.write_csv(run.create("fejer.csv")?)?;
    let mut w = csv_writer(run, "dirichlet_l1.csv")?;
    w.write_record(["n", "l1_norm"])?;
    for (n, v) in kernel_l1_profile(&run.cfg.params.dirichlet_orders) {
        w.serialize((n, v))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn abel(run: &mut Run, kind: Kind) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let src = summation_source(run, kind);
    let radii = run.cfg.params.abel_radii.clone();
    abel_convergence(&src, &radii, kind.transform(), &space)?.write_csv(run.create("abel.csv")?)?;
    Ok(ExitCode::SUCCESS)
}

fn dirac(run: &mut Run, eta_flag: &[f64]) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let coeffs = DiracCoefficients::for_space(&space)?;
    let etas = if eta_flag.is_empty() {
        run.cfg.params.eta.clone()
    } else {
        eta_flag.to_vec()
    };
    let range = run.cfg.sweep_range();
    let b = run.cfg.dirac_blocks() as i64;
    let ns: Vec<i64> = (-b..=b).collect();
    let mut elements = Vec::new();
    let mut resolvent = Vec::new();
    let mut commutators = Vec::new();
    for &eta in &etas {
        if [0.0, 0.5, 1.0].contains(&eta) {
            elements.extend(matrix_element_sweep(eta, range, &coeffs, &space)?);
        } else {
            warn!("no closed form at eta = {eta}; skipping the matrix-element sweep");
        }
        resolvent.extend(resolvent_profile(eta, &ns, &coeffs, &space)?);
        for g in [ShiftGenerator::Lambda, ShiftGenerator::LambdaInverse] {
            for r in commutator_profile(eta, g, &ns, &coeffs, &space)? {
                commutators.push((eta, g, r));
            }
        }
    }
    info!("{} matrix elements, {} resolvent rows", elements.len(), resolvent.len());
    write_matrix_elements_csv(&elements, run.create("dirac_elements.csv")?)?;
    write_resolvent_csv(&resolvent, run.create("resolvent.csv")?)?;
    let mut w = csv_writer(run, "commutator.csv")?;
    w.write_record(["n", "eta", "generator", "norm", "bound", "margin"])?;
    for (eta, g, r) in commutators {
        let name = match g {
            ShiftGenerator::Lambda => "lambda",
            ShiftGenerator::LambdaInverse => "lambda_inverse",
        };
        w.serialize((r.n, eta, name, r.norm, r.bound, r.bound - r.norm))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn growth(run: &mut Run) -> Result<ExitCode> {
    let space = run.cfg.space()?;
    let coeffs = DiracCoefficients::for_space(&space)?;
    let mut w = csv_writer(run, "growth.csv")?;
    w.write_record(["n", "gamma", "a_n", "a_minus_n"])?;
    for n in 0..=coeffs.n_max() {
        let i = n as i64;
        w.serialize((n, coeffs.gamma(n)?, coeffs.a(i)?, coeffs.a(-i)?))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn verify(run: &mut Run) -> Result<ExitCode> {
    let report = run_verify(&run.cfg, None)?;
    report.write_files(&run.out)?;
    run.files
        .extend(["report.json", "report.csv", "failures.json"].map(String::from));
    for s in &report.suites {
        let status = if s.pass { "PASS" } else { "FAIL" };
        let observed = s.observed.map_or_else(|| "error".to_string(), |v| format!("{v:.3e}"));
        println!("{status} {:<32} observed {observed:>10} tol {:.1e}", s.suite, s.tolerance);
    }
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} suite(s) failed; see {}", report.failures().len(), display(&run.out.join("failures.json")));
        Ok(ExitCode::from(2))
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
