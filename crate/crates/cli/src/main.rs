use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynrm::suites::{list_suites, run_suite, suite_info, Backend, SuiteConfig, SuiteReport};
use dynrm::DynError;

/// Residual checks for dynamical R-matrices, fusion operators and trace functions.
///
/// Exit status: 0 when every check passes, 1 when any check fails, 2 on
/// configuration or resonance errors.
#[derive(Parser, Debug)]
#[command(name = "dynrm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Sampling seed.
    #[arg(long, global = true, default_value_t = dynrm::suites::DEFAULT_SEED)]
    seed: u64,

    /// Pass threshold for residual_max (suite default when omitted).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of samples (suite default when omitted).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Write the JSON report here; `-` prints it to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Scalar backend: float or exact.
    #[arg(long, global = true, value_parser = parse_backend)]
    backend: Option<Backend>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: DynError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum identities: qdybe, qdybe-spectral, hecke, unitarity.
    Verify(Family),
    /// Classical identities: cdybe, cdybe-spectral, coupling, residue.
    Classical(Family),
    /// Gauge transformations: gauge, closedness.
    Gauge(GaugeArgs),
    /// Rank-one fusion: abrr, cross-oracle, exchange, twist.
    Fusion(FusionArgs),
    /// Trace functions: eigen, commute, symmetry.
    Trace(TraceArgs),
    /// Classical limits of the quantum families.
    Limits(LimitArgs),
    /// Print the suite catalogue.
    List,
}

#[derive(Args, Debug)]
struct Common {
    /// Extra suite parameter, repeatable.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE", value_parser = parse_kv)]
    params: Vec<(String, String)>,

    /// Add this amount to one entry of the checked object (negative control).
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))
}

#[derive(Args, Debug)]
struct Family {
    #[arg(long)]
    check: String,
    /// Family name, e.g. rational, trig, elliptic, c-rational.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated ranks.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Imaginary part of the elliptic modulus.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Derivative scheme for cdybe: fd or analytic.
    #[arg(long)]
    deriv: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GaugeArgs {
    #[arg(long, default_value = "gauge")]
    check: String,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Gauge plan as JSON.
    #[arg(long)]
    plan: Option<String>,
    /// exact or non-closed.
    #[arg(long)]
    form: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FusionArgs {
    #[arg(long)]
    check: String,
    /// Highest weights, e.g. 1,2 or 1,1,2.
    #[arg(long)]
    modules: Option<String>,
    /// Rational q or `classical`.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Comma-separated rational λ values.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Twist negative control: none or static.
    #[arg(long)]
    control: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    check: String,
    /// Highest weight 2k of V.
    #[arg(long = "V")]
    v: Option<String>,
    /// Highest weight(s) of W.
    #[arg(long = "W")]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Rational sample point s = q^{l_μ}.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Truncation order N.
    #[arg(long)]
    order: Option<String>,
    /// Eigen negative control: none, drop-weyl or drop-q.
    #[arg(long)]
    control: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long, default_value = "limits")]
    check: String,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Comma-separated step sizes.
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    #[arg(long = "min-order")]
    min_order: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn collect(cfg: &mut SuiteConfig, pairs: &[(&str, &Option<String>)], common: &Common) {
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.params.insert(k.to_string(), v.clone());
        }
    }
    if let Some(p) = &common.perturb {
        cfg.params.insert("perturb".into(), p.clone());
    }
    for (k, v) in &common.params {
        cfg.params.insert(k.clone(), v.clone());
    }
}

fn build(cli: &Cli) -> Result<(&'static str, SuiteConfig), DynError> {
    let (command, mut cfg) = match &cli.command {
        Command::Verify(a) | Command::Classical(a) => {
            let cmd = if matches!(cli.command, Command::Verify(_)) {
                "verify"
            } else {
                "classical"
            };
            let mut cfg = SuiteConfig::new(&a.check);
            collect(
                &mut cfg,
                &[
                    ("family", &a.family),
                    ("n", &a.n),
                    ("q", &a.q),
                    ("tau", &a.tau),
                    ("gamma", &a.gamma),
                    ("deriv", &a.deriv),
                ],
                &a.common,
            );
            (cmd, cfg)
        }
        Command::Gauge(a) => {
            let mut cfg = SuiteConfig::new(&a.check);
            collect(
                &mut cfg,
                &[
                    ("family", &a.family),
                    ("n", &a.n),
                    ("q", &a.q),
                    ("gamma", &a.gamma),
                    ("plan", &a.plan),
                    ("form", &a.form),
                ],
                &a.common,
            );
            ("gauge", cfg)
        }
        Command::Fusion(a) => {
            let mut cfg = SuiteConfig::new(&a.check);
            collect(
                &mut cfg,
                &[
                    ("modules", &a.modules),
                    ("q", &a.q),
                    ("lambda", &a.lambda),
                    ("control", &a.control),
                ],
                &a.common,
            );
            ("fusion", cfg)
        }
        Command::Trace(a) => {
            let mut cfg = SuiteConfig::new(&a.check);
            collect(
                &mut cfg,
                &[
                    ("V", &a.v),
                    ("W", &a.w),
                    ("q", &a.q),
                    ("s", &a.s),
                    ("order", &a.order),
                    ("control", &a.control),
                ],
                &a.common,
            );
            ("trace", cfg)
        }
        Command::Limits(a) => {
            let mut cfg = SuiteConfig::new(&a.check);
            collect(
                &mut cfg,
                &[
                    ("family", &a.family),
                    ("n", &a.n),
                    ("tau", &a.tau),
                    ("hbar", &a.hbar),
                    ("min-order", &a.min_order),
                ],
                &a.common,
            );
            ("limits", cfg)
        }
        Command::List => unreachable!("handled before build"),
    };
    let info = suite_info(&cfg.suite)?;
    if info.command != command {
        return Err(DynError::Config(format!(
            "suite {} belongs to the {} subcommand, not {command}",
            info.name, info.command
        )));
    }
    cfg.seed = Some(cli.seed);
    cfg.tol = cli.tol;
    cfg.samples = cli.samples;
    cfg.backend = cli.backend;
    Ok((command, cfg))
}

fn print_list() {
    println!("{:<15} {:<10} {:<12} identity", "suite", "command", "backend");
    for s in list_suites() {
        let backends: Vec<String> = s.backends.iter().map(|b| b.to_string()).collect();
        println!(
            "{:<15} {:<10} {:<12} {}",
            s.name,
            s.command,
            backends.join(","),
            s.identity
        );
    }
}

fn print_summary(rep: &SuiteReport) {
    for r in &rep.reports {
        let extra: Vec<String> = r
            .params
            .iter()
            .filter(|(k, _)| k.as_str() != "samples_margin")
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!(
            "{} {:<24} max={:.3e} tol={:.1e} samples={} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.identity,
            r.residual_max,
            r.tol,
            r.samples,
            extra.join(" ")
        );
    }
    println!(
        "{}: {} (residual_max {:.3e}, tol {:.1e}, backend {})",
        rep.suite,
        if rep.pass { "pass" } else { "FAIL" },
        rep.residual_max,
        rep.tol,
        rep.backend
    );
}

fn write_json(path: &PathBuf, rep: &SuiteReport) -> Result<(), String> {
    let text = rep.to_json() + "\n";
    if path.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.command, Command::List) {
        print_list();
        return ExitCode::SUCCESS;
    }
    let (_, cfg) = match build(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rep = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let to_stdout = cli.json.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if !to_stdout {
        print_summary(&rep);
    }
    if let Some(path) = &cli.json {
        if let Err(e) = write_json(path, &rep) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(rep.exit_code() as u8)
}
