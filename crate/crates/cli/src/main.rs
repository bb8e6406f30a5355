mod config;
mod validate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use warpzeta::heatkernel::heat_coefficients;
use warpzeta::ode::BoundaryKind;
use warpzeta::oracle::shoot_eigenvalues;
use warpzeta::wkb::{compute_f, compute_omega, format_f_table, format_omega_table};
use warpzeta::zeta::{zeta_at_0, zeta_prime_at_0, TermValue};
use warpzeta::{Error, Result};

use config::{Config, Preset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "warpzeta", version, about = "Spectral zeta functions and heat coefficients on warped products")]
struct Cli {
    /// JSON configuration file; the flat cylinder is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Boundary condition, overriding the configuration.
    #[arg(long, global = true, value_parser = parse_bc)]
    bc: Option<BoundaryKind>,
    /// Largest base eigenvalue `nu` summed exactly.
    #[arg(long, global = true)]
    nu_cutoff: Option<f64>,
    /// Quadrature tolerance and ODE relative tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads (0 or absent: all cores).
    #[arg(long, global = true, env = "WARPZETA_THREADS")]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the symbolic WKB coefficient tables up to order I.
    DumpTables {
        #[arg(long, default_value_t = 3)]
        imax: usize,
    },
    /// Heat-kernel coefficients A_{n/2} for n = 0..=N.
    HeatCoeffs {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// zeta'(0) and the log-determinant with its breakdown.
    Logdet,
    /// zeta(0) split into nonzero-mode and zero-mode parts.
    Zeta0,
    /// Compare analytic results with the eigenvalue oracle on a preset geometry.
    Validate {
        #[arg(long, value_enum)]
        preset: Preset,
    },
    /// The first K eigenvalues of the tower with base eigenvalue nu^2.
    Eigenvalues {
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn parse_bc(s: &str) -> std::result::Result<BoundaryKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

/// Output of one subcommand and whether it represents success.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::InvalidData(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn terms_csv(terms: &[TermValue]) -> String {
    let mut s = String::from("term,value\n");
    for t in terms {
        s.push_str(&format!("{},{:e}\n", t.term, t.value));
    }
    s
}

impl Cli {
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Preset::Cylinder.config(),
        };
        if let Some(bc) = self.bc {
            cfg.bc = bc;
        }
        if let Some(nu) = self.nu_cutoff {
            cfg.nu_cutoff = nu;
        }
        if let Some(tol) = self.tol {
            cfg.tolerances.quadrature = tol;
            cfg.tolerances.ode_rtol = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn run(&self) -> Result<Outcome> {
        match &self.command {
            Command::DumpTables { imax } => {
                if *imax == 0 || *imax > 6 {
                    return Err(Error::InvalidConfig(format!("--imax must lie in 1..=6, got {imax}")));
                }
                let f = compute_f(*imax);
                let om = compute_omega(*imax);
                let text = format!("{}\n{}", format_f_table(&f), format_omega_table(&om));
                Ok(Outcome::ok(match self.format {
                    Format::Json => to_json(&serde_json::json!({
                        "imax": imax,
                        "F": format_f_table(&f).lines().collect::<Vec<_>>(),
                        "Omega": format_omega_table(&om).lines().collect::<Vec<_>>(),
                    }))?,
                    Format::Csv => text,
                }))
            }
            Command::HeatCoeffs { n_max } => {
                let cfg = self.config()?;
                let h = heat_coefficients(&cfg.geometry()?, cfg.bc, n_max.unwrap_or(cfg.n_max))?;
                Ok(Outcome::ok(match self.format {
                    Format::Json => to_json(&h)?,
                    Format::Csv => h.to_csv(),
                }))
            }
            Command::Logdet => {
                let cfg = self.config()?;
                cfg.require_massless("logdet")?;
                let r = zeta_prime_at_0(&cfg.geometry()?, cfg.bc, &cfg.zeta_options())?;
                Ok(Outcome::ok(match self.format {
                    Format::Json => to_json(&r)?,
                    Format::Csv => {
                        let mut rows = r.breakdown.clone();
                        rows.push(TermValue {
                            term: "zeta0_prime".into(),
                            value: r.zeta0_prime,
                        });
                        rows.push(TermValue {
                            term: "logdet".into(),
                            value: r.logdet,
                        });
                        terms_csv(&rows)
                    }
                }))
            }
            Command::Zeta0 => {
                let cfg = self.config()?;
                cfg.require_massless("zeta0")?;
                let z = zeta_at_0(&cfg.geometry()?, cfg.bc, &cfg.zeta_options())?;
                Ok(Outcome::ok(match self.format {
                    Format::Json => to_json(&z)?,
                    Format::Csv => {
                        let mut rows = z.terms.clone();
                        rows.push(TermValue {
                            term: "zero_mode".into(),
                            value: z.zero_mode_part,
                        });
                        rows.push(TermValue {
                            term: "zeta0".into(),
                            value: z.value,
                        });
                        terms_csv(&rows)
                    }
                }))
            }
            Command::Validate { preset } => {
                let mut cfg = preset.config();
                if let Some(bc) = self.bc {
                    cfg.bc = bc;
                }
                if let Some(nu) = self.nu_cutoff {
                    cfg.nu_cutoff = nu;
                }
                cfg.validate()?;
                let report = validate::run(*preset, &cfg)?;
                let text = match self.format {
                    Format::Json => to_json(&report)?,
                    Format::Csv => report.to_csv(),
                };
                Ok(Outcome {
                    text,
                    ok: report.passed,
                })
            }
            Command::Eigenvalues { nu, count } => {
                let cfg = self.config()?;
                let l = shoot_eigenvalues(&cfg.geometry()?, *nu, cfg.bc, *count)?;
                Ok(Outcome::ok(match self.format {
                    Format::Json => to_json(&l)?,
                    Format::Csv => l.to_csv(),
                }))
            }
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io(e.to_string())),
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    let report = ErrorReport {
        error: ErrorBody {
            kind: e.kind(),
            message: e.to_string(),
        },
    };
    eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| "{}".into()));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Error::InvalidConfig(e.to_string().trim_end().to_string())),
    };
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Error::InvalidConfig(format!("cannot start {n} threads: {e}")));
        }
    }
    let outcome = match cli.run() {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = cli.emit(&outcome.text) {
        return fail(&e);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        fail(&Error::InvalidData("one or more validation checks failed".into()))
    }
}
