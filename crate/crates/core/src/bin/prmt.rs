//! `prmt`: command-line front end for patterned random matrices.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use patterned_rmt::ensembles::{EnsembleKind, EnsembleSpec, EntryDistribution};
use patterned_rmt::esd::{
    convergence_study, esd_complex, ks_summary, limit_law_of, replicate_spectra, Binning,
    Histogram1D,
};
use patterned_rmt::limits::{expand_word, word_limit, Integrator, LimitOptions};
use patterned_rmt::partitions::{limit_terms, Eps};
use patterned_rmt::rng::DEFAULT_SEED;
use patterned_rmt::spectra::{trace_moment_mc, McConfig, WordPath};
use patterned_rmt::verify::{self, VerifyLevel};
use patterned_rmt::word::Word;
use patterned_rmt::{Error, Result};

#[derive(Parser)]
#[command(name = "prmt", version, about = "Circulant-type, Toeplitz and Hankel random matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "PRMT_THREADS")]
    threads: Option<usize>,
    /// Output format of the primary result [default: json; the text report
    /// for verify].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the primary result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Root seed of every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Structured,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Qmc,
    Riemann,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    /// circulant, tilde-circulant, skew, left-skew, reverse-circulant,
    /// toeplitz, symmetric-toeplitz, hankel, diagonal-d, exchange-j
    #[arg(long, short)]
    ensemble: String,
    #[arg(long, short)]
    n: usize,
    /// Angle of tilde-circulant and diagonal-d.
    #[arg(long)]
    theta: Option<f64>,
    /// gaussian, rademacher or uniform.
    #[arg(long, default_value = "gaussian")]
    dist: EntryDistribution,
}

impl EnsembleArgs {
    fn spec(&self) -> Result<EnsembleSpec> {
        EnsembleSpec::new(EnsembleKind::parse(&self.ensemble, self.theta)?, self.n)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample one matrix.
    Gen {
        #[command(flatten)]
        ens: EnsembleArgs,
    },
    /// Normalized eigenvalues of independent replicates.
    Spectrum {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },
    /// Pooled empirical spectral distribution and its distance to the limit law.
    Esd {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Fixed bin count; Freedman-Diaconis by default.
        #[arg(long)]
        bins: Option<usize>,
        /// Also write bin centers and densities as two plain columns.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Monte Carlo estimate of n^{-1} E Tr of a normalized word.
    Moment {
        #[arg(long, short)]
        word: String,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        theta: f64,
        #[arg(long, default_value = "gaussian")]
        dist: EntryDistribution,
        #[arg(long, value_enum, default_value_t = PathArg::Structured)]
        path: PathArg,
    },
    /// Limiting value of a word from the pair-partition engine.
    Limit {
        #[arg(long, short)]
        word: String,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = IntegratorArg::Qmc)]
        integrator: IntegratorArg,
        /// Points per numerically integrated term.
        #[arg(long, default_value_t = 2_000_000)]
        budget: usize,
        /// Points per axis of the midpoint grid.
        #[arg(long, default_value_t = 40)]
        grid: usize,
        /// Include every expanded pattern and its pair-partition terms.
        #[arg(long)]
        dump_terms: bool,
    },
    /// Run the verification report; exits nonzero if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
    },
    /// Convergence of the spectral distribution over a grid of orders.
    Study {
        #[arg(long, short)]
        ensemble: String,
        /// Comma-separated ascending orders.
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 1024, 4096])]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value = "gaussian")]
        dist: EntryDistribution,
    },
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cplx(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn pattern_string(eps: &[Eps]) -> String {
    eps.iter()
        .map(|e| match e {
            Eps::Plain => '1',
            Eps::Star => '*',
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = cli.global;
    let mut out = sink(&g.output)?;
    let format = g.format.unwrap_or(Format::Json);
    match cli.command {
        Command::Gen { ens } => {
            let spec = ens.spec()?;
            let input = spec.sample(ens.dist, g.seed)?;
            let values = input.as_ref().map(|s| s.values.clone()).unwrap_or_default();
            let m = spec.build(&values)?;
            match format {
                Format::Json => {
                    let rows: Vec<Vec<[f64; 2]>> =
                        (0..spec.n).map(|i| m.row(i).iter().map(|&z| cplx(z)).collect()).collect();
                    write_json(
                        &mut out,
                        &json!({"ensemble": spec.kind, "n": spec.n, "seed": g.seed,
                                "distribution": ens.dist, "input": values, "matrix": rows}),
                    )?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(["i", "j", "re", "im"])?;
                    for i in 0..spec.n {
                        for (j, z) in m.row(i).iter().enumerate() {
                            w.write_record([i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()])?;
                        }
                    }
                    w.flush()?;
                }
            }
        }
        Command::Spectrum { ens, reps } => {
            let spec = ens.spec()?;
            let samples = replicate_spectra(&spec, ens.dist, reps, g.seed)?;
            match format {
                Format::Json => write_json(&mut out, &samples)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(["replicate", "index", "re", "im"])?;
                    for (r, s) in samples.iter().enumerate() {
                        for (k, z) in s.eigenvalues.iter().enumerate() {
                            w.write_record([r.to_string(), k.to_string(), z.re.to_string(), z.im.to_string()])?;
                        }
                    }
                    w.flush()?;
                }
            }
        }
        Command::Esd { ens, reps, bins, plot_data } => {
            let spec = ens.spec()?;
            let samples = replicate_spectra(&spec, ens.dist, reps, g.seed)?;
            let pooled: Vec<Complex64> = samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
            let ks = limit_law_of(&spec.kind).map(|law| ks_summary(&samples, law)).transpose()?;
            let binning = bins.map_or(Binning::FreedmanDiaconis, Binning::Fixed);
            if spec.kind.is_symmetric() {
                let vals: Vec<f64> = pooled.iter().map(|z| z.re).collect();
                let hist = Histogram1D::new(&vals, binning)?;
                if let Some(p) = &plot_data {
                    hist.write_plot_data(BufWriter::new(File::create(p)?))?;
                }
                match format {
                    Format::Csv => hist.write_csv(&mut out)?,
                    Format::Json => write_json(&mut out, &json!({"ensemble": spec.kind, "n": spec.n,
                        "replicates": reps, "histogram": hist, "ks": ks}))?,
                }
            } else {
                let e = esd_complex(&pooled)?;
                match format {
                    Format::Csv => e.write_csv(&mut out)?,
                    Format::Json => write_json(&mut out, &json!({"ensemble": spec.kind, "n": spec.n,
                        "replicates": reps, "mean": e.mean, "covariance": e.covariance,
                        "ks_re": e.ks_re, "ks_im": e.ks_im, "ks": ks}))?,
                }
            }
            if let Some(ks) = ks {
                eprintln!(
                    "pooled KS = {:.4e} (per-replicate mean {:.4e}, max {:.4e})",
                    ks.pooled, ks.per_replicate_mean, ks.per_replicate_max
                );
            }
        }
        Command::Moment { word, n, reps, theta, dist, path } => {
            let w = Word::parse(&word)?;
            let cfg = McConfig::new(n, reps, g.seed)
                .with_distribution(dist)
                .with_theta(theta)
                .with_path(match path {
                    PathArg::Structured => WordPath::Structured,
                    PathArg::Dense => WordPath::Dense,
                });
            let est = trace_moment_mc(&w, &cfg)?;
            let row = json!({"word": w.to_string(), "n": n, "replicates": reps, "theta": theta,
                "mean_re": est.mean.re, "mean_im": est.mean.im, "std_error": est.std_error});
            match format {
                Format::Json => write_json(&mut out, &row)?,
                Format::Csv => {
                    writeln!(out, "word,n,replicates,theta,mean_re,mean_im,std_error")?;
                    writeln!(out, "{w},{n},{reps},{theta},{},{},{}", est.mean.re, est.mean.im, est.std_error)?;
                }
            }
        }
        Command::Limit { word, theta, integrator, budget, grid, dump_terms } => {
            let w = Word::parse(&word)?;
            let opts = LimitOptions {
                integrator: match integrator {
                    IntegratorArg::Qmc => Integrator::Qmc,
                    IntegratorArg::Riemann => Integrator::Riemann,
                },
                budget,
                grid,
                ..LimitOptions::default().with_seed(g.seed)
            };
            let v = word_limit(&w, theta, &opts)?;
            let mut row = json!({"word": w.to_string(), "theta": theta, "value_re": v.value.re,
                "value_im": v.value.im, "mc_error": v.mc_error, "n_terms": v.n_terms,
                "n_crossing": v.n_crossing});
            if dump_terms {
                let (patterns, angle) = expand_word(&w, theta)?;
                let mut dump = Vec::new();
                for (p, weight) in &patterns {
                    let terms: Vec<_> = limit_terms(p)?
                        .iter()
                        .map(|t| json!({"partition": t.partition.to_string(), "crossing": t.crossing,
                            "free_indices": t.free_indices, "forms": t.forms}))
                        .collect();
                    dump.push(json!({"eps": pattern_string(&p.eps), "diag_powers": p.diag_powers,
                        "families": p.families, "weight": cplx(*weight), "theta": angle, "terms": terms}));
                }
                row["patterns"] = dump.into();
            }
            match format {
                Format::Json => write_json(&mut out, &row)?,
                Format::Csv => {
                    writeln!(out, "word,theta,value_re,value_im,mc_error,n_terms,n_crossing")?;
                    writeln!(out, "{w},{theta},{},{},{},{},{}", v.value.re, v.value.im, v.mc_error, v.n_terms, v.n_crossing)?;
                }
            }
        }
        Command::Verify { level } => {
            let level = match level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let report = verify::run(level, g.seed)?;
            match g.format {
                None => out.write_all(report.render().as_bytes())?,
                Some(Format::Json) => write_json(&mut out, &report)?,
                Some(Format::Csv) => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    for c in &report.checks {
                        w.serialize(c)?;
                    }
                    w.flush()?;
                }
            }
            out.flush()?;
            for c in report.failures() {
                eprintln!("FAIL {}: measured {}, expected {}", c.name, c.measured, c.expected);
            }
            return Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Study { ensemble, n_grid, reps, theta, dist } => {
            let kind = EnsembleKind::parse(&ensemble, theta)?;
            let study = convergence_study(kind, &n_grid, reps, g.seed, dist)?;
            match format {
                Format::Json => write_json(&mut out, &study)?,
                Format::Csv => study.write_csv(&mut out)?,
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Word { .. } | Error::InvalidArgument(_) => 2,
                _ => 1,
            })
        }
    }
}
