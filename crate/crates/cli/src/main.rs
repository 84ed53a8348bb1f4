use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvbft_core::experiments::{
    dissemination_curves, run_latency_mc, slots_to_ms, ChurnMeans, Scenario, SlotProfile,
};
use cvbft_core::quorum::{dispersion_diagnostic, sample_required_nodes, samples_to_csv};
use cvbft_core::spatial::{sample_snapshot, Region};
use cvbft_core::stats::{fit_latency_samples, make_histogram, fit_report_csv};

mod config;
mod svg;
mod validate;

use config::ConfigFile;

/// Environment variable that prefixes relative output paths.
const OUT_DIR_ENV: &str = "CVBFT_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "cvbft",
    version,
    about = "BFT consensus feasibility and latency under vehicular churn"
)]
struct Cli {
    /// Flat key=value config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a node drop and emit a scatter SVG plus `x,y,role` CSV
    Drop {
        /// Expected node count for the whole region (lambda_N)
        #[arg(long)]
        intensity: Option<f64>,
        /// Per-node failure probability (p_f)
        #[arg(long)]
        fault_prob: Option<f64>,
        /// Region side in meters
        #[arg(long)]
        side: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output SVG path; the CSV lands next to it
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean-field dissemination curves per N, SVG plus `t,r,r_bar` CSVs
    Curves {
        /// Comma-separated node counts, e.g. 5,45,85,125
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        fault_prob: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Latency Monte Carlo: histogram + beta-fit SVG, trial log, fit report
    Latency {
        #[arg(long)]
        base_intensity: Option<f64>,
        #[arg(long)]
        faulty: Option<u64>,
        /// Legit-population churn as arrival_mean,departure_mean
        #[arg(long)]
        legit_churn: Option<String>,
        /// Faulty-population churn as arrival_mean,departure_mean
        #[arg(long)]
        faulty_churn: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Deterministic-N override (skips the Poisson draw)
        #[arg(long)]
        fixed_n: Option<u64>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the mobility-adjusted quorum law and its dispersion
    Quorum {
        #[arg(long)]
        faulty_mean: Option<f64>,
        #[arg(long)]
        legit_churn: Option<String>,
        #[arg(long)]
        faulty_churn: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV `trial,f,delta_N,delta_f,n_min`
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a slot count to milliseconds under inter-message profiles
    Convert {
        #[arg(long)]
        slots: u32,
        /// Comma-separated profiles among cv2x50,cv2x100,cv2x200,dsrc100
        #[arg(long)]
        profiles: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample per-trial churn deltas for both populations
    Churn {
        #[arg(long)]
        legit_churn: Option<String>,
        #[arg(long)]
        faulty_churn: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV `trial,population,arrivals,departures,net`
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant self-check suite; exits nonzero on any failure
    Validate,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Drop {
            intensity,
            fault_prob,
            side,
            seed,
            out,
        } => cmd_drop(&cfg, intensity, fault_prob, side, seed, &out),
        Command::Curves {
            n,
            fault_prob,
            epsilon,
            out,
        } => cmd_curves(&cfg, n, fault_prob, epsilon, &out),
        Command::Latency {
            base_intensity,
            faulty,
            legit_churn,
            faulty_churn,
            trials,
            seed,
            epsilon,
            fixed_n,
            bins,
            out,
        } => cmd_latency(
            &cfg,
            base_intensity,
            faulty,
            legit_churn,
            faulty_churn,
            trials,
            seed,
            epsilon,
            fixed_n,
            bins,
            &out,
        ),
        Command::Quorum {
            faulty_mean,
            legit_churn,
            faulty_churn,
            trials,
            seed,
            out,
        } => cmd_quorum(&cfg, faulty_mean, legit_churn, faulty_churn, trials, seed, &out),
        Command::Convert {
            slots,
            profiles,
            out,
        } => cmd_convert(&cfg, slots, profiles, out.as_deref()),
        Command::Churn {
            legit_churn,
            faulty_churn,
            trials,
            seed,
            out,
        } => cmd_churn(&cfg, legit_churn, faulty_churn, trials, seed, &out),
        Command::Validate => {
            if validate::run() {
                println!("all invariants hold");
                Ok(())
            } else {
                bail!("one or more invariants failed")
            }
        }
    }
}

fn out_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    let path = out_path(path);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create output directory {}", parent.display()))?;
        }
    }
    std::fs::write(&path, content)
        .with_context(|| format!("cannot write output file {} (--out)", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn parse_pair(text: &str, flag: &str) -> Result<ChurnMeans> {
    let (a, d) = text
        .split_once(',')
        .with_context(|| format!("--{flag} expects arrival_mean,departure_mean, got '{text}'"))?;
    Ok(ChurnMeans::new(
        a.trim()
            .parse()
            .with_context(|| format!("--{flag}: bad arrival mean '{a}'"))?,
        d.trim()
            .parse()
            .with_context(|| format!("--{flag}: bad departure mean '{d}'"))?,
    ))
}

fn churn_means(
    cfg: &ConfigFile,
    flag_value: Option<String>,
    key: &str,
) -> Result<ChurnMeans> {
    match cfg.resolve_opt(flag_value, key)? {
        Some(text) => parse_pair(&text, key),
        None => Ok(ChurnMeans::default()),
    }
}

fn cmd_drop(
    cfg: &ConfigFile,
    intensity: Option<f64>,
    fault_prob: Option<f64>,
    side: Option<f64>,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let intensity = cfg.resolve(intensity, "intensity", 100.0)?;
    let fault_prob = cfg.resolve(fault_prob, "fault-prob", 0.25)?;
    let side = cfg.resolve(side, "side", 1.0)?;
    let seed = cfg.resolve(seed, "seed", 0)?;
    let region = Region::new(side).context("--side")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snapshot = sample_snapshot(intensity, fault_prob, region, &mut rng)
        .context("--intensity/--fault-prob")?;
    let title = format!(
        "Node drop: lambda_N = {intensity}, p_f = {fault_prob} ({} nodes)",
        snapshot.nodes.len()
    );
    write_file(out, &svg::scatter_svg(&snapshot, &title))?;
    write_file(&out.with_extension("csv"), &snapshot.to_csv())
}

fn cmd_curves(
    cfg: &ConfigFile,
    n: Option<String>,
    fault_prob: Option<f64>,
    epsilon: Option<f64>,
    out: &Path,
) -> Result<()> {
    let n_text = cfg.resolve(n, "n", "5,45,85,125".to_string())?;
    let fault_prob = cfg.resolve(fault_prob, "fault-prob", 0.5)?;
    let epsilon = cfg.resolve(epsilon, "epsilon", cvbft_core::gossip::DEFAULT_EPSILON)?;
    let n_values: Vec<u64> = n_text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().with_context(|| format!("--n: bad count '{s}'")))
        .collect::<Result<_>>()?;
    let traces =
        dissemination_curves(&n_values, fault_prob, epsilon).context("--fault-prob/--epsilon")?;
    let labeled: Vec<(String, &cvbft_core::GossipTrace)> = n_values
        .iter()
        .zip(&traces)
        .map(|(n, t)| (format!("N = {n}"), t))
        .collect();
    let title = format!("Block dissemination rate, p_f = {fault_prob}");
    write_file(out, &svg::curves_svg(&labeled, &title))?;
    for (n, trace) in n_values.iter().zip(&traces) {
        write_file(&sibling(out, &format!("_n{n}"), "csv"), &trace.to_csv())?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_latency(
    cfg: &ConfigFile,
    base_intensity: Option<f64>,
    faulty: Option<u64>,
    legit_churn: Option<String>,
    faulty_churn: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    fixed_n: Option<u64>,
    bins: Option<usize>,
    out: &Path,
) -> Result<()> {
    let scenario = Scenario {
        base_intensity: cfg.resolve(base_intensity, "base-intensity", 100.0)?,
        base_faulty: cfg.resolve(faulty, "faulty", 6)?,
        legit_churn: churn_means(cfg, legit_churn, "legit-churn")?,
        faulty_churn: churn_means(cfg, faulty_churn, "faulty-churn")?,
        epsilon: cfg.resolve(epsilon, "epsilon", cvbft_core::gossip::DEFAULT_EPSILON)?,
        trials: cfg.resolve(trials, "trials", 10_000)?,
        seed: cfg.resolve(seed, "seed", 0)?,
        fixed_n: cfg.resolve_opt(fixed_n, "fixed-n")?,
    };
    let bins = cfg.resolve(bins, "bins", 30)?;
    let outcome = run_latency_mc(&scenario).context("latency scenario")?;
    let name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());

    write_file(&sibling(out, "_trials", "csv"), &outcome.trial_log_csv())?;
    write_file(&sibling(out, "_summary", "csv"), &outcome.summary_csv(&name))?;

    let samples: Vec<f64> = outcome.latencies.iter().map(|&t| t as f64).collect();
    if samples.is_empty() {
        bail!("no trial converged; nothing to plot");
    }
    let hist = make_histogram(&samples, bins).context("--bins")?;
    let fit = match fit_latency_samples(&samples) {
        Ok(fit) => {
            write_file(
                &sibling(out, "_fit", "csv"),
                &fit_report_csv(&[(name.as_str(), fit, samples.len())]),
            )?;
            Some(fit)
        }
        Err(e) => {
            eprintln!("beta fit skipped: {e}");
            write_file(
                &sibling(out, "_fit", "csv"),
                "scenario,alpha,beta,lower,upper,ks_stat,n_samples\n",
            )?;
            None
        }
    };
    let title = format!(
        "Latency distribution: f = {}, trials = {}",
        scenario.base_faulty, scenario.trials
    );
    write_file(out, &svg::latency_hist_svg(&hist, fit.as_ref(), &title))?;
    println!(
        "converged {} / infeasible {} / nonconvergent {} (median {} slots)",
        outcome.converged_trials(),
        outcome.infeasible_trials,
        outcome.nonconvergent_trials,
        outcome.median_latency()
    );
    Ok(())
}

fn cmd_quorum(
    cfg: &ConfigFile,
    faulty_mean: Option<f64>,
    legit_churn: Option<String>,
    faulty_churn: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let faulty_mean = cfg.resolve(faulty_mean, "faulty-mean", 25.0)?;
    let legit = churn_means(cfg, legit_churn, "legit-churn")?;
    let faulty = churn_means(cfg, faulty_churn, "faulty-churn")?;
    let trials = cfg.resolve(trials, "trials", 100_000)?;
    let seed = cfg.resolve(seed, "seed", 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = sample_required_nodes(
        faulty_mean,
        (legit.arrival, legit.departure),
        (faulty.arrival, faulty.departure),
        trials,
        &mut rng,
    )
    .context("--faulty-mean/--trials")?;
    write_file(out, &samples_to_csv(&samples))?;
    let vals: Vec<f64> = samples.iter().map(|s| s.n_min as f64).collect();
    let d = dispersion_diagnostic(&vals).context("--trials")?;
    println!(
        "n_min over {trials} trials: mean {:.4}, variance {:.4}, dispersion index {:.4}",
        d.mean, d.variance, d.index
    );
    write_file(
        &sibling(out, "_dispersion", "csv"),
        &format!("mean,variance,index\n{},{},{}\n", d.mean, d.variance, d.index),
    )
}

fn cmd_convert(
    cfg: &ConfigFile,
    slots: u32,
    profiles: Option<String>,
    out: Option<&Path>,
) -> Result<()> {
    let profiles: Vec<SlotProfile> = match cfg.resolve_opt(profiles, "profiles")? {
        None => SlotProfile::ALL.to_vec(),
        Some(text) => text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().context("--profiles"))
            .collect::<Result<_>>()?,
    };
    let mut csv = String::from("profile,slots,ms\n");
    for p in &profiles {
        let ms = slots_to_ms(slots, *p);
        println!("{}: {slots} slots = {ms} ms", p.name());
        csv.push_str(&format!("{},{slots},{ms}\n", p.name()));
    }
    if let Some(out) = out {
        write_file(out, &csv)?;
    }
    Ok(())
}

fn cmd_churn(
    cfg: &ConfigFile,
    legit_churn: Option<String>,
    faulty_churn: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let legit = churn_means(cfg, legit_churn, "legit-churn")?;
    let faulty = churn_means(cfg, faulty_churn, "faulty-churn")?;
    let trials = cfg.resolve(trials, "trials", 10_000)?;
    let seed = cfg.resolve(seed, "seed", 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * trials as usize);
    for trial in 0..trials {
        let l = cvbft_core::churn::sample_churn_delta(legit.arrival, legit.departure, &mut rng)
            .context("--legit-churn")?;
        let f = cvbft_core::churn::sample_churn_delta(faulty.arrival, faulty.departure, &mut rng)
            .context("--faulty-churn")?;
        rows.push((trial, "legit", l));
        rows.push((trial, "faulty", f));
    }
    write_file(out, &cvbft_core::churn::deltas_to_csv(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_paths() {
        let p = Path::new("figs/fig5c.svg");
        assert_eq!(sibling(p, "_trials", "csv"), Path::new("figs/fig5c_trials.csv"));
    }

    #[test]
    fn pair_parsing() {
        let m = parse_pair("5, 1", "legit-churn").unwrap();
        assert_eq!((m.arrival, m.departure), (5.0, 1.0));
        assert!(parse_pair("5", "legit-churn").is_err());
    }
}
