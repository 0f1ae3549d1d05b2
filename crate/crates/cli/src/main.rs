use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use nearfield_cli::{
    parse_experiment, replay, resolve_config, run_to_dir, workers_from_env, Config, Experiment, ExperimentError,
    WORKERS_ENV,
};

const EXPERIMENTS: [Experiment; 3] = [Experiment::Resolution, Experiment::OutageLine, Experiment::OutageCluster];

fn about(e: Experiment) -> &'static str {
    match e {
        Experiment::Resolution => "Beam resolution Delta between two users on one ray, swept over theta0 and N",
        Experiment::OutageLine => "NOMA outage with users on a Poisson line process: closed form and Monte Carlo",
        Experiment::OutageCluster => "NOMA outage and outage rate with a Poisson cluster of candidate users",
    }
}

fn help_for(key: &str) -> &'static str {
    match key {
        "seed" => "Base seed for Monte Carlo draws",
        "trials" => "Monte Carlo trials per grid point",
        "carrier_ghz" => "Carrier frequency [GHz]",
        "mode" => "`beta` (r_i = beta_i d_Ray) or `absolute` (r1 = r2 + gap)",
        "n_elements" => "Antenna counts, comma separated",
        "theta_deg" => "Beam directions [degrees], comma separated",
        "beta1" | "beta2" => "Distance as a fraction of the Rayleigh distance",
        "r2_m" => "Nearer-user distances [m] for absolute mode",
        "gap_m" => "r1 - r2 [m] for absolute mode",
        "noise_dbm" => "Noise power [dBm]",
        "target_rate" => "Target rate(s) [bit/s/Hz]",
        "alpha_noma" => "Power fraction of the NOMA user, in [0, 1]",
        "legacy_radius_m" => "Legacy user distance [m]",
        "cell_radius_m" => "Cell radius [m]",
        "ps_dbm" => "Transmit power per beam [dBm], comma separated",
        "lambda" => "User density [per m on the line, per m^2 in the cluster]",
        "k" => "Scheduled user is the k-th nearest to the legacy user",
        "legacy_count" => "Number of legacy users on the semicircle",
        "cluster_radius_m" => "Cluster radius [m]",
        "center" => "Cluster centre law: `shrunk` (disc of R_D - R_c) or `clip`",
        "selection" => "User selection: `effective` (beam-projected gain) or `raw`",
        _ => "",
    }
}

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

fn cli() -> Command {
    let mut cmd = Command::new("nearfield")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Near-field beam resolution and NOMA outage sweeps (CSV output)")
        .after_help(format!("Set {WORKERS_ENV} to override the worker thread count."))
        .subcommand_required(true);
    for e in EXPERIMENTS {
        let defaults = e.defaults();
        let mut sub = Command::new(e.name())
            .about(about(e))
            .arg(Arg::new("out").long("out").value_name("DIR").default_value(".").help("Output directory"))
            .arg(Arg::new("config").long("config").value_name("FILE").help("`key = value` config file"));
        for (key, default) in defaults.iter() {
            let id: &'static str = Box::leak(key.to_string().into_boxed_str());
            let long: &'static str = Box::leak(flag(key).into_boxed_str());
            sub = sub.arg(
                Arg::new(id)
                    .long(long)
                    .value_name("VALUE")
                    .allow_hyphen_values(true)
                    .action(ArgAction::Set)
                    .help(format!("{} [default: {default}]", help_for(key))),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd.subcommand(
        Command::new("replay")
            .about("Re-run a manifest.json and write the regenerated outputs")
            .arg(Arg::new("manifest").required(true).value_name("MANIFEST"))
            .arg(Arg::new("out").long("out").value_name("DIR").required(true).help("Output directory")),
    )
}

fn execute(m: &ArgMatches) -> Result<(), ExperimentError> {
    let workers = workers_from_env()?;
    let (name, sub) = m.subcommand().expect("subcommand is required");
    let out = PathBuf::from(sub.get_one::<String>("out").expect("has default or is required"));
    let manifest = if name == "replay" {
        replay(&PathBuf::from(sub.get_one::<String>("manifest").expect("required")), &out, workers)?
    } else {
        let e = parse_experiment(name)?;
        let file = match sub.get_one::<String>("config") {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ExperimentError::Io {
                    path: p.into(),
                    source,
                })?;
                Some(Config::parse(&text)?)
            }
            None => None,
        };
        let mut overrides = Config::new();
        for key in e.keys() {
            if let Some(v) = sub.get_one::<String>(&key) {
                overrides.set(key, v.clone());
            }
        }
        run_to_dir(e, &resolve_config(e, file.as_ref(), &overrides), &out, workers)?
    };
    for o in &manifest.outputs {
        println!("{}", out.join(o).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
