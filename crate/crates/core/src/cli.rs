//! Command-line verbs: `run`, `verify`, `bound` and `replay`.
//!
//! Exit codes: 0 when everything passes, 1 when a run or certificate fails,
//! 2 for unusable input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analysis::{bound_value, BoundConstants, Theorem};
use crate::experiment::{self, ExperimentConfig, REPLAY_TOL};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "saddlepoint", version, about = "Certified first-order saddle-point solvers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every scenario in a config and write CSV, certificates and a summary.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property battery over the seeded benchmark problems.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_COUNT)]
        count: usize,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = verify::DEFAULT_ITERATIONS)]
        iterations: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Print the rate bound of a theorem (pp, ogda or eg).
    Bound {
        theorem: Theorem,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = f64::NAN)]
        l: f64,
        #[arg(long, default_value_t = f64::NAN)]
        eta: f64,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        n: usize,
    },
    /// Cross-check every scenario against the naive recurrence replay.
    Replay { config: PathBuf },
}

/// Parses `args` (program name first) and executes the verb, returning the exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: writing output: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    match command {
        Command::Run { config, out: dir } => match experiment::run_experiments(&config, dir.as_deref()) {
            Ok(report) => {
                write!(out, "{}", report.summary)?;
                for o in report.outcomes.iter().filter(|o| !o.passed()) {
                    writeln!(
                        err,
                        "scenario {}: {}",
                        o.id,
                        o.failure.as_deref().unwrap_or("certificate failed")
                    )?;
                }
                writeln!(out, "outputs written to {}", report.output_dir.display())?;
                Ok(report.exit_code())
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                Ok(e.exit_code())
            }
        },
        Command::Verify {
            count,
            seed,
            iterations,
            inject_fault,
        } => {
            let opts = VerifyOptions {
                count,
                base_seed: seed,
                iterations,
                inject_fault,
            };
            match verify::verify_suite(&opts) {
                Ok(report) => {
                    write!(out, "{}", report.matrix())?;
                    Ok(report.exit_code())
                }
                Err(e) => {
                    writeln!(err, "error: {e}")?;
                    Ok(2)
                }
            }
        }
        Command::Bound {
            theorem,
            d,
            l,
            eta,
            sigma,
            n,
        } => match bound_value(theorem, &BoundConstants { d, l, eta, sigma, n }) {
            Ok(v) => {
                writeln!(out, "{v:.16e}")?;
                Ok(0)
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                Ok(2)
            }
        },
        Command::Replay { config } => {
            let outcomes = ExperimentConfig::load(&config).and_then(|c| experiment::replay_all(&c));
            match outcomes {
                Ok(outcomes) => {
                    for o in &outcomes {
                        match (&o.error, o.max_deviation) {
                            (Some(e), _) => writeln!(out, "{:<28} FAIL  {e}", o.id)?,
                            (_, Some(dev)) => writeln!(
                                out,
                                "{:<28} {}  max deviation {dev:.3e} (tolerance {REPLAY_TOL:.0e})",
                                o.id,
                                if o.passed() { "pass" } else { "FAIL" }
                            )?,
                            (None, None) => writeln!(out, "{:<28} FAIL", o.id)?,
                        }
                    }
                    Ok(if outcomes.iter().all(|o| o.passed()) { 0 } else { 1 })
                }
                Err(e) => {
                    writeln!(err, "error: {e}")?;
                    Ok(e.exit_code())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::path::Path;

    struct Outcome {
        code: i32,
        out: String,
        err: String,
    }

    fn call(args: &[&str]) -> Outcome {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(std::iter::once("saddlepoint").chain(args.iter().copied()), &mut out, &mut err);
        Outcome {
            code,
            out: String::from_utf8(out).unwrap(),
            err: String::from_utf8(err).unwrap(),
        }
    }

    fn configs() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
    }

    const OGDA: &str = r#"schema_version = 1
[[scenario]]
id = "ogda"
solver = "ogda"
iterations = 64
problem = { file = "bilinear_1d.json" }
start = { x = [1.0], y = [1.0] }
"#;

    fn config(dir: &Path, body: &str) -> String {
        fs::copy(configs().join("problems/bilinear_1d.json"), dir.join("bilinear_1d.json")).unwrap();
        let path = dir.join("config.toml");
        fs::write(&path, body).unwrap();
        path.to_string_lossy().into_owned()
    }

    #[test]
    fn shipped_ogda_config_exits_0() {
        let out = tempfile::tempdir().unwrap();
        let cfg = configs().join("ogda_bilinear_1d.toml");
        let o = call(&["run", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
        assert_eq!(o.code, 0, "{}{}", o.out, o.err);
        let certs: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.path().join("certificates.json")).unwrap()).unwrap();
        let rows = certs.as_array().unwrap();
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().all(|r| r["pass"] == true && r["theorem"] == "ogda"));
        assert_eq!(
            fs::read_to_string(out.path().join("ogda_bilinear_1d.csv")).unwrap().lines().count(),
            10_001
        );
    }

    #[test]
    fn sigma_outside_unit_interval_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let body = OGDA
            .replace("\"ogda\"\n", "\"eg\"\n")
            .replace("iterations", "stepsize = { rule = \"eg_sigma\", sigma = 1.5 }\niterations");
        let o = call(&["run", &config(dir.path(), &body)]);
        assert_eq!(o.code, 2);
        assert!(o.err.contains("sigma must lie in (0,1)"), "{}", o.err);
    }

    #[test]
    fn certified_gda_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let body = OGDA
            .replace("solver = \"ogda\"", "solver = \"gda\"\ncertify = true")
            .replace("iterations", "stepsize = { rule = \"explicit\", eta = 0.5 }\niterations");
        let o = call(&["run", &config(dir.path(), &body)]);
        assert_eq!(o.code, 2);
        assert!(o.err.contains("no bound defined for solver"), "{}", o.err);
    }

    #[test]
    fn malformed_config_reports_line_and_field() {
        let dir = tempfile::tempdir().unwrap();
        let o = call(&["run", &config(dir.path(), &OGDA.replace("iterations = 64", "iterations = \"many\""))]);
        assert_eq!(o.code, 2);
        assert!(o.err.contains("line") && o.err.contains("iterations"), "{}", o.err);
    }

    #[test]
    fn diverging_run_exits_1_naming_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let body = OGDA
            .replace("id = \"ogda\"\nsolver = \"ogda\"", "id = \"blowup\"\nsolver = \"gda\"")
            .replace("iterations = 64", "iterations = 1000\nstepsize = { rule = \"explicit\", eta = 1000.0 }");
        let out = dir.path().join("out");
        let o = call(&["run", &config(dir.path(), &body), "--out", out.to_str().unwrap()]);
        assert_eq!(o.code, 1, "{}", o.err);
        assert!(o.err.contains("blowup"), "{}", o.err);
    }

    #[test]
    fn failed_certificate_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let body = OGDA.replace("iterations = 64", "iterations = 64\nstepsize = { rule = \"unchecked\", eta = 2.0 }");
        let out = dir.path().join("out");
        let o = call(&["run", &config(dir.path(), &body), "--out", out.to_str().unwrap()]);
        assert_eq!(o.code, 1, "{}", o.out);
        assert!(fs::read_to_string(out.join("certificates.json")).unwrap().contains("\"pass\": false"));
    }

    #[test]
    fn missing_config_exits_2() {
        assert_eq!(call(&["run", "/nonexistent/config.toml"]).code, 2);
        assert_eq!(call(&["frobnicate"]).code, 2);
    }

    #[test]
    fn verify_negative_controls() {
        let o = call(&["verify", "--count", "0"]);
        assert_eq!(o.code, 2);
        assert!(o.err.contains("nothing to verify"));

        let o = call(&["verify", "--count", "2", "--iterations", "200", "--inject-fault"]);
        assert_eq!(o.code, 1);
        let row = o.out.lines().find(|l| l.starts_with("ogda_bounded")).unwrap();
        assert!(row.ends_with("FAIL"), "{}", o.out);
    }

    #[test]
    fn inject_fault_is_hidden_from_help() {
        let o = call(&["verify", "--help"]);
        assert_eq!(o.code, 0);
        assert!(o.out.contains("--count") && !o.out.contains("inject"));
    }

    #[test]
    fn bound_prints_values() {
        for (args, expected) in [
            (vec!["ogda", "--d", "2", "--l", "1", "--eta", "0.5", "--n", "100"], 0.18),
            (vec!["eg", "--d", "2", "--l", "1", "--sigma", "0.5", "--n", "100"], 2.0 * (9.0 + 17.0 / 1.5) / 100.0),
            (vec!["pp", "--d", "2", "--eta", "1", "--n", "10"], 0.2),
        ] {
            let o = call(&[&["bound"], args.as_slice()].concat());
            assert_eq!(o.code, 0, "{}", o.err);
            let v: f64 = o.out.trim().parse().unwrap();
            assert!((v - expected).abs() <= 1e-12, "{args:?}: {v}");
        }
        assert_eq!(call(&["bound", "gda", "--d", "1", "--n", "1"]).code, 2);
        assert_eq!(call(&["bound", "eg", "--d", "1", "--l", "1", "--sigma", "1.5", "--n", "1"]).code, 2);
    }

    #[test]
    fn replay_passes_on_shipped_config() {
        let o = call(&["replay", configs().join("shipped.toml").to_str().unwrap()]);
        assert_eq!(o.code, 0, "{}", o.out);
        assert_eq!(o.out.lines().filter(|l| l.contains(" pass ")).count(), 8);
    }
}
