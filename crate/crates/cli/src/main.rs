use std::process::ExitCode;

use clap::Parser;

use netmimo_cli::args::Cli;
use netmimo_cli::{run_experiment, run_with_workers, write_outputs, ExperimentOutput, RunRequest};

/// Exit codes: 0 success, 1 invalid input or failed validation, 2 some points failed.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.request().and_then(|req| {
        let out = run_with_workers(cli.workers, || run_experiment(&req))??;
        write_outputs(&out, &req, &cli.out_dir)?;
        Ok((req, out))
    });
    match result {
        Ok((req, out)) => report(&req, &out, &cli),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn report(req: &RunRequest, out: &ExperimentOutput, cli: &Cli) -> ExitCode {
    println!(
        "{}: {} curves written to {}",
        req.experiment.as_str(),
        out.curves.len(),
        cli.out_dir.display()
    );
    for (key, value) in &out.summary {
        println!("  {key} = {value}");
    }
    for point in out.curves.iter().flat_map(|c| &c.points).filter(|_| out.passed.is_some()) {
        println!("  criterion {}: {}", point.axis, point.status);
    }
    let errors = out.error_count();
    if errors > 0 {
        eprintln!("{errors} point(s) failed; see the status column");
    }
    match out.passed {
        Some(false) => ExitCode::from(1),
        _ if errors > 0 => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}
