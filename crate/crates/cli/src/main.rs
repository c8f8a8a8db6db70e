// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use exitq::sde::write_samples;
use exitq::Preset;
use exitq_cli::args::{Cli, Command, RunArgs};
use exitq_cli::{render, run, CliError};

fn execute(args: &RunArgs) -> Result<(), CliError> {
    let config = args.to_config()?;
    if let Some(path) = &args.dump_config {
        std::fs::write(path, config.to_json() + "\n")?;
    }
    let output = run(&config)?;
    for report in output.undersampled() {
        eprintln!(
            "warning: p = {} at start {:?} has fewer than 10 expected tail paths",
            report.p, report.start
        );
    }
    if let Some(path) = &args.dump_samples {
        let mut out = BufWriter::new(File::create(path)?);
        for sample in &output.samples {
            write_samples(&mut out, sample)?;
        }
        out.flush()?;
    }
    print!("{}", render(&output, config.output));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for preset in Preset::ALL {
                println!("{preset}\tlambda1 = {}", preset.reference_lambda1());
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(err.exit_code() as u8)
            }
        },
    }
}
