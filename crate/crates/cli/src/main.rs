use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qng_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with code 2 on usage errors by itself
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.payload) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                    // timestamped provenance lives beside the payload so the
                    // payload itself is byte-identical across reruns
                    let meta = format!(
                        "{{\"argv\":{:?},\"unix_time\":{}}}\n",
                        std::env::args().collect::<Vec<_>>(),
                        std::time::SystemTime::now()
                            .duration_since(std::time::UNIX_EPOCH)
                            .map(|d| d.as_secs())
                            .unwrap_or(0)
                    );
                    let _ = std::fs::write(path.with_extension("meta.json"), meta);
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    if stdout.write_all(out.payload.as_bytes()).is_err() {
                        return ExitCode::from(3);
                    }
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                qng_core::error::Error::ParseError(..) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
