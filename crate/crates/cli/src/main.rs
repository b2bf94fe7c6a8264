use clap::Parser;
use fracwave_cli::args::Cli;
use fracwave_cli::commands::dispatch;
use fracwave_cli::error::exit;

fn worker_count(cli: &Cli) -> Option<usize> {
    std::env::var("FRACWAVE_JOBS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .or(cli.jobs)
        .filter(|&n| n > 0)
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = worker_count(&cli) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if code != exit::OK {
        std::process::exit(code);
    }
}
