use std::io::Write;

use clap::Parser;
use frozen_sl::cli::{main_with, Args};

fn main() {
    if let Some(n) = std::env::var("FROZEN_SL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let args = Args::parse();
    let (out, code) = main_with(&args);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
