//! Writes every figure bundle to a directory (first argument, default `figs`).

use std::path::PathBuf;

use selector_lab::error::Result;
use selector_lab::figures::{check_fixture, emit_figure_data};
use selector_lab::fixtures::FixtureName;

pub fn run_example(dir: PathBuf) -> Result<usize> {
    let mut files = 0;
    for name in FixtureName::ALL {
        let written = emit_figure_data(name)?.write(&dir)?;
        files += written.len();
        for c in check_fixture(name)? {
            println!("{name:12} {:<52} {}", c.assertion, if c.passed { "ok" } else { "FAILS" });
        }
    }
    println!("{files} files in {}", dir.display());
    Ok(files)
}

fn main() -> Result<()> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("figs"), PathBuf::from);
    run_example(dir).map(|_| ())
}
