//! `reqexec bench`: wall time of parse, resolve and compile per model.
//! Reading the files happens before the clock starts.

use std::fmt::Write;
use std::time::Instant;

use reqexec_core::fixtures::{fixture, CASE_STUDIES};
use reqexec_core::{load_model, LoadOptions, SourceFile};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Timing {
    pub name: String,
    /// Mean over the runs.
    pub millis: f64,
}

pub struct BenchReport {
    pub timings: Vec<Timing>,
    pub runs: usize,
}

impl BenchReport {
    pub fn total(&self) -> f64 {
        self.timings.iter().map(|t| t.millis).sum()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for t in &self.timings {
            let _ = writeln!(s, "{:<28}{:>10.2} ms", t.name, t.millis);
        }
        let _ = writeln!(s, "{:<28}{:>10.2} ms", "total", self.total());
        let _ = writeln!(s, "{:<28}{:>10.2} ms", "average", self.total() / self.timings.len().max(1) as f64);
        let _ = writeln!(s, "(mean of {} run(s) each)", self.runs);
        s
    }
}

/// The four bundled case studies.
pub fn bundled() -> Vec<(String, SourceFile)> {
    CASE_STUDIES
        .iter()
        .map(|n| {
            let f = fixture(n).expect("bundled fixture");
            (f.file.to_string(), SourceFile::new(format!("fixtures/{}", f.file), f.source))
        })
        .collect()
}

pub fn bench(models: &[(String, SourceFile)], runs: usize) -> Result<BenchReport, CliError> {
    let runs = runs.max(1);
    let mut timings = Vec::new();
    for (name, src) in models {
        let sources = std::slice::from_ref(src);
        let mut total = 0.0;
        for _ in 0..runs {
            let start = Instant::now();
            let loaded = load_model(sources, LoadOptions::default()).map_err(CliError::Model)?;
            total += start.elapsed().as_secs_f64() * 1000.0;
            drop(loaded);
        }
        timings.push(Timing { name: name.clone(), millis: total / runs as f64 });
    }
    Ok(BenchReport { timings, runs })
}
