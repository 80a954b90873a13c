//! Command-line front end. Every run writes a manifest next to its output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::acceptance::{run_acceptance, FixtureOverrides, Fixtures, Selection};
use crate::axioms::{check_axioms, ActionSelector, CheckId, HarnessConfig, MinimaxSelector, NaiveMinSelector, Status, ZeroSelector};
use crate::corpus::{default_corpus, fig1_corpus, Corpus, DEFAULT_SEED};
use crate::critical::{find_critical_points, SearchBox};
use crate::derivation::nonsqueezing_certificate;
use crate::error::{Error, Result};
use crate::family::DeformationFamily;
use crate::field::{PerturbedQuadratic, RadialProfile};
use crate::figures::emit_figure_data;
use crate::fixtures::{self, FixtureName};
use crate::flow::{sweep, FlowConfig};
use crate::io::{radial_csv, read_json, spectrum_csv, to_json, write_text};
use crate::manifest::RunManifest;
use crate::radial::radial_spectrum;
use crate::selector::{selector, FamilySearchConfig, SNAP_TOL};

pub const THREADS_ENV: &str = "SELECTOR_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "selector-lab", version, about = "Minimax action selectors on toy and radial Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json`, `<out-dir>/manifest.json` or `./<command>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical points of q_h as CSV.
    Spectrum {
        /// Fixture name (FIG2_SADDLE, FIG3_NOSE, WITNESS, ZERO) or a JSON model file.
        #[arg(long, default_value = "FIG2_SADDLE")]
        model: String,
        /// Search box `x0,y0,x1,y1`; covers the model with margin 1 by default.
        #[arg(long = "box")]
        bx: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bounded flow lines of a deformation family as JSON.
    Flow {
        #[arg(long, default_value = "FIG3_NOSE")]
        model: String,
        /// `autonomous`, `cutoff` (window (−1, 0)) or a JSON family file.
        #[arg(long, default_value = "cutoff")]
        family: String,
        #[arg(long = "box")]
        bx: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Integrator tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// The minimax selector value as JSON.
    Select {
        #[arg(long, default_value = "FIG2_SADDLE")]
        model: String,
        /// JSON family search config.
        #[arg(long)]
        search: Option<PathBuf>,
        #[arg(long = "box")]
        bx: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Action spectrum of a radial profile as CSV (`s,k,action`).
    Radial {
        /// FIG1_F, FIG1_F_PLUS, FIG1_F_MINUS, FIG_FE or a JSON profile file.
        #[arg(long, default_value = "FIG1_F")]
        profile: String,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the axiom harness and prints the report as JSON.
    Axioms {
        /// `default`, `fig1` or a JSON corpus file.
        #[arg(long, default_value = "default")]
        corpus: String,
        /// `minimax`, `naive` or `zero`.
        #[arg(long, default_value = "minimax")]
        selector: String,
        /// Comma-separated check names.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// The non-squeezing derivation as JSON.
    Nonsqueeze {
        #[arg(long)]
        r: f64,
        #[arg(long = "R")]
        big_r: f64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Writes CSV plot data for one fixture (or `all`).
    Figures {
        #[arg(long, default_value = "all")]
        name: String,
        #[arg(long, default_value = "figs")]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// The acceptance suite; exit status 0 iff every selected criterion passes.
    Check {
        /// Comma-separated criterion numbers, names or axiom check names.
        #[arg(long)]
        only: Option<String>,
        /// JSON object of fixture overrides keyed by fixture name.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Spectrum { .. } => "spectrum",
            Self::Flow { .. } => "flow",
            Self::Select { .. } => "select",
            Self::Radial { .. } => "radial",
            Self::Axioms { .. } => "axioms",
            Self::Nonsqueeze { .. } => "nonsqueeze",
            Self::Figures { .. } => "figures",
            Self::Check { .. } => "check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Self::Spectrum { common, .. }
            | Self::Flow { common, .. }
            | Self::Select { common, .. }
            | Self::Radial { common, .. }
            | Self::Axioms { common, .. }
            | Self::Nonsqueeze { common, .. }
            | Self::Figures { common, .. }
            | Self::Check { common, .. } => common,
        }
    }
}

fn is_file(spec: &str) -> bool {
    spec.ends_with(".json") || Path::new(spec).is_file()
}

pub fn load_model(spec: &str) -> Result<PerturbedQuadratic> {
    if is_file(spec) {
        let h: PerturbedQuadratic = read_json(Path::new(spec))?;
        h.validate()?;
        return Ok(h);
    }
    match spec.to_ascii_uppercase().as_str() {
        "FIG2_SADDLE" => Ok(fixtures::fig2_saddle()),
        "FIG3_NOSE" => Ok(fixtures::fig3_nose().model),
        "WITNESS" => Ok(fixtures::negative_origin_bump()),
        "ZERO" => Ok(PerturbedQuadratic::zero()),
        _ => Err(Error::UnknownFixture(spec.into())),
    }
}

pub fn load_profile(spec: &str) -> Result<RadialProfile> {
    if is_file(spec) {
        return read_json(Path::new(spec));
    }
    match spec.to_ascii_uppercase().as_str() {
        "FIG1_F" => Ok(fixtures::fig1_f()),
        "FIG1_F_PLUS" => Ok(fixtures::fig1_f_plus()),
        "FIG1_F_MINUS" => Ok(fixtures::fig1_f_minus()),
        "FIG_FE" => Ok(fixtures::fig_fe(crate::figures::DEFAULT_K_NORM)),
        _ => Err(Error::UnknownFixture(spec.into())),
    }
}

fn load_family(spec: &str, h: &PerturbedQuadratic) -> Result<DeformationFamily> {
    match spec {
        "autonomous" => Ok(DeformationFamily::autonomous(h)),
        "cutoff" => Ok(DeformationFamily::cutoff(h, -1.0, 0.0)?),
        path => read_json(Path::new(path)),
    }
}

fn load_corpus(spec: &str, seed: u64) -> Result<Corpus> {
    match spec {
        "default" => Ok(default_corpus(seed)),
        "fig1" => Ok(fig1_corpus()),
        path => read_json(Path::new(path)),
    }
}

fn search_box(spec: &Option<String>, h: &PerturbedQuadratic) -> Result<SearchBox> {
    match spec {
        Some(s) => SearchBox::parse(s).ok_or_else(|| Error::Other(format!("bad box '{s}', expected x0,y0,x1,y1"))),
        None => Ok(SearchBox::covering(h, 1.0)),
    }
}

fn parse_checks(only: &Option<String>) -> Result<Vec<CheckId>> {
    match only {
        None => Ok(CheckId::ALL.to_vec()),
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| CheckId::parse(t).ok_or_else(|| Error::Other(format!("unknown check '{t}'"))))
            .collect(),
    }
}

/// Where a command's main output goes.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, manifest: &mut RunManifest, name: &str, text: &str) -> Result<()> {
        manifest.record_output(name, text.as_bytes());
        match self.out {
            Some(p) => write_text(p, text),
            None => Ok(self.stdout.write_all(text.as_bytes())?),
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    to_json(v)
}

fn manifest_path(cmd: &Command) -> PathBuf {
    let c = cmd.common();
    if let Some(p) = &c.manifest {
        return p.clone();
    }
    if let Some(o) = &c.out {
        let mut s = o.clone().into_os_string();
        s.push(".manifest.json");
        return s.into();
    }
    if let Command::Figures { out_dir, .. } = cmd {
        return out_dir.join("manifest.json");
    }
    PathBuf::from(format!("{}.manifest.json", cmd.name()))
}

/// Caps the global rayon pool at `SELECTOR_LAB_THREADS` when it is set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::Other(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::Other(format!("{THREADS_ENV} must be positive")));
        }
        // a pool that is already built (tests, repeated calls) keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one command; the returned code is the process exit status.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    configure_threads()?;
    let t = Instant::now();
    let cmd = &cli.command;
    let mut m = RunManifest::new(cmd.name());
    let out = cmd.common().out.clone();
    let mut sink = Sink { out: out.as_deref(), stdout };
    let mut code = 0;
    match cmd {
        Command::Spectrum { model, bx, grid, .. } => {
            let h = load_model(model)?;
            let bx = search_box(bx, &h)?;
            m.digest_config("model", &h)?;
            m.digest_config("box", &bx)?;
            m.tolerance("newton_tol", crate::critical::NEWTON_TOL);
            m.tolerance("degeneracy_tol", crate::critical::DEGENERACY_TOL);
            let rep = find_critical_points(&h, &bx, *grid)?;
            m.verdict("nonconverged_seeds", true, rep.nonconverged_seeds.to_string());
            sink.emit(&mut m, "spectrum.csv", &spectrum_csv(&rep)?)?;
        }
        Command::Flow { model, family, bx, grid, tol, .. } => {
            let h = load_model(model)?;
            let fam = load_family(family, &h)?;
            let rep = find_critical_points(&fam.base, &search_box(bx, &fam.base)?, *grid)?;
            let mut cfg = FlowConfig::default();
            if let Some(t) = tol {
                cfg.integrator_tol = *t;
            }
            m.digest_config("family", &fam)?;
            m.digest_config("flow", &cfg)?;
            m.tolerance("integrator_tol", cfg.integrator_tol);
            let sw = sweep(&fam, &rep, &cfg, false)?;
            let bounded = sw.lines.iter().filter(|l| l.bounded).count();
            m.verdict("bounded_lines", bounded > 0, bounded.to_string());
            sink.emit(&mut m, "flow.json", &json(&sw)?)?;
        }
        Command::Select { model, search, bx, grid, tol, .. } => {
            let h = load_model(model)?;
            let mut cfg: FamilySearchConfig = match search {
                Some(p) => read_json(p)?,
                None => FamilySearchConfig::default(),
            };
            if let Some(t) = tol {
                cfg.flow.integrator_tol = *t;
            }
            let rep = find_critical_points(&h, &search_box(bx, &h)?, *grid)?;
            m.digest_config("model", &h)?;
            m.digest_config("search", &cfg)?;
            m.tolerance("snap_tol", SNAP_TOL);
            m.tolerance("integrator_tol", cfg.flow.integrator_tol);
            let r = selector(&h, &cfg, &rep)?;
            m.verdict("spectrality", r.spectral_distance < SNAP_TOL, format!("σ = {}, raw {}", r.value, r.raw_minimax));
            sink.emit(&mut m, "select.json", &json(&r)?)?;
        }
        Command::Radial { profile, .. } => {
            let f = load_profile(profile)?;
            m.digest_config("profile", &f)?;
            let spec = radial_spectrum(&f);
            m.verdict("entries", true, spec.entries.len().to_string());
            sink.emit(&mut m, "radial.csv", &radial_csv(&spec)?)?;
        }
        Command::Axioms { corpus, selector: name, only, seed, .. } => {
            let corpus = load_corpus(corpus, *seed)?;
            let cfg = HarnessConfig { checks: parse_checks(only)?, ..HarnessConfig::default() };
            m.digest_config("corpus", &corpus)?;
            m.digest_config("harness", &cfg)?;
            m.tolerance("spectral_tol", cfg.spectral_tol);
            m.tolerance("lipschitz_slack", cfg.lipschitz_slack);
            m.tolerance("property_tol", cfg.property_tol);
            let sel: Box<dyn ActionSelector> = match name.as_str() {
                "minimax" => Box::new(MinimaxSelector::default()),
                "naive" => Box::new(NaiveMinSelector),
                "zero" => Box::new(ZeroSelector),
                other => return Err(Error::Other(format!("unknown selector '{other}'"))),
            };
            let report = check_axioms(sel.as_ref(), &corpus, &cfg);
            for v in &report.verdicts {
                m.verdict(v.check.as_str(), v.status != Status::Fail, format!("{:?} {}/{}", v.status, v.checked - v.counterexamples.len(), v.checked));
            }
            if !report.all_pass() {
                code = 1;
            }
            sink.emit(&mut m, "axioms.json", &json(&report)?)?;
        }
        Command::Nonsqueeze { r, big_r, eps, .. } => {
            let c = nonsqueezing_certificate(*r, *big_r, *eps)?;
            m.tolerance("chain_tol", crate::derivation::CHAIN_TOL);
            m.digest_config("inputs", &c.inputs)?;
            m.verdict("excluded", c.verdict, c.conclusion.clone());
            sink.emit(&mut m, "nonsqueeze.json", &json(&c)?)?;
        }
        Command::Figures { name, out_dir, .. } => {
            let names: Vec<FixtureName> = if name.eq_ignore_ascii_case("all") { FixtureName::ALL.to_vec() } else { vec![name.parse()?] };
            for n in names {
                let b = emit_figure_data(n)?;
                for f in &b.files {
                    m.record_output(&f.name, f.contents.as_bytes());
                }
                b.write(out_dir)?;
                m.verdict(n.as_str(), true, format!("{} files", b.files.len()));
            }
        }
        Command::Check { only, fixtures: overrides, seed, .. } => {
            let sel = Selection::parse(only.as_deref().unwrap_or(""))?;
            let mut fx = Fixtures { seed: *seed, ..Fixtures::default() };
            if let Some(p) = overrides {
                let o: FixtureOverrides = read_json(p)?;
                fx = fx.with(o);
            }
            let report = run_acceptance(&sel, &fx, &mut |r| {
                let _ = writeln!(stderr, "{}", r.line());
            })?;
            if !report.all_pass() {
                let failed: Vec<String> = report.results.iter().filter(|r| !r.passed).map(|r| format!("{} {}", r.id, r.name)).collect();
                writeln!(stderr, "failed: {}", failed.join(", "))?;
                code = 1;
            }
            m = report.manifest;
            if out.is_some() {
                let lines: String = report.results.iter().map(|r| r.line() + "\n").collect();
                sink.emit(&mut m, "check.txt", &lines)?;
            }
        }
    }
    m.wall_time = t.elapsed().as_secs_f64();
    m.write(&manifest_path(cmd))?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn fixtures_by_name() {
        assert_eq!(load_model("fig2_saddle").unwrap(), fixtures::fig2_saddle());
        assert!(load_model("nope").is_err());
        assert_eq!(load_profile("FIG_FE").unwrap(), fixtures::fig_fe(3.0));
    }
}
