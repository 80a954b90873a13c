//! Plot data for the fixture figures, as CSV bundles.
//!
//! Every number is written with the shortest round-trip formatting of `f64`,
//! so regenerating a bundle is byte-for-byte deterministic.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::critical::{find_critical_points, SearchBox, SpectrumReport};
use crate::error::Result;
use crate::family::DeformationFamily;
use crate::field::{pt, PerturbedQuadratic, RadialProfile};
use crate::fixtures::{self, FixtureName, FIG_FE_CENTER, FIG_FE_EPS};
use crate::flow::{sweep, FlowConfig, FlowLine};
use crate::io::{csv_table, num, spectrum_csv, write_text};
use crate::radial::radial_spectrum;

/// `‖K‖` used when the dense-orbit profile is emitted without an explicit value.
pub const DEFAULT_K_NORM: f64 = 3.0;
pub const PROFILE_SAMPLES: usize = 301;
pub const SURFACE_GRID: usize = 81;
/// Per-line cap on trajectory samples in `flows.csv`.
pub const FLOW_SAMPLES: usize = 120;
/// Half-width of the square on which figure surfaces and fields are sampled.
pub const FIGURE_HALF_WIDTH: f64 = 2.0;
pub const FIGURE_GRID_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureBundle {
    pub fixture: FixtureName,
    pub files: Vec<FigureFile>,
}

impl FigureBundle {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for f in &self.files {
            let p = dir.join(&f.name);
            write_text(&p, &f.contents)?;
            out.push(p);
        }
        Ok(out)
    }
}

fn file(name: &str, contents: String) -> FigureFile {
    FigureFile { name: name.into(), contents }
}

fn profile_rows(label: &str, f: &RadialProfile, s_end: f64) -> Vec<Vec<String>> {
    (0..PROFILE_SAMPLES)
        .map(|i| {
            let s = s_end * i as f64 / (PROFILE_SAMPLES - 1) as f64;
            let (v, d) = f.eval(s);
            vec![label.to_string(), num(s), num(v), num(v - s * d)]
        })
        .collect()
}

/// `curve,s,f,action` with `action = f − s f'`, and `minima.csv` with each `min spec`.
fn fig1(curves: &[(&str, RadialProfile)]) -> Result<Vec<FigureFile>> {
    let s_end = curves.iter().map(|(_, f)| f.s_max()).fold(0.0, f64::max) + 0.5;
    let rows: Vec<Vec<String>> = curves.iter().flat_map(|(l, f)| profile_rows(l, f, s_end)).collect();
    let minima = curves.iter().map(|(l, f)| vec![l.to_string(), num(radial_spectrum(f).min_action())]);
    Ok(vec![
        file("fig1_curves.csv", csv_table(&["curve", "s", "f", "action"], rows)?),
        file("fig1_minima.csv", csv_table(&["curve", "min_spec"], minima)?),
    ])
}

fn figure_box() -> SearchBox {
    SearchBox::square(FIGURE_HALF_WIDTH)
}

fn surface(h: &PerturbedQuadratic) -> Result<String> {
    let bx = figure_box();
    let n = SURFACE_GRID;
    let rows = (0..n).flat_map(|i| {
        (0..n).map(move |j| {
            let x = bx.x0 + (bx.x1 - bx.x0) * i as f64 / (n - 1) as f64;
            let y = bx.y0 + (bx.y1 - bx.y0) * j as f64 / (n - 1) as f64;
            vec![num(x), num(y), num(h.eval(pt(x, y)))]
        })
    });
    csv_table(&["x", "y", "q"], rows)
}

fn spectrum_of(h: &PerturbedQuadratic) -> Result<SpectrumReport> {
    Ok(find_critical_points(h, &SearchBox::covering(h, 1.0), FIGURE_GRID_N)?)
}

fn fig2() -> Result<Vec<FigureFile>> {
    let h = fixtures::fig2_saddle();
    let rep = spectrum_of(&h)?;
    Ok(vec![file("fig2_surface.csv", surface(&h)?), file("fig2_critical.csv", spectrum_csv(&rep)?)])
}

fn thin(line: &FlowLine) -> Vec<(f64, [f64; 2])> {
    let all = line.samples();
    let stride = all.len().div_ceil(FLOW_SAMPLES).max(1);
    let mut out: Vec<(f64, [f64; 2])> = all.iter().step_by(stride).map(|(s, p)| (*s, [p.x, p.y])).collect();
    if let Some((s, p)) = all.last() {
        if out.last().map(|l| l.0) != Some(*s) {
            out.push((*s, [p.x, p.y]));
        }
    }
    out
}

fn fig3() -> Result<Vec<FigureFile>> {
    let nose = fixtures::fig3_nose();
    let h = &nose.model;
    let rep = spectrum_of(h)?;
    let fam = DeformationFamily::autonomous(h);
    let sw = sweep(&fam, &rep, &FlowConfig::default(), true)?;
    let lines: Vec<&FlowLine> = sw.lines.iter().chain(sw.shots.iter()).collect();
    let mut flow_rows = Vec::new();
    let mut meta_rows = Vec::new();
    for (id, l) in lines.iter().enumerate() {
        for (s, p) in thin(l) {
            flow_rows.push(vec![id.to_string(), num(s), num(p[0]), num(p[1])]);
        }
        let alpha = l.alpha_limit.as_ref().map(|c| c.location).unwrap_or([f64::NAN; 2]);
        meta_rows.push(vec![
            id.to_string(),
            l.bounded.to_string(),
            num(alpha[0]),
            num(alpha[1]),
            num(l.start_value),
            num(l.energy),
        ]);
    }
    let bx = figure_box();
    let n = 21;
    let field = (0..n).flat_map(|i| {
        (0..n).map(move |j| {
            let x = bx.x0 + (bx.x1 - bx.x0) * i as f64 / (n - 1) as f64;
            let y = bx.y0 + (bx.y1 - bx.y0) * j as f64 / (n - 1) as f64;
            let g = -h.grad(pt(x, y));
            vec![num(x), num(y), num(g.x), num(g.y)]
        })
    });
    Ok(vec![
        file("fig3_flows.csv", csv_table(&["line_id", "s", "x", "y"], flow_rows)?),
        file(
            "fig3_flows_meta.csv",
            csv_table(&["line_id", "bounded", "alpha_x", "alpha_y", "start_value", "energy"], meta_rows)?,
        ),
        file("fig3_field.csv", csv_table(&["x", "y", "vx", "vy"], field)?),
        file("fig3_critical.csv", spectrum_csv(&rep)?),
    ])
}

/// Constant-orbit actions of the profile: `f(s)` where `f'(s) = 0`.
pub fn critical_values(f: &RadialProfile) -> Vec<f64> {
    crate::critical::dedupe_values(radial_spectrum(f).entries.iter().filter(|e| e.k == 0).map(|e| e.action).collect())
}

fn fig_fe(k_norm: f64) -> Result<Vec<FigureFile>> {
    let f = fixtures::fig_fe(k_norm);
    let rows = (0..PROFILE_SAMPLES).map(|i| {
        let s = (FIG_FE_CENTER + FIG_FE_EPS + 0.5) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
        let (v, d) = f.eval(s);
        vec![num(s), num(v), num(d)]
    });
    let crit = critical_values(&f).into_iter().map(|v| vec![num(v)]);
    let window = vec![vec![
        num(FIG_FE_CENTER - FIG_FE_EPS),
        num(FIG_FE_CENTER + FIG_FE_EPS),
        num(k_norm),
    ]];
    Ok(vec![
        file("fig_fe_profile.csv", csv_table(&["s", "f", "fprime"], rows)?),
        file("fig_fe_critical_values.csv", csv_table(&["value"], crit)?),
        file("fig_fe_window.csv", csv_table(&["lo", "hi", "k_norm"], window)?),
    ])
}

pub fn emit_figure_data(name: FixtureName) -> Result<FigureBundle> {
    let files = match name {
        FixtureName::Fig1F => fig1(&[("f", fixtures::fig1_f())])?,
        FixtureName::Fig1Fpm => fig1(&[
            ("f", fixtures::fig1_f()),
            ("f_plus", fixtures::fig1_f_plus()),
            ("f_minus", fixtures::fig1_f_minus()),
        ])?,
        FixtureName::Fig2Saddle => fig2()?,
        FixtureName::Fig3Nose => fig3()?,
        FixtureName::FigFe => fig_fe(DEFAULT_K_NORM)?,
    };
    Ok(FigureBundle { fixture: name, files })
}

/// Machine-checkable assertion attached to a fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub fixture: FixtureName,
    pub assertion: String,
    pub passed: bool,
}

fn count_rows(csv: &str) -> usize {
    csv.lines().count().saturating_sub(1)
}

/// Re-reads the emitted bundle and checks the fixture's qualitative content.
pub fn check_fixture(name: FixtureName) -> Result<Vec<FixtureCheck>> {
    let b = emit_figure_data(name)?;
    let mut out = Vec::new();
    let mut push = |assertion: &str, passed: bool| out.push(FixtureCheck { fixture: name, assertion: assertion.into(), passed });
    match name {
        FixtureName::Fig1F => {
            let f = fixtures::fig1_f();
            push("f'(s*) = 1 and f = 0 beyond s_max", f.eval(fixtures::FIG1_S_STAR).1 == 1.0 && f.eval(f.s_max() + 1.0) == (0.0, 0.0));
            push("min spec(f) = f(s*) − s*", (radial_spectrum(&f).min_action() + 2.5).abs() < 1e-9);
        }
        FixtureName::Fig1Fpm => {
            let f = fixtures::fig1_f();
            let m = radial_spectrum(&f).min_action();
            for (label, g) in [("f_plus", fixtures::fig1_f_plus()), ("f_minus", fixtures::fig1_f_minus())] {
                let jump = (radial_spectrum(&g).min_action() - m).abs();
                push(&format!("min spec({label}) jumps by more than 10 sup-distances"), jump > 10.0 * g.sup_distance(&f));
            }
        }
        FixtureName::Fig2Saddle => {
            let crit = b.file("fig2_critical.csv").unwrap_or("");
            push("5 critical points", count_rows(crit) == 5);
            let values = spectrum_of(&fixtures::fig2_saddle())?.values;
            let frozen = values.len() == 5
                && values.iter().zip(fixtures::FIG2_CRITICAL_VALUES).all(|(v, e)| (v - e).abs() < fixtures::FIG2_VALUE_TOL);
            push("critical values match the frozen oracle values", frozen);
        }
        FixtureName::Fig3Nose => {
            let (mut bounded, mut constant) = (0, 0);
            let meta = b.file("fig3_flows_meta.csv").unwrap_or("");
            let nose = fixtures::fig3_nose();
            for row in meta.lines().skip(1) {
                let f: Vec<&str> = row.split(',').collect();
                if f[1] == "true" {
                    bounded += 1;
                    let e: f64 = f[5].parse().unwrap_or(f64::NAN);
                    let a = pt(f[2].parse().unwrap_or(f64::NAN), f[3].parse().unwrap_or(f64::NAN));
                    let at_crit = a.norm() < 1e-9 || (a - nose.z_point()).norm() < 1e-9;
                    constant += usize::from(e.abs() < 1e-9 && at_crit);
                }
            }
            push("exactly 2 bounded lines", bounded == 2);
            push("both bounded lines are constant", constant == 2);
        }
        FixtureName::FigFe => {
            let f = fixtures::fig_fe(DEFAULT_K_NORM);
            let cv = critical_values(&f);
            push("critical values are {−‖K‖−1, 0}", cv.len() == 2 && (cv[0] + DEFAULT_K_NORM + 1.0).abs() < 1e-12 && cv[1] == 0.0);
            // the support starts at the last knot before the first non-zero Hermite datum
            let first = (0..f.knots().len()).find(|&i| f.values()[i] != 0.0 || f.derivs()[i] != 0.0);
            let support_lo = first.map(|i| f.knots()[i.saturating_sub(1)]);
            let inside = support_lo.is_some_and(|s| s > FIG_FE_CENTER - FIG_FE_EPS) && f.s_max() < FIG_FE_CENTER + FIG_FE_EPS;
            push("support strictly inside (c − ε, c + ε)", inside);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_and_fe_bundles() {
        for n in [FixtureName::Fig1F, FixtureName::Fig1Fpm, FixtureName::FigFe] {
            assert!(check_fixture(n).unwrap().iter().all(|c| c.passed), "{n}");
        }
        let b = emit_figure_data(FixtureName::Fig1Fpm).unwrap();
        assert_eq!(count_rows(b.file("fig1_curves.csv").unwrap()), 3 * PROFILE_SAMPLES);
        assert_eq!(b, emit_figure_data(FixtureName::Fig1Fpm).unwrap());
    }

    #[test]
    fn fe_critical_values() {
        let cv = critical_values(&fixtures::fig_fe(3.0));
        assert_eq!(cv.len(), 2);
        assert!((cv[0] + 4.0).abs() < 1e-12 && cv[1] == 0.0);
    }
}
