//! File formats: JSON inputs, CSV tables.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::critical::SpectrumReport;
use crate::error::Result;
use crate::radial::RadialSpectrum;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::write(path, text)?)
}

/// Shortest round-trip form, switching to exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Builds a CSV table from a header and rows of already formatted fields.
pub fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `x,y,value,index,degenerate`
pub fn spectrum_csv(report: &SpectrumReport) -> Result<String> {
    csv_table(
        &["x", "y", "value", "index", "degenerate"],
        report.critical_points.iter().map(|c| {
            vec![
                num(c.location[0]),
                num(c.location[1]),
                num(c.value),
                c.morse_index.to_string(),
                c.degenerate.to_string(),
            ]
        }),
    )
}

/// `s,k,action`
pub fn radial_csv(spec: &RadialSpectrum) -> Result<String> {
    csv_table(
        &["s", "k", "action"],
        spec.entries.iter().map(|e| vec![num(e.s), e.k.to_string(), num(e.action)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{find_critical_points, SearchBox};
    use crate::field::PerturbedQuadratic;

    #[test]
    fn spectrum_table() {
        let r = find_critical_points(&PerturbedQuadratic::zero(), &SearchBox::square(2.0), 16).unwrap();
        assert_eq!(spectrum_csv(&r).unwrap(), "x,y,value,index,degenerate\n0.0,0.0,0.0,1,false\n");
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.json");
        write_json(&p, &crate::fixtures::fig2_saddle()).unwrap();
        let back: PerturbedQuadratic = read_json(&p).unwrap();
        assert_eq!(back, crate::fixtures::fig2_saddle());
    }
}
