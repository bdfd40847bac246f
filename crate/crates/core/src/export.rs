//! Plot-ready file output: RFC-4180-style CSV bodies behind a `# key=value`
//! metadata prologue, and single-object JSON with the same metadata.
//!
//! Floats are written with Rust's shortest-roundtrip formatter, so a fixed
//! computation produces byte-identical files.

use std::io::Write;

use crate::bohm::TrajectoryEnsemble;
use crate::error::{Error, Result};
use crate::qm::LineSpectrum;
use crate::sqm::SpectralFunction;

/// Ordered key=value metadata block for the file prologue.
#[derive(Debug, Clone, Default)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn new() -> Self {
        Metadata(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write_csv_prologue(&self, w: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.0 {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    fn json_object(&self) -> serde_json::Map<String, serde_json::Value> {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect()
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Domain(format!("write failed: {e}"))
}

/// `omega,value,stderr` rows; the delta line, if any, is a leading row at
/// omega = 0 with an empty stderr field.
pub fn spectrum_csv(sf: &SpectralFunction, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    meta.write_csv_prologue(w).map_err(io_err)?;
    writeln!(w, "omega,value,stderr").map_err(io_err)?;
    if let Some((omega, weight)) = sf.delta_line {
        writeln!(w, "{omega},{weight},").map_err(io_err)?;
    }
    for s in &sf.samples {
        match s.stderr {
            Some(e) => writeln!(w, "{},{},{}", s.omega, s.value, e),
            None => writeln!(w, "{},{},", s.omega, s.value),
        }
        .map_err(io_err)?;
    }
    Ok(())
}

pub fn spectrum_json(sf: &SpectralFunction, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    let mut obj = meta.json_object();
    obj.insert(
        "spectrum".into(),
        serde_json::to_value(sf).map_err(|e| Error::Domain(e.to_string()))?,
    );
    serde_json::to_writer_pretty(&mut *w, &serde_json::Value::Object(obj))
        .map_err(|e| Error::Domain(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

/// `omega,weight` rows, lines sorted by frequency.
pub fn lines_csv(ls: &LineSpectrum, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    meta.write_csv_prologue(w).map_err(io_err)?;
    writeln!(w, "omega,weight").map_err(io_err)?;
    for l in &ls.lines {
        writeln!(w, "{},{}", l.omega, l.weight).map_err(io_err)?;
    }
    Ok(())
}

pub fn lines_json(ls: &LineSpectrum, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    let mut obj = meta.json_object();
    obj.insert(
        "line_spectrum".into(),
        serde_json::to_value(ls).map_err(|e| Error::Domain(e.to_string()))?,
    );
    serde_json::to_writer_pretty(&mut *w, &serde_json::Value::Object(obj))
        .map_err(|e| Error::Domain(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

/// `r0,theta0,phi0` rows; the seed travels in the metadata.
pub fn ensemble_csv(ens: &TrajectoryEnsemble, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    meta.write_csv_prologue(w).map_err(io_err)?;
    writeln!(w, "r0,theta0,phi0").map_err(io_err)?;
    for p in &ens.points {
        writeln!(w, "{},{},{}", p.r0, p.theta0, p.phi0).map_err(io_err)?;
    }
    Ok(())
}

pub fn ensemble_json(ens: &TrajectoryEnsemble, meta: &Metadata, w: &mut dyn Write) -> Result<()> {
    let mut obj = meta.json_object();
    obj.insert(
        "ensemble".into(),
        serde_json::to_value(ens).map_err(|e| Error::Domain(e.to_string()))?,
    );
    serde_json::to_writer_pretty(&mut *w, &serde_json::Value::Object(obj))
        .map_err(|e| Error::Domain(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

/// Any serializable report behind the shared metadata prologue.
pub fn report_json<T: serde::Serialize>(
    report: &T,
    meta: &Metadata,
    w: &mut dyn Write,
) -> Result<()> {
    let mut obj = meta.json_object();
    obj.insert(
        "report".into(),
        serde_json::to_value(report).map_err(|e| Error::Domain(e.to_string()))?,
    );
    serde_json::to_writer_pretty(&mut *w, &serde_json::Value::Object(obj))
        .map_err(|e| Error::Domain(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{sample_qeh, RngStreamSpec};
    use crate::hydrogen::HydrogenState;

    #[test]
    fn csv_has_prologue_and_header() {
        let st = HydrogenState::new(2, 1, 1).unwrap();
        let sf = SpectralFunction::closed_form(&st, &[0.5, 1.0]).unwrap();
        let mut meta = Metadata::new();
        meta.push("state", "2,1,1").push("units", "e2a02_per_omega0");
        let mut buf = Vec::new();
        spectrum_csv(&sf, &meta, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# state=2,1,1\n# units=e2a02_per_omega0\nomega,value,stderr\n"));
        assert_eq!(text.lines().count(), 2 + 1 + 2);
    }

    #[test]
    fn delta_line_row_present() {
        let st = HydrogenState::new(2, 1, 0).unwrap();
        let sf = SpectralFunction::delta_only(&st).unwrap();
        let mut buf = Vec::new();
        spectrum_csv(&sf, &Metadata::new(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        let mut fields = row.split(',');
        assert_eq!(fields.next(), Some("0"));
        let weight: f64 = fields.next().unwrap().parse().unwrap();
        assert!((weight - 6.0).abs() < 1e-12, "delta weight should be 6: {row}");
    }

    #[test]
    fn ensemble_roundtrip_deterministic() {
        let st = HydrogenState::new(2, 1, 1).unwrap();
        let ens = sample_qeh(&st, 100, RngStreamSpec::new(4));
        let mut a = Vec::new();
        let mut b = Vec::new();
        ensemble_csv(&ens, &Metadata::new(), &mut a).unwrap();
        let ens2 = sample_qeh(&st, 100, RngStreamSpec::new(4));
        ensemble_csv(&ens2, &Metadata::new(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_is_single_object() {
        let st = HydrogenState::new(2, 1, 1).unwrap();
        let sf = SpectralFunction::closed_form(&st, &[1.0]).unwrap();
        let mut buf = Vec::new();
        let mut meta = Metadata::new();
        meta.push("method", "closed");
        spectrum_json(&sf, &meta, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["method"], "closed");
        assert!(v["spectrum"]["samples"].is_array());
    }
}
