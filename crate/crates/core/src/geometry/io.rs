//! Profile CSV (`s,rho,z,alpha`) and JSON readers/writers.

use std::io::{Read, Write};

use super::curve::check_uniform_s;
use super::{GeometryError, ProfileCurve, RadialDensity};

#[derive(Debug, serde::Deserialize, serde::Serialize)]
struct ProfileRow {
    s: f64,
    rho: f64,
    z: f64,
    alpha: f64,
}

/// Reads a closed profile. The spacing is taken from the `s` column and
/// must be uniform; the period is `N · h`.
pub fn read_profile_csv<R: Read>(reader: R) -> Result<ProfileCurve, GeometryError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| GeometryError::Parse(e.to_string()))?.clone();
    for col in ["s", "rho", "z", "alpha"] {
        if !headers.iter().any(|h| h == col) {
            return Err(GeometryError::Parse(format!("missing column `{col}` (expected s,rho,z,alpha)")));
        }
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.deserialize::<ProfileRow>().enumerate() {
        let row = rec.map_err(|e| GeometryError::Parse(format!("row {}: {e}", line + 1)))?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(GeometryError::TooFewNodes { got: rows.len(), min: super::curve::MIN_NODES });
    }
    let h = rows[1].s - rows[0].s;
    let n = rows.len();
    let length = h * n as f64;
    let s: Vec<f64> = rows.iter().map(|r| r.s - rows[0].s).collect();
    let curve = ProfileCurve::new(
        rows.iter().map(|r| r.rho).collect(),
        rows.iter().map(|r| r.z).collect(),
        rows.iter().map(|r| r.alpha).collect(),
        length,
        true,
    )?;
    check_uniform_s(&s, curve.spacing(), length)?;
    Ok(curve)
}

pub fn write_profile_csv<W: Write>(curve: &ProfileCurve, writer: W) -> Result<(), GeometryError> {
    let mut w = csv::Writer::from_writer(writer);
    for i in 0..curve.len() {
        w.serialize(ProfileRow { s: curve.arclength(i), rho: curve.rho()[i], z: curve.z()[i], alpha: curve.alpha()[i] })
            .map_err(|e| GeometryError::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| GeometryError::Parse(e.to_string()))?;
    Ok(())
}

pub fn read_profile_json<R: Read>(reader: R) -> Result<ProfileCurve, GeometryError> {
    serde_json::from_reader(reader).map_err(|e| GeometryError::Parse(e.to_string()))
}

pub fn read_density_json<R: Read>(reader: R) -> Result<RadialDensity, GeometryError> {
    serde_json::from_reader(reader).map_err(|e| GeometryError::Parse(e.to_string()))
}
