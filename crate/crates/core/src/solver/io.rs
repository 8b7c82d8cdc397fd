//! JSON wave files with a SHA-256 checksum over the payload.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use super::wave::{ConformalWave, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::params::WaveParams;

pub const FORMAT_VERSION: u32 = 1;

/// On-disk representation of a wave.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFile {
    pub g: f64,
    pub sigma: f64,
    pub c: f64,
    pub grid: usize,
    pub half_length: f64,
    pub y_samples: Vec<f64>,
    pub residual_max: f64,
}

#[derive(Serialize)]
struct Payload<'a> {
    format_version: u32,
    g: &'a RawValue,
    sigma: &'a RawValue,
    c: &'a RawValue,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: &'a RawValue,
    y_samples: &'a RawValue,
    residual_max: &'a RawValue,
}

#[derive(Serialize)]
struct Stamped<'a> {
    #[serde(flatten)]
    payload: Payload<'a>,
    checksum: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Stored {
    format_version: u32,
    g: f64,
    sigma: f64,
    c: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: f64,
    y_samples: Vec<f64>,
    residual_max: f64,
    checksum: String,
}

/// Seventeen significant digits, which round-trips every finite double.
fn num(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    format!("{v:.16e}")
}

fn raw(s: String) -> Result<Box<RawValue>> {
    Ok(RawValue::from_string(s)?)
}

impl WaveFile {
    pub fn from_wave(w: &ConformalWave) -> WaveFile {
        WaveFile {
            g: w.params().g(),
            sigma: w.params().sigma(),
            c: w.c(),
            grid: w.grid(),
            half_length: w.half_length(),
            y_samples: w.y().to_vec(),
            residual_max: w.residual_max(),
        }
    }

    pub fn to_wave(&self) -> Result<ConformalWave> {
        let params = WaveParams::planar(self.g, self.sigma, self.c, DEFAULT_EPS)?;
        ConformalWave::from_samples(params, self.half_length, self.y_samples.clone())
    }

    fn payload_text(&self) -> Result<(String, [Box<RawValue>; 6])> {
        for v in [
            self.g,
            self.sigma,
            self.c,
            self.half_length,
            self.residual_max,
        ]
        .iter()
        .chain(&self.y_samples)
        {
            if !v.is_finite() {
                return Err(Error::InvalidConfig("wave data must be finite".into()));
            }
        }
        let ys = format!(
            "[{}]",
            self.y_samples
                .iter()
                .map(|v| num(*v))
                .collect::<Vec<_>>()
                .join(",")
        );
        let parts = [
            raw(num(self.g))?,
            raw(num(self.sigma))?,
            raw(num(self.c))?,
            raw(num(self.half_length))?,
            raw(ys)?,
            raw(num(self.residual_max))?,
        ];
        let p = Payload {
            format_version: FORMAT_VERSION,
            g: &parts[0],
            sigma: &parts[1],
            c: &parts[2],
            n: self.grid,
            l: &parts[3],
            y_samples: &parts[4],
            residual_max: &parts[5],
        };
        Ok((serde_json::to_string(&p)?, parts))
    }

    /// SHA-256 (hex) of the canonical payload.
    pub fn checksum(&self) -> Result<String> {
        let (text, _) = self.payload_text()?;
        Ok(hex(&Sha256::digest(text.as_bytes())))
    }

    pub fn to_json(&self) -> Result<String> {
        let (text, parts) = self.payload_text()?;
        let checksum = hex(&Sha256::digest(text.as_bytes()));
        let stamped = Stamped {
            payload: Payload {
                format_version: FORMAT_VERSION,
                g: &parts[0],
                sigma: &parts[1],
                c: &parts[2],
                n: self.grid,
                l: &parts[3],
                y_samples: &parts[4],
                residual_max: &parts[5],
            },
            checksum,
        };
        let mut s = serde_json::to_string_pretty(&stamped)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<WaveFile> {
        let st: Stored = serde_json::from_str(text)?;
        if st.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion(st.format_version));
        }
        if st.y_samples.len() != st.n {
            return Err(Error::DimensionMismatch {
                expected: st.n,
                found: st.y_samples.len(),
            });
        }
        let wf = WaveFile {
            g: st.g,
            sigma: st.sigma,
            c: st.c,
            grid: st.n,
            half_length: st.l,
            y_samples: st.y_samples,
            residual_max: st.residual_max,
        };
        let computed = wf.checksum()?;
        if computed != st.checksum {
            return Err(Error::ChecksumMismatch {
                stored: st.checksum,
                computed,
            });
        }
        Ok(wf)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn export_wave(wave: &ConformalWave, path: &Path) -> Result<()> {
    fs::write(path, WaveFile::from_wave(wave).to_json()?)?;
    Ok(())
}

pub fn import_wave(path: &Path) -> Result<ConformalWave> {
    let text = fs::read_to_string(path)?;
    WaveFile::from_json(&text)?.to_wave()
}
