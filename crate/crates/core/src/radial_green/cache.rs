//! Binary cache of solved modes keyed by profile, mode and grid.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{GridSpec, ModeIndex, RadialError, RadialMode};
use crate::media::{MediumProfile, Polarization};

const MAGIC: &[u8; 8] = b"VDWMODE1";

/// Identity of a cached mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(profile: &MediumProfile, mode: &ModeIndex, grid: &GridSpec) -> Self {
        let digest = Sha256::digest(profile.fingerprint().as_bytes());
        let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let pol = match mode.polarization {
            Polarization::E => "E",
            Polarization::M => "M",
        };
        Self(format!(
            "{hash}|{}|{pol}|{:e}|{:e}|{:e}|{}",
            mode.l, mode.kappa, grid.r_min, grid.r_max, grid.points
        ))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn push_f64s(buf: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn write_mode_cache(mode: &RadialMode, path: &Path) -> Result<CacheKey, RadialError> {
    let key = CacheKey::new(mode.profile(), &mode.mode, &mode.grid);
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(key.0.len() as u32).to_le_bytes());
    buf.extend_from_slice(key.0.as_bytes());
    buf.extend_from_slice(&(mode.x.len() as u64).to_le_bytes());
    for arr in [&mode.x, &mode.l_plus, &mode.l_minus, &mode.ln_h_plus, &mode.ln_h_minus] {
        push_f64s(&mut buf, arr);
    }
    push_f64s(&mut buf, &[mode.seeds.0, mode.seeds.1]);
    let mut file = fs::File::create(path).map_err(|e| RadialError::Cache(e.to_string()))?;
    file.write_all(&buf).map_err(|e| RadialError::Cache(e.to_string()))?;
    Ok(key)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], RadialError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len()).ok_or_else(|| RadialError::Cache("truncated file".into()))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, RadialError> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| RadialError::Cache("length overflow".into()))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
    }
}

/// Load a mode written by [`write_mode_cache`]; fails if the stored key
/// differs from the one implied by the arguments.
pub fn read_mode_cache(path: &Path, profile: &MediumProfile, mode: ModeIndex, grid: GridSpec) -> Result<RadialMode, RadialError> {
    let data = fs::read(path).map_err(|e| RadialError::Cache(e.to_string()))?;
    let mut rd = Reader { data: &data, pos: 0 };
    if rd.take(8)? != MAGIC {
        return Err(RadialError::Cache("bad magic".into()));
    }
    let key_len = u32::from_le_bytes(rd.take(4)?.try_into().expect("4 bytes")) as usize;
    let stored = std::str::from_utf8(rd.take(key_len)?).map_err(|e| RadialError::Cache(e.to_string()))?.to_owned();
    let expected = CacheKey::new(profile, &mode, &grid);
    if stored != expected.0 {
        return Err(RadialError::Cache(format!("key mismatch: stored {stored}, expected {}", expected.0)));
    }
    let n = u64::from_le_bytes(rd.take(8)?.try_into().expect("8 bytes")) as usize;
    if n != grid.points {
        return Err(RadialError::Cache(format!("stored {n} points, grid has {}", grid.points)));
    }
    let arrays = [rd.f64s(n)?, rd.f64s(n)?, rd.f64s(n)?, rd.f64s(n)?, rd.f64s(n)?];
    let seeds = rd.f64s(2)?;
    Ok(RadialMode::from_parts(profile, mode, grid, arrays, (seeds[0], seeds[1])))
}
