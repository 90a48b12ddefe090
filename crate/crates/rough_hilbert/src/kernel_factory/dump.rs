use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::{Coeff, DiscreteKernel, KernelMeta};
use crate::error::{LabError, Result};

/// JSON sidecar of a binary kernel dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSidecar {
    pub support_min: i64,
    pub support_max: i64,
    pub complex: bool,
    pub meta: KernelMeta,
}

/// CSV with a `#`-prefixed JSON metadata line, then `x,value` (or
/// `x,re,im`) rows for the nonzero entries.
pub fn write_kernel_csv<T: Coeff>(k: &DiscreteKernel<T>, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# {}", serde_json::to_string(&k.meta)?)?;
    let mut w = csv::Writer::from_writer(f);
    if T::IS_REAL {
        w.write_record(["x", "value"])?;
    } else {
        w.write_record(["x", "re", "im"])?;
    }
    for (x, v) in k.nonzeros() {
        let z = v.to_c64();
        if T::IS_REAL {
            w.write_record([x.to_string(), format!("{:.16e}", z.re)])?;
        } else {
            w.write_record([x.to_string(), format!("{:.16e}", z.re), format!("{:.16e}", z.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Little-endian `f64` values (interleaved re/im when complex) at
/// `path`, plus `path.json`.
pub fn write_kernel_binary<T: Coeff>(k: &DiscreteKernel<T>, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(k.len() * if T::IS_REAL { 8 } else { 16 });
    for v in k.values() {
        let z = v.to_c64();
        bytes.extend_from_slice(&z.re.to_le_bytes());
        if !T::IS_REAL {
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    let side = KernelSidecar {
        support_min: k.support_min(),
        support_max: k.support_max(),
        complex: !T::IS_REAL,
        meta: k.meta.clone(),
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn read_kernel_binary<T: Coeff>(path: &Path) -> Result<DiscreteKernel<T>> {
    let side: KernelSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if side.complex == T::IS_REAL {
        return Err(LabError::Config("kernel dump scalar type mismatch".into()));
    }
    let bytes = fs::read(path)?;
    let width = if T::IS_REAL { 8 } else { 16 };
    let n = (side.support_max - side.support_min + 1).max(0) as usize;
    if bytes.len() != n * width {
        return Err(LabError::Config(format!("kernel dump holds {} bytes, expected {}", bytes.len(), n * width)));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let values = bytes
        .chunks_exact(width)
        .map(|c| {
            let re = f(&c[..8]);
            let im = if T::IS_REAL { 0.0 } else { f(&c[8..]) };
            T::from_c64(num_complex::Complex64::new(re, im))
        })
        .collect();
    Ok(DiscreteKernel::from_values(side.support_min, values, side.meta))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
