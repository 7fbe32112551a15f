//! Experiment configuration: TOML file + flag overrides, grid specs, and the
//! canonical config hash recorded in every output manifest.
//!
//! Grammar (TOML keys, all optional, flags win over file values):
//!
//! ```toml
//! n = 2000                 # vertex count
//! d = 3                    # degree
//! seeds = [1, 2, 3]        # master seeds
//! z_re = "0"               # grid spec: "a" or "a:b:count"
//! z_im = "0.1:4:40"
//! w = ["1+0i", "0"]        # complex list, RE+IMi form
//! ell = 2                  # switching radius
//! r_chi = 1                # validity radius
//! trials = 500             # Monte Carlo trials
//! depth = 4                # tree depth K
//! bump_radius = 2.0784     # Girko test-function radius
//! h = 0.2                  # Girko grid spacing
//! out_dir = "out"
//! svg = false
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Parse a complex number written as `a`, `bi`, or `a+bi` / `a-bi`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s = text.trim().replace(' ', "");
    if s.is_empty() {
        bail!("empty complex literal");
    }
    if let Ok(re) = s.parse::<f64>() {
        return Ok(C64::new(re, 0.0));
    }
    let body = s.strip_suffix(['i', 'j']).context("complex literal must end in i")?;
    // split at the sign of the imaginary part (not the leading sign, not an
    // exponent sign)
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().context("bad real part")?;
            let im_str = &body[k..];
            let im: f64 = if im_str == "+" {
                1.0
            } else if im_str == "-" {
                -1.0
            } else {
                im_str.parse().context("bad imaginary part")?
            };
            Ok(C64::new(re, im))
        }
        None => {
            let im: f64 = if body.is_empty() { 1.0 } else { body.parse().context("bad imaginary part")? };
            Ok(C64::new(0.0, im))
        }
    }
}

/// A 1D grid spec: either a single value `a` or `a:b:count` (inclusive).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![one.parse().context("bad grid value")?]),
        [a, b, count] => {
            let a: f64 = a.parse().context("bad grid start")?;
            let b: f64 = b.parse().context("bad grid stop")?;
            let count: usize = count.parse().context("bad grid count")?;
            if count == 0 {
                bail!("grid count must be positive");
            }
            if count == 1 {
                return Ok(vec![a]);
            }
            Ok((0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect())
        }
        _ => bail!("grid spec must be 'a' or 'a:b:count'"),
    }
}

/// Resolved experiment configuration (file values overridden by flags).
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub z_re: Option<String>,
    pub z_im: Option<String>,
    pub w: Option<Vec<String>>,
    pub ell: Option<usize>,
    pub r_chi: Option<usize>,
    pub trials: Option<usize>,
    pub depth: Option<usize>,
    pub bump_radius: Option<f64>,
    pub bump_center: Option<String>,
    pub h: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_retries: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub svg: Option<bool>,
    pub edge_list: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Overlay `other` (flag values) on top of `self` (file values).
    pub fn overlay(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() { self.$f = other.$f; }
            )*};
        }
        take!(n, d, seeds, z_re, z_im, w, ell, r_chi, trials, depth, bump_radius, bump_center, h,
              tolerance, max_retries, out_dir, svg, edge_list);
        self
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(200)
    }

    pub fn d(&self) -> usize {
        self.d.unwrap_or(3)
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| vec![1])
    }

    pub fn z_grid(&self) -> Result<Vec<C64>> {
        let re = parse_grid(self.z_re.as_deref().unwrap_or("0"))?;
        let im = parse_grid(self.z_im.as_deref().unwrap_or("0.3"))?;
        let mut out = Vec::with_capacity(re.len() * im.len());
        for &x in &re {
            for &y in &im {
                if y <= 0.0 {
                    bail!("resolvent grids need Im(z) > 0 (got {y})");
                }
                out.push(C64::new(x, y));
            }
        }
        if out.is_empty() {
            bail!("empty z grid");
        }
        Ok(out)
    }

    pub fn w_list(&self) -> Result<Vec<C64>> {
        let raw = self.w.clone().unwrap_or_else(|| vec!["1+0i".to_string()]);
        let mut out = Vec::with_capacity(raw.len());
        for s in raw {
            out.push(parse_complex(&s)?);
        }
        if out.is_empty() {
            bail!("empty w list");
        }
        Ok(out)
    }

    pub fn out_dir(&self) -> PathBuf {
        if let Some(dir) = &self.out_dir {
            return dir.clone();
        }
        if let Ok(env) = std::env::var("OKMLAB_OUT_DIR") {
            return PathBuf::from(env);
        }
        PathBuf::from("out")
    }

    /// Canonical hash over the full resolved configuration.
    pub fn hash(&self, command: &str) -> String {
        use sha2::{Digest, Sha256};
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(b"\0");
        hasher.update(canon.as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Run manifest written next to every output file set.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config_hash: String,
    pub config: &'a ExperimentConfig,
    pub version: &'a str,
    /// seconds since the epoch; excluded from determinism guarantees
    pub timestamp: u64,
}

pub fn write_manifest(dir: &Path, command: &str, config: &ExperimentConfig) -> Result<()> {
    let manifest = Manifest {
        command,
        config_hash: config.hash(command),
        config,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
