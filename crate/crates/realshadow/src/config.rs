//! Run configuration (every command-line flag, also loadable from JSON) and
//! the manifest written next to a run's outputs.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// All flags. Each command reads the ones it needs; unset values fall back
/// to command defaults. A JSON config file uses the same names in
/// kebab-case, and flags given on the command line take precedence.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    /// Polynomial: JSON `[[re,im],...]` ascending, or a form like "z^2 - 2".
    #[arg(short = 'p', long = "poly", global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,

    /// Sample size (points, or base points for estimate-n).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,

    /// Backward steps per sample point.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Shadow length N, mirror depth, or the depth cap of estimate-n.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Iteration budget, or the largest Bowen-ball order for entropy.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,

    /// Comma-separated, strictly decreasing scales for entropy.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,

    /// Output directory; files plus `config.json` and `manifest.json`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// x0,x1,y0,y1,W,H.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub viewport: Option<String>,

    /// Point re,im.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,

    /// End point re,im of a mirror sweep starting at --z.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,

    /// Number of base points on a mirror sweep.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    /// Ray angle in [0, 1).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,

    /// Ray start potential.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_from: Option<f64>,

    /// Ray end potential.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_to: Option<f64>,

    /// Ray points.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,

    /// Orbit escape radius.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,

    /// Bowen-ball centres for metric entropy.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bases: Option<usize>,

    /// Render field: green, escape or mirrors.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,

    /// Green value mapped to white.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_max: Option<f64>,

    /// Metric entropy of the shadow measure (default).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "is_false")]
    pub metric: bool,

    /// Topological entropy of the shadow shift.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "is_false")]
    pub top: bool,

    /// Metric entropy of the Brolin measure on the plane.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "is_false")]
    pub plane: bool,

    /// JSON config file.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($opt:ident),*; $($flag:ident),*) => {
        RunConfig {
            $($opt: $top.$opt.or($base.$opt),)*
            $($flag: $top.$flag || $base.$flag,)*
            config: $top.config,
        }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        // A stored `config.json` also names its command; that key is ignored here.
        let mut value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(map) = value.as_object_mut() {
            map.remove("command");
        }
        Ok(serde_json::from_value(value)?)
    }

    /// `self` with unset values taken from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(self, base;
            poly, count, burn_in, seed, depth, tol, n_max, eps, out, viewport, z, to, samples,
            theta, g_from, g_to, steps, radius, bases, field, g_max;
            metric, top, plane)
    }
}

/// The stored form of a run: the command and its resolved flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredConfig {
    pub command: String,
    #[serde(flatten)]
    pub flags: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    /// SHA-256 of `config.json`.
    pub config_digest: String,
    pub inputs: Vec<String>,
    /// Every file written to the output directory except the manifest itself.
    pub files: Vec<FileEntry>,
    pub wall_time_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
