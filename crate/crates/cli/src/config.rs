use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nccs::beamsplitter::{BeamSplitter, Family};
use nccs::states::{Parity, Truncation};
use nccs::{Deformation, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeformationKind {
    Harmonic,
    Nc,
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Vacuum,
    Fock,
    Glauber,
    Nlcs,
    QCoherent,
    Cat,
    Pacs,
    NcSqueezed,
    HoSqueezed,
    Gk,
}

impl FamilyKind {
    fn implied(&self) -> Option<DeformationKind> {
        use FamilyKind::*;
        match self {
            Vacuum | Fock => None,
            Glauber | HoSqueezed => Some(DeformationKind::Harmonic),
            Nlcs | NcSqueezed | Gk => Some(DeformationKind::Nc),
            QCoherent | Cat | Pacs => Some(DeformationKind::Q),
        }
    }

    pub fn scan_family(&self) -> Option<Family> {
        match self {
            FamilyKind::Nlcs => Some(Family::Nlcs),
            FamilyKind::NcSqueezed => Some(Family::NcSqueezed),
            FamilyKind::HoSqueezed => Some(Family::HoSqueezed),
            FamilyKind::Glauber => Some(Family::Glauber),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityKind {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Flags shared by every subcommand. Each may also come from `--config`;
/// a flag given on the command line wins over the file.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub deformation: Option<DeformationKind>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long = "alpha-re")]
    pub alpha_re: Option<f64>,
    #[arg(long = "alpha-im")]
    pub alpha_im: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Photons added (pacs).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub parity: Option<ParityKind>,
    /// Number state index for `--family fock`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Largest tolerated probability beyond nmax.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Oscillator mass for the uncertainty product.
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long = "t-start")]
    pub t_start: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long = "t-steps")]
    pub t_steps: Option<usize>,
    /// Explicit n̄ for the classical period instead of the GK mean.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// "start:end:count" or a comma list.
    #[arg(long = "alpha-grid")]
    pub alpha_grid: Option<String>,
    #[arg(long = "tau-grid")]
    pub tau_grid: Option<String>,
    /// Highest moment order checked.
    #[arg(long)]
    pub moments: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// JSON file with any of the above keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunConfig {
    /// Overlay the flags on the `--config` file, if any.
    pub fn merged(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut base: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        let flags = serde_json::to_value(&self).map_err(|e| CliError::validation(e.to_string()))?;
        if let serde_json::Value::Object(map) = flags {
            for (k, v) in map {
                if !v.is_null() {
                    base.insert(k, v);
                }
            }
        }
        let mut cfg: RunConfig = serde_json::from_value(serde_json::Value::Object(base))
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        cfg.config = Some(path);
        Ok(cfg)
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_re.unwrap_or(0.0), self.alpha_im.unwrap_or(0.0))
    }

    pub fn zeta(&self) -> C64 {
        C64::new(self.zeta.unwrap_or(0.0), 0.0)
    }

    pub fn parity(&self) -> Parity {
        match self.parity.unwrap_or(ParityKind::Even) {
            ParityKind::Even => Parity::Even,
            ParityKind::Odd => Parity::Odd,
        }
    }

    pub fn truncation(&self) -> Result<Truncation, CliError> {
        let mut t = match self.nmax {
            Some(0) => return Err(CliError::validation("--nmax must be at least 1")),
            Some(n) => Truncation::fixed(n),
            None => Truncation::default(),
        };
        if let Some(th) = self.threshold {
            if !(th >= 0.0) {
                return Err(CliError::validation("--threshold must be >= 0"));
            }
            t.threshold = th;
        }
        Ok(t)
    }

    pub fn beam_splitter(&self) -> Result<BeamSplitter, CliError> {
        let d = BeamSplitter::default();
        Ok(BeamSplitter::new(
            self.theta.unwrap_or(d.theta),
            self.phi.unwrap_or(d.phi),
        )?)
    }

    pub fn omega(&self) -> f64 {
        self.omega.unwrap_or(0.5)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar.unwrap_or(1.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass.unwrap_or(1.0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.format.as_ref().is_none_or(|v| v.contains(&f))
    }

    pub fn require_tau(&self) -> Result<f64, CliError> {
        if self.q.is_some() {
            return Err(CliError::validation("--q does not apply to the NC deformation"));
        }
        self.tau.ok_or_else(|| CliError::validation("--tau is required"))
    }

    /// Deformation implied by the family, checked against the explicit flags.
    pub fn deformation(&self) -> Result<Deformation, CliError> {
        let implied = self.family.and_then(|f| f.implied());
        let kind = match (implied, self.deformation) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::validation(format!(
                    "family {:?} needs deformation {a:?}, got {b:?}",
                    self.family.unwrap()
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => DeformationKind::Harmonic,
        };
        match kind {
            DeformationKind::Harmonic => {
                if self.tau.is_some() || self.q.is_some() {
                    return Err(CliError::validation("--tau/--q given for a harmonic state"));
                }
                Ok(Deformation::Harmonic)
            }
            DeformationKind::Nc => Ok(Deformation::nc(self.require_tau()?)?),
            DeformationKind::Q => {
                if self.tau.is_some() {
                    return Err(CliError::validation("--tau does not apply to the q deformation"));
                }
                let q = self.q.ok_or_else(|| CliError::validation("--q is required"))?;
                Ok(Deformation::q_deformed(q)?)
            }
        }
    }
}

/// "start:end:count" (inclusive linspace) or "a,b,c".
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::validation(format!("grid {spec:?}: {what}"));
    let s = spec.trim();
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:count"));
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad("bad end"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    } else if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("empty grid"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(grid)
}
