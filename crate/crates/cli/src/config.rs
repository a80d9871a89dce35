//! Run configuration: a JSON file merged under command-line flags.

use std::path::Path;

use clap::Args;
use serde::Deserialize;
use wgquant_core::geometry::{Family, Geometry, GuideKind, Mode, ModeId};
use wgquant_core::verify::Tolerances;
use wgquant_core::{Quadratures, ReferenceFrame};

use crate::CliError;

/// Every setting any subcommand reads. Absent keys fall back to defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Option<String>,
    pub w: Option<f64>,
    pub d: Option<f64>,
    pub length: Option<f64>,
    pub family: Option<String>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub l: Option<i64>,
    pub frame: Option<String>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub theta0: Option<f64>,
    pub t: Option<f64>,
    pub e_m: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub nz: Option<usize>,
    pub fmax: Option<f64>,
    pub l_min: Option<i64>,
    pub l_max: Option<i64>,
    pub format: Option<String>,
    pub with_potentials: Option<bool>,
    pub tolerances: Option<Tolerances>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Applies `Some` flag values over the configuration.
macro_rules! overlay {
    ($cfg:expr, $args:expr, [$($field:ident),*]) => {
        $( if $args.$field.is_some() { $cfg.$field = $args.$field.clone(); } )*
    };
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    /// Guide kind: `plates` or `rect`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Width along x [m].
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    /// Height along y [m].
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Length along z [m].
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
}

impl GeometryArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        overlay!(cfg, self, [kind, w, d, length]);
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModeArgs {
    /// TEM, TM, TE (plates) or TMrect, TErect (rectangular).
    #[arg(long)]
    pub family: Option<String>,
    /// Index along y.
    #[arg(long)]
    pub n: Option<u32>,
    /// Index along x.
    #[arg(long)]
    pub m: Option<u32>,
    /// Longitudinal index, beta = 2 pi l / L.
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i64>,
    /// Electrode pair the amplitude refers to: `top-bottom` or `left-right`.
    #[arg(long)]
    pub frame: Option<String>,
}

impl ModeArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        overlay!(cfg, self, [family, n, m, l, frame]);
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExcitationArgs {
    /// In-phase quadrature X (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Out-of-phase quadrature Y (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Phase offset [rad].
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Time [s].
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
}

impl ExcitationArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        overlay!(cfg, self, [x, y, theta0, t]);
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn geometry(&self) -> Result<Geometry, CliError> {
        let kind = match self.kind.as_deref().unwrap_or("rect") {
            "rect" | "rectangular" => GuideKind::Rectangular,
            "plates" | "parallel-plates" => GuideKind::ParallelPlates,
            other => return Err(CliError::Config(format!("unknown guide kind '{other}'"))),
        };
        let d = positive("d", self.d.unwrap_or(0.01))?;
        let w = match (self.w, kind) {
            (Some(w), _) => positive("w", w)?,
            (None, GuideKind::Rectangular) => 2.0 * d,
            (None, GuideKind::ParallelPlates) => 20.0 * d,
        };
        let length = positive("length", self.length.unwrap_or(10.0 * d))?;
        Ok(Geometry::new(kind, w, d, length)?)
    }

    pub fn family(&self, g: &Geometry) -> Result<Family, CliError> {
        let n = self.n;
        let m = self.m;
        let need = |v: Option<u32>, what: &str| {
            v.ok_or_else(|| CliError::Config(format!("--{what} is required for this family")))
        };
        let default = match g.kind {
            GuideKind::ParallelPlates => "TEM",
            GuideKind::Rectangular => "TErect",
        };
        let fam = match self.family.as_deref().unwrap_or(default) {
            "TEM" | "tem" => Family::Tem,
            "TM" | "tm" => Family::TmPlates { n: need(n, "n")? },
            "TE" | "te" => Family::TePlates { n: need(n, "n")? },
            "TMrect" | "tmrect" => Family::TmRect {
                n: need(n, "n")?,
                m: need(m, "m")?,
            },
            // the fundamental TE(0,1) when no index is given
            "TErect" | "terect" => Family::TeRect {
                n: n.unwrap_or(0),
                m: m.unwrap_or(if n.unwrap_or(0) == 0 { 1 } else { 0 }),
            },
            other => return Err(CliError::Config(format!("unknown family '{other}'"))),
        };
        fam.validate(g.kind)?;
        Ok(fam)
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        let g = self.geometry()?;
        let fam = self.family(&g)?;
        let l = self.l.unwrap_or(1);
        Ok(Mode::new(g, ModeId::new(fam, l))?)
    }

    pub fn frame(&self, mode: &Mode) -> Result<ReferenceFrame, CliError> {
        let frame = match self.frame.as_deref() {
            None => wgquant_core::fields::canonical_frame(mode.class),
            Some("top-bottom" | "tb") => ReferenceFrame::TopBottom,
            Some("left-right" | "lr") => ReferenceFrame::LeftRight,
            Some(other) => return Err(CliError::Config(format!("unknown frame '{other}'"))),
        };
        wgquant_core::fields::check_frame(mode, frame)?;
        Ok(frame)
    }

    pub fn quadratures(&self) -> Quadratures {
        Quadratures::new(self.x.unwrap_or(1.0), self.y.unwrap_or(0.0))
            .with_theta0(self.theta0.unwrap_or(0.0))
    }

    pub fn time(&self) -> f64 {
        self.t.unwrap_or(0.0)
    }

    pub fn json(&self) -> Result<bool, CliError> {
        match self.format.as_deref().unwrap_or("text") {
            "text" | "csv" => Ok(false),
            "json" => Ok(true),
            other => Err(CliError::Config(format!("unknown format '{other}'"))),
        }
    }
}
