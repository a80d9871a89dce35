//! Guide geometries, mode identities, cutoffs and dispersion.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::constants::C;
use crate::error::{Result, WaveguideError};

/// Default threshold for the `w >> d` assumption of the parallel-plate model.
pub const DEFAULT_WIDE_FACTOR: f64 = 10.0;

/// Default cap on the transverse indices visited by [`enumerate_modes`].
pub const DEFAULT_INDEX_CAP: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GuideKind {
    ParallelPlates,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    pub kind: GuideKind,
    /// Width along x.
    pub w: f64,
    /// Height along y (plate separation).
    pub d: f64,
    /// Length along z; periodic boundary conditions quantize beta.
    pub length: f64,
    pub wide_factor: f64,
}

impl Geometry {
    pub fn new(kind: GuideKind, w: f64, d: f64, length: f64) -> Result<Self> {
        let g = Self {
            kind,
            w,
            d,
            length,
            wide_factor: DEFAULT_WIDE_FACTOR,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn plates(w: f64, d: f64, length: f64) -> Result<Self> {
        Self::new(GuideKind::ParallelPlates, w, d, length)
    }

    pub fn rectangular(w: f64, d: f64, length: f64) -> Result<Self> {
        Self::new(GuideKind::Rectangular, w, d, length)
    }

    pub fn with_wide_factor(mut self, factor: f64) -> Self {
        self.wide_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w", self.w), ("d", self.d), ("L", self.length)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(WaveguideError::InvalidGeometry(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Whether the plates are wide enough for edge effects to be negligible.
    pub fn is_wide(&self) -> bool {
        self.w >= self.wide_factor * self.d
    }

    pub fn volume(&self) -> f64 {
        self.w * self.d * self.length
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let tol = 1e-12;
        x.abs() <= self.w / 2.0 * (1.0 + tol) && y.abs() <= self.d / 2.0 * (1.0 + tol)
    }

    pub fn check_point(&self, x: f64, y: f64) -> Result<()> {
        if self.contains(x, y) {
            Ok(())
        } else {
            Err(WaveguideError::OutOfCrossSection { x, y })
        }
    }

    fn warn_if_narrow(&self) {
        if self.kind == GuideKind::ParallelPlates && !self.is_wide() {
            log::warn!(
                "parallel plates with w = {} m and d = {} m are not wide (w < {} d); edge effects are ignored",
                self.w,
                self.d,
                self.wide_factor
            );
        }
    }
}

/// Wave family with its transverse indices. `n` counts half-oscillations
/// along y (height d) and `m` along x (width w).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Tem,
    TmPlates { n: u32 },
    TePlates { n: u32 },
    TmRect { n: u32, m: u32 },
    TeRect { n: u32, m: u32 },
}

impl Family {
    /// Sort key used to break cutoff ties.
    pub fn tag(&self) -> u8 {
        match self {
            Family::Tem => 0,
            Family::TmPlates { .. } => 1,
            Family::TePlates { .. } => 2,
            Family::TmRect { .. } => 3,
            Family::TeRect { .. } => 4,
        }
    }

    pub fn n(&self) -> u32 {
        match *self {
            Family::Tem => 0,
            Family::TmPlates { n } | Family::TePlates { n } => n,
            Family::TmRect { n, .. } | Family::TeRect { n, .. } => n,
        }
    }

    pub fn m(&self) -> u32 {
        match *self {
            Family::TmRect { m, .. } | Family::TeRect { m, .. } => m,
            _ => 0,
        }
    }

    pub fn is_te(&self) -> bool {
        matches!(self, Family::TePlates { .. } | Family::TeRect { .. })
    }

    pub fn is_tm(&self) -> bool {
        matches!(self, Family::TmPlates { .. } | Family::TmRect { .. })
    }

    pub fn validate(&self, kind: GuideKind) -> Result<()> {
        let bad = |msg: String| Err(WaveguideError::InvalidMode(msg));
        match (*self, kind) {
            (Family::Tem, GuideKind::ParallelPlates) => Ok(()),
            (Family::TmPlates { n } | Family::TePlates { n }, GuideKind::ParallelPlates) => {
                if n >= 1 {
                    Ok(())
                } else {
                    bad(format!("{self} requires n >= 1"))
                }
            }
            (Family::TmRect { n, m }, GuideKind::Rectangular) => {
                if n >= 1 && m >= 1 {
                    Ok(())
                } else {
                    bad(format!("{self} requires n >= 1 and m >= 1"))
                }
            }
            (Family::TeRect { n, m }, GuideKind::Rectangular) => {
                if n > 0 || m > 0 {
                    Ok(())
                } else {
                    bad("TErect(0,0) does not exist".into())
                }
            }
            (f, k) => bad(format!("{f} is not a mode of a {k:?} guide")),
        }
    }

    /// Cutoff wavenumber components `(k_cx, k_cy)`.
    pub fn cutoff_components(&self, g: &Geometry) -> (f64, f64) {
        let ky = PI * self.n() as f64 / g.d;
        match self {
            Family::Tem => (0.0, 0.0),
            Family::TmPlates { .. } | Family::TePlates { .. } => (0.0, ky),
            Family::TmRect { m, .. } | Family::TeRect { m, .. } => (PI * *m as f64 / g.w, ky),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Tem => write!(f, "TEM"),
            Family::TmPlates { n } => write!(f, "TM({n})"),
            Family::TePlates { n } => write!(f, "TE({n})"),
            Family::TmRect { n, m } => write!(f, "TMrect({n},{m})"),
            Family::TeRect { n, m } => write!(f, "TErect({n},{m})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModeId {
    pub family: Family,
    pub l: i64,
}

impl ModeId {
    pub fn new(family: Family, l: i64) -> Self {
        Self { family, l }
    }

    pub fn validate(&self, g: &Geometry) -> Result<()> {
        self.family.validate(g.kind)?;
        if self.l == 0 {
            return Err(WaveguideError::InvalidMode(
                "l = 0 is not a propagating solution".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} l={}", self.family, self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub beta: f64,
    pub k: f64,
    pub omega: f64,
    pub k_c: f64,
    pub v_phi: f64,
}

impl DispersionPoint {
    pub fn from_beta(beta: f64, k_c: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(WaveguideError::DegenerateWavevector);
        }
        let k = (beta * beta + k_c * k_c).sqrt();
        Ok(Self {
            beta,
            k,
            omega: C * k,
            k_c,
            v_phi: C * k / beta.abs(),
        })
    }

    pub fn omega_c(&self) -> f64 {
        C * self.k_c
    }
}

/// Which set of field tables governs a mode. The two degenerate rectangular
/// TE branches are folded onto the plate TE tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModeClass {
    Tem,
    TmPlates,
    /// TE of plates, and TErect(n,0).
    TePlates,
    /// TErect(0,m): plate TE turned by a quarter turn.
    TeRotated,
    TmRect,
    TeRect,
}

impl ModeClass {
    pub fn of(family: Family) -> Self {
        match family {
            Family::Tem => ModeClass::Tem,
            Family::TmPlates { .. } => ModeClass::TmPlates,
            Family::TePlates { .. } | Family::TeRect { m: 0, .. } => ModeClass::TePlates,
            Family::TeRect { n: 0, .. } => ModeClass::TeRotated,
            Family::TmRect { .. } => ModeClass::TmRect,
            Family::TeRect { .. } => ModeClass::TeRect,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModeClass::Tem => "TEM",
            ModeClass::TmPlates => "TM plates",
            ModeClass::TePlates => "TE plates",
            ModeClass::TeRotated => "TE rotated",
            ModeClass::TmRect => "TM rectangular",
            ModeClass::TeRect => "TE rectangular",
        }
    }

    pub const ALL: [ModeClass; 6] = [
        ModeClass::Tem,
        ModeClass::TmPlates,
        ModeClass::TePlates,
        ModeClass::TeRotated,
        ModeClass::TmRect,
        ModeClass::TeRect,
    ];
}

/// A fully resolved mode: geometry, family, longitudinal wavevector and the
/// derived dispersion point. This is the handle every other module takes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub geometry: Geometry,
    pub family: Family,
    /// Longitudinal index; `None` for a mode built from a continuous beta.
    pub l: Option<i64>,
    pub class: ModeClass,
    pub kx: f64,
    pub ky: f64,
    pub disp: DispersionPoint,
}

impl Mode {
    pub fn new(geometry: Geometry, id: ModeId) -> Result<Self> {
        geometry.validate()?;
        id.validate(&geometry)?;
        let beta = 2.0 * PI * id.l as f64 / geometry.length;
        let mut mode = Self::build(geometry, id.family, beta)?;
        mode.l = Some(id.l);
        Ok(mode)
    }

    /// Mode with an arbitrary real longitudinal wavevector.
    pub fn with_beta(geometry: Geometry, family: Family, beta: f64) -> Result<Self> {
        geometry.validate()?;
        family.validate(geometry.kind)?;
        Self::build(geometry, family, beta)
    }

    fn build(geometry: Geometry, family: Family, beta: f64) -> Result<Self> {
        geometry.warn_if_narrow();
        let (kx, ky) = family.cutoff_components(&geometry);
        let k_c = (kx * kx + ky * ky).sqrt();
        let disp = DispersionPoint::from_beta(beta, k_c)?;
        Ok(Self {
            geometry,
            family,
            l: None,
            class: ModeClass::of(family),
            kx,
            ky,
            disp,
        })
    }

    pub fn id(&self) -> Option<ModeId> {
        self.l.map(|l| ModeId::new(self.family, l))
    }

    /// Same family and geometry at another longitudinal wavevector.
    pub fn at_beta(&self, beta: f64) -> Result<Self> {
        Self::with_beta(self.geometry, self.family, beta)
    }

    pub fn beta(&self) -> f64 {
        self.disp.beta
    }
    pub fn k(&self) -> f64 {
        self.disp.k
    }
    pub fn omega(&self) -> f64 {
        self.disp.omega
    }
    pub fn k_c(&self) -> f64 {
        self.disp.k_c
    }
    pub fn n(&self) -> u32 {
        self.family.n()
    }
    pub fn m(&self) -> u32 {
        self.family.m()
    }
    pub fn w(&self) -> f64 {
        self.geometry.w
    }
    pub fn d(&self) -> f64 {
        self.geometry.d
    }
    pub fn length(&self) -> f64 {
        self.geometry.length
    }

    /// (-1)^n
    pub fn parity_n(&self) -> f64 {
        if self.n().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// (-1)^m
    pub fn parity_m(&self) -> f64 {
        if self.m().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn label(&self) -> String {
        match self.l {
            Some(l) => format!("{} l={l}", self.family),
            None => format!("{} beta={}", self.family, self.beta()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn cutoff_wavenumber(g: &Geometry, family: Family) -> Result<f64> {
    g.validate()?;
    family.validate(g.kind)?;
    let (kx, ky) = family.cutoff_components(g);
    Ok((kx * kx + ky * ky).sqrt())
}

pub fn dispersion(g: &Geometry, id: ModeId) -> Result<DispersionPoint> {
    Ok(Mode::new(*g, id)?.disp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub family: Family,
    pub k_c: f64,
    pub omega_c: f64,
}

pub fn enumerate_modes(g: &Geometry, omega_max: f64) -> Vec<CatalogEntry> {
    enumerate_modes_capped(g, omega_max, DEFAULT_INDEX_CAP)
}

/// Every family whose cutoff does not exceed `omega_max`, transverse indices
/// up to `cap`, sorted by cutoff then by (family tag, n, m).
pub fn enumerate_modes_capped(g: &Geometry, omega_max: f64, cap: u32) -> Vec<CatalogEntry> {
    g.warn_if_narrow();
    let mut families = Vec::new();
    match g.kind {
        GuideKind::ParallelPlates => {
            families.push(Family::Tem);
            for n in 1..=cap {
                families.push(Family::TmPlates { n });
                families.push(Family::TePlates { n });
            }
        }
        GuideKind::Rectangular => {
            for n in 0..=cap {
                for m in 0..=cap {
                    if n >= 1 && m >= 1 {
                        families.push(Family::TmRect { n, m });
                    }
                    if n + m > 0 {
                        families.push(Family::TeRect { n, m });
                    }
                }
            }
        }
    }
    let mut out: Vec<CatalogEntry> = families
        .into_iter()
        .filter_map(|family| {
            let (kx, ky) = family.cutoff_components(g);
            let k_c = (kx * kx + ky * ky).sqrt();
            let omega_c = C * k_c;
            (omega_c <= omega_max).then_some(CatalogEntry {
                family,
                k_c,
                omega_c,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        a.omega_c
            .partial_cmp(&b.omega_c)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                (a.family.tag(), a.family.n(), a.family.m()).cmp(&(
                    b.family.tag(),
                    b.family.n(),
                    b.family.m(),
                ))
            })
    });
    out
}
