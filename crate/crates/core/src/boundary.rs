//! Surface charges and currents on the guide walls, and the generalized
//! flux carried by each electrode pair.
//!
//! Electrodes sit at `y = +d/2` (top), `y = -d/2` (bottom), `x = +w/2`
//! (left) and `x = -w/2` (right); normals point into the guide. A position
//! on an electrode is `(u, z)` where `u` is the transverse in-plane
//! coordinate: `x` on top/bottom, `y` on left/right.

use serde::Serialize;

use crate::constants::{C, EPSILON_0, MU_0};
use crate::error::{Result, WaveguideError};
use crate::fields::{self, Excitation, Quadratures, ReferenceFrame};
use crate::geometry::{GuideKind, Mode, ModeClass};
use crate::numerics::{self, Residual, Stencil, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ElectrodeId {
    Top,
    Bottom,
    Left,
    Right,
}

impl ElectrodeId {
    pub const ALL: [ElectrodeId; 4] = [
        ElectrodeId::Top,
        ElectrodeId::Bottom,
        ElectrodeId::Left,
        ElectrodeId::Right,
    ];

    pub fn pair(&self) -> ReferenceFrame {
        match self {
            ElectrodeId::Top | ElectrodeId::Bottom => ReferenceFrame::TopBottom,
            ElectrodeId::Left | ElectrodeId::Right => ReferenceFrame::LeftRight,
        }
    }

    pub fn normal(&self) -> Vec3 {
        match self {
            ElectrodeId::Top => [0.0, -1.0, 0.0],
            ElectrodeId::Bottom => [0.0, 1.0, 0.0],
            ElectrodeId::Left => [-1.0, 0.0, 0.0],
            ElectrodeId::Right => [1.0, 0.0, 0.0],
        }
    }

    pub fn facing(&self) -> ElectrodeId {
        match self {
            ElectrodeId::Top => ElectrodeId::Bottom,
            ElectrodeId::Bottom => ElectrodeId::Top,
            ElectrodeId::Left => ElectrodeId::Right,
            ElectrodeId::Right => ElectrodeId::Left,
        }
    }

    /// Index of the in-plane transverse coordinate `u`.
    fn u_axis(&self) -> usize {
        match self.pair() {
            ReferenceFrame::TopBottom => 0,
            ReferenceFrame::LeftRight => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Reality {
    Real,
    Virtual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Electrode {
    pub id: ElectrodeId,
    pub reality: Reality,
    pub normal: Vec3,
}

/// The electrode `id` of a mode, or `UndefinedElectrode` where the fields
/// do not satisfy metallic boundary conditions on that plane.
pub fn electrode(mode: &Mode, id: ElectrodeId) -> Result<Electrode> {
    let lateral = id.pair() == ReferenceFrame::LeftRight;
    let reality = match (mode.class, lateral) {
        (ModeClass::Tem | ModeClass::TmPlates, true) => {
            return Err(WaveguideError::UndefinedElectrode {
                electrode: id,
                mode: mode.label(),
            })
        }
        (_, true) if mode.geometry.kind == GuideKind::ParallelPlates => Reality::Virtual,
        _ => Reality::Real,
    };
    Ok(Electrode {
        id,
        reality,
        normal: id.normal(),
    })
}

/// Point in space of the electrode coordinate `(u, z)`.
pub fn electrode_point(mode: &Mode, id: ElectrodeId, u: f64, z: f64) -> Vec3 {
    let (w, d) = (mode.w(), mode.d());
    match id {
        ElectrodeId::Top => [u, d / 2.0, z],
        ElectrodeId::Bottom => [u, -d / 2.0, z],
        ElectrodeId::Left => [w / 2.0, u, z],
        ElectrodeId::Right => [-w / 2.0, u, z],
    }
}

fn half_span(mode: &Mode, id: ElectrodeId) -> f64 {
    match id.pair() {
        ReferenceFrame::TopBottom => mode.w() / 2.0,
        ReferenceFrame::LeftRight => mode.d() / 2.0,
    }
}

/// Charge density and in-plane current `[j_u, j_z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SurfaceDensity {
    pub sigma: f64,
    pub j: [f64; 2],
}

impl SurfaceDensity {
    pub fn scaled(self, s: f64) -> Self {
        Self {
            sigma: self.sigma * s,
            j: [self.j[0] * s, self.j[1] * s],
        }
    }
}

/// Densities from the boundary jump conditions `sigma = eps0 n.E` and
/// `j = n x B / mu0`.
pub fn surface_density_from_fields(
    mode: &Mode,
    id: ElectrodeId,
    exc: &Excitation,
    u: f64,
    z: f64,
    t: f64,
) -> Result<SurfaceDensity> {
    let el = electrode(mode, id)?;
    fields::check_frame(mode, exc.frame)?;
    Ok(density_from_fields_unchecked(mode, &el, exc, u, z, t))
}

fn density_from_fields_unchecked(
    mode: &Mode,
    el: &Electrode,
    exc: &Excitation,
    u: f64,
    z: f64,
    t: f64,
) -> SurfaceDensity {
    let p = electrode_point(mode, el.id, u, z);
    let s = fields::fields_unchecked(mode, exc, p, t);
    let j = numerics::scale(numerics::cross(el.normal, s.b), 1.0 / MU_0);
    SurfaceDensity {
        sigma: EPSILON_0 * numerics::dot(el.normal, s.e),
        j: [j[el.id.u_axis()], j[2]],
    }
}

/// Transverse profile of a flux: `1` or `sin(k_g (u + half))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxProfile {
    pub k_g: f64,
    pub half: f64,
}

impl FluxProfile {
    pub fn value(&self, u: f64) -> f64 {
        if self.k_g == 0.0 {
            1.0
        } else {
            (self.k_g * (u + self.half)).sin()
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        if self.k_g == 0.0 {
            0.0
        } else {
            self.k_g * (self.k_g * (u + self.half)).cos()
        }
    }
}

/// Generalized flux `phi(u, z, t) = phi_m g_phi(u) f~(z, t)` on a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxField {
    pub pair: ReferenceFrame,
    pub phi_m: f64,
    pub h_eff: f64,
    pub profile: FluxProfile,
    /// Whether this pair is only a secondary description of the mode (the
    /// real plates of a plate TE wave, the side walls of TErect(0,m)).
    pub auxiliary: bool,
    pub quad: Quadratures,
    pub beta: f64,
    pub omega: f64,
}

impl FluxField {
    pub fn value(&self, u: f64, z: f64, t: f64) -> f64 {
        self.phi_m * self.profile.value(u) * self.quad.f_tilde(self.beta, self.omega, z, t)
    }

    pub fn d_dt(&self, u: f64, z: f64, t: f64) -> f64 {
        self.phi_m * self.profile.value(u) * self.omega * self.quad.f(self.beta, self.omega, z, t)
    }

    pub fn d_dz(&self, u: f64, z: f64, t: f64) -> f64 {
        -self.phi_m * self.profile.value(u) * self.beta * self.quad.f(self.beta, self.omega, z, t)
    }

    pub fn d_du(&self, u: f64, z: f64, t: f64) -> f64 {
        self.phi_m * self.profile.derivative(u) * self.quad.f_tilde(self.beta, self.omega, z, t)
    }

    /// Capacitance per unit area `eps0 / h_eff`.
    pub fn c_d(&self) -> f64 {
        EPSILON_0 / self.h_eff
    }

    /// Inverse inductance per unit area `1 / (mu0 h_eff)`.
    pub fn l_d_inv(&self) -> f64 {
        1.0 / (MU_0 * self.h_eff)
    }
}

/// `(h_eff, profile wavenumber, auxiliary)` of the flux on a pair.
pub(crate) fn flux_layout(mode: &Mode, pair: ReferenceFrame) -> Result<(f64, f64, bool)> {
    use ReferenceFrame::*;
    let (w, d) = (mode.w(), mode.d());
    let undefined = |id| WaveguideError::UndefinedElectrode {
        electrode: id,
        mode: mode.label(),
    };
    Ok(match (mode.class, pair) {
        (ModeClass::Tem, TopBottom) => (d, 0.0, false),
        (ModeClass::TmPlates, TopBottom) => (d / 2.0, 0.0, false),
        (ModeClass::Tem | ModeClass::TmPlates, LeftRight) => {
            return Err(undefined(ElectrodeId::Left))
        }
        (ModeClass::TePlates, LeftRight) => (w, mode.ky, false),
        (ModeClass::TePlates, TopBottom) => (d, 0.0, true),
        (ModeClass::TeRotated, TopBottom) => (d, mode.kx, false),
        (ModeClass::TeRotated, LeftRight) => (w, 0.0, true),
        (ModeClass::TmRect | ModeClass::TeRect, TopBottom) => (d / 2.0, mode.kx, false),
        (ModeClass::TmRect | ModeClass::TeRect, LeftRight) => (w / 2.0, mode.ky, false),
    })
}

/// Amplitude referenced to `pair`: the converted amplitude where the pair is
/// a frame of the mode, the canonical amplitude on an auxiliary pair.
pub(crate) fn pair_amplitude(mode: &Mode, pair: ReferenceFrame, exc: &Excitation) -> Result<f64> {
    fields::check_frame(mode, exc.frame)?;
    if fields::valid_frames(mode.class).contains(&pair) {
        fields::convert_frame(mode, exc.e_m, exc.frame, pair)
    } else {
        Ok(exc.e_m)
    }
}

pub fn flux_field(mode: &Mode, pair: ReferenceFrame, exc: &Excitation) -> Result<FluxField> {
    let (h_eff, k_g, auxiliary) = flux_layout(mode, pair)?;
    let e_m = pair_amplitude(mode, pair, exc)?;
    let half = match pair {
        ReferenceFrame::TopBottom => mode.w() / 2.0,
        ReferenceFrame::LeftRight => mode.d() / 2.0,
    };
    Ok(FluxField {
        pair,
        phi_m: e_m * h_eff / mode.omega(),
        h_eff,
        profile: FluxProfile { k_g, half },
        auxiliary,
        quad: exc.quad,
        beta: mode.beta(),
        omega: mode.omega(),
    })
}

/// Electrode on which the closed form is written, and the factor relating
/// the facing electrode's densities to it.
fn reference_electrode(mode: &Mode, pair: ReferenceFrame) -> (ElectrodeId, f64) {
    let p = mode.parity_n();
    let pm = mode.parity_m();
    match (mode.class, pair) {
        (ModeClass::TePlates, ReferenceFrame::TopBottom) => (ElectrodeId::Bottom, -p),
        (ModeClass::TeRotated, ReferenceFrame::LeftRight) => (ElectrodeId::Right, -pm),
        (ModeClass::Tem | ModeClass::TeRotated, ReferenceFrame::TopBottom) => {
            (ElectrodeId::Top, -1.0)
        }
        (ModeClass::TePlates, ReferenceFrame::LeftRight) => (ElectrodeId::Left, -1.0),
        (_, ReferenceFrame::TopBottom) => (ElectrodeId::Top, -p),
        (_, ReferenceFrame::LeftRight) => (ElectrodeId::Left, -pm),
    }
}

/// Ratio between the densities on `id` and on the facing electrode of the
/// pair's reference electrode.
pub fn facing_factor(mode: &Mode, pair: ReferenceFrame) -> f64 {
    reference_electrode(mode, pair).1
}

/// Closed-form densities in terms of the flux of the electrode's pair.
pub fn surface_density_from_flux(
    mode: &Mode,
    id: ElectrodeId,
    flux: &FluxField,
    u: f64,
    z: f64,
    t: f64,
) -> Result<SurfaceDensity> {
    electrode(mode, id)?;
    if flux.pair != id.pair() {
        return Err(WaveguideError::UndefinedElectrode {
            electrode: id,
            mode: format!("{} with a {} flux", mode.label(), flux.pair.name()),
        });
    }
    Ok(density_from_flux_unchecked(mode, id, flux, u, z, t))
}

fn density_from_flux_unchecked(
    mode: &Mode,
    id: ElectrodeId,
    flux: &FluxField,
    u: f64,
    z: f64,
    t: f64,
) -> SurfaceDensity {
    let (reference, facing) = reference_electrode(mode, flux.pair);
    let cd = flux.c_d();
    let li = flux.l_d_inv();
    let r2 = (mode.k() / mode.beta()).powi(2);
    let (kx2, ky2) = (mode.kx * mode.kx, mode.ky * mode.ky);
    let phi_t = flux.d_dt(u, z, t);
    let phi_z = flux.d_dz(u, z, t);
    let phi_u = flux.d_du(u, z, t);
    let base = if flux.auxiliary {
        SurfaceDensity {
            sigma: 0.0,
            j: [-li * mode.k_c() * flux.value(u, z, t), 0.0],
        }
    } else {
        let transverse_factor = match (mode.class, flux.pair) {
            (ModeClass::TePlates | ModeClass::TeRotated, _) => 1.0,
            (ModeClass::TeRect, ReferenceFrame::TopBottom) => 1.0 + ky2 / kx2,
            (ModeClass::TeRect, ReferenceFrame::LeftRight) => 1.0 + kx2 / ky2,
            _ => 0.0,
        };
        let z_factor = if mode.family.is_tm() { r2 } else { 1.0 };
        SurfaceDensity {
            sigma: cd * phi_t,
            j: [-li * transverse_factor * phi_u, -li * z_factor * phi_z],
        }
    };
    if id == reference {
        base
    } else {
        base.scaled(facing)
    }
}

/// Evenly spaced `(u, z)` samples on an electrode, excluding the edges.
pub fn electrode_grid(mode: &Mode, id: ElectrodeId, nu: usize, nz: usize) -> Vec<(f64, f64)> {
    let half = half_span(mode, id);
    let mut out = Vec::with_capacity(nu * nz);
    for iz in 0..nz {
        let z = mode.length() * iz as f64 / nz as f64;
        for iu in 0..nu {
            let u = -half + 2.0 * half * (iu as f64 + 1.0) / (nu as f64 + 1.0);
            out.push((u, z));
        }
    }
    out
}

/// `div_s j + d sigma/dt` evaluated by central differences of the
/// closed-form densities over `(u, z)` samples.
pub fn charge_conservation_residual(
    mode: &Mode,
    id: ElectrodeId,
    exc: &Excitation,
    samples: &[(f64, f64)],
    t: f64,
    st: &Stencil,
) -> Result<Residual> {
    electrode(mode, id)?;
    let flux = flux_field(mode, id.pair(), exc)?;
    let half = half_span(mode, id);
    let hu = st.h[id.u_axis()];
    let hz = st.h[2];
    let reach = match st.order {
        numerics::StencilOrder::Second => 1.0,
        numerics::StencilOrder::Fourth => 2.0,
    };
    let dens = |u: f64, z: f64, t: f64| density_from_flux_unchecked(mode, id, &flux, u, z, t);
    let mut res = Residual::default();
    for &(u, z) in samples {
        if (u.abs() + reach * hu) > half * (1.0 + 1e-12) {
            return Err(WaveguideError::StencilOutOfBounds {
                point: electrode_point(mode, id, u, z),
            });
        }
        let dj_u = numerics::d1(|s| dens(u + s, z, t).j[0], hu, st.order);
        let dj_z = numerics::d1(|s| dens(u, z + s, t).j[1], hz, st.order);
        let ds_t = numerics::d1(|s| dens(u, z, t + s).sigma, st.ht, st.order);
        let scale = ds_t.abs().max(dj_u.abs()).max(dj_z.abs());
        res.record(dj_u + dj_z + ds_t, scale);
    }
    Ok(res)
}

/// Signed sum of the transverse currents flowing out of the two electrodes
/// that meet at each of the four edges, relative to the largest current seen.
/// Only TE waves carry transverse wall currents.
pub fn peripheral_current_continuity(
    mode: &Mode,
    exc: &Excitation,
    z_samples: &[f64],
    t: f64,
) -> Result<Residual> {
    if !matches!(
        mode.class,
        ModeClass::TePlates | ModeClass::TeRotated | ModeClass::TeRect
    ) {
        return Err(WaveguideError::InvalidMode(format!(
            "peripheral currents are only defined for TE waves, not {}",
            mode.label()
        )));
    }
    let tb = flux_field(mode, ReferenceFrame::TopBottom, exc)?;
    let lr = flux_field(mode, ReferenceFrame::LeftRight, exc)?;
    let (w2, d2) = (mode.w() / 2.0, mode.d() / 2.0);
    let j_u = |id: ElectrodeId, u: f64, z: f64| {
        let flux = if id.pair() == ReferenceFrame::TopBottom {
            &tb
        } else {
            &lr
        };
        density_from_flux_unchecked(mode, id, flux, u, z, t).j
    };
    // (horizontal electrode, x of the edge, vertical electrode, y of the edge)
    let edges = [
        (ElectrodeId::Top, w2, ElectrodeId::Left, d2),
        (ElectrodeId::Top, -w2, ElectrodeId::Right, d2),
        (ElectrodeId::Bottom, w2, ElectrodeId::Left, -d2),
        (ElectrodeId::Bottom, -w2, ElectrodeId::Right, -d2),
    ];
    let mut res = Residual::default();
    for &z in z_samples {
        for (h, x_edge, v, y_edge) in edges {
            let jh = j_u(h, x_edge, z);
            let jv = j_u(v, y_edge, z);
            let out_h = jh[0] * x_edge.signum();
            let out_v = jv[0] * y_edge.signum();
            let scale = [jh[0], jh[1], jv[0], jv[1]]
                .iter()
                .fold(0.0f64, |a, b| a.max(b.abs()));
            res.record(out_h + out_v, scale);
        }
    }
    Ok(res)
}

/// Tangential E and normal B on every defined electrode, relative to the
/// field scale. Samples stay off the edges.
pub fn boundary_condition_residual(
    mode: &Mode,
    exc: &Excitation,
    nu: usize,
    nz: usize,
    t: f64,
) -> Result<Residual> {
    fields::check_frame(mode, exc.frame)?;
    let mut res = Residual::default();
    for id in ElectrodeId::ALL {
        let Ok(el) = electrode(mode, id) else {
            continue;
        };
        for (u, z) in electrode_grid(mode, id, nu, nz) {
            let p = electrode_point(mode, id, u, z);
            let s = fields::fields_unchecked(mode, exc, p, t);
            let et = numerics::cross(el.normal, s.e);
            let bn = numerics::dot(el.normal, s.b) * C;
            let scale = numerics::max_abs(s.e).max(numerics::max_abs(s.b) * C);
            res.record(numerics::max_abs(et).max(bn.abs()), scale);
        }
    }
    Ok(res)
}
