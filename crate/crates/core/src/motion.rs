//! Constants of motion: volume quadrature of the fields, the electrode-pair
//! flux forms, the modal (per-length) form and the flux propagation laws.

use serde::Serialize;

use crate::boundary::{self, FluxField};
use crate::constants::{C, EPSILON_0, MU_0};
use crate::error::{Result, WaveguideError};
use crate::fields::{self, Excitation, Quadratures, ReferenceFrame};
use crate::gauge;
use crate::geometry::{Mode, ModeClass};
use crate::numerics::{self, AxisRule, QuadratureRule, Residual, Stencil, StencilOrder, Vec3};

/// Table of lumped coefficients for one electrode pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModalCoefficients {
    pub pair: ReferenceFrame,
    pub c_h: f64,
    pub c_p: f64,
    pub l_h_inv: f64,
    pub h_eff: f64,
    pub sigma: f64,
    pub k_c: f64,
    pub v_phi: f64,
}

pub fn modal_coefficients(mode: &Mode, pair: ReferenceFrame) -> Result<ModalCoefficients> {
    let (h_eff, _, auxiliary) = boundary::flux_layout(mode, pair)?;
    if auxiliary {
        return Err(undefined_pair(mode, pair));
    }
    let sigma = gauge::parity(mode)
        .for_pair(pair)
        .ok_or_else(|| undefined_pair(mode, pair))?;
    let (w, d, l) = (mode.w(), mode.d(), mode.length());
    let c_d = EPSILON_0 / h_eff;
    let l_d_inv = 1.0 / (MU_0 * h_eff);
    let r2 = (mode.k() / mode.beta()).powi(2);
    let (kx2, ky2) = (mode.kx * mode.kx, mode.ky * mode.ky);
    use ReferenceFrame::*;
    // (transverse length, shape factor, TM-like dispersion factors)
    let (span, shape, tm) = match (mode.class, pair) {
        (ModeClass::Tem, _) => (w, 1.0, false),
        (ModeClass::TmPlates, _) => (w, 1.0, true),
        (ModeClass::TePlates, _) => (d / 2.0, 1.0, false),
        (ModeClass::TeRotated, _) => (w / 2.0, 1.0, false),
        (ModeClass::TmRect, TopBottom) => (w / 2.0, 1.0 + kx2 / ky2, true),
        (ModeClass::TmRect, LeftRight) => (d / 2.0, 1.0 + ky2 / kx2, true),
        (ModeClass::TeRect, TopBottom) => (w / 2.0, 1.0 + ky2 / kx2, false),
        (ModeClass::TeRect, LeftRight) => (d / 2.0, 1.0 + kx2 / ky2, false),
    };
    let c_h = c_d * span * shape * l;
    let base_l = l_d_inv * span * shape * l;
    let (c_p, l_h_inv) = if tm {
        (c_h * r2, base_l * r2 * r2)
    } else {
        (c_h, base_l)
    };
    Ok(ModalCoefficients {
        pair,
        c_h,
        c_p,
        l_h_inv,
        h_eff,
        sigma,
        k_c: mode.k_c(),
        v_phi: mode.disp.v_phi,
    })
}

fn undefined_pair(mode: &Mode, pair: ReferenceFrame) -> WaveguideError {
    WaveguideError::UndefinedElectrode {
        electrode: match pair {
            ReferenceFrame::TopBottom => boundary::ElectrodeId::Top,
            ReferenceFrame::LeftRight => boundary::ElectrodeId::Left,
        },
        mode: mode.label(),
    }
}

/// Electrode pairs that carry the description of the mode.
pub fn canonical_pairs(mode: &Mode) -> &'static [ReferenceFrame] {
    fields::valid_frames(mode.class)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MotionConstants {
    pub h: f64,
    pub p: Vec3,
    pub j: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadraturePath {
    /// Transverse quadrature with the z integrals done analytically.
    Fast,
    /// Full three-dimensional quadrature.
    Oracle,
}

/// Gauss-Legendre layout for volume and surface integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureGrid {
    pub x_order: usize,
    pub y_order: usize,
    pub z_panels: usize,
    pub z_order: usize,
}

impl QuadratureGrid {
    /// `8 (index + 1)` nodes per transverse axis and one 16-node panel per
    /// longitudinal wavelength.
    pub fn default_for(mode: &Mode) -> Self {
        Self {
            x_order: 8 * (mode.m() as usize + 1),
            y_order: 8 * (mode.n() as usize + 1),
            z_panels: wavelengths(mode).ceil().max(1.0) as usize,
            z_order: 16,
        }
    }

    /// Requires at least four nodes per transverse half-oscillation and per
    /// longitudinal wavelength.
    pub fn validate(&self, mode: &Mode) -> Result<()> {
        let need = |what: &str, have: usize, want: f64| {
            if (have as f64) < 4.0 * want {
                Err(WaveguideError::GridTooCoarse(format!(
                    "{have} {what} nodes for {want} oscillations of {}",
                    mode.label()
                )))
            } else {
                Ok(())
            }
        };
        need("x", self.x_order, mode.m().max(1) as f64)?;
        need("y", self.y_order, mode.n().max(1) as f64)?;
        need(
            "z",
            self.z_panels * self.z_order,
            wavelengths(mode).max(1.0),
        )?;
        Ok(())
    }

    fn x_rule(&self, mode: &Mode) -> AxisRule {
        AxisRule::gauss_legendre(-mode.w() / 2.0, mode.w() / 2.0, self.x_order, 1)
    }
    fn y_rule(&self, mode: &Mode) -> AxisRule {
        AxisRule::gauss_legendre(-mode.d() / 2.0, mode.d() / 2.0, self.y_order, 1)
    }
    fn z_rule(&self, mode: &Mode) -> AxisRule {
        AxisRule::gauss_legendre(0.0, mode.length(), self.z_order, self.z_panels)
    }
}

fn wavelengths(mode: &Mode) -> f64 {
    mode.beta().abs() * mode.length() / (2.0 * std::f64::consts::PI)
}

/// Exact integrals over `z` in `[0, L]` of the quadrature-function products
/// at time `t`, and of the same products weighted by `z`.
#[derive(Debug, Clone, Copy)]
struct ZMoments {
    ff: f64,
    tt: f64,
    ft: f64,
    z_ft: f64,
}

fn z_moments(mode: &Mode, exc: &Excitation, t: f64) -> ZMoments {
    let (beta, l) = (mode.beta(), mode.length());
    let (x, y) = (exc.quad.x, exc.quad.y);
    let b = 2.0 * (mode.omega() * t + exc.quad.theta0);
    let kap = 2.0 * beta;
    let b_end = b - kap * l;
    // integrals of cos(b - kap z) and sin(b - kap z), plain and z-weighted
    let ci = (b.sin() - b_end.sin()) / kap;
    let si = (b_end.cos() - b.cos()) / kap;
    let zci = -l * b_end.sin() / kap + (b_end.cos() - b.cos()) / (kap * kap);
    let zsi = l * b_end.cos() / kap + (b_end.sin() - b.sin()) / (kap * kap);
    let (i_cc, i_ss, i_sc) = (l / 2.0 + ci / 2.0, l / 2.0 - ci / 2.0, si / 2.0);
    let (z_cc, z_ss, z_sc) = (l * l / 4.0 + zci / 2.0, l * l / 4.0 - zci / 2.0, zsi / 2.0);
    ZMoments {
        ff: x * x * i_cc + y * y * i_ss + 2.0 * x * y * i_sc,
        tt: x * x * i_ss + y * y * i_cc - 2.0 * x * y * i_sc,
        ft: (x * x - y * y) * i_sc + x * y * (i_ss - i_cc),
        z_ft: (x * x - y * y) * z_sc + x * y * (z_ss - z_cc),
    }
}

/// Energy, momentum and angular momentum (about the origin) of the field in
/// the guide volume at time `t`.
pub fn motion_by_quadrature(
    mode: &Mode,
    exc: &Excitation,
    t: f64,
    grid: &QuadratureGrid,
    path: QuadraturePath,
) -> Result<MotionConstants> {
    fields::check_frame(mode, exc.frame)?;
    grid.validate(mode)?;
    match path {
        QuadraturePath::Fast => Ok(motion_fast(mode, exc, t, grid)),
        QuadraturePath::Oracle => Ok(motion_oracle(mode, exc, t, grid)),
    }
}

fn motion_fast(mode: &Mode, exc: &Excitation, t: f64, grid: &QuadratureGrid) -> MotionConstants {
    let rule = QuadratureRule::new(vec![grid.x_rule(mode), grid.y_rule(mode)]);
    let frame = exc.frame;
    let s = rule.integrate_vec::<11, _>(|p| {
        let g = fields::g_unchecked(mode, frame, p[0], p[1]);
        let sx = g.ey * g.bz - g.ez * g.by;
        let sy = g.ez * g.bx - g.ex * g.bz;
        let sz = g.ex * g.by - g.ey * g.bx;
        [
            g.ex * g.ex + g.ey * g.ey,
            g.ez * g.ez,
            g.bx * g.bx + g.by * g.by,
            g.bz * g.bz,
            sx,
            sy,
            sz,
            p[1] * sz,
            p[0] * sz,
            p[0] * sy,
            p[1] * sx,
        ]
    });
    let zm = z_moments(mode, exc, t);
    let em2 = exc.e_m * exc.e_m;
    let eb = EPSILON_0 * em2 / C;
    // B_m^2 / (2 mu0) = eps0 E_m^2 / 2
    let h = 0.5 * EPSILON_0 * em2 * ((s[0] + s[2]) * zm.ff + (s[1] + s[3]) * zm.tt);
    let p = [eb * s[4] * zm.ft, eb * s[5] * zm.ft, eb * s[6] * zm.ff];
    let j = [
        eb * (s[7] * zm.ff - s[5] * zm.z_ft),
        eb * (s[4] * zm.z_ft - s[8] * zm.ff),
        eb * (s[9] - s[10]) * zm.ft,
    ];
    MotionConstants { h, p, j }
}

fn motion_oracle(mode: &Mode, exc: &Excitation, t: f64, grid: &QuadratureGrid) -> MotionConstants {
    let rule = QuadratureRule::new(vec![
        grid.z_rule(mode),
        grid.x_rule(mode),
        grid.y_rule(mode),
    ]);
    let v = rule.integrate_vec::<7, _>(|p| {
        let r = [p[1], p[2], p[0]];
        let f = fields::fields_unchecked(mode, exc, r, t);
        let energy =
            0.5 * EPSILON_0 * numerics::dot(f.e, f.e) + 0.5 / MU_0 * numerics::dot(f.b, f.b);
        let g = numerics::scale(numerics::cross(f.e, f.b), EPSILON_0);
        let l = numerics::cross(r, g);
        [energy, g[0], g[1], g[2], l[0], l[1], l[2]]
    });
    MotionConstants {
        h: v[0],
        p: [v[1], v[2], v[3]],
        j: [v[4], v[5], v[6]],
    }
}

/// `2 C_P omega phi_m^2 . omega (X^2 + Y^2) / 4` with the amplitude of the
/// excitation (classical, no quantization).
pub fn closed_form_energy(mode: &Mode, exc: &Excitation) -> Result<(f64, f64)> {
    let pair = canonical_pairs(mode)[0];
    let mc = modal_coefficients(mode, pair)?;
    let flux = boundary::flux_field(mode, pair, exc)?;
    let om = mode.omega();
    let prefactor = 2.0 * mc.c_p * om * flux.phi_m * flux.phi_m;
    let q = exc.quad.quarter_norm();
    Ok((prefactor * om * q, prefactor * mode.beta() * q))
}

/// Energy of one electrode pair in flux form, split into the charge/current
/// part and the addendum, plus the pair's momentum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FluxEnergy {
    pub main: f64,
    pub addendum: f64,
    pub momentum: f64,
}

impl FluxEnergy {
    pub fn total(&self) -> f64 {
        self.main + self.addendum
    }
}

/// Densities `(c_t, l_z, c_phi, l_u, c_p)` multiplying `phi_t^2`, `phi_z^2`,
/// `phi^2`, `phi_u^2` in the energy and `-phi_t phi_z` in the momentum.
fn flux_form_weights(mode: &Mode, flux: &FluxField) -> (f64, f64, f64, f64, f64) {
    let cd = flux.c_d();
    let li = flux.l_d_inv();
    let r2 = (mode.k() / mode.beta()).powi(2);
    let ckc2 = (C * mode.k_c()).powi(2);
    let (kx2, ky2) = (mode.kx * mode.kx, mode.ky * mode.ky);
    let tb = flux.pair == ReferenceFrame::TopBottom;
    match mode.class {
        ModeClass::Tem => (0.5 * cd, 0.5 * li, 0.0, 0.0, cd),
        ModeClass::TmPlates => (
            0.5 * cd,
            0.5 * li * r2 * r2,
            0.5 * cd * r2 * ckc2,
            0.0,
            cd * r2,
        ),
        ModeClass::TePlates | ModeClass::TeRotated => (0.5 * cd, 0.5 * li, 0.0, 0.5 * li, cd),
        ModeClass::TmRect => {
            let shape = if tb { 1.0 + kx2 / ky2 } else { 1.0 + ky2 / kx2 };
            (
                0.5 * cd,
                0.5 * li * r2 * r2,
                0.25 * cd * shape * r2 * ckc2,
                0.0,
                cd * r2,
            )
        }
        ModeClass::TeRect => {
            let shape = if tb { 1.0 + ky2 / kx2 } else { 1.0 + kx2 / ky2 };
            (0.5 * cd, 0.5 * li, 0.0, 0.25 * li * shape * shape, cd)
        }
    }
}

/// Surface quadrature of one pair's flux-form energy and momentum. For the
/// rectangular families with both indices nonzero the two pairs each carry
/// a share; their sum is the field energy.
pub fn energy_by_flux_form(
    mode: &Mode,
    pair: ReferenceFrame,
    exc: &Excitation,
    t: f64,
    grid: &QuadratureGrid,
) -> Result<FluxEnergy> {
    modal_coefficients(mode, pair)?;
    grid.validate(mode)?;
    let flux = boundary::flux_field(mode, pair, exc)?;
    let (ct, lz, cphi, lu, cp) = flux_form_weights(mode, &flux);
    let u_rule = match pair {
        ReferenceFrame::TopBottom => grid.x_rule(mode),
        ReferenceFrame::LeftRight => grid.y_rule(mode),
    };
    let rule = QuadratureRule::new(vec![grid.z_rule(mode), u_rule]);
    let v = rule.integrate_vec::<3, _>(|p| {
        let (z, u) = (p[0], p[1]);
        let phi = flux.value(u, z, t);
        let pt = flux.d_dt(u, z, t);
        let pz = flux.d_dz(u, z, t);
        let pu = flux.d_du(u, z, t);
        [
            ct * pt * pt + lz * pz * pz,
            cphi * phi * phi + lu * pu * pu,
            -cp * pt * pz,
        ]
    });
    Ok(FluxEnergy {
        main: v[0],
        addendum: v[1],
        momentum: v[2],
    })
}

/// Sum of the flux-form contributions of every canonical pair.
pub fn total_energy_by_flux_form(
    mode: &Mode,
    exc: &Excitation,
    t: f64,
    grid: &QuadratureGrid,
) -> Result<FluxEnergy> {
    let mut acc = FluxEnergy::default();
    for &pair in canonical_pairs(mode) {
        let e = energy_by_flux_form(mode, pair, exc, t, grid)?;
        acc.main += e.main;
        acc.addendum += e.addendum;
        acc.momentum += e.momentum;
    }
    Ok(acc)
}

/// Energy and momentum from the lumped coefficients of one pair, integrating
/// the flux amplitude `phi_m f~(z, t)` along the guide.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ModalForm {
    pub h: f64,
    pub p_z: f64,
    /// The `C_P (c k_c)^2` term, half of the energy cost of the cutoff.
    pub addendum: f64,
}

pub fn modal_form(
    mode: &Mode,
    pair: ReferenceFrame,
    exc: &Excitation,
    t: f64,
    grid: &QuadratureGrid,
) -> Result<ModalForm> {
    let mc = modal_coefficients(mode, pair)?;
    grid.validate(mode)?;
    let flux = boundary::flux_field(mode, pair, exc)?;
    Ok(modal_form_with(mode, &mc, flux.phi_m, &exc.quad, t, grid))
}

/// Modal form for explicitly supplied coefficients and flux amplitude.
pub fn modal_form_with(
    mode: &Mode,
    mc: &ModalCoefficients,
    phi_m: f64,
    quad: &Quadratures,
    t: f64,
    grid: &QuadratureGrid,
) -> ModalForm {
    let (beta, om) = (mode.beta(), mode.omega());
    let ckc2 = (C * mc.k_c).powi(2);
    let rule = QuadratureRule::new(vec![grid.z_rule(mode)]);
    let v = rule.integrate_vec::<3, _>(|p| {
        let (f, ft) = quad.both(beta, om, p[0], t);
        let phi = phi_m * ft;
        let phi_t = phi_m * om * f;
        let phi_z = -phi_m * beta * f;
        [
            0.5 * mc.c_h * phi_t * phi_t + 0.5 * mc.l_h_inv * phi_z * phi_z,
            mc.c_p * phi_t * (-phi_z),
            0.5 * mc.c_p * ckc2 * phi * phi,
        ]
    });
    let l = mode.length();
    ModalForm {
        h: (v[0] + v[2]) / l,
        p_z: v[1] / l,
        addendum: v[2] / l,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PropagationLaw {
    /// `phi_zz - phi_tt / c^2 = 0`
    Wave,
    /// `phi_zz - (beta/k)^2 phi_tt / c^2 = 0`
    PhaseVelocityWave,
    /// `phi_zz - phi_tt / c^2 = k_c^2 phi`
    KleinGordon,
}

impl PropagationLaw {
    pub const ALL: [PropagationLaw; 3] = [
        PropagationLaw::Wave,
        PropagationLaw::PhaseVelocityWave,
        PropagationLaw::KleinGordon,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PropagationLaw::Wave => "wave",
            PropagationLaw::PhaseVelocityWave => "phase-velocity-wave",
            PropagationLaw::KleinGordon => "klein-gordon",
        }
    }

    /// The same law with the cutoff wavenumber set to zero.
    pub fn without_cutoff(&self) -> PropagationLaw {
        PropagationLaw::Wave
    }
}

/// The law the flux of each family is stated to obey.
pub fn expected_law(mode: &Mode) -> PropagationLaw {
    if mode.family.is_te() {
        PropagationLaw::KleinGordon
    } else if mode.family.is_tm() {
        PropagationLaw::PhaseVelocityWave
    } else {
        PropagationLaw::Wave
    }
}

/// Stencil for the propagation residual: fourth order, 0.01 rad per step.
pub fn propagation_stencil(mode: &Mode) -> Stencil {
    fields::stencil_with_phase_step(mode, 0.01).with_order(StencilOrder::Fourth)
}

/// Finite-difference residual of `law` applied to the pair's flux, judged
/// against `k^2 max|phi|`.
pub fn flux_propagation_residual(
    mode: &Mode,
    pair: ReferenceFrame,
    exc: &Excitation,
    law: PropagationLaw,
    samples: &[(f64, f64)],
    t: f64,
    st: &Stencil,
) -> Result<Residual> {
    let flux = boundary::flux_field(mode, pair, exc)?;
    let (k, kc, beta) = (mode.k(), mode.k_c(), mode.beta());
    let c2 = C * C;
    let hz = st.h[2];
    let mut res = Residual::default();
    let mut phi_max = 0.0f64;
    let mut worst = 0.0f64;
    for &(u, z) in samples {
        let phi = flux.value(u, z, t);
        let pzz = numerics::d2(|s| flux.value(u, z + s, t), hz, st.order);
        let ptt = numerics::d2(|s| flux.value(u, z, t + s), st.ht, st.order);
        let r = match law {
            PropagationLaw::Wave => pzz - ptt / c2,
            PropagationLaw::PhaseVelocityWave => pzz - (beta / k).powi(2) * ptt / c2,
            PropagationLaw::KleinGordon => pzz - ptt / c2 - kc * kc * phi,
        };
        worst = worst.max(r.abs());
        phi_max = phi_max.max(phi.abs());
    }
    res.record(worst, k * k * phi_max);
    Ok(res)
}
