//! Quantization of the flux amplitude, zero-point fluctuations and the
//! algebra of the quadrature operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{C, EPSILON_0, HBAR};
use crate::error::{Result, WaveguideError};
use crate::fields::{self, Excitation, Quadratures, ReferenceFrame};
use crate::geometry::{Family, Geometry, Mode, ModeClass, ModeId};
use crate::motion::{self, ModalCoefficients, QuadratureGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumAmplitudes {
    pub frame: ReferenceFrame,
    pub phi_m: f64,
    pub e_m: f64,
    pub b_m: f64,
    /// Amplitude of the charge `C_H d(phi)/dt` conjugate to the flux.
    pub q_scale: f64,
    pub dh_per_photon: f64,
    /// Nonzero for TE families only.
    pub photon_mass: f64,
    pub e_zpf: f64,
    pub coefficients: ModalCoefficients,
}

impl QuantumAmplitudes {
    pub fn excitation(&self, quad: Quadratures) -> Excitation {
        Excitation::new(self.frame, self.e_m, quad)
    }

    /// `2 C_P omega phi_m^2`, which equals hbar.
    pub fn commutator_prefactor(&self, omega: f64) -> f64 {
        2.0 * self.coefficients.c_p * omega * self.phi_m * self.phi_m
    }
}

pub fn zero_point_field(mode: &Mode) -> f64 {
    let g = &mode.geometry;
    ((HBAR * mode.omega() / 2.0) / (EPSILON_0 * g.d * g.w * g.length)).sqrt()
}

/// Fixes the flux amplitude so that one quadrature unit carries `hbar`.
pub fn quantize(mode: &Mode, frame: ReferenceFrame) -> Result<QuantumAmplitudes> {
    fields::check_frame(mode, frame)?;
    let mc = motion::modal_coefficients(mode, frame)?;
    let om = mode.omega();
    let phi_m = (HBAR / (2.0 * mc.c_p * om)).sqrt();
    let e_m = phi_m * om / mc.h_eff;
    let kc = mode.k_c();
    let omega_c = C * kc;
    Ok(QuantumAmplitudes {
        frame,
        phi_m,
        e_m,
        b_m: e_m / C,
        q_scale: mc.c_h * om * phi_m,
        dh_per_photon: HBAR * omega_c * (kc * kc / (mode.beta().powi(2) + kc * kc)).sqrt(),
        photon_mass: if mode.family.is_te() {
            HBAR * kc / C
        } else {
            0.0
        },
        e_zpf: zero_point_field(mode),
        coefficients: mc,
    })
}

/// `E_m / E_zpf` in the canonical frame from the tabulated closed forms.
pub fn zpf_ratio(mode: &Mode) -> f64 {
    ratio_with(mode, (mode.beta() / mode.k()).powi(2))
}

/// Limit of [`zpf_ratio`] for `|beta| >> k_c`.
pub fn zpf_ratio_limit(g: &Geometry, family: Family) -> Result<f64> {
    let mode = Mode::new(*g, ModeId::new(family, 1))?;
    Ok(ratio_with(&mode, 1.0))
}

/// `r2` is `beta^2 / k^2`.
fn ratio_with(mode: &Mode, r2: f64) -> f64 {
    let (kx2, ky2) = (mode.kx * mode.kx, mode.ky * mode.ky);
    match mode.class {
        ModeClass::Tem => 1.0,
        ModeClass::TePlates | ModeClass::TeRotated => 2f64.sqrt(),
        ModeClass::TmPlates => 2f64.sqrt() * r2.sqrt(),
        ModeClass::TmRect => (4.0 / (1.0 + kx2 / ky2)).sqrt() * r2.sqrt(),
        ModeClass::TeRect => (4.0 / (1.0 + ky2 / kx2)).sqrt(),
    }
}

/// Ratio at each longitudinal index, in input order.
pub fn zpf_ratio_sweep(g: &Geometry, family: Family, ls: &[i64]) -> Result<Vec<(i64, f64)>> {
    ls.par_iter()
        .map(|&l| Mode::new(*g, ModeId::new(family, l)).map(|m| (l, zpf_ratio(&m))))
        .collect()
}

/// Same as [`zpf_ratio_sweep`] over a continuous propagation constant.
pub fn zpf_ratio_sweep_beta(
    g: &Geometry,
    family: Family,
    betas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    betas
        .par_iter()
        .map(|&b| Mode::with_beta(*g, family, b).map(|m| (b, zpf_ratio(&m))))
        .collect()
}

/// `(H, P_z) = (hbar omega, hbar beta) (X^2 + Y^2) / 4`.
pub fn closed_form_constants(mode: &Mode, q: &Quadratures) -> (f64, f64) {
    let n = q.quarter_norm();
    (HBAR * mode.omega() * n, HBAR * mode.beta() * n)
}

/// Quadratures whose classical `(X^2 + Y^2) / 4` equals `n + 1/2`.
pub fn photon_quadratures(n: u32) -> Quadratures {
    Quadratures::new(2.0 * (n as f64 + 0.5).sqrt(), 0.0)
}

pub const DEFAULT_FOCK_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub fock_dim: usize,
    /// Number of low-lying states on which the identities are asserted.
    pub subspace: usize,
    pub commutator: f64,
    pub number: f64,
    pub rotated_commutator: f64,
    pub rotated_number: f64,
    /// Deviation of the mirrored commutator from `-2i`.
    pub mirror: f64,
}

impl LadderReport {
    pub fn worst(&self) -> f64 {
        [
            self.commutator,
            self.number,
            self.rotated_commutator,
            self.rotated_number,
            self.mirror,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

type CMat = DMatrix<Complex64>;

fn annihilation(dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn block_deviation(a: &CMat, b: &CMat, k: usize) -> f64 {
    let d = (a - b).view((0, 0), (k, k)).map(|z| z.norm());
    d.max()
}

/// Truncated Fock representation of `X = b+ + b`, `Y = i (b+ - b)`, with the
/// quadratures also rotated by `theta0` and mirrored `Y -> -Y`.
pub fn ladder_algebra_check(fock_dim: usize, theta0: f64) -> Result<LadderReport> {
    if fock_dim < 3 {
        return Err(WaveguideError::GridTooCoarse(format!(
            "Fock dimension {fock_dim} below 3"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let b = annihilation(fock_dim);
    let bd = b.adjoint();
    let x = &bd + &b;
    let y = (&bd - &b) * i;
    let n = &bd * &b;
    let id = CMat::identity(fock_dim, fock_dim);
    let two_i = &id * (i * 2.0);
    let number = (&n + &id * Complex64::new(0.5, 0.0)) * Complex64::new(4.0, 0.0);
    let k = fock_dim - 1;
    let comm = |a: &CMat, b: &CMat| a * b - b * a;

    let (c, s) = (
        Complex64::new(theta0.cos(), 0.0),
        Complex64::new(theta0.sin(), 0.0),
    );
    let xr = &x * c + &y * s;
    let yr = &y * c - &x * s;

    Ok(LadderReport {
        fock_dim,
        subspace: k,
        commutator: block_deviation(&comm(&x, &y), &two_i, k),
        number: block_deviation(&(&x * &x + &y * &y), &number, k),
        rotated_commutator: block_deviation(&comm(&xr, &yr), &two_i, k),
        rotated_number: block_deviation(&(&xr * &xr + &yr * &yr), &number, k),
        mirror: block_deviation(&comm(&x, &(-&y)), &(-&two_i), k),
    })
}

/// Relative changes of the invariants under `phi_m -> alpha phi_m`,
/// `C -> C / alpha^2`, `L_H -> alpha^2 L_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub alpha: f64,
    pub energy: f64,
    pub momentum: f64,
    pub prefactor: f64,
    /// Product of the flux and charge scales.
    pub action: f64,
}

impl ScalingReport {
    pub fn worst(&self) -> f64 {
        self.energy
            .max(self.momentum)
            .max(self.prefactor)
            .max(self.action)
    }
}

pub fn scaling_invariance_check(
    mode: &Mode,
    frame: ReferenceFrame,
    quad: &Quadratures,
    alpha: f64,
) -> Result<ScalingReport> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(WaveguideError::DegenerateScale);
    }
    let qa = quantize(mode, frame)?;
    let grid = QuadratureGrid::default_for(mode);
    let om = mode.omega();
    let mc = qa.coefficients;
    let a2 = alpha * alpha;
    let scaled = ModalCoefficients {
        c_h: mc.c_h / a2,
        c_p: mc.c_p / a2,
        l_h_inv: mc.l_h_inv / a2,
        ..mc
    };
    let phi_s = alpha * qa.phi_m;
    let base = motion::modal_form_with(mode, &mc, qa.phi_m, quad, 0.0, &grid);
    let after = motion::modal_form_with(mode, &scaled, phi_s, quad, 0.0, &grid);
    let rel = |a: f64, b: f64| {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    };
    let pre0 = 2.0 * mc.c_p * om * qa.phi_m * qa.phi_m;
    let pre1 = 2.0 * scaled.c_p * om * phi_s * phi_s;
    let q_s = scaled.c_h * om * phi_s;
    Ok(ScalingReport {
        alpha,
        energy: rel(after.h, base.h),
        momentum: rel(after.p_z, base.p_z),
        prefactor: rel(pre1, pre0),
        action: rel(phi_s * q_s, qa.phi_m * qa.q_scale),
    })
}
