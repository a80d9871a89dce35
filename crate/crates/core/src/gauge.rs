//! Scalar and vector potentials in the flux gauge, where the potential
//! differences between facing electrodes are the time and space derivatives
//! of the generalized flux.

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{self, ElectrodeId};
use crate::constants::C;
use crate::error::{Result, WaveguideError};
use crate::fields::{self, Excitation, FieldSample, ReferenceFrame};
use crate::geometry::{Mode, ModeClass};
use crate::numerics::{self, Residual, Stencil, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PotentialSample {
    pub a: Vec3,
    pub v: f64,
}

/// Signs combining facing-electrode potentials into `Delta V` and `Delta A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parity {
    pub sigma: Option<f64>,
    pub sigma_prime: Option<f64>,
}

pub fn parity(mode: &Mode) -> Parity {
    let p = mode.parity_n();
    let pm = mode.parity_m();
    let (sigma, sigma_prime) = match mode.class {
        ModeClass::Tem => (Some(-1.0), None),
        ModeClass::TmPlates => (Some(p), None),
        ModeClass::TePlates => (None, Some(1.0)),
        ModeClass::TeRotated => (Some(1.0), None),
        ModeClass::TmRect | ModeClass::TeRect => (Some(p), Some(pm)),
    };
    Parity { sigma, sigma_prime }
}

impl Parity {
    pub fn for_pair(&self, pair: ReferenceFrame) -> Option<f64> {
        match pair {
            ReferenceFrame::TopBottom => self.sigma,
            ReferenceFrame::LeftRight => self.sigma_prime,
        }
    }
}

/// Which gauge coefficients the flux gauge sets to zero and which remain
/// free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeLedger {
    pub fixed: Vec<&'static str>,
    pub free: Vec<&'static str>,
}

pub fn gauge_ledger(mode: &Mode) -> GaugeLedger {
    let free = vec!["b_pi", "b_pi_tilde"];
    match mode.class {
        ModeClass::Tem | ModeClass::TmPlates => GaugeLedger {
            fixed: vec!["a_pi", "a_pi_tilde"],
            free,
        },
        ModeClass::TePlates | ModeClass::TeRotated => GaugeLedger {
            fixed: vec!["a_pi", "b_pi", "a_pi_tilde", "b_pi_tilde"],
            free: vec![],
        },
        ModeClass::TmRect | ModeClass::TeRect => GaugeLedger {
            fixed: vec![
                "a_pi",
                "a_pi_tilde",
                "c_pi",
                "c_pi_tilde",
                "d_pi",
                "d_pi_tilde",
            ],
            free,
        },
    }
}

/// Residual gauge term `Pi = phi_m p(x, y) (b f + b~ f~)`, with `phi_m` the
/// canonical flux scale of the mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FreeGauge {
    pub b: f64,
    pub b_tilde: f64,
}

pub fn eval_potentials(
    mode: &Mode,
    exc: &Excitation,
    point: Vec3,
    t: f64,
) -> Result<PotentialSample> {
    eval_potentials_with_gauge(mode, exc, FreeGauge::default(), point, t)
}

pub fn eval_potentials_with_gauge(
    mode: &Mode,
    exc: &Excitation,
    free: FreeGauge,
    point: Vec3,
    t: f64,
) -> Result<PotentialSample> {
    fields::check_frame(mode, exc.frame)?;
    mode.geometry.check_point(point[0], point[1])?;
    if free != FreeGauge::default() && gauge_ledger(mode).free.is_empty() {
        return Err(WaveguideError::GaugeFullyFixed(mode.label()));
    }
    let amps = Amplitudes::new(mode, exc)?;
    Ok(potentials_unchecked(mode, exc, &amps, free, point, t))
}

/// Amplitudes referenced to each frame the tables need.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Amplitudes {
    top: f64,
    left: f64,
}

impl Amplitudes {
    pub(crate) fn new(mode: &Mode, exc: &Excitation) -> Result<Self> {
        fields::check_frame(mode, exc.frame)?;
        let frames = fields::valid_frames(mode.class);
        let get = |f: ReferenceFrame| {
            if frames.contains(&f) {
                fields::convert_frame(mode, exc.e_m, exc.frame, f)
            } else {
                Ok(0.0)
            }
        };
        Ok(Self {
            top: get(ReferenceFrame::TopBottom)?,
            left: get(ReferenceFrame::LeftRight)?,
        })
    }
}

pub(crate) fn potentials_unchecked(
    mode: &Mode,
    exc: &Excitation,
    amps: &Amplitudes,
    free: FreeGauge,
    pt: Vec3,
    t: f64,
) -> PotentialSample {
    let (x, y, z) = (pt[0], pt[1], pt[2]);
    let (w, d) = (mode.w(), mode.d());
    let (beta, om) = (mode.beta(), mode.omega());
    let (kx, ky) = (mode.kx, mode.ky);
    let kc = mode.k_c();
    let p = mode.parity_n();
    let pm = mode.parity_m();
    let (f, ft) = exc.quad.both(beta, om, z, t);
    let (sx, cx) = (kx * (x + w / 2.0)).sin_cos();
    let (sy, cy) = (ky * (y + d / 2.0)).sin_cos();
    let b2 = beta * beta;

    let mut out = match mode.class {
        ModeClass::Tem => {
            let pm_ = amps.top * d / om;
            PotentialSample {
                a: [0.0, 0.0, pm_ * beta * (y / d) * f],
                v: pm_ * om * (y / d) * f,
            }
        }
        ModeClass::TmPlates => {
            let ph = amps.top * (d / 2.0) / om;
            PotentialSample {
                a: [
                    0.0,
                    ph * p * beta * (cy / (d * beta) + kc / (2.0 * beta) * sy) * ft,
                    ph * p * beta * (cy / 2.0 + (2.0 * kc * kc + b2) / (d * kc * b2) * sy) * f,
                ],
                v: ph * p * om * (cy / 2.0 + sy / (d * kc)) * f,
            }
        }
        ModeClass::TePlates => {
            let ph = amps.left * w / om;
            PotentialSample {
                a: [
                    ph * (sy / w) * ft,
                    -ph * (kc / 2.0) * cy * ft,
                    ph * beta * (sy / 2.0) * f,
                ],
                v: ph * om * (sy / 2.0) * f,
            }
        }
        ModeClass::TeRotated => {
            let ph = amps.top * d / om;
            PotentialSample {
                a: [
                    -ph * (kx / 2.0) * cx * ft,
                    ph * (sx / d) * ft,
                    ph * beta * (sx / 2.0) * f,
                ],
                v: ph * om * (sx / 2.0) * f,
            }
        }
        ModeClass::TmRect => {
            let pa = p * amps.top * (d / 2.0) / om;
            let pb = pm * amps.left * (w / 2.0) / om;
            let kc2 = kc * kc;
            PotentialSample {
                a: [
                    (pa * beta * (-kx / (2.0 * beta) * cx * cy)
                        + pb * beta * (4.0 / (w * beta) * cx * sy + kx / (2.0 * beta) * sx * sy))
                        * ft,
                    (pa * beta * (ky / (2.0 * beta) * sx * sy)
                        + pb * beta
                            * (4.0 * ky / (w * kx * beta) * sx * cy - ky / (2.0 * beta) * cx * cy))
                        * ft,
                    (pa * beta * (sx * cy / 2.0)
                        + pb * beta
                            * (cx * sy / 2.0 + (2.0 * kc2 - 2.0 * b2) / (w * kx * b2) * sx * sy))
                        * f,
                ],
                v: (pa * om * (sx * cy / 2.0)
                    + pb * om * (cx * sy / 2.0 - 2.0 / (w * kx) * sx * sy))
                    * f,
            }
        }
        ModeClass::TeRect => {
            let pa = p * amps.top * (d / 2.0) / om;
            let pb = pm * amps.left * (w / 2.0) / om;
            let kx2 = kx * kx;
            PotentialSample {
                a: [
                    (pa * beta * (-kx / (2.0 * beta) * cx * cy)
                        + pb * beta
                            * ((2.0 * kx2 + 2.0 * ky * beta) / (w * ky * b2) * cx * sy
                                + kx / (2.0 * beta) * sx * sy))
                        * ft,
                    (pa * beta * (ky / (2.0 * beta) * sx * sy)
                        + pb * beta
                            * (2.0 * kx * (ky - beta) / (w * ky * b2) * sx * cy
                                - ky / (2.0 * beta) * cx * cy))
                        * ft,
                    (pa * beta * (sx * cy / 2.0)
                        + pb * beta * (cx * sy / 2.0 - 2.0 * kx / (w * ky * beta) * sx * sy))
                        * f,
                ],
                v: (pa * om * (sx * cy / 2.0)
                    + pb * om * (cx * sy / 2.0 - 2.0 * kx / (w * ky * beta) * sx * sy))
                    * f,
            }
        }
    };

    if free != FreeGauge::default() {
        // A += grad Pi, V -= dPi/dt with Pi = s p(x,y) (b f + b~ f~).
        let s = canonical_flux_scale(mode, amps);
        let (pv, gx, gy) = match mode.class {
            ModeClass::Tem => (1.0, 0.0, 0.0),
            ModeClass::TmPlates => (sy, 0.0, ky * cy),
            _ => (sx * sy, kx * cx * sy, ky * sx * cy),
        };
        let q = free.b * f + free.b_tilde * ft;
        // d/dz (b f + b~ f~) = beta (b f~ - b~ f); d/dt = omega (b~ f - b f~)
        let qz = beta * (free.b * ft - free.b_tilde * f);
        let qt = om * (free.b_tilde * f - free.b * ft);
        out.a[0] += s * gx * q;
        out.a[1] += s * gy * q;
        out.a[2] += s * pv * qz;
        out.v -= s * pv * qt;
    }
    out
}

fn canonical_flux_scale(mode: &Mode, amps: &Amplitudes) -> f64 {
    let d = mode.d();
    let om = mode.omega();
    match mode.class {
        ModeClass::Tem => amps.top * d / om,
        _ => amps.top * (d / 2.0) / om,
    }
}

fn pair_points(mode: &Mode, pair: ReferenceFrame, u: f64, z: f64) -> (Vec3, Vec3) {
    let (a, b) = match pair {
        ReferenceFrame::TopBottom => (ElectrodeId::Top, ElectrodeId::Bottom),
        ReferenceFrame::LeftRight => (ElectrodeId::Left, ElectrodeId::Right),
    };
    (
        boundary::electrode_point(mode, a, u, z),
        boundary::electrode_point(mode, b, u, z),
    )
}

/// `(Delta V, Delta A)` across `pair` at transverse coordinate `u`:
/// `V(first) + sigma V(second)` and likewise for `A_z`.
pub fn delta_potentials(
    mode: &Mode,
    exc: &Excitation,
    pair: ReferenceFrame,
    u: f64,
    z: f64,
    t: f64,
) -> Result<(f64, f64)> {
    delta_potentials_with_gauge(mode, exc, FreeGauge::default(), pair, u, z, t)
}

pub fn delta_potentials_with_gauge(
    mode: &Mode,
    exc: &Excitation,
    free: FreeGauge,
    pair: ReferenceFrame,
    u: f64,
    z: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let undefined = |electrode| WaveguideError::UndefinedElectrode {
        electrode,
        mode: mode.label(),
    };
    let first = match pair {
        ReferenceFrame::TopBottom => ElectrodeId::Top,
        ReferenceFrame::LeftRight => ElectrodeId::Left,
    };
    let sigma = parity(mode)
        .for_pair(pair)
        .ok_or_else(|| undefined(first))?;
    let (p1, p2) = pair_points(mode, pair, u, z);
    let a = eval_potentials_with_gauge(mode, exc, free, p1, t)?;
    let b = eval_potentials_with_gauge(mode, exc, free, p2, t)?;
    Ok((a.v + sigma * b.v, a.a[2] + sigma * b.a[2]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPotentials {
    pub dv: Option<f64>,
    pub da: Option<f64>,
    pub dv_prime: Option<f64>,
    pub da_prime: Option<f64>,
}

/// Both pairs at once; top/bottom at abscissa `x`, left/right at ordinate
/// `y`. Undefined pairs are `None`.
pub fn all_delta_potentials(
    mode: &Mode,
    exc: &Excitation,
    x: f64,
    y: f64,
    z: f64,
    t: f64,
) -> Result<DeltaPotentials> {
    let get = |pair, u| match delta_potentials(mode, exc, pair, u, z, t) {
        Ok(v) => Ok(Some(v)),
        Err(WaveguideError::UndefinedElectrode { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let tb = get(ReferenceFrame::TopBottom, x)?;
    let lr = get(ReferenceFrame::LeftRight, y)?;
    Ok(DeltaPotentials {
        dv: tb.map(|v| v.0),
        da: tb.map(|v| v.1),
        dv_prime: lr.map(|v| v.0),
        da_prime: lr.map(|v| v.1),
    })
}

/// Residual of `d phi/dt = Delta V` and `d phi/dz = -Delta A` with the
/// flux derivatives taken analytically.
pub fn flux_link_residual(
    mode: &Mode,
    exc: &Excitation,
    pair: ReferenceFrame,
    samples: &[(f64, f64)],
    t: f64,
) -> Result<Residual> {
    let flux = boundary::flux_field(mode, pair, exc)?;
    let mut res = Residual::default();
    for &(u, z) in samples {
        let (dv, da) = delta_potentials(mode, exc, pair, u, z, t)?;
        let (pt, pz) = (flux.d_dt(u, z, t), flux.d_dz(u, z, t));
        // both relations judged on the scale of the time derivative
        let scale = pt
            .abs()
            .max(dv.abs())
            .max(mode.omega() / mode.beta().abs() * pz.abs());
        res.record(pt - dv, scale);
        res.record((pz + da) * mode.omega() / mode.beta().abs(), scale);
    }
    Ok(res)
}

/// `div A + (1/c^2) dV/dt` by central differences.
pub fn lorenz_residual(
    mode: &Mode,
    exc: &Excitation,
    points: &[Vec3],
    t: f64,
    st: &Stencil,
) -> Result<Residual> {
    let amps = Amplitudes::new(mode, exc)?;
    let free = FreeGauge::default();
    let a = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).a;
    let v = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).v;
    let parts: Vec<Result<Residual>> = points
        .par_iter()
        .map(|&p| {
            let j = numerics::fd_jacobian(&a, p, t, st)?;
            let vt = numerics::fd_dt_scalar(&v, p, t, st)? / (C * C);
            let scale = j[0][0]
                .abs()
                .max(j[1][1].abs())
                .max(j[2][2].abs())
                .max(vt.abs());
            let mut r = Residual::default();
            r.record(j[0][0] + j[1][1] + j[2][2] + vt, scale);
            Ok(r)
        })
        .collect();
    parts
        .into_iter()
        .try_fold(Residual::default(), |acc, r| Ok(acc.merge(r?)))
}

/// `E = -dA/dt - grad V`, `B = curl A` by central differences.
pub fn reconstruct_fields(
    mode: &Mode,
    exc: &Excitation,
    point: Vec3,
    t: f64,
    st: &Stencil,
) -> Result<FieldSample> {
    reconstruct_with_gauge(mode, exc, FreeGauge::default(), point, t, st)
}

pub fn reconstruct_with_gauge(
    mode: &Mode,
    exc: &Excitation,
    free: FreeGauge,
    point: Vec3,
    t: f64,
    st: &Stencil,
) -> Result<FieldSample> {
    mode.geometry.check_point(point[0], point[1])?;
    if free != FreeGauge::default() && gauge_ledger(mode).free.is_empty() {
        return Err(WaveguideError::GaugeFullyFixed(mode.label()));
    }
    let amps = Amplitudes::new(mode, exc)?;
    let a = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).a;
    let v = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).v;
    let grad_v = numerics::fd_grad(&v, point, t, st)?;
    let a_t = numerics::fd_dt(&a, point, t, st)?;
    let b = numerics::fd_curl(&a, point, t, st)?;
    Ok(FieldSample {
        e: numerics::scale(numerics::add(a_t, grad_v), -1.0),
        b,
    })
}

/// Largest deviation between reconstructed and tabulated fields (B measured
/// as cB), relative to the largest derivative term entering the
/// reconstruction. The potentials of wide guides are much larger than the
/// fields they produce, so the terms set the attainable accuracy.
pub fn reconstruction_residual(
    mode: &Mode,
    exc: &Excitation,
    points: &[Vec3],
    t: f64,
    st: &Stencil,
) -> Result<Residual> {
    let amps = Amplitudes::new(mode, exc)?;
    let free = FreeGauge::default();
    let a = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).a;
    let v = |p: Vec3, t: f64| potentials_unchecked(mode, exc, &amps, free, p, t).v;
    let parts: Vec<Result<Residual>> = points
        .par_iter()
        .map(|&p| {
            let grad_v = numerics::fd_grad(&v, p, t, st)?;
            let a_t = numerics::fd_dt(&a, p, t, st)?;
            let j = numerics::fd_jacobian(&a, p, t, st)?;
            let e = numerics::scale(numerics::add(a_t, grad_v), -1.0);
            let b = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
            let f = fields::fields_unchecked(mode, exc, p, t);
            let de = numerics::max_abs(numerics::sub(e, f.e));
            let db = numerics::max_abs(numerics::sub(b, f.b)) * C;
            let jac_max = j.iter().map(|r| numerics::max_abs(*r)).fold(0.0, f64::max);
            let scale = numerics::max_abs(a_t)
                .max(numerics::max_abs(grad_v))
                .max(jac_max * C)
                .max(numerics::max_abs(f.e))
                .max(numerics::max_abs(f.b) * C);
            let mut res = Residual::default();
            res.record(de.max(db), scale);
            Ok(res)
        })
        .collect();
    parts
        .into_iter()
        .try_fold(Residual::default(), |acc, r| Ok(acc.merge(r?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{default_stencil, interior_grid, Quadratures};
    use crate::geometry::{Family, Geometry, ModeId};

    fn plates(family: Family, l: i64) -> Mode {
        Mode::new(
            Geometry::plates(0.2, 0.01, 0.05).unwrap(),
            ModeId::new(family, l),
        )
        .unwrap()
    }

    fn rect(family: Family, l: i64) -> Mode {
        Mode::new(
            Geometry::rectangular(0.02, 0.013, 0.05).unwrap(),
            ModeId::new(family, l),
        )
        .unwrap()
    }

    fn all_modes() -> Vec<Mode> {
        vec![
            plates(Family::Tem, -1),
            plates(Family::TmPlates { n: 1 }, 2),
            plates(Family::TmPlates { n: 2 }, -1),
            plates(Family::TePlates { n: 2 }, -1),
            rect(Family::TeRect { n: 1, m: 0 }, 1),
            rect(Family::TeRect { n: 0, m: 1 }, -2),
            rect(Family::TmRect { n: 1, m: 1 }, 1),
            rect(Family::TmRect { n: 1, m: 2 }, -1),
            rect(Family::TeRect { n: 2, m: 1 }, 3),
            rect(Family::TeRect { n: 1, m: 1 }, -2),
        ]
    }

    #[test]
    fn tem_potentials() {
        let m = plates(Family::Tem, 1);
        let exc = Excitation::canonical(&m, 1.0, Quadratures::new(1.0, 0.0));
        let mid = eval_potentials(&m, &exc, [0.0, 0.0, 0.01], 0.0).unwrap();
        assert_eq!(mid.v, 0.0);
        assert_eq!(mid.a[2], 0.0);
        let top = eval_potentials(&m, &exc, [0.0, m.d() / 2.0, 0.0], 0.0).unwrap();
        let phi_m = m.d() / m.omega();
        assert!((top.v - phi_m * m.omega() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn parity_table() {
        assert_eq!(parity(&plates(Family::Tem, 1)).sigma, Some(-1.0));
        assert_eq!(
            parity(&plates(Family::TmPlates { n: 2 }, 1)).sigma,
            Some(1.0)
        );
        assert_eq!(
            parity(&plates(Family::TePlates { n: 2 }, 1)).sigma_prime,
            Some(1.0)
        );
        let r = parity(&rect(Family::TmRect { n: 1, m: 2 }, 1));
        assert_eq!((r.sigma, r.sigma_prime), (Some(-1.0), Some(1.0)));
    }

    #[test]
    fn tem_delta_v_is_difference() {
        let m = plates(Family::Tem, 1);
        let exc = Excitation::canonical(&m, 1.0, Quadratures::new(0.3, 0.5));
        let (dv, _) =
            delta_potentials(&m, &exc, ReferenceFrame::TopBottom, 0.0, 0.01, 0.0).unwrap();
        let top = eval_potentials(&m, &exc, [0.0, m.d() / 2.0, 0.01], 0.0).unwrap();
        let bot = eval_potentials(&m, &exc, [0.0, -m.d() / 2.0, 0.01], 0.0).unwrap();
        assert_eq!(dv, top.v - bot.v);
        assert!(delta_potentials(&m, &exc, ReferenceFrame::LeftRight, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn gauge_checks_all_families() {
        for m in all_modes() {
            let exc = Excitation::canonical(&m, 1.4, Quadratures::new(0.7, -0.4).with_theta0(0.3));
            let st = default_stencil(&m);
            let pts = interior_grid(&m, 4, 4, 3);
            let t = 1.3e-11;
            let lor = lorenz_residual(&m, &exc, &pts, t, &st).unwrap();
            assert!(lor.relative() < 1e-6, "{m} lorenz {lor:?}");
            let rec = reconstruction_residual(&m, &exc, &pts, t, &st).unwrap();
            assert!(rec.relative() < 1e-6, "{m} reconstruction {rec:?}");
            for pair in [ReferenceFrame::TopBottom, ReferenceFrame::LeftRight] {
                if parity(&m).for_pair(pair).is_none() {
                    continue;
                }
                let id = if pair == ReferenceFrame::TopBottom {
                    ElectrodeId::Top
                } else {
                    ElectrodeId::Left
                };
                let samples = boundary::electrode_grid(&m, id, 5, 4);
                let link = flux_link_residual(&m, &exc, pair, &samples, t).unwrap();
                assert!(link.relative() < 1e-10, "{m} {pair:?} link {link:?}");
            }
        }
    }

    #[test]
    fn residual_gauge_freedom_is_invisible() {
        for m in all_modes() {
            let exc = Excitation::canonical(&m, 1.0, Quadratures::new(0.7, -0.4));
            let free = FreeGauge {
                b: 0.8,
                b_tilde: -1.3,
            };
            if gauge_ledger(&m).free.is_empty() {
                assert!(matches!(
                    eval_potentials_with_gauge(&m, &exc, free, [0.0; 3], 0.0),
                    Err(WaveguideError::GaugeFullyFixed(_))
                ));
                continue;
            }
            let st = default_stencil(&m);
            let p = [0.1 * m.w(), -0.2 * m.d(), 0.01];
            let a = reconstruct_fields(&m, &exc, p, 0.0, &st).unwrap();
            let b = reconstruct_with_gauge(&m, &exc, free, p, 0.0, &st).unwrap();
            let scale = numerics::max_abs(a.e);
            assert!(
                numerics::max_abs(numerics::sub(a.e, b.e)) < 1e-6 * scale,
                "{m}"
            );
            assert!(
                numerics::max_abs(numerics::sub(a.b, b.b)) * C < 1e-6 * scale,
                "{m}"
            );
            for pair in [ReferenceFrame::TopBottom, ReferenceFrame::LeftRight] {
                if parity(&m).for_pair(pair).is_none() {
                    continue;
                }
                let u = 0.13 * m.d();
                let x = delta_potentials(&m, &exc, pair, u, 0.02, 1e-11).unwrap();
                let y = delta_potentials_with_gauge(&m, &exc, free, pair, u, 0.02, 1e-11).unwrap();
                assert!(
                    (x.0 - y.0).abs() <= 1e-12 * x.0.abs().max(1e-300) + 1e-18,
                    "{m}"
                );
                assert!(
                    (x.1 - y.1).abs() <= 1e-12 * x.1.abs().max(1e-300) + 1e-18,
                    "{m}"
                );
            }
        }
    }

    #[test]
    fn reconstruction_near_wall_is_out_of_bounds() {
        let m = plates(Family::Tem, 1);
        let exc = Excitation::canonical(&m, 1.0, Quadratures::new(1.0, 0.0));
        let st = default_stencil(&m);
        let r = reconstruct_fields(&m, &exc, [0.0, m.d() / 2.0, 0.0], 0.0, &st);
        assert!(matches!(r, Err(WaveguideError::StencilOutOfBounds { .. })));
    }
}
