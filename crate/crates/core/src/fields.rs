//! Modal functions, traveling quadratures and physical E, B fields.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::C;
use crate::error::{Result, WaveguideError};
use crate::geometry::{Mode, ModeClass};
use crate::numerics::{self, Bounds, Residual, Stencil, StencilOrder, Vec3};

/// Phase step (radians per stencil step) of the default finite-difference
/// stencil.
pub const DEFAULT_PHASE_STEP: f64 = 1.0 / 1024.0;

/// Classical quadrature amplitudes of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadratures {
    pub x: f64,
    pub y: f64,
    pub theta0: f64,
}

impl Quadratures {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, theta0: 0.0 }
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn phase(&self, beta: f64, omega: f64, z: f64, t: f64) -> f64 {
        omega * t - beta * z + self.theta0
    }

    /// `X cos(theta) + Y sin(theta)`
    pub fn f(&self, beta: f64, omega: f64, z: f64, t: f64) -> f64 {
        let (s, c) = self.phase(beta, omega, z, t).sin_cos();
        self.x * c + self.y * s
    }

    /// `X sin(theta) - Y cos(theta)`, so that `d f~/dt = omega f`.
    pub fn f_tilde(&self, beta: f64, omega: f64, z: f64, t: f64) -> f64 {
        let (s, c) = self.phase(beta, omega, z, t).sin_cos();
        self.x * s - self.y * c
    }

    pub fn both(&self, beta: f64, omega: f64, z: f64, t: f64) -> (f64, f64) {
        let (s, c) = self.phase(beta, omega, z, t).sin_cos();
        (self.x * c + self.y * s, self.x * s - self.y * c)
    }

    /// `(X^2 + Y^2) / 4`, the classical stand-in for `n + 1/2`.
    pub fn quarter_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y) / 4.0
    }
}

/// Electrode pair an amplitude (or a flux) is referenced to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReferenceFrame {
    TopBottom,
    LeftRight,
}

impl ReferenceFrame {
    pub fn name(&self) -> &'static str {
        match self {
            ReferenceFrame::TopBottom => "top-bottom",
            ReferenceFrame::LeftRight => "left-right",
        }
    }
}

pub fn valid_frames(class: ModeClass) -> &'static [ReferenceFrame] {
    use ReferenceFrame::*;
    match class {
        ModeClass::Tem | ModeClass::TmPlates | ModeClass::TeRotated => &[TopBottom],
        ModeClass::TePlates => &[LeftRight],
        ModeClass::TmRect | ModeClass::TeRect => &[TopBottom, LeftRight],
    }
}

/// The frame the amplitude of a mode is naturally quoted in.
pub fn canonical_frame(class: ModeClass) -> ReferenceFrame {
    valid_frames(class)[0]
}

pub fn check_frame(mode: &Mode, frame: ReferenceFrame) -> Result<()> {
    if valid_frames(mode.class).contains(&frame) {
        Ok(())
    } else {
        Err(WaveguideError::InvalidFrame {
            frame,
            mode: mode.label(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GVector {
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl GVector {
    pub fn e(&self) -> Vec3 {
        [self.ex, self.ey, self.ez]
    }
    pub fn b(&self) -> Vec3 {
        [self.bx, self.by, self.bz]
    }
}

/// Amplitude convention plus classical state of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Excitation {
    pub frame: ReferenceFrame,
    pub e_m: f64,
    pub quad: Quadratures,
}

impl Excitation {
    pub fn new(frame: ReferenceFrame, e_m: f64, quad: Quadratures) -> Self {
        Self { frame, e_m, quad }
    }

    pub fn canonical(mode: &Mode, e_m: f64, quad: Quadratures) -> Self {
        Self::new(canonical_frame(mode.class), e_m, quad)
    }

    /// Same physical field expressed in another frame.
    pub fn in_frame(&self, mode: &Mode, frame: ReferenceFrame) -> Result<Self> {
        Ok(Self {
            frame,
            e_m: convert_frame(mode, self.e_m, self.frame, frame)?,
            quad: self.quad,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FieldSample {
    pub e: Vec3,
    pub b: Vec3,
}

/// Modal functions at `(x, y)` for the given frame.
pub fn eval_g(mode: &Mode, frame: ReferenceFrame, x: f64, y: f64) -> Result<GVector> {
    check_frame(mode, frame)?;
    mode.geometry.check_point(x, y)?;
    Ok(g_unchecked(mode, frame, x, y))
}

/// Table evaluation without domain checks; the expressions are analytic so
/// finite-difference stencils may step slightly past the walls.
pub(crate) fn g_unchecked(mode: &Mode, frame: ReferenceFrame, x: f64, y: f64) -> GVector {
    let beta = mode.beta();
    let k = mode.k();
    let (kx, ky) = (mode.kx, mode.ky);
    let p = mode.parity_n();
    let pm = mode.parity_m();
    let (sx, cx) = (kx * (x + mode.w() / 2.0)).sin_cos();
    let (sy, cy) = (ky * (y + mode.d() / 2.0)).sin_cos();
    let kc2 = kx * kx + ky * ky;
    let z = GVector::default();
    match (mode.class, frame) {
        (ModeClass::Tem, _) => GVector {
            ey: -1.0,
            bx: beta.signum(),
            ..z
        },
        (ModeClass::TmPlates, _) => GVector {
            ey: -p * cy,
            ez: p * (ky / beta) * sy,
            bx: p * (k / beta) * cy,
            ..z
        },
        (ModeClass::TePlates, _) => GVector {
            ex: -sy,
            by: -(beta / k) * sy,
            bz: -(ky / k) * cy,
            ..z
        },
        (ModeClass::TeRotated, _) => GVector {
            ey: -sx,
            bx: (beta / k) * sx,
            bz: (kx / k) * cx,
            ..z
        },
        (ModeClass::TmRect, ReferenceFrame::TopBottom) => GVector {
            ex: -p * (kx / ky) * cx * sy,
            ey: -p * sx * cy,
            ez: p * kc2 / (ky * beta) * sx * sy,
            bx: p * (k / beta) * sx * cy,
            by: -p * (k * kx) / (ky * beta) * cx * sy,
            bz: 0.0,
        },
        (ModeClass::TmRect, ReferenceFrame::LeftRight) => GVector {
            ex: -pm * cx * sy,
            ey: -pm * (ky / kx) * sx * cy,
            ez: pm * kc2 / (kx * beta) * sx * sy,
            bx: pm * (k * ky) / (kx * beta) * sx * cy,
            by: -pm * (k / beta) * cx * sy,
            bz: 0.0,
        },
        (ModeClass::TeRect, ReferenceFrame::TopBottom) => GVector {
            ex: p * (ky / kx) * cx * sy,
            ey: -p * sx * cy,
            ez: 0.0,
            bx: p * (beta / k) * sx * cy,
            by: p * (ky * beta) / (kx * k) * cx * sy,
            bz: p * kc2 / (kx * k) * cx * cy,
        },
        (ModeClass::TeRect, ReferenceFrame::LeftRight) => GVector {
            ex: -pm * cx * sy,
            ey: pm * (kx / ky) * sx * cy,
            ez: 0.0,
            bx: -pm * (kx * beta) / (ky * k) * sx * cy,
            by: -pm * (beta / k) * cx * sy,
            bz: -pm * kc2 / (ky * k) * cx * cy,
        },
    }
}

pub fn eval_fields(mode: &Mode, exc: &Excitation, point: Vec3, t: f64) -> Result<FieldSample> {
    check_frame(mode, exc.frame)?;
    mode.geometry.check_point(point[0], point[1])?;
    Ok(fields_unchecked(mode, exc, point, t))
}

pub(crate) fn fields_unchecked(mode: &Mode, exc: &Excitation, p: Vec3, t: f64) -> FieldSample {
    let g = g_unchecked(mode, exc.frame, p[0], p[1]);
    let (f, ft) = exc.quad.both(mode.beta(), mode.omega(), p[2], t);
    let em = exc.e_m;
    let bm = em / C;
    FieldSample {
        e: [em * g.ex * f, em * g.ey * f, em * g.ez * ft],
        b: [bm * g.bx * f, bm * g.by * f, bm * g.bz * ft],
    }
}

/// Amplitude in frame `to` giving the same field as `e_m` in frame `from`.
pub fn convert_frame(
    mode: &Mode,
    e_m: f64,
    from: ReferenceFrame,
    to: ReferenceFrame,
) -> Result<f64> {
    check_frame(mode, from)?;
    check_frame(mode, to)?;
    if from == to {
        return Ok(e_m);
    }
    let sign = if (mode.n() + mode.m()).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    // factor maps a top/bottom amplitude onto a left/right one
    let factor = match mode.class {
        ModeClass::TmRect => sign * mode.kx / mode.ky,
        ModeClass::TeRect => -sign * mode.ky / mode.kx,
        _ => unreachable!("single-frame classes are rejected by check_frame"),
    };
    Ok(match to {
        ReferenceFrame::LeftRight => e_m * factor,
        ReferenceFrame::TopBottom => e_m / factor,
    })
}

/// Finite-difference stencil resolving both the longitudinal phase and the
/// fastest transverse oscillation with a fixed phase step per node.
pub fn default_stencil(mode: &Mode) -> Stencil {
    stencil_with_phase_step(mode, DEFAULT_PHASE_STEP)
}

pub fn stencil_with_phase_step(mode: &Mode, delta: f64) -> Stencil {
    let g = &mode.geometry;
    let kmax = mode
        .k()
        .max(std::f64::consts::PI / g.w.min(g.d))
        .max(mode.kx)
        .max(mode.ky);
    let h = delta / kmax;
    Stencil::new([h; 3], h / C, StencilOrder::Second).with_bounds(cross_section_bounds(mode))
}

/// Step `min(w, d) / (64 max(n, m, 1))`, the index-scaled alternative to
/// [`default_stencil`].
pub fn index_scaled_stencil(mode: &Mode) -> Stencil {
    let g = &mode.geometry;
    let h = g.w.min(g.d) / (64.0 * mode.n().max(mode.m()).max(1) as f64);
    Stencil::new([h; 3], h / C, StencilOrder::Second).with_bounds(cross_section_bounds(mode))
}

pub fn cross_section_bounds(mode: &Mode) -> Bounds {
    let g = &mode.geometry;
    Bounds {
        min: [-g.w / 2.0, -g.d / 2.0, f64::NEG_INFINITY],
        max: [g.w / 2.0, g.d / 2.0, f64::INFINITY],
    }
}

/// Evenly spaced grid strictly inside the cross-section, `z` spanning one
/// guide length.
pub fn interior_grid(mode: &Mode, nx: usize, ny: usize, nz: usize) -> Vec<Vec3> {
    let g = &mode.geometry;
    let mut pts = Vec::with_capacity(nx * ny * nz);
    for iz in 0..nz {
        let z = g.length * iz as f64 / nz as f64;
        for iy in 0..ny {
            let y = -g.d / 2.0 + g.d * (iy as f64 + 1.0) / (ny as f64 + 1.0);
            for ix in 0..nx {
                let x = -g.w / 2.0 + g.w * (ix as f64 + 1.0) / (nx as f64 + 1.0);
                pts.push([x, y, z]);
            }
        }
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MaxwellResidual {
    pub div_e: Residual,
    pub div_b: Residual,
    pub faraday: Residual,
    pub ampere: Residual,
}

impl MaxwellResidual {
    pub fn worst_relative(&self) -> f64 {
        Residual::worst_relative([&self.div_e, &self.div_b, &self.faraday, &self.ampere])
    }

    fn merge(self, o: Self) -> Self {
        Self {
            div_e: self.div_e.merge(o.div_e),
            div_b: self.div_b.merge(o.div_b),
            faraday: self.faraday.merge(o.faraday),
            ampere: self.ampere.merge(o.ampere),
        }
    }
}

fn jac_max(j: &[Vec3; 3]) -> f64 {
    j.iter().map(|r| numerics::max_abs(*r)).fold(0.0, f64::max)
}

/// Central-difference residuals of the four Maxwell equations in vacuum.
/// Each residual is judged against the largest derivative term entering the
/// corresponding equation family.
pub fn maxwell_residual(
    mode: &Mode,
    exc: &Excitation,
    points: &[Vec3],
    t: f64,
    st: &Stencil,
) -> Result<MaxwellResidual> {
    check_frame(mode, exc.frame)?;
    let e_field = |p: Vec3, t: f64| fields_unchecked(mode, exc, p, t).e;
    let b_field = |p: Vec3, t: f64| fields_unchecked(mode, exc, p, t).b;
    let per_point: Vec<Result<MaxwellResidual>> = points
        .par_iter()
        .map(|&p| {
            let je = numerics::fd_jacobian(&e_field, p, t, st)?;
            let jb = numerics::fd_jacobian(&b_field, p, t, st)?;
            let de = numerics::fd_dt(&e_field, p, t, st)?;
            let db = numerics::fd_dt(&b_field, p, t, st)?;
            let curl = |j: &[Vec3; 3]| [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
            let e_scale = jac_max(&je).max(numerics::max_abs(db));
            let b_scale = jac_max(&jb).max(numerics::max_abs(de) / (C * C));
            let mut r = MaxwellResidual::default();
            r.div_e.record(je[0][0] + je[1][1] + je[2][2], e_scale);
            r.div_b.record(jb[0][0] + jb[1][1] + jb[2][2], b_scale);
            r.faraday
                .record(numerics::max_abs(numerics::add(curl(&je), db)), e_scale);
            r.ampere.record(
                numerics::max_abs(numerics::sub(curl(&jb), numerics::scale(de, 1.0 / (C * C)))),
                b_scale,
            );
            Ok(r)
        })
        .collect();
    let mut total = MaxwellResidual::default();
    for r in per_point {
        total = total.merge(r?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Family, Geometry, ModeId};
    use std::f64::consts::PI;

    fn rect_mode(family: Family, l: i64) -> Mode {
        Mode::new(
            Geometry::rectangular(0.02, 0.01, 0.05).unwrap(),
            ModeId::new(family, l),
        )
        .unwrap()
    }

    fn plate_mode(family: Family, l: i64) -> Mode {
        Mode::new(
            Geometry::plates(0.2, 0.01, 0.05).unwrap(),
            ModeId::new(family, l),
        )
        .unwrap()
    }

    #[test]
    fn quadrature_functions() {
        let q = Quadratures::new(1.0, 0.0);
        assert_eq!(q.both(0.0, 0.0, 0.0, 0.0), (1.0, 0.0));
        let q = Quadratures::new(0.0, 1.0).with_theta0(PI / 2.0);
        let (f, ft) = q.both(0.0, 0.0, 0.0, 0.0);
        assert!((f - 1.0).abs() < 1e-15 && ft.abs() < 1e-15);
    }

    #[test]
    fn tem_table() {
        let m = plate_mode(Family::Tem, -2);
        let g = eval_g(&m, ReferenceFrame::TopBottom, 0.03, -0.002).unwrap();
        assert_eq!(
            g,
            GVector {
                ey: -1.0,
                bx: -1.0,
                ..Default::default()
            }
        );
        let m = plate_mode(Family::Tem, 1);
        let exc = Excitation::canonical(&m, 1.0, Quadratures::new(1.0, 0.0));
        let s = eval_fields(&m, &exc, [0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(s.e, [0.0, -1.0, 0.0]);
        assert_eq!(s.b, [1.0 / C, 0.0, 0.0]);
    }

    #[test]
    fn te_plates_at_bottom() {
        let m = plate_mode(Family::TePlates { n: 2 }, 1);
        let g = eval_g(&m, ReferenceFrame::LeftRight, 0.0, -m.d() / 2.0).unwrap();
        assert_eq!(g.ex, 0.0);
        assert!((g.bz + m.k_c() / m.k()).abs() < 1e-15);
    }

    #[test]
    fn tm_rect_centre_of_square_guide() {
        let g = Geometry::rectangular(0.01, 0.01, 0.05).unwrap();
        let m = Mode::new(g, ModeId::new(Family::TmRect { n: 1, m: 1 }, 1)).unwrap();
        let gv = eval_g(&m, ReferenceFrame::TopBottom, 0.0, 0.0).unwrap();
        assert!(gv.ey.abs() < 1e-15);
        let want = -(m.kx * m.kx + m.ky * m.ky) / (m.ky * m.beta());
        assert!((gv.ez - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn tm_plates_tangential_e_vanishes_on_top() {
        let m = plate_mode(Family::TmPlates { n: 1 }, 1);
        let exc = Excitation::canonical(&m, 1.0, Quadratures::new(0.3, 0.8));
        let s = eval_fields(&m, &exc, [0.01, m.d() / 2.0, 0.02], 1e-11).unwrap();
        assert!(s.e[2].abs() < 1e-14 && s.b[1].abs() < 1e-14 / C);
    }

    #[test]
    fn domain_and_frame_errors() {
        let m = plate_mode(Family::Tem, 1);
        assert!(matches!(
            eval_g(&m, ReferenceFrame::TopBottom, 0.0, 0.1),
            Err(WaveguideError::OutOfCrossSection { .. })
        ));
        assert!(matches!(
            eval_g(&m, ReferenceFrame::LeftRight, 0.0, 0.0),
            Err(WaveguideError::InvalidFrame { .. })
        ));
        let te = plate_mode(Family::TePlates { n: 1 }, 1);
        assert!(eval_g(&te, ReferenceFrame::TopBottom, 0.0, 0.0).is_err());
    }

    #[test]
    fn convert_frame_square_guide() {
        let g = Geometry::rectangular(0.01, 0.01, 0.05).unwrap();
        let tm = Mode::new(g, ModeId::new(Family::TmRect { n: 1, m: 1 }, 1)).unwrap();
        let te = Mode::new(g, ModeId::new(Family::TeRect { n: 1, m: 1 }, 1)).unwrap();
        let (tb, lr) = (ReferenceFrame::TopBottom, ReferenceFrame::LeftRight);
        assert!((convert_frame(&tm, 1.0, tb, lr).unwrap() - 1.0).abs() < 1e-15);
        assert!((convert_frame(&te, 1.0, tb, lr).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn frames_give_identical_fields() {
        for family in [Family::TmRect { n: 2, m: 1 }, Family::TeRect { n: 1, m: 3 }] {
            let m = rect_mode(family, 2);
            let a = Excitation::new(ReferenceFrame::TopBottom, 1.7, Quadratures::new(0.4, -1.1));
            let b = a.in_frame(&m, ReferenceFrame::LeftRight).unwrap();
            for p in interior_grid(&m, 5, 4, 3) {
                let fa = eval_fields(&m, &a, p, 3e-12).unwrap();
                let fb = eval_fields(&m, &b, p, 3e-12).unwrap();
                for i in 0..3 {
                    assert!((fa.e[i] - fb.e[i]).abs() <= 1e-12 * 1.7 * 10.0);
                    assert!((fa.b[i] - fb.b[i]).abs() <= 1e-12 * 1.7 * 10.0 / C);
                }
            }
        }
    }

    #[test]
    fn maxwell_default_stencil() {
        let cases = [
            plate_mode(Family::Tem, 1),
            plate_mode(Family::TmPlates { n: 2 }, 1),
            plate_mode(Family::TePlates { n: 1 }, -3),
            rect_mode(Family::TeRect { n: 0, m: 2 }, 1),
            rect_mode(Family::TmRect { n: 1, m: 2 }, 2),
            rect_mode(Family::TeRect { n: 2, m: 1 }, -1),
        ];
        for m in cases {
            let exc = Excitation::canonical(&m, 2.0, Quadratures::new(0.7, 0.2));
            let pts = interior_grid(&m, 5, 5, 5);
            let r = maxwell_residual(&m, &exc, &pts, 1e-11, &default_stencil(&m)).unwrap();
            assert!(r.worst_relative() < 1e-6, "{m}: {r:?}");
        }
    }
}
