//! One-call verification report over every invariant of a mode.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::boundary::{self, ElectrodeId};
use crate::constants::HBAR;
use crate::error::{Result, WaveguideError};
use crate::fields::{self, Quadratures, ReferenceFrame};
use crate::gauge;
use crate::geometry::Mode;
use crate::motion::{self, QuadratureGrid, QuadraturePath};
use crate::numerics::{self, Residual};
use crate::quanta;

/// Deliberate defects used as negative controls for the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Checks the flux against its propagation law with `k_c` set to zero.
    DropKcTerm,
}

impl FromStr for Fault {
    type Err = WaveguideError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-kc-term" => Ok(Fault::DropKcTerm),
            other => Err(WaveguideError::InvalidMode(format!(
                "unknown fault '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DropKcTerm => f.write_str("drop-kc-term"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Finite-difference residuals.
    pub fd: f64,
    /// Residuals that only involve closed forms.
    pub analytic: f64,
    /// Quadrature comparisons.
    pub quadrature: f64,
    pub propagation: f64,
    /// Bound on `|J| omega / H`.
    pub angular_momentum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fd: 1e-6,
            analytic: 1e-10,
            quadrature: 1e-8,
            propagation: 1e-8,
            angular_momentum: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub quad: Quadratures,
    pub t: f64,
    /// Interior sample lattice for the differential checks.
    pub samples: [usize; 3],
    /// Samples per electrode along `u` and `z`.
    pub electrode_samples: [usize; 2],
    pub time_samples: usize,
    pub tolerances: Tolerances,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quad: Quadratures::new(1.0, 0.5),
            t: 0.0,
            samples: [5, 5, 5],
            electrode_samples: [9, 5],
            time_samples: 8,
            tolerances: Tolerances::default(),
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            detail: None,
            residual,
            tolerance,
            // NaN fails
            pass: residual <= tolerance,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Runs every check on the quantized mode excited with `opts.quad`.
pub fn verify(mode: &Mode, opts: &VerifyOptions) -> Result<Report> {
    let tol = opts.tolerances;
    let frame = fields::canonical_frame(mode.class);
    let qa = quanta::quantize(mode, frame)?;
    let exc = qa.excitation(opts.quad);
    let t = opts.t;
    let st = fields::default_stencil(mode);
    let [nx, ny, nz] = opts.samples;
    let pts = fields::interior_grid(mode, nx, ny, nz);
    let [nu, nzs] = opts.electrode_samples;
    let pairs = motion::canonical_pairs(mode);
    let mut checks = Vec::new();

    let mx = fields::maxwell_residual(mode, &exc, &pts, t, &st)?;
    checks.push(Check::new("maxwell", mx.worst_relative(), tol.fd));

    let bc = boundary::boundary_condition_residual(mode, &exc, nu, nzs, t)?;
    checks.push(Check::new("boundary", bc.relative(), tol.analytic));

    let mut cons = Vec::new();
    for id in ElectrodeId::ALL {
        if boundary::electrode(mode, id).is_ok() {
            let grid = boundary::electrode_grid(mode, id, nu, nzs);
            cons.push(boundary::charge_conservation_residual(
                mode, id, &exc, &grid, t, &st,
            )?);
        }
    }
    if mode.family.is_te() {
        let zs: Vec<f64> = (0..nzs)
            .map(|i| mode.length() * i as f64 / nzs as f64)
            .collect();
        cons.push(boundary::peripheral_current_continuity(mode, &exc, &zs, t)?);
    }
    checks.push(Check::new(
        "conservation",
        Residual::worst_relative(&cons),
        tol.fd,
    ));

    let lor = gauge::lorenz_residual(mode, &exc, &pts, t, &st)?;
    checks.push(Check::new("lorenz", lor.relative(), tol.fd));
    let rec = gauge::reconstruction_residual(mode, &exc, &pts, t, &st)?;
    checks.push(Check::new("reconstruction", rec.relative(), tol.fd));

    let mut links = Vec::new();
    for &pair in pairs {
        let id = reference_id(pair);
        let grid = boundary::electrode_grid(mode, id, nu, nzs);
        links.push(gauge::flux_link_residual(mode, &exc, pair, &grid, t)?);
    }
    checks.push(Check::new(
        "flux_link",
        Residual::worst_relative(&links),
        tol.analytic,
    ));

    let expected = motion::expected_law(mode);
    let law = match opts.fault {
        Some(Fault::DropKcTerm) => expected.without_cutoff(),
        None => expected,
    };
    let pst = motion::propagation_stencil(mode);
    let mut prop = Vec::new();
    for &pair in pairs {
        let grid = boundary::electrode_grid(mode, reference_id(pair), nu, nzs);
        prop.push(motion::flux_propagation_residual(
            mode, pair, &exc, law, &grid, t, &pst,
        )?);
    }
    checks.push(
        Check::new(
            "propagation",
            Residual::worst_relative(&prop),
            tol.propagation,
        )
        .with_detail(expected.name()),
    );

    let qgrid = QuadratureGrid::default_for(mode);
    let (h0, p0) = quanta::closed_form_constants(mode, &opts.quad);
    let mut worst = 0.0f64;
    let mut j_ratio = 0.0f64;
    let n_t = opts.time_samples.max(1);
    let period = 2.0 * std::f64::consts::PI / mode.omega();
    for i in 0..n_t {
        let ti = t + period * i as f64 / n_t as f64;
        for path in [QuadraturePath::Fast, QuadraturePath::Oracle] {
            let mc = motion::motion_by_quadrature(mode, &exc, ti, &qgrid, path)?;
            worst = worst.max(rel(mc.h, h0)).max(rel(mc.p[2], p0));
            j_ratio = j_ratio.max(numerics::norm(mc.j) * mode.omega() / h0.max(f64::MIN_POSITIVE));
        }
    }
    let mut motion_check = Check::new("motion_equality", worst, tol.quadrature)
        .with_detail(format!("|J| omega / H = {j_ratio:e}"));
    motion_check.pass &= j_ratio <= tol.angular_momentum;
    checks.push(motion_check);

    let mut pe = 0.0f64;
    let total = motion::total_energy_by_flux_form(mode, &exc, t, &qgrid)?;
    pe = pe.max(rel(total.total(), h0)).max(rel(total.momentum, p0));
    for &pair in pairs {
        let mf = motion::modal_form(mode, pair, &exc, t, &qgrid)?;
        pe = pe.max(rel(mf.h, h0)).max(rel(mf.p_z, p0));
        let other = exc.in_frame(mode, pair)?;
        for p in &pts {
            let a = fields::eval_fields(mode, &exc, *p, t)?;
            let b = fields::eval_fields(mode, &other, *p, t)?;
            let scale = numerics::max_abs(a.e).max(numerics::max_abs(a.b) * crate::constants::C);
            let d = numerics::max_abs(numerics::sub(a.e, b.e))
                .max(numerics::max_abs(numerics::sub(a.b, b.b)) * crate::constants::C);
            if scale > 0.0 {
                pe = pe.max(d / scale);
            }
        }
    }
    checks.push(Check::new("pair_equivalence", pe, tol.quadrature));

    let mut qc = 0.0f64;
    for &pair in pairs {
        let q = quanta::quantize(mode, pair)?;
        qc = qc.max(rel(q.commutator_prefactor(mode.omega()), HBAR));
        for n in 0..3 {
            let e = q.excitation(quanta::photon_quadratures(n));
            let mc = motion::motion_by_quadrature(mode, &e, t, &qgrid, QuadraturePath::Fast)?;
            qc = qc.max(rel(mc.h, HBAR * mode.omega() * (n as f64 + 0.5)));
        }
    }
    checks.push(Check::new("quantization_closure", qc, tol.quadrature));

    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        mode: mode.label(),
        checks,
        pass,
    })
}

fn reference_id(pair: ReferenceFrame) -> ElectrodeId {
    match pair {
        ReferenceFrame::TopBottom => ElectrodeId::Top,
        ReferenceFrame::LeftRight => ElectrodeId::Left,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Family, Geometry, ModeId};

    #[test]
    fn tem_passes() {
        let m = Mode::new(
            Geometry::plates(0.2, 0.01, 0.05).unwrap(),
            ModeId::new(Family::Tem, 1),
        )
        .unwrap();
        let r = verify(&m, &VerifyOptions::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.checks.len(), 10);
    }

    #[test]
    fn te_rect_passes_and_fault_is_caught() {
        let g = Geometry::rectangular(0.02, 0.013, 0.05).unwrap();
        let m = Mode::new(g, ModeId::new(Family::TeRect { n: 1, m: 1 }, 1)).unwrap();
        let r = verify(&m, &VerifyOptions::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(
            r.check("propagation").unwrap().detail.as_deref(),
            Some("klein-gordon")
        );
        let opts = VerifyOptions {
            fault: Some("drop-kc-term".parse().unwrap()),
            ..VerifyOptions::default()
        };
        let r = verify(&m, &opts).unwrap();
        assert!(!r.pass && !r.check("propagation").unwrap().pass);
        assert!(r.checks.iter().filter(|c| !c.pass).count() == 1);
    }
}
