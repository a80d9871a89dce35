#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgquant_core::{Family, Geometry, Mode, ModeClass, ModeId, Quadratures};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// A random mode of the given class with moderate indices and dimensions.
pub fn draw_mode(rng: &mut impl Rng, class: ModeClass) -> Mode {
    let d = rng.random_range(0.005..0.02);
    let length = d * rng.random_range(2.0..20.0);
    let mut l: i64 = rng.random_range(1..=5);
    if rng.random_bool(0.5) {
        l = -l;
    }
    let n = rng.random_range(1..=3u32);
    let m = rng.random_range(1..=3u32);
    let (g, fam) = match class {
        ModeClass::Tem | ModeClass::TmPlates | ModeClass::TePlates => {
            let w = d * rng.random_range(10.0..30.0);
            let fam = match class {
                ModeClass::Tem => Family::Tem,
                ModeClass::TmPlates => Family::TmPlates { n },
                _ => Family::TePlates { n },
            };
            (Geometry::plates(w, d, length).unwrap(), fam)
        }
        _ => {
            let w = d * rng.random_range(1.0..3.0);
            let fam = match class {
                ModeClass::TeRotated => Family::TeRect { n: 0, m },
                ModeClass::TmRect => Family::TmRect { n, m },
                _ => Family::TeRect { n, m },
            };
            (Geometry::rectangular(w, d, length).unwrap(), fam)
        }
    };
    let mode = Mode::new(g, ModeId::new(fam, l)).unwrap();
    assert_eq!(mode.class, class);
    mode
}

pub fn draw_quadratures(rng: &mut impl Rng) -> Quadratures {
    Quadratures::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
        .with_theta0(rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn draw_time(rng: &mut impl Rng, mode: &Mode) -> f64 {
    rng.random_range(0.0..1.0) * std::f64::consts::TAU / mode.omega()
}
