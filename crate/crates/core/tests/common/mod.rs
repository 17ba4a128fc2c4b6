#![allow(dead_code)]

use std::sync::OnceLock;

use e8_core::chart::{torus_decomposition, Chart};
use e8_core::roots::{compute_roots, RootExtraction};
use e8_core::{CartanSet, RootSystem, E8};

pub struct Fixture {
    pub e8: E8,
    pub cartan: CartanSet,
    pub extraction: RootExtraction,
    pub roots: RootSystem,
    pub chart: Chart,
}

pub fn e8() -> &'static E8 {
    &fixture().e8
}

pub fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let e8 = E8::build().expect("build");
        let cartan = e8.cartan().expect("cartan");
        let extraction = compute_roots(&cartan, 1e-9).expect("roots");
        let roots = RootSystem::from_roots(extraction.roots.clone(), extraction.scale).expect("root system");
        let td = torus_decomposition(&cartan, &extraction).expect("torus decomposition");
        let chart = Chart::new(&e8.adjoint, td).expect("chart");
        Fixture {
            e8,
            cartan,
            extraction,
            roots,
            chart,
        }
    })
}

pub fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}
