//! Fixed inputs shared by the benchmarks.

use polyflow::disk::{DiskModel, LabelledGraph};
use polyflow::{from_roots, io, Polynomial, C64};

/// `z^2 + 1`, one homoclinic along the real axis.
pub fn z2_plus_1() -> Polynomial {
    from_roots(&[(C64::new(0.0, 1.0), 1), (C64::new(0.0, -1.0), 1)]).expect("simple roots")
}

/// A real sextic with three conjugate root pairs, so the real axis is a homoclinic.
pub fn real_sextic() -> Polynomial {
    let r = [C64::new(-0.7, 0.4), C64::new(0.1, 0.65), C64::new(0.6, 0.3)];
    let roots: Vec<(C64, usize)> = r.iter().flat_map(|&z| [(z, 1), (z.conj(), 1)]).collect();
    from_roots(&roots).expect("simple roots")
}

/// A generic quintic without homoclinics.
pub fn generic_quintic() -> Polynomial {
    let r = [C64::new(0.5, 0.1), C64::new(-0.2, 0.6), C64::new(-0.55, -0.3), C64::new(0.15, -0.5), C64::new(0.1, 0.1)];
    from_roots(&r.map(|z| (z, 1))).expect("simple roots")
}

const OCTIC: &str = r#"{"degree": 8, "homoclinics": [[3, 8], [5, 4], [9, 0], [13, 12]],
    "landing": {"1": 0, "2": 0, "6": 1, "7": 1, "10": 2, "11": 2}}"#;

const OCTIC_TARGET: &str = r#"{"degree": 8, "homoclinics": [[3, 0], [5, 12]],
    "landing": {"1": 0, "2": 0, "4": 3, "6": 1, "7": 1, "8": 1, "9": 2, "10": 2, "11": 2, "13": 4}, "counts": {"N": 5}}"#;

const DECIC: &str = r#"{"degree": 10,
    "homoclinics": [[7, 0], [1, 2], [5, 6], [9, 8], [11, 10], [17, 12], [13, 16]],
    "landing": {"3": 0, "4": 0, "14": 1, "15": 1}}"#;

pub fn octic_model() -> DiskModel {
    io::disk_model_from_json(&io::parse(OCTIC).unwrap()).unwrap()
}

/// Reached from [`octic_model`] by two rank-1 events.
pub fn octic_target() -> LabelledGraph {
    io::labelled_graph_from_json(&io::parse(OCTIC_TARGET).unwrap()).unwrap()
}

pub fn decic_model() -> DiskModel {
    io::disk_model_from_json(&io::parse(DECIC).unwrap()).unwrap()
}
