#![allow(dead_code)]

use std::collections::BTreeMap;

use polyflow::disk::{decompose, DiskModel, LabelledGraph};

/// Landing groups list the separatrices meeting at one equilibrium; centers get the remaining indices.
pub fn graph(d: usize, homs: &[(usize, usize)], groups: &[&[usize]], centers: usize) -> LabelledGraph {
    let mut landing = BTreeMap::new();
    for (e, g) in groups.iter().enumerate() {
        for &l in g.iter() {
            landing.insert(l, e);
        }
    }
    LabelledGraph::new(d, homs.to_vec(), landing, groups.len() + centers)
}

pub fn model(d: usize, homs: &[(usize, usize)], groups: &[&[usize]], centers: usize) -> DiskModel {
    decompose(&graph(d, homs, groups, centers)).expect("reference configuration decomposes")
}

/// Quartic with a center, a sink and a double point.
pub fn center_sink_double() -> DiskModel {
    model(4, &[(1, 2)], &[&[3], &[0, 4, 5]], 1)
}

/// Quintic with one strip and three cylinders.
pub fn strip_three_cylinders() -> DiskModel {
    model(5, &[(1, 2), (5, 4), (7, 6)], &[&[0], &[3]], 3)
}

/// Cubic: one homoclinic around a center, plus a source and a sink.
pub fn cubic_single_loop() -> DiskModel {
    model(3, &[(1, 0)], &[&[2], &[3]], 1)
}

/// Quartic: two cylinders on either side of a double point.
pub fn quartic_two_loops() -> DiskModel {
    model(4, &[(1, 0), (5, 4)], &[&[2, 3]], 2)
}

/// Degree 8, four homoclinics, three double points.
pub fn octic_four_loops() -> DiskModel {
    model(8, &[(3, 8), (5, 4), (9, 0), (13, 12)], &[&[1, 2], &[6, 7], &[10, 11]], 2)
}

/// Degree 9: a six-link chain along one sepal.
pub fn nonic_chain() -> DiskModel {
    model(9, &[(1, 2), (3, 4), (5, 6), (7, 14), (13, 12), (11, 10)], &[&[0, 15], &[8, 9]], 5)
}

/// Degree 10 with a cylinder carrying a wrap-around pair.
pub fn decic_wrap() -> DiskModel {
    model(
        10,
        &[(7, 0), (1, 2), (5, 6), (9, 8), (11, 10), (17, 12), (13, 16)],
        &[&[3, 4], &[14, 15]],
        6,
    )
}

pub fn h(m: &DiskModel, k: usize, j: usize) -> usize {
    m.graph.homoclinic_index((k, j)).unwrap_or_else(|| panic!("({k},{j}) is not a homoclinic"))
}
