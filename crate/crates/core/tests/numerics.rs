mod common;

use std::f64::consts::PI;

use polyflow::combin::enumerate_rank1;
use polyflow::disk::from_trace;
use polyflow::invariants::{homoclinic_tau, invariants, pseudo, pseudo_polynomial};
use polyflow::realize::*;
use polyflow::tracer::{build_graph, TraceConfig};
use polyflow::{from_roots, Polynomial, C64};
use rand::SeedableRng;

fn z2_plus_1() -> Polynomial {
    Polynomial::new(vec![C64::new(1.0, 0.0)]).unwrap()
}

/// `int_R dz / (z^2 - a^2)` for `Im a > 0`.
fn line_integral(a: C64) -> C64 {
    C64::i() * PI / a
}

fn upper_root(rs: &[(C64, usize)]) -> C64 {
    rs.iter().map(|r| r.0).find(|z| z.im > 0.0).unwrap()
}

#[test]
fn reversed_homoclinic_is_rejected() {
    let sg = build_graph(&z2_plus_1(), &TraceConfig::default()).unwrap();
    let mut line = sg.homoclinic_polyline(1).to_vec();
    assert!((homoclinic_tau(&sg.field(), &line).unwrap() - PI).abs() < 1e-9);
    line.reverse();
    assert!(homoclinic_tau(&sg.field(), &line).is_err());
}

#[test]
fn pseudo_time_follows_rotated_roots() {
    let sg = build_graph(&z2_plus_1(), &TraceConfig::default()).unwrap();
    let m = from_trace(&sg).unwrap();
    let (inv, frozen) = invariants(&sg, &m).unwrap();
    let at_base = pseudo(&frozen, &frozen.base_roots).unwrap();
    assert!((at_base.taus[0].re - inv.taus[0]).abs() < 1e-9 && at_base.taus[0].im.abs() < 1e-9);
    let mut prev_im = 0.0;
    for delta in [1e-3, 1e-2] {
        let tracked: Vec<(C64, usize)> = frozen
            .base_roots
            .iter()
            .map(|&(z, m)| (z + if z.im > 0.0 { delta } else { -delta }, m))
            .collect();
        let t = pseudo(&frozen, &tracked).unwrap().taus[0];
        let exact = line_integral(C64::new(delta, 1.0));
        assert!((t - exact).norm() < 1e-8, "{t} vs {exact}");
        assert!(t.im > prev_im);
        prev_im = t.im;
    }
}

#[test]
fn pseudo_is_lipschitz_in_the_roots() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let p = polyflow::gen::random_polynomial(&mut rng, 4);
    let sg = build_graph(&p, &TraceConfig::default()).unwrap();
    let m = from_trace(&sg).unwrap();
    let (_, frozen) = invariants(&sg, &m).unwrap();
    let base = pseudo(&frozen, &frozen.base_roots).unwrap().flatten();
    let dir: Vec<C64> = (0..frozen.base_roots.len()).map(|i| C64::from_polar(1.0, 0.7 * i as f64 + 0.3)).collect();
    let shift = |eps: f64| {
        let mean: C64 = dir.iter().sum::<C64>() / dir.len() as f64;
        let rs: Vec<_> = frozen.base_roots.iter().zip(&dir).map(|(&(z, m), &u)| (z + (u - mean) * eps, m)).collect();
        let v = pseudo(&frozen, &rs).unwrap().flatten();
        v.iter().zip(&base).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let c = shift(1e-5) / 1e-5;
    for eps in [1e-4, 1e-3] {
        let r = shift(eps) / eps;
        assert!(r < 1.5 * c && r > 0.5 * c, "ratio {r} vs {c}");
    }
}

#[test]
fn realize_matches_closed_form() {
    let sg = build_graph(&z2_plus_1(), &TraceConfig::default()).unwrap();
    let m = from_trace(&sg).unwrap();
    let (inv, frozen) = invariants(&sg, &m).unwrap();
    let cfg = RealizeConfig::default();
    let zero = realize(&frozen, &inv, &DeformationTarget::zero(&inv), &cfg).unwrap();
    assert_eq!(zero.iterations, 0);
    assert_eq!(zero.polynomial, z2_plus_1());
    for s in [1.0, -1.0] {
        let target = DeformationTarget { delta_alphas: vec![], delta_taus: vec![C64::new(0.0, s * 1e-3)] };
        let r = realize(&frozen, &inv, &target, &cfg).unwrap();
        let a = upper_root(&r.roots);
        let t = line_integral(a);
        assert!((t - C64::new(PI, s * 1e-3)).norm() < 1e-8, "{t}");
        assert!((a - C64::i()).norm() > 1e-5);
        let again = pseudo_polynomial(&frozen, &r.polynomial).unwrap().taus[0];
        assert!((again - t).norm() < 1e-8);
    }
}

#[test]
fn oversized_target_never_returns_a_wrong_answer() {
    let sg = build_graph(&z2_plus_1(), &TraceConfig::default()).unwrap();
    let m = from_trace(&sg).unwrap();
    let (inv, frozen) = invariants(&sg, &m).unwrap();
    let big = 10.0 * trust_radius(&inv);
    let target = DeformationTarget { delta_alphas: vec![], delta_taus: vec![C64::new(0.0, big)] };
    match realize(&frozen, &inv, &target, &RealizeConfig::default()) {
        Err(_) => {}
        Ok(r) => {
            let t = line_integral(upper_root(&r.roots));
            assert!((t - C64::new(PI, big)).norm() < 1e-8);
        }
    }
}

#[test]
fn both_breakings_of_z2_plus_1_verify() {
    let sg = build_graph(&z2_plus_1(), &TraceConfig::default()).unwrap();
    let m = from_trace(&sg).unwrap();
    let (inv, frozen) = invariants(&sg, &m).unwrap();
    let events = enumerate_rank1(&m);
    assert_eq!(events.len(), 2);
    for e in &events {
        let r = verify_event(&sg, &m, &inv, &frozen, e, &TraceConfig::default()).unwrap();
        assert!(r.matched, "{:?}", r.mismatches);
        assert!(r.observed.graph.homoclinics.is_empty());
        assert_eq!(r.observed.graph.landing.len(), 2);
    }
}

#[test]
fn strip_height_is_the_flux_of_its_source() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let inst = search_instance(&mut rng, &common::cubic_single_loop(), 3000, &TraceConfig::default()).expect("instance");
    let (inv, _) = invariants(&inst.graph, &inst.model).unwrap();
    assert_eq!(inv.alphas.len(), 1);
    let source = inst.graph.equilibria.iter().find(|e| e.kind == polyflow::Kind::Source).unwrap();
    assert!((inv.alphas[0].im - 2.0 * PI * source.residue.re.abs()).abs() < 1e-8);
}

#[test]
fn z2_plus_1_from_its_roots() {
    let rs = vec![(C64::new(0.0, 1.0), 1), (C64::new(0.0, -1.0), 1)];
    assert_eq!(from_roots(&rs).unwrap(), z2_plus_1());
}
