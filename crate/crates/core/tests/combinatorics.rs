mod common;

use std::collections::BTreeMap;

use common::*;
use polyflow::combin::*;
use polyflow::disk::{DiskModel, LabelledGraph};

fn edge_pairs(m: &DiskModel) -> Vec<((usize, usize), (usize, usize))> {
    let hs = &m.graph.homoclinics;
    build_hgraph(m).edges.iter().map(|e| (hs[e.from], hs[e.to])).collect()
}

fn path(m: &DiskModel, homs: &[(usize, usize)]) -> AdmissiblePath {
    let g = build_hgraph(m);
    let vertices: Vec<usize> = homs.iter().map(|&(k, j)| h(m, k, j)).collect();
    let zones = vertices.windows(2).map(|w| g.edge(w[0], w[1]).expect("edge exists").zone).collect();
    AdmissiblePath { vertices, zones }
}

fn find<'a>(events: &'a [BifurcationEvent], broken: &[(usize, usize)], sign: Sign) -> &'a BifurcationEvent {
    events.iter().find(|e| e.broken == broken && e.sign == sign).expect("event enumerated")
}

#[test]
fn wrap_graph_edges() {
    let m = decic_wrap();
    let e = edge_pairs(&m);
    assert!(e.contains(&((5, 6), (1, 2))));
    assert!(!e.contains(&((1, 2), (5, 6))));
    assert!(e.contains(&((7, 0), (17, 12))));
    assert!(e.contains(&((17, 12), (7, 0))));
    assert_eq!(e.len(), 17);
}

#[test]
fn small_models_have_no_edges() {
    for m in [cubic_single_loop(), center_sink_double()] {
        assert!(build_hgraph(&m).edges.is_empty());
    }
}

#[test]
fn three_cylinder_chain() {
    let m = strip_three_cylinders();
    assert_eq!(edge_pairs(&m), vec![((7, 6), (5, 4))]);
    let c = hchain(&m, &[h(&m, 7, 6), h(&m, 5, 4)]).unwrap();
    assert_eq!(c.itinerary, vec![false]);
    assert!(hchain(&m, &[h(&m, 1, 2), h(&m, 5, 4)]).is_err());
}

#[test]
fn can_form_across_sepals() {
    let m = octic_four_loops();
    let c = can_form(&m, h(&m, 5, 4), h(&m, 13, 12)).expect("chain exists");
    let homs: Vec<_> = c.links.iter().map(|&i| m.graph.homoclinics[i]).collect();
    assert_eq!(homs, vec![(5, 4), (3, 8), (9, 0), (13, 12)]);
    assert!(can_form(&m, h(&m, 5, 4), h(&m, 5, 4)).is_none());
    assert!(can_form(&m, h(&m, 13, 12), h(&m, 5, 4)).is_none());
    let s = strip_three_cylinders();
    assert!(can_form(&s, h(&s, 1, 2), h(&s, 5, 4)).is_none());
}

#[test]
fn partial_sum_system() {
    // itinerary + + + - - + over seven links
    let chain = HChain { links: (0..7).collect(), itinerary: vec![true, true, true, false, false, true] };
    let sys = feasibility(&chain, 1e-3).unwrap();
    assert_eq!(sys.len(), 1);
    let s = &sys[0];
    assert_eq!(s.rel, vec![Rel::Lt, Rel::Lt, Rel::Lt, Rel::Gt, Rel::Gt, Rel::Lt, Rel::Eq]);
    for (i, row) in s.lhs.iter().enumerate() {
        let expect: Vec<f64> = (0..7).map(|c| if c <= i { 1.0 } else { 0.0 }).collect();
        assert_eq!(row, &expect);
    }
    assert!(s.satisfied(&s.witness, MARGIN_MIN * 1e-3));
}

#[test]
fn two_link_system_and_simple_breaking() {
    let chain = HChain { links: vec![0, 1], itinerary: vec![true] };
    let s = &feasibility(&chain, 0.01).unwrap()[0];
    assert_eq!(s.rel, vec![Rel::Lt, Rel::Eq]);
    assert!((s.witness[0] + 0.01).abs() < 1e-15 && (s.witness[1] - 0.01).abs() < 1e-15);
    let one = feasibility(&HChain { links: vec![0], itinerary: vec![] }, 0.01).unwrap();
    assert_eq!(one.len(), 2);
    assert_eq!((one[0].rel[0], one[1].rel[0]), (Rel::Lt, Rel::Gt));
}

#[test]
fn single_loop_cubic_events() {
    let m = cubic_single_loop();
    let ev = enumerate_rank1(&m);
    assert_eq!(ev.len(), 2);
    // Below: s_1 falls into the former center, which becomes a sink.
    let minus = find(&ev, &[(1, 0)], Sign::Minus);
    assert_eq!((minus.land_first, minus.land_last), ((0, 0), (1, 2)));
    let out = apply_event(&m, minus).unwrap();
    assert!(out.graph.homoclinics.is_empty());
    assert_eq!(out.graph.landing[&1], 2);
    assert_eq!(out.kinds[2], polyflow::disk::EqKind::Sink);
    let plus = find(&ev, &[(1, 0)], Sign::Plus);
    let out = apply_event(&m, plus).unwrap();
    assert_eq!(out.graph.landing[&0], 2);
    assert_eq!(out.kinds[2], polyflow::disk::EqKind::Source);
}

#[test]
fn two_loop_quartic_forms_one_four() {
    let m = quartic_two_loops();
    let ev = enumerate_rank1(&m);
    let e = find(&ev, &[(1, 0), (5, 4)], Sign::Plus);
    assert_eq!(e.formed, vec![(1, 4)]);
    let out = apply_event(&m, e).unwrap();
    assert_eq!(out.graph.homoclinics, vec![(1, 4)]);
    assert_eq!((out.graph.landing[&0], out.graph.landing[&5]), (1, 2));
    assert_eq!(out.kinds[1], polyflow::disk::EqKind::Source);
    assert_eq!(out.kinds[2], polyflow::disk::EqKind::Sink);
}

#[test]
fn chain_of_three_forms_two() {
    let m = nonic_chain();
    let ev = enumerate_rank1(&m);
    let e = find(&ev, &[(1, 2), (7, 14), (11, 10)], Sign::Minus);
    assert_eq!(e.formed, vec![(1, 14), (7, 10)]);
    assert_eq!(e.rank, 1);
    let out = apply_event(&m, e).unwrap();
    assert_eq!(out.counts.h, m.counts.h - 1);
    assert_eq!(out.counts.dim(), m.counts.dim() + 1);
}

#[test]
fn every_edge_has_its_single_edge_event() {
    let m = decic_wrap();
    let ev = enumerate_rank1(&m);
    for e in build_hgraph(&m).edges {
        let pair = [m.graph.homoclinics[e.from], m.graph.homoclinics[e.to]];
        assert!(ev.iter().any(|x| x.broken == pair), "{pair:?}");
    }
}

#[test]
fn union_shapes() {
    let m = decic_wrap();
    let g = build_hgraph(&m);
    let p1 = path(&m, &[(5, 6), (7, 0), (17, 12), (13, 16)]);
    let p2 = path(&m, &[(11, 10), (9, 8)]);
    assert_eq!(validate_union(&g, &[p1, p2]).unwrap(), UnionVerdict::Accept);

    let a = path(&m, &[(5, 6), (1, 2)]);
    let b = path(&m, &[(7, 0), (1, 2)]);
    assert_eq!(validate_union(&g, &[a, b]).unwrap(), UnionVerdict::SharedEnd(h(&m, 1, 2)));

    let a = path(&m, &[(5, 6), (7, 0), (17, 12)]);
    let b = path(&m, &[(9, 8), (7, 0), (1, 2)]);
    assert_eq!(validate_union(&g, &[a, b]).unwrap(), UnionVerdict::DirectionConflict(h(&m, 7, 0)));

    let a = path(&m, &[(7, 0), (9, 8)]);
    let b = path(&m, &[(7, 0), (11, 10)]);
    assert_eq!(validate_union(&g, &[a, b]).unwrap(), UnionVerdict::SharedStart(h(&m, 7, 0)));
}

#[test]
fn two_formations_in_two_steps() {
    let m = octic_four_loops();
    let landing: BTreeMap<usize, usize> =
        [(1, 0), (2, 0), (4, 3), (6, 1), (7, 1), (8, 1), (9, 2), (10, 2), (11, 2), (13, 4)].into_iter().collect();
    let target = LabelledGraph::new(8, vec![(3, 0), (5, 12)], landing, 5);
    let seq = decompose_rank_k(&m, &target, 10_000).unwrap().expect("sequence found");
    assert_eq!(seq.len(), 2);
    let mut cur = m.clone();
    for e in &seq {
        cur = apply_event(&cur, e).unwrap();
    }
    assert_eq!(cur.graph.homoclinics, target.homoclinics);
    assert_eq!(cur.graph.landing, target.landing);
}

#[test]
fn rank_one_target_gives_one_step() {
    let m = quartic_two_loops();
    let e = enumerate_rank1(&m).into_iter().find(|e| e.broken.len() == 2).unwrap();
    let target = apply_event(&m, &e).unwrap().graph;
    let seq = decompose_rank_k(&m, &target, 1000).unwrap().unwrap();
    assert_eq!(seq.len(), 1);
}

#[test]
fn target_with_other_multiplicities_is_rejected() {
    let m = cubic_single_loop();
    let target = graph(3, &[], &[&[0, 1, 2, 3]], 0);
    assert!(decompose_rank_k(&m, &target, 100).is_err());
}
