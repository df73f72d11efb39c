use std::collections::BTreeSet;

use sturm::connectivity::{
    basins, connection_graph, descendants, full_heteroclinic_relation, wolfrum_relation, Betweenness, Wolfrum,
};
use sturm::enumerate::enumerate_sturm;
use sturm::families::chafee_infante;
use sturm::kernel::{analyze, nose_positions};
use sturm::verify::labeled_graph_1q;
use sturm::{ConnectionGraph, Label, Tag};

fn id(g: &ConnectionGraph, tag: Tag, index: usize) -> usize {
    g.find_label(Label::new(tag, index)).unwrap()
}

fn names(g: &ConnectionGraph, ids: impl IntoIterator<Item = usize>) -> BTreeSet<String> {
    ids.into_iter().map(|i| g.vertex(i).unwrap().name()).collect()
}

#[test]
fn basins_of_rotated_1q() {
    for q in 2..=6 {
        let g = labeled_graph_1q(q).unwrap();
        let b = basins(&g);
        let sinks = names(&g, b.keys().copied());
        assert_eq!(sinks, ["A0", "B0", "D0"].map(String::from).into());
        let non_sinks: BTreeSet<usize> = g.vertices().iter().filter(|v| v.morse > 0).map(|v| v.id).collect();
        let outside = |sink: usize| names(&g, non_sinks.iter().copied().filter(|v| !b[&sink].contains(v)));
        assert_eq!(outside(id(&g, Tag::A, 0)), ["C1".to_string()].into(), "q = {q}");
        assert_eq!(outside(id(&g, Tag::B, 0)), ["D1".to_string()].into(), "q = {q}");
        // all C, D reach D0; no A, B does
        let d0 = &b[&id(&g, Tag::D, 0)];
        for v in g.vertices() {
            let tag = v.label.unwrap().tag;
            if v.morse > 0 {
                assert_eq!(d0.contains(&v.id), tag != Tag::A && tag != Tag::B, "{}", v.name());
            }
        }
    }
}

#[test]
fn sink_blocking_in_rotated_1q() {
    for q in 2..=6 {
        let g = labeled_graph_1q(q).unwrap();
        let sigma = sturm::transforms::kappa(&sturm::families::closed_form_sigma_1q(q).unwrap());
        let a = analyze(&sigma).unwrap();
        let w = Wolfrum::new(&a).unwrap();
        let (a1, b1, b0, d0, d1, a0) =
            (id(&g, Tag::A, 1), id(&g, Tag::B, 1), id(&g, Tag::B, 0), id(&g, Tag::D, 0), id(&g, Tag::D, 1), id(&g, Tag::A, 0));
        assert_eq!(a.zero_axis(a1, d0), 0);
        assert!(w.blocks(b0, a1, d0));
        assert!(w.blocks(b0, b1, d0));
        assert!(!w.connects(a1, d0) && !w.connects(b1, d0));
        assert!(w.connects(d1, a0) && w.connects(d1, d0));
    }
}

#[test]
fn edges_carry_target_zero_number() {
    for n in [3, 5, 7, 9] {
        for sigma in enumerate_sturm(n).unwrap() {
            let a = analyze(&sigma).unwrap();
            let g = connection_graph(&a).unwrap();
            for &(u, v) in g.edges() {
                assert_eq!(a.zero_axis(u, v), a.morse_axis(v), "{sigma}");
            }
            for v in g.vertices().iter().filter(|v| v.morse > 0) {
                assert!(g.successors(v.id).count() >= 2, "{sigma}: {}", v.id);
            }
        }
    }
}

#[test]
fn axis_and_meander_betweenness_agree() {
    for n in [3, 5, 7, 9] {
        for sigma in enumerate_sturm(n).unwrap() {
            let a = analyze(&sigma).unwrap();
            let h0 = Wolfrum::new(&a).unwrap().relation();
            let h1 = Wolfrum::new(&a).unwrap().with_order(Betweenness::Axis).relation();
            assert_eq!(h0, h1, "{sigma}");
        }
    }
}

#[test]
fn cascading_closure() {
    for sigma in enumerate_sturm(9).unwrap() {
        let a = analyze(&sigma).unwrap();
        let g = connection_graph(&a).unwrap();
        assert_eq!(full_heteroclinic_relation(&g), wolfrum_relation(&a).unwrap(), "{sigma}");
    }
}

#[test]
fn two_noses_only_for_chafee_infante() {
    for d in 1..=4 {
        let n = 2 * d + 1;
        let ci = chafee_infante(d).unwrap();
        for sigma in enumerate_sturm(n).unwrap() {
            assert_eq!(nose_positions(&sigma).len() == 2, sigma == ci, "{sigma}");
        }
    }
}

#[test]
fn chafee_infante_top_reaches_everything() {
    for d in 1..=6 {
        let a = analyze(&chafee_infante(d).unwrap()).unwrap();
        let g = connection_graph(&a).unwrap();
        let top = g.vertices().iter().find(|v| v.morse == d as i32).unwrap().id;
        assert_eq!(descendants(&g, top).len(), 2 * d);
    }
}
