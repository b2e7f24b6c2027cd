use proptest::prelude::*;
use stretch_idla::lattice::{in_cone, shift};
use stretch_idla::{Dir, Edge, Vertex, Window};

fn window() -> impl Strategy<Value = Window> {
    (1u32..12).prop_flat_map(|m| (m + 1..3 * m + 4).prop_map(move |w| Window::new(w, m).unwrap()))
}

fn vertex_in(w: Window) -> impl Strategy<Value = Vertex> {
    let m = w.height() as i64;
    (-200i64..200, 0..=m).prop_map(|(x, y)| Vertex { x: 2 * x + (y & 1), y })
}

proptest! {
    #[test]
    fn index_round_trips((w, v) in window().prop_flat_map(|w| (Just(w), vertex_in(w)))) {
        let i = w.index(v);
        prop_assert!(i < w.vertex_count());
        prop_assert_eq!(w.vertex_at(i), w.canonicalize(v));
        prop_assert_eq!(w.index(shift(v, w.width() as i64)), i);
    }

    #[test]
    fn index_is_a_bijection(w in window()) {
        let mut seen = vec![false; w.vertex_count()];
        for i in 0..w.vertex_count() {
            let v = w.vertex_at(i);
            prop_assert!((v.x + v.y) % 2 == 0);
            prop_assert!(!seen[w.index(v)]);
            seen[w.index(v)] = true;
        }
    }

    #[test]
    fn edges_go_up_one_level(x in -100i64..100, y in 0i64..50, right in any::<bool>()) {
        let v = Vertex { x: 2 * x + (y & 1), y };
        let d = if right { Dir::Right } else { Dir::Left };
        let e = v.edge(d);
        prop_assert_eq!(e.level(), y + 1);
        prop_assert_eq!(e.head().pred(d), v);
        prop_assert!(Vertex::new(e.head().x, e.head().y).is_ok());
        prop_assert_eq!(e.to_string().parse::<Edge>().unwrap(), e);
    }

    #[test]
    fn cone_is_closed_under_steps(bx in -20i64..20, path in prop::collection::vec(any::<bool>(), 0..30)) {
        let base = Vertex::boundary(2 * bx);
        let mut v = base;
        for r in path {
            v = v.step(if r { Dir::Right } else { Dir::Left });
            prop_assert!(in_cone(base, v));
        }
    }

    #[test]
    fn displacement_is_antisymmetric((w, a, b) in window().prop_flat_map(|w| (Just(w), vertex_in(w), vertex_in(w)))) {
        let d = w.displacement(a, b);
        prop_assert!(-(w.width() as i64) < d && d <= w.width() as i64);
        prop_assert_eq!((b.x - a.x - d).rem_euclid(w.period()), 0);
        if d != w.width() as i64 {
            prop_assert_eq!(w.displacement(b, a), -d);
        }
    }
}

#[test]
fn window_invariant() {
    assert!(Window::new(8, 16).is_err());
    assert!(Window::new(8, 7).is_ok());
    assert!(Window::new(8, 8).is_err());
    assert!(Window::new(5, 0).is_err());
}
