use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use stretch_idla::render::{expected_segments, render_svg, RenderOptions, HIGHLIGHT};
use stretch_idla::sidla::run_jump;
use stretch_idla::{build_forest, Vertex, WeightField, WeightProfile, Window};

fn digest(s: &str) -> u64 {
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

#[test]
fn svg_is_well_formed_with_one_line_per_edge() {
    let w = Window::new(32, 12).unwrap();
    let forest = build_forest::<f64>(&WeightField::new(4, WeightProfile::Stretch, w)).unwrap();
    for max_level in [None, Some(5)] {
        let opts = RenderOptions { max_level, ..Default::default() };
        let svg = render_svg(&forest, &opts).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        let lines = root.descendants().filter(|n| n.tag_name().name() == "line").count();
        let dots = root.descendants().filter(|n| n.tag_name().name() == "circle").count();
        assert_eq!(lines, expected_segments(&forest, max_level));
        assert_eq!(dots, 32);
        if max_level.is_none() {
            assert_eq!(lines, w.interior_count());
        }
        let red = root.descendants().filter(|n| n.attribute("stroke") == Some(HIGHLIGHT)).count();
        assert_eq!(red, forest.tree_of(Vertex::ORIGIN).unwrap().iter().filter(|e| e.level() <= max_level.unwrap_or(12) as i64).count());
    }
}

#[test]
fn rendering_is_deterministic() {
    let w = Window::new(24, 10).unwrap();
    let a = render_svg(&run_jump::<f64>(w, 9), &RenderOptions::default()).unwrap();
    let b = render_svg(&run_jump::<f64>(w, 9), &RenderOptions::default()).unwrap();
    assert_eq!(digest(&a), digest(&b));
    let c = render_svg(&run_jump::<f64>(w, 10), &RenderOptions::default()).unwrap();
    assert_ne!(a, c);
}
