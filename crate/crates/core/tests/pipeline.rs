mod support;

use std::sync::Arc;

use nullfront::builtins::Spiral;
use nullfront::completion::{glue, CompletionError, Patch, RelTol};
use nullfront::frontgen::{NullFront, Sigma};
use nullfront::geometry::{CurveDomain, GeneratingFront};
use nullfront::singular::{analyze, completeness_check, Verdict};
use support::front;

#[test]
fn minus_front_is_time_reflection() {
    let plus = front("ellipse", 128, Sigma::Plus, (-1.0, 1.0), 9);
    let minus = front("ellipse", 128, Sigma::Minus, (-1.0, 1.0), 9);
    for j in 0..9 {
        for i in 0..128 {
            let p = plus.point_at(-plus.t_value(j), i);
            let q = minus.point(j, i);
            let c = p.coords();
            assert_eq!(q.coords(), &[-c[0], c[1], c[2]][..]);
        }
    }
    let lp = analyze(&plus).unwrap();
    let lm = analyze(&minus).unwrap();
    assert_eq!(lp.non_cuspidal_count(), lm.non_cuspidal_count());
    for (a, b) in lp.points.iter().zip(&lm.points) {
        assert_eq!(a.t, -b.t);
    }
}

#[test]
fn sampled_ellipse_matches_closed_form_counts() {
    let n = 512;
    let positions: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let s = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [2.0 * s.cos(), s.sin()]
        })
        .collect();
    let g = GeneratingFront::curve_from_samples(positions, None, CurveDomain::full_turn()).unwrap();
    let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (-1.0, 5.0), 32).unwrap();
    let locus = analyze(&f).unwrap();
    assert_eq!(locus.non_cuspidal_count(), 4);
    assert_eq!(completeness_check(&f).unwrap().verdict, Verdict::Complete);
}

#[test]
fn spiral_tube_does_not_glue_to_a_manifold() {
    // Small overlapping windows along the whole spiral: the inner and outer
    // passes coincide outside the bump and separate inside it.
    let g = GeneratingFront::build_curve(Arc::new(Spiral::default()), Spiral::domain(), 512).unwrap();
    let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (-0.5, 0.5), 3).unwrap();
    let patches: Vec<Patch> = (0..16)
        .map(|k| {
            let nodes: Vec<usize> = (k * 32..k * 32 + 40).map(|i| i % 512).collect();
            Patch::from_front(&f, &nodes, &[-0.25, 0.25]).unwrap()
        })
        .collect();
    match glue(patches, RelTol::default()) {
        Err(CompletionError::NonHausdorff { pairs }) => assert!(!pairs.is_empty()),
        other => panic!("expected non-Hausdorff gluing, got {:?}", other.map(|a| a.class_count())),
    }
}

#[test]
fn flat_spiral_glues_to_one_circle() {
    let g = GeneratingFront::build_curve(Arc::new(Spiral::new(0.0, 0.5)), Spiral::domain(), 512).unwrap();
    let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (-0.5, 0.5), 3).unwrap();
    let patches: Vec<Patch> = (0..16)
        .map(|k| {
            let nodes: Vec<usize> = (k * 32..k * 32 + 40).map(|i| i % 512).collect();
            Patch::from_front(&f, &nodes, &[0.0]).unwrap()
        })
        .collect();
    let atlas = glue(patches, RelTol::default()).unwrap();
    // Two turns of the same circle collapse to one.
    assert_eq!(atlas.class_count(), 256);
    assert!(atlas.is_single_closed_curve());
}
