use coarsekit::cover::max_multiplicity;
use coarsekit::generators::{generate, GeneratorSpec};
use coarsekit::pou::equi_oscillation_radius;
use coarsekit::refine::bounded_annulus_refine;
use coarsekit::IndexedFamily;

fn line10_cover() -> IndexedFamily {
    IndexedFamily::from_lists(10, [("A", (0..6).collect::<Vec<_>>()), ("B", (3..10).collect())]).unwrap()
}

#[test]
fn bounded_annulus_on_line10_has_multiplicity_four() {
    let x = generate(&GeneratorSpec::Line { n: 10 }, 0).unwrap().space;
    for residual in [false, true] {
        let (v, cert) = bounded_annulus_refine(&x, &line10_cover(), residual).unwrap();
        assert_eq!(max_multiplicity(&v), 4);
        assert!(cert.verified());
    }
}

#[test]
fn cloud_equi_oscillation_radius_is_finite() {
    let c = generate(&GeneratorSpec::Cloud { levels: 5 }, 0).unwrap();
    let pou = c.pou.unwrap();
    assert_eq!(equi_oscillation_radius(&c.space, &pou, 2.0, 0.5), 4.0);
    assert!(equi_oscillation_radius(&c.space, &pou, 2.0, 0.1).is_finite());
}
