use maxcompact_core::bounds::{
    best_bound, bound_report, component_bound_shape, format_graph, format_product, format_xg,
    n_iso_bound, ClosedForm, Constant, IsolatedPointBound, PfaffianFormat,
};
use num_bigint::BigUint;
use num_traits::One;

fn big(s: &str) -> BigUint {
    s.parse().unwrap()
}

// Evaluated independently with arbitrary-precision integers.
const G1_D3: &str = "3913682773310478006096374181454410310377586159070959808544768";
const G2_D5: &str = "709803441694928604052074031140629428079727891296209043243642772637343054798240159498233447962659731992932150006119314388217384402944000000000000000000000000000000000000000000";

#[test]
fn closed_form_values() {
    assert_eq!(n_iso_bound(1, 3).unwrap(), big(G1_D3));
    assert_eq!(n_iso_bound(1, 1).unwrap(), big(G1_D3));
    assert_eq!(n_iso_bound(2, 5).unwrap(), big(G2_D5));
    let by_parts = (BigUint::one() << 168u32) * BigUint::from(3u32).pow(21);
    assert_eq!(n_iso_bound(1, 3).unwrap(), by_parts);
    let g3 = (BigUint::one() << 756u32) * BigUint::from(3u32).pow(90) * BigUint::from(7u32).pow(63);
    assert_eq!(n_iso_bound(3, 7).unwrap(), g3);
}

#[test]
fn monotone_in_both_arguments() {
    for g in 1..=4 {
        for d in 1..=12 {
            let v = n_iso_bound(g, d).unwrap();
            assert!(n_iso_bound(g, d + 1).unwrap() >= v);
            assert!(n_iso_bound(g + 1, d).unwrap() >= v);
            if d <= 3 {
                assert_eq!(v, n_iso_bound(g, 3).unwrap());
            }
        }
    }
}

#[test]
fn formats() {
    assert_eq!(
        format_graph(),
        PfaffianFormat::from_u64([9, 9, 1, 6, 144503, 4])
    );
    assert_eq!(
        format_xg(),
        PfaffianFormat::from_u64([9, 9, 3, 12, 144503, 10])
    );
    assert_eq!(
        format_product(2).unwrap(),
        PfaffianFormat::from_u64([18, 18, 3, 24, 144503 * 144503, 20])
    );
    let p5 = format_product(5).unwrap();
    assert_eq!(p5.entries()[4], BigUint::from(144503u32).pow(5));
    assert_eq!(
        p5.to_string(),
        format!("(45, 45, 3, 60, {}, 50)", BigUint::from(144503u32).pow(5))
    );
}

#[test]
fn component_shape_never_resolves_constants() {
    for g in [1, 3] {
        let s = component_bound_shape(g).unwrap();
        assert_eq!(s.g, g);
        assert_eq!(s.c1, Constant::Unresolved);
        assert_eq!(s.c2, Constant::Unresolved);
        assert!(!s.c1.is_resolved());
        assert_eq!(s.exponent_shape, "(c*g)^(c'*g)");
    }
    let r = bound_report(2, 5).unwrap();
    assert_eq!(r.n_iso, big(G2_D5));
    assert_eq!(r.components.g, 2);
}

struct Sharper;

impl IsolatedPointBound for Sharper {
    fn name(&self) -> &str {
        "sharper"
    }
    fn bound(&self, g: u32, _delta: u32) -> Option<BigUint> {
        (g == 1).then(|| BigUint::from(10u32))
    }
}

#[test]
fn extension_point_picks_smallest() {
    let bounds: [&dyn IsolatedPointBound; 2] = [&ClosedForm, &Sharper];
    assert_eq!(
        best_bound(&bounds, 1, 3).unwrap(),
        ("sharper".into(), BigUint::from(10u32))
    );
    let (name, v) = best_bound(&bounds, 2, 5).unwrap();
    assert_eq!((name.as_str(), v), ("closed-form", big(G2_D5)));
}
