use num_rational::BigRational;
use pebbling::cert::{certify, covering_bound, lp_relaxation_bound};
use pebbling::certfile::{convert_decimal, parse_certificate, write_certificate, DEFAULT_MAX_EXPONENT};
use pebbling::{catalog, DyadicRational, Graph};

const BRUHAT: &str = include_str!("../data/certificates/bruhat4_66.cert");
const LEMKE_SQUARE: &str = include_str!("../data/certificates/lemke_square_96.dec");

fn resolve(key: &str) -> Result<Graph, String> {
    catalog(key).map_err(|e| e.to_string())
}

fn d(s: &str) -> DyadicRational {
    s.parse().unwrap()
}

#[test]
fn bruhat_bundle_bounds() {
    let f = parse_certificate(BRUHAT, resolve).unwrap();
    let b = &f.bundle;
    assert_eq!(b.len(), 6);
    let cov = covering_bound(b).unwrap();
    assert_eq!((cov.k.clone(), cov.total_weight.clone()), (d("6"), d("396")));
    assert_eq!(cov.bound, 67);
    let g = b.graph();
    let mins: Vec<&str> = cov.minimisers(b.root()).into_iter().map(|v| g.label(v)).collect();
    assert_eq!(mins, ["v13", "v14", "v15", "v16", "v19", "v20"]);
    let lp = lp_relaxation_bound(b).unwrap();
    assert_eq!(lp.z_hat, BigRational::new(1579.into(), 24.into()));
    assert_eq!(lp.bound, 66);
    assert_eq!(certify(b).unwrap().bound, 66);
}

#[test]
fn bruhat_first_tree_weights() {
    let f = parse_certificate(BRUHAT, resolve).unwrap();
    let s = &f.bundle.strategies()[0];
    let mut w: Vec<u64> = s.arcs().iter().map(|(_, _, w)| w.div_floor(&d("1")).try_into().unwrap()).collect();
    w.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(w, [32, 16, 8, 4, 4, 2, 2, 1, 1]);
}

#[test]
fn lemke_square_bundle_bounds() {
    let f = convert_decimal(LEMKE_SQUARE, resolve, DEFAULT_MAX_EXPONENT).unwrap();
    let b = &f.bundle;
    assert_eq!(b.len(), 20);
    let cov = covering_bound(b).unwrap();
    assert_eq!((cov.k.clone(), cov.total_weight.clone(), cov.bound), (d("20"), d("1904"), 96));
    let lp = lp_relaxation_bound(b).unwrap();
    assert_eq!(lp.z_hat, BigRational::from_integer(95.into()));
    assert_eq!(lp.bound, 96);
}

#[test]
fn lemke_square_rounded_decimals() {
    let f = convert_decimal(LEMKE_SQUARE, resolve, DEFAULT_MAX_EXPONENT).unwrap();
    let b = &f.bundle;
    let g = b.graph();
    let w = |t: usize, v: &str| b.strategies()[t - 1].weight(g.vertex(v).unwrap()).clone();
    assert_eq!(w(1, "(v7,v6)"), d("11/8"));
    assert_eq!(w(9, "(v7,v6)"), d("13/8"));
    assert_eq!(w(9, "(v2,v4)"), d("81/8"));
    assert_eq!(w(9, "(v1,v2)"), d("44"));
    // Mirrors follow the ten listed trees.
    assert_eq!(w(19, "(v2,v1)"), d("44"));
    let totals: Vec<DyadicRational> = b.strategies().iter().map(|s| s.total_weight()).collect();
    assert_eq!(totals[..10], totals[10..]);
}

#[test]
fn lemke_square_mirrored_sums_agree() {
    let f = convert_decimal(LEMKE_SQUARE, resolve, DEFAULT_MAX_EXPONENT).unwrap();
    let b = &f.bundle;
    let map = b.graph().mirror_map().unwrap();
    let sums = b.per_vertex_sums();
    assert!((0..sums.len()).all(|v| sums[v] == sums[map[v]]));
}

#[test]
fn converted_bundle_round_trips_through_exact_format() {
    let f = convert_decimal(LEMKE_SQUARE, resolve, DEFAULT_MAX_EXPONENT).unwrap();
    let text = write_certificate(&f.graph_key, &f.bundle);
    let back = parse_certificate(&text, resolve).unwrap();
    assert_eq!(back.bundle, f.bundle);
    assert_eq!(covering_bound(&back.bundle).unwrap().bound, 96);
}
