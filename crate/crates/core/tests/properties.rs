use proptest::prelude::*;
use std::sync::Arc;

use webtaylor::families::{mat_compose, Label, Matrix, Vector, Web};
use webtaylor::ll::{bang_web, TruncCfg};
use webtaylor::pcr::{q, Carrier, Partial, Scalar};
use webtaylor::scenario::Scenario;
use webtaylor::spaces::{BaseData, ModelId, SpaceRepr};
use webtaylor::taylor::{series_oracle, taylor_apply_series, KleisliMor};

fn rat() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Scalar::Rational(q(n, d)))
}

fn matrix(dom: &Arc<Web>, cod: &Arc<Web>, xs: &[Scalar]) -> Matrix {
    let cells = dom.labels().into_iter().flat_map(|a| cod.labels().into_iter().map(move |b| (a.clone(), b)));
    Matrix::from_entries(dom, cod, Carrier::Rational, cells.zip(xs.iter().cloned())).unwrap()
}

fn defined<T: std::fmt::Debug>(p: Partial<T>) -> T {
    match p {
        Partial::Defined(t) => t,
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_associative(xs in prop::collection::vec(rat(), 18)) {
        let (w2, w3) = (Arc::new(Web::Atoms(2)), Arc::new(Web::Atoms(3)));
        let r = matrix(&w2, &w3, &xs[..6]);
        let s = matrix(&w3, &w2, &xs[6..12]);
        let t = matrix(&w2, &w3, &xs[12..]);
        let left = defined(mat_compose(&t, &defined(mat_compose(&s, &r).unwrap())).unwrap());
        let right = defined(mat_compose(&defined(mat_compose(&t, &s).unwrap()), &r).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn series_matches_enumeration(coeffs in prop::collection::vec(rat(), 6), xs in prop::collection::vec(rat(), 6)) {
        let x = SpaceRepr::make(ModelId::Kothe, &BaseData::web(2)).unwrap();
        let y = SpaceRepr::make(ModelId::Kothe, &BaseData::web(1)).unwrap();
        let cfg = TruncCfg { bang_degree: 2, s_bound: 3 };
        let bx = bang_web(&x.web, cfg.bang_degree, None);
        let f = KleisliMor::new(x.clone(), y.clone(), matrix(&bx, &y.web, &coeffs), 2).unwrap();
        let vs: Vec<Vector> = xs
            .chunks(2)
            .map(|p| Vector::from_entries(&x.web, Carrier::Rational, [(Label::Atom(0), p[0].clone()), (Label::Atom(1), p[1].clone())]).unwrap())
            .collect();
        prop_assert_eq!(taylor_apply_series(&f, &vs, cfg).unwrap(), series_oracle(&f, &vs, cfg));
    }

    #[test]
    fn vector_records_round_trip(xs in prop::collection::vec(rat(), 3)) {
        let w = Arc::new(Web::Atoms(3));
        let v = Vector::from_entries(&w, Carrier::Rational, (0..3).map(Label::Atom).zip(xs)).unwrap();
        let json = serde_json::to_string(&v.to_record()).unwrap();
        prop_assert_eq!(Vector::from_record(&serde_json::from_str(&json).unwrap()).unwrap(), v);
    }

    #[test]
    fn scenarios_round_trip(seed in 0..=i64::MAX as u64, samples in 1usize..500, d in 1usize..4, n in 1usize..5) {
        let s = Scenario {
            model: "fin".into(),
            seed,
            samples,
            trunc: TruncCfg { bang_degree: d, s_bound: n },
            suites: vec!["ll".into(), "taylor.series".into()],
            ..Scenario::default()
        };
        prop_assert_eq!(Scenario::parse(&s.to_toml().unwrap(), "-").unwrap(), s);
    }
}
