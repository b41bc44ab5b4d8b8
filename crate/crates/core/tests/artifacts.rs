use webtaylor::io::{self, IoError};
use webtaylor::laws::data_carrier;
use webtaylor::ll::TruncCfg;
use webtaylor::pcr::{q, Carrier, Partial, Scalar};
use webtaylor::families::{Label, Matrix};
use webtaylor::ll::bang_web;
use webtaylor::spaces::{BaseData, ModelId, SpaceRepr, ALL_MODELS};
use webtaylor::summability::d_space;
use webtaylor::taylor::{taylor_mat, KleisliMor};

#[test]
fn summation_object_round_trips_for_every_model() {
    let dir = tempfile::tempdir().unwrap();
    for m in ALL_MODELS {
        let d = d_space(3, m).unwrap();
        let path = dir.path().join(format!("d-{m}.json"));
        io::save_space(&path, &d).unwrap();
        let back = io::load_space(&path, m.carrier()).unwrap();
        assert_eq!(back.to_record(), d.to_record(), "{m}");
        // canonical: saving again gives identical bytes
        let again = dir.path().join("again.json");
        io::save_space(&again, &back).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }
}

#[test]
fn taylor_output_round_trips() {
    let x = SpaceRepr::make(ModelId::Kothe, &BaseData::web(2)).unwrap();
    let c = data_carrier(ModelId::Kothe);
    let cfg = TruncCfg { bang_degree: 2, s_bound: 3 };
    let bx = bang_web(&x.web, 2, None);
    let (a0, a1) = (Label::Atom(0), Label::Atom(1));
    let m = Matrix::from_entries(
        &bx,
        &x.web,
        c,
        [
            ((Label::bag(vec![a0.clone(), a1.clone()]), a0.clone()), Scalar::Rational(q(-3, 2))),
            ((Label::bag(vec![a1.clone()]), a1.clone()), Scalar::Rational(q(1, 1))),
        ],
    )
    .unwrap();
    let f = KleisliMor::new(x.clone(), x, m, 2).unwrap();
    let t = match taylor_mat(&f, cfg).unwrap() {
        Partial::Defined(t) => t,
        Partial::Undefined { at } => panic!("undefined at {at}"),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    io::save_matrix(&path, &t).unwrap();
    assert_eq!(io::load_matrix(&path, c).unwrap(), t);
}

#[test]
fn wrong_carrier_or_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    io::save_space(&path, &d_space(2, ModelId::Pcoh).unwrap()).unwrap();
    assert!(matches!(io::load_space(&path, Carrier::Bool), Err(IoError::Carrier { .. })));
    assert!(matches!(io::load_matrix(&path, Carrier::NonnegRational), Err(IoError::Kind { .. })));
    std::fs::write(&path, "{\"kind\": \"vector\"").unwrap();
    assert!(matches!(io::load_vector(&path, Carrier::Bool), Err(IoError::Json(_))));
}
