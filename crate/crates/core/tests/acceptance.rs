//! One line per acceptance criterion. Runs without the libtest harness so the lines always
//! print; exits non-zero when any criterion fails.

use std::time::Instant;

use webtaylor::families::{Matrix, Vector};
use webtaylor::laws::{default_bases, random_matrix, random_vector, Setup};
use webtaylor::ll::{bang_web, Mutation, TruncCfg};
use webtaylor::pcr::{run_pcm_suite, Carrier, PcrInstance, Partial, Scalar, ALL_CARRIERS};
use webtaylor::report::{LawReport, Status, SuiteReport};
use webtaylor::sample::Sampler;
use webtaylor::scenario::{expand_suites, run_suite};
use webtaylor::spaces::{BaseData, ModelId, SpaceRepr, ALL_MODELS};
use webtaylor::taylor::{series_oracle, taylor_apply_series, taylor_mat, KleisliMor};

const SEED: u64 = 20261016;

type Criterion = (&'static str, fn() -> Verdict);

/// Outcome of one criterion: failures are listed, never hidden.
struct Verdict {
    problems: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { problems: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.problems.push(what());
        }
    }

    fn suites(&mut self, r: &LawReport) {
        for (s, c) in r.failures() {
            self.problems.push(format!("{}[{}] {}: {}", s.id, s.model, c.id, c.witness.clone().unwrap_or_default()));
        }
    }
}

fn setup(model: ModelId, bases: &[BaseData], cfg: TruncCfg, samples: usize) -> Setup {
    Setup::new(model, bases, cfg, samples, SEED).expect("bases build")
}

fn group(prefix: &str) -> Vec<&'static str> {
    expand_suites(&[prefix.to_string()]).unwrap()
}

fn run_group(st: &Setup, prefix: &str) -> LawReport {
    let mut r = LawReport::default();
    for id in group(prefix) {
        r.extend(run_suite(id, st));
    }
    r
}

fn shrink(bases: Vec<BaseData>, n: u32) -> Vec<BaseData> {
    bases
        .into_iter()
        .map(|mut b| {
            b.size = b.size.min(n);
            b.edges.retain(|e| e.0 < n && e.1 < n);
            b
        })
        .collect()
}

fn pcm_battery() -> Verdict {
    let mut v = Verdict::new();
    for carrier in ALL_CARRIERS {
        let c = carrier.tag();
        let pcr = PcrInstance::new(carrier);
        let r: SuiteReport = run_pcm_suite(&pcr, 500, SEED);
        for id in ["unary", "wpa", "zero-neutral", "reindexing"] {
            let case = r.case(id);
            v.require(case.is_some_and(|k| k.status == Status::Pass && k.samples >= 500), || {
                format!("{c}: {id} = {:?}", case.map(|k| (k.status, k.samples, k.witness.clone())))
            });
        }
        if pcr.strong {
            v.require(r.case("pa").is_some_and(|k| k.status == Status::Pass), || format!("{c}: pa"));
        } else {
            v.require(r.case("pa").is_none(), || format!("{c}: non-strong carrier still asserts pa"));
            let note = r.case("pa.not-strong").and_then(|k| k.note.clone()).unwrap_or_default();
            v.notes.push(format!("{c} not strong"));
            if carrier.is_signed() {
                v.require(note.contains("alt(-1)"), || format!("{c}: witness is not the alternating tail: {note}"));
            }
        }
        v.require(r.passed(), || format!("{c}: {:?}", r.failures().map(|k| k.id.clone()).collect::<Vec<_>>()));
    }
    v.notes.push(format!("{} carriers x 500 samples", ALL_CARRIERS.len()));
    v
}

fn lemma_suite() -> Verdict {
    let mut v = Verdict::new();
    for m in ALL_MODELS {
        let st = setup(m, &default_bases(m), TruncCfg::default(), 200);
        if !st.spaces.iter().all(|s| s.q_certified) {
            v.notes.push(format!("{m} skipped (Q not certified)"));
            continue;
        }
        let r = run_suite("spaces.lemmas", &st);
        v.suites(&r);
        for s in &r.suites {
            for id in ["scalar-rearranging", "covering-principle", "linarrow-4way"] {
                let ok = s.case(id).is_some_and(|k| k.status == Status::Pass && k.samples >= 200);
                v.require(ok, || format!("{m}: {id} missing or under 200 samples"));
            }
        }
    }
    v
}

fn predual_suite() -> Verdict {
    let mut v = Verdict::new();
    for m in ALL_MODELS {
        let st = setup(m, &default_bases(m), TruncCfg::default(), 200);
        let r = run_suite("spaces.predual", &st);
        v.suites(&r);
        let exhaustive = r.suites.iter().any(|s| s.case("predual-4way-exhaustive").is_some());
        if matches!(m, ModelId::Rel | ModelId::Coh) {
            v.require(exhaustive, || format!("{m}: expected the exhaustive check"));
        }
        if let Some(note) = r.suites.iter().flat_map(|s| &s.cases).find(|k| k.id.starts_with("predual-4way")).and_then(|k| k.note.clone()) {
            v.notes.push(format!("{m}{}: {note}", if exhaustive { " exhaustive" } else { "" }));
        }
    }
    v
}

fn ll_identities() -> Verdict {
    let mut v = Verdict::new();
    for m in ALL_MODELS {
        for d in 1..=3 {
            let st = setup(m, &default_bases(m), TruncCfg { bang_degree: d, s_bound: 2 }, 40);
            v.suites(&run_group(&st, "ll"));
        }
    }
    v.notes.push("6 models, bang degree 1..3".into());
    v
}

fn summability() -> Verdict {
    let mut v = Verdict::new();
    for m in ALL_MODELS {
        for n in 1..=4 {
            let st = setup(m, &default_bases(m), TruncCfg { bang_degree: 2, s_bound: n }, 30);
            let r = run_group(&st, "sum");
            v.suites(&r);
            if m == ModelId::Wrel && n == 4 {
                let note = r.suites.iter().find_map(|s| s.case("biproduct-collapse")).and_then(|k| k.note.clone());
                v.require(note.as_deref().is_some_and(|s| s.contains("biproducts")), || format!("wrel collapse note {note:?}"));
            }
        }
    }
    v.notes.push("6 models, N = 1..4".into());
    v
}

/// Taylor expansion of random signed morphisms against brute-force enumeration; counts
/// coefficients that come out negative.
fn signed_series(v: &mut Verdict) {
    let mut s = Sampler::derived(SEED, "acceptance/signed");
    let c = Carrier::Rational;
    let x = SpaceRepr::make(ModelId::Kothe, &BaseData::web(2)).unwrap();
    let y = SpaceRepr::make(ModelId::Kothe, &BaseData::web(1)).unwrap();
    let cfg = TruncCfg { bang_degree: 3, s_bound: 3 };
    let bx = bang_web(&x.web, cfg.bang_degree, None);
    let (mut negative, mut checked) = (0usize, 0usize);
    for _ in 0..60 {
        let m: Matrix = random_matrix(&bx, &y.web, c, &mut s);
        let f = KleisliMor::new(x.clone(), y.clone(), m, cfg.bang_degree).unwrap();
        let xs: Vec<Vector> = (0..cfg.s_bound).map(|_| random_vector(&x.web, c, &mut s)).collect();
        let fast = taylor_apply_series(&f, &xs, cfg).unwrap();
        let slow = series_oracle(&f, &xs, cfg);
        v.require(fast == slow, || format!("signed series mismatch for {}", f.mat));
        if let Partial::Defined(t) = taylor_mat(&f, cfg).unwrap() {
            negative += t.iter().filter(|(_, q)| matches!(q, Scalar::Rational(r) if *r < num_zero())).count();
        }
        checked += 1;
    }
    v.require(negative > 0, || "no negative coefficient was exercised".into());
    v.notes.push(format!("signed: {checked} morphisms, {negative} negative Taylor coefficients"));
}

fn num_zero() -> webtaylor::pcr::Q {
    webtaylor::pcr::q(0, 1)
}

fn taylor_suite() -> Verdict {
    let mut v = Verdict::new();
    for m in [ModelId::Pcoh, ModelId::Fin, ModelId::Kothe] {
        for (d, n) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let st = setup(m, &shrink(default_bases(m), 2), TruncCfg { bang_degree: d, s_bound: n }, 30);
            v.suites(&run_group(&st, "taylor"));
        }
    }
    signed_series(&mut v);
    v
}

fn mutations() -> Verdict {
    let mut v = Verdict::new();
    let targets = [(Mutation::Dig, "ll.comonad"), (Mutation::Seely2, "ll.seely"), (Mutation::Coalgebra, "taylor.coalgebra")];
    for m in ALL_MODELS {
        let mut st = setup(m, &shrink(default_bases(m), 2), TruncCfg { bang_degree: 2, s_bound: 2 }, 20);
        for (mutation, suite) in targets {
            st.mutation = None;
            let clean = run_suite(suite, &st);
            v.require(clean.passed(), || format!("{m}: {suite} fails before mutation"));
            st.mutation = Some(mutation);
            let bad = run_suite(suite, &st);
            let caught = bad.failures().find(|(_, c)| c.witness.as_deref().is_some_and(|w| !w.is_empty()));
            match caught {
                Some((_, c)) if m == ModelId::Pcoh => v.notes.push(format!("{mutation:?}: {} {}", c.id, c.witness.clone().unwrap())),
                Some(_) => {}
                None => v.problems.push(format!("{m}: {mutation:?} mutation not caught by {suite}")),
            }
        }
    }
    v
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("PCM axiom battery", pcm_battery),
        ("lemma suite", lemma_suite),
        ("predual characterization", predual_suite),
        ("linear-logic identities", ll_identities),
        ("summability and representability", summability),
        ("Taylor suite", taylor_suite),
        ("mutation sanity", mutations),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let ok = v.problems.is_empty();
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} {name} ({:.1}s){}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            if v.notes.is_empty() { String::new() } else { format!(" [{}]", v.notes.join("; ")) }
        );
        for p in v.problems.iter().take(10) {
            println!("    {p}");
        }
    }
    println!("acceptance: {} of 7 criteria pass", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
