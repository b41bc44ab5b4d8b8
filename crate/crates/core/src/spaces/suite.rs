//! Law suites for spaces: orthogonality lemmas, the predual characterization of morphisms,
//! and exhaustive biorthogonal closure on finite carriers.

use super::{all_vectors, ground_points, member_hom, orth_rel, MembershipVerdict, ModelId, SpaceError, SpaceRepr};
use crate::families::{abs_mat, abs_vec, is_clique, mat_apply, mat_compose, scalar_product, tensor_vec, Matrix, Vector, Web};
use crate::laws::{random_matrix, random_vector, sample_vec, Setup};
use crate::pcr::{Carrier, Partial, Scalar};
use crate::report::{Case, SuiteReport};
use crate::sample::Sampler;

pub const SPACES_SUITES: [&str; 3] = ["spaces.lemmas", "spaces.predual", "spaces.biorth"];

pub fn run_spaces_suite(id: &str, st: &Setup) -> SuiteReport {
    let mut suite = SuiteReport::new(id, st.model.tag());
    let res = match id {
        "spaces.lemmas" => lemmas(st, &mut suite),
        "spaces.predual" => predual(st, &mut suite),
        "spaces.biorth" => biorth(st, &mut suite),
        _ => Err(SpaceError::BadBase(format!("unknown suite {id}"))),
    };
    if let Err(e) = res {
        let mut c = Case::new("setup");
        c.fail(e.to_string());
        suite.push(c.finish());
    }
    suite
}

/// Base spaces and their duals: all carry exact P and certified Q.
fn certified_spaces(st: &Setup) -> Vec<SpaceRepr> {
    let mut v: Vec<SpaceRepr> = st.spaces.clone();
    v.extend(st.spaces.iter().map(SpaceRepr::dual));
    v.push(SpaceRepr::one(st.model));
    v
}

fn pairs(spaces: &[SpaceRepr], max_entries: usize) -> Vec<(&SpaceRepr, &SpaceRepr)> {
    let mut out = Vec::new();
    for a in spaces {
        for b in spaces {
            if a.web.size() * b.web.size() <= max_entries {
                out.push((a, b));
            }
        }
    }
    out
}

fn pairing_in_ball(x: &SpaceRepr, v: &Vector, w: &Vector) -> Result<bool, SpaceError> {
    Ok(orth_rel(&x.pcr(), v, w)?)
}

/// A smaller vector: rationals scaled entrywise into [0, 1], two-valued entries dropped at random.
fn shrink(y: &Vector, s: &mut Sampler) -> Vector {
    let c = y.carrier;
    let m = y
        .iter()
        .filter_map(|(l, v)| {
            let w = match v {
                Scalar::Ext(None) if s.chance(1, 2) => v.clone(),
                Scalar::Ext(None) => c.from_q(s.small_q(false)).unwrap(),
                _ if v.as_q().is_some() => c.mul(v, &c.from_q(s.unit_q()).unwrap()),
                _ if s.chance(1, 2) => c.zero(),
                _ => v.clone(),
            };
            (!w.is_zero()).then(|| (l.clone(), w))
        })
        .collect();
    Vector::from_map(&y.web, c, m)
}

fn lemmas(st: &Setup, suite: &mut SuiteReport) -> Result<(), SpaceError> {
    let spaces = certified_spaces(st);
    let c = st.model.carrier();
    let mut s = st.sampler("spaces.lemmas");

    let mut gens = Case::new("generators");
    for x in &spaces {
        let pcr = x.pcr();
        for p in &x.p {
            for q in &x.q {
                gens.check(orth_rel(&pcr, p, q)?, || format!("{p} not orthogonal to {q} on {}", x.web));
            }
        }
        if !x.web.is_empty() {
            gens.check(super::is_covering(&x.p, &x.web), || format!("P of {} is not a covering", x.web));
            gens.check(super::is_covering(&x.q, &x.web), || format!("Q of {} is not a covering", x.web));
        }
    }
    suite.push(gens.finish());

    let pr = pairs(&spaces, 9);
    let mut rearr = Case::new("scalar-rearranging");
    let mut cover = Case::new("covering-principle");
    let mut down = Case::new("downward-closure");
    let mut four = Case::new("linarrow-4way");
    let mut dist = Case::new("strong-distributivity");
    let (mut n_in, mut n_out) = (0, 0);
    for k in 0..st.samples {
        let (x, y) = pr[k % pr.len()];
        let m = random_matrix(&x.web, &y.web, c, &mut s);
        let xv = random_vector(&x.web, c, &mut s);
        let yv = random_vector(&y.web, c, &mut s);

        // ⟨s·x, y⟩ and ⟨s, x⊗y⟩ agree when s·x is defined; same for the transpose
        let whole = scalar_product(&m.as_vector(), &tensor_vec(&xv, &yv)?)?;
        if let Partial::Defined(sx) = mat_apply(&m, &xv)? {
            let lhs = scalar_product(&sx, &yv)?;
            rearr.check(lhs.same_outcome(&whole), || format!("s={m}, x={xv}, y={yv}: ⟨s·x,y⟩={lhs}, ⟨s,x⊗y⟩={whole}"));
        } else {
            rearr.vacuous();
        }
        if let Partial::Defined(ty) = mat_apply(&m.transpose(), &yv)? {
            let lhs = scalar_product(&xv, &ty)?;
            rearr.check(lhs.same_outcome(&whole), || format!("s={m}, x={xv}, y={yv}: ⟨x,s⊥·y⟩={lhs}, ⟨s,x⊗y⟩={whole}"));
        } else {
            rearr.vacuous();
        }

        // pairings of s against x ⊗ (a covering) all defined ⟹ s·x defined
        let pt = sample_vec(x, c, &mut s);
        let mut all_defined = true;
        for q in &y.q {
            all_defined &= scalar_product(&m.as_vector(), &tensor_vec(&pt, q)?)?.is_defined();
        }
        if all_defined {
            let r = mat_apply(&m, &pt)?;
            cover.check(r.is_defined(), || format!("s={m}, x={pt}: s·x undefined though every pairing with Q is defined"));
        } else {
            cover.vacuous();
        }

        // y a point, x ≤ y ⟹ x a point
        let yp = sample_vec(y, c, &mut s);
        if y.member_point(&yp)?.is_refuted() {
            down.vacuous();
        } else {
            let xs = shrink(&yp, &mut s);
            debug_assert!(xs.leq(&yp));
            let v = y.member_point(&xs)?;
            down.check(!v.is_refuted(), || format!("{xs} ≤ {yp} but {v:?}"));
        }

        // four ways to say s : X ⊸ Y
        let cand = if s.chance(1, 2) { crate::laws::sample_morphism(x, y, c, &mut s) } else { m.clone() };
        let v = linarrow_conditions(x, y, &cand, &mut s)?;
        if v[0] {
            n_in += 1;
        } else {
            n_out += 1;
        }
        four.check(v.iter().all(|b| *b == v[0]), || format!("s={cand}: conditions {v:?}"));

        // t∘(s1 + s2) defined ⟹ t∘s1 + t∘s2 defined and equal
        let z = &spaces[k % st.spaces.len()];
        let t = random_matrix(&y.web, &z.web, c, &mut s);
        let m2 = random_matrix(&x.web, &y.web, c, &mut s);
        match m.add(&m2)? {
            Partial::Defined(sum) => match mat_compose(&t, &sum)? {
                Partial::Defined(lhs) => {
                    let rhs = match (mat_compose(&t, &m)?, mat_compose(&t, &m2)?) {
                        (Partial::Defined(a), Partial::Defined(b)) => a.add(&b)?,
                        _ => Partial::undefined("pieces"),
                    };
                    dist.check(rhs.as_ref() == Some(&lhs), || format!("t∘(s1+s2)={lhs}, t∘s1+t∘s2={rhs}"));
                }
                Partial::Undefined { .. } => dist.vacuous(),
            },
            Partial::Undefined { .. } => dist.vacuous(),
        }
    }
    four.note(format!("{n_in} morphisms, {n_out} non-morphisms"));
    for k in [rearr, cover, down, four, dist] {
        suite.push(k.finish());
    }

    if let Some(sc) = st.model.signed() {
        let mut tri = Case::new("triangle");
        for k in 0..st.samples {
            let (x, y) = pr[k % pr.len()];
            let z = &spaces[k % st.spaces.len()];
            let sm = random_matrix(&x.web, &y.web, sc, &mut s);
            let tm = random_matrix(&y.web, &z.web, sc, &mut s);
            let lhs = abs_mat(&mat_compose(&tm, &sm)?.expect_defined("finite sums of a signed carrier"))?;
            let rhs = mat_compose(&abs_mat(&tm)?, &abs_mat(&sm)?)?;
            match rhs {
                Partial::Defined(r) => {
                    let bad = lhs.iter().find(|((a, b), v)| !c.leq(v, &r.get(a, b))).map(|(k, _)| k.clone());
                    tri.check(bad.is_none(), || format!("|t∘s| > |t|∘|s| at {:?}", bad.unwrap()));
                }
                Partial::Undefined { .. } => tri.vacuous(),
            }
            let xv = random_vector(&x.web, sc, &mut s);
            let yv = random_vector(&x.web, sc, &mut s);
            let l = scalar_product(&xv, &yv)?.expect_defined("signed finite sum");
            let r = scalar_product(&abs_vec(&xv)?, &abs_vec(&yv)?)?;
            match r {
                Partial::Defined(r) => {
                    let la = sc.abs(&l).map_err(crate::families::FamilyError::from)?;
                    tri.check(c.leq(&la, &r), || format!("|⟨{xv},{yv}⟩| = {la} > {r}"))
                }
                Partial::Undefined { .. } => {
                    tri.vacuous();
                    true
                }
            };
        }
        suite.push(tri.finish());

        let mut semi = Case::new("semimodule");
        for k in 0..st.samples {
            let x = &spaces[k % spaces.len()];
            let v = random_vector(&x.web, sc, &mut s);
            let a = x.member_semimod(&v)?;
            let b = x.member_point(&abs_vec(&v)?)?;
            semi.check(a == b, || format!("{v}: {a:?} vs |x|: {b:?}"));
        }
        suite.push(semi.finish());
    }
    Ok(())
}

/// Ground set of points of X, or a sample of vectors when every vector is a point.
fn ground_or_sample(x: &SpaceRepr, s: &mut Sampler) -> Vec<Vector> {
    match ground_points(x) {
        Some(g) => g,
        None => (0..8).map(|_| random_vector(&x.web, x.carrier(), s)).collect(),
    }
}

fn oracle(x: &SpaceRepr, v: &Vector) -> bool {
    x.oracle_point(v).unwrap_or(true)
}

/// [member_hom not refuted, maps points to points, transpose maps dual points to dual points,
/// pairs into B against ground points].
fn linarrow_conditions(x: &SpaceRepr, y: &SpaceRepr, m: &Matrix, s: &mut Sampler) -> Result<[bool; 4], SpaceError> {
    let a = !member_hom(x, y, m)?.is_refuted();
    let gx = ground_or_sample(x, s);
    let yd = y.dual();
    let gy = ground_or_sample(&yd, s);
    let mut b = true;
    for p in &gx {
        b &= match mat_apply(m, p)? {
            Partial::Defined(v) => oracle(y, &v),
            Partial::Undefined { .. } => false,
        };
    }
    let xd = x.dual();
    let mt = m.transpose();
    let mut c = true;
    for q in &gy {
        c &= match mat_apply(&mt, q)? {
            Partial::Defined(v) => oracle(&xd, &v),
            Partial::Undefined { .. } => false,
        };
    }
    let sv = m.as_vector();
    let mut d = true;
    'outer: for p in &gx {
        for q in &gy {
            let mut pq = tensor_vec(p, q)?;
            pq.web = sv.web.clone();
            if !pairing_in_ball(x, &sv, &pq)? {
                d = false;
                break 'outer;
            }
        }
    }
    Ok([a, b, c, d])
}

/// The four conditions of the predual characterization, with ground truth first.
pub fn predual_conditions(x: &SpaceRepr, y: &SpaceRepr, m: &Matrix, s: &mut Sampler) -> Result<[bool; 4], SpaceError> {
    let sv = m.as_vector();
    let gx = ground_or_sample(x, s);
    let gy = ground_or_sample(&y.dual(), s);
    let mut truth = true;
    'outer: for p in &gx {
        for q in &gy {
            let mut pq = tensor_vec(p, q)?;
            pq.web = sv.web.clone();
            if !pairing_in_ball(x, &sv, &pq)? {
                truth = false;
                break 'outer;
            }
        }
    }
    let gen = !member_hom(x, y, m)?.is_refuted();
    let (app, tr) = super::member_hom_by_application(x, y, m)?;
    Ok([truth, gen, app, tr])
}

fn predual(st: &Setup, suite: &mut SuiteReport) -> Result<(), SpaceError> {
    let spaces = certified_spaces(st);
    let c = st.model.carrier();
    let mut s = st.sampler("spaces.predual");
    let exhaustive = c.finite_values().is_some();
    let mut four = Case::new(if exhaustive { "predual-4way-exhaustive" } else { "predual-4way" });
    let mut cert = Case::new("verdicts-certified");
    let (mut n_in, mut n_out) = (0usize, 0usize);
    for (x, y) in pairs(&spaces, 9) {
        let mats: Vec<Matrix> = if exhaustive {
            let pw = Web::pair(&x.web, &y.web);
            all_vectors(&pw, c).unwrap().iter().map(|v| Matrix::from_vector(v).unwrap()).collect()
        } else {
            (0..st.samples.max(1)).map(|_| predual_sample(x, y, c, &mut s)).collect()
        };
        for m in mats {
            let v = predual_conditions(x, y, &m, &mut s)?;
            if v[0] {
                n_in += 1;
            } else {
                n_out += 1;
            }
            four.check(v.iter().all(|b| *b == v[0]), || format!("{} ⊸ {}: s={m}: (1)-(4) = {v:?}", x.web, y.web));
            let verdict = member_hom(x, y, &m)?;
            cert.check(!matches!(verdict, MembershipVerdict::ProbeSound { .. }), || format!("s={m}: {verdict:?}"));
        }
    }
    four.note(format!("{n_in} morphisms, {n_out} non-morphisms"));
    suite.push(four.finish());
    suite.push(cert.finish());
    Ok(())
}

/// Matrices spread around the boundary of the morphisms.
fn predual_sample(x: &SpaceRepr, y: &SpaceRepr, c: Carrier, s: &mut Sampler) -> Matrix {
    if x.model == ModelId::Pcoh {
        let mut m = Matrix::zero(&x.web, &y.web, c);
        for a in x.web.labels() {
            for b in y.web.labels() {
                if s.chance(2, 3) {
                    m.set(a.clone(), b, c.from_q(s.unit_q()).unwrap());
                }
            }
        }
        m
    } else {
        random_matrix(&x.web, &y.web, c, s)
    }
}

/// Closure operators computed by enumerating every vector of a finite carrier.
fn perp(x: &SpaceRepr, all: &[Vector], gens: &[Vector]) -> Result<Vec<Vector>, SpaceError> {
    let pcr = x.pcr();
    let mut out = Vec::new();
    for v in all {
        let mut ok = true;
        for g in gens {
            if !orth_rel(&pcr, v, g)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(v.clone());
        }
    }
    Ok(out)
}

fn biorth(st: &Setup, suite: &mut SuiteReport) -> Result<(), SpaceError> {
    let c = st.model.carrier();
    let mut case = Case::new("biorth-closure");
    let mut gap = Case::new("tensor-dual-predual");
    if c.finite_values().is_none() {
        case.note("carrier is infinite: closure not enumerable");
        suite.push(case.finish());
        return Ok(());
    }
    for x in certified_spaces(st) {
        let all = all_vectors(&x.web, c).expect("finite carrier");
        let pp = perp(&x, &all, &perp(&x, &all, &x.p)?)?;
        let qp = perp(&x, &all, &x.q)?;
        case.check(pp == qp, || format!("{}: P⊥⊥ has {} vectors, Q⊥ has {}", x.web, pp.len(), qp.len()));
        if let Some(o) = &x.oracle {
            let want: Vec<Vector> = all.iter().filter(|v| o.is_point(v)).cloned().collect();
            case.check(qp == want, || format!("{}: Q⊥ has {} vectors, oracle {}", x.web, qp.len(), want.len()));
        }
    }
    suite.push(case.finish());

    // does Q_X ⊗ Q_Y cut out the points of X ⊗ Y? measured, never assumed
    let mut exact = 0;
    let mut total = 0;
    for (a, b) in pairs(&st.spaces, 9) {
        let t = a.tensor(b)?;
        let all = all_vectors(&t.web, c).expect("finite carrier");
        let pp = perp(&t, &all, &perp(&t, &all, &t.p)?)?;
        let qp = perp(&t, &all, &t.q)?;
        total += 1;
        // Q_X ⊗ Q_Y is made of dual points, so its orthogonal always contains the points
        gap.check(pp.iter().all(|v| qp.contains(v)), || format!("{}: a point of the tensor is refuted by Q_X ⊗ Q_Y", t.web));
        if pp == qp {
            exact += 1;
        }
        if let Some(coh) = &t.coh {
            let cliques = all.iter().filter(|v| is_clique(coh, &v.support().cloned().collect::<Vec<_>>())).count();
            gap.check(cliques == pp.len(), || format!("{}: {} cliques but P⊥⊥ has {}", t.web, cliques, pp.len()));
        }
    }
    gap.note(format!("Q_X ⊗ Q_Y exact on {exact} of {total} tensors"));
    suite.push(gap.finish());
    Ok(())
}
