use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactnum::{QMatrix, QuadScalar, SurdMatrix};
use crate::quadforms::{signature_of, QuadraticForm};

use super::algebra::{embed, random_element};
use super::group::random_skew;
use super::invariants::ProbeGroup;
use super::{
    build_d_generators, build_eta, build_q_prime, cayley, classification_probe, exp_u_minus, fixed_forms,
    fixes_leading, h0_generators, index_walk_check, invariance_check, j_tau, l_m, lie_bracket,
    preserves_form, project, random_d_element, random_u_element, subspace_basis, verify_normalization,
    AlgebraElement, Branch, EtaAux, GroupParams, Subspace, MAIN_SUBSPACES,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Instances examined; 0 means the identity was vacuous everywhere.
    pub checked: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scorecard {
    pub params: Vec<GroupParams>,
    pub checks: Vec<Check>,
    /// Degenerate branches taken (empty blocks in a map).
    pub flags: Vec<String>,
}

impl Scorecard {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Combines per-parameter scorecards check by check; the first failure
    /// supplies the witness.
    pub fn merge(cards: Vec<Scorecard>) -> Scorecard {
        let mut by_name: BTreeMap<String, Check> = BTreeMap::new();
        let mut order = Vec::new();
        let mut out = Scorecard::default();
        for card in cards {
            out.params.extend(card.params);
            out.flags.extend(card.flags);
            for c in card.checks {
                match by_name.get_mut(&c.name) {
                    Some(acc) => {
                        acc.checked += c.checked;
                        if acc.pass && !c.pass {
                            acc.pass = false;
                            acc.witness = c.witness;
                        }
                    }
                    None => {
                        order.push(c.name.clone());
                        by_name.insert(c.name.clone(), c);
                    }
                }
            }
        }
        out.checks = order.into_iter().map(|n| by_name.remove(&n).expect("recorded")).collect();
        out
    }
}

/// Accumulates one named check.
struct Tally {
    name: &'static str,
    checked: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, witness: None }
    }

    fn record(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(why());
        }
    }

    fn done(self, p: &GroupParams) -> Check {
        let at = |w: String| format!("at {:?}: {w}", p.indices());
        Check { name: self.name.to_string(), pass: self.witness.is_none(), checked: self.checked, witness: self.witness.map(at) }
    }
}

fn elem(p: &GroupParams, m: QMatrix) -> AlgebraElement {
    AlgebraElement::new(*p, m)
}

fn sum_projections(p: &GroupParams, subs: &[Subspace], f: &QMatrix) -> QMatrix {
    subs.iter().fold(QMatrix::zeros(p.d(), p.d()), |acc, s| acc.add(&project(p, *s, f)).expect("shape"))
}

fn closed_form_dim(p: &GroupParams, sub: Subspace) -> usize {
    let (l, t, s) = (p.l(), p.tau(), p.sigma());
    let so = |n: usize| n * n.saturating_sub(1) / 2;
    match sub {
        Subspace::VPlus | Subspace::VMinus => t * l,
        Subspace::V => t * s,
        Subspace::A => so(t),
        Subspace::D => so(s),
        Subspace::C => l * l,
        Subspace::UMinus | Subspace::UPlus => l * s,
        Subspace::BPlus | Subspace::BMinus => so(l),
        Subspace::Vk(_) | Subspace::UkMinus(_) | Subspace::UkPlus(_) => s,
    }
}

/// Flattened matrices as rows, for rank computations.
fn flatten(ms: &[QMatrix]) -> Option<QMatrix> {
    if ms.is_empty() {
        return None;
    }
    QMatrix::from_rows(ms.iter().map(|m| m.entries().cloned().collect()).collect()).ok()
}

fn rank_of(ms: &[QMatrix]) -> usize {
    flatten(ms).map(|m| m.rank()).unwrap_or(0)
}

fn random_rational<R: Rng>(rng: &mut R) -> QuadScalar {
    QuadScalar::frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Random element of `O(tau1, tau2)` through the Cayley map of `J S`.
fn random_o_j<R: Rng>(j: &QMatrix, rng: &mut R) -> QMatrix {
    for _ in 0..20 {
        let k = j.mul(&random_skew(rng, j.rows())).expect("square");
        if let Ok(g) = cayley(&k) {
            return g;
        }
    }
    QMatrix::identity(j.rows())
}

/// Random middle form `P^T J P` of signature `(tau1, tau2)`.
fn random_middle<R: Rng>(j: &QMatrix, rng: &mut R) -> QuadraticForm {
    let n = j.rows();
    loop {
        let mut pm = QMatrix::identity(n);
        for a in 0..n {
            for b in 0..n {
                pm[(a, b)] = &pm[(a, b)] + &QuadScalar::from_int(rng.gen_range(-2..=2));
            }
        }
        if pm.determinant().map(|d| d.is_zero()).unwrap_or(true) {
            continue;
        }
        let g = j.congruent(&pm).expect("square");
        return QuadraticForm::new(g).expect("symmetric");
    }
}

/// Every block outside the sigma block of `target` is zero.
fn inside_sigma(target: &GroupParams, x: &SurdMatrix) -> bool {
    let [_, _, o3, o4] = target.offsets();
    (0..x.rows()).all(|i| (0..x.cols()).all(|j| (o3..o4).contains(&i) && (o3..o4).contains(&j) || x.get(i, j).is_zero()))
}

fn conjugate(eta: &super::eta::Eta, x: &QMatrix) -> Option<SurdMatrix> {
    let e = eta.matrix.to_surd_matrix().ok()?;
    let e_inv = eta.matrix.inverse().ok()?.to_surd_matrix().ok()?;
    e_inv.mul(&SurdMatrix::from_qmatrix(x)).ok()?.mul(&e).ok()
}

/// All identities at one parameter set. `samples` random elements per
/// sampled identity.
pub fn verify_params(p: &GroupParams, samples: usize, seed: u64) -> Scorecard {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, tau, sigma, d) = (p.l(), p.tau(), p.sigma(), p.d());
    let q = build_q_prime(p, None);
    let mut checks = Vec::new();
    let mut flags = Vec::new();

    let mut t = Tally::new("q_prime_signature");
    let sig = signature_of(&q);
    let want = (p.m + p.p_prime + p.r, p.m + p.q_prime + p.n);
    t.record((sig.p, sig.q) == want && sig.rank == d, || format!("signature {:?}, want {want:?}", (sig.p, sig.q)));
    checks.push(t.done(p));

    // decomposition of so(Q')
    let mut dims = Tally::new("subspace_dimensions");
    let mut member = Tally::new("algebra_membership");
    let mut all = Vec::new();
    let mut refined = vec![];
    for k in 1..=tau {
        refined.push(Subspace::Vk(k));
    }
    for k in 1..=l {
        refined.push(Subspace::UkMinus(k));
        refined.push(Subspace::UkPlus(k));
    }
    for sub in MAIN_SUBSPACES.iter().copied().chain(refined.iter().copied()) {
        let basis = subspace_basis(p, sub);
        let want = closed_form_dim(p, sub);
        let r = rank_of(&basis);
        dims.record(basis.len() == want && r == want, || format!("{sub}: {} elements of rank {r}, want {want}", basis.len()));
        for b in &basis {
            let e = elem(p, b.clone());
            let tagged = e.tags.first() == Some(&super::algebra::parent_of(sub)) && (sub == super::algebra::parent_of(sub) || e.tags.contains(&sub));
            member.record(e.in_algebra() && e.decomposes() && tagged, || format!("{sub} basis element {} tagged {:?}", b, e.tags));
        }
        if MAIN_SUBSPACES.contains(&sub) {
            all.extend(basis);
        }
    }
    let total = d * d.saturating_sub(1) / 2;
    let r = rank_of(&all);
    dims.record(all.len() == total && r == total, || format!("direct sum has {} elements of rank {r}, want {total}", all.len()));
    checks.push(dims.done(p));
    checks.push(member.done(p));

    // groups
    let fixed = p.fixed_count();
    let mut ut = Tally::new("u_elements");
    let mut us = Vec::new();
    for _ in 0..samples.min(50) {
        let u = random_u_element(p, &mut rng).matrix();
        ut.record(preserves_form(&u, &q) && fixes_leading(&u, fixed), || format!("U element {u}"));
        us.push(u);
    }
    for _ in 0..samples.min(20) {
        let mut par = QMatrix::zeros(l, sigma);
        for a in 0..l {
            for b in 0..sigma {
                par[(a, b)] = random_rational(&mut rng);
            }
        }
        let x = embed(p, Subspace::UMinus, &par);
        let mut series = QMatrix::identity(d);
        let mut term = QMatrix::identity(d);
        for k in 1..=d {
            term = term.mul(&x).expect("square").scale(&QuadScalar::frac(1, k as i64)).expect("scale");
            if term.is_zero() {
                break;
            }
            series = series.add(&term).expect("shape");
        }
        let built = exp_u_minus(p, &par).matrix();
        ut.record(series == built, || format!("exp series differs from build_u at u = {par}"));
    }
    checks.push(ut.done(p));

    let mut dt = Tally::new("d_generators");
    let mut ds = build_d_generators(p);
    for _ in 0..samples.min(5) {
        ds.push(random_d_element(p, &mut rng));
    }
    for g in &ds {
        dt.record(preserves_form(g, &q) && fixes_leading(g, fixed), || format!("D element {g}"));
    }
    checks.push(dt.done(p));

    let mut nt = Tally::new("normalization");
    // every D element and every U sample appears in at least one pair
    if !ds.is_empty() && !us.is_empty() {
        for k in 0..ds.len().max(us.len()) {
            let (g, u) = (&ds[k % ds.len()], &us[k % us.len()]);
            let rep = verify_normalization(p, std::slice::from_ref(g), std::slice::from_ref(u));
            nt.record(rep.ok, || rep.witness.unwrap_or_default());
        }
    }
    checks.push(nt.done(p));

    // brackets
    let rest: Vec<Subspace> =
        MAIN_SUBSPACES.iter().copied().filter(|s| !matches!(s, Subspace::UMinus | Subspace::D)).collect();
    let d_basis = subspace_basis(p, Subspace::D);
    let um_basis = subspace_basis(p, Subspace::UMinus);
    let mut fd = Tally::new("bracket_f_prime_d");
    let mut fu = Tally::new("bracket_f_prime_u_minus");
    for _ in 0..samples {
        let f = rest.iter().fold(QMatrix::zeros(d, d), |acc, s| acc.add(&random_element(p, *s, &mut rng)).expect("shape"));
        let fe = elem(p, f.clone());
        if !d_basis.is_empty() {
            let x = elem(p, random_element(p, Subspace::D, &mut rng));
            let b = lie_bracket(&fe, &x).expect("same ambient");
            fd.record(b.lies_in(&[Subspace::V, Subspace::UPlus]), || format!("[f', d] tagged {:?}", b.tags));
        }
        let [o1, o2, _, o4] = p.offsets();
        let top = !f.submatrix(o1, o4, l, l).is_zero() || !f.submatrix(o2, o4, tau, l).is_zero();
        if top && sigma > 0 {
            let hit = um_basis.iter().any(|u| {
                let b = f.mul(u).and_then(|x| x.sub(&u.mul(&f)?)).expect("square");
                !sum_projections(p, &[Subspace::V, Subspace::UPlus], &b).is_zero()
            });
            fu.record(hit, || format!("f' = {f} has zero v + u+ projection against all of u-"));
        }
    }
    checks.push(fd.done(p));
    checks.push(fu.done(p));

    let mut cl = Tally::new("bracket_u_l_plus_u_l_minus");
    let mut rem = Tally::new("bracket_u_l_remainder");
    if l >= 1 && sigma >= 1 {
        let mut c_star = QMatrix::zeros(l, l);
        c_star[(l - 1, l - 1)] = QuadScalar::one();
        let c_star = embed(p, Subspace::C, &c_star);
        let plus = subspace_basis(p, Subspace::UkPlus(l));
        let minus = subspace_basis(p, Subspace::UkMinus(l));
        let mut c_parts = Vec::new();
        for a in &plus {
            for b in &minus {
                let br = lie_bracket(&elem(p, a.clone()), &elem(p, b.clone())).expect("same ambient");
                let c = project(p, Subspace::C, &br.mat);
                cl.record(rank_of(&[c_star.clone(), c.clone()]) == 1, || format!("c-part {c} leaves <b_ll - b_dd>"));
                let rest = br.mat.sub(&c).expect("shape");
                rem.record(elem(p, rest.clone()).lies_in(&[Subspace::D]), || format!("remainder {rest} leaves d"));
                c_parts.push(c);
            }
        }
        cl.record(rank_of(&c_parts) == 1, || "c-parts do not span <b_ll - b_dd>".into());
    }
    checks.push(cl.done(p));
    checks.push(rem.done(p));

    let mut uu = Tally::new("bracket_u_minus_u_minus");
    if l >= 2 && sigma >= 1 {
        let mut brackets = Vec::new();
        for (i, a) in um_basis.iter().enumerate() {
            for b in &um_basis[i + 1..] {
                let br = lie_bracket(&elem(p, a.clone()), &elem(p, b.clone())).expect("same ambient");
                uu.record(br.lies_in(&[Subspace::BMinus]), || format!("[u-, u-] tagged {:?}", br.tags));
                brackets.push(br.mat);
            }
        }
        let want = l * (l - 1) / 2;
        uu.record(rank_of(&brackets) == want, || format!("[u-, u-] spans rank {} < {want}", rank_of(&brackets)));
    }
    for _ in 0..samples.min(20) {
        let a = elem(p, random_element(p, Subspace::UMinus, &mut rng));
        let b = elem(p, random_element(p, Subspace::UMinus, &mut rng));
        let br = lie_bracket(&a, &b).expect("same ambient");
        uu.record(br.lies_in(&[Subspace::BMinus]), || format!("[u-, u-] tagged {:?}", br.tags));
    }
    checks.push(uu.done(p));

    // the maps eta_0 .. eta_5
    let mut record_eta = |name: &'static str, which: u8, aux: &EtaAux, flags: &mut Vec<String>| -> Option<super::eta::Eta> {
        let mut t = Tally::new(name);
        let eta = build_eta(which, p, aux).ok();
        if let Some(e) = &eta {
            t.record(e.verify().unwrap_or(false), || format!("congruence fails for {:?}", e.matrix));
            if let Some(f) = &e.degenerate_branch {
                flags.push(format!("{name} at {:?}: {f}", p.indices()));
            }
        }
        checks.push(t.done(p));
        eta
    };
    let jt = j_tau(p);
    if p.indices() == (0, 0, 0) && tau > 0 {
        let aux = EtaAux { middle: Some(random_middle(&jt, &mut rng)), ..EtaAux::default() };
        record_eta("eta0", 0, &aux, &mut flags);
    }
    let aux1 = EtaAux {
        a1: Some(cayley(&random_skew(&mut rng, l)).expect("skew")),
        a2: Some(random_o_j(&jt, &mut rng)),
        ..EtaAux::default()
    };
    record_eta("eta1", 1, &aux1, &mut flags);
    let aux2 = EtaAux {
        alpha1: if p.tau1() >= 1 { random_rational(&mut rng) } else { QuadScalar::zero() },
        alpha2: if p.tau2() >= 1 { random_rational(&mut rng) } else { QuadScalar::zero() },
        ..EtaAux::default()
    };
    let eta2 = record_eta("eta2", 2, &aux2, &mut flags);
    let eta3 = record_eta("eta3", 3, &EtaAux::default(), &mut flags);
    let eta4 = record_eta("eta4", 4, &EtaAux::default(), &mut flags);
    record_eta("eta4_negative", 4, &EtaAux { negative: true, ..EtaAux::default() }, &mut flags);
    record_eta("eta5", 5, &EtaAux::default(), &mut flags);

    let mut ct = Tally::new("eta2_commutes");
    if let Some(e) = &eta2 {
        let g = e.matrix.core();
        for x in um_basis.iter().chain(&d_basis) {
            let ok = g.mul(x).ok().as_ref() == Some(x) && x.mul(g).ok().as_ref() == Some(x);
            ct.record(ok, || format!("eta2 moves {x}"));
        }
    }
    checks.push(ct.done(p));

    let mut c3 = Tally::new("eta3_conjugation");
    if let Some(e) = &eta3 {
        let mut c_star = QMatrix::zeros(l, l);
        c_star[(l - 1, l - 1)] = QuadScalar::one();
        let mut pieces = subspace_basis(p, Subspace::UkMinus(l));
        pieces.extend(d_basis.iter().cloned());
        pieces.push(embed(p, Subspace::C, &c_star));
        pieces.extend(subspace_basis(p, Subspace::UkPlus(l)));
        let want = (sigma + 2) * (sigma + 1) / 2;
        c3.record(pieces.len() == want, || format!("{} pieces, target d has dimension {want}", pieces.len()));
        for x in &pieces {
            let ok = conjugate(e, x).map(|c| inside_sigma(&e.target, &c)).unwrap_or(false);
            c3.record(ok, || format!("conjugate of {x} leaves the target d"));
        }
    }
    checks.push(c3.done(p));

    let mut c4 = Tally::new("eta4_conjugation");
    if let Some(e) = &eta4 {
        let mut pieces = d_basis.clone();
        pieces.extend(subspace_basis(p, Subspace::Vk(1)));
        let want = (sigma + 1) * sigma / 2;
        c4.record(pieces.len() == want, || format!("{} pieces, target d has dimension {want}", pieces.len()));
        for x in &pieces {
            let ok = conjugate(e, x).map(|c| inside_sigma(&e.target, &c)).unwrap_or(false);
            c4.record(ok, || format!("conjugate of {x} leaves the target d"));
        }
    }
    checks.push(c4.done(p));

    // fixed forms and invariant subspaces
    let mut ff = Tally::new("fixed_forms_h0");
    let fixed_space = fixed_forms(&h0_generators(p), d);
    let leading: Vec<QMatrix> = (0..fixed).map(|k| unit_row(d, k)).collect();
    let ok = fixed_space.rows() == fixed
        && (fixed == 0 || fixed_space.stack(&stack_rows(&leading, d)).expect("width").rank() == fixed);
    ff.record(ok, || format!("fixed forms of dimension {} = {fixed_space}", fixed_space.rows()));
    checks.push(ff.done(p));

    let mut inv = Tally::new("invariance_probes");
    let dgen = build_d_generators(p);
    let lm = l_m(p);
    if sigma > 0 {
        inv.record(
            invariance_check(&lm, &dgen) && classification_probe(p, &lm, ProbeGroup::D) != Branch::Neither,
            || "L_m is not a D-invariant block".into(),
        );
    }
    if fixed > 0 {
        let x1 = unit_row(d, 0);
        let h0 = h0_generators(p);
        inv.record(
            invariance_check(&x1, &h0) && classification_probe(p, &x1, ProbeGroup::H0) == Branch::ContainedInFixed,
            || "span{x_1} is not in the fixed forms".into(),
        );
    }
    if sigma >= 3 {
        let [_, _, o3, _] = p.offsets();
        for _ in 0..50 {
            let mut v = QMatrix::zeros(2, d);
            for r in 0..2 {
                for j in 0..sigma {
                    v[(r, o3 + j)] = QuadScalar::from_int(rng.gen_range(-9..=9));
                }
            }
            if v.rank() < 2 {
                continue;
            }
            inv.record(!invariance_check(&v, &dgen), || format!("random plane {v} of L_m is D-invariant"));
        }
    }
    checks.push(inv.done(p));

    Scorecard { params: vec![*p], checks, flags }
}

fn unit_row(d: usize, k: usize) -> QMatrix {
    let mut m = QMatrix::zeros(1, d);
    m[(0, k)] = QuadScalar::one();
    m
}

fn stack_rows(rows: &[QMatrix], d: usize) -> QMatrix {
    rows.iter().fold(QMatrix::zeros(0, d), |acc, r| acc.stack(r).expect("width"))
}

/// Runs [`verify_params`] at every parameter set (seeds derived from
/// `seed` and the position) and the index walk for each distinct
/// `(p', q', m)`.
pub fn verify_algebra(params: &[GroupParams], samples: usize, seed: u64) -> Scorecard {
    use rayon::prelude::*;
    let mut cards: Vec<Scorecard> = params
        .par_iter()
        .enumerate()
        .map(|(k, p)| verify_params(p, samples, seed.wrapping_add(k as u64)))
        .collect();
    let mut walks: Vec<(usize, usize, usize)> = params.iter().map(|p| (p.p_prime, p.q_prime, p.m)).collect();
    walks.sort();
    walks.dedup();
    let mut walk = Check { name: "index_walk".into(), pass: true, checked: 0, witness: None };
    for (a, b, c) in walks {
        let rep = index_walk_check(a, b, c);
        walk.checked += 1;
        if !rep.ok && walk.pass {
            walk.pass = false;
            walk.witness = rep.witness.map(|w| format!("(p',q',m) = ({a},{b},{c}): {w}"));
        }
    }
    cards.push(Scorecard { params: Vec::new(), checks: vec![walk], flags: Vec::new() });
    Scorecard::merge(cards)
}
