//! One function per subcommand; each builds a [`Report`].

use std::collections::BTreeMap;

use algebroid_core::algebroid::{
    build_classical_q, cochain_roundtrip, q_square_residual, transport_q, ClassicalAlgebroid, Cochain,
    GradedFieldSpace, SignConvention,
};
use algebroid_core::bv::{
    build_master_action, cme_residual, cocycle_transport, expected_qhat, flow_commutator_check, gauge_flow_step,
    hamiltonian_field_of, schouten_bracket, BVSetup, LocalFunctional,
};
use algebroid_core::gforms::{indices, GForm};
use algebroid_core::liealg::{LieAlgebra, MetricIssue};
use algebroid_core::symkernel::print::coefficient_text;
use algebroid_core::symkernel::{Context, DiffPolynomial, Parity, SymbolId};
use algebroid_core::zcr::{
    bianchi_residual, check_zcr, compose_gauges, connection_form, curvature, euler_lagrange_of_action, gauge_transform,
    gauge_transform_matrix, noether_residual, BianchiOutcome,
};

use crate::model::{
    load_algebra, load_algebroid, load_cochain, load_functional, load_rep, load_zcr, GaugeModel, Provenance,
};
use crate::report::{Check, CheckStatus, Input, Report, Witness};
use crate::sample::{Sampler, Shape};
use crate::{CliError, Options};

fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn dirs(ctx: &Context, mask: u16) -> String {
    let names = ctx.base_names();
    indices(mask).into_iter().map(|i| names[i]).collect()
}

fn form_label(ctx: &Context, mask: u16, k: usize) -> String {
    format!("{}[{}]", dirs(ctx, mask), k + 1)
}

fn form_parts<'a>(f: &'a GForm, ctx: &'a Context) -> impl Iterator<Item = (String, &'a DiffPolynomial)> + 'a {
    f.components().flat_map(move |(mask, v)| v.iter().enumerate().map(move |(k, p)| (form_label(ctx, mask, k), p)))
}

fn name(ctx: &Context, s: SymbolId) -> String {
    ctx.info(s).name.clone()
}

fn finish(mut report: Report, prov: Provenance) -> Report {
    report.inputs = prov.inputs.into_iter().map(|(source, sha256)| Input { source, sha256 }).collect();
    report
}

fn convention(o: &Options) -> SignConvention {
    o.sign_convention.into()
}

fn graded_space(
    o: &Options,
    g: &LieAlgebra,
    antifields: bool,
    physical: &[&str],
) -> Result<GradedFieldSpace, CliError> {
    let n = o.n.unwrap_or(1);
    if n == 0 || n > 6 {
        return Err(CliError::Usage(format!("--n must be between 1 and 6, got {n}")));
    }
    let mut s = GradedFieldSpace::with_physical_fields(g, n, antifields, physical)?;
    if let Some(m) = o.max_jet_order {
        s.ctx.max_jet_order = m;
    }
    Ok(s)
}

fn bv_setup(o: &Options, prov: &mut Provenance) -> Result<BVSetup, CliError> {
    let g = load_algebra(require(&o.algebra, "algebra")?, None, prov)?;
    let space = graded_space(o, &g, true, &[])?;
    Ok(BVSetup::from_space(space, convention(o))?)
}

fn base_params(r: &mut Report, o: &Options, with_n: bool) {
    if with_n {
        r.param("n", o.n.unwrap_or(1));
    }
    r.param("sign-convention", o.sign_convention.as_str());
}

pub fn validate_algebra(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let g = load_algebra(require(&o.algebra, "algebra")?, None, &mut prov)?;
    let mut r = Report::new("validate-algebra");
    r.info("algebra", format!("{} (dim {})", g.name, g.dim()));
    let v = g.validate();
    let empty = Context::new(&[])?;
    let anti = v
        .antisymmetry
        .iter()
        .map(|(k, i, j)| Witness {
            at: format!("c^{}_{}{}", k + 1, i + 1, j + 1),
            terms: vec!["c^k_ij + c^k_ji != 0".into()],
        })
        .collect();
    push_list(&mut r, "antisymmetry", anti);
    let jac = v
        .jacobi
        .iter()
        .map(|(i, j, k, l, c)| Witness {
            at: format!("J(e{},e{},e{})", i + 1, j + 1, k + 1),
            terms: vec![format!("component e{}: {}", l + 1, coefficient_text(c, &empty))],
        })
        .collect();
    push_list(&mut r, "jacobi", jac);
    if g.metric().is_some() {
        let issues = v
            .metric
            .iter()
            .map(|m| match m {
                MetricIssue::NotSymmetric { i, j } => {
                    Witness { at: format!("t(e{},e{})", i + 1, j + 1), terms: vec!["not symmetric".into()] }
                }
                MetricIssue::Degenerate => Witness { at: "t".into(), terms: vec!["degenerate".into()] },
                MetricIssue::NotInvariant { i, j, k } => Witness {
                    at: format!("t([e{},e{}],e{})", i + 1, j + 1, k + 1),
                    terms: vec!["ad-invariance fails".into()],
                },
            })
            .collect();
        push_list(&mut r, "metric", issues);
    } else {
        r.info("metric", "none".into());
    }
    Ok(finish(r, prov))
}

fn push_list(r: &mut Report, name: &str, witnesses: Vec<Witness>) {
    let status = if witnesses.is_empty() { CheckStatus::Zero } else { CheckStatus::Nonzero };
    r.push(Check { name: name.into(), status, value: None, witnesses });
}

pub fn check_zcr_cmd(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let z = load_zcr(require(&o.zcr, "zcr")?, o.pde.as_deref(), &mut prov, o.max_jet_order)?;
    let cfg = z.pde.ctx.jet_config();
    let res = check_zcr(&z.alpha, &z.algebra, &z.pde.system, &cfg)?;
    let mut r = Report::new("check-zcr");
    r.param("algebra", &z.algebra.name);
    r.zero_check("curvature-on-equation", form_parts(&res, &z.pde.ctx), &z.pde.ctx);
    Ok(finish(r, prov))
}

pub fn gauge(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let z = load_zcr(require(&o.zcr, "zcr")?, o.pde.as_deref(), &mut prov, o.max_jet_order)?;
    if o.gauge.is_empty() || o.gauge.len() > 2 {
        return Err(CliError::Usage("give one --gauge (transform) or two (compose)".into()));
    }
    let ctx = &z.pde.ctx;
    let cfg = ctx.jet_config();
    let mut r = Report::new("gauge");
    let mut elements = Vec::new();
    let mut rep = None;
    for reference in &o.gauge {
        let gm = GaugeModel::load(reference, z.dir.as_deref(), &mut prov)?;
        let (g, rp) = gm.rep(&mut prov)?;
        if g.dim() != z.algebra.dim() {
            return Err(CliError::Usage(format!(
                "representation is of a {}-dimensional algebra, connection is {}-dimensional",
                g.dim(),
                z.algebra.dim()
            )));
        }
        elements.push(gm.element(ctx)?);
        rep = Some(rp);
    }
    let rep = rep.expect("at least one gauge");
    let g1 = &elements[0];
    let t1 = gauge_transform(&z.alpha, &rep, g1, &cfg)?;
    match &t1.form {
        Some(f) => {
            for (at, p) in form_parts(f, ctx) {
                r.info_poly(&format!("transformed {at}"), p, ctx);
            }
            let res = check_zcr(f, &z.algebra, &z.pde.system, &cfg)?;
            let original = check_zcr(&z.alpha, &z.algebra, &z.pde.system, &cfg)?;
            if original.is_zero() {
                r.zero_check("transformed-curvature-on-equation", form_parts(&res, ctx), ctx);
            } else {
                r.info(
                    "transformed-curvature-on-equation",
                    "skipped: input is not a zero-curvature representation".into(),
                );
            }
        }
        None => r.flag("image-of-representation", false, Some("transformed connection leaves the image".into())),
    }
    if let Some(g2) = elements.get(1) {
        r.param("mode", "compose");
        let a = rep.encode_form(&z.alpha);
        let stepwise = gauge_transform_matrix(&gauge_transform_matrix(&a, g1, &cfg)?, g2, &cfg)?;
        let composed = gauge_transform_matrix(&a, &compose_gauges(g2, g1)?, &cfg)?;
        let mut diffs = Vec::new();
        for (mask, m) in &stepwise.comps {
            let other =
                composed.comps.get(mask).cloned().unwrap_or_else(|| algebroid_core::zcr::Matrix::zero(m.size()));
            let d = m.sub(&other)?;
            for (idx, p) in d.entries().iter().enumerate() {
                let (i, j) = (idx / m.size() + 1, idx % m.size() + 1);
                diffs.push((format!("{}({i},{j})", dirs(ctx, *mask)), p.clone()));
            }
        }
        r.zero_check("composition-law", diffs.iter().map(|(a, p)| (a.clone(), p)), ctx);
    } else {
        r.param("mode", "transform");
    }
    Ok(finish(r, prov))
}

/// Context with `u` and connection symbols `a{k}{mu}`, and `a + random(u)`.
pub fn random_connection(
    sampler: &mut Sampler,
    g: &LieAlgebra,
    n: usize,
    shape: Shape,
) -> Result<(Context, Vec<Vec<SymbolId>>, GForm), CliError> {
    let base = Context::default_base(n);
    let mut ctx = Context::new(&base)?;
    let u = ctx.declare("u", Parity::Even)?;
    let mut syms = Vec::new();
    for mu in &base {
        let row =
            (1..=g.dim()).map(|k| ctx.declare(&format!("a{k}{mu}"), Parity::Even)).collect::<Result<Vec<_>, _>>()?;
        syms.push(row);
    }
    let rows: Vec<Vec<DiffPolynomial>> = (0..n).map(|_| sampler.vector(&ctx, &[u], shape, g.dim())).collect();
    let shift = GForm::one_form(n, g.dim(), &rows)?;
    let alpha = connection_form(n, &syms, &ctx, Some(&shift))?;
    Ok((ctx, syms, alpha))
}

fn samples(o: &Options, default: usize) -> usize {
    o.samples.unwrap_or(default)
}

pub fn bianchi(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let mut r = Report::new("bianchi");
    if let Some(z) = &o.zcr {
        let z = load_zcr(z, o.pde.as_deref(), &mut prov, o.max_jet_order)?;
        match bianchi_residual(&z.alpha, &z.algebra, &z.pde.ctx.jet_config())? {
            BianchiOutcome::DegreeForcedZero => {
                r.info("bianchi", "degree-forced zero (3-forms vanish for n = 2)".into())
            }
            BianchiOutcome::Residual(f) => {
                r.zero_check("bianchi", form_parts(&f, &z.pde.ctx), &z.pde.ctx);
            }
        }
        return Ok(finish(r, prov));
    }
    let g = load_algebra(require(&o.algebra, "algebra")?, None, &mut prov)?;
    let n = o.n.unwrap_or(3);
    let count = samples(o, 20);
    r.param("n", n).param("samples", count).param("seed", o.seed);
    let mut sampler = Sampler::new(o.seed);
    for s in 0..count {
        let (ctx, _, alpha) = random_connection(&mut sampler, &g, n, Shape::default())?;
        match bianchi_residual(&alpha, &g, &ctx.jet_config())? {
            BianchiOutcome::DegreeForcedZero => {
                r.info(&format!("sample {s}"), "degree-forced zero".into());
            }
            BianchiOutcome::Residual(f) => {
                r.zero_check(&format!("sample {s}"), form_parts(&f, &ctx), &ctx);
            }
        }
    }
    Ok(finish(r, prov))
}

fn require_n3(o: &Options) -> Result<(), CliError> {
    match o.n {
        None | Some(3) => Ok(()),
        Some(n) => Err(CliError::Usage(format!("the action functional needs --n 3, got {n}"))),
    }
}

pub fn action_el(o: &Options) -> Result<Report, CliError> {
    require_n3(o)?;
    let mut prov = Provenance::default();
    let g = load_algebra(require(&o.algebra, "algebra")?, None, &mut prov)?;
    let count = samples(o, 5);
    let mut r = Report::new("action-el");
    r.param("n", 3).param("samples", count).param("seed", o.seed);
    let mut sampler = Sampler::new(o.seed);
    for s in 0..count {
        let (ctx, syms, alpha) = random_connection(&mut sampler, &g, 3, Shape::default())?;
        let el = euler_lagrange_of_action(&alpha, &syms, &g, &ctx)?;
        let f = curvature(&alpha, &g, &ctx.jet_config())?;
        let diff = el.sub(&f)?;
        r.zero_check(&format!("sample {s}: EL - curvature"), form_parts(&diff, &ctx), &ctx);
    }
    Ok(finish(r, prov))
}

pub fn noether(o: &Options) -> Result<Report, CliError> {
    require_n3(o)?;
    let mut prov = Provenance::default();
    let g = load_algebra(require(&o.algebra, "algebra")?, None, &mut prov)?;
    let count = samples(o, 5);
    let mut r = Report::new("noether");
    r.param("n", 3).param("samples", count).param("seed", o.seed);
    let mut sampler = Sampler::new(o.seed);
    for s in 0..count {
        let (ctx, syms, alpha) = random_connection(&mut sampler, &g, 3, Shape::default())?;
        let u = ctx.lookup("u").expect("declared");
        let p = sampler.vector(&ctx, &[u, syms[0][0]], Shape { terms: 2, degree: 2, jet_order: 1 }, g.dim());
        let dens = noether_residual(&alpha, &syms, &p, &g, &ctx.jet_config())?;
        class(&mut r, &format!("sample {s}"), &dens, &ctx)?;
    }
    Ok(finish(r, prov))
}

fn class(r: &mut Report, label: &str, dens: &DiffPolynomial, ctx: &Context) -> Result<bool, CliError> {
    let w = algebroid_core::symkernel::nontrivial_witnesses(dens, ctx)?;
    let w: Vec<(String, DiffPolynomial)> = w.into_iter().map(|(s, p)| (format!("E_{}", name(ctx, s)), p)).collect();
    Ok(r.class_check(label, dens, w.is_empty(), &w, ctx))
}

pub fn q_squared(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let g = load_algebra(require(&o.algebra, "algebra")?, None, &mut prov)?;
    let s = graded_space(o, &g, false, &[])?;
    let res = q_square_residual(&s, convention(o))?;
    let mut r = Report::new("q-squared");
    base_params(&mut r, o, true);
    r.param("algebra", &g.name);
    r.zero_check("Q^2", res.iter().map(|(k, p)| (name(&s.ctx, *k), p)), &s.ctx);
    Ok(finish(r, prov))
}

pub fn transport_q_cmd(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    if o.gauge.len() != 1 {
        return Err(CliError::Usage("transport-q needs exactly one --gauge".into()));
    }
    let gm = GaugeModel::load(&o.gauge[0], None, &mut prov)?;
    let (g, rep) = match &o.rep {
        Some(rp) => load_rep(rp, None, &mut prov)?,
        None => gm.rep(&mut prov)?,
    };
    if let Some(a) = &o.algebra {
        let named = load_algebra(a, None, &mut prov)?;
        if named.nonzero().ne(g.nonzero()) {
            return Err(CliError::Usage(format!("--algebra {a} differs from the algebra of the representation")));
        }
    }
    let s = graded_space(o, &g, false, &gm.fields())?;
    let element = gm.element(&s.ctx)?;
    let t = transport_q(&s, &rep, &element, convention(o))?;
    let mut r = Report::new("transport-q");
    base_params(&mut r, o, true);
    for (mu, row) in t.alpha_prime.iter().enumerate() {
        for (k, p) in row.iter().enumerate() {
            r.info_poly(&format!("a{}{}'", k + 1, s.ctx.base_names()[mu]), p, &s.ctx);
        }
    }
    for (k, p) in t.b_prime.iter().enumerate() {
        r.info_poly(&format!("b{}'", k + 1), p, &s.ctx);
    }
    r.zero_check("push-forward", t.pushforward_residual.iter().map(|(a, p)| (a.clone(), p)), &s.ctx);
    r.zero_check("Q'^2", t.q_prime_square.iter().map(|(a, p)| (a.clone(), p)), &s.ctx);
    Ok(finish(r, prov))
}

pub fn classical_q(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let a = load_algebroid(require(&o.algebroid, "algebroid")?, &mut prov)?;
    let q = build_classical_q(&a, convention(o));
    let mut r = Report::new("classical-q");
    base_params(&mut r, o, false);
    r.param("m", a.m()).param("d", a.d());
    for (s, p) in &q.sections {
        r.info_poly(&format!("Q({})", name(&a.ctx, *s)), p, &a.ctx);
    }
    let sq = q.square_residual(&a.ctx.jet_config())?;
    r.zero_check("Q^2", sq.iter().map(|(k, p)| (name(&a.ctx, *k), p)), &a.ctx);
    Ok(finish(r, prov))
}

fn cochain_parts(w: &Cochain) -> Vec<(String, DiffPolynomial)> {
    w.values
        .iter()
        .map(|(key, p)| {
            (format!("({})", key.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")), p.clone())
        })
        .collect()
}

/// Random k-cochain with coefficients polynomial in the base coordinates.
pub fn random_cochain(
    sampler: &mut Sampler,
    a: &ClassicalAlgebroid,
    k: usize,
    shape: Shape,
) -> Result<Cochain, CliError> {
    let d = a.d();
    let mut entries = Vec::new();
    let mut key: Vec<usize> = (0..k).collect();
    loop {
        let f = if a.xs.is_empty() {
            DiffPolynomial::int(sampler.nonzero_int(3))
        } else {
            &sampler.poly(&a.ctx, &a.xs, shape) + &DiffPolynomial::int(sampler.nonzero_int(3))
        };
        entries.push((key.clone(), f));
        // next increasing tuple
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Cochain::from_values(k, d, &entries)?);
            }
            i -= 1;
            if key[i] < d - k + i {
                key[i] += 1;
                for j in i + 1..k {
                    key[j] = key[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn cochain(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let a = load_algebroid(require(&o.algebroid, "algebroid")?, &mut prov)?;
    let conv = convention(o);
    let mut r = Report::new("cochain");
    base_params(&mut r, o, false);
    if let Some(c) = &o.cochain {
        let w = load_cochain(c, &a, &mut prov)?;
        let res = cochain_roundtrip(&a, &w, conv)?;
        let parts = cochain_parts(&res);
        r.zero_check(&format!("k = {}", w.k), parts.iter().map(|(s, p)| (s.clone(), p)), &a.ctx);
        return Ok(finish(r, prov));
    }
    let count = samples(o, 3);
    r.param("samples", count).param("seed", o.seed);
    let mut sampler = Sampler::new(o.seed);
    let shape = Shape { terms: 2, degree: 2, jet_order: 0 };
    for k in 0..=a.d().min(2) {
        for s in 0..count {
            let w = random_cochain(&mut sampler, &a, k, shape)?;
            let res = cochain_roundtrip(&a, &w, conv)?;
            let parts = cochain_parts(&res);
            r.zero_check(&format!("k = {k}, sample {s}"), parts.iter().map(|(s, p)| (s.clone(), p)), &a.ctx);
        }
    }
    Ok(finish(r, prov))
}

pub fn master_action(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let s = build_master_action(&st)?;
    let mut r = Report::new("master-action");
    base_params(&mut r, o, true);
    r.info("parity", s.parity.to_string());
    r.info_poly("density", &s.density, &st.space.ctx);
    Ok(finish(r, prov))
}

fn functional_class(r: &mut Report, label: &str, st: &BVSetup, f: &LocalFunctional) -> Result<bool, CliError> {
    class(r, label, &f.density, &st.space.ctx)
}

pub fn cme(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let res = cme_residual(&st)?;
    let mut r = Report::new("cme");
    base_params(&mut r, o, true);
    r.param("algebra", &st.space.algebra.name);
    functional_class(&mut r, "[[S,S]]", &st, &res)?;
    Ok(finish(r, prov))
}

pub fn qhat_squared(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let s = build_master_action(&st)?;
    let q = hamiltonian_field_of(&st, &s)?;
    let expected = expected_qhat(&st)?;
    let ctx = &st.space.ctx;
    let mut r = Report::new("qhat-squared");
    base_params(&mut r, o, true);
    r.param("algebra", &st.space.algebra.name);
    let mut diffs = BTreeMap::new();
    for sym in st.space.graded_symbols() {
        diffs.insert(sym, &q.section(sym) - &expected.section(sym));
    }
    r.zero_check("component-formula", diffs.iter().map(|(k, p)| (name(ctx, *k), p)), ctx);
    let res = q.square_residual(&st.cfg())?;
    r.zero_check("Qhat^2", res.iter().map(|(k, p)| (name(ctx, *k), p)), ctx);
    Ok(finish(r, prov))
}

fn functional(
    o: &Option<String>,
    flag: &str,
    st: &BVSetup,
    prov: &mut Provenance,
) -> Result<LocalFunctional, CliError> {
    let d = load_functional(require(o, flag)?, &st.space.ctx, prov)?;
    Ok(LocalFunctional::new(d)?)
}

fn odd_samples(
    o: &Options,
    st: &BVSetup,
    given: &[&Option<String>],
    flags: &[&str],
    prov: &mut Provenance,
    default: usize,
) -> Result<Vec<Vec<LocalFunctional>>, CliError> {
    if given.iter().all(|g| g.is_some()) {
        let fs = given.iter().zip(flags).map(|(g, f)| functional(g, f, st, prov)).collect::<Result<Vec<_>, _>>()?;
        return Ok(vec![fs]);
    }
    if given.iter().any(|g| g.is_some()) {
        return Err(CliError::Usage(format!("give all of --{} or none (random samples)", flags.join(", --"))));
    }
    let mut sampler = Sampler::new(o.seed);
    let syms = st.space.graded_symbols();
    let shape = Shape { terms: 2, degree: 3, jet_order: 1 };
    Ok((0..samples(o, default))
        .map(|_| {
            flags
                .iter()
                .map(|_| LocalFunctional {
                    density: sampler.homogeneous(&st.space.ctx, &syms, shape, Parity::Odd),
                    parity: Parity::Odd,
                })
                .collect()
        })
        .collect())
}

pub fn schouten(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let f = functional(&o.f, "f", &st, &mut prov)?;
    let g = functional(&o.g, "g", &st, &mut prov)?;
    let fg = schouten_bracket(&st, &f, &g)?;
    let gf = schouten_bracket(&st, &g, &f)?;
    let mut r = Report::new("schouten");
    base_params(&mut r, o, true);
    r.info("parity", fg.parity.to_string());
    r.info_poly("[[F,G]]", &fg.density, &st.space.ctx);
    let shifted_odd = (f.parity.bit() + 1) * (g.parity.bit() + 1) % 2 == 1;
    let sum = if shifted_odd { fg.sub(&gf)? } else { fg.add(&gf)? };
    functional_class(&mut r, "antisymmetry", &st, &sum)?;
    Ok(finish(r, prov))
}

pub fn flow(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let mut r = Report::new("flow");
    base_params(&mut r, o, true);
    r.param("eps-order", o.eps_order);
    let sets = odd_samples(o, &st, &[&o.f], &["f"], &mut prov, 3)?;
    let single = sets.len() == 1 && o.f.is_some();
    for (s, fs) in sets.iter().enumerate() {
        let rep = gauge_flow_step(&st, &fs[0], o.eps_order)?;
        for ord in &rep.orders {
            let label =
                if single { format!("order {}", ord.order) } else { format!("sample {s}, order {}", ord.order) };
            functional_class(&mut r, &label, &st, &ord.coefficient)?;
        }
    }
    Ok(finish(r, prov))
}

pub fn cocycle_transport_cmd(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let f = functional(&o.f, "f", &st, &mut prov)?;
    let s = build_master_action(&st)?;
    let h = match &o.h {
        Some(_) => Some(functional(&o.h, "h", &st, &mut prov)?),
        None => None,
    };
    let eta = match (&o.eta, &h) {
        (Some(_), _) => functional(&o.eta, "eta", &st, &mut prov)?,
        (None, Some(h)) => schouten_bracket(&st, &s, h)?,
        (None, None) => s.clone(),
    };
    let rep = cocycle_transport(&st, &f, &eta, h.as_ref())?;
    let mut r = Report::new("cocycle-transport");
    base_params(&mut r, o, true);
    functional_class(&mut r, "cocycle velocity", &st, &rep.cocycle_velocity)?;
    if let Some(c) = &rep.coboundary_residual {
        functional_class(&mut r, "coboundary transport", &st, c)?;
    }
    Ok(finish(r, prov))
}

pub fn flow_commutator(o: &Options) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let st = bv_setup(o, &mut prov)?;
    let mut r = Report::new("flow-commutator");
    base_params(&mut r, o, true);
    let sets = odd_samples(o, &st, &[&o.x, &o.y], &["x", "y"], &mut prov, 3)?;
    for (s, xy) in sets.iter().enumerate() {
        let rep = flow_commutator_check(&st, &xy[0], &xy[1])?;
        functional_class(&mut r, &format!("commutator {s}"), &st, &rep.residual)?;
    }
    Ok(finish(r, prov))
}
