use algebroid_core::algebroid::SignConvention;
use algebroid_core::bv::{schouten_bracket, BVSetup, LocalFunctional};
use algebroid_core::liealg::LieAlgebra;
use algebroid_core::symkernel::{
    euler_left, parse, to_text, total_derivative, Context, DiffPolynomial, MultiIndex, Parity, PdeSystem, Ranking,
    SymbolId,
};
use proptest::prelude::*;

type Spec = Vec<(i64, Vec<(usize, u8, u8)>)>;

fn spec(nsyms: usize, n: usize) -> impl Strategy<Value = Spec> {
    let d = if n > 1 { 2u8 } else { 0u8 };
    prop::collection::vec((-3i64..=3, prop::collection::vec((0..nsyms, 0..=2u8, 0..=d), 0..=3)), 1..=4)
}

fn build(ctx: &Context, syms: &[SymbolId], s: &Spec) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero();
    for (c, vars) in s {
        let mut m = DiffPolynomial::int(*c);
        for &(k, i, j) in vars {
            let mut idx = MultiIndex::ZERO;
            idx.0[0] = i;
            if ctx.n() > 1 {
                idx.0[1] = j;
            }
            m = &m * &DiffPolynomial::var(ctx.jet(syms[k], idx));
        }
        out.add_assign(&m);
    }
    out
}

fn kernel_ctx() -> (Context, Vec<SymbolId>) {
    let mut ctx = Context::new(&['x', 't']).unwrap();
    let syms = vec![
        ctx.declare("u", Parity::Even).unwrap(),
        ctx.declare("v", Parity::Even).unwrap(),
        ctx.declare("p", Parity::Odd).unwrap(),
        ctx.declare("q", Parity::Odd).unwrap(),
    ];
    (ctx, syms)
}

fn homogeneous(p: &DiffPolynomial, parity: Parity) -> DiffPolynomial {
    p.filter(|m| m.parity() == parity)
}

proptest! {
    #[test]
    fn printing_round_trips(s in spec(4, 2)) {
        let (ctx, syms) = kernel_ctx();
        let p = build(&ctx, &syms, &s);
        let text = to_text(&p, &ctx);
        let back = parse(&text, &ctx).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(to_text(&back, &ctx), text);
    }

    #[test]
    fn ring_laws(a in spec(4, 2), b in spec(4, 2), c in spec(4, 2)) {
        let (ctx, syms) = kernel_ctx();
        let (a, b, c) = (build(&ctx, &syms, &a), build(&ctx, &syms, &b), build(&ctx, &syms, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        // graded commutativity on homogeneous parts
        let (ae, bo) = (homogeneous(&a, Parity::Even), homogeneous(&b, Parity::Odd));
        prop_assert_eq!(&ae * &bo, &bo * &ae);
        let ao = homogeneous(&a, Parity::Odd);
        prop_assert_eq!(&ao * &bo, -&(&bo * &ao));
    }

    #[test]
    fn total_derivatives_commute(s in spec(4, 2)) {
        let (ctx, syms) = kernel_ctx();
        let cfg = ctx.jet_config();
        let p = build(&ctx, &syms, &s);
        let xt = total_derivative(&total_derivative(&p, 0, &cfg).unwrap(), 1, &cfg).unwrap();
        let tx = total_derivative(&total_derivative(&p, 1, &cfg).unwrap(), 0, &cfg).unwrap();
        prop_assert_eq!(xt, tx);
    }

    #[test]
    fn total_derivative_is_a_derivation(a in spec(4, 2), b in spec(4, 2)) {
        let (ctx, syms) = kernel_ctx();
        let cfg = ctx.jet_config();
        let (a, b) = (build(&ctx, &syms, &a), build(&ctx, &syms, &b));
        let lhs = total_derivative(&(&a * &b), 0, &cfg).unwrap();
        let rhs = &(&total_derivative(&a, 0, &cfg).unwrap() * &b) + &(&a * &total_derivative(&b, 0, &cfg).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divergences_are_trivial(a in spec(4, 2), b in spec(4, 2)) {
        let (ctx, syms) = kernel_ctx();
        let cfg = ctx.jet_config();
        let div = &total_derivative(&build(&ctx, &syms, &a), 0, &cfg).unwrap()
            + &total_derivative(&build(&ctx, &syms, &b), 1, &cfg).unwrap();
        for &s in &syms {
            prop_assert!(euler_left(&div, s, &ctx).unwrap().is_zero());
        }
    }

    #[test]
    fn reduction_is_idempotent(s in spec(2, 2)) {
        let mut ctx = Context::new(&['x', 't']).unwrap();
        let u = ctx.declare("u", Parity::Even).unwrap();
        let v = ctx.declare("v", Parity::Even).unwrap();
        let sys = PdeSystem::parse(
            &[("u_t", "-1/2*u_{xxx} + 3*u*u_x"), ("v_t", "u*v_x")],
            &ctx,
            Ranking::default(),
        )
        .unwrap();
        let p = build(&ctx, &[u, v], &s);
        let cfg = ctx.jet_config();
        let once = sys.reduce(&p, cfg).unwrap();
        prop_assert_eq!(sys.reduce(&once, cfg).unwrap(), once.clone());
        prop_assert!(once.variables().iter().all(|j| j.idx.0[1] == 0));
    }
}

fn bv_spec() -> impl Strategy<Value = Spec> {
    prop::collection::vec((-2i64..=2, prop::collection::vec((0..12usize, 0..=1u8, 0..=0u8), 1..=3)), 1..=3)
}

fn bv_functional(st: &BVSetup, s: &Spec) -> LocalFunctional {
    let sp = &st.space;
    let syms = sp.graded_symbols();
    let p = build(&sp.ctx, &syms, s);
    // keep the parity of the first surviving term
    let parity = p.terms().next().map_or(Parity::Even, |(m, _)| m.parity());
    LocalFunctional { density: homogeneous(&p, parity), parity }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schouten_antisymmetry(a in bv_spec(), b in bv_spec()) {
        let st = BVSetup::new(&LieAlgebra::so3(), 1, SignConvention::Plus).unwrap();
        let (f, g) = (bv_functional(&st, &a), bv_functional(&st, &b));
        let fg = schouten_bracket(&st, &f, &g).unwrap();
        let gf = schouten_bracket(&st, &g, &f).unwrap();
        let shifted = (f.parity.bit() + 1) * (g.parity.bit() + 1) % 2 == 1;
        let sum = if shifted { fg.sub(&gf).unwrap() } else { fg.add(&gf).unwrap() };
        prop_assert!(st.is_trivial(&sum).unwrap());
    }

    #[test]
    fn schouten_jacobi(a in bv_spec(), b in bv_spec(), c in bv_spec()) {
        let st = BVSetup::new(&LieAlgebra::so3(), 1, SignConvention::Plus).unwrap();
        let (f, g, h) = (bv_functional(&st, &a), bv_functional(&st, &b), bv_functional(&st, &c));
        let br = |x: &LocalFunctional, y: &LocalFunctional| schouten_bracket(&st, x, y).unwrap();
        let lhs = br(&f, &br(&g, &h));
        let first = br(&br(&f, &g), &h);
        let second = br(&g, &br(&f, &h));
        let sign_neg = (f.parity.bit() + 1) * (g.parity.bit() + 1) % 2 == 1;
        let rhs = if sign_neg { first.sub(&second).unwrap() } else { first.add(&second).unwrap() };
        prop_assert!(st.is_trivial(&lhs.sub(&rhs).unwrap()).unwrap());
    }
}
