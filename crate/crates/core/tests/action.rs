use algebroid_core::gforms::GForm;
use algebroid_core::liealg::LieAlgebra;
use algebroid_core::symkernel::{is_trivial_density, parse, Context, DiffPolynomial, Parity, SymbolId};
use algebroid_core::zcr::{bianchi_residual, connection_form, curvature, euler_lagrange_of_action, noether_residual};

fn setup(g: &LieAlgebra) -> (Context, Vec<Vec<SymbolId>>) {
    let mut ctx = Context::new(&['x', 'y', 'z']).unwrap();
    ctx.declare("u", Parity::Even).unwrap();
    let mut syms = Vec::new();
    for mu in ['x', 'y', 'z'] {
        let row = (1..=g.dim()).map(|k| ctx.declare(&format!("a{k}{mu}"), Parity::Even).unwrap()).collect();
        syms.push(row);
    }
    (ctx, syms)
}

fn shifted(ctx: &Context, syms: &[Vec<SymbolId>], g: &LieAlgebra, texts: &[[&str; 3]]) -> GForm {
    let rows: Vec<Vec<DiffPolynomial>> =
        texts.iter().map(|r| r.iter().take(g.dim()).map(|t| parse(t, ctx).unwrap()).collect()).collect();
    let shift = GForm::one_form(3, g.dim(), &rows).unwrap();
    connection_form(3, syms, ctx, Some(&shift)).unwrap()
}

#[test]
fn euler_lagrange_is_curvature() {
    for g in [LieAlgebra::so3(), LieAlgebra::sl2()] {
        let (ctx, syms) = setup(&g);
        let alpha = shifted(&ctx, &syms, &g, &[["u", "u_x^2", "0"], ["0", "u*u_y", "1"], ["u_z", "0", "u^2"]]);
        let el = euler_lagrange_of_action(&alpha, &syms, &g, &ctx).unwrap();
        let f = curvature(&alpha, &g, &ctx.jet_config()).unwrap();
        assert_eq!(el, f, "{}", g.name);
    }
}

#[test]
fn gauge_symmetry_of_action() {
    for g in [LieAlgebra::so3(), LieAlgebra::sl2()] {
        let (ctx, syms) = setup(&g);
        let alpha = shifted(&ctx, &syms, &g, &[["u", "0", "0"], ["0", "u_x", "0"], ["0", "0", "u*u_z"]]);
        let p: Vec<DiffPolynomial> = ["u", "u_y", "a1x"].iter().map(|t| parse(t, &ctx).unwrap()).collect();
        let r = noether_residual(&alpha, &syms, &p, &g, &ctx.jet_config()).unwrap();
        assert!(!r.is_zero());
        assert!(is_trivial_density(&r, &ctx).unwrap(), "{}", g.name);
    }
}

#[test]
fn bianchi_in_three_dimensions() {
    let g = LieAlgebra::so3();
    let (ctx, syms) = setup(&g);
    let alpha = shifted(&ctx, &syms, &g, &[["u", "u_{xy}", "0"], ["u^2", "0", "u_z"], ["0", "u_x*u", "1"]]);
    assert!(bianchi_residual(&alpha, &g, &ctx.jet_config()).unwrap().is_zero());
}
