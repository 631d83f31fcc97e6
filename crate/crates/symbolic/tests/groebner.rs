use tensegrity_symbolic::groebner::{is_groebner, is_reduced};
use tensegrity_symbolic::{buchberger, normal_form_reduce, s_polynomial, verify_containment, MonomialOrder, Ring};

#[test]
fn reduction_examples() {
    let r = Ring::new(["x"]).unwrap();
    let f = r.parse("x^2").unwrap();
    assert_eq!(normal_form_reduce(&f, &[r.parse("x - 1").unwrap()], MonomialOrder::Lex).unwrap(), r.int(1));
    assert_eq!(normal_form_reduce(&f, &[], MonomialOrder::Lex).unwrap(), f);

    let r = Ring::new(["x11", "x12", "x14", "x21", "x22", "x24"]).unwrap();
    let f = r.parse("x11*x22 - x12*x21").unwrap();
    let p3: Vec<_> = ["x12", "x22", "x14", "x24"].iter().map(|s| r.parse(s).unwrap()).collect();
    assert!(normal_form_reduce(&f, &p3, MonomialOrder::DegRevLex).unwrap().is_zero());
}

#[test]
fn generator_reduces_by_its_own_basis() {
    let r = Ring::new(["x", "y", "z"]).unwrap();
    let f = r.parse("3*x^2*y - 2*y*z^2 + 7/5*x").unwrap();
    for order in [MonomialOrder::Lex, MonomialOrder::DegRevLex] {
        let gb = buchberger(std::slice::from_ref(&f), order).unwrap();
        assert!(gb.contains(&f).unwrap());
        assert_eq!(gb.generators(), [f.monic(order)]);
    }
}

#[test]
fn hand_s_polynomial_example() {
    let r = Ring::new(["x", "y"]).unwrap();
    let f1 = r.parse("x^2 + y^2").unwrap();
    let f2 = r.parse("x*y").unwrap();
    assert_eq!(s_polynomial(&f1, &f2, MonomialOrder::Lex), r.parse("y^3").unwrap());
    let gb = buchberger(&[f1, f2], MonomialOrder::Lex).unwrap();
    assert!(gb.generators().contains(&r.parse("y^3").unwrap()));
    assert!(is_groebner(gb.generators(), MonomialOrder::Lex).unwrap());
    assert!(is_reduced(gb.generators(), MonomialOrder::Lex));
}

#[test]
fn linear_system_eliminates() {
    let r = Ring::new(["x", "y"]).unwrap();
    let gens = [r.parse("x + y").unwrap(), r.parse("x - y").unwrap()];
    for order in [MonomialOrder::Lex, MonomialOrder::DegRevLex] {
        let gb = buchberger(&gens, order).unwrap();
        assert_eq!(gb.generators(), [r.gen(0), r.gen(1)]);
    }
}

#[test]
fn twisted_cubic_lex_basis() {
    let r = Ring::new(["x", "y", "z"]).unwrap();
    let gens = [r.parse("y - x^2").unwrap(), r.parse("z - x^3").unwrap()];
    let gb = buchberger(&gens, MonomialOrder::Lex).unwrap();
    let expect: Vec<_> = ["x^2 - y", "x*y - z", "x*z - y^2", "y^3 - z^2"].iter().map(|s| r.parse(s).unwrap()).collect();
    let mut got = gb.generators().to_vec();
    got.sort_by_key(|g| g.to_string());
    let mut want = expect;
    want.sort_by_key(|g| g.to_string());
    assert_eq!(got, want);
}

#[test]
fn ideal_contains_itself() {
    let r = Ring::new(["a", "b", "c"]).unwrap();
    let gens: Vec<_> = ["a^2 - b*c", "b^2 - a*c + 1", "a*b*c - 2"].iter().map(|s| r.parse(s).unwrap()).collect();
    assert!(verify_containment(&gens, &gens, MonomialOrder::DegRevLex).unwrap().contained);
}

#[test]
fn mismatched_rings_rejected() {
    let a = Ring::new(["x"]).unwrap();
    let b = Ring::new(["y"]).unwrap();
    assert!(normal_form_reduce(&a.gen(0), &[b.gen(0)], MonomialOrder::Lex).is_err());
    assert!(verify_containment(&[a.gen(0)], &[b.gen(0)], MonomialOrder::Lex).is_err());
}
