use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::order::{self, MonomialOrder};
use crate::ring::{add_into, leading, Monomial, RationalPoly};
use crate::{Error, Result};

pub const DEFAULT_PAIR_BUDGET: usize = 10_000;

/// A reduced Gröbner basis: monic generators sorted by descending leading
/// monomial, no leading monomial dividing any term of another generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    generators: Vec<RationalPoly>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn generators(&self) -> &[RationalPoly] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn reduce(&self, f: &RationalPoly) -> Result<RationalPoly> {
        normal_form_reduce(f, &self.generators, self.order)
    }

    pub fn contains(&self, f: &RationalPoly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }
}

/// Fully reduced remainder of `f` on division by `g`. Zero divisors are
/// ignored; an empty `g` returns `f`.
pub fn normal_form_reduce(f: &RationalPoly, g: &[RationalPoly], order: MonomialOrder) -> Result<RationalPoly> {
    for h in g {
        f.check_ring(h)?;
    }
    let lead: Vec<(usize, Monomial, BigRational)> = g
        .iter()
        .enumerate()
        .filter_map(|(k, h)| h.leading_term(order).map(|(m, c)| (k, m.clone(), c.clone())))
        .collect();
    let mut p: BTreeMap<Monomial, BigRational> = f.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let mut r = f.ring().zero();
    while let Some((m, c)) = leading(&p, order).map(|(m, c)| (m.clone(), c.clone())) {
        p.remove(&m);
        match lead.iter().find(|(_, lm, _)| order::divides(lm, &m)) {
            Some((k, lm, lc)) => {
                let shift = order::quotient(&m, lm);
                let q = c / lc;
                for (gm, gc) in g[*k].terms().filter(|(gm, _)| *gm != lm) {
                    add_into(&mut p, order::product(gm, &shift), -(gc * &q));
                }
            }
            None => r.add_term(m, c),
        }
    }
    Ok(r)
}

/// `lcm/LT(f)·f − lcm/LT(g)·g`.
pub fn s_polynomial(f: &RationalPoly, g: &RationalPoly, order: MonomialOrder) -> RationalPoly {
    let (Some((fm, fc)), Some((gm, gc))) = (f.leading_term(order), g.leading_term(order)) else {
        return f.ring().zero();
    };
    let l = order::lcm(fm, gm);
    let a = f.mul_term(&order::quotient(&l, fm), &(BigRational::one() / fc));
    let b = g.mul_term(&order::quotient(&l, gm), &(BigRational::one() / gc));
    a - b
}

pub fn buchberger(gens: &[RationalPoly], order: MonomialOrder) -> Result<GroebnerBasis> {
    buchberger_with_budget(gens, order, DEFAULT_PAIR_BUDGET)
}

/// Buchberger's algorithm with the coprime-leading-monomial criterion and the
/// normal selection strategy (smallest lcm first, ties by pair index).
pub fn buchberger_with_budget(gens: &[RationalPoly], order: MonomialOrder, budget: usize) -> Result<GroebnerBasis> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    for h in gens {
        first.check_ring(h)?;
    }
    let mut basis: Vec<RationalPoly> = Vec::new();
    let mut leads: Vec<Monomial> = Vec::new();
    for h in gens {
        let r = normal_form_reduce(h, &basis, order)?;
        if let Some(m) = r.leading_monomial(order) {
            leads.push(m.clone());
            basis.push(r.monic(order));
        }
    }
    let mut pairs: Vec<(usize, usize, Monomial)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j, order::lcm(&leads[i], &leads[j])));
        }
    }
    let mut processed = 0usize;
    while !pairs.is_empty() {
        let k = (0..pairs.len())
            .min_by(|&a, &b| {
                order
                    .cmp(&pairs[a].2, &pairs[b].2)
                    .then((pairs[a].0, pairs[a].1).cmp(&(pairs[b].0, pairs[b].1)))
            })
            .expect("nonempty");
        let (i, j, _) = pairs.swap_remove(k);
        if order::coprime(&leads[i], &leads[j]) {
            continue;
        }
        processed += 1;
        if processed > budget {
            return Err(Error::PairBudget { budget });
        }
        let r = normal_form_reduce(&s_polynomial(&basis[i], &basis[j], order), &basis, order)?;
        if let Some(m) = r.leading_monomial(order) {
            let m = m.clone();
            let n = basis.len();
            for (a, la) in leads.iter().enumerate() {
                pairs.push((a, n, order::lcm(la, &m)));
            }
            leads.push(m);
            basis.push(r.monic(order));
        }
    }
    Ok(GroebnerBasis { order, generators: reduce_basis(basis, leads, order)? })
}

fn reduce_basis(basis: Vec<RationalPoly>, leads: Vec<Monomial>, order: MonomialOrder) -> Result<Vec<RationalPoly>> {
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|j| {
                j != i && order::divides(&leads[j], &leads[i]) && (leads[j] != leads[i] || j < i)
            })
        })
        .collect();
    let minimal: Vec<RationalPoly> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut reduced = Vec::with_capacity(minimal.len());
    for (k, g) in minimal.iter().enumerate() {
        let others: Vec<RationalPoly> =
            minimal.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, h)| h.clone()).collect();
        let (lm, lc) = g.leading_term(order).expect("nonzero generator");
        let tail = g - &g.ring().monomial(lm.clone(), lc.clone());
        let mut r = normal_form_reduce(&tail, &others, order)?;
        r.add_term(lm.clone(), lc.clone());
        reduced.push(r.monic(order));
    }
    reduced.sort_by(|a, b| {
        order.cmp(b.leading_monomial(order).expect("nonzero"), a.leading_monomial(order).expect("nonzero"))
    });
    Ok(reduced)
}

/// Every S-polynomial of `basis` reduces to zero.
pub fn is_groebner(basis: &[RationalPoly], order: MonomialOrder) -> Result<bool> {
    for j in 0..basis.len() {
        for i in 0..j {
            if !normal_form_reduce(&s_polynomial(&basis[i], &basis[j], order), basis, order)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// No leading monomial divides any term of another generator, and all are monic.
pub fn is_reduced(basis: &[RationalPoly], order: MonomialOrder) -> bool {
    basis.iter().enumerate().all(|(i, g)| {
        let (lm, lc) = g.leading_term(order).expect("nonzero generator");
        lc.is_one()
            && basis
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .all(|(_, h)| h.terms().all(|(m, _)| !order::divides(lm, m)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ring;

    #[test]
    fn single_generator_made_monic() {
        let r = Ring::new(["x", "y"]).unwrap();
        let f = r.parse("3*x^2 - y").unwrap();
        let gb = buchberger(&[f], MonomialOrder::DegRevLex).unwrap();
        assert_eq!(gb.generators().len(), 1);
        assert_eq!(gb.generators()[0].to_string(), "x^2 - 1/3*y");
    }

    #[test]
    fn zero_generators_give_empty_basis() {
        let r = Ring::new(["x"]).unwrap();
        let gb = buchberger(&[r.zero()], MonomialOrder::Lex).unwrap();
        assert!(gb.is_empty());
        assert!(matches!(buchberger(&[], MonomialOrder::Lex), Err(Error::EmptyGenerators)));
    }

    #[test]
    fn budget_is_enforced() {
        let r = Ring::new(["x", "y", "z"]).unwrap();
        let gens: Vec<_> = ["x^2*y - z^3", "x*y^2 - z", "x*z - y^2 + 1"].iter().map(|s| r.parse(s).unwrap()).collect();
        assert!(matches!(buchberger_with_budget(&gens, MonomialOrder::Lex, 1), Err(Error::PairBudget { budget: 1 })));
    }
}
