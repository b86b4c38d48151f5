use super::syntax::ModalFormula as M;

/// `[]p0 | [](p0 -> p1) | .. | [](p0 & .. & p(n-1) -> pn)`, valid at a point
/// exactly when it has at most `n` successors.
pub fn alt_n(n: usize) -> M {
    let p = |i: usize| M::var(format!("p{i}"));
    (0..=n)
        .map(|i| {
            if i == 0 {
                M::boxed(p(0))
            } else {
                let ante = (0..i).map(p).reduce(M::and).expect("i >= 1");
                M::boxed(M::implies(ante, p(i)))
            }
        })
        .reduce(M::or)
        .expect("at least one disjunct")
}

/// `p & ~q & [](p & q -> [](p & q)) & <>(p & q) -> [](p & q)`.
pub fn phi_formula() -> M {
    let pq = || M::and(M::var("p"), M::var("q"));
    let ante = M::and(
        M::and(M::and(M::var("p"), M::not(M::var("q"))), M::boxed(M::implies(pq(), M::boxed(pq())))),
        M::dia(pq()),
    );
    M::implies(ante, M::boxed(pq()))
}

/// `alt_n(n) | phi`; the two share no variables.
pub fn alt_or_phi(n: usize) -> M {
    M::or(alt_n(n), phi_formula())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::parse_modal;

    fn disjuncts(f: &M) -> usize {
        match f {
            M::Or(a, b) => disjuncts(a) + disjuncts(b),
            _ => 1,
        }
    }

    #[test]
    fn shapes() {
        assert_eq!(alt_n(0).to_string(), "[]p0");
        assert_eq!(alt_n(2).to_string(), "[]p0 | [](p0 -> p1) | [](p0 & p1 -> p2)");
        assert_eq!(disjuncts(&alt_n(2)), 3);
        let phi = phi_formula();
        assert_eq!(phi.to_string(), "p & ~q & [](p & q -> [](p & q)) & <>(p & q) -> [](p & q)");
        assert_eq!(parse_modal(&phi.to_string()).unwrap(), phi);
        assert!(alt_n(3).vars().is_disjoint(&phi.vars()));
    }
}
