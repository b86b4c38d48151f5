use super::syntax::{FoFormula, Pred, Term};
use crate::error::{Error, Result};
use crate::modal::ModalFormula;

/// Replaces every `R(t1,t2)` by `S(t1,t2) | P(t1,t2)`; all other
/// constructors are copied.
pub fn sharp_translate(f: &FoFormula) -> Result<FoFormula> {
    let preds = f.predicates();
    if preds.contains(&Pred::S) || preds.contains(&Pred::P) {
        return Err(Error::Input("formula already uses S or P".into()));
    }
    Ok(sharp(f))
}

fn sharp(f: &FoFormula) -> FoFormula {
    use FoFormula as F;
    let b = |x: &F| Box::new(sharp(x));
    match f {
        F::Rel(_, a, c) => F::or(F::Rel(Pred::S, a.clone(), c.clone()), F::Rel(Pred::P, a.clone(), c.clone())),
        F::True | F::False | F::Eq(..) | F::Unary(..) => f.clone(),
        F::Not(a) => F::Not(b(a)),
        F::And(x, y) => F::And(b(x), b(y)),
        F::Or(x, y) => F::Or(b(x), b(y)),
        F::Implies(x, y) => F::Implies(b(x), b(y)),
        F::Exists(v, a) => F::Exists(v.clone(), b(a)),
        F::Forall(v, a) => F::Forall(v.clone(), b(a)),
    }
}

/// Standard translation with free variable `x`. Modal variable `p` becomes
/// the unary predicate `p`; each modality introduces `{x}_{depth}`.
pub fn standard_translation(m: &ModalFormula, x: &str) -> FoFormula {
    st(m, x, x, 1)
}

fn st(m: &ModalFormula, root: &str, cur: &str, depth: usize) -> FoFormula {
    use FoFormula as F;
    use ModalFormula as M;
    match m {
        M::True => F::True,
        M::False => F::False,
        M::Var(p) => F::Unary(p.clone(), Term::var(cur)),
        M::Not(a) => F::not(st(a, root, cur, depth)),
        M::And(a, b) => F::and(st(a, root, cur, depth), st(b, root, cur, depth)),
        M::Or(a, b) => F::or(st(a, root, cur, depth), st(b, root, cur, depth)),
        M::Implies(a, b) => F::implies(st(a, root, cur, depth), st(b, root, cur, depth)),
        M::Diamond(a) | M::Box(a) => {
            let y = format!("{root}_{depth}");
            let step = F::rel(Pred::R, Term::var(cur), Term::var(y.clone()));
            let body = st(a, root, &y, depth + 1);
            if matches!(m, M::Diamond(_)) {
                F::exists(y, F::and(step, body))
            } else {
                F::forall(y, F::implies(step, body))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::syntax::parse_fo;
    use super::*;
    use crate::modal::parse_modal;

    #[test]
    fn sharp_examples() {
        let f = sharp_translate(&parse_fo("R(x,y)").unwrap()).unwrap();
        assert_eq!(f.to_string(), "S(x,y) | P(x,y)");
        let g = sharp_translate(&parse_fo("x = y").unwrap()).unwrap();
        assert_eq!(g, parse_fo("x = y").unwrap());
        let h = sharp_translate(&parse_fo("exists x. ~R(x,d_h)").unwrap()).unwrap();
        assert_eq!(h, parse_fo("exists x. ~(S(x,d_h) | P(x,d_h))").unwrap());
        assert!(sharp_translate(&parse_fo("S(x,x)").unwrap()).is_err());
    }

    #[test]
    fn st_shape() {
        let m = parse_modal("<>[]p").unwrap();
        let f = standard_translation(&m, "x");
        assert_eq!(f.to_string(), "exists x_1. R(x,x_1) & (forall x_2. R(x_1,x_2) -> p(x_2))");
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
    }
}
