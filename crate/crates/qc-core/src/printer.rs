//! Minimal-parenthesis printer for the ASCII grammar.
//!
//! `parse(print(f))` returns a structurally equal formula; printing an
//! already-canonical text re-parses and re-prints to itself.

use crate::formula::Formula;

const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_NOT: u8 = 5;

/// Renders a formula in the ASCII grammar with as few parentheses as the
/// precedence table allows.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    go(f, 0, false, &mut out);
    out
}

// `min_prec` is the binding strength the context demands; `right_closed`
// is true when more input follows this subformula on the right, which is
// what forces parentheses around maximal-scope quantifiers.
fn go(f: &Formula, min_prec: u8, right_closed: bool, out: &mut String) {
    match f {
        Formula::Member(v, w) => {
            out.push_str(v.name());
            out.push_str(" in ");
            out.push_str(w.name());
        }
        Formula::Equal(v, w) => {
            out.push_str(v.name());
            out.push_str(" = ");
            out.push_str(w.name());
        }
        Formula::Not(g) => {
            out.push('~');
            go(g, PREC_NOT, right_closed, out);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let needs_paren = right_closed;
            if needs_paren {
                out.push('(');
            }
            out.push(if matches!(f, Formula::Forall(..)) {
                'A'
            } else {
                'E'
            });
            out.push(' ');
            out.push_str(v.name());
            out.push_str(". ");
            go(body, 0, false, out);
            if needs_paren {
                out.push(')');
            }
        }
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Implies(l, r)
        | Formula::Iff(l, r) => {
            let (prec, sym) = match f {
                Formula::And(..) => (PREC_AND, " & "),
                Formula::Or(..) => (PREC_OR, " | "),
                Formula::Implies(..) => (PREC_IMPLIES, " -> "),
                _ => (PREC_IFF, " <-> "),
            };
            let needs_paren = prec < min_prec;
            if needs_paren {
                out.push('(');
            }
            // Right-associative: the left child must bind strictly
            // tighter, the right child re-admits the same level.
            go(l, prec + 1, true, out);
            out.push_str(sym);
            go(r, prec, right_closed && !needs_paren, out);
            if needs_paren {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn roundtrip(text: &str) {
        let f = parse(text).unwrap();
        let printed = print(&f);
        let g = parse(&printed).unwrap_or_else(|e| {
            panic!("printed form `{printed}` does not re-parse: {e}")
        });
        assert_eq!(f, g, "print `{printed}` changed the tree");
    }

    #[test]
    fn prints_flat_conjunction() {
        let f = Formula::member("a", "z").and(Formula::member("a", "y"));
        assert_eq!(print(&f), "a in z & a in y");
    }

    #[test]
    fn parenthesizes_left_nested_conjunction() {
        let f = Formula::member("a", "z")
            .and(Formula::member("a", "y"))
            .and(Formula::member("b", "z"));
        assert_eq!(print(&f), "(a in z & a in y) & b in z");
        roundtrip(&print(&f));
    }

    #[test]
    fn quantifier_needs_parens_only_when_followed() {
        let open = Formula::member("p", "q")
            .and(Formula::forall("x", Formula::member("x", "q")));
        assert_eq!(print(&open), "p in q & A x. x in q");
        let closed = Formula::forall("x", Formula::member("x", "q"))
            .and(Formula::member("p", "q"));
        assert_eq!(print(&closed), "(A x. x in q) & p in q");
        roundtrip(&print(&open));
        roundtrip(&print(&closed));
    }

    #[test]
    fn negation_of_compound_parenthesized() {
        let f = Formula::member("p", "q").and(Formula::member("q", "p")).not();
        assert_eq!(print(&f), "~(p in q & q in p)");
        let g = Formula::member("p", "q").not().and(Formula::member("q", "p"));
        assert_eq!(print(&g), "~p in q & q in p");
        roundtrip(&print(&f));
        roundtrip(&print(&g));
    }

    #[test]
    fn negated_quantifier_inside_binary() {
        let f = Formula::forall("x", Formula::member("x", "y"))
            .not()
            .or(Formula::equal("y", "y"));
        let printed = print(&f);
        assert_eq!(printed, "~(A x. x in y) | y = y");
        roundtrip(&printed);
    }

    #[test]
    fn implication_chains_print_bare() {
        let f = Formula::equal("x", "x")
            .implies(Formula::equal("y", "y").implies(Formula::equal("z", "z")));
        assert_eq!(print(&f), "x = x -> y = y -> z = z");
        let g = Formula::equal("x", "x")
            .implies(Formula::equal("y", "y"))
            .implies(Formula::equal("z", "z"));
        assert_eq!(print(&g), "(x = x -> y = y) -> z = z");
    }

    #[test]
    fn print_parse_idempotent_on_text() {
        for text in [
            "A z. z in x -> E a. a in z",
            "~(x = y) & (E b. b in z) -> x in z | y in z",
            "A x. (A z. z in x -> E a. a in z) -> E y. ~(y in x)",
        ] {
            let once = print(&parse(text).unwrap());
            let twice = print(&parse(&once).unwrap());
            assert_eq!(once, twice);
        }
    }
}
