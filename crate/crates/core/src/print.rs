//! Pretty printing in the same ASCII syntax the parser accepts.

use crate::formula::{Connective, Formula};

fn level(c: Connective) -> u8 {
    match c {
        Connective::Imp | Connective::Excl => 0,
        Connective::Or => 1,
        Connective::And => 2,
    }
}

/// Spellings of the constants and connectives.
pub(crate) struct Notation {
    pub top: &'static str,
    pub bot: &'static str,
    pub and: &'static str,
    pub or: &'static str,
    pub imp: &'static str,
    pub excl: &'static str,
}

pub(crate) const ASCII: Notation = Notation {
    top: "true",
    bot: "false",
    and: "&",
    or: "|",
    imp: "->",
    excl: "-<",
};

pub(crate) const LATEX: Notation = Notation {
    top: "\\top",
    bot: "\\bot",
    and: "\\land",
    or: "\\lor",
    imp: "\\to",
    excl: "\\mathrel{-\\!\\!<}",
};

impl Notation {
    fn token(&self, c: Connective) -> &'static str {
        match c {
            Connective::And => self.and,
            Connective::Or => self.or,
            Connective::Imp => self.imp,
            Connective::Excl => self.excl,
        }
    }
}

/// Prints with parentheses only where precedence or associativity needs
/// them, except that compound operands of `->` and `-<` are always
/// parenthesized for readability.
pub fn print_formula(f: &Formula) -> String {
    print_with(f, &ASCII)
}

pub(crate) fn print_with(f: &Formula, n: &Notation) -> String {
    let mut out = String::new();
    write_formula(f, n, &mut out);
    out
}

fn write_formula(f: &Formula, n: &Notation, out: &mut String) {
    match f {
        Formula::Atom(a) => out.push_str(a),
        Formula::Top => out.push_str(n.top),
        Formula::Bot => out.push_str(n.bot),
        _ => {
            let (c, l, r) = f.as_binary().unwrap();
            let wrap_l = needs_parens(c, l, false);
            let wrap_r = needs_parens(c, r, true);
            write_operand(l, wrap_l, n, out);
            out.push(' ');
            out.push_str(n.token(c));
            out.push(' ');
            write_operand(r, wrap_r, n, out);
        }
    }
}

fn write_operand(f: &Formula, wrap: bool, n: &Notation, out: &mut String) {
    if wrap {
        out.push('(');
        write_formula(f, n, out);
        out.push(')');
    } else {
        write_formula(f, n, out);
    }
}

fn needs_parens(parent: Connective, child: &Formula, right: bool) -> bool {
    let Some((c, _, _)) = child.as_binary() else {
        return false;
    };
    match parent {
        Connective::Imp | Connective::Excl => true,
        Connective::And | Connective::Or => level(c) < level(parent) || (c == parent && right),
    }
}

pub fn print_set<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> String {
    fs.into_iter()
        .map(print_formula)
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_plain;

    #[test]
    fn examples() {
        let p = || Formula::atom("p");
        let q = || Formula::atom("q");
        let r = || Formula::atom("r");
        assert_eq!(
            print_formula(&Formula::imp(p(), Formula::or(q(), r()))),
            "p -> (q | r)"
        );
        assert_eq!(
            print_formula(&Formula::or(Formula::and(p(), q()), r())),
            "p & q | r"
        );
        assert_eq!(
            print_formula(&Formula::and(p(), Formula::and(q(), r()))),
            "p & (q & r)"
        );
        assert_eq!(print_formula(&Formula::not(p())), "p -> false");
        let text = "p -> (q | (r -> ((p -< q) & r)))";
        assert_eq!(print_formula(&parse_plain(text).unwrap()), text);
    }

    #[test]
    fn round_trips_over_enumeration() {
        let atoms = vec!["p".to_string(), "q".to_string()];
        for f in crate::formula::enumerate_formulas(&atoms, 3) {
            let printed = print_formula(&f);
            assert_eq!(parse_plain(&printed).unwrap(), f, "{printed}");
        }
    }
}
